//! Surrogate dynamics: stick → Nz for the aircraft and commanded → achieved
//! tilt for the cabin.

use thiserror::Error;

use crate::kinematics::CentrifugeConfig;

/// Upper bound on the cabin tilt, 89°.
pub const CABIN_ANGLE_MAX_RAD: f64 = 89.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid aircraft parameters: {0}")]
pub struct AircraftParamsError(String);

#[derive(Debug, Clone, PartialEq)]
pub struct AircraftParams {
    /// Steady Nz increase per unit of aft stick.
    pub stick_to_g_gain: f64,
    /// First-order time constant from stick to Nz.
    pub response_lag_s: f64,
    pub nz_min_g: f64,
    pub nz_max_g: f64,
}

impl Default for AircraftParams {
    fn default() -> Self {
        Self {
            stick_to_g_gain: 8.0,
            response_lag_s: 1.0,
            nz_min_g: 1.0,
            nz_max_g: 9.0,
        }
    }
}

impl AircraftParams {
    pub fn validate(&self) -> Result<(), AircraftParamsError> {
        if !(self.stick_to_g_gain.is_finite() && self.stick_to_g_gain > 0.0) {
            return Err(AircraftParamsError(format!(
                "stick_to_g_gain must be positive, got {}",
                self.stick_to_g_gain
            )));
        }
        if !(self.response_lag_s.is_finite() && self.response_lag_s > 0.0) {
            return Err(AircraftParamsError(format!(
                "response_lag_s must be positive, got {}",
                self.response_lag_s
            )));
        }
        if !(self.nz_min_g >= 1.0 && self.nz_min_g < self.nz_max_g && self.nz_max_g.is_finite()) {
            return Err(AircraftParamsError(format!(
                "need 1 <= nz_min_g < nz_max_g, got [{}, {}]",
                self.nz_min_g, self.nz_max_g
            )));
        }
        Ok(())
    }

    /// Steady-state Nz for a held stick position. Push maps to the floor.
    pub fn steady_nz(&self, u_pitch: f64) -> f64 {
        (1.0 + self.stick_to_g_gain * u_pitch.max(0.0)).clamp(self.nz_min_g, self.nz_max_g)
    }
}

/// Stick → Nz as a first-order lag, discretized exactly for piecewise-constant
/// stick input.
#[derive(Debug, Clone)]
pub struct Aircraft {
    params: AircraftParams,
    nz: f64,
}

impl Aircraft {
    /// Starts in trim for the given stick position.
    pub fn new(params: AircraftParams, u_pitch: f64) -> Self {
        let nz = params.steady_nz(u_pitch);
        Self { params, nz }
    }

    pub fn nz(&self) -> f64 {
        self.nz
    }

    pub fn step(&mut self, u_pitch: f64, dt_s: f64) -> f64 {
        debug_assert!(dt_s > 0.0);
        let target = self.params.steady_nz(u_pitch);
        let decay = (-dt_s / self.params.response_lag_s).exp();
        self.nz =
            (target + (self.nz - target) * decay).clamp(self.params.nz_min_g, self.params.nz_max_g);
        self.nz
    }
}

/// Single-step form of [`Aircraft::step`].
pub fn aircraft_step(u_pitch: f64, state: &mut Aircraft, dt_s: f64) -> f64 {
    state.step(u_pitch, dt_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorState {
    pub theta_rad: f64,
    pub theta_dot_radps: f64,
    pub theta_ddot_radps2: f64,
}

impl ActuatorState {
    pub fn at_rest(theta_rad: f64) -> Self {
        Self {
            theta_rad,
            ..Self::default()
        }
    }
}

/// Critically damped cabin servo with symmetric rate and acceleration limits.
///
/// The acceleration demand `ωn²(θc − θ) − 2ωn·θ̇` is clamped to the
/// acceleration cap, the rate is integrated and clamped to the rate cap, then
/// the angle is integrated with the new rate (semi-implicit Euler). The
/// reported `θ̈` is the acceleration actually realized over the step.
pub fn actuator_step(
    theta_cmd_rad: f64,
    state: &ActuatorState,
    cfg: &CentrifugeConfig,
    dt_s: f64,
) -> ActuatorState {
    debug_assert!(dt_s > 0.0);
    let wn = cfg.cabin_natfreq_radps;
    let rate_max = cfg.cabin_rate_max_radps;
    let accel_max = cfg.cabin_accel_max_radps2;

    let demand = wn * wn * (theta_cmd_rad - state.theta_rad) - 2.0 * wn * state.theta_dot_radps;
    let accel = demand.clamp(-accel_max, accel_max);
    let mut rate = (state.theta_dot_radps + accel * dt_s).clamp(-rate_max, rate_max);
    let mut theta = state.theta_rad + rate * dt_s;

    if !(0.0..=CABIN_ANGLE_MAX_RAD).contains(&theta) {
        theta = theta.clamp(0.0, CABIN_ANGLE_MAX_RAD);
        rate = (theta - state.theta_rad) / dt_s;
    }
    ActuatorState {
        theta_rad: theta,
        theta_dot_radps: rate,
        theta_ddot_radps2: (rate - state.theta_dot_radps) / dt_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn settle(aircraft: &mut Aircraft, u: f64, secs: f64, dt: f64) -> f64 {
        let n = (secs / dt).round() as usize;
        for _ in 0..n {
            aircraft.step(u, dt);
        }
        aircraft.nz()
    }

    #[test]
    fn level_flight_is_one_g() {
        let mut ac = Aircraft::new(AircraftParams::default(), 0.5);
        assert_abs_diff_eq!(settle(&mut ac, 0.0, 20.0, 0.01), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn full_scale_stick_reaches_nine_g() {
        let p = AircraftParams::default();
        let mut ac = Aircraft::new(p.clone(), 0.0);
        let nz = settle(
            &mut ac,
            8.0 / p.stick_to_g_gain,
            5.0 * p.response_lag_s,
            0.01,
        );
        // 5 time constants leave e^-5 of the 8 G rise
        assert_abs_diff_eq!(nz, 9.0 - 8.0 * (-5.0f64).exp(), epsilon = 1e-9);
        assert!((9.0 - nz) / 8.0 < 0.01);
        assert_abs_diff_eq!(
            settle(&mut ac, 8.0 / p.stick_to_g_gain, 20.0, 0.01),
            9.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn one_time_constant_gives_63_percent() {
        let p = AircraftParams::default();
        let mut ac = Aircraft::new(p, 0.0);
        let nz = settle(&mut ac, 0.25, 1.0, 0.001);
        let frac = (nz - 1.0) / 2.0;
        assert_abs_diff_eq!(frac, 1.0 - (-1.0f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn push_maps_to_floor_and_output_is_clamped() {
        let p = AircraftParams::default();
        assert_eq!(p.steady_nz(-1.0), 1.0);
        assert_eq!(p.steady_nz(5.0), 9.0);
    }

    #[test]
    fn steady_nz_monotone() {
        let p = AircraftParams::default();
        let mut prev = p.steady_nz(0.0);
        for i in 1..=100 {
            let nz = p.steady_nz(i as f64 / 100.0);
            assert!(nz > prev);
            prev = nz;
        }
    }

    #[test]
    fn params_validation() {
        assert!(AircraftParams::default().validate().is_ok());
        let bad = AircraftParams {
            nz_min_g: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = AircraftParams {
            response_lag_s: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn actuator_equilibrium() {
        let cfg = CentrifugeConfig::default();
        let s = ActuatorState::at_rest(0.7);
        assert_eq!(actuator_step(0.7, &s, &cfg, 0.01), s);
    }

    #[test]
    fn actuator_rate_saturates() {
        let cfg = CentrifugeConfig {
            cabin_rate_max_radps: 0.5,
            ..Default::default()
        };
        let dt = 0.01;
        let mut s = ActuatorState::at_rest(0.1);
        let mut peak: f64 = 0.0;
        for _ in 0..1000 {
            let next = actuator_step(1.3, &s, &cfg, dt);
            assert!((next.theta_rad - s.theta_rad).abs() <= 0.5 * dt + 1e-15);
            assert!(next.theta_ddot_radps2.abs() <= cfg.cabin_accel_max_radps2 + 1e-9);
            peak = peak.max(next.theta_dot_radps.abs());
            s = next;
        }
        assert_eq!(peak, 0.5);
        assert_abs_diff_eq!(s.theta_rad, 1.3, epsilon = 1e-3);
    }

    #[test]
    fn actuator_small_step_follows_critically_damped_response() {
        let cfg = CentrifugeConfig::default();
        let wn = cfg.cabin_natfreq_radps;
        let dt = 0.001;
        let step = 0.01;
        let mut s = ActuatorState::at_rest(0.5);
        let mut t = 0.0;
        let analytic = |t: f64| step * (1.0 - (1.0 + wn * t) * (-wn * t).exp());
        let mut checked = 0;
        while t < 6.0 / wn {
            s = actuator_step(0.5 + step, &s, &cfg, dt);
            t += dt;
            assert!(s.theta_dot_radps.abs() < cfg.cabin_rate_max_radps);
            assert_abs_diff_eq!(s.theta_rad - 0.5, analytic(t), epsilon = 2e-2 * step);
            checked += 1;
        }
        assert!(checked > 100);
        // 1 − 6e⁻⁵ ≈ 96% at 5/ωn; past 2% band by 6/ωn
        assert_abs_diff_eq!(analytic(5.0 / wn) / step, 0.9596, epsilon = 1e-4);
        assert!((s.theta_rad - 0.5 - step).abs() < 0.02 * step);
    }

    #[test]
    fn actuator_angle_clamped() {
        let cfg = CentrifugeConfig::default();
        let mut s = ActuatorState::at_rest(0.01);
        for _ in 0..200 {
            s = actuator_step(-0.5, &s, &cfg, 0.01);
            assert!(s.theta_rad >= 0.0);
        }
        let mut s = ActuatorState::at_rest(CABIN_ANGLE_MAX_RAD - 0.01);
        for _ in 0..200 {
            s = actuator_step(2.0, &s, &cfg, 0.01);
            assert!(s.theta_rad <= CABIN_ANGLE_MAX_RAD);
        }
    }
}
