//! Quasi-steady centrifuge geometry.
//!
//! A cabin at radius `R` on an arm spinning at `Ω` sees a radial acceleration
//! `Ω²R`. Together with gravity this sets the magnitude of the gravito-inertial
//! acceleration (GIA, reported in G units) and the cabin tilt that keeps the
//! occupant's z-axis aligned with it.
//!
//! The tangential term `Ω̇R` enters [`gia_magnitude`] only. The inverse maps
//! ([`theta_true`], [`omega_for_g`]) assume steady spin.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("G-level {0} is below 1 G")]
    BelowOneG(f64),
    #[error("G-level {0} is not finite")]
    NonFinite(f64),
    #[error("yaw rate {required:.4} rad/s for {g:.4} G exceeds the cap of {cap:.4} rad/s")]
    YawRateCap { g: f64, required: f64, cap: f64 },
    #[error("invalid centrifuge configuration: {0}")]
    InvalidConfig(String),
}

/// Geometry and actuator limits of the centrifuge.
#[derive(Debug, Clone, PartialEq)]
pub struct CentrifugeConfig {
    /// Distance from the central yaw axis to the cabin, m.
    pub arm_length_m: f64,
    pub gravity_mps2: f64,
    pub yaw_rate_max_radps: f64,
    pub cabin_rate_max_radps: f64,
    pub cabin_accel_max_radps2: f64,
    /// Natural frequency of the cabin pitch servo loop.
    pub cabin_natfreq_radps: f64,
}

impl Default for CentrifugeConfig {
    fn default() -> Self {
        Self {
            arm_length_m: 4.0,
            gravity_mps2: STANDARD_GRAVITY,
            yaw_rate_max_radps: 150f64.to_radians(),
            cabin_rate_max_radps: 1.0,
            cabin_accel_max_radps2: 2.0,
            cabin_natfreq_radps: 8.0,
        }
    }
}

impl CentrifugeConfig {
    pub fn validate(&self) -> Result<(), KinematicsError> {
        let checks = [
            ("arm_length_m", self.arm_length_m),
            ("gravity_mps2", self.gravity_mps2),
            ("yaw_rate_max_radps", self.yaw_rate_max_radps),
            ("cabin_rate_max_radps", self.cabin_rate_max_radps),
            ("cabin_accel_max_radps2", self.cabin_accel_max_radps2),
            ("cabin_natfreq_radps", self.cabin_natfreq_radps),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(KinematicsError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Magnitude of the gravito-inertial acceleration in multiples of `g`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GLevel(f64);

impl GLevel {
    pub const ONE: GLevel = GLevel(1.0);

    pub fn new(value_g: f64) -> Result<Self, KinematicsError> {
        if !value_g.is_finite() {
            return Err(KinematicsError::NonFinite(value_g));
        }
        if value_g < 1.0 {
            return Err(KinematicsError::BelowOneG(value_g));
        }
        Ok(GLevel(value_g))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiltAxis {
    #[default]
    Pitch,
    Roll,
}

/// Cabin tilt from upright, radians, in `[0, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CabinAngle {
    pub theta_rad: f64,
    pub axis: TiltAxis,
}

impl CabinAngle {
    pub fn pitch(theta_rad: f64) -> Self {
        debug_assert!((0.0..FRAC_PI_2).contains(&theta_rad));
        Self {
            theta_rad,
            axis: TiltAxis::Pitch,
        }
    }

    pub fn degrees(self) -> f64 {
        self.theta_rad.to_degrees()
    }
}

/// Radial (centripetal) acceleration `Ω²R`.
pub fn centripetal_accel(omega_radps: f64, cfg: &CentrifugeConfig) -> f64 {
    omega_radps * omega_radps * cfg.arm_length_m
}

/// GIA magnitude `√(a_t² + a_R² + g²) / g`.
pub fn gia_magnitude(a_t: f64, a_r: f64, cfg: &CentrifugeConfig) -> GLevel {
    let g = cfg.gravity_mps2;
    // always >= 1 since the numerator includes g²
    GLevel((a_t * a_t + a_r * a_r + g * g).sqrt() / g)
}

/// Radial acceleration required for a steady G-level: `g·√(G²−1)`.
pub fn radial_accel_for_g(g: GLevel, cfg: &CentrifugeConfig) -> f64 {
    cfg.gravity_mps2 * (g.0 * g.0 - 1.0).max(0.0).sqrt()
}

/// Cabin tilt that aligns the occupant with the steady GIA vector.
///
/// `arctan(a_R/g)` with `a_R = g·√(G²−1)`, i.e. `arctan(√(G²−1))`.
pub fn theta_true(g: GLevel, _cfg: &CentrifugeConfig) -> CabinAngle {
    CabinAngle::pitch(theta_true_rad(g.0))
}

/// Unchecked scalar form of [`theta_true`]; `g` below 1 is treated as 1.
pub fn theta_true_rad(g: f64) -> f64 {
    (g * g - 1.0).max(0.0).sqrt().atan()
}

/// Steady yaw rate producing `g`, rejecting rates above the configured cap.
pub fn omega_for_g(g: GLevel, cfg: &CentrifugeConfig) -> Result<f64, KinematicsError> {
    let required = steady_yaw_rate(g.0, cfg);
    if required > cfg.yaw_rate_max_radps {
        return Err(KinematicsError::YawRateCap {
            g: g.0,
            required,
            cap: cfg.yaw_rate_max_radps,
        });
    }
    Ok(required)
}

/// `√(g·√(G²−1)/R)` without the cap check. Values below 1 G map to rest.
pub fn steady_yaw_rate(g: f64, cfg: &CentrifugeConfig) -> f64 {
    (cfg.gravity_mps2 * (g * g - 1.0).max(0.0).sqrt() / cfg.arm_length_m).sqrt()
}

/// `dΩ/dG` of [`steady_yaw_rate`]. Unbounded as G approaches 1, so `None`
/// is returned there.
pub fn steady_yaw_rate_slope(g: f64, cfg: &CentrifugeConfig) -> Option<f64> {
    let s = g * g - 1.0;
    if s <= 1e-12 {
        return None;
    }
    let omega = steady_yaw_rate(g, cfg);
    // Ω² = (g_acc/R)·√(G²−1)  =>  2Ω·dΩ = (g_acc/R)·G/√(G²−1)·dG
    Some(cfg.gravity_mps2 / cfg.arm_length_m * g / s.sqrt() / (2.0 * omega))
}

/// Steady G-level for a given yaw rate (tangential term ignored).
pub fn g_for_omega(omega_radps: f64, cfg: &CentrifugeConfig) -> f64 {
    gia_magnitude(0.0, centripetal_accel(omega_radps, cfg), cfg).value()
}
