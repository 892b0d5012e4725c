//! Fixed-step scenario engine.
//!
//! A run goes in two passes. The first drives the aircraft surrogate and maps
//! Nz to simulator G, which does not depend on the cueing law. That yields the
//! yaw-rate series and its derivative. The second pass runs the cueing law
//! and the cabin actuator causally, step by step.

mod scenario;
mod synth;

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

pub use scenario::{
    load_scenario, write_scenario, Scenario, ScenarioError, ScenarioSample, MAX_DT_S,
    SCENARIO_HEADER,
};
pub use synth::{canyon_pulls, synth_canyon_scenario, Pull, EXTREME_PEAK_G, MIN_DURATION_S};

use crate::config::Config;
use crate::coriolis::{head_alpha, RotationSample};
use crate::cueing::{rm_command, CohamState, CueingError, CueingLaw};
use crate::kinematics::{
    g_for_omega, steady_yaw_rate, steady_yaw_rate_slope, CentrifugeConfig, GLevel,
};
use crate::plant::{actuator_step, ActuatorState, Aircraft};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Cueing(#[from] CueingError),
    #[error("invalid simulation options: {0}")]
    Options(String),
}

/// How level flight is presented on the centrifuge.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Hold simulator G at or above the cueing baseline (1.4 G by default)
    /// instead of letting level flight map to 1 G rest.
    pub baseline_hold: bool,
    /// Spin-up time from rest to the baseline yaw rate at the start of a run.
    /// The yaw rate ramps linearly. Zero starts the run already at baseline.
    pub baseline_ramp_s: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            baseline_hold: true,
            baseline_ramp_s: 10.0,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.baseline_ramp_s >= 0.0 && self.baseline_ramp_s.is_finite()) {
            return Err(SimError::Options(format!(
                "baseline_ramp_s must be >= 0, got {}",
                self.baseline_ramp_s
            )));
        }
        Ok(())
    }
}

/// One row of a run trace.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceRecord {
    pub t_s: f64,
    pub u_pitch: f64,
    pub nz_model: f64,
    pub g_act: f64,
    pub g_lead: f64,
    pub g_max_unf: f64,
    pub g_max_tilde: f64,
    pub theta_true_rad: f64,
    pub theta_cmd_rad: f64,
    pub theta_rad: f64,
    pub theta_dot_radps: f64,
    pub theta_ddot_radps2: f64,
    pub omega_radps: f64,
    pub omega_dot_radps2: f64,
    pub alpha_x_radps2: f64,
    pub alpha_y_radps2: f64,
    pub alpha_z_radps2: f64,
    pub mismatch_rad: f64,
    pub yaw_cap_exceeded: bool,
}

pub const TRACE_HEADER: &str = "t_s,u_pitch,nz_model,g_act,g_lead,g_max_unf,g_max_tilde,\
theta_true_rad,theta_cmd_rad,theta_rad,theta_dot_radps,theta_ddot_radps2,omega_radps,\
omega_dot_radps2,alpha_x_radps2,alpha_y_radps2,alpha_z_radps2,mismatch_rad,yaw_cap_exceeded";

impl TraceRecord {
    pub fn rotation_sample(&self) -> RotationSample {
        RotationSample {
            t_s: self.t_s,
            theta_rad: self.theta_rad,
            theta_dot_radps: self.theta_dot_radps,
            theta_ddot_radps2: self.theta_ddot_radps2,
            omega_radps: self.omega_radps,
            omega_dot_radps2: self.omega_dot_radps2,
        }
    }

    fn write_csv_row(&self, out: &mut String) {
        let r = self;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t_s,
            r.u_pitch,
            r.nz_model,
            r.g_act,
            r.g_lead,
            r.g_max_unf,
            r.g_max_tilde,
            r.theta_true_rad,
            r.theta_cmd_rad,
            r.theta_rad,
            r.theta_dot_radps,
            r.theta_ddot_radps2,
            r.omega_radps,
            r.omega_dot_radps2,
            r.alpha_x_radps2,
            r.alpha_y_radps2,
            r.alpha_z_radps2,
            r.mismatch_rad,
            u8::from(r.yaw_cap_exceeded),
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub law: CueingLaw,
    pub scenario_hash: String,
    pub dt_s: f64,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn yaw_cap_flags(&self) -> usize {
        self.records.iter().filter(|r| r.yaw_cap_exceeded).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.records.len() * 320);
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            r.write_csv_row(&mut out);
        }
        out
    }
}

pub fn write_trace(trace: &RunTrace, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, trace.to_csv())
}

/// Lower bound on simulator G imposed by baseline hold at time `t` into the run.
fn baseline_floor(t_s: f64, baseline_g: f64, opts: &SimOptions, cfg: &CentrifugeConfig) -> f64 {
    if !opts.baseline_hold {
        return 1.0;
    }
    if opts.baseline_ramp_s <= 0.0 || t_s >= opts.baseline_ramp_s {
        return baseline_g;
    }
    let omega = steady_yaw_rate(baseline_g, cfg) * (t_s / opts.baseline_ramp_s);
    g_for_omega(omega, cfg).min(baseline_g)
}

/// Derivative of a uniformly sampled series: central differences inside,
/// one-sided at the ends.
fn differentiate(xs: &[f64], dt: f64) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| match (i, n) {
            (_, 0 | 1) => 0.0,
            (0, _) => (xs[1] - xs[0]) / dt,
            (i, n) if i == n - 1 => (xs[i] - xs[i - 1]) / dt,
            (i, _) => (xs[i + 1] - xs[i - 1]) / (2.0 * dt),
        })
        .collect()
}

/// Simulator G and model Nz per step; independent of the cueing law.
fn g_profile(scenario: &Scenario, cfg: &Config) -> Result<(Vec<f64>, Vec<f64>), SimError> {
    let dt = scenario.dt_s;
    let first = scenario.samples[0];
    let mut aircraft = Aircraft::new(cfg.aircraft.clone(), first.u_pitch);
    let t0 = first.t_s;
    let mut nz = Vec::with_capacity(scenario.len());
    let mut g_act = Vec::with_capacity(scenario.len());
    for (i, s) in scenario.samples.iter().enumerate() {
        let surrogate = if i == 0 {
            aircraft.nz()
        } else {
            aircraft.step(s.u_pitch, dt)
        };
        let n = s.nz_model.unwrap_or(surrogate);
        let mapped = crate::cueing::g_act_from_model(n, &cfg.coham)?.value();
        let floor = baseline_floor(s.t_s - t0, cfg.coham.g_baseline, &cfg.sim, &cfg.centrifuge);
        nz.push(n);
        g_act.push(mapped.max(floor));
    }
    Ok((nz, g_act))
}

/// Runs one cueing law over a scenario.
pub fn run(scenario: &Scenario, law: CueingLaw, cfg: &Config) -> Result<RunTrace, SimError> {
    scenario.validate()?;
    cfg.coham.validate()?;
    cfg.sim.validate()?;

    let dt = scenario.dt_s;
    let cent = &cfg.centrifuge;
    let (nz, g_act) = g_profile(scenario, cfg)?;

    let omega: Vec<f64> = g_act.iter().map(|&g| steady_yaw_rate(g, cent)).collect();
    let g_rate = differentiate(&g_act, dt);
    let omega_fd = differentiate(&omega, dt);
    let omega_dot: Vec<f64> = (0..g_act.len())
        .map(|i| {
            if g_rate[i] == 0.0 {
                0.0
            } else {
                match steady_yaw_rate_slope(g_act[i], cent) {
                    Some(slope) => slope * g_rate[i],
                    None => omega_fd[i],
                }
            }
        })
        .collect();

    let mut coham = CohamState::new(cfg.coham.clone());
    let mut actuator: Option<ActuatorState> = None;
    let mut records = Vec::with_capacity(scenario.len());

    for (i, s) in scenario.samples.iter().enumerate() {
        let g = GLevel::new(g_act[i]).expect("mapped G is >= 1");
        // the predictor runs for both laws so traces carry the same diagnostics
        let coham_cmd = coham.step_with_g_act(s.u_pitch, g, cent, dt);
        let cmd = match law {
            CueingLaw::Coham => coham_cmd,
            CueingLaw::Rm => rm_command(g, cent),
        };
        let theta_cmd = cmd.theta_cmd.theta_rad;
        let state = match actuator {
            None => ActuatorState::at_rest(theta_cmd),
            Some(prev) => actuator_step(theta_cmd, &prev, cent, dt),
        };
        actuator = Some(state);

        let signals = coham.last().expect("stepped above");
        let mut rec = TraceRecord {
            t_s: s.t_s,
            u_pitch: s.u_pitch,
            nz_model: nz[i],
            g_act: g_act[i],
            g_lead: signals.g_lead,
            g_max_unf: signals.g_max_unf,
            g_max_tilde: signals.g_max_tilde,
            theta_true_rad: cmd.theta_true_rad,
            theta_cmd_rad: theta_cmd,
            theta_rad: state.theta_rad,
            theta_dot_radps: state.theta_dot_radps,
            theta_ddot_radps2: state.theta_ddot_radps2,
            omega_radps: omega[i],
            omega_dot_radps2: omega_dot[i],
            mismatch_rad: cmd.mismatch_rad,
            yaw_cap_exceeded: omega[i] > cent.yaw_rate_max_radps,
            ..Default::default()
        };
        let alpha = head_alpha(&rec.rotation_sample());
        rec.alpha_x_radps2 = alpha.ax_radps2;
        rec.alpha_y_radps2 = alpha.ay_radps2;
        rec.alpha_z_radps2 = alpha.az_radps2;
        records.push(rec);
    }

    Ok(RunTrace {
        law,
        scenario_hash: scenario.hash(),
        dt_s: dt,
        records,
    })
}

/// Runs both laws concurrently over the same scenario.
pub fn run_both(scenario: &Scenario, cfg: &Config) -> Result<(RunTrace, RunTrace), SimError> {
    std::thread::scope(|scope| {
        let rm = scope.spawn(|| run(scenario, CueingLaw::Rm, cfg));
        let coham = run(scenario, CueingLaw::Coham, cfg);
        let rm = rm.join().expect("rm run panicked");
        Ok((rm?, coham?))
    })
}
