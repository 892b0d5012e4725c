//! Cabin pitch cueing laws.
//!
//! * **True alignment** ([`rm_step`]): the cabin always sits at the steady
//!   alignment angle for the current simulator G-level.
//! * **Coherent alignment** ([`CohamState::step`]): the cabin is deliberately
//!   mis-aligned by up to the coherent alignment zone (CAZ) half-width. The
//!   aim is to spread each onset's rotation over a longer interval. A stick-based G
//!   prediction is max-selected with the actual G and a floor, smoothed by a
//!   second-order low-pass, and used as the upper breakpoint of a lookup that
//!   maps the actual G onto a mismatch in `[+caz, −caz]`.

mod gmap;
mod lowpass;

use thiserror::Error;

pub use gmap::{GMapError, GMapping};
pub use lowpass::SecondOrderLowPass;

use crate::interp::interp_clamped;
use crate::kinematics::{
    steady_yaw_rate, theta_true_rad, CabinAngle, CentrifugeConfig, GLevel, KinematicsError,
};
use crate::plant::CABIN_ANGLE_MAX_RAD;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CueingError {
    #[error("model G-level {nz} outside the mapped range [{lo}, {hi}]")]
    ModelGOutOfRange { nz: f64, lo: f64, hi: f64 },
    #[error("invalid cueing parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum CueingLaw {
    /// True alignment ("Rocket Man" pitch coordination).
    Rm,
    #[default]
    Coham,
}

impl CueingLaw {
    pub fn name(self) -> &'static str {
        match self {
            CueingLaw::Rm => "rm",
            CueingLaw::Coham => "coham",
        }
    }
}

impl std::fmt::Display for CueingLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohamParams {
    pub caz_halfwidth_rad: f64,
    /// Simulator G for level flight; lower breakpoint of the lookup.
    pub g_baseline: f64,
    /// Lower saturation of the max-selector.
    pub g_floor: f64,
    pub lp2_damping: f64,
    pub lp2_natfreq_radps: f64,
    /// Model G per unit of aft stick used for the prediction.
    pub lead_gain: f64,
    pub model_to_sim_g: GMapping,
}

impl Default for CohamParams {
    fn default() -> Self {
        Self {
            caz_halfwidth_rad: 5f64.to_radians(),
            g_baseline: 1.4,
            g_floor: 1.8,
            lp2_damping: 1.0,
            lp2_natfreq_radps: 1.0,
            lead_gain: 8.0,
            model_to_sim_g: GMapping::default(),
        }
    }
}

impl CohamParams {
    pub fn validate(&self) -> Result<(), CueingError> {
        let bad = |msg: String| Err(CueingError::InvalidParams(msg));
        if !(self.caz_halfwidth_rad > 0.0 && self.caz_halfwidth_rad < 30f64.to_radians()) {
            return bad(format!(
                "caz half-width must lie in (0, 30) deg, got {} deg",
                self.caz_halfwidth_rad.to_degrees()
            ));
        }
        if !(self.g_baseline >= 1.0 && self.g_baseline < self.g_floor && self.g_floor.is_finite()) {
            return bad(format!(
                "need 1 <= g_baseline < g_floor, got {} and {}",
                self.g_baseline, self.g_floor
            ));
        }
        if !(self.lp2_damping > 0.0 && self.lp2_natfreq_radps > 0.0)
            || !(self.lp2_damping.is_finite() && self.lp2_natfreq_radps.is_finite())
        {
            return bad("low-pass damping and natural frequency must be positive".into());
        }
        if !(self.lead_gain.is_finite() && self.lead_gain > 0.0) {
            return bad(format!(
                "lead_gain must be positive, got {}",
                self.lead_gain
            ));
        }
        Ok(())
    }
}

/// Predicted simulator G from the pitch stick.
pub fn g_lead(u_pitch: f64, p: &CohamParams) -> GLevel {
    let (lo, hi) = p.model_to_sim_g.domain();
    let model = (1.0 + p.lead_gain * u_pitch.max(0.0)).clamp(lo, hi);
    GLevel::new(p.model_to_sim_g.apply(model)).expect("mapping range is >= 1 G")
}

/// Simulator G commanded by the aircraft model's Nz.
pub fn g_act_from_model(nz_model: f64, p: &CohamParams) -> Result<GLevel, CueingError> {
    let (lo, hi) = p.model_to_sim_g.domain();
    if !(lo..=hi).contains(&nz_model) {
        return Err(CueingError::ModelGOutOfRange {
            nz: nz_model,
            lo,
            hi,
        });
    }
    Ok(GLevel::new(p.model_to_sim_g.apply(nz_model))?)
}

/// `max(g_act, g_lead, g_floor)`.
pub fn g_max_unf(g_act: GLevel, g_lead: GLevel, p: &CohamParams) -> GLevel {
    let v = g_act.value().max(g_lead.value()).max(p.g_floor);
    GLevel::new(v).expect("floor is >= 1 G")
}

/// One low-pass step producing the smoothed upper breakpoint.
pub fn lp2_step(x: GLevel, state: &mut SecondOrderLowPass, dt_s: f64) -> GLevel {
    debug_assert!(dt_s > 0.0 && dt_s <= 0.1);
    let y = state.step(x.value(), dt_s);
    // filter output of a >= 1 input can only dip below 1 with underdamping
    GLevel::new(y.max(1.0)).expect("finite")
}

/// Mismatch from the dynamic lookup: `g_act` over `[g_baseline, g_max_tilde]`
/// onto `[+caz, −caz]`, held at the end values outside the interval.
pub fn dynamic_lookup(g_act: GLevel, g_max_tilde: GLevel, p: &CohamParams) -> f64 {
    let caz = p.caz_halfwidth_rad;
    if g_max_tilde.value() <= p.g_baseline {
        return caz;
    }
    interp_clamped(
        g_act.value(),
        &[p.g_baseline, g_max_tilde.value()],
        &[caz, -caz],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CueingCommand {
    pub theta_cmd: CabinAngle,
    pub omega_cmd_radps: f64,
    /// `θ_cmd − θ_true(G_act)`.
    pub mismatch_rad: f64,
    pub g_act: GLevel,
    pub theta_true_rad: f64,
    /// The steady yaw rate for `g_act` is above the centrifuge's cap.
    pub yaw_cap_exceeded: bool,
}

fn command(g_act: GLevel, offset_rad: f64, cfg: &CentrifugeConfig) -> CueingCommand {
    let theta_true = theta_true_rad(g_act.value());
    let theta_cmd = (theta_true + offset_rad).clamp(0.0, CABIN_ANGLE_MAX_RAD);
    let omega = steady_yaw_rate(g_act.value(), cfg);
    CueingCommand {
        theta_cmd: CabinAngle::pitch(theta_cmd),
        omega_cmd_radps: omega,
        mismatch_rad: theta_cmd - theta_true,
        g_act,
        theta_true_rad: theta_true,
        yaw_cap_exceeded: omega > cfg.yaw_rate_max_radps,
    }
}

/// True alignment for a simulator G-level.
pub fn rm_command(g_act: GLevel, cfg: &CentrifugeConfig) -> CueingCommand {
    command(g_act, 0.0, cfg)
}

/// True alignment from the aircraft model's Nz.
pub fn rm_step(
    nz_model: f64,
    p: &CohamParams,
    cfg: &CentrifugeConfig,
) -> Result<CueingCommand, CueingError> {
    Ok(rm_command(g_act_from_model(nz_model, p)?, cfg))
}

/// Intermediate signals of the most recent coherent-alignment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohamSignals {
    pub g_lead: f64,
    pub g_act: f64,
    pub g_max_unf: f64,
    pub g_max_tilde: f64,
    pub u_coham_rad: f64,
}

/// Per-run state of the coherent-alignment filter.
#[derive(Debug, Clone)]
pub struct CohamState {
    params: CohamParams,
    lp2: SecondOrderLowPass,
    last: Option<CohamSignals>,
}

impl CohamState {
    pub fn new(params: CohamParams) -> Self {
        let lp2 = SecondOrderLowPass::new(params.lp2_natfreq_radps, params.lp2_damping);
        Self {
            params,
            lp2,
            last: None,
        }
    }

    pub fn params(&self) -> &CohamParams {
        &self.params
    }

    pub fn last(&self) -> Option<&CohamSignals> {
        self.last.as_ref()
    }

    /// Current lookup breakpoints: G interval and mismatch interval.
    pub fn table(&self) -> Option<([f64; 2], [f64; 2])> {
        let caz = self.params.caz_halfwidth_rad;
        self.last
            .map(|s| ([self.params.g_baseline, s.g_max_tilde], [caz, -caz]))
    }

    /// Full chain from stick and aircraft Nz.
    pub fn step(
        &mut self,
        u_pitch: f64,
        nz_model: f64,
        cfg: &CentrifugeConfig,
        dt_s: f64,
    ) -> Result<CueingCommand, CueingError> {
        let g_act = g_act_from_model(nz_model, &self.params)?;
        Ok(self.step_with_g_act(u_pitch, g_act, cfg, dt_s))
    }

    /// Full chain with an already-mapped simulator G-level.
    pub fn step_with_g_act(
        &mut self,
        u_pitch: f64,
        g_act: GLevel,
        cfg: &CentrifugeConfig,
        dt_s: f64,
    ) -> CueingCommand {
        let p = &self.params;
        let lead = g_lead(u_pitch, p);
        let unf = g_max_unf(g_act, lead, p);
        let tilde = lp2_step(unf, &mut self.lp2, dt_s);
        let u = dynamic_lookup(g_act, tilde, p);
        self.last = Some(CohamSignals {
            g_lead: lead.value(),
            g_act: g_act.value(),
            g_max_unf: unf.value(),
            g_max_tilde: tilde.value(),
            u_coham_rad: u,
        });
        command(g_act, u, cfg)
    }
}

/// Free-function form of [`CohamState::step`].
pub fn coham_step(
    u_pitch: f64,
    nz_model: f64,
    state: &mut CohamState,
    cfg: &CentrifugeConfig,
    dt_s: f64,
) -> Result<CueingCommand, CueingError> {
    state.step(u_pitch, nz_model, cfg, dt_s)
}
