//! Head-centric angular accelerations from cabin tilt inside a spinning frame.
//!
//! With the head fixed to the cabin, tilting by `θ` about the head x-axis while
//! the frame yaws at `Ω` gives a head-frame angular velocity
//! `[θ̇, Ω·sin θ, Ω·cos θ]`. Its time derivative is
//!
//! ```text
//! αx = θ̈
//! αy =  Ω·θ̇·cos θ + Ω̇·sin θ
//! αz = −Ω·θ̇·sin θ + Ω̇·cos θ
//! ```
//!
//! The y and z channels are the cross-coupled (Coriolis) stimulus.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoriolisError {
    #[error("sample {index}: time {t_s} does not increase (previous {prev_s})")]
    NonMonotonicTime { index: usize, t_s: f64, prev_s: f64 },
    #[error("sample {index}: non-finite value")]
    NonFinite { index: usize },
    #[error("length mismatch: {samples} samples vs {alphas} accelerations")]
    LengthMismatch { samples: usize, alphas: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotationSample {
    pub t_s: f64,
    pub theta_rad: f64,
    pub theta_dot_radps: f64,
    pub theta_ddot_radps2: f64,
    pub omega_radps: f64,
    pub omega_dot_radps2: f64,
}

impl RotationSample {
    fn is_finite(&self) -> bool {
        [
            self.t_s,
            self.theta_rad,
            self.theta_dot_radps,
            self.theta_ddot_radps2,
            self.omega_radps,
            self.omega_dot_radps2,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeadAlpha {
    pub ax_radps2: f64,
    pub ay_radps2: f64,
    pub az_radps2: f64,
}

impl HeadAlpha {
    /// Magnitude of the cross-coupled (y, z) part.
    pub fn cross_coupled(&self) -> f64 {
        self.ay_radps2.hypot(self.az_radps2)
    }
}

pub fn head_alpha(s: &RotationSample) -> HeadAlpha {
    let (sin, cos) = s.theta_rad.sin_cos();
    let coupling = s.omega_radps * s.theta_dot_radps;
    HeadAlpha {
        ax_radps2: s.theta_ddot_radps2,
        ay_radps2: coupling * cos + s.omega_dot_radps2 * sin,
        az_radps2: -coupling * sin + s.omega_dot_radps2 * cos,
    }
}

pub fn head_alpha_series(series: &[RotationSample]) -> Result<Vec<HeadAlpha>, CoriolisError> {
    let mut prev: Option<f64> = None;
    for (index, s) in series.iter().enumerate() {
        if !s.is_finite() {
            return Err(CoriolisError::NonFinite { index });
        }
        if let Some(prev_s) = prev {
            if s.t_s <= prev_s {
                return Err(CoriolisError::NonMonotonicTime {
                    index,
                    t_s: s.t_s,
                    prev_s,
                });
            }
        }
        prev = Some(s.t_s);
    }
    Ok(series.iter().map(head_alpha).collect())
}

/// Scalar summary of the cross-coupled channels. The x channel is excluded
/// because it is the commanded tilt acceleration itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoriolisSeverity {
    pub peak_y_radps2: f64,
    pub peak_z_radps2: f64,
    /// Peak of `√(αy² + αz²)`.
    pub peak_yz_radps2: f64,
    /// RMS of `√(αy² + αz²)`.
    pub rms_yz_radps2: f64,
}

pub fn coriolis_severity(
    series: &[RotationSample],
    alphas: &[HeadAlpha],
) -> Result<CoriolisSeverity, CoriolisError> {
    if series.len() != alphas.len() {
        return Err(CoriolisError::LengthMismatch {
            samples: series.len(),
            alphas: alphas.len(),
        });
    }
    Ok(severity_of(alphas))
}

pub(crate) fn severity_of(alphas: &[HeadAlpha]) -> CoriolisSeverity {
    if alphas.is_empty() {
        return CoriolisSeverity::default();
    }
    let mut out = CoriolisSeverity::default();
    let mut sum_sq = 0.0;
    for a in alphas {
        out.peak_y_radps2 = out.peak_y_radps2.max(a.ay_radps2.abs());
        out.peak_z_radps2 = out.peak_z_radps2.max(a.az_radps2.abs());
        out.peak_yz_radps2 = out.peak_yz_radps2.max(a.cross_coupled());
        sum_sq += a.ay_radps2 * a.ay_radps2 + a.az_radps2 * a.az_radps2;
    }
    out.rms_yz_radps2 = (sum_sq / alphas.len() as f64).sqrt();
    out
}
