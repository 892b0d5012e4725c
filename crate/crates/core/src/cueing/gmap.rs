use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::interp::interp_clamped;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GMapError {
    #[error("G mapping needs at least two breakpoints")]
    TooFewPoints,
    #[error("model G breakpoints must be strictly increasing and start at or above 1 G")]
    BadModelAxis,
    #[error("simulator G breakpoints must be non-decreasing and at least 1 G")]
    BadSimAxis,
    #[error("cannot parse breakpoint '{0}', expected MODEL:SIM")]
    Parse(String),
}

/// Piecewise-linear map from aircraft-model G to simulator G.
#[derive(Debug, Clone, PartialEq)]
pub struct GMapping {
    model: Vec<f64>,
    sim: Vec<f64>,
}

impl Default for GMapping {
    /// Affine map of 1–9 G onto 1–3 G.
    fn default() -> Self {
        Self {
            model: vec![1.0, 9.0],
            sim: vec![1.0, 3.0],
        }
    }
}

impl GMapping {
    pub fn new(points: &[(f64, f64)]) -> Result<Self, GMapError> {
        if points.len() < 2 {
            return Err(GMapError::TooFewPoints);
        }
        let model: Vec<f64> = points.iter().map(|p| p.0).collect();
        let sim: Vec<f64> = points.iter().map(|p| p.1).collect();
        if !model.iter().all(|v| v.is_finite())
            || model[0] < 1.0
            || model.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(GMapError::BadModelAxis);
        }
        if !sim.iter().all(|v| v.is_finite() && *v >= 1.0) || sim.windows(2).any(|w| w[1] < w[0]) {
            return Err(GMapError::BadSimAxis);
        }
        Ok(Self { model, sim })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.model[0], *self.model.last().unwrap())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.sim[0], *self.sim.last().unwrap())
    }

    /// Maps a model G-level; values outside the domain take the end values.
    pub fn apply(&self, model_g: f64) -> f64 {
        interp_clamped(model_g, &self.model, &self.sim)
    }
}

impl fmt::Display for GMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, s)) in self.model.iter().zip(&self.sim).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}:{s}")?;
        }
        Ok(())
    }
}

impl FromStr for GMapping {
    type Err = GMapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let points = s
            .split(',')
            .map(|item| {
                let item = item.trim();
                let (m, g) = item
                    .split_once(':')
                    .ok_or_else(|| GMapError::Parse(item.to_string()))?;
                let m = m
                    .trim()
                    .parse()
                    .map_err(|_| GMapError::Parse(item.to_string()))?;
                let g = g
                    .trim()
                    .parse()
                    .map_err(|_| GMapError::Parse(item.to_string()))?;
                Ok((m, g))
            })
            .collect::<Result<Vec<_>, _>>()?;
        GMapping::new(&points)
    }
}
