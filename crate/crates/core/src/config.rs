//! Flat `key = value` configuration covering the centrifuge, the cueing
//! parameters, the aircraft surrogate and run options.
//!
//! Every key must appear exactly once. Unknown keys are rejected. Angular
//! quantities stored in radians may be given in degrees instead by swapping the
//! `rad` part of the suffix for `deg` (`caz_halfwidth_deg`,
//! `yaw_rate_max_degps`, `cabin_accel_max_degps2`). `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::cueing::{CohamParams, GMapping};
use crate::kinematics::CentrifugeConfig;
use crate::plant::AircraftParams;
use crate::sim::SimOptions;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value'")]
    Syntax { line: usize },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key '{key}' given more than once")]
    Duplicate { line: usize, key: String },
    #[error("missing config key '{0}'")]
    Missing(String),
    #[error("line {line}: bad value for '{key}': {msg}")]
    Value {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub centrifuge: CentrifugeConfig,
    pub coham: CohamParams,
    pub aircraft: AircraftParams,
    pub sim: SimOptions,
}

#[derive(Clone, Copy)]
enum Kind {
    Real,
    /// Radian-based quantity with a degree-based alternative key.
    Angular,
    Flag,
    Mapping,
}

const KEYS: &[(&str, Kind)] = &[
    ("arm_length_m", Kind::Real),
    ("gravity_mps2", Kind::Real),
    ("yaw_rate_max_radps", Kind::Angular),
    ("cabin_rate_max_radps", Kind::Angular),
    ("cabin_accel_max_radps2", Kind::Angular),
    ("cabin_natfreq_radps", Kind::Real),
    ("caz_halfwidth_rad", Kind::Angular),
    ("g_baseline", Kind::Real),
    ("g_floor", Kind::Real),
    ("lp2_damping", Kind::Real),
    ("lp2_natfreq_radps", Kind::Real),
    ("lead_gain", Kind::Real),
    ("model_to_sim_g", Kind::Mapping),
    ("stick_to_g_gain", Kind::Real),
    ("response_lag_s", Kind::Real),
    ("nz_min_g", Kind::Real),
    ("nz_max_g", Kind::Real),
    ("baseline_hold", Kind::Flag),
    ("baseline_ramp_s", Kind::Real),
];

fn degree_alias(key: &str) -> Option<String> {
    let (stem, unit) = key.rsplit_once('_')?;
    let unit = unit.strip_prefix("rad")?;
    Some(format!("{stem}_deg{unit}"))
}

enum Value {
    Real(f64),
    Flag(bool),
    Mapping(GMapping),
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        self.centrifuge.validate().map_err(|e| invalid(&e))?;
        self.coham.validate().map_err(|e| invalid(&e))?;
        self.aircraft.validate().map_err(|e| invalid(&e))?;
        self.sim.validate().map_err(|e| invalid(&e))?;
        let (lo, hi) = self.coham.model_to_sim_g.domain();
        if self.aircraft.nz_min_g < lo || self.aircraft.nz_max_g > hi {
            return Err(ConfigError::Invalid(format!(
                "aircraft Nz range [{}, {}] exceeds model_to_sim_g domain [{lo}, {hi}]",
                self.aircraft.nz_min_g, self.aircraft.nz_max_g
            )));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values: BTreeMap<&'static str, (usize, Value)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());

            let mut matched = None;
            for &(name, kind) in KEYS {
                if key == name {
                    matched = Some((name, kind, false));
                } else if matches!(kind, Kind::Angular)
                    && degree_alias(name).as_deref() == Some(key)
                {
                    matched = Some((name, kind, true));
                }
            }
            let (name, kind, degrees) = matched.ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            })?;
            let bad = |msg: String| ConfigError::Value {
                line,
                key: key.to_string(),
                msg,
            };
            let parsed = match kind {
                Kind::Real | Kind::Angular => {
                    let v: f64 = value
                        .parse()
                        .map_err(|_| bad(format!("'{value}' is not a number")))?;
                    if !v.is_finite() {
                        return Err(bad("not finite".into()));
                    }
                    Value::Real(if degrees { v.to_radians() } else { v })
                }
                Kind::Flag => Value::Flag(match value {
                    "true" | "1" | "yes" | "on" => true,
                    "false" | "0" | "no" | "off" => false,
                    _ => return Err(bad(format!("'{value}' is not a boolean"))),
                }),
                Kind::Mapping => Value::Mapping(
                    value
                        .parse()
                        .map_err(|e: crate::cueing::GMapError| bad(e.to_string()))?,
                ),
            };
            if values.insert(name, (line, parsed)).is_some() {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
        }

        if let Some((name, _)) = KEYS.iter().find(|(name, _)| !values.contains_key(name)) {
            return Err(ConfigError::Missing((*name).to_string()));
        }
        let mut take = |name: &str| values.remove(name).expect("checked above").1;
        let mut real = |name: &str| match take(name) {
            Value::Real(v) => v,
            _ => unreachable!("{name} is numeric"),
        };

        let centrifuge = CentrifugeConfig {
            arm_length_m: real("arm_length_m"),
            gravity_mps2: real("gravity_mps2"),
            yaw_rate_max_radps: real("yaw_rate_max_radps"),
            cabin_rate_max_radps: real("cabin_rate_max_radps"),
            cabin_accel_max_radps2: real("cabin_accel_max_radps2"),
            cabin_natfreq_radps: real("cabin_natfreq_radps"),
        };
        let coham_partial = (
            real("caz_halfwidth_rad"),
            real("g_baseline"),
            real("g_floor"),
            real("lp2_damping"),
            real("lp2_natfreq_radps"),
            real("lead_gain"),
        );
        let aircraft = AircraftParams {
            stick_to_g_gain: real("stick_to_g_gain"),
            response_lag_s: real("response_lag_s"),
            nz_min_g: real("nz_min_g"),
            nz_max_g: real("nz_max_g"),
        };
        let baseline_ramp_s = real("baseline_ramp_s");
        let Value::Mapping(model_to_sim_g) = values.remove("model_to_sim_g").unwrap().1 else {
            unreachable!()
        };
        let Value::Flag(baseline_hold) = values.remove("baseline_hold").unwrap().1 else {
            unreachable!()
        };

        let cfg = Config {
            centrifuge,
            coham: CohamParams {
                caz_halfwidth_rad: coham_partial.0,
                g_baseline: coham_partial.1,
                g_floor: coham_partial.2,
                lp2_damping: coham_partial.3,
                lp2_natfreq_radps: coham_partial.4,
                lead_gain: coham_partial.5,
                model_to_sim_g,
            },
            aircraft,
            sim: SimOptions {
                baseline_hold,
                baseline_ramp_s,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Serializes every key, radians throughout.
    pub fn to_kv_string(&self) -> String {
        let c = &self.centrifuge;
        let p = &self.coham;
        let a = &self.aircraft;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("arm_length_m", c.arm_length_m.to_string());
        kv("gravity_mps2", c.gravity_mps2.to_string());
        kv("yaw_rate_max_radps", c.yaw_rate_max_radps.to_string());
        kv("cabin_rate_max_radps", c.cabin_rate_max_radps.to_string());
        kv(
            "cabin_accel_max_radps2",
            c.cabin_accel_max_radps2.to_string(),
        );
        kv("cabin_natfreq_radps", c.cabin_natfreq_radps.to_string());
        kv("caz_halfwidth_rad", p.caz_halfwidth_rad.to_string());
        kv("g_baseline", p.g_baseline.to_string());
        kv("g_floor", p.g_floor.to_string());
        kv("lp2_damping", p.lp2_damping.to_string());
        kv("lp2_natfreq_radps", p.lp2_natfreq_radps.to_string());
        kv("lead_gain", p.lead_gain.to_string());
        kv("model_to_sim_g", p.model_to_sim_g.to_string());
        kv("stick_to_g_gain", a.stick_to_g_gain.to_string());
        kv("response_lag_s", a.response_lag_s.to_string());
        kv("nz_min_g", a.nz_min_g.to_string());
        kv("nz_max_g", a.nz_max_g.to_string());
        kv("baseline_hold", self.sim.baseline_hold.to_string());
        kv("baseline_ramp_s", self.sim.baseline_ramp_s.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = Config::default();
        assert_eq!(Config::parse(&cfg.to_kv_string()).unwrap(), cfg);
    }

    #[test]
    fn degree_keys_are_converted() {
        let text = Config::default()
            .to_kv_string()
            .replace(
                &format!("caz_halfwidth_rad = {}", 5f64.to_radians()),
                "caz_halfwidth_deg = 4 # tighter zone",
            )
            .replace(
                &format!("yaw_rate_max_radps = {}", 150f64.to_radians()),
                "yaw_rate_max_degps = 120",
            );
        let cfg = Config::parse(&text).unwrap();
        assert_eq!(cfg.coham.caz_halfwidth_rad, 4f64.to_radians());
        assert_eq!(cfg.centrifuge.yaw_rate_max_radps, 120f64.to_radians());
    }

    #[test]
    fn aliases() {
        assert_eq!(
            degree_alias("caz_halfwidth_rad").unwrap(),
            "caz_halfwidth_deg"
        );
        assert_eq!(
            degree_alias("cabin_accel_max_radps2").unwrap(),
            "cabin_accel_max_degps2"
        );
        assert_eq!(degree_alias("g_floor"), None);
    }

    #[test]
    fn missing_key_is_named() {
        let text: String = Config::default()
            .to_kv_string()
            .lines()
            .filter(|l| !l.starts_with("g_floor"))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = Config::parse(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::Missing(k) if k == "g_floor"));
        assert!(err.to_string().contains("g_floor"));
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        let base = Config::default().to_kv_string();
        let err = Config::parse(&format!("{base}wobble = 3\n")).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 20, .. }));
        let err = Config::parse(&format!("{base}g_floor = 1.9\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Duplicate { .. }));
        let err = Config::parse(&format!("{base}caz_halfwidth_deg = 5\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Duplicate { .. }));
    }

    #[test]
    fn bad_values() {
        let base = Config::default().to_kv_string();
        let err = Config::parse(&base.replace("baseline_hold = true", "baseline_hold = maybe"))
            .unwrap_err();
        assert!(matches!(err, ConfigError::Value { .. }));
        let err = Config::parse(&base.replace("g_floor = 1.8", "g_floor = 1.2")).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
        let err = Config::parse(&base.replace("g_floor = 1.8", "g_floor 1.8")).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { .. }));
        let err = Config::parse(&base.replace("nz_max_g = 9", "nz_max_g = 10")).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }
}
