use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Largest step the filters are specified for.
pub const MAX_DT_S: f64 = 0.1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: column '{column}': {msg}")]
    Field {
        line: usize,
        column: String,
        msg: String,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: time {t_s} does not increase (previous {prev_s})")]
    NonMonotonicTime { line: usize, t_s: f64, prev_s: f64 },
    #[error("line {line}: step {step_s} differs from sample interval {dt_s}")]
    NonUniformStep { line: usize, step_s: f64, dt_s: f64 },
    #[error("scenario needs at least two samples, found {0}")]
    TooShort(usize),
    #[error("sample interval {0} s outside (0, {MAX_DT_S}]")]
    BadInterval(f64),
    #[error("sample {index}: {msg}")]
    InvalidSample { index: usize, msg: String },
    #[error("scenario synthesis: {0}")]
    Synthesis(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScenarioSample {
    pub t_s: f64,
    pub u_pitch: f64,
    /// Lateral stick; carried through but unused by the pitch chain.
    pub u_roll: f64,
    /// Recorded aircraft Nz to replay instead of the aircraft surrogate.
    pub nz_model: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dt_s: f64,
    pub samples: Vec<ScenarioSample>,
}

pub const SCENARIO_HEADER: &str = "t_s,u_pitch,u_roll,nz_model";
const NZ_RANGE: (f64, f64) = (1.0, 9.0);

fn step_tolerance(dt_s: f64) -> f64 {
    1e-6 * dt_s + 1e-9
}

impl Scenario {
    /// Builds a scenario on a uniform grid `t = i·dt`.
    pub fn from_stick(dt_s: f64, u_pitch: impl IntoIterator<Item = f64>) -> Self {
        let samples = u_pitch
            .into_iter()
            .enumerate()
            .map(|(i, u)| ScenarioSample {
                t_s: i as f64 * dt_s,
                u_pitch: u,
                ..Default::default()
            })
            .collect();
        Self { dt_s, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t_s - a.t_s,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.samples.len() < 2 {
            return Err(ScenarioError::TooShort(self.samples.len()));
        }
        if !(self.dt_s > 0.0 && self.dt_s <= MAX_DT_S * (1.0 + 1e-9)) {
            return Err(ScenarioError::BadInterval(self.dt_s));
        }
        let tol = step_tolerance(self.dt_s);
        for (index, s) in self.samples.iter().enumerate() {
            let invalid = |msg: String| ScenarioError::InvalidSample { index, msg };
            if !(s.t_s.is_finite() && s.u_pitch.is_finite() && s.u_roll.is_finite()) {
                return Err(invalid("non-finite value".into()));
            }
            if let Some(nz) = s.nz_model {
                if !(NZ_RANGE.0..=NZ_RANGE.1).contains(&nz) {
                    return Err(invalid(format!("nz_model {nz} outside [1, 9]")));
                }
            }
            if index > 0 {
                let step = s.t_s - self.samples[index - 1].t_s;
                if step <= 0.0 || (step - self.dt_s).abs() > tol {
                    return Err(invalid(format!(
                        "time step {step} does not match interval {}",
                        self.dt_s
                    )));
                }
            }
        }
        Ok(())
    }

    /// Content hash over the exact bit patterns of every field.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.dt_s.to_bits().to_le_bytes());
        for s in &self.samples {
            h.update(s.t_s.to_bits().to_le_bytes());
            h.update(s.u_pitch.to_bits().to_le_bytes());
            h.update(s.u_roll.to_bits().to_le_bytes());
            match s.nz_model {
                Some(nz) => {
                    h.update([1u8]);
                    h.update(nz.to_bits().to_le_bytes());
                }
                None => h.update([0u8]),
            }
        }
        hex::encode(&h.finalize()[..16])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 32);
        out.push_str(SCENARIO_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = write!(out, "{},{},{},", s.t_s, s.u_pitch, s.u_roll);
            if let Some(nz) = s.nz_model {
                let _ = write!(out, "{nz}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self, ScenarioError> {
        let mut lines = text
            .split('\n')
            .enumerate()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
            .filter(|(_, l)| !l.trim().is_empty());

        let (header_line, header) = lines.next().ok_or(ScenarioError::Header {
            line: 1,
            msg: "missing header".into(),
        })?;
        let columns: Vec<&str> = header.split(',').map(str::trim).collect();
        let mut idx_t = None;
        let mut idx_pitch = None;
        let mut idx_roll = None;
        let mut idx_nz = None;
        for (i, name) in columns.iter().enumerate() {
            let slot = match *name {
                "t_s" => &mut idx_t,
                "u_pitch" => &mut idx_pitch,
                "u_roll" => &mut idx_roll,
                "nz_model" => &mut idx_nz,
                other => {
                    return Err(ScenarioError::Header {
                        line: header_line,
                        msg: format!("unknown column '{other}'"),
                    })
                }
            };
            if slot.replace(i).is_some() {
                return Err(ScenarioError::Header {
                    line: header_line,
                    msg: format!("duplicate column '{name}'"),
                });
            }
        }
        let (Some(idx_t), Some(idx_pitch)) = (idx_t, idx_pitch) else {
            return Err(ScenarioError::Header {
                line: header_line,
                msg: "header must contain t_s and u_pitch".into(),
            });
        };

        let mut samples = Vec::new();
        let mut lines_of = Vec::new();
        for (line, row) in lines {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != columns.len() {
                return Err(ScenarioError::FieldCount {
                    line,
                    expected: columns.len(),
                    found: fields.len(),
                });
            }
            let num = |i: usize| -> Result<f64, ScenarioError> {
                let err = |msg: &str| ScenarioError::Field {
                    line,
                    column: columns[i].to_string(),
                    msg: msg.to_string(),
                };
                let v: f64 = fields[i].parse().map_err(|_| err("not a number"))?;
                if !v.is_finite() {
                    return Err(err("not finite"));
                }
                Ok(v)
            };
            let nz_model = match idx_nz {
                Some(i) if !fields[i].is_empty() => {
                    let nz = num(i)?;
                    if !(NZ_RANGE.0..=NZ_RANGE.1).contains(&nz) {
                        return Err(ScenarioError::Field {
                            line,
                            column: "nz_model".into(),
                            msg: format!("{nz} outside [1, 9]"),
                        });
                    }
                    Some(nz)
                }
                _ => None,
            };
            samples.push(ScenarioSample {
                t_s: num(idx_t)?,
                u_pitch: num(idx_pitch)?,
                u_roll: idx_roll.map(num).transpose()?.unwrap_or(0.0),
                nz_model,
            });
            lines_of.push(line);
        }
        if samples.len() < 2 {
            return Err(ScenarioError::TooShort(samples.len()));
        }

        let dt_s = samples[1].t_s - samples[0].t_s;
        for i in 1..samples.len() {
            let (prev_s, t_s) = (samples[i - 1].t_s, samples[i].t_s);
            if t_s <= prev_s {
                return Err(ScenarioError::NonMonotonicTime {
                    line: lines_of[i],
                    t_s,
                    prev_s,
                });
            }
            if (t_s - prev_s - dt_s).abs() > step_tolerance(dt_s) {
                return Err(ScenarioError::NonUniformStep {
                    line: lines_of[i],
                    step_s: t_s - prev_s,
                    dt_s,
                });
            }
        }
        if dt_s.is_nan() || dt_s > MAX_DT_S * (1.0 + 1e-9) {
            return Err(ScenarioError::BadInterval(dt_s));
        }
        Ok(Scenario { dt_s, samples })
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::parse_csv(&text)
}

pub fn write_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, scenario.to_csv()).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three_rows() -> Scenario {
        Scenario {
            dt_s: 0.01,
            samples: vec![
                ScenarioSample {
                    t_s: 0.0,
                    u_pitch: 0.0,
                    u_roll: 0.0,
                    nz_model: None,
                },
                ScenarioSample {
                    t_s: 0.01,
                    u_pitch: 0.25,
                    u_roll: -0.1,
                    nz_model: Some(2.5),
                },
                ScenarioSample {
                    t_s: 0.02,
                    u_pitch: 0.5,
                    u_roll: 0.0,
                    nz_model: None,
                },
            ],
        }
    }

    #[test]
    fn write_then_parse_is_identity() {
        let s = three_rows();
        assert_eq!(Scenario::parse_csv(&s.to_csv()).unwrap(), s);
    }

    #[test]
    fn decreasing_time_names_the_line() {
        let text = "t_s,u_pitch\n0.0,0\n0.1,0\n0.05,0\n";
        match Scenario::parse_csv(text) {
            Err(ScenarioError::NonMonotonicTime { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn optional_columns_default() {
        let s = Scenario::parse_csv("t_s,u_pitch\n0,0.1\n0.01,0.2\n").unwrap();
        assert_eq!(s.samples[1].u_roll, 0.0);
        assert_eq!(s.samples[1].nz_model, None);
        assert_eq!(s.dt_s, 0.01);
    }

    #[test]
    fn reordered_columns_are_accepted() {
        let s = Scenario::parse_csv("u_pitch,t_s\n0.3,0\n0.4,0.05\n").unwrap();
        assert_eq!(s.samples[1].u_pitch, 0.4);
        assert_eq!(s.samples[1].t_s, 0.05);
    }

    #[test]
    fn malformed_inputs() {
        let err = Scenario::parse_csv("time,u_pitch\n0,0\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Header { line: 1, .. }));
        let err = Scenario::parse_csv("t_s\n0\n0.1\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Header { .. }));
        let err = Scenario::parse_csv("t_s,u_pitch\n0,0\n0.01,NaN\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Field { line: 3, .. }), "{err}");
        let err = Scenario::parse_csv("t_s,u_pitch\n0,0\n0.01,x\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
        let err = Scenario::parse_csv("t_s,u_pitch\n0,0\n0.01\n").unwrap_err();
        assert!(matches!(err, ScenarioError::FieldCount { line: 3, .. }));
        let err = Scenario::parse_csv("t_s,u_pitch\n0,0\n0.01,0\n0.03,0\n").unwrap_err();
        assert!(matches!(err, ScenarioError::NonUniformStep { line: 4, .. }));
        let err = Scenario::parse_csv("t_s,u_pitch,nz_model\n0,0,0.5\n0.01,0,1\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Field { line: 2, .. }));
        let err = Scenario::parse_csv("t_s,u_pitch\n0,0\n").unwrap_err();
        assert!(matches!(err, ScenarioError::TooShort(1)));
        let err = Scenario::parse_csv("t_s,u_pitch\n0,0\n0.5,0\n").unwrap_err();
        assert!(matches!(err, ScenarioError::BadInterval(_)));
    }

    #[test]
    fn hash_tracks_content() {
        let a = three_rows();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.samples[2].u_pitch = 0.5000001;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 32);
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            dt in 0.001f64..0.1,
            rows in prop::collection::vec(
                (-1.5f64..1.5, -1.0f64..1.0, prop::option::of(1.0f64..9.0)), 2..40),
        ) {
            let s = Scenario {
                dt_s: dt,
                samples: rows.iter().enumerate().map(|(i, &(u, r, nz))| ScenarioSample {
                    t_s: i as f64 * dt, u_pitch: u, u_roll: r, nz_model: nz,
                }).collect(),
            };
            let back = Scenario::parse_csv(&s.to_csv()).unwrap();
            prop_assert_eq!(back.samples, s.samples);
        }
    }
}
