//! Seeded synthetic piloting task: a short level cruise, a high-G phase of
//! smooth sustained pulls, then cruise to the end.
//!
//! Pull targets are model G-levels. Two pulls go to 7 G; the rest lie in
//! `[3.05, 5]` G and are drawn from an exponential density truncated to that
//! interval. The density is sampled at stratified quantiles so the most common
//! peaks sit just above 3 G for any seed. Holds are long enough for the aircraft
//! lag to settle within 1% of the target.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::{Scenario, ScenarioError, ScenarioSample, MAX_DT_S};

pub const MIN_DURATION_S: f64 = 60.0;
pub const EXTREME_PEAK_G: f64 = 7.0;
const PEAK_RANGE_G: (f64, f64) = (3.05, 5.0);
const PEAK_SCALE_G: f64 = 0.6;
const LEAD_IN_S: f64 = 15.0;
const STICK_GAIN: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pull {
    pub start_s: f64,
    pub rise_s: f64,
    pub hold_s: f64,
    pub release_s: f64,
    pub target_g: f64,
}

impl Pull {
    fn stick(&self) -> f64 {
        (self.target_g - 1.0) / STICK_GAIN
    }

    fn end_s(&self) -> f64 {
        self.start_s + self.rise_s + self.hold_s + self.release_s
    }

    /// Pitch stick at time `t`, zero outside the pull.
    pub fn u_pitch(&self, t: f64) -> f64 {
        let tau = t - self.start_s;
        let u = self.stick();
        if tau < 0.0 {
            0.0
        } else if tau < self.rise_s {
            u * 0.5 * (1.0 - (PI * tau / self.rise_s).cos())
        } else if tau < self.rise_s + self.hold_s {
            u
        } else if tau < self.rise_s + self.hold_s + self.release_s {
            let r = tau - self.rise_s - self.hold_s;
            u * 0.5 * (1.0 + (PI * r / self.release_s).cos())
        } else {
            0.0
        }
    }

    /// Bank-in roll input during the second before the pull.
    fn u_roll(&self, t: f64, sign: f64) -> f64 {
        let tau = t - (self.start_s - 1.0);
        if (0.0..1.0).contains(&tau) {
            sign * 0.3 * (PI * tau).sin()
        } else {
            0.0
        }
    }
}

/// Pull schedule for a seed and duration.
pub fn canyon_pulls(seed: u64, duration_s: f64) -> Result<Vec<Pull>, ScenarioError> {
    if !(duration_s >= MIN_DURATION_S && duration_s.is_finite()) {
        return Err(ScenarioError::Synthesis(format!(
            "duration must be at least {MIN_DURATION_S} s, got {duration_s}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let high_end = duration_s - (0.25 * duration_s).max(15.0);

    let mut pulls = Vec::new();
    let mut cursor = LEAD_IN_S;
    loop {
        let rise_s = rng.gen_range(1.5..2.5);
        let hold_s = rng.gen_range(4.0..6.0);
        let release_s = rng.gen_range(1.5..2.5);
        let recovery_s = rng.gen_range(5.0..8.0);
        let pull = Pull {
            start_s: cursor,
            rise_s,
            hold_s,
            release_s,
            target_g: 0.0,
        };
        if pull.end_s() > high_end {
            break;
        }
        cursor = pull.end_s() + recovery_s;
        pulls.push(pull);
    }
    debug_assert!(pulls.len() >= 2, "60 s leaves room for two pulls");

    let regular = pulls.len() - 2;
    let mut targets: Vec<f64> = (0..regular)
        .map(|i| {
            let q = (i as f64 + rng.gen::<f64>()) / regular as f64;
            truncated_exponential_quantile(q)
        })
        .collect();
    targets.extend([EXTREME_PEAK_G; 2]);
    targets.shuffle(&mut rng);
    for (pull, target) in pulls.iter_mut().zip(targets) {
        pull.target_g = target;
    }
    Ok(pulls)
}

fn truncated_exponential_quantile(q: f64) -> f64 {
    let (lo, hi) = PEAK_RANGE_G;
    let mass = 1.0 - (-(hi - lo) / PEAK_SCALE_G).exp();
    lo - PEAK_SCALE_G * (1.0 - q * mass).ln()
}

pub fn synth_canyon_scenario(
    seed: u64,
    duration_s: f64,
    dt_s: f64,
) -> Result<Scenario, ScenarioError> {
    if !(dt_s > 0.0 && dt_s <= MAX_DT_S) {
        return Err(ScenarioError::BadInterval(dt_s));
    }
    let pulls = canyon_pulls(seed, duration_s)?;
    let n = (duration_s / dt_s).round() as usize + 1;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 * dt_s;
            let mut sample = ScenarioSample {
                t_s: t,
                ..Default::default()
            };
            for (k, p) in pulls.iter().enumerate() {
                sample.u_pitch += p.u_pitch(t);
                sample.u_roll += p.u_roll(t, if k % 2 == 0 { 1.0 } else { -1.0 });
            }
            sample
        })
        .collect();
    Ok(Scenario { dt_s, samples })
}
