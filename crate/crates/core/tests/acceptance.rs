//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line regardless of output capture.

use std::process::ExitCode;
use std::time::Instant;

use coham::config::Config;
use coham::coriolis::{head_alpha, RotationSample};
use coham::cueing::CueingLaw;
use coham::kinematics::{omega_for_g, theta_true, CentrifugeConfig, GLevel};
use coham::metrics::{analyze, compare};
use coham::sim::{run, run_both, synth_canyon_scenario, RunTrace, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CAZ_TOL_RAD: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn reference_scenario() -> Scenario {
    synth_canyon_scenario(7, 300.0, 0.01).unwrap()
}

fn theta_true_of(g: f64) -> f64 {
    (g * g - 1.0).max(0.0).sqrt().atan()
}

/// Rough pilot stick: random piecewise-linear segments with occasional steps.
fn random_stick_scenario(rng: &mut ChaCha8Rng, duration_s: f64, dt_s: f64) -> Scenario {
    let n = (duration_s / dt_s).round() as usize + 1;
    let mut u = Vec::with_capacity(n);
    let mut level = 0.0;
    let mut seg_left = 0usize;
    let mut slope = 0.0;
    for _ in 0..n {
        if seg_left == 0 {
            seg_left = (rng.gen_range(0.2..4.0) / dt_s) as usize + 1;
            let target = if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(-0.3..1.0)
            };
            if rng.gen_bool(0.2) {
                level = target;
                slope = 0.0;
            } else {
                slope = (target - level) / seg_left as f64;
            }
        }
        level += slope;
        seg_left -= 1;
        u.push(level + rng.gen_range(-0.02..0.02));
    }
    Scenario::from_stick(dt_s, u)
}

fn caz_violations(trace: &RunTrace, halfwidth: f64) -> (usize, f64) {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for r in &trace.records {
        let m = r.theta_cmd_rad - theta_true_of(r.g_act);
        worst = worst.max(m.abs());
        if m.abs() > halfwidth + CAZ_TOL_RAD || r.mismatch_rad.abs() > halfwidth + CAZ_TOL_RAD {
            count += 1;
        }
    }
    (count, worst)
}

fn criterion_1_caz_bound() -> Outcome {
    let cfg = Config::default();
    let half = cfg.coham.caz_halfwidth_rad;
    let started = Instant::now();
    let results: Vec<(usize, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE ^ k);
            let duration = rng.gen_range(60.0..=300.0);
            let dt = if rng.gen_bool(0.5) { 0.01 } else { 0.02 };
            let scenario = if k % 2 == 0 {
                synth_canyon_scenario(rng.gen(), duration, dt).unwrap()
            } else {
                random_stick_scenario(&mut rng, duration, dt)
            };
            let trace = run(&scenario, CueingLaw::Coham, &cfg).unwrap();
            caz_violations(&trace, half)
        })
        .chain(rayon::iter::once(()).map(|_| {
            let trace = run(&reference_scenario(), CueingLaw::Coham, &cfg).unwrap();
            caz_violations(&trace, half)
        }))
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let secs = started.elapsed().as_secs_f64();
    outcome(
        violations == 0 && secs < 60.0,
        format!(
            "{} runs, {violations} violations, worst |mismatch| {:.6} deg, {secs:.1} s",
            results.len(),
            worst.to_degrees()
        ),
    )
}

fn criterion_2_rate_reduction() -> Outcome {
    let cfg = Config::default();
    let (rm, co) = run_both(&reference_scenario(), &cfg).unwrap();
    let cmp = compare(
        &analyze(&rm, &cfg.coham).unwrap(),
        &analyze(&co, &cfg.coham).unwrap(),
    )
    .unwrap();
    let global = cmp.get("theta_cmd_rate_peak_radps").unwrap().ratio;
    let achieved = cmp.get("theta_dot_peak_radps").unwrap().ratio;
    let best = cmp.best_onset_ratio().unwrap_or(f64::INFINITY);
    let best_achieved = cmp.best_onset_theta_dot_ratio().unwrap_or(f64::INFINITY);
    outcome(
        global <= 0.7 && best <= 0.55 && achieved <= 0.7 && best_achieved <= 0.55,
        format!(
            "commanded global {global:.3} (<= 0.7), best onset {best:.3} (<= 0.55); \
achieved global {achieved:.3}, best onset {best_achieved:.3}"
        ),
    )
}

fn criterion_3_kinematics() -> Outcome {
    let cfg = CentrifugeConfig::default();
    let t14 = theta_true(GLevel::new(1.4).unwrap(), &cfg).degrees();
    let t3 = theta_true(GLevel::new(3.0).unwrap(), &cfg).degrees();
    let w2 = omega_for_g(GLevel::new(2.0).unwrap(), &cfg).unwrap();
    let pass =
        (t14 - 44.42).abs() <= 0.15 && (w2 - 2.061).abs() <= 0.005 && (t3 - 70.53).abs() <= 0.1;
    outcome(
        pass,
        format!(
            "theta_true(1.4) {t14:.3} deg, omega(2.0) {w2:.4} rad/s, theta_true(3.0) {t3:.3} deg"
        ),
    )
}

/// Smooth test trajectory: sums of sinusoids with analytic derivatives.
struct Smooth {
    terms: Vec<(f64, f64, f64)>,
    offset: f64,
}

impl Smooth {
    fn random(rng: &mut ChaCha8Rng, offset: f64, amp: f64) -> Self {
        let terms = (0..3)
            .map(|_| {
                (
                    rng.gen_range(0.0..amp),
                    rng.gen_range(0.1..3.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        Self { terms, offset }
    }

    fn eval(&self, t: f64) -> [f64; 3] {
        let mut out = [self.offset, 0.0, 0.0];
        for &(a, w, p) in &self.terms {
            let x = w * t + p;
            out[0] += a * x.sin();
            out[1] += a * w * x.cos();
            out[2] -= a * w * w * x.sin();
        }
        out
    }
}

fn criterion_4_head_alpha_oracle() -> Outcome {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k);
        let (theta0, omega0) = (rng.gen_range(0.3..1.2), rng.gen_range(1.0..2.5));
        let theta = Smooth::random(&mut rng, theta0, 0.15);
        let omega = Smooth::random(&mut rng, omega0, 0.2);
        let omega_h = |t: f64| {
            let th = theta.eval(t);
            let om = omega.eval(t);
            [th[1], om[0] * th[0].sin(), om[0] * th[0].cos()]
        };
        for _ in 0..50 {
            let t = rng.gen_range(0.0..30.0);
            let th = theta.eval(t);
            let om = omega.eval(t);
            let a = head_alpha(&RotationSample {
                t_s: t,
                theta_rad: th[0],
                theta_dot_radps: th[1],
                theta_ddot_radps2: th[2],
                omega_radps: om[0],
                omega_dot_radps2: om[1],
            });
            let (p, m) = (omega_h(t + h), omega_h(t - h));
            let fd = [0, 1, 2].map(|i| (p[i] - m[i]) / (2.0 * h));
            worst = worst
                .max((a.ax_radps2 - fd[0]).abs())
                .max((a.ay_radps2 - fd[1]).abs())
                .max((a.az_radps2 - fd[2]).abs());
        }
    }
    outcome(
        worst <= 1e-3,
        format!("100 trajectories, max |error| {worst:.3e} rad/s^2 (<= 1e-3)"),
    )
}

/// Baseline, one full-stick pull to 3 G simulator level, then recovery.
fn isolated_onset() -> Scenario {
    let dt = 0.01;
    let n = (120.0 / dt) as usize + 1;
    let u = (0..n).map(|i| {
        let t = i as f64 * dt;
        match t {
            t if t < 30.0 => 0.0,
            t if t < 32.0 => (t - 30.0) / 2.0,
            t if t < 60.0 => 1.0,
            t if t < 62.0 => 1.0 - (t - 60.0) / 2.0,
            _ => 0.0,
        }
    });
    Scenario::from_stick(dt, u)
}

fn criterion_5_sign_pattern() -> Outcome {
    let cfg = Config::default();
    let trace = run(&isolated_onset(), CueingLaw::Coham, &cfg).unwrap();
    let at = |t: f64| &trace.records[(t / trace.dt_s).round() as usize];
    let caz = cfg.coham.caz_halfwidth_rad.to_degrees();

    // before the lookup midpoint is reached on the way up, the offset is non-negative
    let mut pre_ok = true;
    for r in trace.records.iter().take_while(|r| r.t_s < 45.0) {
        let mid = 0.5 * (cfg.coham.g_baseline + r.g_max_tilde);
        if r.g_act < mid && r.t_s < 40.0 && r.mismatch_rad < -1e-12 {
            pre_ok = false;
        }
    }
    let peak = at(58.0).mismatch_rad.to_degrees();
    let recovery = at(115.0).mismatch_rad.to_degrees();
    let pass = pre_ok && (peak + caz).abs() <= 0.5 && (recovery - caz).abs() <= 0.1;
    outcome(
        pass,
        format!(
            "pre-midpoint offset >= 0: {pre_ok}, sustained peak {peak:+.3} deg (-5 +/- 0.5), \
recovery {recovery:+.3} deg (+5 +/- 0.1)"
        ),
    )
}

fn half_rise_time(trace: &RunTrace, value: impl Fn(&coham::sim::TraceRecord) -> f64) -> f64 {
    let v: Vec<f64> = trace.records.iter().map(&value).collect();
    let lo = v[0];
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let half = lo + 0.5 * (hi - lo);
    let i = v.iter().position(|&x| x >= half).expect("signal rises");
    let (t0, t1) = (trace.records[i - 1].t_s, trace.records[i].t_s);
    t0 + (t1 - t0) * (half - v[i - 1]) / (v[i] - v[i - 1])
}

fn criterion_6_lead_timing() -> Outcome {
    let mut cfg = Config::default();
    cfg.sim.baseline_hold = false;
    let dt = 0.01;
    let n = (40.0 / dt) as usize + 1;
    let u = (0..n).map(|i| {
        let t = i as f64 * dt;
        (0.5 * (t - 5.0) / 6.0).clamp(0.0, 0.5)
    });
    let trace = run(&Scenario::from_stick(dt, u), CueingLaw::Coham, &cfg).unwrap();
    let lead = half_rise_time(&trace, |r| r.g_act) - half_rise_time(&trace, |r| r.g_lead);
    outcome(
        (lead - 1.0).abs() <= 0.2,
        format!("G_lead half-rise leads G_act by {lead:.3} s (1.0 +/- 0.2)"),
    )
}

fn criterion_7_baseline_posture() -> Outcome {
    let cfg = Config::default();
    let scenario = Scenario::from_stick(0.01, vec![0.0; 12001]);
    let (rm, co) = run_both(&scenario, &cfg).unwrap();
    let rm_deg = rm.records.last().unwrap().theta_rad.to_degrees();
    let co_deg = co.records.last().unwrap().theta_rad.to_degrees();
    outcome(
        (co_deg - 49.4).abs() <= 0.2 && (rm_deg - 44.4).abs() <= 0.2,
        format!("COHAM {co_deg:.3} deg (49.4 +/- 0.2), RM {rm_deg:.3} deg (44.4 +/- 0.2)"),
    )
}

fn criterion_8_coriolis() -> Outcome {
    let cfg = Config::default();
    let (rm, co) = run_both(&reference_scenario(), &cfg).unwrap();
    let a = analyze(&rm, &cfg.coham).unwrap().coriolis.peak_yz_radps2;
    let b = analyze(&co, &cfg.coham).unwrap().coriolis.peak_yz_radps2;
    outcome(
        b < a,
        format!("peak |alpha_yz| COHAM {b:.4} < RM {a:.4} rad/s^2"),
    )
}

fn criterion_9_determinism() -> Outcome {
    let cfg = Config::default();
    let once = || {
        let (rm, co) = run_both(&synth_canyon_scenario(7, 300.0, 0.01).unwrap(), &cfg).unwrap();
        (rm.to_csv(), co.to_csv())
    };
    let (a, b) = (once(), once());
    let in_process = a == b;

    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_coham");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let scen = dir.path().join(format!("s{k}.csv"));
        let out = dir.path().join(format!("o{k}"));
        let gen = std::process::Command::new(bin)
            .args([
                "gen",
                "--seed",
                "7",
                "--duration",
                "300",
                "--dt",
                "0.01",
                "--out",
            ])
            .arg(&scen)
            .output()
            .unwrap();
        let cmp = std::process::Command::new(bin)
            .args(["compare", "--scenario"])
            .arg(&scen)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(gen.status.success() && cmp.status.success());
        outputs
            .push(["trace_rm.csv", "trace_coham.csv"].map(|f| std::fs::read(out.join(f)).unwrap()));
    }
    let cross_process = outputs[0] == outputs[1];
    outcome(
        in_process && cross_process,
        format!(
            "in-process identical: {in_process}, separate invocations identical: {cross_process}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 CAZ bound", criterion_1_caz_bound),
        ("2 rate reduction", criterion_2_rate_reduction),
        ("3 kinematics cross-checks", criterion_3_kinematics),
        ("4 head acceleration oracle", criterion_4_head_alpha_oracle),
        ("5 TTPF sign pattern", criterion_5_sign_pattern),
        ("6 lead timing", criterion_6_lead_timing),
        ("7 baseline posture", criterion_7_baseline_posture),
        ("8 Coriolis severity", criterion_8_coriolis),
        ("9 determinism", criterion_9_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
