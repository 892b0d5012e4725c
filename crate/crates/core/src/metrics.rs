//! Run analysis and law-vs-law comparison.
//!
//! Onsets are the local maxima of the aircraft-model G-level above 2 G. Each
//! onset owns the stretch of trace between the midpoints to its neighbouring
//! onsets. Per-onset peaks are taken over that stretch, so two traces of the
//! same scenario always segment identically. Inside a segment the lead/lag
//! window `(t_A, t_B)` is bracketed by the sign changes of the commanded
//! mismatch around the G peak. A segment whose mismatch never turns negative
//! has no window.

use std::fmt::Write as _;

use thiserror::Error;

use crate::coriolis::{severity_of, CoriolisSeverity, HeadAlpha};
use crate::cueing::{CohamParams, CueingLaw};
use crate::sim::{RunTrace, TraceRecord};

/// Model G above which local maxima count as onsets.
pub const ONSET_THRESHOLD_G: f64 = 2.0;
/// Minimum prominence of a counted G peak.
pub const PEAK_PROMINENCE_G: f64 = 0.05;
/// Tolerance on the CAZ bound.
pub const CAZ_TOLERANCE_RAD: f64 = 1e-9;

pub const HISTOGRAM_MIN_G: f64 = 2.0;
pub const HISTOGRAM_MAX_G: f64 = 9.0;
pub const HISTOGRAM_BIN_G: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("reports come from different scenarios ({0} vs {1})")]
    Provenance(String, String),
    #[error("onset count differs between reports ({0} vs {1})")]
    OnsetMismatch(usize, usize),
    #[error("no traces given")]
    NoTraces,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsetWindow {
    pub t_a_s: f64,
    pub t_b_s: f64,
    pub peak_g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnsetReport {
    pub t_peak_s: f64,
    /// Aircraft-model G at the peak.
    pub peak_g_model: f64,
    /// Simulator G at the same instant.
    pub peak_g_act: f64,
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub theta_dot_peak_radps: f64,
    pub theta_cmd_rate_peak_radps: f64,
    pub coriolis_peak_yz_radps2: f64,
    pub window: Option<OnsetWindow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub law: CueingLaw,
    pub scenario_hash: String,
    pub samples: usize,
    pub mismatch_max_rad: f64,
    pub mismatch_min_rad: f64,
    pub caz_violation_count: usize,
    /// Peak |θ̇| of the cabin actuator.
    pub theta_dot_peak_radps: f64,
    pub theta_ddot_peak_radps2: f64,
    /// Peak |dθ_cmd/dt| by first differences of the command.
    pub theta_cmd_rate_peak_radps: f64,
    pub coriolis: CoriolisSeverity,
    pub yaw_cap_flags: usize,
    pub g_peaks_over_2g: Vec<f64>,
    pub onsets: Vec<OnsetReport>,
}

/// Indices of local maxima above `threshold` with at least `min_prominence`.
///
/// A flat top counts once, at its first sample, when both neighbours of the
/// plateau are strictly lower. Series ends never count.
pub fn find_peaks(values: &[f64], threshold: f64, min_prominence: f64) -> Vec<usize> {
    let n = values.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n
                && values[j + 1] < values[i]
                && values[i] > threshold
                && prominence(values, i, j) >= min_prominence
            {
                peaks.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Height above the higher of the two bases, for a plateau spanning `lo..=hi`.
fn prominence(values: &[f64], lo: usize, hi: usize) -> f64 {
    let h = values[lo];
    let mut left_min = h;
    for &v in values[..lo].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &values[hi + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn abs_peak(iter: impl Iterator<Item = f64>) -> f64 {
    iter.fold(0.0, |m, v| m.max(v.abs()))
}

fn cmd_rate_peak(records: &[TraceRecord], dt: f64) -> f64 {
    abs_peak(
        records
            .windows(2)
            .map(|w| (w[1].theta_cmd_rad - w[0].theta_cmd_rad) / dt),
    )
}

fn alphas(records: &[TraceRecord]) -> Vec<HeadAlpha> {
    records
        .iter()
        .map(|r| HeadAlpha {
            ax_radps2: r.alpha_x_radps2,
            ay_radps2: r.alpha_y_radps2,
            az_radps2: r.alpha_z_radps2,
        })
        .collect()
}

/// Time at which the mismatch crosses zero between samples `i` and `i + 1`.
fn crossing_time(records: &[TraceRecord], i: usize) -> f64 {
    let (a, b) = (&records[i], &records[i + 1]);
    let (ma, mb) = (a.mismatch_rad, b.mismatch_rad);
    if ma == mb {
        return a.t_s;
    }
    a.t_s + (b.t_s - a.t_s) * (ma / (ma - mb))
}

fn onset_window(records: &[TraceRecord], lo: usize, hi: usize, peak: usize) -> Option<OnsetWindow> {
    let negative = |i: usize| records[i].mismatch_rad < 0.0;
    // negative stretch containing the peak, else the nearest one after, else before
    let anchor = (peak..hi)
        .find(|&i| negative(i))
        .or_else(|| (lo..peak).rev().find(|&i| negative(i)))?;
    let mut a = anchor;
    while a > lo && negative(a - 1) {
        a -= 1;
    }
    let mut b = anchor;
    while b + 1 < hi && negative(b + 1) {
        b += 1;
    }
    if a == lo || b + 1 >= hi {
        return None;
    }
    Some(OnsetWindow {
        t_a_s: crossing_time(records, a - 1),
        t_b_s: crossing_time(records, b),
        peak_g: records[peak].nz_model,
    })
}

pub fn analyze(trace: &RunTrace, p: &CohamParams) -> Result<RunReport, MetricsError> {
    let records = &trace.records;
    if records.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    let dt = trace.dt_s;
    let bound = p.caz_halfwidth_rad + CAZ_TOLERANCE_RAD;

    let mismatch_max_rad = records
        .iter()
        .map(|r| r.mismatch_rad)
        .fold(f64::NEG_INFINITY, f64::max);
    let mismatch_min_rad = records
        .iter()
        .map(|r| r.mismatch_rad)
        .fold(f64::INFINITY, f64::min);
    let caz_violation_count = records
        .iter()
        .filter(|r| r.mismatch_rad.abs() > bound)
        .count();

    let nz: Vec<f64> = records.iter().map(|r| r.nz_model).collect();
    let peaks = find_peaks(&nz, ONSET_THRESHOLD_G, PEAK_PROMINENCE_G);

    let mut onsets = Vec::with_capacity(peaks.len());
    for (k, &pk) in peaks.iter().enumerate() {
        let lo = if k == 0 { 0 } else { (peaks[k - 1] + pk) / 2 };
        let hi = if k + 1 == peaks.len() {
            records.len()
        } else {
            (pk + peaks[k + 1]) / 2
        };
        let seg = &records[lo..hi];
        onsets.push(OnsetReport {
            t_peak_s: records[pk].t_s,
            peak_g_model: records[pk].nz_model,
            peak_g_act: records[pk].g_act,
            t_start_s: seg[0].t_s,
            t_end_s: seg[seg.len() - 1].t_s,
            theta_dot_peak_radps: abs_peak(seg.iter().map(|r| r.theta_dot_radps)),
            theta_cmd_rate_peak_radps: cmd_rate_peak(seg, dt),
            coriolis_peak_yz_radps2: severity_of(&alphas(seg)).peak_yz_radps2,
            window: onset_window(records, lo, hi, pk),
        });
    }

    Ok(RunReport {
        law: trace.law,
        scenario_hash: trace.scenario_hash.clone(),
        samples: records.len(),
        mismatch_max_rad,
        mismatch_min_rad,
        caz_violation_count,
        theta_dot_peak_radps: abs_peak(records.iter().map(|r| r.theta_dot_radps)),
        theta_ddot_peak_radps2: abs_peak(records.iter().map(|r| r.theta_ddot_radps2)),
        theta_cmd_rate_peak_radps: cmd_rate_peak(records, dt),
        coriolis: severity_of(&alphas(records)),
        yaw_cap_flags: trace.yaw_cap_flags(),
        g_peaks_over_2g: peaks.iter().map(|&i| nz[i]).collect(),
        onsets,
    })
}

impl RunReport {
    fn scalar_rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("samples", self.samples as f64),
            ("mismatch_max_rad", self.mismatch_max_rad),
            ("mismatch_min_rad", self.mismatch_min_rad),
            ("caz_violation_count", self.caz_violation_count as f64),
            ("theta_dot_peak_radps", self.theta_dot_peak_radps),
            ("theta_ddot_peak_radps2", self.theta_ddot_peak_radps2),
            ("theta_cmd_rate_peak_radps", self.theta_cmd_rate_peak_radps),
            ("coriolis_peak_y_radps2", self.coriolis.peak_y_radps2),
            ("coriolis_peak_z_radps2", self.coriolis.peak_z_radps2),
            ("coriolis_peak_yz_radps2", self.coriolis.peak_yz_radps2),
            ("coriolis_rms_yz_radps2", self.coriolis.rms_yz_radps2),
            ("yaw_cap_flags", self.yaw_cap_flags as f64),
            ("onset_count", self.onsets.len() as f64),
        ]
    }

    /// `metric,value` rows followed by nothing else; onsets go to
    /// [`RunReport::onsets_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        let _ = writeln!(out, "law,{}", self.law);
        let _ = writeln!(out, "scenario_hash,{}", self.scenario_hash);
        for (k, v) in self.scalar_rows() {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }

    pub fn onsets_csv(&self) -> String {
        let mut out = String::from(
            "t_peak_s,peak_g_model,peak_g_act,t_start_s,t_end_s,theta_dot_peak_radps,\
theta_cmd_rate_peak_radps,coriolis_peak_yz_radps2,t_a_s,t_b_s\n",
        );
        for o in &self.onsets {
            let (ta, tb) = o
                .window
                .map(|w| (w.t_a_s.to_string(), w.t_b_s.to_string()))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{ta},{tb}",
                o.t_peak_s,
                o.peak_g_model,
                o.peak_g_act,
                o.t_start_s,
                o.t_end_s,
                o.theta_dot_peak_radps,
                o.theta_cmd_rate_peak_radps,
                o.coriolis_peak_yz_radps2,
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "law:                    {}", self.law);
        let _ = writeln!(s, "scenario:               {}", self.scenario_hash);
        let _ = writeln!(s, "samples:                {}", self.samples);
        let _ = writeln!(
            s,
            "mismatch range:         [{:+.3}, {:+.3}] deg",
            self.mismatch_min_rad.to_degrees(),
            self.mismatch_max_rad.to_degrees()
        );
        let _ = writeln!(s, "CAZ violations:         {}", self.caz_violation_count);
        let _ = writeln!(
            s,
            "peak cabin rate:        {:.4} rad/s",
            self.theta_dot_peak_radps
        );
        let _ = writeln!(
            s,
            "peak commanded rate:    {:.4} rad/s",
            self.theta_cmd_rate_peak_radps
        );
        let _ = writeln!(
            s,
            "peak cabin accel:       {:.4} rad/s^2",
            self.theta_ddot_peak_radps2
        );
        let _ = writeln!(
            s,
            "coriolis peak y/z/yz:   {:.4} / {:.4} / {:.4} rad/s^2",
            self.coriolis.peak_y_radps2, self.coriolis.peak_z_radps2, self.coriolis.peak_yz_radps2
        );
        let _ = writeln!(
            s,
            "coriolis rms yz:        {:.4} rad/s^2",
            self.coriolis.rms_yz_radps2
        );
        let _ = writeln!(s, "yaw cap flags:          {}", self.yaw_cap_flags);
        let _ = writeln!(s, "onsets above 2 G:       {}", self.onsets.len());
        for o in &self.onsets {
            let window = match o.window {
                Some(w) => format!("t_A {:.2} s, t_B {:.2} s", w.t_a_s, w.t_b_s),
                None => "no lag window".to_string(),
            };
            let _ = writeln!(
                s,
                "  t={:7.2} s  {:.2} G model  rate {:.4} rad/s  ({window})",
                o.t_peak_s, o.peak_g_model, o.theta_dot_peak_radps
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ratio {
    pub metric: &'static str,
    pub rm: f64,
    pub coham: f64,
    /// `coham / rm`; 0/0 is reported as 1 and flagged.
    pub ratio: f64,
    pub degenerate: bool,
}

impl Ratio {
    fn new(metric: &'static str, rm: f64, coham: f64) -> Self {
        let (ratio, degenerate) = if rm == 0.0 && coham == 0.0 {
            (1.0, true)
        } else if rm == 0.0 {
            (f64::INFINITY, true)
        } else {
            (coham / rm, false)
        };
        Self {
            metric,
            rm,
            coham,
            ratio,
            degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnsetRatio {
    pub t_peak_s: f64,
    pub peak_g_model: f64,
    pub theta_dot: Ratio,
    pub theta_cmd_rate: Ratio,
    pub coriolis_peak_yz: Ratio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub scenario_hash: String,
    pub global: Vec<Ratio>,
    pub onsets: Vec<OnsetRatio>,
}

impl ComparisonReport {
    pub fn get(&self, metric: &str) -> Option<&Ratio> {
        self.global.iter().find(|r| r.metric == metric)
    }

    /// Smallest non-degenerate per-onset ratio of the commanded cabin rate.
    pub fn best_onset_ratio(&self) -> Option<f64> {
        best(self.onsets.iter().map(|o| &o.theta_cmd_rate))
    }

    /// Smallest non-degenerate per-onset ratio of the achieved cabin rate.
    pub fn best_onset_theta_dot_ratio(&self) -> Option<f64> {
        best(self.onsets.iter().map(|o| &o.theta_dot))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,rm,coham,ratio,degenerate\n");
        for r in &self.global {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.metric,
                r.rm,
                r.coham,
                r.ratio,
                u8::from(r.degenerate)
            );
        }
        out
    }

    pub fn onsets_csv(&self) -> String {
        let mut out = String::from(
            "t_peak_s,peak_g_model,rm_theta_dot_peak_radps,coham_theta_dot_peak_radps,theta_dot_ratio,\
rm_theta_cmd_rate_peak_radps,coham_theta_cmd_rate_peak_radps,theta_cmd_rate_ratio,rm_coriolis_peak_yz_radps2,coham_coriolis_peak_yz_radps2,coriolis_ratio\n",
        );
        for o in &self.onsets {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                o.t_peak_s,
                o.peak_g_model,
                o.theta_dot.rm,
                o.theta_dot.coham,
                o.theta_dot.ratio,
                o.theta_cmd_rate.rm,
                o.theta_cmd_rate.coham,
                o.theta_cmd_rate.ratio,
                o.coriolis_peak_yz.rm,
                o.coriolis_peak_yz.coham,
                o.coriolis_peak_yz.ratio,
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.scenario_hash);
        let _ = writeln!(
            s,
            "{:<28} {:>12} {:>12} {:>8}",
            "metric", "rm", "coham", "ratio"
        );
        for r in &self.global {
            let flag = if r.degenerate { "  (degenerate)" } else { "" };
            let _ = writeln!(
                s,
                "{:<28} {:>12.5} {:>12.5} {:>8.3}{flag}",
                r.metric, r.rm, r.coham, r.ratio
            );
        }
        if !self.onsets.is_empty() {
            let _ = writeln!(
                s,
                "per-onset cabin rate ratio (coham/rm), commanded / achieved:"
            );
            for o in &self.onsets {
                let _ = writeln!(
                    s,
                    "  t={:7.2} s  {:.2} G model  {:.3} / {:.3}",
                    o.t_peak_s, o.peak_g_model, o.theta_cmd_rate.ratio, o.theta_dot.ratio
                );
            }
            if let (Some(c), Some(a)) = (self.best_onset_ratio(), self.best_onset_theta_dot_ratio())
            {
                let _ = writeln!(s, "best onset ratio: {c:.3} commanded, {a:.3} achieved");
            }
        }
        s
    }
}

fn best<'a>(ratios: impl Iterator<Item = &'a Ratio>) -> Option<f64> {
    ratios
        .filter(|r| !r.degenerate)
        .map(|r| r.ratio)
        .min_by(f64::total_cmp)
}

pub fn compare(rm: &RunReport, coham: &RunReport) -> Result<ComparisonReport, MetricsError> {
    if rm.scenario_hash != coham.scenario_hash {
        return Err(MetricsError::Provenance(
            rm.scenario_hash.clone(),
            coham.scenario_hash.clone(),
        ));
    }
    if rm.onsets.len() != coham.onsets.len() {
        return Err(MetricsError::OnsetMismatch(
            rm.onsets.len(),
            coham.onsets.len(),
        ));
    }
    let global = vec![
        Ratio::new(
            "theta_dot_peak_radps",
            rm.theta_dot_peak_radps,
            coham.theta_dot_peak_radps,
        ),
        Ratio::new(
            "theta_ddot_peak_radps2",
            rm.theta_ddot_peak_radps2,
            coham.theta_ddot_peak_radps2,
        ),
        Ratio::new(
            "theta_cmd_rate_peak_radps",
            rm.theta_cmd_rate_peak_radps,
            coham.theta_cmd_rate_peak_radps,
        ),
        Ratio::new(
            "coriolis_peak_y_radps2",
            rm.coriolis.peak_y_radps2,
            coham.coriolis.peak_y_radps2,
        ),
        Ratio::new(
            "coriolis_peak_z_radps2",
            rm.coriolis.peak_z_radps2,
            coham.coriolis.peak_z_radps2,
        ),
        Ratio::new(
            "coriolis_peak_yz_radps2",
            rm.coriolis.peak_yz_radps2,
            coham.coriolis.peak_yz_radps2,
        ),
        Ratio::new(
            "coriolis_rms_yz_radps2",
            rm.coriolis.rms_yz_radps2,
            coham.coriolis.rms_yz_radps2,
        ),
    ];
    let onsets = rm
        .onsets
        .iter()
        .zip(&coham.onsets)
        .map(|(a, b)| OnsetRatio {
            t_peak_s: a.t_peak_s,
            peak_g_model: a.peak_g_model,
            theta_dot: Ratio::new(
                "theta_dot_peak_radps",
                a.theta_dot_peak_radps,
                b.theta_dot_peak_radps,
            ),
            theta_cmd_rate: Ratio::new(
                "theta_cmd_rate_peak_radps",
                a.theta_cmd_rate_peak_radps,
                b.theta_cmd_rate_peak_radps,
            ),
            coriolis_peak_yz: Ratio::new(
                "coriolis_peak_yz_radps2",
                a.coriolis_peak_yz_radps2,
                b.coriolis_peak_yz_radps2,
            ),
        })
        .collect();
    Ok(ComparisonReport {
        scenario_hash: rm.scenario_hash.clone(),
        global,
        onsets,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GPeakHistogram {
    pub threshold_g: f64,
    /// Counts per 0.25 G bin starting at 2 G; the last bin includes 9 G.
    pub counts: Vec<usize>,
}

impl GPeakHistogram {
    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let lo = HISTOGRAM_MIN_G + i as f64 * HISTOGRAM_BIN_G;
        (lo, lo + HISTOGRAM_BIN_G)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Lower edge of the fullest bin (first one on ties).
    pub fn mode_bin(&self) -> Option<(f64, f64)> {
        let (idx, &count) = self
            .counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
        (count > 0).then(|| self.bin_edges(idx))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo_g,bin_hi_g,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let (lo, hi) = self.bin_edges(i);
            let _ = writeln!(out, "{lo},{hi},{c}");
        }
        out
    }
}

/// Histogram of model-G local maxima above `threshold_g` pooled over traces.
pub fn g_peak_histogram(
    traces: &[&RunTrace],
    threshold_g: f64,
) -> Result<GPeakHistogram, MetricsError> {
    if traces.is_empty() {
        return Err(MetricsError::NoTraces);
    }
    let n_bins = ((HISTOGRAM_MAX_G - HISTOGRAM_MIN_G) / HISTOGRAM_BIN_G).round() as usize;
    let mut counts = vec![0; n_bins];
    for trace in traces {
        let nz: Vec<f64> = trace.records.iter().map(|r| r.nz_model).collect();
        for i in find_peaks(&nz, threshold_g, PEAK_PROMINENCE_G) {
            let g = nz[i];
            if g < HISTOGRAM_MIN_G {
                continue;
            }
            let bin = (((g - HISTOGRAM_MIN_G) / HISTOGRAM_BIN_G).floor() as usize).min(n_bins - 1);
            counts[bin] += 1;
        }
    }
    Ok(GPeakHistogram {
        threshold_g,
        counts,
    })
}
