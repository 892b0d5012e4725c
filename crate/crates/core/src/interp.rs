//! Piecewise-linear interpolation over sorted breakpoints, clamped at the ends.

/// Interpolates `x` over breakpoints `xs` → `ys`.
///
/// Outside `[xs[0], xs[n-1]]` the end values are held. Breakpoints must be
/// non-decreasing; a zero-width segment resolves to its left value.
pub fn interp_clamped(x: f64, xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "breakpoint arrays differ in length");
    assert!(!xs.is_empty(), "empty breakpoint table");
    let last = xs.len() - 1;
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[last] {
        return ys[last];
    }
    // first breakpoint strictly greater than x
    let hi = xs.partition_point(|&b| b <= x);
    let lo = hi - 1;
    let span = xs[hi] - xs[lo];
    if span <= 0.0 {
        return ys[lo];
    }
    let frac = (x - xs[lo]) / span;
    ys[lo] + frac * (ys[hi] - ys[lo])
}
