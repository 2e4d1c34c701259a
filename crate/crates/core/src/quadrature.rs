//! Composite Simpson quadrature on (possibly non-uniform) nodes, and a
//! Richardson-refined driver for rules that can be re-evaluated on finer meshes.

use crate::error::{Error, Result};

/// Largest number of sample intervals the refinement driver will request.
pub const MAX_REFINED_INTERVALS: usize = 1 << 20;

/// Quadrature weights of the composite Simpson rule on strictly increasing `nodes`.
///
/// Pairs of adjacent intervals use the three-point rule exact for quadratics;
/// an odd trailing interval is integrated with the quadratic through the last
/// three nodes. Two nodes fall back to the trapezoid rule.
pub fn simpson_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    match n {
        0 | 1 => return w,
        2 => {
            let h = nodes[1] - nodes[0];
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
            return w;
        }
        _ => {}
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut i = 0;
    while i < paired {
        let h0 = nodes[i + 1] - nodes[i];
        let h1 = nodes[i + 2] - nodes[i + 1];
        let s = h0 + h1;
        w[i] += s / 6.0 * (2.0 - h1 / h0);
        w[i + 1] += s * s * s / (6.0 * h0 * h1);
        w[i + 2] += s / 6.0 * (2.0 - h0 / h1);
        i += 2;
    }
    if intervals % 2 == 1 {
        let h0 = nodes[n - 2] - nodes[n - 3];
        let h1 = nodes[n - 1] - nodes[n - 2];
        w[n - 3] += -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        w[n - 2] += h1 * (h1 + 3.0 * h0) / (6.0 * h0);
        w[n - 1] += h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
    }
    w
}

/// Result of [`refine`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub value: f64,
    pub intervals: usize,
    pub relative_change: f64,
}

/// Evaluates `rule(n)` for n = `start`, 2·start, 4·start, ... intervals and
/// Richardson-extrapolates successive fourth-order estimates until the
/// extrapolated value changes by less than `rel_tol` (relative).
///
/// `start` must be even. Returns `NoConvergence` once `MAX_REFINED_INTERVALS`
/// is exceeded.
pub fn refine<F>(mut rule: F, start: usize, rel_tol: f64) -> Result<Refined>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut n = start.max(2);
    let mut coarse = rule(n)?;
    let mut previous: Option<f64> = None;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let m = 2 * n;
        if m > MAX_REFINED_INTERVALS {
            let residual = previous.map_or(f64::INFINITY, |p| (p - coarse).abs());
            return Err(Error::NoConvergence { iterations, residual });
        }
        let fine = rule(m)?;
        let extrapolated = fine + (fine - coarse) / 15.0;
        if let Some(p) = previous {
            let scale = extrapolated.abs().max(p.abs());
            let change = if scale == 0.0 { 0.0 } else { (extrapolated - p).abs() / scale };
            if change < rel_tol {
                return Ok(Refined { value: extrapolated, intervals: m, relative_change: change });
            }
        }
        previous = Some(extrapolated);
        coarse = fine;
        n = m;
    }
}

/// Sum of `weights[i] * values[i]`.
pub fn weighted_sum(weights: &[f64], values: impl IntoIterator<Item = f64>) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}
