//! Sparse kernels over `M = A diag(s)`: truncated Taylor action of `e^{τM}`,
//! its shifted-factorial integral series, and Perron pairs by power
//! iteration.
//!
//! All matrices here are entrywise nonnegative, so the Taylor series has no
//! cancellation and plain truncation is accurate. Terms shrink factorially
//! once `k` exceeds `τ·λ(M)`.

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpmActionParams {
    /// Relative truncation tolerance on the ∞-norm of the added term.
    pub tol: f64,
    /// Hard cap on series terms; `None` derives `10·(1 + ⌈τ·d_max⌉)`.
    pub max_terms: Option<usize>,
}

impl Default for ExpmActionParams {
    fn default() -> Self {
        ExpmActionParams {
            tol: 1e-15,
            max_terms: None,
        }
    }
}

impl ExpmActionParams {
    pub fn with_tol(tol: f64) -> Self {
        ExpmActionParams {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("series tolerance must be positive"));
        }
        if self.max_terms == Some(0) {
            return Err(Error::invalid("series term cap must be at least 1"));
        }
        Ok(())
    }

    /// Term cap for horizon `tau`; `d_max` bounds the spectral radius of every
    /// `A diag(s)` with `0 ≤ s ≤ 1`.
    pub fn term_cap(&self, g: &Graph, tau: f64) -> usize {
        self.max_terms
            .unwrap_or_else(|| 10 * (1 + (tau * g.max_degree() as f64).ceil() as usize))
    }
}

/// Output of a truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub value: Vec<f64>,
    /// Index of the last term added.
    pub terms: usize,
    /// The term cap was reached before the tolerance was met.
    pub capped: bool,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Sums `Σ_k term_k` with `term_k = τ/(k + shift) · M · term_{k-1}`.
fn taylor_series(
    g: &Graph,
    scale: Option<&[f64]>,
    tau: f64,
    first: Vec<f64>,
    shift: usize,
    params: &ExpmActionParams,
) -> Result<SeriesResult> {
    params.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!(
            "series time {tau} must be finite and >= 0"
        )));
    }
    let n = g.node_count();
    if first.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: first.len(),
        });
    }
    if let Some(s) = scale {
        if s.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.len(),
            });
        }
    }
    let cap = params.term_cap(g, tau);
    let mut sum = first.clone();
    let mut term = first;
    let mut next = vec![0.0; n];
    let mut prev_norm = inf_norm(&term);
    if prev_norm == 0.0 || tau == 0.0 {
        return Ok(SeriesResult {
            value: sum,
            terms: 0,
            capped: false,
        });
    }
    for k in 1..=cap {
        g.matvec_into(&term, scale, &mut next)?;
        let factor = tau / (k + shift) as f64;
        for (t, x) in term.iter_mut().zip(&next) {
            *t = factor * x;
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        let term_norm = inf_norm(&term);
        let sum_norm = inf_norm(&sum);
        if !sum_norm.is_finite() {
            return Err(Error::SeriesOverflow { terms: k });
        }
        // a small term only ends the series once terms are shrinking
        if term_norm == 0.0 || (term_norm <= params.tol * sum_norm && term_norm <= prev_norm) {
            return Ok(SeriesResult {
                value: sum,
                terms: k,
                capped: false,
            });
        }
        prev_norm = term_norm;
    }
    Ok(SeriesResult {
        value: sum,
        terms: cap,
        capped: true,
    })
}

/// `e^{τM} v0` with `M = A diag(scale)` (or `A`).
pub fn expm_action(
    g: &Graph,
    scale: Option<&[f64]>,
    tau: f64,
    v0: &[f64],
    params: &ExpmActionParams,
) -> Result<SeriesResult> {
    taylor_series(g, scale, tau, v0.to_vec(), 0, params)
}

/// `Σ_{k≥0} τ^{k+1}/(k+1)! · M^k w`, i.e. `∫_0^τ e^{sM} w ds`.
///
/// Evaluated straight from the series, so a singular `M` is fine.
pub fn expm_action_integral(
    g: &Graph,
    scale: Option<&[f64]>,
    tau: f64,
    w: &[f64],
    params: &ExpmActionParams,
) -> Result<SeriesResult> {
    let first: Vec<f64> = w.iter().map(|x| tau * x).collect();
    taylor_series(g, scale, tau, first, 1, params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Right vector, unit 2-norm.
    pub right: Vec<f64>,
    /// Left vector scaled so that `leftᵀ right = 1`.
    pub left: Option<Vec<f64>>,
    pub iterations: usize,
    pub residual: f64,
}

/// Dominant (Perron) eigenpair of `M = A diag(scale)` by power iteration
/// from the all-ones vector.
///
/// Iterates on `M + σI` with `σ` the mean row sum of `M`. The shift leaves
/// eigenvectors alone but breaks the `±λ` tie of bipartite graphs.
pub fn dominant_eigenpair(
    g: &Graph,
    scale: Option<&[f64]>,
    want_left: bool,
    tol: f64,
    max_iters: usize,
) -> Result<EigenPair> {
    let n = g.node_count();
    if let Some(s) = scale {
        if s.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.len(),
            });
        }
    }
    if n == 0 || g.edge_count() == 0 {
        return Err(Error::invalid(
            "dominant eigenpair needs a graph with edges",
        ));
    }
    let ones = vec![1.0; n];
    let row_sums = g.matvec(&ones, scale)?;
    let shift = row_sums.iter().sum::<f64>() / n as f64;

    let right_op = |x: &[f64], out: &mut [f64]| {
        g.matvec_into(x, scale, out).expect("dimensions checked");
    };
    let (right, value, iters_r, res_r) = power_iterate(n, shift, right_op, tol, max_iters)?;

    let left = if want_left {
        let left_op = |x: &[f64], out: &mut [f64]| g.transpose_matvec_into(x, scale, out);
        let (mut u, _, _, _) = power_iterate(n, shift, left_op, tol, max_iters)?;
        let dot: f64 = u.iter().zip(&right).map(|(a, b)| a * b).sum();
        for x in &mut u {
            *x /= dot;
        }
        Some(u)
    } else {
        None
    };
    Ok(EigenPair {
        value,
        right,
        left,
        iterations: iters_r,
        residual: res_r,
    })
}

fn power_iterate<F>(
    n: usize,
    shift: f64,
    apply: F,
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, f64, usize, f64)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut mx = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iters {
        apply(&x, &mut mx);
        for ((y, &a), &b) in next.iter_mut().zip(&mx).zip(&x) {
            *y = a + shift * b;
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual,
                last_iterate: x,
            });
        }
        let mut diff = 0.0f64;
        for (y, &old) in next.iter_mut().zip(&x) {
            *y /= norm;
            diff = diff.max((*y - old).abs());
        }
        std::mem::swap(&mut x, &mut next);

        apply(&x, &mut mx);
        let value: f64 = x.iter().zip(&mx).map(|(a, b)| a * b).sum();
        residual = mx
            .iter()
            .zip(&x)
            .fold(0.0f64, |m, (a, b)| m.max((a - value * b).abs()));
        if diff < tol && residual < 10.0 * tol {
            return Ok((x, value, iter, residual));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        residual,
        last_iterate: x,
    })
}

/// `(max{d̄, √d_max}, d_max)`, a bracket on `λ(A)` for connected graphs.
pub fn spectral_radius_bounds(g: &Graph) -> (f64, f64) {
    let s = g.degree_summary();
    let dmax = s.max as f64;
    (s.mean.max(dmax.sqrt()), dmax)
}
