//! Closed-form upper bounds on mean-field SI dynamics.
//!
//! With `D = diag(1 - x0)` and `M = A D`:
//!
//! * linearization: `x̃(t) = e^{βtA} x0`
//! * transformation: `ŷ(t) = e^{βtM} g(x0) + Σ_k (βt)^{k+1}/(k+1)! M^k A b(x0)`,
//!   `x̂ = f(ŷ)`
//! * interior start (`x0 ≺ 1`): `ŷ = g(x0) + (e^{βtM} - I) D^{-1} x0`
//! * binary start (`x0 ∈ {0,1}ⁿ`): `ŷ = g(x0) + Σ_k (βt)^{k+1}/(k+1)! M^k A x0`
//!
//! and `x(t) ⪯ x̂(t) ⪯ x̃(t)`. Each grid time is evaluated independently
//! from `t = 0`.
//!
//! Sources (`x0_i = 1`) have `g = +∞`, but column `i` of `M` is zero, so the
//! infinite entries never enter the series. They are split off as a
//! finite-part-plus-indicator pair and restored as `ŷ_i = +∞` at the end.

use rayon::prelude::*;

use crate::dynamics::{self, map_b, map_g, validate_grid, StateKind, StateVector, Trajectory};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{dominant_eigenpair, expm_action, expm_action_integral, ExpmActionParams};

pub(crate) const EIG_TOL: f64 = 1e-12;
pub(crate) const EIG_MAX_ITERS: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    Linearization,
    TransformationGeneral,
    TransformationInterior,
    TransformationBinary,
    TransformationAsymptotic,
}

impl BoundMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::Linearization => "linearization",
            BoundMethod::TransformationGeneral => "transformation_general",
            BoundMethod::TransformationInterior => "transformation_interior",
            BoundMethod::TransformationBinary => "transformation_binary",
            BoundMethod::TransformationAsymptotic => "transformation_asymptotic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub method: BoundMethod,
    /// `x̂` (probability kind) or `x̃` (unbounded kind).
    pub trajectory: Trajectory,
    /// `ŷ` for the transformation methods.
    pub transformed: Option<Trajectory>,
    /// Series terms used at each grid time (largest over the series summed).
    pub terms: Vec<usize>,
    pub capped: Vec<bool>,
}

impl BoundResult {
    pub fn any_capped(&self) -> bool {
        self.capped.iter().any(|&c| c)
    }
}

struct Point {
    values: Vec<f64>,
    terms: usize,
    capped: bool,
}

fn check_inputs(g: &Graph, beta: f64, x0: &StateVector, grid: &[f64]) -> Result<()> {
    dynamics::check_si_inputs(g, beta, x0)?;
    validate_grid(grid)
}

fn eval_grid<F>(grid: &[f64], eval: F) -> Result<Vec<Point>>
where
    F: Fn(f64) -> Result<Point> + Sync,
{
    grid.par_iter().map(|&t| eval(t)).collect()
}

/// `x̃(t) = e^{βtA} x0` on `grid`. Values grow without limit.
pub fn linearization_bound(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    params: &ExpmActionParams,
) -> Result<BoundResult> {
    check_inputs(g, beta, x0, grid)?;
    let pts = eval_grid(grid, |t| {
        let r = expm_action(g, None, beta * t, x0.values(), params)?;
        Ok(Point {
            values: r.value,
            terms: r.terms,
            capped: r.capped,
        })
    })?;
    let (rows, terms, capped) = unzip(pts);
    Ok(BoundResult {
        method: BoundMethod::Linearization,
        trajectory: Trajectory::from_rows(grid, rows, StateKind::Unbounded)?,
        transformed: None,
        terms,
        capped,
    })
}

/// Dominant-mode approximation `ξ₁ e^{βλ₁t} v₁` of `x̃(t)`, `ξ₁ = v₁ᵀ x0`.
///
/// Tracks the linearization, not `x(t)`, and only at large `t`.
pub fn evc_asymptote(g: &Graph, beta: f64, x0: &StateVector, t: f64) -> Result<Vec<f64>> {
    if x0.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: x0.len(),
        });
    }
    if x0.values().iter().all(|&v| v == 0.0) {
        return Err(Error::invalid("asymptote needs a nonzero initial state"));
    }
    let pair = dominant_eigenpair(g, None, false, EIG_TOL, EIG_MAX_ITERS)?;
    let xi: f64 = pair.right.iter().zip(x0.values()).map(|(a, b)| a * b).sum();
    let amp = xi * (beta * pair.value * t).exp();
    Ok(pair.right.iter().map(|v| amp * v).collect())
}

/// Pieces shared by every transformation form.
struct Split {
    /// `1 - x0`, the diagonal of `D`.
    scale: Vec<f64>,
    /// `g(x0)` with the `+∞` source entries replaced by 0.
    g_finite: Vec<f64>,
    sources: Vec<bool>,
}

impl Split {
    fn new(x0: &StateVector) -> Result<Self> {
        let g_full = map_g(x0.values())?;
        let sources: Vec<bool> = x0.values().iter().map(|&v| v == 1.0).collect();
        let g_finite = g_full
            .iter()
            .map(|&v| if v.is_finite() { v } else { 0.0 })
            .collect();
        Ok(Split {
            scale: x0.values().iter().map(|v| 1.0 - v).collect(),
            g_finite,
            sources,
        })
    }

    fn restore_sources(&self, y: &mut [f64]) {
        for (v, &s) in y.iter_mut().zip(&self.sources) {
            if s {
                *v = f64::INFINITY;
            }
        }
    }
}

fn transformation_result(
    method: BoundMethod,
    grid: &[f64],
    pts: Vec<Point>,
) -> Result<BoundResult> {
    let (rows, terms, capped) = unzip(pts);
    let x_rows = rows
        .iter()
        .map(|y| dynamics::map_f(y))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundResult {
        method,
        trajectory: Trajectory::from_rows(grid, x_rows, StateKind::Probability)?,
        transformed: Some(Trajectory::from_rows(grid, rows, StateKind::Transformed)?),
        terms,
        capped,
    })
}

/// Transformation bound, dispatching to the binary or interior closed form
/// when `x0` allows it and to the general series otherwise.
pub fn transformation_bound(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    params: &ExpmActionParams,
) -> Result<BoundResult> {
    if x0.is_binary() {
        transformation_bound_binary(g, beta, x0, grid, params)
    } else if x0.is_interior() {
        transformation_bound_interior(g, beta, x0, grid, params)
    } else {
        transformation_bound_general(g, beta, x0, grid, params)
    }
}

/// `ŷ(t) = e^{βtM} g(x0) + Σ_k (βt)^{k+1}/(k+1)! M^k A b(x0)` evaluated term by term.
pub fn transformation_bound_general(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    params: &ExpmActionParams,
) -> Result<BoundResult> {
    check_inputs(g, beta, x0, grid)?;
    let split = Split::new(x0)?;
    let ab = g.matvec(&map_b(x0.values())?, None)?;
    let pts = eval_grid(grid, |t| {
        let tau = beta * t;
        let homog = expm_action(g, Some(&split.scale), tau, &split.g_finite, params)?;
        let forced = expm_action_integral(g, Some(&split.scale), tau, &ab, params)?;
        let mut y: Vec<f64> = homog
            .value
            .iter()
            .zip(&forced.value)
            .map(|(a, b)| a + b)
            .collect();
        split.restore_sources(&mut y);
        Ok(Point {
            values: y,
            terms: homog.terms.max(forced.terms),
            capped: homog.capped || forced.capped,
        })
    })?;
    transformation_result(BoundMethod::TransformationGeneral, grid, pts)
}

/// `ŷ(t) = g(x0) + (e^{βtM} - I) D^{-1} x0`, for `x0 ≺ 1`.
pub fn transformation_bound_interior(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    params: &ExpmActionParams,
) -> Result<BoundResult> {
    check_inputs(g, beta, x0, grid)?;
    if !x0.is_interior() {
        return Err(Error::invalid(
            "interior form needs every x0_i < 1; use the general or binary form",
        ));
    }
    let split = Split::new(x0)?;
    let w: Vec<f64> = x0
        .values()
        .iter()
        .zip(&split.scale)
        .map(|(x, d)| x / d)
        .collect();
    let pts = eval_grid(grid, |t| {
        let e = expm_action(g, Some(&split.scale), beta * t, &w, params)?;
        let y = split
            .g_finite
            .iter()
            .zip(e.value.iter().zip(&w))
            .map(|(gv, (ev, wv))| gv + (ev - wv))
            .collect();
        Ok(Point {
            values: y,
            terms: e.terms,
            capped: e.capped,
        })
    })?;
    transformation_result(BoundMethod::TransformationInterior, grid, pts)
}

/// `ŷ(t) = g(x0) + Σ_k (βt)^{k+1}/(k+1)! M^k A x0`, for `x0 ∈ {0,1}ⁿ`.
pub fn transformation_bound_binary(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    params: &ExpmActionParams,
) -> Result<BoundResult> {
    check_inputs(g, beta, x0, grid)?;
    if !x0.is_binary() {
        return Err(Error::invalid("binary form needs every x0_i in {0, 1}"));
    }
    let split = Split::new(x0)?;
    let ax = g.matvec(x0.values(), None)?;
    let pts = eval_grid(grid, |t| {
        let r = expm_action_integral(g, Some(&split.scale), beta * t, &ax, params)?;
        let mut y = r.value;
        split.restore_sources(&mut y);
        Ok(Point {
            values: y,
            terms: r.terms,
            capped: r.capped,
        })
    })?;
    transformation_result(BoundMethod::TransformationBinary, grid, pts)
}

/// Dominant-mode form of `ŷ(t)` for `x0 ≺ 1`:
/// `ξ̂ e^{βμ₁t} v̂ - D^{-1} x0 + g(x0)` with `(μ₁, v̂, û)` the Perron triple
/// of `M` and `ξ̂ = ûᵀ D^{-1} x0`.
pub fn transformation_asymptote(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    t: f64,
) -> Result<Vec<f64>> {
    Ok(TransformationAsymptote::new(g, x0)?.at(beta, t))
}

/// Precomputed eigen-data for evaluating the asymptote at many times.
#[derive(Debug, Clone)]
pub struct TransformationAsymptote {
    pub mu: f64,
    pub xi: f64,
    right: Vec<f64>,
    offset: Vec<f64>,
}

impl TransformationAsymptote {
    pub fn new(g: &Graph, x0: &StateVector) -> Result<Self> {
        if x0.len() != g.node_count() {
            return Err(Error::DimensionMismatch {
                expected: g.node_count(),
                found: x0.len(),
            });
        }
        if !x0.is_interior() || x0.is_trivial() {
            return Err(Error::invalid(
                "asymptote needs a nontrivial x0 with every entry < 1",
            ));
        }
        let split = Split::new(x0)?;
        let w: Vec<f64> = x0
            .values()
            .iter()
            .zip(&split.scale)
            .map(|(x, d)| x / d)
            .collect();
        let pair = dominant_eigenpair(g, Some(&split.scale), true, EIG_TOL, EIG_MAX_ITERS)?;
        let left = pair.left.as_ref().expect("left vector requested");
        let xi = left.iter().zip(&w).map(|(u, v)| u * v).sum();
        let offset = split.g_finite.iter().zip(&w).map(|(a, b)| a - b).collect();
        Ok(TransformationAsymptote {
            mu: pair.value,
            xi,
            right: pair.right,
            offset,
        })
    }

    pub fn at(&self, beta: f64, t: f64) -> Vec<f64> {
        let amp = self.xi * (beta * self.mu * t).exp();
        self.right
            .iter()
            .zip(&self.offset)
            .map(|(v, c)| amp * v + c)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    /// Central difference `(ŷ(t+h) - ŷ(t-h)) / 2h`, sources skipped (`NaN`).
    pub finite_difference: Vec<f64>,
    /// `e^{βtM} β A x0`.
    pub identity: Vec<f64>,
    /// `dx̃/dt = β A e^{βtA} x0`.
    pub linearization: Vec<f64>,
    /// Largest `|finite_difference - identity|` over non-source nodes.
    pub max_discrepancy: f64,
    /// Largest `identity - linearization` (≤ 0 when `dŷ/dt ⪯ dx̃/dt`).
    pub max_ordering_excess: f64,
}

/// Compares a central difference of `ŷ` at `t` with the closed form
/// `dŷ/dt = e^{βtM} β A x0`, and that derivative with `dx̃/dt`.
pub fn bound_derivative_check(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    t: f64,
    h: f64,
    params: &ExpmActionParams,
) -> Result<DerivativeReport> {
    if !(h > 0.0) || !(t > h) {
        return Err(Error::invalid("derivative check needs t > h > 0"));
    }
    let res = transformation_bound(g, beta, x0, &[t - h, t + h], params)?;
    let ys = res.transformed.expect("transformation bound carries ŷ");
    let (lo, hi) = (ys.states[0].values(), ys.states[1].values());
    let finite_difference: Vec<f64> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| {
            if a.is_finite() {
                (b - a) / (2.0 * h)
            } else {
                f64::NAN
            }
        })
        .collect();
    let identity = derivative_identity(g, beta, x0, t, params)?;
    let lin = expm_action(g, None, beta * t, x0.values(), params)?;
    let linearization: Vec<f64> = g
        .matvec(&lin.value, None)?
        .into_iter()
        .map(|v| beta * v)
        .collect();

    let mut max_discrepancy = 0.0f64;
    let mut max_ordering_excess = f64::NEG_INFINITY;
    for i in 0..identity.len() {
        if finite_difference[i].is_finite() {
            max_discrepancy = max_discrepancy.max((finite_difference[i] - identity[i]).abs());
            max_ordering_excess = max_ordering_excess.max(identity[i] - linearization[i]);
        }
    }
    Ok(DerivativeReport {
        finite_difference,
        identity,
        linearization,
        max_discrepancy,
        max_ordering_excess,
    })
}

/// `e^{βtM} β A x0`, the exact time derivative of `ŷ`.
pub fn derivative_identity(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    t: f64,
    params: &ExpmActionParams,
) -> Result<Vec<f64>> {
    dynamics::check_si_inputs(g, beta, x0)?;
    let scale: Vec<f64> = x0.values().iter().map(|v| 1.0 - v).collect();
    let bax: Vec<f64> = g
        .matvec(x0.values(), None)?
        .into_iter()
        .map(|v| beta * v)
        .collect();
    Ok(expm_action(g, Some(&scale), beta * t, &bax, params)?.value)
}

/// Smallest horizon (to ~1%) at which `Σ_i x̂_i` reaches `0.999 n`.
pub fn default_horizon(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    params: &ExpmActionParams,
) -> Result<f64> {
    dynamics::check_si_inputs(g, beta, x0)?;
    let n = g.node_count() as f64;
    let target = 0.999 * n;
    let reached = |t: f64| -> Result<bool> {
        let r = transformation_bound(g, beta, x0, &[t], params)?;
        Ok(r.trajectory.states[0].sum() >= target)
    };
    let mut hi = 1.0 / beta;
    let mut doublings = 0;
    while !reached(hi)? {
        hi *= 2.0;
        doublings += 1;
        if doublings > 40 {
            return Err(Error::invalid(
                "transformation bound never reaches 0.999 n (disconnected graph?)",
            ));
        }
    }
    let mut lo = if doublings == 0 { 0.0 } else { hi / 2.0 };
    while hi - lo > 0.01 * hi {
        let mid = 0.5 * (lo + hi);
        if reached(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// 200 evenly spaced points on `[0, default_horizon]`.
pub fn default_grid(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    params: &ExpmActionParams,
) -> Result<Vec<f64>> {
    Ok(dynamics::uniform_grid(
        default_horizon(g, beta, x0, params)?,
        200,
    ))
}

fn unzip(pts: Vec<Point>) -> (Vec<Vec<f64>>, Vec<usize>, Vec<bool>) {
    let mut rows = Vec::with_capacity(pts.len());
    let mut terms = Vec::with_capacity(pts.len());
    let mut capped = Vec::with_capacity(pts.len());
    for p in pts {
        rows.push(p.values);
        terms.push(p.terms);
        capped.push(p.capped);
    }
    (rows, terms, capped)
}
