//! Mean-field SI/SIS dynamics and the log-transform pair used by the bounds.
//!
//! SI:  `dx_i/dt = β (1 - x_i) Σ_j a_ij x_j`
//! SIS: the same with `- δ x_i` added.
//!
//! Time always starts at `t = 0`.

mod ode;

pub(crate) use ode::integrate;
pub use ode::{uniform_grid, validate_grid, Accuracy};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// `g(x) = -log(1 - x)`, with `g(1) = +∞`.
pub fn transform_g(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            function: "g",
            value: x,
        });
    }
    Ok(if x == 1.0 {
        f64::INFINITY
    } else {
        -(-x).ln_1p()
    })
}

/// `f(y) = 1 - e^{-y}`, the inverse of `g`; `f(+∞) = 1`.
pub fn transform_f(y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::Domain {
            function: "f",
            value: y,
        });
    }
    Ok(-(-y).exp_m1())
}

/// `b(x) = x + (1 - x) log(1 - x)` with `0·log 0 = 0`.
pub fn transform_b(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            function: "b",
            value: x,
        });
    }
    Ok(if x == 1.0 {
        1.0
    } else {
        x + (1.0 - x) * (-x).ln_1p()
    })
}

pub(crate) fn map_g(x: &[f64]) -> Result<Vec<f64>> {
    x.iter().map(|&v| transform_g(v)).collect()
}

pub(crate) fn map_f(y: &[f64]) -> Result<Vec<f64>> {
    y.iter().map(|&v| transform_f(v)).collect()
}

pub(crate) fn map_b(x: &[f64]) -> Result<Vec<f64>> {
    x.iter().map(|&v| transform_b(v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Per-node infection probabilities in `[0, 1]`.
    Probability,
    /// `y = g(x)` in `[0, +∞]`; `+∞` marks a node with `x = 1`.
    Transformed,
    /// Nonnegative with no upper limit (linearized dynamics).
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    kind: StateKind,
}

impl StateVector {
    pub fn probability(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain {
                function: "probability state",
                value: bad,
            });
        }
        Ok(StateVector {
            values,
            kind: StateKind::Probability,
        })
    }

    pub fn transformed(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain {
                function: "transformed state",
                value: bad,
            });
        }
        Ok(StateVector {
            values,
            kind: StateKind::Transformed,
        })
    }

    pub fn unbounded(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Domain {
                function: "unbounded state",
                value: bad,
            });
        }
        Ok(StateVector {
            values,
            kind: StateKind::Unbounded,
        })
    }

    /// Probability vector with `x_i = 1` on `sources` and `0` elsewhere.
    pub fn indicator(n: usize, sources: &[usize]) -> Result<Self> {
        let mut v = vec![0.0; n];
        for &s in sources {
            if s >= n {
                return Err(Error::invalid(format!(
                    "source {s} out of range for n = {n}"
                )));
            }
            v[s] = 1.0;
        }
        Self::probability(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// All zeros or all ones.
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0) || self.values.iter().all(|&v| v == 1.0)
    }

    /// Every entry is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Every entry is strictly below 1.
    pub fn is_interior(&self) -> bool {
        self.values.iter().all(|&v| v < 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

impl Trajectory {
    pub(crate) fn from_rows(times: &[f64], rows: Vec<Vec<f64>>, kind: StateKind) -> Result<Self> {
        let states = rows
            .into_iter()
            .map(|v| match kind {
                StateKind::Probability => StateVector::probability(v),
                StateKind::Transformed => StateVector::transformed(v),
                StateKind::Unbounded => StateVector::unbounded(v),
            })
            .collect::<Result<_>>()?;
        Ok(Trajectory {
            times: times.to_vec(),
            states,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `Σ_i x_i(t)` at every grid time.
    pub fn totals(&self) -> Vec<f64> {
        self.states.iter().map(StateVector::sum).collect()
    }

    /// Values of one node across the grid.
    pub fn node(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.values[i]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub beta: f64,
    pub delta: f64,
}

impl ModelParams {
    pub fn si(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid(format!(
                "infection rate {beta} must be positive"
            )));
        }
        Ok(ModelParams { beta, delta: 0.0 })
    }

    pub fn sis(beta: f64, delta: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() || !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::invalid(format!(
                "rates must be finite and nonnegative (beta = {beta}, delta = {delta})"
            )));
        }
        Ok(ModelParams { beta, delta })
    }
}

fn check_state(g: &Graph, x0: &StateVector) -> Result<()> {
    if x0.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: x0.len(),
        });
    }
    if x0.kind() != StateKind::Probability {
        return Err(Error::invalid("initial state must be a probability vector"));
    }
    Ok(())
}

/// Checks the inputs every SI routine shares: matching size, probability
/// kind, not all-zero/all-one, positive `β`.
pub(crate) fn check_si_inputs(g: &Graph, beta: f64, x0: &StateVector) -> Result<()> {
    ModelParams::si(beta)?;
    check_state(g, x0)?;
    if x0.is_trivial() {
        return Err(Error::invalid("initial state is trivial (all 0 or all 1)"));
    }
    Ok(())
}

fn si_rhs(g: &Graph, beta: f64, delta: f64) -> impl FnMut(&[f64], &mut [f64]) + '_ {
    move |x, dx| {
        for i in 0..x.len() {
            let pressure: f64 = g.neighbors(i).iter().map(|&j| x[j]).sum();
            dx[i] = beta * (1.0 - x[i]) * pressure - delta * x[i];
        }
    }
}

/// Slack allowed for a per-step decrease before it counts as real drift.
fn drift_slack(acc: &Accuracy, old: f64, new: f64) -> f64 {
    10.0 * (acc.abs_tol + acc.rel_tol * old.abs().max(new.abs()))
}

/// SI projection: reject real decreases, absorb roundoff into `[old, 1]`.
fn si_project(acc: Accuracy, m: usize) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<()> {
    move |t, old, new| {
        for i in 0..m {
            if new[i] < old[i] - drift_slack(&acc, old[i], new[i]) {
                return Err(Error::Integration {
                    time: t,
                    reason: format!(
                        "node {i} decreased from {} to {} beyond tolerance",
                        old[i], new[i]
                    ),
                });
            }
            new[i] = new[i].max(old[i]).clamp(0.0, 1.0);
        }
        Ok(())
    }
}

/// Mean-field SI trajectory on `grid`.
pub fn integrate_si(
    g: &Graph,
    params: &ModelParams,
    x0: &StateVector,
    grid: &[f64],
    accuracy: &Accuracy,
) -> Result<Trajectory> {
    check_si_inputs(g, params.beta, x0)?;
    let n = g.node_count();
    let rows = integrate(
        si_rhs(g, params.beta, 0.0),
        x0.values(),
        grid,
        accuracy,
        si_project(*accuracy, n),
    )?;
    Trajectory::from_rows(grid, rows, StateKind::Probability)
}

/// Mean-field SIS trajectory. Any probability vector is accepted as the
/// start, and `β = 0` gives pure curing.
pub fn integrate_sis(
    g: &Graph,
    params: &ModelParams,
    x0: &StateVector,
    grid: &[f64],
    accuracy: &Accuracy,
) -> Result<Trajectory> {
    ModelParams::sis(params.beta, params.delta)?;
    check_state(g, x0)?;
    let rows = integrate(
        si_rhs(g, params.beta, params.delta),
        x0.values(),
        grid,
        accuracy,
        |_, _, new: &mut [f64]| {
            for v in new.iter_mut() {
                *v = v.clamp(0.0, 1.0);
            }
            Ok(())
        },
    )?;
    Trajectory::from_rows(grid, rows, StateKind::Probability)
}

/// Integrates `dy_i/dt = β Σ_j a_ij f(y_j)` from `y(0) = g(x0)`; requires
/// `x0 ≺ 1` so that `y` stays finite.
pub fn integrate_transformed_si(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    accuracy: &Accuracy,
) -> Result<Trajectory> {
    check_si_inputs(g, beta, x0)?;
    if !x0.is_interior() {
        return Err(Error::invalid("transformed system needs every x0_i < 1"));
    }
    let y0 = map_g(x0.values())?;
    let rows = integrate_transformed_from(g, beta, &y0, grid, accuracy)?;
    Trajectory::from_rows(grid, rows, StateKind::Transformed)
}

/// Transformed SI system started from an arbitrary finite `y0`.
pub(crate) fn integrate_transformed_from(
    g: &Graph,
    beta: f64,
    y0: &[f64],
    grid: &[f64],
    accuracy: &Accuracy,
) -> Result<Vec<Vec<f64>>> {
    integrate(
        |y, dy| {
            for i in 0..y.len() {
                dy[i] = beta
                    * g.neighbors(i)
                        .iter()
                        .map(|&j| -(-y[j]).exp_m1())
                        .sum::<f64>();
            }
        },
        y0,
        grid,
        accuracy,
        |_, old, new: &mut [f64]| {
            for (n, o) in new.iter_mut().zip(old) {
                *n = n.max(*o);
            }
            Ok(())
        },
    )
}

/// SI trajectory together with the cumulative hazard
/// `H_i(t) = ∫_0^t β Σ_j a_ij x_j(s) ds`, integrated as extra state by the
/// same adaptive stepper so both share its error control.
pub(crate) fn integrate_si_with_hazard(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    accuracy: &Accuracy,
) -> Result<(Trajectory, Vec<Vec<f64>>)> {
    check_si_inputs(g, beta, x0)?;
    let n = g.node_count();
    let mut z0 = x0.values().to_vec();
    z0.resize(2 * n, 0.0);
    let rows = integrate(
        |z, dz| {
            let (x, _) = z.split_at(n);
            let (dx, dh) = dz.split_at_mut(n);
            for i in 0..n {
                let h = beta * g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
                dx[i] = (1.0 - x[i]) * h;
                dh[i] = h;
            }
        },
        &z0,
        grid,
        accuracy,
        si_project(*accuracy, n),
    )?;
    let mut xs = Vec::with_capacity(rows.len());
    let mut hs = Vec::with_capacity(rows.len());
    for mut row in rows {
        hs.push(row.split_off(n));
        xs.push(row);
    }
    Ok((Trajectory::from_rows(grid, xs, StateKind::Probability)?, hs))
}
