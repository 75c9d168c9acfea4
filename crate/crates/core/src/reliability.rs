//! Infection times as lifetimes.
//!
//! Under the mean-field dynamics a susceptible node `i` fails (is infected)
//! at hazard `h_i(t) = β Σ_j a_ij x_j(t)`, so
//! `P{T_i > t} = (1 - x_i(0)) exp(-H_i(t))` with `H_i` the cumulative
//! hazard, and `y_i(t) = g(x_i(t)) = -log P{T_i > 0} + H_i(t)`. The hazard
//! is nondecreasing, which makes the residual life stochastically
//! decreasing in age.
//!
//! Everything here is defined against the mean-field ODE. The empirical
//! survival of the stochastic process is a separate quantity.

use crate::dynamics::{
    self, integrate_si_with_hazard, integrate_transformed_from, validate_grid, Accuracy, StateKind,
    StateVector, Trajectory,
};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// `h = β A x`.
pub fn hazard_from_state(g: &Graph, beta: f64, x: &StateVector) -> Result<Vec<f64>> {
    if x.kind() != StateKind::Probability {
        return Err(Error::invalid("hazard needs a probability state"));
    }
    Ok(g.matvec(x.values(), None)?
        .into_iter()
        .map(|v| beta * v)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardCurve {
    pub times: Vec<f64>,
    /// `hazard[k][i] = h_i(times[k])`.
    pub hazard: Vec<Vec<f64>>,
    /// `cumulative[k][i] = H_i(times[k])`.
    pub cumulative: Vec<Vec<f64>>,
    /// The SI trajectory the hazard was computed along.
    pub trajectory: Trajectory,
}

impl HazardCurve {
    /// Largest decrease of any `h_i` between consecutive grid times (≤ 0 when monotone).
    pub fn max_hazard_decrease(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for w in self.hazard.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                worst = worst.max(a - b);
            }
        }
        worst
    }
}

/// Hazard and cumulative hazard along the mean-field SI trajectory.
pub fn hazard_curve(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    accuracy: &Accuracy,
) -> Result<HazardCurve> {
    let (trajectory, cumulative) = integrate_si_with_hazard(g, beta, x0, grid, accuracy)?;
    let hazard = trajectory
        .states
        .iter()
        .map(|s| hazard_from_state(g, beta, s))
        .collect::<Result<_>>()?;
    Ok(HazardCurve {
        times: grid.to_vec(),
        hazard,
        cumulative,
        trajectory,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    /// `survival[k][i] = P{T_i > times[k]}`.
    pub survival: Vec<Vec<f64>>,
    /// Largest `|survival - (1 - x)|` against the ODE state on the same grid.
    pub max_discrepancy: f64,
}

/// `P{T_i > t} = (1 - x_i(0)) exp(-H_i(t))`.
///
/// The cumulative hazard is integrated alongside `x` by the adaptive
/// stepper, so quadrature happens on the integrator's accepted steps.
pub fn survival_curve(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    accuracy: &Accuracy,
) -> Result<SurvivalCurve> {
    let curve = hazard_curve(g, beta, x0, grid, accuracy)?;
    let mut max_discrepancy = 0.0f64;
    let survival = curve
        .cumulative
        .iter()
        .zip(&curve.trajectory.states)
        .map(|(h, x)| {
            h.iter()
                .zip(x0.values())
                .zip(x.values())
                .map(|((hi, x0i), xi)| {
                    let s = (1.0 - x0i) * (-hi).exp();
                    max_discrepancy = max_discrepancy.max((s - (1.0 - xi)).abs());
                    s
                })
                .collect()
        })
        .collect();
    Ok(SurvivalCurve {
        times: grid.to_vec(),
        survival,
        max_discrepancy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// Largest `|y_i(t) - (-log P{T_i > 0} + H_i(t))|`.
    pub max_cumulative_discrepancy: f64,
    /// Largest `|(y_i(t+h) - y_i(t-h))/2h - h_i(t)|` over grid times `t ≥ h`.
    pub max_derivative_discrepancy: f64,
    /// Grid times where the central difference was evaluated.
    pub derivative_times: Vec<f64>,
}

/// Checks `y = -log P{T>0} + H` and `dy/dt = h` on `grid`, with `y` taken
/// from the transformed ODE and `H`, `h` from the probability-space ODE.
///
/// The difference quotient restarts from `y(t-h)` and integrates only the
/// `2h` window, so it is not swamped by accumulated integration error.
pub fn transformed_identity_check(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    grid: &[f64],
    accuracy: &Accuracy,
    step: f64,
) -> Result<IdentityReport> {
    if !(step > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let y = dynamics::integrate_transformed_si(g, beta, x0, grid, accuracy)?;
    let curve = hazard_curve(g, beta, x0, grid, accuracy)?;
    let g0 = dynamics::map_g(x0.values())?;

    let mut max_cumulative_discrepancy = 0.0f64;
    for (ys, hs) in y.states.iter().zip(&curve.cumulative) {
        for ((yi, hi), gi) in ys.values().iter().zip(hs).zip(&g0) {
            max_cumulative_discrepancy = max_cumulative_discrepancy.max((yi - (gi + hi)).abs());
        }
    }

    let fd_times: Vec<f64> = grid.iter().copied().filter(|&t| t >= step).collect();
    let mut max_derivative_discrepancy = 0.0f64;
    if !fd_times.is_empty() {
        let left: Vec<f64> = fd_times.iter().map(|t| t - step).collect();
        let x0_left = dedup_grid(&left);
        let y_left = dynamics::integrate_transformed_si(g, beta, x0, &x0_left, accuracy)?;
        let hazard = hazard_curve(g, beta, x0, &fd_times, accuracy)?;
        for (k, t) in fd_times.iter().enumerate() {
            let idx = x0_left
                .iter()
                .position(|&s| s == t - step)
                .expect("left point present");
            let start = y_left.states[idx].values();
            let end = integrate_transformed_from(g, beta, start, &[2.0 * step], accuracy)?;
            for i in 0..start.len() {
                let fd = (end[0][i] - start[i]) / (2.0 * step);
                max_derivative_discrepancy =
                    max_derivative_discrepancy.max((fd - hazard.hazard[k][i]).abs());
            }
        }
    }
    Ok(IdentityReport {
        max_cumulative_discrepancy,
        max_derivative_discrepancy,
        derivative_times: fd_times,
    })
}

fn dedup_grid(times: &[f64]) -> Vec<f64> {
    let mut v = times.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `residual[k][i] = P{T_{i,age} > lookahead[k]} = exp(-(H_i(age + t'_k) - H_i(age)))`.
pub fn residual_life_distribution(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    age: f64,
    lookahead: &[f64],
    accuracy: &Accuracy,
) -> Result<Vec<Vec<f64>>> {
    if !(age >= 0.0) || !age.is_finite() {
        return Err(Error::invalid("age must be finite and nonnegative"));
    }
    validate_grid(lookahead)?;
    let mut grid = vec![age];
    grid.extend(lookahead.iter().map(|s| age + s));
    let grid = dedup_grid(&grid);
    let curve = hazard_curve(g, beta, x0, &grid, accuracy)?;
    let at = |t: f64| {
        let k = grid
            .iter()
            .position(|&s| s == t)
            .expect("grid point present");
        &curve.cumulative[k]
    };
    let base = at(age);
    Ok(lookahead
        .iter()
        .map(|s| {
            at(age + s)
                .iter()
                .zip(base)
                .map(|(h1, h0)| (-(h1 - h0).max(0.0)).exp())
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSurvival {
    pub times: Vec<f64>,
    pub survival: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
}

/// Kaplan–Meier survival of simulated infection times.
///
/// Every replica is observed up to the same horizon, so censoring happens
/// only at the end and the estimator is the fraction with `T_i > t`; its
/// standard error is the binomial one.
pub fn empirical_survival(samples: &[Vec<f64>], grid: &[f64]) -> Result<EmpiricalSurvival> {
    if samples.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    validate_grid(grid)?;
    let n = samples[0].len();
    if samples.iter().any(|s| s.len() != n) {
        return Err(Error::invalid("samples have differing node counts"));
    }
    let r = samples.len() as f64;
    let mut survival = vec![vec![0.0; n]; grid.len()];
    let mut stderr = vec![vec![0.0; n]; grid.len()];
    for (k, &t) in grid.iter().enumerate() {
        for i in 0..n {
            let alive = samples.iter().filter(|s| s[i] > t).count() as f64;
            let p = alive / r;
            survival[k][i] = p;
            stderr[k][i] = (p * (1.0 - p) / r).sqrt();
        }
    }
    Ok(EmpiricalSurvival {
        times: grid.to_vec(),
        survival,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::uniform_grid;
    use crate::graph::generators;
    use crate::stochastic::{
        master_equation_oracle, run_ensemble, EnsembleOptions, InitialCondition,
    };

    fn tight() -> Accuracy {
        Accuracy::new(1e-12, 1e-14)
    }

    #[test]
    fn hazard_examples() {
        let beta = 0.4;
        let p2 = generators::path(2);
        let x = StateVector::probability(vec![1.0, 0.3]).unwrap();
        assert_eq!(hazard_from_state(&p2, beta, &x).unwrap()[1], beta);
        let zero = StateVector::probability(vec![0.0; 2]).unwrap();
        assert_eq!(hazard_from_state(&p2, beta, &zero).unwrap(), vec![0.0, 0.0]);
        let k3 = generators::complete(3);
        let x = StateVector::indicator(3, &[0]).unwrap();
        assert_eq!(
            hazard_from_state(&k3, beta, &x).unwrap(),
            vec![0.0, beta, beta]
        );
    }

    #[test]
    fn two_node_survival_is_exponential() {
        let g = generators::path(2);
        let x0 = StateVector::indicator(2, &[0]).unwrap();
        let grid = uniform_grid(6.0, 13);
        let s = survival_curve(&g, 0.5, &x0, &grid, &tight()).unwrap();
        for (t, row) in grid.iter().zip(&s.survival) {
            assert!((row[1] - (-0.5 * t).exp()).abs() < 1e-10);
            assert_eq!(row[0], 0.0);
        }
        assert_eq!(s.survival[0], vec![0.0, 1.0]);
        assert!(s.max_discrepancy < 1e-10);
    }

    #[test]
    fn identity_check_on_a_cycle() {
        let g = generators::cycle(6);
        let x0 = StateVector::probability(vec![0.4, 0.0, 0.1, 0.0, 0.0, 0.0]).unwrap();
        let rep = transformed_identity_check(&g, 0.7, &x0, &uniform_grid(5.0, 11), &tight(), 1e-4)
            .unwrap();
        assert!(rep.max_cumulative_discrepancy < 1e-8);
        assert!(rep.max_derivative_discrepancy < 1e-6, "{rep:?}");
        assert_eq!(rep.derivative_times.len(), 10);
    }

    #[test]
    fn two_node_residual_life_is_memoryless() {
        let g = generators::path(2);
        let x0 = StateVector::indicator(2, &[0]).unwrap();
        let look = uniform_grid(4.0, 9);
        for age in [0.0, 1.5, 3.0] {
            let r = residual_life_distribution(&g, 0.5, &x0, age, &look, &tight()).unwrap();
            assert!(r[0].iter().all(|&v| v == 1.0));
            for (s, row) in look.iter().zip(&r) {
                assert!((row[1] - (-0.5 * s).exp()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn star_leaf_residual_life_decreases_with_age() {
        let g = generators::star(4);
        let x0 = StateVector::probability(vec![0.0, 0.2, 0.0, 0.0, 0.0]).unwrap();
        let look = uniform_grid(5.0, 11);
        let young = residual_life_distribution(&g, 0.6, &x0, 0.5, &look, &tight()).unwrap();
        let old = residual_life_distribution(&g, 0.6, &x0, 2.0, &look, &tight()).unwrap();
        for (a, b) in young.iter().zip(&old) {
            for i in 0..5 {
                assert!(b[i] <= a[i] + 1e-9);
            }
        }
    }

    #[test]
    fn hazard_is_nondecreasing() {
        let g = generators::path(6);
        let x0 = StateVector::indicator(6, &[2]).unwrap();
        let c = hazard_curve(&g, 0.3, &x0, &uniform_grid(20.0, 41), &tight()).unwrap();
        assert!(c.max_hazard_decrease() <= 1e-9);
    }

    #[test]
    fn empirical_survival_matches_oracle() {
        let g = generators::path(3);
        let grid = uniform_grid(6.0, 7);
        let e = run_ensemble(
            &g,
            0.5,
            &InitialCondition::Fixed(vec![0]),
            20_000,
            &grid,
            11,
            EnsembleOptions {
                keep_infection_times: true,
            },
        )
        .unwrap();
        let emp = empirical_survival(e.infection_times.as_ref().unwrap(), &grid).unwrap();
        let oracle = master_equation_oracle(&g, 0.5, &[1.0, 0.0, 0.0], &grid).unwrap();
        for k in 0..grid.len() {
            for i in 1..3 {
                let exact = 1.0 - oracle.states[k].values()[i];
                let se = emp.stderr[k][i].max(1e-12);
                assert!((emp.survival[k][i] - exact).abs() <= 3.5 * se + 1e-12);
            }
        }
    }
}
