//! Adaptive Dormand–Prince 5(4) for autonomous systems `dy/dt = F(y)`.
//!
//! Steps are clipped so the integrator lands exactly on every requested
//! output time; no interpolation is involved.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
        }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Accuracy { rel_tol, abs_tol }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::invalid("integrator tolerances must be positive"));
        }
        Ok(())
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Checks that `grid` is nonempty, finite, starts at `t ≥ 0` and strictly increases.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if !grid.iter().all(|t| t.is_finite()) || grid[0] < 0.0 {
        return Err(Error::invalid(
            "time grid must be finite and start at t >= 0",
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    Ok(())
}

/// `points` evenly spaced times on `[0, horizon]`.
pub fn uniform_grid(horizon: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![horizon],
        _ => (0..points)
            .map(|i| horizon * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Integrates from `t = 0` and returns the state at each grid time.
///
/// `post_step(old, new)` runs after every accepted step and may project
/// `new` (clamping) or reject the step with an error.
pub(crate) fn integrate<F, P>(
    mut rhs: F,
    y0: &[f64],
    grid: &[f64],
    accuracy: &Accuracy,
    mut post_step: P,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&[f64], &mut [f64]),
    P: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    accuracy.validate()?;
    validate_grid(grid)?;
    let n = y0.len();
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0.to_vec();
    let mut t = 0.0f64;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    rhs(&y, &mut k1);
    let mut h = initial_step(&mut rhs, &y, &k1, accuracy, grid[grid.len() - 1]);

    for &target in grid {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let min_step = 1e-14 * t.abs().max(1.0);
            if step < min_step && !last {
                return Err(Error::Integration {
                    time: t,
                    reason: format!("step size underflow (h = {step:e})"),
                });
            }

            for i in 0..n {
                tmp[i] = y[i] + step * A21 * k1[i];
            }
            rhs(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + step * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(&tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(&tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(&tmp, &mut k6);
            for i in 0..n {
                y_new[i] =
                    y[i] + step * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            rhs(&y_new, &mut k7);

            let mut err = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = accuracy.abs_tol + accuracy.rel_tol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = if n == 0 { 0.0 } else { (err / n as f64).sqrt() };
            if !err.is_finite() {
                return Err(Error::Integration {
                    time: t,
                    reason: "non-finite error estimate".into(),
                });
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                let t_new = if last { target } else { t + step };
                post_step(t_new, &y, &mut y_new)?;
                std::mem::swap(&mut y, &mut y_new);
                t = t_new;
                rhs(&y, &mut k1);
                // a clipped final step says nothing about the natural size
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(1.0);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step<F>(rhs: &mut F, y: &[f64], f0: &[f64], acc: &Accuracy, horizon: f64) -> f64
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = y.len().max(1) as f64;
    let sc = |v: f64| acc.abs_tol + acc.rel_tol * v.abs();
    let d0 = (y.iter().map(|&v| (v / sc(v)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (y
        .iter()
        .zip(f0)
        .map(|(&v, &f)| (f / sc(v)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(&v, &f)| v + h0 * f).collect();
    let mut f1 = vec![0.0; y.len()];
    rhs(&y1, &mut f1);
    let d2 = (y
        .iter()
        .zip(f0.iter().zip(&f1))
        .map(|(&v, (&a, &b))| ((b - a) / sc(v)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let cap = if horizon > 0.0 {
        horizon
    } else {
        f64::INFINITY
    };
    (100.0 * h0).min(h1).min(cap)
}
