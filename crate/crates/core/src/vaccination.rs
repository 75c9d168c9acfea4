//! Budget-`K` immunization: rank nodes, remove the top `K`, and compare the
//! resulting epidemics.
//!
//! * preventive: `e^{αβt*A} 1` with `α = 1 - c/n` (no source knowledge)
//! * reactive: finite part of `ŷ(t*)` given the known initial state
//! * baselines: eigenvector centrality and degree

use serde::{Deserialize, Serialize};

use crate::bounds::{transformation_bound, EIG_MAX_ITERS, EIG_TOL};
use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{dominant_eigenpair, expm_action, ExpmActionParams};
use crate::stochastic::{run_ensemble, EnsembleOptions, EnsembleResult, InitialCondition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Preventive,
    Reactive,
    Evc,
    Degree,
}

impl PolicyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::Preventive => "preventive",
            PolicyKind::Reactive => "reactive",
            PolicyKind::Evc => "evc",
            PolicyKind::Degree => "degree",
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preventive" => Ok(PolicyKind::Preventive),
            "reactive" => Ok(PolicyKind::Reactive),
            "evc" => Ok(PolicyKind::Evc),
            "degree" => Ok(PolicyKind::Degree),
            other => Err(Error::invalid(format!("unknown policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySelection {
    pub policy: PolicyKind,
    /// Time at which scores were evaluated, for the time-dependent policies.
    pub t_star: Option<f64>,
    pub k: usize,
    /// Chosen nodes, best first.
    pub selected: Vec<usize>,
    pub scores: Vec<f64>,
}

impl PolicySelection {
    /// Ranks `scores` and keeps the top `k`, skipping `excluded`.
    pub fn from_scores(
        policy: PolicyKind,
        t_star: Option<f64>,
        scores: Vec<f64>,
        k: usize,
        excluded: &[usize],
    ) -> Result<Self> {
        let selected = select_top_k(&scores, k, excluded)?;
        Ok(PolicySelection {
            policy,
            t_star,
            k,
            selected,
            scores,
        })
    }
}

/// Ranking vector `e^{αβt*A} 1`, `α = 1 - c/n`.
///
/// The full transformed bound for a uniform start `x0 = (c/n)1` is
/// `g(c/n) + (1/α - 1)(e^{αβt*A}1 - 1)`, a positive affine image of this,
/// so rankings coincide.
pub fn preventive_scores(
    g: &Graph,
    beta: f64,
    c: f64,
    t_star: f64,
    params: &ExpmActionParams,
) -> Result<Vec<f64>> {
    let n = g.node_count() as f64;
    if !(c > 0.0 && c < n) {
        return Err(Error::invalid(format!(
            "expected initial infectives {c} must lie in (0, n)"
        )));
    }
    if !(t_star > 0.0) || !(beta > 0.0) {
        return Err(Error::invalid("t* and beta must be positive"));
    }
    let alpha = 1.0 - c / n;
    Ok(expm_action(
        g,
        None,
        alpha * beta * t_star,
        &vec![1.0; g.node_count()],
        params,
    )?
    .value)
}

/// Ranking vector `ŷ(t*)` with sources (`x0_i = 1`) set to `-∞`.
pub fn reactive_scores(
    g: &Graph,
    beta: f64,
    x0: &StateVector,
    t_star: f64,
    params: &ExpmActionParams,
) -> Result<Vec<f64>> {
    if !(t_star > 0.0) {
        return Err(Error::invalid("t* must be positive"));
    }
    let r = transformation_bound(g, beta, x0, &[t_star], params)?;
    let y = r.transformed.expect("transformation bound carries ŷ");
    Ok(y.states[0]
        .values()
        .iter()
        .map(|&v| if v.is_finite() { v } else { f64::NEG_INFINITY })
        .collect())
}

/// Perron vector of `A`.
pub fn evc_scores(g: &Graph) -> Result<Vec<f64>> {
    if !g.is_connected() {
        return Err(Error::invalid(
            "eigenvector centrality needs a connected graph",
        ));
    }
    Ok(dominant_eigenpair(g, None, false, EIG_TOL, EIG_MAX_ITERS)?.right)
}

pub fn degree_scores(g: &Graph) -> Vec<f64> {
    (0..g.node_count()).map(|i| g.degree(i) as f64).collect()
}

/// Top `k` indices by descending score, ties to the smaller id, skipping `excluded`.
pub fn select_top_k(scores: &[f64], k: usize, excluded: &[usize]) -> Result<Vec<usize>> {
    let n = scores.len();
    let mut skip = vec![false; n];
    for &e in excluded {
        if e >= n {
            return Err(Error::invalid(format!("excluded node {e} out of range")));
        }
        skip[e] = true;
    }
    let available = skip.iter().filter(|&&s| !s).count();
    if k > available {
        return Err(Error::invalid(format!(
            "budget {k} exceeds the {available} selectable nodes"
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| !skip[i]).collect();
    // stable sort keeps ascending ids within equal scores
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(k);
    Ok(order)
}

/// Removes the selected nodes. Returns the residual graph and the
/// old → new id map.
pub fn immunize(g: &Graph, selected: &[usize]) -> Result<(Graph, Vec<Option<usize>>)> {
    let mut keep = vec![true; g.node_count()];
    for &v in selected {
        if v >= g.node_count() {
            return Err(Error::invalid(format!("selected node {v} out of range")));
        }
        keep[v] = false;
    }
    Ok(g.induced_subgraph(&keep))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// A single source drawn uniformly from the non-immunized nodes in every replica.
    Preventive,
    /// Fixed sources, given as ids of the original graph.
    Reactive { sources: Vec<usize> },
}

/// Lowest-id node with degree exactly `d`.
pub fn node_with_degree(g: &Graph, d: usize) -> Option<usize> {
    (0..g.node_count()).find(|&i| g.degree(i) == d)
}

/// Lowest-id node whose degree equals the 90th-percentile degree (the
/// smallest degree inside the top decile).
pub fn top_decile_node(g: &Graph) -> Option<usize> {
    let n = g.node_count();
    if n == 0 {
        return None;
    }
    let mut degs: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    let idx = n.div_ceil(10) - 1;
    node_with_degree(g, degs[idx])
}

/// Runs the SI ensemble on each residual graph with the same master seed,
/// so replica `r` shares its random stream across policies.
pub fn evaluate_policy(
    g: &Graph,
    beta: f64,
    selections: &[PolicySelection],
    scenario: &Scenario,
    replicas: usize,
    grid: &[f64],
    master_seed: u64,
) -> Result<Vec<EnsembleResult>> {
    selections
        .iter()
        .map(|sel| {
            evaluate_selection(
                g,
                beta,
                &sel.selected,
                scenario,
                replicas,
                grid,
                master_seed,
            )
        })
        .collect()
}

/// One residual-graph ensemble; `selected` may be empty (no vaccination).
pub fn evaluate_selection(
    g: &Graph,
    beta: f64,
    selected: &[usize],
    scenario: &Scenario,
    replicas: usize,
    grid: &[f64],
    master_seed: u64,
) -> Result<EnsembleResult> {
    let (residual, map) = immunize(g, selected)?;
    let init = match scenario {
        Scenario::Preventive => InitialCondition::UniformSingleSource,
        Scenario::Reactive { sources } => {
            let mapped = sources
                .iter()
                .map(|&s| {
                    map.get(s).copied().flatten().ok_or_else(|| {
                        Error::invalid(format!(
                            "reactive source {s} was immunized or is out of range"
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            InitialCondition::Fixed(mapped)
        }
    };
    run_ensemble(
        &residual,
        beta,
        &init,
        replicas,
        grid,
        master_seed,
        EnsembleOptions::default(),
    )
}
