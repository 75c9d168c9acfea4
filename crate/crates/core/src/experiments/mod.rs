//! Config-driven runners that write long-format CSV tables plus a JSON
//! manifest per experiment.
//!
//! * `bound_compare`: mean-field sum, simulation mean and both bounds from a fixed source
//! * `policy`: vaccination policies against the unvaccinated epidemic
//! * `sis_demo`: SIS ensembles below and above threshold
//! * `reliability`: hazard, survival and residual-life tables with identity checks

mod config;
mod table;

use std::collections::BTreeMap;

pub use config::{
    ComponentMode, GraphSpec, GridConfig, ModelConfig, OutputConfig, Overrides, ReliabilityConfig,
    RunConfig, ScenarioConfig, ScenarioKind, SimulationConfig, SourceSpec, DESK_REPLICAS,
    FULL_REPLICAS,
};
pub use table::{ExperimentOutput, GraphInfo, Manifest, ResultTable, Row};

use crate::bounds::{
    default_horizon, linearization_bound, transformation_bound, EIG_MAX_ITERS, EIG_TOL,
};
use crate::dynamics::{
    integrate_si, integrate_sis, uniform_grid, Accuracy, ModelParams, StateVector,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{dominant_eigenpair, ExpmActionParams};
use crate::reliability::{hazard_curve, residual_life_distribution, transformed_identity_check};
use crate::stochastic::{run_ensemble, run_sis_ensemble, EnsembleOptions, InitialCondition};
use crate::vaccination::{
    degree_scores, evaluate_selection, evc_scores, preventive_scores, reactive_scores, PolicyKind,
    PolicySelection, Scenario,
};

/// Default bound-comparison horizon, in units of `1/β`.
const BOUND_HORIZON_RATES: f64 = 20.0;
const BOUND_POINTS: usize = 200;
/// Odd, so the horizon midpoint is a grid point.
const POLICY_POINTS: usize = 41;
const SIS_HORIZON: f64 = 20.0;
const SIS_POINTS: usize = 101;
const RELIABILITY_POINTS: usize = 101;
/// Fraction of nodes the unvaccinated mean must reach to fix the policy horizon.
const SATURATION: f64 = 0.99;
/// Pilot horizon for the saturation search, in multiples of the bound horizon.
const PILOT_FACTOR: f64 = 8.0;
const PILOT_POINTS: usize = 801;
const FD_STEP: f64 = 1e-4;

struct Prepared {
    graph: Graph,
    info: GraphInfo,
    notes: BTreeMap<String, String>,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate()?;
    let graph = cfg.graph.build()?;
    let ep = dominant_eigenpair(&graph, None, false, EIG_TOL, EIG_MAX_ITERS)?;
    let info = GraphInfo {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        max_degree: graph.max_degree(),
        spectral_radius: ep.value,
    };
    Ok(Prepared {
        graph,
        info,
        notes: BTreeMap::new(),
    })
}

fn finish(
    runner: &'static str,
    cfg: &RunConfig,
    p: Prepared,
    mut table: ResultTable,
) -> ExperimentOutput {
    table.sort();
    ExperimentOutput {
        table,
        manifest: Manifest {
            library: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            runner,
            config: cfg.clone(),
            graph: p.info,
            notes: p.notes,
        },
    }
}

fn experiment_id(cfg: &RunConfig, beta: f64) -> String {
    format!("{}:beta={beta}", cfg.id)
}

fn resolve_source(
    spec: SourceSpec,
    g: &Graph,
    notes: &mut BTreeMap<String, String>,
) -> Result<usize> {
    let s = spec.resolve(g)?;
    notes.insert(
        "source".into(),
        format!("node {s} (degree {}, label {})", g.degree(s), g.label(s)),
    );
    Ok(s)
}

/// `Σx` (mean field), simulation mean, `Σx̃` and `Σx̂` from one fixed source.
///
/// Without `grid.T` the horizon is `20/β`.
pub fn run_bound_compare(cfg: &RunConfig) -> Result<ExperimentOutput> {
    let mut p = prepare(cfg)?;
    let g = &p.graph;
    let source = resolve_source(
        cfg.scenario.source.unwrap_or(SourceSpec::Node(0)),
        g,
        &mut p.notes,
    )?;
    let x0 = StateVector::indicator(g.node_count(), &[source])?;
    let params = ExpmActionParams::default();
    let seed = cfg.simulation.seed;
    let mut table = ResultTable::new();
    for &beta in &cfg.model.beta {
        let exp = experiment_id(cfg, beta);
        let horizon = cfg.grid.horizon.unwrap_or(BOUND_HORIZON_RATES / beta);
        p.notes
            .insert(format!("horizon:beta={beta}"), horizon.to_string());
        let grid = uniform_grid(horizon, cfg.grid.points.unwrap_or(BOUND_POINTS));

        let ode = integrate_si(g, &ModelParams::si(beta)?, &x0, &grid, &Accuracy::default())?;
        table.push_curve(&exp, "ode", &grid, &ode.totals(), None, None, None);

        let sim = run_ensemble(
            g,
            beta,
            &InitialCondition::Fixed(vec![source]),
            cfg.simulation.replicas,
            &grid,
            seed,
            EnsembleOptions::default(),
        )?;
        table.push_curve(
            &exp,
            "simulation",
            &grid,
            &sim.mean_count,
            Some(&sim.stderr),
            None,
            Some(seed),
        );

        let lin = linearization_bound(g, beta, &x0, &grid, &params)?;
        table.push_curve(
            &exp,
            "linearization",
            &grid,
            &lin.trajectory.totals(),
            None,
            None,
            None,
        );

        let tra = transformation_bound(g, beta, &x0, &grid, &params)?;
        table.push_curve(
            &exp,
            "transformation",
            &grid,
            &tra.trajectory.totals(),
            None,
            None,
            None,
        );
        if lin.any_capped() || tra.any_capped() {
            p.notes
                .insert(format!("series_capped:beta={beta}"), "true".into());
        }
    }
    Ok(finish("bound-compare", cfg, p, table))
}

fn default_policies(kind: ScenarioKind) -> Vec<PolicyKind> {
    let own = match kind {
        ScenarioKind::Preventive => PolicyKind::Preventive,
        ScenarioKind::Reactive => PolicyKind::Reactive,
    };
    vec![own, PolicyKind::Evc, PolicyKind::Degree]
}

/// Smallest pilot-grid time at which the unvaccinated mean reaches `SATURATION · n`.
fn saturation_horizon(
    g: &Graph,
    beta: f64,
    scenario: &Scenario,
    reference: &StateVector,
    replicas: usize,
    seed: u64,
) -> Result<f64> {
    let pilot = PILOT_FACTOR * default_horizon(g, beta, reference, &ExpmActionParams::default())?;
    let grid = uniform_grid(pilot, PILOT_POINTS);
    let base = evaluate_selection(g, beta, &[], scenario, replicas, &grid, seed)?;
    let target = SATURATION * g.node_count() as f64;
    Ok(grid
        .iter()
        .zip(&base.mean_count)
        .find(|(_, m)| **m >= target)
        .map_or(pilot, |(t, _)| *t))
}

/// Mean infected curves for each policy and budget, plus the unvaccinated
/// curve (`method = none`, `K = 0`). All ensembles share the master seed.
///
/// Without `grid.T` the horizon is the time at which the unvaccinated mean
/// reaches 99% of the nodes.
pub fn run_policy_experiment(cfg: &RunConfig) -> Result<ExperimentOutput> {
    let mut p = prepare(cfg)?;
    let g = &p.graph;
    let n = g.node_count();
    if cfg.scenario.k.is_empty() {
        return Err(Error::Config(
            "scenario.k must list at least one budget".into(),
        ));
    }
    let params = ExpmActionParams::default();
    let seed = cfg.simulation.seed;
    let replicas = cfg.simulation.replicas;
    let policies = if cfg.scenario.policies.is_empty() {
        default_policies(cfg.scenario.kind)
    } else {
        cfg.scenario.policies.clone()
    };
    let (scenario, source) = match cfg.scenario.kind {
        ScenarioKind::Preventive => (Scenario::Preventive, None),
        ScenarioKind::Reactive => {
            let spec = cfg.scenario.source.unwrap_or(SourceSpec::TopDecile);
            let s = resolve_source(spec, g, &mut p.notes)?;
            (Scenario::Reactive { sources: vec![s] }, Some(s))
        }
    };
    let excluded: Vec<usize> = source.into_iter().collect();
    let reference = match source {
        Some(s) => StateVector::indicator(n, &[s])?,
        None => StateVector::probability(vec![1.0 / n as f64; n])?,
    };
    let mut table = ResultTable::new();
    for &beta in &cfg.model.beta {
        let exp = experiment_id(cfg, beta);
        let t_star = cfg
            .scenario
            .t_star
            .unwrap_or(1.0 / (beta * p.info.spectral_radius));
        p.notes
            .insert(format!("t_star:beta={beta}"), t_star.to_string());
        let horizon = match cfg.grid.horizon {
            Some(h) => h,
            None => saturation_horizon(g, beta, &scenario, &reference, replicas, seed)?,
        };
        p.notes
            .insert(format!("horizon:beta={beta}"), horizon.to_string());
        let grid = uniform_grid(horizon, cfg.grid.points.unwrap_or(POLICY_POINTS));

        let base = evaluate_selection(g, beta, &[], &scenario, replicas, &grid, seed)?;
        table.push_curve(
            &exp,
            "none",
            &grid,
            &base.mean_count,
            Some(&base.stderr),
            Some(0),
            Some(seed),
        );

        for &policy in &policies {
            let scores = match policy {
                PolicyKind::Preventive => {
                    preventive_scores(g, beta, cfg.scenario.expected_infectives, t_star, &params)?
                }
                PolicyKind::Reactive => {
                    if source.is_none() {
                        return Err(Error::Config(
                            "the reactive policy needs a reactive scenario".into(),
                        ));
                    }
                    reactive_scores(g, beta, &reference, t_star, &params)?
                }
                PolicyKind::Evc => evc_scores(g)?,
                PolicyKind::Degree => degree_scores(g),
            };
            let uses_t = matches!(policy, PolicyKind::Preventive | PolicyKind::Reactive);
            for &k in &cfg.scenario.k {
                let sel = PolicySelection::from_scores(
                    policy,
                    uses_t.then_some(t_star),
                    scores.clone(),
                    k,
                    &excluded,
                )?;
                let res =
                    evaluate_selection(g, beta, &sel.selected, &scenario, replicas, &grid, seed)?;
                table.push_curve(
                    &exp,
                    policy.as_str(),
                    &grid,
                    &res.mean_count,
                    Some(&res.stderr),
                    Some(k),
                    Some(seed),
                );
            }
        }
    }
    Ok(finish("policy", cfg, p, table))
}

/// SIS ensembles from `initial_infected` uniformly drawn nodes, one curve per `δ`.
pub fn run_sis_demo(cfg: &RunConfig) -> Result<ExperimentOutput> {
    let p = prepare(cfg)?;
    let g = &p.graph;
    let n = g.node_count();
    let c = cfg.scenario.initial_infected;
    if c == 0 || c > n {
        return Err(Error::Config(format!(
            "initial_infected {c} must lie in 1..={n}"
        )));
    }
    let deltas = if cfg.model.delta.is_empty() {
        vec![1.0, 0.8]
    } else {
        cfg.model.delta.clone()
    };
    let grid = uniform_grid(
        cfg.grid.horizon.unwrap_or(SIS_HORIZON),
        cfg.grid.points.unwrap_or(SIS_POINTS),
    );
    let seed = cfg.simulation.seed;
    let mut table = ResultTable::new();
    for &beta in &cfg.model.beta {
        let exp = experiment_id(cfg, beta);
        for &delta in &deltas {
            let params = ModelParams::sis(beta, delta)?;
            let sim = run_sis_ensemble(
                g,
                &params,
                &InitialCondition::UniformSet(c),
                cfg.simulation.replicas,
                &grid,
                seed,
            )?;
            let method = format!("simulation:delta={delta}");
            table.push_curve(
                &exp,
                &method,
                &grid,
                &sim.mean_count,
                Some(&sim.stderr),
                None,
                Some(seed),
            );
            if cfg.scenario.mean_field {
                let x0 = StateVector::probability(vec![c as f64 / n as f64; n])?;
                let mf = integrate_sis(g, &params, &x0, &grid, &Accuracy::default())?;
                let method = format!("mean_field:delta={delta}");
                table.push_curve(&exp, &method, &grid, &mf.totals(), None, None, None);
            }
        }
    }
    Ok(finish("sis-demo", cfg, p, table))
}

fn report_nodes(cfg: &RunConfig, n: usize) -> Result<Vec<usize>> {
    let nodes = &cfg.reliability.nodes;
    if let Some(&bad) = nodes.iter().find(|&&i| i >= n) {
        return Err(Error::Config(format!(
            "reliability node {bad} out of range"
        )));
    }
    Ok(if !nodes.is_empty() {
        nodes.clone()
    } else if n <= 20 {
        (0..n).collect()
    } else {
        (0..10).collect()
    })
}

/// Hazard, survival and residual-life curves for selected nodes, plus the
/// identity-check discrepancies (`check:*` rows at the horizon).
///
/// The start is `reliability.uniform_start · 1`, or the indicator of
/// `scenario.source` when one is set; the transformed identity is only
/// checked for interior starts.
pub fn run_reliability_report(cfg: &RunConfig) -> Result<ExperimentOutput> {
    let mut p = prepare(cfg)?;
    let g = &p.graph;
    let n = g.node_count();
    let nodes = report_nodes(cfg, n)?;
    let x0 = match cfg.scenario.source {
        Some(spec) => StateVector::indicator(n, &[resolve_source(spec, g, &mut p.notes)?])?,
        None => StateVector::probability(vec![cfg.reliability.uniform_start; n])?,
    };
    let acc = Accuracy::default();
    let mut table = ResultTable::new();
    for &beta in &cfg.model.beta {
        let exp = experiment_id(cfg, beta);
        let horizon = match cfg.grid.horizon {
            Some(h) => h,
            None => default_horizon(g, beta, &x0, &ExpmActionParams::default())?,
        };
        p.notes
            .insert(format!("horizon:beta={beta}"), horizon.to_string());
        let grid = uniform_grid(horizon, cfg.grid.points.unwrap_or(RELIABILITY_POINTS));
        let curve = hazard_curve(g, beta, &x0, &grid, &acc)?;

        let mut survival_gap = 0.0f64;
        for &i in &nodes {
            let haz: Vec<f64> = curve.hazard.iter().map(|h| h[i]).collect();
            let cum: Vec<f64> = curve.cumulative.iter().map(|h| h[i]).collect();
            let surv: Vec<f64> = cum
                .iter()
                .map(|h| (1.0 - x0.values()[i]) * (-h).exp())
                .collect();
            table.push_curve(
                &exp,
                &format!("hazard:node={i}"),
                &grid,
                &haz,
                None,
                None,
                None,
            );
            table.push_curve(
                &exp,
                &format!("cumulative_hazard:node={i}"),
                &grid,
                &cum,
                None,
                None,
                None,
            );
            table.push_curve(
                &exp,
                &format!("survival:node={i}"),
                &grid,
                &surv,
                None,
                None,
                None,
            );
        }
        for (h, x) in curve.cumulative.iter().zip(&curve.trajectory.states) {
            for i in 0..n {
                let s = (1.0 - x0.values()[i]) * (-h[i]).exp();
                survival_gap = survival_gap.max((s - (1.0 - x.values()[i])).abs());
            }
        }

        let mut ages = cfg.reliability.ages.clone();
        if ages.is_empty() {
            ages = vec![0.0, 0.5 * horizon];
        }
        ages.sort_by(f64::total_cmp);
        let lookahead = uniform_grid(horizon, cfg.reliability.lookahead_points);
        let mut ordering_excess = f64::NEG_INFINITY;
        let mut previous: Option<Vec<Vec<f64>>> = None;
        for &age in &ages {
            let res = residual_life_distribution(g, beta, &x0, age, &lookahead, &acc)?;
            for &i in &nodes {
                let col: Vec<f64> = res.iter().map(|r| r[i]).collect();
                table.push_curve(
                    &exp,
                    &format!("residual:age={age}:node={i}"),
                    &lookahead,
                    &col,
                    None,
                    None,
                    None,
                );
            }
            if let Some(prev) = &previous {
                for (a, b) in prev.iter().zip(&res) {
                    for (pa, pb) in a.iter().zip(b) {
                        ordering_excess = ordering_excess.max(pb - pa);
                    }
                }
            }
            previous = Some(res);
        }

        let mut checks = vec![
            ("check:survival_discrepancy", survival_gap),
            (
                "check:hazard_decrease",
                curve.max_hazard_decrease().max(0.0),
            ),
        ];
        if ages.len() > 1 {
            checks.push(("check:residual_ordering_excess", ordering_excess.max(0.0)));
        }
        if x0.is_interior() {
            let id = transformed_identity_check(g, beta, &x0, &grid, &acc, FD_STEP)?;
            checks.push(("check:cumulative_identity", id.max_cumulative_discrepancy));
            checks.push(("check:derivative_identity", id.max_derivative_discrepancy));
        } else {
            p.notes.insert(
                format!("identity:beta={beta}"),
                "skipped: transformed identities need an interior start".into(),
            );
        }
        for (method, value) in checks {
            table.push_curve(&exp, method, &[horizon], &[value], None, None, None);
        }
    }
    Ok(finish("reliability", cfg, p, table))
}
