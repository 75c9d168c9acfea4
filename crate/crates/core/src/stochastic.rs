//! Exact continuous-time simulation of the SI (and SIS) Markov process,
//! Monte Carlo ensembles, and a brute-force master-equation oracle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::dynamics::{integrate, validate_grid, Accuracy, ModelParams, StateKind, Trajectory};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph the master-equation oracle accepts.
pub const ORACLE_MAX_NODES: usize = 12;

/// Replica `replica` of a run seeded with `master`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master: u64,
    pub replica: u64,
}

impl Seed {
    pub fn new(master: u64, replica: u64) -> Self {
        Seed { master, replica }
    }

    /// ChaCha8 keyed by the master seed, on stream `replica`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.replica);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Clock {
    time: f64,
    node: usize,
}

impl Eq for Clock {}

impl Ord for Clock {
    // reversed so BinaryHeap pops the earliest clock
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Clock {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_nodes(g: &Graph, nodes: &[usize]) -> Result<()> {
    if let Some(&bad) = nodes.iter().find(|&&v| v >= g.node_count()) {
        return Err(Error::invalid(format!(
            "node {bad} out of range for n = {}",
            g.node_count()
        )));
    }
    Ok(())
}

/// Infection time of every node in one SI realisation; `0` for the initial
/// set, `+∞` for nodes still susceptible at `horizon`.
///
/// Next-reaction scheme over per-node aggregate rates `β·(infected
/// neighbours)`. When a node's rate changes from `r` to `r'` its pending
/// clock `τ` is rescaled to `t + (r/r')(τ - t)`, which keeps it exact.
pub fn simulate_si_replica(
    g: &Graph,
    beta: f64,
    initial: &[usize],
    horizon: f64,
    seed: Seed,
) -> Result<Vec<f64>> {
    ModelParams::si(beta)?;
    check_nodes(g, initial)?;
    if !(horizon >= 0.0) {
        return Err(Error::invalid("horizon must be nonnegative"));
    }
    let mut seen = vec![false; g.node_count()];
    initial.iter().for_each(|&v| seen[v] = true);
    let k = seen.iter().filter(|&&s| s).count();
    if k == 0 || k == g.node_count() {
        return Err(Error::invalid(
            "initial infected set must be a nonempty proper subset",
        ));
    }
    Ok(si_times(g, beta, initial, horizon, &mut seed.rng()))
}

pub(crate) fn si_times<R: Rng + ?Sized>(
    g: &Graph,
    beta: f64,
    initial: &[usize],
    horizon: f64,
    rng: &mut R,
) -> Vec<f64> {
    let n = g.node_count();
    let mut st = SiState {
        times: vec![f64::INFINITY; n],
        pressure: vec![0u32; n],
        clock: vec![f64::INFINITY; n],
        heap: BinaryHeap::new(),
    };
    for &v in initial {
        if st.times[v].is_infinite() {
            st.infect(g, beta, v, 0.0, rng);
        }
    }
    while let Some(Clock { time, node }) = st.heap.pop() {
        if time > horizon {
            break;
        }
        // stale entries from before a rescale
        if st.times[node].is_finite() || time != st.clock[node] {
            continue;
        }
        st.infect(g, beta, node, time, rng);
    }
    st.times
}

struct SiState {
    times: Vec<f64>,
    pressure: Vec<u32>,
    clock: Vec<f64>,
    heap: BinaryHeap<Clock>,
}

impl SiState {
    fn infect<R: Rng + ?Sized>(&mut self, g: &Graph, beta: f64, v: usize, t: f64, rng: &mut R) {
        self.times[v] = t;
        for &u in g.neighbors(v) {
            if self.times[u].is_finite() {
                continue;
            }
            let old = beta * self.pressure[u] as f64;
            self.pressure[u] += 1;
            let new = beta * self.pressure[u] as f64;
            self.clock[u] = if self.pressure[u] == 1 {
                let e: f64 = rng.sample(Exp1);
                t + e / new
            } else {
                t + (old / new) * (self.clock[u] - t)
            };
            self.heap.push(Clock {
                time: self.clock[u],
                node: u,
            });
        }
    }
}

/// Infected count at each grid time for one SIS realisation.
///
/// Uniformisation over infected nodes: events arrive at total rate
/// `I·(δ + β d_max)`; a uniformly chosen infected node recovers with
/// probability `δ/(δ + β d_max)`, otherwise it attempts one of `d_max`
/// neighbour slots and infects that neighbour if the slot is real and the
/// neighbour susceptible. Each S–I edge therefore fires at rate exactly `β`.
pub fn simulate_sis_replica(
    g: &Graph,
    params: &ModelParams,
    initial: &[usize],
    grid: &[f64],
    seed: Seed,
) -> Result<Vec<u32>> {
    ModelParams::sis(params.beta, params.delta)?;
    check_nodes(g, initial)?;
    validate_grid(grid)?;
    let mut hits = vec![Vec::new(); grid.len()];
    Ok(sis_counts(
        g,
        params,
        initial,
        grid,
        &mut seed.rng(),
        &mut hits,
    ))
}

/// Also records, per grid time, which nodes are infected (into `snapshots`).
fn sis_counts<R: Rng + ?Sized>(
    g: &Graph,
    params: &ModelParams,
    initial: &[usize],
    grid: &[f64],
    rng: &mut R,
    snapshots: &mut [Vec<usize>],
) -> Vec<u32> {
    let n = g.node_count();
    let dmax = g.max_degree();
    let infect_rate = params.beta * dmax as f64;
    let per_node = params.delta + infect_rate;

    // infected list with back-pointers for O(1) removal
    let mut list: Vec<usize> = Vec::with_capacity(n);
    let mut pos = vec![usize::MAX; n];
    for &v in initial {
        if pos[v] == usize::MAX {
            pos[v] = list.len();
            list.push(v);
        }
    }
    let mut counts = Vec::with_capacity(grid.len());
    let mut t = 0.0;
    let mut k = 0;
    loop {
        let total = per_node * list.len() as f64;
        let next = if total > 0.0 {
            let e: f64 = rng.sample(Exp1);
            t + e / total
        } else {
            f64::INFINITY
        };
        while k < grid.len() && grid[k] < next {
            counts.push(list.len() as u32);
            snapshots[k].extend_from_slice(&list);
            k += 1;
        }
        if k == grid.len() {
            return counts;
        }
        t = next;
        let j = list[rng.random_range(0..list.len())];
        let u: f64 = rng.random::<f64>() * per_node;
        if u < params.delta {
            let p = pos[j];
            let last = list.pop().expect("nonempty");
            if last != j {
                list[p] = last;
                pos[last] = p;
            }
            pos[j] = usize::MAX;
        } else {
            let slot = rng.random_range(0..dmax);
            let nb = g.neighbors(j);
            if slot < nb.len() {
                let v = nb[slot];
                if pos[v] == usize::MAX {
                    pos[v] = list.len();
                    list.push(v);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// The same infected set in every replica.
    Fixed(Vec<usize>),
    /// One node drawn uniformly per replica.
    UniformSingleSource,
    /// Node `i` infected independently with probability `p_i`.
    Bernoulli(Vec<f64>),
    /// `count` distinct nodes drawn uniformly per replica.
    UniformSet(usize),
}

impl InitialCondition {
    fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.node_count();
        match self {
            InitialCondition::Fixed(set) => {
                check_nodes(g, set)?;
                if set.is_empty() {
                    return Err(Error::invalid("fixed initial set is empty"));
                }
            }
            InitialCondition::UniformSingleSource => {
                if n == 0 {
                    return Err(Error::invalid("no node to draw a source from"));
                }
            }
            InitialCondition::Bernoulli(p) => {
                if p.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: p.len(),
                    });
                }
                if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return Err(Error::invalid("Bernoulli probabilities must lie in [0, 1]"));
                }
            }
            InitialCondition::UniformSet(c) => {
                if *c == 0 || *c > n {
                    return Err(Error::invalid(format!("cannot draw {c} of {n} nodes")));
                }
            }
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        match self {
            InitialCondition::Fixed(set) => set.clone(),
            InitialCondition::UniformSingleSource => vec![rng.random_range(0..n)],
            InitialCondition::Bernoulli(p) => {
                (0..n).filter(|&i| rng.random::<f64>() < p[i]).collect()
            }
            InitialCondition::UniformSet(c) => rand::seq::index::sample(rng, n, *c).into_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnsembleOptions {
    /// Keep every replica's infection-time vector (SI only).
    pub keep_infection_times: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Mean number of infected nodes at each grid time.
    pub mean_count: Vec<f64>,
    /// Standard error of `mean_count`.
    pub stderr: Vec<f64>,
    /// `node_probability[k][i]`: fraction of replicas with node `i` infected at `times[k]`.
    pub node_probability: Vec<Vec<f64>>,
    pub replicas: usize,
    /// Per replica, per node infection time (`+∞` if not infected by the last grid time).
    pub infection_times: Option<Vec<Vec<f64>>>,
}

impl EnsembleResult {
    /// Binomial standard error of `node_probability[k][i]`.
    pub fn node_stderr(&self, k: usize, i: usize) -> f64 {
        let p = self.node_probability[k][i];
        (p * (1.0 - p) / self.replicas as f64).sqrt()
    }
}

/// Integer accumulators, so the reduction is exact and independent of how
/// rayon splits the replicas.
#[derive(Clone)]
struct Tally {
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
    hits: Vec<Vec<u64>>,
}

impl Tally {
    fn new(points: usize, n: usize) -> Self {
        Tally {
            sum: vec![0; points],
            sum_sq: vec![0; points],
            hits: vec![vec![0; n]; points],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
            for (a, b) in self.hits[k].iter_mut().zip(&other.hits[k]) {
                *a += b;
            }
        }
        self
    }

    fn finish(
        self,
        times: &[f64],
        replicas: usize,
        infection_times: Option<Vec<Vec<f64>>>,
    ) -> EnsembleResult {
        let r = replicas as f64;
        let mut mean_count = Vec::with_capacity(times.len());
        let mut stderr = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            let s = self.sum[k] as f64;
            let mean = s / r;
            let var = if replicas > 1 {
                ((self.sum_sq[k] as f64 - s * mean) / (r - 1.0)).max(0.0)
            } else {
                0.0
            };
            mean_count.push(mean);
            stderr.push((var / r).sqrt());
        }
        let node_probability = self
            .hits
            .into_iter()
            .map(|row| row.into_iter().map(|h| h as f64 / r).collect())
            .collect();
        EnsembleResult {
            times: times.to_vec(),
            mean_count,
            stderr,
            node_probability,
            replicas,
            infection_times,
        }
    }
}

fn check_ensemble(g: &Graph, init: &InitialCondition, replicas: usize, grid: &[f64]) -> Result<()> {
    if replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    validate_grid(grid)?;
    init.validate(g)
}

/// SI Monte Carlo over `replicas` independent realisations.
///
/// Replica `r` uses [`Seed::new(master_seed, r)`](Seed), drawing its initial
/// set first and then the epidemic, so results do not depend on scheduling.
pub fn run_ensemble(
    g: &Graph,
    beta: f64,
    init: &InitialCondition,
    replicas: usize,
    grid: &[f64],
    master_seed: u64,
    options: EnsembleOptions,
) -> Result<EnsembleResult> {
    ModelParams::si(beta)?;
    check_ensemble(g, init, replicas, grid)?;
    let n = g.node_count();
    let horizon = grid[grid.len() - 1];
    let points = grid.len();

    let run = |r: usize| {
        let mut rng = Seed::new(master_seed, r as u64).rng();
        let initial = init.draw(n, &mut rng);
        si_times(g, beta, &initial, horizon, &mut rng)
    };
    let add = |mut tally: Tally, times: &[f64]| {
        // first grid index at which each node is infected
        let mut first = vec![0u64; points + 1];
        for (i, &ti) in times.iter().enumerate() {
            if ti.is_finite() {
                let k = grid.partition_point(|&t| t < ti);
                first[k] += 1;
                for row in &mut tally.hits[k..] {
                    row[i] += 1;
                }
            }
        }
        let mut count = 0u64;
        for k in 0..points {
            count += first[k];
            tally.sum[k] += count;
            tally.sum_sq[k] += count * count;
        }
        tally
    };

    if options.keep_infection_times {
        let all: Vec<Vec<f64>> = (0..replicas).into_par_iter().map(run).collect();
        let tally = all.iter().fold(Tally::new(points, n), |t, x| add(t, x));
        Ok(tally.finish(grid, replicas, Some(all)))
    } else {
        let tally = (0..replicas)
            .into_par_iter()
            .fold(|| Tally::new(points, n), |t, r| add(t, &run(r)))
            .reduce(|| Tally::new(points, n), Tally::merge);
        Ok(tally.finish(grid, replicas, None))
    }
}

/// SIS Monte Carlo; same seeding contract as [`run_ensemble`].
pub fn run_sis_ensemble(
    g: &Graph,
    params: &ModelParams,
    init: &InitialCondition,
    replicas: usize,
    grid: &[f64],
    master_seed: u64,
) -> Result<EnsembleResult> {
    ModelParams::sis(params.beta, params.delta)?;
    check_ensemble(g, init, replicas, grid)?;
    let n = g.node_count();
    let points = grid.len();
    let tally = (0..replicas)
        .into_par_iter()
        .fold(
            || Tally::new(points, n),
            |mut tally, r| {
                let mut rng = Seed::new(master_seed, r as u64).rng();
                let initial = init.draw(n, &mut rng);
                let mut snaps = vec![Vec::new(); points];
                let counts = sis_counts(g, params, &initial, grid, &mut rng, &mut snaps);
                for k in 0..points {
                    let c = counts[k] as u64;
                    tally.sum[k] += c;
                    tally.sum_sq[k] += c * c;
                    for &v in &snaps[k] {
                        tally.hits[k][v] += 1;
                    }
                }
                tally
            },
        )
        .reduce(|| Tally::new(points, n), Tally::merge);
    Ok(tally.finish(grid, replicas, None))
}

/// Exact per-node marginals `P{X_i(t) = 1}` of the SI Markov chain on all
/// `2ⁿ` infection sets, started from independent Bernoulli(`x0_i`) states.
pub fn master_equation_oracle(
    g: &Graph,
    beta: f64,
    x0: &[f64],
    grid: &[f64],
) -> Result<Trajectory> {
    let n = g.node_count();
    if n > ORACLE_MAX_NODES {
        return Err(Error::TooLarge {
            n,
            limit: ORACLE_MAX_NODES,
        });
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid("initial probabilities must lie in [0, 1]"));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::invalid(
            "infection rate must be finite and nonnegative",
        ));
    }
    let states = 1usize << n;
    let nb_mask: Vec<usize> = (0..n)
        .map(|i| g.neighbors(i).iter().fold(0, |m, &j| m | (1 << j)))
        .collect();
    // rate of S -> S ∪ {i} is β |N(i) ∩ S|
    let rate = |s: usize, i: usize| beta * (nb_mask[i] & s).count_ones() as f64;
    let outflow: Vec<f64> = (0..states)
        .map(|s| {
            (0..n)
                .filter(|&i| s & (1 << i) == 0)
                .map(|i| rate(s, i))
                .sum()
        })
        .collect();

    let p0: Vec<f64> = (0..states)
        .map(|s| {
            (0..n)
                .map(|i| {
                    if s & (1 << i) != 0 {
                        x0[i]
                    } else {
                        1.0 - x0[i]
                    }
                })
                .product()
        })
        .collect();
    let rows = integrate(
        |p, dp| {
            for s in 0..states {
                let mut inflow = 0.0;
                let mut bits = s;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let prev = s & !(1 << i);
                    inflow += rate(prev, i) * p[prev];
                }
                dp[s] = inflow - outflow[s] * p[s];
            }
        },
        &p0,
        grid,
        &Accuracy::new(1e-10, 1e-14),
        |_, _, p: &mut [f64]| {
            for v in p.iter_mut() {
                *v = v.max(0.0);
            }
            Ok(())
        },
    )?;
    let marginals = rows
        .into_iter()
        .map(|p| {
            (0..n)
                .map(|i| {
                    let m: f64 = (0..states)
                        .filter(|s| s & (1 << i) != 0)
                        .map(|s| p[s])
                        .sum();
                    m.clamp(0.0, 1.0)
                })
                .collect()
        })
        .collect();
    Trajectory::from_rows(grid, marginals, StateKind::Probability)
}
