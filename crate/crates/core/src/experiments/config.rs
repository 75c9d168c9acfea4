use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generators, EdgeList, Graph, LoadOptions};
use crate::vaccination::{node_with_degree, top_decile_node, PolicyKind};

/// Replicas used unless the config says otherwise.
pub const DESK_REPLICAS: usize = 2000;
/// Replicas under `--full-scale`.
pub const FULL_REPLICAS: usize = 10_000;

/// One experiment, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Experiment id; names the output files and fills the `experiment` column.
    pub id: String,
    pub graph: GraphSpec,
    pub model: ModelConfig,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub reliability: ReliabilityConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentMode {
    /// Largest connected component of the symmetrized graph.
    #[default]
    Lcc,
    /// Largest strongly connected component of the directed edge list, then symmetrized.
    Scc,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    File {
        path: PathBuf,
        #[serde(default)]
        component: ComponentMode,
    },
    Er {
        n: usize,
        p: f64,
        #[serde(default = "default_graph_seed")]
        seed: u64,
    },
    Gnm {
        n: usize,
        m: usize,
        #[serde(default = "default_graph_seed")]
        seed: u64,
    },
    Ba {
        n: usize,
        m_attach: usize,
        #[serde(default = "default_graph_seed")]
        seed: u64,
    },
    Path {
        n: usize,
    },
    Star {
        leaves: usize,
    },
    Complete {
        n: usize,
    },
}

fn default_graph_seed() -> u64 {
    1
}

impl GraphSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match *self {
            GraphSpec::File { .. } => Ok(()),
            GraphSpec::Er { n, p, .. } if n < 2 || !(0.0..=1.0).contains(&p) => {
                bad("er graph needs n >= 2 and p in [0, 1]")
            }
            GraphSpec::Gnm { n, m, .. } if n < 2 || m > n * (n - 1) / 2 => {
                bad("gnm graph needs n >= 2 and m <= n(n-1)/2")
            }
            GraphSpec::Ba { n, m_attach, .. } if m_attach == 0 || n <= m_attach => {
                bad("ba graph needs 0 < m_attach < n")
            }
            GraphSpec::Path { n } | GraphSpec::Complete { n } if n < 2 => bad("graph needs n >= 2"),
            GraphSpec::Star { leaves: 0 } => bad("star needs at least one leaf"),
            _ => Ok(()),
        }
    }

    /// Builds the graph. Random generators keep only their largest component.
    pub fn build(&self) -> Result<Graph> {
        self.validate()?;
        let g = match *self {
            GraphSpec::File {
                ref path,
                component,
            } => {
                let reader = BufReader::new(File::open(path)?);
                let list = EdgeList::parse(reader, &LoadOptions::default())?;
                match component {
                    ComponentMode::Scc => list.largest_strongly_connected_component()?,
                    ComponentMode::Lcc => list.into_graph()?.graph.largest_connected_component(),
                    ComponentMode::None => list.into_graph()?.graph,
                }
            }
            GraphSpec::Er { n, p, seed } => {
                generators::erdos_renyi(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
                    .largest_connected_component()
            }
            GraphSpec::Gnm { n, m, seed } => {
                generators::gnm(n, m, &mut ChaCha8Rng::seed_from_u64(seed))
                    .largest_connected_component()
            }
            GraphSpec::Ba { n, m_attach, seed } => {
                generators::barabasi_albert(n, m_attach, &mut ChaCha8Rng::seed_from_u64(seed))
            }
            GraphSpec::Path { n } => generators::path(n),
            GraphSpec::Star { leaves } => generators::star(leaves),
            GraphSpec::Complete { n } => generators::complete(n),
        };
        if g.edge_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub beta: Vec<f64>,
    /// Curing rates for the SIS demo.
    #[serde(default)]
    pub delta: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    #[default]
    Preventive,
    Reactive,
}

/// How the fixed source of a run is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSpec {
    Node(usize),
    /// Lowest-id node with this degree.
    Degree(usize),
    /// Lowest-id node with the 90th-percentile degree.
    TopDecile,
}

impl SourceSpec {
    pub fn resolve(&self, g: &Graph) -> Result<usize> {
        let found = match *self {
            SourceSpec::Node(i) => (i < g.node_count()).then_some(i),
            SourceSpec::Degree(d) => node_with_degree(g, d),
            SourceSpec::TopDecile => top_decile_node(g),
        };
        found.ok_or_else(|| Error::Config(format!("no node matches source {self:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub kind: ScenarioKind,
    /// Policies to compare; empty means the scenario's own policy plus EVC and degree.
    #[serde(default)]
    pub policies: Vec<PolicyKind>,
    #[serde(default)]
    pub k: Vec<usize>,
    /// Score evaluation time; defaults to `1/(βλ)`.
    #[serde(default)]
    pub t_star: Option<f64>,
    /// Fixed source for bound comparison, reactive policies and reliability runs.
    #[serde(default)]
    pub source: Option<SourceSpec>,
    /// Expected initial infectives `c` in the preventive score.
    #[serde(default = "default_expected_infectives")]
    pub expected_infectives: f64,
    /// Random initial infectives for the SIS demo.
    #[serde(default = "default_initial_infected")]
    pub initial_infected: usize,
    /// Also integrate the SIS mean field (rows tagged `mean_field`).
    #[serde(default)]
    pub mean_field: bool,
}

fn default_expected_infectives() -> f64 {
    1.0
}

fn default_initial_infected() -> usize {
    1000
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            kind: ScenarioKind::default(),
            policies: Vec::new(),
            k: Vec::new(),
            t_star: None,
            source: None,
            expected_infectives: default_expected_infectives(),
            initial_infected: default_initial_infected(),
            mean_field: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_replicas() -> usize {
    DESK_REPLICAS
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            replicas: DESK_REPLICAS,
            seed: 0,
        }
    }
}

/// Output grid. A missing horizon is chosen per runner and recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, rename = "T")]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReliabilityConfig {
    /// Uniform interior start `x0 = u·1`; used when no source is configured.
    #[serde(default = "default_uniform_start")]
    pub uniform_start: f64,
    /// Nodes whose curves are written; empty means all nodes when `n <= 20`,
    /// otherwise the ten lowest ids.
    #[serde(default)]
    pub nodes: Vec<usize>,
    /// Ages at which residual-life tables are written.
    #[serde(default)]
    pub ages: Vec<f64>,
    #[serde(default = "default_lookahead_points")]
    pub lookahead_points: usize,
}

fn default_uniform_start() -> f64 {
    0.01
}

fn default_lookahead_points() -> usize {
    21
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        ReliabilityConfig {
            uniform_start: default_uniform_start(),
            nodes: Vec::new(),
            ages: Vec::new(),
            lookahead_points: default_lookahead_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_output_dir(),
        }
    }
}

/// Command-line overrides, applied after the file is read.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub beta: Option<Vec<f64>>,
    pub k: Option<Vec<usize>>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    pub graph: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub full_scale: bool,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; a relative graph path is taken relative to the file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        if let GraphSpec::File { path: p, .. } = &mut cfg.graph {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if o.full_scale {
            self.simulation.replicas = FULL_REPLICAS;
        }
        if let Some(b) = &o.beta {
            self.model.beta = b.clone();
        }
        if let Some(k) = &o.k {
            self.scenario.k = k.clone();
        }
        if let Some(r) = o.replicas {
            self.simulation.replicas = r;
        }
        if let Some(s) = o.seed {
            self.simulation.seed = s;
        }
        if let Some(p) = &o.graph {
            let component = match self.graph {
                GraphSpec::File { component, .. } => component,
                _ => ComponentMode::default(),
            };
            self.graph = GraphSpec::File {
                path: p.clone(),
                component,
            };
        }
        if let Some(d) = &o.out {
            self.output.dir = d.clone();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return bad(format!("id {:?} must be a nonempty file stem", self.id));
        }
        self.graph.validate()?;
        if self.model.beta.is_empty() {
            return bad("model.beta must list at least one rate".into());
        }
        if self.model.beta.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return bad("model.beta entries must be positive".into());
        }
        if self
            .model
            .delta
            .iter()
            .any(|d| !(*d >= 0.0 && d.is_finite()))
        {
            return bad("model.delta entries must be nonnegative".into());
        }
        if self.simulation.replicas == 0 {
            return bad("simulation.replicas must be positive".into());
        }
        if let Some(t) = self.scenario.t_star {
            if !(t > 0.0 && t.is_finite()) {
                return bad("scenario.t_star must be positive".into());
            }
        }
        if !(self.scenario.expected_infectives > 0.0) {
            return bad("scenario.expected_infectives must be positive".into());
        }
        if let Some(h) = self.grid.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return bad("grid.T must be positive".into());
            }
        }
        if matches!(self.grid.points, Some(p) if p < 2) {
            return bad("grid.points must be at least 2".into());
        }
        let u = self.reliability.uniform_start;
        if !(u > 0.0 && u < 1.0) {
            return bad("reliability.uniform_start must lie in (0, 1)".into());
        }
        if self
            .reliability
            .ages
            .iter()
            .any(|a| !(*a >= 0.0 && a.is_finite()))
        {
            return bad("reliability.ages must be nonnegative".into());
        }
        if self.reliability.lookahead_points < 2 {
            return bad("reliability.lookahead_points must be at least 2".into());
        }
        Ok(())
    }
}
