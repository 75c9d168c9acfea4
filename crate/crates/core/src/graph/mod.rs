//! Immutable undirected graphs in compressed adjacency form.
//!
//! Node ids are dense (`0..n`) after loading; the original label of every
//! node is kept alongside so results can be reported against the input ids.
//! Neighbor lists are sorted ascending, which fixes the summation order of
//! every sparse product downstream.

pub mod generators;
mod load;

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use load::{load_edge_list, EdgeList, LoadOptions, LoadedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    labels: Vec<u64>,
}

/// Edges dropped while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub duplicates: usize,
    pub self_loops: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSummary {
    pub degrees: Vec<usize>,
    pub mean: f64,
    pub max: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes labelled `0..n` from undirected edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n as u64).collect();
        Self::from_labelled_edges(labels, edges).map(|(g, _)| g)
    }

    /// Symmetrizes `edges`, drops self-loops and repeated pairs.
    pub fn from_labelled_edges(
        labels: Vec<u64>,
        edges: &[(usize, usize)],
    ) -> Result<(Self, BuildReport)> {
        let n = labels.len();
        let mut report = BuildReport::default();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        let mut repeated_entries = 0;
        for list in &mut adj {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            repeated_entries += before - list.len();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        // every repeated undirected pair shows up once in each endpoint's list
        report.duplicates = repeated_entries / 2;
        Ok((
            Graph {
                offsets,
                targets,
                labels,
            },
            report,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Original label of internal node `i`.
    pub fn label(&self, i: usize) -> u64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Internal id of the node carrying `label`, if present.
    pub fn node_with_label(&self, label: u64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Each undirected edge once, as `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.node_count()).all(|i| self.neighbors(i).iter().all(|&j| self.has_edge(j, i)))
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.degree(i))
            .max()
            .unwrap_or(0)
    }

    pub fn degree_summary(&self) -> DegreeSummary {
        let degrees: Vec<usize> = (0..self.node_count()).map(|i| self.degree(i)).collect();
        let n = degrees.len();
        let mean = if n == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / n as f64
        };
        let max = degrees.iter().copied().max().unwrap_or(0);
        DegreeSummary { degrees, mean, max }
    }

    /// `w_i = Σ_j a_ij s_j v_j`, or `A v` when `scale` is `None`.
    pub fn matvec(&self, v: &[f64], scale: Option<&[f64]>) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.node_count()];
        self.matvec_into(v, scale, &mut out)?;
        Ok(out)
    }

    pub fn matvec_into(&self, v: &[f64], scale: Option<&[f64]>, out: &mut [f64]) -> Result<()> {
        let n = self.node_count();
        check_len(n, v.len())?;
        check_len(n, out.len())?;
        match scale {
            None => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = self.neighbors(i).iter().map(|&j| v[j]).sum();
                }
            }
            Some(s) => {
                check_len(n, s.len())?;
                for (i, o) in out.iter_mut().enumerate() {
                    *o = self.neighbors(i).iter().map(|&j| s[j] * v[j]).sum();
                }
            }
        }
        Ok(())
    }

    /// `(A diag(s))ᵀ v = diag(s) A v`.
    pub(crate) fn transpose_matvec_into(&self, v: &[f64], scale: Option<&[f64]>, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let acc: f64 = self.neighbors(i).iter().map(|&j| v[j]).sum();
            *o = match scale {
                Some(s) => s[i] * acc,
                None => acc,
            };
        }
    }

    /// Component id per node (components numbered in order of their first node).
    pub fn connected_components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.connected_components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced on the largest connected component, relabelled densely.
    ///
    /// Ties between equally large components go to the one holding the
    /// smallest original label.
    pub fn largest_connected_component(&self) -> Graph {
        let comp = self.connected_components();
        let keep = largest_class(&comp, &self.labels);
        self.induced_subgraph(&keep).0
    }

    /// Induced subgraph on the nodes with `keep[i] == true`.
    ///
    /// Returns the subgraph and the old → new id map. Relative node order is
    /// preserved and original labels carry over.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, Vec<Option<usize>>) {
        let mut map = vec![None; self.node_count()];
        let mut labels = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                map[i] = Some(labels.len());
                labels.push(self.labels[i]);
            }
        }
        let mut offsets = Vec::with_capacity(labels.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                continue;
            }
            // the map is monotone, so translated lists stay sorted
            targets.extend(self.neighbors(i).iter().filter_map(|&j| map[j]));
            offsets.push(targets.len());
        }
        (
            Graph {
                offsets,
                targets,
                labels,
            },
            map,
        )
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Membership mask of the largest class in `class_of`; ties by smallest label.
pub(crate) fn largest_class(class_of: &[usize], labels: &[u64]) -> Vec<bool> {
    let classes = class_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut size = vec![0usize; classes];
    let mut min_label = vec![u64::MAX; classes];
    for (i, &c) in class_of.iter().enumerate() {
        size[c] += 1;
        min_label[c] = min_label[c].min(labels[i]);
    }
    let best =
        (0..classes).min_by(|&a, &b| size[b].cmp(&size[a]).then(min_label[a].cmp(&min_label[b])));
    match best {
        Some(b) => class_of.iter().map(|&c| c == b).collect(),
        None => Vec::new(),
    }
}
