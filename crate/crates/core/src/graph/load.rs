use std::collections::BTreeMap;
use std::io::BufRead;

use super::{largest_class, BuildReport, Graph};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub comment_prefix: String,
    /// Field separator; `None` splits on any whitespace.
    pub delimiter: Option<char>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            comment_prefix: "#".to_string(),
            delimiter: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub duplicates_dropped: usize,
    pub self_loops_dropped: usize,
}

/// Raw edge list as read from disk, with dense ids and the original labels.
///
/// Edges keep their direction so that directed snapshots can be reduced to
/// their strongly connected core before symmetrizing.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub labels: Vec<u64>,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn parse<R: BufRead>(reader: R, options: &LoadOptions) -> Result<Self> {
        let mut raw = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty()
                || (!options.comment_prefix.is_empty()
                    && trimmed.starts_with(options.comment_prefix.as_str()))
            {
                continue;
            }
            let mut fields: Vec<&str> = match options.delimiter {
                Some(d) => trimmed.split(d).map(str::trim).collect(),
                None => trimmed.split_whitespace().collect(),
            };
            fields.retain(|f| !f.is_empty());
            if fields.len() < 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected two node ids, found {:?}", trimmed),
                });
            }
            let parse = |tok: &str| {
                tok.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("non-integer token {:?}", tok),
                })
            };
            raw.push((parse(fields[0])?, parse(fields[1])?));
        }
        if raw.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let mut ids: BTreeMap<u64, usize> =
            raw.iter().flat_map(|&(a, b)| [(a, 0), (b, 0)]).collect();
        let labels: Vec<u64> = ids.keys().copied().collect();
        for (dense, slot) in ids.values_mut().enumerate() {
            *slot = dense;
        }
        let edges = raw.iter().map(|(a, b)| (ids[a], ids[b])).collect();
        Ok(EdgeList { labels, edges })
    }

    /// Undirected graph over every node in the list.
    pub fn into_graph(self) -> Result<LoadedGraph> {
        let (graph, report) = Graph::from_labelled_edges(self.labels, &self.edges)?;
        finish(graph, report)
    }

    /// Largest strongly connected component of the directed list, returned
    /// as an undirected graph over its nodes.
    pub fn largest_strongly_connected_component(&self) -> Result<Graph> {
        let n = self.labels.len();
        let comp = tarjan_scc(n, &self.edges);
        let keep = largest_class(&comp, &self.labels);
        let mut map = vec![usize::MAX; n];
        let mut labels = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                map[i] = labels.len();
                labels.push(self.labels[i]);
            }
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (map[a], map[b]))
            .collect();
        let (graph, _) = Graph::from_labelled_edges(labels, &edges)?;
        Ok(graph)
    }
}

fn finish(graph: Graph, report: BuildReport) -> Result<LoadedGraph> {
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(LoadedGraph {
        graph,
        duplicates_dropped: report.duplicates,
        self_loops_dropped: report.self_loops,
    })
}

/// Parses a whitespace- (or `delimiter`-) separated edge list and builds the
/// undirected graph it describes.
pub fn load_edge_list<R: BufRead>(reader: R, options: &LoadOptions) -> Result<LoadedGraph> {
    EdgeList::parse(reader, options)?.into_graph()
}

/// Iterative Tarjan; returns a component index per node.
fn tarjan_scc(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut offsets = vec![0usize; n + 1];
    for &(a, _) in edges {
        offsets[a + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut succ = vec![0usize; edges.len()];
    for &(a, b) in edges {
        succ[fill[a]] = b;
        fill[a] += 1;
    }

    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    // (node, next successor position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, offsets[root]));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < offsets[v + 1] {
                let w = succ[*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, offsets[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<LoadedGraph> {
        load_edge_list(text.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn path_from_text() {
        let g = load("0 1\n1 2").unwrap().graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn drops_duplicate_and_self_loop() {
        let loaded = load("0 1\n1 0\n0 0").unwrap();
        assert_eq!(loaded.graph.node_count(), 2);
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.duplicates_dropped, 1);
        assert_eq!(loaded.self_loops_dropped, 1);
    }

    #[test]
    fn comments_and_sparse_ids() {
        let text = "# Directed graph\n# FromNodeId\tToNodeId\n10\t30\n30\t70\n";
        let g = load(text).unwrap().graph;
        assert_eq!(g.labels(), &[10, 30, 70]);
        assert_eq!(g.node_with_label(70), Some(2));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
    }

    #[test]
    fn custom_delimiter() {
        let opts = LoadOptions {
            comment_prefix: "%".into(),
            delimiter: Some(','),
        };
        let g = load_edge_list("% header\n1,2\n2,3\n".as_bytes(), &opts)
            .unwrap()
            .graph;
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match load("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("0\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(load("# nothing\n"), Err(Error::EmptyGraph)));
        assert!(matches!(load("3 3\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn strongly_connected_core() {
        // 0 -> 1 -> 2 -> 0 is a cycle, 2 -> 3 -> 4 hangs off it
        let list = EdgeList::parse(
            "0 1\n1 2\n2 0\n2 3\n3 4\n".as_bytes(),
            &LoadOptions::default(),
        )
        .unwrap();
        let scc = list.largest_strongly_connected_component().unwrap();
        assert_eq!(scc.labels(), &[0, 1, 2]);
        assert_eq!(scc.edge_count(), 3);

        let weak = list
            .into_graph()
            .unwrap()
            .graph
            .largest_connected_component();
        assert_eq!(weak.node_count(), 5);
    }
}
