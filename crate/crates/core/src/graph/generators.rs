//! Deterministic and seeded random graph families.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::Graph;

fn build(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).expect("generator produced out-of-range edge")
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &edges)
}

pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n > 2 {
        edges.push((n - 1, 0));
    }
    build(n, &edges)
}

/// Hub `0` joined to `leaves` leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    build(leaves + 1, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j));
        }
    }
    build(n, &edges)
}

/// G(n, p): every pair independently with probability `p`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    build(n, &edges)
}

/// G(n, m): `m` distinct edges drawn uniformly.
pub fn gnm<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    assert!(
        m <= n * n.saturating_sub(1) / 2,
        "too many edges for {n} nodes"
    );
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            edges.push(key);
        }
    }
    build(n, &edges)
}

/// Preferential attachment: a clique on `m_attach + 1` seed nodes, then each
/// new node links to `m_attach` distinct existing nodes chosen with
/// probability proportional to degree.
pub fn barabasi_albert<R: Rng + ?Sized>(n: usize, m_attach: usize, rng: &mut R) -> Graph {
    assert!(m_attach >= 1 && n > m_attach, "need n > m_attach >= 1");
    let seed = m_attach + 1;
    let mut edges = Vec::new();
    // every edge endpoint appears once here, so uniform picks are degree-weighted
    let mut endpoints = Vec::new();
    for i in 0..seed {
        for j in (i + 1)..seed {
            edges.push((i, j));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut chosen = Vec::with_capacity(m_attach);
    for v in seed..n {
        chosen.clear();
        while chosen.len() < m_attach {
            let &t = endpoints.choose(rng).expect("seed clique is nonempty");
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    build(n, &edges)
}

/// Draws G(n, p) until the result is connected.
pub fn connected_erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    loop {
        let g = erdos_renyi(n, p, rng);
        if g.is_connected() {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixed_families() {
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(star(4).degree(0), 4);
        assert_eq!(complete(5).edge_count(), 10);
    }

    #[test]
    fn barabasi_albert_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = barabasi_albert(500, 2, &mut rng);
        assert_eq!(g.node_count(), 500);
        assert_eq!(g.edge_count(), 3 + 2 * (500 - 3));
        assert!(g.is_connected());
        assert!(g.is_symmetric());
        assert!(g.max_degree() > 20);
    }

    #[test]
    fn gnm_has_exact_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = gnm(100, 300, &mut rng);
        assert_eq!(g.edge_count(), 300);
    }

    #[test]
    fn seeded_generators_are_reproducible() {
        let a = erdos_renyi(80, 0.1, &mut ChaCha8Rng::seed_from_u64(11));
        let b = erdos_renyi(80, 0.1, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }
}
