//! Rooted, level-annotated discs.
//!
//! A disc is a connected graph on local vertex ids `0..m` whose root is `0`;
//! every vertex carries its distance from the root *inside the disc*. Both
//! true discs (extracted from a graph by BFS) and observed discs (collected
//! from a stream) use this shape.

use crate::error::{Error, Result};

/// Connected rooted graph with per-vertex root distances, all at most `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedDisc {
    k: u32,
    levels: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl RootedDisc {
    /// Validates the disc invariants: root level 0, stored levels equal to
    /// shortest-path distances from the root within the disc, all levels ≤ k,
    /// no self-loops or duplicate edges, and connectivity.
    pub fn new(k: u32, levels: Vec<u32>, edges: Vec<(u32, u32)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::DiscInvariantViolated("radius must be >= 1".into()));
        }
        let m = levels.len();
        if m == 0 {
            return Err(Error::DiscInvariantViolated("empty vertex set".into()));
        }
        if levels[0] != 0 {
            return Err(Error::DiscInvariantViolated("root level must be 0".into()));
        }
        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::DiscInvariantViolated("duplicate edge".into()));
        }
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::DiscInvariantViolated("self-loop".into()));
            }
            if b as usize >= m {
                return Err(Error::DiscInvariantViolated("edge endpoint out of range".into()));
            }
        }
        let disc = Self { k, levels, edges };
        let dist = disc.root_distances();
        for (v, d) in dist.iter().enumerate() {
            match d {
                None => {
                    return Err(Error::DiscInvariantViolated(format!(
                        "vertex {v} unreachable from root"
                    )))
                }
                Some(d) => {
                    if *d != disc.levels[v] {
                        return Err(Error::DiscInvariantViolated(format!(
                            "vertex {v} has level {} but distance {d}",
                            disc.levels[v]
                        )));
                    }
                    if *d > k {
                        return Err(Error::DiscInvariantViolated(format!(
                            "vertex {v} at distance {d} > k = {k}"
                        )));
                    }
                }
            }
        }
        Ok(disc)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn num_vertices(&self) -> usize {
        self.levels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.levels.len()];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn root_degree(&self) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == 0 || b == 0).count()
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.levels.len()];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// True when no vertex sits at level `k`, i.e. the disc is an entire
    /// connected component of any graph it was extracted from.
    pub fn is_closed(&self) -> bool {
        self.levels.iter().all(|&l| l < self.k)
    }

    /// A connected graph contains a cycle iff it has at least as many edges
    /// as vertices.
    pub fn has_cycle(&self) -> bool {
        self.edges.len() >= self.levels.len()
    }

    /// Cumulative vertex counts by level: entry `l` counts vertices at level
    /// at most `l`. Monotone under the sub-disc order, used as a cheap screen.
    pub fn level_profile(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.k as usize + 1];
        for &l in &self.levels {
            counts[l as usize] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        counts
    }

    fn root_distances(&self) -> Vec<Option<u32>> {
        let adj = self.adjacency();
        bfs_distances(&adj, 0)
    }
}

/// BFS distances from `root` over local adjacency lists; `None` = unreachable.
pub(crate) fn bfs_distances(adj: &[Vec<u32>], root: u32) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    dist[root as usize] = Some(0);
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize].unwrap();
        for &w in &adj[v as usize] {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// A disc plus the graph vertex behind each local id. Extraction and stream
/// collection return this so a disc can be checked against the host graph.
#[derive(Debug, Clone)]
pub struct AnchoredDisc {
    pub root: u32,
    pub disc: RootedDisc,
    /// `to_graph[local]` is the graph vertex id of local vertex `local`.
    pub to_graph: Vec<u32>,
}

impl AnchoredDisc {
    /// Edges in graph ids, normalized to (min, max).
    pub fn graph_edges(&self) -> Vec<(u32, u32)> {
        self.disc
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (self.to_graph[a as usize], self.to_graph[b as usize]);
                if x < y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_triangle_disc() {
        let d = RootedDisc::new(1, vec![0, 1, 1], vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(d.num_vertices(), 3);
        assert_eq!(d.num_edges(), 3);
        assert!(d.has_cycle());
        // Vertices sit at level k = 1, so the disc does not certify a whole
        // component.
        assert!(!d.is_closed());
        assert_eq!(d.root_degree(), 2);
    }

    #[test]
    fn rejects_wrong_levels() {
        let err = RootedDisc::new(1, vec![0, 2], vec![(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::DiscInvariantViolated(_)));
    }

    #[test]
    fn rejects_disconnected() {
        let err = RootedDisc::new(2, vec![0, 1, 1], vec![(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::DiscInvariantViolated(_)));
    }

    #[test]
    fn rejects_level_beyond_radius() {
        let err = RootedDisc::new(1, vec![0, 1, 2], vec![(0, 1), (1, 2)]).unwrap_err();
        assert!(matches!(err, Error::DiscInvariantViolated(_)));
    }

    #[test]
    fn single_vertex_disc() {
        let d = RootedDisc::new(3, vec![0], vec![]).unwrap();
        assert!(d.is_closed());
        assert!(!d.has_cycle());
    }
}
