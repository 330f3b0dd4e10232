//! Bounded-degree graphs: construction, the edge-list text format, k-disc
//! extraction, and seeded corpus generators.

use crate::disc::{bfs_distances, AnchoredDisc, RootedDisc};
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Undirected graph on dense 0-based vertex ids with every degree ≤ `d`.
/// Immutable once constructed; safe to share across threads.
#[derive(Debug, Clone)]
pub struct BoundedGraph {
    n: usize,
    d: usize,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl BoundedGraph {
    pub fn new(n: usize, d: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("degree bound must be >= 1".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v as usize >= n {
                return Err(Error::VertexOutOfRange(v, n));
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            edges.push((u, v));
        }
        for (v, list) in adj.iter_mut().enumerate() {
            if list.len() > d {
                return Err(Error::DegreeBoundViolated(v as u32));
            }
            list.sort_unstable();
        }
        edges.sort_unstable();
        Ok(Self { n, d, adj, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> usize {
        self.d
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges normalized to (min, max), sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    /// Parses the edge-list format: first line `n d`, then one `u v` pair per
    /// non-empty line. Duplicate edges are an error.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (first_no, first) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
        let mut head = first.split_whitespace();
        let parse_usize = |tok: Option<&str>, line: usize, what: &str| -> Result<usize> {
            tok.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?
                .parse::<usize>()
                .map_err(|_| Error::Parse { line, msg: format!("bad {what}") })
        };
        let n = parse_usize(head.next(), first_no + 1, "vertex count")?;
        let d = parse_usize(head.next(), first_no + 1, "degree bound")?;
        if head.next().is_some() {
            return Err(Error::Parse { line: first_no + 1, msg: "trailing tokens in header".into() });
        }
        let mut pairs = Vec::new();
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let u = parse_usize(it.next(), no + 1, "endpoint")? as u32;
            let v = parse_usize(it.next(), no + 1, "endpoint")? as u32;
            if it.next().is_some() {
                return Err(Error::Parse { line: no + 1, msg: "trailing tokens".into() });
            }
            pairs.push((u, v));
        }
        Self::new(n, d, pairs)
    }

    /// Emits the same format, edges sorted lexicographically, LF endings.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.d);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Extracts the true k-disc around `v`: the subgraph induced by all vertices
/// at distance ≤ k, rooted at `v`, with exact distance annotations.
pub fn true_disc(g: &BoundedGraph, v: u32, k: u32) -> Result<AnchoredDisc> {
    if v as usize >= g.n() {
        return Err(Error::VertexOutOfRange(v, g.n()));
    }
    if k == 0 {
        return Err(Error::InvalidParams("radius must be >= 1".into()));
    }
    // BFS restricted to depth k; discovery order doubles as local numbering.
    let mut local_of = std::collections::HashMap::new();
    let mut to_graph = vec![v];
    let mut levels = vec![0u32];
    local_of.insert(v, 0u32);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(v);
    while let Some(u) = queue.pop_front() {
        let lu = levels[local_of[&u] as usize];
        if lu == k {
            continue;
        }
        for &w in g.neighbors(u) {
            if !local_of.contains_key(&w) {
                local_of.insert(w, to_graph.len() as u32);
                to_graph.push(w);
                levels.push(lu + 1);
                queue.push_back(w);
            }
        }
    }
    let mut edges = Vec::new();
    for (&gv, &lv) in &local_of {
        for &gw in g.neighbors(gv) {
            if gv < gw {
                if let Some(&lw) = local_of.get(&gw) {
                    edges.push((lv, lw));
                }
            }
        }
    }
    let disc = RootedDisc::new(k, levels, edges)?;
    Ok(AnchoredDisc { root: v, disc, to_graph })
}

/// Generator models for the test corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphModel {
    Cycle,
    Path,
    DisjointTriangles,
    RandomDBounded,
    SpanningTreePlusRandom,
}

impl std::str::FromStr for GraphModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle" => Ok(Self::Cycle),
            "path" => Ok(Self::Path),
            "disjoint_triangles" => Ok(Self::DisjointTriangles),
            "random_d_bounded" => Ok(Self::RandomDBounded),
            "spanning_tree_plus_random" => Ok(Self::SpanningTreePlusRandom),
            _ => Err(Error::InvalidModelParams(format!("unknown model {s:?}"))),
        }
    }
}

impl GraphModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Cycle => "cycle",
            Self::Path => "path",
            Self::DisjointTriangles => "disjoint_triangles",
            Self::RandomDBounded => "random_d_bounded",
            Self::SpanningTreePlusRandom => "spanning_tree_plus_random",
        }
    }
}

/// Deterministic per seed. `random_d_bounded` rejection-samples candidate
/// edges toward an `n*d/2` edge target with an attempt cap of `100*n*d`;
/// `spanning_tree_plus_random` builds a random degree-respecting tree and
/// adds `n/5` extra random edges under the same cap.
pub fn generate_graph(model: GraphModel, n: usize, d: usize, seed: u64) -> Result<BoundedGraph> {
    match model {
        GraphModel::Cycle => {
            if n < 3 || d < 2 {
                return Err(Error::InvalidModelParams("cycle needs n >= 3, d >= 2".into()));
            }
            let pairs = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32));
            BoundedGraph::new(n, d, pairs)
        }
        GraphModel::Path => {
            if n < 2 || (n > 2 && d < 2) || d < 1 {
                return Err(Error::InvalidModelParams("path needs n >= 2 and d >= 2".into()));
            }
            let pairs = (0..n - 1).map(|i| (i as u32, (i + 1) as u32));
            BoundedGraph::new(n, d, pairs)
        }
        GraphModel::DisjointTriangles => {
            if n % 3 != 0 || n == 0 || d < 2 {
                return Err(Error::InvalidModelParams(
                    "disjoint_triangles needs n divisible by 3 and d >= 2".into(),
                ));
            }
            let mut pairs = Vec::with_capacity(n);
            for t in 0..n / 3 {
                let b = (3 * t) as u32;
                pairs.extend([(b, b + 1), (b + 1, b + 2), (b, b + 2)]);
            }
            BoundedGraph::new(n, d, pairs)
        }
        GraphModel::RandomDBounded => random_bounded_with_edges(n, d, n * d / 2, seed),
        GraphModel::SpanningTreePlusRandom => {
            if n < 2 || d < 2 {
                return Err(Error::InvalidModelParams(
                    "spanning_tree_plus_random needs n >= 2, d >= 2".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.shuffle(&mut rng);
            let mut deg = vec![0usize; n];
            let mut present = HashSet::new();
            let mut pairs = Vec::new();
            // Attach each vertex to a random earlier vertex with spare degree.
            // One always exists for d >= 2: i vertices carry 2(i-1) degree.
            for i in 1..n {
                let v = order[i];
                let mut tries = 0;
                let u = loop {
                    let u = order[rng.gen_range(0..i)];
                    if deg[u as usize] < d {
                        break u;
                    }
                    tries += 1;
                    if tries > 50 {
                        break *order[..i]
                            .iter()
                            .find(|&&u| deg[u as usize] < d)
                            .expect("spare degree exists for d >= 2");
                    }
                };
                let key = (u.min(v), u.max(v));
                present.insert(key);
                deg[u as usize] += 1;
                deg[v as usize] += 1;
                pairs.push(key);
            }
            let extra = n / 5;
            let cap = 100 * n * d;
            let mut added = 0;
            let mut attempts = 0;
            while added < extra && attempts < cap {
                attempts += 1;
                let u = rng.gen_range(0..n as u32);
                let v = rng.gen_range(0..n as u32);
                if u == v {
                    continue;
                }
                let key = (u.min(v), u.max(v));
                if present.contains(&key) || deg[u as usize] >= d || deg[v as usize] >= d {
                    continue;
                }
                present.insert(key);
                deg[u as usize] += 1;
                deg[v as usize] += 1;
                pairs.push(key);
                added += 1;
            }
            BoundedGraph::new(n, d, pairs)
        }
    }
}

/// Random d-bounded graph with an explicit edge-count target: candidate
/// edges are drawn uniformly and rejected on self-loops, duplicates, or
/// degree violations, until the target is met or `100*n*d` attempts are
/// spent. Deterministic per seed.
pub fn random_bounded_with_edges(
    n: usize,
    d: usize,
    target_edges: usize,
    seed: u64,
) -> Result<BoundedGraph> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidModelParams("need n >= 2 and d >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut present = HashSet::new();
    let mut pairs = Vec::new();
    let cap = 100 * n * d;
    let mut attempts = 0;
    while pairs.len() < target_edges && attempts < cap {
        attempts += 1;
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.contains(&key) || deg[u as usize] >= d || deg[v as usize] >= d {
            continue;
        }
        present.insert(key);
        deg[u as usize] += 1;
        deg[v as usize] += 1;
        pairs.push(key);
    }
    BoundedGraph::new(n, d, pairs)
}

/// Algorithm parameters shared across the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub d: usize,
    pub k: u32,
    pub epsilon: f64,
    pub delta: f64,
    pub s: usize,
    pub seed: u64,
}

impl Params {
    pub fn validated(self) -> Result<Self> {
        if self.k < 1 {
            return Err(Error::InvalidParams("k must be >= 1".into()));
        }
        if self.d < 1 {
            return Err(Error::InvalidParams("d must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParams("epsilon must lie in (0,1)".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams("delta must lie in (0,1)".into()));
        }
        if self.s < 1 {
            return Err(Error::InvalidParams("s must be >= 1".into()));
        }
        Ok(self)
    }
}

/// Splits a seed into independent subseeds for the different random choices
/// of one run (root sample, stream order, second pass, ...).
pub(crate) fn subseed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer over seed ^ tag-salt
    let mut z = seed ^ tag.wrapping_mul(0x9e3779b97f4a7c15);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[cfg(test)]
pub(crate) fn verify_distances(g: &BoundedGraph, anchored: &AnchoredDisc) -> bool {
    // Disc levels must equal shortest-path distances in the graph restricted
    // to the disc's vertex set.
    let set: std::collections::HashMap<u32, u32> = anchored
        .to_graph
        .iter()
        .enumerate()
        .map(|(l, &g)| (g, l as u32))
        .collect();
    let mut adj = vec![Vec::new(); anchored.to_graph.len()];
    for (&gv, &lv) in &set {
        for &gw in g.neighbors(gv) {
            if let Some(&lw) = set.get(&gw) {
                if lv < lw {
                    adj[lv as usize].push(lw);
                    adj[lw as usize].push(lv);
                }
            }
        }
    }
    let dist = bfs_distances(&adj, 0);
    anchored
        .disc
        .levels()
        .iter()
        .enumerate()
        .all(|(v, &l)| dist[v] == Some(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_graph() {
        let g = BoundedGraph::from_text("3 2\n0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degree_bound(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(BoundedGraph::from_text("2 1\n0 0").unwrap_err(), Error::SelfLoop(0));
    }

    #[test]
    fn rejects_degree_violation() {
        assert_eq!(
            BoundedGraph::from_text("3 1\n0 1\n1 2").unwrap_err(),
            Error::DegreeBoundViolated(1)
        );
    }

    #[test]
    fn rejects_duplicates_and_range() {
        assert_eq!(
            BoundedGraph::from_text("3 2\n0 1\n1 0").unwrap_err(),
            Error::DuplicateEdge(0, 1)
        );
        assert_eq!(
            BoundedGraph::from_text("2 2\n0 5").unwrap_err(),
            Error::VertexOutOfRange(5, 2)
        );
        assert!(matches!(
            BoundedGraph::from_text("2 x\n0 1").unwrap_err(),
            Error::Parse { .. }
        ));
    }

    #[test]
    fn text_roundtrip_is_identity_on_edges() {
        let g = generate_graph(GraphModel::RandomDBounded, 40, 3, 11).unwrap();
        let back = BoundedGraph::from_text(&g.to_text()).unwrap();
        assert_eq!(g.edges(), back.edges());
        assert_eq!(g.n(), back.n());
    }

    #[test]
    fn triangle_disc_radius_one() {
        let g = BoundedGraph::new(3, 2, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let a = true_disc(&g, 0, 1).unwrap();
        assert_eq!(a.disc.num_vertices(), 3);
        assert_eq!(a.disc.num_edges(), 3);
        assert_eq!(a.disc.levels(), &[0, 1, 1]);
    }

    #[test]
    fn path_disc_cuts_at_radius() {
        let g = BoundedGraph::new(3, 2, [(0, 1), (1, 2)]).unwrap();
        let a = true_disc(&g, 0, 1).unwrap();
        assert_eq!(a.disc.num_vertices(), 2);
        assert_eq!(a.disc.edges(), &[(0, 1)]);
    }

    #[test]
    fn cycle_disc_is_centered_path() {
        let g = generate_graph(GraphModel::Cycle, 10, 2, 0).unwrap();
        let a = true_disc(&g, 0, 2).unwrap();
        assert_eq!(a.disc.num_vertices(), 5);
        assert_eq!(a.disc.num_edges(), 4);
        let mut sorted = a.disc.levels().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 1, 2, 2]);
        assert!(verify_distances(&g, &a));
    }

    #[test]
    fn generators_hit_their_shapes() {
        let c = generate_graph(GraphModel::Cycle, 6, 2, 0).unwrap();
        assert_eq!(c.num_edges(), 6);
        let t = generate_graph(GraphModel::DisjointTriangles, 9, 3, 0).unwrap();
        assert_eq!(t.num_edges(), 9);
        assert!(generate_graph(GraphModel::DisjointTriangles, 10, 3, 0).is_err());
        let r1 = generate_graph(GraphModel::RandomDBounded, 100, 3, 7).unwrap();
        let r2 = generate_graph(GraphModel::RandomDBounded, 100, 3, 7).unwrap();
        assert_eq!(r1.edges(), r2.edges());
        let s = generate_graph(GraphModel::SpanningTreePlusRandom, 50, 3, 3).unwrap();
        assert!(s.num_edges() >= 49);
    }

    #[test]
    fn disc_size_stays_under_degree_bound_envelope() {
        let g = generate_graph(GraphModel::RandomDBounded, 60, 3, 5).unwrap();
        let (d, _n) = (g.degree_bound() as u32, g.n());
        for k in 1..=2u32 {
            let vmax: u64 = (0..=k).map(|i| (d as u64).pow(i)).sum();
            let emax = 2 * (d as u64).pow(k + 1);
            for v in 0..g.n() as u32 {
                let a = true_disc(&g, v, k).unwrap();
                assert!(a.disc.num_vertices() as u64 <= vmax);
                assert!(a.disc.num_edges() as u64 <= emax);
                assert!(verify_distances(&g, &a));
            }
        }
    }
}
