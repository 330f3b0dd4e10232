//! Edge-stream orderings and single-pass disc collection.
//!
//! The collector keeps, per root, the set `U` of reached vertices with their
//! current levels and the set `F` of kept edges. An arriving edge is kept
//! when both endpoints are already in `U`, or when exactly one is and that
//! endpoint's level is at most `k-1`; after every kept edge all levels are
//! recomputed as distances in `(U, F)`. Everything else is discarded.

use crate::disc::{bfs_distances, AnchoredDisc, RootedDisc};
use crate::error::{Error, Result};
use crate::graph::BoundedGraph;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Uniform,
    Replayed,
}

/// A materialized edge ordering. Consumers pull edges front to back; nothing
/// in the crate indexes a stream backwards.
#[derive(Debug, Clone)]
pub struct EdgeStream {
    n: usize,
    d: usize,
    order: Vec<(u32, u32)>,
    seed: u64,
    kind: StreamKind,
}

impl EdgeStream {
    /// Fisher-Yates shuffle of the graph's edge list, deterministic per seed.
    pub fn uniform(g: &BoundedGraph, seed: u64) -> Result<Self> {
        if g.num_edges() == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut order = g.edges().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        Ok(Self { n: g.n(), d: g.degree_bound(), order, seed, kind: StreamKind::Uniform })
    }

    /// Wraps a fixed ordering (exhaustive enumeration, replay files).
    pub fn replayed(n: usize, d: usize, order: Vec<(u32, u32)>) -> Self {
        Self { n, d, order, seed: 0, kind: StreamKind::Replayed }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> StreamKind {
        self.kind
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.order.iter().copied()
    }

    /// Replay file: header `n d seed`, then one edge per line in stream order.
    pub fn to_replay_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.d, self.seed);
        for &(u, v) in &self.order {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_replay_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (no, head) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty replay".into() })?;
        let toks: Vec<&str> = head.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse { line: no + 1, msg: "replay header needs n d seed".into() });
        }
        let bad = |msg: &str| Error::Parse { line: no + 1, msg: msg.into() };
        let n: usize = toks[0].parse().map_err(|_| bad("bad n"))?;
        let d: usize = toks[1].parse().map_err(|_| bad("bad d"))?;
        let seed: u64 = toks[2].parse().map_err(|_| bad("bad seed"))?;
        let mut order = Vec::new();
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = || -> Result<u32> {
                it.next()
                    .ok_or_else(|| Error::Parse { line: no + 1, msg: "missing endpoint".into() })?
                    .parse()
                    .map_err(|_| Error::Parse { line: no + 1, msg: "bad endpoint".into() })
            };
            order.push((next()?, next()?));
        }
        Ok(Self { n, d, order, seed, kind: StreamKind::Replayed })
    }
}

/// Per-root collection state.
struct Observer {
    k: u32,
    root: u32,
    local_of: HashMap<u32, u32>,
    to_graph: Vec<u32>,
    levels: Vec<u32>,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Observer {
    fn new(root: u32, k: u32) -> Self {
        Self {
            k,
            root,
            local_of: HashMap::from([(root, 0)]),
            to_graph: vec![root],
            levels: vec![0],
            adj: vec![Vec::new()],
            edges: Vec::new(),
        }
    }

    /// Feeds one arriving edge; returns the graph vertex that joined `U`, if
    /// any, so multi-root collection can maintain its vertex index.
    fn offer(&mut self, u: u32, w: u32) -> Option<u32> {
        let lu = self.local_of.get(&u).copied();
        let lw = self.local_of.get(&w).copied();
        match (lu, lw) {
            (Some(a), Some(b)) => {
                self.push_edge(a, b);
                None
            }
            (Some(a), None) => self.try_extend(a, w),
            (None, Some(b)) => self.try_extend(b, u),
            (None, None) => None,
        }
    }

    fn try_extend(&mut self, inside: u32, newcomer: u32) -> Option<u32> {
        if self.levels[inside as usize] > self.k - 1 {
            return None;
        }
        let local = self.to_graph.len() as u32;
        self.local_of.insert(newcomer, local);
        self.to_graph.push(newcomer);
        self.levels.push(0);
        self.adj.push(Vec::new());
        self.push_edge(inside, local);
        Some(newcomer)
    }

    fn push_edge(&mut self, a: u32, b: u32) {
        self.adj[a as usize].push(b);
        self.adj[b as usize].push(a);
        self.edges.push(if a < b { (a, b) } else { (b, a) });
        // Recompute every level as the distance in (U, F).
        for (v, d) in bfs_distances(&self.adj, 0).into_iter().enumerate() {
            self.levels[v] = d.expect("collected subgraph stays connected");
        }
    }

    fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn finish(self) -> AnchoredDisc {
        let disc = RootedDisc::new(self.k, self.levels, self.edges)
            .expect("collected disc satisfies the invariants");
        AnchoredDisc { root: self.root, disc, to_graph: self.to_graph }
    }
}

/// Runs the collector for one root over one stream pass.
pub fn observe_disc(stream: &EdgeStream, v: u32, k: u32) -> Result<AnchoredDisc> {
    if v as usize >= stream.n() {
        return Err(Error::VertexOutOfRange(v, stream.n()));
    }
    let mut obs = Observer::new(v, k);
    for (u, w) in stream.iter() {
        obs.offer(u, w);
    }
    Ok(obs.finish())
}

/// Replays an ordering against a disc treated as its own host graph, root 0.
/// The observed disc of a root depends only on the relative order of its true
/// disc's edges, so conditional observation probabilities are computed here.
pub fn observe_on_disc(shape: &RootedDisc, order: &[(u32, u32)]) -> RootedDisc {
    let mut obs = Observer::new(0, shape.k());
    for &(u, w) in order {
        obs.offer(u, w);
    }
    obs.finish().disc
}

/// Single-pass collection for many roots: one independent state per root,
/// discs returned in root order, plus the peak total of retained edges.
pub fn observe_multi(
    stream: &EdgeStream,
    roots: &[u32],
    k: u32,
) -> Result<(Vec<AnchoredDisc>, usize)> {
    let mut seen = std::collections::HashSet::new();
    for &r in roots {
        if r as usize >= stream.n() {
            return Err(Error::VertexOutOfRange(r, stream.n()));
        }
        if !seen.insert(r) {
            return Err(Error::DuplicateRoot(r));
        }
    }
    let mut observers: Vec<Observer> = roots.iter().map(|&r| Observer::new(r, k)).collect();
    // vertex -> observer indices whose U contains it
    let mut index: HashMap<u32, Vec<u32>> = HashMap::new();
    for (i, &r) in roots.iter().enumerate() {
        index.entry(r).or_default().push(i as u32);
    }
    let mut held = 0usize;
    let mut peak = 0usize;
    let mut touched: Vec<u32> = Vec::new();
    for (u, w) in stream.iter() {
        touched.clear();
        if let Some(is) = index.get(&u) {
            touched.extend_from_slice(is);
        }
        if let Some(is) = index.get(&w) {
            touched.extend_from_slice(is);
        }
        touched.sort_unstable();
        touched.dedup();
        for ti in 0..touched.len() {
            let i = touched[ti] as usize;
            let before = observers[i].edge_count();
            if let Some(joined) = observers[i].offer(u, w) {
                index.entry(joined).or_default().push(i as u32);
            }
            held += observers[i].edge_count() - before;
        }
        peak = peak.max(held);
    }
    Ok((observers.into_iter().map(Observer::finish).collect(), peak))
}

/// Second pass: gathers, per root, every stream edge incident to the
/// collected disc's vertices, rebuilds the radius-k sub-disc around the root
/// from that material, and reports whether it matches what the first pass
/// collected. A match certifies the collected disc is the true k-disc.
pub fn second_pass_verify(
    collected: &[AnchoredDisc],
    second: &EdgeStream,
    k: u32,
) -> Vec<bool> {
    let mut index: HashMap<u32, Vec<u32>> = HashMap::new();
    for (i, a) in collected.iter().enumerate() {
        for &gv in &a.to_graph {
            index.entry(gv).or_default().push(i as u32);
        }
    }
    let mut incident: Vec<Vec<(u32, u32)>> = vec![Vec::new(); collected.len()];
    for (u, w) in second.iter() {
        let mut touched: Vec<u32> = Vec::new();
        if let Some(is) = index.get(&u) {
            touched.extend_from_slice(is);
        }
        if let Some(is) = index.get(&w) {
            touched.extend_from_slice(is);
        }
        touched.sort_unstable();
        touched.dedup();
        for &i in &touched {
            incident[i as usize].push((u.min(w), u.max(w)));
        }
    }
    collected
        .iter()
        .zip(incident)
        .map(|(a, edges)| {
            let held: BTreeSet<(u32, u32)> = a.graph_edges().into_iter().collect();
            let rebuilt = rebuild_disc_edges(a.root, &a.to_graph, &edges, k);
            held == rebuilt
        })
        .collect()
}

/// From all collected incident edges, keeps the edges of the radius-k disc
/// around `root`: those touching a vertex at distance ≤ k-1, plus edges
/// between distance-k vertices that the first pass had already reached.
fn rebuild_disc_edges(
    root: u32,
    first_pass_vertices: &[u32],
    edges: &[(u32, u32)],
    k: u32,
) -> BTreeSet<(u32, u32)> {
    let mut local: HashMap<u32, u32> = HashMap::from([(root, 0)]);
    let mut ids = vec![root];
    for &(u, w) in edges {
        for v in [u, w] {
            if !local.contains_key(&v) {
                local.insert(v, ids.len() as u32);
                ids.push(v);
            }
        }
    }
    let mut adj = vec![Vec::new(); ids.len()];
    for &(u, w) in edges {
        let (a, b) = (local[&u], local[&w]);
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    let dist = bfs_distances(&adj, 0);
    let in_first: std::collections::HashSet<u32> = first_pass_vertices.iter().copied().collect();
    let mut kept = BTreeSet::new();
    for &(u, w) in edges {
        let (du, dw) = (dist[local[&u] as usize], dist[local[&w] as usize]);
        let close = |d: Option<u32>| d.is_some_and(|d| d + 1 <= k);
        let boundary = du == Some(k)
            && dw == Some(k)
            && in_first.contains(&u)
            && in_first.contains(&w);
        if close(du) || close(dw) || boundary {
            kept.insert((u.min(w), u.max(w)));
        }
    }
    kept
}
