//! Canonical forms for rooted discs.
//!
//! Two discs receive the same encoding exactly when some root-preserving
//! isomorphism maps one onto the other. The search is exhaustive backtracking
//! over root-preserving vertex orderings: at each position only the vertices
//! achieving the minimal (level, placed-adjacency) tuple are branched on,
//! interchangeable siblings are collapsed, and branches that can no longer
//! beat the best complete key are cut. Discs here stay small (a few dozen
//! vertices), so this outruns any general-purpose canonical labeling.
//!
//! The encoding string `k=<k>;v=<m>;L=<l0,...>;E=<a-b,...>` is the bit-exact
//! cross-format key used by matrix files and estimate reports.

use crate::disc::RootedDisc;
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::HashMap;

/// A root-preserving isomorphism class of discs, keyed by its encoding.
#[derive(Debug, Clone)]
pub struct DiscType {
    encoding: String,
    shape: RootedDisc,
}

impl PartialEq for DiscType {
    fn eq(&self, other: &Self) -> bool {
        self.encoding == other.encoding
    }
}
impl Eq for DiscType {}

impl std::hash::Hash for DiscType {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.encoding.hash(state);
    }
}

/// Catalog order: more edges first, then more vertices, then encoding.
/// A strict root-preserving subgraph always sorts strictly later, so this is
/// a linear extension of the sub-disc partial order.
impl Ord for DiscType {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .num_edges()
            .cmp(&self.num_edges())
            .then(other.num_vertices().cmp(&self.num_vertices()))
            .then(self.encoding.cmp(&other.encoding))
    }
}
impl PartialOrd for DiscType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DiscType {
    pub fn encoding(&self) -> &str {
        &self.encoding
    }

    /// The canonical representative disc (root 0, canonical vertex numbering).
    pub fn shape(&self) -> &RootedDisc {
        &self.shape
    }

    pub fn k(&self) -> u32 {
        self.shape.k()
    }

    pub fn num_vertices(&self) -> usize {
        self.shape.num_vertices()
    }

    pub fn num_edges(&self) -> usize {
        self.shape.num_edges()
    }

    /// Parses an encoding, validates the disc it describes, and returns the
    /// canonical type (re-canonicalizing in case the input numbering was not
    /// canonical).
    pub fn from_encoding(s: &str) -> Result<DiscType> {
        let disc = parse_encoding(s)?;
        Ok(canonicalize(&disc))
    }
}

fn parse_encoding(s: &str) -> Result<RootedDisc> {
    let fail = |msg: &str| Error::Parse { line: 0, msg: format!("encoding {s:?}: {msg}") };
    let mut k = None;
    let mut v = None;
    let mut levels: Option<Vec<u32>> = None;
    let mut edges: Option<Vec<(u32, u32)>> = None;
    for part in s.split(';') {
        let (key, val) = part.split_once('=').ok_or_else(|| fail("missing '='"))?;
        match key {
            "k" => k = Some(val.parse::<u32>().map_err(|_| fail("bad k"))?),
            "v" => v = Some(val.parse::<usize>().map_err(|_| fail("bad v"))?),
            "L" => {
                let ls = if val.is_empty() {
                    Vec::new()
                } else {
                    val.split(',')
                        .map(|t| t.parse::<u32>().map_err(|_| fail("bad level")))
                        .collect::<Result<_>>()?
                };
                levels = Some(ls);
            }
            "E" => {
                let mut es = Vec::new();
                if !val.is_empty() {
                    for pair in val.split(',') {
                        let (a, b) = pair.split_once('-').ok_or_else(|| fail("bad edge"))?;
                        es.push((
                            a.parse::<u32>().map_err(|_| fail("bad edge endpoint"))?,
                            b.parse::<u32>().map_err(|_| fail("bad edge endpoint"))?,
                        ));
                    }
                }
                edges = Some(es);
            }
            _ => return Err(fail("unknown field")),
        }
    }
    let (k, v) = (k.ok_or_else(|| fail("missing k"))?, v.ok_or_else(|| fail("missing v"))?);
    let levels = levels.ok_or_else(|| fail("missing L"))?;
    let edges = edges.ok_or_else(|| fail("missing E"))?;
    if levels.len() != v {
        return Err(fail("level count does not match v"));
    }
    RootedDisc::new(k, levels, edges)
}

/// Per-position key: the vertex level plus the sorted canonical positions of
/// its already-placed neighbors. The full sequence determines the renumbered
/// graph, so the lexicographic minimum over root-preserving orderings is a
/// canonical form.
type PosKey = (u32, Vec<u16>);

struct Search<'a> {
    adj: &'a [Vec<u32>],
    levels: &'a [u32],
    n: usize,
    pos_of: Vec<Option<u16>>,
    perm: Vec<u32>,
    key: Vec<PosKey>,
    best_key: Option<Vec<PosKey>>,
    best_perm: Vec<u32>,
}

impl<'a> Search<'a> {
    fn run(mut self) -> Vec<u32> {
        self.pos_of[0] = Some(0);
        self.perm.push(0);
        self.key.push((0, Vec::new()));
        self.dfs(false);
        self.best_perm
    }

    fn dfs(&mut self, better: bool) {
        let p = self.perm.len();
        if p == self.n {
            // `better` can be stale once a sibling branch already lowered
            // the best key, so leaves always compare in full.
            let replace = match &self.best_key {
                None => true,
                Some(b) => self.key < *b,
            };
            if replace {
                self.best_key = Some(self.key.clone());
                self.best_perm = self.perm.clone();
            }
            return;
        }
        // Minimal placed-adjacency tuple among unplaced vertices; only those
        // can extend a minimal key.
        let mut min_key: Option<PosKey> = None;
        let mut args: Vec<u32> = Vec::new();
        for v in 0..self.n as u32 {
            if self.pos_of[v as usize].is_some() {
                continue;
            }
            let mut placed: Vec<u16> = self.adj[v as usize]
                .iter()
                .filter_map(|&u| self.pos_of[u as usize])
                .collect();
            placed.sort_unstable();
            let cand = (self.levels[v as usize], placed);
            match &min_key {
                None => {
                    min_key = Some(cand);
                    args = vec![v];
                }
                Some(cur) => match cand.cmp(cur) {
                    Ordering::Less => {
                        min_key = Some(cand);
                        args = vec![v];
                    }
                    Ordering::Equal => args.push(v),
                    Ordering::Greater => {}
                },
            }
        }
        let min_key = min_key.expect("unplaced vertex exists");
        let mut better = better;
        if !better {
            match min_key.cmp(&self.best_key.as_ref().map(|b| &b[p]).unwrap_or(&min_key)) {
                Ordering::Greater => return,
                Ordering::Less => better = true,
                Ordering::Equal => {}
            }
        }
        // Interchangeable candidates (equal key and identical unplaced
        // neighborhoods) lead to identical completions; branch on one.
        let mut seen_twins: Vec<Vec<u32>> = Vec::new();
        for v in args {
            let mut unplaced: Vec<u32> = self.adj[v as usize]
                .iter()
                .copied()
                .filter(|&u| self.pos_of[u as usize].is_none())
                .collect();
            unplaced.sort_unstable();
            if seen_twins.contains(&unplaced) {
                continue;
            }
            seen_twins.push(unplaced);
            self.pos_of[v as usize] = Some(p as u16);
            self.perm.push(v);
            self.key.push(min_key.clone());
            self.dfs(better);
            self.key.pop();
            self.perm.pop();
            self.pos_of[v as usize] = None;
        }
    }
}

/// Computes the canonical type of a valid disc.
pub fn canonicalize(disc: &RootedDisc) -> DiscType {
    let n = disc.num_vertices();
    let adj = disc.adjacency();
    let search = Search {
        adj: &adj,
        levels: disc.levels(),
        n,
        pos_of: vec![None; n],
        perm: Vec::with_capacity(n),
        key: Vec::with_capacity(n),
        best_key: None,
        best_perm: Vec::new(),
    };
    let perm = search.run();
    let mut pos = vec![0u32; n];
    for (p, &v) in perm.iter().enumerate() {
        pos[v as usize] = p as u32;
    }
    let levels: Vec<u32> = perm.iter().map(|&v| disc.levels()[v as usize]).collect();
    let mut edges: Vec<(u32, u32)> = disc
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (pos[a as usize], pos[b as usize]);
            if x < y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    edges.sort_unstable();
    let encoding = format_encoding(disc.k(), &levels, &edges);
    let shape = RootedDisc::new(disc.k(), levels, edges)
        .expect("canonical relabeling preserves disc invariants");
    DiscType { encoding, shape }
}

fn format_encoding(k: u32, levels: &[u32], edges: &[(u32, u32)]) -> String {
    let ls: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
    let es: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    format!("k={k};v={};L={};E={}", levels.len(), ls.join(","), es.join(","))
}

/// Memoizes canonicalization by the labeled disc. Stream collection tends to
/// produce the same labeled shapes over and over.
#[derive(Default)]
pub struct CanonCache {
    map: HashMap<RootedDisc, DiscType>,
}

impl CanonCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn canonical(&mut self, disc: &RootedDisc) -> DiscType {
        if let Some(t) = self.map.get(disc) {
            return t.clone();
        }
        let t = canonicalize(disc);
        self.map.insert(disc.clone(), t.clone());
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(k: u32, levels: Vec<u32>, edges: Vec<(u32, u32)>) -> RootedDisc {
        RootedDisc::new(k, levels, edges).unwrap()
    }

    #[test]
    fn star_relabelings_agree() {
        // K_{1,3} rooted at the center, two labelings of the leaves.
        let a = disc(1, vec![0, 1, 1, 1], vec![(0, 1), (0, 2), (0, 3)]);
        let b = disc(1, vec![0, 1, 1, 1], vec![(0, 3), (0, 1), (0, 2)]);
        assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn endpoint_and_midpoint_paths_differ() {
        let endpoint = disc(2, vec![0, 1, 2], vec![(0, 1), (1, 2)]);
        let midpoint = disc(2, vec![0, 1, 1], vec![(0, 1), (0, 2)]);
        assert_ne!(canonicalize(&endpoint), canonicalize(&midpoint));
    }

    #[test]
    fn single_vertex_encoding() {
        let d = disc(1, vec![0], vec![]);
        assert_eq!(canonicalize(&d).encoding(), "k=1;v=1;L=0;E=");
        let d2 = disc(2, vec![0], vec![]);
        assert_eq!(canonicalize(&d2).encoding(), "k=2;v=1;L=0;E=");
    }

    #[test]
    fn triangle_encoding_is_stable() {
        let t = disc(1, vec![0, 1, 1], vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(canonicalize(&t).encoding(), "k=1;v=3;L=0,1,1;E=0-1,0-2,1-2");
    }

    #[test]
    fn random_relabelings_are_stable() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        // Radius-2 disc with a cycle and a pendant.
        let base = disc(
            2,
            vec![0, 1, 1, 2, 2],
            vec![(0, 1), (0, 2), (1, 3), (2, 3), (2, 4)],
        );
        let want = canonicalize(&base);
        for _ in 0..1000 {
            // Random root-preserving relabeling of non-root vertices.
            let mut map: Vec<u32> = (1..5).collect();
            map.shuffle(&mut rng);
            let relabel = |v: u32| if v == 0 { 0 } else { map[v as usize - 1] };
            let mut levels = vec![0u32; 5];
            for v in 0..5u32 {
                levels[relabel(v) as usize] = base.levels()[v as usize];
            }
            let edges: Vec<(u32, u32)> =
                base.edges().iter().map(|&(a, b)| (relabel(a), relabel(b))).collect();
            let shuffled = disc(2, levels, edges);
            assert_eq!(canonicalize(&shuffled), want);
        }
    }

    #[test]
    fn from_encoding_roundtrip() {
        let t = disc(1, vec![0, 1, 1], vec![(0, 1), (0, 2), (1, 2)]);
        let ty = canonicalize(&t);
        let back = DiscType::from_encoding(ty.encoding()).unwrap();
        assert_eq!(back, ty);
        assert!(DiscType::from_encoding("k=1;v=2;L=0,1;E=0-1-2").is_err());
        assert!(DiscType::from_encoding("nonsense").is_err());
    }

    #[test]
    fn asymmetric_children_relabelings_agree() {
        // Two labelings of the same tree: the root child 1 has children 4, 5
        // where one grandchild subtree has one leaf and the other two. A
        // stale best-key during the search used to split this class in two.
        let a = disc(
            3,
            vec![0, 1, 1, 1, 2, 2, 3, 3, 3],
            vec![(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (4, 6), (5, 7), (5, 8)],
        );
        let b = disc(
            3,
            vec![0, 1, 1, 1, 2, 2, 3, 3, 3],
            vec![(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (4, 6), (4, 7), (5, 8)],
        );
        assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn symmetric_tree_canonicalizes_quickly() {
        // Root with three identical depth-2 arms; worst case for naive search.
        let mut levels = vec![0u32];
        let mut edges = Vec::new();
        for arm in 0..3u32 {
            let mid = 1 + arm * 3;
            levels.extend([1, 2, 2]);
            edges.push((0, mid));
            edges.push((mid, mid + 1));
            edges.push((mid, mid + 2));
        }
        let d = disc(2, levels, edges);
        let t = canonicalize(&d);
        assert_eq!(t.num_vertices(), 10);
    }
}
