//! Ordered catalogs of disc types.
//!
//! `a ⪰ b` holds when `b` is root-preserving isomorphic to a subgraph of `a`
//! that is a valid disc in its own right. Catalogs list types in a linear
//! extension of that order (more edges first, then more vertices, then
//! encoding) and carry each type's ancestor set. Catalogs are closed
//! downward: exactly for small types (edge-subset enumeration), by sampled
//! discovery for large ones.

use crate::canon::{canonicalize, CanonCache, DiscType};
use crate::disc::{bfs_distances, RootedDisc};
use crate::error::{Error, Result};
use crate::graph::subseed;
use crate::stream::observe_on_disc;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

/// Types with at most this many edges get exact edge-subset closure.
pub const SUBSET_CLOSURE_MAX_EDGES: usize = 16;
/// Shuffles per type when closure falls back to sampled discovery.
pub const SAMPLED_CLOSURE_DEFAULT: usize = 2000;
/// Hard ceiling on catalog growth during closure.
pub const CLOSURE_TYPE_CAP: usize = 20_000;

/// Immutable ordered catalog: types, encoding index, and ancestor sets.
#[derive(Debug, Clone)]
pub struct DiscCatalog {
    types: Vec<DiscType>,
    index: HashMap<String, usize>,
    ancestors: Vec<Vec<usize>>,
}

impl DiscCatalog {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[DiscType] {
        &self.types
    }

    pub fn get(&self, i: usize) -> &DiscType {
        &self.types[i]
    }

    pub fn position(&self, t: &DiscType) -> Option<usize> {
        self.index.get(t.encoding()).copied()
    }

    pub fn position_of_encoding(&self, enc: &str) -> Option<usize> {
        self.index.get(enc).copied()
    }

    /// Indices `i != j` with `types[i] ⪰ types[j]`; all are `< j`.
    pub fn ancestors(&self, j: usize) -> &[usize] {
        &self.ancestors[j]
    }

    /// Builds the ordered catalog from a deduplicated type set.
    fn assemble(mut types: Vec<DiscType>) -> Result<Self> {
        types.sort();
        types.dedup();
        if let Some(first) = types.first() {
            let k = first.k();
            if let Some(t) = types.iter().find(|t| t.k() != k) {
                return Err(Error::MismatchedRadius(k, t.k()));
            }
        }
        let index: HashMap<String, usize> =
            types.iter().enumerate().map(|(i, t)| (t.encoding().to_string(), i)).collect();
        let profiles: Vec<Vec<usize>> =
            types.iter().map(|t| t.shape().level_profile()).collect();
        let mut ancestors = vec![Vec::new(); types.len()];
        for j in 0..types.len() {
            for i in 0..j {
                if screen(&types[i], &profiles[i], &types[j], &profiles[j])
                    && is_geq(&types[i], &types[j])?
                {
                    ancestors[j].push(i);
                }
            }
        }
        Ok(Self { types, index, ancestors })
    }
}

/// Assembles a catalog from an explicit type list without further closure.
/// Callers are responsible for the list already being closed.
pub fn catalog_from_types(types: Vec<DiscType>) -> Result<DiscCatalog> {
    DiscCatalog::assemble(types)
}

/// Cheap necessary conditions for `a ⪰ b`.
fn screen(a: &DiscType, pa: &[usize], b: &DiscType, pb: &[usize]) -> bool {
    if b.num_edges() > a.num_edges()
        || b.num_vertices() > a.num_vertices()
        || b.shape().root_degree() > a.shape().root_degree()
    {
        return false;
    }
    // An embedding maps a level-l vertex to a vertex of level at most l.
    pb.iter().zip(pa).all(|(cb, ca)| cb <= ca)
}

/// Decides `a ⪰ b`: is `b` root-preserving isomorphic to a subgraph of `a`?
/// Backtracking monomorphism search with the root pinned; levels recompute
/// correctly for free because `b` is itself a valid disc.
pub fn is_geq(a: &DiscType, b: &DiscType) -> Result<bool> {
    if a.k() != b.k() {
        return Err(Error::MismatchedRadius(a.k(), b.k()));
    }
    if a == b {
        return Ok(true);
    }
    if b.num_edges() > a.num_edges() || b.num_vertices() > a.num_vertices() {
        return Ok(false);
    }
    Ok(embed(b.shape(), a.shape()))
}

fn embed(b: &RootedDisc, a: &RootedDisc) -> bool {
    let adj_a = a.adjacency();
    let adj_b = b.adjacency();
    let deg_a: Vec<usize> = adj_a.iter().map(|l| l.len()).collect();
    let deg_b: Vec<usize> = adj_b.iter().map(|l| l.len()).collect();
    // Assign b's vertices in level order so each has an assigned neighbor.
    let mut order: Vec<u32> = (0..b.num_vertices() as u32).collect();
    order.sort_by_key(|&v| (b.levels()[v as usize], v));
    let mut image: Vec<Option<u32>> = vec![None; b.num_vertices()];
    let mut used = vec![false; a.num_vertices()];
    image[0] = Some(0);
    used[0] = true;

    fn rec(
        idx: usize,
        order: &[u32],
        image: &mut [Option<u32>],
        used: &mut [bool],
        adj_a: &[Vec<u32>],
        adj_b: &[Vec<u32>],
        deg_a: &[usize],
        deg_b: &[usize],
        levels_a: &[u32],
        levels_b: &[u32],
    ) -> bool {
        if idx == order.len() {
            return true;
        }
        let w = order[idx] as usize;
        // Candidates: a-neighbors of the image of some assigned b-neighbor.
        let anchor = adj_b[w]
            .iter()
            .find_map(|&u| image[u as usize])
            .expect("level order guarantees an assigned neighbor");
        for &x in &adj_a[anchor as usize] {
            let xi = x as usize;
            if used[xi]
                || levels_a[xi] > levels_b[w]
                || deg_a[xi] < deg_b[w]
            {
                continue;
            }
            if !adj_b[w].iter().all(|&u| match image[u as usize] {
                Some(img) => adj_a[xi].binary_search(&img).is_ok(),
                None => true,
            }) {
                continue;
            }
            image[w] = Some(x);
            used[xi] = true;
            if rec(idx + 1, order, image, used, adj_a, adj_b, deg_a, deg_b, levels_a, levels_b) {
                return true;
            }
            image[w] = None;
            used[xi] = false;
        }
        false
    }

    rec(1, &order, &mut image, &mut used, &adj_a, &adj_b, &deg_a, &deg_b, a.levels(), b.levels())
}

/// How closure fills in the types below the input set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureMode {
    /// Every valid sub-disc (root-connected edge subset), exhaustively.
    SubDiscs,
    /// Only the sub-discs a stream pass can actually produce, exhaustively.
    Observable,
    /// Sub-discs discovered by seeded random shuffles of each type's edges.
    Sampled { samples: usize, seed: u64 },
}

/// Closes the input types downward under valid sub-discs and assembles the
/// ordered catalog. Types beyond [`SUBSET_CLOSURE_MAX_EDGES`] fall back to
/// sampled discovery.
pub fn build_catalog(observed: &[DiscType]) -> Result<DiscCatalog> {
    build_catalog_with(observed, ClosureMode::SubDiscs)
}

pub fn build_catalog_with(observed: &[DiscType], mode: ClosureMode) -> Result<DiscCatalog> {
    if observed.is_empty() {
        return DiscCatalog::assemble(Vec::new());
    }
    let k = observed[0].k();
    if let Some(t) = observed.iter().find(|t| t.k() != k) {
        return Err(Error::MismatchedRadius(k, t.k()));
    }
    let mut known: BTreeMap<String, DiscType> = BTreeMap::new();
    let mut queue: VecDeque<DiscType> = VecDeque::new();
    for t in observed {
        if known.insert(t.encoding().to_string(), t.clone()).is_none() {
            queue.push_back(t.clone());
        }
    }
    let mut cache = CanonCache::new();
    while let Some(t) = queue.pop_front() {
        if known.len() >= CLOSURE_TYPE_CAP {
            break;
        }
        let subs = expand_type(&t, mode, &mut cache);
        for s in subs {
            if known.len() >= CLOSURE_TYPE_CAP {
                break;
            }
            if known.insert(s.encoding().to_string(), s.clone()).is_none() {
                queue.push_back(s);
            }
        }
    }
    DiscCatalog::assemble(known.into_values().collect())
}

fn expand_type(t: &DiscType, mode: ClosureMode, cache: &mut CanonCache) -> Vec<DiscType> {
    let m = t.num_edges();
    match mode {
        ClosureMode::SubDiscs if m <= SUBSET_CLOSURE_MAX_EDGES => sub_disc_types(t.shape(), cache),
        ClosureMode::Observable if m <= SUBSET_CLOSURE_MAX_EDGES => {
            // Final outcomes only: every root-incident edge is always
            // collected, so a reachable state is a possible final observed
            // disc exactly when it contains them all.
            let root_mask: u32 = t
                .shape()
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == 0 || b == 0)
                .map(|(i, _)| 1u32 << i)
                .sum();
            match observable_lattice(t.shape(), usize::MAX) {
                Some(lat) => lat
                    .states
                    .iter()
                    .filter(|st| st.mask & root_mask == root_mask)
                    .map(|st| cache.canonical(&disc_from_mask(t.shape(), st.mask)))
                    .collect(),
                None => Vec::new(),
            }
        }
        ClosureMode::Sampled { samples, seed } => sampled_types(t, samples, seed, cache),
        // Too many edges for exhaustive closure: discover by sampling.
        _ => sampled_types(t, SAMPLED_CLOSURE_DEFAULT, 0, cache),
    }
}

/// All valid sub-discs of a shape: root-connected edge subsets whose
/// recomputed levels stay within the radius.
fn sub_disc_types(shape: &RootedDisc, cache: &mut CanonCache) -> Vec<DiscType> {
    let m = shape.num_edges();
    let edges = shape.edges();
    let mut out = HashSet::new();
    for mask in 0u32..(1u32 << m) {
        if let Some(disc) = disc_from_edge_subset(shape, edges, mask) {
            out.insert(cache.canonical(&disc));
        }
    }
    out.into_iter().collect()
}

/// Builds the disc spanned by an edge subset, or None when the subset is not
/// root-connected or violates the radius.
fn disc_from_edge_subset(
    shape: &RootedDisc,
    edges: &[(u32, u32)],
    mask: u32,
) -> Option<RootedDisc> {
    let mut adj = vec![Vec::new(); shape.num_vertices()];
    let mut count = 0;
    for (i, &(a, b)) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
            count += 1;
        }
    }
    let dist = bfs_distances(&adj, 0);
    // Every subset edge must lie in the root's component.
    let mut reach: Vec<u32> = Vec::new();
    for (v, d) in dist.iter().enumerate() {
        match d {
            Some(d) if *d > shape.k() => return None,
            Some(_) => reach.push(v as u32),
            None => {
                if !adj[v].is_empty() {
                    return None;
                }
            }
        }
    }
    let remap: HashMap<u32, u32> =
        reach.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let levels: Vec<u32> = reach.iter().map(|&v| dist[v as usize].unwrap()).collect();
    let mut sub_edges = Vec::with_capacity(count);
    for (i, &(a, b)) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            sub_edges.push((remap[&a], remap[&b]));
        }
    }
    Some(RootedDisc::new(shape.k(), levels, sub_edges).expect("subset disc is valid"))
}

fn sampled_types(
    t: &DiscType,
    samples: usize,
    seed: u64,
    cache: &mut CanonCache,
) -> Vec<DiscType> {
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, hash_encoding(t.encoding())));
    let mut order = t.shape().edges().to_vec();
    let mut out = HashSet::new();
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let observed = observe_on_disc(t.shape(), &order);
        out.insert(cache.canonical(&observed));
    }
    out.into_iter().collect()
}

pub(crate) fn hash_encoding(enc: &str) -> u64 {
    // FNV-1a, stable across runs.
    let mut h = 0xcbf29ce484222325u64;
    for b in enc.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// One reachable accepted-edge subset of a shape, with its acceptance
/// transitions. The lattice drives both exact closure and exact diagonal
/// observation probabilities.
pub(crate) struct LatticeState {
    pub mask: u32,
    /// Edge indices acceptable from this state, with the successor state.
    pub next: Vec<(usize, usize)>,
}

pub(crate) struct ObsLattice {
    pub states: Vec<LatticeState>,
    pub index_of_mask: HashMap<u32, usize>,
}

/// Enumerates every edge subset reachable by the stream collector on
/// `shape`'s own edges, or None past `state_cap` states.
pub(crate) fn observable_lattice(shape: &RootedDisc, state_cap: usize) -> Option<ObsLattice> {
    let m = shape.num_edges();
    if m > 31 {
        return None;
    }
    let edges = shape.edges();
    let nv = shape.num_vertices();
    let k = shape.k();
    let mut states = Vec::new();
    let mut index_of_mask: HashMap<u32, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    index_of_mask.insert(0, 0);
    states.push(LatticeState { mask: 0, next: Vec::new() });
    queue.push_back(0usize);
    while let Some(si) = queue.pop_front() {
        let mask = states[si].mask;
        // Levels of the current collected subgraph.
        let mut adj = vec![Vec::new(); nv];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        let dist = bfs_distances(&adj, 0);
        let in_u =
            |v: u32| -> bool { v == 0 || !adj[v as usize].is_empty() };
        let mut next = Vec::new();
        for (i, &(a, b)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                continue;
            }
            let accept = match (in_u(a), in_u(b)) {
                (true, true) => true,
                (true, false) => dist[a as usize].unwrap() + 1 <= k,
                (false, true) => dist[b as usize].unwrap() + 1 <= k,
                (false, false) => false,
            };
            if !accept {
                continue;
            }
            let nm = mask | 1 << i;
            let ni = match index_of_mask.get(&nm) {
                Some(&ni) => ni,
                None => {
                    if states.len() >= state_cap {
                        return None;
                    }
                    let ni = states.len();
                    index_of_mask.insert(nm, ni);
                    states.push(LatticeState { mask: nm, next: Vec::new() });
                    queue.push_back(ni);
                    ni
                }
            };
            next.push((i, ni));
        }
        states[si].next = next;
    }
    Some(ObsLattice { states, index_of_mask })
}

pub(crate) fn disc_from_mask(shape: &RootedDisc, mask: u32) -> RootedDisc {
    disc_from_edge_subset(shape, shape.edges(), mask)
        .expect("lattice states are valid observed discs")
}

/// Exhaustive catalog of every disc type for tiny `(d, k)`: all connected
/// rooted graphs with max degree ≤ d and radius ≤ k, up to root-preserving
/// isomorphism. Errors out once more than `cap` types appear.
pub fn enumerate_full_catalog(d: usize, k: u32, cap: usize) -> Result<DiscCatalog> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidParams("need d >= 1 and k >= 1".into()));
    }
    let root_only = canonicalize(&RootedDisc::new(k, vec![0], vec![]).unwrap());
    let mut known: HashMap<String, DiscType> = HashMap::new();
    known.insert(root_only.encoding().to_string(), root_only.clone());
    let mut queue = VecDeque::from([root_only]);
    let mut cache = CanonCache::new();
    while let Some(t) = queue.pop_front() {
        for grown in grow_once(t.shape(), d, k, &mut cache) {
            if !known.contains_key(grown.encoding()) {
                if known.len() + 1 > cap {
                    return Err(Error::CatalogTooLarge { cap });
                }
                known.insert(grown.encoding().to_string(), grown.clone());
                queue.push_back(grown);
            }
        }
    }
    DiscCatalog::assemble(known.into_values().collect())
}

/// All one-step extensions: a fresh leaf below a non-saturated vertex above
/// level k-1, or a new edge between existing non-adjacent vertices.
fn grow_once(shape: &RootedDisc, d: usize, k: u32, cache: &mut CanonCache) -> Vec<DiscType> {
    let nv = shape.num_vertices();
    let adj = shape.adjacency();
    let mut out = Vec::new();
    for v in 0..nv as u32 {
        if adj[v as usize].len() < d && shape.levels()[v as usize] + 1 <= k {
            let mut levels = shape.levels().to_vec();
            levels.push(shape.levels()[v as usize] + 1);
            let mut edges = shape.edges().to_vec();
            edges.push((v, nv as u32));
            // Adding a leaf cannot shorten other distances.
            let disc = RootedDisc::new(k, levels, edges).expect("leaf extension is valid");
            out.push(cache.canonical(&disc));
        }
    }
    for a in 0..nv as u32 {
        for b in a + 1..nv as u32 {
            if adj[a as usize].len() < d
                && adj[b as usize].len() < d
                && adj[a as usize].binary_search(&b).is_err()
            {
                let mut edges = shape.edges().to_vec();
                edges.push((a, b));
                let mut adj2 = vec![Vec::new(); nv];
                for &(x, y) in &edges {
                    adj2[x as usize].push(y);
                    adj2[y as usize].push(x);
                }
                let levels: Vec<u32> = bfs_distances(&adj2, 0)
                    .into_iter()
                    .map(|o| o.expect("still connected"))
                    .collect();
                // New shortcuts only shrink levels, so the radius still holds.
                let disc = RootedDisc::new(k, levels, edges).expect("edge extension is valid");
                out.push(cache.canonical(&disc));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(k: u32, levels: Vec<u32>, edges: Vec<(u32, u32)>) -> DiscType {
        canonicalize(&RootedDisc::new(k, levels, edges).unwrap())
    }

    fn triangle_k1() -> DiscType {
        ty(1, vec![0, 1, 1], vec![(0, 1), (0, 2), (1, 2)])
    }
    fn star2_k1() -> DiscType {
        ty(1, vec![0, 1, 1], vec![(0, 1), (0, 2)])
    }
    fn edge_k1() -> DiscType {
        ty(1, vec![0, 1], vec![(0, 1)])
    }
    fn lone_k1() -> DiscType {
        ty(1, vec![0], vec![])
    }

    #[test]
    fn order_examples() {
        assert!(is_geq(&triangle_k1(), &star2_k1()).unwrap());
        assert!(!is_geq(&edge_k1(), &triangle_k1()).unwrap());
        assert!(is_geq(&triangle_k1(), &triangle_k1()).unwrap());
        assert!(matches!(
            is_geq(&triangle_k1(), &ty(2, vec![0, 1, 1], vec![(0, 1), (0, 2), (1, 2)])),
            Err(Error::MismatchedRadius(1, 2))
        ));
    }

    #[test]
    fn triangle_closure_has_four_types() {
        let cat = build_catalog(&[triangle_k1()]).unwrap();
        assert_eq!(cat.len(), 4);
        assert_eq!(cat.get(0), &triangle_k1());
        assert_eq!(cat.get(1), &star2_k1());
        assert_eq!(cat.get(2), &edge_k1());
        assert_eq!(cat.get(3), &lone_k1());
        // Ancestors follow the order.
        assert_eq!(cat.ancestors(0), &[] as &[usize]);
        assert_eq!(cat.ancestors(1), &[0]);
        assert_eq!(cat.ancestors(2), &[0, 1]);
        assert_eq!(cat.ancestors(3), &[0, 1, 2]);
    }

    #[test]
    fn single_edge_closure() {
        let cat = build_catalog(&[edge_k1()]).unwrap();
        assert_eq!(cat.len(), 2);
    }

    #[test]
    fn empty_catalog() {
        let cat = build_catalog(&[]).unwrap();
        assert!(cat.is_empty());
    }

    #[test]
    fn observable_closure_of_triangle_is_smaller() {
        // A stream can only produce the full triangle or the two-edge star:
        // both root edges are always collected.
        let cat = build_catalog_with(&[triangle_k1()], ClosureMode::Observable).unwrap();
        assert_eq!(cat.len(), 2);
        assert!(cat.position(&triangle_k1()).is_some());
        assert!(cat.position(&star2_k1()).is_some());
    }

    #[test]
    fn full_catalog_d2_k1() {
        let cat = enumerate_full_catalog(2, 1, 100).unwrap();
        assert_eq!(cat.len(), 4);
        let cat = enumerate_full_catalog(1, 1, 100).unwrap();
        assert_eq!(cat.len(), 2);
        assert!(matches!(
            enumerate_full_catalog(2, 1, 2),
            Err(Error::CatalogTooLarge { cap: 2 })
        ));
    }

    #[test]
    fn partial_order_axioms_on_small_catalogs() {
        for (d, k) in [(2usize, 1u32), (3, 1)] {
            let cat = enumerate_full_catalog(d, k, 1000).unwrap();
            let n = cat.len();
            // Reflexive + antisymmetric + transitive.
            let mut geq = vec![vec![false; n]; n];
            for i in 0..n {
                for j in 0..n {
                    geq[i][j] = is_geq(cat.get(i), cat.get(j)).unwrap();
                }
            }
            for i in 0..n {
                assert!(geq[i][i]);
                for j in 0..n {
                    if i != j && geq[i][j] {
                        assert!(!geq[j][i], "antisymmetry {i} {j}");
                        // Linear extension property.
                        assert!(
                            cat.get(i).num_edges() > cat.get(j).num_edges()
                                || (cat.get(i).num_edges() == cat.get(j).num_edges()
                                    && cat.get(i).num_vertices() > cat.get(j).num_vertices())
                        );
                        assert!(i < j);
                    }
                    for l in 0..n {
                        if geq[i][j] && geq[j][l] {
                            assert!(geq[i][l], "transitivity {i} {j} {l}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lattice_of_triangle() {
        let lat = observable_lattice(triangle_k1().shape(), 1000).unwrap();
        // Reachable accepted subsets: {}, {a}, {b}, {a,b}, {a,b,c}.
        assert_eq!(lat.states.len(), 5);
    }
}
