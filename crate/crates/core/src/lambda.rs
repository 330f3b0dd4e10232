//! Conditional observation probabilities.
//!
//! For a root whose true disc has type `Δ_j`, `λ(Δ_i|Δ_j)` is the probability
//! over uniform edge orders that the stream collector returns type `Δ_i`.
//! The observed disc depends only on the relative order of the true disc's
//! own edges (a tested locality invariant), so each row is computed on the
//! disc in isolation: exactly by permutation enumeration for small discs,
//! otherwise by seeded Monte Carlo with the diagonal entry upgraded to an
//! exact value (subtree-product formula for trees, an acceptance-order count
//! over the observable-subset lattice for everything else).

use crate::canon::{CanonCache, DiscType};
use crate::catalog::{disc_from_mask, hash_encoding, observable_lattice, DiscCatalog};
use crate::disc::bfs_distances;
use crate::error::{Error, Result};
use crate::graph::subseed;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// One stored probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaEntry {
    /// Exact rational `num/den` (permutation counts or lattice/subtree math;
    /// `samples = 0` Monte Carlo entries also mark exact values whose
    /// numerator or denominator overflows u64).
    Exact { num: u64, den: u64 },
    Mc { p: f64, stderr: f64, samples: u64 },
}

impl LambdaEntry {
    pub fn p(&self) -> f64 {
        match self {
            LambdaEntry::Exact { num, den } => *num as f64 / *den as f64,
            LambdaEntry::Mc { p, .. } => *p,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            LambdaEntry::Exact { .. } => 0.0,
            LambdaEntry::Mc { stderr, .. } => *stderr,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, LambdaEntry::Exact { .. })
            || matches!(self, LambdaEntry::Mc { samples: 0, .. })
    }
}

/// Row construction policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPolicy {
    /// Discs with at most this many edges get full permutation enumeration.
    pub exact_cap_edges: usize,
    /// Shuffles per Monte Carlo row.
    pub mc_samples: usize,
    pub seed: u64,
    /// State budget for the exact-diagonal lattice walk.
    pub lattice_state_cap: usize,
}

impl Default for LambdaPolicy {
    fn default() -> Self {
        Self { exact_cap_edges: 9, mc_samples: 4000, seed: 0, lattice_state_cap: 200_000 }
    }
}

pub type Row = Vec<(DiscType, LambdaEntry)>;

/// Memoizes rows by type encoding; rows are independent of the catalog they
/// end up in, so one cache can serve many estimates over the same graph.
/// Assumes a single policy per cache.
#[derive(Default)]
pub struct RowCache {
    inner: Mutex<HashMap<String, std::sync::Arc<Row>>>,
}

impl RowCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn row(&self, t: &DiscType, policy: &LambdaPolicy) -> std::sync::Arc<Row> {
        if let Some(r) = self.inner.lock().unwrap().get(t.encoding()) {
            return r.clone();
        }
        let row = std::sync::Arc::new(compute_row(t, policy));
        self.inner
            .lock()
            .unwrap()
            .entry(t.encoding().to_string())
            .or_insert(row)
            .clone()
    }
}

/// Heap's algorithm; calls `f` on every permutation of `items`.
fn for_each_permutation<T: Copy>(items: &mut [T], f: &mut impl FnMut(&[T])) {
    let n = items.len();
    f(items);
    if n < 2 {
        return;
    }
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Replays one edge order against a disc, bookkeeping only local state.
/// Returns the accepted-edge bitmask.
struct DiscSim {
    k: u32,
    adj: Vec<Vec<u32>>,
    in_u: Vec<bool>,
    levels: Vec<u32>,
}

impl DiscSim {
    fn new(nv: usize, k: u32) -> Self {
        Self { k, adj: vec![Vec::new(); nv], in_u: vec![false; nv], levels: vec![0; nv] }
    }

    fn run(&mut self, edges: &[(u32, u32)], order: &[u16]) -> u32 {
        for l in &mut self.adj {
            l.clear();
        }
        self.in_u.iter_mut().for_each(|b| *b = false);
        self.in_u[0] = true;
        self.levels[0] = 0;
        let mut mask = 0u32;
        for &ei in order {
            let (a, b) = edges[ei as usize];
            let (ia, ib) = (self.in_u[a as usize], self.in_u[b as usize]);
            let accept = match (ia, ib) {
                (true, true) => true,
                (true, false) => self.levels[a as usize] + 1 <= self.k,
                (false, true) => self.levels[b as usize] + 1 <= self.k,
                (false, false) => false,
            };
            if !accept {
                continue;
            }
            mask |= 1 << ei;
            self.adj[a as usize].push(b);
            self.adj[b as usize].push(a);
            self.in_u[a as usize] = true;
            self.in_u[b as usize] = true;
            // Recompute all levels in (U, F).
            let dist = bfs_distances(&self.adj, 0);
            for (v, d) in dist.into_iter().enumerate() {
                if let Some(d) = d {
                    self.levels[v] = d;
                }
            }
        }
        mask
    }
}

fn factorial_u64(m: usize) -> Option<u64> {
    let mut acc = 1u64;
    for i in 2..=m as u64 {
        acc = acc.checked_mul(i)?;
    }
    Some(acc)
}

fn factorial_big(m: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=m as u64 {
        acc *= i;
    }
    acc
}

fn factorial_f64(m: usize) -> f64 {
    (2..=m as u64).fold(1.0, |a, i| a * i as f64)
}

/// Exact row by enumerating every ordering of the disc's edges.
/// Probabilities come back as counts over `m!`.
pub fn lambda_exact(dt: &DiscType, cap_edges: usize) -> Result<Vec<(DiscType, u64, u64)>> {
    let m = dt.num_edges();
    if m > cap_edges {
        return Err(Error::TooManyEdges { edges: m, cap: cap_edges });
    }
    let total = factorial_u64(m).expect("cap keeps m! within u64");
    let shape = dt.shape();
    let mut sim = DiscSim::new(shape.num_vertices(), shape.k());
    let mut order: Vec<u16> = (0..m as u16).collect();
    let mut by_mask: HashMap<u32, u64> = HashMap::new();
    for_each_permutation(&mut order, &mut |ord| {
        *by_mask.entry(sim.run(shape.edges(), ord)).or_default() += 1;
    });
    let mut cache = CanonCache::new();
    let mut by_type: HashMap<DiscType, u64> = HashMap::new();
    for (mask, count) in by_mask {
        let t = cache.canonical(&disc_from_mask(shape, mask));
        *by_type.entry(t).or_default() += count;
    }
    let mut out: Vec<(DiscType, u64, u64)> =
        by_type.into_iter().map(|(t, c)| (t, c, total)).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Monte Carlo row: frequencies over seeded shuffles plus binomial standard
/// errors. Frequencies partition the samples, so they sum to one exactly.
pub fn lambda_monte_carlo(
    dt: &DiscType,
    samples: usize,
    seed: u64,
) -> Vec<(DiscType, f64, f64)> {
    let shape = dt.shape();
    let m = shape.num_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sim = DiscSim::new(shape.num_vertices(), shape.k());
    let mut order: Vec<u16> = (0..m as u16).collect();
    let mut by_mask: HashMap<u32, u64> = HashMap::new();
    for _ in 0..samples {
        order.shuffle(&mut rng);
        *by_mask.entry(sim.run(shape.edges(), &order)).or_default() += 1;
    }
    let mut cache = CanonCache::new();
    let mut by_type: HashMap<DiscType, u64> = HashMap::new();
    for (mask, count) in by_mask {
        let t = cache.canonical(&disc_from_mask(shape, mask));
        *by_type.entry(t).or_default() += count;
    }
    let mut out: Vec<(DiscType, f64, f64)> = by_type
        .into_iter()
        .map(|(t, c)| {
            let p = c as f64 / samples as f64;
            (t, p, (p * (1.0 - p) / samples as f64).sqrt())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Exact probability of observing the full disc. Trees use the
/// subtree-product form (every edge must arrive after its parent edge);
/// otherwise the number of acceptable insert orders is counted over the
/// observable-subset lattice. None when the lattice exceeds `state_cap`.
pub fn lambda_diag_exact(dt: &DiscType, state_cap: usize) -> Option<(BigUint, BigUint)> {
    let shape = dt.shape();
    let m = shape.num_edges();
    if m == 0 {
        return Some((BigUint::one(), BigUint::one()));
    }
    if m == shape.num_vertices() - 1 {
        // Tree: P(full) = prod over edges of 1/(edges in the subtree hanging
        // from the edge's far endpoint, inclusive).
        let adj = shape.adjacency();
        let mut den = BigUint::one();
        let mut sizes = vec![0u64; shape.num_vertices()];
        // children counts via reverse BFS order
        let order: Vec<u32> = {
            let mut o: Vec<u32> = (0..shape.num_vertices() as u32).collect();
            o.sort_by_key(|&v| std::cmp::Reverse(shape.levels()[v as usize]));
            o
        };
        for &v in &order {
            let mut sz = 1u64;
            for &w in &adj[v as usize] {
                if shape.levels()[w as usize] > shape.levels()[v as usize] {
                    sz += sizes[w as usize];
                }
            }
            sizes[v as usize] = sz;
        }
        for v in 1..shape.num_vertices() {
            den *= BigUint::from(sizes[v]);
        }
        return Some((BigUint::one(), den));
    }
    let lattice = observable_lattice(shape, state_cap)?;
    // Count acceptance orders with a DP over states in edge-count order.
    let mut by_count: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for (i, st) in lattice.states.iter().enumerate() {
        by_count[st.mask.count_ones() as usize].push(i);
    }
    let mut ways: Vec<BigUint> = vec![BigUint::zero(); lattice.states.len()];
    ways[0] = BigUint::one();
    for level in by_count {
        for si in level {
            if ways[si].is_zero() {
                continue;
            }
            let w = ways[si].clone();
            for &(_, ni) in &lattice.states[si].next {
                ways[ni] += &w;
            }
        }
    }
    let full_mask = (1u32 << m) - 1;
    let full = *lattice.index_of_mask.get(&full_mask)?;
    Some((ways[full].clone(), factorial_big(m)))
}

fn diag_entry_from_big(num: BigUint, den: BigUint) -> LambdaEntry {
    let g = num_integer_gcd(&num, &den);
    let (num, den) = (&num / &g, &den / &g);
    match (num.to_u64(), den.to_u64()) {
        (Some(n), Some(d)) => LambdaEntry::Exact { num: n, den: d },
        _ => {
            let p = num.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(f64::MAX);
            LambdaEntry::Mc { p, stderr: 0.0, samples: 0 }
        }
    }
}

fn num_integer_gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    if a.is_zero() {
        BigUint::one()
    } else {
        a
    }
}

/// One row for `dt` under the policy: exact under the cap, else Monte Carlo
/// with an exact diagonal (floored at 1/m! if even that is unavailable).
pub fn compute_row(dt: &DiscType, policy: &LambdaPolicy) -> Row {
    let m = dt.num_edges();
    if m <= policy.exact_cap_edges {
        let exact = lambda_exact(dt, policy.exact_cap_edges).expect("within cap");
        return exact
            .into_iter()
            .map(|(t, num, den)| (t, LambdaEntry::Exact { num, den }))
            .collect();
    }
    let seed = subseed(policy.seed, hash_encoding(dt.encoding()));
    let mc = lambda_monte_carlo(dt, policy.mc_samples, seed);
    let samples = policy.mc_samples as u64;
    let mut row: Row = mc
        .into_iter()
        .map(|(t, p, stderr)| (t, LambdaEntry::Mc { p, stderr, samples }))
        .collect();
    let diag = lambda_diag_exact(dt, policy.lattice_state_cap)
        .map(|(n, d)| diag_entry_from_big(n, d))
        .unwrap_or(LambdaEntry::Mc {
            p: 1.0 / factorial_f64(m),
            stderr: 0.0,
            samples: 0,
        });
    match row.iter_mut().find(|(t, _)| t == dt) {
        Some((_, e)) => *e = diag,
        None => row.push((dt.clone(), diag)),
    }
    row.sort_by(|a, b| a.0.cmp(&b.0));
    row
}

/// The full set of conditional observation probabilities over a catalog.
#[derive(Debug, Clone)]
pub struct LambdaMatrix {
    catalog: DiscCatalog,
    /// `rows[j][i]` = probability of observing type `i` when the true type
    /// is `j`, keyed by catalog positions.
    rows: Vec<BTreeMap<usize, LambdaEntry>>,
    kappa: f64,
    lambda_min: f64,
}

impl LambdaMatrix {
    pub fn catalog(&self) -> &DiscCatalog {
        &self.catalog
    }

    /// λ(Δ_i | Δ_j) by catalog positions; zero when unstored.
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.rows[j].get(&i).map(|e| e.p()).unwrap_or(0.0)
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&LambdaEntry> {
        self.rows[j].get(&i)
    }

    pub fn diag(&self, j: usize) -> f64 {
        self.prob(j, j)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn rows(&self) -> &[BTreeMap<usize, LambdaEntry>] {
        &self.rows
    }

    fn from_rows(catalog: DiscCatalog, rows: Vec<BTreeMap<usize, LambdaEntry>>) -> Result<Self> {
        let mut diag = vec![0.0f64; catalog.len()];
        for j in 0..catalog.len() {
            diag[j] = rows[j].get(&j).map(|e| e.p()).unwrap_or(0.0);
            if diag[j] <= 0.0 {
                return Err(Error::SingularLambda(catalog.get(j).encoding().to_string()));
            }
        }
        let mut kappa = 0.0f64;
        for row in rows.iter() {
            for (&i, e) in row {
                kappa = kappa.max(e.p() / diag[i]);
            }
        }
        let lambda_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let m = Self { catalog, rows, kappa, lambda_min };
        m.validate()?;
        Ok(m)
    }

    /// Checks stored values are probabilities, each row sums to one (exactly
    /// for exact rows, within Monte Carlo tolerance otherwise), and the
    /// diagonal is strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (j, row) in self.rows.iter().enumerate() {
            let mut sum = 0.0;
            let mut exact_only = true;
            let mut samples = u64::MAX;
            for e in row.values() {
                let p = e.p();
                if !(0.0..=1.0 + 1e-12).contains(&p) {
                    return Err(Error::RealizabilityViolation(format!(
                        "entry out of [0,1] in row {j}"
                    )));
                }
                sum += p;
                match e {
                    LambdaEntry::Exact { .. } => {}
                    LambdaEntry::Mc { samples: s, .. } => {
                        if *s > 0 {
                            exact_only = false;
                            samples = samples.min(*s);
                        }
                    }
                }
            }
            let tol = if exact_only {
                1e-12
            } else {
                4.0 / (samples.max(1) as f64).sqrt()
            };
            if (sum - 1.0).abs() > tol {
                return Err(Error::RealizabilityViolation(format!(
                    "row {j} sums to {sum}, tolerance {tol}"
                )));
            }
        }
        Ok(())
    }
}

/// Rows for every type of a prebuilt catalog. Observed sub-types that fall
/// outside the catalog are dropped from the row (their mass is lost, which
/// stays within the Monte Carlo tolerance as long as the catalog was closed).
pub fn build_matrix(catalog: &DiscCatalog, policy: &LambdaPolicy) -> Result<LambdaMatrix> {
    build_matrix_cached(catalog, policy, &RowCache::new())
}

pub fn build_matrix_cached(
    catalog: &DiscCatalog,
    policy: &LambdaPolicy,
    cache: &RowCache,
) -> Result<LambdaMatrix> {
    if catalog.is_empty() {
        return Err(Error::RealizabilityViolation("empty catalog".into()));
    }
    let raw: Vec<std::sync::Arc<Row>> = catalog
        .types()
        .par_iter()
        .map(|t| cache.row(t, policy))
        .collect();
    let rows: Vec<BTreeMap<usize, LambdaEntry>> = raw
        .into_iter()
        .map(|row| {
            row.iter()
                .filter_map(|(t, e)| catalog.position(t).map(|i| (i, e.clone())))
                .collect()
        })
        .collect();
    LambdaMatrix::from_rows(catalog.clone(), rows)
}

/// Closes the observed types downward using the very samples that produce
/// the Monte Carlo rows, then assembles catalog and matrix in one go. This
/// is the estimator's on-the-fly path: every type either row discovers is
/// indexed, so nothing observed can fall outside the catalog.
pub fn build_matrix_from_observed(
    observed: &[DiscType],
    policy: &LambdaPolicy,
    cache: &RowCache,
) -> Result<LambdaMatrix> {
    use crate::catalog::CLOSURE_TYPE_CAP;
    let mut known: BTreeMap<String, DiscType> = BTreeMap::new();
    let mut rows_by_enc: HashMap<String, std::sync::Arc<Row>> = HashMap::new();
    let mut wave: Vec<DiscType> = Vec::new();
    for t in observed {
        if known.insert(t.encoding().to_string(), t.clone()).is_none() {
            wave.push(t.clone());
        }
    }
    while !wave.is_empty() {
        let computed: Vec<(String, std::sync::Arc<Row>)> = wave
            .par_iter()
            .map(|t| (t.encoding().to_string(), cache.row(t, policy)))
            .collect();
        let mut next: Vec<DiscType> = Vec::new();
        for (enc, row) in computed {
            for (t, _) in row.iter() {
                if known.len() >= CLOSURE_TYPE_CAP {
                    break;
                }
                if known.insert(t.encoding().to_string(), t.clone()).is_none() {
                    next.push(t.clone());
                }
            }
            rows_by_enc.insert(enc, row);
        }
        wave = next;
    }
    let catalog = crate::catalog::catalog_from_types(known.into_values().collect())?;
    let rows: Vec<BTreeMap<usize, LambdaEntry>> = catalog
        .types()
        .iter()
        .map(|t| {
            let row = rows_by_enc
                .get(t.encoding())
                .cloned()
                .unwrap_or_else(|| cache.row(t, policy));
            row.iter()
                .filter_map(|(ti, e)| catalog.position(ti).map(|i| (i, e.clone())))
                .collect()
        })
        .collect();
    LambdaMatrix::from_rows(catalog, rows)
}

/// Serialized matrix file.
#[derive(Serialize, Deserialize)]
struct LambdaFile {
    d: usize,
    k: u32,
    types: Vec<String>,
    rows: BTreeMap<String, BTreeMap<String, LambdaEntry>>,
    kappa: f64,
    lambda_min: f64,
}

impl LambdaMatrix {
    pub fn to_json(&self, d: usize) -> String {
        let k = self.catalog.types().first().map(|t| t.k()).unwrap_or(0);
        let file = LambdaFile {
            d,
            k,
            types: self.catalog.types().iter().map(|t| t.encoding().to_string()).collect(),
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(j, row)| {
                    (
                        self.catalog.get(j).encoding().to_string(),
                        row.iter()
                            .map(|(&i, e)| {
                                (self.catalog.get(i).encoding().to_string(), e.clone())
                            })
                            .collect(),
                    )
                })
                .collect(),
            kappa: self.kappa,
            lambda_min: self.lambda_min,
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Parses a matrix file; returns the degree bound it was built for.
    pub fn from_json(text: &str) -> Result<(Self, usize)> {
        let file: LambdaFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        let types: Vec<DiscType> = file
            .types
            .iter()
            .map(|e| DiscType::from_encoding(e))
            .collect::<Result<_>>()?;
        let catalog = crate::catalog::catalog_from_types(types)?;
        let mut rows = vec![BTreeMap::new(); catalog.len()];
        for (enc_j, row) in &file.rows {
            let j = catalog
                .position_of_encoding(enc_j)
                .ok_or_else(|| Error::UnknownType(enc_j.clone()))?;
            for (enc_i, e) in row {
                let i = catalog
                    .position_of_encoding(enc_i)
                    .ok_or_else(|| Error::UnknownType(enc_i.clone()))?;
                rows[j].insert(i, e.clone());
            }
        }
        Ok((LambdaMatrix::from_rows(catalog, rows)?, file.d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::disc::RootedDisc;

    fn ty(k: u32, levels: Vec<u32>, edges: Vec<(u32, u32)>) -> DiscType {
        canonicalize(&RootedDisc::new(k, levels, edges).unwrap())
    }

    fn triangle() -> DiscType {
        ty(1, vec![0, 1, 1], vec![(0, 1), (0, 2), (1, 2)])
    }

    #[test]
    fn exact_triangle_row() {
        let row = lambda_exact(&triangle(), 9).unwrap();
        assert_eq!(row.len(), 2);
        for (t, num, den) in &row {
            assert_eq!(*den, 6);
            if t == &triangle() {
                assert_eq!(*num, 2);
            } else {
                assert_eq!(t.num_edges(), 2);
                assert_eq!(*num, 4);
            }
        }
    }

    #[test]
    fn exact_single_edge_row() {
        for k in 1..=3 {
            let e = ty(k, vec![0, 1], vec![(0, 1)]);
            let row = lambda_exact(&e, 9).unwrap();
            assert_eq!(row, vec![(e.clone(), 1, 1)]);
        }
    }

    #[test]
    fn exact_path_row_radius_two() {
        let path = ty(2, vec![0, 1, 2], vec![(0, 1), (1, 2)]);
        let row = lambda_exact(&path, 9).unwrap();
        assert_eq!(row.len(), 2);
        for (t, num, den) in row {
            assert_eq!(den, 2);
            assert_eq!(num, 1, "type {}", t.encoding());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let star = ty(1, vec![0, 1, 1], vec![(0, 1), (0, 2)]);
        assert!(matches!(
            lambda_exact(&star, 1),
            Err(Error::TooManyEdges { edges: 2, cap: 1 })
        ));
    }

    #[test]
    fn monte_carlo_tracks_exact() {
        let mc = lambda_monte_carlo(&triangle(), 60_000, 12345);
        let total: f64 = mc.iter().map(|(_, p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let (_, p, stderr) =
            mc.iter().find(|(t, _, _)| t == &triangle()).expect("triangle observed");
        assert!((p - 1.0 / 3.0).abs() <= 3.0 * stderr, "p = {p}");
    }

    #[test]
    fn monte_carlo_single_edge_is_certain() {
        let e = ty(1, vec![0, 1], vec![(0, 1)]);
        let mc = lambda_monte_carlo(&e, 200, 1);
        assert_eq!(mc.len(), 1);
        assert_eq!(mc[0].1, 1.0);
        assert_eq!(mc[0].2, 0.0);
    }

    #[test]
    fn diag_exact_matches_enumeration() {
        // Triangle diag = 2/6; lattice DP must agree with enumeration.
        let (num, den) = lambda_diag_exact(&triangle(), 10_000).unwrap();
        assert_eq!(num, BigUint::from(2u32));
        assert_eq!(den, BigUint::from(6u32));
        // Tree case via the subtree product: centered path of radius 2.
        let twoarm = ty(2, vec![0, 1, 1, 2, 2], vec![(0, 1), (0, 2), (1, 3), (2, 4)]);
        let (num, den) = lambda_diag_exact(&twoarm, 10_000).unwrap();
        assert_eq!(num, BigUint::one());
        assert_eq!(den, BigUint::from(4u32)); // each arm in order: 1/2 * 1/2
        let exact = lambda_exact(&twoarm, 9).unwrap();
        let (_, n, d) = exact.iter().find(|(t, _, _)| t == &twoarm).unwrap();
        assert_eq!(*n as f64 / *d as f64, 0.25);
    }

    #[test]
    fn matrix_for_triangle_catalog() {
        let catalog = crate::catalog::build_catalog(&[triangle()]).unwrap();
        let m = build_matrix(&catalog, &LambdaPolicy::default()).unwrap();
        assert_eq!(m.catalog().len(), 4);
        let tri = m.catalog().position(&triangle()).unwrap();
        assert_eq!(tri, 0);
        assert!((m.prob(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.prob(1, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.prob(2, 0), 0.0);
        assert_eq!(m.prob(3, 0), 0.0);
        // Star, edge, and lone-root rows are deterministic.
        for j in 1..4 {
            assert_eq!(m.diag(j), 1.0);
        }
        // Max ratio over stored pairs includes the diagonal, so kappa >= 1;
        // the largest off-diagonal ratio is (2/3)/1.
        assert!((m.kappa() - 1.0).abs() < 1e-15);
        assert!((m.lambda_min() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_json_roundtrip() {
        let catalog = crate::catalog::build_catalog(&[triangle()]).unwrap();
        let m = build_matrix(&catalog, &LambdaPolicy::default()).unwrap();
        let text = m.to_json(2);
        let (back, d) = LambdaMatrix::from_json(&text).unwrap();
        assert_eq!(d, 2);
        assert_eq!(back.catalog().len(), 4);
        assert_eq!(back.to_json(2), text);
    }

    #[test]
    fn mc_row_gets_exact_diag() {
        // 11-edge disc: over the default exact cap, so the row is Monte
        // Carlo, but the diagonal must still be exact.
        let mut levels = vec![0u32];
        let mut edges = Vec::new();
        for arm in 0..3u32 {
            let a = 1 + arm * 3;
            levels.extend([1, 2, 2]);
            edges.extend([(0, a), (a, a + 1), (a, a + 2)]);
        }
        // add two cross edges at depth 2 to break treeness
        edges.push((2, 5));
        edges.push((3, 6));
        let dt = ty(2, levels, edges);
        assert_eq!(dt.num_edges(), 11);
        let row = compute_row(&dt, &LambdaPolicy { mc_samples: 500, ..Default::default() });
        let diag = row.iter().find(|(t, _)| t == &dt).expect("diag present");
        assert!(diag.1.is_exact());
        assert!(diag.1.p() > 0.0);
    }
}
