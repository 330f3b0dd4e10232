//! Distribution estimation: sample roots, collect observed discs in one
//! pass, and invert the observation bias with the triangular recurrence
//!
//!   X_i = (Y_i - sum over ancestors j of X_j * λ(Δ_i|Δ_j)) / λ(Δ_i|Δ_i)
//!
//! computed in catalog order, which is a linear extension of the sub-disc
//! order. Raw X is unbiased but may leave [0,1]; a clamped-normalized copy
//! serves consumers that need genuine frequencies. A two-pass variant
//! verifies each collected disc against a second stream instead.

use crate::canon::{CanonCache, DiscType};

use crate::disc::AnchoredDisc;
use crate::error::{Error, Result};
use crate::graph::{subseed, true_disc, BoundedGraph, Params};
use crate::lambda::{
    build_matrix_from_observed, lambda_diag_exact, LambdaMatrix, LambdaPolicy, RowCache,
};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;


/// Uniform without-replacement root sample, deterministic per seed.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub roots: Vec<u32>,
    pub s: usize,
    pub seed: u64,
}

pub fn sample_roots(n: usize, s: usize, seed: u64) -> Result<SampleSet> {
    if s > n {
        return Err(Error::SampleTooLarge { s, n });
    }
    if s == 0 {
        return Err(Error::InvalidParams("s must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = rand::seq::index::sample(&mut rng, n, s);
    let roots: Vec<u32> = idx.into_iter().map(|i| i as u32).collect();
    Ok(SampleSet { roots, s, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    #[serde(rename = "single_pass_per_root")]
    SinglePassPerRoot,
    #[serde(rename = "single_pass_union")]
    SinglePassUnion,
    #[serde(rename = "two_pass")]
    TwoPass,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" | "single_pass_per_root" => Ok(Self::SinglePassPerRoot),
            "single-union" | "single_pass_union" => Ok(Self::SinglePassUnion),
            "two-pass" | "two_pass" => Ok(Self::TwoPass),
            _ => Err(Error::InvalidParams(format!("unknown variant {s:?}"))),
        }
    }
}

/// Result of one estimation run.
#[derive(Debug, Clone)]
pub struct DistributionEstimate {
    pub lambda: LambdaMatrix,
    /// Raw observed frequencies per catalog type; sums to 1.
    pub y: Vec<f64>,
    /// Unbiased estimates; entries may leave [0,1].
    pub x: Vec<f64>,
    /// max(X,0) renormalized to sum 1 (all zeros if nothing is positive).
    pub x_clamped: Vec<f64>,
    pub s: usize,
    pub seed: u64,
    pub variant: Variant,
    pub peak_memory_edges: usize,
    /// The theory-mandated sample size for these parameters, as a decimal
    /// string. Reported, never enforced.
    pub paper_s: String,
}

impl DistributionEstimate {
    pub fn catalog(&self) -> &crate::catalog::DiscCatalog {
        self.lambda.catalog()
    }

    pub fn freq_by_encoding(&self, enc: &str) -> f64 {
        self.catalog()
            .position_of_encoding(enc)
            .map(|i| self.x_clamped[i])
            .unwrap_or(0.0)
    }
}

/// Y_i = |{roots with observed type Δ_i}| / s.
pub fn raw_frequencies(
    observed: &[DiscType],
    catalog: &crate::catalog::DiscCatalog,
) -> Result<Vec<f64>> {
    let mut y = vec![0.0; catalog.len()];
    let s = observed.len();
    for t in observed {
        let i = catalog
            .position(t)
            .ok_or_else(|| Error::UnknownType(t.encoding().to_string()))?;
        y[i] += 1.0;
    }
    for v in &mut y {
        *v /= s as f64;
    }
    Ok(y)
}

/// The correction recurrence in catalog order.
pub fn unbias(y: &[f64], lambda: &LambdaMatrix) -> Result<Vec<f64>> {
    let catalog = lambda.catalog();
    let mut x = vec![0.0; catalog.len()];
    for i in 0..catalog.len() {
        let diag = lambda.diag(i);
        if diag <= 0.0 {
            return Err(Error::SingularLambda(catalog.get(i).encoding().to_string()));
        }
        let cross: f64 = catalog
            .ancestors(i)
            .iter()
            .map(|&j| x[j] * lambda.prob(i, j))
            .sum();
        x[i] = (y[i] - cross) / diag;
    }
    Ok(x)
}

pub fn clamp_normalize(x: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        return clamped;
    }
    clamped.into_iter().map(|v| v / total).collect()
}

fn f64_to_ratio(x: f64) -> (BigUint, BigUint) {
    assert!(x > 0.0 && x.is_finite(), "ratio conversion needs positive finite input");
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, e) = if exp == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let m = BigUint::from(mantissa);
    if e >= 0 {
        (m << e as usize, BigUint::one())
    } else {
        (m, BigUint::one() << (-e) as usize)
    }
}

/// The sample size the theory asks for:
/// `s = 8 κ^{2N} d^{2k+1} 3^{3N+1} / (δ² λ_min)`, rounded up, as an exact big
/// integer. Astronomical for realistic catalogs; reported for context only.
pub fn paper_sample_size(d: usize, k: u32, delta: f64, lambda: &LambdaMatrix) -> BigUint {
    let n_types = lambda.catalog().len() as u32;
    let (kap_n, kap_d) = f64_to_ratio(lambda.kappa().max(f64::MIN_POSITIVE));
    let (del_n, del_d) = f64_to_ratio(delta);
    let (lm_n, lm_d) = f64_to_ratio(lambda.lambda_min().max(f64::MIN_POSITIVE));
    let mut num = BigUint::from(8u32);
    num *= kap_n.pow(2 * n_types);
    num *= BigUint::from(d).pow(2 * k + 1);
    num *= BigUint::from(3u32).pow(3 * n_types + 1);
    num *= &del_d * &del_d;
    num *= lm_d;
    let mut den = kap_d.pow(2 * n_types);
    den *= &del_n * &del_n;
    den *= lm_n;
    // ceiling division
    (&num + &den - BigUint::one()) / den
}

/// Source of the probability matrix for an estimate.
pub enum LambdaSource<'a> {
    Prebuilt(&'a LambdaMatrix),
    /// Build catalog and rows from the observed types after the pass.
    OnTheFly(LambdaPolicy),
}

/// Shared scratch state that lets repeated estimates over the same graph
/// reuse canonical forms and matrix rows.
#[derive(Default)]
pub struct EstimatorScratch {
    pub rows: RowCache,
}

pub fn estimate_single_pass(
    g: &BoundedGraph,
    params: &Params,
    lambda: LambdaSource<'_>,
) -> Result<DistributionEstimate> {
    estimate_single_pass_with(g, params, lambda, Variant::SinglePassPerRoot, &EstimatorScratch::default())
}

pub fn estimate_single_pass_with(
    g: &BoundedGraph,
    params: &Params,
    lambda: LambdaSource<'_>,
    variant: Variant,
    scratch: &EstimatorScratch,
) -> Result<DistributionEstimate> {
    let params = params.validated()?;
    if matches!(variant, Variant::TwoPass) {
        return Err(Error::InvalidParams("two-pass estimates use estimate_two_pass".into()));
    }
    let sample = sample_roots(g.n(), params.s, subseed(params.seed, 1))?;
    let stream = crate::stream::EdgeStream::uniform(g, subseed(params.seed, 2))?;
    let (discs, peak) = crate::stream::observe_multi(&stream, &sample.roots, params.k)?;
    let mut cache = CanonCache::new();
    let observed: Vec<DiscType> = match variant {
        Variant::SinglePassPerRoot => {
            discs.iter().map(|a| cache.canonical(&a.disc)).collect()
        }
        Variant::SinglePassUnion => union_graph_types(g.n(), &discs, params.k, &mut cache)?,
        Variant::TwoPass => unreachable!(),
    };
    let matrix = match lambda {
        LambdaSource::Prebuilt(m) => m.clone(),
        LambdaSource::OnTheFly(policy) => {
            let mut uniq: Vec<DiscType> = observed.clone();
            uniq.sort();
            uniq.dedup();
            build_matrix_from_observed(&uniq, &policy, &scratch.rows)?
        }
    };
    let y = raw_frequencies(&observed, matrix.catalog())?;
    let x = unbias(&y, &matrix)?;
    let x_clamped = clamp_normalize(&x);
    let paper_s = paper_sample_size(g.degree_bound(), params.k, params.delta, &matrix).to_string();
    Ok(DistributionEstimate {
        lambda: matrix,
        y,
        x,
        x_clamped,
        s: params.s,
        seed: params.seed,
        variant,
        peak_memory_edges: peak,
        paper_s,
    })
}

/// The union-graph reading of the postprocessing step: pool every collected
/// edge into one graph H and type each root by its k-disc inside H.
fn union_graph_types(
    n: usize,
    discs: &[AnchoredDisc],
    k: u32,
    cache: &mut CanonCache,
) -> Result<Vec<DiscType>> {
    let mut edges: Vec<(u32, u32)> = discs.iter().flat_map(|a| a.graph_edges()).collect();
    edges.sort_unstable();
    edges.dedup();
    // Degrees in H are bounded by the host graph's, but pass a generous
    // bound: H is a subgraph of the host.
    let union = BoundedGraph::new(n, n.max(1), edges)?;
    discs
        .iter()
        .map(|a| Ok(cache.canonical(&true_disc(&union, a.root, k)?.disc)))
        .collect()
}

/// First pass collects; second pass verifies. A verified root's disc is its
/// true disc, so `X_i = verified_i / (s λ(Δ_i|Δ_i))` is unbiased for `f_i`.
pub fn estimate_two_pass(
    g: &BoundedGraph,
    params: &Params,
    policy: LambdaPolicy,
    scratch: &EstimatorScratch,
) -> Result<DistributionEstimate> {
    let params = params.validated()?;
    let sample = sample_roots(g.n(), params.s, subseed(params.seed, 1))?;
    let stream1 = crate::stream::EdgeStream::uniform(g, subseed(params.seed, 2))?;
    let (discs, peak1) = crate::stream::observe_multi(&stream1, &sample.roots, params.k)?;
    let stream2 = crate::stream::EdgeStream::uniform(g, subseed(params.seed, 3))?;
    let verdicts = crate::stream::second_pass_verify(&discs, &stream2, params.k);

    let mut cache = CanonCache::new();
    let observed: Vec<DiscType> = discs.iter().map(|a| cache.canonical(&a.disc)).collect();
    let mut uniq = observed.clone();
    uniq.sort();
    uniq.dedup();
    // The catalog indexes every observed type; the matrix is only consulted
    // on the diagonal, for types that actually verified.
    let matrix = build_matrix_from_observed(&uniq, &policy, &scratch.rows)?;
    let catalog = matrix.catalog();
    let y = raw_frequencies(&observed, catalog)?;
    let mut verified_counts = vec![0usize; catalog.len()];
    for (t, ok) in observed.iter().zip(&verdicts) {
        if *ok {
            let i = catalog.position(t).expect("observed type indexed");
            verified_counts[i] += 1;
        }
    }
    let mut x = vec![0.0; catalog.len()];
    for (i, &c) in verified_counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let diag = matrix.diag(i);
        if diag <= 0.0 {
            return Err(Error::SingularLambda(catalog.get(i).encoding().to_string()));
        }
        x[i] = c as f64 / (params.s as f64 * diag);
    }
    let x_clamped = clamp_normalize(&x);
    let paper_s = paper_sample_size(g.degree_bound(), params.k, params.delta, &matrix).to_string();
    Ok(DistributionEstimate {
        lambda: matrix,
        y,
        x,
        x_clamped,
        s: params.s,
        seed: params.seed,
        variant: Variant::TwoPass,
        peak_memory_edges: peak1,
        paper_s,
    })
}

/// Exact diagonal probability for a single type, independent of any matrix.
pub fn diag_probability(t: &DiscType, policy: &LambdaPolicy) -> f64 {
    if let Some((num, den)) = lambda_diag_exact(t, policy.lattice_state_cap) {
        return num.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(f64::MAX);
    }
    let row = crate::lambda::compute_row(t, policy);
    row.iter().find(|(rt, _)| rt == t).map(|(_, e)| e.p()).unwrap_or(0.0)
}

/// Observed types per root for callers that need them alongside an estimate.
pub fn observe_types(
    g: &BoundedGraph,
    roots: &[u32],
    k: u32,
    seed: u64,
) -> Result<(Vec<DiscType>, usize)> {
    let stream = crate::stream::EdgeStream::uniform(g, seed)?;
    let (discs, peak) = crate::stream::observe_multi(&stream, roots, k)?;
    let mut cache = CanonCache::new();
    Ok((discs.iter().map(|a| cache.canonical(&a.disc)).collect(), peak))
}

/// Builds the catalog and exact distribution restricted to it; convenience
/// for tests wanting f on the same index space as an estimate.
pub fn exact_f_on_catalog(
    g: &BoundedGraph,
    k: u32,
    catalog: &crate::catalog::DiscCatalog,
) -> Result<Vec<f64>> {
    let mut cache = CanonCache::new();
    let mut f = vec![0.0; catalog.len()];
    for v in 0..g.n() as u32 {
        let t = cache.canonical(&true_disc(g, v, k)?.disc);
        if let Some(i) = catalog.position(&t) {
            f[i] += 1.0;
        }
    }
    for v in &mut f {
        *v /= g.n() as f64;
    }
    Ok(f)
}
