//! Disc families and the multiset-frequency acceptance rule.
//!
//! A family member F is a multiset of exactly k disc types. Its empirical
//! frequency under an estimated distribution X is
//!
//!   Psi(F) = prod_i C(floor(X_i * n), x_i) / C(n, k)
//!
//! the multivariate-hypergeometric probability that the k-discs of k roots
//! sampled without replacement realize F, with C(L, M) = 0 for L < M. The
//! test accepts exactly when the family's total empirical frequency stays
//! below 1/2.

use crate::canon::DiscType;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One multiset of disc types, keyed by encoding with multiplicities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyMember {
    pub counts: BTreeMap<String, usize>,
}

impl FamilyMember {
    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscFamily {
    pub k: u32,
    pub members: Vec<FamilyMember>,
}

impl DiscFamily {
    /// Validates multiplicities (each member holds exactly k types) and that
    /// every encoding parses as a radius-k disc.
    pub fn validated(self) -> Result<Self> {
        for m in &self.members {
            if m.size() != self.k as usize {
                return Err(Error::InvalidParams(format!(
                    "family member holds {} types, expected k = {}",
                    m.size(),
                    self.k
                )));
            }
            for enc in m.counts.keys() {
                let t = DiscType::from_encoding(enc)?;
                if t.k() != self.k {
                    return Err(Error::MismatchedRadius(self.k, t.k()));
                }
            }
        }
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: DiscFamily = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        f.validated()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// C(l, m) as f64 with the C(l, m) = 0 convention for l < m.
fn binom(l: u64, m: u64) -> f64 {
    if l < m {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 1..=m {
        acc *= (l - m + i) as f64 / i as f64;
    }
    acc
}

/// Floor of a frequency scaled to n, clamped at zero.
fn scaled_count(freq: f64, n: usize) -> u64 {
    (freq * n as f64).floor().max(0.0) as u64
}

/// Psi(F) for an estimated distribution, queried by encoding.
pub fn empirical_frequency(
    member: &FamilyMember,
    freq_of: &dyn Fn(&str) -> f64,
    n: usize,
    k: u32,
) -> f64 {
    let mut num = 1.0f64;
    for (enc, &x_i) in &member.counts {
        if x_i == 0 {
            continue;
        }
        num *= binom(scaled_count(freq_of(enc), n), x_i as u64);
        if num == 0.0 {
            return 0.0;
        }
    }
    num / binom(n as u64, k as u64)
}

/// psi(F): same shape, exact fractions.
pub fn true_frequency(
    member: &FamilyMember,
    f_of: &dyn Fn(&str) -> f64,
    n: usize,
    k: u32,
) -> f64 {
    empirical_frequency(member, f_of, n, k)
}

/// Verdict of any tester built on disc statistics.
#[derive(Debug, Clone, Serialize)]
pub struct TesterVerdict {
    pub property: String,
    pub accept: bool,
    pub statistic: f64,
    pub threshold: f64,
    /// Per-member values for family tests, per-statistic details otherwise.
    pub details: Vec<(String, f64)>,
    /// The additive-error target the theory pairs with this rule,
    /// 1/(48 (2kN)^k), next to whatever delta the run actually used.
    pub delta_paper: f64,
}

/// Accepts iff the family's total empirical frequency is below 1/2.
pub fn family_test(
    family: &DiscFamily,
    freq_of: &dyn Fn(&str) -> f64,
    n: usize,
    n_types: usize,
) -> Result<TesterVerdict> {
    if family.members.is_empty() {
        return Err(Error::InvalidParams("family has no members".into()));
    }
    let k = family.k;
    let mut total = 0.0;
    let mut details = Vec::with_capacity(family.members.len());
    for (idx, m) in family.members.iter().enumerate() {
        let psi = empirical_frequency(m, freq_of, n, k);
        total += psi;
        details.push((format!("member_{idx}"), psi));
    }
    let delta_paper = 1.0 / (48.0 * (2.0 * k as f64 * n_types as f64).powi(k as i32));
    Ok(TesterVerdict {
        property: "family".into(),
        accept: total < 0.5,
        statistic: total,
        threshold: 0.5,
        details,
        delta_paper,
    })
}
