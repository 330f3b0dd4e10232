//! Concrete property testers built on disc statistics.
//!
//! Connectivity: a graph far from connected has many small components, and a
//! small component shows up as a "closed" disc (no vertex at level k) once
//! the radius covers it. The tester thresholds the estimated fraction of
//! vertices in closed discs of fewer than `8/(eps*d)` vertices at `eps*d/16`.
//!
//! Cycle-freeness: rejects when the estimated fraction of cycle-containing
//! disc types exceeds `eps/2`, or the estimated average degree exceeds
//! `2(1 - 1/n) + eps*d/2`. The thresholds are engineering constants.

use crate::apps::family::TesterVerdict;
use crate::catalog::DiscCatalog;
use crate::error::{Error, Result};
use crate::estimator::DistributionEstimate;
use crate::graph::Params;

/// Core rule on any frequency vector over a catalog.
pub fn connectivity_verdict(
    catalog: &DiscCatalog,
    freqs: &[f64],
    n: usize,
    epsilon: f64,
    d: usize,
    k: u32,
) -> Result<TesterVerdict> {
    let need = (8.0 / (epsilon * d as f64)).ceil() as u32 + 1;
    if k < need {
        return Err(Error::RadiusTooSmall { k, need });
    }
    let size_bound = 8.0 / (epsilon * d as f64);
    let statistic: f64 = catalog
        .types()
        .iter()
        .zip(freqs)
        .filter(|(t, _)| t.shape().is_closed() && (t.num_vertices() as f64) < size_bound)
        .map(|(_, &p)| p)
        .sum();
    let threshold = epsilon * d as f64 / 16.0;
    Ok(TesterVerdict {
        property: "connectivity".into(),
        accept: statistic <= threshold,
        statistic,
        threshold,
        details: vec![
            ("closed_small_fraction".into(), statistic),
            ("component_size_bound".into(), size_bound),
            ("n".into(), n as f64),
        ],
        delta_paper: delta_paper(k, catalog.len()),
    })
}

pub fn connectivity_test(est: &DistributionEstimate, n: usize, params: &Params) -> Result<TesterVerdict> {
    connectivity_verdict(est.catalog(), &est.x_clamped, n, params.epsilon, params.d, params.k)
}

pub fn cyclefree_verdict(
    catalog: &DiscCatalog,
    freqs: &[f64],
    n: usize,
    epsilon: f64,
    d: usize,
    k: u32,
) -> Result<TesterVerdict> {
    if k < 2 {
        return Err(Error::RadiusTooSmall { k, need: 2 });
    }
    let cycle_fraction: f64 = catalog
        .types()
        .iter()
        .zip(freqs)
        .filter(|(t, _)| t.shape().has_cycle())
        .map(|(_, &p)| p)
        .sum();
    let avg_degree: f64 = catalog
        .types()
        .iter()
        .zip(freqs)
        .map(|(t, &p)| p * t.shape().root_degree() as f64)
        .sum();
    let cycle_threshold = epsilon / 2.0;
    let degree_threshold = 2.0 * (1.0 - 1.0 / n as f64) + epsilon * d as f64 / 2.0;
    let reject = cycle_fraction > cycle_threshold || avg_degree > degree_threshold;
    Ok(TesterVerdict {
        property: "cyclefree".into(),
        accept: !reject,
        statistic: cycle_fraction,
        threshold: cycle_threshold,
        details: vec![
            ("cycle_fraction".into(), cycle_fraction),
            ("avg_degree".into(), avg_degree),
            ("degree_threshold".into(), degree_threshold),
        ],
        delta_paper: delta_paper(k, catalog.len()),
    })
}

pub fn cyclefree_test(est: &DistributionEstimate, n: usize, params: &Params) -> Result<TesterVerdict> {
    cyclefree_verdict(est.catalog(), &est.x_clamped, n, params.epsilon, params.d, params.k)
}

fn delta_paper(k: u32, n_types: usize) -> f64 {
    1.0 / (48.0 * (2.0 * k as f64 * n_types.max(1) as f64).powi(k as i32))
}
