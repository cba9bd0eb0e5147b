//! Monte Carlo estimation of arc-to-arc open crossings.
//!
//! A sample is the set of open in-domain sites, decided lazily site by site
//! from [`rng::site_uniform`]. A crossing is an open path from an
//! `ax`-labelled site to a `bc`-labelled site using in-domain adjacency;
//! both endpoints must be open. Each sample is searched from scratch.

pub mod rng;
pub mod stats;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{Arc, DomainSummary, SiteClassification};
use crate::lattice::{LatticeSpec, Site};

pub use stats::{wilson_interval, Z_95};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("open probability p = {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("coupling precondition violated: {reason}{}", .site.map(|s| format!(" at site {s}")).unwrap_or_default())]
    CouplingMismatch { reason: String, site: Option<Site> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub p: f64,
    pub seed: u64,
    pub n_samples: u64,
}

impl SamplingPlan {
    pub fn new(p: f64, seed: u64, n_samples: u64) -> Result<Self, EngineError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(EngineError::InvalidProbability(p));
        }
        if n_samples == 0 {
            return Err(EngineError::NoSamples);
        }
        Ok(Self { p, seed, n_samples })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Provenance {
    pub spec: LatticeSpec,
    pub domain: DomainSummary,
    pub plan: SamplingPlan,
    pub stream_version: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingEstimate {
    pub n: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub provenance: Provenance,
}

impl CrossingEstimate {
    fn from_counts(cls: &SiteClassification, plan: SamplingPlan, successes: u64) -> Self {
        let n = plan.n_samples;
        let (ci_low, ci_high) = wilson_interval(successes, n);
        Self {
            n,
            successes,
            p_hat: successes as f64 / n as f64,
            ci_low,
            ci_high,
            provenance: Provenance {
                spec: *cls.spec(),
                domain: cls.summary(),
                plan,
                stream_version: rng::SITE_STREAM_VERSION,
            },
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

/// Precomputed, read-only view of a classification used by every worker.
struct CrossingKernel<'a> {
    cls: &'a SiteClassification,
    site_keys: Vec<u64>,
    sources: Vec<u32>,
    is_target: Vec<bool>,
}

impl<'a> CrossingKernel<'a> {
    fn new(cls: &'a SiteClassification) -> Self {
        Self {
            cls,
            site_keys: cls.sites().iter().map(|&s| rng::site_key(s)).collect(),
            sources: cls.sites_with_label(Arc::Ax).collect(),
            is_target: cls.labels().iter().map(|l| *l == Some(Arc::Bc)).collect(),
        }
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            stamp: vec![0; self.site_keys.len()],
            open: vec![false; self.site_keys.len()],
            visited: vec![false; self.site_keys.len()],
            stack: Vec::new(),
            epoch: 0,
        }
    }

    fn crosses(&self, scratch: &mut Scratch, p: f64, seed: u64, sample_idx: u64) -> bool {
        if p <= 0.0 {
            return false;
        }
        let key = rng::sample_key(seed, sample_idx);
        scratch.next_epoch();
        let Scratch {
            stamp,
            open,
            visited,
            stack,
            epoch,
        } = scratch;
        let epoch = *epoch;
        // Newly reached open site: `Some(true)` if it is a target.
        let mut reach = |v: u32| -> Option<bool> {
            let v = v as usize;
            if stamp[v] != epoch {
                stamp[v] = epoch;
                open[v] = rng::uniform_from_keys(key, self.site_keys[v]) < p;
                visited[v] = false;
            }
            if !open[v] || visited[v] {
                return None;
            }
            visited[v] = true;
            Some(self.is_target[v])
        };

        for &s in &self.sources {
            match reach(s) {
                Some(true) => return true,
                Some(false) => stack.push(s),
                None => {}
            }
        }
        while let Some(v) = stack.pop() {
            for &w in self.cls.neighbors(v) {
                match reach(w) {
                    Some(true) => return true,
                    Some(false) => stack.push(w),
                    None => {}
                }
            }
        }
        false
    }
}

struct Scratch {
    stamp: Vec<u32>,
    open: Vec<bool>,
    visited: Vec<bool>,
    stack: Vec<u32>,
    epoch: u32,
}

impl Scratch {
    fn next_epoch(&mut self) {
        self.stack.clear();
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }
}

/// Crossing indicator of one sample.
pub fn sample_crossing(cls: &SiteClassification, p: f64, seed: u64, sample_idx: u64) -> bool {
    let kernel = CrossingKernel::new(cls);
    let mut scratch = kernel.scratch();
    kernel.crosses(&mut scratch, p, seed, sample_idx)
}

/// Crossing indicators for sample indices `range`, in index order.
pub fn crossing_indicators(
    cls: &SiteClassification,
    p: f64,
    seed: u64,
    range: std::ops::Range<u64>,
) -> Vec<bool> {
    let kernel = CrossingKernel::new(cls);
    range
        .into_par_iter()
        .map_init(|| kernel.scratch(), |s, idx| kernel.crosses(s, p, seed, idx))
        .collect()
}

/// Crossing frequency over sample indices `0..plan.n_samples`. The result
/// depends only on the inputs, not on how rayon splits the work.
pub fn estimate(cls: &SiteClassification, plan: &SamplingPlan) -> CrossingEstimate {
    let kernel = CrossingKernel::new(cls);
    let successes: u64 = (0..plan.n_samples)
        .into_par_iter()
        .map_init(
            || kernel.scratch(),
            |s, idx| kernel.crosses(s, plan.p, plan.seed, idx) as u64,
        )
        .sum();
    CrossingEstimate::from_counts(cls, *plan, successes)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoupledEstimate {
    pub indicators_a: Vec<bool>,
    pub indicators_b: Vec<bool>,
    pub estimate_a: CrossingEstimate,
    pub estimate_b: CrossingEstimate,
    pub agreement: u64,
}

impl CoupledEstimate {
    pub fn all_agree(&self) -> bool {
        self.agreement == self.estimate_a.n
    }
}

/// Checks that two classifications are the same graph with the same labels
/// under their site indices.
pub fn check_coupling(a: &SiteClassification, b: &SiteClassification) -> Result<(), EngineError> {
    let mismatch = |reason: &str, site| EngineError::CouplingMismatch {
        reason: reason.to_owned(),
        site,
    };
    if let Some((sa, sb)) = a.sites().iter().zip(b.sites()).find(|(x, y)| x != y) {
        let first = if (sa.j, sa.i) < (sb.j, sb.i) { *sa } else { *sb };
        return Err(mismatch("in-domain site sets differ", Some(first)));
    }
    if a.len() != b.len() {
        let longer = if a.len() > b.len() { a } else { b };
        let extra = longer.sites()[a.len().min(b.len())];
        return Err(mismatch("in-domain site sets differ", Some(extra)));
    }
    for (v, &s) in a.sites().iter().enumerate() {
        let v = v as u32;
        if a.label(v) != b.label(v) {
            return Err(mismatch("boundary labels differ", Some(s)));
        }
        if a.sorted_neighbors(v) != b.sorted_neighbors(v) {
            return Err(mismatch("adjacency differs", Some(s)));
        }
    }
    Ok(())
}

/// Runs both classifications on the same per-site uniforms (keyed by site
/// index) and records the per-sample indicators of each.
pub fn coupled_estimate(
    a: &SiteClassification,
    b: &SiteClassification,
    plan: &SamplingPlan,
) -> Result<CoupledEstimate, EngineError> {
    check_coupling(a, b)?;
    let ka = CrossingKernel::new(a);
    let kb = CrossingKernel::new(b);
    let pairs: Vec<(bool, bool)> = (0..plan.n_samples)
        .into_par_iter()
        .map_init(
            || (ka.scratch(), kb.scratch()),
            |(sa, sb), idx| {
                (
                    ka.crosses(sa, plan.p, plan.seed, idx),
                    kb.crosses(sb, plan.p, plan.seed, idx),
                )
            },
        )
        .collect();
    let (indicators_a, indicators_b): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
    let count = |v: &[bool]| v.iter().filter(|&&x| x).count() as u64;
    let agreement = indicators_a
        .iter()
        .zip(&indicators_b)
        .filter(|(x, y)| x == y)
        .count() as u64;
    Ok(CoupledEstimate {
        estimate_a: CrossingEstimate::from_counts(a, *plan, count(&indicators_a)),
        estimate_b: CrossingEstimate::from_counts(b, *plan, count(&indicators_b)),
        indicators_a,
        indicators_b,
        agreement,
    })
}
