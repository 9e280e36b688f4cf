//! Brute-force Monte Carlo ground truth and set comparison.
//!
//! Estimates each grid centroid's failure probability by repeated scenario
//! runs and thresholds the estimates into a reference safe set. Every
//! (centroid, trial) pair derives its own rng stream from the base seed, so
//! estimates do not depend on sweep order.

use std::collections::BTreeSet;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::{iou, CellKey, CentroidId, CoveringSet, OssSpec, StatePoint};
use crate::scenario::{run_scenario, Outcome, SystemModel};

/// Default trial count for stochastic sweeps: standard error at worst 0.035.
pub const DEFAULT_ORACLE_TRIALS: usize = 200;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seed for one (centroid, trial) pair.
pub fn derive_stream_seed(base: u64, centroid: u64, trial: u64) -> u64 {
    let mut z = splitmix64(base);
    z = splitmix64(z ^ centroid);
    splitmix64(z ^ trial)
}

/// Per-trial failure flags for `trials` independent runs from `start`.
/// Extending `trials` appends outcomes without changing earlier ones.
pub fn failure_trials<S: SystemModel + ?Sized>(
    sys: &S,
    spec: &OssSpec,
    start: &StatePoint,
    trials: usize,
    base_seed: u64,
    centroid_tag: u64,
) -> Result<Vec<bool>> {
    if trials == 0 {
        return Err(Error::Domain("at least one oracle trial is required".into()));
    }
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_stream_seed(base_seed, centroid_tag, trial as u64));
        let run = run_scenario(sys, spec, start, &mut rng)?;
        // a refused start cannot demonstrate safety either
        out.push(!matches!(run.outcome, Outcome::Safe));
    }
    Ok(out)
}

/// Failure fraction over `trials` runs from `start`, exact as failures/M.
pub fn estimate_failure_prob<S: SystemModel + ?Sized>(
    sys: &S,
    spec: &OssSpec,
    start: &StatePoint,
    trials: usize,
    base_seed: u64,
    centroid_tag: u64,
) -> Result<f64> {
    let fails = failure_trials(sys, spec, start, trials, base_seed, centroid_tag)?
        .iter()
        .filter(|&&f| f)
        .count();
    Ok(fails as f64 / trials as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub id: CentroidId,
    pub point: StatePoint,
    pub failures: usize,
    pub p_hat: f64,
}

/// Full-grid sweep output.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub epsilon: f64,
    pub trials: usize,
    /// One entry per grid centroid, in id order.
    pub entries: Vec<OracleEntry>,
    /// Centroids with p_hat at most epsilon, as a covering set.
    pub safe_set: CoveringSet,
}

/// Estimates every grid centroid and keeps those at or below the threshold.
pub fn oracle_safe_set<S: SystemModel + ?Sized>(
    sys: &S,
    spec: &OssSpec,
    epsilon: f64,
    trials: usize,
    base_seed: u64,
) -> Result<OracleResult> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Domain(format!(
            "oracle threshold must lie in [0, 1], got {epsilon}"
        )));
    }
    let grid = CoveringSet::build_initial(spec)?;
    let mut entries = Vec::with_capacity(grid.len());
    let mut safe_set = CoveringSet::empty(spec);
    for (id, point) in grid.iter() {
        let flags = failure_trials(sys, spec, point, trials, base_seed, id.0)?;
        let failures = flags.iter().filter(|&&f| f).count();
        let p_hat = failures as f64 / trials as f64;
        if p_hat <= epsilon {
            safe_set.insert_cell(spec.cell_key_of(point)?)?;
        }
        entries.push(OracleEntry { id, point: point.clone(), failures, p_hat });
    }
    Ok(OracleResult { epsilon, trials, entries, safe_set })
}

/// Agreement metrics between a quantified set and a reference set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareMetrics {
    pub iou: f64,
    /// Cells certified safe that the reference rejects.
    pub unsound_count: usize,
    /// Reference-safe cells the certified set lacks.
    pub missed_count: usize,
}

pub fn compare(
    quantified: &BTreeSet<CellKey>,
    reference: &BTreeSet<CellKey>,
) -> Result<CompareMetrics> {
    let iou = iou(&[quantified.clone(), reference.clone()])?;
    Ok(CompareMetrics {
        iou,
        unsound_count: quantified.difference(reference).count(),
        missed_count: reference.difference(quantified).count(),
    })
}
