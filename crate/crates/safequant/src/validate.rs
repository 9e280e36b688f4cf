//! Standalone validation of a candidate safe set.
//!
//! Draws the certifying number of start states uniformly over the candidate's
//! centroids and runs each scenario. The first failing run falsifies the
//! candidate; the first safe run that leaves the candidate region breaks its
//! coverage claim; surviving all draws validates it at confidence `1 - beta`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::{CoveringSet, OssSpec, StatePoint};
use crate::quantify::sample_count;
use crate::scenario::{run_scenario, Outcome, ScenarioRun, SystemModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ValidationOutcome {
    /// Failure probability at most `epsilon` holds with confidence at least
    /// `confidence` for every state of the candidate.
    Validated { epsilon: f64, confidence: f64 },
    /// A drawn run failed (or its start was refused, which equally cannot
    /// demonstrate safety).
    Falsified { witness: ScenarioRun },
    /// A safe run left the candidate region: the set is too small to contain
    /// its own trajectories.
    CoverageViolated {
        witness: ScenarioRun,
        first_escape: StatePoint,
    },
}

impl ValidationOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ValidationOutcome::Validated { .. } => "validated",
            ValidationOutcome::Falsified { .. } => "falsified",
            ValidationOutcome::CoverageViolated { .. } => "coverage_violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub outcome: ValidationOutcome,
    pub runs_used: usize,
}

/// Validates a candidate set against a system at the `(epsilon, beta)` level.
pub fn validate<S: SystemModel + ?Sized>(
    sys: &S,
    spec: &OssSpec,
    candidate: &CoveringSet,
    epsilon: f64,
    beta: f64,
    seed: u64,
) -> Result<ValidationVerdict> {
    if candidate.is_empty() {
        return Err(Error::EmptyCovering);
    }
    let needed = sample_count(epsilon, beta)? as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = candidate.ids();

    for j in 1..=needed {
        let id = ids[rng.gen_range(0..ids.len())];
        let s0 = candidate.point_of(id).expect("listed id present");
        let run = run_scenario(sys, spec, s0, &mut rng)?;
        match run.outcome {
            Outcome::Failure(_) | Outcome::InitFailed => {
                return Ok(ValidationVerdict {
                    outcome: ValidationOutcome::Falsified { witness: run },
                    runs_used: j,
                });
            }
            Outcome::Safe => {
                if let Some(escape) = run.recorded.iter().find(|s| !candidate.covers(s)) {
                    let first_escape = escape.clone();
                    return Ok(ValidationVerdict {
                        outcome: ValidationOutcome::CoverageViolated {
                            witness: run,
                            first_escape,
                        },
                        runs_used: j,
                    });
                }
            }
        }
    }
    Ok(ValidationVerdict {
        outcome: ValidationOutcome::Validated {
            epsilon,
            confidence: 1.0 - beta,
        },
        runs_used: needed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oss::{ContDim, DeltaVector};
    use rand::RngCore;

    struct FixedPoint;

    impl SystemModel for FixedPoint {
        fn initialize(&self, s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
            Some(s0.cont.clone())
        }
        fn step(&self, raw: &[f64], _rng: &mut dyn RngCore) -> Vec<f64> {
            raw.to_vec()
        }
        fn observe(&self, raw: &[f64]) -> StatePoint {
            StatePoint::continuous(raw.to_vec())
        }
        fn is_failure(&self, _: &StatePoint) -> bool {
            false
        }
    }

    /// Fails from starts beyond the threshold, stays put otherwise.
    struct FailAbove {
        threshold: f64,
    }

    impl SystemModel for FailAbove {
        fn initialize(&self, s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
            Some(s0.cont.clone())
        }
        fn step(&self, raw: &[f64], _rng: &mut dyn RngCore) -> Vec<f64> {
            if raw[0] > self.threshold {
                vec![f64::INFINITY]
            } else {
                raw.to_vec()
            }
        }
        fn observe(&self, raw: &[f64]) -> StatePoint {
            StatePoint::continuous(raw.to_vec())
        }
        fn is_failure(&self, state: &StatePoint) -> bool {
            !state.cont[0].is_finite()
        }
    }

    /// Drifts right one cell width per step, never failing.
    struct Drifter {
        step: f64,
    }

    impl SystemModel for Drifter {
        fn initialize(&self, s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
            Some(s0.cont.clone())
        }
        fn step(&self, raw: &[f64], _rng: &mut dyn RngCore) -> Vec<f64> {
            vec![raw[0] + self.step]
        }
        fn observe(&self, raw: &[f64]) -> StatePoint {
            StatePoint::continuous(raw.to_vec())
        }
        fn is_failure(&self, _: &StatePoint) -> bool {
            false
        }
    }

    fn line_spec(cells: usize, horizon: usize) -> OssSpec {
        OssSpec::new(
            vec![ContDim::new("x", 0.0, 1.0)],
            vec![],
            DeltaVector(vec![0.5 / cells as f64]),
            horizon,
        )
        .unwrap()
    }

    #[test]
    fn safe_system_validates_with_the_full_sample_budget() {
        let spec = line_spec(5, 4);
        let cs = CoveringSet::build_initial(&spec).unwrap();
        let v = validate(&FixedPoint, &spec, &cs, 0.02, 0.001, 1).unwrap();
        assert_eq!(v.runs_used, 342);
        match v.outcome {
            ValidationOutcome::Validated { epsilon, confidence } => {
                assert_eq!(epsilon, 0.02);
                assert!((confidence - 0.999).abs() < 1e-12);
            }
            other => panic!("expected Validated, got {:?}", other),
        }
    }

    #[test]
    fn failure_cell_falsifies_at_first_bad_draw() {
        let spec = line_spec(5, 4);
        let cs = CoveringSet::build_initial(&spec).unwrap();
        let sys = FailAbove { threshold: 0.8 };
        let v = validate(&sys, &spec, &cs, 0.05, 0.001, 1).unwrap();
        match &v.outcome {
            ValidationOutcome::Falsified { witness } => {
                assert!(matches!(witness.outcome, Outcome::Failure(_)));
                assert!(witness.initial.cont[0] > 0.8);
            }
            other => panic!("expected Falsified, got {:?}", other),
        }
        assert!(v.runs_used <= 135);
        // seed determinism of the verdict
        let again = validate(&sys, &spec, &cs, 0.05, 0.001, 1).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn undersized_candidate_reports_the_escaping_state() {
        let spec = line_spec(5, 4);
        // candidate only covers the first two cells; drifting right escapes
        let mut cs = CoveringSet::empty(&spec);
        cs.insert_point(&StatePoint::continuous(vec![0.1])).unwrap();
        cs.insert_point(&StatePoint::continuous(vec![0.3])).unwrap();
        let sys = Drifter { step: 0.2 };
        let v = validate(&sys, &spec, &cs, 0.05, 0.001, 1).unwrap();
        match v.outcome {
            ValidationOutcome::CoverageViolated { first_escape, .. } => {
                assert!(!cs.covers(&first_escape));
                assert!(spec.in_space(&first_escape));
            }
            other => panic!("expected CoverageViolated, got {:?}", other),
        }
        assert!(v.runs_used < 135);
    }

    #[test]
    fn refused_start_counts_as_falsified() {
        struct Refuser;
        impl SystemModel for Refuser {
            fn initialize(&self, _: &StatePoint, _: &mut dyn RngCore) -> Option<Vec<f64>> {
                None
            }
            fn step(&self, raw: &[f64], _: &mut dyn RngCore) -> Vec<f64> {
                raw.to_vec()
            }
            fn observe(&self, raw: &[f64]) -> StatePoint {
                StatePoint::continuous(raw.to_vec())
            }
            fn is_failure(&self, _: &StatePoint) -> bool {
                false
            }
        }
        let spec = line_spec(5, 4);
        let cs = CoveringSet::build_initial(&spec).unwrap();
        let v = validate(&Refuser, &spec, &cs, 0.05, 0.001, 1).unwrap();
        assert_eq!(v.runs_used, 1);
        assert!(matches!(v.outcome, ValidationOutcome::Falsified { .. }));
    }

    #[test]
    fn empty_candidate_is_rejected() {
        let spec = line_spec(5, 4);
        let cs = CoveringSet::empty(&spec);
        assert!(matches!(
            validate(&FixedPoint, &spec, &cs, 0.05, 0.001, 1),
            Err(Error::EmptyCovering)
        ));
    }

    #[test]
    fn per_state_failure_rate_at_epsilon_rarely_validates() {
        // every state fails each run with probability ~0.05; at epsilon 0.05,
        // beta 0.001 the chance of surviving all 135 draws is under 0.001, so
        // validations over 200 trials stay within a loose 10x beta bound
        struct Bernoulli;
        impl SystemModel for Bernoulli {
            fn initialize(&self, s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
                Some(s0.cont.clone())
            }
            fn step(&self, raw: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
                let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                // one failure shot per run, taken at the first step
                if raw.len() == 1 && u < 0.05 {
                    vec![f64::INFINITY, 1.0]
                } else if raw.len() == 1 {
                    vec![raw[0], 1.0]
                } else {
                    raw.to_vec()
                }
            }
            fn observe(&self, raw: &[f64]) -> StatePoint {
                StatePoint::continuous(vec![raw[0]])
            }
            fn is_failure(&self, state: &StatePoint) -> bool {
                !state.cont[0].is_finite()
            }
        }
        let spec = line_spec(4, 6);
        let cs = CoveringSet::build_initial(&spec).unwrap();
        let mut validated = 0;
        for seed in 0..200 {
            let v = validate(&Bernoulli, &spec, &cs, 0.05, 0.001, seed).unwrap();
            if matches!(v.outcome, ValidationOutcome::Validated { .. }) {
                validated += 1;
            }
        }
        assert!(
            validated as f64 / 200.0 <= 0.001 * 10.0,
            "{validated} of 200 trials validated"
        );
    }
}
