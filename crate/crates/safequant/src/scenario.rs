//! Scenario execution against a black-box system model.
//!
//! A scenario starts at a chosen state and advances the system for the spec's
//! horizon. The recorded trajectory follows two conventions: once the raw
//! state leaves the admissible region the recording holds the last admissible
//! state (the raw state keeps evolving underneath), and once a failure state
//! appears it absorbs the rest of the recording. Failure wins over holding.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::{OssSpec, StatePoint};

/// A black-box discrete-time system. The raw state is opaque to the engine;
/// only the observed [`StatePoint`] projection is inspected.
pub trait SystemModel {
    /// Prepares a raw state for a run starting at `s0`. `None` means the
    /// system refuses this start, which the caller records as [`Outcome::InitFailed`].
    fn initialize(&self, s0: &StatePoint, rng: &mut dyn RngCore) -> Option<Vec<f64>>;

    /// One time step of the raw dynamics.
    fn step(&self, raw: &[f64], rng: &mut dyn RngCore) -> Vec<f64>;

    /// Projects a raw state onto the spec's coordinates.
    fn observe(&self, raw: &[f64]) -> StatePoint;

    /// Whether an observed state counts as a failure.
    fn is_failure(&self, state: &StatePoint) -> bool;
}

/// How one run ended. `Failure(t)` names the first step whose observation was
/// a failure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Safe,
    Failure(usize),
    InitFailed,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Safe => "safe",
            Outcome::Failure(_) => "failure",
            Outcome::InitFailed => "init_failed",
        }
    }

    pub fn steps_to_failure(&self) -> Option<usize> {
        match self {
            Outcome::Failure(t) => Some(*t),
            _ => None,
        }
    }
}

/// Per-step annotation of the recorded trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepFlag {
    /// Observation admissible and recorded as-is.
    Ok,
    /// Raw state left the admissible region; the recording holds.
    Held,
    /// Failure state, recorded and absorbing.
    Fail,
}

impl StepFlag {
    pub fn label(&self) -> &'static str {
        match self {
            StepFlag::Ok => "ok",
            StepFlag::Held => "held",
            StepFlag::Fail => "fail",
        }
    }
}

/// One executed scenario. Unless the start was refused, `recorded` and
/// `flags` both have horizon + 1 entries, index 0 being the start state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub initial: StatePoint,
    pub recorded: Vec<StatePoint>,
    pub flags: Vec<StepFlag>,
    pub outcome: Outcome,
    pub held_steps: usize,
}

/// Runs one scenario of `spec.horizon` steps from `s0`, which must be inside
/// the admissible region.
pub fn run_scenario<S: SystemModel + ?Sized>(
    sys: &S,
    spec: &OssSpec,
    s0: &StatePoint,
    rng: &mut dyn RngCore,
) -> Result<ScenarioRun> {
    spec.check_point(s0)?;
    if !spec.in_space(s0) {
        return Err(Error::OutOfSpace(format!("start state {:?}", s0)));
    }

    let horizon = spec.horizon;
    let mut raw = match sys.initialize(s0, rng) {
        Some(raw) => raw,
        None => {
            return Ok(ScenarioRun {
                initial: s0.clone(),
                recorded: vec![s0.clone()],
                flags: vec![StepFlag::Ok],
                outcome: Outcome::InitFailed,
                held_steps: 0,
            });
        }
    };

    let mut recorded = Vec::with_capacity(horizon + 1);
    let mut flags = Vec::with_capacity(horizon + 1);
    let mut held_steps = 0usize;

    if sys.is_failure(s0) {
        return Ok(absorbed(s0.clone(), vec![], vec![], 0, s0.clone(), horizon, 0));
    }
    recorded.push(s0.clone());
    flags.push(StepFlag::Ok);

    for t in 1..=horizon {
        raw = sys.step(&raw, rng);
        let obs = sys.observe(&raw);
        if sys.is_failure(&obs) {
            return Ok(absorbed(s0.clone(), recorded, flags, t, obs, horizon, held_steps));
        }
        if spec.in_space(&obs) {
            recorded.push(obs);
            flags.push(StepFlag::Ok);
        } else {
            let held = recorded.last().expect("start state recorded").clone();
            recorded.push(held);
            flags.push(StepFlag::Held);
            held_steps += 1;
        }
    }

    Ok(ScenarioRun {
        initial: s0.clone(),
        recorded,
        flags,
        outcome: Outcome::Safe,
        held_steps,
    })
}

// Fills the remainder of a run with the failure state.
fn absorbed(
    initial: StatePoint,
    mut recorded: Vec<StatePoint>,
    mut flags: Vec<StepFlag>,
    t: usize,
    failure: StatePoint,
    horizon: usize,
    held_steps: usize,
) -> ScenarioRun {
    while recorded.len() <= horizon {
        recorded.push(failure.clone());
        flags.push(StepFlag::Fail);
    }
    ScenarioRun {
        initial,
        recorded,
        flags,
        outcome: Outcome::Failure(t),
        held_steps,
    }
}

/// Re-executes a run from its start under a fresh stream seeded with `seed`
/// and reports whether the recording matches exactly. Deterministic systems
/// match under any seed; stochastic ones only under the original stream.
pub fn replay_check<S: SystemModel + ?Sized>(
    run: &ScenarioRun,
    sys: &S,
    spec: &OssSpec,
    seed: u64,
) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let again = run_scenario(sys, spec, &run.initial, &mut rng)?;
    Ok(again.recorded == run.recorded
        && again.outcome == run.outcome
        && again.held_steps == run.held_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oss::{ContDim, DeltaVector};

    /// Replays a scripted list of observations; raw state is the step index.
    pub struct Scripted {
        pub states: Vec<StatePoint>,
        pub fail_at: Option<usize>,
    }

    const FAIL_MARK: f64 = 99.0;

    impl SystemModel for Scripted {
        fn initialize(&self, _s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
            Some(vec![0.0])
        }
        fn step(&self, raw: &[f64], _rng: &mut dyn RngCore) -> Vec<f64> {
            vec![raw[0] + 1.0]
        }
        fn observe(&self, raw: &[f64]) -> StatePoint {
            let i = raw[0] as usize;
            if Some(i) == self.fail_at {
                return StatePoint::continuous(vec![FAIL_MARK]);
            }
            self.states[i.min(self.states.len() - 1)].clone()
        }
        fn is_failure(&self, state: &StatePoint) -> bool {
            state.cont[0] >= FAIL_MARK
        }
    }

    fn unit_spec(horizon: usize) -> OssSpec {
        OssSpec::new(
            vec![ContDim::new("x", 0.0, 1.0)],
            vec![],
            DeltaVector(vec![0.25]),
            horizon,
        )
        .unwrap()
    }

    fn pt(x: f64) -> StatePoint {
        StatePoint::continuous(vec![x])
    }

    #[test]
    fn exit_holds_last_recorded_state() {
        // observations 0.5, 1.2 (outside), 0.9: the middle step holds 0.5
        let sys = Scripted {
            states: vec![pt(0.5), pt(1.2), pt(0.9)],
            fail_at: None,
        };
        let spec = unit_spec(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = run_scenario(&sys, &spec, &pt(0.5), &mut rng).unwrap();
        assert_eq!(run.outcome, Outcome::Safe);
        assert_eq!(run.recorded, vec![pt(0.5), pt(0.5), pt(0.9)]);
        assert_eq!(run.flags, vec![StepFlag::Ok, StepFlag::Held, StepFlag::Ok]);
        assert_eq!(run.held_steps, 1);
    }

    #[test]
    fn failure_absorbs_remainder() {
        let sys = Scripted {
            states: vec![pt(0.5), pt(0.6), pt(0.7), pt(0.8)],
            fail_at: Some(1),
        };
        let spec = unit_spec(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = run_scenario(&sys, &spec, &pt(0.5), &mut rng).unwrap();
        assert_eq!(run.outcome, Outcome::Failure(1));
        assert_eq!(run.recorded.len(), 4);
        let c = pt(FAIL_MARK);
        assert_eq!(run.recorded, vec![pt(0.5), c.clone(), c.clone(), c]);
        assert_eq!(
            run.flags,
            vec![StepFlag::Ok, StepFlag::Fail, StepFlag::Fail, StepFlag::Fail]
        );
    }

    #[test]
    fn fixed_point_run_is_safe_with_full_recording() {
        let sys = Scripted {
            states: vec![pt(0.5); 6],
            fail_at: None,
        };
        let spec = unit_spec(5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = run_scenario(&sys, &spec, &pt(0.5), &mut rng).unwrap();
        assert_eq!(run.outcome, Outcome::Safe);
        assert_eq!(run.recorded, vec![pt(0.5); 6]);
        assert_eq!(run.held_steps, 0);
    }

    #[test]
    fn refused_start_reports_init_failed() {
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
        let spec = unit_spec(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = run_scenario(&Refuser, &spec, &pt(0.5), &mut rng).unwrap();
        assert_eq!(run.outcome, Outcome::InitFailed);
        assert_eq!(run.recorded.len(), 1);
    }

    #[test]
    fn start_outside_space_errs() {
        let sys = Scripted { states: vec![pt(0.5)], fail_at: None };
        let spec = unit_spec(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            run_scenario(&sys, &spec, &pt(1.5), &mut rng),
            Err(Error::OutOfSpace(_))
        ));
    }

    #[test]
    fn recording_is_always_admissible_or_failed() {
        // property over scripted trajectories wandering in and out of range
        let spec = unit_spec(8);
        for seed in 0..50u64 {
            let mut vals = Vec::new();
            let mut v = 0.5;
            let mut s = seed.wrapping_mul(2654435761).wrapping_add(1);
            for _ in 0..9 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v += ((s >> 33) as f64 / (1u64 << 31) as f64 - 0.5) * 0.8;
                vals.push(pt(v));
            }
            let fail_at = if seed % 3 == 0 { Some(5) } else { None };
            let sys = Scripted { states: vals, fail_at };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let run = run_scenario(&sys, &spec, &pt(0.5), &mut rng).unwrap();
            assert_eq!(run.recorded.len(), 9);
            for (p, f) in run.recorded.iter().zip(&run.flags) {
                match f {
                    StepFlag::Fail => assert!(sys.is_failure(p)),
                    _ => assert!(spec.in_space(p), "recorded inadmissible state {:?}", p),
                }
            }
            // failure, once seen, persists to the end
            if let Some(first) = run.flags.iter().position(|f| *f == StepFlag::Fail) {
                assert!(run.flags[first..].iter().all(|f| *f == StepFlag::Fail));
                assert_eq!(run.outcome, Outcome::Failure(first));
            }
        }
    }

    #[test]
    fn deterministic_replay_matches_under_any_seed() {
        let sys = Scripted {
            states: vec![pt(0.5), pt(0.6), pt(0.7), pt(0.8)],
            fail_at: None,
        };
        let spec = unit_spec(3);
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let run = run_scenario(&sys, &spec, &pt(0.5), &mut rng).unwrap();
        for seed in [0u64, 1, 42, u64::MAX] {
            assert!(replay_check(&run, &sys, &spec, seed).unwrap());
        }
    }
}
