//! Walker with velocity-dependent lateral drift under scheduled pushes.
//!
//! State (forward velocity v, lateral offset y, sagittal force fx,
//! transverse force fy). Forces and velocity are held per run; on push steps
//! the transverse force adds to the intrinsic drift g(v). Whenever the
//! combined drift overwhelms the recovery capacity (itself eroded by the
//! sagittal load), the lateral offset lurches by a fixed amount; failure once
//! it passes the limit. The sign of g flips across a velocity threshold, so
//! the tolerated transverse-force window is asymmetric and its skew reverses
//! with speed.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::StatePoint;
use crate::scenario::SystemModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftWalkerParams {
    /// Piecewise-linear lateral drift per step versus forward velocity,
    /// as (velocity, drift) breakpoints with strictly increasing velocity.
    pub drift_gain: Vec<(f64, f64)>,
    /// Lateral offsets beyond this magnitude are failures.
    pub lateral_limit: f64,
    /// Scale applied to the transverse force on push steps.
    pub push_amplitude: f64,
    /// A push lands every this many steps, starting at the first.
    pub push_period: usize,
    /// Base lateral recovery capacity per step.
    pub recovery: f64,
    /// Capacity lost per unit of sagittal force magnitude.
    pub sagittal_cost: f64,
    /// Lateral offset gained in one step once capacity is overwhelmed.
    pub fall_rate: f64,
}

impl DriftWalkerParams {
    pub fn validate(&self) -> Result<()> {
        if self.drift_gain.is_empty() {
            return Err(Error::Config("drift_walker: drift_gain needs breakpoints".into()));
        }
        if !self.drift_gain.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::Config(
                "drift_walker: drift_gain breakpoints must strictly increase in velocity".into(),
            ));
        }
        if !(self.lateral_limit > 0.0) {
            return Err(Error::Config("drift_walker: lateral_limit must be positive".into()));
        }
        if self.push_period == 0 {
            return Err(Error::Config("drift_walker: push_period must be at least 1".into()));
        }
        if !(self.fall_rate > 0.0) {
            return Err(Error::Config("drift_walker: fall_rate must be positive".into()));
        }
        if !(self.recovery >= 0.0) || !(self.sagittal_cost >= 0.0) {
            return Err(Error::Config(
                "drift_walker: recovery and sagittal_cost must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// The same walker with the drift bias negated.
    pub fn mirrored(&self) -> Self {
        let mut m = self.clone();
        for bp in &mut m.drift_gain {
            bp.1 = -bp.1;
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct DriftWalker {
    params: DriftWalkerParams,
}

pub fn drift_walker(params: DriftWalkerParams) -> Result<DriftWalker> {
    params.validate()?;
    Ok(DriftWalker { params })
}

impl DriftWalker {
    /// Interpolated drift per step at forward velocity `v`, clamped to the
    /// end breakpoints outside their range.
    pub fn gain(&self, v: f64) -> f64 {
        let bps = &self.params.drift_gain;
        if v <= bps[0].0 {
            return bps[0].1;
        }
        if v >= bps[bps.len() - 1].0 {
            return bps[bps.len() - 1].1;
        }
        let i = bps.partition_point(|bp| bp.0 <= v);
        let (v0, g0) = bps[i - 1];
        let (v1, g1) = bps[i];
        g0 + (g1 - g0) * (v - v0) / (v1 - v0)
    }
}

// raw layout: [v, y, fx, fy, step index]
impl SystemModel for DriftWalker {
    fn initialize(&self, s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        Some(vec![s0.cont[0], s0.cont[1], s0.cont[2], s0.cont[3], 0.0])
    }

    fn step(&self, raw: &[f64], _rng: &mut dyn RngCore) -> Vec<f64> {
        let p = &self.params;
        let (v, y, fx, fy, t) = (raw[0], raw[1], raw[2], raw[3], raw[4]);
        let push = (t as usize) % p.push_period == 0;
        let mut rho = self.gain(v);
        if push {
            rho += p.push_amplitude * fy;
        }
        let capacity = (p.recovery - p.sagittal_cost * fx.abs()).max(0.0);
        let y1 = if rho.abs() > capacity {
            y + rho.signum() * p.fall_rate
        } else {
            y
        };
        vec![v, y1, fx, fy, t + 1.0]
    }

    fn observe(&self, raw: &[f64]) -> StatePoint {
        StatePoint::continuous(vec![raw[0], raw[1], raw[2], raw[3]])
    }

    fn is_failure(&self, state: &StatePoint) -> bool {
        state.cont[1].abs() > self.params.lateral_limit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oss::{ContDim, DeltaVector, OssSpec};
    use crate::scenario::{run_scenario, Outcome};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn base_params() -> DriftWalkerParams {
        DriftWalkerParams {
            drift_gain: vec![(0.2, 0.6), (0.4, -0.6)],
            lateral_limit: 0.05,
            push_amplitude: 0.12,
            push_period: 2,
            recovery: 1.5,
            sagittal_cost: 0.02,
            fall_rate: 0.125,
        }
    }

    fn spec() -> OssSpec {
        OssSpec::new(
            vec![
                ContDim::new("v", 0.1, 0.5),
                ContDim::new("y", -0.05, 0.05),
                ContDim::new("fx", 0.0, 40.0),
                ContDim::new("fy", -25.0, 25.0),
            ],
            vec![],
            DeltaVector(vec![0.1, 0.025, 10.0, 3.125]),
            20,
        )
        .unwrap()
    }

    fn outcome(params: &DriftWalkerParams, state: [f64; 4]) -> Outcome {
        let sys = drift_walker(params.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        run_scenario(&sys, &spec(), &StatePoint::continuous(state.to_vec()), &mut rng)
            .unwrap()
            .outcome
    }

    #[test]
    fn no_gain_no_push_is_safe_everywhere() {
        let mut p = base_params();
        p.drift_gain = vec![(0.0, 0.0)];
        for v in [0.1, 0.3, 0.5] {
            for fx in [0.0, 20.0, 40.0] {
                assert_eq!(outcome(&p, [v, 0.0, fx, 0.0]), Outcome::Safe);
            }
        }
    }

    #[test]
    fn gain_interpolates_between_breakpoints() {
        let sys = drift_walker(base_params()).unwrap();
        assert!((sys.gain(0.2) - 0.6).abs() < 1e-12);
        assert!((sys.gain(0.4) + 0.6).abs() < 1e-12);
        assert!(sys.gain(0.3).abs() < 1e-12);
        // clamped outside the breakpoint range
        assert!((sys.gain(0.05) - 0.6).abs() < 1e-12);
        assert!((sys.gain(0.5) + 0.6).abs() < 1e-12);
    }

    #[test]
    fn opposing_push_is_tolerated_aiding_push_is_not() {
        // at v = 0.2 the walker drifts positive (g = 0.6); a transverse force
        // of the same sign tips it over while the opposite sign of equal
        // magnitude is absorbed
        let p = base_params();
        let fy = 9.375;
        assert_eq!(outcome(&p, [0.2, 0.0, 10.0, fy]), Outcome::Failure(1));
        assert_eq!(outcome(&p, [0.2, 0.0, 10.0, -fy]), Outcome::Safe);
        // at v = 0.4 the drift reverses, and so does the asymmetry
        assert_eq!(outcome(&p, [0.4, 0.0, 10.0, -fy]), Outcome::Failure(1));
        assert_eq!(outcome(&p, [0.4, 0.0, 10.0, fy]), Outcome::Safe);
    }

    #[test]
    fn sagittal_load_erodes_recovery() {
        let p = base_params();
        // fy = 3.125 with g = 0.6 gives |rho| = 0.975: absorbed at fx = 10
        // (capacity 1.3) but not at fx = 30 (capacity 0.9)
        assert_eq!(outcome(&p, [0.2, 0.0, 10.0, 3.125]), Outcome::Safe);
        assert_eq!(outcome(&p, [0.2, 0.0, 30.0, 3.125]), Outcome::Failure(1));
    }

    #[test]
    fn mirrored_params_mirror_every_outcome() {
        let p = base_params();
        let m = p.mirrored();
        for v in [0.1, 0.2, 0.3, 0.4, 0.5] {
            for fy in [-21.875, -9.375, -3.125, 3.125, 9.375, 21.875] {
                for fx in [10.0, 30.0] {
                    for y in [-0.025, 0.025] {
                        assert_eq!(
                            outcome(&p, [v, y, fx, fy]),
                            outcome(&m, [v, -y, fx, -fy]),
                            "mirror broke at v={v}, y={y}, fx={fx}, fy={fy}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trajectories_are_seed_independent() {
        let sys = drift_walker(base_params()).unwrap();
        let s = spec();
        let start = StatePoint::continuous(vec![0.2, 0.0, 10.0, 15.625]);
        let mut rng_a = ChaCha8Rng::seed_from_u64(1);
        let mut rng_b = ChaCha8Rng::seed_from_u64(999);
        let a = run_scenario(&sys, &s, &start, &mut rng_a).unwrap();
        let b = run_scenario(&sys, &s, &start, &mut rng_b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_params_are_rejected() {
        let mut p = base_params();
        p.drift_gain = vec![];
        assert!(drift_walker(p).is_err());
        let mut p = base_params();
        p.drift_gain = vec![(0.4, 0.1), (0.2, 0.2)];
        assert!(drift_walker(p).is_err());
        let mut p = base_params();
        p.push_period = 0;
        assert!(drift_walker(p).is_err());
        let mut p = base_params();
        p.lateral_limit = 0.0;
        assert!(drift_walker(p).is_err());
    }
}
