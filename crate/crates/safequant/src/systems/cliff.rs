//! Single integrator rolling toward a position cliff.
//!
//! State (position, velocity); each step perturbs the velocity by a bounded
//! uniform disturbance, clamps it, and integrates position. Failure once the
//! position passes the cliff. With zero disturbance the safe set is exactly
//! the start states whose ballistic horizon-length run stays at or below the
//! cliff.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::StatePoint;
use crate::scenario::SystemModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliffIntegratorParams {
    pub dt: f64,
    /// Half-width of the uniform velocity disturbance applied each step.
    pub noise_bound: f64,
    /// Positions beyond this value are failures.
    pub cliff: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl CliffIntegratorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::Config("cliff_integrator: dt must be positive".into()));
        }
        if !(self.noise_bound >= 0.0) {
            return Err(Error::Config(
                "cliff_integrator: noise_bound must be nonnegative".into(),
            ));
        }
        if !(self.v_min <= self.v_max) {
            return Err(Error::Config(
                "cliff_integrator: velocity bounds out of order".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CliffIntegrator {
    params: CliffIntegratorParams,
}

pub fn cliff_integrator(params: CliffIntegratorParams) -> Result<CliffIntegrator> {
    params.validate()?;
    Ok(CliffIntegrator { params })
}

impl SystemModel for CliffIntegrator {
    fn initialize(&self, s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        Some(vec![s0.cont[0], s0.cont[1]])
    }

    fn step(&self, raw: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
        let p = &self.params;
        let mut v = raw[1];
        // skip the draw entirely at zero noise so the trajectory does not
        // depend on the rng stream at all
        if p.noise_bound > 0.0 {
            v += rng.gen_range(-p.noise_bound..=p.noise_bound);
        }
        v = v.clamp(p.v_min, p.v_max);
        vec![raw[0] + v * p.dt, v]
    }

    fn observe(&self, raw: &[f64]) -> StatePoint {
        StatePoint::continuous(vec![raw[0], raw[1]])
    }

    fn is_failure(&self, state: &StatePoint) -> bool {
        state.cont[0] > self.params.cliff
    }
}
