//! Hybrid scalar system hopping between discrete modes.
//!
//! State (scalar x, commanded frequency f, mode q). Each step the frequency
//! band picks the next mode: low and high bands jump to fixed contracting
//! modes, while the intermediate band escalates mode to mode until it reaches
//! an expanding one. x is multiplied by the entered mode's factor; failure
//! once |x| passes the threshold. Low and high commands are safe, the band in
//! between blows up.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::StatePoint;
use crate::scenario::SystemModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeHopperParams {
    /// Per-mode multiplicative factor applied to x on entering the mode.
    pub contraction: Vec<(i64, f64)>,
    /// Frequencies below this bound form the low band.
    pub low_band_max: f64,
    /// Frequencies above this bound form the high band.
    pub high_band_min: f64,
    /// Mode entered from the low band.
    pub low_mode: i64,
    /// Mode entered from the high band.
    pub high_mode: i64,
    /// Mode-to-mode escalation applied inside the intermediate band.
    pub mid_escalation: Vec<(i64, i64)>,
    /// Values of |x| beyond this are failures.
    pub failure_threshold: f64,
}

impl ModeHopperParams {
    pub fn modes(&self) -> Vec<i64> {
        self.contraction.iter().map(|&(m, _)| m).collect()
    }

    fn declared(&self, mode: i64) -> bool {
        self.contraction.iter().any(|&(m, _)| m == mode)
    }

    pub fn validate(&self) -> Result<()> {
        if self.contraction.is_empty() {
            return Err(Error::Config("mode_hopper: contraction table is empty".into()));
        }
        let mut modes = self.modes();
        modes.sort_unstable();
        modes.dedup();
        if modes.len() != self.contraction.len() {
            return Err(Error::Config("mode_hopper: duplicate mode in contraction table".into()));
        }
        if !(self.low_band_max <= self.high_band_min) {
            return Err(Error::Config("mode_hopper: frequency bands out of order".into()));
        }
        if !(self.failure_threshold > 0.0) {
            return Err(Error::Config(
                "mode_hopper: failure_threshold must be positive".into(),
            ));
        }
        for mode in [self.low_mode, self.high_mode] {
            if !self.declared(mode) {
                return Err(Error::Config(format!(
                    "mode_hopper: band target mode {mode} is not declared"
                )));
            }
        }
        let mut from_seen = Vec::new();
        for &(from, to) in &self.mid_escalation {
            if !self.declared(from) || !self.declared(to) {
                return Err(Error::Config(format!(
                    "mode_hopper: escalation {from} -> {to} uses an undeclared mode"
                )));
            }
            if from_seen.contains(&from) {
                return Err(Error::Config(format!(
                    "mode_hopper: duplicate escalation source {from}"
                )));
            }
            from_seen.push(from);
        }
        for &mode in &modes {
            if !self.mid_escalation.iter().any(|&(f, _)| f == mode) {
                return Err(Error::Config(format!(
                    "mode_hopper: mode {mode} has no escalation target"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ModeHopper {
    params: ModeHopperParams,
}

pub fn mode_hopper(params: ModeHopperParams) -> Result<ModeHopper> {
    params.validate()?;
    Ok(ModeHopper { params })
}

impl ModeHopper {
    fn factor(&self, mode: i64) -> f64 {
        self.params
            .contraction
            .iter()
            .find(|&&(m, _)| m == mode)
            .map(|&(_, f)| f)
            .expect("mode declared")
    }

    fn next_mode(&self, f: f64, q: i64) -> i64 {
        let p = &self.params;
        if f < p.low_band_max {
            p.low_mode
        } else if f > p.high_band_min {
            p.high_mode
        } else {
            p.mid_escalation
                .iter()
                .find(|&&(from, _)| from == q)
                .map(|&(_, to)| to)
                .expect("escalation covers all modes")
        }
    }
}

// raw layout: [x, f, q]
impl SystemModel for ModeHopper {
    fn initialize(&self, s0: &StatePoint, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        // an undeclared start mode cannot be simulated
        if !self.params.declared(s0.disc[0]) {
            return None;
        }
        Some(vec![s0.cont[0], s0.cont[1], s0.disc[0] as f64])
    }

    fn step(&self, raw: &[f64], _rng: &mut dyn RngCore) -> Vec<f64> {
        let (x, f, q) = (raw[0], raw[1], raw[2] as i64);
        let q1 = self.next_mode(f, q);
        vec![x * self.factor(q1), f, q1 as f64]
    }

    fn observe(&self, raw: &[f64]) -> StatePoint {
        StatePoint::new(vec![raw[0], raw[1]], vec![raw[2] as i64])
    }

    fn is_failure(&self, state: &StatePoint) -> bool {
        state.cont[0].abs() > self.params.failure_threshold
    }
}
