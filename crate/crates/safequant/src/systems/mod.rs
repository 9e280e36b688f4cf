//! Synthetic benchmark systems with controllable ground truth.
//!
//! Each system exercises one safety phenomenon at desk scale: the cliff
//! integrator has a closed-form deterministic safe set, the drift walker has
//! a velocity-dependent lateral bias producing asymmetric safe sets, and the
//! mode hopper switches discrete modes on a commanded frequency with an
//! unsafe intermediate band.

mod cliff;
mod drift;
mod hopper;

pub use cliff::{cliff_integrator, CliffIntegrator, CliffIntegratorParams};
pub use drift::{drift_walker, DriftWalker, DriftWalkerParams};
pub use hopper::{mode_hopper, ModeHopper, ModeHopperParams};
