//! Renders a quantified safe set as an SVG heatmap, one square of side
//! 2*delta per surviving centroid.
//!
//! The picture is the lower half-plane. Non-positive velocity rows are
//! invariant and survive whole. Positive rows vanish entirely, even the
//! slow ones whose own runs stay short of the cliff: their trajectories
//! chain into cells that do fail, and the ancestor pruning removes
//! everything that feeds a failing cell so the final set is closed under
//! the observed dynamics.

use safequant::plot::render_heatmap;
use safequant::quantify::QuantifyConfig;
use safequant::systems::{cliff_integrator, CliffIntegratorParams};
use safequant::{quantify, ContDim, DeltaVector, OssSpec};

fn main() {
    let spec = OssSpec::new(
        vec![ContDim::new("x", 0.0, 1.0), ContDim::new("v", -1.0, 1.0)],
        vec![],
        DeltaVector(vec![0.025, 0.125]),
        20,
    )
    .unwrap();
    let sys = cliff_integrator(CliffIntegratorParams {
        dt: 0.1,
        noise_bound: 0.0,
        cliff: 1.0,
        v_min: -1.0,
        v_max: 1.0,
    })
    .unwrap();
    let cfg = QuantifyConfig {
        epsilon: 0.05,
        beta: 0.001,
        seed: 2,
        max_runs: 20_000,
        init_distribution: Default::default(),
    };

    let report = quantify(&sys, &spec, &cfg).unwrap();
    let svg = render_heatmap(&report.final_set, "x", "v", &[]).unwrap();

    let path = std::env::temp_dir().join("safe_set.svg");
    std::fs::write(&path, &svg).unwrap();
    println!(
        "{:?}: {} centroids rendered to {}",
        report.verdict,
        report.final_set.len(),
        path.display()
    );
}
