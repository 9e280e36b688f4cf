//! Quantifies the safe set of the cliff integrator and draws it as ASCII.
//!
//! The system is a point mass moving right at its sampled velocity; crossing
//! x = 1 is a failure. With zero noise every positive-velocity cell is doomed
//! and every non-positive one is invariant, so the certified picture should
//! split cleanly at v = 0.

use safequant::quantify::QuantifyConfig;
use safequant::systems::{cliff_integrator, CliffIntegratorParams};
use safequant::{quantify, ContDim, DeltaVector, OssSpec};

fn main() {
    let spec = OssSpec::new(
        vec![ContDim::new("x", 0.0, 1.0), ContDim::new("v", -2.0, 2.0)],
        vec![],
        DeltaVector(vec![0.025, 0.25]),
        50,
    )
    .unwrap();
    let sys = cliff_integrator(CliffIntegratorParams {
        dt: 0.1,
        noise_bound: 0.0,
        cliff: 1.0,
        v_min: -2.0,
        v_max: 2.0,
    })
    .unwrap();
    let cfg = QuantifyConfig {
        epsilon: 0.02,
        beta: 0.001,
        seed: 7,
        max_runs: 20_000,
        init_distribution: Default::default(),
    };

    let report = quantify(&sys, &spec, &cfg).unwrap();
    let c = &report.counters;
    println!(
        "verdict {:?}: {} runs ({} failures), {} centroids pruned, {} kept",
        report.verdict,
        c.total_runs,
        c.failure_runs,
        c.pruned_centroids,
        report.final_set.len()
    );

    // one row per velocity cell, high velocity on top, '#' where certified
    let keys = report.final_set.cell_keys();
    let cols = spec.cells_along(0);
    let rows = spec.cells_along(1);
    for r in (0..rows).rev() {
        let line: String = (0..cols)
            .map(|cx| {
                let hit = keys
                    .iter()
                    .any(|k| k.cont[0] == cx as i64 && k.cont[1] == r as i64);
                if hit { '#' } else { '.' }
            })
            .collect();
        println!("v={:6.2} |{line}|", spec.cell_center(1, r as i64));
    }
}
