//! Quantifies the mode hopper, whose commanded frequency selects a discrete
//! contraction mode: low and high bands contract, the intermediate band
//! escalates to an expanding mode and is unsafe everywhere.

use safequant::quantify::QuantifyConfig;
use safequant::systems::{mode_hopper, ModeHopperParams};
use safequant::{quantify, ContDim, DeltaVector, DiscDim, OssSpec};

fn main() {
    let spec = OssSpec::new(
        vec![ContDim::new("x", 0.1, 0.9), ContDim::new("f", 0.0, 6.0)],
        vec![DiscDim::new("q", vec![1, 2, 3])],
        DeltaVector(vec![0.05, 0.5]),
        30,
    )
    .unwrap();
    let sys = mode_hopper(ModeHopperParams {
        contraction: vec![(1, 0.8), (2, 0.85), (3, 1.6)],
        low_band_max: 2.0,
        high_band_min: 4.0,
        low_mode: 1,
        high_mode: 2,
        mid_escalation: vec![(1, 2), (2, 3), (3, 3)],
        failure_threshold: 1.0,
    })
    .unwrap();

    // tight epsilon so even the last undrawn unsafe cell is almost surely
    // sampled before the closing streak completes
    let cfg = QuantifyConfig {
        epsilon: 0.005,
        beta: 0.001,
        seed: 11,
        max_runs: 10_000,
        init_distribution: Default::default(),
    };
    let report = quantify(&sys, &spec, &cfg).unwrap();
    println!(
        "verdict {:?}: {} of {} cells kept after {} runs",
        report.verdict,
        report.final_set.len(),
        spec.cells_along(0) * spec.cells_along(1) * 3,
        report.counters.total_runs
    );

    // frequency bands per mode: '#' where every x cell in the column survived
    let keys = report.final_set.cell_keys();
    for q in 1..=3i64 {
        let line: String = (0..spec.cells_along(1) as i64)
            .map(|f| {
                let full = (0..spec.cells_along(0) as i64)
                    .all(|x| keys.iter().any(|k| k.cont == vec![x, f] && k.disc == vec![q]));
                if full { '#' } else { '.' }
            })
            .collect();
        println!("mode {q}: f 0..6 |{line}|");
    }
}
