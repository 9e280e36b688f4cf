//! Estimates per-centroid failure probabilities by brute force on the
//! stochastic cliff integrator, then scores a quantified set against them.

use safequant::oracle::{compare, oracle_safe_set};
use safequant::quantify::QuantifyConfig;
use safequant::systems::{cliff_integrator, CliffIntegratorParams};
use safequant::{quantify, ContDim, DeltaVector, OssSpec};

fn main() {
    let spec = OssSpec::new(
        vec![ContDim::new("x", 0.0, 1.0), ContDim::new("v", -1.0, 1.0)],
        vec![],
        DeltaVector(vec![0.025, 0.25]),
        20,
    )
    .unwrap();
    let sys = cliff_integrator(CliffIntegratorParams {
        dt: 0.1,
        noise_bound: 0.05,
        cliff: 1.0,
        v_min: -1.0,
        v_max: 1.0,
    })
    .unwrap();

    let epsilon = 0.05;
    let oracle = oracle_safe_set(&sys, &spec, epsilon, 400, 17).unwrap();
    println!(
        "oracle: {} of {} centroids at or below epsilon {epsilon} over {} trials each",
        oracle.safe_set.len(),
        oracle.entries.len(),
        oracle.trials
    );

    // the v = 0.25 row drifts right by about 0.5 over the horizon, so its
    // failure probability climbs from 0 to 1 partway along the row
    println!("p_hat along v = 0.25, left to right:");
    let row: Vec<String> = oracle
        .entries
        .iter()
        .filter(|e| (e.point.cont[1] - 0.25).abs() < 1e-9)
        .map(|e| format!("{:.2}", e.p_hat))
        .collect();
    println!("  {}", row.join(" "));

    // the quantifier prunes every cell it ever observes failing, so along a
    // probability gradient it keeps a conservative subset of the oracle set:
    // expect missed cells on the blurry boundary but no unsound ones
    let cfg = QuantifyConfig {
        epsilon,
        beta: 0.001,
        seed: 4,
        max_runs: 20_000,
        init_distribution: Default::default(),
    };
    let report = quantify(&sys, &spec, &cfg).unwrap();
    let m = compare(&report.final_set.cell_keys(), &oracle.safe_set.cell_keys()).unwrap();
    println!(
        "quantified {:?} with {} centroids: IoU {:.3}, unsound {}, missed {}",
        report.verdict,
        report.final_set.len(),
        m.iou,
        m.unsound_count,
        m.missed_count
    );
}
