//! Shows that the drift walker's safe set is asymmetric in the transverse
//! force whenever the lateral drift bias is nonzero, and that mirroring the
//! parameters mirrors the safe set exactly.

use std::collections::BTreeSet;

use safequant::oracle::oracle_safe_set;
use safequant::systems::{drift_walker, DriftWalkerParams};
use safequant::{CellKey, ContDim, DeltaVector, OssSpec};

fn params() -> DriftWalkerParams {
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

fn main() {
    let spec = OssSpec::new(
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
    .unwrap();

    // deterministic dynamics, so a single trial per centroid is exact
    let base = oracle_safe_set(&drift_walker(params()).unwrap(), &spec, 0.01, 1, 1)
        .unwrap()
        .safe_set
        .cell_keys();
    let mirrored = oracle_safe_set(
        &drift_walker(params().mirrored()).unwrap(),
        &spec,
        0.01,
        1,
        1,
    )
    .unwrap()
    .safe_set
    .cell_keys();

    // survivable transverse-force cells per velocity at low sagittal load,
    // printed leftmost force first
    for (v, vx) in [(0.2, 0i64), (0.4, 1i64)] {
        let line: String = (0..8)
            .map(|f| {
                let k = CellKey { cont: vec![vx, 0, 0, f], disc: vec![] };
                if base.contains(&k) { '#' } else { '.' }
            })
            .collect();
        println!("v={v}: fy -25..25 |{line}|");
    }

    let flip = |keys: &BTreeSet<CellKey>| -> BTreeSet<CellKey> {
        keys.iter()
            .map(|k| {
                let mut f = k.clone();
                f.cont[3] = 7 - f.cont[3];
                f
            })
            .collect()
    };
    println!("asymmetric under force sign flip: {}", base != flip(&base));
    println!("mirrored parameters mirror the set exactly: {}", mirrored == flip(&base));
}
