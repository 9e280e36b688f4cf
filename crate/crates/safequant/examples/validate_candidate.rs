//! Validates two hand-built candidate sets against the cliff integrator:
//! an optimistic one that includes doomed cells, then an honest one.
//!
//! The first candidate is refused with a concrete witness run; the second
//! passes after the full streak of consecutive safe runs.

use safequant::validate::ValidationOutcome;
use safequant::{validate, ContDim, CoveringSet, DeltaVector, OssSpec, StatePoint};
use safequant::systems::{cliff_integrator, CliffIntegratorParams};

fn main() {
    let spec = OssSpec::new(
        vec![ContDim::new("x", 0.0, 1.0), ContDim::new("v", -2.0, 2.0)],
        vec![],
        DeltaVector(vec![0.05, 0.25]),
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

    // optimistic: the whole grid, positive-velocity rows included
    let full = CoveringSet::build_initial(&spec).unwrap();
    report("full grid", validate(&sys, &spec, &full, 0.05, 0.001, 3).unwrap());

    // honest: only the non-positive velocity rows
    let mut lower = CoveringSet::empty(&spec);
    for cx in 0..spec.cells_along(0) {
        for cv in 0..4 {
            let p = StatePoint::continuous(vec![
                spec.cell_center(0, cx as i64),
                spec.cell_center(1, cv as i64),
            ]);
            lower.insert_point(&p).unwrap();
        }
    }
    report("lower half", validate(&sys, &spec, &lower, 0.05, 0.001, 3).unwrap());
}

fn report(name: &str, v: safequant::ValidationVerdict) {
    match v.outcome {
        ValidationOutcome::Validated { epsilon, confidence } => println!(
            "{name}: validated at epsilon {epsilon} with confidence {confidence} after {} runs",
            v.runs_used
        ),
        ValidationOutcome::Falsified { witness } => println!(
            "{name}: falsified on run {} from ({}, {}), outcome {:?}",
            v.runs_used, witness.initial.cont[0], witness.initial.cont[1], witness.outcome
        ),
        ValidationOutcome::CoverageViolated { first_escape, .. } => println!(
            "{name}: a safe run escaped the candidate at ({}, {})",
            first_escape.cont[0], first_escape.cont[1]
        ),
    }
}
