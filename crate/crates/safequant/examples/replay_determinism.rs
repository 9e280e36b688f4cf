//! Runs the same campaign twice and checks the artifacts agree byte for
//! byte, then replays the run log against the counter law.

use safequant::artifacts::{centroid_csv, run_log_jsonl};
use safequant::quantify::{audit_report, QuantifyConfig};
use safequant::systems::{cliff_integrator, CliffIntegratorParams};
use safequant::{quantify, ContDim, DeltaVector, OssSpec};

fn main() {
    let spec = OssSpec::new(
        vec![ContDim::new("x", 0.0, 1.0), ContDim::new("v", -1.0, 1.0)],
        vec![],
        DeltaVector(vec![0.05, 0.25]),
        15,
    )
    .unwrap();
    let sys = cliff_integrator(CliffIntegratorParams {
        dt: 0.1,
        noise_bound: 0.08,
        cliff: 1.0,
        v_min: -1.0,
        v_max: 1.0,
    })
    .unwrap();
    let cfg = QuantifyConfig {
        epsilon: 0.05,
        beta: 0.001,
        seed: 23,
        max_runs: 10_000,
        init_distribution: Default::default(),
    };

    let first = quantify(&sys, &spec, &cfg).unwrap();
    let second = quantify(&sys, &spec, &cfg).unwrap();
    println!(
        "two executions, {} runs each: centroid CSV identical {}, run log identical {}",
        first.counters.total_runs,
        centroid_csv(&first.final_set) == centroid_csv(&second.final_set),
        run_log_jsonl(&first.run_log) == run_log_jsonl(&second.run_log)
    );

    audit_report(&first).expect("log must satisfy the counter law");
    println!("counter-law audit passed");

    // the tail of the log is the uninterrupted streak behind the verdict
    let tail = &first.run_log[first.run_log.len().saturating_sub(3)..];
    for rec in tail {
        println!(
            "run {:4}  {:8}  N={}  buffer={}",
            rec.run_index, rec.outcome, rec.n_after, rec.buffer_len_after
        );
    }
}
