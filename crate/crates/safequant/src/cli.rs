//! Command line entry points.
//!
//! Exit codes are part of the interface: campaigns are scripted and the
//! caller branches on them.
//!   quantify: 0 certified, 2 budget exhausted, 1 error
//!   validate: 0 validated, 3 falsified, 4 coverage violated, 1 error
//!   oracle / compare / plot: 0 done, 1 error

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand};

use crate::artifacts::{
    centroid_csv, oracle_csv, read_centroid_csv, run_log_jsonl, save, trace_csv, ReportDoc,
    VerdictDoc,
};
use crate::config::{self, CampaignConfig};
use crate::error::{Error, Result};
use crate::oracle::{compare, oracle_safe_set};
use crate::oss::CellKey;
use crate::plot::{parse_slice, render_heatmap};
use crate::quantify::{quantify, Verdict};
use crate::validate::{validate, ValidationOutcome};

#[derive(Parser)]
#[command(
    name = "safequant",
    version,
    about = "Sampling-based safe-set quantification for black-box stochastic systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a quantification campaign and write the certified set
    Quantify {
        /// Campaign config JSON
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to the config's out_dir)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-test a candidate set with fresh scenarios
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Candidate centroid CSV
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimate per-centroid failure probabilities by brute force
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Agreement metrics between centroid CSVs (last one is the reference)
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Centroid CSV, repeat for each set
        #[arg(long = "set")]
        sets: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a 2-D SVG heatmap of a centroid CSV
    Plot {
        #[arg(long)]
        config: PathBuf,
        /// Centroid CSV to draw
        #[arg(long)]
        set: PathBuf,
        /// Two continuous dimension names, comma separated
        #[arg(long)]
        dims: String,
        /// Fixed values for the remaining dimensions, dim=value pairs
        #[arg(long)]
        slice: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Same as [`run`] but with explicit arguments, for tests.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Quantify { config, out, seed } => cmd_quantify(&config, out, seed),
        Cmd::Validate { config, set, out, seed } => cmd_validate(&config, &set, out, seed),
        Cmd::Oracle { config, out, seed } => cmd_oracle(&config, out, seed),
        Cmd::Compare { config, sets, out } => cmd_compare(&config, &sets, out),
        Cmd::Plot { config, set, dims, slice, out } => {
            cmd_plot(&config, &set, &dims, slice.as_deref(), out)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<CampaignConfig> {
    let mut cfg = config::load(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(cfg: &CampaignConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from(&cfg.out_dir))
}

fn cmd_quantify(config: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<i32> {
    let cfg = load_config(config, seed)?;
    let (sys, spec) = cfg.build()?;
    let report = quantify(sys.as_model(), &spec, &cfg.to_quantify_config())?;
    let dir = out_dir(&cfg, out);
    save(&dir.join("centroids.csv"), &centroid_csv(&report.final_set))?;
    save(&dir.join("runs.jsonl"), &run_log_jsonl(&report.run_log))?;
    let doc = ReportDoc::new(&report, "centroids.csv", "runs.jsonl");
    save(&dir.join("report.json"), &doc.to_json())?;
    println!(
        "quantify: {:?} after {} runs, {} centroids kept ({} pruned), wrote {}",
        report.verdict,
        report.counters.total_runs,
        report.final_set.len(),
        report.counters.pruned_centroids,
        dir.display()
    );
    Ok(match report.verdict {
        Verdict::Certified => 0,
        Verdict::BudgetExhausted => 2,
    })
}

fn cmd_validate(
    config: &Path,
    set: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<i32> {
    let cfg = load_config(config, seed)?;
    let (sys, spec) = cfg.build()?;
    let candidate = read_centroid_csv(set, &spec)?;
    let verdict = validate(
        sys.as_model(),
        &spec,
        &candidate,
        cfg.epsilon,
        cfg.beta,
        cfg.seed,
    )?;
    let dir = out_dir(&cfg, out);
    let (code, trace) = match &verdict.outcome {
        ValidationOutcome::Validated { .. } => (0, None),
        ValidationOutcome::Falsified { witness } => (3, Some(witness)),
        ValidationOutcome::CoverageViolated { witness, .. } => (4, Some(witness)),
    };
    let trace_name = trace.map(|witness| {
        save(&dir.join("witness_trace.csv"), &trace_csv(&spec, witness))
            .map(|()| "witness_trace.csv")
    });
    let trace_name = match trace_name {
        Some(r) => Some(r?),
        None => None,
    };
    let doc = VerdictDoc::new(&verdict, trace_name);
    save(&dir.join("verdict.json"), &doc.to_json())?;
    println!(
        "validate: {} after {} runs, wrote {}",
        verdict.outcome.label(),
        verdict.runs_used,
        dir.display()
    );
    Ok(code)
}

fn cmd_oracle(config: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<i32> {
    let cfg = load_config(config, seed)?;
    let (sys, spec) = cfg.build()?;
    let result = oracle_safe_set(
        sys.as_model(),
        &spec,
        cfg.epsilon,
        cfg.oracle_trials,
        cfg.seed,
    )?;
    let dir = out_dir(&cfg, out);
    save(&dir.join("oracle.csv"), &oracle_csv(&spec, &result))?;
    save(&dir.join("oracle_safe.csv"), &centroid_csv(&result.safe_set))?;
    println!(
        "oracle: {} of {} centroids at or below epsilon {}, wrote {}",
        result.safe_set.len(),
        result.entries.len(),
        cfg.epsilon,
        dir.display()
    );
    Ok(0)
}

fn cmd_compare(config: &Path, sets: &[PathBuf], out: Option<PathBuf>) -> Result<i32> {
    let cfg = load_config(config, None)?;
    let (_, spec) = cfg.build()?;
    if sets.len() < 2 {
        return Err(Error::Domain(format!(
            "compare needs at least two --set files, got {}",
            sets.len()
        )));
    }
    let mut keys: Vec<BTreeSet<CellKey>> = Vec::with_capacity(sets.len());
    for path in sets {
        keys.push(read_centroid_csv(path, &spec)?.cell_keys());
    }
    let iou = crate::oss::iou(&keys)?;
    // counts grade the first set against the last, the designated reference
    let pair = compare(&keys[0], &keys[keys.len() - 1])?;
    let metrics = crate::oracle::CompareMetrics { iou, ..pair };
    let json = serde_json::to_string_pretty(&metrics).expect("metrics serialize") + "\n";
    let dir = out_dir(&cfg, out);
    save(&dir.join("metrics.json"), &json)?;
    print!("{json}");
    Ok(0)
}

fn cmd_plot(
    config: &Path,
    set: &Path,
    dims: &str,
    slice: Option<&str>,
    out: Option<PathBuf>,
) -> Result<i32> {
    let cfg = load_config(config, None)?;
    let (_, spec) = cfg.build()?;
    let covering = read_centroid_csv(set, &spec)?;
    let (dim_x, dim_y) = dims
        .split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .ok_or_else(|| Error::Parse(format!("--dims wants two names, got {dims:?}")))?;
    let slice = parse_slice(slice.unwrap_or(""))?;
    let svg = render_heatmap(&covering, dim_x, dim_y, &slice)?;
    let dir = out_dir(&cfg, out);
    save(&dir.join("plot.svg"), &svg)?;
    println!("plot: {} into {}", dims, dir.join("plot.svg").display());
    Ok(0)
}

// keep clap's debug assertions honest
#[allow(dead_code)]
fn assert_cli() {
    Cli::command().debug_assert();
}
