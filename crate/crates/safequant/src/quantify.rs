//! Safe-set quantification: the main sampling loop.
//!
//! Starting from a covering of the whole admissible region, the loop draws
//! start states, runs scenarios, prunes centroids refuted by failures (along
//! with every centroid observed to lead into them), extends the covering when
//! safe trajectories escape it, and certifies once enough consecutive safe
//! runs arrive with nothing left to retest.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::{CentroidId, CoveringSet, OssSpec, StatePoint};
use crate::scenario::{run_scenario, Outcome, ScenarioRun, SystemModel};

/// Smallest number of consecutive qualifying safe runs certifying failure
/// probability at most `epsilon` with confidence at least `1 - beta`:
/// `ceil(ln beta / ln(1 - epsilon))`. The degenerate inputs `epsilon = 1`
/// and `beta = 1` demand nothing and return 0.
pub fn sample_count(epsilon: f64, beta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    if epsilon == 1.0 || beta == 1.0 {
        return Ok(0);
    }
    Ok((beta.ln() / (1.0 - epsilon).ln()).ceil() as u64)
}

/// Directed graph over centroid ids with reverse-edge lookup. No self-loops,
/// no duplicate edges; edge endpoints are always vertices.
#[derive(Debug, Clone, Default)]
pub struct TransitionGraph {
    succ: BTreeMap<CentroidId, BTreeSet<CentroidId>>,
    pred: BTreeMap<CentroidId, BTreeSet<CentroidId>>,
    edges: usize,
}

impl TransitionGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: CentroidId) {
        self.succ.entry(v).or_default();
        self.pred.entry(v).or_default();
    }

    pub fn contains_vertex(&self, v: CentroidId) -> bool {
        self.succ.contains_key(&v)
    }

    pub fn add_edge(&mut self, from: CentroidId, to: CentroidId) {
        if from == to {
            return;
        }
        self.add_vertex(from);
        self.add_vertex(to);
        if self.succ.get_mut(&from).unwrap().insert(to) {
            self.pred.get_mut(&to).unwrap().insert(from);
            self.edges += 1;
        }
    }

    pub fn remove_vertex(&mut self, v: CentroidId) {
        if let Some(outs) = self.succ.remove(&v) {
            self.edges -= outs.len();
            for o in outs {
                if let Some(p) = self.pred.get_mut(&o) {
                    p.remove(&v);
                }
            }
        }
        if let Some(ins) = self.pred.remove(&v) {
            self.edges -= ins.len();
            for i in ins {
                if let Some(s) = self.succ.get_mut(&i) {
                    s.remove(&v);
                }
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = CentroidId> + '_ {
        self.succ.keys().copied()
    }

    pub fn successors(&self, v: CentroidId) -> impl Iterator<Item = CentroidId> + '_ {
        self.succ.get(&v).into_iter().flatten().copied()
    }

    pub fn has_edge(&self, from: CentroidId, to: CentroidId) -> bool {
        self.succ.get(&from).map_or(false, |s| s.contains(&to))
    }

    /// The present seeds plus every vertex from which a seed is reachable
    /// along edge direction, found by depth-first search on reversed edges.
    pub fn ancestors_of(&self, seeds: &[CentroidId]) -> BTreeSet<CentroidId> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<CentroidId> = Vec::new();
        for &s in seeds {
            if self.contains_vertex(s) && out.insert(s) {
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            if let Some(ps) = self.pred.get(&v) {
                for &p in ps {
                    if out.insert(p) {
                        stack.push(p);
                    }
                }
            }
        }
        out
    }
}

/// Last-in-first-out buffer of states awaiting a retest.
#[derive(Debug, Clone, Default)]
pub struct ReplayBuffer {
    items: Vec<StatePoint>,
}

impl ReplayBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: StatePoint) {
        self.items.push(s);
    }

    /// Removes and returns the most recently pushed state.
    pub fn pop(&mut self) -> Option<StatePoint> {
        self.items.pop()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// How start states are drawn when the replay buffer is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitDistribution {
    #[default]
    Uniform,
}

/// Campaign parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantifyConfig {
    pub epsilon: f64,
    pub beta: f64,
    pub seed: u64,
    pub max_runs: usize,
    #[serde(default)]
    pub init_distribution: InitDistribution,
}

impl QuantifyConfig {
    pub fn validate(&self) -> Result<u64> {
        let needed = sample_count(self.epsilon, self.beta)?;
        if self.max_runs == 0 || (self.max_runs as u64) < needed {
            return Err(Error::Config(format!(
                "max_runs = {} cannot reach the {} consecutive safe runs required",
                self.max_runs, needed
            )));
        }
        Ok(needed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    BudgetExhausted,
}

/// Aggregate counters, consistent with the run log by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct CampaignCounters {
    pub total_runs: usize,
    pub failure_runs: usize,
    pub init_failure_runs: usize,
    pub pruned_centroids: usize,
    pub added_centroids: usize,
    #[serde(rename = "final_N")]
    pub final_n: usize,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: usize,
    pub s0: StatePoint,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps_to_failure: Option<usize>,
    pub centroids_added: usize,
    pub centroids_removed: usize,
    pub buffer_len_after: usize,
    #[serde(rename = "N_after")]
    pub n_after: usize,
}

/// Everything a finished campaign produced.
#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub verdict: Verdict,
    pub config: QuantifyConfig,
    pub counters: CampaignCounters,
    /// Set when certification happened because the covering emptied out, a
    /// vacuous certificate rather than a streak of safe runs.
    pub vacuous_empty: bool,
    pub final_set: CoveringSet,
    pub run_log: Vec<RunRecord>,
}

/// The quantification loop, steppable for inspection. [`quantify`] drives it
/// to completion.
pub struct Quantifier<'a, S: SystemModel + ?Sized> {
    sys: &'a S,
    spec: OssSpec,
    cfg: QuantifyConfig,
    needed: usize,
    covering: CoveringSet,
    safe_graph: TransitionGraph,
    unsafe_graph: TransitionGraph,
    // Failing-trajectory states outside every box: refuted evidence that maps
    // to no centroid. They still cycle through the buffer.
    stray_unsafe: Vec<StatePoint>,
    buffer: ReplayBuffer,
    rng: ChaCha8Rng,
    streak: usize,
    counters: CampaignCounters,
    log: Vec<RunRecord>,
}

impl<'a, S: SystemModel + ?Sized> Quantifier<'a, S> {
    pub fn new(sys: &'a S, spec: &OssSpec, cfg: &QuantifyConfig) -> Result<Self> {
        let needed = cfg.validate()? as usize;
        let covering = CoveringSet::build_initial(spec)?;
        let mut safe_graph = TransitionGraph::new();
        for id in covering.ids() {
            safe_graph.add_vertex(id);
        }
        Ok(Quantifier {
            sys,
            spec: spec.clone(),
            cfg: cfg.clone(),
            needed,
            covering,
            safe_graph,
            unsafe_graph: TransitionGraph::new(),
            stray_unsafe: Vec::new(),
            buffer: ReplayBuffer::new(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            streak: 0,
            counters: CampaignCounters::default(),
            log: Vec::new(),
        })
    }

    pub fn covering(&self) -> &CoveringSet {
        &self.covering
    }

    pub fn safe_graph(&self) -> &TransitionGraph {
        &self.safe_graph
    }

    pub fn unsafe_graph(&self) -> &TransitionGraph {
        &self.unsafe_graph
    }

    pub fn stray_unsafe(&self) -> &[StatePoint] {
        &self.stray_unsafe
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    pub fn streak(&self) -> usize {
        self.streak
    }

    pub fn runs_done(&self) -> usize {
        self.counters.total_runs
    }

    /// The verdict this campaign has already reached, if any. `true` marks
    /// vacuous certification of an emptied covering.
    pub fn finished(&self) -> Option<(Verdict, bool)> {
        if self.streak >= self.needed {
            Some((Verdict::Certified, false))
        } else if self.covering.is_empty() {
            Some((Verdict::Certified, true))
        } else if self.counters.total_runs >= self.cfg.max_runs {
            Some((Verdict::BudgetExhausted, false))
        } else {
            None
        }
    }

    /// Picks the next start centroid: uniform over the covering when the
    /// buffer is empty, otherwise nearest centroid to the popped state.
    pub fn pick_initial(&mut self) -> Result<CentroidId> {
        if self.covering.is_empty() {
            return Err(Error::EmptyCovering);
        }
        match self.buffer.pop() {
            Some(probe) => self.covering.norm_nearest(&probe),
            None => {
                let ids = self.covering.ids();
                Ok(ids[self.rng.gen_range(0..ids.len())])
            }
        }
    }

    /// One loop iteration: pick, run, process, log.
    pub fn step(&mut self) -> Result<()> {
        if self.finished().is_some() {
            return Err(Error::Domain("campaign already finished".into()));
        }
        let s0_id = self.pick_initial()?;
        let s0 = self
            .covering
            .point_of(s0_id)
            .expect("picked centroid present")
            .clone();
        let run = run_scenario(self.sys, &self.spec, &s0, &mut self.rng)?;

        let (added, removed) = match run.outcome {
            Outcome::InitFailed => {
                self.counters.init_failure_runs += 1;
                self.process_init_failure(s0_id)
            }
            Outcome::Failure(k) => {
                self.counters.failure_runs += 1;
                self.process_failure(&run, k)
            }
            Outcome::Safe => self.process_safe(s0_id, &run)?,
        };

        self.counters.total_runs += 1;
        self.counters.added_centroids += added;
        self.counters.pruned_centroids += removed;
        self.counters.final_n = self.streak;
        self.log.push(RunRecord {
            run_index: self.counters.total_runs - 1,
            s0,
            outcome: run.outcome.label().to_string(),
            steps_to_failure: run.outcome.steps_to_failure(),
            centroids_added: added,
            centroids_removed: removed,
            buffer_len_after: self.buffer.len(),
            n_after: self.streak,
        });
        Ok(())
    }

    // A refused start refutes only the sampled centroid: it cannot be
    // certified, but its ancestors gained no failure evidence.
    fn process_init_failure(&mut self, s0_id: CentroidId) -> (usize, usize) {
        self.covering.remove(s0_id);
        self.safe_graph.remove_vertex(s0_id);
        self.streak = 0;
        (0, 1)
    }

    // Failure at step k: buffer the prefix with the failure state on top,
    // then prune every covering centroid of each prefix state together with
    // its safe-graph ancestors. Covering ids are snapshotted up front so the
    // observed transition edges land in the unsafe graph before pruning.
    fn process_failure(&mut self, run: &ScenarioRun, k: usize) -> (usize, usize) {
        let prefix = &run.recorded[..=k];
        let covers: Vec<Vec<CentroidId>> =
            prefix.iter().map(|s| self.covering.covering_ids(s)).collect();

        for s in prefix {
            self.buffer.push(s.clone());
        }
        for i in 0..k {
            for &a in &covers[i] {
                for &b in &covers[i + 1] {
                    self.unsafe_graph.add_edge(a, b);
                }
            }
        }

        let mut removed = 0usize;
        for i in 0..=k {
            if covers[i].is_empty() {
                self.stray_unsafe.push(prefix[i].clone());
                continue;
            }
            for id in self.safe_graph.ancestors_of(&covers[i]) {
                if self.covering.remove(id).is_some() {
                    removed += 1;
                }
                self.safe_graph.remove_vertex(id);
                self.unsafe_graph.add_vertex(id);
            }
        }
        self.streak = 0;
        (0, removed)
    }

    // Safe run: extend the covering wherever the trajectory escaped it,
    // chaining discovery edges from a cursor that starts at the initial
    // centroid and advances only on extension. The streak grows only for
    // non-extending runs with an empty buffer.
    fn process_safe(&mut self, s0_id: CentroidId, run: &ScenarioRun) -> Result<(usize, usize)> {
        let mut cursor = s0_id;
        let mut added = 0usize;
        for s in &run.recorded[1..] {
            if !self.covering.covers(s) {
                let key = self.spec.cell_key_of(s)?;
                let new_id = self.covering.insert_cell(key)?;
                self.safe_graph.add_vertex(new_id);
                self.safe_graph.add_edge(cursor, new_id);
                cursor = new_id;
                added += 1;
            }
        }
        if added == 0 && self.buffer.is_empty() {
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        Ok((added, 0))
    }

    /// Drives the loop to a verdict.
    pub fn run(mut self) -> Result<CampaignReport> {
        loop {
            if let Some((verdict, vacuous)) = self.finished() {
                return Ok(CampaignReport {
                    verdict,
                    config: self.cfg,
                    counters: self.counters,
                    vacuous_empty: vacuous,
                    final_set: self.covering,
                    run_log: self.log,
                });
            }
            self.step()?;
        }
    }
}

/// Runs a full campaign.
pub fn quantify<S: SystemModel + ?Sized>(
    sys: &S,
    spec: &OssSpec,
    cfg: &QuantifyConfig,
) -> Result<CampaignReport> {
    Quantifier::new(sys, spec, cfg)?.run()
}

/// Replays the counter law over a finished report: the streak recomputed
/// from the log must match every logged `N_after`, failures must reset it,
/// counters must equal their log sums, and a Certified verdict must rest on
/// exactly the required number of qualifying runs (or an emptied covering).
pub fn audit_report(report: &CampaignReport) -> std::result::Result<(), String> {
    let needed = sample_count(report.config.epsilon, report.config.beta)
        .map_err(|e| e.to_string())? as usize;
    let c = &report.counters;
    let log = &report.run_log;

    if c.total_runs != log.len() {
        return Err(format!(
            "total_runs {} does not match log length {}",
            c.total_runs,
            log.len()
        ));
    }
    let mut n = 0usize;
    let mut failures = 0usize;
    let mut init_failures = 0usize;
    let mut added = 0usize;
    let mut removed = 0usize;
    for (i, rec) in log.iter().enumerate() {
        if rec.run_index != i {
            return Err(format!("run_index {} at position {}", rec.run_index, i));
        }
        match rec.outcome.as_str() {
            "safe" => {
                if rec.steps_to_failure.is_some() {
                    return Err(format!("safe run {} carries steps_to_failure", i));
                }
                if rec.centroids_removed != 0 {
                    return Err(format!("safe run {} removed centroids", i));
                }
                n = if rec.centroids_added == 0 && rec.buffer_len_after == 0 {
                    n + 1
                } else {
                    0
                };
            }
            "failure" => {
                if rec.steps_to_failure.is_none() {
                    return Err(format!("failure run {} lacks steps_to_failure", i));
                }
                if rec.centroids_added != 0 {
                    return Err(format!("failure run {} added centroids", i));
                }
                failures += 1;
                n = 0;
            }
            "init_failed" => {
                if rec.centroids_added != 0 || rec.centroids_removed != 1 {
                    return Err(format!("init-failed run {} has odd mutation counts", i));
                }
                init_failures += 1;
                n = 0;
            }
            other => return Err(format!("unknown outcome {:?} at run {}", other, i)),
        }
        if rec.n_after != n {
            return Err(format!(
                "run {}: logged N_after {} but replay gives {}",
                i, rec.n_after, n
            ));
        }
        added += rec.centroids_added;
        removed += rec.centroids_removed;
    }
    if failures != c.failure_runs || init_failures != c.init_failure_runs {
        return Err("failure counters disagree with the log".into());
    }
    if added != c.added_centroids || removed != c.pruned_centroids {
        return Err("mutation counters disagree with the log".into());
    }
    if n != c.final_n {
        return Err(format!("final_N {} but replay gives {}", c.final_n, n));
    }
    match report.verdict {
        Verdict::Certified if report.vacuous_empty => {
            if !report.final_set.is_empty() {
                return Err("vacuous certificate over a non-empty set".into());
            }
        }
        Verdict::Certified => {
            if n != needed {
                return Err(format!(
                    "Certified with streak {} instead of exactly {}",
                    n, needed
                ));
            }
        }
        Verdict::BudgetExhausted => {
            if c.total_runs != report.config.max_runs {
                return Err("BudgetExhausted without spending the budget".into());
            }
            if n >= needed && needed > 0 {
                return Err("BudgetExhausted despite a certifying streak".into());
            }
        }
    }
    Ok(())
}
