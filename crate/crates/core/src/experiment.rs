//! Reproducible experiment runs: generate an input, run tasks on it, and write a run
//! directory with per-task results and a manifest of hashes and timings. Result files hold
//! no timings, so identical configs give byte-identical results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::blocking::{
    is_blocking_set, midpoint_blocking_set, min_blocking_set_drawing,
    triangulation_lower_bound, BipartiteDrawing, BlockingInstance, BlockingReport,
};
use crate::crossing::{
    blocker_count_floor_convex, check_partition, circle_graph_cover, convex_chords, crossing_graph,
    crossing_family_partition, partition_lower_bound, regular_ngon_multiplicity,
};
use crate::drawings::{construct_kn_arc_drawing, export, trivial_blocker_lower_bound, ArcDrawing};
use crate::error::{Error, Result};
use crate::generate::{generate, Generated, GeneratorKind, GeneratorSpec};
use crate::geom::{is_convex_position, max_collinear, PointSet};
use crate::graph::Budget;
use crate::midpoints::{convex_midpoint_fractions, sandwich};
use crate::visibility::{
    big_line_big_clique_check, chromatic_number, clique_number, monochromatic_line_check,
    proposition1_check, visibility_graph, Colouring,
};

pub const SCHEMA: &str = "visblock-run/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Visgraph,
    Block,
    Midpoints,
    Crossing,
    Drawing,
    Ramsey,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Visgraph,
        Task::Block,
        Task::Midpoints,
        Task::Crossing,
        Task::Drawing,
        Task::Ramsey,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Visgraph => "visgraph",
            Task::Block => "block",
            Task::Midpoints => "midpoints",
            Task::Crossing => "crossing",
            Task::Drawing => "drawing",
            Task::Ramsey => "ramsey",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown task {s:?}")))
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskParams {
    /// Clique size and line size for the big-line-big-clique check.
    pub ramsey_k: usize,
    pub ramsey_l: usize,
    /// Largest `n` for which all 2-colourings are enumerated.
    pub colouring_limit: usize,
    /// Largest edge count for which drawing instances are also solved exactly.
    pub drawing_solve_limit: usize,
    pub polyline_samples: Option<usize>,
}

impl Default for TaskParams {
    fn default() -> Self {
        TaskParams {
            ramsey_k: 4,
            ramsey_l: 4,
            colouring_limit: 12,
            drawing_solve_limit: 25,
            polyline_samples: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// `json` is always written; `csv` adds a one-row summary table.
    #[serde(default)]
    pub formats: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub tasks: Vec<Task>,
    /// Per-task time limits in milliseconds; absent means unlimited.
    #[serde(default)]
    pub budgets: BTreeMap<Task, u64>,
    #[serde(default)]
    pub params: TaskParams,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn new(generator: impl Into<GeneratorSpec>, tasks: &[Task]) -> Self {
        ExperimentConfig {
            generator: generator.into(),
            tasks: tasks.to_vec(),
            budgets: BTreeMap::new(),
            params: TaskParams::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::Invalid("an experiment needs at least one task".into()));
        }
        if let Some((t, _)) = self.budgets.iter().find(|(_, &ms)| ms == 0) {
            return Err(Error::Invalid(format!("budget for {t} must be positive")));
        }
        if let Some(f) = self.output.formats.iter().find(|f| !matches!(f.as_str(), "json" | "csv")) {
            return Err(Error::Invalid(format!("unknown output format {f:?}")));
        }
        Ok(())
    }

    /// Accepts either a config or a manifest written by [`run`].
    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        let cfg: ExperimentConfig = match v.get("config") {
            Some(c) if v.get("schema").is_some() => serde_json::from_value(c.clone())?,
            _ => serde_json::from_value(v)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn budget(&self, t: Task) -> Budget {
        Budget::from_option(self.budgets.get(&t).copied())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Ok,
    BudgetExhausted,
    Error,
    VerificationFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task: Task,
    pub status: TaskStatus,
    /// Failed property assertions.
    pub failures: Vec<String>,
    pub error: Option<String>,
    pub result: Value,
}

/// Per-task accumulator for failures and budget exhaustion.
#[derive(Default)]
struct Notes {
    failures: Vec<String>,
    exhausted: bool,
}

impl Notes {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn exact(&mut self, exact: bool) {
        self.exhausted |= !exact;
    }
}

fn visgraph_one(p: &PointSet, budget: Budget, notes: &mut Notes) -> Result<Value> {
    let vg = visibility_graph(p)?;
    let diameter = if p.is_collinear() {
        None
    } else {
        let d = crate::visibility::diameter(&vg)?;
        notes.check(d <= 2, || format!("{}: visibility graph diameter {d} exceeds 2", p.name()));
        Some(d)
    };
    let omega = clique_number(&vg, budget);
    let chi = chromatic_number(&vg, budget);
    notes.exact(omega.exact && chi.exact);
    if omega.exact && chi.exact {
        notes.check(omega.size <= chi.chi, || format!("{}: clique number above chromatic number", p.name()));
    }
    let prop1 = if chi.exact {
        let l = max_collinear(p)? + 1;
        let r = proposition1_check(p, &chi.colouring, l)?;
        notes.check(r.certified(), || format!("{}: largest colour class certificate failed", p.name()));
        Some(r)
    } else {
        None
    };
    Ok(json!({
        "name": p.name(),
        "n": p.len(),
        "edge_count": vg.edge_count(),
        "edges": vg.edges(),
        "diameter": diameter,
        "clique": omega,
        "chromatic": chi,
        "proposition1": prop1,
    }))
}

fn block_one(p: &PointSet, budget: Budget, notes: &mut Notes) -> Result<Value> {
    let inst = BlockingInstance::all_pairs(p)?;
    let b = crate::blocking::solve(&inst, budget);
    notes.exact(b.optimal);
    notes.check(is_blocking_set(p, &b.points).blocks, || format!("{}: solver output does not block", p.name()));
    let tri = if p.len() >= 3 && p.is_general_position() {
        let t = triangulation_lower_bound(p)?;
        if b.optimal {
            notes.check(b.size() >= t.bound, || {
                format!("{}: b = {} below 3n-3-t = {}", p.name(), b.size(), t.bound)
            });
        }
        Some(t)
    } else {
        None
    };
    Ok(json!({
        "name": p.name(),
        "n": p.len(),
        "report": BlockingReport::new(&inst, &b),
        "triangulation_bound": tri,
    }))
}

fn block_bipartite(d: &BipartiteDrawing, budget: Budget, limit: usize, notes: &mut Notes) -> Result<Value> {
    let check = d.verify();
    notes.check(check.blocks && d.designated_ok(), || {
        format!("stated blockers leave edges {:?} uncovered", check.uncovered_edges)
    });
    let solved = if d.edges.len() <= limit {
        let b = min_blocking_set_drawing(&d.vertices, &d.edges, budget)?;
        notes.exact(b.optimal);
        notes.check(b.size() <= d.blockers.len(), || "solver beat by the stated blockers".into());
        Some(b)
    } else {
        None
    };
    Ok(json!({
        "n": d.n,
        "edges": d.edges.len(),
        "stated_blockers": d.blockers,
        "stated_count": d.blockers.len(),
        "check": check,
        "solver": solved,
    }))
}

fn block_arc(d: &ArcDrawing, notes: &mut Notes) -> Value {
    let r = crate::drawings::verify_drawing_blocking(d);
    notes.check(r.passed, || format!("arc drawing n={} is not blocked", d.n));
    json!({"n": d.n, "blockers": d.blockers.len(), "check": r})
}

fn midpoints_one(p: &PointSet, notes: &mut Notes) -> Result<Value> {
    let s = sandwich(p)?;
    notes.check(s.holds, || format!("{}: midpoint/sum-set sandwich fails", p.name()));
    let mb = if p.is_general_position() {
        let b = midpoint_blocking_set(p)?;
        notes.check(is_blocking_set(p, &b.points).blocks, || {
            format!("{}: midpoints do not block", p.name())
        });
        Some(b.size())
    } else {
        None
    };
    let convex = p.len() >= 3 && is_convex_position(p);
    Ok(json!({
        "name": p.name(),
        "n": p.len(),
        "m": s.midpoints,
        "sum_set": s.sum_set,
        "sandwich_holds": s.holds,
        "midpoint_blocking_size": mb,
        "convex_fractions": convex.then(|| convex_midpoint_fractions(p.len())),
    }))
}

fn crossing_one(p: &PointSet, budget: Budget, notes: &mut Notes) -> Result<Value> {
    let cg = crossing_graph(p)?;
    let part = crossing_family_partition(p, budget)?;
    notes.exact(part.exact);
    if let Err(e) = check_partition(&cg.graph, &part) {
        notes.failures.push(format!("{}: {e}", p.name()));
    }
    let lb = partition_lower_bound(p.len());
    notes.check(part.size() >= lb, || format!("{}: partition below ceil(C(n,2)/floor(n/2))", p.name()));
    let circle = if p.len() >= 3 && is_convex_position(p) {
        let c = circle_graph_cover(p.len(), &convex_chords(p)?, budget)?;
        notes.exact(c.exact);
        if c.exact && part.exact {
            notes.check(c.size() == part.size(), || format!("{}: circle cover disagrees", p.name()));
        }
        Some(c.size())
    } else {
        None
    };
    Ok(json!({
        "name": p.name(),
        "n": p.len(),
        "crossing_pairs": cg.graph.edge_count(),
        "t": part.size(),
        "exact": part.exact,
        "classes": part.classes,
        "lower_bound": lb,
        "circle_cover": circle,
        "floor": if p.len() >= 3 { Some(blocker_count_floor_convex(p.len())?) } else { None },
    }))
}

fn drawing_for(n: usize, samples: Option<usize>, notes: &mut Notes) -> Result<Value> {
    let d = construct_kn_arc_drawing(n)?;
    let ex = export(&d, samples);
    notes.check(ex.blocking.passed, || format!("arc drawing n={n} not blocked"));
    notes.check(ex.simplicity.certified, || format!("arc drawing n={n} not simple"));
    notes.check(d.blockers.len() == 2 * n - 3, || format!("arc drawing n={n} has wrong blocker count"));
    Ok(json!({
        "n": n,
        "blockers": d.blockers.len(),
        "verified": ex.blocking.passed && ex.simplicity.certified,
        "trivial_bound": trivial_blocker_lower_bound(n)?,
        "drawing": ex,
    }))
}

fn ramsey_one(p: &PointSet, params: &TaskParams, budget: Budget, notes: &mut Notes) -> Result<Value> {
    let verdict = big_line_big_clique_check(p, params.ramsey_k, params.ramsey_l, budget)?;
    if let crate::visibility::Verdict::Inconclusive { .. } = verdict {
        notes.exhausted = true;
    }
    let n = p.len();
    let colourings = if n >= 2 && n <= params.colouring_limit && !p.is_collinear() {
        // Colour of point 0 fixed by symmetry.
        let mut without_line = Vec::new();
        let total = 1u64 << (n - 1);
        for mask in 0..total {
            let colours: Vec<usize> = (0..n).map(|i| if i > 0 && (mask >> (i - 1)) & 1 == 1 { 2 } else { 1 }).collect();
            let c = Colouring::new(2, colours)?;
            if monochromatic_line_check(p, &c)?.is_none() {
                without_line.push(mask);
            }
        }
        notes.check(without_line.is_empty(), || {
            format!("{}: {} 2-colourings without a monochromatic line", p.name(), without_line.len())
        });
        Some(json!({"checked": total, "without_monochromatic_line": without_line.len()}))
    } else {
        None
    };
    Ok(json!({
        "name": p.name(),
        "n": n,
        "k": params.ramsey_k,
        "l": params.ramsey_l,
        "verdict": verdict,
        "two_colourings": colourings,
    }))
}

fn per_set(
    g: &Generated,
    notes: &mut Notes,
    mut f: impl FnMut(&PointSet, &mut Notes) -> Result<Value>,
) -> Result<Value> {
    let sets = g.point_sets()?;
    let out = sets.iter().map(|p| f(p, notes)).collect::<Result<Vec<_>>>()?;
    Ok(json!({ "sets": out }))
}

/// Run one task on an already generated input, using `cfg` for budgets and parameters.
pub fn run_task(cfg: &ExperimentConfig, g: &Generated, task: Task) -> TaskOutcome {
    let budget = cfg.budget(task);
    let params = &cfg.params;
    let mut notes = Notes::default();
    let result = match (task, g) {
        (Task::Visgraph, _) => per_set(g, &mut notes, |p, n| visgraph_one(p, budget, n)),
        (Task::Block, Generated::Bipartite { drawing }) => {
            block_bipartite(drawing, budget, params.drawing_solve_limit, &mut notes).map(|v| json!({ "drawing": v }))
        }
        (Task::Block, Generated::Arc { drawing }) => Ok(json!({ "drawing": block_arc(drawing, &mut notes) })),
        (Task::Block, _) => per_set(g, &mut notes, |p, n| block_one(p, budget, n)),
        (Task::Midpoints, _) => per_set(g, &mut notes, midpoints_one),
        (Task::Crossing, Generated::Ngon { ngon }) => (|| {
            let census = regular_ngon_multiplicity(ngon.n, budget)?;
            notes.exhausted |= !census.certified;
            notes.check(census.max_multiplicity_excluding_center <= 7, || {
                format!("regular {}-gon has {} diagonals through one point", ngon.n, census.max_multiplicity_excluding_center)
            });
            Ok(json!({
                "census": census,
                "floor": blocker_count_floor_convex(ngon.n)?,
            }))
        })(),
        (Task::Crossing, _) => per_set(g, &mut notes, |p, n| crossing_one(p, budget, n)),
        (Task::Drawing, Generated::Arc { drawing }) => drawing_for(drawing.n, params.polyline_samples, &mut notes),
        (Task::Drawing, _) => per_set(g, &mut notes, |p, n| drawing_for(p.len(), params.polyline_samples, n)),
        (Task::Ramsey, _) => per_set(g, &mut notes, |p, n| ramsey_one(p, params, budget, n)),
    };
    match result {
        Ok(result) => TaskOutcome {
            task,
            status: if !notes.failures.is_empty() {
                TaskStatus::VerificationFailed
            } else if notes.exhausted {
                TaskStatus::BudgetExhausted
            } else {
                TaskStatus::Ok
            },
            failures: notes.failures,
            error: None,
            result,
        },
        Err(e) => TaskOutcome {
            task,
            status: TaskStatus::Error,
            failures: notes.failures,
            error: Some(e.to_string()),
            result: Value::Null,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Cross-task checks: crossing-family count never exceeds the blocking number.
fn cross_checks(outcomes: &[TaskOutcome]) -> Vec<CheckResult> {
    let find = |t: Task| outcomes.iter().find(|o| o.task == t && o.status != TaskStatus::Error);
    let (Some(block), Some(cross)) = (find(Task::Block), find(Task::Crossing)) else {
        return vec![];
    };
    let (Some(bs), Some(cs)) = (block.result["sets"].as_array(), cross.result["sets"].as_array()) else {
        return vec![];
    };
    bs.iter()
        .zip(cs)
        .filter(|(b, c)| b["report"]["optimal"] == true && c["exact"] == true)
        .map(|(b, c)| {
            let bv = b["report"]["size"].as_u64().unwrap_or(0);
            let tv = c["t"].as_u64().unwrap_or(u64::MAX);
            CheckResult {
                name: format!("t<=b:{}", b["name"].as_str().unwrap_or("?")),
                passed: tv <= bv,
                detail: format!("t = {tv}, b = {bv}"),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: Task,
    pub status: TaskStatus,
    pub file: String,
    pub sha256: String,
    pub wall_ms: f64,
    pub failures: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub input: FileRecord,
    pub tasks: Vec<TaskRecord>,
    pub checks: FileRecord,
    pub generate_ms: f64,
    pub exit_code: i32,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub outcomes: Vec<TaskOutcome>,
    pub checks: Vec<CheckResult>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        self.manifest.exit_code
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(dir: &Path, rel: &str, text: &str) -> Result<FileRecord> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, text)?;
    Ok(FileRecord {
        file: rel.to_string(),
        sha256: sha256_hex(text.as_bytes()),
    })
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// 0 success, 2 verification failure, 3 budget exhausted only, 4 input error.
pub fn exit_code_for(outcomes: &[TaskOutcome], checks: &[CheckResult]) -> i32 {
    if outcomes.iter().any(|o| o.status == TaskStatus::VerificationFailed) || checks.iter().any(|c| !c.passed) {
        2
    } else if outcomes.iter().any(|o| o.status == TaskStatus::Error) {
        4
    } else if outcomes.iter().any(|o| o.status == TaskStatus::BudgetExhausted) {
        3
    } else {
        0
    }
}

/// Run every task of `cfg` and write the run directory `dir`.
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let t0 = Instant::now();
    let generated = generate(&cfg.generator)?;
    let generate_ms = t0.elapsed().as_secs_f64() * 1e3;
    std::fs::create_dir_all(dir)?;
    let input = write_file(dir, "input.json", &pretty(&generated))?;
    write_file(dir, "config.json", &pretty(cfg))?;

    let mut tasks = cfg.tasks.clone();
    tasks.sort();
    tasks.dedup();
    let timed: Vec<(TaskOutcome, f64)> = tasks
        .par_iter()
        .map(|&t| {
            let start = Instant::now();
            let o = run_task(cfg, &generated, t);
            (o, start.elapsed().as_secs_f64() * 1e3)
        })
        .collect();
    let mut records = Vec::new();
    for (o, ms) in &timed {
        if let Some(e) = &o.error {
            log::error!("task {} failed: {e}", o.task);
        }
        for f in &o.failures {
            log::error!("task {}: {f}", o.task);
        }
        let rec = write_file(dir, &format!("results/{}.json", o.task), &pretty(o))?;
        records.push(TaskRecord {
            task: o.task,
            status: o.status,
            file: rec.file,
            sha256: rec.sha256,
            wall_ms: *ms,
            failures: o.failures.clone(),
            error: o.error.clone(),
        });
    }
    let outcomes: Vec<TaskOutcome> = timed.into_iter().map(|(o, _)| o).collect();
    let checks = cross_checks(&outcomes);
    let checks_rec = write_file(dir, "checks.json", &pretty(&checks))?;
    let exit_code = exit_code_for(&outcomes, &checks);

    if cfg.output.formats.iter().any(|f| f == "csv") {
        let tables = tables_for(&dir.display().to_string(), &outcomes)?;
        write_file(dir, "summary.csv", &summary_csv(&tables.rows))?;
    }

    let seeds = match &cfg.generator.kind {
        GeneratorKind::RandomGeneralPosition { seed, .. } => vec![*seed],
        _ => vec![],
    };
    let manifest = Manifest {
        schema: SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        seeds,
        input,
        tasks: records,
        checks: checks_rec,
        generate_ms,
        exit_code,
    };
    write_file(dir, "manifest.json", &pretty(&manifest))?;
    Ok(RunSummary {
        dir: dir.to_path_buf(),
        manifest,
        outcomes,
        checks,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub run: String,
    pub set: String,
    pub n: usize,
    /// `3n - 3 - t` for general-position sets.
    pub b_lower: Option<usize>,
    pub b: Option<usize>,
    pub b_optimal: Option<bool>,
    pub m: Option<usize>,
    pub t: Option<usize>,
    pub n2_over_14: f64,
    pub n_ln_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawingRow {
    pub run: String,
    pub n: usize,
    pub blockers: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportTables {
    pub rows: Vec<SummaryRow>,
    pub drawings: Vec<DrawingRow>,
}

fn tables_for(run: &str, outcomes: &[TaskOutcome]) -> Result<ReportTables> {
    let mut rows: BTreeMap<usize, SummaryRow> = BTreeMap::new();
    let mut drawings = Vec::new();
    let as_usize = |v: &Value| v.as_u64().map(|x| x as usize);
    for o in outcomes.iter().filter(|o| o.status != TaskStatus::Error) {
        if o.task == Task::Drawing {
            let items: Vec<&Value> = match o.result["sets"].as_array() {
                Some(a) => a.iter().collect(),
                None => vec![&o.result],
            };
            for d in items {
                drawings.push(DrawingRow {
                    run: run.to_string(),
                    n: as_usize(&d["n"]).unwrap_or(0),
                    blockers: as_usize(&d["blockers"]).unwrap_or(0),
                    verified: d["verified"] == true,
                });
            }
            continue;
        }
        let Some(sets) = o.result["sets"].as_array() else { continue };
        for (i, s) in sets.iter().enumerate() {
            let n = as_usize(&s["n"]).ok_or_else(|| Error::Invalid(format!("run {run}: result without n")))?;
            let row = rows.entry(i).or_insert_with(|| {
                let nf = n as f64;
                SummaryRow {
                    run: run.to_string(),
                    set: s["name"].as_str().unwrap_or("").to_string(),
                    n,
                    n2_over_14: nf * nf / 14.0,
                    n_ln_n: nf * nf.ln(),
                    ..Default::default()
                }
            });
            match o.task {
                Task::Block => {
                    row.b = as_usize(&s["report"]["size"]);
                    row.b_optimal = s["report"]["optimal"].as_bool();
                    row.b_lower = as_usize(&s["triangulation_bound"]["bound"]);
                }
                Task::Midpoints => row.m = as_usize(&s["m"]),
                Task::Crossing => row.t = as_usize(&s["t"]),
                _ => {}
            }
        }
    }
    Ok(ReportTables {
        rows: rows.into_values().collect(),
        drawings,
    })
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("run,set,n,b_lower,b,b_optimal,m,t,n2_over_14,n_ln_n\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:.4},{:.4}",
            r.run,
            r.set,
            r.n,
            opt(&r.b_lower),
            opt(&r.b),
            opt(&r.b_optimal),
            opt(&r.m),
            opt(&r.t),
            r.n2_over_14,
            r.n_ln_n
        );
    }
    s
}

pub fn drawing_csv(rows: &[DrawingRow]) -> String {
    let mut s = String::from("run,n,blockers,verified\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.run, r.n, r.blockers, r.verified);
    }
    s
}

fn plot_data(rows: &[SummaryRow], f: impl Fn(&SummaryRow) -> Option<f64>) -> String {
    let mut s = String::new();
    for r in rows {
        if let Some(y) = f(r) {
            let _ = writeln!(s, "{} {}", r.n, y);
        }
    }
    s
}

/// Aggregate run directories into tables. With `out`, writes `summary.csv`,
/// `drawings.csv` and two-column plot-data files there.
pub fn report(runs: &[PathBuf], out: Option<&Path>) -> Result<ReportTables> {
    if runs.is_empty() {
        return Err(Error::Invalid("report needs at least one run directory".into()));
    }
    let mut all = ReportTables::default();
    for dir in runs {
        let name = dir.display().to_string();
        let text = std::fs::read_to_string(dir.join("manifest.json"))
            .map_err(|e| Error::Invalid(format!("run {name}: cannot read manifest: {e}")))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::Invalid(format!("run {name}: manifest does not match the schema: {e}")))?;
        if manifest.schema != SCHEMA {
            return Err(Error::Invalid(format!("run {name}: schema {} is not {SCHEMA}", manifest.schema)));
        }
        let mut outcomes = Vec::new();
        for rec in &manifest.tasks {
            let body = std::fs::read_to_string(dir.join(&rec.file))?;
            let o: TaskOutcome = serde_json::from_str(&body)
                .map_err(|e| Error::Invalid(format!("run {name}: {} is malformed: {e}", rec.file)))?;
            outcomes.push(o);
        }
        let t = tables_for(&name, &outcomes)?;
        all.rows.extend(t.rows);
        all.drawings.extend(t.drawings);
    }
    if let Some(out) = out {
        std::fs::create_dir_all(out)?;
        std::fs::write(out.join("summary.csv"), summary_csv(&all.rows))?;
        std::fs::write(out.join("drawings.csv"), drawing_csv(&all.drawings))?;
        let series: [(&str, Box<dyn Fn(&SummaryRow) -> Option<f64>>); 6] = [
            ("b_lower.dat", Box::new(|r| r.b_lower.map(|v| v as f64))),
            ("b.dat", Box::new(|r| r.b.map(|v| v as f64))),
            ("m.dat", Box::new(|r| r.m.map(|v| v as f64))),
            ("t.dat", Box::new(|r| r.t.map(|v| v as f64))),
            ("n2_over_14.dat", Box::new(|r| Some(r.n2_over_14))),
            ("n_ln_n.dat", Box::new(|r| Some(r.n_ln_n))),
        ];
        for (file, f) in series {
            std::fs::write(out.join(file), plot_data(&all.rows, f))?;
        }
        let mut d = String::new();
        for r in &all.drawings {
            let _ = writeln!(d, "{} {}", r.n, r.blockers);
        }
        std::fs::write(out.join("drawing_blockers.dat"), d)?;
    }
    Ok(all)
}
