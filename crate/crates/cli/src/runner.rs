//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use shapeopt_core::llm::{AuditLog, HttpTransport, LlmProposer, MockProposer};
use shapeopt_core::persist::{read_trajectory, write_trajectory, RunWriter, TRAJECTORY_FILE};
use shapeopt_core::{
    run_ga, run_optimization, DesignVector, MeanProposer, RecordBuffer, RunError, RunErrorKind,
    RunOutcome,
};
use shapeopt_geom::airfoil::geometry_file_contents;
use shapeopt_stokes::write_traction_csv;
use thiserror::Error;

use crate::config::{ConfigError, OptimizerKind, RunConfig};
use crate::problems::{axisym_summary, Problem, ProblemError};

pub const CONFIG_SNAPSHOT: &str = "config.json";
pub const BEST_PROFILE_FILE: &str = "best_profile.csv";
pub const AUDIT_FILE: &str = "llm_audit.jsonl";
pub const COMPARE_FILE: &str = "compare.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("proposer failed in {dir}: {message}")]
    Proposer { dir: PathBuf, message: String },
    #[error("evaluator: {0}")]
    Evaluator(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: io::Error,
    },
}

impl RunnerError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) => 2,
            RunnerError::Proposer { .. } => 3,
            RunnerError::Evaluator(_) => 4,
            RunnerError::Io { .. } => 1,
        }
    }
}

impl From<ProblemError> for RunnerError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::Config(c) => RunnerError::Config(c),
            ProblemError::Evaluator(m) => RunnerError::Evaluator(m),
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> RunnerError {
    let context = context.into();
    move |source| RunnerError::Io { context, source }
}

fn csv_err(context: &str, e: csv::Error) -> RunnerError {
    RunnerError::Io {
        context: context.into(),
        source: io::Error::other(e),
    }
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed_{seed}"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub dir: PathBuf,
    pub generations: usize,
    pub best_score: f64,
    pub best_design: Vec<f64>,
}

/// Runs every configured seed into `out/seed_<s>`. With `resume`, each
/// directory continues after its last complete generation.
pub fn cmd_run(cfg: &RunConfig, out: &Path, resume: bool) -> Result<Vec<SeedSummary>, RunnerError> {
    cfg.validate()?;
    let problem = Problem::from_config(cfg)?;
    cfg.seeds
        .iter()
        .map(|&seed| run_seed(cfg, &problem, seed, &seed_dir(out, seed), resume))
        .collect()
}

fn run_seed(
    cfg: &RunConfig,
    problem: &Problem,
    seed: u64,
    dir: &Path,
    resume: bool,
) -> Result<SeedSummary, RunnerError> {
    let objective = problem.objective();
    let bounds = objective.bounds().clone();
    fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    let snapshot = serde_json::to_string_pretty(&cfg.snapshot(seed)).expect("config serializes");
    fs::write(dir.join(CONFIG_SNAPSHOT), snapshot + "\n")
        .map_err(io_err(format!("writing config snapshot in {}", dir.display())))?;

    let (mut writer, previous) = if resume {
        let (w, b) = RunWriter::resume(dir, bounds, cfg.timestamps, cfg.population_size)
            .map_err(io_err(format!("resuming {}", dir.display())))?;
        log::info!("{}: resuming after {} generations", dir.display(), b.len());
        (w, Some(b))
    } else {
        let w = RunWriter::create(dir, bounds, cfg.timestamps)
            .map_err(io_err(format!("creating run files in {}", dir.display())))?;
        (w, None)
    };

    let result: Result<RunOutcome, RunError> = match cfg.optimizer {
        OptimizerKind::Ga => run_ga(objective, &cfg.ga_config(seed), &mut writer, previous),
        OptimizerKind::Mock => run_optimization(
            objective,
            &mut MockProposer,
            &cfg.es_config(seed),
            &mut writer,
            previous,
        ),
        OptimizerKind::Llm => {
            let llm = cfg.llm.clone().ok_or_else(|| {
                RunnerError::Config(ConfigError::Invalid("llm section missing".into()))
            })?;
            let transport = HttpTransport::new(&llm).map_err(|e| RunnerError::Proposer {
                dir: dir.to_path_buf(),
                message: e.to_string(),
            })?;
            let audit = AuditLog::open(&dir.join(AUDIT_FILE))
                .map_err(io_err(format!("opening audit log in {}", dir.display())))?;
            let mut proposer: Box<dyn MeanProposer> =
                Box::new(LlmProposer::new(llm, transport).with_audit(audit));
            run_optimization(
                objective,
                proposer.as_mut(),
                &cfg.es_config(seed),
                &mut writer,
                previous,
            )
        }
    };

    let (buffer, failure) = match result {
        Ok(outcome) => (outcome.buffer, None),
        Err(e) => (e.partial.buffer, Some(e.kind)),
    };
    finish_outputs(problem, dir, &buffer)?;
    match failure {
        None => {}
        Some(RunErrorKind::Proposer { generation, source }) => {
            return Err(RunnerError::Proposer {
                dir: dir.to_path_buf(),
                message: format!("generation {generation}: {source}"),
            })
        }
        Some(RunErrorKind::Observer { generation, source }) => {
            return Err(RunnerError::Io {
                context: format!("writing generation {generation} in {}", dir.display()),
                source,
            })
        }
        Some(RunErrorKind::Config(e)) => {
            return Err(RunnerError::Config(ConfigError::Invalid(e.to_string())))
        }
    }
    let best = buffer.best_record();
    Ok(SeedSummary {
        seed,
        dir: dir.to_path_buf(),
        generations: buffer.len(),
        best_score: best.map_or(f64::NAN, |r| r.score),
        best_design: best.map(|r| r.design.0.clone()).unwrap_or_default(),
    })
}

/// Trajectory plus problem-specific exports of the best design; written
/// for partial runs too.
fn finish_outputs(
    problem: &Problem,
    dir: &Path,
    buffer: &RecordBuffer,
) -> Result<(), RunnerError> {
    write_trajectory(&dir.join(TRAJECTORY_FILE), buffer)
        .map_err(io_err(format!("writing trajectory in {}", dir.display())))?;
    if let (Problem::Axisym(p), Some(best)) = (problem, buffer.best_record()) {
        match p.analyze(&best.design) {
            Ok(eval) => eval
                .profile
                .write_csv(&dir.join(BEST_PROFILE_FILE))
                .map_err(io_err(format!("writing best profile in {}", dir.display())))?,
            Err(e) => log::warn!("best design of {} is not a valid body: {e}", dir.display()),
        }
    }
    Ok(())
}

/// Runs grouped by method name for [`cmd_compare`]. A directory containing
/// `seed_*` subdirectories contributes each of them.
pub fn expand_run_dirs(dirs: &[PathBuf]) -> Result<Vec<PathBuf>, RunnerError> {
    let mut out = Vec::new();
    for d in dirs {
        if d.join(TRAJECTORY_FILE).exists() {
            out.push(d.clone());
            continue;
        }
        let mut seeds: Vec<PathBuf> = fs::read_dir(d)
            .map_err(io_err(format!("listing {}", d.display())))?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("seed_"))
                    && p.join(TRAJECTORY_FILE).exists()
            })
            .collect();
        if seeds.is_empty() {
            return Err(RunnerError::Config(ConfigError::Invalid(format!(
                "{} holds no {TRAJECTORY_FILE}",
                d.display()
            ))));
        }
        seeds.sort();
        out.extend(seeds);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub methods: Vec<String>,
    /// One row per generation: `(mean, min, max)` of best-so-far per method.
    pub rows: Vec<Vec<(f64, f64, f64)>>,
    pub warnings: Vec<String>,
}

fn stats(values: &[f64]) -> (f64, f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, min, max)
}

/// Per-generation mean, min, and max of the best-so-far score of each
/// method's runs. Runs of unequal length are cut to the shortest.
pub fn compare_runs(methods: &[(String, Vec<PathBuf>)]) -> Result<CompareTable, RunnerError> {
    if methods.is_empty() {
        return Err(RunnerError::Config(ConfigError::Invalid("no runs to compare".into())));
    }
    let mut curves: Vec<Vec<Vec<f64>>> = Vec::new();
    for (name, dirs) in methods {
        let dirs = expand_run_dirs(dirs)?;
        if dirs.is_empty() {
            return Err(RunnerError::Config(ConfigError::Invalid(format!("method {name} has no runs"))));
        }
        let mut runs = Vec::new();
        for d in dirs {
            let rows = read_trajectory(&d.join(TRAJECTORY_FILE))
                .map_err(io_err(format!("reading trajectory of {}", d.display())))?;
            runs.push(rows.into_iter().map(|r| r.best_score_so_far).collect::<Vec<f64>>());
        }
        curves.push(runs);
    }
    let lengths: Vec<usize> = curves.iter().flatten().map(Vec::len).collect();
    let shortest = lengths.iter().copied().min().unwrap_or(0);
    let mut warnings = Vec::new();
    if lengths.iter().any(|&l| l != shortest) {
        let w = format!("runs have different lengths {lengths:?}; truncating to {shortest} generations");
        log::warn!("{w}");
        warnings.push(w);
    }
    let rows = (0..shortest)
        .map(|g| {
            curves
                .iter()
                .map(|runs| stats(&runs.iter().map(|r| r[g]).collect::<Vec<f64>>()))
                .collect()
        })
        .collect();
    Ok(CompareTable {
        methods: methods.iter().map(|(n, _)| n.clone()).collect(),
        rows,
        warnings,
    })
}

pub fn write_compare_csv(table: &CompareTable, path: &Path) -> Result<(), RunnerError> {
    let ctx = format!("writing {}", path.display());
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(&ctx, e))?;
    let mut header = vec!["generation".to_string()];
    for m in &table.methods {
        header.extend([format!("{m}_mean"), format!("{m}_min"), format!("{m}_max")]);
    }
    w.write_record(&header).map_err(|e| csv_err(&ctx, e))?;
    for (g, row) in table.rows.iter().enumerate() {
        let mut rec = vec![g.to_string()];
        for (mean, min, max) in row {
            rec.extend([mean.to_string(), min.to_string(), max.to_string()]);
        }
        w.write_record(&rec).map_err(|e| csv_err(&ctx, e))?;
    }
    w.flush().map_err(io_err(ctx))
}

pub fn cmd_compare(methods: &[(String, Vec<PathBuf>)], out: &Path) -> Result<CompareTable, RunnerError> {
    let table = compare_runs(methods)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(format!("creating {}", parent.display())))?;
    }
    write_compare_csv(&table, out)?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub n_ini: Vec<usize>,
    /// Mean best-so-far per generation, one column per `n_ini` value.
    pub rows: Vec<Vec<f64>>,
    /// Best score reached by each run, per `n_ini` value.
    pub final_best: BTreeMap<usize, Vec<f64>>,
}

/// Runs every seed of `base` once per `n_ini` value into
/// `out/n_ini_<v>/seed_<s>` and tabulates the mean trajectories.
pub fn cmd_sweep_nini(base: &RunConfig, n_ini: &[usize], out: &Path) -> Result<SweepTable, RunnerError> {
    if !base.problem.is_axisym() {
        return Err(RunnerError::Config(ConfigError::Invalid(
            "sweep-nini needs an axisymmetric problem".into(),
        )));
    }
    if n_ini.is_empty() {
        return Err(RunnerError::Config(ConfigError::Invalid("empty n_ini list".into())));
    }
    let mut columns = Vec::new();
    let mut final_best = BTreeMap::new();
    for &v in n_ini {
        let cfg = RunConfig {
            n_ini: v,
            ..base.clone()
        };
        let dir = out.join(format!("n_ini_{v}"));
        let summaries = cmd_run(&cfg, &dir, false)?;
        final_best.insert(v, summaries.iter().map(|s| s.best_score).collect());
        let table = compare_runs(&[(format!("n_ini_{v}"), vec![dir])])?;
        columns.push(table.rows.into_iter().map(|r| r[0].0).collect::<Vec<f64>>());
    }
    let len = columns.iter().map(Vec::len).min().unwrap_or(0);
    let rows: Vec<Vec<f64>> = (0..len).map(|g| columns.iter().map(|c| c[g]).collect()).collect();

    let path = out.join(SWEEP_FILE);
    let ctx = format!("writing {}", path.display());
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&ctx, e))?;
    let mut header = vec!["generation".to_string()];
    header.extend(n_ini.iter().map(|v| format!("n_ini_{v}")));
    w.write_record(&header).map_err(|e| csv_err(&ctx, e))?;
    for (g, row) in rows.iter().enumerate() {
        let mut rec = vec![g.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec).map_err(|e| csv_err(&ctx, e))?;
    }
    w.flush().map_err(io_err(ctx))?;
    Ok(SweepTable {
        n_ini: n_ini.to_vec(),
        rows,
        final_best,
    })
}

/// Scores one design and, when `out` is given, writes its geometry there.
/// Returns a JSON summary.
pub fn cmd_evaluate(
    cfg: &RunConfig,
    design: &[f64],
    out: Option<&Path>,
) -> Result<serde_json::Value, RunnerError> {
    cfg.validate()?;
    let problem = Problem::from_config(cfg)?;
    let objective = problem.objective();
    if design.len() != objective.bounds().dim() {
        return Err(RunnerError::Config(ConfigError::Invalid(format!(
            "design has {} values, problem expects {}",
            design.len(),
            objective.bounds().dim()
        ))));
    }
    if !objective.bounds().contains(design) {
        return Err(RunnerError::Config(ConfigError::Invalid("design lies outside the bounds".into())));
    }
    let x = DesignVector(design.to_vec());
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    }
    let summary = match &problem {
        Problem::Axisym(p) => match p.analyze(&x) {
            Ok(eval) => {
                if let Some(dir) = out {
                    eval.profile
                        .write_csv(&dir.join("profile.csv"))
                        .map_err(io_err("writing profile.csv"))?;
                    write_traction_csv(&eval.mesh, &eval.drag, &dir.join("traction.csv"))
                        .map_err(|e| csv_err("writing traction.csv", e))?;
                }
                let mut s = axisym_summary(&eval);
                s["score"] = (-eval.drag.d_r).into();
                s["status"] = "ok".into();
                s
            }
            Err(e) => serde_json::json!({"score": p.penalty, "status": "failed", "error": e.0}),
        },
        Problem::Airfoil(p) => {
            let curve = p.curve_for(&x);
            if let (Some(dir), Ok(c)) = (out, &curve) {
                fs::write(dir.join("geometry.dat"), geometry_file_contents(c))
                    .map_err(io_err("writing geometry.dat"))?;
            }
            match p.performance(&x) {
                Ok(perf) => serde_json::json!({
                    "score": objective.evaluate(&x).unwrap_or(objective.penalty()),
                    "status": "ok",
                    "lift": perf.lift,
                    "drag": perf.drag,
                    "ratio": perf.ratio,
                }),
                Err(e) => serde_json::json!({
                    "score": objective.penalty(),
                    "status": "failed",
                    "error": e.0,
                }),
            }
        }
        Problem::Analytic(q) => match objective.evaluate(&x) {
            Ok(s) => serde_json::json!({"score": s, "status": "ok", "center": q.center}),
            Err(e) => serde_json::json!({"score": objective.penalty(), "status": "failed", "error": e.0}),
        },
    };
    if let Some(dir) = out {
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        fs::write(dir.join("evaluation.json"), text + "\n").map_err(io_err("writing evaluation.json"))?;
    }
    Ok(summary)
}
