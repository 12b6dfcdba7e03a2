use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use orbsched_core::characterise::{aggregate, characterise};
use orbsched_core::feasibility::validate_schedule;
use orbsched_core::generator::scenarios::{Family, ScenarioExtras};
use orbsched_core::generator::{
    enumerate_all, enumerate_specific, enumerate_standard, generate_instance_with, subsample_instance, ScenarioTemplate,
    SubsampleRanges, SubsampleRequest,
};
use orbsched_core::io::read_json;
use orbsched_core::metrics::evaluate;
use orbsched_core::validate::validate_instance;
use orbsched_core::{Descriptors, Instance, Platform, ProfileName, Schedule};
use orbsched_solvers::{solve, Objective, SolverConfig, SolverKind};

use crate::campaign::{run_campaign, CampaignOptions, Manifest, CACHE_ENV};
use crate::report::{read_results, summarise, write_summary};
use crate::scene::{export_scene, to_czml, DEFAULT_TRACK_STEP_S};
use crate::util::{fmt_f64, fmt_opt, write_json_atomic};

#[derive(Debug, Parser)]
#[command(name = "orbsched", version, about = "Earth-observation satellite scheduling benchmark")]
pub struct Cli {
    /// Seed for solvers and sub-sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the scenario manifest (template list) as JSON.
    Enumerate(Select),
    /// Generate instances for a family or a set of scenarios.
    Generate(GenerateArgs),
    /// Draw a new instance from a library of instances.
    Subsample(SubsampleArgs),
    /// Compute descriptor reports for an instance or a directory of instances.
    Characterise(CharacteriseArgs),
    /// Solve one instance; also writes a feasibility report next to the schedule.
    Solve(SolveArgs),
    /// Check a schedule against its instance; exits non-zero when infeasible.
    Validate(PairArgs),
    /// Metrics table for one or more schedules of an instance.
    Evaluate(EvaluateArgs),
    /// Run a manifest of (scenario, seed, solver) triples.
    Campaign(CampaignArgs),
    /// Export a scene file with ground tracks, targets and observation links.
    ExportScene(SceneArgs),
    /// Summarise a results table, joining descriptor reports.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Select {
    /// standard | capacity | agility | constellation | realistic
    #[arg(long)]
    pub family: Option<String>,
    /// Keep templates whose id contains this text.
    #[arg(long)]
    pub filter: Option<String>,
    /// Exact template ids (repeatable).
    #[arg(long = "scenario")]
    pub scenarios: Vec<String>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub select: Select,
    /// Seed indices: `0..9` (inclusive), `3`, or `0,2,5`.
    #[arg(long, default_value = "0..9")]
    pub seeds: String,
    /// Replace the agility profile of agile templates: high | standard | low | limited.
    #[arg(long)]
    pub agility: Option<String>,
    /// Opportunity slot spacing in seconds (default depends on task count).
    #[arg(long)]
    pub slot_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SubsampleArgs {
    /// Directory of instance files.
    #[arg(long)]
    pub library: PathBuf,
    #[arg(long)]
    pub sats: String,
    #[arg(long)]
    pub tasks: String,
    /// Horizon range in hours, e.g. `6..24`.
    #[arg(long)]
    pub horizon_h: String,
    #[arg(long, default_value_t = orbsched_core::generator::subsample::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = orbsched_core::generator::subsample::DEFAULT_MAX_ATTEMPTS)]
    pub max_attempts: usize,
    #[arg(long)]
    pub platform: Option<String>,
}

#[derive(Debug, Args)]
pub struct CharacteriseArgs {
    /// Instance file or directory.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Analysis step in seconds (default depends on task count).
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "greedy-tp")]
    pub solver: String,
    #[arg(long, default_value = "tp")]
    pub objective: String,
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// JSON solver configuration; command-line flags override its solver, objective and seed.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Schedule files (repeatable).
    #[arg(long = "schedule", required = true)]
    pub schedules: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Instance cache directory.
    #[arg(long, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Stop after this many new runs; a later invocation resumes.
    #[arg(long)]
    pub max_new_runs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRACK_STEP_S)]
    pub step: f64,
    /// Also write the scene as CZML.
    #[arg(long)]
    pub czml: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub results: PathBuf,
    /// Runtime table written next to the results by `campaign`.
    #[arg(long)]
    pub runtimes: Option<PathBuf>,
    /// Directory of scenario-level descriptor reports named `<scenario>.json`.
    #[arg(long)]
    pub descriptors: Option<PathBuf>,
}

/// `a..b` or `a..=b` (both inclusive), a single value, or a comma list.
pub fn parse_seeds(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().context("range start")?;
        let b: usize = b.trim().trim_start_matches('=').parse().context("range end")?;
        if b < a {
            bail!("empty seed range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse::<usize>().with_context(|| format!("bad seed {x:?}"))).collect()
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T)>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    match s.split_once("..") {
        Some((a, b)) => Ok((a.trim().parse()?, b.trim().trim_start_matches('=').parse()?)),
        None => {
            let v: T = s.trim().parse()?;
            let w: T = s.trim().parse()?;
            Ok((v, w))
        }
    }
}

pub fn parse_platform(s: &str) -> Result<Platform> {
    match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
        "agile" => Ok(Platform::Agile),
        "nonagile" => Ok(Platform::NonAgile),
        _ => bail!("unknown platform {s:?}"),
    }
}

pub fn select_templates(sel: &Select) -> Result<Vec<ScenarioTemplate>> {
    let pool = match &sel.family {
        None => enumerate_all(),
        Some(f) => {
            let fam = Family::parse(f).ok_or_else(|| anyhow!("unknown family {f:?}"))?;
            let src = if fam == Family::Standard { enumerate_standard() } else { enumerate_specific() };
            src.into_iter().filter(|t| t.family == fam).collect()
        }
    };
    let mut out: Vec<ScenarioTemplate> = pool
        .into_iter()
        .filter(|t| sel.filter.as_ref().is_none_or(|f| t.id.contains(f.as_str())))
        .filter(|t| sel.scenarios.is_empty() || sel.scenarios.contains(&t.id))
        .collect();
    for id in &sel.scenarios {
        if !out.iter().any(|t| &t.id == id) {
            bail!("scenario {id:?} not found in the selection");
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out.dedup_by(|a, b| a.id == b.id);
    Ok(out)
}

fn with_agility(mut t: ScenarioTemplate, name: ProfileName) -> Result<ScenarioTemplate> {
    if t.platform != Platform::Agile {
        return Ok(t);
    }
    if !matches!(t.extras, ScenarioExtras::None | ScenarioExtras::Agility(_)) {
        bail!("template {} already varies another parameter; --agility applies to plain agile templates", t.id);
    }
    t.extras = ScenarioExtras::Agility(name);
    t.id = format!("{}-agi{}", t.id, format!("{name:?}").to_ascii_lowercase());
    Ok(t)
}

fn out_path(cli_out: &Option<PathBuf>) -> Result<&Path> {
    cli_out.as_deref().ok_or_else(|| anyhow!("--out is required for this command"))
}

fn emit_json<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    match out {
        Some(p) => write_json_atomic(p, value),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{}", orbsched_core::io::to_canonical_json(value)?)?;
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let inst: Instance = read_json(path).with_context(|| format!("reading instance {}", path.display()))?;
    validate_instance(&inst).with_context(|| format!("instance {}", path.display()))?;
    Ok(inst)
}

fn load_schedule(path: &Path) -> Result<Schedule> {
    read_json(path).with_context(|| format!("reading schedule {}", path.display()))
}

/// Template list written next to generated instances; skipped when reading instance directories.
pub const SCENARIO_MANIFEST: &str = "scenarios.manifest.json";

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter(|p| !p.to_string_lossy().ends_with(SCENARIO_MANIFEST))
        .collect();
    v.sort();
    Ok(v)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let n = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    Ok(rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?)
}

/// Schedule path `x.json` → `x.feasibility.json`.
pub fn feasibility_path(schedule: &Path) -> PathBuf {
    let stem = schedule.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    schedule.with_file_name(format!("{stem}.feasibility.json"))
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Enumerate(sel) => emit_json(&cli.out, &select_templates(sel)?),
        Command::Generate(a) => {
            let out = out_path(&cli.out)?;
            let seeds = parse_seeds(&a.seeds)?;
            let mut templates = select_templates(&a.select)?;
            if let Some(name) = &a.agility {
                let name: ProfileName = name.parse()?;
                templates = templates.into_iter().map(|t| with_agility(t, name)).collect::<Result<_>>()?;
            }
            std::fs::create_dir_all(out)?;
            write_json_atomic(&out.join(SCENARIO_MANIFEST), &templates)?;
            let jobs: Vec<(&ScenarioTemplate, usize)> = templates.iter().flat_map(|t| seeds.iter().map(move |&s| (t, s))).collect();
            pool(cli.jobs)?.install(|| {
                jobs.par_iter().try_for_each(|&(t, s)| -> Result<()> {
                    let inst = generate_instance_with(t, s, a.slot_step).with_context(|| format!("{} seed {s}", t.id))?;
                    write_json_atomic(&out.join(format!("{}.json", inst.id)), &inst)
                })
            })?;
            eprintln!("generated {} instances in {}", jobs.len(), out.display());
            Ok(())
        }
        Command::Subsample(a) => {
            let library = json_files(&a.library)?
                .iter()
                .map(|p| load_instance(p))
                .collect::<Result<Vec<_>>>()?;
            let ranges = SubsampleRanges {
                satellites: parse_range(&a.sats)?,
                tasks: parse_range(&a.tasks)?,
                horizon_s: {
                    let (lo, hi): (f64, f64) = parse_range(&a.horizon_h)?;
                    (lo * 3600.0, hi * 3600.0)
                },
            };
            let mut req = SubsampleRequest::new(ranges, cli.seed);
            req.alpha = a.alpha;
            req.max_attempts = a.max_attempts;
            req.platform = a.platform.as_deref().map(parse_platform).transpose()?;
            let inst = subsample_instance(&library, &req)?;
            if inst.provenance.fallback {
                eprintln!("no acceptable sample after {} attempts; returned the fallback instance", req.max_attempts);
            }
            emit_json(&cli.out, &inst)
        }
        Command::Characterise(a) => {
            if a.input.is_dir() {
                let out = out_path(&cli.out)?;
                let files = json_files(&a.input)?;
                let reports: Vec<(Instance, Descriptors)> = pool(cli.jobs)?.install(|| {
                    files
                        .par_iter()
                        .map(|p| {
                            let inst = load_instance(p)?;
                            let r = characterise::<f64>(&inst, a.step)?;
                            Ok((inst, r))
                        })
                        .collect::<Result<_>>()
                })?;
                let mut by_scenario: BTreeMap<String, Vec<Descriptors>> = BTreeMap::new();
                for (inst, r) in &reports {
                    write_json_atomic(&out.join("instances").join(format!("{}.json", inst.id)), r)?;
                    by_scenario.entry(inst.provenance.scenario_id.clone()).or_default().push(*r);
                }
                for (scenario, rs) in by_scenario {
                    write_json_atomic(&out.join("scenarios").join(format!("{scenario}.json")), &aggregate(&rs)?)?;
                }
                Ok(())
            } else {
                let inst = load_instance(&a.input)?;
                emit_json(&cli.out, &characterise::<f64>(&inst, a.step)?)
            }
        }
        Command::Solve(a) => {
            let out = out_path(&cli.out)?;
            let inst = load_instance(&a.input)?;
            let mut cfg: SolverConfig = match &a.config {
                Some(p) => read_json(p).with_context(|| format!("reading {}", p.display()))?,
                None => SolverConfig::default(),
            };
            cfg.solver = a.solver.parse::<SolverKind>()?;
            cfg.objective = a.objective.parse::<Objective>()?;
            cfg.seed = cli.seed;
            if let Some(t) = a.time_limit {
                cfg.time_limit_s = t;
            }
            let schedule = solve(&inst, &cfg)?;
            let report = validate_schedule(&schedule, &inst)?;
            write_json_atomic(out, &schedule)?;
            write_json_atomic(&feasibility_path(out), &report)?;
            eprintln!(
                "{}: {} of {} tasks, {:?}, {:.3} s",
                cfg.label(),
                schedule.assignments.len(),
                inst.tasks.len(),
                schedule.status,
                schedule.wall_time_s
            );
            Ok(())
        }
        Command::Validate(a) => {
            let inst = load_instance(&a.instance)?;
            let schedule = load_schedule(&a.schedule)?;
            let report = validate_schedule(&schedule, &inst)?;
            emit_json(&cli.out, &report)?;
            if !report.feasible {
                bail!("schedule is infeasible ({} violations)", report.violations.len());
            }
            Ok(())
        }
        Command::Evaluate(a) => {
            let inst = load_instance(&a.instance)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["instance", "solver", "tp", "tcr", "bd", "tm", "rt_s", "composite"])?;
            for p in &a.schedules {
                let s = load_schedule(p)?;
                let m = evaluate(&s, &inst, s.wall_time_s).with_context(|| format!("evaluating {}", p.display()))?;
                w.write_record([
                    inst.id.clone(),
                    s.solver.clone(),
                    fmt_f64(m.tp),
                    fmt_f64(m.tcr),
                    fmt_opt(m.bd),
                    fmt_f64(m.tm),
                    fmt_f64(m.rt_s),
                    fmt_f64(m.composite_all),
                ])?;
            }
            let bytes = w.into_inner()?;
            match &cli.out {
                Some(p) => std::fs::write(p, bytes)?,
                None => std::io::stdout().lock().write_all(&bytes)?,
            }
            Ok(())
        }
        Command::Campaign(a) => {
            let manifest: Manifest = read_json(&a.manifest).with_context(|| format!("reading {}", a.manifest.display()))?;
            let opts = CampaignOptions {
                out: out_path(&cli.out)?.to_path_buf(),
                jobs: cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
                cache: a.cache.clone(),
                max_new_runs: a.max_new_runs,
            };
            let s = run_campaign(&manifest, &opts)?;
            eprintln!("{} triples: {} run, {} reused, {} failed", s.total, s.computed, s.skipped, s.failed);
            Ok(())
        }
        Command::ExportScene(a) => {
            let inst = load_instance(&a.instance)?;
            let schedule = load_schedule(&a.schedule)?;
            let scene = export_scene(&inst, &schedule, a.step)?;
            if let Some(p) = &a.czml {
                write_json_atomic(p, &to_czml(&scene))?;
            }
            emit_json(&cli.out, &scene)
        }
        Command::Report(a) => {
            let out = out_path(&cli.out)?;
            let rows = read_results(&a.results)?;
            let summary = summarise(&rows, a.runtimes.as_deref(), a.descriptors.as_deref())?;
            write_summary(&summary, out)?;
            let missing = summary.iter().filter(|r| r.descriptors.is_none()).count();
            if missing > 0 && a.descriptors.is_some() {
                eprintln!("{missing} summary rows have no descriptor report");
            }
            Ok(())
        }
    }
}
