//! Campaign runner: (scenario, seed, solver) triples with per-triple result files,
//! an instance cache, and deterministic merged tables.

use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use orbsched_core::characterise::{aggregate, characterise};
use orbsched_core::feasibility::validate_schedule;
use orbsched_core::generator::{find_template, generate_instance_with, ScenarioTemplate};
use orbsched_core::io::{digest, read_json};
use orbsched_core::metrics::{evaluate, MetricReport};
use orbsched_core::{Descriptors, Instance, SolveStatus};
use orbsched_solvers::{solve, SolverConfig};

use crate::util::{fmt_f64, fmt_opt, write_json_atomic};

pub const CACHE_ENV: &str = "ORBSCHED_CACHE";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub name: String,
    pub scenarios: Vec<String>,
    pub seeds: Vec<usize>,
    pub solvers: Vec<SolverConfig>,
    /// Overrides the default opportunity slot spacing for every generated instance.
    #[serde(default)]
    pub slot_step_s: Option<f64>,
    /// Also compute descriptor reports at instance and scenario level.
    #[serde(default)]
    pub characterise: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub scenario: String,
    pub seed: usize,
    pub config: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub key: String,
    pub scenario: String,
    pub seed: usize,
    pub solver: String,
    pub instance_id: String,
    pub status: Option<SolveStatus>,
    pub metrics: Option<MetricReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CampaignSummary {
    pub total: usize,
    pub computed: usize,
    pub skipped: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct CampaignOptions {
    pub out: PathBuf,
    pub jobs: usize,
    /// Instance cache; defaults to `$ORBSCHED_CACHE`, then `<out>/cache`.
    pub cache: Option<PathBuf>,
    /// Stop after this many new runs, leaving the rest for a later resume.
    pub max_new_runs: Option<usize>,
}

impl Manifest {
    /// Every triple in (scenario, seed, solver) order; rejects duplicates and unknown scenarios.
    pub fn triples(&self) -> Result<Vec<Triple>> {
        if self.scenarios.is_empty() || self.seeds.is_empty() || self.solvers.is_empty() {
            bail!("manifest needs at least one scenario, seed and solver");
        }
        for s in &self.scenarios {
            if find_template(s).is_none() {
                bail!("unknown scenario {s:?}");
            }
        }
        let mut labels = BTreeSet::new();
        for c in &self.solvers {
            c.check().with_context(|| format!("solver {}", c.label()))?;
            if !labels.insert(c.label()) {
                bail!("two solver entries share the label {}", c.label());
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in &self.scenarios {
            for &seed in &self.seeds {
                for c in &self.solvers {
                    if !seen.insert((s.clone(), seed, c.label())) {
                        bail!("duplicate triple ({s}, {seed}, {})", c.label());
                    }
                    out.push(Triple { scenario: s.clone(), seed, config: c.clone() });
                }
            }
        }
        Ok(out)
    }
}

fn short(hex: String) -> String {
    hex[..16].to_string()
}

fn run_key(t: &Triple, slot: Option<f64>) -> Result<String> {
    let template = find_template(&t.scenario).expect("checked in triples()");
    Ok(short(digest(&(&template, t.seed, &t.config, slot))?))
}

fn instance_key(template: &ScenarioTemplate, seed: usize, slot: Option<f64>) -> Result<String> {
    Ok(short(digest(&(template, seed, slot))?))
}

pub fn cache_dir(opts: &CampaignOptions) -> PathBuf {
    opts.cache
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| opts.out.join("cache"))
}

/// Loads a cached instance or generates and caches it.
pub fn cached_instance(cache: &Path, scenario: &str, seed: usize, slot: Option<f64>) -> Result<Instance> {
    let template = find_template(scenario).with_context(|| format!("unknown scenario {scenario:?}"))?;
    let path = cache.join("instances").join(format!("{scenario}-i{seed}-{}.json", instance_key(&template, seed, slot)?));
    if let Ok(inst) = read_json::<Instance>(&path) {
        return Ok(inst);
    }
    let inst = generate_instance_with(&template, seed, slot)?;
    write_json_atomic(&path, &inst)?;
    Ok(inst)
}

fn cached_descriptors(cache: &Path, inst: &Instance, key: &str) -> Result<Descriptors> {
    let path = cache.join("descriptors").join(format!("{}-{key}.json", inst.id));
    if let Ok(r) = read_json::<Descriptors>(&path) {
        return Ok(r);
    }
    let r = characterise::<f64>(inst, None)?;
    write_json_atomic(&path, &r)?;
    Ok(r)
}

fn execute(inst: &Instance, t: &Triple, key: &str, out: &Path) -> RunRecord {
    let mut rec = RunRecord {
        key: key.to_string(),
        scenario: t.scenario.clone(),
        seed: t.seed,
        solver: t.config.label(),
        instance_id: inst.id.clone(),
        status: None,
        metrics: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let started = Instant::now();
        let schedule = solve(inst, &t.config)?;
        let rt = started.elapsed().as_secs_f64();
        let report = validate_schedule(&schedule, inst)?;
        write_json_atomic(&out.join("runs").join(format!("{key}.schedule.json")), &schedule)?;
        if !report.feasible {
            bail!("solver returned an infeasible schedule ({} violations)", report.violations.len());
        }
        rec.status = Some(schedule.status);
        rec.metrics = Some(evaluate(&schedule, inst, rt)?);
        Ok(())
    })();
    if let Err(e) = result {
        rec.error = Some(format!("{e:#}"));
    }
    rec
}

fn record_path(out: &Path, key: &str) -> PathBuf {
    out.join("runs").join(format!("{key}.json"))
}

fn load_record(out: &Path, key: &str) -> Option<RunRecord> {
    read_json::<RunRecord>(&record_path(out, key)).ok().filter(|r| r.key == key)
}

pub fn run_campaign(manifest: &Manifest, opts: &CampaignOptions) -> Result<CampaignSummary> {
    let triples = manifest.triples()?;
    let slot = manifest.slot_step_s;
    let keys: Vec<String> = triples.iter().map(|t| run_key(t, slot)).collect::<Result<_>>()?;
    let out = opts.out.as_path();
    std::fs::create_dir_all(out.join("runs"))?;
    write_json_atomic(&out.join("manifest.json"), manifest)?;
    let cache = cache_dir(opts);

    // group pending work by instance so each one is generated or loaded once
    let mut groups: BTreeMap<(String, usize), Vec<usize>> = BTreeMap::new();
    let mut skipped = 0;
    for (i, t) in triples.iter().enumerate() {
        let entry = groups.entry((t.scenario.clone(), t.seed)).or_default();
        if load_record(out, &keys[i]).is_some() {
            skipped += 1;
        } else {
            entry.push(i);
        }
    }
    let mut budget = opts.max_new_runs.unwrap_or(usize::MAX);
    let mut work: Vec<((String, usize), Vec<usize>)> = Vec::new();
    for (g, mut idx) in groups {
        idx.truncate(budget);
        budget -= idx.len();
        if !idx.is_empty() || manifest.characterise {
            work.push((g, idx));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.max(1)).build()?;
    let descriptor_rows: Vec<((String, usize), Option<Descriptors>)> = pool.install(|| {
        work.par_iter()
            .map(|((scenario, seed), idx)| {
                let inst = cached_instance(&cache, scenario, *seed, slot);
                let desc = match (&inst, manifest.characterise) {
                    (Ok(inst), true) => {
                        let template = find_template(scenario).expect("checked");
                        instance_key(&template, *seed, slot)
                            .and_then(|k| cached_descriptors(&cache, inst, &k))
                            .map_err(|e| log::warn!("descriptors for {scenario} seed {seed}: {e:#}"))
                            .ok()
                    }
                    _ => None,
                };
                idx.par_iter().for_each(|&i| {
                    let t = &triples[i];
                    let rec = match &inst {
                        Ok(inst) => execute(inst, t, &keys[i], out),
                        Err(e) => RunRecord {
                            key: keys[i].clone(),
                            scenario: t.scenario.clone(),
                            seed: t.seed,
                            solver: t.config.label(),
                            instance_id: format!("{}-i{}", t.scenario, t.seed),
                            status: None,
                            metrics: None,
                            error: Some(format!("instance generation failed: {e:#}")),
                        },
                    };
                    if let Some(err) = &rec.error {
                        log::warn!("{} seed {} {}: {err}", rec.scenario, rec.seed, rec.solver);
                    }
                    if let Err(e) = write_json_atomic(&record_path(out, &keys[i]), &rec) {
                        log::error!("cannot write run record {}: {e:#}", keys[i]);
                    }
                });
                ((scenario.clone(), *seed), desc)
            })
            .collect()
    });
    let computed: usize = work.iter().map(|(_, idx)| idx.len()).sum();

    if manifest.characterise {
        write_scenario_descriptors(out, &descriptor_rows)?;
    }

    let records: Vec<Option<RunRecord>> = keys.iter().map(|k| load_record(out, k)).collect();
    let failed = records.iter().flatten().filter(|r| r.error.is_some()).count();
    if records.iter().all(Option::is_some) {
        let records: Vec<RunRecord> = records.into_iter().flatten().collect();
        write_tables(out, &triples, &records)?;
    }
    Ok(CampaignSummary { total: triples.len(), computed, skipped, failed })
}

fn write_scenario_descriptors(out: &Path, rows: &[((String, usize), Option<Descriptors>)]) -> Result<()> {
    let mut by_scenario: BTreeMap<&str, Vec<Descriptors>> = BTreeMap::new();
    for ((scenario, _), d) in rows {
        if let Some(d) = d {
            by_scenario.entry(scenario.as_str()).or_default().push(*d);
        }
    }
    for (scenario, reports) in by_scenario {
        write_json_atomic(&out.join("descriptors").join(format!("{scenario}.json")), &aggregate(&reports)?)?;
    }
    Ok(())
}

pub const RESULT_COLUMNS: [&str; 13] =
    ["level", "scenario", "solver", "seed", "instance", "status", "runs", "tp", "tcr", "bd", "tm", "composite", "error"];
pub const RUNTIME_COLUMNS: [&str; 6] = ["level", "scenario", "solver", "seed", "instance", "rt_s"];

fn status_tag(s: Option<SolveStatus>) -> &'static str {
    match s {
        Some(SolveStatus::Optimal) => "optimal",
        Some(SolveStatus::Incomplete) => "incomplete",
        Some(SolveStatus::Heuristic) => "heuristic",
        None => "error",
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Instance rows in (scenario, solver, seed) order, each group followed by its scenario-level row.
/// Wall-clock times go to a separate table so the results table stays reproducible.
fn write_tables(out: &Path, triples: &[Triple], records: &[RunRecord]) -> Result<()> {
    let mut order: Vec<usize> = (0..triples.len()).collect();
    order.sort_by(|&a, &b| {
        (&records[a].scenario, &records[a].solver, records[a].seed).cmp(&(&records[b].scenario, &records[b].solver, records[b].seed))
    });
    let mut res = csv::Writer::from_writer(Vec::new());
    let mut rts = csv::Writer::from_writer(Vec::new());
    res.write_record(RESULT_COLUMNS)?;
    rts.write_record(RUNTIME_COLUMNS)?;

    let mut i = 0;
    while i < order.len() {
        let head = &records[order[i]];
        let mut j = i;
        let mut cols: [Vec<f64>; 6] = Default::default();
        while j < order.len() && records[order[j]].scenario == head.scenario && records[order[j]].solver == head.solver {
            let r = &records[order[j]];
            let seed = r.seed.to_string();
            match &r.metrics {
                Some(m) => {
                    res.write_record([
                        "instance",
                        &r.scenario,
                        &r.solver,
                        &seed,
                        &r.instance_id,
                        status_tag(r.status),
                        "1",
                        &fmt_f64(m.tp),
                        &fmt_f64(m.tcr),
                        &fmt_opt(m.bd),
                        &fmt_f64(m.tm),
                        &fmt_f64(m.composite_all),
                        "",
                    ])?;
                    rts.write_record(["instance", &r.scenario, &r.solver, &seed, &r.instance_id, &fmt_f64(m.rt_s)])?;
                    cols[0].push(m.tp);
                    cols[1].push(m.tcr);
                    if let Some(bd) = m.bd {
                        cols[2].push(bd);
                    }
                    cols[3].push(m.tm);
                    cols[4].push(m.composite_all);
                    cols[5].push(m.rt_s);
                }
                None => {
                    let err = r.error.clone().unwrap_or_default();
                    res.write_record([
                        "instance", &r.scenario, &r.solver, &seed, &r.instance_id, "error", "0", "", "", "", "", "", &err,
                    ])?;
                    rts.write_record(["instance", &r.scenario, &r.solver, &seed, &r.instance_id, ""])?;
                }
            }
            j += 1;
        }
        let runs = cols[0].len().to_string();
        res.write_record([
            "scenario",
            &head.scenario,
            &head.solver,
            "",
            "",
            "",
            &runs,
            &fmt_opt(mean(&cols[0])),
            &fmt_opt(mean(&cols[1])),
            &fmt_opt(mean(&cols[2])),
            &fmt_opt(mean(&cols[3])),
            &fmt_opt(mean(&cols[4])),
            "",
        ])?;
        rts.write_record(["scenario", &head.scenario, &head.solver, "", "", &fmt_opt(mean(&cols[5]))])?;
        i = j;
    }
    std::fs::write(out.join("results.csv"), res.into_inner()?)?;
    std::fs::write(out.join("runtimes.csv"), rts.into_inner()?)?;
    Ok(())
}
