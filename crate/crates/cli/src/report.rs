//! Per-scenario, per-solver summaries of a results table, joined with descriptor reports.

use anyhow::{bail, Context as _, Result};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

use orbsched_core::io::read_json;
use orbsched_core::Descriptors;

use crate::util::{fmt_f64, fmt_opt};

#[derive(Debug, Clone, Deserialize)]
pub struct ResultRow {
    pub level: String,
    pub scenario: String,
    pub solver: String,
    pub seed: String,
    #[serde(default)]
    pub status: String,
    pub tp: Option<f64>,
    pub tcr: Option<f64>,
    pub bd: Option<f64>,
    pub tm: Option<f64>,
    pub composite: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
struct RuntimeRow {
    level: String,
    scenario: String,
    solver: String,
    seed: String,
    rt_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub solver: String,
    pub runs: usize,
    pub failed: usize,
    /// tp, tcr, bd, tm, rt_s, composite
    pub means: [Option<f64>; 6],
    pub descriptors: Option<Descriptors>,
}

pub const METRIC_COLUMNS: [&str; 6] = ["tp", "tcr", "bd", "tm", "rt_s", "composite"];

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = rdr.deserialize().collect::<Result<Vec<ResultRow>, _>>()?;
    Ok(rows)
}

/// Groups instance-level rows; scenario-level rows already in the table are recomputed, not trusted.
pub fn summarise(
    rows: &[ResultRow],
    runtimes: Option<&Path>,
    descriptors_dir: Option<&Path>,
) -> Result<Vec<SummaryRow>> {
    let inst_rows: Vec<&ResultRow> = rows.iter().filter(|r| r.level == "instance").collect();
    if inst_rows.is_empty() {
        bail!("results table has no instance rows");
    }
    let mut rt: BTreeMap<(String, String, String), f64> = BTreeMap::new();
    if let Some(path) = runtimes {
        let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        for row in rdr.deserialize::<RuntimeRow>() {
            let row = row?;
            if let (true, Some(v)) = (row.level == "instance", row.rt_s) {
                rt.insert((row.scenario, row.solver, row.seed), v);
            }
        }
    }

    let mut groups: BTreeMap<(&str, &str), Vec<&ResultRow>> = BTreeMap::new();
    for r in inst_rows {
        groups.entry((r.scenario.as_str(), r.solver.as_str())).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((scenario, solver), rs) in groups {
        let ok: Vec<&&ResultRow> = rs.iter().filter(|r| r.status != "error" && r.tp.is_some()).collect();
        let col = |f: &dyn Fn(&ResultRow) -> Option<f64>| mean(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
        let rts: Vec<f64> = ok
            .iter()
            .filter_map(|r| rt.get(&(r.scenario.clone(), r.solver.clone(), r.seed.clone())).copied())
            .collect();
        let descriptors = descriptors_dir.and_then(|d| read_json::<Descriptors>(&d.join(format!("{scenario}.json"))).ok());
        out.push(SummaryRow {
            scenario: scenario.to_string(),
            solver: solver.to_string(),
            runs: ok.len(),
            failed: rs.len() - ok.len(),
            means: [col(&|r| r.tp), col(&|r| r.tcr), col(&|r| r.bd), col(&|r| r.tm), mean(&rts), col(&|r| r.composite)],
            descriptors,
        });
    }
    Ok(out)
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<&str> = vec!["scenario", "solver", "runs", "failed"];
    header.extend(METRIC_COLUMNS);
    header.push("descriptors_missing");
    header.extend(Descriptors::NAMES);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.scenario.clone(), r.solver.clone(), r.runs.to_string(), r.failed.to_string()];
        rec.extend(r.means.iter().map(|m| fmt_opt(*m)));
        rec.push(r.descriptors.is_none().to_string());
        match &r.descriptors {
            Some(d) => rec.extend(d.values().iter().map(|v| fmt_f64(*v))),
            None => rec.extend(std::iter::repeat_n(String::new(), 10)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
