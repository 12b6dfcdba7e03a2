//! Training instances drawn from a library by sub-sampling satellites, tasks and horizon.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

use super::build::build_access;
use crate::error::{Error, Result};
use crate::io::content_digest;
use crate::model::{Instance, Platform, Provenance, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleRanges {
    pub satellites: (usize, usize),
    pub tasks: (usize, usize),
    pub horizon_s: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleRequest {
    pub ranges: SubsampleRanges,
    pub max_attempts: usize,
    /// Minimum share of tasks that keep at least one opportunity.
    pub alpha: f64,
    pub seed: u64,
    /// Restricts parents to one platform.
    pub platform: Option<Platform>,
}

pub const DEFAULT_MAX_ATTEMPTS: usize = 2000;
pub const DEFAULT_ALPHA: f64 = 0.5;

impl SubsampleRequest {
    pub fn new(ranges: SubsampleRanges, seed: u64) -> Self {
        Self { ranges, max_attempts: DEFAULT_MAX_ATTEMPTS, alpha: DEFAULT_ALPHA, seed, platform: None }
    }
}

/// Earliest window start and latest window end per task, as fractions of the parent horizon.
fn normalised_spans(parent: &Instance) -> HashMap<&str, (f64, f64)> {
    let mut spans: HashMap<&str, (f64, f64)> = HashMap::new();
    for w in &parent.visible_windows {
        let e = spans.entry(w.task_id.as_str()).or_insert((f64::INFINITY, f64::NEG_INFINITY));
        e.0 = e.0.min(w.start_s);
        e.1 = e.1.max(w.end_s);
    }
    spans.into_iter().map(|(k, (a, b))| (k, (a / parent.horizon_s, b / parent.horizon_s))).collect()
}

fn check(req: &SubsampleRequest, library: &[Instance]) -> Result<()> {
    let r = &req.ranges;
    if library.is_empty() {
        return Err(Error::domain("sub-sampling needs a non-empty library"));
    }
    if req.max_attempts == 0 {
        return Err(Error::domain("max_attempts must be at least 1"));
    }
    if r.satellites.0 == 0 || r.satellites.0 > r.satellites.1 || r.tasks.0 == 0 || r.tasks.0 > r.tasks.1 {
        return Err(Error::domain("satellite and task ranges must be non-empty and start at 1 or more"));
    }
    if !(r.horizon_s.0 > 0.0 && r.horizon_s.0 <= r.horizon_s.1) {
        return Err(Error::domain("horizon range must be positive and ordered"));
    }
    if !(0.0..=1.0).contains(&req.alpha) {
        return Err(Error::domain("alpha must lie in [0, 1]"));
    }
    Ok(())
}

pub fn subsample_instance(library: &[Instance], req: &SubsampleRequest) -> Result<Instance> {
    check(req, library)?;
    let pool: Vec<&Instance> = library.iter().filter(|p| req.platform.is_none_or(|pl| p.platform == pl)).collect();
    let known: HashSet<String> = library.iter().map(content_digest).collect::<Result<_>>()?;
    let spans: Vec<HashMap<&str, (f64, f64)>> = pool.iter().map(|p| normalised_spans(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let r = &req.ranges;

    for attempt in 0..req.max_attempts {
        let horizon = if r.horizon_s.0 == r.horizon_s.1 { r.horizon_s.0 } else { rng.gen_range(r.horizon_s.0..=r.horizon_s.1) };
        let n_s = rng.gen_range(r.satellites.0..=r.satellites.1);
        let n_t = rng.gen_range(r.tasks.0..=r.tasks.1);
        let parents: Vec<usize> = (0..pool.len())
            .filter(|&i| {
                let p = pool[i];
                p.satellites.len() >= n_s && p.tasks.len() >= n_t && p.horizon_s >= horizon
            })
            .collect();
        if parents.is_empty() {
            continue;
        }
        let pi = parents[rng.gen_range(0..parents.len())];
        let parent = pool[pi];

        let mut sat_idx = sample(&mut rng, parent.satellites.len(), n_s).into_vec();
        sat_idx.sort_unstable();
        let mut task_idx = sample(&mut rng, parent.tasks.len(), n_t).into_vec();
        task_idx.sort_unstable();

        let shift = rng.gen_range(0.0..horizon);
        let mut tasks = Vec::with_capacity(n_t);
        let mut clip = Vec::with_capacity(n_t);
        for &ti in &task_idx {
            let task = &parent.tasks[ti];
            let (rh, dh) = spans[pi].get(task.id.as_str()).copied().unwrap_or((0.0, 1.0));
            let lo = (rh * horizon + shift).clamp(0.0, horizon);
            let hi = (dh * horizon + shift).clamp(0.0, horizon);
            if hi >= lo + task.duration_s {
                tasks.push(task.clone());
                clip.push((lo, hi));
            }
        }
        if tasks.len() < n_t {
            continue;
        }

        let satellites: Vec<_> = sat_idx.iter().map(|&i| parent.satellites[i].clone()).collect();
        let (visible_windows, opportunities) = build_access(&satellites, &tasks, horizon, &parent.epoch, Some(&clip), None)?;
        let served: HashSet<&str> = opportunities.iter().map(|o| o.task_id.as_str()).collect();
        let ratio = served.len() as f64 / tasks.len() as f64;
        if ratio < req.alpha {
            continue;
        }
        let candidate = Instance {
            schema_version: SCHEMA_VERSION,
            id: format!("sub-{}-a{attempt}", req.seed),
            epoch: parent.epoch,
            horizon_s: horizon,
            platform: parent.platform,
            satellites,
            tasks,
            visible_windows,
            opportunities,
            fixed_transition_s: parent.fixed_transition_s,
            provenance: Provenance {
                scenario_id: "subsample".into(),
                seed_index: req.seed,
                fallback: false,
                synthetic: parent.provenance.synthetic,
                parent: Some(parent.id.clone()),
            },
        };
        if known.contains(&content_digest(&candidate)?) {
            continue;
        }
        return Ok(candidate);
    }

    let source = if pool.is_empty() { library.iter().collect() } else { pool };
    // first of the largest, so ties resolve to library order
    let largest = source
        .iter()
        .copied()
        .reduce(|best, x| if x.tasks.len() > best.tasks.len() { x } else { best })
        .expect("library is non-empty");
    let mut copy = largest.clone();
    copy.provenance.fallback = true;
    copy.provenance.parent = Some(largest.id.clone());
    Ok(copy)
}
