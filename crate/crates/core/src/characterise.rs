//! Structural-difficulty descriptors computed from an instance before any solving.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::feasibility::Context;
use crate::model::Instance;
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Instance,
    Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskDescriptors<S = f64> {
    pub gamma_ao: S,
    pub gamma_oc: S,
    pub gamma_ti: S,
    pub gamma_at: S,
    pub gamma_te: S,
    /// Fewer than two tasks: pair descriptors are reported as zero.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteDescriptors<S = f64> {
    pub lambda_oc: S,
    pub lambda_cs: S,
    pub lambda_to: S,
    pub lambda_ac: S,
    pub lambda_ed: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorReport<S = f64> {
    pub gamma_ao: S,
    pub gamma_oc: S,
    pub gamma_ti: S,
    pub gamma_at: S,
    pub gamma_te: S,
    pub lambda_oc: S,
    pub lambda_cs: S,
    pub lambda_to: S,
    pub lambda_ac: S,
    pub lambda_ed: S,
    pub analysis_step_s: S,
    pub level: Level,
    #[serde(default)]
    pub degenerate: bool,
}

impl<S: Scalar> DescriptorReport<S> {
    pub fn new(t: TaskDescriptors<S>, s: SatelliteDescriptors<S>, step: S) -> Self {
        Self {
            gamma_ao: t.gamma_ao,
            gamma_oc: t.gamma_oc,
            gamma_ti: t.gamma_ti,
            gamma_at: t.gamma_at,
            gamma_te: t.gamma_te,
            lambda_oc: s.lambda_oc,
            lambda_cs: s.lambda_cs,
            lambda_to: s.lambda_to,
            lambda_ac: s.lambda_ac,
            lambda_ed: s.lambda_ed,
            analysis_step_s: step,
            level: Level::Instance,
            degenerate: t.degenerate,
        }
    }

    pub fn values(&self) -> [S; 10] {
        [
            self.gamma_ao,
            self.gamma_oc,
            self.gamma_ti,
            self.gamma_at,
            self.gamma_te,
            self.lambda_oc,
            self.lambda_cs,
            self.lambda_to,
            self.lambda_ac,
            self.lambda_ed,
        ]
    }

    pub const NAMES: [&'static str; 10] = [
        "gamma_ao", "gamma_oc", "gamma_ti", "gamma_at", "gamma_te", "lambda_oc", "lambda_cs", "lambda_to",
        "lambda_ac", "lambda_ed",
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewOpp<S> {
    pub task: usize,
    pub sat: usize,
    pub start: S,
    pub end: S,
}

/// Minimal timeline data the descriptors need, in the chosen scalar type.
pub struct TimelineView<'a, S> {
    pub horizon: S,
    pub satellite_count: usize,
    pub task_count: usize,
    /// s_i: distinct satellites with a visible window for the task.
    pub task_satellites: Vec<usize>,
    /// w_i: visible windows of the task.
    pub task_windows: Vec<usize>,
    pub opps: Vec<ViewOpp<S>>,
    /// Per satellite (min, max) of the separation any ordered pair can require.
    pub sep_bounds: Vec<(S, S)>,
    /// Required separation between two opportunity indices on one satellite, earlier first.
    pub separation: Box<dyn Fn(usize, usize) -> S + Sync + 'a>,
}

impl<'a, S: Scalar> TimelineView<'a, S> {
    pub fn from_context(ctx: &'a Context<'a>) -> Self {
        let inst = ctx.instance;
        let mut sats_per_task: Vec<HashSet<&str>> = vec![HashSet::new(); inst.tasks.len()];
        let mut task_windows = vec![0usize; inst.tasks.len()];
        for w in &inst.visible_windows {
            if let Some(&t) = ctx.task_index.get(w.task_id.as_str()) {
                sats_per_task[t].insert(w.satellite_id.as_str());
                task_windows[t] += 1;
            }
        }
        TimelineView {
            horizon: S::from_f64(inst.horizon_s),
            satellite_count: inst.satellites.len(),
            task_count: inst.tasks.len(),
            task_satellites: sats_per_task.iter().map(|s| s.len()).collect(),
            task_windows,
            opps: ctx
                .opps
                .iter()
                .map(|o| ViewOpp { task: o.task, sat: o.sat, start: S::from_f64(o.start), end: S::from_f64(o.end) })
                .collect(),
            sep_bounds: ctx.min_sep.iter().zip(&ctx.max_sep).map(|(&a, &b)| (S::from_f64(a), S::from_f64(b))).collect(),
            separation: Box::new(move |a, b| S::from_f64(ctx.separation(a, b))),
        }
    }

    fn sat_opps(&self) -> Vec<Vec<usize>> {
        let mut per = vec![Vec::new(); self.satellite_count];
        for (i, o) in self.opps.iter().enumerate() {
            per[o.sat].push(i);
        }
        for list in &mut per {
            list.sort_by(|&a, &b| {
                self.opps[a].start.partial_cmp(&self.opps[b].start).unwrap().then(a.cmp(&b))
            });
        }
        per
    }

    /// Conflicting opportunity pairs per satellite, counted per unordered task pair.
    fn conflicts(&self, per_sat: &[Vec<usize>]) -> Vec<BTreeMap<(usize, usize), u64>> {
        per_sat
            .par_iter()
            .enumerate()
            .map(|(s, list)| {
                let (min_sep, max_sep) = self.sep_bounds[s];
                let mut counts = BTreeMap::new();
                for (p, &ia) in list.iter().enumerate() {
                    let a = &self.opps[ia];
                    for &ib in &list[p + 1..] {
                        let b = &self.opps[ib];
                        if b.start > a.end && b.start - a.end >= max_sep {
                            break;
                        }
                        if a.task == b.task {
                            continue;
                        }
                        let hit = b.start <= a.end || {
                            let gap = b.start - a.end;
                            gap < min_sep || gap < (self.separation)(ia, ib)
                        };
                        if hit {
                            let key = (a.task.min(b.task), a.task.max(b.task));
                            *counts.entry(key).or_insert(0u64) += 1;
                        }
                    }
                }
                counts
            })
            .collect()
    }
}

pub fn default_analysis_step(task_count: usize) -> f64 {
    if task_count <= 200 {
        1.0
    } else {
        10.0
    }
}

fn ratio<S: Scalar>(num: S, den: S) -> S {
    if den == S::zero() {
        S::zero()
    } else {
        num / den
    }
}

fn choose2<S: Scalar>(n: usize) -> S {
    S::from_int((n as i64) * (n as i64 - 1) / 2)
}

pub fn task_descriptors_view<S: Scalar>(view: &TimelineView<'_, S>) -> TaskDescriptors<S> {
    let n = view.task_count;
    if n == 0 {
        return TaskDescriptors {
            gamma_ao: S::zero(),
            gamma_oc: S::zero(),
            gamma_ti: S::zero(),
            gamma_at: S::zero(),
            gamma_te: S::zero(),
            degenerate: true,
        };
    }
    let mut a = vec![0usize; n];
    for o in &view.opps {
        a[o.task] += 1;
    }
    let nn = S::from_int(n as i64);
    let gamma_ao = S::from_int(a.iter().sum::<usize>() as i64) / nn;
    let gamma_oc = S::from_int(a.iter().filter(|&&x| x <= 2).count() as i64) / nn;
    let gamma_te = S::from_int(
        view.task_satellites.iter().zip(&view.task_windows).map(|(s, w)| (s * w) as i64).sum::<i64>(),
    ) / nn;

    if n < 2 {
        return TaskDescriptors { gamma_ao, gamma_oc, gamma_ti: S::zero(), gamma_at: S::zero(), gamma_te, degenerate: true };
    }

    let per_sat = view.sat_opps();
    let conflicts = view.conflicts(&per_sat);
    let mut f: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for sat in &conflicts {
        for (&k, &c) in sat {
            *f.entry(k).or_insert(0) += c;
        }
    }

    // opportunity counts per task per satellite, for C_ij
    let mut task_sat: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); n];
    for o in &view.opps {
        *task_sat[o.task].entry(o.sat).or_insert(0) += 1;
    }
    let c_of = |i: usize, j: usize| -> u64 {
        task_sat[i].iter().filter_map(|(s, ni)| task_sat[j].get(s).map(|nj| ni * nj)).sum()
    };

    let words = view.satellite_count.div_ceil(64).max(1);
    let masks: Vec<Option<Vec<u64>>> = task_sat
        .iter()
        .map(|m| {
            if m.is_empty() {
                None
            } else {
                let mut v = vec![0u64; words];
                for &s in m.keys() {
                    v[s / 64] |= 1 << (s % 64);
                }
                Some(v)
            }
        })
        .collect();
    let comparable: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let Some(mi) = &masks[i] else { return 0 };
            masks[i + 1..]
                .iter()
                .filter(|mj| mj.as_ref().is_some_and(|mj| mi.iter().zip(mj).any(|(x, y)| x & y != 0)))
                .count() as u64
        })
        .sum();

    let interfering = f.values().filter(|&&c| c > 0).count();
    let mut severity = S::zero();
    for (&(i, j), &fij) in &f {
        severity = severity + S::ratio(fij as i64, c_of(i, j) as i64);
    }
    TaskDescriptors {
        gamma_ao,
        gamma_oc,
        gamma_ti: S::from_int(interfering as i64) / choose2::<S>(n),
        gamma_at: ratio(severity, S::from_int(comparable as i64)),
        gamma_te,
        degenerate: false,
    }
}

struct SatTally<S> {
    pair_area: S,
    load_area: S,
    conflict_steps: i64,
    q_steps: i64,
    /// (duration, depth) of each merged conflict segment
    segments: Vec<(S, i64)>,
}

fn merge_activity<S: Scalar>(view: &TimelineView<'_, S>, list: &[usize]) -> Vec<(usize, S, S)> {
    let mut by_task: BTreeMap<usize, Vec<(S, S)>> = BTreeMap::new();
    for &i in list {
        let o = &view.opps[i];
        by_task.entry(o.task).or_default().push((o.start, o.end));
    }
    let mut out = Vec::new();
    for (task, mut iv) in by_task {
        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut cur = iv[0];
        for &(s, e) in &iv[1..] {
            if s <= cur.1 {
                cur.1 = cur.1.max_of(e);
            } else {
                out.push((task, cur.0, cur.1));
                cur = (s, e);
            }
        }
        out.push((task, cur.0, cur.1));
    }
    out
}

fn tally_satellite<S: Scalar>(
    view: &TimelineView<'_, S>,
    activity: &[(usize, S, S)],
    pairs: &BTreeMap<(usize, usize), u64>,
    step: S,
) -> SatTally<S> {
    let mut t = SatTally { pair_area: S::zero(), load_area: S::zero(), conflict_steps: 0, q_steps: 0, segments: Vec::new() };

    // continuous contention
    let mut events: Vec<(S, i64)> = activity.iter().flat_map(|&(_, s, e)| [(s, 1), (e, -1)]).collect();
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut n: i64 = 0;
    let mut prev = S::zero();
    for (time, d) in events {
        if n > 0 {
            let dt = time - prev;
            t.pair_area = t.pair_area + S::from_int(n * (n - 1) / 2) * dt;
            t.load_area = t.load_area + S::from_int(n) * dt;
        }
        n += d;
        prev = time;
    }

    // grid conflicts
    let n_steps = (view.horizon / step).ceil_i64().max(0);
    let mut grid: Vec<(i64, i64, usize)> = Vec::new();
    for &(task, s, e) in activity {
        let lo = (s / step).floor_i64().clamp(0, n_steps);
        let hi = (e / step).ceil_i64().clamp(0, n_steps);
        if hi > lo {
            grid.push((lo, 1, task));
            grid.push((hi, -1, task));
        }
    }
    grid.sort_by_key(|&(k, d, task)| (k, d, task));
    let mut active: BTreeMap<usize, i64> = BTreeMap::new();
    let mut run: Option<(i64, i64, i64)> = None; // (first step, end step, depth)
    let close = |run: &mut Option<(i64, i64, i64)>, t: &mut SatTally<S>| {
        if let Some((k1, k2, q)) = run.take() {
            let d = (S::from_int(k2) * step).min_of(view.horizon) - S::from_int(k1) * step;
            t.segments.push((d, q));
        }
    };
    let mut idx = 0;
    while idx < grid.len() {
        let k = grid[idx].0;
        while idx < grid.len() && grid[idx].0 == k {
            let (_, d, task) = grid[idx];
            let c = active.entry(task).or_insert(0);
            *c += d;
            if *c == 0 {
                active.remove(&task);
            }
            idx += 1;
        }
        let next = if idx < grid.len() { grid[idx].0 } else { k };
        if next == k {
            continue;
        }
        let tasks: Vec<usize> = active.keys().copied().collect();
        let q = tasks
            .iter()
            .filter(|&&a| tasks.iter().any(|&b| b != a && pairs.contains_key(&(a.min(b), a.max(b)))))
            .count() as i64;
        if q >= 2 {
            let len = next - k;
            t.conflict_steps += len;
            t.q_steps += q * len;
            match &mut run {
                Some((_, end, depth)) if *end == k => {
                    *end = next;
                    *depth = (*depth).max(q);
                }
                _ => {
                    close(&mut run, &mut t);
                    run = Some((k, next, q));
                }
            }
        } else {
            close(&mut run, &mut t);
        }
    }
    close(&mut run, &mut t);
    t
}

pub fn satellite_descriptors_view<S: Scalar>(view: &TimelineView<'_, S>, step: S) -> Result<SatelliteDescriptors<S>> {
    if step <= S::zero() {
        return Err(Error::domain("analysis step must be positive"));
    }
    let per_sat = view.sat_opps();
    let conflicts = view.conflicts(&per_sat);
    let tallies: Vec<SatTally<S>> = per_sat
        .par_iter()
        .zip(conflicts.par_iter())
        .map(|(list, pairs)| tally_satellite(view, &merge_activity(view, list), pairs, step))
        .collect();

    let ns = view.satellite_count;
    let mut pair_area = S::zero();
    let mut load_area = S::zero();
    let mut sats_in_conflict = 0i64;
    let mut conflict_steps = 0i64;
    let mut q_steps = 0i64;
    let mut total_d = S::zero();
    let mut weighted = S::zero();
    let mut q_max = 0i64;
    for t in &tallies {
        pair_area = pair_area + t.pair_area;
        load_area = load_area + t.load_area;
        if t.conflict_steps > 0 {
            sats_in_conflict += 1;
        }
        conflict_steps += t.conflict_steps;
        q_steps += t.q_steps;
        for &(d, q) in &t.segments {
            total_d = total_d + d;
            weighted = weighted + S::from_int((q - 1).max(0)) * d;
            q_max = q_max.max(q);
        }
    }
    let lambda_ed = if q_max <= 1 { S::zero() } else { ratio(weighted, S::from_int(q_max - 1) * total_d) };
    Ok(SatelliteDescriptors {
        lambda_oc: ratio(pair_area, load_area),
        lambda_cs: ratio(S::from_int(sats_in_conflict), S::from_int(ns as i64)),
        lambda_to: ratio(total_d, S::from_int(ns as i64) * view.horizon),
        lambda_ac: ratio(S::from_int(q_steps), S::from_int(conflict_steps)),
        lambda_ed,
    })
}

pub fn task_descriptors<S: Scalar>(inst: &Instance) -> Result<TaskDescriptors<S>> {
    let ctx = Context::new(inst)?;
    let view = TimelineView::from_context(&ctx);
    Ok(task_descriptors_view(&view))
}

pub fn satellite_descriptors<S: Scalar>(inst: &Instance, step: S) -> Result<SatelliteDescriptors<S>> {
    let ctx = Context::new(inst)?;
    let view = TimelineView::from_context(&ctx);
    satellite_descriptors_view(&view, step)
}

/// All ten descriptors; `step` defaults by task count.
pub fn characterise<S: Scalar>(inst: &Instance, step: Option<S>) -> Result<DescriptorReport<S>> {
    let step = step.unwrap_or_else(|| S::from_f64(default_analysis_step(inst.tasks.len())));
    let ctx = Context::new(inst)?;
    let view = TimelineView::from_context(&ctx);
    let t = task_descriptors_view(&view);
    let s = satellite_descriptors_view(&view, step)?;
    Ok(DescriptorReport::new(t, s, step))
}

/// Field-wise mean; the result is scenario level.
pub fn aggregate<S: Scalar>(reports: &[DescriptorReport<S>]) -> Result<DescriptorReport<S>> {
    let first = reports.first().ok_or_else(|| Error::domain("cannot aggregate an empty list of reports"))?;
    if reports.iter().any(|r| r.analysis_step_s != first.analysis_step_s) {
        return Err(Error::domain("reports use different analysis steps"));
    }
    let n = S::from_int(reports.len() as i64);
    let mut sums = [S::zero(); 10];
    for r in reports {
        for (acc, v) in sums.iter_mut().zip(r.values()) {
            *acc = *acc + v;
        }
    }
    let m = sums.map(|s| s / n);
    Ok(DescriptorReport {
        gamma_ao: m[0],
        gamma_oc: m[1],
        gamma_ti: m[2],
        gamma_at: m[3],
        gamma_te: m[4],
        lambda_oc: m[5],
        lambda_cs: m[6],
        lambda_to: m[7],
        lambda_ac: m[8],
        lambda_ed: m[9],
        analysis_step_s: first.analysis_step_s,
        level: Level::Scenario,
        degenerate: reports.iter().all(|r| r.degenerate),
    })
}
