//! Pairwise compatibility, per-orbit resource accounting and schedule validation.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::astro::period_s;
use crate::error::{Error, Result};
use crate::kinematics::{delta_g, transition_time, Profile, BAND_EDGES_DEG, MIN_TRANSITION_S, NON_AGILE_TRANSITION_S};
use crate::model::{Assignment, Instance, LookAngles, Platform, Schedule};

const TIME_EPS: f64 = 1e-9;
const RESOURCE_EPS: f64 = 1e-9;

pub const RESOURCE_MODEL: &str = "per-orbit segments of one nodal period starting at t=0 for each satellite; \
energy and storage budgets reset at each boundary and an observation is charged to the segment containing its start; \
energy = duration * obs_energy_per_s + slew_energy_per_deg * (slew into the observation + attitude change while tracking); \
the attitude chain restarts from nadir at every segment boundary";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompatibilityVerdict {
    Compatible,
    SameTask,
    TemporalOverlap,
    TransitionViolation { required_s: f64, gap_s: f64 },
}

impl CompatibilityVerdict {
    pub fn is_compatible(&self) -> bool {
        matches!(self, CompatibilityVerdict::Compatible)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OppInfo {
    pub sat: usize,
    pub task: usize,
    pub start: f64,
    pub end: f64,
    pub att_start: LookAngles,
    pub att_end: LookAngles,
    pub segment: usize,
}

#[derive(Debug, Clone, Copy)]
enum SepRule {
    Fixed(f64),
    NonAgile,
    Agile(Profile),
}

/// Index-based view of an instance used by every hot loop.
pub struct Context<'a> {
    pub instance: &'a Instance,
    pub sat_index: HashMap<&'a str, usize>,
    pub task_index: HashMap<&'a str, usize>,
    pub opps: Vec<OppInfo>,
    /// Per task, opportunity indices ordered by (start, satellite id, index).
    pub task_opps: Vec<Vec<usize>>,
    pub periods: Vec<f64>,
    pub segment_count: Vec<usize>,
    /// Bounds on the separation any ordered pair on the satellite can require.
    pub min_sep: Vec<f64>,
    pub max_sep: Vec<f64>,
    rules: Vec<SepRule>,
}

/// Largest transition time reachable with a total slew of at most `dg_max`.
fn max_transition_up_to(profile: &Profile, dg_max: f64) -> f64 {
    let mut best = transition_time(dg_max.max(0.0), profile).unwrap_or(MIN_TRANSITION_S);
    for &e in &BAND_EDGES_DEG {
        let e = e as f64;
        if e <= dg_max {
            best = best.max(transition_time(e, profile).unwrap_or(MIN_TRANSITION_S));
        }
    }
    best
}

impl<'a> Context<'a> {
    pub fn new(instance: &'a Instance) -> Result<Self> {
        let sat_index: HashMap<&str, usize> =
            instance.satellites.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
        let task_index: HashMap<&str, usize> =
            instance.tasks.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
        let periods: Vec<f64> = instance.satellites.iter().map(|s| period_s(&s.elements)).collect();
        let segment_count: Vec<usize> =
            periods.iter().map(|p| ((instance.horizon_s / p).ceil() as usize).max(1)).collect();

        let mut opps = Vec::with_capacity(instance.opportunities.len());
        for (i, o) in instance.opportunities.iter().enumerate() {
            let sat = *sat_index
                .get(o.satellite_id.as_str())
                .ok_or_else(|| Error::Structural(format!("opportunity {i} names unknown satellite")))?;
            let task = *task_index
                .get(o.task_id.as_str())
                .ok_or_else(|| Error::Structural(format!("opportunity {i} names unknown task")))?;
            let w = instance
                .visible_windows
                .get(o.window)
                .ok_or_else(|| Error::Structural(format!("opportunity {i} names missing window")))?;
            let segment = ((o.start_s / periods[sat]).floor().max(0.0) as usize).min(segment_count[sat] - 1);
            opps.push(OppInfo {
                sat,
                task,
                start: o.start_s,
                end: o.end_s,
                att_start: w.attitude.at(o.start_s),
                att_end: w.attitude.at(o.end_s),
                segment,
            });
        }

        let mut task_opps = vec![Vec::new(); instance.tasks.len()];
        for (i, o) in opps.iter().enumerate() {
            task_opps[o.task].push(i);
        }
        for list in &mut task_opps {
            list.sort_by(|&a, &b| {
                let (x, y) = (&opps[a], &opps[b]);
                x.start
                    .total_cmp(&y.start)
                    .then_with(|| instance.satellites[x.sat].id.cmp(&instance.satellites[y.sat].id))
                    .then(a.cmp(&b))
            });
        }

        let mut rules = Vec::with_capacity(instance.satellites.len());
        let mut min_sep = Vec::new();
        let mut max_sep = Vec::new();
        for (si, s) in instance.satellites.iter().enumerate() {
            let rule = match (instance.fixed_transition_s, s.envelope.platform) {
                (Some(c), _) => SepRule::Fixed(c),
                (None, Platform::NonAgile) => SepRule::NonAgile,
                (None, Platform::Agile) => SepRule::Agile(s.agility),
            };
            let (lo, hi) = match rule {
                SepRule::Fixed(c) => (c, c),
                SepRule::NonAgile => (NON_AGILE_TRANSITION_S, NON_AGILE_TRANSITION_S),
                SepRule::Agile(p) => {
                    let mut range = [(f64::INFINITY, f64::NEG_INFINITY); 3];
                    for o in opps.iter().filter(|o| o.sat == si) {
                        for a in [o.att_start, o.att_end] {
                            for (k, v) in [a.roll_deg, a.pitch_deg, a.yaw_deg].into_iter().enumerate() {
                                range[k].0 = range[k].0.min(v);
                                range[k].1 = range[k].1.max(v);
                            }
                        }
                    }
                    let dg_max: f64 = range.iter().map(|(l, h)| if h >= l { h - l } else { 0.0 }).sum();
                    (MIN_TRANSITION_S, max_transition_up_to(&p, dg_max))
                }
            };
            rules.push(rule);
            min_sep.push(lo);
            max_sep.push(hi);
        }

        Ok(Self { instance, sat_index, task_index, opps, task_opps, periods, segment_count, min_sep, max_sep, rules })
    }

    /// Required gap between `earlier` ending and `later` starting on the same satellite.
    pub fn separation(&self, earlier: usize, later: usize) -> f64 {
        let (a, b) = (&self.opps[earlier], &self.opps[later]);
        match &self.rules[a.sat] {
            SepRule::Fixed(c) => *c,
            SepRule::NonAgile => NON_AGILE_TRANSITION_S,
            SepRule::Agile(p) => {
                transition_time(delta_g(&a.att_end, &b.att_start), p).unwrap_or(MIN_TRANSITION_S)
            }
        }
    }

    pub fn verdict(&self, x: usize, y: usize) -> CompatibilityVerdict {
        let (a, b) = (&self.opps[x], &self.opps[y]);
        if a.task == b.task {
            return CompatibilityVerdict::SameTask;
        }
        if a.sat != b.sat {
            return CompatibilityVerdict::Compatible;
        }
        let (e, l) = if (a.start, x) <= (b.start, y) { (x, y) } else { (y, x) };
        let (oe, ol) = (&self.opps[e], &self.opps[l]);
        if ol.start <= oe.end {
            return CompatibilityVerdict::TemporalOverlap;
        }
        let gap = ol.start - oe.end;
        let required = self.separation(e, l);
        if gap + TIME_EPS < required {
            CompatibilityVerdict::TransitionViolation { required_s: required, gap_s: gap }
        } else {
            CompatibilityVerdict::Compatible
        }
    }

    /// Energy and storage used by the given observations of one segment, which must be sorted by start.
    pub fn segment_usage(&self, sat: usize, sorted: &[usize]) -> (f64, f64) {
        let spec = &self.instance.satellites[sat];
        let r = spec.rates;
        let mut prev = LookAngles::NADIR;
        let (mut energy, mut memory) = (0.0, 0.0);
        for &o in sorted {
            let op = &self.opps[o];
            let dur = op.end - op.start;
            let slew = delta_g(&prev, &op.att_start) + delta_g(&op.att_start, &op.att_end);
            energy += dur * r.obs_energy_per_s + slew * r.slew_energy_per_deg;
            memory += dur * r.obs_memory_per_s;
            prev = op.att_end;
        }
        (energy, memory)
    }

    pub fn opportunity_of(&self, a: &Assignment) -> Result<usize> {
        let o = self
            .instance
            .opportunities
            .get(a.opportunity)
            .ok_or_else(|| Error::Structural(format!("assignment of {} names missing opportunity {}", a.task_id, a.opportunity)))?;
        if o.task_id != a.task_id || o.satellite_id != a.satellite_id {
            return Err(Error::Structural(format!(
                "assignment ({}, {}) disagrees with opportunity {}",
                a.task_id, a.satellite_id, a.opportunity
            )));
        }
        if (o.start_s - a.start_s).abs() > 1e-6 {
            return Err(Error::Structural(format!(
                "assignment of {} starts at {} but opportunity {} starts at {}",
                a.task_id, a.start_s, a.opportunity, o.start_s
            )));
        }
        Ok(a.opportunity)
    }

    pub fn assignment(&self, opp: usize) -> Assignment {
        let o = &self.instance.opportunities[opp];
        Assignment {
            satellite_id: o.satellite_id.clone(),
            task_id: o.task_id.clone(),
            opportunity: opp,
            start_s: o.start_s,
        }
    }

    pub fn ledger_for(&self, opps: &[usize]) -> ResourceLedger {
        let mut per_sat: Vec<Vec<Vec<usize>>> = self.segment_count.iter().map(|&n| vec![Vec::new(); n]).collect();
        for &o in opps {
            let op = &self.opps[o];
            per_sat[op.sat][op.segment].push(o);
        }
        let satellites = per_sat
            .into_iter()
            .enumerate()
            .map(|(si, segs)| {
                let spec = &self.instance.satellites[si];
                let segments = segs
                    .into_iter()
                    .enumerate()
                    .map(|(k, mut list)| {
                        list.sort_by(|&a, &b| self.opps[a].start.total_cmp(&self.opps[b].start).then(a.cmp(&b)));
                        let (energy_used, memory_used) = self.segment_usage(si, &list);
                        SegmentUsage {
                            start_s: k as f64 * self.periods[si],
                            end_s: ((k + 1) as f64 * self.periods[si]).min(self.instance.horizon_s),
                            observations: list.len(),
                            energy_used,
                            memory_used,
                        }
                    })
                    .collect();
                SatelliteLedger {
                    satellite_id: spec.id.clone(),
                    period_s: self.periods[si],
                    energy_budget: spec.capacities.energy_per_orbit,
                    memory_budget: spec.capacities.storage_per_orbit,
                    segments,
                }
            })
            .collect();
        ResourceLedger { satellites }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentUsage {
    pub start_s: f64,
    pub end_s: f64,
    pub observations: usize,
    pub energy_used: f64,
    pub memory_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteLedger {
    pub satellite_id: String,
    pub period_s: f64,
    pub energy_budget: f64,
    pub memory_budget: f64,
    pub segments: Vec<SegmentUsage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub satellites: Vec<SatelliteLedger>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateTask { task_id: String, count: usize },
    Incompatible { first: Assignment, second: Assignment, verdict: CompatibilityVerdict },
    EnergyExceeded { satellite_id: String, segment: usize, used: f64, budget: f64 },
    StorageExceeded { satellite_id: String, segment: usize, used: f64, budget: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    pub resource_model: String,
    pub ledger: ResourceLedger,
}

/// Verdict for two assignments of the same instance.
pub fn compatible(a: &Assignment, b: &Assignment, inst: &Instance) -> Result<CompatibilityVerdict> {
    let ctx = Context::new(inst)?;
    Ok(ctx.verdict(ctx.opportunity_of(a)?, ctx.opportunity_of(b)?))
}

/// Separation required between `earlier` and `later` on one satellite.
pub fn min_separation(earlier: &Assignment, later: &Assignment, inst: &Instance) -> Result<f64> {
    if earlier.satellite_id != later.satellite_id {
        return Err(Error::domain("separation is only defined on a single satellite"));
    }
    let ctx = Context::new(inst)?;
    Ok(ctx.separation(ctx.opportunity_of(earlier)?, ctx.opportunity_of(later)?))
}

/// Every assignment the task could take, in (satellite id, start) order.
pub fn candidate_assignments(task_id: &str, inst: &Instance) -> Vec<Assignment> {
    let mut out: Vec<Assignment> = inst
        .opportunities
        .iter()
        .enumerate()
        .filter(|(_, o)| o.task_id == task_id)
        .map(|(i, o)| Assignment {
            satellite_id: o.satellite_id.clone(),
            task_id: o.task_id.clone(),
            opportunity: i,
            start_s: o.start_s,
        })
        .collect();
    out.sort_by(|a, b| a.satellite_id.cmp(&b.satellite_id).then(a.start_s.total_cmp(&b.start_s)));
    out
}

pub fn validate_schedule(schedule: &Schedule, inst: &Instance) -> Result<FeasibilityReport> {
    let ctx = Context::new(inst)?;
    validate_with(&ctx, schedule)
}

pub fn validate_with(ctx: &Context<'_>, schedule: &Schedule) -> Result<FeasibilityReport> {
    if schedule.instance_id != ctx.instance.id {
        return Err(Error::Structural(format!(
            "schedule is for instance {} but was checked against {}",
            schedule.instance_id, ctx.instance.id
        )));
    }
    let opps: Vec<usize> = schedule.assignments.iter().map(|a| ctx.opportunity_of(a)).collect::<Result<_>>()?;
    let mut violations = Vec::new();

    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &o in &opps {
        *counts.entry(ctx.opps[o].task).or_default() += 1;
    }
    let mut dup: Vec<_> = counts.into_iter().filter(|(_, c)| *c > 1).collect();
    dup.sort();
    for (t, count) in dup {
        violations.push(Violation::DuplicateTask { task_id: ctx.instance.tasks[t].id.clone(), count });
    }

    // pairs close together on one satellite, then repeated tasks anywhere
    let mut order: Vec<usize> = (0..opps.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&ctx.opps[opps[a]], &ctx.opps[opps[b]]);
        x.sat.cmp(&y.sat).then(x.start.total_cmp(&y.start)).then(a.cmp(&b))
    });
    for (p, &i) in order.iter().enumerate() {
        let oi = &ctx.opps[opps[i]];
        for &j in &order[p + 1..] {
            let oj = &ctx.opps[opps[j]];
            if oj.sat != oi.sat || oj.start > oi.end + ctx.max_sep[oi.sat] + 1.0 {
                break;
            }
            if oj.task == oi.task {
                continue;
            }
            let v = ctx.verdict(opps[i], opps[j]);
            if !v.is_compatible() {
                violations.push(Violation::Incompatible {
                    first: schedule.assignments[i].clone(),
                    second: schedule.assignments[j].clone(),
                    verdict: v,
                });
            }
        }
    }
    for i in 0..opps.len() {
        for j in i + 1..opps.len() {
            let (a, b) = (&ctx.opps[opps[i]], &ctx.opps[opps[j]]);
            if a.task == b.task {
                violations.push(Violation::Incompatible {
                    first: schedule.assignments[i].clone(),
                    second: schedule.assignments[j].clone(),
                    verdict: CompatibilityVerdict::SameTask,
                });
            }
        }
    }

    let ledger = ctx.ledger_for(&opps);
    for sat in &ledger.satellites {
        for (k, seg) in sat.segments.iter().enumerate() {
            if seg.energy_used > sat.energy_budget + RESOURCE_EPS {
                violations.push(Violation::EnergyExceeded {
                    satellite_id: sat.satellite_id.clone(),
                    segment: k,
                    used: seg.energy_used,
                    budget: sat.energy_budget,
                });
            }
            if seg.memory_used > sat.memory_budget + RESOURCE_EPS {
                violations.push(Violation::StorageExceeded {
                    satellite_id: sat.satellite_id.clone(),
                    segment: k,
                    used: seg.memory_used,
                    budget: sat.memory_budget,
                });
            }
        }
    }

    Ok(FeasibilityReport {
        feasible: violations.is_empty(),
        violations,
        resource_model: RESOURCE_MODEL.to_string(),
        ledger,
    })
}
