//! Schedule quality metrics and the equal-weight composite.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{validate_with, Context};
use crate::model::{Instance, Schedule};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub tp: f64,
    pub tcr: f64,
    /// `None` when no task was executed.
    pub bd: Option<f64>,
    pub tm: f64,
    pub rt_s: f64,
    pub composite_all: f64,
}

pub fn total_profit<S: Scalar>(profits: impl IntoIterator<Item = S>) -> S {
    profits.into_iter().fold(S::zero(), |a, b| a + b)
}

pub fn completion_rate<S: Scalar>(done: usize, total: usize) -> S {
    if total == 0 {
        S::zero()
    } else {
        S::ratio(done as i64, total as i64)
    }
}

/// 1 - (sample std / mean) of the per-satellite counts, over satellites with at least one task.
pub fn balance_degree<S: Scalar + Float>(counts: &[usize]) -> Option<S> {
    let active: Vec<S> = counts.iter().filter(|&&c| c > 0).map(|&c| S::from_int(c as i64)).collect();
    match active.len() {
        0 => None,
        1 => Some(S::one()),
        k => {
            let n = S::from_int(k as i64);
            let mean = active.iter().fold(S::zero(), |a, &b| a + b) / n;
            let var = active.iter().fold(S::zero(), |a, &b| a + (b - mean) * (b - mean)) / (n - S::one());
            Some(S::one() - Float::sqrt(var) / mean)
        }
    }
}

/// Mean normalised start time with unexecuted tasks charged the full horizon.
pub fn timeliness<S: Scalar>(starts: &[S], horizon: S, task_count: usize) -> S {
    if task_count == 0 || horizon <= S::zero() {
        return S::zero();
    }
    let missing = S::from_int((task_count - starts.len().min(task_count)) as i64);
    let sum = starts.iter().fold(S::zero(), |a, &b| a + b);
    (sum + horizon * missing) / (horizon * S::from_int(task_count as i64))
}

pub fn composite<S: Scalar>(tp_norm: S, tcr: S, bd: Option<S>, tm: S) -> S {
    let bd = bd.map(|b| b.max_of(S::zero()).min_of(S::one())).unwrap_or(S::zero());
    (tp_norm + tcr + bd + S::one() - tm) / S::from_int(4)
}

/// Metrics of a schedule that is assumed feasible; the caller is responsible for validation.
pub fn metrics_unchecked(ctx: &Context<'_>, schedule: &Schedule, wall_time_s: f64) -> Result<MetricReport> {
    let inst = ctx.instance;
    let mut per_sat = vec![0usize; inst.satellites.len()];
    let mut tp = 0.0;
    let mut starts = Vec::with_capacity(schedule.assignments.len());
    for a in &schedule.assignments {
        let o = ctx.opportunity_of(a)?;
        let op = &ctx.opps[o];
        per_sat[op.sat] += 1;
        tp += inst.tasks[op.task].profit as f64;
        starts.push(op.start);
    }
    let n = inst.tasks.len();
    let tcr = completion_rate::<f64>(schedule.assignments.len(), n);
    let bd = balance_degree::<f64>(&per_sat);
    let tm = timeliness(&starts, inst.horizon_s, n);
    let total = inst.total_profit();
    let tp_norm = if total > 0.0 { tp / total } else { 0.0 };
    Ok(MetricReport { tp, tcr, bd, tm, rt_s: wall_time_s, composite_all: composite(tp_norm, tcr, bd, tm) })
}

/// Refuses schedules that fail validation.
pub fn evaluate(schedule: &Schedule, inst: &Instance, wall_time_s: f64) -> Result<MetricReport> {
    let ctx = Context::new(inst)?;
    let report = validate_with(&ctx, schedule)?;
    if !report.feasible {
        return Err(Error::Infeasible(report.violations.len()));
    }
    metrics_unchecked(&ctx, schedule, wall_time_s)
}

pub fn composite_score(report: &MetricReport, inst: &Instance) -> f64 {
    let total = inst.total_profit();
    let tp_norm = if total > 0.0 { report.tp / total } else { 0.0 };
    composite(tp_norm, report.tcr, report.bd, report.tm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_can_go_negative() {
        let bd = balance_degree::<f64>(&[1, 9, 0]).unwrap();
        let oracle = 1.0 - 0.8 * 2f64.sqrt();
        assert!((bd - oracle).abs() < 1e-12);
        assert!(bd < 0.0);
    }

    #[test]
    fn balance_edge_cases() {
        assert_eq!(balance_degree::<f64>(&[0, 0]), None);
        assert_eq!(balance_degree::<f64>(&[0, 4]), Some(1.0));
        assert_eq!(balance_degree::<f64>(&[3, 3, 3]), Some(1.0));
    }

    #[test]
    fn timeliness_hand_example() {
        // 2 tasks, only one done at mid-horizon
        assert!((timeliness(&[50.0], 100.0, 2) - 0.75).abs() < 1e-12);
        assert_eq!(timeliness::<f64>(&[], 100.0, 3), 1.0);
    }

    #[test]
    fn composite_bounds() {
        assert_eq!(composite(0.0, 0.0, None, 1.0), 0.0);
        assert_eq!(composite(1.0, 1.0, Some(1.0), 0.0), 1.0);
        assert_eq!(composite(1.0, 1.0, Some(-3.0), 0.0), 0.75);
    }
}
