#![allow(dead_code)]

use orbsched_core::feasibility::validate_schedule;
use orbsched_core::metrics::evaluate;
use orbsched_core::synthetic::{build_synthetic_instance, SyntheticSpec, SyntheticTask, SyntheticWindow};
use orbsched_core::{Assignment, Instance, Platform, ResourceCapacities, Schedule, SolveStatus};
use orbsched_solvers::Objective;

pub fn schedule_of(inst: &Instance, opps: &[usize]) -> Schedule {
    let mut s = Schedule::new(&inst.id, "probe", SolveStatus::Heuristic);
    for &i in opps {
        let o = &inst.opportunities[i];
        s.assignments.push(Assignment {
            satellite_id: o.satellite_id.clone(),
            task_id: o.task_id.clone(),
            opportunity: i,
            start_s: o.start_s,
        });
    }
    s
}

/// Objective of a schedule computed only through the public validator and metric functions.
pub fn score(inst: &Instance, s: &Schedule, obj: Objective) -> f64 {
    let m = evaluate(s, inst, 0.0).expect("feasible schedule");
    match obj {
        Objective::TP => m.tp,
        Objective::TCR => m.tcr,
        Objective::ALL => m.composite_all,
    }
}

/// Best objective over every feasible choice of at most one opportunity per task.
pub fn brute_force(inst: &Instance, obj: Objective) -> f64 {
    let mut per_task: Vec<Vec<usize>> = vec![Vec::new(); inst.tasks.len()];
    for (i, o) in inst.opportunities.iter().enumerate() {
        let t = inst.tasks.iter().position(|t| t.id == o.task_id).unwrap();
        per_task[t].push(i);
    }
    let mut best = f64::NEG_INFINITY;
    let mut chosen = Vec::new();
    rec(inst, obj, &per_task, 0, &mut chosen, &mut best);
    best
}

fn rec(inst: &Instance, obj: Objective, per_task: &[Vec<usize>], t: usize, chosen: &mut Vec<usize>, best: &mut f64) {
    let s = schedule_of(inst, chosen);
    // every subset of a feasible set is feasible, so prune on the partial selection
    if !validate_schedule(&s, inst).unwrap().feasible {
        return;
    }
    if t == per_task.len() {
        *best = best.max(score(inst, &s, obj));
        return;
    }
    rec(inst, obj, per_task, t + 1, chosen, best);
    for &o in &per_task[t] {
        chosen.push(o);
        rec(inst, obj, per_task, t + 1, chosen, best);
        chosen.pop();
    }
}

pub fn task(id: &str, d: f64, profit: u32) -> SyntheticTask {
    SyntheticTask { id: id.into(), duration_s: d, profit }
}

pub fn win(t: &str, s: &str, a: f64, b: f64) -> SyntheticWindow {
    SyntheticWindow { task: t.into(), satellite: s.into(), start_s: a, end_s: b, attitude: None }
}

/// Agile instance with a fixed 5 s separation and unit slot step.
pub fn fixture(sats: &[&str], tasks: Vec<SyntheticTask>, windows: Vec<SyntheticWindow>) -> Instance {
    build_synthetic_instance(&SyntheticSpec {
        id: "fixture".into(),
        horizon_s: 1000.0,
        platform: Platform::Agile,
        satellites: sats.iter().map(|s| s.to_string()).collect(),
        tasks,
        windows,
        transition_s: Some(5.0),
        slot_step_s: 1.0,
        capacities: ResourceCapacities::default(),
    })
    .unwrap()
}
