//! Simulated annealing over complete plans, seeded with the profit-first greedy plan.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use orbsched_core::model::SolveStatus;

use crate::greedy::{self, Rule};
use crate::plan::{Plan, Problem};
use crate::{rng_for, Deadline, Objective, Outcome, SolverConfig, Trace};

/// Uniform draw among the insertable candidates passing `keep`. The first hit of a lazily
/// shuffled order is uniform over the hits, and far cheaper than testing every candidate.
fn pick_feasible(p: &Problem, plan: &Plan, cands: &[usize], rng: &mut ChaCha8Rng, keep: impl Fn(usize) -> bool) -> Option<usize> {
    let mut idx: Vec<usize> = (0..cands.len()).collect();
    for i in 0..idx.len() {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
        let o = cands[idx[i]];
        if keep(o) && plan.can_insert(p, o) {
            return Some(o);
        }
    }
    None
}

/// Moves a scheduled task to a different feasible opportunity.
pub fn relocate(p: &Problem, plan: &mut Plan, rng: &mut ChaCha8Rng) -> bool {
    let scheduled: Vec<usize> = (0..p.n_tasks).filter(|&t| plan.assigned[t].is_some()).collect();
    let Some(&t) = scheduled.choose(rng) else { return false };
    let old = plan.remove_task(p, t).expect("task was scheduled");
    match pick_feasible(p, plan, &p.ctx.task_opps[t], rng, |o| o != old) {
        Some(o) => {
            plan.insert(p, o);
            true
        }
        None => {
            plan.insert(p, old);
            false
        }
    }
}

/// Exchanges the order of two tasks on one satellite timeline.
pub fn swap(p: &Problem, plan: &mut Plan, rng: &mut ChaCha8Rng) -> bool {
    let busy: Vec<usize> = (0..plan.per_sat.len()).filter(|&s| plan.per_sat[s] >= 2).collect();
    let Some(&sat) = busy.choose(rng) else { return false };
    let line = plan.timeline(sat);
    let i = rng.gen_range(0..line.len());
    let mut j = rng.gen_range(0..line.len() - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (line[i.min(j)], line[i.max(j)]);
    let (ta, tb) = (p.ctx.opps[a].task, p.ctx.opps[b].task);
    plan.remove_task(p, ta);
    plan.remove_task(p, tb);
    // the later task moves to a slot at or before the earlier one's start, and vice versa
    let a_start = p.ctx.opps[a].start;
    let before = pick_feasible(p, plan, &p.ctx.task_opps[tb], rng, |o| p.ctx.opps[o].sat == sat && p.ctx.opps[o].start <= a_start);
    if let Some(ob) = before {
        plan.insert(p, ob);
        let b_start = p.ctx.opps[ob].start;
        let after = pick_feasible(p, plan, &p.ctx.task_opps[ta], rng, |o| p.ctx.opps[o].sat == sat && p.ctx.opps[o].start >= b_start);
        if let Some(oa) = after {
            plan.insert(p, oa);
            return true;
        }
        plan.remove_task(p, tb);
    }
    plan.insert(p, a);
    plan.insert(p, b);
    false
}

/// Drops up to `k` tasks, then tries every unscheduled task once in random order.
pub fn remove_reinsert(p: &Problem, plan: &mut Plan, rng: &mut ChaCha8Rng, k: usize) -> bool {
    let mut scheduled: Vec<usize> = (0..p.n_tasks).filter(|&t| plan.assigned[t].is_some()).collect();
    scheduled.shuffle(rng);
    let r = rng.gen_range(0..=k.min(scheduled.len()));
    let mut changed = false;
    for &t in &scheduled[..r] {
        plan.remove_task(p, t);
        changed = true;
    }
    let mut free: Vec<usize> = p.schedulable.iter().copied().filter(|&t| plan.assigned[t].is_none()).collect();
    free.shuffle(rng);
    for t in free {
        if let Some(o) = pick_feasible(p, plan, &p.ctx.task_opps[t], rng, |_| true) {
            plan.insert(p, o);
            changed = true;
        }
    }
    changed
}

pub fn neighbour(p: &Problem, plan: &mut Plan, rng: &mut ChaCha8Rng, k: usize) -> bool {
    match rng.gen_range(0..3) {
        0 => relocate(p, plan, rng),
        1 => swap(p, plan, rng),
        _ => remove_reinsert(p, plan, rng, k),
    }
}

pub fn solve(p: &Problem, obj: Objective, config: &SolverConfig, deadline: &Deadline) -> Outcome {
    let prm = config.sa;
    let mut rng = rng_for(config.seed);
    let mut current = greedy::solve(p, Rule::TP, config.seed, config.restarts, deadline);
    let mut cur_v = current.objective(p, obj);
    let mut best = current.clone();
    let mut best_v = cur_v;
    let mut trace = Trace::default();
    trace.record(0, best_v);

    let n = p.n_tasks.max(1) as f64;
    let t0 = prm.t0_factor * p.objective_scale(obj) / n;
    let t_min = t0 * prm.min_temperature_ratio;
    let mut temp = t0;
    let mut step = 0u64;
    if p.schedulable.is_empty() {
        return Outcome { plan: best, status: SolveStatus::Heuristic, trace };
    }
    loop {
        for _ in 0..prm.iterations_per_temperature.max(1) {
            step += 1;
            let mut cand = current.clone();
            if !neighbour(p, &mut cand, &mut rng, prm.reinsert_k) {
                continue;
            }
            let v = cand.objective(p, obj);
            let delta = v - cur_v;
            let accept = delta > 1e-12 || (temp > 0.0 && rng.gen::<f64>() < (delta / temp).exp());
            if accept {
                current = cand;
                cur_v = v;
                if cur_v > best_v + 1e-12 {
                    best = current.clone();
                    best_v = cur_v;
                    trace.record(step, best_v);
                }
            }
        }
        temp *= prm.cooling;
        if temp <= t_min || deadline.expired() {
            break;
        }
    }
    Outcome { plan: best, status: SolveStatus::Heuristic, trace }
}
