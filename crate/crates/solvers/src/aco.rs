//! Ant colony construction with pheromone on (task, opportunity) choices.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use orbsched_core::model::SolveStatus;

use crate::plan::{Plan, Problem};
use crate::{rng_for, Deadline, Objective, Outcome, SolverConfig, Trace};

/// Pheromone per opportunity plus one "leave unscheduled" entry per task.
#[derive(Debug, Clone, PartialEq)]
pub struct Pheromone {
    pub opp: Vec<f64>,
    pub skip: Vec<f64>,
}

impl Pheromone {
    pub fn uniform(p: &Problem) -> Self {
        Self { opp: vec![1.0; p.ctx.opps.len()], skip: vec![1.0; p.n_tasks] }
    }
}

/// Free time around `o` on its satellite timeline, squashed to [0, 1).
fn slack(p: &Problem, plan: &Plan, o: usize) -> f64 {
    let op = &p.ctx.opps[o];
    let line = plan.timeline(op.sat);
    let pos = line.partition_point(|&x| p.ctx.opps[x].start < op.start);
    let before = pos.checked_sub(1).map_or(f64::INFINITY, |i| op.start - p.ctx.opps[line[i]].end);
    let after = line.get(pos).map_or(f64::INFINITY, |&x| p.ctx.opps[x].start - op.end);
    let gap = before.min(after);
    if gap.is_infinite() {
        1.0
    } else {
        gap / (gap + 60.0)
    }
}

fn heuristic(p: &Problem, obj: Objective, plan: &Plan, o: usize) -> f64 {
    let op = &p.ctx.opps[o];
    let mut w = p.task_weight(obj, op.task);
    if obj == Objective::ALL {
        w += (1.0 - op.start / p.horizon) / p.n_tasks.max(1) as f64;
    }
    w * (0.5 + 0.5 * slack(p, plan, o))
}

fn pick(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return rng.gen_range(0..weights.len());
    }
    let mut r = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if r < *w {
            return i;
        }
        r -= w;
    }
    weights.len() - 1
}

/// One ant: repeatedly picks a random unvisited task, then an option for it.
/// Returns the plan and the tasks it chose to leave out.
pub fn construct(p: &Problem, obj: Objective, config: &SolverConfig, tau: &Pheromone, rng: &mut ChaCha8Rng) -> (Plan, Vec<usize>) {
    let (a, b) = (config.aco.pheromone_weight, config.aco.heuristic_weight);
    let mut plan = Plan::empty(p);
    let mut skipped = Vec::new();
    let mut remaining = p.schedulable.clone();
    while !remaining.is_empty() {
        let t = remaining.swap_remove(rng.gen_range(0..remaining.len()));
        let opts = plan.feasible_options(p, t);
        if opts.is_empty() {
            continue;
        }
        let mut weights: Vec<f64> =
            opts.iter().map(|&o| tau.opp[o].powf(a) * heuristic(p, obj, &plan, o).powf(b)).collect();
        // only the composite objective can gain from leaving a placeable task out
        if obj == Objective::ALL {
            let mean_eta = opts.iter().map(|&o| heuristic(p, obj, &plan, o)).sum::<f64>() / opts.len() as f64;
            weights.push(tau.skip[t].powf(a) * (0.25 * mean_eta).powf(b));
        }
        let k = pick(&weights, rng);
        if k == opts.len() {
            skipped.push(t);
        } else {
            plan.insert(p, opts[k]);
        }
    }
    (plan, skipped)
}

fn deposit(tau: &mut Pheromone, plan: &Plan, skipped: &[usize], amount: f64) {
    for o in plan.chosen() {
        tau.opp[o] += amount;
    }
    for &t in skipped {
        tau.skip[t] += amount;
    }
}

/// Full run from a given pheromone state; returns the best plan, its trace and the final pheromone.
pub fn run_from(
    p: &Problem,
    obj: Objective,
    config: &SolverConfig,
    mut tau: Pheromone,
    deadline: &Deadline,
) -> (Plan, Trace, Pheromone) {
    let prm = config.aco;
    let mut rng = rng_for(config.seed);
    let scale = p.objective_scale(obj);
    let mut best: Option<(Plan, Vec<usize>, f64)> = None;
    let mut trace = Trace::default();
    for iter in 0..prm.iterations.max(1) {
        if iter > 0 && deadline.expired() {
            break;
        }
        let mut iter_best: Option<(Plan, Vec<usize>, f64)> = None;
        for _ in 0..prm.ants.max(1) {
            let (plan, skipped) = construct(p, obj, config, &tau, &mut rng);
            let v = plan.objective(p, obj);
            if iter_best.as_ref().is_none_or(|b| v > b.2 + 1e-12) {
                iter_best = Some((plan, skipped, v));
            }
        }
        let ib = iter_best.expect("at least one ant");
        if best.as_ref().is_none_or(|b| ib.2 > b.2 + 1e-12) {
            best = Some(ib.clone());
        }
        let gb = best.as_ref().expect("set above");
        trace.record(iter as u64, gb.2);

        for v in tau.opp.iter_mut().chain(tau.skip.iter_mut()) {
            *v *= 1.0 - prm.evaporation;
        }
        deposit(&mut tau, &ib.0, &ib.1, (ib.2 / scale).max(0.0) + 1e-3);
        deposit(&mut tau, &gb.0, &gb.1, (gb.2 / scale).max(0.0) + 1e-3);
    }
    let (plan, _, _) = best.expect("at least one iteration");
    (plan, trace, tau)
}

pub fn solve(p: &Problem, obj: Objective, config: &SolverConfig, deadline: &Deadline) -> Outcome {
    let (plan, trace, _) = run_from(p, obj, config, Pheromone::uniform(p), deadline);
    Outcome { plan, status: SolveStatus::Heuristic, trace }
}
