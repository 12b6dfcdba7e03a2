//! Genetic algorithm over task-indexed assignment vectors with repair after every operator.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use orbsched_core::model::SolveStatus;

use crate::greedy::{self, Rule};
use crate::plan::{Plan, Problem};
use crate::{rng_for, Deadline, Objective, Outcome, SolverConfig, Trace};

pub type Genome = Vec<Option<usize>>;

/// Feasible plan closest to `genes`: genes are placed in random order, clashing ones dropped,
/// then free tasks are added wherever that does not lower the objective.
pub fn repair(p: &Problem, obj: Objective, genes: &Genome, rng: &mut ChaCha8Rng) -> Plan {
    let mut order: Vec<usize> = (0..genes.len()).filter(|&t| genes[t].is_some()).collect();
    order.shuffle(rng);
    let mut plan = Plan::empty(p);
    for t in order {
        let o = genes[t].expect("filtered");
        if plan.can_insert(p, o) {
            plan.insert(p, o);
        }
    }
    let mut free: Vec<usize> = p.schedulable.iter().copied().filter(|&t| plan.assigned[t].is_none()).collect();
    free.shuffle(rng);
    let mut value = plan.objective(p, obj);
    for t in free {
        if let Some(o) = p.ctx.task_opps[t].iter().copied().find(|&o| plan.can_insert(p, o)) {
            plan.insert(p, o);
            let v = plan.objective(p, obj);
            if v + 1e-12 >= value {
                value = v;
            } else {
                plan.remove_task(p, t);
            }
        }
    }
    plan
}

fn mutate(p: &Problem, genes: &mut Genome, rate: f64, rng: &mut ChaCha8Rng) {
    for &t in &p.schedulable {
        if !rng.gen_bool(rate.clamp(0.0, 1.0)) {
            continue;
        }
        let opts = &p.ctx.task_opps[t];
        genes[t] = match genes[t] {
            Some(_) if rng.gen_bool(0.5) => None,
            _ => opts.choose(rng).copied(),
        };
    }
}

fn tournament<'a>(pop: &'a [(Plan, f64)], k: usize, rng: &mut ChaCha8Rng) -> &'a Plan {
    let mut best = rng.gen_range(0..pop.len());
    for _ in 1..k {
        let c = rng.gen_range(0..pop.len());
        if pop[c].1 > pop[best].1 || (pop[c].1 == pop[best].1 && c < best) {
            best = c;
        }
    }
    &pop[best].0
}

/// Constructive plans from every greedy rule, then perturbed copies of them.
pub fn initial_population(p: &Problem, obj: Objective, config: &SolverConfig, rng: &mut ChaCha8Rng, deadline: &Deadline) -> Vec<Plan> {
    let size = config.ga.population.max(2);
    let seeds: Vec<Plan> = Rule::ALL.iter().map(|&r| greedy::solve(p, r, config.seed, 1, deadline)).collect();
    let mut pop: Vec<Plan> = seeds.iter().take(size).cloned().collect();
    while pop.len() < size {
        let base = &seeds[rng.gen_range(0..seeds.len())];
        let mut genes = base.assigned.clone();
        mutate(p, &mut genes, 0.3, rng);
        pop.push(repair(p, obj, &genes, rng));
    }
    pop
}

/// Runs the generational loop from `population`; `observe` sees every generation.
pub fn evolve(
    p: &Problem,
    obj: Objective,
    config: &SolverConfig,
    population: Vec<Plan>,
    rng: &mut ChaCha8Rng,
    deadline: &Deadline,
    observe: &mut dyn FnMut(usize, &[(Plan, f64)]),
) -> (Plan, Trace) {
    let prm = config.ga;
    let n = p.n_tasks;
    let mut pop: Vec<(Plan, f64)> = population
        .into_iter()
        .map(|pl| {
            let v = pl.objective(p, obj);
            (pl, v)
        })
        .collect();
    let rank = |pop: &mut Vec<(Plan, f64)>| pop.sort_by(|a, b| b.1.total_cmp(&a.1));
    rank(&mut pop);
    observe(0, &pop);
    let mut trace = Trace::default();
    trace.record(0, pop[0].1);

    for gen in 1..=prm.generations {
        if deadline.expired() {
            break;
        }
        let elite = prm.elite.min(pop.len());
        let mut next: Vec<(Plan, f64)> = pop[..elite].to_vec();
        while next.len() < pop.len() {
            let a = tournament(&pop, prm.tournament, rng);
            let b = tournament(&pop, prm.tournament, rng);
            let cut = if n > 1 { rng.gen_range(1..n) } else { 0 };
            let mut genes: Genome = a.assigned[..cut].iter().chain(&b.assigned[cut..]).copied().collect();
            mutate(p, &mut genes, prm.mutation_rate, rng);
            let child = repair(p, obj, &genes, rng);
            let v = child.objective(p, obj);
            next.push((child, v));
        }
        pop = next;
        rank(&mut pop);
        observe(gen, &pop);
        trace.record(gen as u64, pop[0].1);
    }
    (pop.swap_remove(0).0, trace)
}

pub fn solve(p: &Problem, obj: Objective, config: &SolverConfig, deadline: &Deadline) -> Outcome {
    let mut rng = rng_for(config.seed);
    let pop = initial_population(p, obj, config, &mut rng, deadline);
    let (plan, trace) = evolve(p, obj, config, pop, &mut rng, deadline, &mut |_, _| {});
    Outcome { plan, status: SolveStatus::Heuristic, trace }
}
