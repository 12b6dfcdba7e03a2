//! Constructive rules: insert tasks one at a time in a rule-specific order, best of several passes.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

use crate::plan::{Plan, Problem};
use crate::{rng_for, Deadline, SolverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Random task order, earliest feasible slot; keeps the most profitable pass.
    TP,
    /// Fewest windows and least flexibility first.
    TCR,
    /// Earliest opportunities first, each task at its earliest feasible slot.
    TM,
    /// Each task goes to the least-loaded satellite that can take it.
    BD,
}

impl Rule {
    pub fn of(kind: SolverKind) -> Option<Rule> {
        Some(match kind {
            SolverKind::GreedyTP => Rule::TP,
            SolverKind::GreedyTCR => Rule::TCR,
            SolverKind::GreedyTM => Rule::TM,
            SolverKind::GreedyBD => Rule::BD,
            _ => return None,
        })
    }

    pub const ALL: [Rule; 4] = [Rule::TP, Rule::TCR, Rule::TM, Rule::BD];

    /// Pass quality, larger is better; compared lexicographically.
    pub fn score(self, p: &Problem, plan: &Plan) -> (f64, f64) {
        let tcr = plan.count as f64;
        match self {
            Rule::TP => (plan.profit, tcr),
            Rule::TCR => (tcr, plan.profit),
            Rule::TM => (-plan.timeliness(p), tcr),
            Rule::BD => (plan.balance().unwrap_or(f64::NEG_INFINITY), tcr),
        }
    }
}

fn window_count(p: &Problem, task: usize) -> usize {
    let mut w: Vec<usize> = p.ctx.task_opps[task].iter().map(|&o| p.ctx.instance.opportunities[o].window).collect();
    w.sort_unstable();
    w.dedup();
    w.len()
}

fn first_last_start(p: &Problem, task: usize) -> (f64, f64) {
    let opps = &p.ctx.task_opps[task];
    let s = |o: usize| p.ctx.opps[o].start;
    let first = opps.iter().map(|&o| s(o)).fold(f64::INFINITY, f64::min);
    let last = opps.iter().map(|&o| s(o)).fold(f64::NEG_INFINITY, f64::max);
    (first, last)
}

/// Task order for one pass; `shuffle` randomises the base order that the rule key then sorts stably.
pub fn task_order(p: &Problem, rule: Rule, rng: Option<&mut ChaCha8Rng>) -> Vec<usize> {
    let mut order = p.schedulable.clone();
    if let Some(rng) = rng {
        order.shuffle(rng);
    }
    match rule {
        Rule::TP | Rule::BD => {}
        Rule::TCR => {
            let key: Vec<(usize, f64)> = (0..p.n_tasks)
                .map(|t| {
                    let (a, b) = first_last_start(p, t);
                    (window_count(p, t), if b >= a { b - a } else { 0.0 })
                })
                .collect();
            order.sort_by(|&a, &b| key[a].0.cmp(&key[b].0).then(key[a].1.total_cmp(&key[b].1)));
        }
        Rule::TM => {
            let key: Vec<(f64, f64)> = (0..p.n_tasks).map(|t| first_last_start(p, t)).collect();
            order.sort_by(|&a, &b| key[a].0.total_cmp(&key[b].0).then(key[a].1.total_cmp(&key[b].1)));
        }
    }
    order
}

/// Inserts each task of `order` by the rule's slot choice.
pub fn construct(p: &Problem, rule: Rule, order: &[usize], mut plan: Plan) -> Plan {
    for &t in order {
        if plan.assigned[t].is_some() {
            continue;
        }
        let pick = match rule {
            Rule::BD => plan
                .feasible_options(p, t)
                .into_iter()
                .min_by(|&a, &b| {
                    let (x, y) = (&p.ctx.opps[a], &p.ctx.opps[b]);
                    plan.per_sat[x.sat]
                        .cmp(&plan.per_sat[y.sat])
                        .then(x.start.total_cmp(&y.start))
                        .then(p.lex_rank[a].cmp(&p.lex_rank[b]))
                }),
            _ => p.ctx.task_opps[t].iter().copied().find(|&o| plan.can_insert(p, o)),
        };
        if let Some(o) = pick {
            plan.insert(p, o);
        }
    }
    plan
}

pub fn solve(p: &Problem, rule: Rule, seed: u64, restarts: usize, deadline: &Deadline) -> Plan {
    let mut rng = rng_for(seed);
    let mut best: Option<(Plan, (f64, f64))> = None;
    for pass in 0..restarts.max(1) {
        if pass > 0 && deadline.expired() {
            break;
        }
        // the first pass of the ordered rules uses plain task order for its ties
        let shuffle = rule == Rule::TP || pass > 0;
        let order = task_order(p, rule, shuffle.then_some(&mut rng));
        let plan = construct(p, rule, &order, Plan::empty(p));
        let score = rule.score(p, &plan);
        let better = match &best {
            None => true,
            Some((_, s)) => score.partial_cmp(s) == Some(Ordering::Greater),
        };
        if better {
            best = Some((plan, score));
        }
    }
    best.map(|(p, _)| p).expect("at least one pass runs")
}
