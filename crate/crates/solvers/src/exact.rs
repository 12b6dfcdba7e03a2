//! Depth-first branch and bound over per-task choices (one opportunity or none).

use orbsched_core::model::SolveStatus;

use crate::greedy::{self, Rule};
use crate::plan::{Plan, Problem};
use crate::{Deadline, Objective, Outcome, SolverConfig, Trace};

struct Search<'p, 'c, 'a> {
    p: &'p Problem<'c, 'a>,
    obj: Objective,
    order: Vec<usize>,
    suffix_profit: Vec<f64>,
    suffix_earliest: Vec<f64>,
    best: Plan,
    best_value: f64,
    nodes: u64,
    aborted: bool,
    deadline: &'p Deadline,
    trace: Trace,
}

impl Search<'_, '_, '_> {
    /// Optimistic value of any completion from depth `d`, given which remaining tasks can still be placed.
    fn bound(&self, plan: &Plan, d: usize, start_sum: f64) -> f64 {
        let p = self.p;
        let mut profit = plan.profit;
        let mut count = plan.count;
        let mut starts = start_sum;
        let rest = &self.order[d..];
        let cheap = match self.obj {
            Objective::TP => profit + self.suffix_profit[d],
            Objective::TCR => (count + rest.len()) as f64 / p.n_tasks as f64,
            Objective::ALL => self.all_bound(profit + self.suffix_profit[d], count + rest.len(), starts + self.suffix_earliest[d]),
        };
        if cheap <= self.best_value + 1e-12 {
            return cheap;
        }
        for &t in rest {
            let earliest = p.ctx.task_opps[t].iter().copied().find(|&o| plan.can_insert(p, o));
            if let Some(o) = earliest {
                profit += p.profits[t];
                count += 1;
                starts += p.ctx.opps[o].start;
            }
        }
        match self.obj {
            Objective::TP => profit,
            Objective::TCR => count as f64 / p.n_tasks as f64,
            Objective::ALL => self.all_bound(profit, count, starts),
        }
    }

    fn all_bound(&self, profit: f64, count: usize, starts: f64) -> f64 {
        let p = self.p;
        let n = p.n_tasks as f64;
        let tp = if p.total_profit > 0.0 { profit / p.total_profit } else { 0.0 };
        let tm = (starts + p.horizon * (n - count as f64)) / (p.horizon * n);
        (tp + count as f64 / n + 1.0 + 1.0 - tm) / 4.0
    }

    fn dfs(&mut self, plan: &mut Plan, d: usize, start_sum: f64) {
        self.nodes += 1;
        if self.aborted || (self.nodes.is_multiple_of(1024) && self.deadline.expired()) {
            self.aborted = true;
            return;
        }
        if d == self.order.len() {
            let v = plan.objective(self.p, self.obj);
            if v > self.best_value + 1e-12 {
                self.best_value = v;
                self.best = plan.clone();
                self.trace.record(self.nodes, v);
            }
            return;
        }
        if self.bound(plan, d, start_sum) <= self.best_value + 1e-12 {
            return;
        }
        let t = self.order[d];
        let p = self.p;
        for &o in &p.ctx.task_opps[t] {
            if plan.can_insert(p, o) {
                plan.insert(p, o);
                self.dfs(plan, d + 1, start_sum + p.ctx.opps[o].start);
                plan.remove_task(p, t);
                if self.aborted {
                    return;
                }
            }
        }
        self.dfs(plan, d + 1, start_sum);
    }
}

pub fn solve(p: &Problem, obj: Objective, config: &SolverConfig, deadline: &Deadline) -> Outcome {
    let inst = p.instance();
    let mut order = p.schedulable.clone();
    order.sort_by(|&a, &b| {
        p.ctx.task_opps[a].len().cmp(&p.ctx.task_opps[b].len()).then_with(|| inst.tasks[a].id.cmp(&inst.tasks[b].id))
    });
    let k = order.len();
    let mut suffix_profit = vec![0.0; k + 1];
    let mut suffix_earliest = vec![0.0; k + 1];
    for d in (0..k).rev() {
        let t = order[d];
        suffix_profit[d] = suffix_profit[d + 1] + p.profits[t];
        suffix_earliest[d] = suffix_earliest[d + 1] + p.ctx.opps[p.ctx.task_opps[t][0]].start;
    }

    // warm start from the constructive rules
    let mut best = Plan::empty(p);
    let mut best_value = best.objective(p, obj);
    for rule in Rule::ALL {
        let plan = greedy::solve(p, rule, config.seed, 1, deadline);
        let v = plan.objective(p, obj);
        if v > best_value + 1e-12 {
            best = plan;
            best_value = v;
        }
    }
    let mut trace = Trace::default();
    trace.record(0, best_value);

    let mut search = Search {
        p,
        obj,
        order,
        suffix_profit,
        suffix_earliest,
        best,
        best_value,
        nodes: 0,
        aborted: false,
        deadline,
        trace,
    };
    let mut plan = Plan::empty(p);
    search.dfs(&mut plan, 0, 0.0);
    let status = if search.aborted { SolveStatus::Incomplete } else { SolveStatus::Optimal };
    Outcome { plan: search.best, status, trace: search.trace }
}
