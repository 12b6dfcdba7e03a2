//! Shared plan state: one optional opportunity per task, per-satellite timelines and
//! per-segment resource totals kept up to date on every insertion and removal.

use orbsched_core::feasibility::Context;
use orbsched_core::kinematics::delta_g;
use orbsched_core::metrics::{balance_degree, composite, timeliness};
use orbsched_core::model::{Instance, LookAngles, Schedule, SolveStatus};

use crate::Objective;

const RESOURCE_EPS: f64 = 1e-9;
/// Margin inside which the O(1) resource estimate is re-checked with the exact ledger sum.
const RECHECK_BAND: f64 = 1e-6;

/// Precomputed, read-only view of one instance shared by every solver.
pub struct Problem<'c, 'a> {
    pub ctx: &'c Context<'a>,
    pub n_tasks: usize,
    pub profits: Vec<f64>,
    pub total_profit: f64,
    pub horizon: f64,
    /// Longest opportunity per satellite, bounding how far back a conflict can reach.
    pub max_len: Vec<f64>,
    /// Tasks with at least one opportunity, in task order.
    pub schedulable: Vec<usize>,
    /// Per opportunity, the lexicographic key (task id, satellite id, start) rank.
    pub lex_rank: Vec<usize>,
}

impl<'c, 'a> Problem<'c, 'a> {
    pub fn new(ctx: &'c Context<'a>) -> Self {
        let inst = ctx.instance;
        let profits: Vec<f64> = inst.tasks.iter().map(|t| t.profit as f64).collect();
        let mut max_len = vec![0.0f64; inst.satellites.len()];
        for o in &ctx.opps {
            max_len[o.sat] = max_len[o.sat].max(o.end - o.start);
        }
        let schedulable = (0..inst.tasks.len()).filter(|&t| !ctx.task_opps[t].is_empty()).collect();
        let mut order: Vec<usize> = (0..ctx.opps.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&ctx.opps[a], &ctx.opps[b]);
            inst.tasks[x.task]
                .id
                .cmp(&inst.tasks[y.task].id)
                .then_with(|| inst.satellites[x.sat].id.cmp(&inst.satellites[y.sat].id))
                .then(x.start.total_cmp(&y.start))
                .then(a.cmp(&b))
        });
        let mut lex_rank = vec![0; order.len()];
        for (r, &o) in order.iter().enumerate() {
            lex_rank[o] = r;
        }
        Self {
            ctx,
            n_tasks: inst.tasks.len(),
            total_profit: profits.iter().sum(),
            profits,
            horizon: inst.horizon_s,
            max_len,
            schedulable,
            lex_rank,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.ctx.instance
    }

    /// Upper bound on the objective used to normalise temperatures and deposits.
    pub fn objective_scale(&self, obj: Objective) -> f64 {
        match obj {
            Objective::TP => self.total_profit.max(1.0),
            Objective::TCR | Objective::ALL => 1.0,
        }
    }

    /// Weight of scheduling one task, used by constructive heuristics.
    pub fn task_weight(&self, obj: Objective, task: usize) -> f64 {
        let n = self.n_tasks.max(1) as f64;
        match obj {
            Objective::TP => self.profits[task],
            Objective::TCR => 1.0,
            Objective::ALL => self.profits[task] / self.total_profit.max(1.0) + 1.0 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    /// Chosen opportunity per task.
    pub assigned: Vec<Option<usize>>,
    timeline: Vec<Vec<usize>>,
    energy: Vec<Vec<f64>>,
    memory: Vec<Vec<f64>>,
    pub per_sat: Vec<usize>,
    pub count: usize,
    pub profit: f64,
}

impl Plan {
    pub fn empty(p: &Problem) -> Self {
        let ctx = p.ctx;
        let sats = ctx.instance.satellites.len();
        Self {
            assigned: vec![None; p.n_tasks],
            timeline: vec![Vec::new(); sats],
            energy: ctx.segment_count.iter().map(|&n| vec![0.0; n]).collect(),
            memory: ctx.segment_count.iter().map(|&n| vec![0.0; n]).collect(),
            per_sat: vec![0; sats],
            count: 0,
            profit: 0.0,
        }
    }

    pub fn from_opps(p: &Problem, opps: impl IntoIterator<Item = usize>) -> Self {
        let mut plan = Self::empty(p);
        for o in opps {
            if plan.can_insert(p, o) {
                plan.insert(p, o);
            }
        }
        plan
    }

    pub fn chosen(&self) -> impl Iterator<Item = usize> + '_ {
        self.assigned.iter().filter_map(|o| *o)
    }

    pub fn timeline(&self, sat: usize) -> &[usize] {
        &self.timeline[sat]
    }

    fn position(p: &Problem, line: &[usize], o: usize) -> usize {
        let key = (p.ctx.opps[o].start, o);
        line.partition_point(|&x| (p.ctx.opps[x].start, x) < key)
    }

    fn attitude_before(p: &Problem, line: &[usize], pos: usize, seg: usize) -> LookAngles {
        match pos.checked_sub(1).map(|i| line[i]) {
            Some(x) if p.ctx.opps[x].segment == seg => p.ctx.opps[x].att_end,
            _ => LookAngles::NADIR,
        }
    }

    pub fn can_insert(&self, p: &Problem, o: usize) -> bool {
        let ctx = p.ctx;
        let op = &ctx.opps[o];
        if self.assigned[op.task].is_some() {
            return false;
        }
        let line = &self.timeline[op.sat];
        let pos = Self::position(p, line, o);
        let reach = p.max_len[op.sat] + ctx.max_sep[op.sat] + 1.0;
        for &x in line[..pos].iter().rev() {
            if ctx.opps[x].start + reach < op.start {
                break;
            }
            if !ctx.verdict(x, o).is_compatible() {
                return false;
            }
        }
        for &x in &line[pos..] {
            if ctx.opps[x].start > op.end + ctx.max_sep[op.sat] + 1.0 {
                break;
            }
            if !ctx.verdict(o, x).is_compatible() {
                return false;
            }
        }
        self.resources_allow(p, o, pos)
    }

    fn resources_allow(&self, p: &Problem, o: usize, pos: usize) -> bool {
        let ctx = p.ctx;
        let op = &ctx.opps[o];
        let spec = &ctx.instance.satellites[op.sat];
        let line = &self.timeline[op.sat];
        let seg = op.segment;
        let dur = op.end - op.start;

        let mem = self.memory[op.sat][seg] + dur * spec.rates.obs_memory_per_s;
        let prev = Self::attitude_before(p, line, pos, seg);
        let next = line.get(pos).filter(|&&x| ctx.opps[x].segment == seg).map(|&x| ctx.opps[x].att_start);
        let mut slew = delta_g(&prev, &op.att_start) + delta_g(&op.att_start, &op.att_end);
        if let Some(n) = next {
            slew += delta_g(&op.att_end, &n) - delta_g(&prev, &n);
        }
        let energy = self.energy[op.sat][seg] + dur * spec.rates.obs_energy_per_s + slew * spec.rates.slew_energy_per_deg;

        let (eb, mb) = (spec.capacities.energy_per_orbit, spec.capacities.storage_per_orbit);
        if energy < eb - RECHECK_BAND && mem < mb - RECHECK_BAND {
            return true;
        }
        if energy > eb + RECHECK_BAND || mem > mb + RECHECK_BAND {
            return false;
        }
        // close to a budget: use the same summation as the validator
        let mut members: Vec<usize> = line.iter().copied().filter(|&x| ctx.opps[x].segment == seg).collect();
        let at = Self::position(p, &members, o);
        members.insert(at, o);
        let (e, m) = ctx.segment_usage(op.sat, &members);
        e <= eb + RESOURCE_EPS && m <= mb + RESOURCE_EPS
    }

    fn refresh_segment(&mut self, p: &Problem, sat: usize, seg: usize) {
        let ctx = p.ctx;
        let members: Vec<usize> = self.timeline[sat].iter().copied().filter(|&x| ctx.opps[x].segment == seg).collect();
        let (e, m) = ctx.segment_usage(sat, &members);
        self.energy[sat][seg] = e;
        self.memory[sat][seg] = m;
    }

    /// Caller guarantees `can_insert`.
    pub fn insert(&mut self, p: &Problem, o: usize) {
        let op = &p.ctx.opps[o];
        let pos = Self::position(p, &self.timeline[op.sat], o);
        self.timeline[op.sat].insert(pos, o);
        self.assigned[op.task] = Some(o);
        self.per_sat[op.sat] += 1;
        self.count += 1;
        self.profit += p.profits[op.task];
        self.refresh_segment(p, op.sat, op.segment);
    }

    pub fn remove_task(&mut self, p: &Problem, task: usize) -> Option<usize> {
        let o = self.assigned[task].take()?;
        let op = &p.ctx.opps[o];
        let line = &mut self.timeline[op.sat];
        let pos = line.iter().position(|&x| x == o).expect("assigned opportunity is on its timeline");
        line.remove(pos);
        self.per_sat[op.sat] -= 1;
        self.count -= 1;
        self.profit -= p.profits[op.task];
        self.refresh_segment(p, op.sat, op.segment);
        Some(o)
    }

    pub fn feasible_options(&self, p: &Problem, task: usize) -> Vec<usize> {
        p.ctx.task_opps[task].iter().copied().filter(|&o| self.can_insert(p, o)).collect()
    }

    pub fn timeliness(&self, p: &Problem) -> f64 {
        let starts: Vec<f64> = self.chosen().map(|o| p.ctx.opps[o].start).collect();
        timeliness(&starts, p.horizon, p.n_tasks)
    }

    pub fn balance(&self) -> Option<f64> {
        balance_degree::<f64>(&self.per_sat)
    }

    pub fn objective(&self, p: &Problem, obj: Objective) -> f64 {
        let n = p.n_tasks;
        let tcr = if n == 0 { 0.0 } else { self.count as f64 / n as f64 };
        match obj {
            Objective::TP => self.profit,
            Objective::TCR => tcr,
            Objective::ALL => {
                let tp_norm = if p.total_profit > 0.0 { self.profit / p.total_profit } else { 0.0 };
                composite(tp_norm, tcr, self.balance(), self.timeliness(p))
            }
        }
    }

    /// Assignments in (task id, satellite id, start) order.
    pub fn to_schedule(&self, p: &Problem, solver: &str, status: SolveStatus) -> Schedule {
        let mut opps: Vec<usize> = self.chosen().collect();
        opps.sort_by_key(|&o| p.lex_rank[o]);
        let mut s = Schedule::new(&p.instance().id, solver, status);
        s.assignments = opps.into_iter().map(|o| p.ctx.assignment(o)).collect();
        s
    }
}
