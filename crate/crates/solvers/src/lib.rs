//! Schedulers sharing one interface: an instance goes in, a validator-clean schedule comes out.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::time::{Duration, Instant};

use orbsched_core::feasibility::Context;
use orbsched_core::model::{Instance, Schedule, SolveStatus};
use orbsched_core::{Error, Result};

pub mod aco;
pub mod exact;
pub mod ga;
pub mod greedy;
pub mod plan;
pub mod sa;

pub use plan::{Plan, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    TP,
    TCR,
    ALL,
}

impl Objective {
    pub const ALL_VARIANTS: [Objective; 3] = [Objective::TP, Objective::TCR, Objective::ALL];

    pub fn tag(self) -> &'static str {
        match self {
            Objective::TP => "tp",
            Objective::TCR => "tcr",
            Objective::ALL => "all",
        }
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tp" => Ok(Objective::TP),
            "tcr" => Ok(Objective::TCR),
            "all" => Ok(Objective::ALL),
            other => Err(Error::domain(format!("unknown objective {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverKind {
    #[serde(rename = "exact", alias = "exact_bb", alias = "bb")]
    ExactBB,
    #[serde(rename = "greedy-tp", alias = "greedy_tp")]
    GreedyTP,
    #[serde(rename = "greedy-tcr", alias = "greedy_tcr")]
    GreedyTCR,
    #[serde(rename = "greedy-tm", alias = "greedy_tm")]
    GreedyTM,
    #[serde(rename = "greedy-bd", alias = "greedy_bd")]
    GreedyBD,
    #[serde(rename = "sa")]
    SA,
    #[serde(rename = "ga")]
    GA,
    #[serde(rename = "aco")]
    ACO,
}

impl SolverKind {
    pub const ALL: [SolverKind; 8] = [
        SolverKind::ExactBB,
        SolverKind::GreedyTP,
        SolverKind::GreedyTCR,
        SolverKind::GreedyTM,
        SolverKind::GreedyBD,
        SolverKind::SA,
        SolverKind::GA,
        SolverKind::ACO,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SolverKind::ExactBB => "exact",
            SolverKind::GreedyTP => "greedy-tp",
            SolverKind::GreedyTCR => "greedy-tcr",
            SolverKind::GreedyTM => "greedy-tm",
            SolverKind::GreedyBD => "greedy-bd",
            SolverKind::SA => "sa",
            SolverKind::GA => "ga",
            SolverKind::ACO => "aco",
        }
    }

    pub fn is_greedy(self) -> bool {
        matches!(self, SolverKind::GreedyTP | SolverKind::GreedyTCR | SolverKind::GreedyTM | SolverKind::GreedyBD)
    }
}

impl FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        SolverKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .or(match s.as_str() {
                "exactbb" | "bb" | "mip" => Some(SolverKind::ExactBB),
                _ => None,
            })
            .ok_or_else(|| Error::domain(format!("unknown solver {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    /// Initial temperature as a multiple of the mean per-task objective.
    pub t0_factor: f64,
    pub cooling: f64,
    pub iterations_per_temperature: usize,
    /// Stop once the temperature falls below this fraction of the initial one.
    pub min_temperature_ratio: f64,
    /// Largest number of tasks removed by one remove-and-reinsert move.
    pub reinsert_k: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        Self { t0_factor: 10.0, cooling: 0.95, iterations_per_temperature: 200, min_temperature_ratio: 1e-3, reinsert_k: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub tournament: usize,
    pub elite: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self { population: 50, generations: 200, mutation_rate: 0.1, tournament: 2, elite: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcoParams {
    pub ants: usize,
    pub iterations: usize,
    pub evaporation: f64,
    pub pheromone_weight: f64,
    pub heuristic_weight: f64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self { ants: 20, iterations: 100, evaporation: 0.1, pheromone_weight: 1.0, heuristic_weight: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub solver: SolverKind,
    /// Ignored by the greedy rules, which carry their own metric.
    pub objective: Objective,
    pub seed: u64,
    pub time_limit_s: f64,
    pub restarts: usize,
    pub sa: SaParams,
    pub ga: GaParams,
    pub aco: AcoParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::GreedyTP,
            objective: Objective::TP,
            seed: 0,
            time_limit_s: 60.0,
            restarts: 10,
            sa: SaParams::default(),
            ga: GaParams::default(),
            aco: AcoParams::default(),
        }
    }
}

impl SolverConfig {
    pub fn new(solver: SolverKind, objective: Objective, seed: u64) -> Self {
        Self { solver, objective, seed, ..Self::default() }
    }

    /// Solver tag written into schedules and result tables, e.g. `sa-all`.
    pub fn label(&self) -> String {
        if self.solver.is_greedy() {
            self.solver.tag().to_string()
        } else {
            format!("{}-{}", self.solver.tag(), self.objective.tag())
        }
    }

    pub fn check(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.time_limit_s > 0.0) {
            errs.push("time_limit_s must be positive".to_string());
        }
        if self.restarts == 0 {
            errs.push("restarts must be at least 1".into());
        }
        if self.ga.population < 2 {
            errs.push("GA population must be at least 2".into());
        }
        if self.ga.tournament == 0 {
            errs.push("GA tournament size must be at least 1".into());
        }
        if self.aco.ants == 0 {
            errs.push("ACO needs at least one ant".into());
        }
        if !(0.0..=1.0).contains(&self.aco.evaporation) {
            errs.push("ACO evaporation must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.sa.cooling) {
            errs.push("SA cooling factor must lie in [0, 1]".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs))
        }
    }
}

/// Soft wall-clock budget checked between search steps.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    start: Instant,
    limit: Duration,
}

impl Deadline {
    pub fn new(limit_s: f64) -> Self {
        Self { start: Instant::now(), limit: Duration::from_secs_f64(limit_s.clamp(0.0, 1e9)) }
    }

    pub fn expired(&self) -> bool {
        self.start.elapsed() >= self.limit
    }

    pub fn elapsed_s(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Incumbent objective after each improvement, starting from the first plan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub points: Vec<(u64, f64)>,
}

impl Trace {
    pub fn record(&mut self, step: u64, value: f64) {
        if self.points.last().is_none_or(|&(_, v)| value > v) {
            self.points.push((step, value));
        }
    }
}

pub struct Outcome {
    pub plan: Plan,
    pub status: SolveStatus,
    pub trace: Trace,
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn run(problem: &Problem, config: &SolverConfig, deadline: &Deadline) -> Outcome {
    let obj = config.objective;
    match config.solver {
        SolverKind::ExactBB => exact::solve(problem, obj, config, deadline),
        SolverKind::GreedyTP | SolverKind::GreedyTCR | SolverKind::GreedyTM | SolverKind::GreedyBD => {
            let rule = greedy::Rule::of(config.solver).expect("greedy kind");
            let plan = greedy::solve(problem, rule, config.seed, config.restarts, deadline);
            let mut trace = Trace::default();
            trace.record(0, rule.score(problem, &plan).0);
            Outcome { plan, status: SolveStatus::Heuristic, trace }
        }
        SolverKind::SA => sa::solve(problem, obj, config, deadline),
        SolverKind::GA => ga::solve(problem, obj, config, deadline),
        SolverKind::ACO => aco::solve(problem, obj, config, deadline),
    }
}

/// Solves and also returns the incumbent trace.
pub fn solve_with_trace(inst: &Instance, config: &SolverConfig) -> Result<(Schedule, Trace)> {
    config.check()?;
    let ctx = Context::new(inst)?;
    let problem = Problem::new(&ctx);
    let deadline = Deadline::new(config.time_limit_s);
    let out = run(&problem, config, &deadline);
    let mut schedule = out.plan.to_schedule(&problem, &config.label(), out.status);
    schedule.wall_time_s = deadline.elapsed_s();
    Ok((schedule, out.trace))
}

pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<Schedule> {
    solve_with_trace(inst, config).map(|(s, _)| s)
}
