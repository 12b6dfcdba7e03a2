mod common;

use common::*;
use orbsched_core::feasibility::{validate_schedule, Context};
use orbsched_core::synthetic::{random_instance, SyntheticSize};
use orbsched_solvers::greedy::{self, Rule};
use orbsched_solvers::{aco, ga, rng_for, sa, solve, solve_with_trace, Deadline, Objective, Plan, Problem, SolverConfig, SolverKind};

fn quick(kind: SolverKind, obj: Objective, seed: u64) -> SolverConfig {
    let mut c = SolverConfig::new(kind, obj, seed);
    c.ga.generations = 30;
    c.ga.population = 20;
    c.aco.iterations = 20;
    c.aco.ants = 10;
    c.sa.iterations_per_temperature = 50;
    c.restarts = 5;
    c
}

#[test]
fn every_solver_returns_feasible_schedules() {
    for seed in 0..30u64 {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        for kind in SolverKind::ALL {
            for obj in Objective::ALL_VARIANTS {
                let mut cfg = quick(kind, obj, seed);
                cfg.time_limit_s = 2.0;
                let s = solve(&inst, &cfg).unwrap();
                let rep = validate_schedule(&s, &inst).unwrap();
                assert!(rep.feasible, "seed {seed} {kind:?} {obj:?}: {:?}", rep.violations);
                assert_eq!(s.solver, cfg.label());
            }
        }
    }
}

#[test]
fn same_seed_same_plan() {
    let inst = random_instance(11, SyntheticSize::Fuzz);
    for kind in SolverKind::ALL {
        let cfg = quick(kind, Objective::ALL, 42);
        let a = solve(&inst, &cfg).unwrap();
        let b = solve(&inst, &cfg).unwrap();
        assert_eq!(a.plan_key(), b.plan_key(), "{kind:?}");
        assert_eq!(a.status, b.status);
    }
}

#[test]
fn traces_only_improve() {
    for seed in 0..5u64 {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        for kind in SolverKind::ALL {
            let (s, trace) = solve_with_trace(&inst, &quick(kind, Objective::TP, seed)).unwrap();
            assert!(!trace.points.is_empty());
            for w in trace.points.windows(2) {
                assert!(w[1].1 > w[0].1 && w[1].0 >= w[0].0);
            }
            if !kind.is_greedy() {
                let last = trace.points.last().unwrap().1;
                assert!((last - score(&inst, &s, Objective::TP)).abs() < 1e-9, "{kind:?}");
            }
        }
    }
}

/// Y has one window that overlaps X's first one; X has a second, later window.
fn tcr_fixture() -> orbsched_core::Instance {
    fixture(
        &["S1"],
        vec![task("X", 10.0, 1), task("Y", 10.0, 1)],
        vec![win("X", "S1", 0.0, 12.0), win("X", "S1", 500.0, 512.0), win("Y", "S1", 0.0, 12.0)],
    )
}

#[test]
fn tcr_rule_handles_scarce_tasks_first() {
    let inst = tcr_fixture();
    let ctx = Context::new(&inst).unwrap();
    let p = Problem::new(&ctx);
    let order = greedy::task_order(&p, Rule::TCR, None);
    assert_eq!(order, vec![1, 0]);
    let s = solve(&inst, &SolverConfig::new(SolverKind::GreedyTCR, Objective::TCR, 0)).unwrap();
    assert_eq!(s.assignments.len(), 2);
    let x = s.assignments.iter().find(|a| a.task_id == "X").unwrap();
    assert_eq!(x.start_s, 500.0);
}

#[test]
fn tm_rule_takes_the_earliest_slot() {
    let inst = fixture(
        &["S1", "S2"],
        vec![task("late", 5.0, 1), task("early", 5.0, 1)],
        vec![win("late", "S2", 300.0, 340.0), win("late", "S1", 200.0, 240.0), win("early", "S1", 10.0, 30.0)],
    );
    let ctx = Context::new(&inst).unwrap();
    let p = Problem::new(&ctx);
    assert_eq!(greedy::task_order(&p, Rule::TM, None), vec![1, 0]);
    let s = solve(&inst, &SolverConfig::new(SolverKind::GreedyTM, Objective::TP, 0)).unwrap();
    let start = |id: &str| s.assignments.iter().find(|a| a.task_id == id).unwrap().start_s;
    assert_eq!(start("early"), 10.0);
    assert_eq!(start("late"), 200.0);
}

#[test]
fn bd_rule_spreads_load() {
    let names: Vec<String> = (0..4).map(|i| format!("t{i}")).collect();
    let tasks = names.iter().map(|n| task(n, 10.0, 1)).collect();
    let mut windows = Vec::new();
    for (i, n) in names.iter().enumerate() {
        let a = 100.0 * i as f64;
        windows.push(win(n, "S1", a, a + 20.0));
        windows.push(win(n, "S2", a, a + 20.0));
    }
    let inst = fixture(&["S1", "S2"], tasks, windows);
    let s = solve(&inst, &SolverConfig::new(SolverKind::GreedyBD, Objective::TP, 0)).unwrap();
    let on = |sat: &str| s.assignments.iter().filter(|a| a.satellite_id == sat).count();
    assert_eq!((on("S1"), on("S2")), (2, 2));
    // the plain earliest-slot rule piles everything onto one satellite
    let tp = solve(&inst, &SolverConfig::new(SolverKind::GreedyTM, Objective::TP, 0)).unwrap();
    assert_eq!(tp.assignments.iter().filter(|a| a.satellite_id == "S1").count(), 4);
}

#[test]
fn sa_never_ends_below_its_start() {
    for seed in 0..15u64 {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        let ctx = Context::new(&inst).unwrap();
        let p = Problem::new(&ctx);
        let d = Deadline::new(10.0);
        for obj in Objective::ALL_VARIANTS {
            let cfg = quick(SolverKind::SA, obj, seed);
            let start = greedy::solve(&p, Rule::TP, seed, cfg.restarts, &d).objective(&p, obj);
            let out = sa::solve(&p, obj, &cfg, &d);
            assert!(out.plan.objective(&p, obj) >= start - 1e-12);
        }
    }
}

#[test]
fn sa_at_zero_temperature_is_a_hill_climb() {
    let inst = random_instance(4, SyntheticSize::Fuzz);
    let ctx = Context::new(&inst).unwrap();
    let p = Problem::new(&ctx);
    let d = Deadline::new(10.0);
    let mut cfg = quick(SolverKind::SA, Objective::TP, 4);
    cfg.sa.t0_factor = 0.0;
    let out = sa::solve(&p, Objective::TP, &cfg, &d);
    // with no uphill acceptance the current plan is always the best one, so the trace is strictly rising
    for w in out.trace.points.windows(2) {
        assert!(w[1].1 > w[0].1);
    }
    let start = greedy::solve(&p, Rule::TP, 4, cfg.restarts, &d).objective(&p, Objective::TP);
    assert!(out.plan.objective(&p, Objective::TP) >= start);
}

#[test]
fn sa_moves_keep_plans_feasible() {
    for seed in 0..10u64 {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        let ctx = Context::new(&inst).unwrap();
        let p = Problem::new(&ctx);
        let mut rng = rng_for(seed);
        let mut plan = greedy::solve(&p, Rule::TP, seed, 1, &Deadline::new(1.0));
        for _ in 0..300 {
            sa::neighbour(&p, &mut plan, &mut rng, 3);
            let opps: Vec<usize> = plan.chosen().collect();
            assert!(validate_schedule(&schedule_of(&inst, &opps), &inst).unwrap().feasible);
            assert_eq!(plan.count, opps.len());
        }
    }
}

#[test]
fn ga_keeps_its_elite_and_valid_population() {
    for seed in 0..5u64 {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        let ctx = Context::new(&inst).unwrap();
        let p = Problem::new(&ctx);
        let d = Deadline::new(10.0);
        let cfg = quick(SolverKind::GA, Objective::ALL, seed);
        let mut rng = rng_for(seed);
        let pop = ga::initial_population(&p, Objective::ALL, &cfg, &mut rng, &d);
        assert_eq!(pop.len(), cfg.ga.population);
        let mut best_so_far = f64::NEG_INFINITY;
        let mut prev_elite: Option<Vec<Option<usize>>> = None;
        let mut observe = |_gen: usize, pop: &[(Plan, f64)]| {
            assert_eq!(pop.len(), cfg.ga.population);
            for (plan, v) in pop {
                let opps: Vec<usize> = plan.chosen().collect();
                assert!(validate_schedule(&schedule_of(&inst, &opps), &inst).unwrap().feasible);
                assert!((plan.objective(&p, Objective::ALL) - v).abs() < 1e-12);
            }
            assert!(pop[0].1 >= best_so_far - 1e-12);
            if let Some(prev) = &prev_elite {
                assert!(pop.iter().any(|(pl, _)| &pl.assigned == prev), "elite lost");
            }
            best_so_far = pop[0].1;
            prev_elite = Some(pop[0].0.assigned.clone());
        };
        let (best, _) = ga::evolve(&p, Objective::ALL, &cfg, pop, &mut rng, &d, &mut observe);
        assert!((best.objective(&p, Objective::ALL) - best_so_far).abs() < 1e-12);
    }
}

#[test]
fn ga_with_identical_population_still_runs() {
    let inst = random_instance(2, SyntheticSize::Fuzz);
    let ctx = Context::new(&inst).unwrap();
    let p = Problem::new(&ctx);
    let d = Deadline::new(10.0);
    let cfg = quick(SolverKind::GA, Objective::TP, 2);
    let seed_plan = greedy::solve(&p, Rule::TP, 2, 1, &d);
    let pop = vec![seed_plan.clone(); cfg.ga.population];
    let mut rng = rng_for(2);
    let (best, _) = ga::evolve(&p, Objective::TP, &cfg, pop, &mut rng, &d, &mut |_, _| {});
    assert!(best.objective(&p, Objective::TP) >= seed_plan.objective(&p, Objective::TP));
}

#[test]
fn aco_pheromone_never_decays_without_evaporation() {
    let inst = random_instance(6, SyntheticSize::Fuzz);
    let ctx = Context::new(&inst).unwrap();
    let p = Problem::new(&ctx);
    let d = Deadline::new(10.0);
    let mut cfg = quick(SolverKind::ACO, Objective::ALL, 6);
    cfg.aco.evaporation = 0.0;
    let start = aco::Pheromone::uniform(&p);
    let mut tau = start.clone();
    for round in 0..5 {
        cfg.seed = round;
        cfg.aco.iterations = 3;
        let (_, _, next) = aco::run_from(&p, Objective::ALL, &cfg, tau.clone(), &d);
        for (a, b) in tau.opp.iter().zip(&next.opp).chain(tau.skip.iter().zip(&next.skip)) {
            assert!(b >= a);
        }
        tau = next;
    }
    assert!(tau.opp.iter().zip(&start.opp).any(|(a, b)| a > b));
}

#[test]
fn aco_schedules_everything_when_nothing_conflicts() {
    let tasks: Vec<_> = (0..8).map(|i| task(&format!("t{i}"), 10.0, 1)).collect();
    let windows: Vec<_> = (0..8).map(|i| win(&format!("t{i}"), "S1", 100.0 * i as f64, 100.0 * i as f64 + 15.0)).collect();
    let inst = fixture(&["S1"], tasks, windows);
    let ctx = Context::new(&inst).unwrap();
    let p = Problem::new(&ctx);
    let mut cfg = SolverConfig::new(SolverKind::ACO, Objective::TP, 0);
    cfg.aco.iterations = 1;
    let out = aco::solve(&p, Objective::TP, &cfg, &Deadline::new(10.0));
    assert_eq!(out.plan.count, 8);
}

#[test]
fn config_rejects_bad_parameters() {
    let mut cfg = SolverConfig::default();
    cfg.aco.evaporation = 1.5;
    cfg.restarts = 0;
    assert!(cfg.check().is_err());
    let inst = random_instance(0, SyntheticSize::Micro);
    assert!(solve(&inst, &cfg).is_err());
    assert_eq!("greedy_tp".parse::<SolverKind>().unwrap(), SolverKind::GreedyTP);
    assert_eq!("bb".parse::<SolverKind>().unwrap(), SolverKind::ExactBB);
    assert!("nope".parse::<SolverKind>().is_err());
}
