//! Metric definitions against direct formula oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbsched_core::feasibility::{validate_schedule, Context};
use orbsched_core::metrics::{composite, composite_score, evaluate, metrics_unchecked};
use orbsched_core::synthetic::{build_synthetic_instance, random_instance, toy_instance, SyntheticSize, SyntheticSpec, SyntheticTask, SyntheticWindow};
use orbsched_core::{Assignment, Instance, Platform, ResourceCapacities, Schedule, SolveStatus};

fn schedule_of(inst: &Instance, opps: &[usize]) -> Schedule {
    let mut s = Schedule::new(&inst.id, "probe", SolveStatus::Heuristic);
    for &i in opps {
        let o = &inst.opportunities[i];
        s.assignments.push(Assignment { satellite_id: o.satellite_id.clone(), task_id: o.task_id.clone(), opportunity: i, start_s: o.start_s });
    }
    s
}

#[test]
fn empty_schedule() {
    let inst = toy_instance();
    let m = evaluate(&schedule_of(&inst, &[]), &inst, 0.0).unwrap();
    assert_eq!((m.tp, m.tcr, m.tm, m.bd), (0.0, 0.0, 1.0, None));
    assert_eq!(composite_score(&m, &inst), 0.0);
}

fn two_task(profits: [u32; 2], starts: [f64; 2]) -> Instance {
    build_synthetic_instance(&SyntheticSpec {
        id: "two".into(),
        horizon_s: 100.0,
        platform: Platform::Agile,
        satellites: vec!["S1".into(), "S2".into()],
        tasks: vec![
            SyntheticTask { id: "A".into(), duration_s: 5.0, profit: profits[0] },
            SyntheticTask { id: "B".into(), duration_s: 5.0, profit: profits[1] },
        ],
        windows: vec![
            SyntheticWindow { task: "A".into(), satellite: "S1".into(), start_s: starts[0], end_s: starts[0] + 5.0, attitude: None },
            SyntheticWindow { task: "B".into(), satellite: "S2".into(), start_s: starts[1], end_s: starts[1] + 5.0, attitude: None },
        ],
        transition_s: Some(1.0),
        slot_step_s: 1.0,
        capacities: ResourceCapacities::default(),
    })
    .unwrap()
}

#[test]
fn half_done_at_midpoint() {
    let inst = two_task([3, 7], [0.0, 50.0]);
    let m = evaluate(&schedule_of(&inst, &[1]), &inst, 0.0).unwrap();
    assert_eq!((m.tp, m.tcr, m.tm), (7.0, 0.5, 0.75));
    assert_eq!(m.bd, Some(1.0));
}

#[test]
fn everything_done_at_start_and_balanced() {
    let inst = two_task([1, 1], [0.0, 0.0]);
    let m = evaluate(&schedule_of(&inst, &[0, 1]), &inst, 0.0).unwrap();
    assert_eq!((m.tcr, m.tm, m.bd), (1.0, 0.0, Some(1.0)));
    assert_eq!(m.composite_all, 1.0);
}

#[test]
fn infeasible_schedules_are_refused() {
    let inst = toy_instance();
    // A at [0,3] and B at [3,6] on S1 touch
    assert!(evaluate(&schedule_of(&inst, &[0, 3]), &inst, 0.0).is_err());
}

#[test]
fn randomised_schedules_match_direct_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    let mut seed = 0;
    while done < 200 {
        seed += 1;
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        let ctx = Context::new(&inst).unwrap();
        let mut plan: Vec<usize> = Vec::new();
        for o in 0..inst.opportunities.len() {
            if rng.gen_bool(0.5) {
                plan.push(o);
                if !validate_schedule(&schedule_of(&inst, &plan), &inst).unwrap().feasible {
                    plan.pop();
                }
            }
        }
        let m = metrics_unchecked(&ctx, &schedule_of(&inst, &plan), 0.0).unwrap();

        let n = inst.tasks.len() as f64;
        let h = inst.horizon_s;
        let profit = |id: &str| inst.task(id).unwrap().profit as f64;
        let tp: f64 = plan.iter().map(|&o| profit(&inst.opportunities[o].task_id)).sum();
        let tcr = plan.len() as f64 / n;
        let tm = (plan.iter().map(|&o| inst.opportunities[o].start_s).sum::<f64>() + h * (n - plan.len() as f64)) / (h * n);
        let counts: Vec<f64> = inst
            .satellites
            .iter()
            .map(|s| plan.iter().filter(|&&o| inst.opportunities[o].satellite_id == s.id).count() as f64)
            .filter(|&c| c > 0.0)
            .collect();
        let bd = match counts.len() {
            0 => None,
            1 => Some(1.0),
            k => {
                let mu = counts.iter().sum::<f64>() / k as f64;
                let var = counts.iter().map(|c| (c - mu).powi(2)).sum::<f64>() / (k as f64 - 1.0);
                Some(1.0 - var.sqrt() / mu)
            }
        };
        let total: f64 = inst.tasks.iter().map(|t| t.profit as f64).sum();
        let comp = (tp / total + tcr + bd.unwrap_or(0.0).clamp(0.0, 1.0) + 1.0 - tm) / 4.0;

        assert!((m.tp - tp).abs() < 1e-12);
        assert!((m.tcr - tcr).abs() < 1e-12);
        assert!((m.tm - tm).abs() < 1e-12);
        match (m.bd, bd) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
            (a, b) => assert_eq!(a, b),
        }
        assert!((m.composite_all - comp).abs() < 1e-12);
        done += 1;
    }
}

#[test]
fn earlier_start_never_raises_timeliness() {
    let late = two_task([1, 1], [0.0, 60.0]);
    let early = two_task([1, 1], [0.0, 30.0]);
    let a = evaluate(&schedule_of(&late, &[0, 1]), &late, 0.0).unwrap();
    let b = evaluate(&schedule_of(&early, &[0, 1]), &early, 0.0).unwrap();
    assert!(b.tm <= a.tm);
}

#[test]
fn composite_of_perfect_single_task() {
    assert_eq!(composite(1.0, 1.0, Some(1.0), 0.0), 1.0);
}
