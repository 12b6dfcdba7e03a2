//! Validator checks against a naive pairwise/resource oracle and structural properties.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbsched_core::astro::period_s;
use orbsched_core::feasibility::{validate_schedule, Context};
use orbsched_core::kinematics::{delta_g, transition_time};
use orbsched_core::synthetic::{build_synthetic_instance, random_instance, SyntheticSize, SyntheticSpec, SyntheticTask, SyntheticWindow};
use orbsched_core::{
    AttitudeSample, AttitudeTrack, Instance, LookAngles, Platform, ResourceCapacities, Schedule, SolveStatus,
};

fn schedule_of(inst: &Instance, opps: &[usize]) -> Schedule {
    let mut s = Schedule::new(&inst.id, "probe", SolveStatus::Heuristic);
    for &i in opps {
        let o = &inst.opportunities[i];
        s.assignments.push(orbsched_core::Assignment {
            satellite_id: o.satellite_id.clone(),
            task_id: o.task_id.clone(),
            opportunity: i,
            start_s: o.start_s,
        });
    }
    s
}

fn attitude(inst: &Instance, opp: usize, t: f64) -> LookAngles {
    inst.visible_windows[inst.opportunities[opp].window].attitude.at(t)
}

/// Straightforward restatement of the feasible-set conditions.
fn oracle(inst: &Instance, chosen: &[usize]) -> bool {
    let ops = &inst.opportunities;
    for (x, &i) in chosen.iter().enumerate() {
        for &j in &chosen[x + 1..] {
            let (a, b) = (&ops[i], &ops[j]);
            if a.task_id == b.task_id {
                return false;
            }
            if a.satellite_id != b.satellite_id {
                continue;
            }
            let (e, l) = if a.start_s <= b.start_s { (i, j) } else { (j, i) };
            let (oe, ol) = (&ops[e], &ops[l]);
            if ol.start_s <= oe.end_s {
                return false;
            }
            let sat = inst.satellite(&oe.satellite_id).unwrap();
            let need = match (inst.fixed_transition_s, inst.platform) {
                (Some(c), _) => c,
                (None, Platform::NonAgile) => 10.0,
                (None, Platform::Agile) => {
                    transition_time(delta_g(&attitude(inst, e, oe.end_s), &attitude(inst, l, ol.start_s)), &sat.agility).unwrap()
                }
            };
            if ol.start_s - oe.end_s + 1e-9 < need {
                return false;
            }
        }
    }
    for sat in &inst.satellites {
        let period = period_s(&sat.elements);
        let mut mine: Vec<usize> = chosen.iter().copied().filter(|&i| ops[i].satellite_id == sat.id).collect();
        mine.sort_by(|&a, &b| ops[a].start_s.partial_cmp(&ops[b].start_s).unwrap());
        let mut segs: std::collections::BTreeMap<i64, (f64, f64, LookAngles)> = Default::default();
        for i in mine {
            let o = &ops[i];
            let k = (o.start_s / period).floor() as i64;
            let entry = segs.entry(k).or_insert((0.0, 0.0, LookAngles::NADIR));
            let (s, e) = (attitude(inst, i, o.start_s), attitude(inst, i, o.end_s));
            let dur = o.end_s - o.start_s;
            entry.0 += dur * sat.rates.obs_energy_per_s
                + (delta_g(&entry.2, &s) + delta_g(&s, &e)) * sat.rates.slew_energy_per_deg;
            entry.1 += dur * sat.rates.obs_memory_per_s;
            entry.2 = e;
        }
        for (energy, memory, _) in segs.values() {
            if *energy > sat.capacities.energy_per_orbit + 1e-9 || *memory > sat.capacities.storage_per_orbit + 1e-9 {
                return false;
            }
        }
    }
    true
}

#[test]
fn validator_matches_oracle_on_every_subset() {
    let mut checked = 0;
    for seed in 0..120u64 {
        let inst = random_instance(seed, SyntheticSize::Micro);
        let n = inst.opportunities.len();
        assert!(n <= 12);
        let ctx = Context::new(&inst).unwrap();
        for mask in 0u32..(1 << n) {
            let chosen: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let rep = orbsched_core::feasibility::validate_with(&ctx, &schedule_of(&inst, &chosen)).unwrap();
            assert_eq!(rep.feasible, oracle(&inst, &chosen), "seed {seed} mask {mask:b}: {:?}", rep.violations);
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn empty_schedule_always_passes() {
    for seed in 0..50 {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        assert!(validate_schedule(&schedule_of(&inst, &[]), &inst).unwrap().feasible);
    }
}

proptest! {
    #[test]
    fn compatibility_is_symmetric(seed in 0u64..5000, a in 0usize..64, b in 0usize..64) {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        let n = inst.opportunities.len();
        prop_assume!(n >= 2);
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let ctx = Context::new(&inst).unwrap();
        prop_assert_eq!(ctx.verdict(a, b).is_compatible(), ctx.verdict(b, a).is_compatible());
    }

    #[test]
    fn feasibility_is_downward_closed(seed in 0u64..5000, pick in any::<u64>()) {
        let inst = random_instance(seed, SyntheticSize::Fuzz);
        let ctx = Context::new(&inst).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        // grow a feasible plan by random insertion, then test random subsets of it
        let mut order: Vec<usize> = (0..inst.opportunities.len()).collect();
        order.shuffle(&mut rng);
        let mut plan = Vec::new();
        for o in order {
            plan.push(o);
            if !orbsched_core::feasibility::validate_with(&ctx, &schedule_of(&inst, &plan)).unwrap().feasible {
                plan.pop();
            }
        }
        for _ in 0..8 {
            let sub: Vec<usize> = plan.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            prop_assert!(orbsched_core::feasibility::validate_with(&ctx, &schedule_of(&inst, &sub)).unwrap().feasible);
        }
    }
}

fn single_satellite(windows: Vec<(&str, f64, f64, f64)>, energy: f64) -> Instance {
    build_synthetic_instance(&SyntheticSpec {
        id: "ledger".into(),
        horizon_s: 5000.0,
        platform: Platform::Agile,
        satellites: vec!["S".into()],
        tasks: windows.iter().map(|(id, _, _, _)| SyntheticTask { id: (*id).into(), duration_s: 10.0, profit: 1 }).collect(),
        windows: windows
            .iter()
            .map(|&(id, start, end, roll)| SyntheticWindow {
                task: id.into(),
                satellite: "S".into(),
                start_s: start,
                end_s: end,
                attitude: Some(AttitudeTrack::Agile {
                    samples: vec![
                        AttitudeSample { t_s: start, roll_deg: roll, pitch_deg: 0.0, yaw_deg: 0.0 },
                        AttitudeSample { t_s: end, roll_deg: roll, pitch_deg: 0.0, yaw_deg: 0.0 },
                    ],
                }),
            })
            .collect(),
        transition_s: None,
        slot_step_s: 1.0,
        capacities: ResourceCapacities { energy_per_orbit: energy, storage_per_orbit: 2400.0 },
    })
    .unwrap()
}

#[test]
fn single_nadir_observation_costs_its_duration() {
    let inst = single_satellite(vec![("T", 100.0, 110.0, 0.0)], 200.0);
    let rep = validate_schedule(&schedule_of(&inst, &[0]), &inst).unwrap();
    let seg = &rep.ledger.satellites[0].segments[0];
    assert_eq!((seg.energy_used, seg.memory_used, seg.observations), (10.0, 10.0, 1));
    let expected_segments = (5000.0 / period_s(&inst.satellites[0].elements)).ceil() as usize;
    assert_eq!(rep.ledger.satellites[0].segments.len(), expected_segments);
}

#[test]
fn slew_between_observations_is_charged() {
    let inst = single_satellite(vec![("T1", 100.0, 110.0, 0.0), ("T2", 200.0, 210.0, 20.0)], 200.0);
    let rep = validate_schedule(&schedule_of(&inst, &[0, 1]), &inst).unwrap();
    assert_eq!(rep.ledger.satellites[0].segments[0].energy_used, 10.0 + 10.0 + 20.0);
}

#[test]
fn large_slews_exhaust_segment_energy() {
    // 30 ten-second looks alternating between +30 and -30 degrees of roll
    let specs: Vec<(String, f64)> = (0..30).map(|k| (format!("T{k:02}"), 100.0 + 100.0 * k as f64)).collect();
    let windows: Vec<(&str, f64, f64, f64)> = specs
        .iter()
        .enumerate()
        .map(|(k, (id, t))| (id.as_str(), *t, *t + 10.0, if k % 2 == 0 { 30.0 } else { -30.0 }))
        .collect();
    let inst = single_satellite(windows, 200.0);
    let period = period_s(&inst.satellites[0].elements);
    let in_first: Vec<usize> =
        (0..30).filter(|&i| inst.opportunities[i].start_s < period).collect();
    let rep = validate_schedule(&schedule_of(&inst, &in_first), &inst).unwrap();
    assert!(!rep.feasible);
    assert!(serde_json::to_string(&rep.violations).unwrap().contains("energy_exceeded"));
}

#[test]
fn distant_same_satellite_pair_is_compatible() {
    let inst = single_satellite(vec![("T1", 100.0, 110.0, 0.0), ("T2", 210.0, 220.0, 5.0)], 200.0);
    let ctx = Context::new(&inst).unwrap();
    assert!(ctx.verdict(0, 1).is_compatible());
}
