//! The two-satellite, four-task hand example, checked in exact arithmetic.

use num_rational::Rational64;
use orbsched_core::characterise::{characterise, DescriptorReport};
use orbsched_core::feasibility::{candidate_assignments, compatible, validate_schedule};
use orbsched_core::io::{deserialize_instance, serialize_instance};
use orbsched_core::synthetic::{build_synthetic_instance, toy_instance, toy_spec};
use orbsched_core::validate::validate_instance;
use orbsched_core::{Assignment, Schedule, SolveStatus};

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn toy_is_well_formed_and_round_trips() {
    let inst = toy_instance();
    validate_instance(&inst).unwrap();
    let text = serialize_instance(&inst).unwrap();
    assert_eq!(deserialize_instance(&text).unwrap(), inst);
    assert_eq!(serialize_instance(&deserialize_instance(&text).unwrap()).unwrap(), text);
}

#[test]
fn toy_candidates_per_task() {
    let inst = toy_instance();
    let counts: Vec<usize> = ["A", "B", "C", "D"].iter().map(|t| candidate_assignments(t, &inst).len()).collect();
    assert_eq!(counts, vec![3, 1, 2, 0]);
    assert_eq!(inst.opportunities.len(), 6);
    let a = candidate_assignments("A", &inst);
    assert_eq!((a[0].start_s, a[1].start_s, a[2].start_s), (0.0, 1.0, 5.0));
    assert_eq!(inst.opportunities[a[1].opportunity].end_s, 4.0);
}

#[test]
fn touching_observations_on_one_satellite_conflict() {
    let inst = toy_instance();
    let a1 = candidate_assignments("A", &inst)[0].clone();
    let b1 = candidate_assignments("B", &inst)[0].clone();
    assert_eq!((a1.start_s, b1.start_s), (0.0, 3.0));
    assert!(!compatible(&a1, &b1, &inst).unwrap().is_compatible());
    assert!(!compatible(&b1, &a1, &inst).unwrap().is_compatible());
}

#[test]
fn cross_satellite_plan_passes() {
    let inst = toy_instance();
    let mut s = Schedule::new(&inst.id, "manual", SolveStatus::Heuristic);
    s.assignments.push(candidate_assignments("A", &inst)[0].clone());
    s.assignments.push(candidate_assignments("C", &inst)[0].clone());
    let rep = validate_schedule(&s, &inst).unwrap();
    assert!(rep.feasible, "{:?}", rep.violations);
}

#[test]
fn duplicate_task_is_reported() {
    let inst = toy_instance();
    let mut s = Schedule::new(&inst.id, "manual", SolveStatus::Heuristic);
    let a = candidate_assignments("A", &inst);
    s.assignments.push(a[0].clone());
    s.assignments.push(a[2].clone());
    let rep = validate_schedule(&s, &inst).unwrap();
    assert!(!rep.feasible);
    assert!(serde_json::to_string(&rep.violations).unwrap().contains("duplicate_task"));
}

#[test]
fn unknown_ids_are_structural_errors() {
    let inst = toy_instance();
    let mut s = Schedule::new(&inst.id, "manual", SolveStatus::Heuristic);
    s.assignments.push(Assignment { satellite_id: "S9".into(), task_id: "A".into(), opportunity: 0, start_s: 0.0 });
    assert!(matches!(validate_schedule(&s, &inst), Err(orbsched_core::Error::Structural(_))));
}

#[test]
fn toy_descriptors_are_exact() {
    let inst = toy_instance();
    let rep: DescriptorReport<Rational64> = characterise(&inst, Some(Rational64::from_integer(1))).unwrap();
    let want = [r(3, 2), r(3, 4), r(1, 3), r(1, 1), r(3, 2), r(3, 13), r(1, 1), r(3, 20), r(2, 1), r(1, 1)];
    for ((name, got), want) in DescriptorReport::<Rational64>::NAMES.iter().zip(rep.values()).zip(want) {
        assert_eq!(got, want, "{name}");
    }
    let f: DescriptorReport<f64> = characterise(&inst, Some(1.0)).unwrap();
    for (got, want) in f.values().iter().zip(want) {
        assert!((got - *want.numer() as f64 / *want.denom() as f64).abs() < 1e-9);
    }
}

#[test]
fn empty_injection_is_a_valid_instance() {
    let mut spec = toy_spec();
    spec.tasks.clear();
    spec.windows.clear();
    let inst = build_synthetic_instance(&spec).unwrap();
    validate_instance(&inst).unwrap();
    assert!(inst.opportunities.is_empty());
}

#[test]
fn inconsistent_injection_is_rejected() {
    let mut spec = toy_spec();
    spec.windows[0].end_s = 2.0;
    assert!(build_synthetic_instance(&spec).is_err());
    let mut spec = toy_spec();
    spec.windows[0].task = "Z".into();
    assert!(build_synthetic_instance(&spec).is_err());
}
