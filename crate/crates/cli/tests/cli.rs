use std::path::Path;
use std::process::Command;

use orbsched::campaign::{run_campaign, CampaignOptions, Manifest};
use orbsched::cli::{feasibility_path, parse_seeds};
use orbsched::report::{read_results, summarise, write_summary};
use orbsched::scene::{export_scene, to_czml, Scene};
use orbsched_core::characterise::characterise;
use orbsched_core::io::{read_json, write_json};
use orbsched_core::synthetic::toy_instance;
use orbsched_core::{Assignment, Instance, Schedule, SolveStatus};
use orbsched_solvers::{Objective, SolverConfig, SolverKind};

const SCENARIO: &str = "std-nonagile-s1-t10-12h-gr";
const SCENARIO_B: &str = "std-nonagile-s3-t10-12h-rc";

fn manifest(scenarios: &[&str], seeds: usize) -> Manifest {
    Manifest {
        name: "test".into(),
        scenarios: scenarios.iter().map(|s| s.to_string()).collect(),
        seeds: (0..seeds).collect(),
        solvers: vec![
            SolverConfig::new(SolverKind::GreedyTP, Objective::TP, 0),
            SolverConfig::new(SolverKind::ExactBB, Objective::TP, 0),
        ],
        slot_step_s: None,
        characterise: false,
    }
}

fn opts(out: &Path, cache: &Path, jobs: usize) -> CampaignOptions {
    CampaignOptions { out: out.to_path_buf(), jobs, cache: Some(cache.to_path_buf()), max_new_runs: None }
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn campaign_rows_and_means() {
    let dir = tempfile::tempdir().unwrap();
    let (out, cache) = (dir.path().join("out"), dir.path().join("cache"));
    let s = run_campaign(&manifest(&[SCENARIO], 10), &opts(&out, &cache, 4)).unwrap();
    assert_eq!((s.total, s.computed, s.skipped, s.failed), (20, 20, 0, 0));

    let rows = read_results(&out.join("results.csv")).unwrap();
    assert_eq!(rows.iter().filter(|r| r.level == "instance").count(), 20);
    assert_eq!(rows.iter().filter(|r| r.level == "scenario").count(), 2);
    for agg in rows.iter().filter(|r| r.level == "scenario") {
        let members: Vec<_> = rows.iter().filter(|r| r.level == "instance" && r.solver == agg.solver).collect();
        assert_eq!(members.len(), 10);
        let m = |f: fn(&orbsched::report::ResultRow) -> Option<f64>| {
            let v: Vec<f64> = members.iter().filter_map(|r| f(r)).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!((agg.tp.unwrap() - m(|r| r.tp)).abs() < 1e-12);
        assert!((agg.tcr.unwrap() - m(|r| r.tcr)).abs() < 1e-12);
        assert!((agg.tm.unwrap() - m(|r| r.tm)).abs() < 1e-12);
        assert!((agg.composite.unwrap() - m(|r| r.composite)).abs() < 1e-12);
        if let Some(bd) = agg.bd {
            assert!((bd - m(|r| r.bd)).abs() < 1e-12);
        }
    }

    // second run reuses everything and rewrites the same bytes
    let before = read(&out.join("results.csv"));
    let s = run_campaign(&manifest(&[SCENARIO], 10), &opts(&out, &cache, 2)).unwrap();
    assert_eq!((s.computed, s.skipped), (0, 20));
    assert_eq!(read(&out.join("results.csv")), before);
}

#[test]
fn campaign_is_independent_of_jobs_and_interruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let m = manifest(&[SCENARIO, SCENARIO_B], 3);

    let a = dir.path().join("a");
    run_campaign(&m, &opts(&a, &cache, 1)).unwrap();
    let b = dir.path().join("b");
    run_campaign(&m, &opts(&b, &dir.path().join("cache-b"), 8)).unwrap();
    assert_eq!(read(&a.join("results.csv")), read(&b.join("results.csv")));

    let c = dir.path().join("c");
    let mut partial = opts(&c, &cache, 3);
    partial.max_new_runs = Some(5);
    let s = run_campaign(&m, &partial).unwrap();
    assert_eq!(s.computed, 5);
    assert!(!c.join("results.csv").exists());
    let s = run_campaign(&m, &opts(&c, &cache, 3)).unwrap();
    assert_eq!((s.computed, s.skipped), (7, 5));
    assert_eq!(read(&a.join("results.csv")), read(&c.join("results.csv")));
}

#[test]
fn campaign_records_failures_without_stopping() {
    let dir = tempfile::tempdir().unwrap();
    // a regular file where the cache directory should be makes instance caching fail
    let cache = dir.path().join("not-a-dir");
    std::fs::write(&cache, "x").unwrap();
    let out = dir.path().join("out");
    let s = run_campaign(&manifest(&[SCENARIO], 2), &opts(&out, &cache, 2)).unwrap();
    assert_eq!((s.total, s.failed), (4, 4));
    let rows = read_results(&out.join("results.csv")).unwrap();
    assert_eq!(rows.iter().filter(|r| r.status == "error").count(), 4);
    assert_eq!(rows.iter().filter(|r| r.level == "scenario").count(), 2);
}

#[test]
fn manifest_rejects_duplicates_and_unknown_scenarios() {
    let mut m = manifest(&[SCENARIO], 1);
    m.solvers.push(m.solvers[0].clone());
    assert!(m.triples().is_err());
    assert!(manifest(&["nope"], 1).triples().is_err());
    let json = r#"{"scenarios":["std-nonagile-s1-t10-12h-gr"],"seeds":[0],"solvers":[{"solver":"sa","objective":"all"}]}"#;
    let m: Manifest = serde_json::from_str(json).unwrap();
    assert_eq!(m.triples().unwrap()[0].config.label(), "sa-all");
}

fn toy_schedule(inst: &Instance) -> Schedule {
    // A on S1 at [0,3] and C on S2 at [6,8]
    let pick = |task: &str, sat: &str, start: f64| {
        let (i, o) = inst
            .opportunities
            .iter()
            .enumerate()
            .find(|(_, o)| o.task_id == task && o.satellite_id == sat && o.start_s == start)
            .unwrap();
        Assignment { satellite_id: o.satellite_id.clone(), task_id: o.task_id.clone(), opportunity: i, start_s: o.start_s }
    };
    let mut s = Schedule::new(&inst.id, "hand", SolveStatus::Heuristic);
    s.assignments = vec![pick("A", "S1", 0.0), pick("C", "S2", 6.0)];
    s
}

#[test]
fn scene_links_and_tracks() {
    let inst = toy_instance();
    let empty = Schedule::new(&inst.id, "none", SolveStatus::Heuristic);
    let scene = export_scene(&inst, &empty, 30.0).unwrap();
    assert!(scene.links.is_empty());
    assert_eq!(scene.targets.len(), 4);
    assert_eq!(scene.satellites.len(), 2);
    // horizon 10 s: samples at 0 and at the horizon end
    assert_eq!(scene.satellites[0].track.iter().map(|p| p.t_s).collect::<Vec<_>>(), vec![0.0, 10.0]);

    let s = toy_schedule(&inst);
    let scene = export_scene(&inst, &s, 30.0).unwrap();
    let links: Vec<_> = scene.links.iter().map(|l| (l.satellite_id.as_str(), l.task_id.as_str(), l.start_s, l.end_s)).collect();
    assert_eq!(links, vec![("S1", "A", 0.0, 3.0), ("S2", "C", 6.0, 8.0)]);
    assert_eq!(scene.targets.iter().filter(|t| t.observed).count(), 2);

    let again = export_scene(&inst, &s, 30.0).unwrap();
    assert_eq!(serde_json::to_string(&scene).unwrap(), serde_json::to_string(&again).unwrap());
    let parsed: Scene = serde_json::from_str(&serde_json::to_string(&scene).unwrap()).unwrap();
    assert_eq!(parsed, scene);

    let czml = to_czml(&scene);
    let packets = czml.as_array().unwrap();
    assert_eq!(packets.iter().filter(|p| p["id"].as_str().unwrap().starts_with("link/")).count(), 2);
    assert_eq!(packets[0]["id"], "document");
}

#[test]
fn scene_track_spacing_on_a_real_orbit() {
    let dir = tempfile::tempdir().unwrap();
    let inst = orbsched::campaign::cached_instance(dir.path(), SCENARIO, 0, None).unwrap();
    let empty = Schedule::new(&inst.id, "none", SolveStatus::Heuristic);
    let scene = export_scene(&inst, &empty, 30.0).unwrap();
    let track = &scene.satellites[0].track;
    assert_eq!(track.len(), (inst.horizon_s / 30.0) as usize + 1);
    assert!(track.windows(2).all(|w| (w[1].t_s - w[0].t_s - 30.0).abs() < 1e-9));
    assert!(track.iter().all(|p| p.lat_deg.abs() <= 90.0 && (-180.0..180.0).contains(&p.lon_deg) && p.alt_km > 200.0));
}

#[test]
fn scene_refuses_infeasible_schedules() {
    let inst = toy_instance();
    let mut s = toy_schedule(&inst);
    // B on S1 at [3,6] touches A
    let (i, o) = inst.opportunities.iter().enumerate().find(|(_, o)| o.task_id == "B").unwrap();
    s.assignments.push(Assignment { satellite_id: o.satellite_id.clone(), task_id: "B".into(), opportunity: i, start_s: o.start_s });
    assert!(export_scene(&inst, &s, 30.0).is_err());
}

#[test]
fn report_joins_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (out, cache) = (dir.path().join("out"), dir.path().join("cache"));
    let mut m = manifest(&[SCENARIO, SCENARIO_B], 2);
    m.characterise = true;
    run_campaign(&m, &opts(&out, &cache, 2)).unwrap();
    assert!(out.join("descriptors").join(format!("{SCENARIO}.json")).exists());

    // scenario-level descriptor file is the mean of its instances
    let d: orbsched_core::Descriptors = read_json(&out.join("descriptors").join(format!("{SCENARIO}.json"))).unwrap();
    let i0 = characterise::<f64>(&orbsched::campaign::cached_instance(&cache, SCENARIO, 0, None).unwrap(), None).unwrap();
    let i1 = characterise::<f64>(&orbsched::campaign::cached_instance(&cache, SCENARIO, 1, None).unwrap(), None).unwrap();
    assert!((d.gamma_ao - (i0.gamma_ao + i1.gamma_ao) / 2.0).abs() < 1e-12);

    std::fs::remove_file(out.join("descriptors").join(format!("{SCENARIO_B}.json"))).unwrap();
    let rows = read_results(&out.join("results.csv")).unwrap();
    let summary = summarise(&rows, Some(&out.join("runtimes.csv")), Some(&out.join("descriptors"))).unwrap();
    assert_eq!(summary.len(), 4);
    for r in &summary {
        assert_eq!(r.descriptors.is_none(), r.scenario == SCENARIO_B);
        assert_eq!(r.runs, 2);
        assert!(r.means[4].is_some(), "runtime joined");
    }
    let path = dir.path().join("summary.csv");
    write_summary(&summary, &path).unwrap();
    let text = read(&path);
    assert_eq!(text.lines().count(), 5);

    // a table with a single instance row gives a single summary row
    let one: Vec<_> = rows.into_iter().filter(|r| r.level == "instance").take(1).collect();
    assert_eq!(summarise(&one, None, None).unwrap().len(), 1);
}

#[test]
fn seed_lists() {
    assert_eq!(parse_seeds("0..9").unwrap(), (0..10).collect::<Vec<_>>());
    assert_eq!(parse_seeds("2..=3").unwrap(), vec![2, 3]);
    assert_eq!(parse_seeds("4").unwrap(), vec![4]);
    assert_eq!(parse_seeds("1,5").unwrap(), vec![1, 5]);
    assert!(parse_seeds("5..2").is_err());
}

#[test]
fn command_line_round_trip() {
    let bin = env!("CARGO_BIN_EXE_orbsched");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        out
    };
    run(&["generate", "--scenario", SCENARIO, "--seeds", "0..1", "--out", d.join("inst").to_str().unwrap()]);
    let inst = d.join("inst").join(format!("{SCENARIO}-i0.json"));
    assert!(inst.exists() && d.join("inst").join(format!("{SCENARIO}-i1.json")).exists());

    let sched = d.join("s.json");
    run(&["solve", "--in", inst.to_str().unwrap(), "--solver", "ga", "--objective", "all", "--seed", "7", "--out", sched.to_str().unwrap()]);
    assert!(feasibility_path(&sched).exists());
    let s: Schedule = read_json(&sched).unwrap();
    assert_eq!(s.solver, "ga-all");

    run(&["validate", "--instance", inst.to_str().unwrap(), "--schedule", sched.to_str().unwrap()]);
    let out = run(&["evaluate", "--instance", inst.to_str().unwrap(), "--schedule", sched.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("instance,solver,tp,tcr,bd,tm,rt_s,composite\n"));
    assert_eq!(text.lines().count(), 2);

    run(&["characterise", "--in", d.join("inst").to_str().unwrap(), "--out", d.join("desc").to_str().unwrap()]);
    assert!(d.join("desc").join("scenarios").join(format!("{SCENARIO}.json")).exists());

    let scene = d.join("scene.json");
    run(&["export-scene", "--instance", inst.to_str().unwrap(), "--schedule", sched.to_str().unwrap(), "--out", scene.to_str().unwrap()]);
    let scene: Scene = read_json(&scene).unwrap();
    assert_eq!(scene.links.len(), s.assignments.len());

    // a schedule that names the same task twice fails validation and the exit code says so
    let mut bad = s.clone();
    if let Some(a) = s.assignments.first() {
        bad.assignments.push(a.clone());
        let bad_path = d.join("bad.json");
        write_json(&bad_path, &bad).unwrap();
        let out = Command::new(bin)
            .args(["validate", "--instance", inst.to_str().unwrap(), "--schedule", bad_path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(!out.status.success());
    }

    let sub = d.join("sub.json");
    run(&[
        "subsample", "--library", d.join("inst").to_str().unwrap(), "--sats", "1..1", "--tasks", "3..5", "--horizon-h", "2..6",
        "--seed", "3", "--out", sub.to_str().unwrap(),
    ]);
    let sub: Instance = read_json(&sub).unwrap();
    assert_eq!(sub.satellites.len(), 1);
}
