//! Instances built directly from injected windows, bypassing orbit geometry.
//! Used for hand-checkable fixtures and for randomised small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashSet};

use crate::astro::derive_opportunities;
use crate::error::{Error, Result};
use crate::kinematics::Profile;
use crate::model::{
    default_epoch, AttitudeEnvelope, AttitudeSample, AttitudeTrack, Instance, OrbitalElements, PayloadRates, Platform,
    Provenance, ResourceCapacities, SatelliteSpec, TaskSpec, VisibleWindow, SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    pub id: String,
    pub duration_s: f64,
    pub profit: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWindow {
    pub task: String,
    pub satellite: String,
    pub start_s: f64,
    pub end_s: f64,
    /// Defaults to nadir pointing.
    pub attitude: Option<AttitudeTrack>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub id: String,
    pub horizon_s: f64,
    pub platform: Platform,
    /// Satellites in order; any satellite named only by a window is appended.
    pub satellites: Vec<String>,
    pub tasks: Vec<SyntheticTask>,
    pub windows: Vec<SyntheticWindow>,
    /// Constant separation between observations on one satellite; `None` uses the attitude model.
    pub transition_s: Option<f64>,
    pub slot_step_s: f64,
    pub capacities: ResourceCapacities,
}

/// Circular sun-synchronous-like orbit used for every synthetic satellite.
pub fn placeholder_elements() -> OrbitalElements {
    OrbitalElements {
        semi_major_axis_km: 7000.0,
        eccentricity: 0.0,
        inclination_deg: 97.8,
        raan_deg: 0.0,
        arg_perigee_deg: 0.0,
        true_anomaly_deg: 0.0,
    }
}

pub fn build_synthetic_instance(spec: &SyntheticSpec) -> Result<Instance> {
    if !(spec.horizon_s > 0.0) {
        return Err(Error::domain("horizon must be positive"));
    }
    let mut sat_ids = spec.satellites.clone();
    let mut seen: HashSet<String> = sat_ids.iter().cloned().collect();
    if seen.len() != sat_ids.len() {
        return Err(Error::domain("duplicate satellite id"));
    }
    for w in &spec.windows {
        if seen.insert(w.satellite.clone()) {
            sat_ids.push(w.satellite.clone());
        }
    }
    let task_ids: BTreeSet<&str> = spec.tasks.iter().map(|t| t.id.as_str()).collect();
    if task_ids.len() != spec.tasks.len() {
        return Err(Error::domain("duplicate task id"));
    }

    let envelope = AttitudeEnvelope::for_platform(spec.platform);
    let satellites = sat_ids
        .iter()
        .map(|id| SatelliteSpec {
            id: id.clone(),
            elements: placeholder_elements(),
            envelope,
            capacities: spec.capacities,
            rates: PayloadRates::default(),
            agility: Profile::standard(),
        })
        .collect();
    let tasks: Vec<TaskSpec> = spec
        .tasks
        .iter()
        .map(|t| TaskSpec {
            id: t.id.clone(),
            lat_deg: 0.0,
            lon_deg: 0.0,
            priority: t.profit,
            profit: t.profit,
            duration_s: t.duration_s,
        })
        .collect();

    let mut windows = Vec::new();
    let mut opportunities = Vec::new();
    for w in &spec.windows {
        let task = tasks
            .iter()
            .find(|t| t.id == w.task)
            .ok_or_else(|| Error::domain(format!("window names undeclared task {}", w.task)))?;
        if !(w.start_s >= 0.0 && w.start_s <= w.end_s && w.end_s <= spec.horizon_s) {
            return Err(Error::domain(format!(
                "window [{}, {}] for {} is not inside [0, {}]",
                w.start_s, w.end_s, w.task, spec.horizon_s
            )));
        }
        if w.end_s - w.start_s < task.duration_s {
            return Err(Error::domain(format!("window for {} is shorter than its duration", w.task)));
        }
        let attitude = match (&w.attitude, spec.platform) {
            (Some(a @ AttitudeTrack::Agile { .. }), Platform::Agile) => a.clone(),
            (Some(a @ AttitudeTrack::NonAgile { .. }), Platform::NonAgile) => a.clone(),
            (Some(_), _) => return Err(Error::domain("attitude kind does not match platform")),
            (None, Platform::Agile) => AttitudeTrack::Agile {
                samples: vec![
                    AttitudeSample { t_s: w.start_s, roll_deg: 0.0, pitch_deg: 0.0, yaw_deg: 0.0 },
                    AttitudeSample { t_s: w.end_s, roll_deg: 0.0, pitch_deg: 0.0, yaw_deg: 0.0 },
                ],
            },
            (None, Platform::NonAgile) => AttitudeTrack::NonAgile { roll_deg: 0.0 },
        };
        let window = VisibleWindow {
            task_id: w.task.clone(),
            satellite_id: w.satellite.clone(),
            start_s: w.start_s,
            end_s: w.end_s,
            attitude,
        };
        opportunities.extend(derive_opportunities(&window, windows.len(), task.duration_s, spec.slot_step_s)?);
        windows.push(window);
    }

    Ok(Instance {
        schema_version: SCHEMA_VERSION,
        id: spec.id.clone(),
        epoch: default_epoch(),
        horizon_s: spec.horizon_s,
        platform: spec.platform,
        satellites,
        tasks,
        visible_windows: windows,
        opportunities,
        fixed_transition_s: spec.transition_s,
        provenance: Provenance {
            scenario_id: spec.id.clone(),
            seed_index: 0,
            fallback: false,
            synthetic: true,
            parent: None,
        },
    })
}

/// Two satellites, four tasks, horizon 10, unit transition.
pub fn toy_spec() -> SyntheticSpec {
    let task = |id: &str, d: f64| SyntheticTask { id: id.into(), duration_s: d, profit: 1 };
    let win = |t: &str, s: &str, a: f64, b: f64| SyntheticWindow {
        task: t.into(),
        satellite: s.into(),
        start_s: a,
        end_s: b,
        attitude: None,
    };
    SyntheticSpec {
        id: "toy".into(),
        horizon_s: 10.0,
        platform: Platform::Agile,
        satellites: vec!["S1".into(), "S2".into()],
        tasks: vec![task("A", 3.0), task("B", 3.0), task("C", 2.0), task("D", 1.0)],
        windows: vec![
            win("A", "S1", 0.0, 4.0),
            win("A", "S2", 5.0, 8.0),
            win("B", "S1", 3.0, 6.0),
            win("C", "S2", 6.0, 9.0),
        ],
        transition_s: Some(1.0),
        slot_step_s: 1.0,
        capacities: ResourceCapacities::default(),
    }
}

pub fn toy_instance() -> Instance {
    build_synthetic_instance(&toy_spec()).expect("toy spec is consistent")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticSize {
    /// Small enough for exhaustive enumeration.
    Micro,
    /// Still exactly solvable, but with more interaction.
    Fuzz,
}

struct SizeParams {
    sats: (usize, usize),
    tasks: (usize, usize),
    horizon: f64,
    max_candidates: usize,
    slot_step: f64,
}

impl SyntheticSize {
    fn params(self) -> SizeParams {
        match self {
            SyntheticSize::Micro => {
                SizeParams { sats: (1, 3), tasks: (2, 6), horizon: 200.0, max_candidates: 12, slot_step: 4.0 }
            }
            SyntheticSize::Fuzz => {
                SizeParams { sats: (2, 4), tasks: (5, 10), horizon: 400.0, max_candidates: 40, slot_step: 3.0 }
            }
        }
    }
}

/// Random agile or roll-only instance with varying attitudes and, sometimes, tight energy budgets.
pub fn random_instance(seed: u64, size: SyntheticSize) -> Instance {
    let p = size.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_5a7e11);
    let platform = if rng.gen_bool(0.75) { Platform::Agile } else { Platform::NonAgile };
    let n_sats = rng.gen_range(p.sats.0..=p.sats.1);
    let n_tasks = rng.gen_range(p.tasks.0..=p.tasks.1);
    let capacities = if rng.gen_bool(0.4) {
        ResourceCapacities { energy_per_orbit: rng.gen_range(25.0..90.0), storage_per_orbit: rng.gen_range(20.0..60.0) }
    } else {
        ResourceCapacities::default()
    };
    let satellites: Vec<String> = (0..n_sats).map(|i| format!("S{i}")).collect();
    let tasks: Vec<SyntheticTask> = (0..n_tasks)
        .map(|i| SyntheticTask { id: format!("T{i:02}"), duration_s: rng.gen_range(5..=15) as f64, profit: rng.gen_range(1..=10) })
        .collect();

    let mut windows = Vec::new();
    let mut candidates = 0usize;
    for t in &tasks {
        let n_win = rng.gen_range(0..=2);
        for _ in 0..n_win {
            let len = t.duration_s + rng.gen_range(0.0..12.0);
            let start = rng.gen_range(0.0..(p.horizon - len)).floor();
            let end = start + len;
            let count = ((len - t.duration_s) / p.slot_step).ceil() as usize + 1;
            if candidates + count > p.max_candidates {
                continue;
            }
            candidates += count;
            let attitude = match platform {
                Platform::Agile => {
                    let roll = rng.gen_range(-40.0..40.0);
                    let pitch0: f64 = rng.gen_range(0.0..40.0);
                    let mut samples = Vec::new();
                    let steps = (len / 2.0).ceil() as usize;
                    for k in 0..=steps {
                        let t_s = (start + 2.0 * k as f64).min(end);
                        let frac = (t_s - start) / len;
                        samples.push(AttitudeSample { t_s, roll_deg: roll, pitch_deg: pitch0 * (1.0 - 2.0 * frac), yaw_deg: 0.0 });
                    }
                    samples.dedup_by(|a, b| a.t_s == b.t_s);
                    AttitudeTrack::Agile { samples }
                }
                Platform::NonAgile => AttitudeTrack::NonAgile { roll_deg: rng.gen_range(-40.0..40.0) },
            };
            windows.push(SyntheticWindow {
                task: t.id.clone(),
                satellite: satellites[rng.gen_range(0..n_sats)].clone(),
                start_s: start,
                end_s: end,
                attitude: Some(attitude),
            });
        }
    }

    let tag = match size {
        SyntheticSize::Micro => "micro",
        SyntheticSize::Fuzz => "fuzz",
    };
    build_synthetic_instance(&SyntheticSpec {
        id: format!("{tag}-{seed}"),
        horizon_s: p.horizon,
        platform,
        satellites,
        tasks,
        windows,
        transition_s: None,
        slot_step_s: p.slot_step,
        capacities,
    })
    .expect("random synthetic spec is consistent by construction")
}
