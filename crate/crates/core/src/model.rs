//! Scenario, instance and schedule data types.

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::kinematics::AgilityProfile;

pub const SCHEMA_VERSION: u32 = 1;

/// 2025-11-18T12:00:00Z, shared by every generated scenario.
pub fn default_epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2025, 11, 18, 12, 0, 0).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Platform {
    Agile,
    NonAgile,
}

impl Platform {
    pub fn tag(self) -> &'static str {
        match self {
            Platform::Agile => "agile",
            Platform::NonAgile => "nonagile",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    pub semi_major_axis_km: f64,
    pub eccentricity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub arg_perigee_deg: f64,
    pub true_anomaly_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttitudeEnvelope {
    pub platform: Platform,
    pub max_roll_deg: f64,
    pub max_pitch_deg: f64,
    pub max_yaw_deg: f64,
}

impl AttitudeEnvelope {
    pub fn agile() -> Self {
        Self { platform: Platform::Agile, max_roll_deg: 45.0, max_pitch_deg: 45.0, max_yaw_deg: 90.0 }
    }

    /// Roll-only pointing; pitch is fixed at nadir.
    pub fn non_agile() -> Self {
        Self { platform: Platform::NonAgile, max_roll_deg: 45.0, max_pitch_deg: 0.0, max_yaw_deg: 0.0 }
    }

    pub fn for_platform(platform: Platform) -> Self {
        match platform {
            Platform::Agile => Self::agile(),
            Platform::NonAgile => Self::non_agile(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceCapacities {
    pub energy_per_orbit: f64,
    pub storage_per_orbit: f64,
}

impl Default for ResourceCapacities {
    fn default() -> Self {
        Self { energy_per_orbit: 200.0, storage_per_orbit: 2400.0 }
    }
}

impl ResourceCapacities {
    pub fn scaled(self, factor: f64) -> Self {
        Self { energy_per_orbit: self.energy_per_orbit * factor, storage_per_orbit: self.storage_per_orbit * factor }
    }
}

/// Consumption per second of observation and per degree of slew.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayloadRates {
    pub obs_energy_per_s: f64,
    pub obs_memory_per_s: f64,
    pub slew_energy_per_deg: f64,
}

impl Default for PayloadRates {
    fn default() -> Self {
        Self { obs_energy_per_s: 1.0, obs_memory_per_s: 1.0, slew_energy_per_deg: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteSpec {
    pub id: String,
    pub elements: OrbitalElements,
    pub envelope: AttitudeEnvelope,
    pub capacities: ResourceCapacities,
    pub rates: PayloadRates,
    pub agility: AgilityProfile<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub priority: u32,
    pub profit: u32,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LookAngles {
    pub roll_deg: f64,
    pub pitch_deg: f64,
    pub yaw_deg: f64,
}

impl LookAngles {
    pub const NADIR: LookAngles = LookAngles { roll_deg: 0.0, pitch_deg: 0.0, yaw_deg: 0.0 };

    pub fn new(roll_deg: f64, pitch_deg: f64, yaw_deg: f64) -> Self {
        Self { roll_deg, pitch_deg, yaw_deg }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttitudeSample {
    pub t_s: f64,
    pub roll_deg: f64,
    pub pitch_deg: f64,
    pub yaw_deg: f64,
}

impl AttitudeSample {
    pub fn angles(&self) -> LookAngles {
        LookAngles::new(self.roll_deg, self.pitch_deg, self.yaw_deg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttitudeTrack {
    /// Time-tagged samples, sorted by time.
    Agile { samples: Vec<AttitudeSample> },
    NonAgile { roll_deg: f64 },
}

impl AttitudeTrack {
    /// Attitude at `t`, taken from the nearest sample.
    pub fn at(&self, t: f64) -> LookAngles {
        match self {
            AttitudeTrack::NonAgile { roll_deg } => LookAngles::new(*roll_deg, 0.0, 0.0),
            AttitudeTrack::Agile { samples } => {
                if samples.is_empty() {
                    return LookAngles::NADIR;
                }
                let idx = samples.partition_point(|s| s.t_s < t);
                let pick = if idx == 0 {
                    0
                } else if idx >= samples.len() {
                    samples.len() - 1
                } else if (samples[idx].t_s - t) < (t - samples[idx - 1].t_s) {
                    idx
                } else {
                    idx - 1
                };
                samples[pick].angles()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibleWindow {
    pub task_id: String,
    pub satellite_id: String,
    pub start_s: f64,
    pub end_s: f64,
    pub attitude: AttitudeTrack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailableOpportunity {
    pub task_id: String,
    pub satellite_id: String,
    /// Index into `Instance::visible_windows`.
    pub window: usize,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub scenario_id: String,
    pub seed_index: u64,
    /// Set when a sub-sampling request fell back to a library copy.
    #[serde(default)]
    pub fallback: bool,
    /// Hand-built or fuzz instances; relaxes the benchmark attribute ranges.
    #[serde(default)]
    pub synthetic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub schema_version: u32,
    pub id: String,
    pub epoch: DateTime<Utc>,
    pub horizon_s: f64,
    pub platform: Platform,
    pub satellites: Vec<SatelliteSpec>,
    pub tasks: Vec<TaskSpec>,
    pub visible_windows: Vec<VisibleWindow>,
    pub opportunities: Vec<AvailableOpportunity>,
    /// Replaces the attitude-based separation when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_transition_s: Option<f64>,
    pub provenance: Provenance,
}

impl Instance {
    pub fn satellite(&self, id: &str) -> Option<&SatelliteSpec> {
        self.satellites.iter().find(|s| s.id == id)
    }

    pub fn task(&self, id: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn total_profit(&self) -> f64 {
        self.tasks.iter().map(|t| t.profit as f64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub satellite_id: String,
    pub task_id: String,
    /// Index into `Instance::opportunities`.
    pub opportunity: usize,
    pub start_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Exact search stopped by its time limit; best plan found so far.
    Incomplete,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub schema_version: u32,
    pub instance_id: String,
    pub solver: String,
    pub status: SolveStatus,
    pub wall_time_s: f64,
    pub assignments: Vec<Assignment>,
}

impl Schedule {
    pub fn new(instance_id: impl Into<String>, solver: impl Into<String>, status: SolveStatus) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            instance_id: instance_id.into(),
            solver: solver.into(),
            status,
            wall_time_s: 0.0,
            assignments: Vec::new(),
        }
    }

    /// Assignments in canonical order, ignoring solver tag and wall time.
    pub fn plan_key(&self) -> Vec<(String, String, usize)> {
        let mut v: Vec<_> = self
            .assignments
            .iter()
            .map(|a| (a.task_id.clone(), a.satellite_id.clone(), a.opportunity))
            .collect();
        v.sort();
        v
    }
}
