//! Scenario templates and the Standard / Specific scenario grids.

use serde::{Deserialize, Serialize};

use super::satellites::{real_elements, real_set_names, walker_layouts, WALKER_SEED};
use super::targets::Distribution;
use crate::error::{Error, Result};
use crate::kinematics::ProfileName;
use crate::model::{OrbitalElements, Platform};

pub const INSTANCES_PER_SCENARIO: usize = 10;
pub const STANDARD_HORIZONS_DAYS: [f64; 4] = [0.5, 1.0, 3.0, 7.0];

/// Satellite count and admissible task loads.
pub const MISSION_LOADS: [(usize, &[usize]); 10] = [
    (1, &[10, 20, 30, 40, 50, 100]),
    (3, &[10, 50, 100, 200]),
    (5, &[50, 100, 200, 500]),
    (10, &[100, 200, 500, 1000]),
    (20, &[100, 200, 500, 1000]),
    (50, &[50, 100, 150, 200, 500]),
    (100, &[100, 300, 500, 1000, 2000]),
    (200, &[200, 500, 1000, 1500, 2000]),
    (500, &[500, 1000, 1500, 2000, 5000]),
    (1000, &[1000, 2000, 5000, 10000]),
];

/// Scale baselines shared by the capacity and manoeuvrability families (24 h horizon).
pub const SPECIFIC_BASELINES: [(usize, usize); 4] = [(3, 200), (10, 500), (100, 500), (500, 2000)];

pub const CONSTELLATION_LOADS: [(usize, [usize; 2]); 5] =
    [(50, [100, 200]), (100, [100, 300]), (200, [100, 500]), (500, [100, 1000]), (1000, [100, 1000])];

pub const REALISTIC_SATELLITE_COUNTS: [usize; 5] = [1, 3, 5, 10, 20];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Standard,
    Capacity,
    Manoeuvrability,
    Constellation,
    Realistic,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        Some(match s.to_ascii_lowercase().as_str() {
            "standard" => Family::Standard,
            "capacity" => Family::Capacity,
            "manoeuvrability" | "agility" => Family::Manoeuvrability,
            "constellation" => Family::Constellation,
            "realistic" => Family::Realistic,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityPattern {
    Low,
    Standard,
    High,
    MixedA,
    MixedB,
    MixedC,
}

impl CapacityPattern {
    /// (high share, low share) in percent; the remainder stays standard.
    pub fn shares(self) -> (u32, u32) {
        match self {
            CapacityPattern::Low => (0, 100),
            CapacityPattern::Standard => (0, 0),
            CapacityPattern::High => (100, 0),
            CapacityPattern::MixedA => (20, 20),
            CapacityPattern::MixedB => (25, 25),
            CapacityPattern::MixedC => (30, 30),
        }
    }

    pub const LOW_FACTOR: f64 = 0.5;
    pub const HIGH_FACTOR: f64 = 1.5;

    pub fn tag(self) -> &'static str {
        match self {
            CapacityPattern::Low => "low",
            CapacityPattern::Standard => "std",
            CapacityPattern::High => "high",
            CapacityPattern::MixedA => "mixa",
            CapacityPattern::MixedB => "mixb",
            CapacityPattern::MixedC => "mixc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkerVariant {
    Default,
    FewPlanes,
    ManyPlanes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstellationSpec {
    RealSet { names: Vec<String> },
    Walker { total: usize, planes: usize, per_plane: usize, seed: OrbitalElements },
}

impl ConstellationSpec {
    pub fn size(&self) -> usize {
        match self {
            ConstellationSpec::RealSet { names } => names.len(),
            ConstellationSpec::Walker { total, .. } => *total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ScenarioExtras {
    None,
    Capacity(CapacityPattern),
    Agility(ProfileName),
    Constellation(WalkerVariant),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTemplate {
    pub id: String,
    pub family: Family,
    pub platform: Platform,
    pub horizon_s: f64,
    pub constellation: ConstellationSpec,
    pub task_count: usize,
    pub distribution: Distribution,
    pub extras: ScenarioExtras,
}

/// Real rows for up to 20 satellites, the default Walker layout above that.
pub fn default_constellation(sats: usize) -> ConstellationSpec {
    if sats <= 20 {
        ConstellationSpec::RealSet { names: real_set_names(sats).expect("small constellations use the real table") }
    } else {
        let (planes, per_plane) = walker_layouts(sats).expect("large constellations have a walker layout")[0];
        walker(sats, planes, per_plane)
    }
}

fn walker(total: usize, planes: usize, per_plane: usize) -> ConstellationSpec {
    ConstellationSpec::Walker { total, planes, per_plane, seed: real_elements(WALKER_SEED).expect("seed row exists") }
}

fn hours_tag(horizon_s: f64) -> String {
    format!("{}h", (horizon_s / 3600.0).round() as i64)
}

fn template(
    prefix: &str,
    family: Family,
    platform: Platform,
    horizon_s: f64,
    constellation: ConstellationSpec,
    task_count: usize,
    distribution: Distribution,
    extras: ScenarioExtras,
) -> ScenarioTemplate {
    let id = format!(
        "{prefix}-{}-s{}-t{}-{}-{}",
        platform.tag(),
        constellation.size(),
        task_count,
        hours_tag(horizon_s),
        distribution.tag().to_ascii_lowercase()
    );
    ScenarioTemplate { id, family, platform, horizon_s, constellation, task_count, distribution, extras }
}

const PLATFORMS: [Platform; 2] = [Platform::Agile, Platform::NonAgile];
const DAY_S: f64 = 86_400.0;

pub fn enumerate_standard() -> Vec<ScenarioTemplate> {
    let mut out = Vec::new();
    for &(sats, loads) in &MISSION_LOADS {
        for &tasks in loads {
            for &days in &STANDARD_HORIZONS_DAYS {
                for dist in Distribution::SYNTHETIC {
                    for platform in PLATFORMS {
                        out.push(template(
                            "std",
                            Family::Standard,
                            platform,
                            days * DAY_S,
                            default_constellation(sats),
                            tasks,
                            dist,
                            ScenarioExtras::None,
                        ));
                    }
                }
            }
        }
    }
    out
}

pub fn enumerate_specific() -> Vec<ScenarioTemplate> {
    let mut out = Vec::new();
    for &(sats, tasks) in &SPECIFIC_BASELINES {
        for pattern in [CapacityPattern::Low, CapacityPattern::High, CapacityPattern::MixedA, CapacityPattern::MixedB, CapacityPattern::MixedC] {
            for dist in Distribution::SYNTHETIC {
                for platform in PLATFORMS {
                    out.push(template(
                        &format!("cap{}", pattern.tag()),
                        Family::Capacity,
                        platform,
                        DAY_S,
                        default_constellation(sats),
                        tasks,
                        dist,
                        ScenarioExtras::Capacity(pattern),
                    ));
                }
            }
        }
    }
    for &(sats, tasks) in &SPECIFIC_BASELINES {
        for profile in [ProfileName::High, ProfileName::Low, ProfileName::Limited] {
            for dist in Distribution::SYNTHETIC {
                out.push(template(
                    &format!("agi{}", format!("{profile:?}").to_ascii_lowercase()),
                    Family::Manoeuvrability,
                    Platform::Agile,
                    DAY_S,
                    default_constellation(sats),
                    tasks,
                    dist,
                    ScenarioExtras::Agility(profile),
                ));
            }
        }
    }
    for &(sats, loads) in &CONSTELLATION_LOADS {
        let layouts = walker_layouts(sats).expect("constellation scales have layouts");
        for tasks in loads {
            for (variant, (planes, per_plane)) in
                [(WalkerVariant::FewPlanes, layouts[1]), (WalkerVariant::ManyPlanes, layouts[2])]
            {
                for dist in Distribution::SYNTHETIC {
                    for platform in PLATFORMS {
                        let tag = match variant {
                            WalkerVariant::FewPlanes => "confew",
                            _ => "conmany",
                        };
                        out.push(template(
                            tag,
                            Family::Constellation,
                            platform,
                            DAY_S,
                            walker(sats, planes, per_plane),
                            tasks,
                            dist,
                            ScenarioExtras::Constellation(variant),
                        ));
                    }
                }
            }
        }
    }
    for &sats in &REALISTIC_SATELLITE_COUNTS {
        for platform in PLATFORMS {
            out.push(template(
                "city",
                Family::Realistic,
                platform,
                DAY_S,
                default_constellation(sats),
                100,
                Distribution::RealCities,
                ScenarioExtras::None,
            ));
        }
    }
    out
}

pub fn enumerate_all() -> Vec<ScenarioTemplate> {
    let mut v = enumerate_standard();
    v.extend(enumerate_specific());
    v
}

pub fn find_template(id: &str) -> Option<ScenarioTemplate> {
    enumerate_all().into_iter().find(|t| t.id == id)
}

/// Ad-hoc template outside the benchmark grids, e.g. for experiments at a custom horizon.
pub fn custom_template(
    platform: Platform,
    sats: usize,
    tasks: usize,
    horizon_s: f64,
    distribution: Distribution,
) -> Result<ScenarioTemplate> {
    if sats == 0 || (sats > 20 && walker_layouts(sats).is_none()) {
        return Err(Error::domain(format!("no constellation layout for {sats} satellites")));
    }
    Ok(template("custom", Family::Standard, platform, horizon_s, default_constellation(sats), tasks, distribution, ScenarioExtras::None))
}
