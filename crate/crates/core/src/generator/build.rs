//! Concrete instances from scenario templates.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::satellites::{build_walker, real_elements, satellite_spec};
use super::scenarios::{CapacityPattern, ConstellationSpec, ScenarioExtras, ScenarioTemplate};
use super::targets::{assign_attributes, benchmark_pool, select_targets};
use crate::astro::{default_slot_step, derive_opportunities, EarthFrame, SampledOrbit, DEFAULT_SAMPLE_STEP_S};
use crate::error::{Error, Result};
use crate::kinematics::Profile;
use crate::model::{
    default_epoch, AvailableOpportunity, Instance, Provenance, SatelliteSpec, TaskSpec, VisibleWindow, SCHEMA_VERSION,
};

/// Stable 64-bit seed from labelled parts.
pub fn derive_seed(parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0x1f]);
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

pub fn build_satellites(template: &ScenarioTemplate, seed_index: usize) -> Result<Vec<SatelliteSpec>> {
    let pairs = match &template.constellation {
        ConstellationSpec::RealSet { names } => names
            .iter()
            .map(|n| {
                real_elements(n)
                    .map(|el| (n.clone(), el))
                    .ok_or_else(|| Error::domain(format!("unknown satellite {n}")))
            })
            .collect::<Result<Vec<_>>>()?,
        ConstellationSpec::Walker { total, planes, per_plane, seed } => build_walker(*total, *planes, *per_plane, seed)?,
    };
    let mut sats: Vec<SatelliteSpec> =
        pairs.into_iter().map(|(id, el)| satellite_spec(id, el, template.platform)).collect();

    match template.extras {
        ScenarioExtras::Capacity(pattern) => apply_capacity(&mut sats, pattern, &template.id, seed_index),
        ScenarioExtras::Agility(name) => {
            let profile = Profile::named(name)?;
            for s in &mut sats {
                s.agility = profile;
            }
        }
        ScenarioExtras::None | ScenarioExtras::Constellation(_) => {}
    }
    Ok(sats)
}

/// Scales a seeded selection of satellites up or down per the pattern's shares.
fn apply_capacity(sats: &mut [SatelliteSpec], pattern: CapacityPattern, template_id: &str, seed_index: usize) {
    let n = sats.len();
    let (high_pct, low_pct) = pattern.shares();
    let high = ((high_pct as f64 / 100.0) * n as f64).round() as usize;
    let low = (((low_pct as f64 / 100.0) * n as f64).round() as usize).min(n - high);
    let mut order: Vec<usize> = (0..n).collect();
    if high > 0 && low > 0 {
        let seed = derive_seed(&[template_id, &seed_index.to_string(), "capacity"]);
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    for (rank, &i) in order.iter().enumerate() {
        let factor = if rank < high {
            CapacityPattern::HIGH_FACTOR
        } else if rank < high + low {
            CapacityPattern::LOW_FACTOR
        } else {
            continue;
        };
        sats[i].capacities = sats[i].capacities.scaled(factor);
    }
}

/// Task attributes depend only on the pool and the seed index, so larger loads extend smaller ones.
pub fn build_tasks(template: &ScenarioTemplate, seed_index: usize) -> Result<Vec<TaskSpec>> {
    let pool = benchmark_pool(template.distribution);
    let targets = select_targets(pool, seed_index, template.task_count)?;
    let seed = derive_seed(&[template.distribution.tag(), &seed_index.to_string(), "attributes"]);
    Ok(assign_attributes(&targets, seed))
}

/// Windows and slots for every (satellite, task) pair, in satellite then task order.
/// `slot_step_s` overrides the size-dependent default slot spacing.
pub fn build_access(
    sats: &[SatelliteSpec],
    tasks: &[TaskSpec],
    horizon_s: f64,
    epoch: &chrono::DateTime<chrono::Utc>,
    clip: Option<&[(f64, f64)]>,
    slot_step_s: Option<f64>,
) -> Result<(Vec<VisibleWindow>, Vec<AvailableOpportunity>)> {
    let frame = EarthFrame::new(epoch);
    let step = DEFAULT_SAMPLE_STEP_S;
    let per_sat: Vec<Vec<VisibleWindow>> = sats
        .par_iter()
        .map(|sat| {
            let orbit = SampledOrbit::new(sat, frame, horizon_s, step).map_err(|e| Error::Generation {
                satellite: sat.id.clone(),
                task: String::new(),
                message: e.to_string(),
            })?;
            let mut out = Vec::new();
            for (k, task) in tasks.iter().enumerate() {
                let (lo, hi) = clip.map_or((f64::NEG_INFINITY, f64::INFINITY), |c| c[k]);
                let ws = orbit.windows_within(task, step, lo, hi).map_err(|e| Error::Generation {
                    satellite: sat.id.clone(),
                    task: task.id.clone(),
                    message: e.to_string(),
                })?;
                out.extend(ws);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let windows: Vec<VisibleWindow> = per_sat.into_iter().flatten().collect();

    let slot = slot_step_s.unwrap_or_else(|| default_slot_step(tasks.len()));
    let durations: std::collections::HashMap<&str, f64> = tasks.iter().map(|t| (t.id.as_str(), t.duration_s)).collect();
    let mut opportunities = Vec::new();
    for (i, w) in windows.iter().enumerate() {
        opportunities.extend(derive_opportunities(w, i, durations[w.task_id.as_str()], slot)?);
    }
    Ok((windows, opportunities))
}

pub fn generate_instance(template: &ScenarioTemplate, seed_index: usize) -> Result<Instance> {
    generate_instance_with(template, seed_index, None)
}

/// Coarser slots shrink agile instances considerably; the default follows the task count.
pub fn generate_instance_with(template: &ScenarioTemplate, seed_index: usize, slot_step_s: Option<f64>) -> Result<Instance> {
    if slot_step_s.is_some_and(|s| !(s > 0.0)) {
        return Err(Error::domain("slot step must be positive"));
    }
    let satellites = build_satellites(template, seed_index)?;
    let tasks = build_tasks(template, seed_index)?;
    let epoch = default_epoch();
    let (visible_windows, opportunities) = build_access(&satellites, &tasks, template.horizon_s, &epoch, None, slot_step_s)?;
    Ok(Instance {
        schema_version: SCHEMA_VERSION,
        id: format!("{}-i{seed_index}", template.id),
        epoch,
        horizon_s: template.horizon_s,
        platform: template.platform,
        satellites,
        tasks,
        visible_windows,
        opportunities,
        fixed_transition_s: None,
        provenance: Provenance {
            scenario_id: template.id.clone(),
            seed_index: seed_index as u64,
            fallback: false,
            synthetic: false,
            parent: None,
        },
    })
}
