//! Structural checks on instances.

use std::collections::{HashMap, HashSet};

use crate::astro::check_elements;
use crate::error::{Error, Result};
use crate::model::{AttitudeTrack, Instance, Platform};

const EPS: f64 = 1e-6;

/// Collects every violated invariant; returns `Error::Invalid` listing them all.
pub fn validate_instance(inst: &Instance) -> Result<()> {
    let mut errs = Vec::new();
    if !(inst.horizon_s > 0.0) || !inst.horizon_s.is_finite() {
        errs.push(format!("horizon must be positive, got {}", inst.horizon_s));
    }
    if let Some(c) = inst.fixed_transition_s {
        if !(c >= 0.0) {
            errs.push(format!("fixed transition must be non-negative, got {c}"));
        }
    }

    let mut sat_ids = HashSet::new();
    for s in &inst.satellites {
        if !sat_ids.insert(s.id.as_str()) {
            errs.push(format!("duplicate satellite id {}", s.id));
        }
        if let Err(e) = check_elements(&s.elements) {
            errs.push(format!("satellite {}: {e}", s.id));
        }
        if s.envelope.platform != inst.platform {
            errs.push(format!("satellite {} platform differs from instance platform", s.id));
        }
        if !(s.capacities.energy_per_orbit >= 0.0 && s.capacities.storage_per_orbit >= 0.0) {
            errs.push(format!("satellite {} has negative capacity", s.id));
        }
    }

    let synthetic = inst.provenance.synthetic;
    let mut tasks = HashMap::new();
    for t in &inst.tasks {
        if tasks.insert(t.id.as_str(), t).is_some() {
            errs.push(format!("duplicate task id {}", t.id));
        }
        if !(-90.0..=90.0).contains(&t.lat_deg) || !(-180.0..=180.0).contains(&t.lon_deg) {
            errs.push(format!("task {} has out-of-range coordinates", t.id));
        }
        let (dmin, dmax) = if synthetic { (1e-9, f64::INFINITY) } else { (5.0, 15.0) };
        if !(t.duration_s >= dmin && t.duration_s <= dmax) {
            errs.push(format!("task {} duration {} outside [{dmin}, {dmax}]", t.id, t.duration_s));
        }
        if !synthetic && !((1..=10).contains(&t.priority) && (1..=10).contains(&t.profit)) {
            errs.push(format!("task {} priority/profit outside 1..=10", t.id));
        }
    }

    for (i, w) in inst.visible_windows.iter().enumerate() {
        if !sat_ids.contains(w.satellite_id.as_str()) {
            errs.push(format!("window {i} references unknown satellite {}", w.satellite_id));
        }
        let Some(task) = tasks.get(w.task_id.as_str()) else {
            errs.push(format!("window {i} references unknown task {}", w.task_id));
            continue;
        };
        if !(w.start_s >= -EPS && w.end_s <= inst.horizon_s + EPS && w.start_s <= w.end_s) {
            errs.push(format!("window {i} [{}, {}] not inside horizon", w.start_s, w.end_s));
        }
        if w.end_s - w.start_s < task.duration_s - EPS {
            errs.push(format!("window {i} shorter than task {} duration", w.task_id));
        }
        match (&w.attitude, inst.platform) {
            (AttitudeTrack::Agile { samples }, Platform::Agile) => {
                if samples.windows(2).any(|p| p[1].t_s < p[0].t_s) {
                    errs.push(format!("window {i} attitude samples out of order"));
                }
                if let Some(s) = inst.satellite(&w.satellite_id) {
                    if samples.iter().any(|a| {
                        a.roll_deg.abs() > s.envelope.max_roll_deg + EPS
                            || a.pitch_deg.abs() > s.envelope.max_pitch_deg + EPS
                            || a.yaw_deg.abs() > s.envelope.max_yaw_deg + EPS
                    }) {
                        errs.push(format!("window {i} attitude exceeds envelope"));
                    }
                }
            }
            (AttitudeTrack::NonAgile { roll_deg }, Platform::NonAgile) => {
                if let Some(s) = inst.satellite(&w.satellite_id) {
                    if roll_deg.abs() > s.envelope.max_roll_deg + EPS {
                        errs.push(format!("window {i} roll exceeds envelope"));
                    }
                }
            }
            _ => errs.push(format!("window {i} attitude kind does not match platform")),
        }
    }

    for (i, o) in inst.opportunities.iter().enumerate() {
        let Some(w) = inst.visible_windows.get(o.window) else {
            errs.push(format!("opportunity {i} references missing window {}", o.window));
            continue;
        };
        if w.task_id != o.task_id || w.satellite_id != o.satellite_id {
            errs.push(format!("opportunity {i} ids disagree with window {}", o.window));
        }
        if o.start_s < w.start_s - EPS || o.end_s > w.end_s + EPS {
            errs.push(format!("opportunity {i} not contained in window {}", o.window));
        }
        if let Some(t) = tasks.get(o.task_id.as_str()) {
            if ((o.end_s - o.start_s) - t.duration_s).abs() > EPS {
                errs.push(format!("opportunity {i} length differs from task duration"));
            }
        }
    }

    if errs.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(errs))
    }
}
