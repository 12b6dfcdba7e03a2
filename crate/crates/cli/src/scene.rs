//! Static scene files for external globe viewers: ground tracks, targets and observation links.

use anyhow::{bail, Result};
use chrono::{DateTime, Duration, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use orbsched_core::astro::{propagate, EarthFrame};
use orbsched_core::feasibility::validate_schedule;
use orbsched_core::{Instance, Schedule};

pub const SCENE_FORMAT: &str = "orbsched-scene";
pub const SCENE_VERSION: u32 = 1;
pub const DEFAULT_TRACK_STEP_S: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t_s: f64,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSatellite {
    pub id: String,
    pub track: Vec<TrackPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTarget {
    pub id: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub profit: u32,
    pub observed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneLink {
    pub satellite_id: String,
    pub task_id: String,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub format: String,
    pub version: u32,
    pub instance_id: String,
    pub solver: String,
    pub epoch: DateTime<Utc>,
    pub horizon_s: f64,
    pub track_step_s: f64,
    pub satellites: Vec<SceneSatellite>,
    pub targets: Vec<SceneTarget>,
    pub links: Vec<SceneLink>,
}

fn sample_times(horizon: f64, step: f64) -> Vec<f64> {
    let n = (horizon / step).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    if ts.last().is_some_and(|&t| horizon - t > 1e-9) {
        ts.push(horizon);
    }
    ts
}

/// Refuses schedules that fail validation.
pub fn export_scene(inst: &Instance, schedule: &Schedule, step_s: f64) -> Result<Scene> {
    if !(step_s > 0.0) {
        bail!("track step must be positive");
    }
    let report = validate_schedule(schedule, inst)?;
    if !report.feasible {
        bail!("refusing to export an infeasible schedule ({} violations)", report.violations.len());
    }
    let frame = EarthFrame::new(&inst.epoch);
    let times = sample_times(inst.horizon_s, step_s);
    let satellites = inst
        .satellites
        .iter()
        .map(|s| {
            let track = times
                .iter()
                .map(|&t| {
                    let (lat_deg, lon_deg, alt_km) = frame.subpoint(&propagate(&s.elements, t)?);
                    Ok(TrackPoint { t_s: t, lat_deg, lon_deg, alt_km })
                })
                .collect::<Result<_>>()?;
            Ok(SceneSatellite { id: s.id.clone(), track })
        })
        .collect::<Result<_>>()?;

    let mut links: Vec<SceneLink> = schedule
        .assignments
        .iter()
        .map(|a| {
            let o = &inst.opportunities[a.opportunity];
            SceneLink { satellite_id: a.satellite_id.clone(), task_id: a.task_id.clone(), start_s: o.start_s, end_s: o.end_s }
        })
        .collect();
    links.sort_by(|a, b| {
        a.start_s.total_cmp(&b.start_s).then_with(|| a.satellite_id.cmp(&b.satellite_id)).then_with(|| a.task_id.cmp(&b.task_id))
    });
    let targets = inst
        .tasks
        .iter()
        .map(|t| SceneTarget {
            id: t.id.clone(),
            lat_deg: t.lat_deg,
            lon_deg: t.lon_deg,
            profit: t.profit,
            observed: links.iter().any(|l| l.task_id == t.id),
        })
        .collect();

    Ok(Scene {
        format: SCENE_FORMAT.into(),
        version: SCENE_VERSION,
        instance_id: inst.id.clone(),
        solver: schedule.solver.clone(),
        epoch: inst.epoch,
        horizon_s: inst.horizon_s,
        track_step_s: step_s,
        satellites,
        targets,
        links,
    })
}

fn iso(epoch: &DateTime<Utc>, t_s: f64) -> String {
    (*epoch + Duration::milliseconds((t_s * 1000.0).round() as i64)).to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Packet list in the CZML dialect understood by common web globes.
pub fn to_czml(scene: &Scene) -> Value {
    let span = format!("{}/{}", iso(&scene.epoch, 0.0), iso(&scene.epoch, scene.horizon_s));
    let mut packets = vec![json!({
        "id": "document",
        "name": scene.instance_id,
        "version": "1.0",
        "clock": { "interval": span, "currentTime": iso(&scene.epoch, 0.0), "multiplier": 60 },
    })];
    for s in &scene.satellites {
        let mut coords = Vec::with_capacity(s.track.len() * 4);
        for p in &s.track {
            coords.extend([p.t_s, p.lon_deg, p.lat_deg, p.alt_km * 1000.0]);
        }
        packets.push(json!({
            "id": format!("sat/{}", s.id),
            "name": s.id,
            "availability": span,
            "position": { "epoch": iso(&scene.epoch, 0.0), "cartographicDegrees": coords },
            "point": { "pixelSize": 6 },
            "path": { "width": 1, "leadTime": 0, "trailTime": 3000 },
        }));
    }
    for t in &scene.targets {
        packets.push(json!({
            "id": format!("target/{}", t.id),
            "name": t.id,
            "position": { "cartographicDegrees": [t.lon_deg, t.lat_deg, 0.0] },
            "point": { "pixelSize": if t.observed { 5 } else { 3 } },
            "properties": { "profit": t.profit, "observed": t.observed },
        }));
    }
    for (k, l) in scene.links.iter().enumerate() {
        packets.push(json!({
            "id": format!("link/{k}"),
            "name": format!("{} -> {}", l.satellite_id, l.task_id),
            "availability": format!("{}/{}", iso(&scene.epoch, l.start_s), iso(&scene.epoch, l.end_s)),
            "polyline": {
                "width": 2,
                "positions": { "references": [format!("sat/{}#position", l.satellite_id), format!("target/{}#position", l.task_id)] },
            },
        }));
    }
    Value::Array(packets)
}
