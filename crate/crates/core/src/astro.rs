//! Two-body propagation, Earth rotation, look angles and visibility windows.

use chrono::{DateTime, Utc};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::model::{
    AttitudeEnvelope, AttitudeSample, AttitudeTrack, AvailableOpportunity, LookAngles, OrbitalElements, Platform,
    SatelliteSpec, TaskSpec, VisibleWindow,
};

pub const MU_KM3_S2: f64 = 398_600.4418;
pub const EARTH_RADIUS_KM: f64 = 6378.137;
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;
/// Along-track tolerance for roll-only platforms, degrees.
pub const NON_AGILE_PITCH_TOL_DEG: f64 = 2.5;
pub const DEFAULT_SAMPLE_STEP_S: f64 = 10.0;

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: Vec3, k: f64) -> Vec3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatState {
    pub t_s: f64,
    pub position_km: Vec3,
    pub velocity_km_s: Vec3,
}

pub fn check_elements(el: &OrbitalElements) -> Result<()> {
    let ok = el.semi_major_axis_km.is_finite()
        && el.eccentricity.is_finite()
        && (0.0..1.0).contains(&el.eccentricity)
        && el.semi_major_axis_km * (1.0 - el.eccentricity) > EARTH_RADIUS_KM
        && [el.inclination_deg, el.raan_deg, el.arg_perigee_deg, el.true_anomaly_deg].iter().all(|v| v.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("orbital elements are not a valid closed orbit above the surface: {el:?}")))
    }
}

pub fn period_s(el: &OrbitalElements) -> f64 {
    TAU * (el.semi_major_axis_km.powi(3) / MU_KM3_S2).sqrt()
}

pub fn mean_motion(el: &OrbitalElements) -> f64 {
    (MU_KM3_S2 / el.semi_major_axis_km.powi(3)).sqrt()
}

pub fn true_to_mean_anomaly(nu: f64, e: f64) -> f64 {
    let ecc = 2.0 * (((1.0 - e) / (1.0 + e)).sqrt() * (nu / 2.0).tan()).atan();
    (ecc - e * ecc.sin()).rem_euclid(TAU)
}

pub fn mean_to_true_anomaly(m: f64, e: f64) -> f64 {
    let m = m.rem_euclid(TAU);
    let mut ecc = if e < 0.8 { m } else { PI };
    for _ in 0..60 {
        let f = ecc - e * ecc.sin() - m;
        let step = f / (1.0 - e * ecc.cos());
        ecc -= step;
        if step.abs() < 1e-12 {
            break;
        }
    }
    2.0 * ((1.0 + e).sqrt() * (ecc / 2.0).sin()).atan2((1.0 - e).sqrt() * (ecc / 2.0).cos())
}

/// Inertial state `t_s` seconds after the element epoch.
pub fn propagate(el: &OrbitalElements, t_s: f64) -> Result<SatState> {
    check_elements(el)?;
    let (a, e) = (el.semi_major_axis_km, el.eccentricity);
    let m0 = true_to_mean_anomaly(el.true_anomaly_deg.to_radians(), e);
    let nu = mean_to_true_anomaly(m0 + mean_motion(el) * t_s, e);
    let p = a * (1.0 - e * e);
    let r = p / (1.0 + e * nu.cos());
    let r_pf = [r * nu.cos(), r * nu.sin(), 0.0];
    let k = (MU_KM3_S2 / p).sqrt();
    let v_pf = [-k * nu.sin(), k * (e + nu.cos()), 0.0];

    let (so, co) = el.raan_deg.to_radians().sin_cos();
    let (sw, cw) = el.arg_perigee_deg.to_radians().sin_cos();
    let (si, ci) = el.inclination_deg.to_radians().sin_cos();
    let rot = [
        [co * cw - so * sw * ci, -co * sw - so * cw * ci, so * si],
        [so * cw + co * sw * ci, -so * sw + co * cw * ci, -co * si],
        [sw * si, cw * si, ci],
    ];
    let apply = |v: Vec3| -> Vec3 {
        [dot(rot[0], v), dot(rot[1], v), dot(rot[2], v)]
    };
    Ok(SatState { t_s, position_km: apply(r_pf), velocity_km_s: apply(v_pf) })
}

/// Greenwich sidereal angle at `epoch`, radians.
pub fn gmst_rad(epoch: &DateTime<Utc>) -> f64 {
    let jd = epoch.timestamp() as f64 / 86_400.0 + 2_440_587.5 + epoch.timestamp_subsec_nanos() as f64 * 1e-9 / 86_400.0;
    let d = jd - 2_451_545.0;
    let tc = d / 36_525.0;
    let deg = 280.460_618_37 + 360.985_647_366_29 * d + 0.000_387_933 * tc * tc - tc * tc * tc / 38_710_000.0;
    deg.rem_euclid(360.0).to_radians()
}

/// Earth orientation relative to the inertial frame, anchored at a scenario epoch.
#[derive(Debug, Clone, Copy)]
pub struct EarthFrame {
    gmst0: f64,
}

impl EarthFrame {
    pub fn new(epoch: &DateTime<Utc>) -> Self {
        Self { gmst0: gmst_rad(epoch) }
    }

    pub fn angle(&self, t_s: f64) -> f64 {
        self.gmst0 + EARTH_ROTATION_RAD_S * t_s
    }

    pub fn ground_point(&self, lat_deg: f64, lon_deg: f64, t_s: f64) -> Vec3 {
        let lat = lat_deg.to_radians();
        let lon = lon_deg.to_radians() + self.angle(t_s);
        scale([lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()], EARTH_RADIUS_KM)
    }

    /// Geocentric latitude, longitude in [-180, 180) and altitude over the sphere.
    pub fn subpoint(&self, state: &SatState) -> (f64, f64, f64) {
        let r = state.position_km;
        let rn = norm(r);
        let lat = (r[2] / rn).asin().to_degrees();
        let lon = (r[1].atan2(r[0]) - self.angle(state.t_s)).to_degrees();
        let lon = (lon + 180.0).rem_euclid(360.0) - 180.0;
        (lat, lon, rn - EARTH_RADIUS_KM)
    }
}

/// Roll/pitch toward `target` in the orbital frame, or `None` below the local horizon.
pub fn look_angles(state: &SatState, target: Vec3) -> Option<LookAngles> {
    let r = state.position_km;
    if dot(sub(r, target), target) <= 0.0 {
        return None;
    }
    let z = scale(r, -1.0 / norm(r));
    let h = cross(r, state.velocity_km_s);
    let y = scale(h, -1.0 / norm(h));
    let x = cross(y, z);
    let u = sub(target, r);
    let (ux, uy, uz) = (dot(u, x), dot(u, y), dot(u, z));
    if uz <= 0.0 {
        return None;
    }
    Some(LookAngles {
        roll_deg: uy.atan2(uz).to_degrees(),
        pitch_deg: ux.atan2(uy.hypot(uz)).to_degrees(),
        yaw_deg: 0.0,
    })
}

pub fn within_envelope(angles: &LookAngles, env: &AttitudeEnvelope) -> bool {
    let pitch_limit = match env.platform {
        Platform::Agile => env.max_pitch_deg,
        Platform::NonAgile => NON_AGILE_PITCH_TOL_DEG,
    };
    angles.roll_deg.abs() <= env.max_roll_deg
        && angles.pitch_deg.abs() <= pitch_limit
        && angles.yaw_deg.abs() <= env.max_yaw_deg
}

pub fn visibility(state: &SatState, target: Vec3, env: &AttitudeEnvelope) -> bool {
    look_angles(state, target).is_some_and(|a| within_envelope(&a, env))
}

/// Largest Earth-central angle between sub-satellite point and a visible target.
fn central_angle_limit(env: &AttitudeEnvelope, radius_km: f64) -> f64 {
    let pitch = match env.platform {
        Platform::Agile => env.max_pitch_deg,
        Platform::NonAgile => NON_AGILE_PITCH_TOL_DEG,
    }
    .to_radians()
    .min(PI / 2.0);
    let roll = env.max_roll_deg.to_radians().min(PI / 2.0);
    let eta = (pitch.cos() * roll.cos()).clamp(-1.0, 1.0).acos();
    let horizon = (EARTH_RADIUS_KM / radius_km).clamp(-1.0, 1.0).acos();
    let s = radius_km * eta.sin() / EARTH_RADIUS_KM;
    if s >= 1.0 {
        horizon
    } else {
        (s.asin() - eta).min(horizon)
    }
}

fn central_angle(a: Vec3, b: Vec3) -> f64 {
    (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}

/// Per-satellite sampled trajectory reused across all targets.
pub struct SampledOrbit<'a> {
    pub spec: &'a SatelliteSpec,
    pub frame: EarthFrame,
    pub times: Vec<f64>,
    pub states: Vec<SatState>,
    cone: f64,
    /// Upper bound on how fast the central angle to any ground point can change, rad/s.
    rate: f64,
}

impl<'a> SampledOrbit<'a> {
    pub fn new(spec: &'a SatelliteSpec, frame: EarthFrame, horizon_s: f64, step_s: f64) -> Result<Self> {
        check_elements(&spec.elements)?;
        if !(step_s > 0.0) || !(horizon_s >= 0.0) {
            return Err(Error::domain("sampling step must be positive and horizon non-negative"));
        }
        let n = (horizon_s / step_s).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * step_s).collect();
        if horizon_s - times[n] > 1e-9 {
            times.push(horizon_s);
        }
        let states = times.iter().map(|&t| propagate(&spec.elements, t)).collect::<Result<Vec<_>>>()?;
        let el = &spec.elements;
        let rp = el.semi_major_axis_km * (1.0 - el.eccentricity);
        let ra = el.semi_major_axis_km * (1.0 + el.eccentricity);
        let h = (MU_KM3_S2 * el.semi_major_axis_km * (1.0 - el.eccentricity.powi(2))).sqrt();
        let rate = (h / (rp * rp) + EARTH_ROTATION_RAD_S) * 1.05;
        Ok(Self { spec, frame, times, states, cone: central_angle_limit(&spec.envelope, ra) + 1e-3, rate })
    }

    fn visible_at(&self, task: &TaskSpec, t: f64) -> Result<bool> {
        let st = propagate(&self.spec.elements, t)?;
        Ok(visibility(&st, self.frame.ground_point(task.lat_deg, task.lon_deg, t), &self.spec.envelope))
    }

    /// Bisect between a non-visible and a visible time, returning the visible side.
    fn refine(&self, task: &TaskSpec, mut outside: f64, mut inside: f64, tol: f64) -> Result<f64> {
        while (inside - outside).abs() > tol {
            let mid = 0.5 * (inside + outside);
            if self.visible_at(task, mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(inside)
    }

    fn angles_at(&self, task: &TaskSpec, t: f64) -> Result<Option<LookAngles>> {
        let st = propagate(&self.spec.elements, t)?;
        Ok(look_angles(&st, self.frame.ground_point(task.lat_deg, task.lon_deg, t)))
    }

    /// Maximal visible intervals of one target, endpoints refined by bisection.
    pub fn visible_runs(&self, task: &TaskSpec, step_s: f64) -> Result<Vec<(f64, f64)>> {
        let tol = step_s / 100.0;
        let n = self.times.len();
        let mut vis = vec![false; n];
        let mut k = 0;
        while k < n {
            let t = self.times[k];
            let st = &self.states[k];
            let g = self.frame.ground_point(task.lat_deg, task.lon_deg, t);
            let gap = central_angle(st.position_km, g) - self.cone;
            if gap > 0.0 {
                // cannot become visible before the rate bound allows it
                let t_next = t + gap / self.rate;
                let mut j = k + 1;
                while j < n && self.times[j] < t_next {
                    j += 1;
                }
                k = j;
                continue;
            }
            vis[k] = visibility(st, g, &self.spec.envelope);
            k += 1;
        }

        let mut out = Vec::new();
        let mut k = 0;
        while k < n {
            if !vis[k] {
                k += 1;
                continue;
            }
            let first = k;
            while k + 1 < n && vis[k + 1] {
                k += 1;
            }
            let last = k;
            k += 1;
            let start = if first == 0 {
                self.times[0]
            } else {
                self.refine(task, self.times[first - 1], self.times[first], tol)?
            };
            let end = if last + 1 >= n {
                self.times[n - 1]
            } else {
                self.refine(task, self.times[last + 1], self.times[last], tol)?
            };
            out.push((start, end));
        }
        Ok(out)
    }

    /// Window record over `[start, end]`, which must lie inside one visible run.
    pub fn make_window(&self, task: &TaskSpec, start: f64, end: f64) -> Result<VisibleWindow> {
        let lo = self.times.partition_point(|&t| t <= start + 1e-9);
        let hi = self.times.partition_point(|&t| t < end - 1e-9);
        let interior = &self.times[lo..hi.max(lo)];
        let attitude = match self.spec.envelope.platform {
            Platform::NonAgile => {
                let mid = 0.5 * (start + end);
                let mut roll = None;
                for t in std::iter::once(mid).chain(interior.iter().copied()).chain([start, end]) {
                    if let Some(a) = self.angles_at(task, t)? {
                        if within_envelope(&a, &self.spec.envelope) {
                            roll = Some(a.roll_deg);
                            break;
                        }
                    }
                }
                AttitudeTrack::NonAgile { roll_deg: roll.unwrap_or(0.0) }
            }
            Platform::Agile => {
                let mut samples = Vec::with_capacity(interior.len() + 2);
                let times = std::iter::once(start).chain(interior.iter().copied()).chain((end > start + 1e-9).then_some(end));
                for t in times {
                    if let Some(a) = self.angles_at(task, t)? {
                        samples.push(AttitudeSample { t_s: t, roll_deg: a.roll_deg, pitch_deg: a.pitch_deg, yaw_deg: a.yaw_deg });
                    }
                }
                AttitudeTrack::Agile { samples }
            }
        };
        Ok(VisibleWindow { task_id: task.id.clone(), satellite_id: self.spec.id.clone(), start_s: start, end_s: end, attitude })
    }

    /// Visible windows long enough for the task, in time order.
    pub fn windows(&self, task: &TaskSpec, step_s: f64) -> Result<Vec<VisibleWindow>> {
        self.windows_within(task, step_s, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// As `windows`, after clipping every run to `[lo, hi]`.
    pub fn windows_within(&self, task: &TaskSpec, step_s: f64, lo: f64, hi: f64) -> Result<Vec<VisibleWindow>> {
        let mut out = Vec::new();
        for (s, e) in self.visible_runs(task, step_s)? {
            let (s, e) = (s.max(lo), e.min(hi));
            if e - s >= task.duration_s {
                out.push(self.make_window(task, s, e)?);
            }
        }
        Ok(out)
    }
}

/// Visible windows of one (satellite, task) pair over `[0, horizon_s]`.
pub fn compute_visible_windows(
    sat: &SatelliteSpec,
    task: &TaskSpec,
    horizon_s: f64,
    step_s: f64,
    epoch: &DateTime<Utc>,
) -> Result<Vec<VisibleWindow>> {
    let orbit = SampledOrbit::new(sat, EarthFrame::new(epoch), horizon_s, step_s)?;
    orbit.windows(task, step_s)
}

/// Slot step used for a task count: 1 s normally, 5 s above 1,000 tasks.
pub fn default_slot_step(task_count: usize) -> f64 {
    if task_count > 1000 {
        5.0
    } else {
        1.0
    }
}

/// Candidate start slots inside a window. The last slot always ends exactly at the window end.
pub fn derive_opportunities(
    window: &VisibleWindow,
    window_index: usize,
    duration_s: f64,
    slot_step_s: f64,
) -> Result<Vec<AvailableOpportunity>> {
    if !(slot_step_s > 0.0) || !(duration_s > 0.0) {
        return Err(Error::domain("slot step and duration must be positive"));
    }
    let last = window.end_s - duration_s;
    let mut out = Vec::new();
    if last < window.start_s - 1e-9 {
        return Ok(out);
    }
    let last = last.max(window.start_s);
    let mk = |start: f64| AvailableOpportunity {
        task_id: window.task_id.clone(),
        satellite_id: window.satellite_id.clone(),
        window: window_index,
        start_s: start,
        end_s: start + duration_s,
    };
    let mut k = 0u64;
    loop {
        let t = window.start_s + k as f64 * slot_step_s;
        if t >= last - 1e-9 {
            break;
        }
        out.push(mk(t));
        k += 1;
    }
    let mut tail = mk(last);
    tail.end_s = window.end_s;
    out.push(tail);
    Ok(out)
}
