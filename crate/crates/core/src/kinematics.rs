//! Attitude-manoeuvre transition times.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::LookAngles;
use crate::num::Scalar;

/// Upper edges of the four slew bands, degrees.
pub const BAND_EDGES_DEG: [i64; 4] = [10, 30, 60, 90];
/// Fixed transition for a total slew of at most the first band edge, as hundredths of a second.
pub const MIN_TRANSITION_CENTIS: i64 = 1166;
pub const MIN_TRANSITION_S: f64 = 11.66;
pub const NON_AGILE_TRANSITION_S: f64 = 10.0;

pub fn min_transition<S: Scalar>() -> S {
    S::ratio(MIN_TRANSITION_CENTIS, 100)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    High,
    Standard,
    Low,
    Limited,
    Custom,
}

impl FromStr for ProfileName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "high" => Ok(ProfileName::High),
            "standard" => Ok(ProfileName::Standard),
            "low" => Ok(ProfileName::Low),
            "limited" => Ok(ProfileName::Limited),
            "custom" => Ok(ProfileName::Custom),
            other => Err(Error::domain(format!("unknown agility profile '{other}'"))),
        }
    }
}

/// Piecewise-linear slew model: in band k the time is `offsets[k] + dg / velocities[k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgilityProfile<S = f64> {
    pub name: ProfileName,
    pub velocities: [S; 4],
    pub offsets: [S; 4],
}

pub type Profile = AgilityProfile<f64>;

impl<S: Scalar> AgilityProfile<S> {
    pub fn named(name: ProfileName) -> Result<Self> {
        // velocities in hundredths of deg/s
        let v: [i64; 4] = match name {
            ProfileName::High => [300, 400, 500, 600],
            ProfileName::Standard => [150, 200, 250, 300],
            ProfileName::Low => [75, 100, 125, 150],
            ProfileName::Limited => [50, 67, 83, 100],
            ProfileName::Custom => {
                return Err(Error::domain("custom profiles are built with AgilityProfile::custom"))
            }
        };
        Ok(Self {
            name,
            velocities: v.map(|x| S::ratio(x, 100)),
            offsets: [5, 10, 16, 22].map(S::from_int),
        })
    }

    pub fn standard() -> Self {
        Self::named(ProfileName::Standard).expect("built-in profile")
    }

    /// Offsets are derived so the curve is continuous at every band edge,
    /// starting from the fixed minimum at the first edge.
    pub fn custom(velocities: [S; 4]) -> Result<Self> {
        if velocities.iter().any(|v| *v <= S::zero()) {
            return Err(Error::domain("angular velocities must be positive"));
        }
        let mut offsets = [S::zero(); 4];
        offsets[0] = min_transition::<S>() - S::from_int(BAND_EDGES_DEG[0]) / velocities[0];
        for k in 1..4 {
            let edge = S::from_int(BAND_EDGES_DEG[k]);
            offsets[k] = offsets[k - 1] + edge / velocities[k - 1] - edge / velocities[k];
        }
        Ok(Self { name: ProfileName::Custom, velocities, offsets })
    }

    pub fn to_f64(&self) -> AgilityProfile<f64> {
        AgilityProfile {
            name: self.name,
            velocities: self.velocities.map(|v| v.to_f64()),
            offsets: self.offsets.map(|v| v.to_f64()),
        }
    }

    pub fn from_f64(p: &AgilityProfile<f64>) -> Self {
        AgilityProfile {
            name: p.name,
            velocities: p.velocities.map(S::from_f64),
            offsets: p.offsets.map(S::from_f64),
        }
    }

    /// Unclamped band formula; `None` at or below the first edge.
    pub fn band_time(&self, dg: S) -> Option<S> {
        if dg <= S::from_int(BAND_EDGES_DEG[0]) {
            return None;
        }
        let k = BAND_EDGES_DEG[1..]
            .iter()
            .position(|&e| dg <= S::from_int(e))
            .unwrap_or(3);
        Some(self.offsets[k] + dg / self.velocities[k])
    }
}

/// Time needed for a total slew of `dg` degrees. Never below the fixed minimum.
pub fn transition_time<S: Scalar>(dg: S, profile: &AgilityProfile<S>) -> Result<S> {
    if dg < S::zero() {
        return Err(Error::domain(format!("negative slew angle {dg:?}")));
    }
    let floor = min_transition::<S>();
    Ok(match profile.band_time(dg) {
        None => floor,
        Some(t) => t.max_of(floor),
    })
}

pub fn delta_g(a: &LookAngles, b: &LookAngles) -> f64 {
    (a.roll_deg - b.roll_deg).abs() + (a.pitch_deg - b.pitch_deg).abs() + (a.yaw_deg - b.yaw_deg).abs()
}
