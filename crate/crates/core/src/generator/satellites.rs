//! Real-satellite orbit table and Walker-Delta constellations.

use crate::astro::{mean_to_true_anomaly, true_to_mean_anomaly};
use crate::error::{Error, Result};
use crate::kinematics::Profile;
use crate::model::{AttitudeEnvelope, OrbitalElements, PayloadRates, Platform, ResourceCapacities, SatelliteSpec};

/// name, a [km], e, i, RAAN, argument of perigee, true anomaly [deg]
pub const REAL_SATELLITES: [(&str, f64, f64, f64, f64, f64, f64); 20] = [
    ("ALOS-2", 7013.62362, 0.000898, 98.04, 57.345, 101.516, 96.459),
    ("AQUA", 7054.608686, 0.002665, 98.264, 282.658, 100.906, 181.914),
    ("CARTOSAT-2C", 6885.388452, 0.002331, 97.526, 19.64, 129.493, 269.449),
    ("DEIMOS-1", 7026.003591, 0.001598, 97.832, 123.909, 99.999, 287.41),
    ("DEIMOS-2", 6955.196768, 0.002894, 97.569, 198.785, 83.505, 180.934),
    ("GAOFEN_10R", 7004.506326, 0.002046, 97.874, 269.586, 82.424, 282.074),
    ("GOKTURK_1A", 7061.790586, 0.001387, 98.061, 214.868, 112.033, 286.074),
    ("GPM-CORE", 6801.857205, 0.001294, 64.827, 293.591, 284.823, 176.995),
    ("KENT_RIDGE_1", 6884.956782, 0.000964, 15.043, 31.097, 207.516, 57.259),
    ("SCD_1", 7121.14563, 0.003755, 25.1, 68.138, 73.8, 157.166),
    ("SCD_2", 7123.258992, 0.001882, 24.859, 291.105, 37.112, 275.948),
    ("SKYSAT-C2", 6833.433187, 0.00167, 97.006, 347.712, 69.009, 149.715),
    ("SKYSAT-C9", 6825.950288, 0.00325, 97.567, 92.251, 106.838, 162.537),
    ("SMOS", 7129.70257, 0.000962, 98.521, 147.596, 18.842, 100.232),
    ("SRMSAT", 7236.742741, 0.002142, 19.826, 254.192, 78.797, 37.063),
    ("TERRASAR-X", 6877.192296, 0.000926, 97.37, 327.892, 6.52, 107.452),
    ("WORLDVIEW-1", 6874.558678, 0.001374, 97.524, 79.993, 89.387, 281.492),
    ("YAOGAN_21", 6866.60274, 0.003193, 97.197, 6.525, 115.547, 184.675),
    ("YAOGAN_4", 6993.513131, 0.00264, 97.779, 252.523, 84.41, 221.626),
    ("ZIYUAN_3-2", 6866.915774, 0.002603, 97.497, 36.721, 72.615, 202.817),
];

pub const WALKER_SEED: &str = "ALOS-2";

pub fn real_elements(name: &str) -> Option<OrbitalElements> {
    REAL_SATELLITES.iter().find(|r| r.0 == name).map(|&(_, a, e, i, raan, argp, ta)| OrbitalElements {
        semi_major_axis_km: a,
        eccentricity: e,
        inclination_deg: i,
        raan_deg: raan,
        arg_perigee_deg: argp,
        true_anomaly_deg: ta,
    })
}

/// The first `count` rows of the table.
pub fn real_set_names(count: usize) -> Result<Vec<String>> {
    if count == 0 || count > REAL_SATELLITES.len() {
        return Err(Error::domain(format!("real satellite sets have 1..={} members, asked for {count}", REAL_SATELLITES.len())));
    }
    Ok(REAL_SATELLITES[..count].iter().map(|r| r.0.to_string()).collect())
}

pub fn satellite_spec(id: String, elements: OrbitalElements, platform: Platform) -> SatelliteSpec {
    SatelliteSpec {
        id,
        elements,
        envelope: AttitudeEnvelope::for_platform(platform),
        capacities: ResourceCapacities::default(),
        rates: PayloadRates::default(),
        agility: Profile::standard(),
    }
}

/// Walker-Delta pattern with phasing factor 1, anchored on `seed`.
pub fn build_walker(total: usize, planes: usize, per_plane: usize, seed: &OrbitalElements) -> Result<Vec<(String, OrbitalElements)>> {
    if planes == 0 || per_plane == 0 || planes * per_plane != total {
        return Err(Error::domain(format!("walker pattern {planes} x {per_plane} does not give {total} satellites")));
    }
    let e = seed.eccentricity;
    let m0 = true_to_mean_anomaly(seed.true_anomaly_deg.to_radians(), e).to_degrees();
    let mut out = Vec::with_capacity(total);
    for p in 0..planes {
        let raan = (seed.raan_deg + 360.0 * p as f64 / planes as f64).rem_euclid(360.0);
        for s in 0..per_plane {
            let m = m0 + 360.0 * s as f64 / per_plane as f64 + 360.0 * p as f64 / total as f64;
            let nu = mean_to_true_anomaly(m.to_radians(), e).to_degrees().rem_euclid(360.0);
            let el = OrbitalElements { raan_deg: raan, true_anomaly_deg: nu, ..*seed };
            out.push((format!("W{total}-P{p:03}-S{s:03}"), el));
        }
    }
    Ok(out)
}

/// Default, few-plane and many-plane layouts for a constellation scale.
pub fn walker_layouts(total: usize) -> Option<[(usize, usize); 3]> {
    Some(match total {
        50 => [(10, 5), (5, 10), (25, 2)],
        100 => [(10, 10), (4, 25), (20, 5)],
        200 => [(20, 10), (10, 20), (40, 5)],
        500 => [(25, 20), (10, 50), (50, 10)],
        1000 => [(50, 20), (10, 100), (100, 10)],
        _ => return None,
    })
}
