//! Target pools: land-uniform, region-clustered, hybrid and real-city points.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::TaskSpec;

pub const POOL_SIZE: usize = 10_000;
pub const SUBSETS: usize = 10;
pub const CITY_POOL_SIZE: usize = 1_000;
/// Master seed shared by every benchmark pool.
pub const MASTER_SEED: u64 = 20_251_118;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    GlobalRandom,
    RegionClustered,
    Hybrid,
    RealCities,
}

impl Distribution {
    pub fn tag(self) -> &'static str {
        match self {
            Distribution::GlobalRandom => "GR",
            Distribution::RegionClustered => "RC",
            Distribution::Hybrid => "HY",
            Distribution::RealCities => "CT",
        }
    }

    pub const SYNTHETIC: [Distribution; 3] =
        [Distribution::GlobalRandom, Distribution::RegionClustered, Distribution::Hybrid];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPoint {
    pub id: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPool {
    pub distribution: Distribution,
    pub master_seed: u64,
    pub subsets: Vec<Vec<TargetPoint>>,
}

/// Coarse continental outlines as (lon, lat) vertex rings. Antarctica is excluded.
const LAND: &[&[(f64, f64)]] = &[
    // North and Central America
    &[
        (-166.0, 68.0), (-156.0, 71.0), (-140.0, 70.0), (-125.0, 70.0), (-110.0, 68.0), (-95.0, 72.0), (-85.0, 70.0),
        (-80.0, 63.0), (-94.0, 58.0), (-92.0, 57.0), (-82.0, 55.0), (-79.0, 52.0), (-70.0, 60.0), (-64.0, 60.0),
        (-56.0, 52.0), (-60.0, 47.0), (-66.0, 44.0), (-70.0, 41.0), (-76.0, 35.0), (-81.0, 31.0), (-80.0, 25.0),
        (-82.0, 27.0), (-84.0, 30.0), (-89.0, 30.0), (-97.0, 27.0), (-97.0, 22.0), (-94.0, 18.0), (-88.0, 21.0),
        (-87.0, 16.0), (-83.0, 15.0), (-83.0, 10.0), (-77.0, 8.0), (-80.0, 7.0), (-86.0, 11.0), (-92.0, 14.0),
        (-96.0, 16.0), (-105.0, 20.0), (-106.0, 23.0), (-110.0, 23.0), (-112.0, 29.0), (-115.0, 30.0),
        (-117.0, 33.0), (-121.0, 35.0), (-124.0, 40.0), (-124.0, 47.0), (-123.0, 49.0), (-130.0, 55.0),
        (-138.0, 59.0), (-147.0, 61.0), (-152.0, 59.0), (-158.0, 57.0), (-164.0, 55.0), (-158.0, 59.0),
        (-162.0, 60.0), (-165.0, 62.0), (-164.0, 64.0),
    ],
    // Greenland
    &[
        (-73.0, 78.0), (-60.0, 82.0), (-30.0, 83.0), (-20.0, 80.0), (-18.0, 75.0), (-22.0, 70.0), (-32.0, 68.0),
        (-40.0, 65.0), (-43.0, 60.0), (-48.0, 61.0), (-52.0, 65.0), (-54.0, 70.0), (-58.0, 75.0), (-68.0, 76.0),
    ],
    // South America
    &[
        (-80.0, 0.0), (-81.0, -5.0), (-75.0, -15.0), (-70.0, -18.0), (-71.0, -30.0), (-73.0, -37.0), (-74.0, -45.0),
        (-75.0, -50.0), (-72.0, -54.0), (-68.0, -55.0), (-65.0, -55.0), (-68.0, -51.0), (-66.0, -47.0),
        (-63.0, -42.0), (-62.0, -39.0), (-57.0, -38.0), (-53.0, -34.0), (-48.0, -26.0), (-41.0, -22.0),
        (-39.0, -15.0), (-35.0, -8.0), (-35.0, -5.0), (-40.0, -3.0), (-50.0, 0.0), (-52.0, 4.0), (-60.0, 8.0),
        (-62.0, 10.5), (-72.0, 12.0), (-76.0, 9.0), (-78.0, 7.0), (-79.0, 2.0),
    ],
    // Africa
    &[
        (-17.0, 21.0), (-16.0, 28.0), (-10.0, 30.0), (-9.0, 34.0), (-6.0, 36.0), (0.0, 35.5), (10.0, 37.0),
        (11.0, 33.0), (20.0, 31.0), (25.0, 31.5), (32.0, 31.0), (34.0, 28.0), (37.0, 22.0), (39.0, 16.0),
        (43.0, 12.0), (51.0, 12.0), (51.0, 10.0), (46.0, 3.0), (40.0, -3.0), (39.0, -8.0), (41.0, -15.0),
        (35.0, -20.0), (35.0, -24.0), (32.0, -29.0), (27.0, -34.0), (20.0, -35.0), (18.0, -32.0), (15.0, -27.0),
        (12.0, -18.0), (13.0, -12.0), (12.0, -5.0), (9.0, -1.0), (9.0, 4.0), (4.0, 6.0), (-2.0, 5.0), (-8.0, 4.0),
        (-13.0, 8.0), (-17.0, 12.0), (-17.0, 15.0),
    ],
    // Eurasia
    &[
        (-10.0, 36.0), (-9.0, 39.0), (-9.0, 43.0), (-2.0, 43.5), (-1.0, 46.0), (-4.5, 48.0), (2.0, 51.0), (5.0, 53.0),
        (8.0, 55.0), (8.0, 57.0), (10.5, 57.5), (11.0, 59.0), (5.0, 59.0), (5.0, 62.0), (14.0, 68.0), (25.0, 71.0),
        (41.0, 67.0), (44.0, 68.5), (60.0, 69.0), (70.0, 73.0), (80.0, 73.0), (100.0, 78.0), (113.0, 74.0),
        (130.0, 71.0), (160.0, 70.0), (180.0, 69.0), (180.0, 65.0), (178.0, 62.0), (163.0, 60.0), (156.0, 51.0),
        (156.0, 57.0), (143.0, 59.0), (137.0, 54.0), (141.0, 52.0), (140.0, 48.0), (133.0, 43.0), (129.0, 41.0),
        (129.0, 35.0), (126.0, 35.0), (126.0, 38.0), (121.0, 40.0), (121.0, 37.0), (119.0, 35.0), (122.0, 31.0),
        (122.0, 29.0), (119.0, 25.0), (110.0, 21.0), (108.0, 22.0), (106.0, 20.0), (109.0, 15.0), (109.0, 11.0),
        (105.0, 9.0), (104.0, 10.5), (100.0, 13.5), (99.0, 10.0), (103.0, 1.5), (100.0, 3.0), (98.0, 8.0),
        (98.0, 16.0), (94.0, 16.0), (92.0, 22.0), (90.0, 22.0), (87.0, 21.5), (80.0, 15.0), (80.0, 10.0),
        (77.0, 8.0), (73.0, 16.0), (72.0, 21.0), (68.0, 23.0), (66.0, 25.0), (57.0, 25.5), (56.0, 27.0),
        (51.0, 28.0), (48.0, 30.0), (50.0, 27.0), (51.0, 24.5), (56.0, 26.0), (59.0, 22.0), (55.0, 17.0),
        (45.0, 13.0), (43.0, 12.8), (39.0, 20.0), (35.0, 28.0), (34.0, 30.0), (35.0, 33.0), (36.0, 36.0),
        (30.0, 36.5), (27.0, 37.0), (26.0, 40.0), (23.0, 40.0), (24.0, 37.5), (21.0, 37.0), (19.0, 40.0),
        (19.5, 42.0), (16.0, 44.0), (13.5, 45.5), (12.0, 44.0), (16.0, 41.0), (15.5, 38.0), (12.0, 38.0),
        (9.5, 44.0), (7.0, 43.5), (3.0, 43.0), (3.0, 42.0), (0.0, 40.0), (-0.5, 38.0), (-2.0, 36.7), (-5.0, 36.0),
    ],
    // Australia
    &[
        (114.0, -22.0), (114.0, -26.0), (115.0, -34.0), (118.0, -35.0), (124.0, -34.0), (131.0, -31.5),
        (135.0, -35.0), (138.0, -35.5), (140.0, -38.0), (146.0, -39.0), (150.0, -37.5), (153.0, -32.0),
        (153.5, -25.0), (150.0, -22.0), (146.0, -19.0), (145.0, -15.0), (142.5, -10.7), (141.5, -13.0),
        (141.0, -17.0), (136.0, -15.0), (137.0, -12.0), (132.0, -11.0), (129.0, -15.0), (126.0, -14.0),
        (122.0, -17.0), (121.0, -19.5),
    ],
    // Borneo
    &[(109.0, 1.5), (111.0, -3.0), (116.0, -4.0), (119.0, 1.0), (117.0, 7.0), (115.0, 5.0), (110.0, 2.0)],
    // Sumatra
    &[(95.0, 5.5), (98.0, 4.0), (104.0, -2.0), (106.0, -6.0), (102.0, -4.0), (100.0, -1.0), (96.0, 3.0)],
    // Java
    &[(105.5, -6.8), (114.5, -7.8), (114.5, -8.8), (106.0, -7.5)],
    // New Guinea
    &[
        (131.0, -1.0), (135.0, -4.0), (141.0, -2.5), (147.0, -6.0), (150.0, -10.5), (143.0, -9.0), (138.0, -8.0),
        (135.0, -4.5), (132.0, -3.0),
    ],
    // Japan
    &[
        (130.0, 31.0), (132.0, 34.0), (135.0, 34.0), (140.0, 35.0), (141.0, 38.0), (141.5, 41.0), (140.0, 41.0),
        (140.5, 43.0), (141.5, 45.5), (145.5, 43.5), (143.0, 42.0), (141.5, 40.0), (142.0, 38.0), (141.0, 36.0),
        (139.0, 34.5), (136.0, 33.5), (132.5, 33.0), (131.0, 31.0),
    ],
    // Great Britain
    &[
        (-5.5, 50.0), (1.5, 51.0), (1.7, 52.8), (0.0, 53.5), (-1.6, 55.6), (-2.0, 57.5), (-3.0, 58.6), (-5.0, 58.6),
        (-6.0, 56.5), (-5.0, 55.0), (-3.0, 54.7), (-3.0, 53.5), (-4.5, 53.2), (-4.5, 51.7),
    ],
    // Ireland
    &[(-10.0, 51.5), (-6.0, 52.0), (-6.0, 53.8), (-5.5, 55.0), (-8.0, 55.2), (-10.0, 54.0)],
    // Iceland
    &[(-24.0, 64.0), (-22.0, 66.5), (-14.0, 66.5), (-13.5, 65.0), (-18.0, 63.4)],
    // Madagascar
    &[(44.0, -25.0), (47.0, -25.0), (50.0, -15.0), (49.5, -12.0), (44.0, -16.0), (43.5, -22.0)],
    // New Zealand
    &[(172.5, -34.5), (178.5, -37.5), (175.0, -41.5), (171.0, -46.0), (166.5, -46.0), (172.0, -41.0)],
    // Philippines
    &[(120.0, 18.5), (122.0, 18.5), (124.0, 12.5), (126.0, 7.0), (125.5, 6.0), (122.0, 7.0), (121.0, 12.0), (120.0, 14.5)],
    // Sri Lanka
    &[(79.8, 9.8), (81.9, 7.5), (81.0, 6.0), (80.0, 6.2)],
    // Taiwan
    &[(120.1, 23.0), (121.0, 25.3), (122.0, 25.0), (120.8, 21.9)],
];

fn in_ring(ring: &[(f64, f64)], lon: f64, lat: f64) -> bool {
    let mut inside = false;
    let mut j = ring.len() - 1;
    for i in 0..ring.len() {
        let (xi, yi) = ring[i];
        let (xj, yj) = ring[j];
        if (yi > lat) != (yj > lat) && lon < (xj - xi) * (lat - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

pub fn is_land(lat_deg: f64, lon_deg: f64) -> bool {
    LAND.iter().any(|ring| in_ring(ring, lon_deg, lat_deg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub name: &'static str,
    pub lat: (f64, f64),
    pub lon: (f64, f64),
}

impl Region {
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.lat.0..=self.lat.1).contains(&lat) && (self.lon.0..=self.lon.1).contains(&lon)
    }
}

pub const REGIONS: [Region; 5] = [
    Region { name: "asia", lat: (5.0, 55.0), lon: (60.0, 145.0) },
    Region { name: "europe", lat: (36.0, 70.0), lon: (-10.0, 40.0) },
    Region { name: "africa", lat: (-35.0, 35.0), lon: (-18.0, 52.0) },
    Region { name: "americas", lat: (-55.0, 60.0), lon: (-125.0, -35.0) },
    Region { name: "oceania", lat: (-45.0, -5.0), lon: (110.0, 180.0) },
];

const CLUSTERS_PER_REGION: usize = 4;
const CLUSTER_SIGMA_DEG: f64 = 3.0;

fn land_uniform(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let lat = rng.gen_range(-1.0f64..1.0).asin().to_degrees();
        let lon = rng.gen_range(-180.0..180.0);
        if is_land(lat, lon) {
            return (lat, lon);
        }
    }
}

fn land_in_region(rng: &mut ChaCha8Rng, r: &Region) -> (f64, f64) {
    loop {
        let lat = rng.gen_range(r.lat.0..r.lat.1);
        let lon = rng.gen_range(r.lon.0..r.lon.1);
        if is_land(lat, lon) {
            return (lat, lon);
        }
    }
}

fn partition(dist: Distribution, seed: u64, points: Vec<(f64, f64)>) -> TargetPool {
    let per = points.len() / SUBSETS;
    let subsets = points
        .chunks(per)
        .enumerate()
        .map(|(k, chunk)| {
            chunk
                .iter()
                .enumerate()
                .map(|(j, &(lat, lon))| TargetPoint { id: format!("{}-{k}-{j:04}", dist.tag()), lat_deg: lat, lon_deg: lon })
                .collect()
        })
        .collect();
    TargetPool { distribution: dist, master_seed: seed, subsets }
}

fn global_random(seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..POOL_SIZE).map(|_| land_uniform(&mut rng)).collect()
}

fn region_clustered(seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let centres: Vec<Vec<(f64, f64)>> =
        REGIONS.iter().map(|r| (0..CLUSTERS_PER_REGION).map(|_| land_in_region(&mut rng, r)).collect()).collect();
    let noise = Normal::new(0.0, CLUSTER_SIGMA_DEG).expect("positive sigma");
    (0..POOL_SIZE)
        .map(|_| {
            let ri = rng.gen_range(0..REGIONS.len());
            let region = &REGIONS[ri];
            let (clat, clon) = centres[ri][rng.gen_range(0..CLUSTERS_PER_REGION)];
            for _ in 0..1000 {
                let lat = clat + noise.sample(&mut rng);
                let lon = clon + noise.sample(&mut rng) / clat.to_radians().cos().max(0.2);
                if region.contains(lat, lon) && is_land(lat, lon) {
                    return (lat, lon);
                }
            }
            (clat, clon)
        })
        .collect()
}

fn city_rows() -> Result<Vec<(String, f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(include_str!("../../data/cities.csv").as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::domain(format!("city table: {e}")))?;
        let lat: f64 = rec[4].parse().map_err(|_| Error::domain("city table: bad latitude"))?;
        let lon: f64 = rec[5].parse().map_err(|_| Error::domain("city table: bad longitude"))?;
        out.push((rec[1].to_string(), lat, lon));
    }
    Ok(out)
}

pub fn build_target_pool(dist: Distribution, master_seed: u64) -> Result<TargetPool> {
    Ok(match dist {
        Distribution::GlobalRandom => partition(dist, master_seed, global_random(master_seed)),
        Distribution::RegionClustered => partition(dist, master_seed, region_clustered(master_seed)),
        Distribution::Hybrid => {
            let gr = global_random(master_seed);
            let rc = region_clustered(master_seed);
            let per = POOL_SIZE / SUBSETS;
            let mut pts = Vec::with_capacity(POOL_SIZE);
            for k in 0..SUBSETS {
                for j in 0..per / 2 {
                    pts.push(gr[k * per + j]);
                    pts.push(rc[k * per + j]);
                }
            }
            partition(dist, master_seed, pts)
        }
        Distribution::RealCities => {
            let mut rows = city_rows()?;
            if rows.len() != CITY_POOL_SIZE {
                return Err(Error::domain(format!("city table has {} rows, expected {CITY_POOL_SIZE}", rows.len())));
            }
            rows.shuffle(&mut ChaCha8Rng::seed_from_u64(master_seed));
            let per = CITY_POOL_SIZE / SUBSETS;
            let subsets = rows
                .chunks(per)
                .enumerate()
                .map(|(k, c)| {
                    c.iter()
                        .enumerate()
                        .map(|(j, (name, lat, lon))| TargetPoint {
                            id: format!("CT-{k}-{j:03}-{}", name.replace([' ', ','], "_")),
                            lat_deg: *lat,
                            lon_deg: *lon,
                        })
                        .collect()
                })
                .collect();
            TargetPool { distribution: dist, master_seed, subsets }
        }
    })
}

/// Benchmark pools are fixed by the master seed, so they are built once per process.
pub fn benchmark_pool(dist: Distribution) -> &'static TargetPool {
    static POOLS: [OnceLock<TargetPool>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = match dist {
        Distribution::GlobalRandom => 0,
        Distribution::RegionClustered => 1,
        Distribution::Hybrid => 2,
        Distribution::RealCities => 3,
    };
    POOLS[i].get_or_init(|| build_target_pool(dist, MASTER_SEED).expect("embedded pool data is valid"))
}

/// Targets for one instance: the `seed_index`-th subset first, continuing into later subsets when more are needed.
pub fn select_targets(pool: &TargetPool, seed_index: usize, count: usize) -> Result<Vec<TargetPoint>> {
    let total: usize = pool.subsets.iter().map(Vec::len).sum();
    if count > total {
        return Err(Error::domain(format!("asked for {count} targets from a pool of {total}")));
    }
    let n = pool.subsets.len();
    Ok((0..n).flat_map(|k| pool.subsets[(seed_index + k) % n].iter().cloned()).take(count).collect())
}

/// Priority, profit and duration drawn from one seeded stream, in target order.
pub fn assign_attributes(targets: &[TargetPoint], seed: u64) -> Vec<TaskSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    targets
        .iter()
        .map(|t| TaskSpec {
            id: t.id.clone(),
            lat_deg: t.lat_deg,
            lon_deg: t.lon_deg,
            priority: rng.gen_range(1..=10),
            profit: rng.gen_range(1..=10),
            duration_s: rng.gen_range(5..=15) as f64,
        })
        .collect()
}
