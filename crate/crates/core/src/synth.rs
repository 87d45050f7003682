//! Seeded synthetic record generators: a general-purpose sample resembling the
//! literature mix, and power-law oracles with known exponents.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::data::{
    DataRecord, Dataset, LabelKind, Labels, MaterialRegistry, MaterialSpec, NumericField, Orientation, PostProcessing,
    SurfaceCondition, Subprocess,
};
use crate::eqdiscovery::{QuantitySource, QuantityTable, AS_BUILT_YS_EXPONENTS};
use crate::error::{validation, Result};
use crate::rng::{self, Rng};

const SAMPLE_STREAM: u64 = 0x5A;
const ORACLE_STREAM: u64 = 0x5B;

/// Alloys used by the generators, most common first.
pub const COMMON_MATERIALS: [&str; 12] = [
    "Ti6Al4V",
    "IN718",
    "SS316L",
    "AlSi10Mg",
    "IN625",
    "Maraging steel M300",
    "SS17-4PH",
    "CoCrMo",
    "H13 Tool Steel",
    "Hastelloy X",
    "CuCrZr",
    "SS304L",
];

/// Share of records carrying each label, in `LabelKind::ALL` order.
pub const LABEL_SHARE: [f64; 7] = [0.76, 0.78, 0.27, 0.75, 0.18, 0.14, 0.14];

struct Route {
    subprocess: Subprocess,
    machines: &'static [&'static str],
    power: (f64, f64),
    speed: (f64, f64),
    layer: (f64, f64),
    spot: (f64, f64),
}

const ROUTES: [(f64, Route); 4] = [
    (
        0.72,
        Route {
            subprocess: Subprocess::LPbf,
            machines: &["EOS M290", "SLM 280HL", "Renishaw AM400", "Concept Laser M2"],
            power: (150.0, 400.0),
            speed: (500.0, 1500.0),
            layer: (20.0, 60.0),
            spot: (70.0, 120.0),
        },
    ),
    (
        0.08,
        Route {
            subprocess: Subprocess::EPbf,
            machines: &["Arcam A2X", "Arcam Q20"],
            power: (600.0, 3000.0),
            speed: (1000.0, 4000.0),
            layer: (50.0, 100.0),
            spot: (200.0, 400.0),
        },
    ),
    (
        0.14,
        Route {
            subprocess: Subprocess::LDed,
            machines: &["Optomec LENS 850R", "DMG Lasertec 65"],
            power: (300.0, 2000.0),
            speed: (5.0, 20.0),
            layer: (300.0, 1000.0),
            spot: (600.0, 3000.0),
        },
    ),
    (
        0.06,
        Route {
            subprocess: Subprocess::ArcDed,
            machines: &["Fronius CMT"],
            power: (2000.0, 6000.0),
            speed: (5.0, 15.0),
            layer: (1000.0, 2500.0),
            spot: (3000.0, 6000.0),
        },
    ),
];

fn pick<'a, T>(r: &mut Rng, items: &'a [(f64, T)]) -> &'a T {
    let total: f64 = items.iter().map(|i| i.0).sum();
    let mut u = r.random_range(0.0..total);
    for (w, item) in items {
        if u < *w {
            return item;
        }
        u -= w;
    }
    &items[items.len() - 1].1
}

fn uniform(r: &mut Rng, (lo, hi): (f64, f64)) -> f64 {
    r.random_range(lo..hi)
}

fn round_to(v: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (v * s).round() / s
}

fn materials_present<'a>(registry: &'a MaterialRegistry, names: &[&str]) -> Result<Vec<&'a MaterialSpec>> {
    let found: Vec<&MaterialSpec> = names.iter().filter_map(|n| registry.get(n)).collect();
    if found.is_empty() {
        return Err(validation!("none of the generator's alloys are in the material registry"));
    }
    Ok(found)
}

/// Mixed-process records with labels from a smooth hidden response plus noise.
pub fn sample_dataset(registry: &MaterialRegistry, n: usize, seed: u64) -> Result<Dataset> {
    let mats = materials_present(registry, &COMMON_MATERIALS)?;
    let weighted: Vec<(f64, &MaterialSpec)> =
        mats.iter().enumerate().map(|(i, m)| (1.0 / (1.0 + i as f64 * 0.25), *m)).collect();
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut ds = Dataset::new();
    for i in 0..n {
        let mut r = rng::stream(seed, rng::stream_id(&[SAMPLE_STREAM, i as u64]));
        let m = *pick(&mut r, &weighted);
        let route = pick(&mut r, &ROUTES);
        let orientation = *pick(&mut r, &[(0.45, Orientation::Horizontal), (0.45, Orientation::Vertical), (0.1, Orientation::Deg45)]);
        let post = pick(
            &mut r,
            &[(0.5, PostProcessing::AsBuilt), (0.3, PostProcessing::Ht), (0.12, PostProcessing::Hip), (0.08, PostProcessing::Sr)],
        )
        .clone();
        let power = round_to(uniform(&mut r, route.power), 0);
        let speed = round_to(uniform(&mut r, route.speed), 0);
        let layer = round_to(uniform(&mut r, route.layer), 0);
        let spot = round_to(uniform(&mut r, route.spot), 0);

        let base_ys = 120.0 * m.density.powf(0.9) * (20.0 / m.cte).sqrt();
        let energy = power / (speed * layer * spot * 1e-6);
        let process = 1.0 + 0.06 * (40.0 / layer).ln() + 0.02 * (energy / 100.0).ln().clamp(-3.0, 3.0)
            - if route.subprocess == Subprocess::LPbf { 0.0 } else { 0.12 };
        let (post_ys, post_uts, post_el) = match post {
            PostProcessing::AsBuilt => (1.0, 1.18, 0.8),
            PostProcessing::Ht => (0.9, 1.22, 1.2),
            PostProcessing::Hip => (0.82, 1.28, 1.5),
            _ => (0.95, 1.2, 1.0),
        };
        let orient = match orientation {
            Orientation::Horizontal => 1.03,
            Orientation::Vertical => 0.97,
            Orientation::Deg45 => 1.0,
        };
        let mut jitter = |s: f64| 1.0 + s * noise.sample(&mut r);
        let ys = base_ys * process * post_ys * orient * jitter(0.03);
        let uts = ys * post_uts * jitter(0.02);
        let e_mod = 30.0 * m.density.powf(0.95) * jitter(0.03);
        let elongation = (18.0 * post_el * (700.0 / ys).sqrt() * orient * jitter(0.08)).clamp(0.5, 60.0);
        let hv = ys / 3.0 + 60.0 * jitter(0.05);
        let hrc = (hv > 240.0).then(|| (hv - 240.0) / 9.0 + 20.0);
        let surface = *pick(
            &mut r,
            &[
                (0.6, SurfaceCondition::AsBuilt),
                (0.2, SurfaceCondition::BeadBlasted),
                (0.1, SurfaceCondition::ShotPeened),
                (0.1, SurfaceCondition::CorundumBlasted),
            ],
        );
        let finish = match surface {
            SurfaceCondition::AsBuilt => 1.0,
            SurfaceCondition::BeadBlasted => 0.5,
            SurfaceCondition::ShotPeened => 0.4,
            SurfaceCondition::CorundumBlasted => 0.6,
        };
        let rz = (8.0 + 0.4 * layer.min(200.0)) * finish * (1.0 + 0.1 * noise.sample(&mut r)).max(0.3);

        let mut labels = Labels::default();
        let values = [Some(ys), Some(uts), Some(e_mod), Some(elongation), Some(hv), hrc, Some(rz)];
        for (k, (&kind, v)) in LabelKind::ALL.iter().zip(values).enumerate() {
            if r.random_bool(LABEL_SHARE[k]) {
                labels.set(kind, v.map(|x| round_to(x, 2)));
            }
        }
        if !labels.any() {
            labels.set(LabelKind::Ys, Some(round_to(ys, 2)));
        }
        let has_rz = labels.get(LabelKind::Rz).is_some();
        ds.push(
            DataRecord {
                material: m.name.clone(),
                process: route.subprocess.process(),
                subprocess: route.subprocess,
                machine: route.machines[r.random_range(0..route.machines.len())].to_string(),
                orientation,
                post_processing: post,
                surface_condition: has_rz.then_some(surface),
                beam_power: Some(power),
                scan_speed: r.random_bool(0.85).then_some(speed),
                layer_thickness: Some(layer),
                beam_diameter: r.random_bool(0.7).then_some(spot),
                labels,
            },
            format!("synth-{i}"),
        );
    }
    Ok(ds)
}

/// Exponents and multiplier of a power law over the standard quantity table.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawSpec {
    /// SI multiplier; `None` calibrates it so the median target is `median_mpa`
    pub w0: Option<f64>,
    pub w: [f64; 9],
    pub median_mpa: f64,
    /// relative standard deviation of multiplicative noise
    pub noise: f64,
}

impl PowerLawSpec {
    /// `y = 2 ρ C_p (T_m − T_0)`.
    pub fn pressure_oracle(noise: f64) -> Self {
        PowerLawSpec { w0: Some(2.0), w: [0., 0., 0., 0., 1., 1., 0., 0., 1.], median_mpa: 0.0, noise }
    }

    /// Reported as-built yield-strength exponents with a calibrated multiplier.
    pub fn as_built_ys(noise: f64) -> Self {
        PowerLawSpec { w0: None, w: AS_BUILT_YS_EXPONENTS, median_mpa: 900.0, noise }
    }
}

/// As-built L-PBF yield-strength records whose label follows `spec` exactly
/// up to multiplicative noise. All nine power-law quantities are present.
pub fn powerlaw_dataset(
    registry: &MaterialRegistry,
    spec: &PowerLawSpec,
    n: usize,
    n_materials: usize,
    t0: f64,
    seed: u64,
) -> Result<Dataset> {
    let mats = materials_present(registry, &COMMON_MATERIALS)?;
    if n_materials == 0 || n_materials > mats.len() {
        return Err(validation!("can draw from 1 to {} alloys, asked for {n_materials}", mats.len()));
    }
    let mats = &mats[..n_materials];
    let table = QuantityTable::standard(t0);
    let route = &ROUTES[0].1;
    let noise = Normal::new(0.0, spec.noise.max(0.0)).expect("finite noise");
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = rng::stream(seed, rng::stream_id(&[ORACLE_STREAM, i as u64]));
        let m = mats[i % mats.len()];
        let power = round_to(uniform(&mut r, route.power), 1);
        let speed = round_to(uniform(&mut r, route.speed), 1);
        let layer = round_to(uniform(&mut r, route.layer), 1);
        let spot = round_to(uniform(&mut r, route.spot), 1);
        let log_prod: f64 = table
            .quantities
            .iter()
            .zip(spec.w)
            .map(|(q, w)| {
                let raw = match q.source {
                    QuantitySource::Process(NumericField::BeamPower) => power,
                    QuantitySource::Process(NumericField::ScanSpeed) => speed,
                    QuantitySource::Process(NumericField::LayerThickness) => layer,
                    QuantitySource::Process(NumericField::BeamDiameter) => spot,
                    QuantitySource::Material(p) => m.property(p),
                    QuantitySource::MeltingDelta => m.melting_temperature - t0,
                };
                w * (raw * q.si_factor).ln()
            })
            .sum();
        let eps = (1.0 + noise.sample(&mut r)).max(0.5);
        rows.push((m, power, speed, layer, spot, log_prod, eps, r.random_bool(0.5)));
    }
    let log_w0 = match spec.w0 {
        Some(w0) => w0.ln(),
        None => {
            let mut lp: Vec<f64> = rows.iter().map(|r| r.5).collect();
            lp.sort_by(f64::total_cmp);
            (spec.median_mpa * 1e6).ln() - lp[lp.len() / 2]
        }
    };
    let mut ds = Dataset::new();
    for (i, (m, power, speed, layer, spot, log_prod, eps, horizontal)) in rows.into_iter().enumerate() {
        let ys_pa = (log_w0 + log_prod).exp() * eps;
        let mut labels = Labels::default();
        labels.set(LabelKind::Ys, Some(ys_pa / 1e6));
        ds.push(
            DataRecord {
                material: m.name.clone(),
                process: Subprocess::LPbf.process(),
                subprocess: Subprocess::LPbf,
                machine: route.machines[i % route.machines.len()].to_string(),
                orientation: if horizontal { Orientation::Horizontal } else { Orientation::Vertical },
                post_processing: PostProcessing::AsBuilt,
                surface_condition: None,
                beam_power: Some(power),
                scan_speed: Some(speed),
                layer_thickness: Some(layer),
                beam_diameter: Some(spot),
                labels,
            },
            format!("oracle-{i}"),
        );
    }
    Ok(ds)
}
