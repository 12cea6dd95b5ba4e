use std::f64::consts::PI;

use clap::Args;
use driventop_core::classical::{
    calibrate_threshold, classify_chaotic, hammer_projection, island_centres, AngularMomentumState, ChaosConfig,
    ClassicalParams, QuantumTop, Tolerances,
};
use driventop_core::quantum::{
    floquet, overlap_trace, purity_map, tunneling_from_floquet, DonorSpec, FluctuatedParameter, FluctuationSpec,
    SphereGrid, FLOQUET_SEGMENTS,
};
use driventop_core::spinops::{spin_coherent_state, SphereDirection, SpinQuantumNumber, StateVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{chaos_json, direction, numerical, nucleus, state_direction};
use crate::config::{resolve, Angles, Common};
use crate::output::{Run, Table};
use crate::{with_pool, CliError};

/// Default chaotic-sea seed for overlap traces.
pub const CHAOTIC_SEED: Angles = Angles { theta: PI / 2.0, phi: PI / 12.0 };

fn drive_spec(
    donor: &str,
    two_i: Option<i64>,
    gamma_n: Option<f64>,
    b0: f64,
    q: f64,
    b1: f64,
    f: f64,
) -> Result<DonorSpec, CliError> {
    let (spin, gamma_n) = nucleus(donor, two_i, gamma_n)?;
    let spec = DonorSpec::canonical(spin, gamma_n, b0, q, b1, f);
    spec.validate()?;
    spec.period()?;
    Ok(spec)
}

fn quantum_top(spec: &DonorSpec) -> QuantumTop {
    QuantumTop { spin: spec.spin, gamma_n: spec.gamma_n, b0: spec.b0, q: spec.q, b1: spec.b1, f: spec.drive_freq }
}

/// Centre of the regular island at `φ ≈ 0` of the equivalent classical top.
pub fn regular_seed(spec: &DonorSpec) -> Result<SphereDirection, CliError> {
    let p = quantum_top(spec).classical_equivalent()?;
    island_centres(&p, Tolerances::default())
        .into_iter()
        .find(|c| p.beta > 0.5 && c.state.theta() < PI / 2.0)
        .map(|c| state_direction(&c.state))
        .ok_or_else(|| numerical(format!("no regular island found at beta' = {:.4}; give theta/phi explicitly", p.beta)))
}

fn seed_or_regular(spec: &DonorSpec, theta: Option<f64>, phi: Option<f64>) -> Result<SphereDirection, CliError> {
    match (theta, phi) {
        (Some(t), Some(p)) => direction(t, p),
        (None, None) => regular_seed(spec),
        _ => Err(CliError::Config("give both theta and phi, or neither".into())),
    }
}

fn floquet_json() -> Value {
    json!({ "floquet_segments": FLOQUET_SEGMENTS })
}

// ---------------------------------------------------------------- purity-map

fn parse_fluctuated(s: &str) -> Result<FluctuatedParameter, String> {
    match s {
        "q" => Ok(FluctuatedParameter::Q),
        "b0" => Ok(FluctuatedParameter::B0),
        "b1" => Ok(FluctuatedParameter::B1),
        _ => Err(format!("unknown parameter '{s}' (q | b0 | b1)")),
    }
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct PurityFlags {
    #[arg(long)]
    pub donor: Option<String>,
    #[arg(long)]
    pub two_i: Option<i64>,
    /// Hz/T
    #[arg(long)]
    pub gamma_n: Option<f64>,
    /// T
    #[arg(long)]
    pub b0: Option<f64>,
    /// Hz
    #[arg(long)]
    pub q: Option<f64>,
    /// T
    #[arg(long)]
    pub b1: Option<f64>,
    /// Drive frequency, Hz.
    #[arg(long)]
    pub f: Option<f64>,
    /// Fluctuating parameter: q, b0 or b1.
    #[arg(long, value_parser = parse_fluctuated)]
    pub fluctuate: Option<FluctuatedParameter>,
    /// Standard deviation, in the unit of the fluctuating parameter.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub n_levels: Option<usize>,
    /// Ensemble members.
    #[arg(long)]
    pub n_sequences: Option<usize>,
    #[arg(long)]
    pub n_periods: Option<usize>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
    /// Tag cells as island / sea from the equivalent classical top.
    #[arg(long)]
    pub regions: Option<bool>,
    #[arg(long)]
    pub island_radius: Option<f64>,
    #[arg(long)]
    pub calibration_seeds: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PurityParams {
    pub donor: String,
    pub two_i: Option<i64>,
    pub gamma_n: Option<f64>,
    pub b0: f64,
    pub q: f64,
    pub b1: f64,
    pub f: f64,
    pub fluctuate: FluctuatedParameter,
    pub sigma: f64,
    pub n_levels: usize,
    pub n_sequences: usize,
    pub n_periods: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub regions: bool,
    pub island_radius: f64,
    pub calibration_seeds: usize,
    pub calibration_seed: u64,
}

impl Default for PurityParams {
    fn default() -> Self {
        Self {
            donor: "Sb123".into(),
            two_i: None,
            gamma_n: None,
            b0: 0.5,
            q: 0.8e6,
            b1: 0.01,
            f: 3.5e6,
            fluctuate: FluctuatedParameter::Q,
            sigma: 4e3,
            n_levels: 30,
            n_sequences: 200,
            n_periods: 1000,
            n_theta: 48,
            n_phi: 96,
            regions: true,
            island_radius: 0.35,
            calibration_seeds: 2000,
            calibration_seed: 99,
        }
    }
}

/// Island / sea tags of every grid cell.
#[derive(Debug, Clone, Serialize)]
pub struct Regions {
    pub classical: ClassicalParams,
    pub threshold: f64,
    pub centres: Vec<[f64; 2]>,
    pub island: Vec<bool>,
    pub sea: Vec<bool>,
}

pub fn classify_regions(
    spec: &DonorSpec,
    directions: &[SphereDirection],
    radius: f64,
    calibration_seeds: usize,
    calibration_seed: u64,
) -> Result<Regions, CliError> {
    let p = quantum_top(spec).classical_equivalent()?;
    let mut cfg = ChaosConfig::default();
    cfg.threshold = calibrate_threshold(p.beta, calibration_seeds, calibration_seed, &cfg)?.threshold;
    let centres: Vec<SphereDirection> =
        island_centres(&p, Tolerances::default()).iter().map(|c| state_direction(&c.state)).collect();
    let sea: Vec<bool> = directions
        .par_iter()
        .map(|d| classify_chaotic(&AngularMomentumState::from_angles(d.theta(), d.phi()), &p, &cfg).map(|c| c.is_chaotic))
        .collect::<Result<_, _>>()?;
    let island = directions
        .iter()
        .zip(&sea)
        .map(|(d, &chaotic)| !chaotic && centres.iter().any(|c| c.angle_to(d) < radius))
        .collect();
    Ok(Regions {
        classical: p,
        threshold: cfg.threshold,
        centres: centres.iter().map(|c| [c.theta(), c.phi()]).collect(),
        island,
        sea,
    })
}

pub fn run_purity(common: &Common, flags: &PurityFlags) -> Result<(), CliError> {
    const NAME: &str = "purity-map";
    let r = resolve::<PurityParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let spec = drive_spec(&p.donor, p.two_i, p.gamma_n, p.b0, p.q, p.b1, p.f)?;
    let mean = match p.fluctuate {
        FluctuatedParameter::Q => p.q,
        FluctuatedParameter::B0 => p.b0,
        FluctuatedParameter::B1 => p.b1,
    };
    let fluct = FluctuationSpec {
        parameter: p.fluctuate,
        mean,
        sigma: p.sigma,
        n_levels: p.n_levels,
        n_sequences: p.n_sequences,
        n_periods: p.n_periods,
        rng_seed: r.seed,
    };
    fluct.validate()?;
    if p.n_theta == 0 || p.n_phi == 0 {
        return Err(CliError::Config("grid needs n_theta, n_phi >= 1".into()));
    }
    let grid = SphereGrid { n_theta: p.n_theta, n_phi: p.n_phi };

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let (map, regions) = with_pool(r.workers, || -> Result<_, CliError> {
        let map = purity_map(&spec, &fluct, grid)?;
        let regions = if p.regions {
            Some(classify_regions(&spec, &map.directions, p.island_radius, p.calibration_seeds, p.calibration_seed)?)
        } else {
            None
        };
        Ok((map, regions))
    })??;

    let mut table = Table::new(&["theta", "phi", "hammer_x", "hammer_y", "purity", "region"]);
    for (k, (d, purity)) in map.directions.iter().zip(&map.purity).enumerate() {
        let (hx, hy) = hammer_projection(d);
        let region = match &regions {
            Some(g) if g.island[k] => "island",
            Some(g) if g.sea[k] => "sea",
            Some(_) => "other",
            None => "",
        };
        table.push(vec![d.theta().into(), d.phi().into(), hx.into(), hy.into(), (*purity).into(), region.into()]);
    }
    run.csv("purity-map.csv", &table)?;

    let derived = match &regions {
        Some(g) => {
            let island = map.weighted_mean(&g.island);
            let sea = map.weighted_mean(&g.sea);
            json!({
                "classical_equivalent": g.classical,
                "chaos_threshold": g.threshold,
                "island_centres": g.centres,
                "island_mean_purity": island,
                "sea_mean_purity": sea,
                "contrast": island.zip(sea).map(|(a, b)| a - b),
                "levels": fluct.levels(),
            })
        }
        None => json!({ "levels": fluct.levels() }),
    };
    let mut tol = floquet_json();
    if p.regions {
        tol["classifier"] = chaos_json(&ChaosConfig::default());
    }
    run.finish(tol, derived)?;
    Ok(())
}

// ----------------------------------------------------------------- tunneling

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct TunnelingFlags {
    #[arg(long)]
    pub donor: Option<String>,
    /// One or more 2I values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub two_i: Option<Vec<i64>>,
    #[arg(long)]
    pub gamma_n: Option<f64>,
    /// One or more static fields, T.
    #[arg(long, value_delimiter = ',')]
    pub b0: Option<Vec<f64>>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Fixed product Q·I, Hz; replaces --q.
    #[arg(long)]
    pub qi: Option<f64>,
    #[arg(long)]
    pub b1: Option<f64>,
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TunnelingParams {
    pub donor: String,
    /// Empty: the donor's own spin.
    pub two_i: Vec<i64>,
    pub gamma_n: Option<f64>,
    #[serde(deserialize_with = "crate::config::one_or_many")]
    pub b0: Vec<f64>,
    pub q: f64,
    pub qi: Option<f64>,
    pub b1: f64,
    pub f: f64,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
}

impl Default for TunnelingParams {
    fn default() -> Self {
        Self {
            donor: "Sb123".into(),
            two_i: Vec::new(),
            gamma_n: None,
            b0: vec![0.5],
            q: 0.8e6,
            qi: None,
            b1: 0.01,
            f: 5e6,
            theta: None,
            phi: None,
        }
    }
}

pub fn run_tunneling(common: &Common, flags: &TunnelingFlags) -> Result<(), CliError> {
    const NAME: &str = "tunneling";
    let r = resolve::<TunnelingParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let spins: Vec<Option<i64>> = if p.two_i.is_empty() { vec![None] } else { p.two_i.iter().map(|&n| Some(n)).collect() };
    if p.b0.is_empty() {
        return Err(CliError::Config("tunneling needs at least one b0".into()));
    }
    let mut specs = Vec::new();
    for &two_i in &spins {
        for &b0 in &p.b0 {
            let (spin, _) = nucleus(&p.donor, two_i, p.gamma_n)?;
            let q = match p.qi {
                Some(qi) => qi / spin.value(),
                None => p.q,
            };
            let spec = drive_spec(&p.donor, two_i, p.gamma_n, b0, q, p.b1, p.f)?;
            let seed = seed_or_regular(&spec, p.theta, p.phi);
            specs.push((spec, seed));
        }
    }

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let rows = with_pool(r.workers, || {
        specs
            .par_iter()
            .map(|(spec, seed)| -> Result<_, CliError> {
                let seed = seed.as_ref().map_err(|e| numerical(e.to_string()))?;
                let f = floquet(spec, FLOQUET_SEGMENTS)?;
                let est = tunneling_from_floquet(&f, &spin_coherent_state(spec.spin, seed))?;
                Ok((spec.clone(), *seed, est))
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let mut table = Table::new(&[
        "two_i", "b0", "q", "theta", "phi", "frequency", "period", "fft_frequency", "fft_bin_width", "weight_a", "weight_b",
    ]);
    for (spec, seed, est) in &rows {
        table.push(vec![
            (spec.spin.two_i() as u64).into(),
            spec.b0.into(),
            spec.q.into(),
            seed.theta().into(),
            seed.phi().into(),
            est.frequency.into(),
            (1.0 / est.frequency).into(),
            est.fft_frequency.into(),
            est.fft_bin_width.into(),
            est.weights[0].into(),
            est.weights[1].into(),
        ]);
    }
    run.csv("tunneling.csv", &table)?;
    let derived: Vec<Value> = rows
        .iter()
        .map(|(s, _, e)| json!({ "two_i": s.spin.two_i(), "b0": s.b0, "components": e.components, "fft_stride": e.fft_stride }))
        .collect();
    run.finish(floquet_json(), json!({ "estimates": derived }))?;
    Ok(())
}

// ------------------------------------------------------------- overlap-trace

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct TraceFlags {
    #[arg(long)]
    pub donor: Option<String>,
    #[arg(long)]
    pub two_i: Option<i64>,
    #[arg(long)]
    pub gamma_n: Option<f64>,
    #[arg(long)]
    pub b0: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub b1: Option<f64>,
    #[arg(long)]
    pub f: Option<f64>,
    /// THETA:PHI pairs; default is the regular island centre and a
    /// chaotic-sea point.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<Angles>>,
    #[arg(long)]
    pub n_periods: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceParams {
    pub donor: String,
    pub two_i: Option<i64>,
    pub gamma_n: Option<f64>,
    pub b0: f64,
    pub q: f64,
    pub b1: f64,
    pub f: f64,
    pub seeds: Vec<Angles>,
    pub n_periods: usize,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            donor: "Sb123".into(),
            two_i: None,
            gamma_n: None,
            b0: 0.5,
            q: 0.8e6,
            b1: 0.01,
            f: 5e6,
            seeds: Vec::new(),
            n_periods: 200,
        }
    }
}

pub fn run_trace(common: &Common, flags: &TraceFlags) -> Result<(), CliError> {
    const NAME: &str = "overlap-trace";
    let r = resolve::<TraceParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let spec = drive_spec(&p.donor, p.two_i, p.gamma_n, p.b0, p.q, p.b1, p.f)?;
    let seeds: Vec<SphereDirection> = if p.seeds.is_empty() {
        vec![regular_seed(&spec)?, direction(CHAOTIC_SEED.theta, CHAOTIC_SEED.phi)?]
    } else {
        p.seeds.iter().map(|a| direction(a.theta, a.phi)).collect::<Result<_, _>>()?
    };

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let traces = with_pool(r.workers, || -> Result<_, CliError> {
        let f = floquet(&spec, FLOQUET_SEGMENTS)?;
        seeds
            .par_iter()
            .map(|d| Ok(overlap_trace(&f, &spin_coherent_state(spec.spin, d), p.n_periods)?))
            .collect::<Result<Vec<_>, CliError>>()
    })??;

    let mut table = Table::new(&["seed_index", "theta0", "phi0", "period", "time", "amplitude", "squared"]);
    for (i, (d, t)) in seeds.iter().zip(&traces).enumerate() {
        for (k, (time, a)) in t.times.iter().zip(&t.amplitude).enumerate() {
            table.push(vec![i.into(), d.theta().into(), d.phi().into(), k.into(), (*time).into(), (*a).into(), (a * a).into()]);
        }
    }
    run.csv("overlap-trace.csv", &table)?;
    let max_revival: Vec<f64> =
        traces.iter().map(|t| t.amplitude.iter().skip(1).copied().fold(0.0, f64::max)).collect();
    run.finish(
        floquet_json(),
        json!({ "seeds": seeds.iter().map(|d| [d.theta(), d.phi()]).collect::<Vec<_>>(), "max_revival": max_revival }),
    )?;
    Ok(())
}

// ------------------------------------------------------------- husimi-frames

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct HusimiFlags {
    #[arg(long)]
    pub donor: Option<String>,
    #[arg(long)]
    pub two_i: Option<i64>,
    #[arg(long)]
    pub gamma_n: Option<f64>,
    #[arg(long)]
    pub b0: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub b1: Option<f64>,
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub n_periods: Option<usize>,
    /// Periods between frames.
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HusimiParams {
    pub donor: String,
    pub two_i: Option<i64>,
    pub gamma_n: Option<f64>,
    pub b0: f64,
    pub q: f64,
    pub b1: f64,
    pub f: f64,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub n_periods: usize,
    pub stride: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for HusimiParams {
    fn default() -> Self {
        Self {
            donor: "Sb123".into(),
            two_i: None,
            gamma_n: None,
            b0: 0.5,
            q: 0.8e6,
            b1: 0.01,
            f: 5e6,
            theta: None,
            phi: None,
            n_periods: 40,
            stride: 1,
            n_theta: 48,
            n_phi: 96,
        }
    }
}

/// `Q = |⟨θ,φ|ψ⟩|²/π` on every cell for which `coherent` holds the state.
fn husimi_grid(psi: &StateVector, coherent: &[StateVector]) -> Vec<f64> {
    coherent.par_iter().map(|c| c.overlap(psi).powi(2) / PI).collect()
}

pub fn frame_file(k: usize) -> String {
    format!("frames/frame_{k:05}.csv")
}

pub fn run_husimi(common: &Common, flags: &HusimiFlags) -> Result<(), CliError> {
    const NAME: &str = "husimi-frames";
    let r = resolve::<HusimiParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let spec = drive_spec(&p.donor, p.two_i, p.gamma_n, p.b0, p.q, p.b1, p.f)?;
    let seed = seed_or_regular(&spec, p.theta, p.phi)?;
    if p.stride == 0 || p.n_theta == 0 || p.n_phi == 0 {
        return Err(CliError::Config("stride, n_theta and n_phi must be >= 1".into()));
    }
    let grid = SphereGrid { n_theta: p.n_theta, n_phi: p.n_phi };
    let directions = grid.directions();
    let spin: SpinQuantumNumber = spec.spin;

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let (frames, period) = with_pool(r.workers, || -> Result<_, CliError> {
        let f = floquet(&spec, FLOQUET_SEGMENTS)?;
        let coherent: Vec<StateVector> = directions.par_iter().map(|d| spin_coherent_state(spin, d)).collect();
        let mut psi = spin_coherent_state(spin, &seed);
        let mut frames = Vec::new();
        for k in 0..=p.n_periods {
            if k > 0 {
                psi = psi.evolved(&f.matrix);
            }
            if k % p.stride == 0 {
                frames.push((k, husimi_grid(&psi, &coherent)));
            }
        }
        Ok((frames, f.period))
    })??;

    let mut index = Table::new(&["frame", "period", "time", "file"]);
    for (n, (k, q)) in frames.iter().enumerate() {
        let mut table = Table::new(&["theta", "phi", "hammer_x", "hammer_y", "q"]);
        for (d, v) in directions.iter().zip(q) {
            let (hx, hy) = hammer_projection(d);
            table.push(vec![d.theta().into(), d.phi().into(), hx.into(), hy.into(), (*v).into()]);
        }
        let name = frame_file(n);
        run.csv(&name, &table)?;
        index.push(vec![n.into(), (*k).into(), (*k as f64 * period).into(), name.as_str().into()]);
    }
    run.csv("husimi-frames.csv", &index)?;
    run.finish(
        floquet_json(),
        json!({ "seed": [seed.theta(), seed.phi()], "n_frames": frames.len(), "q_scale": [0.0, 1.0 / PI] }),
    )?;
    Ok(())
}
