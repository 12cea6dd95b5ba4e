use clap::Args;
use driventop_core::classical::{
    calibrate_threshold, classify_chaotic, fraction_grid, hammer_projection, log_space, sphere_samples,
    stroboscopic_map, AngularMomentumState, Calibration, ChaosClassification, ClassicalParams, FitWindow,
    StroboscopicMap, Tolerances,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{chaos_config, chaos_json, ode_tolerances_json, state_direction};
use crate::config::{one_or_many, range_count, resolve, Angles, Common};
use crate::output::{Cell, Run, Table};
use crate::{with_pool, CliError};

fn parse_window(s: &str) -> Result<FitWindow, String> {
    match s {
        "accumulated" => Ok(FitWindow::Accumulated),
        "first-renormalization" => Ok(FitWindow::FirstRenormalization),
        _ => Err(format!("unknown fit window '{s}' (accumulated | first-renormalization)")),
    }
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct MapFlags {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub freq: Option<f64>,
    /// Initial directions as THETA:PHI pairs, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<Angles>>,
    /// Random area-uniform seeds used when no explicit seeds are given.
    #[arg(long)]
    pub n_seeds: Option<usize>,
    #[arg(long)]
    pub n_periods: Option<usize>,
    /// Classify every trajectory as regular or chaotic.
    #[arg(long)]
    pub classify: Option<bool>,
    /// Fixed classification threshold; skips calibration.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub calibration_seeds: Option<usize>,
    #[arg(long)]
    pub calibration_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MapParams {
    pub beta: f64,
    pub gamma: f64,
    pub freq: f64,
    pub seeds: Vec<Angles>,
    pub n_seeds: usize,
    pub n_periods: usize,
    pub classify: bool,
    pub threshold: Option<f64>,
    pub calibration_seeds: usize,
    pub calibration_seed: u64,
    pub duration: f64,
    pub separation: f64,
    pub renorm_threshold: f64,
    pub window: FitWindow,
}

impl Default for MapParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            gamma: 0.02,
            freq: 1.4,
            seeds: Vec::new(),
            n_seeds: 12,
            n_periods: 1000,
            classify: true,
            threshold: None,
            calibration_seeds: 2000,
            calibration_seed: 99,
            duration: 1000.0,
            separation: 1e-8,
            renorm_threshold: 1e-4,
            window: FitWindow::Accumulated,
        }
    }
}

/// Calibrated (or fixed) threshold for one `β′`.
fn calibration(
    beta: f64,
    fixed: Option<f64>,
    n_seeds: usize,
    seed: u64,
    cfg: &driventop_core::classical::ChaosConfig,
) -> Result<Calibration, CliError> {
    match fixed {
        Some(threshold) => Ok(Calibration { beta, n_seeds: 0, max_exponent: f64::NAN, multiple: f64::NAN, threshold }),
        None => Ok(calibrate_threshold(beta, n_seeds, seed, cfg)?),
    }
}

pub fn run_map(common: &Common, flags: &MapFlags) -> Result<(), CliError> {
    const NAME: &str = "classical-map";
    let r = resolve::<MapParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let cp = ClassicalParams::new(p.beta, p.gamma, p.freq)?;
    let seeds: Vec<AngularMomentumState> = if p.seeds.is_empty() {
        sphere_samples(r.seed, p.n_seeds)
    } else {
        p.seeds.iter().map(|a| AngularMomentumState::from_angles(a.theta, a.phi)).collect()
    };
    let tol = Tolerances::default();
    let mut cfg = chaos_config(p.duration, p.separation, p.renorm_threshold, p.window);

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let (maps, cal, classes) = with_pool(r.workers, || -> Result<_, CliError> {
        let maps: Vec<StroboscopicMap> = seeds
            .par_iter()
            .map(|s| stroboscopic_map(s, &cp, p.n_periods, tol))
            .collect::<Result<_, _>>()?;
        if !p.classify {
            return Ok((maps, None, Vec::new()));
        }
        let cal = calibration(p.beta, p.threshold, p.calibration_seeds, p.calibration_seed, &cfg)?;
        cfg.threshold = cal.threshold;
        let classes: Vec<ChaosClassification> = seeds
            .par_iter()
            .map(|s| classify_chaotic(s, &cp, &cfg))
            .collect::<Result<_, _>>()?;
        Ok((maps, Some(cal), classes))
    })??;

    let mut traj = Table::new(&["seed_index", "period", "theta", "phi", "lx", "ly", "lz", "hammer_x", "hammer_y"]);
    for (i, m) in maps.iter().enumerate() {
        for (k, pt) in m.points.iter().enumerate() {
            let v = pt.vector();
            let (hx, hy) = hammer_projection(&state_direction(pt));
            traj.push(vec![
                i.into(),
                k.into(),
                pt.theta().into(),
                pt.phi().into(),
                v[0].into(),
                v[1].into(),
                v[2].into(),
                hx.into(),
                hy.into(),
            ]);
        }
    }
    run.csv("classical-map.csv", &traj)?;

    let mut seed_table = Table::new(&["seed_index", "theta", "phi", "exponent", "fit_residual", "chaotic"]);
    for (i, s) in seeds.iter().enumerate() {
        let (e, res, chaotic) = match classes.get(i) {
            Some(c) => (Cell::F(c.exponent), Cell::F(c.fit_residual), Cell::from(c.is_chaotic)),
            None => (Cell::F(f64::NAN), Cell::F(f64::NAN), Cell::S(String::new())),
        };
        seed_table.push(vec![i.into(), s.theta().into(), s.phi().into(), e, res, chaotic]);
    }
    run.csv("classical-map-seeds.csv", &seed_table)?;

    run.finish(
        json!({ "trajectory_ode": ode_tolerances_json(&tol), "classifier": chaos_json(&cfg) }),
        json!({ "calibration": cal, "drive_period": cp.period() }),
    )?;
    Ok(())
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct FractionFlags {
    /// One or more β′ values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub freq: Option<Vec<f64>>,
    /// Log-spaced β′ grid LO,HI,N (replaces --beta).
    #[arg(long, value_delimiter = ',')]
    pub beta_log_range: Option<Vec<f64>>,
    /// Log-spaced f′ grid LO,HI,N (replaces --freq).
    #[arg(long, value_delimiter = ',')]
    pub freq_log_range: Option<Vec<f64>>,
    /// Seeds per cell.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub calibration_seeds: Option<usize>,
    #[arg(long)]
    pub calibration_seed: Option<u64>,
    /// Evolution time per seed, α-units.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, value_parser = parse_window)]
    pub window: Option<FitWindow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FractionParams {
    #[serde(deserialize_with = "one_or_many")]
    pub beta: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub gamma: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub freq: Vec<f64>,
    pub beta_log_range: Option<[f64; 3]>,
    pub freq_log_range: Option<[f64; 3]>,
    pub samples: usize,
    pub threshold: Option<f64>,
    pub calibration_seeds: usize,
    pub calibration_seed: u64,
    pub duration: f64,
    pub separation: f64,
    pub renorm_threshold: f64,
    pub window: FitWindow,
}

impl Default for FractionParams {
    fn default() -> Self {
        Self {
            beta: vec![1.0],
            gamma: vec![0.02],
            freq: vec![1.4],
            beta_log_range: None,
            freq_log_range: None,
            samples: 2000,
            threshold: None,
            calibration_seeds: 2000,
            calibration_seed: 99,
            duration: 1000.0,
            separation: 1e-8,
            renorm_threshold: 1e-4,
            window: FitWindow::Accumulated,
        }
    }
}

fn axis(values: &[f64], range: &Option<[f64; 3]>, what: &str) -> Result<Vec<f64>, CliError> {
    let v = match range {
        Some(r) => {
            if !(r[0] > 0.0 && r[1] > 0.0) {
                return Err(CliError::Config(format!("{what}: log range needs positive bounds")));
            }
            log_space(r[0], r[1], range_count(r, what)?)
        }
        None => values.to_vec(),
    };
    if v.is_empty() {
        return Err(CliError::Config(format!("{what}: no values")));
    }
    Ok(v)
}

pub fn run_fraction(common: &Common, flags: &FractionFlags) -> Result<(), CliError> {
    const NAME: &str = "chaos-fraction";
    let r = resolve::<FractionParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let betas = axis(&p.beta, &p.beta_log_range, "beta")?;
    let freqs = axis(&p.freq, &p.freq_log_range, "freq")?;
    if p.gamma.is_empty() || p.samples == 0 {
        return Err(CliError::Config("chaos-fraction needs at least one gamma and samples >= 1".into()));
    }
    for &b in &betas {
        for &g in &p.gamma {
            for &f in &freqs {
                ClassicalParams::new(b, g, f)?;
            }
        }
    }
    let cfg = chaos_config(p.duration, p.separation, p.renorm_threshold, p.window);

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let (cals, cells) = with_pool(r.workers, || -> Result<_, CliError> {
        let cals = betas
            .iter()
            .map(|&b| calibration(b, p.threshold, p.calibration_seeds, p.calibration_seed, &cfg))
            .collect::<Result<Vec<_>, _>>()?;
        let mut cells = Vec::new();
        for &g in &p.gamma {
            cells.extend(fraction_grid(&betas, &freqs, g, p.samples, r.seed, &cals, &cfg)?);
        }
        Ok((cals, cells))
    })??;

    let mut table = Table::new(&["beta", "gamma", "freq", "fraction", "n_chaotic", "n_samples"]);
    for c in &cells {
        table.push(vec![
            c.beta.into(),
            c.gamma.into(),
            c.freq.into(),
            c.result.fraction.into(),
            c.result.n_chaotic.into(),
            c.result.n_samples.into(),
        ]);
    }
    run.csv("chaos-fraction.csv", &table)?;
    run.finish(json!({ "classifier": chaos_json(&cfg) }), json!({ "calibrations": cals }))?;
    Ok(())
}
