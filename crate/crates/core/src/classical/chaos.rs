use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eom::{eom_raw, norm, AngularMomentumState};
use super::map::cross;
use super::ode::{Dop853, Tolerances};
use super::params::ClassicalParams;
use crate::Result;

/// Which part of the log-distance record enters the exponent fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitWindow {
    /// From `s = 0` until the separation first exceeds the renormalization
    /// threshold (or the run ends).
    FirstRenormalization,
    /// Whole run, accumulating the logarithms of all renormalization factors.
    Accumulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosConfig {
    /// Initial distance to the neighbouring trajectory.
    pub separation: f64,
    /// Separation at which the neighbour is pulled back to `separation`.
    pub renorm_threshold: f64,
    /// Evolution time in `s = αt` units.
    pub duration: f64,
    /// Spacing of log-distance samples, `s` units.
    pub sample_interval: f64,
    /// Classification threshold on the exponent (units of α/2π); NaN until
    /// calibrated, which classifies nothing as chaotic.
    pub threshold: f64,
    pub window: FitWindow,
    #[serde(skip, default = "Tolerances::classifier")]
    pub tolerances: Tolerances,
}

impl Default for ChaosConfig {
    fn default() -> Self {
        Self {
            separation: 1e-8,
            renorm_threshold: 1e-4,
            duration: 1000.0,
            sample_interval: 0.25,
            threshold: f64::NAN,
            window: FitWindow::Accumulated,
            tolerances: Tolerances::classifier(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosClassification {
    /// Fitted slope of ln(distance) per unit `αt/2π`.
    pub exponent: f64,
    pub is_chaotic: bool,
    /// RMS residual of the linear fit in ln(distance).
    pub fit_residual: f64,
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = norm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Least-squares slope and RMS residual of `y` against `x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Fitted divergence exponent of the trajectory through `state0`.
pub fn divergence_exponent(
    state0: &AngularMomentumState,
    p: &ClassicalParams,
    cfg: &ChaosConfig,
) -> Result<(f64, f64)> {
    let l = state0.vector();
    let helper = if l[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let dir = unit(cross(&helper, &l));
    let n = unit([
        l[0] + cfg.separation * dir[0],
        l[1] + cfg.separation * dir[1],
        l[2] + cfg.separation * dir[2],
    ]);
    let pp = *p;
    let rhs = move |s: f64, y: &[f64; 6]| {
        let a = eom_raw(&[y[0], y[1], y[2]], &pp, s);
        let b = eom_raw(&[y[3], y[4], y[5]], &pp, s);
        [a[0], a[1], a[2], b[0], b[1], b[2]]
    };
    let mut solver = Dop853::new(rhs, 0.0, [l[0], l[1], l[2], n[0], n[1], n[2]], cfg.tolerances);

    let d0 = distance(solver.y());
    let mut times = vec![0.0];
    let mut logs = vec![d0.ln()];
    let mut accumulated = 0.0;
    let n_samples = (cfg.duration / cfg.sample_interval).round().max(1.0) as usize;
    for k in 1..=n_samples {
        let s = cfg.duration * k as f64 / n_samples as f64;
        solver.advance_to(s)?;
        let y = *solver.y();
        let d = distance(&y);
        times.push(s);
        logs.push(accumulated + d.ln());
        if d > cfg.renorm_threshold {
            if cfg.window == FitWindow::FirstRenormalization {
                break;
            }
            accumulated += (d / cfg.separation).ln();
            let scale = cfg.separation / d;
            let a = [y[0], y[1], y[2]];
            let b = unit([
                y[0] + (y[3] - y[0]) * scale,
                y[1] + (y[4] - y[1]) * scale,
                y[2] + (y[5] - y[2]) * scale,
            ]);
            solver.reset_state([a[0], a[1], a[2], b[0], b[1], b[2]]);
        }
    }
    let (slope, _, residual) = linear_fit(&times, &logs);
    Ok((slope * 2.0 * PI, residual))
}

fn distance(y: &[f64; 6]) -> f64 {
    ((y[0] - y[3]).powi(2) + (y[1] - y[4]).powi(2) + (y[2] - y[5]).powi(2)).sqrt()
}

pub fn classify_chaotic(
    state0: &AngularMomentumState,
    p: &ClassicalParams,
    cfg: &ChaosConfig,
) -> Result<ChaosClassification> {
    let (exponent, fit_residual) = divergence_exponent(state0, p, cfg)?;
    Ok(ChaosClassification {
        exponent,
        is_chaotic: exponent > cfg.threshold,
        fit_residual,
    })
}

/// Area-uniform seed number `index` of the stream keyed by `seed`.
pub fn sphere_sample(seed: u64, index: u64) -> AngularMomentumState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    AngularMomentumState::normalized([r * phi.cos(), r * phi.sin(), z])
        .expect("sample lies on the unit sphere")
}

pub fn sphere_samples(seed: u64, n: usize) -> Vec<AngularMomentumState> {
    (0..n as u64).map(|k| sphere_sample(seed, k)).collect()
}

/// Exponents for a batch of seeds, in seed order.
pub fn exponents(
    seeds: &[AngularMomentumState],
    p: &ClassicalParams,
    cfg: &ChaosConfig,
) -> Result<Vec<f64>> {
    seeds
        .par_iter()
        .map(|s| divergence_exponent(s, p, cfg).map(|(e, _)| e))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaoticFraction {
    /// Percentage of seeds classified chaotic.
    pub fraction: f64,
    pub n_chaotic: usize,
    pub n_samples: usize,
}

pub fn chaotic_fraction(
    p: &ClassicalParams,
    n_samples: usize,
    seed: u64,
    cfg: &ChaosConfig,
) -> Result<ChaoticFraction> {
    let seeds = sphere_samples(seed, n_samples);
    let ex = exponents(&seeds, p, cfg)?;
    let n_chaotic = ex.iter().filter(|&&e| e > cfg.threshold).count();
    Ok(ChaoticFraction {
        fraction: 100.0 * n_chaotic as f64 / n_samples.max(1) as f64,
        n_chaotic,
        n_samples,
    })
}

/// Threshold derived from the undriven (integrable) top at the same `β′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub beta: f64,
    pub n_seeds: usize,
    pub max_exponent: f64,
    pub multiple: f64,
    pub threshold: f64,
}

pub const CALIBRATION_MULTIPLE: f64 = 5.0;

/// Largest exponent over `n_seeds` area-uniform seeds at `γ′ = 0`, times
/// [`CALIBRATION_MULTIPLE`]. The calibration stream is keyed by `seed`.
pub fn calibrate_threshold(beta: f64, n_seeds: usize, seed: u64, cfg: &ChaosConfig) -> Result<Calibration> {
    // the drive frequency is irrelevant without drive
    let p = ClassicalParams::new(beta, 0.0, 1.0)?;
    let ex = exponents(&sphere_samples(seed, n_seeds), &p, cfg)?;
    let max_exponent = ex.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Calibration {
        beta,
        n_seeds,
        max_exponent,
        multiple: CALIBRATION_MULTIPLE,
        threshold: CALIBRATION_MULTIPLE * max_exponent,
    })
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionCell {
    pub beta: f64,
    pub gamma: f64,
    pub freq: f64,
    pub threshold: f64,
    pub result: ChaoticFraction,
}

/// Chaotic fraction over the `betas × freqs` grid at fixed `gamma`, each
/// row using the threshold calibrated at its `β′`. Cells are ordered
/// row-major in `betas`. All cells share the seed stream `seed`.
pub fn fraction_grid(
    betas: &[f64],
    freqs: &[f64],
    gamma: f64,
    n_samples: usize,
    seed: u64,
    calibrations: &[Calibration],
    cfg: &ChaosConfig,
) -> Result<Vec<FractionCell>> {
    let seeds = sphere_samples(seed, n_samples);
    let tasks: Vec<(usize, usize, usize)> = (0..betas.len())
        .flat_map(|i| (0..freqs.len()).flat_map(move |j| (0..n_samples).map(move |k| (i, j, k))))
        .collect();
    let ex: Vec<f64> = tasks
        .par_iter()
        .map(|&(i, j, k)| {
            let p = ClassicalParams::new(betas[i], gamma, freqs[j])?;
            divergence_exponent(&seeds[k], &p, cfg).map(|(e, _)| e)
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::with_capacity(betas.len() * freqs.len());
    for (i, &beta) in betas.iter().enumerate() {
        let threshold = calibrations[i].threshold;
        for (j, &freq) in freqs.iter().enumerate() {
            let base = (i * freqs.len() + j) * n_samples;
            let n_chaotic = ex[base..base + n_samples].iter().filter(|&&e| e > threshold).count();
            cells.push(FractionCell {
                beta,
                gamma,
                freq,
                threshold,
                result: ChaoticFraction {
                    fraction: 100.0 * n_chaotic as f64 / n_samples.max(1) as f64,
                    n_chaotic,
                    n_samples,
                },
            });
        }
    }
    Ok(cells)
}
