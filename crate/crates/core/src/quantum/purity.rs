use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::donor::DonorSpec;
use super::floquet::{floquet, FloquetOperator, FLOQUET_SEGMENTS};
use crate::spinops::{spin_coherent_state, SphereDirection};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluctuatedParameter {
    /// Quadrupole strength, Hz.
    Q,
    /// Static field, T.
    B0,
    /// Drive amplitude, T.
    B1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSpec {
    pub parameter: FluctuatedParameter,
    pub mean: f64,
    pub sigma: f64,
    pub n_levels: usize,
    pub n_sequences: usize,
    pub n_periods: usize,
    pub rng_seed: u64,
}

impl FluctuationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || self.n_levels < 1 || self.n_sequences < 1 {
            return Err(Error::InvalidParameter(
                "fluctuation needs sigma >= 0, n_levels >= 1, n_sequences >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Parameter values evenly spaced over `mean ± 3σ`.
    pub fn levels(&self) -> Vec<f64> {
        if self.n_levels == 1 {
            return vec![self.mean];
        }
        (0..self.n_levels)
            .map(|l| self.mean - 3.0 * self.sigma + 6.0 * self.sigma * l as f64 / (self.n_levels - 1) as f64)
            .collect()
    }

    /// Level index used by ensemble member `member` in every period: a
    /// standard normal draw, clipped to ±3, rounded to the nearest level.
    pub fn level_sequence(&self, member: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(member as u64);
        let top = (self.n_levels - 1) as f64;
        (0..self.n_periods)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                let z = z.clamp(-3.0, 3.0);
                ((z + 3.0) / 6.0 * top).round() as usize
            })
            .collect()
    }

    fn apply(&self, spec: &DonorSpec, value: f64) -> DonorSpec {
        let mut s = spec.clone();
        match self.parameter {
            FluctuatedParameter::Q => s.q = value,
            FluctuatedParameter::B0 => s.b0 = value,
            FluctuatedParameter::B1 => s.b1 = value,
        }
        s
    }
}

/// Cell-centred `θ × φ` grid; `θ_i = (i + ½)π/n_theta`, `φ_j = (j + ½)2π/n_phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self { n_theta: 48, n_phi: 96 }
    }
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major (θ outer) list of cell centres.
    pub fn directions(&self) -> Vec<SphereDirection> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_theta {
            let theta = (i as f64 + 0.5) * PI / self.n_theta as f64;
            for j in 0..self.n_phi {
                let phi = (j as f64 + 0.5) * 2.0 * PI / self.n_phi as f64;
                out.push(SphereDirection::new(theta, phi).expect("grid point in range"));
            }
        }
        out
    }

    /// Area weight `sin θ` per cell, same order as `directions`.
    pub fn weights(&self) -> Vec<f64> {
        self.directions().iter().map(|d| d.theta().sin()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityMap {
    pub grid: SphereGrid,
    pub directions: Vec<SphereDirection>,
    pub purity: Vec<f64>,
}

impl PurityMap {
    /// `sin θ`-weighted mean over the cells selected by `mask`.
    pub fn weighted_mean(&self, mask: &[bool]) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((d, p), &m) in self.directions.iter().zip(&self.purity).zip(mask) {
            if m {
                let w = d.theta().sin();
                num += w * p;
                den += w;
            }
        }
        (den > 0.0).then(|| num / den)
    }
}

/// Ensemble members processed together; bounds memory for large grids.
const MEMBER_CHUNK: usize = 16;

/// Purity of every grid coherent state after `n_periods` of evolution with
/// the fluctuated parameter redrawn once per period. All grid states of one
/// ensemble member share the same random operator sequence.
pub fn purity_map(spec: &DonorSpec, fluct: &FluctuationSpec, grid: SphereGrid) -> Result<PurityMap> {
    fluct.validate()?;
    let levels = fluct.levels();
    let operators: Vec<FloquetOperator> = levels
        .par_iter()
        .map(|&v| floquet(&fluct.apply(spec, v), FLOQUET_SEGMENTS))
        .collect::<Result<_>>()?;
    let matrices: Vec<&DMatrix<Complex64>> = operators.iter().map(|f| &f.matrix).collect();

    let directions = grid.directions();
    let d = spec.dim();
    let g = directions.len();
    let mut psi0 = DMatrix::<Complex64>::zeros(d, g);
    for (c, dir) in directions.iter().enumerate() {
        psi0.set_column(c, spin_coherent_state(spec.spin, dir).as_vector());
    }

    // ρ for every grid point, stored as g blocks of d×d
    let mut rho = vec![Complex64::new(0.0, 0.0); g * d * d];
    let members: Vec<usize> = (0..fluct.n_sequences).collect();
    for chunk in members.chunks(MEMBER_CHUNK) {
        let finals: Vec<DMatrix<Complex64>> = chunk
            .par_iter()
            .map(|&m| {
                let mut psi = psi0.clone();
                for l in fluct.level_sequence(m) {
                    psi = matrices[l] * &psi;
                }
                psi
            })
            .collect();
        for psi in &finals {
            for c in 0..g {
                let col = psi.column(c);
                let block = &mut rho[c * d * d..(c + 1) * d * d];
                for i in 0..d {
                    for j in 0..d {
                        block[i * d + j] += col[i] * col[j].conj();
                    }
                }
            }
        }
    }
    let norm = 1.0 / fluct.n_sequences as f64;
    let purity = (0..g)
        .map(|c| {
            rho[c * d * d..(c + 1) * d * d]
                .iter()
                .map(|z| (z * norm).norm_sqr())
                .sum::<f64>()
        })
        .collect();
    Ok(PurityMap { grid, directions, purity })
}
