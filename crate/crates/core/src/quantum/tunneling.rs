use rustfft::{num_complex::Complex as FftComplex, FftPlanner};
use serde::{Deserialize, Serialize};

use super::donor::DonorSpec;
use super::floquet::{floquet, floquet_eigensystem, FloquetOperator, FLOQUET_SEGMENTS};
use crate::spinops::StateVector;
use crate::{Error, Result};

/// Minimum combined weight of the two dominant Floquet components.
pub const TWO_COMPONENT_WEIGHT: f64 = 0.8;
const FFT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelingEstimate {
    /// Quasienergy splitting of the two dominant components, Hz.
    pub frequency: f64,
    /// Weights of the two dominant components.
    pub weights: [f64; 2],
    /// Indices of the two dominant components (ascending quasienergy order).
    pub components: [usize; 2],
    /// Peak of the spectrum of `|⟨ψ(0)|ψ(t)⟩|²`, Hz.
    pub fft_frequency: f64,
    /// FFT resolution, Hz.
    pub fft_bin_width: f64,
    /// Number of drive periods between FFT samples.
    pub fft_stride: usize,
}

/// Dominant-pair quasienergy splitting of `psi0`, cross-checked against the
/// peak of the return-probability spectrum.
pub fn tunneling_frequency(spec: &DonorSpec, psi0: &StateVector) -> Result<TunnelingEstimate> {
    let f = floquet(spec, FLOQUET_SEGMENTS)?;
    tunneling_from_floquet(&f, psi0)
}

pub fn tunneling_from_floquet(f: &FloquetOperator, psi0: &StateVector) -> Result<TunnelingEstimate> {
    if psi0.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: psi0.dim() });
    }
    let eig = floquet_eigensystem(f)?;
    let w = eig.weights(psi0);
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let (a, b) = (order[0], order[1]);
    let total = w[a] + w[b];
    if total < TWO_COMPONENT_WEIGHT {
        return Err(Error::NotTwoComponent { weight: total, required: TWO_COMPONENT_WEIGHT });
    }
    let frequency = eig.splitting(a, b);
    let components = if a < b { [a, b] } else { [b, a] };

    // sample at least 16 points per expected tunneling cycle
    let tau = f.period;
    let stride = if frequency > 0.0 {
        ((1.0 / (16.0 * frequency * tau)).floor() as usize).max(1)
    } else {
        1
    };
    let dt = stride as f64 * tau;
    let mut samples = Vec::with_capacity(FFT_SAMPLES);
    for k in 0..FFT_SAMPLES {
        let v = eig.evolve(psi0, (k * stride) as u64);
        samples.push(psi0.as_vector().dotc(&v).norm_sqr());
    }
    let mean = samples.iter().sum::<f64>() / FFT_SAMPLES as f64;
    let mut buf: Vec<FftComplex<f64>> = samples.iter().map(|s| FftComplex::new(s - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(FFT_SAMPLES).process(&mut buf);
    let peak = (1..FFT_SAMPLES / 2)
        .max_by(|&i, &j| buf[i].norm().total_cmp(&buf[j].norm()).then(j.cmp(&i)))
        .unwrap_or(0);
    let bin = 1.0 / (FFT_SAMPLES as f64 * dt);
    Ok(TunnelingEstimate {
        frequency,
        weights: [w[components[0]], w[components[1]]],
        components,
        fft_frequency: peak as f64 * bin,
        fft_bin_width: bin,
        fft_stride: stride,
    })
}
