use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::donor::{DonorSpec, Frame};
use super::evolve::OverlapTrace;
use super::hamiltonian::LabParts;
use super::rf::rwa_reduce;
use crate::spinops::{unitarity_deviation, unitary_exp, Operator, StateVector};
use crate::{Error, Result};

/// Default number of segments per period.
pub const FLOQUET_SEGMENTS: usize = 1000;

const UNITARY_TOL: f64 = 1e-8;

/// One-period propagator `U(τ, 0)`.
#[derive(Debug, Clone)]
pub struct FloquetOperator {
    pub matrix: Operator,
    pub period: f64,
    pub n_segments: usize,
}

impl FloquetOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `F ≈ ∏_{k=1}^{N} exp(-i2π H((N-k+½)τ/N) τ/N)`, with the `k = 1` factor
/// leftmost (latest time acts last). Each segment samples `H` at its
/// midpoint.
pub fn floquet_with<F>(h: F, period: f64, n_segments: usize) -> Result<FloquetOperator>
where
    F: Fn(f64) -> Operator,
{
    if n_segments < 1 {
        return Err(Error::InvalidParameter("n_segments must be >= 1".into()));
    }
    if !(period > 0.0) {
        return Err(Error::InvalidParameter("period must be > 0".into()));
    }
    let dt = period / n_segments as f64;
    // build right to left: earliest segment first
    let mut f = unitary_exp(&h(0.5 * dt), dt)?;
    for j in 1..n_segments {
        f = unitary_exp(&h((j as f64 + 0.5) * dt), dt)? * f;
    }
    Ok(FloquetOperator { matrix: f, period, n_segments })
}

/// Floquet operator of a lab- or RWA-frame spec over one drive period.
pub fn floquet(spec: &DonorSpec, n_segments: usize) -> Result<FloquetOperator> {
    let period = spec.period()?;
    match spec.frame {
        Frame::Lab => {
            let parts = LabParts::new(spec)?;
            floquet_with(|t| parts.at(t), period, n_segments)
        }
        Frame::Rwa => {
            let (_, h) = rwa_reduce(spec)?;
            let (s, d) = (h.static_part(), h.drive_op());
            floquet_with(
                |t| &s + &d * Complex64::new((2.0 * PI * h.freq * t).cos(), 0.0),
                period,
                n_segments,
            )
        }
        Frame::Rf => Err(Error::InvalidParameter(
            "the RF-frame Hamiltonian is not periodic in the drive period; use the rwa frame".into(),
        )),
    }
}

/// Quasienergies (Hz, ascending, in `(-1/2τ, 1/2τ]`) and eigenstates of `F`.
#[derive(Debug, Clone)]
pub struct FloquetEigensystem {
    pub quasienergies: DVector<f64>,
    pub eigenstates: Operator,
    pub period: f64,
}

impl FloquetEigensystem {
    /// `exp(-i2π ε_i τ)`.
    pub fn eigenvalue(&self, i: usize) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * PI * self.quasienergies[i] * self.period)
    }

    /// `|⟨Φ_i|ψ⟩|²` for each eigenstate.
    pub fn weights(&self, psi: &StateVector) -> Vec<f64> {
        let c = self.eigenstates.adjoint() * psi.as_vector();
        c.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `Σ_i |Φ_i⟩ e^{-i2π ε_i N τ} ⟨Φ_i|ψ⟩`.
    pub fn evolve(&self, psi: &StateVector, n_periods: u64) -> DVector<Complex64> {
        let c = self.eigenstates.adjoint() * psi.as_vector();
        let phased = DVector::from_iterator(
            c.len(),
            c.iter().enumerate().map(|(i, z)| {
                let phase = -2.0 * PI * ((self.quasienergies[i] * self.period * n_periods as f64) % 1.0);
                z * Complex64::from_polar(1.0, phase)
            }),
        );
        &self.eigenstates * phased
    }

    /// Minimal distance between two quasienergies on the zone circle.
    pub fn splitting(&self, a: usize, b: usize) -> f64 {
        circular_distance(self.quasienergies[a], self.quasienergies[b], 1.0 / self.period)
    }
}

pub(crate) fn circular_distance(a: f64, b: f64, zone: f64) -> f64 {
    let d = (a - b).abs() % zone;
    d.min(zone - d)
}

/// Fold `x` into `(-zone/2, zone/2]`.
pub(crate) fn fold(x: f64, zone: f64) -> f64 {
    let mut y = x - zone * (x / zone).round();
    if y <= -zone / 2.0 {
        y += zone;
    }
    if y > zone / 2.0 {
        y -= zone;
    }
    y
}

pub fn floquet_eigensystem(f: &FloquetOperator) -> Result<FloquetEigensystem> {
    let dev = unitarity_deviation(&f.matrix);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let n = f.dim();
    let schur = f.matrix.clone().schur();
    let (q, t) = schur.unpack();
    let zone = 1.0 / f.period;
    let mut pairs: Vec<(f64, DVector<Complex64>)> = (0..n)
        .map(|i| {
            let lambda = t[(i, i)];
            let eps = fold(-lambda.arg() / (2.0 * PI * f.period), zone);
            let mut v = q.column(i).into_owned();
            if let Some(lead) = v.iter().find(|z| z.norm() > 1e-10).copied() {
                v *= Complex64::from_polar(1.0, -lead.arg());
            }
            (eps, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let quasienergies = DVector::from_iterator(n, pairs.iter().map(|p| p.0));
    let mut eigenstates = DMatrix::zeros(n, n);
    for (i, (_, v)) in pairs.iter().enumerate() {
        eigenstates.set_column(i, v);
    }
    Ok(FloquetEigensystem { quasienergies, eigenstates, period: f.period })
}

/// `F^n |ψ0⟩` by repeated application (no renormalization).
pub fn evolve(f: &FloquetOperator, psi0: &StateVector, n_periods: usize) -> Result<DVector<Complex64>> {
    if psi0.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: psi0.dim() });
    }
    let mut v = psi0.as_vector().clone();
    for _ in 0..n_periods {
        v = &f.matrix * v;
    }
    Ok(v)
}

/// `|⟨ψ0|F^k ψ0⟩|` for `k = 0..=n_periods`.
pub fn overlap_trace(f: &FloquetOperator, psi0: &StateVector, n_periods: usize) -> Result<OverlapTrace> {
    if psi0.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: psi0.dim() });
    }
    let v0 = psi0.as_vector();
    let mut v = v0.clone();
    let mut times = Vec::with_capacity(n_periods + 1);
    let mut amplitude = Vec::with_capacity(n_periods + 1);
    for k in 0..=n_periods {
        if k > 0 {
            v = &f.matrix * v;
        }
        times.push(k as f64 * f.period);
        amplitude.push(v0.dotc(&v).norm());
    }
    Ok(OverlapTrace { times, amplitude })
}
