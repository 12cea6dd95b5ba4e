use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex square matrix. All Hamiltonians are in Hz.
pub type Operator = DMatrix<Complex64>;

/// Relative tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn zeros(dim: usize) -> Operator {
    DMatrix::zeros(dim, dim)
}

pub fn identity(dim: usize) -> Operator {
    DMatrix::identity(dim, dim)
}

pub fn dagger(a: &Operator) -> Operator {
    a.adjoint()
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    a * b + b * a
}

pub fn frobenius_norm(a: &Operator) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise deviation `|a_ij - conj(a_ji)|`.
pub fn hermiticity_deviation(a: &Operator) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Hermitian within `HERMITIAN_TOL` relative to the largest entry (or
/// absolutely, for matrices with entries below one).
pub fn is_hermitian(a: &Operator) -> bool {
    a.is_square() && hermiticity_deviation(a) <= HERMITIAN_TOL * max_abs(a).max(1.0)
}

fn max_abs(a: &Operator) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of `U†U - 1`; an upper bound on the operator-norm deviation.
pub fn unitarity_deviation(u: &Operator) -> f64 {
    let n = u.nrows();
    frobenius_norm(&(u.adjoint() * u - identity(n)))
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; each eigenvector column has its first
/// component of magnitude above 1e-10 made real and positive.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: DVector<f64>,
    pub vectors: Operator,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i 2π H t)` for the decomposed `H` (Hz) and time `t` (s).
    pub fn propagator(&self, t: f64) -> Operator {
        let phases = self
            .values
            .map(|lambda| Complex64::from_polar(1.0, -2.0 * PI * lambda * t));
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.vectors[(i, j)] * phases[j]
        });
        scaled * self.vectors.adjoint()
    }

    pub fn column(&self, k: usize) -> DVector<Complex64> {
        self.vectors.column(k).into_owned()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> Operator {
        let n = self.dim();
        let scaled = DMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eigensystem(m: &Operator) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if !is_hermitian(m) {
        return Err(Error::NotHermitian {
            deviation: hermiticity_deviation(m),
        });
    }
    let n = m.nrows();
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).into_owned();
        v /= Complex64::new(v.norm(), 0.0);
        if let Some(lead) = v.iter().find(|z| z.norm() > 1e-10).copied() {
            let phase = Complex64::from_polar(1.0, -lead.arg());
            v *= phase;
        }
        vectors.set_column(col, &v);
    }
    Ok(Eigensystem { values, vectors })
}

/// `exp(-i 2π H t)` with `H` in Hz and `t` in seconds.
pub fn unitary_exp(h: &Operator, t: f64) -> Result<Operator> {
    Ok(hermitian_eigensystem(h)?.propagator(t))
}
