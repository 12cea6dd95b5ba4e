use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coherent::{spin_coherent_state, SphereDirection};
use super::linalg::{hermitian_eigensystem, is_hermitian, Operator};
use super::spin::SpinQuantumNumber;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

/// Normalized pure state. Serializes as a list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector(DVector<Complex64>);

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("empty state vector".into()));
        }
        Self::new(DVector::from_iterator(
            pairs.len(),
            pairs.iter().map(|p| Complex64::new(p[0], p[1])),
        ))
    }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(s: StateVector) -> Self {
        s.0.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl StateVector {
    /// Accepts `amps` only if already normalized within 1e-12.
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(Self(amps))
    }

    pub fn normalized(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero state".into()));
        }
        Ok(Self(amps / Complex64::new(norm, 0.0)))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<Complex64> {
        self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    pub fn expectation(&self, op: &Operator) -> f64 {
        self.0.dotc(&(op * &self.0)).re
    }

    /// `U|self⟩`, renormalized to absorb rounding.
    pub fn evolved(&self, u: &Operator) -> Self {
        let v = u * &self.0;
        let n = v.norm();
        Self(v / Complex64::new(n, 0.0))
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DMatrix<Complex64>);

impl DensityMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !is_hermitian(&m) {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix trace {trace}")));
        }
        let eig = hermitian_eigensystem(&m)?;
        if eig.values.min() < -TRACE_TOL {
            return Err(Error::InvalidParameter("density matrix is not positive".into()));
        }
        Ok(Self(m))
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self(psi.as_vector() * psi.as_vector().adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    /// Average of pure states with equal weight.
    pub fn mixture(states: &[StateVector]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let d = first.dim();
        let mut acc = DMatrix::zeros(d, d);
        for s in states {
            if s.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
            }
            acc += s.as_vector() * s.as_vector().adjoint();
        }
        Ok(Self(acc / Complex64::new(states.len() as f64, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }
}

/// `Tr(ρ²)`, evaluated as the squared Frobenius norm of a Hermitian ρ.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.0.iter().map(|z| z.norm_sqr()).sum()
}

/// `Q(θ,φ) = (1/π)⟨θ,φ|ρ|θ,φ⟩`.
pub fn husimi_q(rho: &DensityMatrix, dir: &SphereDirection) -> f64 {
    let spin = SpinQuantumNumber::from_dim(rho.dim()).expect("density matrix dimension >= 2");
    let c = spin_coherent_state(spin, dir);
    c.as_vector().dotc(&(&rho.0 * c.as_vector())).re / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purity_examples() {
        let s = SpinQuantumNumber::new(7).unwrap();
        let psi = spin_coherent_state(s, &SphereDirection::new(1.0, 2.0).unwrap());
        assert!((purity(&DensityMatrix::from_pure(&psi)) - 1.0).abs() < 1e-14);
        assert!((purity(&DensityMatrix::maximally_mixed(8)) - 0.125).abs() < 1e-15);
        let mix = DensityMatrix::mixture(&[StateVector::basis(8, 0), StateVector::basis(8, 3)]).unwrap();
        assert!((purity(&mix) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn husimi_peak_and_antipode() {
        let s = SpinQuantumNumber::new(7).unwrap();
        let dir = SphereDirection::new(0.9, 4.0).unwrap();
        let rho = DensityMatrix::from_pure(&spin_coherent_state(s, &dir));
        assert!((husimi_q(&rho, &dir) - 1.0 / PI).abs() < 1e-12);
        assert!(husimi_q(&rho, &dir.antipode()).abs() < 1e-12);
    }

    #[test]
    fn density_validation() {
        let bad = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0)) * Complex64::new(3.0, 0.0);
        assert!(DensityMatrix::new(bad).is_err());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(4).0).is_ok());
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn state_norm_check() {
        let v = DVector::from_element(2, Complex64::new(1.0, 0.0));
        assert!(StateVector::new(v.clone()).is_err());
        assert!((StateVector::normalized(v).unwrap().as_vector().norm() - 1.0).abs() < 1e-15);
    }
}
