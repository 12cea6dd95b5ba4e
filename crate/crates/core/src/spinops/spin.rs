use nalgebra::DMatrix;
use num_complex::Complex64;

use super::linalg::{anticommutator, Operator};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Spin quantum number stored as `2I` so half-integers stay exact.
/// Serializes as the integer `2I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct SpinQuantumNumber {
    two_i: u32,
}

impl SpinQuantumNumber {
    pub fn new(two_i: i64) -> Result<Self> {
        if !(1..=31).contains(&two_i) {
            return Err(Error::InvalidSpin(two_i));
        }
        Ok(Self { two_i: two_i as u32 })
    }

    /// Spin whose Hilbert space has dimension `dim`.
    pub fn from_dim(dim: usize) -> Result<Self> {
        Self::new(dim as i64 - 1)
    }

    pub fn two_i(self) -> u32 {
        self.two_i
    }

    pub fn dim(self) -> usize {
        self.two_i as usize + 1
    }

    pub fn value(self) -> f64 {
        f64::from(self.two_i) / 2.0
    }

    /// `I(I+1)`.
    pub fn casimir(self) -> f64 {
        let i = self.value();
        i * (i + 1.0)
    }

    pub fn is_half_integer(self) -> bool {
        self.two_i % 2 == 1
    }

    /// Magnetic quantum numbers in basis order, `I, I-1, ..., -I`.
    pub fn m_values(self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.value() - k as f64).collect()
    }
}

impl TryFrom<i64> for SpinQuantumNumber {
    type Error = Error;
    fn try_from(two_i: i64) -> Result<Self> {
        Self::new(two_i)
    }
}

impl From<SpinQuantumNumber> for i64 {
    fn from(s: SpinQuantumNumber) -> i64 {
        i64::from(s.two_i)
    }
}

impl std::fmt::Display for SpinQuantumNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.two_i)
        } else {
            write!(f, "{}", self.two_i / 2)
        }
    }
}

/// Dimensionless `(Ix, Iy, Iz)` in the descending-`m` basis.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub spin: SpinQuantumNumber,
    pub ix: Operator,
    pub iy: Operator,
    pub iz: Operator,
}

impl SpinOperators {
    pub fn new(spin: SpinQuantumNumber) -> Self {
        let d = spin.dim();
        let two_i = i64::from(spin.two_i);
        // <m+1|I+|m> = sqrt(I(I+1) - m(m+1)); in doubled units this is
        // sqrt((2I)(2I+2) - (2m)(2m+2)) / 2, with 2m = 2I - 2k.
        let mut raise = DMatrix::<Complex64>::zeros(d, d);
        for k in 1..d {
            let two_m = two_i - 2 * k as i64;
            let radicand = two_i * (two_i + 2) - two_m * (two_m + 2);
            raise[(k - 1, k)] = Complex64::new((radicand as f64).sqrt() / 2.0, 0.0);
        }
        let lower = raise.adjoint();
        let ix = (&raise + &lower) * Complex64::new(0.5, 0.0);
        let iy = (&raise - &lower) * Complex64::new(0.0, -0.5);
        let iz = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(f64::from(spin.two_i) / 2.0 - r as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { spin, ix, iy, iz }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// `n·I` for a real 3-vector `n` (not normalized here).
    pub fn along(&self, n: [f64; 3]) -> Operator {
        &self.ix * Complex64::new(n[0], 0.0)
            + &self.iy * Complex64::new(n[1], 0.0)
            + &self.iz * Complex64::new(n[2], 0.0)
    }

    pub fn raising(&self) -> Operator {
        &self.ix + &self.iy * Complex64::new(0.0, 1.0)
    }

    pub fn lowering(&self) -> Operator {
        &self.ix - &self.iy * Complex64::new(0.0, 1.0)
    }

    pub fn ix2(&self) -> Operator {
        &self.ix * &self.ix
    }

    pub fn iy2(&self) -> Operator {
        &self.iy * &self.iy
    }

    pub fn iz2(&self) -> Operator {
        &self.iz * &self.iz
    }

    /// `{Ix, Iy}`.
    pub fn ixy_anticommutator(&self) -> Operator {
        anticommutator(&self.ix, &self.iy)
    }

    pub fn casimir(&self) -> Operator {
        self.ix2() + self.iy2() + self.iz2()
    }
}
