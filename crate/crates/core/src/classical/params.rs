use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::spinops::SpinQuantumNumber;
use crate::{Error, Result};

/// Driven-top coefficients in units where the linear (precession) term is 1.
///
/// Time is measured as `s = αt`, so free precession has period 2π and the
/// drive enters as `cos(freq·s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalParams {
    pub beta: f64,
    pub gamma: f64,
    pub freq: f64,
}

impl ClassicalParams {
    pub fn new(beta: f64, gamma: f64, freq: f64) -> Result<Self> {
        if !(freq > 0.0) || !freq.is_finite() {
            return Err(Error::InvalidParameter(format!("drive frequency {freq} must be > 0")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("drive strength {gamma} must be >= 0")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter("beta must be finite".into()));
        }
        Ok(Self { beta, gamma, freq })
    }

    /// Drive period in `s` units.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.freq
    }
}

/// Classical top with dimensionful coefficients: `H = αLz + βLx² + γcos(2πft)Ly`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalTop {
    /// rad/s
    pub alpha: f64,
    /// `β|L|`, rad/s
    pub beta_l: f64,
    /// rad/s
    pub gamma: f64,
    /// Hz
    pub f: f64,
}

impl PhysicalTop {
    pub fn to_dimensionless(&self) -> Result<ClassicalParams> {
        if self.alpha == 0.0 {
            return Err(Error::InvalidParameter("linear coefficient alpha is zero".into()));
        }
        ClassicalParams::new(
            self.beta_l / self.alpha,
            self.gamma / self.alpha,
            2.0 * PI * self.f / self.alpha,
        )
    }
}

/// Ionized-donor parameters of `H = γnB0 Iz + Q Ix² + γnB1 cos(2πft) Iy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumTop {
    pub spin: SpinQuantumNumber,
    /// Hz/T
    pub gamma_n: f64,
    /// T
    pub b0: f64,
    /// Hz
    pub q: f64,
    /// T
    pub b1: f64,
    /// Hz
    pub f: f64,
}

/// `(Q′, B1′, f′)`, with `t′ = γnB0·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumDimensionless {
    pub q_prime: f64,
    pub b1_prime: f64,
    pub f_prime: f64,
}

impl QuantumTop {
    pub fn larmor(&self) -> f64 {
        self.gamma_n * self.b0
    }

    pub fn to_dimensionless(&self) -> Result<QuantumDimensionless> {
        let larmor = self.larmor();
        if larmor == 0.0 {
            return Err(Error::InvalidParameter("gamma_n * B0 is zero".into()));
        }
        Ok(QuantumDimensionless {
            q_prime: self.q * self.spin.value() / larmor,
            b1_prime: self.b1 / self.b0,
            f_prime: self.f / larmor,
        })
    }

    /// `t′ = γnB0·t`.
    pub fn dimensionless_time(&self, t: f64) -> f64 {
        self.larmor() * t
    }

    /// Classical top with the same dynamics in the large-`I` limit:
    /// `α = 2πγnB0`, `β|L| = 2πQI`, `γ = 2πγnB1`.
    pub fn classical_equivalent(&self) -> Result<ClassicalParams> {
        PhysicalTop {
            alpha: 2.0 * PI * self.larmor(),
            beta_l: 2.0 * PI * self.q * self.spin.value(),
            gamma: 2.0 * PI * self.gamma_n * self.b1,
            f: self.f,
        }
        .to_dimensionless()
    }
}
