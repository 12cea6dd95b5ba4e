use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::linalg::{unitary_exp, Operator};
use super::spin::{SpinOperators, SpinQuantumNumber};
use super::state::StateVector;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Deserialize)]
struct RawDirection {
    theta: f64,
    phi: f64,
}

impl TryFrom<RawDirection> for SphereDirection {
    type Error = Error;
    fn try_from(r: RawDirection) -> Result<Self> {
        Self::new(r.theta, r.phi)
    }
}

/// Point on the unit sphere; `theta` in `[0, π]`, `phi` in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDirection")]
pub struct SphereDirection {
    theta: f64,
    phi: f64,
}

impl SphereDirection {
    /// `phi` is wrapped into `[0, 2π)`; `theta` outside `[0, π]` is an error.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "direction (theta={theta}, phi={phi}) out of range"
            )));
        }
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    /// Direction of a nonzero 3-vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero direction vector".into()));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        Self::new(theta, v[1].atan2(v[0]))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn antipode(&self) -> Self {
        Self::new(PI - self.theta, self.phi + PI).expect("antipode stays in range")
    }

    /// Great-circle angle to `other`, in `[0, π]`.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        cn.atan2(dot)
    }
}

/// Rotation carrying `|I,I⟩` onto the coherent state at `dir`:
/// `exp(-iθ(Iy cosφ - Ix sinφ))`.
///
/// The axis `(-sinφ, cosφ, 0)` is the one consistent with the explicit
/// binomial expansion in [`spin_coherent_state`].
pub fn rotation_operator(spin: SpinQuantumNumber, dir: &SphereDirection) -> Operator {
    let s = SpinOperators::new(spin);
    let (sp, cp) = dir.phi.sin_cos();
    let generator = s.along([-sp, cp, 0.0]) * Complex64::new(dir.theta / (2.0 * PI), 0.0);
    unitary_exp(&generator, 1.0).expect("rotation generator is Hermitian")
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

/// `Σ_m C(2I, I+m)^{1/2} e^{iφ(I-m)} cos^{I+m}(θ/2) sin^{I-m}(θ/2) |m⟩`.
pub fn spin_coherent_state(spin: SpinQuantumNumber, dir: &SphereDirection) -> StateVector {
    let n = spin.two_i();
    let (s, c) = (dir.theta / 2.0).sin_cos();
    let amps = DVector::from_iterator(
        spin.dim(),
        (0..=n).map(|k| {
            // k = I - m
            let mag = binomial(n, k).sqrt() * c.powi((n - k) as i32) * s.powi(k as i32);
            Complex64::from_polar(mag, dir.phi * f64::from(k))
        }),
    );
    StateVector::normalized(amps).expect("coherent state is nonzero")
}

/// `|⟨a|b⟩|² = cos^{4I}(Θ/2)` for coherent states separated by angle Θ.
pub fn coherent_overlap_law(spin: SpinQuantumNumber, a: &SphereDirection, b: &SphereDirection) -> f64 {
    (a.angle_to(b) / 2.0).cos().powi(2 * spin.two_i() as i32)
}

/// `R(-φ) A R(φ)` with `R(φ) = exp(-iφ Iz)`, evaluated entrywise in the
/// `Iz` eigenbasis.
pub fn rotated_operator_about_z(a: &Operator, phi: f64) -> Operator {
    let d = a.nrows();
    let top = (d as f64 - 1.0) / 2.0;
    Operator::from_fn(d, d, |j, k| {
        let mj = top - j as f64;
        let mk = top - k as f64;
        a[(j, k)] * Complex64::from_polar(1.0, phi * (mj - mk))
    })
}
