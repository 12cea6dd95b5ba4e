use super::params::ClassicalParams;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Unit angular-momentum direction `L/|L|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularMomentumState {
    l: [f64; 3],
}

impl AngularMomentumState {
    pub fn new(l: [f64; 3]) -> Result<Self> {
        let n = norm(&l);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("|l| = {n}, expected 1")));
        }
        Ok(Self { l })
    }

    pub fn normalized(l: [f64; 3]) -> Result<Self> {
        let n = norm(&l);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("zero angular momentum".into()));
        }
        Ok(Self { l: [l[0] / n, l[1] / n, l[2] / n] })
    }

    /// Point on the sphere at polar angle `theta`, azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { l: [st * cp, st * sp, ct] }
    }

    pub fn vector(&self) -> [f64; 3] {
        self.l
    }

    pub fn theta(&self) -> f64 {
        self.l[2].clamp(-1.0, 1.0).acos()
    }

    /// Azimuth in `[0, 2π)`.
    pub fn phi(&self) -> f64 {
        let p = self.l[1].atan2(self.l[0]).rem_euclid(2.0 * std::f64::consts::PI);
        if p >= 2.0 * std::f64::consts::PI {
            0.0
        } else {
            p
        }
    }
}

pub(crate) fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `dl/ds = {l, h}` for `h = lz + β′lx² + γ′cos(f′s)ly`, using
/// `{li, lj} = εijk lk`.
pub fn eom_raw(l: &[f64; 3], p: &ClassicalParams, s: f64) -> [f64; 3] {
    let drive = p.gamma * (p.freq * s).cos();
    [
        -l[1] + drive * l[2],
        l[0] - 2.0 * p.beta * l[0] * l[2],
        2.0 * p.beta * l[0] * l[1] - drive * l[0],
    ]
}

pub fn eom(state: &AngularMomentumState, p: &ClassicalParams, s: f64) -> [f64; 3] {
    eom_raw(&state.l, p, s)
}
