use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::spinops::{SpinQuantumNumber, SphereDirection};
use crate::{Error, Result};

const AXES_TOL: f64 = 1e-12;

/// Principal axes `(x′, y′, z′)` of the field-gradient tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadAxes {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub z: [f64; 3],
}

impl QuadAxes {
    pub fn new(x: [f64; 3], y: [f64; 3], z: [f64; 3]) -> Result<Self> {
        let axes = Self { x, y, z };
        axes.validate()?;
        Ok(axes)
    }

    /// `z′ ∥ x̂`, `x′ ∥ ŷ`, `y′ ∥ ẑ`, so that `Q Iz′²` is `Q Ix²`.
    pub fn canonical() -> Self {
        Self {
            x: [0.0, 1.0, 0.0],
            y: [0.0, 0.0, 1.0],
            z: [1.0, 0.0, 0.0],
        }
    }

    pub fn identity() -> Self {
        Self {
            x: [1.0, 0.0, 0.0],
            y: [0.0, 1.0, 0.0],
            z: [0.0, 0.0, 1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.x, self.y, self.z];
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| v[i][k] * v[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > AXES_TOL {
                    return Err(Error::InvalidParameter(
                        "quadrupole axes are not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Apply the rotation matrix `r` (row-major) to every axis.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Self {
        let apply = |v: [f64; 3]| {
            [
                r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
                r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
                r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
            ]
        };
        Self {
            x: apply(self.x),
            y: apply(self.y),
            z: apply(self.z),
        }
    }
}

/// Which Hamiltonian `hamiltonian()` builds for a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Rf,
    Rwa,
}

/// Electron spin manifold selecting the `±A/2` hyperfine shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElectronManifold {
    Up,
    Down,
}

impl ElectronManifold {
    pub fn sign(self) -> f64 {
        match self {
            Self::Up => 1.0,
            Self::Down => -1.0,
        }
    }
}

/// IQ-modulated RF drive. The in-phase amplitude drives at `f_rf`; the
/// quadrature amplitude is additionally modulated at the spec's
/// `drive_freq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfFields {
    /// T
    pub b1_i: f64,
    /// T
    pub b1_q: f64,
    /// Hz
    pub f_rf: f64,
    /// Angle of the RF field from x̂ in the xy-plane, radians.
    #[serde(default = "half_pi")]
    pub theta_qd: f64,
    /// RF carrier phase, radians.
    #[serde(default = "half_pi")]
    pub phase: f64,
}

fn half_pi() -> f64 {
    PI / 2.0
}

impl RfFields {
    pub fn new(b1_i: f64, b1_q: f64, f_rf: f64) -> Self {
        Self {
            b1_i,
            b1_q,
            f_rf,
            theta_qd: PI / 2.0,
            phase: PI / 2.0,
        }
    }
}

fn default_b1_dir() -> SphereDirection {
    SphereDirection::new(PI / 2.0, PI / 2.0).expect("y axis")
}

fn default_b0_dir() -> SphereDirection {
    SphereDirection::new(0.0, 0.0).expect("z axis")
}

/// Full physical parameter set of a single donor nucleus. Frequencies in
/// Hz, fields in T, gyromagnetic ratios in Hz/T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonorSpec {
    pub spin: SpinQuantumNumber,
    pub gamma_n: f64,
    /// Hyperfine constant; 0 for an ionized donor.
    #[serde(default)]
    pub hyperfine_a: f64,
    #[serde(default = "default_manifold")]
    pub manifold: ElectronManifold,
    pub b0: f64,
    #[serde(default = "default_b0_dir")]
    pub b0_dir: SphereDirection,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "QuadAxes::canonical")]
    pub quad_axes: QuadAxes,
    #[serde(default)]
    pub b1: f64,
    #[serde(default = "default_b1_dir")]
    pub b1_dir: SphereDirection,
    #[serde(default)]
    pub drive_freq: f64,
    #[serde(default)]
    pub drive_phase: f64,
    #[serde(default = "default_frame")]
    pub frame: Frame,
    #[serde(default)]
    pub rf: Option<RfFields>,
}

fn default_manifold() -> ElectronManifold {
    ElectronManifold::Up
}

fn default_frame() -> Frame {
    Frame::Lab
}

impl DonorSpec {
    /// Ionized donor in the canonical geometry: `B0 ∥ z`, `z′ ∥ x`, `B1 ∥ y`.
    pub fn canonical(spin: SpinQuantumNumber, gamma_n: f64, b0: f64, q: f64, b1: f64, drive_freq: f64) -> Self {
        Self {
            spin,
            gamma_n,
            hyperfine_a: 0.0,
            manifold: ElectronManifold::Up,
            b0,
            b0_dir: default_b0_dir(),
            q,
            eta: 0.0,
            quad_axes: QuadAxes::canonical(),
            b1,
            b1_dir: default_b1_dir(),
            drive_freq,
            drive_phase: 0.0,
            frame: Frame::Lab,
            rf: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn larmor(&self) -> f64 {
        self.gamma_n * self.b0
    }

    /// Drive period `1/f`, if driven.
    pub fn period(&self) -> Result<f64> {
        if self.drive_freq > 0.0 && self.drive_freq.is_finite() {
            Ok(1.0 / self.drive_freq)
        } else {
            Err(Error::InvalidParameter("drive frequency must be > 0".into()))
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quad_axes.validate()?;
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter(format!("eta = {} outside [0, 1]", self.eta)));
        }
        if self.b0 < 0.0 || self.b1 < 0.0 {
            return Err(Error::InvalidParameter("field amplitudes must be >= 0".into()));
        }
        if self.q != 0.0 && self.spin.two_i() < 2 {
            return Err(Error::NoQuadrupoleMoment);
        }
        let finite = [
            self.gamma_n,
            self.hyperfine_a,
            self.b0,
            self.q,
            self.b1,
            self.drive_freq,
            self.drive_phase,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite spec value".into()));
        }
        match (self.frame, &self.rf) {
            (Frame::Rf | Frame::Rwa, None) => Err(Error::InvalidParameter(
                "rf/rwa frame requires rf fields".into(),
            )),
            (_, Some(rf)) if rf.b1_i < 0.0 || rf.b1_q < 0.0 => Err(Error::InvalidParameter(
                "rf amplitudes must be >= 0".into(),
            )),
            _ => Ok(()),
        }
    }
}
