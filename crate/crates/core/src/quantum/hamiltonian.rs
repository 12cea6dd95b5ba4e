use std::f64::consts::PI;

use num_complex::Complex64;

use super::donor::{DonorSpec, Frame};
use super::rf::{rf_lab_hamiltonian, rwa_reduce};
use crate::spinops::{Operator, SpinOperators};
use crate::Result;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `Q(Iz′² + (η/3)(Ix′² - Iy′²))`. The constant `-QI(I+1)/3` is omitted so
/// that the axial zero-field levels are exactly `Qm²`.
pub fn quadrupole_term(ops: &SpinOperators, spec: &DonorSpec) -> Operator {
    let ax = &spec.quad_axes;
    let ix = ops.along(ax.x);
    let iy = ops.along(ax.y);
    let iz = ops.along(ax.z);
    (&iz * &iz + (&ix * &ix - &iy * &iy) * re(spec.eta / 3.0)) * re(spec.q)
}

/// `(γnB0 ± A/2)(n̂0·I)`; the hyperfine shift uses the spec's electron manifold.
pub fn zeeman_term(ops: &SpinOperators, spec: &DonorSpec) -> Operator {
    let coeff = spec.larmor() + spec.manifold.sign() * spec.hyperfine_a / 2.0;
    ops.along(spec.b0_dir.unit_vector()) * re(coeff)
}

/// Time-independent part and unit-amplitude drive operator of the lab
/// Hamiltonian, `H(t) = static + cos(2πft + phase)·drive`.
#[derive(Debug, Clone)]
pub struct LabParts {
    pub static_part: Operator,
    pub drive: Operator,
    pub freq: f64,
    pub phase: f64,
}

impl LabParts {
    pub fn new(spec: &DonorSpec) -> Result<Self> {
        spec.validate()?;
        let ops = SpinOperators::new(spec.spin);
        let static_part = zeeman_term(&ops, spec) + quadrupole_term(&ops, spec);
        let drive = ops.along(spec.b1_dir.unit_vector()) * re(spec.gamma_n * spec.b1);
        Ok(Self {
            static_part,
            drive,
            freq: spec.drive_freq,
            phase: spec.drive_phase,
        })
    }

    pub fn at(&self, t: f64) -> Operator {
        &self.static_part + &self.drive * re((2.0 * PI * self.freq * t + self.phase).cos())
    }
}

/// Lab-frame Hamiltonian in Hz:
/// `(γnB0 ± A/2)(n̂0·I) + Q(Iz′² + (η/3)(Ix′² - Iy′²)) + γnB1 cos(2πft + phase)(n̂1·I)`.
pub fn build_hamiltonian(spec: &DonorSpec, t: f64) -> Result<Operator> {
    Ok(LabParts::new(spec)?.at(t))
}

/// Hamiltonian in the frame selected by `spec.frame`.
pub fn hamiltonian(spec: &DonorSpec, t: f64) -> Result<Operator> {
    match spec.frame {
        Frame::Lab => build_hamiltonian(spec, t),
        Frame::Rf => rf_lab_hamiltonian(spec, t),
        Frame::Rwa => Ok(rwa_reduce(spec)?.1.at(t)),
    }
}
