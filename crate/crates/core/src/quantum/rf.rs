use std::f64::consts::PI;

use num_complex::Complex64;

use super::donor::{DonorSpec, Frame, QuadAxes, RfFields};
use super::hamiltonian::{quadrupole_term, zeeman_term};
use crate::spinops::{identity, rotated_operator_about_z, Operator, SpinOperators, SpinQuantumNumber};
use crate::{Error, Result};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rf_fields(spec: &DonorSpec) -> Result<RfFields> {
    spec.validate()?;
    spec.rf
        .ok_or_else(|| Error::InvalidParameter("spec has no rf fields".into()))
}

/// Scalar RF envelope
/// `s(t) = γnB1,I sin(2πf_RF t - φ) + γnB1,Q cos(2πft) cos(2πf_RF t - φ)`.
pub fn rf_envelope(spec: &DonorSpec, rf: &RfFields, t: f64) -> f64 {
    let carrier = 2.0 * PI * rf.f_rf * t - rf.phase;
    let modulation = (2.0 * PI * spec.drive_freq * t).cos();
    spec.gamma_n * (rf.b1_i * carrier.sin() + rf.b1_q * modulation * carrier.cos())
}

/// Lab-frame Hamiltonian under the IQ-modulated RF drive, applied along
/// `cosθ_qd x̂ + sinθ_qd ŷ`.
pub fn rf_lab_hamiltonian(spec: &DonorSpec, t: f64) -> Result<Operator> {
    let rf = rf_fields(spec)?;
    let ops = SpinOperators::new(spec.spin);
    let axis = [rf.theta_qd.cos(), rf.theta_qd.sin(), 0.0];
    Ok(zeeman_term(&ops, spec)
        + quadrupole_term(&ops, spec)
        + ops.along(axis) * re(rf_envelope(spec, &rf, t)))
}

/// Exact rotating-frame Hamiltonian `R(-ωt) H R(ωt) - f_RF Iz`, with
/// `R(φ) = exp(-iφIz)` and `ω = 2πf_RF`.
pub fn rotating_frame_hamiltonian(spec: &DonorSpec, t: f64) -> Result<Operator> {
    let rf = rf_fields(spec)?;
    let h = rf_lab_hamiltonian(spec, t)?;
    let ops = SpinOperators::new(spec.spin);
    Ok(rotated_operator_about_z(&h, 2.0 * PI * rf.f_rf * t) - &ops.iz * re(rf.f_rf))
}

fn require_canonical(spec: &DonorSpec) -> Result<()> {
    let z = spec.b0_dir.unit_vector();
    let canonical = QuadAxes::canonical();
    let close = |a: [f64; 3], b: [f64; 3]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
    if !close(z, [0.0, 0.0, 1.0]) || !close(spec.quad_axes.z, canonical.z) || spec.eta != 0.0 {
        return Err(Error::InvalidParameter(
            "rotating-frame reduction needs B0 ∥ z, z′ ∥ x and η = 0".into(),
        ));
    }
    Ok(())
}

/// Rotating-frame Hamiltonian assembled from the rotated-operator
/// identities; equal to [`rotating_frame_hamiltonian`] in the canonical
/// geometry (B0 ∥ z, z′ ∥ x, η = 0, no hyperfine shift).
pub fn rotating_frame_closed_form(spec: &DonorSpec, t: f64) -> Result<Operator> {
    let rf = rf_fields(spec)?;
    require_canonical(spec)?;
    let ops = SpinOperators::new(spec.spin);
    let w = 2.0 * PI * rf.f_rf * t;
    let delta = rf.theta_qd - rf.phase;
    let sigma = 2.0 * w - rf.phase - rf.theta_qd;
    let gi = spec.gamma_n * rf.b1_i;
    let gq = spec.gamma_n * rf.b1_q * (2.0 * PI * spec.drive_freq * t).cos();
    let q = spec.q;
    let zeeman = spec.larmor() + spec.manifold.sign() * spec.hyperfine_a / 2.0;

    let static_part = &ops.iz * re(zeeman - rf.f_rf)
        + &ops.ix * re(0.5 * gi * delta.sin() + 0.5 * gq * delta.cos())
        + &ops.iy * re(-0.5 * gi * delta.cos() + 0.5 * gq * delta.sin())
        - ops.iz2() * re(0.5 * q)
        + identity(spec.dim()) * re(0.5 * q * spec.spin.casimir());
    let fast = &ops.ix * re(0.5 * gi * sigma.sin() + 0.5 * gq * sigma.cos())
        + &ops.iy * re(0.5 * gi * sigma.cos() - 0.5 * gq * sigma.sin())
        - ops.ixy_anticommutator() * re(0.5 * q * (2.0 * w).sin())
        + (ops.ix2() - ops.iy2()) * re(0.5 * q * (2.0 * w).cos());
    Ok(static_part + fast)
}

/// Rotating-wave Hamiltonian of the IQ-driven donor:
/// `δ Iz + ½g_I(sinΔ Ix - cosΔ Iy) - ½Q Iz² + ½g_Q cos(2πft)(cosΔ Ix + sinΔ Iy)`
/// with detuning `δ`, `Δ = θ_qd - φ`, and the constant `½QI(I+1)` dropped.
/// For `Δ = 0` and `δ = 0` this is `-½g_I Iy - ½Q Iz² + ½g_Q cos(2πft) Ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct RwaHamiltonian {
    pub spin: SpinQuantumNumber,
    /// `γnB0 ± A/2 - f_RF`, Hz
    pub detuning: f64,
    /// `γnB1,I`, Hz
    pub g_i: f64,
    /// `γnB1,Q`, Hz
    pub g_q: f64,
    pub q: f64,
    /// Quadrupole–drive phase offset `θ_qd - φ`.
    pub delta: f64,
    /// Modulation frequency, Hz.
    pub freq: f64,
}

impl RwaHamiltonian {
    /// Effective linear coefficient `γnB1,I/2`.
    pub fn alpha_eff(&self) -> f64 {
        self.g_i / 2.0
    }

    /// Coefficient `Q/2` of the `-Iz²` term.
    pub fn beta_coeff(&self) -> f64 {
        self.q / 2.0
    }

    /// Effective drive amplitude `γnB1,Q/2`.
    pub fn drive_eff(&self) -> f64 {
        self.g_q / 2.0
    }

    pub fn static_part(&self) -> Operator {
        let ops = SpinOperators::new(self.spin);
        let (s, c) = self.delta.sin_cos();
        &ops.iz * re(self.detuning) + &ops.ix * re(0.5 * self.g_i * s) - &ops.iy * re(0.5 * self.g_i * c)
            - ops.iz2() * re(0.5 * self.q)
    }

    /// Operator multiplying `cos(2πft)`.
    pub fn drive_op(&self) -> Operator {
        let ops = SpinOperators::new(self.spin);
        let (s, c) = self.delta.sin_cos();
        (&ops.ix * re(c) + &ops.iy * re(s)) * re(0.5 * self.g_q)
    }

    pub fn at(&self, t: f64) -> Operator {
        self.static_part() + self.drive_op() * re((2.0 * PI * self.freq * t).cos())
    }
}

/// Rotating-wave reduction of an RF-frame spec.
pub fn rwa_reduce(spec: &DonorSpec) -> Result<(DonorSpec, RwaHamiltonian)> {
    let rf = rf_fields(spec)?;
    require_canonical(spec)?;
    let h = RwaHamiltonian {
        spin: spec.spin,
        detuning: spec.larmor() + spec.manifold.sign() * spec.hyperfine_a / 2.0 - rf.f_rf,
        g_i: spec.gamma_n * rf.b1_i,
        g_q: spec.gamma_n * rf.b1_q,
        q: spec.q,
        delta: rf.theta_qd - rf.phase,
        freq: spec.drive_freq,
    };
    let mut reduced = spec.clone();
    reduced.frame = Frame::Rwa;
    Ok((reduced, h))
}
