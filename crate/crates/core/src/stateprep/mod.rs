//! Reverse-time pulse compiler for pure-state preparation and a
//! time-dependent simulator to verify the compiled sequences.
//!
//! The compiler works in the eigenbasis of the static Hamiltonian. Starting
//! from the target, it repeatedly empties the highest populated eigenstate
//! into the lower eigenstate it couples to most strongly, using the ideal
//! resonant two-level rotation. Reversing the list gives a sequence that
//! prepares the target from the ground state.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quantum::{DonorSpec, LabParts};
use crate::spinops::{hermitian_eigensystem, unitary_exp, Eigensystem, Operator, SpinOperators, StateVector};
use crate::{Error, Result};

/// Populations below this are treated as empty.
pub const POPULATION_FLOOR: f64 = 1e-12;
/// A pulse whose transition lies within this many inverse π-pulse durations
/// of another driven transition is flagged in the report. Closer than one
/// inverse π-pulse duration is an error.
pub const ADDRESSABILITY_FACTOR: f64 = 10.0;
/// Drive matrix elements below this fraction of the largest one count as
/// forbidden transitions.
const COUPLING_FLOOR: f64 = 1e-6;
/// Minimum simulation segments per period of the fastest pulse frequency.
pub const SEGMENTS_PER_PERIOD: usize = 200;
/// Total sequence duration bound, s.
pub const MAX_SEQUENCE_DURATION: f64 = 1e-3;

const NORM_TOL: f64 = 1e-9;

/// One resonant pulse `γn·amplitude·cos(2πf s + phase)(n̂1·I)`, with `s`
/// measured from the start of the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    /// Hz
    pub frequency: f64,
    /// s
    pub duration: f64,
    /// rad
    pub phase: f64,
    /// T
    pub amplitude: f64,
    /// `(upper, lower)` eigenstate indices, ascending-energy order.
    pub level_pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub pulses: Vec<Pulse>,
    pub spec: DonorSpec,
    pub target: StateVector,
}

impl PulseSequence {
    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    /// `|⟨ψ|target⟩|` of the ideal two-level model run forward.
    pub predicted_fidelity: f64,
    /// Eigenstate populations before the first pulse and after every pulse
    /// of the ideal forward run.
    pub populations: Vec<Vec<f64>>,
    /// Ideal fidelity with the target after every pulse.
    pub intermediate_fidelity: Vec<f64>,
    /// Indices of pulses with another driven transition closer than
    /// [`ADDRESSABILITY_FACTOR`] spectral widths.
    pub crowded_pulses: Vec<usize>,
}

/// `|⟨psi|target⟩|`.
pub fn fidelity(psi: &StateVector, target: &StateVector) -> Result<f64> {
    if psi.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), got: psi.dim() });
    }
    Ok(psi.overlap(target).min(1.0))
}

struct Model {
    eig: Eigensystem,
    /// Drive operator `n̂1·I` in the eigenbasis.
    coupling: Operator,
    gamma_n: f64,
}

impl Model {
    fn new(spec: &DonorSpec) -> Result<Self> {
        let parts = LabParts::new(spec)?;
        let eig = hermitian_eigensystem(&parts.static_part)?;
        let v = SpinOperators::new(spec.spin).along(spec.b1_dir.unit_vector());
        let coupling = eig.vectors.adjoint() * v * &eig.vectors;
        Ok(Self { eig, coupling, gamma_n: spec.gamma_n })
    }

    /// `(upper, lower)` pairs with a non-negligible drive matrix element.
    fn driven_pairs(&self) -> Vec<(usize, usize)> {
        let d = self.eig.dim();
        let max = self.coupling.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut pairs = Vec::new();
        for a in 0..d {
            for b in 0..a {
                if self.coupling[(a, b)].norm() > COUPLING_FLOOR * max {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    fn frequency(&self, upper: usize, lower: usize) -> f64 {
        self.eig.values[upper] - self.eig.values[lower]
    }

    /// Rabi frequency `γn·b1·|⟨e_k|n̂1·I|e_k′⟩|`, Hz.
    fn rabi(&self, upper: usize, lower: usize, b1: f64) -> f64 {
        self.gamma_n * b1 * self.coupling[(upper, lower)].norm()
    }

    /// Ideal resonant rotation of interaction-picture amplitudes `c` by a
    /// pulse with absolute-time phase `phase` and rotation angle `angle`
    /// (`angle = π·rabi·duration`).
    fn rotate(&self, c: &mut DVector<Complex64>, upper: usize, lower: usize, phase: f64, angle: f64) {
        let mu = self.coupling[(upper, lower)].arg();
        let w = Complex64::from_polar(1.0, mu - phase);
        let (s, co) = angle.sin_cos();
        let i = Complex64::i();
        let (cu, cl) = (c[upper], c[lower]);
        c[upper] = cu * co - i * w * cl * s;
        c[lower] = cl * co - i * w.conj() * cu * s;
    }
}

fn populated(c: &DVector<Complex64>) -> Option<usize> {
    (1..c.len()).rev().find(|&k| c[k].norm_sqr() > POPULATION_FLOOR)
}

/// Compile a pulse sequence preparing `target` from the ground state of the
/// static Hamiltonian, using drive amplitude `b1` for every pulse.
pub fn compile(target: &StateVector, spec: &DonorSpec, b1: f64) -> Result<(PulseSequence, CompileReport)> {
    if target.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: target.dim() });
    }
    if !(b1 > 0.0) || !b1.is_finite() {
        return Err(Error::InvalidParameter("pulse amplitude must be > 0".into()));
    }
    let model = Model::new(spec)?;
    let d = spec.dim();
    let levels = &model.eig.values;
    let scale = (levels[d - 1] - levels[0]).abs().max(1.0);

    // interaction-picture amplitudes, referenced to the end of the sequence
    let mut c = model.eig.vectors.adjoint() * target.as_vector();
    // (upper, lower, absolute phase, angle, duration), in reverse order
    let mut steps: Vec<(usize, usize, f64, f64, f64)> = Vec::new();
    let mut crowded_steps: Vec<bool> = Vec::new();
    while let Some(k) = populated(&c) {
        let lower = (0..k)
            .max_by(|&a, &b| {
                model.coupling[(k, a)]
                    .norm()
                    .total_cmp(&model.coupling[(k, b)].norm())
                    .then(b.cmp(&a))
            })
            .expect("k >= 1");
        let rabi = model.rabi(k, lower, b1);
        if rabi <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eigenstate {k} has no drive coupling to any lower eigenstate"
            )));
        }
        let f = model.frequency(k, lower);
        if f <= 1e-12 * scale {
            return Err(Error::AddressabilityViolated { f1: f, f2: 0.0, min_separation: 2.0 * rabi });
        }
        // spectral width of the pulse is ~1/t_π = 2·rabi
        let width = 2.0 * rabi;
        let mut crowded = false;
        for (a, b) in model.driven_pairs() {
            if (a, b) == (k, lower) {
                continue;
            }
            let other = model.frequency(a, b);
            let sep = (other - f).abs();
            if sep < width {
                return Err(Error::AddressabilityViolated { f1: f, f2: other, min_separation: width });
            }
            crowded |= sep < ADDRESSABILITY_FACTOR * width;
        }
        let (ak, al) = (c[k], c[lower]);
        let angle = ak.norm().atan2(al.norm());
        let duration = angle / (PI * rabi);
        let mu = model.coupling[(k, lower)].arg();
        // choose the phase that empties `k` when the rotation is undone
        let phase = mu + al.arg() - ak.arg() - PI / 2.0;
        model.rotate(&mut c, k, lower, phase, -angle);
        c[k] = Complex64::new(0.0, 0.0);
        steps.push((k, lower, phase, angle, duration));
        crowded_steps.push(crowded);
        if steps.len() >= d {
            return Err(Error::InvalidParameter("compiler did not terminate".into()));
        }
    }

    let total: f64 = steps.iter().map(|s| s.4).sum();
    if total >= MAX_SEQUENCE_DURATION {
        return Err(Error::InvalidParameter(format!(
            "sequence duration {total:.3e} s exceeds {MAX_SEQUENCE_DURATION:e} s"
        )));
    }
    steps.reverse();
    crowded_steps.reverse();
    let crowded_pulses = (0..crowded_steps.len()).filter(|&i| crowded_steps[i]).collect();
    let pulses: Vec<Pulse> = steps
        .iter()
        .map(|&(k, lower, phase, _, duration)| {
            let f = model.frequency(k, lower);
            // absolute time t = s - total
            let shifted = phase - 2.0 * PI * ((f * total) % 1.0);
            Pulse {
                frequency: f,
                duration,
                phase: shifted.rem_euclid(2.0 * PI),
                amplitude: b1,
                level_pair: (k, lower),
            }
        })
        .collect();

    // ideal forward run from the ground state
    let target_c = model.eig.vectors.adjoint() * target.as_vector();
    let mut fwd = DVector::<Complex64>::zeros(d);
    fwd[0] = Complex64::new(1.0, 0.0);
    let pops = |v: &DVector<Complex64>| v.iter().map(|z| z.norm_sqr()).collect::<Vec<f64>>();
    let mut populations = vec![pops(&fwd)];
    let mut intermediate_fidelity = Vec::with_capacity(steps.len());
    for &(k, lower, phase, angle, _) in &steps {
        model.rotate(&mut fwd, k, lower, phase, angle);
        populations.push(pops(&fwd));
        intermediate_fidelity.push(target_c.dotc(&fwd).norm().min(1.0));
    }
    let predicted_fidelity = target_c.dotc(&fwd).norm().min(1.0);
    Ok((
        PulseSequence { pulses, spec: spec.clone(), target: target.clone() },
        CompileReport { predicted_fidelity, populations, intermediate_fidelity, crowded_pulses },
    ))
}

/// Propagate `psi0` through `seq` under the full time-dependent Hamiltonian
/// (static part plus the active pulse, no rotating-wave approximation).
///
/// Each segment is a Strang splitting `e^{-iπH0Δ} e^{-i2π c(t)VΔ} e^{-iπH0Δ}`
/// with `c(t)` sampled at the segment midpoint and at least
/// [`SEGMENTS_PER_PERIOD`] segments per period of the fastest pulse.
pub fn simulate(seq: &PulseSequence, spec: &DonorSpec, psi0: &StateVector) -> Result<StateVector> {
    if psi0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: psi0.dim() });
    }
    let parts = LabParts::new(spec)?;
    let v_op = SpinOperators::new(spec.spin).along(spec.b1_dir.unit_vector());
    let v_eig = hermitian_eigensystem(&v_op)?;
    let fastest = seq.pulses.iter().map(|p| p.frequency.abs()).fold(0.0, f64::max);
    let dt_max = if fastest > 0.0 { 1.0 / (fastest * SEGMENTS_PER_PERIOD as f64) } else { f64::INFINITY };

    let mut psi = psi0.as_vector().clone();
    let mut start = 0.0;
    for p in &seq.pulses {
        if !(p.duration > 0.0) {
            return Err(Error::InvalidParameter("pulse duration must be > 0".into()));
        }
        let n = (p.duration / dt_max).ceil().max(1.0) as usize;
        let dt = p.duration / n as f64;
        if !(dt > 0.0) || start + dt == start {
            return Err(Error::Integration { t: start, reason: "segment length underflow".into() });
        }
        let half = unitary_exp(&parts.static_part, dt / 2.0)?;
        let full = &half * &half;
        let vt = v_eig.vectors.adjoint();
        let g = spec.gamma_n * p.amplitude;
        let kick = |psi: &DVector<Complex64>, t: f64| {
            let c = g * (2.0 * PI * p.frequency * t + p.phase).cos();
            let mut y = &vt * psi;
            for (j, lambda) in v_eig.values.iter().enumerate() {
                y[j] *= Complex64::from_polar(1.0, -2.0 * PI * c * lambda * dt);
            }
            &v_eig.vectors * y
        };
        psi = &half * psi;
        for j in 0..n {
            psi = kick(&psi, start + (j as f64 + 0.5) * dt);
            psi = if j + 1 < n { &full * psi } else { &half * psi };
        }
        start += p.duration;
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Integration { t: start, reason: format!("norm drifted to {norm}") });
    }
    StateVector::normalized(psi)
}

/// Ground state of the static Hamiltonian.
pub fn ground_state(spec: &DonorSpec) -> Result<StateVector> {
    let eig = hermitian_eigensystem(&LabParts::new(spec)?.static_part)?;
    StateVector::normalized(eig.column(0))
}

/// Compile, then simulate the sequence forward from the ground state.
/// Returns the sequence, the compile report and the simulated fidelity.
pub fn compile_and_verify(target: &StateVector, spec: &DonorSpec, b1: f64) -> Result<(PulseSequence, CompileReport, f64)> {
    let (seq, report) = compile(target, spec, b1)?;
    let psi = simulate(&seq, spec, &ground_state(spec)?)?;
    let f = fidelity(&psi, target)?;
    Ok((seq, report, f))
}
