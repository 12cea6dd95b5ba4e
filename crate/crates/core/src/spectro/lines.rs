use serde::{Deserialize, Serialize};

use crate::quantum::{DonorSpec, LabParts};
use crate::spinops::{hermitian_eigensystem, Eigensystem, Operator, SpinOperators, SpinQuantumNumber};
use crate::Result;

/// Default intensity below which a transition counts as forbidden.
pub const INTENSITY_FLOOR: f64 = 1e-4;

/// Level pairs closer than this fraction of the spectral width are treated
/// as degenerate and produce no line.
const DEGENERATE_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    /// Hz
    pub frequency: f64,
    /// Squared probe matrix element relative to the strongest bare-ladder
    /// element, clipped to 1.
    pub intensity: f64,
    /// `(lower, upper)` level indices in ascending-energy order.
    pub level_pair: (usize, usize),
}

/// `max_m |⟨m+1|Iy|m⟩|²`.
pub fn ladder_normalization(spin: SpinQuantumNumber) -> f64 {
    let i = spin.value();
    spin.m_values()
        .iter()
        .filter(|&&m| m < i)
        .map(|&m| (i * (i + 1.0) - m * (m + 1.0)) / 4.0)
        .fold(0.0, f64::max)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Probe axis: the drive direction with its component along `B0` removed.
/// Falls back to a fixed perpendicular when the drive is parallel to `B0`.
pub fn probe_axis(spec: &DonorSpec) -> [f64; 3] {
    let n0 = spec.b0_dir.unit_vector();
    let n1 = spec.b1_dir.unit_vector();
    let dot = n0[0] * n1[0] + n0[1] * n1[1] + n0[2] * n1[2];
    let perp = [n1[0] - dot * n0[0], n1[1] - dot * n0[1], n1[2] - dot * n0[2]];
    let len = (perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]).sqrt();
    if len > 1e-6 {
        return [perp[0] / len, perp[1] / len, perp[2] / len];
    }
    let helper = if n0[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    normalize(cross(n0, helper))
}

/// Static (undriven) Hamiltonian of the spec, Hz.
pub fn static_hamiltonian(spec: &DonorSpec) -> Result<Operator> {
    Ok(LabParts::new(spec)?.static_part)
}

pub(crate) fn transitions(eig: &Eigensystem, probe: &Operator, norm: f64, floor: f64) -> Vec<SpectrumLine> {
    let n = eig.dim();
    let width = eig.values[n - 1] - eig.values[0];
    let tol = DEGENERATE_REL * width.abs().max(1.0);
    let p = eig.vectors.adjoint() * probe * &eig.vectors;
    let mut lines = Vec::new();
    for lo in 0..n {
        for hi in lo + 1..n {
            let frequency = eig.values[hi] - eig.values[lo];
            if frequency <= tol {
                continue;
            }
            let intensity = (p[(hi, lo)].norm_sqr() / norm).min(1.0);
            if intensity >= floor {
                lines.push(SpectrumLine { frequency, intensity, level_pair: (lo, hi) });
            }
        }
    }
    lines.sort_by(|a, b| a.frequency.total_cmp(&b.frequency).then(a.level_pair.cmp(&b.level_pair)));
    lines
}

/// NMR lines of the static Hamiltonian with the default intensity floor.
pub fn nmr_spectrum(spec: &DonorSpec) -> Result<Vec<SpectrumLine>> {
    nmr_spectrum_with_floor(spec, INTENSITY_FLOOR)
}

/// Every level pair whose normalized probe intensity is at least `floor`.
/// The drive is ignored; the probe is the spin component along
/// [`probe_axis`].
pub fn nmr_spectrum_with_floor(spec: &DonorSpec, floor: f64) -> Result<Vec<SpectrumLine>> {
    let eig = hermitian_eigensystem(&static_hamiltonian(spec)?)?;
    let ops = SpinOperators::new(spec.spin);
    let probe = ops.along(probe_axis(spec));
    Ok(transitions(&eig, &probe, ladder_normalization(spec.spin), floor))
}
