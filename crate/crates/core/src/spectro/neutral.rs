use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lines::{ladder_normalization, probe_axis, SpectrumLine};
use crate::quantum::{quadrupole_term, DonorSpec};
use crate::spinops::{hermitian_eigensystem, identity, Operator, SpinOperators, SpinQuantumNumber};
use crate::{Error, Result};

/// Electron gyromagnetic ratio of a silicon donor (g ≈ 1.9985), Hz/T.
pub const ELECTRON_GYROMAGNETIC_RATIO: f64 = 27.97e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutralSpectrum {
    /// Electron-flip lines, one per nuclear projection.
    pub esr: Vec<SpectrumLine>,
    /// Nuclear-flip lines with the electron along `B0`.
    pub nmr_up: Vec<SpectrumLine>,
    /// Nuclear-flip lines with the electron against `B0`.
    pub nmr_down: Vec<SpectrumLine>,
    /// Largest level shift between the full `A S·I` and the effective
    /// `A Sz Iz` Hamiltonians, Hz.
    pub max_deviation: f64,
}

struct Coupled {
    s: [Operator; 3],
    i: [Operator; 3],
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Coupled {
    fn new(spin: SpinQuantumNumber) -> Self {
        let half = SpinOperators::new(SpinQuantumNumber::new(1).expect("spin 1/2"));
        let nuc = SpinOperators::new(spin);
        let (one_e, one_n) = (identity(2), identity(spin.dim()));
        let s = [&half.ix, &half.iy, &half.iz].map(|a| a.kronecker(&one_n));
        let i = [&nuc.ix, &nuc.iy, &nuc.iz].map(|a| one_e.kronecker(a));
        Self { s, i }
    }

    fn along(ops: &[Operator; 3], n: [f64; 3]) -> Operator {
        &ops[0] * re(n[0]) + &ops[1] * re(n[1]) + &ops[2] * re(n[2])
    }
}

/// Full and effective Hamiltonians of the neutral donor,
/// `γeB0(n̂0·S) - γnB0(n̂0·I) + A S·I + H_Q` and the same with `A S·I`
/// replaced by `A (n̂0·S)(n̂0·I)`.
pub fn neutral_hamiltonians(spec: &DonorSpec, gamma_e: f64) -> Result<(Operator, Operator)> {
    spec.validate()?;
    let c = Coupled::new(spec.spin);
    let n0 = spec.b0_dir.unit_vector();
    let sn = Coupled::along(&c.s, n0);
    let inn = Coupled::along(&c.i, n0);
    let hq = identity(2).kronecker(&quadrupole_term(&SpinOperators::new(spec.spin), spec));
    let base = &sn * re(gamma_e * spec.b0) - &inn * re(spec.gamma_n * spec.b0) + hq;
    let dot = &c.s[0] * &c.i[0] + &c.s[1] * &c.i[1] + &c.s[2] * &c.i[2];
    let full = &base + dot * re(spec.hyperfine_a);
    let effective = base + &sn * &inn * re(spec.hyperfine_a);
    Ok((full, effective))
}

/// ESR and per-manifold NMR lines of a neutral donor from the full
/// Hamiltonian, with probe intensities normalized as in the ionized case
/// (`|⟨↑|S⊥|↓⟩|² = 1/4` for the electron).
pub fn neutral_donor_spectrum(spec: &DonorSpec, gamma_e: f64, floor: f64) -> Result<NeutralSpectrum> {
    if spec.hyperfine_a < 0.0 {
        return Err(Error::InvalidParameter("hyperfine constant must be >= 0".into()));
    }
    let (full, effective) = neutral_hamiltonians(spec, gamma_e)?;
    let eig = hermitian_eigensystem(&full)?;
    let eff = hermitian_eigensystem(&effective)?;
    let max_deviation = eig
        .values
        .iter()
        .zip(eff.values.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let c = Coupled::new(spec.spin);
    let n0 = spec.b0_dir.unit_vector();
    let probe = probe_axis(spec);
    let v = &eig.vectors;
    let sz = v.adjoint() * Coupled::along(&c.s, n0) * v;
    let ps = v.adjoint() * Coupled::along(&c.s, probe) * v;
    let pi = v.adjoint() * Coupled::along(&c.i, probe) * v;
    let nmr_norm = ladder_normalization(spec.spin);

    let n = eig.dim();
    let tol = 1e-9 * (eig.values[n - 1] - eig.values[0]).abs().max(1.0);
    let (mut esr, mut nmr_up, mut nmr_down) = (Vec::new(), Vec::new(), Vec::new());
    for lo in 0..n {
        for hi in lo + 1..n {
            let frequency = eig.values[hi] - eig.values[lo];
            if frequency <= tol {
                continue;
            }
            let (s_lo, s_hi) = (sz[(lo, lo)].re, sz[(hi, hi)].re);
            if (s_hi - s_lo).abs() > 0.5 {
                let intensity = (ps[(hi, lo)].norm_sqr() / 0.25).min(1.0);
                if intensity >= floor {
                    esr.push(SpectrumLine { frequency, intensity, level_pair: (lo, hi) });
                }
            } else {
                let intensity = (pi[(hi, lo)].norm_sqr() / nmr_norm).min(1.0);
                if intensity >= floor {
                    let line = SpectrumLine { frequency, intensity, level_pair: (lo, hi) };
                    if s_lo + s_hi > 0.0 {
                        nmr_up.push(line);
                    } else {
                        nmr_down.push(line);
                    }
                }
            }
        }
    }
    for set in [&mut esr, &mut nmr_up, &mut nmr_down] {
        set.sort_by(|a, b| a.frequency.total_cmp(&b.frequency).then(a.level_pair.cmp(&b.level_pair)));
    }
    Ok(NeutralSpectrum { esr, nmr_up, nmr_down, max_deviation })
}
