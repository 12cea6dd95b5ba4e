use crate::spinops::SpinQuantumNumber;
use crate::{Error, Result};

/// Elementary charge, C (exact SI).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant, J s (exact SI).
pub const PLANCK: f64 = 6.626_070_15e-34;

fn denominator(spin: SpinQuantumNumber) -> Result<f64> {
    if spin.two_i() < 2 {
        return Err(Error::NoQuadrupoleMoment);
    }
    let i = spin.value();
    Ok(4.0 * i * (2.0 * i - 1.0) * PLANCK)
}

/// `Q = 3(1 - γs) e Qn Vzz / (4I(2I - 1)h)` in Hz, with `Qn` in m² and
/// `Vzz` in V/m².
pub fn quadrupole_strength(qn: f64, vzz: f64, gamma_s: f64, spin: SpinQuantumNumber) -> Result<f64> {
    Ok(3.0 * (1.0 - gamma_s) * ELEMENTARY_CHARGE * qn * vzz / denominator(spin)?)
}

/// Field gradient `Vzz` (V/m²) that yields quadrupole strength `q` (Hz).
pub fn vzz_for_strength(q: f64, qn: f64, gamma_s: f64, spin: SpinQuantumNumber) -> Result<f64> {
    let scale = 3.0 * (1.0 - gamma_s) * ELEMENTARY_CHARGE * qn;
    if scale == 0.0 {
        return Err(Error::InvalidParameter("Qn(1 - γs) is zero; Vzz is undetermined".into()));
    }
    Ok(q * denominator(spin)? / scale)
}
