use serde::{Deserialize, Serialize};

use super::lines::{SpectrumLine, INTENSITY_FLOOR};
use crate::spinops::SpinQuantumNumber;
use crate::{Error, Result};

const MIN_LINES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrupoleEstimate {
    /// Hz
    pub q: f64,
    /// Standard error of `q` from the spacing fit, Hz.
    pub uncertainty: f64,
    /// RMS residual of the line positions about the fitted ladder, Hz.
    pub residual: f64,
    pub n_lines: usize,
}

/// Quadrupole strength from the line ladder of a spectrum taken with `B0`
/// along `z′`: the `2I` strongest lines are sorted by frequency and fitted
/// to an equally spaced ladder, whose spacing is `2Q`.
pub fn estimate_quadrupole(lines: &[SpectrumLine], spin: SpinQuantumNumber) -> Result<QuadrupoleEstimate> {
    let mut strong: Vec<&SpectrumLine> = lines.iter().filter(|l| l.intensity >= INTENSITY_FLOOR).collect();
    strong.sort_by(|a, b| b.intensity.total_cmp(&a.intensity).then(a.frequency.total_cmp(&b.frequency)));
    strong.truncate(spin.two_i() as usize);
    let mut freqs: Vec<f64> = strong.iter().map(|l| l.frequency).collect();
    freqs.sort_by(f64::total_cmp);
    let scale = freqs.last().copied().unwrap_or(0.0).abs().max(1.0);
    freqs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    if freqs.len() < MIN_LINES {
        return Err(Error::InsufficientLines { found: freqs.len(), required: MIN_LINES });
    }

    let n = freqs.len() as f64;
    let jbar = (n - 1.0) / 2.0;
    let fbar = freqs.iter().sum::<f64>() / n;
    let sxx: f64 = (0..freqs.len()).map(|j| (j as f64 - jbar).powi(2)).sum();
    let sxy: f64 = freqs.iter().enumerate().map(|(j, f)| (j as f64 - jbar) * (f - fbar)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = freqs
        .iter()
        .enumerate()
        .map(|(j, f)| (f - fbar - slope * (j as f64 - jbar)).powi(2))
        .sum();
    let se = if freqs.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(QuadrupoleEstimate {
        q: slope.abs() / 2.0,
        uncertainty: se / 2.0,
        residual: (ssr / n).sqrt(),
        n_lines: freqs.len(),
    })
}
