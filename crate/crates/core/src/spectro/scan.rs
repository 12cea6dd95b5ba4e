use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lines::{nmr_spectrum, SpectrumLine};
use crate::quantum::DonorSpec;
use crate::spinops::SphereDirection;
use crate::{Error, Result};

/// Spectra at a list of static-field magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldScan {
    /// T
    pub b0_values: Vec<f64>,
    pub spectra: Vec<Vec<SpectrumLine>>,
}

pub fn scan_field_magnitude(spec: &DonorSpec, b0_values: &[f64]) -> Result<FieldScan> {
    let spectra = b0_values
        .par_iter()
        .map(|&b0| {
            let mut s = spec.clone();
            s.b0 = b0;
            nmr_spectrum(&s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldScan { b0_values: b0_values.to_vec(), spectra })
}

/// Plane swept by `B0`: the field points along `cos χ·start + sin χ·end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationPlane {
    pub start: [f64; 3],
    pub end: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl RotationPlane {
    pub fn new(start: [f64; 3], end: [f64; 3]) -> Result<Self> {
        let ok = (dot(start, start) - 1.0).abs() < 1e-12
            && (dot(end, end) - 1.0).abs() < 1e-12
            && dot(start, end).abs() < 1e-12;
        if !ok {
            return Err(Error::InvalidParameter(
                "rotation plane needs two orthonormal vectors".into(),
            ));
        }
        Ok(Self { start, end })
    }

    pub fn direction(&self, chi: f64) -> [f64; 3] {
        let (s, c) = chi.sin_cos();
        [
            c * self.start[0] + s * self.end[0],
            c * self.start[1] + s * self.end[1],
            c * self.start[2] + s * self.end[2],
        ]
    }

    /// Rotation axis `start × end`.
    pub fn normal(&self) -> [f64; 3] {
        let (a, b) = (self.start, self.end);
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationScan {
    pub plane: RotationPlane,
    /// Radians, strictly increasing.
    pub angles: Vec<f64>,
    pub spectra: Vec<Vec<SpectrumLine>>,
}

/// Spectra while `B0` rotates in `plane`. The probe field is taken along the
/// plane normal so that it stays transverse to `B0` at every angle.
pub fn scan_field_orientation(spec: &DonorSpec, plane: RotationPlane, angles: &[f64]) -> Result<OrientationScan> {
    if angles.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("scan angles must be strictly increasing".into()));
    }
    let probe = SphereDirection::from_vector(plane.normal())?;
    let spectra = angles
        .par_iter()
        .map(|&chi| {
            let mut s = spec.clone();
            s.b0_dir = SphereDirection::from_vector(plane.direction(chi))?;
            s.b1_dir = probe;
            nmr_spectrum(&s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrientationScan { plane, angles: angles.to_vec(), spectra })
}

/// Highest minus lowest frequency among lines with intensity of at least
/// `min_intensity`; 0 for fewer than two such lines.
pub fn line_spread(lines: &[SpectrumLine], min_intensity: f64) -> f64 {
    let strong: Vec<f64> = lines
        .iter()
        .filter(|l| l.intensity >= min_intensity)
        .map(|l| l.frequency)
        .collect();
    let lo = strong.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = strong.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if strong.len() < 2 {
        0.0
    } else {
        hi - lo
    }
}

/// Branch label for every line of every scan step. Lines are matched to the
/// previous step's lines by nearest frequency, ties broken by intensity
/// difference; unmatched lines open new branches.
pub fn continue_branches(spectra: &[Vec<SpectrumLine>]) -> Vec<Vec<usize>> {
    let mut labels: Vec<Vec<usize>> = Vec::with_capacity(spectra.len());
    let mut next = 0usize;
    for (step, lines) in spectra.iter().enumerate() {
        let mut assigned = vec![usize::MAX; lines.len()];
        if step > 0 {
            let prev = &spectra[step - 1];
            let prev_labels = &labels[step - 1];
            let mut pairs: Vec<(f64, f64, usize, usize)> = Vec::with_capacity(lines.len() * prev.len());
            for (i, l) in lines.iter().enumerate() {
                for (j, p) in prev.iter().enumerate() {
                    pairs.push((
                        (l.frequency - p.frequency).abs(),
                        (l.intensity - p.intensity).abs(),
                        i,
                        j,
                    ));
                }
            }
            pairs.sort_by(|a, b| {
                a.0.total_cmp(&b.0)
                    .then(a.1.total_cmp(&b.1))
                    .then(a.2.cmp(&b.2))
                    .then(a.3.cmp(&b.3))
            });
            let mut used = vec![false; prev.len()];
            for (_, _, i, j) in pairs {
                if assigned[i] == usize::MAX && !used[j] {
                    assigned[i] = prev_labels[j];
                    used[j] = true;
                }
            }
        }
        for a in assigned.iter_mut().filter(|a| **a == usize::MAX) {
            *a = next;
            next += 1;
        }
        labels.push(assigned);
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(f: f64, i: f64) -> SpectrumLine {
        SpectrumLine { frequency: f, intensity: i, level_pair: (0, 1) }
    }

    #[test]
    fn branches_follow_nearest_frequency() {
        let spectra = vec![
            vec![line(1.0, 1.0), line(2.0, 0.5)],
            vec![line(1.1, 1.0), line(1.9, 0.5), line(5.0, 0.1)],
            vec![line(1.95, 0.5)],
        ];
        let b = continue_branches(&spectra);
        assert_eq!(b[0], vec![0, 1]);
        assert_eq!(b[1], vec![0, 1, 2]);
        assert_eq!(b[2], vec![1]);
    }

    #[test]
    fn rejects_non_orthonormal_plane() {
        assert!(RotationPlane::new([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]).is_err());
        assert!(RotationPlane::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).is_ok());
    }
}
