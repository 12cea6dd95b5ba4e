use std::f64::consts::PI;

use clap::Args;
use driventop_core::quantum::DonorSpec;
use driventop_core::spectro::{
    continue_branches, neutral_donor_spectrum, nmr_spectrum_with_floor, scan_field_orientation, RotationPlane,
    SpectrumLine, ELECTRON_GYROMAGNETIC_RATIO, INTENSITY_FLOOR,
};
use driventop_core::donors::donor_preset;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{direction, nucleus};
use crate::config::{linear_range, one_or_many, resolve, Common};
use crate::output::{Cell, Run, Table};
use crate::{with_pool, CliError};

fn line_row(lead: Vec<Cell>, kind: &str, l: &SpectrumLine) -> Vec<Cell> {
    let mut row = lead;
    row.extend([
        kind.into(),
        l.frequency.into(),
        l.intensity.into(),
        l.level_pair.0.into(),
        l.level_pair.1.into(),
    ]);
    row
}

// ------------------------------------------------------------------ spectrum

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct SpectrumFlags {
    #[arg(long)]
    pub donor: Option<String>,
    #[arg(long)]
    pub two_i: Option<i64>,
    #[arg(long)]
    pub gamma_n: Option<f64>,
    /// One or more static fields, T.
    #[arg(long, value_delimiter = ',')]
    pub b0: Option<Vec<f64>>,
    /// Linear field grid LO,HI,N (replaces --b0).
    #[arg(long, value_delimiter = ',')]
    pub b0_linear_range: Option<Vec<f64>>,
    /// Hz
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Polar angle of B0 in the lab frame.
    #[arg(long)]
    pub b0_theta: Option<f64>,
    #[arg(long)]
    pub b0_phi: Option<f64>,
    /// Neutral donor: ESR lines plus NMR lines of both electron manifolds.
    #[arg(long)]
    pub neutral: Option<bool>,
    /// Hyperfine constant override, Hz.
    #[arg(long)]
    pub hyperfine_a: Option<f64>,
    /// Lines weaker than this relative intensity are dropped.
    #[arg(long)]
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumParams {
    pub donor: String,
    pub two_i: Option<i64>,
    pub gamma_n: Option<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub b0: Vec<f64>,
    pub b0_linear_range: Option<[f64; 3]>,
    pub q: f64,
    pub eta: f64,
    pub b0_theta: f64,
    pub b0_phi: f64,
    pub neutral: bool,
    pub hyperfine_a: Option<f64>,
    pub floor: f64,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self {
            donor: "Sb123".into(),
            two_i: None,
            gamma_n: None,
            b0: vec![1.4],
            b0_linear_range: None,
            q: 0.8e6,
            eta: 0.0,
            // Along x′ = ŷ, orthogonal to the quadrupole axis.
            b0_theta: PI / 2.0,
            b0_phi: PI / 2.0,
            neutral: false,
            hyperfine_a: None,
            floor: INTENSITY_FLOOR,
        }
    }
}

pub fn run_spectrum(common: &Common, flags: &SpectrumFlags) -> Result<(), CliError> {
    const NAME: &str = "spectrum";
    let r = resolve::<SpectrumParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let fields = match &p.b0_linear_range {
        Some(range) => linear_range(range, "b0")?,
        None => p.b0.clone(),
    };
    if fields.is_empty() {
        return Err(CliError::Config("spectrum needs at least one b0".into()));
    }
    if !(0.0..1.0).contains(&p.floor) {
        return Err(CliError::Config(format!("floor {} must lie in [0, 1)", p.floor)));
    }
    let (spin, gamma_n) = nucleus(&p.donor, p.two_i, p.gamma_n)?;
    let hyperfine = match (p.neutral, p.hyperfine_a) {
        (false, _) => 0.0,
        (true, Some(a)) => a,
        (true, None) => donor_preset(&p.donor)?.hyperfine_a,
    };
    let b0_dir = direction(p.b0_theta, p.b0_phi)?;
    let specs = fields
        .iter()
        .map(|&b0| {
            let mut s = DonorSpec::canonical(spin, gamma_n, b0, p.q, 0.0, 0.0);
            s.eta = p.eta;
            s.b0_dir = b0_dir;
            s.hyperfine_a = hyperfine;
            s.validate()?;
            Ok(s)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let rows = with_pool(r.workers, || {
        specs
            .par_iter()
            .map(|s| -> Result<_, CliError> {
                if p.neutral {
                    let n = neutral_donor_spectrum(s, ELECTRON_GYROMAGNETIC_RATIO, p.floor)?;
                    Ok((vec![("esr", n.esr), ("nmr_up", n.nmr_up), ("nmr_down", n.nmr_down)], Some(n.max_deviation)))
                } else {
                    Ok((vec![("nmr", nmr_spectrum_with_floor(s, p.floor)?)], None))
                }
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let mut table = Table::new(&["b0", "kind", "frequency", "intensity", "level_lower", "level_upper"]);
    for (b0, (sets, _)) in fields.iter().zip(&rows) {
        for (kind, lines) in sets {
            for l in lines {
                table.push(line_row(vec![(*b0).into()], kind, l));
            }
        }
    }
    run.csv("spectrum.csv", &table)?;
    let deviations: Vec<Option<f64>> = rows.iter().map(|(_, d)| *d).collect();
    run.finish(
        json!({ "intensity_floor": p.floor }),
        json!({
            "larmor": fields.iter().map(|b| gamma_n * b).collect::<Vec<_>>(),
            "two_i": spin.two_i(),
            "gamma_n": gamma_n,
            "hyperfine_a": hyperfine,
            "secular_max_deviation": deviations,
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------- orientation-scan

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct OrientationFlags {
    #[arg(long)]
    pub donor: Option<String>,
    #[arg(long)]
    pub two_i: Option<i64>,
    #[arg(long)]
    pub gamma_n: Option<f64>,
    #[arg(long)]
    pub b0: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// B0 direction at angle 0, X,Y,Z.
    #[arg(long, value_delimiter = ',')]
    pub start: Option<Vec<f64>>,
    /// B0 direction at angle π/2, X,Y,Z; orthogonal to --start.
    #[arg(long, value_delimiter = ',')]
    pub end: Option<Vec<f64>>,
    #[arg(long)]
    pub n_angles: Option<usize>,
    /// Last scan angle, rad.
    #[arg(long)]
    pub angle_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OrientationParams {
    pub donor: String,
    pub two_i: Option<i64>,
    pub gamma_n: Option<f64>,
    pub b0: f64,
    pub q: f64,
    pub eta: f64,
    pub start: [f64; 3],
    pub end: [f64; 3],
    pub n_angles: usize,
    pub angle_max: f64,
}

impl Default for OrientationParams {
    fn default() -> Self {
        Self {
            donor: "Sb123".into(),
            two_i: None,
            gamma_n: None,
            b0: 1.4,
            q: 0.8e6,
            eta: 0.0,
            start: [1.0, 0.0, 0.0],
            end: [0.0, 1.0, 0.0],
            n_angles: 181,
            angle_max: PI,
        }
    }
}

pub fn run_orientation(common: &Common, flags: &OrientationFlags) -> Result<(), CliError> {
    const NAME: &str = "orientation-scan";
    let r = resolve::<OrientationParams, _>(NAME, common, flags)?;
    let p = &r.params;
    if p.n_angles < 2 || !(p.angle_max > 0.0) {
        return Err(CliError::Config("orientation-scan needs n_angles >= 2 and angle_max > 0".into()));
    }
    let (spin, gamma_n) = nucleus(&p.donor, p.two_i, p.gamma_n)?;
    let mut spec = DonorSpec::canonical(spin, gamma_n, p.b0, p.q, 0.0, 0.0);
    spec.eta = p.eta;
    spec.validate()?;
    let plane = RotationPlane::new(p.start, p.end)?;
    let angles = linear_range(&[0.0, p.angle_max, p.n_angles as f64], "angles")?;

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let scan = with_pool(r.workers, || scan_field_orientation(&spec, plane, &angles))??;
    let branches = continue_branches(&scan.spectra);

    let mut table = Table::new(&["angle", "branch", "frequency", "intensity", "level_lower", "level_upper"]);
    for ((chi, lines), labels) in scan.angles.iter().zip(&scan.spectra).zip(&branches) {
        for (l, b) in lines.iter().zip(labels) {
            let mut row: Vec<Cell> = vec![(*chi).into(), (*b).into()];
            row.extend([l.frequency.into(), l.intensity.into(), l.level_pair.0.into(), l.level_pair.1.into()]);
            table.push(row);
        }
    }
    run.csv("orientation-scan.csv", &table)?;
    let n_branches = branches.iter().flatten().copied().max().map_or(0, |m| m + 1);
    run.finish(
        json!({ "intensity_floor": INTENSITY_FLOOR }),
        json!({ "plane": scan.plane, "larmor": gamma_n * p.b0, "n_branches": n_branches }),
    )?;
    Ok(())
}
