use std::f64::consts::PI;

use clap::Args;
use driventop_core::quantum::DonorSpec;
use driventop_core::spinops::{spin_coherent_state, StateVector};
use driventop_core::stateprep::compile_and_verify;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{direction, nucleus};
use crate::config::{resolve, Angles, Common};
use crate::output::{Run, Table};
use crate::{with_pool, CliError};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct StateprepFlags {
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
    /// Pulse amplitude, T.
    #[arg(long)]
    pub b1: Option<f64>,
    /// Target spin coherent state as THETA:PHI.
    #[arg(long)]
    pub target: Option<Angles>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct StateprepParams {
    pub donor: String,
    pub two_i: Option<i64>,
    pub gamma_n: Option<f64>,
    pub b0: f64,
    pub q: f64,
    pub eta: f64,
    pub b1: f64,
    pub target: Angles,
    /// Explicit target as `[re, im]` pairs in the m-descending basis;
    /// overrides `target`. Config file only.
    pub target_amplitudes: Option<Vec<[f64; 2]>>,
}

impl Default for StateprepParams {
    fn default() -> Self {
        Self {
            donor: "Sb123".into(),
            two_i: None,
            gamma_n: None,
            b0: 0.7,
            q: 1e6,
            eta: 0.0,
            b1: 1e-3,
            target: Angles { theta: 4.0 * PI / 5.0, phi: PI / 2.0 },
            target_amplitudes: None,
        }
    }
}

pub fn run(common: &Common, flags: &StateprepFlags) -> Result<(), CliError> {
    const NAME: &str = "stateprep";
    let r = resolve::<StateprepParams, _>(NAME, common, flags)?;
    let p = &r.params;
    let (spin, gamma_n) = nucleus(&p.donor, p.two_i, p.gamma_n)?;
    let mut spec = DonorSpec::canonical(spin, gamma_n, p.b0, p.q, 0.0, 0.0);
    spec.eta = p.eta;
    spec.validate()?;
    let target = match &p.target_amplitudes {
        Some(a) => StateVector::try_from(a.clone())?,
        None => spin_coherent_state(spin, &direction(p.target.theta, p.target.phi)?),
    };
    if target.dim() != spin.dim() {
        return Err(CliError::Config(format!("target has {} amplitudes, spin needs {}", target.dim(), spin.dim())));
    }

    let mut run = Run::new(NAME, r.output.clone(), r.seed, r.workers, p);
    let (seq, report, simulated) = with_pool(r.workers, || compile_and_verify(&target, &spec, p.b1))??;

    let mut pulses = Table::new(&[
        "index", "frequency", "duration", "phase", "amplitude", "level_upper", "level_lower", "ideal_fidelity", "crowded",
    ]);
    for (i, pulse) in seq.pulses.iter().enumerate() {
        pulses.push(vec![
            i.into(),
            pulse.frequency.into(),
            pulse.duration.into(),
            pulse.phase.into(),
            pulse.amplitude.into(),
            pulse.level_pair.0.into(),
            pulse.level_pair.1.into(),
            report.intermediate_fidelity[i].into(),
            report.crowded_pulses.contains(&i).into(),
        ]);
    }
    run.csv("stateprep.csv", &pulses)?;

    // Step 0 is before the first pulse; step k follows pulse k-1.
    let mut pops = Table::new(&["step", "level", "population"]);
    for (step, row) in report.populations.iter().enumerate() {
        for (level, v) in row.iter().enumerate() {
            pops.push(vec![step.into(), level.into(), (*v).into()]);
        }
    }
    run.csv("stateprep-populations.csv", &pops)?;
    run.json("stateprep-sequence.json", &seq)?;

    run.finish(
        json!({ "segments_per_period": driventop_core::stateprep::SEGMENTS_PER_PERIOD }),
        json!({
            "predicted_fidelity": report.predicted_fidelity,
            "simulated_fidelity": simulated,
            "total_duration": seq.total_duration(),
            "n_pulses": seq.pulses.len(),
            "crowded_pulses": report.crowded_pulses,
        }),
    )?;
    Ok(())
}
