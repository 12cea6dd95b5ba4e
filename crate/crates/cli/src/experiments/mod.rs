pub mod classical;
pub mod quantum;
pub mod spectro;
pub mod stateprep;

use driventop_core::classical::{AngularMomentumState, ChaosConfig, FitWindow, Tolerances};
use driventop_core::donors::donor_preset;
use driventop_core::spinops::{SphereDirection, SpinQuantumNumber};
use serde_json::{json, Value};

use crate::CliError;

/// Spin and gyromagnetic ratio from a donor preset, with optional
/// overrides of either.
pub(crate) fn nucleus(
    donor: &str,
    two_i: Option<i64>,
    gamma_n: Option<f64>,
) -> Result<(SpinQuantumNumber, f64), CliError> {
    let preset = donor_preset(donor)?;
    let spin = match two_i {
        Some(n) => SpinQuantumNumber::new(n)?,
        None => preset.spin(),
    };
    Ok((spin, gamma_n.unwrap_or(preset.gamma_n)))
}

pub(crate) fn direction(theta: f64, phi: f64) -> Result<SphereDirection, CliError> {
    Ok(SphereDirection::new(theta, phi)?)
}

pub(crate) fn state_direction(s: &AngularMomentumState) -> SphereDirection {
    SphereDirection::new(s.theta(), s.phi()).expect("state angles are in range")
}

pub(crate) fn chaos_config(duration: f64, separation: f64, renorm_threshold: f64, window: FitWindow) -> ChaosConfig {
    ChaosConfig { duration, separation, renorm_threshold, window, ..ChaosConfig::default() }
}

pub(crate) fn ode_tolerances_json(t: &Tolerances) -> Value {
    json!({ "rtol": t.rtol, "atol": t.atol, "max_steps": t.max_steps })
}

pub(crate) fn chaos_json(cfg: &ChaosConfig) -> Value {
    json!({
        "separation": cfg.separation,
        "renorm_threshold": cfg.renorm_threshold,
        "duration": cfg.duration,
        "sample_interval": cfg.sample_interval,
        "window": cfg.window,
        "ode": ode_tolerances_json(&cfg.tolerances),
    })
}

pub(crate) fn numerical(msg: impl Into<String>) -> CliError {
    CliError::Numerical(msg.into())
}
