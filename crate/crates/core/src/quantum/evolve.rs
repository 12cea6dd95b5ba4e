use num_complex::Complex64;

use crate::spinops::{identity, unitary_exp, Operator, StateVector};
use crate::{Error, Result};

/// Midpoint-rule propagator `∏ exp(-i2π H(t_k + Δ/2) Δ)` from `t0` to `t1`.
pub fn propagator<F>(h: F, t0: f64, t1: f64, n_steps: usize) -> Result<Operator>
where
    F: Fn(f64) -> Operator,
{
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
    }
    let dt = (t1 - t0) / n_steps as f64;
    let mut u: Option<Operator> = None;
    for k in 0..n_steps {
        let step = unitary_exp(&h(t0 + (k as f64 + 0.5) * dt), dt)?;
        u = Some(match u {
            None => step,
            Some(acc) => step * acc,
        });
    }
    Ok(u.unwrap_or_else(|| identity(1)))
}

/// Evolve `psi` from `t0` to `t1` with the midpoint rule.
pub fn propagate<F>(h: F, t0: f64, t1: f64, n_steps: usize, psi: &StateVector) -> Result<StateVector>
where
    F: Fn(f64) -> Operator,
{
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
    }
    let dt = (t1 - t0) / n_steps as f64;
    let mut v = psi.as_vector().clone();
    for k in 0..n_steps {
        v = unitary_exp(&h(t0 + (k as f64 + 0.5) * dt), dt)? * v;
    }
    let n = v.norm();
    StateVector::normalized(v / Complex64::new(n, 0.0))
}

/// Return-overlap series sampled once per period.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTrace {
    /// Sample times, s.
    pub times: Vec<f64>,
    /// `|⟨ψ(0)|ψ(t)⟩|`.
    pub amplitude: Vec<f64>,
}

impl OverlapTrace {
    /// `|⟨ψ(0)|ψ(t)⟩|²`.
    pub fn squared(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a * a).collect()
    }
}
