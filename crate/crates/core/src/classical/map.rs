use super::eom::{eom_raw, norm, AngularMomentumState};
use super::ode::{integrate, Tolerances};
use super::params::ClassicalParams;
use crate::{Error, Result};

/// Trajectory sampled once per drive period; `points[k]` is the state
/// after `k` periods, so `points[0]` is the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct StroboscopicMap {
    pub points: Vec<AngularMomentumState>,
}

/// Integrate from `s = 0` and sample at `times` (monotone, in `s` units).
pub fn integrate_trajectory(
    state0: &AngularMomentumState,
    p: &ClassicalParams,
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<[f64; 3]>> {
    let p = *p;
    integrate(move |s, l: &[f64; 3]| eom_raw(l, &p, s), 0.0, state0.vector(), times, tol)
}

pub fn stroboscopic_map(
    state0: &AngularMomentumState,
    p: &ClassicalParams,
    n_periods: usize,
    tol: Tolerances,
) -> Result<StroboscopicMap> {
    let period = p.period();
    let times: Vec<f64> = (0..=n_periods).map(|k| k as f64 * period).collect();
    let raw = integrate_trajectory(state0, p, &times, tol)?;
    let points = raw
        .into_iter()
        .map(AngularMomentumState::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(StroboscopicMap { points })
}

/// One application of the stroboscopic map to a raw unit vector.
fn poincare(l: [f64; 3], p: &ClassicalParams, tol: Tolerances) -> Result<[f64; 3]> {
    let p = *p;
    let out = integrate(move |s, y: &[f64; 3]| eom_raw(y, &p, s), 0.0, l, &[p.period()], tol)?;
    Ok(out[0])
}

fn tangent_basis(l: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if l[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = cross(&helper, l);
    let n1 = norm(&e1);
    let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let e2 = cross(l, &e1);
    (e1, e2)
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn displaced(l: &[f64; 3], e1: &[f64; 3], e2: &[f64; 3], u: f64, v: f64) -> [f64; 3] {
    let w = [
        l[0] + u * e1[0] + v * e2[0],
        l[1] + u * e1[1] + v * e2[1],
        l[2] + u * e1[2] + v * e2[2],
    ];
    let n = norm(&w);
    [w[0] / n, w[1] / n, w[2] / n]
}

/// Period-one orbit of the stroboscopic map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub state: AngularMomentumState,
    /// Trace of the linearized map; `|trace| < 2` means elliptic (island centre).
    pub trace: f64,
}

impl FixedPoint {
    pub fn is_elliptic(&self) -> bool {
        self.trace.abs() < 2.0
    }
}

/// Newton iteration for `P(l) = l` in local tangent coordinates.
pub fn find_fixed_point(
    p: &ClassicalParams,
    guess: &AngularMomentumState,
    tol: Tolerances,
) -> Result<FixedPoint> {
    const FD: f64 = 1e-7;
    let mut l = guess.vector();
    for _ in 0..60 {
        let (e1, e2) = tangent_basis(&l);
        let residual = |x: [f64; 3]| -> Result<[f64; 2]> {
            let px = poincare(x, p, tol)?;
            let d = [px[0] - l[0], px[1] - l[1], px[2] - l[2]];
            Ok([dot(&d, &e1), dot(&d, &e2)])
        };
        let r0 = residual(l)?;
        let ru = residual(displaced(&l, &e1, &e2, FD, 0.0))?;
        let rv = residual(displaced(&l, &e1, &e2, 0.0, FD))?;
        // columns of (DP - 1) in the tangent frame
        let j = [
            [(ru[0] - r0[0]) / FD - 1.0, (rv[0] - r0[0]) / FD],
            [(ru[1] - r0[1]) / FD, (rv[1] - r0[1]) / FD - 1.0],
        ];
        let trace = j[0][0] + j[1][1] + 2.0;
        if r0[0].hypot(r0[1]) < 1e-11 {
            return Ok(FixedPoint { state: AngularMomentumState::normalized(l)?, trace });
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            break;
        }
        let du = -(j[1][1] * r0[0] - j[0][1] * r0[1]) / det;
        let dv = -(-j[1][0] * r0[0] + j[0][0] * r0[1]) / det;
        let step = du.hypot(dv);
        let mut lambda = if step > 0.2 { 0.2 / step } else { 1.0 };
        // backtrack until the residual (measured in the new tangent frame) shrinks
        let r0n = r0[0].hypot(r0[1]);
        let mut next = None;
        for _ in 0..20 {
            let cand = displaced(&l, &e1, &e2, du * lambda, dv * lambda);
            let pc = poincare(cand, p, tol)?;
            let rn = norm(&[pc[0] - cand[0], pc[1] - cand[1], pc[2] - cand[2]]);
            if rn < r0n {
                next = Some(cand);
                break;
            }
            lambda *= 0.5;
        }
        match next {
            Some(c) => l = c,
            None => break,
        }
    }
    Err(Error::InvalidParameter("fixed-point search did not converge".into()))
}

/// Elliptic fixed points continued from the three extrema of the undriven
/// top `lz + β′lx²`: the pair at `lz = 1/(2β′)`, `φ ∈ {0, π}` (present for
/// `β′ > ½`) and the minimum near the south pole. Searches that fail or
/// land on a hyperbolic point are dropped; duplicates are merged.
pub fn island_centres(p: &ClassicalParams, tol: Tolerances) -> Vec<FixedPoint> {
    let mut guesses = Vec::new();
    if p.beta > 0.5 {
        let theta = (1.0 / (2.0 * p.beta)).acos();
        guesses.push(AngularMomentumState::from_angles(theta, 0.0));
        guesses.push(AngularMomentumState::from_angles(theta, std::f64::consts::PI));
    }
    guesses.push(AngularMomentumState::from_angles(
        std::f64::consts::PI - 0.05,
        1.5 * std::f64::consts::PI,
    ));
    let mut found: Vec<FixedPoint> = Vec::new();
    for g in guesses {
        if let Ok(fp) = find_fixed_point(p, &g, tol) {
            let v = fp.state.vector();
            let dup = found.iter().any(|f| {
                let w = f.state.vector();
                norm(&[v[0] - w[0], v[1] - w[1], v[2] - w[2]]) < 1e-6
            });
            if fp.is_elliptic() && !dup {
                found.push(fp);
            }
        }
    }
    found
}
