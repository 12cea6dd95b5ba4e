use std::f64::consts::{PI, SQRT_2};

use crate::spinops::SphereDirection;
use crate::{Error, Result};

/// Equal-area Hammer projection with latitude `π/2 - θ` and longitude `φ`
/// wrapped to `(-π, π]`. The image is the ellipse `(x/2√2)² + (y/√2)² ≤ 1`.
pub fn hammer_projection(dir: &SphereDirection) -> (f64, f64) {
    let lat = PI / 2.0 - dir.theta();
    let mut lon = dir.phi();
    if lon > PI {
        lon -= 2.0 * PI;
    }
    let (sl, cl) = lat.sin_cos();
    let denom = (1.0 + cl * (lon / 2.0).cos()).sqrt();
    (2.0 * SQRT_2 * cl * (lon / 2.0).sin() / denom, SQRT_2 * sl / denom)
}

pub fn hammer_inverse(x: f64, y: f64) -> Result<SphereDirection> {
    let r = (x / (2.0 * SQRT_2)).powi(2) + (y / SQRT_2).powi(2);
    if r > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("({x}, {y}) lies outside the Hammer ellipse")));
    }
    let z = (1.0 - (x / 4.0).powi(2) - (y / 2.0).powi(2)).sqrt();
    let lon = 2.0 * (z * x).atan2(2.0 * (2.0 * z * z - 1.0));
    let lat = (z * y).clamp(-1.0, 1.0).asin();
    SphereDirection::new((PI / 2.0 - lat).clamp(0.0, PI), lon)
}
