//! Classical driven top: `h = lz + β′lx² + γ′cos(f′s)ly` on the unit sphere,
//! with `s = αt`.

mod chaos;
mod eom;
mod map;
mod ode;
mod params;
mod projection;

pub use chaos::{
    calibrate_threshold, chaotic_fraction, classify_chaotic, fraction_grid, log_space, Calibration,
    FractionCell, CALIBRATION_MULTIPLE, divergence_exponent, exponents, sphere_sample,
    sphere_samples, ChaosClassification, ChaosConfig, ChaoticFraction, FitWindow,
};
pub use eom::{eom, eom_raw, AngularMomentumState};
pub use map::{find_fixed_point, island_centres, integrate_trajectory, stroboscopic_map, FixedPoint, StroboscopicMap};
pub use ode::{integrate, Dop853, Tolerances};
pub use params::{ClassicalParams, PhysicalTop, QuantumDimensionless, QuantumTop};
pub use projection::{hammer_inverse, hammer_projection};
