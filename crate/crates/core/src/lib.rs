//! Classical and quantum simulation of the periodically driven top.
//!
//! The crate is split along the physics:
//!
//! * [`spinops`]: arbitrary-spin operator algebra, dense Hermitian linear
//!   algebra, spin coherent states, Husimi Q and purity.
//! * [`classical`]: the classical driven top on the unit sphere, its
//!   stroboscopic maps and chaos classification.
//! * [`quantum`]: donor spin Hamiltonians (laboratory, RF-dressed and RWA
//!   frames), Floquet analysis, dynamical tunneling and purity maps.
//! * [`spectro`]: NMR/ESR spectra and field scans.
//! * [`stateprep`]: reverse-time pulse compiler and pulse simulator.
//! * [`donors`]: group-V donor constants.

pub mod classical;
pub mod donors;
mod error;
pub mod quantum;
pub mod spectro;
pub mod spinops;
pub mod stateprep;

pub use error::{Error, Result};
