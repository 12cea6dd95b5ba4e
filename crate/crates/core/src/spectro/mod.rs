//! NMR and ESR line spectra of donor nuclei, field-magnitude and
//! field-orientation scans, and quadrupole estimation from line spacing.

mod estimate;
mod lines;
mod neutral;
mod scan;

pub use estimate::{estimate_quadrupole, QuadrupoleEstimate};
pub use lines::{
    ladder_normalization, nmr_spectrum, nmr_spectrum_with_floor, probe_axis, static_hamiltonian, SpectrumLine,
    INTENSITY_FLOOR,
};
pub use neutral::{neutral_donor_spectrum, neutral_hamiltonians, NeutralSpectrum, ELECTRON_GYROMAGNETIC_RATIO};
pub use scan::{
    continue_branches, line_spread, scan_field_magnitude, scan_field_orientation, FieldScan, OrientationScan,
    RotationPlane,
};
