//! Quantum driven top: donor Hamiltonians in the lab, RF and rotating-wave
//! frames, Floquet analysis, fluctuation-averaged purity and dynamical
//! tunneling.

mod donor;
mod evolve;
mod floquet;
mod hamiltonian;
mod purity;
mod quadrupole;
mod rf;
mod tunneling;

pub use donor::{DonorSpec, ElectronManifold, Frame, QuadAxes, RfFields};
pub use evolve::{propagate, propagator, OverlapTrace};
pub use floquet::{
    evolve, floquet, floquet_eigensystem, floquet_with, overlap_trace, FloquetEigensystem,
    FloquetOperator, FLOQUET_SEGMENTS,
};
pub use hamiltonian::{build_hamiltonian, hamiltonian, quadrupole_term, zeeman_term, LabParts};
pub use purity::{purity_map, FluctuatedParameter, FluctuationSpec, PurityMap, SphereGrid};
pub use quadrupole::{quadrupole_strength, vzz_for_strength, ELEMENTARY_CHARGE, PLANCK};
pub use rf::{
    rf_envelope, rf_lab_hamiltonian, rotating_frame_closed_form, rotating_frame_hamiltonian,
    rwa_reduce, RwaHamiltonian,
};
pub use tunneling::{tunneling_frequency, tunneling_from_floquet, TunnelingEstimate, TWO_COMPONENT_WEIGHT};
