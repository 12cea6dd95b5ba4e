//! Spin operator algebra and the dense linear algebra it runs on.

mod coherent;
mod linalg;
mod spin;
mod state;

pub use coherent::{
    coherent_overlap_law, rotated_operator_about_z, rotation_operator, spin_coherent_state,
    SphereDirection,
};
pub use linalg::{
    anticommutator, commutator, dagger, frobenius_norm, hermitian_eigensystem,
    hermiticity_deviation, identity, is_hermitian, unitarity_deviation, unitary_exp, zeros,
    Eigensystem, Operator, HERMITIAN_TOL,
};
pub use spin::{SpinOperators, SpinQuantumNumber};
pub use state::{husimi_q, purity, DensityMatrix, StateVector};

pub use num_complex::Complex64;
