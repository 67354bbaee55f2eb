//! Finite-`j` quantum mechanics on the truncated spin ⊗ boson space.

pub mod basis;
pub mod cutoff;
pub mod eigen;
pub mod lanczos;
pub mod operators;
pub mod sparse;
pub mod states;

pub use basis::BasisSpec;
pub use eigen::{eigenpairs_near, ground_state, overlap_rank, spectral_bounds};
pub use operators::{build_boson_ops, build_hamiltonian, build_spin_ops, BosonOps, SpinOps};
pub use sparse::SparseOperator;
pub use states::{coherent_product_state, StateVector};
