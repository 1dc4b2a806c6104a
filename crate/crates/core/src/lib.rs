//! Spin squeezing of a single spin-3/2 molecule (ground-state OH) in crossed
//! static electric and magnetic fields.
//!
//! The crate models the molecule with an eight-dimensional Hamiltonian built
//! from a Lambda-doublet pseudo-spin 1/2 coupled to the rotational angular
//! momentum J = 3/2, together with the four-dimensional Hamiltonian obtained
//! by adiabatically eliminating the pseudo-spin. Everything runs with ħ = 1:
//! Hamiltonian constants are frequencies and times are reciprocal frequencies.
//!
//! Basis conventions used throughout:
//!
//! * spin operators are written in the descending-m basis, `m = j, j-1, …, -j`;
//! * eight-dimensional vectors use the composite index `s * 4 + k`, where `s`
//!   indexes the pseudo-spin (`s = 0` is σ_z = +1, `s = 1` is σ_z = -1) and
//!   `k` indexes the J = 3/2 projection. This is the row order of the
//!   literal 8×8 matrix in [`hamiltonians::appendix_matrix`].

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod linalg;
pub mod optimize;
pub mod spin;
pub mod units;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, StateVector};
pub use units::{CConst, FieldParams, LabParams};
