//! Spin systems, their Hamiltonians, the basis conventions and the
//! product-operator toolkit.
//!
//! Basis states are indexed with spin 0 as the most significant bit; a clear
//! bit is ↑ (m = +1/2, logical 0) and a set bit is ↓ (m = −1/2, logical 1).
//! For three spins this lists ↑↑↑, ↑↑↓, ↑↓↑, ↑↓↓, ↓↑↑, … in index order.

mod basis;
mod density;
mod molecule;
mod operators;
mod product_ops;
mod system;
mod transitions;

pub(crate) use basis::m_of;
pub use basis::BasisState;
pub use density::DensityMatrix;
pub use molecule::{builtin_molecule, builtin_names, load_molecule, CouplingConfig, MoleculeConfig, SpinConfig};
pub use operators::{single_spin_operator, Axis};
pub use product_ops::{product_operator_decompose, ProductOperatorExpansion, Word};
pub use system::{hamiltonian, thermal_deviation, EigenBasis, Spin, SpinSystem};
pub use transitions::{classify_connectivity, list_transitions, Connectivity, QuantumOrder, Transition};
