//! Brute-force ground truth on the truncated Fock space.
//!
//! Everything here is computed from a quadratic Hamiltonian without using the perturbative
//! formulas: exact unitaries by eigendecomposition, Bogoliubov matrices from the classical
//! Heisenberg equations, and QFIs from fidelities.

mod coherent;
mod fidelity;
mod generator;
mod symplectic;
mod unitary;

pub use coherent::coherent_state;
pub use fidelity::{
    derivative_states, qfi_fidelity_mixed, qfi_fidelity_pure, DerivativeStates, Estimate, Oracle, MIXED_STEP,
    POSITIVITY_CLAMP, PURE_STEP,
};
pub use generator::{GeneratorSpec, HamiltonianEigen};
pub use symplectic::{extract_bogoliubov, first_order_from_generator, symplectic_residual, COEFFICIENT_STEP};
pub use unitary::{boundary_weight, exact_unitary, ExactUnitary, BOUNDARY_BUDGET};
