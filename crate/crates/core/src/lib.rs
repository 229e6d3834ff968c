//! Clock-Hamiltonian construction for quantum circuits.
//!
//! A circuit `U_1 … U_T` and a classical input `x` are compiled into a
//! positive semidefinite operator `H_x` on data ⊗ clock space whose ground
//! energy is 0 when the circuit accepts `x` with certainty and at least
//! `1/(2(T+1)³)` when it rejects with certainty. The crate computes that
//! ground energy, simulates the randomized verifier that tests one term of
//! `H_x` per shot, and compiles boolean predicates into reversible circuits
//! with exact 0/1 acceptance.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod dense;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod hamiltonian;
pub mod linalg;
pub mod revcomp;
pub mod spectral;
pub mod verifier;

pub use circuit::{apply_gate, Bits, Circuit, DataState, Gate, GateKind};
pub use error::{Error, GateError, Result};
pub use hamiltonian::{history_state, soundness_bound, CircuitHamiltonian, ClockedState, TermTag, DENSE_CAP};
pub use num_complex::Complex64;
pub use revcomp::{compile_truth_table, end_to_end_instance, verify_reversibility, ReversibleCircuit, TruthTable};
pub use spectral::{
    gap_report, min_eigenvalue_dense, min_eigenvalue_iterative, GapOptions, GroundState, Method, MethodChoice,
    SpectralReport, Verdict,
};
pub use verifier::{Outcome, Slot, TestSlot, Verifier, VerifierTranscript};
