//! Small reference circuits used throughout the tests and examples.

use crate::circuit::{Bits, Circuit, Gate};
use crate::revcomp::{compile_truth_table, TruthTable};

/// One qubit, `U_1 = X`.
pub fn circ_x() -> Circuit {
    Circuit::new(1, 1, vec![Gate::x(1)]).expect("valid fixture")
}

/// Two qubits with one input bit, `U_1 = X` on qubit 1.
pub fn circ_x_two_qubits() -> Circuit {
    Circuit::new(2, 1, vec![Gate::x(1)]).expect("valid fixture")
}

/// One qubit, `U_1 = I`.
pub fn circ_id() -> Circuit {
    Circuit::new(1, 1, vec![Gate::identity(1)]).expect("valid fixture")
}

/// One qubit, `U_1 = H`.
pub fn circ_h() -> Circuit {
    Circuit::new(1, 1, vec![Gate::h(1)]).expect("valid fixture")
}

/// One qubit, `U_1 = U_2 = H`.
pub fn circ_hh() -> Circuit {
    Circuit::new(1, 1, vec![Gate::h(1), Gate::h(1)]).expect("valid fixture")
}

/// Compiled 3-bit AND with the rejecting input `110`.
pub fn circ_rev3() -> (Circuit, Bits) {
    let and3 = TruthTable::from_fn(3, |x| x.as_slice().iter().all(|&b| b)).expect("valid table");
    let rc = compile_truth_table(&and3).expect("arity within cap");
    (rc.circuit, "110".parse().expect("bit string"))
}
