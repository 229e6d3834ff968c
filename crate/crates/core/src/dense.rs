//! Dense matrices built directly from operator definitions.
//!
//! Nothing here goes through the in-place statevector kernels, so these
//! matrices serve as an independent oracle for the matrix-free code paths.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::hamiltonian::{CircuitHamiltonian, TermTag};

/// `gate ⊗ I` on an `S`-qubit register, entry by entry.
pub fn gate_matrix(gate: &Gate, num_qubits: usize) -> DMatrix<Complex64> {
    let d = 1usize << num_qubits;
    let k = gate.arity();
    let local = gate.matrix();
    let ld = 1usize << k;
    let bits: Vec<usize> = gate.targets().iter().map(|&q| num_qubits - q).collect();
    let mask: usize = bits.iter().map(|b| 1usize << b).sum();
    let local_index = |i: usize| (0..k).fold(0, |acc, j| acc << 1 | (i >> bits[j] & 1));
    DMatrix::from_fn(d, d, |r, c| {
        if r & !mask == c & !mask {
            local[local_index(r) * ld + local_index(c)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `U_t ⋯ U_1` as a dense `2^S × 2^S` matrix.
pub fn prefix_unitary(circuit: &Circuit, t: usize) -> DMatrix<Complex64> {
    let d = circuit.data_dim();
    circuit.gates()[..t].iter().fold(DMatrix::identity(d, d), |acc, g| {
        gate_matrix(g, circuit.num_qubits()) * acc
    })
}

/// Writes `block` at clock position `(row_clock, col_clock)`.
fn place(m: &mut DMatrix<Complex64>, row_clock: usize, col_clock: usize, block: &DMatrix<Complex64>) {
    let d = block.nrows();
    m.view_mut((row_clock * d, col_clock * d), (d, d)).copy_from(block);
}

/// Diagonal projector on the data space selecting basis states where `keep` holds.
fn data_projector(d: usize, keep: impl Fn(usize) -> bool) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |r, c| {
        if r == c && keep(r) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Dense matrix of one term of `h`.
pub fn term_matrix(h: &CircuitHamiltonian, term: TermTag) -> DMatrix<Complex64> {
    let circuit = h.circuit();
    let s = circuit.num_qubits();
    let d = circuit.data_dim();
    let steps = circuit.num_steps();
    let dim = d * (steps + 1);
    let qubit = |i: usize, k: usize| k >> (s - i) & 1 == 1;
    let mut m = DMatrix::zeros(dim, dim);
    match term {
        TermTag::In(i) => {
            let xi = h.input().bit(i);
            place(&mut m, 0, 0, &data_projector(d, |k| qubit(i, k) != xi));
        }
        TermTag::AncillaIn(i) => place(&mut m, 0, 0, &data_projector(d, |k| qubit(i, k))),
        TermTag::Out => place(&mut m, steps, steps, &data_projector(d, |k| !qubit(1, k))),
        TermTag::Prop(t) => {
            let u = gate_matrix(&circuit.gates()[t - 1], s);
            let half_id = DMatrix::<Complex64>::identity(d, d) * Complex64::new(0.5, 0.0);
            let half = Complex64::new(-0.5, 0.0);
            place(&mut m, t, t, &half_id);
            place(&mut m, t - 1, t - 1, &half_id);
            place(&mut m, t, t - 1, &(&u * half));
            place(&mut m, t - 1, t, &(u.adjoint() * half));
        }
    }
    m
}

/// Block-diagonal rotation `R = Σ_t U_t⋯U_1 ⊗ |t⟩⟨t|`.
pub fn rotation_matrix(circuit: &Circuit) -> DMatrix<Complex64> {
    let d = circuit.data_dim();
    let steps = circuit.num_steps();
    let mut m = DMatrix::zeros(d * (steps + 1), d * (steps + 1));
    for t in 0..=steps {
        place(&mut m, t, t, &prefix_unitary(circuit, t));
    }
    m
}

/// `½ I ⊗ (|t⟩ − |t−1⟩)(⟨t| − ⟨t−1|)`.
pub fn clock_difference_projector(circuit: &Circuit, t: usize) -> DMatrix<Complex64> {
    let d = circuit.data_dim();
    let steps = circuit.num_steps();
    let half = DMatrix::<Complex64>::identity(d, d) * Complex64::new(0.5, 0.0);
    let neg = -half.clone();
    let mut m = DMatrix::zeros(d * (steps + 1), d * (steps + 1));
    place(&mut m, t, t, &half);
    place(&mut m, t - 1, t - 1, &half);
    place(&mut m, t, t - 1, &neg);
    place(&mut m, t - 1, t, &neg);
    m
}
