//! Compilation of small boolean predicates into reversible circuits whose
//! acceptance probability is exactly 0 or 1.
//!
//! The predicate is expanded in positive-polarity Reed–Muller form (an XOR
//! of monomials). Each monomial becomes one multi-controlled flip onto a
//! scratch wire; the scratch value is copied onto the output wire and the
//! monomial gates are replayed in reverse to clear the scratch wire again.
//!
//! Register layout for arity `m`:
//!
//! | qubit     | role                                                   |
//! |-----------|--------------------------------------------------------|
//! | 1         | holds `x_1` on entry, cleared, then receives `f(x)`    |
//! | 2..=m     | inputs `x_2 … x_m`                                     |
//! | m+1       | `x_1`, moved off qubit 1 by two CNOTs                  |
//! | m+2       | scratch                                                |
//!
//! Monomials of degree 3 and 4 are split into Toffolis around one borrowed
//! wire whose value is restored afterwards but never assumed to be `|0⟩`.
//! Qubit 1 serves as that wire; it holds 0 while computing and `f(x)` while
//! uncomputing.

use serde::Serialize;

use crate::circuit::{Bits, Circuit, DataState, Gate};
use crate::error::{Error, Result};
use crate::hamiltonian::CircuitHamiltonian;
use crate::spectral::{report_for, GapOptions, MethodChoice, SpectralReport};

pub const MAX_ARITY: usize = 4;

/// Boolean function on `arity` bits. `values[k]` is `f(x)` for the input
/// whose binary value is `k`, with `x_1` as the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    values: Vec<bool>,
}

impl TruthTable {
    pub fn new(arity: usize, values: Vec<bool>) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::TruthTable(format!(
                "arity must lie in [1, {MAX_ARITY}], got {arity}"
            )));
        }
        if values.len() != 1 << arity {
            return Err(Error::TruthTable(format!(
                "arity {arity} needs {} values, got {}",
                1 << arity,
                values.len()
            )));
        }
        Ok(TruthTable { arity, values })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&Bits) -> bool) -> Result<Self> {
        let values = (0..1usize << arity.min(MAX_ARITY + 1))
            .map(|k| f(&Bits::from_index(k, arity)))
            .collect();
        Self::new(arity, values)
    }

    /// Table `k` in the enumeration of all `2^(2^arity)` functions: bit `j`
    /// of `k` is the value at input `j`.
    pub fn from_code(arity: usize, code: u64) -> Result<Self> {
        let values = (0..1usize << arity.min(MAX_ARITY + 1))
            .map(|j| code >> j & 1 == 1)
            .collect();
        Self::new(arity, values)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn eval(&self, x: &Bits) -> Result<bool> {
        if x.len() != self.arity {
            return Err(Error::InputLength {
                expected: self.arity,
                got: x.len(),
            });
        }
        Ok(self.values[x.to_index()])
    }

    /// Reed–Muller coefficients: `f = ⊕_{mask : coef[mask]} Π_{j ∈ mask} x_j`,
    /// where bit `arity − j` of `mask` stands for `x_j`.
    pub fn reed_muller(&self) -> Vec<bool> {
        let mut coef = self.values.clone();
        for b in 0..self.arity {
            let bit = 1 << b;
            for mask in 0..coef.len() {
                if mask & bit != 0 {
                    coef[mask] ^= coef[mask ^ bit];
                }
            }
        }
        coef
    }
}

/// Wire roles of a compiled circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub output: usize,
    /// Wire carrying `x_j` during the computation, indexed by `j − 1`.
    pub input_wires: Vec<usize>,
    pub work_wires: Vec<usize>,
    /// 1-based position of the CNOT copying scratch onto the output.
    pub copy_step: usize,
}

#[derive(Debug, Clone)]
pub struct ReversibleCircuit {
    pub circuit: Circuit,
    pub layout: Layout,
}

/// Compiles `f` to a circuit over `{X, CNOT, TOFFOLI}` accepting exactly when `f(x) = 1`.
pub fn compile_truth_table(f: &TruthTable) -> Result<ReversibleCircuit> {
    let m = f.arity;
    if m > MAX_ARITY {
        return Err(Error::TruthTable(format!("arity {m} exceeds {MAX_ARITY}")));
    }
    let coef = f.reed_muller();
    let mut monomials: Vec<usize> = (0..coef.len()).filter(|&k| coef[k]).collect();
    monomials.sort_by_key(|&k| (k.count_ones(), std::cmp::Reverse(k)));

    let moved = m + 1;
    let scratch = m + 2;
    let wire = |j: usize| if j == 1 { moved } else { j };
    // variables of a monomial in increasing index order
    let vars = |mask: usize| -> Vec<usize> { (1..=m).filter(|j| mask >> (m - j) & 1 == 1).map(wire).collect() };

    let mut compute = Vec::new();
    for &mask in &monomials {
        let v = vars(mask);
        match v.as_slice() {
            [] => compute.push(Gate::x(scratch)),
            [a] => compute.push(Gate::cnot(*a, scratch)),
            [a, b] => compute.push(Gate::toffoli(*a, *b, scratch)),
            [a, b, c] => compute.extend(borrowed_ccc_x([*a, *b, *c], 1, scratch)),
            [a, b, c, d] => {
                // t ^= cd(e ⊕ ab) then t ^= cde, with e = qubit 1 and a as the inner borrowed wire
                compute.push(Gate::toffoli(*a, *b, 1));
                compute.extend(borrowed_ccc_x([*c, *d, 1], *a, scratch));
                compute.push(Gate::toffoli(*a, *b, 1));
                compute.extend(borrowed_ccc_x([*c, *d, 1], *a, scratch));
            }
            _ => unreachable!("arity capped at {MAX_ARITY}"),
        }
    }

    let mut gates = vec![Gate::cnot(1, moved), Gate::cnot(moved, 1)];
    gates.extend(compute.iter().cloned());
    gates.push(Gate::cnot(scratch, 1));
    let copy_step = gates.len();
    gates.extend(compute.into_iter().rev());

    let circuit = Circuit::new(scratch, m, gates)?;
    let layout = Layout {
        output: 1,
        input_wires: (1..=m).map(wire).collect(),
        work_wires: vec![scratch],
        copy_step,
    };
    Ok(ReversibleCircuit { circuit, layout })
}

/// `target ^= c0·c1·c2` using `borrowed` in any state; `borrowed` is restored.
fn borrowed_ccc_x(controls: [usize; 3], borrowed: usize, target: usize) -> [Gate; 4] {
    let [a, b, c] = controls;
    [
        Gate::toffoli(c, borrowed, target),
        Gate::toffoli(a, b, borrowed),
        Gate::toffoli(c, borrowed, target),
        Gate::toffoli(a, b, borrowed),
    ]
}

/// Outcome of [`verify_reversibility`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversibilityCheck {
    pub is_permutation: bool,
    /// First offending basis state, when there is one.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The basis state is not mapped to a single basis state.
    Superposition { basis_state: usize },
    /// Two basis states share an image.
    Collision {
        basis_state: usize,
        other: usize,
        image: usize,
    },
}

/// Checks, basis state by basis state, that the circuit maps each computational
/// basis state to exactly one basis state with amplitude 1 and that no two
/// inputs share an image.
pub fn verify_reversibility(circuit: &Circuit) -> ReversibilityCheck {
    let s = circuit.num_qubits();
    let mut preimage: Vec<Option<usize>> = vec![None; 1 << s];
    for input in 0..1usize << s {
        let mut state = DataState::basis(s, input);
        for g in circuit.gates() {
            state = crate::circuit::apply_gate(&state, g, s).expect("gates validated by the circuit");
        }
        let amps = state.amplitudes();
        let image = amps.iter().position(|a| (a - 1.0).norm() < 1e-12);
        let clean = image.is_some_and(|img| amps.iter().enumerate().all(|(k, a)| k == img || a.norm() < 1e-12));
        let Some(image) = image.filter(|_| clean) else {
            return ReversibilityCheck {
                is_permutation: false,
                witness: Some(Witness::Superposition { basis_state: input }),
            };
        };
        if let Some(other) = preimage[image] {
            return ReversibilityCheck {
                is_permutation: false,
                witness: Some(Witness::Collision {
                    basis_state: input,
                    other,
                    image,
                }),
            };
        }
        preimage[image] = Some(input);
    }
    ReversibilityCheck {
        is_permutation: true,
        witness: None,
    }
}

/// Compiles `f`, builds `H_x` with ancilla checks and certifies its gap.
pub fn end_to_end_instance(f: &TruthTable, x: &Bits) -> Result<(CircuitHamiltonian, SpectralReport)> {
    if x.len() != f.arity {
        return Err(Error::InputLength {
            expected: f.arity,
            got: x.len(),
        });
    }
    let compiled = compile_truth_table(f)?;
    let h = CircuitHamiltonian::build(&compiled.circuit, x, true)?;
    let opts = GapOptions {
        method: MethodChoice::Auto,
        ..GapOptions::default()
    };
    let report = report_for(&h, &opts)?;
    Ok((h, report))
}
