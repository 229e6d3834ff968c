//! The clock Hamiltonian `H_x` over data ⊗ clock space.
//!
//! The clock is an explicit `(T+1)`-level register. A clocked vector stores
//! the amplitude of `|d⟩ ⊗ |t⟩_C` at index `t·2^S + d`, so each clock value
//! owns one contiguous block of `2^S` data amplitudes. Terms act on these
//! blocks directly and the full operator is never materialized unless a
//! caller asks for the dense oracle.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Bits, Circuit, NORM_TOL};
use crate::dense;
use crate::error::{Error, Result};
use crate::linalg;

/// Dimension cap for dense materialization and diagonalization.
pub const DENSE_CAP: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unit vector in the `2^S · (T+1)` dimensional data ⊗ clock space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockedState {
    data_qubits: usize,
    num_steps: usize,
    amplitudes: Vec<Complex64>,
}

impl ClockedState {
    pub fn new(data_qubits: usize, num_steps: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = (1usize << data_qubits) * (num_steps + 1);
        if amplitudes.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: amplitudes.len(),
            });
        }
        let norm = linalg::norm(&amplitudes);
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::Norm { norm });
        }
        Ok(ClockedState {
            data_qubits,
            num_steps,
            amplitudes,
        })
    }

    /// Scales `amplitudes` to unit norm; fails on the zero vector.
    pub fn normalized(data_qubits: usize, num_steps: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Norm { norm });
        }
        linalg::scale(1.0 / norm, &mut amplitudes);
        Self::new(data_qubits, num_steps, amplitudes)
    }

    /// `|data⟩ ⊗ |clock⟩_C`.
    pub fn basis(data_qubits: usize, num_steps: usize, clock: usize, data: usize) -> Self {
        let d = 1usize << data_qubits;
        assert!(clock <= num_steps && data < d, "basis state out of range");
        let mut amplitudes = vec![ZERO; d * (num_steps + 1)];
        amplitudes[clock * d + data] = Complex64::new(1.0, 0.0);
        ClockedState {
            data_qubits,
            num_steps,
            amplitudes,
        }
    }

    pub fn data_qubits(&self) -> usize {
        self.data_qubits
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Data amplitudes attached to clock value `t`.
    pub fn block(&self, t: usize) -> &[Complex64] {
        let d = 1usize << self.data_qubits;
        &self.amplitudes[t * d..(t + 1) * d]
    }
}

/// One summand of `H_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermTag {
    /// `Π_i^{|¬x_i⟩} ⊗ |0⟩⟨0|_C` for an input qubit.
    In(usize),
    /// `Π_i^{|1⟩} ⊗ |0⟩⟨0|_C` for a work qubit that must start in `|0⟩`.
    AncillaIn(usize),
    /// `Π_1^{|0⟩} ⊗ |T⟩⟨T|_C`.
    Out,
    /// Propagation term for gate `U_t`.
    Prop(usize),
}

impl TermTag {
    pub fn kind(&self) -> &'static str {
        match self {
            TermTag::In(_) => "in",
            TermTag::AncillaIn(_) => "ancilla_in",
            TermTag::Out => "out",
            TermTag::Prop(_) => "prop",
        }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            TermTag::In(i) | TermTag::AncillaIn(i) | TermTag::Prop(i) => Some(i),
            TermTag::Out => None,
        }
    }
}

impl fmt::Display for TermTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(i) => write!(f, "{}({})", self.kind(), i),
            None => f.write_str(self.kind()),
        }
    }
}

/// `H_x` for a fixed circuit and input, as an ordered list of terms.
#[derive(Debug, Clone)]
pub struct CircuitHamiltonian {
    circuit: Circuit,
    input: Bits,
    terms: Vec<TermTag>,
    include_ancilla_checks: bool,
}

impl CircuitHamiltonian {
    /// Terms are ordered `Prop(1..=T)`, `In(1..=n)`, `AncillaIn(n+1..=S)` when
    /// enabled, then `Out`. Application sums in this order.
    pub fn build(circuit: &Circuit, x: &Bits, include_ancilla_checks: bool) -> Result<Self> {
        circuit.check_input(x)?;
        let (s, n, t) = (circuit.num_qubits(), circuit.num_input_bits(), circuit.num_steps());
        let mut terms: Vec<TermTag> = (1..=t).map(TermTag::Prop).collect();
        terms.extend((1..=n).map(TermTag::In));
        if include_ancilla_checks {
            terms.extend((n + 1..=s).map(TermTag::AncillaIn));
        }
        terms.push(TermTag::Out);
        Ok(CircuitHamiltonian {
            circuit: circuit.clone(),
            input: x.clone(),
            terms,
            include_ancilla_checks,
        })
    }

    /// The sub-sum over the terms accepted by `keep`.
    pub fn restricted(&self, keep: impl Fn(TermTag) -> bool) -> Self {
        let mut out = self.clone();
        out.terms.retain(|&t| keep(t));
        out
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn input(&self) -> &Bits {
        &self.input
    }

    pub fn terms(&self) -> &[TermTag] {
        &self.terms
    }

    pub fn include_ancilla_checks(&self) -> bool {
        self.include_ancilla_checks
    }

    /// `T`
    pub fn num_steps(&self) -> usize {
        self.circuit.num_steps()
    }

    /// `S`
    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    /// `n`
    pub fn num_input_bits(&self) -> usize {
        self.circuit.num_input_bits()
    }

    /// `K`: `S` with ancilla checks, `n` without.
    pub fn num_input_checks(&self) -> usize {
        if self.include_ancilla_checks {
            self.num_qubits()
        } else {
            self.num_input_bits()
        }
    }

    /// Lower bound on the ground energy of rejecting instances, `1/(2(T+1)³)`.
    pub fn soundness_bound(&self) -> f64 {
        soundness_bound(self.num_steps())
    }

    /// `2^S · (T+1)`
    pub fn dim(&self) -> usize {
        self.circuit.data_dim() * (self.num_steps() + 1)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    fn check_state(&self, psi: &ClockedState) -> Result<()> {
        if psi.data_qubits != self.num_qubits() || psi.num_steps != self.num_steps() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: psi.amplitudes.len(),
            });
        }
        Ok(())
    }

    /// Exact action of a single term on an arbitrary clocked vector.
    pub fn apply_term(&self, term: TermTag, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(v.len())?;
        let mut out = vec![ZERO; v.len()];
        self.add_term(term, v, &mut out);
        Ok(out)
    }

    /// `H_x v`, summed term by term in list order.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(v.len())?;
        let mut out = vec![ZERO; v.len()];
        for &term in &self.terms {
            self.add_term(term, v, &mut out);
        }
        Ok(out)
    }

    /// `out += term · v`
    fn add_term(&self, term: TermTag, v: &[Complex64], out: &mut [Complex64]) {
        let s = self.num_qubits();
        let d = 1usize << s;
        let bit = |q: usize| 1usize << (s - q);
        match term {
            TermTag::In(i) => {
                let b = bit(i);
                let want = if self.input.bit(i) { b } else { 0 };
                for k in (0..d).filter(|k| k & b != want) {
                    out[k] += v[k];
                }
            }
            TermTag::AncillaIn(i) => {
                let b = bit(i);
                for k in (0..d).filter(|k| k & b != 0) {
                    out[k] += v[k];
                }
            }
            TermTag::Out => {
                let b = bit(1);
                let base = self.num_steps() * d;
                for k in (0..d).filter(|k| k & b == 0) {
                    out[base + k] += v[base + k];
                }
            }
            TermTag::Prop(t) => {
                let (lo, hi) = ((t - 1) * d, t * d);
                let prev = &v[lo..hi];
                let cur = &v[hi..hi + d];
                // ½(ψ_{t−1} − U_t† ψ_t) on block t−1, ½(ψ_t − U_t ψ_{t−1}) on block t
                let mut back = cur.to_vec();
                self.circuit.apply_step(t, &mut back, true);
                let mut fwd = prev.to_vec();
                self.circuit.apply_step(t, &mut fwd, false);
                for k in 0..d {
                    out[lo + k] += 0.5 * (prev[k] - back[k]);
                    out[hi + k] += 0.5 * (cur[k] - fwd[k]);
                }
            }
        }
    }

    /// Dense `H_x`, assembled from Kronecker-structured term matrices
    /// independently of [`apply`](Self::apply).
    pub fn materialize_dense(&self) -> Result<DMatrix<Complex64>> {
        self.check_cap()?;
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for &term in &self.terms {
            m += dense::term_matrix(self, term);
        }
        Ok(m)
    }

    /// Dense matrix of a single term.
    pub fn materialize_term(&self, term: TermTag) -> Result<DMatrix<Complex64>> {
        self.check_cap()?;
        Ok(dense::term_matrix(self, term))
    }

    pub(crate) fn check_cap(&self) -> Result<()> {
        if self.dim() > DENSE_CAP {
            return Err(Error::DenseCap {
                dim: self.dim(),
                cap: DENSE_CAP,
            });
        }
        Ok(())
    }

    /// The history state of this Hamiltonian's circuit and input.
    pub fn history_state(&self) -> ClockedState {
        history_state(&self.circuit, &self.input).expect("input validated at build time")
    }

    /// Rayleigh quotient `⟨ψ|H_x|ψ⟩` for a unit `ψ`.
    pub fn energy(&self, psi: &ClockedState) -> Result<f64> {
        self.check_state(psi)?;
        let norm = linalg::norm(&psi.amplitudes);
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::Norm { norm });
        }
        let e = linalg::inner(&psi.amplitudes, &self.apply(&psi.amplitudes)?);
        if e.im.abs() > 1e-12 * (self.terms.len().max(1) as f64) {
            return Err(Error::ImaginaryEnergy(e.im));
        }
        Ok(e.re)
    }
}

/// `1/(2(T+1)³)`
pub fn soundness_bound(num_steps: usize) -> f64 {
    let t1 = (num_steps + 1) as f64;
    1.0 / (2.0 * t1 * t1 * t1)
}

/// `(T+1)^{-1/2} Σ_{t=0}^{T} U_t⋯U_1|χ⟩ ⊗ |t⟩_C`.
pub fn history_state(circuit: &Circuit, x: &Bits) -> Result<ClockedState> {
    let states = circuit.prefix_states(x)?;
    let scale = 1.0 / ((circuit.num_steps() + 1) as f64).sqrt();
    let amplitudes = states
        .into_iter()
        .flat_map(|s| s.into_amplitudes())
        .map(|a| a * scale)
        .collect();
    ClockedState::new(circuit.num_qubits(), circuit.num_steps(), amplitudes)
}

/// Serializable listing of a Hamiltonian's terms.
#[derive(Debug, Clone, Serialize)]
pub struct TermDump {
    pub qubits: usize,
    pub input_bits: usize,
    pub steps: usize,
    pub input: String,
    pub ancilla_checks: bool,
    pub dim: usize,
    pub terms: Vec<TermEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TermEntry {
    pub tag: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Row-major `[re, im]` entries of the dense term.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
}

impl CircuitHamiltonian {
    /// Term listing, with dense matrices when `with_matrices` is set.
    pub fn dump(&self, with_matrices: bool) -> Result<TermDump> {
        let terms = self
            .terms
            .iter()
            .map(|&term| {
                let matrix = if with_matrices {
                    let m = self.materialize_term(term)?;
                    // nalgebra is column-major; emit rows
                    Some(m.transpose().iter().map(|z| [z.re, z.im]).collect())
                } else {
                    None
                };
                Ok(TermEntry {
                    tag: term.kind(),
                    index: term.index(),
                    matrix,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TermDump {
            qubits: self.num_qubits(),
            input_bits: self.num_input_bits(),
            steps: self.num_steps(),
            input: self.input.to_string(),
            ancilla_checks: self.include_ancilla_checks,
            dim: self.dim(),
            terms,
        })
    }
}
