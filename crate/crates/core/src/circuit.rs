//! Quantum circuits over `S` data qubits and exact statevector simulation.
//!
//! Qubits are numbered from 1. Qubit 1 is the most significant bit of a
//! basis index, so on three qubits `|011⟩` is index 3 and qubit 1 reads 0.
//! Gates with several targets use the same convention locally: the first
//! target is the most significant bit of the gate's own matrix index, which
//! makes `CNOT [c, t]` control on `c` and `TOFFOLI [a, b, t]` control on
//! `a` and `b`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, GateError, Result};

/// Tolerance for `U†U = I` on explicit gate matrices.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance on the norm of states handed in by callers.
pub const NORM_TOL: f64 = 1e-10;
/// Largest supported register, keeps `2^S` well inside memory.
pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    I,
    X,
    H,
    Cnot,
    Toffoli,
    /// Row-major `2^k × 2^k` unitary for `k` targets.
    Matrix(Vec<Complex64>),
}

impl GateKind {
    pub fn from_name(name: &str) -> Result<Self, GateError> {
        match name {
            "I" => Ok(GateKind::I),
            "X" => Ok(GateKind::X),
            "H" => Ok(GateKind::H),
            "CNOT" => Ok(GateKind::Cnot),
            "TOFFOLI" => Ok(GateKind::Toffoli),
            other => Err(GateError::UnknownName(other.to_string())),
        }
    }

    /// Name used in circuit files, `None` for explicit matrices.
    pub fn name(&self) -> Option<&'static str> {
        match self {
            GateKind::I => Some("I"),
            GateKind::X => Some("X"),
            GateKind::H => Some("H"),
            GateKind::Cnot => Some("CNOT"),
            GateKind::Toffoli => Some("TOFFOLI"),
            GateKind::Matrix(_) => None,
        }
    }
}

/// A unitary on 1 to 3 distinct qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
}

impl Gate {
    /// Checks arity, distinctness, matrix shape and unitarity. Range checks
    /// against a register size happen when the gate joins a [`Circuit`].
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self, GateError> {
        let k = targets.len();
        if !(1..=3).contains(&k) {
            return Err(GateError::UnsupportedArity(k));
        }
        if targets.contains(&0) {
            return Err(GateError::ZeroTarget);
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(GateError::DuplicateTarget(*t));
            }
        }
        let expected = match &kind {
            GateKind::I | GateKind::X | GateKind::H => Some(1),
            GateKind::Cnot => Some(2),
            GateKind::Toffoli => Some(3),
            GateKind::Matrix(m) => {
                let d = 1usize << k;
                if m.len() != d * d {
                    return Err(GateError::MatrixShape {
                        got: m.len(),
                        expected: d * d,
                        targets: k,
                    });
                }
                let dev = unitarity_deviation(m, d);
                if !(dev <= UNITARITY_TOL) {
                    return Err(GateError::NonUnitary(dev));
                }
                None
            }
        };
        if let Some(expected) = expected {
            if expected != k {
                return Err(GateError::Arity {
                    name: kind.name().unwrap_or("matrix"),
                    expected,
                    got: k,
                });
            }
        }
        Ok(Gate { kind, targets })
    }

    pub fn identity(q: usize) -> Self {
        Self::named(GateKind::I, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::named(GateKind::X, vec![q])
    }

    pub fn h(q: usize) -> Self {
        Self::named(GateKind::H, vec![q])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::named(GateKind::Cnot, vec![control, target])
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Self::named(GateKind::Toffoli, vec![c1, c2, target])
    }

    pub fn from_matrix(matrix: Vec<Complex64>, targets: Vec<usize>) -> Result<Self, GateError> {
        Self::new(GateKind::Matrix(matrix), targets)
    }

    fn named(kind: GateKind, targets: Vec<usize>) -> Self {
        Self::new(kind, targets).expect("named gate with invalid targets")
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// True for gates that permute computational basis states by construction.
    pub fn is_classical(&self) -> bool {
        matches!(
            self.kind,
            GateKind::I | GateKind::X | GateKind::Cnot | GateKind::Toffoli
        )
    }

    /// Local row-major matrix of dimension `2^arity`.
    pub fn matrix(&self) -> Vec<Complex64> {
        let d = 1usize << self.arity();
        let perm = |f: &dyn Fn(usize) -> usize| {
            let mut m = vec![ZERO; d * d];
            for c in 0..d {
                m[f(c) * d + c] = ONE;
            }
            m
        };
        match &self.kind {
            GateKind::I => perm(&|c| c),
            GateKind::X => perm(&|c| c ^ 1),
            GateKind::Cnot => perm(&|c| if c & 0b10 != 0 { c ^ 1 } else { c }),
            GateKind::Toffoli => perm(&|c| if c & 0b110 == 0b110 { c ^ 1 } else { c }),
            GateKind::H => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                vec![s, s, s, -s]
            }
            GateKind::Matrix(m) => m.clone(),
        }
    }

    pub(crate) fn check_range(&self, qubits: usize) -> Result<(), GateError> {
        match self.targets.iter().find(|&&t| t > qubits) {
            Some(&target) => Err(GateError::TargetOutOfRange { target, qubits }),
            None => Ok(()),
        }
    }

    /// Applies the gate (or its adjoint) in place to a `2^qubits` amplitude slice.
    pub(crate) fn apply_in_place(&self, amps: &mut [Complex64], qubits: usize, adjoint: bool) {
        let bit = |q: usize| 1usize << (qubits - q);
        let t = &self.targets;
        match &self.kind {
            GateKind::I => {}
            GateKind::X => swap_where(amps, 0, bit(t[0])),
            GateKind::Cnot => swap_where(amps, bit(t[0]), bit(t[1])),
            GateKind::Toffoli => swap_where(amps, bit(t[0]) | bit(t[1]), bit(t[2])),
            GateKind::H => {
                let flip = bit(t[0]);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..amps.len() {
                    if i & flip == 0 {
                        let (a, b) = (amps[i], amps[i | flip]);
                        amps[i] = (a + b) * s;
                        amps[i | flip] = (a - b) * s;
                    }
                }
            }
            GateKind::Matrix(m) => {
                let k = t.len();
                let d = 1usize << k;
                // offsets[l]: basis offset of local index l (first target is the MSB)
                let offsets: Vec<usize> = (0..d)
                    .map(|l| (0..k).filter(|j| l & (1 << (k - 1 - j)) != 0).map(|j| bit(t[j])).sum())
                    .collect();
                let mask: usize = t.iter().map(|&q| bit(q)).sum();
                let mut local = vec![ZERO; d];
                for base in 0..amps.len() {
                    if base & mask != 0 {
                        continue;
                    }
                    for (l, off) in offsets.iter().enumerate() {
                        local[l] = amps[base | off];
                    }
                    for (r, off) in offsets.iter().enumerate() {
                        amps[base | off] = (0..d)
                            .map(|c| if adjoint { m[c * d + r].conj() } else { m[r * d + c] } * local[c])
                            .sum();
                    }
                }
            }
        }
    }
}

/// Swaps `i` and `i | flip` for every `i` with all `controls` set and `flip` clear.
fn swap_where(amps: &mut [Complex64], controls: usize, flip: usize) {
    for i in 0..amps.len() {
        if i & controls == controls && i & flip == 0 {
            amps.swap(i, i | flip);
        }
    }
}

/// Largest entry of `|U†U − I|` for a row-major `d × d` matrix.
pub(crate) fn unitarity_deviation(m: &[Complex64], d: usize) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut s = ZERO;
            for k in 0..d {
                s += m[k * d + i].conj() * m[k * d + j];
            }
            if i == j {
                s -= ONE;
            }
            let e = s.norm();
            if e.is_nan() {
                return e;
            }
            dev = dev.max(e);
        }
    }
    dev
}

/// Classical input string; bit `i` (1-based) is `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    /// The `len`-bit string whose binary value is `value`, `x_1` most significant.
    pub fn from_index(value: usize, len: usize) -> Self {
        Bits((0..len).map(|i| value >> (len - 1 - i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit `x_i` for 1-based `i`.
    pub fn bit(&self, i: usize) -> bool {
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Binary value with `x_1` as the most significant bit.
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| acc << 1 | b as usize)
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InputChar(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Normalized statevector over `S` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DataState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl DataState {
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: amplitudes.len(),
            });
        }
        let norm = crate::linalg::norm(&amplitudes);
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::Norm { norm });
        }
        Ok(DataState { num_qubits, amplitudes })
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        DataState { num_qubits, amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Probability that measuring qubit `q` yields 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << (self.num_qubits - q);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Applies `gate ⊗ I` to `state` over an `S`-qubit register.
pub fn apply_gate(state: &DataState, gate: &Gate, num_qubits: usize) -> Result<DataState> {
    if state.num_qubits != num_qubits {
        return Err(Error::Dimension {
            expected: 1 << num_qubits,
            got: state.amplitudes.len(),
        });
    }
    gate.check_range(num_qubits)
        .map_err(|source| Error::Gate { position: 1, source })?;
    if let GateKind::Matrix(m) = &gate.kind {
        let dev = unitarity_deviation(m, 1 << gate.arity());
        if !(dev <= UNITARITY_TOL) {
            return Err(Error::Gate {
                position: 1,
                source: GateError::NonUnitary(dev),
            });
        }
    }
    let mut out = state.clone();
    gate.apply_in_place(&mut out.amplitudes, num_qubits, false);
    Ok(out)
}

/// Ordered gate list `U_1 … U_T` on `S` qubits, the first `n` of which
/// carry the classical input.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_input_bits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_input_bits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::BadCircuit(format!(
                "qubits must lie in [1, {MAX_QUBITS}], got {num_qubits}"
            )));
        }
        if num_input_bits == 0 || num_input_bits > num_qubits {
            return Err(Error::BadCircuit(format!(
                "input_bits must lie in [1, {num_qubits}], got {num_input_bits}"
            )));
        }
        if gates.is_empty() {
            return Err(Error::BadCircuit("a circuit needs at least one gate".into()));
        }
        for (i, g) in gates.iter().enumerate() {
            g.check_range(num_qubits).map_err(|source| Error::Gate {
                position: i + 1,
                source,
            })?;
        }
        Ok(Circuit {
            num_qubits,
            num_input_bits,
            gates,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_input_bits(&self) -> usize {
        self.num_input_bits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of gates `T`.
    pub fn num_steps(&self) -> usize {
        self.gates.len()
    }

    /// Data-space dimension `2^S`.
    pub fn data_dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn check_input(&self, x: &Bits) -> Result<()> {
        if x.len() != self.num_input_bits {
            return Err(Error::InputLength {
                expected: self.num_input_bits,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `|x⟩ ⊗ |0⟩^{S−n}`.
    pub fn start_state(&self, x: &Bits) -> Result<DataState> {
        self.check_input(x)?;
        let index = x.to_index() << (self.num_qubits - self.num_input_bits);
        Ok(DataState::basis(self.num_qubits, index))
    }

    /// `U_t ⋯ U_1 |χ⟩`, with `t = 0` giving the start state.
    pub fn prefix_state(&self, x: &Bits, t: usize) -> Result<DataState> {
        if t > self.num_steps() {
            return Err(Error::StepOutOfRange {
                t,
                max: self.num_steps(),
            });
        }
        let mut state = self.start_state(x)?;
        for g in &self.gates[..t] {
            g.apply_in_place(&mut state.amplitudes, self.num_qubits, false);
        }
        Ok(state)
    }

    /// All prefix states for `t = 0..=T`.
    pub fn prefix_states(&self, x: &Bits) -> Result<Vec<DataState>> {
        let mut state = self.start_state(x)?;
        let mut out = Vec::with_capacity(self.num_steps() + 1);
        out.push(state.clone());
        for g in &self.gates {
            g.apply_in_place(&mut state.amplitudes, self.num_qubits, false);
            out.push(state.clone());
        }
        Ok(out)
    }

    /// Probability that qubit 1 reads 1 after the full circuit.
    pub fn acceptance_probability(&self, x: &Bits) -> Result<f64> {
        Ok(self.prefix_state(x, self.num_steps())?.prob_one(1))
    }

    /// Applies `U_t` (1-based) or its adjoint in place.
    pub(crate) fn apply_step(&self, t: usize, amps: &mut [Complex64], adjoint: bool) {
        self.gates[t - 1].apply_in_place(amps, self.num_qubits, adjoint);
    }
}
