use thiserror::Error;

/// Problems with a single gate, independent of its position in a circuit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("target index must be ≥ 1")]
    ZeroTarget,
    #[error("target {target} exceeds qubit count {qubits}")]
    TargetOutOfRange { target: usize, qubits: usize },
    #[error("duplicate target {0}")]
    DuplicateTarget(usize),
    #[error("{name} expects {expected} targets, got {got}")]
    Arity {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("gates act on 1 to 3 qubits, got {0} targets")]
    UnsupportedArity(usize),
    #[error("matrix has {got} entries, {expected} needed for {targets} targets")]
    MatrixShape {
        got: usize,
        expected: usize,
        targets: usize,
    },
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("unknown gate name {0:?}")]
    UnknownName(String),
}

/// Errors produced while building circuits, Hamiltonians and reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gate {position}: {source}")]
    Gate { position: usize, source: GateError },
    #[error("circuit: {0}")]
    BadCircuit(String),
    #[error("input has {got} bits, circuit expects {expected}")]
    InputLength { expected: usize, got: usize },
    #[error("input must consist of '0' and '1', found {0:?}")]
    InputChar(char),
    #[error("step {t} outside [0, {max}]")]
    StepOutOfRange { t: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("state norm {norm} deviates from 1")]
    Norm { norm: f64 },
    #[error("Rayleigh quotient has imaginary residue {0:.3e}")]
    ImaginaryEnergy(f64),
    #[error("dimension {dim} exceeds dense cap {cap}")]
    DenseCap { dim: usize, cap: usize },
    #[error("diagonalization failed: {0}")]
    Diagonalization(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, tol {tol:.1e})")]
    NoConvergence { iterations: usize, residual: f64, tol: f64 },
    #[error("eigenpair residual {residual:.3e} exceeds 1e-8")]
    Residual { residual: f64 },
    #[error("truth table: {0}")]
    TruthTable(String),
    #[error("{0}")]
    Format(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
