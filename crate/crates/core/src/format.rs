//! JSON file formats: circuits, truth tables and clocked proof states.
//!
//! Complex numbers are written as `[re, im]` pairs. Unknown fields are
//! rejected everywhere.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::hamiltonian::ClockedState;
use crate::revcomp::TruthTable;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    qubits: usize,
    input_bits: usize,
    gates: Vec<GateEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
    targets: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthTableFile {
    arity: usize,
    values: Vec<u8>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Format(format!("{what}: {e}"))
}

fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn to_pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

/// Parses and validates a circuit document.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let file: CircuitFile = serde_json::from_str(text).map_err(|e| json_error("circuit", e))?;
    let gates = file
        .gates
        .into_iter()
        .enumerate()
        .map(|(i, entry)| {
            let position = i + 1;
            let kind = match (entry.name, entry.matrix) {
                (Some(name), None) => GateKind::from_name(&name).map_err(|source| Error::Gate { position, source })?,
                (None, Some(m)) => GateKind::Matrix(to_complex(&m)),
                (Some(_), Some(_)) => {
                    return Err(Error::Format(format!(
                        "gate {position}: give either `name` or `matrix`, not both"
                    )))
                }
                (None, None) => return Err(Error::Format(format!("gate {position}: missing `name` or `matrix`"))),
            };
            Gate::new(kind, entry.targets).map_err(|source| Error::Gate { position, source })
        })
        .collect::<Result<Vec<_>>>()?;
    Circuit::new(file.qubits, file.input_bits, gates)
}

pub fn parse_circuit_file(path: impl AsRef<Path>) -> Result<Circuit> {
    parse_circuit(&read(path.as_ref())?)
}

/// Serializes a circuit; named gates keep their names.
pub fn circuit_to_json(circuit: &Circuit) -> String {
    let gates = circuit
        .gates()
        .iter()
        .map(|g| GateEntry {
            name: g.kind().name().map(str::to_string),
            matrix: match g.kind() {
                GateKind::Matrix(m) => Some(to_pairs(m)),
                _ => None,
            },
            targets: g.targets().to_vec(),
        })
        .collect();
    let file = CircuitFile {
        qubits: circuit.num_qubits(),
        input_bits: circuit.num_input_bits(),
        gates,
    };
    serde_json::to_string_pretty(&file).expect("circuit serializes")
}

pub fn parse_truth_table(text: &str) -> Result<TruthTable> {
    let file: TruthTableFile = serde_json::from_str(text).map_err(|e| json_error("truth table", e))?;
    let values = file
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| match v {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::TruthTable(format!("values[{i}] must be 0 or 1, got {other}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    TruthTable::new(file.arity, values)
}

pub fn parse_truth_table_file(path: impl AsRef<Path>) -> Result<TruthTable> {
    parse_truth_table(&read(path.as_ref())?)
}

pub fn truth_table_to_json(table: &TruthTable) -> String {
    let file = TruthTableFile {
        arity: table.arity(),
        values: table.values().iter().map(|&b| b as u8).collect(),
    };
    serde_json::to_string(&file).expect("truth table serializes")
}

/// Parses a proof state: an array of `2^S (T+1)` amplitude pairs of unit norm.
pub fn parse_state(text: &str, data_qubits: usize, num_steps: usize) -> Result<ClockedState> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| json_error("proof state", e))?;
    ClockedState::new(data_qubits, num_steps, to_complex(&pairs))
}

pub fn parse_state_file(path: impl AsRef<Path>, data_qubits: usize, num_steps: usize) -> Result<ClockedState> {
    parse_state(&read(path.as_ref())?, data_qubits, num_steps)
}

pub fn state_to_json(state: &ClockedState) -> String {
    serde_json::to_string(&to_pairs(state.amplitudes())).expect("state serializes")
}
