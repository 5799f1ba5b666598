// SPDX-License-Identifier: Apache-2.0

//! Gate-level netlists for adders and multipliers.
//!
//! Wires are numbered densely: input bits first (port order, bit 0 first),
//! then one wire per gate in creation order. Every gate operand refers to
//! an earlier wire, so gate order is a topological order.

mod build;
mod verify;
mod verilog;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compressor_tree::CompressorError;
use crate::prefix_tree::PrefixError;

pub use build::{build_adder_netlist, build_multiplier_netlist, prefix_adder_into};
pub use verify::{
    random_vectors, verify, verify_netlist, Counterexample, Design, VerifyMode, VerifyReport,
    MAX_EXHAUSTIVE_VECTORS,
};
pub use verilog::emit_verilog;

pub type WireId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error(transparent)]
    Prefix(#[from] PrefixError),
    #[error(transparent)]
    Compressor(#[from] CompressorError),
    #[error("adder width {found} does not match the required {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("input port '{0}' is not assigned")]
    UnboundInput(String),
    #[error("expected {expected} input ports, got {found}")]
    PortCount { expected: usize, found: usize },
    #[error("invalid module name '{0}'")]
    InvalidModuleName(String),
    #[error("{vectors} vectors exceed the exhaustive limit of {limit}")]
    TooManyVectors { vectors: u128, limit: u128 },
    #[error("ports wider than 64 bits are not supported by value simulation ({0} bits)")]
    PortTooWide(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    And(WireId, WireId),
    Or(WireId, WireId),
    Xor(WireId, WireId),
    Not(WireId),
    Const0,
}

impl Gate {
    pub fn is_logic(&self) -> bool {
        !matches!(self, Gate::Const0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPort {
    pub name: String,
    pub bits: Vec<WireId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    inputs: Vec<Port>,
    input_bits: usize,
    gates: Vec<Gate>,
    outputs: Vec<OutputPort>,
}

impl Netlist {
    pub fn inputs(&self) -> &[Port] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[OutputPort] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn wire_count(&self) -> usize {
        self.input_bits + self.gates.len()
    }

    /// Logic gates only; constant drivers are not counted.
    pub fn gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_logic()).count()
    }

    /// Evaluates 64 input vectors at once. `inputs[port][bit]` holds one
    /// lane per vector; the result is laid out the same way for outputs.
    pub fn simulate_packed(&self, inputs: &[Vec<u64>]) -> Result<Vec<Vec<u64>>, NetlistError> {
        if inputs.len() != self.inputs.len() {
            return Err(NetlistError::PortCount {
                expected: self.inputs.len(),
                found: inputs.len(),
            });
        }
        let mut wires = Vec::with_capacity(self.wire_count());
        for (port, lanes) in self.inputs.iter().zip(inputs) {
            if lanes.len() != port.width {
                return Err(NetlistError::UnboundInput(port.name.clone()));
            }
            wires.extend_from_slice(lanes);
        }
        for gate in &self.gates {
            let v = match *gate {
                Gate::And(a, b) => wires[a] & wires[b],
                Gate::Or(a, b) => wires[a] | wires[b],
                Gate::Xor(a, b) => wires[a] ^ wires[b],
                Gate::Not(a) => !wires[a],
                Gate::Const0 => 0,
            };
            wires.push(v);
        }
        Ok(self
            .outputs
            .iter()
            .map(|o| o.bits.iter().map(|&w| wires[w]).collect())
            .collect())
    }

    /// Evaluates one vector given as integer port values (ports ≤ 128 bits).
    pub fn simulate(&self, values: &[u128]) -> Result<Vec<u128>, NetlistError> {
        if values.len() != self.inputs.len() {
            return Err(NetlistError::PortCount {
                expected: self.inputs.len(),
                found: values.len(),
            });
        }
        let lanes: Vec<Vec<u64>> = self
            .inputs
            .iter()
            .zip(values)
            .map(|(p, &v)| {
                (0..p.width)
                    .map(|b| if b < 128 && (v >> b) & 1 == 1 { 1 } else { 0 })
                    .collect()
            })
            .collect();
        let out = self.simulate_packed(&lanes)?;
        Ok(out
            .iter()
            .map(|bits| {
                bits.iter()
                    .enumerate()
                    .take(128)
                    .fold(0u128, |acc, (b, &lane)| acc | (((lane & 1) as u128) << b))
            })
            .collect())
    }

    /// Copy with one gate replaced, for mutation testing.
    pub fn with_gate(&self, index: usize, gate: Gate) -> Netlist {
        let mut copy = self.clone();
        copy.gates[index] = gate;
        copy
    }
}

/// Incremental netlist construction.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    inputs: Vec<Port>,
    input_bits: usize,
    gates: Vec<Gate>,
    outputs: Vec<OutputPort>,
    const0: Option<WireId>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares an input port; must precede every gate.
    pub fn input(&mut self, name: &str, width: usize) -> Vec<WireId> {
        assert!(
            self.gates.is_empty(),
            "inputs must be declared before gates"
        );
        let first = self.input_bits;
        self.inputs.push(Port {
            name: name.to_string(),
            width,
        });
        self.input_bits += width;
        (first..first + width).collect()
    }

    fn push(&mut self, gate: Gate) -> WireId {
        self.gates.push(gate);
        self.input_bits + self.gates.len() - 1
    }

    pub fn and(&mut self, a: WireId, b: WireId) -> WireId {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: WireId, b: WireId) -> WireId {
        self.push(Gate::Or(a, b))
    }

    pub fn xor(&mut self, a: WireId, b: WireId) -> WireId {
        self.push(Gate::Xor(a, b))
    }

    pub fn not(&mut self, a: WireId) -> WireId {
        self.push(Gate::Not(a))
    }

    /// Shared constant-zero driver.
    pub fn zero(&mut self) -> WireId {
        if let Some(w) = self.const0 {
            return w;
        }
        let w = self.push(Gate::Const0);
        self.const0 = Some(w);
        w
    }

    pub fn output(&mut self, name: &str, bits: Vec<WireId>) {
        self.outputs.push(OutputPort {
            name: name.to_string(),
            bits,
        });
    }

    pub fn finish(self) -> Netlist {
        Netlist {
            inputs: self.inputs,
            input_bits: self.input_bits,
            gates: self.gates,
            outputs: self.outputs,
        }
    }
}
