// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{Gate, Netlist, NetlistError};

const KEYWORDS: &[&str] = &[
    "always",
    "and",
    "assign",
    "begin",
    "buf",
    "case",
    "default",
    "else",
    "end",
    "endcase",
    "endmodule",
    "for",
    "function",
    "if",
    "initial",
    "inout",
    "input",
    "integer",
    "module",
    "nand",
    "nor",
    "not",
    "or",
    "output",
    "parameter",
    "reg",
    "wire",
    "xnor",
    "xor",
];

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
        && !KEYWORDS.contains(&name)
}

/// Structural Verilog, one continuous assignment per gate.
///
/// Every wire is named `w<index>` after its netlist wire id. The text is a
/// pure function of the netlist, gate order included.
pub fn emit_verilog(netlist: &Netlist, module_name: &str) -> Result<String, NetlistError> {
    if !valid_identifier(module_name) {
        return Err(NetlistError::InvalidModuleName(module_name.to_string()));
    }
    for name in netlist
        .inputs()
        .iter()
        .map(|p| &p.name)
        .chain(netlist.outputs().iter().map(|o| &o.name))
    {
        if !valid_identifier(name) {
            return Err(NetlistError::InvalidModuleName(name.clone()));
        }
    }

    let mut v = String::new();
    let ports: Vec<&str> = netlist
        .inputs()
        .iter()
        .map(|p| p.name.as_str())
        .chain(netlist.outputs().iter().map(|o| o.name.as_str()))
        .collect();
    // writing into a String cannot fail
    writeln!(v, "module {module_name} ({});", ports.join(", ")).unwrap();
    for p in netlist.inputs() {
        writeln!(v, "  input [{}:0] {};", p.width.saturating_sub(1), p.name).unwrap();
    }
    for o in netlist.outputs() {
        writeln!(
            v,
            "  output [{}:0] {};",
            o.bits.len().saturating_sub(1),
            o.name
        )
        .unwrap();
    }
    if netlist.wire_count() > 0 {
        writeln!(v).unwrap();
        for w in 0..netlist.wire_count() {
            writeln!(v, "  wire w{w};").unwrap();
        }
        writeln!(v).unwrap();
    }
    let mut w = 0;
    for p in netlist.inputs() {
        for bit in 0..p.width {
            writeln!(v, "  assign w{w} = {}[{bit}];", p.name).unwrap();
            w += 1;
        }
    }
    for gate in netlist.gates() {
        let rhs = match *gate {
            Gate::And(a, b) => format!("w{a} & w{b}"),
            Gate::Or(a, b) => format!("w{a} | w{b}"),
            Gate::Xor(a, b) => format!("w{a} ^ w{b}"),
            Gate::Not(a) => format!("~w{a}"),
            Gate::Const0 => "1'b0".to_string(),
        };
        writeln!(v, "  assign w{w} = {rhs};").unwrap();
        w += 1;
    }
    for o in netlist.outputs() {
        for (bit, wire) in o.bits.iter().enumerate() {
            writeln!(v, "  assign {}[{bit}] = w{wire};", o.name).unwrap();
        }
    }
    writeln!(v, "endmodule").unwrap();
    Ok(v)
}
