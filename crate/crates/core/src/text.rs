//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! qubits 3
//! h 0
//! cx 0 1
//! rz 2 0.7853981633974483
//! cswap 0 1 2
//! gphase -0.5
//! ```
//!
//! The first non-blank, non-comment line is `qubits N`. Every other line is
//! `NAME q0 q1 ... [angle]`: the gate name, its qubits (controls first) and,
//! for `ry`, `rz` and `gphase`, one angle in radians. Names: `x h s sdg t tdg
//! sx sxdg ry rz cx cz swap cswap ccx gphase`. `#` starts a comment. Angles
//! are written in shortest round-trip form, so writing then parsing is
//! lossless. `unitary` and `controlled` instructions have no text form.

use std::fmt::Write as _;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};

pub fn to_text(circuit: &Circuit) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", circuit.num_qubits());
    for gate in circuit.instructions() {
        let angle = match gate.kind {
            GateKind::RY(t) | GateKind::RZ(t) | GateKind::GlobalPhase(t) => Some(t),
            GateKind::Unitary(_) | GateKind::Controlled { .. } => {
                return Err(Error::UnsupportedGate(format!(
                    "{} has no text representation; transpile first",
                    gate.name()
                )))
            }
            _ => None,
        };
        out.push_str(gate.name());
        for q in &gate.qubits {
            let _ = write!(out, " {q}");
        }
        if let Some(t) = angle {
            let _ = write!(out, " {t:?}");
        }
        out.push('\n');
    }
    Ok(out)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn kind_from_name(name: &str, angle: Option<f64>) -> Option<GateKind> {
    let kind = match (name, angle) {
        ("x", None) => GateKind::X,
        ("h", None) => GateKind::H,
        ("s", None) => GateKind::S,
        ("sdg", None) => GateKind::Sdg,
        ("t", None) => GateKind::T,
        ("tdg", None) => GateKind::Tdg,
        ("sx", None) => GateKind::SX,
        ("sxdg", None) => GateKind::SXdg,
        ("cx", None) => GateKind::CX,
        ("cz", None) => GateKind::CZ,
        ("swap", None) => GateKind::Swap,
        ("cswap", None) => GateKind::CSwap,
        ("ccx", None) => GateKind::CCX,
        ("ry", Some(t)) => GateKind::RY(t),
        ("rz", Some(t)) => GateKind::RZ(t),
        ("gphase", Some(t)) => GateKind::GlobalPhase(t),
        _ => return None,
    };
    Some(kind)
}

fn takes_angle(name: &str) -> bool {
    matches!(name, "ry" | "rz" | "gphase")
}

pub fn parse_text(src: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let name = tokens.next().expect("non-empty line");
        let args: Vec<&str> = tokens.collect();

        let Some(c) = circuit.as_mut() else {
            if name != "qubits" || args.len() != 1 {
                return Err(parse_err(line_no, "expected header `qubits N`"));
            }
            let n = args[0]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad qubit count {:?}", args[0])))?;
            circuit = Some(Circuit::new(n));
            continue;
        };
        if name == "qubits" {
            return Err(parse_err(line_no, "duplicate `qubits` header"));
        }

        let (qubit_args, angle) = if takes_angle(name) {
            let (last, rest) = args
                .split_last()
                .ok_or_else(|| parse_err(line_no, format!("{name} needs an angle")))?;
            let t: f64 = last
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad angle {last:?}")))?;
            (rest, Some(t))
        } else {
            (&args[..], None)
        };
        let kind = kind_from_name(name, angle)
            .ok_or_else(|| parse_err(line_no, format!("unknown gate {name:?}")))?;
        let qubits = qubit_args
            .iter()
            .map(|a| {
                a.parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("bad qubit {a:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        c.push(Gate::new(kind, qubits))
            .map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    circuit.ok_or_else(|| parse_err(0, "missing `qubits N` header"))
}
