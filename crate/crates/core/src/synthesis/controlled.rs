//! Gate-wise construction of controlled circuits.
//!
//! Single-qubit gates use the two-CX `A.X.B.X.C` construction, CX becomes a
//! six-CX Toffoli, CZ and SWAP are conjugations of one Toffoli, and a global
//! phase becomes a phase gate (`RZ` plus bookkeeping) on the control.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind, Polarity};

use super::decompose::{cswap_gates, toffoli_gates};
use super::one_qubit::zyz;
use super::{SynthesizedPrep, ANGLE_TOL};

/// Controlled version of a preparation on `1 + n` qubits: qubit 0 is the
/// control, the preparation sits on qubits `1..=n`. The tracked global phase
/// is undone on the active branch, so that branch maps `|0...0>` to the
/// target exactly.
pub fn controlled(prep: &SynthesizedPrep, polarity: Polarity) -> Result<Circuit> {
    controlled_circuit(&prep.exact_circuit(), polarity)
}

/// Controlled version of an arbitrary circuit; control on qubit 0, body on `1..=n`.
pub fn controlled_circuit(body: &Circuit, polarity: Polarity) -> Result<Circuit> {
    let n = body.num_qubits();
    let map: Vec<usize> = (1..=n).collect();
    let mut out = Circuit::new(n + 1);
    if polarity == Polarity::OnZero {
        out.push(Gate::x(0))?;
    }
    for gate in body.instructions() {
        emit_controlled(&mut out, 0, &gate.remapped(&map))?;
    }
    if polarity == Polarity::OnZero {
        out.push(Gate::x(0))?;
    }
    Ok(out)
}

/// Rewrites composite kinds (SWAP, CCX, CSWAP, CONTROLLED) into one level of
/// simpler instructions. Returns `None` for kinds that are already primitive.
pub(crate) fn lower_composite(gate: &Gate) -> Result<Option<Vec<Gate>>> {
    let q = &gate.qubits;
    let lowered = match &gate.kind {
        GateKind::Swap => vec![
            Gate::cx(q[0], q[1]),
            Gate::cx(q[1], q[0]),
            Gate::cx(q[0], q[1]),
        ],
        GateKind::CCX => toffoli_gates(q[0], q[1], q[2]),
        GateKind::CSwap => cswap_gates(q[0], q[1], q[2]),
        GateKind::Controlled { polarity, body } => controlled_circuit(body, *polarity)?
            .into_instructions()
            .into_iter()
            .map(|g| g.remapped(q))
            .collect(),
        GateKind::Unitary(u) if u.nrows() > 2 => {
            return Err(Error::UnsupportedGate(format!(
                "{}-qubit unitary payload cannot be lowered",
                q.len()
            )))
        }
        _ => return Ok(None),
    };
    Ok(Some(lowered))
}

fn push_rotation(out: &mut Circuit, ry: bool, q: usize, theta: f64) -> Result<()> {
    if theta.abs() >= ANGLE_TOL {
        out.push(if ry {
            Gate::ry(q, theta)
        } else {
            Gate::rz(q, theta)
        })?;
    }
    Ok(())
}

/// `diag(1, e^{i phi})` on `q` = `e^{i phi/2} RZ(phi)`.
fn push_phase_gate(out: &mut Circuit, q: usize, phi: f64) -> Result<()> {
    if phi.abs() >= ANGLE_TOL {
        out.push(Gate::rz(q, phi))?;
        out.push(Gate::global_phase(phi / 2.0))?;
    }
    Ok(())
}

fn push_toffoli(out: &mut Circuit, c0: usize, c1: usize, t: usize) -> Result<()> {
    for g in toffoli_gates(c0, c1, t) {
        out.push(g)?;
    }
    Ok(())
}

fn emit_controlled(out: &mut Circuit, c: usize, gate: &Gate) -> Result<()> {
    if let Some(lowered) = lower_composite(gate)? {
        // SWAP gets the cheaper CSWAP pattern instead of three Toffolis.
        if let GateKind::Swap = gate.kind {
            for g in cswap_gates(c, gate.qubits[0], gate.qubits[1]) {
                out.push(g)?;
            }
            return Ok(());
        }
        for g in &lowered {
            emit_controlled(out, c, g)?;
        }
        return Ok(());
    }

    let q = &gate.qubits;
    match &gate.kind {
        GateKind::GlobalPhase(phi) => push_phase_gate(out, c, *phi),
        GateKind::X => {
            out.push(Gate::cx(c, q[0]))?;
            Ok(())
        }
        GateKind::RY(theta) | GateKind::RZ(theta) => {
            let ry = matches!(gate.kind, GateKind::RY(_));
            push_rotation(out, ry, q[0], theta / 2.0)?;
            out.push(Gate::cx(c, q[0]))?;
            push_rotation(out, ry, q[0], -theta / 2.0)?;
            out.push(Gate::cx(c, q[0]))?;
            Ok(())
        }
        GateKind::CX => push_toffoli(out, c, q[0], q[1]),
        GateKind::CZ => {
            out.push(Gate::h(q[1]))?;
            push_toffoli(out, c, q[0], q[1])?;
            out.push(Gate::h(q[1]))?;
            Ok(())
        }
        kind => {
            let m = kind
                .single_qubit_matrix()
                .ok_or_else(|| Error::UnsupportedGate(kind.name().to_string()))?;
            let z = zyz(&m);
            let t = q[0];
            push_rotation(out, false, t, (z.delta - z.beta) / 2.0)?;
            out.push(Gate::cx(c, t))?;
            push_rotation(out, false, t, -(z.delta + z.beta) / 2.0)?;
            push_rotation(out, true, t, -z.gamma / 2.0)?;
            out.push(Gate::cx(c, t))?;
            push_rotation(out, true, t, z.gamma / 2.0)?;
            push_rotation(out, false, t, z.beta)?;
            push_phase_gate(out, c, z.phase)
        }
    }
}
