//! Lowering to the `{CZ, RZ, SX, X}` basis and depth accounting.

use std::f64::consts::{PI, TAU};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};

use super::controlled::lower_composite;
use super::one_qubit::basis_sequence;
use super::ANGLE_TOL;

/// The hardware basis `{CZ, RZ, SX, X}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BasisGateSet;

impl BasisGateSet {
    pub const NAMES: [&'static str; 4] = ["cz", "rz", "sx", "x"];

    /// Whether `kind` may appear in a transpiled circuit. Global-phase
    /// bookkeeping is allowed.
    pub fn admits(&self, kind: &GateKind) -> bool {
        matches!(
            kind,
            GateKind::CZ | GateKind::RZ(_) | GateKind::SX | GateKind::X | GateKind::GlobalPhase(_)
        )
    }
}

/// Rewrites `circuit` into `{CZ, RZ, SX, X}` plus at most one trailing
/// global-phase entry. The output unitary equals the input exactly (the
/// phase entry included). Consecutive RZ on a qubit are merged and
/// rotations below 1e-12 dropped.
pub fn transpile(circuit: &Circuit) -> Result<Circuit> {
    circuit.validate()?;
    let mut emitter = Emitter::new(circuit.num_qubits());
    for gate in circuit.instructions() {
        emitter.lower(gate)?;
    }
    emitter.finish()
}

/// Longest chain of gates sharing a qubit. Global-phase entries cost nothing.
pub fn depth(circuit: &Circuit) -> usize {
    let mut level = vec![0usize; circuit.num_qubits()];
    let mut deepest = 0;
    for gate in circuit.instructions() {
        if gate.is_global_phase() {
            continue;
        }
        let d = gate.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &gate.qubits {
            level[q] = d;
        }
        deepest = deepest.max(d);
    }
    deepest
}

/// Wraps an angle into `(-pi, pi]`, returning the number of `2 pi` turns removed.
fn wrap_angle(theta: f64) -> (f64, f64) {
    let turns = (theta / TAU).round();
    let mut wrapped = theta - turns * TAU;
    let mut turns = turns;
    if wrapped <= -PI {
        wrapped += TAU;
        turns -= 1.0;
    }
    (wrapped, turns)
}

struct Emitter {
    num_qubits: usize,
    gates: Vec<Option<Gate>>,
    // indices of live gates touching each qubit, most recent last
    stacks: Vec<Vec<usize>>,
    phase: f64,
}

impl Emitter {
    fn new(num_qubits: usize) -> Self {
        Emitter {
            num_qubits,
            gates: Vec::new(),
            stacks: vec![Vec::new(); num_qubits],
            phase: 0.0,
        }
    }

    fn lower(&mut self, gate: &Gate) -> Result<()> {
        if let Some(parts) = lower_composite(gate)? {
            return parts.iter().try_for_each(|g| self.lower(g));
        }
        let q = &gate.qubits;
        match &gate.kind {
            GateKind::GlobalPhase(phi) => self.phase += phi,
            GateKind::RZ(theta) => self.emit_rz(q[0], *theta),
            GateKind::X | GateKind::SX | GateKind::CZ => self.emit(gate.clone()),
            GateKind::CX => {
                self.emit_single(&GateKind::H, q[1])?;
                self.emit(Gate::cz(q[0], q[1]));
                self.emit_single(&GateKind::H, q[1])?;
            }
            kind => self.emit_single(kind, q[0])?,
        }
        Ok(())
    }

    fn emit_single(&mut self, kind: &GateKind, q: usize) -> Result<()> {
        let m = kind
            .single_qubit_matrix()
            .ok_or_else(|| Error::UnsupportedGate(kind.name().to_string()))?;
        let (kinds, phase) = basis_sequence(&m);
        self.phase += phase;
        for k in kinds {
            match k {
                GateKind::RZ(theta) => self.emit_rz(q, theta),
                other => self.emit(Gate::new(other, vec![q])),
            }
        }
        Ok(())
    }

    fn emit(&mut self, gate: Gate) {
        let idx = self.gates.len();
        for &q in &gate.qubits {
            self.stacks[q].push(idx);
        }
        self.gates.push(Some(gate));
    }

    fn emit_rz(&mut self, q: usize, theta: f64) {
        let previous = self.stacks[q]
            .last()
            .copied()
            .and_then(|idx| match self.gates[idx] {
                Some(Gate {
                    kind: GateKind::RZ(prev),
                    ..
                }) => Some((idx, prev)),
                _ => None,
            });
        let total = previous.map_or(theta, |(_, prev)| prev + theta);
        // RZ(t + 2 pi k) = (-1)^k RZ(t)
        let (wrapped, turns) = wrap_angle(total);
        self.phase += PI * turns;
        let keep = wrapped.abs() >= ANGLE_TOL;
        match (previous, keep) {
            (Some((idx, _)), true) => self.gates[idx] = Some(Gate::rz(q, wrapped)),
            (Some((idx, _)), false) => {
                self.gates[idx] = None;
                self.stacks[q].pop();
            }
            (None, true) => self.emit(Gate::rz(q, wrapped)),
            (None, false) => {}
        }
    }

    fn finish(self) -> Result<Circuit> {
        let mut out = Circuit::new(self.num_qubits);
        for gate in self.gates.into_iter().flatten() {
            out.push(gate)?;
        }
        let (phase, _) = wrap_angle(self.phase);
        if phase.abs() >= ANGLE_TOL {
            out.push(Gate::global_phase(phase))?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_examples() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(0)).unwrap().push(Gate::h(1)).unwrap();
        assert_eq!(depth(&c), 1);
        let mut c = Circuit::new(2);
        c.push(Gate::h(0))
            .unwrap()
            .push(Gate::cx(0, 1))
            .unwrap()
            .push(Gate::h(1))
            .unwrap();
        assert_eq!(depth(&c), 3);
        c.push(Gate::global_phase(1.0)).unwrap();
        assert_eq!(depth(&c), 3);
        assert_eq!(depth(&Circuit::new(3)), 0);
    }

    #[test]
    fn rz_runs_merge_and_vanish() {
        let mut c = Circuit::new(1);
        c.push(Gate::rz(0, 0.4))
            .unwrap()
            .push(Gate::rz(0, -0.4))
            .unwrap();
        let t = transpile(&c).unwrap();
        assert!(t.is_empty());

        let mut c = Circuit::new(2);
        c.push(Gate::rz(0, 0.4))
            .unwrap()
            .push(Gate::x(1))
            .unwrap()
            .push(Gate::rz(0, 0.2))
            .unwrap();
        let t = transpile(&c).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t
            .instructions()
            .iter()
            .any(|g| matches!(g.kind, GateKind::RZ(a) if (a - 0.6).abs() < 1e-15)));
    }

    #[test]
    fn full_turn_becomes_phase() {
        let mut c = Circuit::new(1);
        c.push(Gate::rz(0, TAU)).unwrap();
        let t = transpile(&c).unwrap();
        assert_eq!(t.gate_count(), 0);
        assert_eq!(t.instructions()[0].kind, GateKind::GlobalPhase(PI));
    }

    #[test]
    fn wide_payloads_are_rejected() {
        let mut c = Circuit::new(2);
        let id = crate::gate::Matrix::identity(4, 4);
        c.push(Gate::unitary(id, vec![0, 1]).unwrap()).unwrap();
        assert!(matches!(transpile(&c), Err(Error::UnsupportedGate(_))));
    }
}
