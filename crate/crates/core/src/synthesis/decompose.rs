//! Fixed decompositions of three-qubit gates into CX and single-qubit gates.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::Gate;

/// Six-CX Toffoli with controls `c0`, `c1` and target `t`. Exact, no phase.
pub fn toffoli_gates(c0: usize, c1: usize, t: usize) -> Vec<Gate> {
    vec![
        Gate::h(t),
        Gate::cx(c1, t),
        Gate::tdg(t),
        Gate::cx(c0, t),
        Gate::t(t),
        Gate::cx(c1, t),
        Gate::tdg(t),
        Gate::cx(c0, t),
        Gate::t(c1),
        Gate::t(t),
        Gate::h(t),
        Gate::cx(c0, c1),
        Gate::t(c0),
        Gate::tdg(c1),
        Gate::cx(c0, c1),
    ]
}

/// CSWAP as `CX(b,a) . Toffoli(c,a;b) . CX(b,a)`: eight CX in total.
pub fn cswap_gates(control: usize, a: usize, b: usize) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(17);
    gates.push(Gate::cx(b, a));
    gates.extend(toffoli_gates(control, a, b));
    gates.push(Gate::cx(b, a));
    gates
}

fn check_distinct(qubits: &[usize]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::DuplicateQubit(*q));
        }
    }
    Ok(())
}

/// Controlled swap of `a` and `b`, on a circuit just wide enough to hold them.
pub fn decompose_cswap(control: usize, a: usize, b: usize) -> Result<Circuit> {
    decompose_registers_cswap(control, &[a], &[b])
}

/// Pairwise controlled swap of two equal-length registers: `8 * len` CX.
pub fn decompose_registers_cswap(
    control: usize,
    reg_a: &[usize],
    reg_b: &[usize],
) -> Result<Circuit> {
    if reg_a.len() != reg_b.len() {
        return Err(Error::WidthMismatch {
            expected: reg_a.len(),
            found: reg_b.len(),
        });
    }
    let all: Vec<usize> = std::iter::once(control)
        .chain(reg_a.iter().copied())
        .chain(reg_b.iter().copied())
        .collect();
    check_distinct(&all)?;
    let width = all.iter().max().map_or(0, |m| m + 1);
    let mut circuit = Circuit::new(width);
    for (&a, &b) in reg_a.iter().zip(reg_b) {
        for gate in cswap_gates(control, a, b) {
            circuit.push(gate)?;
        }
    }
    Ok(circuit)
}
