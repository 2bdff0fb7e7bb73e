//! Circuit synthesis: state preparation, controlled circuits, CSWAP
//! decomposition and transpilation to the `{CZ, RZ, SX, X}` basis.

mod controlled;
mod decompose;
mod one_qubit;
mod transpile;

use std::f64::consts::PI;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::statevector::StateVector;

pub use controlled::{controlled, controlled_circuit};
pub use decompose::{cswap_gates, decompose_cswap, decompose_registers_cswap, toffoli_gates};
pub use one_qubit::{basis_sequence, zyz, ZyzAngles};
pub use transpile::{depth, transpile, BasisGateSet};

/// Rotations with `|theta|` below this are dropped.
pub const ANGLE_TOL: f64 = 1e-12;

const NORM_TOL: f64 = 1e-8;

/// A preparation circuit and the phase it leaves on its target:
/// `circuit |0...0> = e^{i global_phase} |target>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedPrep {
    circuit: Circuit,
    global_phase: f64,
}

impl SynthesizedPrep {
    pub fn new(circuit: Circuit, global_phase: f64) -> Self {
        SynthesizedPrep {
            circuit,
            global_phase,
        }
    }

    /// Empty preparation of `|0...0>`.
    pub fn identity(num_qubits: usize) -> Self {
        SynthesizedPrep::new(Circuit::new(num_qubits), 0.0)
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    /// The preparation with its phase cancelled: maps `|0...0>` to the target exactly.
    pub fn exact_circuit(&self) -> Circuit {
        let mut c = self.circuit.clone();
        if self.global_phase.abs() >= ANGLE_TOL {
            c.extend([Gate::global_phase(-self.global_phase)]);
        }
        c
    }

    /// Simulates the exact circuit on `|0...0>`.
    pub fn target_state(&self) -> Result<StateVector> {
        let mut s = StateVector::zero(self.num_qubits())?;
        s.apply_circuit(&self.exact_circuit())?;
        Ok(s)
    }
}

/// In-place fast Walsh-Hadamard transform (unnormalized).
fn walsh_hadamard(values: &mut [f64]) {
    let mut h = 1;
    while h < values.len() {
        for block in values.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

#[derive(Clone, Copy)]
enum Axis {
    Y,
    Z,
}

/// Multiplexed rotation: angle `angles[j]` on `target` when the control
/// register (bit `m` of `j` = `controls[m]`) holds `j`. Gray-code CX ladder
/// with `2^k` rotations and `2^k` CX; collapses to one rotation or nothing
/// when the angles are uniform.
fn push_uniformly_controlled(
    circuit: &mut Circuit,
    axis: Axis,
    target: usize,
    controls: &[usize],
    angles: &[f64],
) -> Result<()> {
    let rotation = |theta: f64| match axis {
        Axis::Y => Gate::ry(target, theta),
        Axis::Z => Gate::rz(target, theta),
    };
    let first = angles[0];
    if angles.iter().all(|a| (a - first).abs() < ANGLE_TOL) {
        if first.abs() >= ANGLE_TOL {
            circuit.push(rotation(first))?;
        }
        return Ok(());
    }
    let size = angles.len();
    let gray = |i: usize| i ^ (i >> 1);
    // theta_i = 2^-k sum_j (-1)^{popcount(j & gray(i))} alpha_j
    let mut transformed = angles.to_vec();
    walsh_hadamard(&mut transformed);
    for i in 0..size {
        let g = gray(i);
        let theta = transformed[g] / size as f64;
        if theta.abs() >= ANGLE_TOL {
            circuit.push(rotation(theta))?;
        }
        let flip = (g ^ gray((i + 1) % size)).trailing_zeros() as usize;
        circuit.push(Gate::cx(controls[flip], target))?;
    }
    Ok(())
}

/// Preparation circuit for `target` from uniformly controlled RY and RZ
/// rotations, built by disentangling the target one qubit at a time
/// (least-significant first) and reversing the result.
pub fn prepare_state(target: &StateVector) -> Result<SynthesizedPrep> {
    let norm = target.norm_sqr().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let n = target.num_qubits();
    let mut current = target.amplitudes().to_vec();
    // per stage q: (ry angles, rz angles) of the preparation
    let mut stages = Vec::with_capacity(n);
    for _ in 0..n {
        let half = current.len() / 2;
        let mut ry = Vec::with_capacity(half);
        let mut rz = Vec::with_capacity(half);
        let mut next = Vec::with_capacity(half);
        for pair in current.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            let (ma, mb) = (a.norm(), b.norm());
            let (pa, pb) = match (ma >= ANGLE_TOL, mb >= ANGLE_TOL) {
                (true, true) => (a.arg(), b.arg()),
                (true, false) => (a.arg(), a.arg()),
                (false, true) => (b.arg(), b.arg()),
                (false, false) => (0.0, 0.0),
            };
            // disentangler: RZ(pa - pb) equalizes phases, RY(-theta) zeroes b
            ry.push(2.0 * mb.atan2(ma));
            rz.push(pb - pa);
            next.push(num_complex::Complex64::from_polar(
                ma.hypot(mb),
                (pa + pb) / 2.0,
            ));
        }
        stages.push((ry, rz));
        current = next;
    }
    let residual = current[0].arg();

    let mut circuit = Circuit::new(n);
    for (q, (ry, rz)) in stages.iter().enumerate().rev() {
        let controls: Vec<usize> = (q + 1..n).collect();
        push_uniformly_controlled(&mut circuit, Axis::Y, q, &controls, ry)?;
        push_uniformly_controlled(&mut circuit, Axis::Z, q, &controls, rz)?;
    }
    Ok(SynthesizedPrep::new(circuit, wrap_phase(-residual)))
}

fn wrap_phase(phi: f64) -> f64 {
    let wrapped = phi.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Product-state preparation: `block_count` side-by-side copies of one
/// `block_qubits`-qubit preparation of `random_state(block_qubits, block_seed)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparablePrepSpec {
    pub block_qubits: usize,
    pub block_count: usize,
    pub block_seed: u64,
}

impl SeparablePrepSpec {
    pub fn total_qubits(&self) -> usize {
        self.block_qubits * self.block_count
    }
}

pub fn prepare_separable(spec: &SeparablePrepSpec) -> Result<SynthesizedPrep> {
    if spec.block_count == 0 {
        return Err(Error::InvalidArgument(
            "block count must be at least 1".into(),
        ));
    }
    let block = StateVector::random(spec.block_qubits, spec.block_seed)?;
    prepare_product(&block, spec.block_count)
}

/// `block_count` copies of the preparation of `block` on consecutive qubit blocks.
pub fn prepare_product(block: &StateVector, block_count: usize) -> Result<SynthesizedPrep> {
    if block_count == 0 {
        return Err(Error::InvalidArgument(
            "block count must be at least 1".into(),
        ));
    }
    let unit = prepare_state(block)?;
    let k = block.num_qubits();
    let mut circuit = Circuit::new(k * block_count);
    for b in 0..block_count {
        let map: Vec<usize> = (b * k..(b + 1) * k).collect();
        circuit.append_mapped(unit.circuit(), &map)?;
    }
    Ok(SynthesizedPrep::new(
        circuit,
        wrap_phase(unit.global_phase() * block_count as f64),
    ))
}
