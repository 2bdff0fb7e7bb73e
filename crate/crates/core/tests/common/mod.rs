#![allow(dead_code)]

use num_complex::Complex64;
use overlap_core::gate::{Gate, GateKind};
use overlap_core::{Circuit, Matrix, StateVector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `<b|a>` summed directly, without the library routine.
pub fn direct_overlap(a: &StateVector, b: &StateVector) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for k in 0..a.amplitudes().len() {
        acc += b.amplitudes()[k].conj() * a.amplitudes()[k];
    }
    acc
}

/// Local matrix of a gate over its own qubit list (first qubit = LSB),
/// written out by hand from the definitions.
fn local_matrix(kind: &GateKind) -> Matrix {
    let one = c(1.0, 0.0);
    let perm = |dim: usize, f: &dyn Fn(usize) -> usize| {
        let mut m = Matrix::zeros(dim, dim);
        for col in 0..dim {
            m[(f(col), col)] = one;
        }
        m
    };
    match kind {
        // bit 0 = control, bit 1 = target
        GateKind::CX => perm(4, &|i| if i & 1 == 1 { i ^ 2 } else { i }),
        GateKind::CZ => {
            let mut m = Matrix::identity(4, 4);
            m[(3, 3)] = -one;
            m
        }
        GateKind::Swap => perm(4, &|i| ((i & 1) << 1) | (i >> 1)),
        GateKind::CCX => perm(8, &|i| if i & 3 == 3 { i ^ 4 } else { i }),
        GateKind::CSwap => perm(8, &|i| {
            if i & 1 == 1 {
                let (a, b) = ((i >> 1) & 1, (i >> 2) & 1);
                1 | (b << 1) | (a << 2)
            } else {
                i
            }
        }),
        GateKind::Unitary(u) => u.clone(),
        k => {
            let m = k.single_qubit_matrix().expect("single-qubit kind");
            Matrix::from_fn(2, 2, |i, j| m[i][j])
        }
    }
}

/// Embeds a gate in the full `2^n` space by index enumeration.
pub fn embed(gate: &Gate, n: usize) -> Matrix {
    let dim = 1 << n;
    if let GateKind::GlobalPhase(phi) = gate.kind {
        return Matrix::identity(dim, dim) * Complex64::from_polar(1.0, phi);
    }
    let local = local_matrix(&gate.kind);
    let k = gate.qubits.len();
    let mut full = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let local_col: usize = (0..k).map(|m| ((col >> gate.qubits[m]) & 1) << m).sum();
        let rest = gate.qubits.iter().fold(col, |acc, &q| acc & !(1 << q));
        for local_row in 0..(1 << k) {
            let row = (0..k).fold(rest, |acc, m| {
                acc | (((local_row >> m) & 1) << gate.qubits[m])
            });
            full[(row, col)] = local[(local_row, local_col)];
        }
    }
    full
}

/// Product of embedded gate matrices, later gates on the left.
pub fn dense_product(circuit: &Circuit) -> Matrix {
    let n = circuit.num_qubits();
    let dim = 1 << n;
    circuit
        .instructions()
        .iter()
        .fold(Matrix::identity(dim, dim), |acc, g| embed(g, n) * acc)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `|tr(u^dagger v)| / dim`; 1 iff equal up to a global phase.
pub fn phase_insensitive_fidelity(u: &Matrix, v: &Matrix) -> f64 {
    let trace: Complex64 = u.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
    trace.norm() / u.nrows() as f64
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Tensor product of states, `hi` on the more significant qubits.
pub fn kron_state(hi: &StateVector, lo: &StateVector) -> StateVector {
    let mut out = Vec::with_capacity(hi.amplitudes().len() * lo.amplitudes().len());
    for h in hi.amplitudes() {
        for l in lo.amplitudes() {
            out.push(h * l);
        }
    }
    StateVector::from_amplitudes(out).unwrap()
}

pub fn assert_close(a: Complex64, b: Complex64, tol: f64, what: &str) {
    assert!(
        (a - b).norm() <= tol,
        "{what}: {a} vs {b} (|diff| = {:.3e})",
        (a - b).norm()
    );
}
