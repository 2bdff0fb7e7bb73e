//! Single-qubit Euler decompositions.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::gate::{mat2_mul, mat2_relative_phase, GateKind, Mat2};

use super::ANGLE_TOL;

/// `U = e^{i phase} RZ(beta) RY(gamma) RZ(delta)` with `gamma` in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZyzAngles {
    pub phase: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub fn zyz(u: &Mat2) -> ZyzAngles {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let scale = Complex64::from_polar(1.0, -det.arg() / 2.0);
    let v00 = u[0][0] * scale;
    let v10 = u[1][0] * scale;
    let v11 = u[1][1] * scale;

    let gamma = 2.0 * v10.norm().atan2(v00.norm());
    let (beta, delta) = if v10.norm() < ANGLE_TOL {
        (2.0 * v11.arg(), 0.0)
    } else if v00.norm() < ANGLE_TOL {
        (2.0 * v10.arg(), 0.0)
    } else {
        let sum = 2.0 * v11.arg();
        let diff = 2.0 * v10.arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    let rebuilt = sequence_matrix(&[GateKind::RZ(delta), GateKind::RY(gamma), GateKind::RZ(beta)]);
    ZyzAngles {
        phase: mat2_relative_phase(u, &rebuilt),
        beta,
        gamma,
        delta,
    }
}

/// Matrix of single-qubit kinds applied in time order.
pub fn sequence_matrix(kinds: &[GateKind]) -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    kinds.iter().fold([[one, zero], [zero, one]], |acc, k| {
        let m = k.single_qubit_matrix().expect("single-qubit kind");
        mat2_mul(&m, &acc)
    })
}

/// Rewrites `u` as a time-ordered `{RZ, SX, X}` sequence and the phase `k`
/// with `u = e^{ik} * sequence`.
pub fn basis_sequence(u: &Mat2) -> (Vec<GateKind>, f64) {
    let ZyzAngles {
        beta, gamma, delta, ..
    } = zyz(u);
    let kinds = if gamma < ANGLE_TOL {
        vec![GateKind::RZ(beta + delta)]
    } else if (gamma - PI).abs() < ANGLE_TOL {
        vec![GateKind::RZ(delta + PI), GateKind::X, GateKind::RZ(beta)]
    } else if (gamma - FRAC_PI_2).abs() < ANGLE_TOL {
        vec![
            GateKind::RZ(delta - FRAC_PI_2),
            GateKind::SX,
            GateKind::RZ(beta + FRAC_PI_2),
        ]
    } else {
        vec![
            GateKind::RZ(delta),
            GateKind::SX,
            GateKind::RZ(gamma + PI),
            GateKind::SX,
            GateKind::RZ(beta + PI),
        ]
    };
    let phase = mat2_relative_phase(u, &sequence_matrix(&kinds));
    (kinds, phase)
}
