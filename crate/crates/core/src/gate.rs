//! Gate instructions.
//!
//! A [`Gate`] is a [`GateKind`] plus the ordered list of qubits it acts on.
//! For multi-qubit kinds, controls come first: `CX [c, t]`, `CCX [c0, c1, t]`,
//! `CSWAP [c, a, b]`, `CONTROLLED [c, t0, t1, ...]`. For `UNITARY` payloads
//! the first listed qubit is the least-significant bit of the matrix index.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

/// Largest qubit count accepted for a `UNITARY` payload.
pub const MAX_UNITARY_QUBITS: usize = 6;

const UNITARY_TOL: f64 = 1e-10;

/// Which control value activates a controlled operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    OnOne,
    OnZero,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    H,
    S,
    Sdg,
    T,
    Tdg,
    SX,
    SXdg,
    RY(f64),
    RZ(f64),
    CX,
    CZ,
    Swap,
    CSwap,
    CCX,
    Unitary(Matrix),
    Controlled {
        polarity: Polarity,
        body: Box<Circuit>,
    },
    GlobalPhase(f64),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::SX => "sx",
            GateKind::SXdg => "sxdg",
            GateKind::RY(_) => "ry",
            GateKind::RZ(_) => "rz",
            GateKind::CX => "cx",
            GateKind::CZ => "cz",
            GateKind::Swap => "swap",
            GateKind::CSwap => "cswap",
            GateKind::CCX => "ccx",
            GateKind::Unitary(_) => "unitary",
            GateKind::Controlled { .. } => "controlled",
            GateKind::GlobalPhase(_) => "gphase",
        }
    }

    /// Number of qubits the kind acts on, `None` for payload-sized kinds.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::GlobalPhase(_) => Some(0),
            GateKind::X
            | GateKind::H
            | GateKind::S
            | GateKind::Sdg
            | GateKind::T
            | GateKind::Tdg
            | GateKind::SX
            | GateKind::SXdg
            | GateKind::RY(_)
            | GateKind::RZ(_) => Some(1),
            GateKind::CX | GateKind::CZ | GateKind::Swap => Some(2),
            GateKind::CSwap | GateKind::CCX => Some(3),
            GateKind::Unitary(_) | GateKind::Controlled { .. } => None,
        }
    }

    /// 2x2 matrix for fixed single-qubit kinds.
    pub fn single_qubit_matrix(&self) -> Option<Mat2> {
        let c = Complex64::new;
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m = match self {
            GateKind::X => [[zero, one], [one, zero]],
            GateKind::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::S => [[one, zero], [zero, c(0.0, 1.0)]],
            GateKind::Sdg => [[one, zero], [zero, c(0.0, -1.0)]],
            GateKind::T => [[one, zero], [zero, Complex64::from_polar(1.0, FRAC_PI_4)]],
            GateKind::Tdg => [[one, zero], [zero, Complex64::from_polar(1.0, -FRAC_PI_4)]],
            GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            GateKind::SXdg => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
            GateKind::RY(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            GateKind::RZ(theta) => [
                [Complex64::from_polar(1.0, -theta / 2.0), zero],
                [zero, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            GateKind::Unitary(u) if u.nrows() == 2 => {
                [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]]
            }
            _ => return None,
        };
        Some(m)
    }

    pub fn inverse(&self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::SX => GateKind::SXdg,
            GateKind::SXdg => GateKind::SX,
            GateKind::RY(t) => GateKind::RY(-t),
            GateKind::RZ(t) => GateKind::RZ(-t),
            GateKind::GlobalPhase(p) => GateKind::GlobalPhase(-p),
            GateKind::Unitary(u) => GateKind::Unitary(u.adjoint()),
            GateKind::Controlled { polarity, body } => GateKind::Controlled {
                polarity: *polarity,
                body: Box::new(body.inverse()),
            },
            GateKind::X
            | GateKind::H
            | GateKind::CX
            | GateKind::CZ
            | GateKind::Swap
            | GateKind::CSwap
            | GateKind::CCX => self.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Gate { kind, qubits }
    }

    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Gate::new(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Gate::new(GateKind::Sdg, vec![q])
    }
    pub fn t(q: usize) -> Self {
        Gate::new(GateKind::T, vec![q])
    }
    pub fn tdg(q: usize) -> Self {
        Gate::new(GateKind::Tdg, vec![q])
    }
    pub fn sx(q: usize) -> Self {
        Gate::new(GateKind::SX, vec![q])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::RY(theta), vec![q])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::RZ(theta), vec![q])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::CX, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Gate::new(GateKind::CZ, vec![a, b])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, vec![a, b])
    }
    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Gate::new(GateKind::CSwap, vec![control, a, b])
    }
    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Gate::new(GateKind::CCX, vec![c0, c1, target])
    }
    pub fn global_phase(phi: f64) -> Self {
        Gate::new(GateKind::GlobalPhase(phi), Vec::new())
    }

    /// Arbitrary unitary payload; rejected unless `U^dagger U = I` within 1e-10.
    pub fn unitary(matrix: Matrix, qubits: Vec<usize>) -> Result<Self> {
        let gate = Gate::new(GateKind::Unitary(matrix), qubits);
        gate.validate_payload()?;
        Ok(gate)
    }

    /// `body` applied to `targets` when `control` matches `polarity`.
    pub fn controlled(
        control: usize,
        targets: &[usize],
        polarity: Polarity,
        body: Circuit,
    ) -> Self {
        let mut qubits = Vec::with_capacity(targets.len() + 1);
        qubits.push(control);
        qubits.extend_from_slice(targets);
        Gate::new(
            GateKind::Controlled {
                polarity,
                body: Box::new(body),
            },
            qubits,
        )
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn is_global_phase(&self) -> bool {
        matches!(self.kind, GateKind::GlobalPhase(_))
    }

    pub fn inverse(&self) -> Gate {
        Gate::new(self.kind.inverse(), self.qubits.clone())
    }

    /// Same gate with every qubit `q` replaced by `map[q]`.
    pub fn remapped(&self, map: &[usize]) -> Gate {
        Gate::new(
            self.kind.clone(),
            self.qubits.iter().map(|&q| map[q]).collect(),
        )
    }

    /// Checks arity, index range, distinctness and unitary payloads.
    pub fn validate(&self, width: usize) -> Result<()> {
        let expected = match &self.kind {
            GateKind::Unitary(u) => {
                let k = u.nrows().trailing_zeros() as usize;
                if !u.nrows().is_power_of_two() || u.nrows() != u.ncols() || k == 0 {
                    return Err(Error::InvalidArgument(format!(
                        "unitary payload must be 2^k x 2^k, got {}x{}",
                        u.nrows(),
                        u.ncols()
                    )));
                }
                k
            }
            GateKind::Controlled { body, .. } => body.num_qubits() + 1,
            kind => kind.arity().unwrap_or(0),
        };
        if self.qubits.len() != expected {
            return Err(Error::Arity {
                gate: self.name(),
                expected,
                found: self.qubits.len(),
            });
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= width {
                return Err(Error::QubitOutOfRange { qubit: q, width });
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        self.validate_payload()
    }

    fn validate_payload(&self) -> Result<()> {
        match &self.kind {
            GateKind::Unitary(u) => {
                if u.nrows() > 1 << MAX_UNITARY_QUBITS {
                    return Err(Error::InvalidArgument(format!(
                        "unitary payload wider than {MAX_UNITARY_QUBITS} qubits"
                    )));
                }
                let deviation = unitarity_deviation(u);
                if deviation > UNITARY_TOL {
                    return Err(Error::NonUnitary { deviation });
                }
                Ok(())
            }
            GateKind::Controlled { body, .. } => body.validate(),
            _ => Ok(()),
        }
    }
}

/// Largest entrywise deviation of `U^dagger U` from the identity.
pub fn unitarity_deviation(u: &Matrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let product = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..product.nrows() {
        for j in 0..product.ncols() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

pub(crate) fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Phase `k` minimising `|a - e^{ik} b|` (i.e. `arg tr(b^dagger a)`).
pub(crate) fn mat2_relative_phase(a: &Mat2, b: &Mat2) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += b[i][j].conj() * a[i][j];
        }
    }
    acc.arg()
}
