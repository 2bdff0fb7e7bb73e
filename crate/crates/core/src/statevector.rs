//! Dense statevector simulation.
//!
//! Qubit `q` is bit `q` of the amplitude index (qubit 0 least significant).
//! States are never renormalized behind the caller's back; a drifting norm
//! is a gate bug and is left visible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::bitstring::Bitstring;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind, Mat2, Matrix, Polarity};

/// Widest state the dense simulator will allocate (16 M amplitudes).
pub const MAX_QUBITS: usize = 20;

/// Widest circuit [`circuit_unitary`] will expand.
pub const MAX_UNITARY_WIDTH: usize = 10;

/// Seeded generator used for every random draw in the crate.
///
/// ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), keyed by
/// `seed_from_u64(seed)` and selecting `stream` as the ChaCha stream id, so
/// draws are identical across platforms and independent between streams.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "a state needs at least one qubit".into(),
        ));
    }
    if n > MAX_QUBITS {
        return Err(Error::WidthAboveCap {
            width: n,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_width(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalization is applied.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_width(n)?;
        Ok(StateVector {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Normalized state with i.i.d. standard-normal real and imaginary parts.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_width(n)?;
        let mut rng = seeded_rng(seed, 0);
        let mut amplitudes: Vec<Complex64> = (0..1usize << n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `e^{i phi}`.
    pub fn with_phase(mut self, phi: f64) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        self.amplitudes.iter_mut().for_each(|a| *a *= p);
        self
    }

    /// Amplitude `<bitstring|self>`.
    pub fn basis_coefficient(&self, bitstring: &Bitstring) -> Result<Complex64> {
        if bitstring.len() != self.num_qubits {
            return Err(Error::MalformedBitstring(format!(
                "{bitstring} has {} bits, state has {} qubits",
                bitstring.len(),
                self.num_qubits
            )));
        }
        Ok(self.amplitudes[bitstring.index()])
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes.get(index).map_or(0.0, |a| a.norm_sqr())
    }

    /// Exact `(p0, p1)` for a Z measurement of `qubit`.
    pub fn ancilla_outcome_probabilities(&self, qubit: usize) -> Result<(f64, f64)> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & bit == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok((p0, p1))
    }

    /// Seeded finite-shot counts `(n0, n1)` for a Z measurement of `qubit`.
    pub fn sample_ancilla(&self, qubit: usize, shots: u64, seed: u64) -> Result<(u64, u64)> {
        let (p0, _) = self.ancilla_outcome_probabilities(qubit)?;
        sample_counts(p0, shots, &mut seeded_rng(seed, 0))
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        apply_conditioned(&mut self.amplitudes, gate, 0, 0);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                found: circuit.num_qubits(),
            });
        }
        circuit.validate()?;
        for gate in circuit.instructions() {
            apply_conditioned(&mut self.amplitudes, gate, 0, 0);
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                width: self.num_qubits,
            });
        }
        Ok(())
    }
}

/// `<b|a> = sum_k conj(b_k) a_k`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::WidthMismatch {
            expected: a.num_qubits,
            found: b.num_qubits,
        });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| y.conj() * x)
        .sum())
}

/// Binomial draw of `(n0, n1)` for an outcome with probability `p0` of 0.
pub fn sample_counts<R: Rng + ?Sized>(p0: f64, shots: u64, rng: &mut R) -> Result<(u64, u64)> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let p1 = (1.0 - p0).clamp(0.0, 1.0);
    let dist = Binomial::new(shots, p1)
        .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))?;
    let n1 = dist.sample(rng);
    Ok((shots - n1, n1))
}

/// Full `2^n x 2^n` unitary, column `j` being the circuit applied to `|j>`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Matrix> {
    let n = circuit.num_qubits();
    if n > MAX_UNITARY_WIDTH {
        return Err(Error::WidthAboveCap {
            width: n,
            cap: MAX_UNITARY_WIDTH,
        });
    }
    circuit.validate()?;
    let dim = 1usize << n;
    let mut u = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[col] = Complex64::new(1.0, 0.0);
        for gate in circuit.instructions() {
            apply_conditioned(&mut amps, gate, 0, 0);
        }
        for (row, a) in amps.into_iter().enumerate() {
            u[(row, col)] = a;
        }
    }
    Ok(u)
}

// Kernels. `mask`/`value` restrict the action to indices with `i & mask == value`.

fn apply_conditioned(amps: &mut [Complex64], gate: &Gate, mask: usize, value: usize) {
    let q = &gate.qubits;
    match &gate.kind {
        GateKind::GlobalPhase(phi) => {
            let p = Complex64::from_polar(1.0, *phi);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask == value {
                    *a *= p;
                }
            }
        }
        GateKind::CX => {
            let c = 1 << q[0];
            apply_x(amps, q[1], mask | c, value | c);
        }
        GateKind::CCX => {
            let c = (1 << q[0]) | (1 << q[1]);
            apply_x(amps, q[2], mask | c, value | c);
        }
        GateKind::X => apply_x(amps, q[0], mask, value),
        GateKind::CZ => {
            let both = (1 << q[0]) | (1 << q[1]);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & both == both && i & mask == value {
                    *a = -*a;
                }
            }
        }
        GateKind::Swap => apply_swap(amps, q[0], q[1], mask, value),
        GateKind::CSwap => {
            let c = 1 << q[0];
            apply_swap(amps, q[1], q[2], mask | c, value | c);
        }
        GateKind::Controlled { polarity, body } => {
            let c = 1 << q[0];
            let (mask, value) = match polarity {
                Polarity::OnOne => (mask | c, value | c),
                Polarity::OnZero => (mask | c, value),
            };
            let targets = &q[1..];
            for inner in body.instructions() {
                apply_conditioned(amps, &inner.remapped(targets), mask, value);
            }
        }
        GateKind::Unitary(u) if u.nrows() > 2 => apply_dense(amps, u, q, mask, value),
        kind => {
            let m = kind
                .single_qubit_matrix()
                .expect("remaining kinds are single-qubit");
            apply_mat2(amps, q[0], &m, mask, value);
        }
    }
}

/// Index of the `i`-th amplitude pair with bit `q` cleared.
#[inline]
fn pair_base(i: usize, q: usize) -> usize {
    let low = i & ((1 << q) - 1);
    ((i >> q) << (q + 1)) | low
}

fn apply_mat2(amps: &mut [Complex64], q: usize, m: &Mat2, mask: usize, value: usize) {
    let bit = 1 << q;
    for i in 0..amps.len() / 2 {
        let i0 = pair_base(i, q);
        if i0 & mask != value {
            continue;
        }
        let i1 = i0 | bit;
        let (a, b) = (amps[i0], amps[i1]);
        amps[i0] = m[0][0] * a + m[0][1] * b;
        amps[i1] = m[1][0] * a + m[1][1] * b;
    }
}

fn apply_x(amps: &mut [Complex64], q: usize, mask: usize, value: usize) {
    let bit = 1 << q;
    for i in 0..amps.len() / 2 {
        let i0 = pair_base(i, q);
        if i0 & mask == value {
            amps.swap(i0, i0 | bit);
        }
    }
}

fn apply_swap(amps: &mut [Complex64], a: usize, b: usize, mask: usize, value: usize) {
    let (ba, bb) = (1 << a, 1 << b);
    for i in 0..amps.len() {
        if i & ba != 0 && i & bb == 0 && i & mask == value {
            amps.swap(i, i ^ ba ^ bb);
        }
    }
}

fn apply_dense(amps: &mut [Complex64], u: &Matrix, targets: &[usize], mask: usize, value: usize) {
    let dim = u.nrows();
    let target_mask: usize = targets.iter().map(|&t| 1 << t).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|m| {
            targets
                .iter()
                .enumerate()
                .filter(|(k, _)| (m >> k) & 1 == 1)
                .map(|(_, &t)| 1 << t)
                .sum()
        })
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 || base & mask != value {
            continue;
        }
        for (slot, off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            amps[base | off] = (0..dim).map(|col| u[(row, col)] * buf[col]).sum();
        }
    }
}
