//! Overlap estimation protocols.
//!
//! Every ancilla-based circuit puts the ancilla on qubit 0 and the `n`-qubit
//! registers on consecutive blocks after it (`1..=n`, `n+1..=2n`, ...). The
//! vacuum test uses the bare register.
//!
//! | protocol     | width  | ancilla `p(0) - p(1)`                  |
//! |--------------|--------|----------------------------------------|
//! | swap         | 2n + 1 | `|<B|A>|^2`                            |
//! | vacuum       | n      | (`P(0...0) = |<B|A>|^2`)               |
//! | hadamard     | n + 1  | `<B|A>`                                |
//! | one-control  | 2n + 1 | `<B|A> <t|B>`                          |
//! | zero-control | 3n + 1 | `<B|A> conj(<0|A>) <0|B>`              |
//!
//! The real part is read with `H` on the ancilla, the imaginary part with
//! `H` followed by `S^dagger`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::bitstring::Bitstring;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Gate, Polarity};
use crate::numfmt::round_significant;
use crate::statevector::{sample_counts, seeded_rng, StateVector};
use crate::synthesis::{controlled, controlled_circuit, SynthesizedPrep};

pub const ANCILLA: usize = 0;

/// Reference amplitudes at or below this magnitude are rejected.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    SwapTest,
    VacuumTest,
    HadamardTest,
    OneControl,
    ZeroControl,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::SwapTest,
        ProtocolKind::VacuumTest,
        ProtocolKind::HadamardTest,
        ProtocolKind::OneControl,
        ProtocolKind::ZeroControl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::SwapTest => "swap",
            ProtocolKind::VacuumTest => "vacuum",
            ProtocolKind::HadamardTest => "hadamard",
            ProtocolKind::OneControl => "one-control",
            ProtocolKind::ZeroControl => "zero-control",
        }
    }

    /// Whether the protocol recovers the complex overlap rather than `|<B|A>|^2`.
    pub fn carries_phase(&self) -> bool {
        !matches!(self, ProtocolKind::SwapTest | ProtocolKind::VacuumTest)
    }

    /// Total circuit width for `n`-qubit states.
    pub fn width(&self, n: usize) -> usize {
        match self {
            ProtocolKind::VacuumTest => n,
            ProtocolKind::HadamardTest => n + 1,
            ProtocolKind::SwapTest | ProtocolKind::OneControl => 2 * n + 1,
            ProtocolKind::ZeroControl => 3 * n + 1,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for ProtocolKind {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap" | "swap-test" => Ok(ProtocolKind::SwapTest),
            "vacuum" | "vacuum-test" => Ok(ProtocolKind::VacuumTest),
            "hadamard" | "hadamard-test" => Ok(ProtocolKind::HadamardTest),
            "one-control" => Ok(ProtocolKind::OneControl),
            "zero-control" => Ok(ProtocolKind::ZeroControl),
            other => Err(Error::InvalidArgument(format!(
                "unknown protocol {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Real,
    Imag,
}

/// Construction switches that are not part of the normal protocol surface.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Use `S` instead of `S^dagger` for the imaginary part. Only for
    /// checking that validation notices a sign slip.
    #[doc(hidden)]
    pub inject_sign_fault: bool,
}

fn check_widths(a: &SynthesizedPrep, b: &SynthesizedPrep) -> Result<usize> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: a.num_qubits(),
            found: b.num_qubits(),
        });
    }
    Ok(a.num_qubits())
}

fn register(block: usize, n: usize) -> Vec<usize> {
    (1 + block * n..1 + (block + 1) * n).collect()
}

fn open_ancilla(c: &mut Circuit, part: Part, options: &BuildOptions) -> Result<()> {
    c.push(Gate::h(ANCILLA))?;
    if part == Part::Imag {
        c.push(if options.inject_sign_fault {
            Gate::s(ANCILLA)
        } else {
            Gate::sdg(ANCILLA)
        })?;
    }
    Ok(())
}

fn push_register_cswap(c: &mut Circuit, reg_a: &[usize], reg_b: &[usize]) -> Result<()> {
    for (&a, &b) in reg_a.iter().zip(reg_b) {
        c.push(Gate::cswap(ANCILLA, a, b))?;
    }
    Ok(())
}

/// `H`, `U_A` and `U_B` on two registers, register-wide CSWAP, `H`.
pub fn build_swap_test(a: &SynthesizedPrep, b: &SynthesizedPrep) -> Result<Circuit> {
    let n = check_widths(a, b)?;
    let (reg_a, reg_b) = (register(0, n), register(1, n));
    let mut c = Circuit::new(2 * n + 1);
    c.push(Gate::h(ANCILLA))?;
    c.append_mapped(&a.exact_circuit(), &reg_a)?;
    c.append_mapped(&b.exact_circuit(), &reg_b)?;
    push_register_cswap(&mut c, &reg_a, &reg_b)?;
    c.push(Gate::h(ANCILLA))?;
    Ok(c)
}

/// `U_B^dagger U_A` on `n` qubits; `P(0...0) = |<B|A>|^2`.
pub fn build_vacuum_test(a: &SynthesizedPrep, b: &SynthesizedPrep) -> Result<Circuit> {
    let n = check_widths(a, b)?;
    let mut c = Circuit::new(n);
    c.append(&a.exact_circuit())?;
    c.append(&b.exact_circuit().inverse())?;
    Ok(c)
}

pub fn build_hadamard_test(
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    part: Part,
) -> Result<Circuit> {
    build_hadamard_test_with(a, b, part, &BuildOptions::default())
}

fn build_hadamard_test_with(
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    part: Part,
    options: &BuildOptions,
) -> Result<Circuit> {
    let n = check_widths(a, b)?;
    let mut c = Circuit::new(n + 1);
    open_ancilla(&mut c, part, options)?;
    c.append(&controlled(a, Polarity::OnOne)?)?;
    c.append(&controlled_circuit(
        &b.exact_circuit().inverse(),
        Polarity::OnOne,
    )?)?;
    c.push(Gate::h(ANCILLA))?;
    Ok(c)
}

/// One-control test projecting `B` on `projection` (`|0...0>` by default).
/// Set bits of the projection get an open-controlled X from the ancilla onto
/// register A, which costs two extra X gates on the ancilla.
pub fn build_one_control(
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    part: Part,
    projection: &Bitstring,
) -> Result<Circuit> {
    build_one_control_with(a, b, part, projection, &BuildOptions::default())
}

fn build_one_control_with(
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    part: Part,
    projection: &Bitstring,
    options: &BuildOptions,
) -> Result<Circuit> {
    let n = check_widths(a, b)?;
    if projection.len() != n {
        return Err(Error::MalformedBitstring(format!(
            "projection {projection} has {} bits, registers have {n}",
            projection.len()
        )));
    }
    let (reg_a, reg_b) = (register(0, n), register(1, n));
    let mut c = Circuit::new(2 * n + 1);
    open_ancilla(&mut c, part, options)?;
    if !projection.is_zero() {
        c.push(Gate::x(ANCILLA))?;
        for q in projection.ones() {
            c.push(Gate::cx(ANCILLA, reg_a[q]))?;
        }
        c.push(Gate::x(ANCILLA))?;
    }
    let control_map: Vec<usize> = std::iter::once(ANCILLA)
        .chain(reg_a.iter().copied())
        .collect();
    c.append_mapped(&controlled(a, Polarity::OnOne)?, &control_map)?;
    c.append_mapped(&b.exact_circuit(), &reg_b)?;
    push_register_cswap(&mut c, &reg_a, &reg_b)?;
    c.push(Gate::h(ANCILLA))?;
    Ok(c)
}

/// Zero-control test: empty register 1, `U_A` on register 2, `U_B` on
/// register 3; CSWAP(1, 2) on ancilla 1 and CSWAP(1, 3) on ancilla 0.
pub fn build_zero_control(a: &SynthesizedPrep, b: &SynthesizedPrep, part: Part) -> Result<Circuit> {
    build_zero_control_with(a, b, part, &BuildOptions::default())
}

fn build_zero_control_with(
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    part: Part,
    options: &BuildOptions,
) -> Result<Circuit> {
    let n = check_widths(a, b)?;
    let (reg_free, reg_a, reg_b) = (register(0, n), register(1, n), register(2, n));
    let mut c = Circuit::new(3 * n + 1);
    open_ancilla(&mut c, part, options)?;
    c.append_mapped(&a.exact_circuit(), &reg_a)?;
    c.append_mapped(&b.exact_circuit(), &reg_b)?;
    push_register_cswap(&mut c, &reg_free, &reg_a)?;
    c.push(Gate::x(ANCILLA))?;
    push_register_cswap(&mut c, &reg_free, &reg_b)?;
    c.push(Gate::x(ANCILLA))?;
    c.push(Gate::h(ANCILLA))?;
    Ok(c)
}

/// Builds any protocol circuit. `part` is ignored by the magnitude-only
/// protocols; `projection` is only meaningful for the one-control test.
pub fn build_protocol(
    kind: ProtocolKind,
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    part: Part,
    projection: Option<&Bitstring>,
    options: &BuildOptions,
) -> Result<Circuit> {
    if projection.is_some() && kind != ProtocolKind::OneControl {
        return Err(Error::InvalidArgument(format!(
            "a projection bitstring only applies to the one-control test, not {kind}"
        )));
    }
    match kind {
        ProtocolKind::SwapTest => build_swap_test(a, b),
        ProtocolKind::VacuumTest => build_vacuum_test(a, b),
        ProtocolKind::HadamardTest => build_hadamard_test_with(a, b, part, options),
        ProtocolKind::OneControl => {
            let zeros = Bitstring::zeros(a.num_qubits());
            build_one_control_with(a, b, part, projection.unwrap_or(&zeros), options)
        }
        ProtocolKind::ZeroControl => build_zero_control_with(a, b, part, options),
    }
}

/// A classically injected amplitude `<bitstring|state>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCoefficient {
    pub name: &'static str,
    pub bitstring: Bitstring,
    pub value: Complex64,
}

impl ReferenceCoefficient {
    pub fn new(name: &'static str, bitstring: Bitstring, value: Complex64) -> Self {
        ReferenceCoefficient {
            name,
            bitstring,
            value,
        }
    }

    /// `b0`-style reference on `|0...0>`.
    pub fn zero(name: &'static str, n: usize, value: Complex64) -> Self {
        ReferenceCoefficient::new(name, Bitstring::zeros(n), value)
    }

    fn checked(&self, state: &'static str) -> Result<Complex64> {
        let magnitude = self.value.norm();
        if magnitude <= DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateReference {
                which: self.name,
                state,
                bitstring: self.bitstring.to_string(),
                magnitude,
            });
        }
        Ok(self.value)
    }
}

/// Ancilla contrasts `R = p_re(0) - p_re(1)`, `I = p_im(0) - p_im(1)`.
/// Shot counts of 0 mean exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MeasurementOutcome {
    pub real: f64,
    pub imag: f64,
    pub shots_real: u64,
    pub shots_imag: u64,
}

/// `<B|A>` from one-control contrasts: with `b0 = c + i d`,
/// `((cR + dI) + i (cI - dR)) / |b0|^2`.
pub fn recover_one_control(r: f64, i: f64, b0: &ReferenceCoefficient) -> Result<Complex64> {
    let b = b0.checked("B")?;
    let (c, d) = (b.re, b.im);
    let scale = b.norm_sqr();
    Ok(Complex64::new(
        (c * r + d * i) / scale,
        (c * i - d * r) / scale,
    ))
}

/// The zero-control recovery formula as a pure function of `a0 = e + i f`
/// and `b0 = c + i d`: with `g = ec - fd`, `h = ed + fc`,
/// `((gR + hI) + i (gI - hR)) / (|a0|^2 |b0|^2)`, i.e. `(R + iI) / (a0 b0)`.
pub fn zero_control_formula(r: f64, i: f64, a0: Complex64, b0: Complex64) -> Complex64 {
    let (e, f) = (a0.re, a0.im);
    let (c, d) = (b0.re, b0.im);
    let g = e * c - f * d;
    let h = e * d + f * c;
    let scale = a0.norm_sqr() * b0.norm_sqr();
    Complex64::new((g * r + h * i) / scale, (g * i - h * r) / scale)
}

/// `<B|A>` from zero-control contrasts.
///
/// The circuit's contrast is `<B|A> conj(a0) b0` (the two branches overlap
/// as `<B,A,0|A,0,B>`), so `conj(a0)` is what enters the formula.
pub fn recover_zero_control(
    r: f64,
    i: f64,
    a0: &ReferenceCoefficient,
    b0: &ReferenceCoefficient,
) -> Result<Complex64> {
    let a = a0.checked("A")?;
    let b = b0.checked("B")?;
    Ok(zero_control_formula(r, i, a.conj(), b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Exact ancilla probabilities from the statevector.
    Exact,
    /// `shots` total, split evenly between real and imaginary circuits for
    /// phase-bearing protocols (the real part takes the odd shot).
    Shots { shots: u64, seed: u64 },
}

impl EvalMode {
    pub fn total_shots(&self) -> u64 {
        match self {
            EvalMode::Exact => 0,
            EvalMode::Shots { shots, .. } => *shots,
        }
    }
}

/// Where reference amplitudes come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMode {
    /// Read from the synthesized state (known classically).
    #[default]
    Classical,
    /// Estimated as `sqrt(|ref|^2)` from an extra one-control run with `A`
    /// replaced by the reference basis state. This fixes the phase
    /// convention of the state so that its reference amplitude is real and
    /// positive; the recovered overlap refers to that rephased state.
    Measured,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimateOptions {
    pub projection: Option<Bitstring>,
    pub reference: ReferenceMode,
    pub build: BuildOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapEstimate {
    pub protocol: ProtocolKind,
    /// Recovered `<B|A>` for phase-bearing protocols.
    pub value: Option<Complex64>,
    /// `|<B|A>|^2`, clamped to `[0, 1]`.
    pub magnitude_squared: f64,
    pub raw_magnitude_squared: f64,
    pub clamped: bool,
    pub outcome: MeasurementOutcome,
    /// Total shots spent including reference runs; 0 for exact evaluation.
    pub shots: u64,
    pub references: Vec<ReferenceCoefficient>,
    pub reference_mode: ReferenceMode,
    /// First-order standard error of `value` (or of the magnitude for
    /// swap/vacuum); 0 for exact evaluation with classical references.
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceRecord {
    pub name: &'static str,
    pub bitstring: String,
    pub real: f64,
    pub imag: f64,
}

/// Key-value form of an estimate; floats carry 12 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapRecord {
    pub protocol: ProtocolKind,
    pub real: Option<f64>,
    pub imag: Option<f64>,
    pub magnitude_squared: f64,
    pub raw_magnitude_squared: f64,
    pub clamped: bool,
    pub shots: u64,
    pub reference_mode: ReferenceMode,
    pub references: Vec<ReferenceRecord>,
    pub outcome_real: f64,
    pub outcome_imag: f64,
    pub standard_error: f64,
}

impl OverlapEstimate {
    pub fn record(&self) -> OverlapRecord {
        let r = |x: f64| round_significant(x, 12);
        OverlapRecord {
            protocol: self.protocol,
            real: self.value.map(|v| r(v.re)),
            imag: self.value.map(|v| r(v.im)),
            magnitude_squared: r(self.magnitude_squared),
            raw_magnitude_squared: r(self.raw_magnitude_squared),
            clamped: self.clamped,
            shots: self.shots,
            reference_mode: self.reference_mode,
            references: self
                .references
                .iter()
                .map(|c| ReferenceRecord {
                    name: c.name,
                    bitstring: c.bitstring.to_string(),
                    real: r(c.value.re),
                    imag: r(c.value.im),
                })
                .collect(),
            outcome_real: r(self.outcome.real),
            outcome_imag: r(self.outcome.imag),
            standard_error: r(self.standard_error),
        }
    }
}

/// A contrast (or probability) with its sampling variance.
#[derive(Debug, Clone, Copy)]
struct Reading {
    value: f64,
    variance: f64,
    shots: u64,
}

/// Evaluates `p(0) - p(1)` of the ancilla, or `P(0...0)` when `vacuum`.
fn read_circuit(
    circuit: &Circuit,
    vacuum: bool,
    shots: Option<(u64, u64, u64)>,
) -> Result<Reading> {
    let mut state = StateVector::zero(circuit.num_qubits())?;
    state.apply_circuit(circuit)?;
    let p0 = if vacuum {
        state.probability(0)
    } else {
        state.ancilla_outcome_probabilities(ANCILLA)?.0
    };
    match shots {
        None => Ok(Reading {
            value: if vacuum { p0 } else { 2.0 * p0 - 1.0 },
            variance: 0.0,
            shots: 0,
        }),
        Some((count, seed, stream)) => {
            let (n0, n1) = sample_counts(p0, count, &mut seeded_rng(seed, stream))?;
            let total = count as f64;
            let (value, variance) = if vacuum {
                let p = n0 as f64 / total;
                (p, p * (1.0 - p) / total)
            } else {
                let contrast = (n0 as f64 - n1 as f64) / total;
                (contrast, (1.0 - contrast * contrast) / total)
            };
            Ok(Reading {
                value,
                variance,
                shots: count,
            })
        }
    }
}

// Seed streams: main circuits use 1 (real) and 2 (imaginary), reference runs 3 and 4.
const STREAM_REAL: u64 = 1;
const STREAM_IMAG: u64 = 2;
const STREAM_REF_B: u64 = 3;
const STREAM_REF_A: u64 = 4;

fn shot_plan(mode: EvalMode, count: u64, stream: u64) -> Option<(u64, u64, u64)> {
    match mode {
        EvalMode::Exact => None,
        EvalMode::Shots { seed, .. } => Some((count, seed, stream)),
    }
}

/// Basis-state preparation `|t>` from X gates.
fn basis_prep(t: &Bitstring) -> Result<SynthesizedPrep> {
    let mut c = Circuit::new(t.len());
    for q in t.ones() {
        c.push(Gate::x(q))?;
    }
    Ok(SynthesizedPrep::new(c, 0.0))
}

/// Reference `<t|state>` and the variance of its squared magnitude.
fn acquire_reference(
    name: &'static str,
    state: &SynthesizedPrep,
    t: Bitstring,
    mode: EvalMode,
    reference: ReferenceMode,
    shots: u64,
    stream: u64,
) -> Result<(ReferenceCoefficient, f64, u64)> {
    match reference {
        ReferenceMode::Classical => {
            let value = state.target_state()?.basis_coefficient(&t)?;
            Ok((ReferenceCoefficient::new(name, t, value), 0.0, 0))
        }
        ReferenceMode::Measured => {
            // one-control with A = |t> gives R = |<t|state>|^2, I = 0
            let probe = build_one_control(&basis_prep(&t)?, state, Part::Real, &t)?;
            let reading = read_circuit(&probe, false, shot_plan(mode, shots, stream))?;
            let magnitude = reading.value.max(0.0).sqrt();
            Ok((
                ReferenceCoefficient::new(name, t, Complex64::new(magnitude, 0.0)),
                reading.variance,
                reading.shots,
            ))
        }
    }
}

fn clamp_unit(raw: f64) -> (f64, bool) {
    let clamped = raw.clamp(0.0, 1.0);
    (clamped, clamped != raw)
}

/// Builds, evaluates and post-processes one protocol run.
///
/// Reference amplitudes for the one-control and zero-control tests come from
/// the synthesized states ([`ReferenceMode::Classical`]) or from extra
/// one-control runs ([`ReferenceMode::Measured`]). A reference at or below
/// [`DEGENERACY_THRESHOLD`] is an error; for the one-control test a
/// `projection` with a nonzero amplitude avoids it.
pub fn estimate_overlap(
    kind: ProtocolKind,
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    mode: EvalMode,
    options: &EstimateOptions,
) -> Result<OverlapEstimate> {
    let n = check_widths(a, b)?;
    let projection = options.projection;
    let build = |part| build_protocol(kind, a, b, part, projection.as_ref(), &options.build);

    if let EvalMode::Shots { shots, .. } = mode {
        let needed = if kind.carries_phase() { 2 } else { 1 };
        if shots < needed {
            return Err(Error::InvalidArgument(format!(
                "{kind} needs at least {needed} shot(s), got {shots}"
            )));
        }
    }
    let total = mode.total_shots();
    let (shots_real, shots_imag) = if kind.carries_phase() {
        (total - total / 2, total / 2)
    } else {
        (total, 0)
    };

    if !kind.carries_phase() {
        let vacuum = kind == ProtocolKind::VacuumTest;
        let reading = read_circuit(
            &build(Part::Real)?,
            vacuum,
            shot_plan(mode, shots_real, STREAM_REAL),
        )?;
        let (magnitude_squared, clamped) = clamp_unit(reading.value);
        return Ok(OverlapEstimate {
            protocol: kind,
            value: None,
            magnitude_squared,
            raw_magnitude_squared: reading.value,
            clamped,
            outcome: MeasurementOutcome {
                real: reading.value,
                imag: 0.0,
                shots_real: reading.shots,
                shots_imag: 0,
            },
            shots: total,
            references: Vec::new(),
            reference_mode: options.reference,
            standard_error: reading.variance.sqrt(),
        });
    }

    // References first so a degenerate amplitude fails before any sampling.
    let mut references = Vec::new();
    let mut reference_vars = Vec::new();
    let mut reference_shots = 0;
    match kind {
        ProtocolKind::OneControl => {
            let t = projection.unwrap_or(Bitstring::zeros(n));
            let (b0, var, used) = acquire_reference(
                "b0",
                b,
                t,
                mode,
                options.reference,
                shots_real,
                STREAM_REF_B,
            )?;
            b0.checked("B")?;
            references.push(b0);
            reference_vars.push(var);
            reference_shots += used;
        }
        ProtocolKind::ZeroControl => {
            let zeros = Bitstring::zeros(n);
            let (a0, var_a, used_a) = acquire_reference(
                "a0",
                a,
                zeros,
                mode,
                options.reference,
                shots_real,
                STREAM_REF_A,
            )?;
            let (b0, var_b, used_b) = acquire_reference(
                "b0",
                b,
                zeros,
                mode,
                options.reference,
                shots_real,
                STREAM_REF_B,
            )?;
            a0.checked("A")?;
            b0.checked("B")?;
            references.extend([a0, b0]);
            reference_vars.extend([var_a, var_b]);
            reference_shots += used_a + used_b;
        }
        _ => {}
    }

    let re = read_circuit(
        &build(Part::Real)?,
        false,
        shot_plan(mode, shots_real, STREAM_REAL),
    )?;
    let im = read_circuit(
        &build(Part::Imag)?,
        false,
        shot_plan(mode, shots_imag, STREAM_IMAG),
    )?;
    let contrast_var = re.variance + im.variance;

    let (value, variance) = match kind {
        ProtocolKind::HadamardTest => (Complex64::new(re.value, im.value), contrast_var),
        ProtocolKind::OneControl => {
            let value = recover_one_control(re.value, im.value, &references[0])?;
            let m = references[0].value.norm_sqr();
            // |ref|^2 estimated with variance v: d|z|/dm = |z| / (2m)
            let var = contrast_var / m + value.norm_sqr() * reference_vars[0] / (4.0 * m * m);
            (value, var)
        }
        ProtocolKind::ZeroControl => {
            let value = recover_zero_control(re.value, im.value, &references[0], &references[1])?;
            let (ma, mb) = (
                references[0].value.norm_sqr(),
                references[1].value.norm_sqr(),
            );
            let var = contrast_var / (ma * mb)
                + value.norm_sqr()
                    * (reference_vars[0] / (4.0 * ma * ma) + reference_vars[1] / (4.0 * mb * mb));
            (value, var)
        }
        _ => unreachable!("magnitude-only protocols returned above"),
    };
    let raw = value.norm_sqr();
    let (magnitude_squared, clamped) = clamp_unit(raw);
    Ok(OverlapEstimate {
        protocol: kind,
        value: Some(value),
        magnitude_squared,
        raw_magnitude_squared: raw,
        clamped,
        outcome: MeasurementOutcome {
            real: re.value,
            imag: im.value,
            shots_real: re.shots,
            shots_imag: im.shots,
        },
        shots: total + reference_shots,
        references,
        reference_mode: options.reference,
        standard_error: variance.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_control_formula_substitutions() {
        let one = ReferenceCoefficient::zero("b0", 1, c(1.0, 0.0));
        assert_eq!(recover_one_control(0.3, 0.4, &one).unwrap(), c(0.3, 0.4));
        let i = ReferenceCoefficient::zero("b0", 1, c(0.0, 1.0));
        assert_eq!(recover_one_control(0.3, 0.4, &i).unwrap(), c(0.4, -0.3));
    }

    #[test]
    fn degenerate_reference_mentions_projection() {
        let zero = ReferenceCoefficient::zero("b0", 2, c(0.0, 0.0));
        let err = recover_one_control(0.1, 0.1, &zero).unwrap_err();
        assert!(matches!(err, Error::DegenerateReference { .. }));
        assert!(err.to_string().contains("projection"));
        let tiny = ReferenceCoefficient::zero("a0", 2, c(1e-9, 0.0));
        let one = ReferenceCoefficient::zero("b0", 2, c(1.0, 0.0));
        assert!(recover_zero_control(0.1, 0.1, &tiny, &one).is_err());
        assert!(recover_zero_control(0.1, 0.1, &one, &tiny).is_err());
    }

    #[test]
    fn zero_control_formula_substitutions() {
        let one = c(1.0, 0.0);
        assert_eq!(zero_control_formula(0.3, 0.4, one, one), c(0.3, 0.4));
        assert_eq!(
            zero_control_formula(0.3, 0.4, one, c(0.0, 1.0)),
            c(0.4, -0.3)
        );
        let b = c(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let z = zero_control_formula(0.3, 0.4, one, b);
        let expected = c(0.3, 0.4) / b;
        assert!((z - expected).norm() < 1e-15);
    }

    #[test]
    fn widths_follow_the_qubit_count_law() {
        for n in 1..=4 {
            assert_eq!(ProtocolKind::VacuumTest.width(n), n);
            assert_eq!(ProtocolKind::HadamardTest.width(n), n + 1);
            assert_eq!(ProtocolKind::SwapTest.width(n), 2 * n + 1);
            assert_eq!(ProtocolKind::OneControl.width(n), 2 * n + 1);
            assert_eq!(ProtocolKind::ZeroControl.width(n), 3 * n + 1);
        }
    }

    #[test]
    fn protocol_names_parse() {
        for kind in ProtocolKind::ALL {
            assert_eq!(kind.name().parse::<ProtocolKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<ProtocolKind>().is_err());
    }

    #[test]
    fn width_mismatch_rejected() {
        let a = SynthesizedPrep::identity(2);
        let b = SynthesizedPrep::identity(3);
        assert!(matches!(
            build_swap_test(&a, &b),
            Err(Error::WidthMismatch { .. })
        ));
        assert!(matches!(
            build_vacuum_test(&a, &b),
            Err(Error::WidthMismatch { .. })
        ));
        assert!(build_one_control(&a, &a, Part::Real, &"101".parse().unwrap()).is_err());
    }

    #[test]
    fn projection_only_for_one_control() {
        let a = SynthesizedPrep::identity(2);
        let t: Bitstring = "01".parse().unwrap();
        let err = build_protocol(
            ProtocolKind::SwapTest,
            &a,
            &a,
            Part::Real,
            Some(&t),
            &BuildOptions::default(),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }
}
