//! Self-check suites run by `overlap validate`.

use num_complex::Complex64;
use overlap_core::gate::GateKind;
use overlap_core::protocols::{build_protocol, BuildOptions};
use overlap_core::synthesis::{decompose_registers_cswap, transpile, BasisGateSet};
use overlap_core::{
    circuit_unitary, estimate_overlap, inner_product, prepare_state, EstimateOptions, EvalMode,
    Part, ProtocolKind, StateVector,
};

use crate::args::ValidateArgs;
use crate::{EXIT_OK, EXIT_VALIDATION};

const VALUE_TOL: f64 = 1e-9;
const MAGNITUDE_TOL: f64 = 1e-10;

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Suite {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool) {
        self.total += 1;
        self.passed += usize::from(ok);
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

struct Plan {
    max_n: usize,
    pairs: u64,
    max_transpile_n: usize,
}

/// Contrast the real/imaginary circuit of `kind` must produce.
fn expected_contrast(kind: ProtocolKind, a: &StateVector, b: &StateVector) -> Complex64 {
    let overlap = inner_product(a, b).expect("equal widths");
    let (a0, b0) = (a.amplitudes()[0], b.amplitudes()[0]);
    match kind {
        ProtocolKind::OneControl => overlap * b0,
        ProtocolKind::ZeroControl => overlap * a0.conj() * b0,
        _ => overlap,
    }
}

pub fn run_suites(quick: bool, seed: u64, inject_sign_fault: bool) -> Vec<Suite> {
    let plan = if quick {
        Plan {
            max_n: 3,
            pairs: 4,
            max_transpile_n: 2,
        }
    } else {
        Plan {
            max_n: 5,
            pairs: 12,
            max_transpile_n: 3,
        }
    };
    let options = EstimateOptions {
        build: BuildOptions { inject_sign_fault },
        ..Default::default()
    };

    let mut real = Suite::new("real part");
    let mut imag = Suite::new("imaginary part");
    let mut recovered = Suite::new("recovered overlap");
    let mut magnitude = Suite::new("squared magnitude");
    for n in 1..=plan.max_n {
        for k in 0..plan.pairs {
            let base = seed.wrapping_add(1000 * n as u64 + 2 * k);
            let sa = StateVector::random(n, base).expect("width");
            let sb = StateVector::random(n, base + 1).expect("width");
            let (a, b) = (
                prepare_state(&sa).expect("prep"),
                prepare_state(&sb).expect("prep"),
            );
            let oracle = inner_product(&sa, &sb).expect("widths");
            for kind in ProtocolKind::ALL {
                let Ok(est) = estimate_overlap(kind, &a, &b, EvalMode::Exact, &options) else {
                    recovered.record(false);
                    continue;
                };
                match est.value {
                    Some(v) => {
                        let want = expected_contrast(kind, &sa, &sb);
                        real.record((est.outcome.real - want.re).abs() <= VALUE_TOL);
                        imag.record((est.outcome.imag - want.im).abs() <= VALUE_TOL);
                        recovered.record((v - oracle).norm() <= VALUE_TOL);
                    }
                    None => magnitude
                        .record((est.magnitude_squared - oracle.norm_sqr()).abs() <= MAGNITUDE_TOL),
                }
            }
        }
    }

    let mut widths = Suite::new("qubit-count law");
    for n in 1..=6 {
        let a = prepare_state(&StateVector::random(n, seed).expect("width")).expect("prep");
        for kind in ProtocolKind::ALL {
            let built = build_protocol(kind, &a, &a, Part::Real, None, &BuildOptions::default());
            widths.record(built.is_ok_and(|c| c.num_qubits() == kind.width(n)));
        }
    }

    let mut census = Suite::new("cswap census");
    for n in 1..=8 {
        let ra: Vec<usize> = (1..=n).collect();
        let rb: Vec<usize> = (n + 1..=2 * n).collect();
        let cx = decompose_registers_cswap(0, &ra, &rb)
            .map(|c| {
                c.instructions()
                    .iter()
                    .filter(|g| g.kind == GateKind::CX)
                    .count()
            })
            .unwrap_or(0);
        census.record(cx == 8 * n);
    }

    let mut soundness = Suite::new("transpile soundness");
    for n in 1..=plan.max_transpile_n {
        let a = prepare_state(&StateVector::random(n, seed.wrapping_add(7)).expect("width"))
            .expect("prep");
        let b = prepare_state(&StateVector::random(n, seed.wrapping_add(8)).expect("width"))
            .expect("prep");
        for kind in ProtocolKind::ALL {
            let parts: &[Part] = if kind.carries_phase() {
                &[Part::Real, Part::Imag]
            } else {
                &[Part::Real]
            };
            for &part in parts {
                let ok = (|| -> overlap_core::Result<bool> {
                    let input = build_protocol(kind, &a, &b, part, None, &BuildOptions::default())?;
                    let output = transpile(&input)?;
                    if !output
                        .instructions()
                        .iter()
                        .all(|g| BasisGateSet.admits(&g.kind))
                    {
                        return Ok(false);
                    }
                    let (u, v) = (circuit_unitary(&input)?, circuit_unitary(&output)?);
                    // tr(u^dagger v) = sum of conj(u_ij) v_ij
                    let trace: Complex64 = u.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                    let fidelity = trace.norm() / u.nrows() as f64;
                    Ok((fidelity - 1.0).abs() <= VALUE_TOL)
                })();
                soundness.record(ok.unwrap_or(false));
            }
        }
    }

    vec![real, imag, recovered, magnitude, widths, census, soundness]
}

pub fn run(args: &ValidateArgs) -> u8 {
    let suites = run_suites(args.quick, args.seed, args.inject_sign_fault);
    for s in &suites {
        println!(
            "{:<22}{:>5}/{:<5}{}",
            s.name,
            s.passed,
            s.total,
            if s.ok() { "PASS" } else { "FAIL" }
        );
    }
    let failed = suites.iter().filter(|s| !s.ok()).count();
    if failed == 0 {
        println!("all {} suites passed", suites.len());
        EXIT_OK
    } else {
        println!("{failed} of {} suites failed", suites.len());
        EXIT_VALIDATION
    }
}
