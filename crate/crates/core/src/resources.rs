//! Gate census, depth and the `d x q` metric on transpiled circuits, plus
//! the Hadamard versus one-control comparison for a product-state `A` and a
//! dense random `B`.
//!
//! Totals for a protocol are summed over its real and imaginary circuits.
//! The one-control circuit built here projects on `|0...0>`, so it carries
//! no projection X gates.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{GateKind, Polarity};
use crate::protocols::{build_protocol, BuildOptions, Part, ProtocolKind};
use crate::statevector::StateVector;
use crate::synthesis::{
    controlled, controlled_circuit, depth, prepare_separable, prepare_state, transpile,
    BasisGateSet, SeparablePrepSpec, SynthesizedPrep,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    /// Per basis gate (`cz`, `rz`, `sx`, `x`); every key is present.
    pub counts: BTreeMap<&'static str, usize>,
    pub two_qubit_count: usize,
    pub depth: usize,
    pub qubits: usize,
    pub dq: usize,
}

impl ResourceReport {
    pub fn count(&self, name: &str) -> usize {
        self.counts.get(name).copied().unwrap_or(0)
    }

    pub fn total_gates(&self) -> usize {
        self.counts.values().sum()
    }

    /// Two circuits run one after the other on the same device: counts,
    /// depth and `d x q` add, the width is the larger of the two.
    pub fn sequential_sum(&self, other: &ResourceReport) -> ResourceReport {
        let mut counts = self.counts.clone();
        for (k, v) in &other.counts {
            *counts.entry(k).or_insert(0) += v;
        }
        ResourceReport {
            counts,
            two_qubit_count: self.two_qubit_count + other.two_qubit_count,
            depth: self.depth + other.depth,
            qubits: self.qubits.max(other.qubits),
            dq: self.dq + other.dq,
        }
    }
}

/// Census of a transpiled circuit. Global-phase entries are free.
pub fn report(circuit: &Circuit) -> Result<ResourceReport> {
    let mut counts: BTreeMap<&'static str, usize> =
        BasisGateSet::NAMES.iter().map(|&k| (k, 0)).collect();
    for gate in circuit.instructions() {
        if !BasisGateSet.admits(&gate.kind) {
            return Err(Error::NotTranspiled(gate.name().to_string()));
        }
        if !matches!(gate.kind, GateKind::GlobalPhase(_)) {
            *counts.get_mut(gate.name()).expect("basis name") += 1;
        }
    }
    let d = depth(circuit);
    Ok(ResourceReport {
        two_qubit_count: counts["cz"],
        counts,
        depth: d,
        qubits: circuit.num_qubits(),
        dq: d * circuit.num_qubits(),
    })
}

/// Transpiles and reports in one step.
pub fn transpiled_report(circuit: &Circuit) -> Result<ResourceReport> {
    report(&transpile(circuit)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub protocol: ProtocolKind,
    /// Qubits per block of `A`.
    pub n: usize,
    /// Number of blocks of `A`.
    pub p: usize,
    /// Real plus imaginary circuit.
    pub report: ResourceReport,
}

/// The states of the comparison: `A` is `p` copies of a random `n`-qubit
/// block (block seed `seed`), `B` a dense random `np`-qubit state (seed `seed + 1`).
pub fn comparison_states(
    n: usize,
    p: usize,
    seed: u64,
) -> Result<(SynthesizedPrep, SynthesizedPrep)> {
    let spec = SeparablePrepSpec {
        block_qubits: n,
        block_count: p,
        block_seed: seed,
    };
    let a = prepare_separable(&spec)?;
    let b = prepare_state(&StateVector::random(n * p, seed.wrapping_add(1))?)?;
    Ok((a, b))
}

fn protocol_totals(
    kind: ProtocolKind,
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
) -> Result<ResourceReport> {
    let options = BuildOptions::default();
    let real = transpiled_report(&build_protocol(kind, a, b, Part::Real, None, &options)?)?;
    let imag = transpiled_report(&build_protocol(kind, a, b, Part::Imag, None, &options)?)?;
    Ok(real.sequential_sum(&imag))
}

/// Hadamard-test and one-control rows for one `(n, p)` configuration.
pub fn compare_protocols(n: usize, p: usize, seed: u64) -> Result<(ComparisonRow, ComparisonRow)> {
    let (a, b) = comparison_states(n, p, seed)?;
    compare_states(&a, &b, n, p)
}

fn compare_states(
    a: &SynthesizedPrep,
    b: &SynthesizedPrep,
    n: usize,
    p: usize,
) -> Result<(ComparisonRow, ComparisonRow)> {
    let row = |protocol| -> Result<ComparisonRow> {
        Ok(ComparisonRow {
            protocol,
            n,
            p,
            report: protocol_totals(protocol, a, b)?,
        })
    };
    Ok((
        row(ProtocolKind::HadamardTest)?,
        row(ProtocolKind::OneControl)?,
    ))
}

/// The a-priori selection rule: the one-control test pays for an uncontrolled
/// `U_B` and `8n` CX of register CSWAP instead of a controlled `U_B^dagger`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SelectionEstimate {
    pub controlled_b_dagger: usize,
    pub uncontrolled_b: usize,
    pub cswap_overhead: usize,
}

impl SelectionEstimate {
    pub fn prefers_one_control(&self) -> bool {
        self.controlled_b_dagger > self.uncontrolled_b + self.cswap_overhead
    }
}

/// Two-qubit costs (per circuit, post-transpile) behind the selection rule.
pub fn selection_estimate(b: &SynthesizedPrep) -> Result<SelectionEstimate> {
    let controlled_b_dagger = transpiled_report(&controlled_circuit(
        &b.exact_circuit().inverse(),
        Polarity::OnOne,
    )?)?;
    let uncontrolled_b = transpiled_report(&b.exact_circuit())?;
    Ok(SelectionEstimate {
        controlled_b_dagger: controlled_b_dagger.two_qubit_count,
        uncontrolled_b: uncontrolled_b.two_qubit_count,
        cswap_overhead: 8 * b.num_qubits(),
    })
}

/// Two-qubit cost of the controlled `U_A` alone.
pub fn controlled_a_cost(a: &SynthesizedPrep) -> Result<usize> {
    Ok(transpiled_report(&controlled(a, Polarity::OnOne)?)?.two_qubit_count)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    /// Hadamard row then one-control row per configuration, in scan order.
    pub rows: Vec<ComparisonRow>,
    /// Smallest block size with a lower one-control two-qubit total.
    pub gate_crossover: Option<usize>,
    /// Smallest block size with a lower one-control `d x q` total.
    pub dq_crossover: Option<usize>,
    /// Per configuration: whether the selection rule prefers one-control.
    pub rule_prefers_one_control: Vec<(usize, bool)>,
}

impl ScanResult {
    pub fn pairs(&self) -> impl Iterator<Item = (&ComparisonRow, &ComparisonRow)> {
        self.rows.chunks_exact(2).map(|c| (&c[0], &c[1]))
    }

    /// Whether the selection rule agrees with the measured two-qubit totals everywhere.
    pub fn rule_matches_measurement(&self) -> bool {
        self.pairs()
            .zip(&self.rule_prefers_one_control)
            .all(|((h, o), (_, rule))| {
                (o.report.two_qubit_count < h.report.two_qubit_count) == *rule
            })
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

pub const CSV_HEADER: &str = "protocol,n,p,qubits,cz,rz,sx,x,two_qubit,depth,dq";

pub fn rows_to_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.protocol,
            row.n,
            row.p,
            r.qubits,
            r.count("cz"),
            r.count("rz"),
            r.count("sx"),
            r.count("x"),
            r.two_qubit_count,
            r.depth,
            r.dq
        );
    }
    out
}

/// Sweeps the block size at fixed block count.
pub fn crossover_scan(
    block_sizes: RangeInclusive<usize>,
    block_count: usize,
    seed: u64,
) -> Result<ScanResult> {
    if block_sizes.is_empty() || *block_sizes.start() == 0 {
        return Err(Error::InvalidArgument(format!(
            "block sizes {block_sizes:?} must be a non-empty range of positive sizes"
        )));
    }
    let mut rows = Vec::new();
    let mut gate_crossover = None;
    let mut dq_crossover = None;
    let mut rule = Vec::new();
    for n in block_sizes {
        let (a, b) = comparison_states(n, block_count, seed)?;
        let (hadamard, one_control) = compare_states(&a, &b, n, block_count)?;
        if gate_crossover.is_none()
            && one_control.report.two_qubit_count < hadamard.report.two_qubit_count
        {
            gate_crossover = Some(n);
        }
        if dq_crossover.is_none() && one_control.report.dq < hadamard.report.dq {
            dq_crossover = Some(n);
        }
        rule.push((n, selection_estimate(&b)?.prefers_one_control()));
        rows.push(hadamard);
        rows.push(one_control);
    }
    Ok(ScanResult {
        rows,
        gate_crossover,
        dq_crossover,
        rule_prefers_one_control: rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::Gate;

    #[test]
    fn report_rejects_untranspiled() {
        let mut c = Circuit::new(2);
        c.push(Gate::cx(0, 1)).unwrap();
        assert_eq!(report(&c), Err(Error::NotTranspiled("cx".into())));
    }

    #[test]
    fn transpiled_cx_census() {
        let mut c = Circuit::new(2);
        c.push(Gate::cx(0, 1)).unwrap();
        let r = transpiled_report(&c).unwrap();
        assert_eq!(r.two_qubit_count, 1);
        assert_eq!(r.count("cz"), 1);
        assert_eq!(r.dq, r.depth * 2);
    }

    #[test]
    fn single_wire_dq() {
        let mut c = Circuit::new(1);
        c.push(Gate::h(0)).unwrap();
        let r = transpiled_report(&c).unwrap();
        assert_eq!(r.depth, r.total_gates());
        assert_eq!(r.qubits, 1);
        assert_eq!(r.dq, r.depth);
    }

    #[test]
    fn csv_header_and_rows() {
        let scan = crossover_scan(1..=2, 1, 3).unwrap();
        let csv = scan.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("hadamard,1,1,2,"));
        assert!(lines[2].starts_with("one-control,1,1,3,"));
    }

    #[test]
    fn empty_scan_rejected() {
        assert!(crossover_scan(0..=3, 1, 0).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 3..=2;
        assert!(crossover_scan(empty, 1, 0).is_err());
    }
}
