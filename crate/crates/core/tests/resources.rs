use overlap_core::gate::Polarity;
use overlap_core::resources::{
    comparison_states, controlled_a_cost, report, selection_estimate, transpiled_report, CSV_HEADER,
};
use overlap_core::synthesis::{controlled, decompose_registers_cswap, transpile};
use overlap_core::{compare_protocols, crossover_scan, Circuit, Gate};

#[test]
fn transpiled_cswap_has_eight_two_qubit_gates() {
    let r = transpiled_report(&decompose_registers_cswap(0, &[1], &[2]).unwrap()).unwrap();
    assert_eq!(r.two_qubit_count, 8);
    assert_eq!(r.count("cz"), 8);
    assert_eq!(r.dq, r.depth * 3);
}

#[test]
fn census_is_additive_over_concatenation() {
    let (a, b) = comparison_states(2, 2, 5).unwrap();
    let ca = transpile(a.circuit()).unwrap();
    let cb = transpile(b.circuit()).unwrap();
    let mut joined = Circuit::new(4);
    joined.append(&ca).unwrap();
    joined.append(&cb).unwrap();
    let (ra, rb, rj) = (
        report(&ca).unwrap(),
        report(&cb).unwrap(),
        report(&joined).unwrap(),
    );
    for k in ["cz", "rz", "sx", "x"] {
        assert_eq!(rj.count(k), ra.count(k) + rb.count(k));
    }
    assert!(rj.depth <= ra.depth + rb.depth);
    assert_eq!(ra.sequential_sum(&rb).two_qubit_count, rj.two_qubit_count);
}

#[test]
fn comparison_rows_pass_the_additivity_audit() {
    for (n, p) in [(1, 1), (2, 1), (3, 1), (2, 2), (1, 3)] {
        let (a, b) = comparison_states(n, p, 11).unwrap();
        let (hadamard, one) = compare_protocols(n, p, 11).unwrap();
        let width = n * p;
        assert_eq!(hadamard.report.qubits, width + 1);
        assert_eq!(one.report.qubits, 2 * width + 1);

        let ca = controlled_a_cost(&a).unwrap();
        let rule = selection_estimate(&b).unwrap();
        assert_eq!(rule.cswap_overhead, 8 * width);
        // real + imaginary circuit
        assert_eq!(
            one.report.two_qubit_count,
            2 * (ca + 8 * width + rule.uncontrolled_b)
        );
        assert_eq!(
            hadamard.report.two_qubit_count,
            2 * (ca + rule.controlled_b_dagger)
        );
        for row in [&hadamard, &one] {
            assert_eq!(row.report.dq, row.report.depth * row.report.qubits);
            assert_eq!(row.report.two_qubit_count, row.report.count("cz"));
        }
    }
}

#[test]
fn controlled_a_cost_is_only_the_controlled_prep() {
    let (a, _) = comparison_states(2, 1, 3).unwrap();
    let direct = transpiled_report(&controlled(&a, Polarity::OnOne).unwrap()).unwrap();
    assert_eq!(controlled_a_cost(&a).unwrap(), direct.two_qubit_count);
}

#[test]
fn scan_is_monotone_deterministic_and_rule_consistent() {
    let scan = crossover_scan(1..=6, 1, 2).unwrap();
    assert_eq!(scan, crossover_scan(1..=6, 1, 2).unwrap());
    assert_eq!(scan.to_csv(), crossover_scan(1..=6, 1, 2).unwrap().to_csv());
    let pairs: Vec<_> = scan.pairs().collect();
    for w in pairs.windows(2) {
        assert!(w[1].0.report.two_qubit_count >= w[0].0.report.two_qubit_count);
        assert!(w[1].1.report.two_qubit_count >= w[0].1.report.two_qubit_count);
    }
    assert!(scan.rule_matches_measurement());
    assert_eq!(scan.rule_prefers_one_control.len(), 6);
}

#[test]
fn scan_with_several_blocks() {
    let scan = crossover_scan(1..=3, 2, 4).unwrap();
    assert!(scan.rule_matches_measurement());
    let csv = scan.to_csv();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().nth(5).unwrap().starts_with("hadamard,3,2,7,"));
}

#[test]
fn report_rejects_gates_outside_the_basis() {
    let mut c = Circuit::new(1);
    c.push(Gate::h(0)).unwrap();
    assert!(report(&c).is_err());
}
