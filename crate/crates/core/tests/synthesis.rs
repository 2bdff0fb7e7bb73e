mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use common::{c, dense_product, kron, kron_state, max_abs_diff, phase_insensitive_fidelity};
use num_complex::Complex64;
use overlap_core::gate::{GateKind, Polarity};
use overlap_core::synthesis::{
    controlled, controlled_circuit, decompose_cswap, decompose_registers_cswap, depth,
    prepare_product, transpile, BasisGateSet,
};
use overlap_core::{
    circuit_unitary, prepare_separable, prepare_state, Circuit, Gate, Matrix, SeparablePrepSpec,
    StateVector, SynthesizedPrep,
};

fn cx_count(c: &Circuit) -> usize {
    c.instructions()
        .iter()
        .filter(|g| g.kind == GateKind::CX)
        .count()
}

fn simulate(c: &Circuit) -> StateVector {
    let mut s = StateVector::zero(c.num_qubits()).unwrap();
    s.apply_circuit(c).unwrap();
    s
}

fn max_state_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn prep_of_zero_state_is_empty() {
    let p = prepare_state(&StateVector::zero(3).unwrap()).unwrap();
    assert_eq!(p.circuit().gate_count(), 0);
    assert_eq!(p.global_phase(), 0.0);
}

#[test]
fn prep_of_plus_state_is_one_rotation() {
    let plus =
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
    let p = prepare_state(&plus).unwrap();
    assert_eq!(p.circuit().gate_count(), 1);
    let out = simulate(p.circuit()).with_phase(-p.global_phase());
    assert!(max_state_diff(&out, &plus) < 1e-12);
}

#[test]
fn prep_round_trip_for_100_targets() {
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let n = 1 + (k % 5) as usize;
        let target = StateVector::random(n, 1000 + k).unwrap();
        let p = prepare_state(&target).unwrap();
        // circuit |0> = e^{i phi} target
        let expected = target.clone().with_phase(p.global_phase());
        worst = worst.max(max_state_diff(&simulate(p.circuit()), &expected));
        worst = worst.max(max_state_diff(&p.target_state().unwrap(), &target));
        assert!(p
            .circuit()
            .instructions()
            .iter()
            .all(|g| matches!(g.kind, GateKind::RY(_) | GateKind::RZ(_) | GateKind::CX)));
    }
    assert!(worst < 1e-9, "worst deviation {worst:.3e}");
}

#[test]
fn prep_of_random_4_qubit_seed_11() {
    let target = StateVector::random(4, 11).unwrap();
    let p = prepare_state(&target).unwrap();
    assert!(max_state_diff(&simulate(p.circuit()), &target.with_phase(p.global_phase())) < 1e-9);
}

#[test]
fn prep_handles_sparse_targets() {
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[5] = c(0.0, 1.0);
    let basis = StateVector::from_amplitudes(amps).unwrap();
    let p = prepare_state(&basis).unwrap();
    assert!(max_state_diff(&p.target_state().unwrap(), &basis) < 1e-12);

    let mut amps = vec![c(0.0, 0.0); 16];
    amps[3] = c(0.6, 0.0);
    amps[12] = c(0.0, -0.8);
    let ghz_like = StateVector::from_amplitudes(amps).unwrap();
    let p = prepare_state(&ghz_like).unwrap();
    assert!(max_state_diff(&p.target_state().unwrap(), &ghz_like) < 1e-12);
}

#[test]
fn separable_single_block_is_plain_prep() {
    let spec = SeparablePrepSpec {
        block_qubits: 3,
        block_count: 1,
        block_seed: 4,
    };
    let sep = prepare_separable(&spec).unwrap();
    let plain = prepare_state(&StateVector::random(3, 4).unwrap()).unwrap();
    assert_eq!(sep, plain);
}

#[test]
fn separable_uniform_blocks() {
    let plus =
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
    let p = prepare_product(&plus, 2).unwrap();
    for a in p.target_state().unwrap().amplitudes() {
        assert!((a - c(0.5, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn separable_tensor_power() {
    for seed in [2u64, 9, 31] {
        let spec = SeparablePrepSpec {
            block_qubits: 2,
            block_count: 3,
            block_seed: seed,
        };
        let block = StateVector::random(2, seed).unwrap();
        let expected = kron_state(&kron_state(&block, &block), &block);
        let p = prepare_separable(&spec).unwrap();
        assert_eq!(p.num_qubits(), 6);
        assert!(max_state_diff(&p.target_state().unwrap(), &expected) < 1e-9);
    }
}

/// `[I 0; 0 V]` over (control qubit 0, body qubits 1..), or the mirror for on-zero.
fn block_reference(v: &Matrix, polarity: Polarity) -> Matrix {
    let dim = v.nrows();
    let id = Matrix::identity(dim, dim);
    let (on0, on1) = match polarity {
        Polarity::OnOne => (&id, v),
        Polarity::OnZero => (v, &id),
    };
    // control is the least significant bit: projectors on it sit on the right of the kron
    let p0 = Matrix::from_fn(2, 2, |i, j| {
        if i == 0 && j == 0 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let p1 = Matrix::from_fn(2, 2, |i, j| {
        if i == 1 && j == 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    kron(on0, &p0) + kron(on1, &p1)
}

#[test]
fn controlled_identity_and_x() {
    let id = controlled(&SynthesizedPrep::identity(2), Polarity::OnOne).unwrap();
    let u = circuit_unitary(&id).unwrap();
    assert!(max_abs_diff(&u, &Matrix::identity(8, 8)) < 1e-12);

    let mut x = Circuit::new(1);
    x.push(Gate::x(0)).unwrap();
    let cx = controlled(&SynthesizedPrep::new(x, 0.0), Polarity::OnOne).unwrap();
    let mut s = StateVector::basis(2, 0b01).unwrap();
    s.apply_circuit(&cx).unwrap();
    assert!((s.amplitudes()[0b11] - c(1.0, 0.0)).norm() < 1e-12);
    let mut s = StateVector::zero(2).unwrap();
    s.apply_circuit(&cx).unwrap();
    assert!((s.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn controlled_prep_matches_block_matrix() {
    for n in 1..=4 {
        for seed in [5u64, 6] {
            let p = prepare_state(&StateVector::random(n, seed).unwrap()).unwrap();
            // active branch runs e^{-i phi} C
            let v = dense_product(p.circuit()) * Complex64::from_polar(1.0, -p.global_phase());
            for polarity in [Polarity::OnOne, Polarity::OnZero] {
                let got = circuit_unitary(&controlled(&p, polarity).unwrap()).unwrap();
                let diff = max_abs_diff(&got, &block_reference(&v, polarity));
                assert!(diff < 1e-9, "n {n} seed {seed} {polarity:?}: {diff:.3e}");
            }
        }
    }
}

#[test]
fn controlled_arbitrary_gates_match_block_matrix() {
    let mut body = Circuit::new(3);
    for g in [
        Gate::h(0),
        Gate::s(1),
        Gate::t(2),
        Gate::sx(0),
        Gate::cx(0, 2),
        Gate::cz(1, 2),
        Gate::swap(0, 1),
        Gate::cswap(2, 0, 1),
        Gate::ry(1, 0.4),
        Gate::global_phase(1.3),
    ] {
        body.push(g).unwrap();
    }
    let v = dense_product(&body);
    for polarity in [Polarity::OnOne, Polarity::OnZero] {
        let got = circuit_unitary(&controlled_circuit(&body, polarity).unwrap()).unwrap();
        assert!(max_abs_diff(&got, &block_reference(&v, polarity)) < 1e-10);
    }
}

#[test]
fn controlled_inflation_stays_within_bound() {
    let mut ratios = Vec::new();
    for n in 1..=5 {
        let p = prepare_state(&StateVector::random(n, 77).unwrap()).unwrap();
        let two = cx_count(p.circuit());
        let one = p.circuit().gate_count() - two;
        let controlled_two = cx_count(&controlled(&p, Polarity::OnOne).unwrap());
        assert!(controlled_two <= 8 * two + 2 * one + 2, "n {n}");
        if two > 0 {
            ratios.push((n, controlled_two as f64 / two as f64));
        }
    }
    // reported, not asserted
    for (n, r) in ratios {
        println!("controlled inflation n={n}: {r:.2}x two-qubit gates");
    }
}

#[test]
fn cswap_decomposition() {
    let c3 = decompose_cswap(0, 1, 2).unwrap();
    assert_eq!(cx_count(&c3), 8);
    let u = circuit_unitary(&c3).unwrap();
    let perm = Matrix::from_fn(8, 8, |row, col| {
        let target = if col & 1 == 1 {
            1 | ((col & 2) << 1) | ((col & 4) >> 1)
        } else {
            col
        };
        if row == target {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    assert!(max_abs_diff(&u, &perm) < 1e-10);

    // |1>_c |0>_a |1>_b  ->  |1>_c |1>_a |0>_b
    let mut s = StateVector::basis(3, 0b101).unwrap();
    s.apply_circuit(&c3).unwrap();
    assert!((s.amplitudes()[0b011] - c(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn register_cswap_census() {
    for n in 1..=8 {
        let a: Vec<usize> = (1..=n).collect();
        let b: Vec<usize> = (n + 1..=2 * n).collect();
        let c = decompose_registers_cswap(0, &a, &b).unwrap();
        assert_eq!(cx_count(&c), 8 * n);
    }
    assert!(decompose_registers_cswap(0, &[1, 2], &[3]).is_err());
    assert!(decompose_registers_cswap(0, &[1], &[1]).is_err());
}

#[test]
fn register_cswap_unitary_n2() {
    let c2 = decompose_registers_cswap(0, &[1, 2], &[3, 4]).unwrap();
    let mut reference = Circuit::new(5);
    reference.push(Gate::cswap(0, 1, 3)).unwrap();
    reference.push(Gate::cswap(0, 2, 4)).unwrap();
    assert!(max_abs_diff(&circuit_unitary(&c2).unwrap(), &dense_product(&reference)) < 1e-10);
}

fn assert_transpiled_equal(input: &Circuit) {
    let out = transpile(input).unwrap();
    assert!(out
        .instructions()
        .iter()
        .all(|g| BasisGateSet.admits(&g.kind)));
    let phases = out
        .instructions()
        .iter()
        .filter(|g| g.is_global_phase())
        .count();
    assert!(phases <= 1);
    if phases == 1 {
        assert!(out.instructions().last().unwrap().is_global_phase());
    }
    let u = circuit_unitary(input).unwrap();
    let v = circuit_unitary(&out).unwrap();
    assert!((phase_insensitive_fidelity(&u, &v) - 1.0).abs() < 1e-9);
    // the phase is tracked too
    assert!(max_abs_diff(&u, &v) < 1e-9);
}

#[test]
fn transpile_h_and_cx() {
    let mut h = Circuit::new(1);
    h.push(Gate::h(0)).unwrap();
    let out = transpile(&h).unwrap();
    let names: Vec<_> = out
        .instructions()
        .iter()
        .filter(|g| !g.is_global_phase())
        .map(|g| g.name())
        .collect();
    assert_eq!(names, ["rz", "sx", "rz"]);
    assert_transpiled_equal(&h);

    let mut cx = Circuit::new(2);
    cx.push(Gate::cx(0, 1)).unwrap();
    let out = transpile(&cx).unwrap();
    assert_eq!(
        out.instructions()
            .iter()
            .filter(|g| g.kind == GateKind::CZ)
            .count(),
        1
    );
    assert_transpiled_equal(&cx);
}

#[test]
fn transpile_is_exact_on_every_gate_kind() {
    let mut c = Circuit::new(3);
    for g in [
        Gate::x(0),
        Gate::h(1),
        Gate::s(2),
        Gate::sdg(0),
        Gate::t(1),
        Gate::tdg(2),
        Gate::sx(0),
        Gate::ry(1, 2.1),
        Gate::rz(2, -0.3),
        Gate::rz(2, 0.3),
        Gate::cx(0, 1),
        Gate::cz(1, 2),
        Gate::swap(0, 2),
        Gate::cswap(1, 0, 2),
        Gate::ccx(0, 1, 2),
        Gate::global_phase(0.77),
    ] {
        c.push(g).unwrap();
    }
    assert_transpiled_equal(&c);
    let mut ctl = controlled_circuit(&c, Polarity::OnZero).unwrap();
    ctl.push(Gate::ry(3, 3.0)).unwrap();
    assert_transpiled_equal(&ctl);
}

#[test]
fn transpile_controlled_preps() {
    for n in 1..=3 {
        let p = prepare_state(&StateVector::random(n, 40 + n as u64).unwrap()).unwrap();
        assert_transpiled_equal(p.circuit());
        assert_transpiled_equal(&controlled(&p, Polarity::OnOne).unwrap());
    }
}

#[test]
fn transpile_merges_adjacent_rz() {
    let mut c = Circuit::new(1);
    c.push(Gate::rz(0, 0.25)).unwrap();
    c.push(Gate::rz(0, -0.25)).unwrap();
    let out = transpile(&c).unwrap();
    assert_eq!(out.gate_count(), 0);
}

/// Longest path in the gate dependency graph, computed pairwise.
fn reference_depth(c: &Circuit) -> usize {
    let gates: Vec<_> = c
        .instructions()
        .iter()
        .filter(|g| !g.is_global_phase())
        .collect();
    let mut longest = vec![0usize; gates.len()];
    for j in 0..gates.len() {
        let mut best = 0;
        for i in 0..j {
            if gates[i].qubits.iter().any(|q| gates[j].qubits.contains(q)) {
                best = best.max(longest[i]);
            }
        }
        longest[j] = best + 1;
    }
    longest.into_iter().max().unwrap_or(0)
}

#[test]
fn depth_examples() {
    let mut c = Circuit::new(2);
    c.push(Gate::h(0)).unwrap();
    c.push(Gate::h(1)).unwrap();
    assert_eq!(depth(&c), 1);
    let mut c = Circuit::new(2);
    c.push(Gate::h(0)).unwrap();
    c.push(Gate::cx(0, 1)).unwrap();
    c.push(Gate::h(1)).unwrap();
    assert_eq!(depth(&c), 3);
    c.push(Gate::global_phase(1.0)).unwrap();
    assert_eq!(depth(&c), 3);
}

#[test]
fn depth_matches_independent_scheduler() {
    let t = transpile(&decompose_registers_cswap(0, &[1, 2, 3], &[4, 5, 6]).unwrap()).unwrap();
    assert_eq!(depth(&t), reference_depth(&t));
    for n in 1..=4 {
        let p = prepare_state(&StateVector::random(n, 8).unwrap()).unwrap();
        let t = transpile(&controlled(&p, Polarity::OnOne).unwrap()).unwrap();
        assert_eq!(depth(&t), reference_depth(&t));
    }
}
