use dualcore_vqe::{AnsatzSpec, Complex64 as C64, ParameterVector, StateVector};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pauli(p: char) -> DMatrix<C64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        'x' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => DMatrix::identity(2, 2),
    }
}

/// Operator acting as `ops[q]` on qubit `q`, qubit 0 being the least
/// significant tensor factor.
fn embed(n: usize, ops: &[(usize, DMatrix<C64>)]) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::identity(1, 1);
    for q in (0..n).rev() {
        let f = ops.iter().find(|(k, _)| *k == q).map_or_else(|| pauli('i'), |(_, g)| g.clone());
        m = m.kronecker(&f);
    }
    m
}

fn rot(n: usize, q: usize, axis: char, t: f64) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(1 << n, 1 << n);
    id * c((t / 2.0).cos(), 0.0) - embed(n, &[(q, pauli(axis))]) * c(0.0, (t / 2.0).sin())
}

fn zz(n: usize, a: usize, b: usize, p: f64) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(1 << n, 1 << n);
    id * c((p / 2.0).cos(), 0.0) + embed(n, &[(a, pauli('z')), (b, pauli('z'))]) * c(0.0, (p / 2.0).sin())
}

/// Dense product for the 4-qubit dual-core circuit with one remote gate and
/// one layer per block, written out gate by gate.
fn dense_dual_core_4(p: &[f64]) -> DMatrix<C64> {
    let n = 4;
    let mut k = 0;
    let mut u = DMatrix::<C64>::identity(16, 16);
    let block = |u: &mut DMatrix<C64>, qubits: [usize; 2], k: &mut usize| {
        for q in qubits {
            *u = rot(n, q, 'y', p[*k]) * &*u;
            *u = rot(n, q, 'z', p[*k + 1]) * &*u;
            *k += 2;
        }
        *u = zz(n, qubits[0], qubits[1], p[*k]) * &*u;
        *k += 1;
    };
    block(&mut u, [0, 1], &mut k);
    block(&mut u, [2, 3], &mut k);
    u = zz(n, 1, 2, p[k]) * &u;
    k += 1;
    block(&mut u, [0, 1], &mut k);
    block(&mut u, [2, 3], &mut k);
    assert_eq!(k, p.len());
    u
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-3.2..3.2)).collect()
}

fn random_target(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let amps = (0..1usize << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut s = StateVector::from_amplitudes(amps).unwrap();
    s.normalize().unwrap();
    s
}

#[test]
fn dual_core_matches_dense_unitary_product() {
    let spec = AnsatzSpec::dual_core(4, 1, 1).unwrap();
    assert_eq!(spec.param_count(), 21);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let p = random_params(&mut rng, 21);
        let u = dense_dual_core_4(&p);
        let want = u.column(0);
        let got = spec.evaluate_values(&p).unwrap();
        let factored = spec.compile().unwrap().state(&p).unwrap();
        for x in 0..16 {
            assert!((got.amplitudes()[x] - want[x]).norm() < 1e-12);
            assert!((factored.amplitudes()[x] - want[x]).norm() < 1e-12);
        }
        let uu = u.adjoint() * &u;
        assert!((uu - DMatrix::<C64>::identity(16, 16)).iter().all(|z| z.norm() < 1e-12));
    }
}

fn finite_difference_check(spec: &AnsatzSpec, rng: &mut ChaCha8Rng) {
    let compiled = spec.compile().unwrap();
    let target = random_target(rng, spec.num_qubits());
    let p = random_params(rng, spec.param_count());
    let pv = ParameterVector::from_values(spec, p.clone()).unwrap();
    let full = spec.fidelity_gradient(&pv, &target).unwrap();
    let mut fast = vec![0.0; p.len()];
    compiled.fidelity_and_gradient(&p, &target, &mut fast).unwrap();
    let h = 1e-5;
    let mut q = p.clone();
    for i in 0..p.len() {
        q[i] = p[i] + h;
        let fp = spec.evaluate_values(&q).unwrap().fidelity(&target).unwrap();
        q[i] = p[i] - h;
        let fm = spec.evaluate_values(&q).unwrap().fidelity(&target).unwrap();
        q[i] = p[i];
        let fd = (fp - fm) / (2.0 * h);
        let tol = 1e-6f64.max(1e-4 * fd.abs());
        assert!((full[i] - fd).abs() <= tol, "param {i}: {} vs {fd}", full[i]);
        assert!((fast[i] - full[i]).abs() < 1e-12, "routes disagree at {i}");
    }
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let specs = [
        AnsatzSpec::dual_core(4, 2, 2).unwrap(),
        AnsatzSpec::separable(4, 2, 1).unwrap(),
        AnsatzSpec::all_to_all(4, 3).unwrap(),
        AnsatzSpec::dual_core(8, 3, 1).unwrap().with_extra_layer(true),
        AnsatzSpec::dual_core(8, 2, 1).unwrap().with_remote_pairs(vec![(0, 7), (2, 5)]).unwrap(),
    ];
    for s in &specs {
        finite_difference_check(s, &mut rng);
    }
}

#[test]
fn gradient_vanishes_at_exact_match() {
    let spec = AnsatzSpec::dual_core(6, 2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pv = ParameterVector::from_values(&spec, random_params(&mut rng, spec.param_count())).unwrap();
    let target = spec.evaluate(&pv).unwrap();
    let g = spec.fidelity_gradient(&pv, &target).unwrap();
    assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-8);
}

#[test]
fn zero_parameters_give_all_zero_state() {
    for spec in [
        AnsatzSpec::dual_core(6, 3, 2).unwrap(),
        AnsatzSpec::separable(6, 3, 2).unwrap(),
        AnsatzSpec::all_to_all(6, 2).unwrap(),
    ] {
        let s = spec.evaluate(&ParameterVector::zeros(&spec)).unwrap();
        assert!((s.fidelity(&StateVector::zero_state(6).unwrap()).unwrap() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn stage_prefix_rejects_out_of_range() {
    let spec = AnsatzSpec::dual_core(8, 2, 1).unwrap();
    assert!(spec.stage_prefix(3).is_err());
    assert_eq!(spec.stage_prefix(2).unwrap(), spec);
    assert!(AnsatzSpec::dual_core(7, 1, 1).is_err());
    assert!(AnsatzSpec::dual_core(8, 1, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prefix_equals_full_with_zeroed_tail(seed in any::<u64>(), stage in 0..3usize, extra in any::<bool>()) {
        let spec = AnsatzSpec::dual_core(8, 2, 2).unwrap().with_extra_layer(extra);
        let prefix = spec.stage_prefix(stage).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let head = random_params(&mut rng, prefix.param_count());
        let mut full = vec![0.0; spec.param_count()];
        full[..head.len()].copy_from_slice(&head);
        let a = prefix.evaluate_values(&head).unwrap();
        let b = spec.evaluate_values(&full).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn output_is_normalized_and_reproducible(seed in any::<u64>(), n_i in 0..4usize) {
        let spec = AnsatzSpec::dual_core(8, n_i, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng, spec.param_count());
        let a = spec.evaluate_values(&p).unwrap();
        let b = spec.evaluate_values(&p).unwrap();
        prop_assert!((a.norm() - 1.0).abs() < 1e-10);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn factored_route_matches_full_state(seed in any::<u64>(), n_i in 0..4usize) {
        let spec = AnsatzSpec::dual_core(6, n_i, 1).unwrap();
        let compiled = spec.compile().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng, spec.param_count());
        let t = random_target(&mut rng, 6);
        let mut g1 = vec![0.0; p.len()];
        let f1 = compiled.fidelity_and_gradient(&p, &t, &mut g1).unwrap();
        let (f2, g2) = compiled.circuit.fidelity_gradient(&p, &t).unwrap();
        prop_assert!((f1 - f2).abs() < 1e-13);
        for (a, b) in g1.iter().zip(&g2) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
