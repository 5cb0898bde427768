use dualcore_vqe::{spin1_direct_ed, Complex64 as C64, Hamiltonian, StateVector};
use proptest::prelude::*;

fn builders(n: usize) -> Vec<Hamiltonian> {
    vec![
        Hamiltonian::tfim(n, 1.0, 0.7).unwrap(),
        Hamiltonian::tfim(n, -0.4, 1.3).unwrap(),
        Hamiltonian::xyz(n, 1.0, -1.0, 0.5, 1.0).unwrap(),
        Hamiltonian::xyz(n, 0.3, 0.8, -1.2, 0.0).unwrap(),
        Hamiltonian::spin1_heisenberg(n / 2, 1.0, 10.0).unwrap(),
    ]
}

fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_filter_map("nonzero", |v| {
        let amps: Vec<C64> = v.into_iter().map(|(r, i)| C64::new(r, i)).collect();
        let mut s = StateVector::from_amplitudes(amps).ok()?;
        s.normalize().ok()?;
        Some(s)
    })
}

#[test]
fn dense_forms_are_hermitian() {
    for n in [4, 6] {
        for h in builders(n) {
            let d = h.dense();
            let diff = (&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12, "hermiticity violated by {diff}");
        }
    }
}

#[test]
fn tfim_spectrum_symmetric_in_field_sign() {
    for n in 2..=6 {
        for h in [0.3, 1.0, 1.7] {
            let a = Hamiltonian::tfim(n, 1.0, h).unwrap().spectrum().unwrap();
            let b = Hamiltonian::tfim(n, 1.0, -h).unwrap().spectrum().unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn lanczos_agrees_with_dense_spectrum() {
    // 10 qubits goes through the iterative solver
    for h in [Hamiltonian::tfim(10, 1.0, 0.9).unwrap(), Hamiltonian::xyz(10, 1.0, -1.0, 0.5, 1.0).unwrap()] {
        let spec = h.spectrum().unwrap();
        let gs = h.ground_state().unwrap();
        assert!((gs.energy - spec[0]).abs() < 1e-9);
        assert!((gs.gap - (spec[1] - spec[0])).abs() < 1e-6);
        assert!(gs.residual < 1e-8);
        assert!((gs.state.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn ground_state_phase_is_canonical() {
    let gs = Hamiltonian::tfim(6, 1.0, 0.8).unwrap().ground_state().unwrap();
    let a = gs.state.amplitudes()[gs.state.dominant_index()];
    assert!(a.im.abs() < 1e-12 && a.re > 0.0);
}

#[test]
fn spin1_mapping_matches_direct_chain() {
    // pair spin is conserved, so the triplet sector reproduces the spin-1
    // chain exactly once it is the lowest sector
    for sites in 2..=4 {
        let direct = spin1_direct_ed(sites, 1.0).unwrap();
        let mapped = Hamiltonian::spin1_heisenberg(sites, 1.0, 10.0).unwrap().ground_state().unwrap().energy
            - Hamiltonian::spin1_offset(sites, 10.0);
        assert!((mapped - direct).abs() < 1e-8, "{sites} sites: {mapped} vs {direct}");
    }
    // the all-triplet sector stays lowest for any ferromagnetic pairing
    for j_fm in [0.5, 2.0, 6.0] {
        let mapped = Hamiltonian::spin1_heisenberg(3, 1.0, j_fm).unwrap().ground_state().unwrap().energy
            - Hamiltonian::spin1_offset(3, j_fm);
        assert!((mapped - spin1_direct_ed(3, 1.0).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn spin1_two_site_energy() {
    assert!((spin1_direct_ed(2, 1.0).unwrap() + 2.0).abs() < 1e-12);
    assert!(spin1_direct_ed(1, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn variational_bound_holds(psi in random_state(6), which in 0..5usize) {
        let h = &builders(6)[which];
        let e0 = h.ground_state().unwrap().energy;
        prop_assert!(h.expectation(&psi).unwrap() >= e0 - 1e-9);
    }

    #[test]
    fn matvec_matches_dense(psi in random_state(4), which in 0..5usize) {
        let h = &builders(4)[which];
        let dense = h.dense();
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let want = &dense * v;
        let got = h.matvec(&psi).unwrap();
        for (a, b) in got.amplitudes().iter().zip(want.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}
