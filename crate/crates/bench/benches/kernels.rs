use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dualcore_vqe::{AnsatzSpec, Hamiltonian, StateVector};
use dualcore_vqe_bench::fixed_params;

fn target(n: usize) -> StateVector {
    Hamiltonian::tfim(n, 1.0, 0.73).unwrap().ground_state().unwrap().state
}

fn gradients(c: &mut Criterion) {
    let mut group = c.benchmark_group("fidelity_gradient");
    group.sample_size(20);
    for n in [8, 12] {
        let spec = AnsatzSpec::dual_core(n, 3, 3).unwrap();
        let compiled = spec.compile().unwrap();
        let params = fixed_params(&spec, 1);
        let t = target(n);
        let mut grad = vec![0.0; spec.param_count()];
        group.bench_with_input(BenchmarkId::new("full", n), &n, |b, _| {
            b.iter(|| compiled.circuit.fidelity_gradient_into(params.values(), t.amplitudes(), &mut grad).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("factored", n), &n, |b, _| {
            b.iter(|| compiled.fidelity_and_gradient(params.values(), &t, &mut grad).unwrap())
        });
    }
    group.finish();
}

fn ground_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("ground_state");
    group.sample_size(10);
    for n in [8, 12] {
        let h = Hamiltonian::xyz(n, 1.0, -1.0, 0.5, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| h.ground_state().unwrap()));
    }
    group.finish();
}

fn matvec(c: &mut Criterion) {
    let h = Hamiltonian::tfim(12, 1.0, 0.73).unwrap();
    let psi = target(12);
    let mut out = vec![Default::default(); psi.dim()];
    c.bench_function("matvec_tfim_12", |b| b.iter(|| h.apply(psi.amplitudes(), &mut out)));
}

criterion_group!(benches, gradients, ground_states, matvec);
criterion_main!(benches);
