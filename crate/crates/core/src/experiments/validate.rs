//! Self-checks run by the `validate` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::AnsatzSpec;
use crate::error::Result;
use crate::hamiltonian::{spin1_direct_ed, Hamiltonian};
use crate::schmidt::schmidt_rank;
use crate::statevector::StateVector;
use crate::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Result<StateVector> {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut s = StateVector::from_amplitudes(amps)?;
    s.normalize()?;
    Ok(s)
}

/// Largest violation of `|analytic - fd| <= max(1e-6, 1e-4 |fd|)`, as a ratio.
fn gradient_check(spec: &AnsatzSpec, rng: &mut ChaCha8Rng) -> Result<f64> {
    let compiled = spec.compile()?;
    let target = random_state(rng, spec.num_qubits())?;
    let params = random_params(rng, spec.param_count());
    let mut grad = vec![0.0; params.len()];
    compiled.fidelity_and_gradient(&params, &target, &mut grad)?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut p = params.clone();
    for i in 0..params.len() {
        p[i] = params[i] + h;
        let fp = compiled.state(&p)?.fidelity(&target)?;
        p[i] = params[i] - h;
        let fm = compiled.state(&p)?.fidelity(&target)?;
        p[i] = params[i];
        let fd = (fp - fm) / (2.0 * h);
        let tol = 1e-6f64.max(1e-4 * fd.abs());
        worst = worst.max((grad[i] - fd).abs() / tol);
    }
    Ok(worst)
}

fn gradient_checks() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let specs = [
        AnsatzSpec::dual_core(4, 2, 1)?,
        AnsatzSpec::separable(4, 2, 1)?,
        AnsatzSpec::all_to_all(4, 2)?,
        AnsatzSpec::dual_core(8, 3, 1)?,
    ];
    let mut worst: f64 = 0.0;
    for s in &specs {
        worst = worst.max(gradient_check(s, &mut rng)?);
    }
    Ok(Check::new(
        "adjoint gradient matches central differences",
        worst <= 1.0,
        format!("worst error / tolerance = {worst:.3}"),
    ))
}

fn rank_law() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut violations = 0;
    let mut draws = 0;
    for n_i in 0..=3 {
        let spec = AnsatzSpec::dual_core(8, n_i, 1)?;
        for _ in 0..20 {
            let p = random_params(&mut rng, spec.param_count());
            let s = spec.evaluate_values(&p)?;
            if schmidt_rank(&s, spec.cut(), 1e-10)? > 1 << n_i {
                violations += 1;
            }
            draws += 1;
        }
    }
    Ok(Check::new(
        "Schmidt rank <= 2^n_i across the cut",
        violations == 0,
        format!("{violations} violations in {draws} draws"),
    ))
}

fn energy_check(name: &str, got: f64, want: f64, tol: f64) -> Check {
    let err = (got - want).abs();
    Check::new(name, err <= tol, format!("got {got:.12}, expected {want:.12}"))
}

fn oracles() -> Result<Vec<Check>> {
    let mut out = vec![
        energy_check(
            "two-qubit transverse Ising ground energy",
            Hamiltonian::tfim(2, 1.0, 1.0)?.ground_state()?.energy,
            -(5f64.sqrt()),
            1e-10,
        ),
        energy_check(
            "zero-field Ising chain ground energy",
            Hamiltonian::tfim(6, 1.0, 0.0)?.ground_state()?.energy,
            -5.0,
            1e-10,
        ),
        energy_check(
            "two-site Heisenberg ground energy",
            Hamiltonian::xyz(2, 1.0, 1.0, 1.0, 0.0)?.ground_state()?.energy,
            -0.75,
            1e-10,
        ),
    ];
    let mut worst: f64 = 0.0;
    for sites in 2..=4 {
        let mapped = Hamiltonian::spin1_heisenberg(sites, 1.0, 10.0)?.ground_state()?.energy
            - Hamiltonian::spin1_offset(sites, 10.0);
        worst = worst.max((mapped - spin1_direct_ed(sites, 1.0)?).abs());
    }
    out.push(Check::new(
        "qubit-pair spin-1 mapping matches direct spin-1 diagonalization",
        worst <= 1e-8,
        format!("largest deviation {worst:.2e} over 2-4 sites"),
    ));
    Ok(out)
}

/// All checks, in a fixed order.
pub fn run_validation() -> Result<Vec<Check>> {
    let mut checks = vec![gradient_checks()?, rank_law()?];
    checks.extend(oracles()?);
    Ok(checks)
}
