//! Staged fidelity training against Schmidt-truncated ground states.
//!
//! Stage `k` of a two-module ansatz is trained towards the ground state
//! truncated to `2^r` Schmidt terms, `r` being the number of remote gates the
//! stage prefix contains. Parameters from the previous stage are copied in;
//! new ones are drawn at random per restart, and the best restart wins.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Architecture, CompiledAnsatz, ParameterVector};
use crate::error::{Error, Result};
use crate::hamiltonian::{GroundStateSolution, Hamiltonian};
use crate::schmidt::SchmidtDecomposition;
use crate::statevector::StateVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            step_size: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    /// Random initializations per stage.
    pub restarts: usize,
    pub adam: AdamConfig,
    pub max_iterations: usize,
    /// Stop once the cost changes by less than this over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    pub rng_seed: u64,
    /// New parameters are drawn uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            restarts: 200,
            adam: AdamConfig::default(),
            max_iterations: 2000,
            tolerance: 1e-10,
            window: 25,
            rng_seed: 0,
            init_range: std::f64::consts::PI,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::config("restarts must be >= 1"));
        }
        if !(self.adam.step_size > 0.0) {
            return Err(Error::config("Adam step size must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance must be positive"));
        }
        if self.window == 0 {
            return Err(Error::config("convergence window must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.adam.beta1) || !(0.0..1.0).contains(&self.adam.beta2) {
            return Err(Error::config("Adam betas must lie in [0, 1)"));
        }
        if !(self.init_range >= 0.0) {
            return Err(Error::config("init_range must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StageResult {
    pub stage: usize,
    /// Schmidt rank of the stage target requested by the protocol.
    pub d_target: usize,
    pub optimized_params: ParameterVector,
    pub fidelity_to_stage_target: f64,
    pub restart_index_selected: usize,
    pub iterations: usize,
    /// Restarts dropped because the cost became non-finite.
    pub discarded_restarts: usize,
}

#[derive(Debug, Clone)]
pub struct TrainingResult {
    pub stages: Vec<StageResult>,
    pub final_params: ParameterVector,
    pub final_state: StateVector,
    pub e_gs: f64,
    pub e_var: f64,
    /// `|E_var / E_GS - 1|`.
    pub epsilon: f64,
    /// `E_var / E_GS - 1`.
    pub epsilon_signed: f64,
    pub infidelity_to_exact_gs: f64,
    /// Schmidt weight beyond the ansatz's maximal rank: a floor on the infidelity.
    pub discarded_weight: f64,
    pub warnings: Vec<String>,
    pub wall_time: f64,
}

/// `|e_var / e_gs - 1|`.
pub fn epsilon(e_var: f64, e_gs: f64) -> Result<f64> {
    epsilon_signed(e_var, e_gs).map(f64::abs)
}

pub fn epsilon_signed(e_var: f64, e_gs: f64) -> Result<f64> {
    if e_gs == 0.0 {
        return Err(Error::UndefinedMeasure("exact ground energy is zero".into()));
    }
    Ok(e_var / e_gs - 1.0)
}

/// Targets at `d = 1, 2, 4, ..., 2^n_i`, each capped at the state's rank.
pub fn stage_targets(gs: &StateVector, cut: usize, n_i: usize) -> Result<Vec<StateVector>> {
    let decomp = SchmidtDecomposition::new(gs, cut)?;
    (0..=n_i)
        .map(|k| decomp.truncate_to_state((1usize << k).min(decomp.rank())))
        .collect()
}

/// Largest Schmidt rank across the cut the ansatz can reach.
pub fn max_schmidt_rank(spec: &AnsatzSpec) -> usize {
    match spec.architecture() {
        Architecture::AllToAll => {
            let c = spec.cut();
            1usize << c.min(spec.num_qubits() - c)
        }
        _ => 1usize << spec.n_interconnect(),
    }
}

fn restart_seed(base: u64, stage: usize, restart: usize) -> u64 {
    // splitmix64 finalizer over a simple combination
    let mut z = base
        ^ (stage as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (restart as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct RunOutcome {
    fidelity: f64,
    params: Vec<f64>,
    iterations: usize,
}

/// Adam on `1 - F`. Returns the best point visited, or `None` if the cost
/// went non-finite.
fn optimize(
    compiled: &CompiledAnsatz,
    target: &StateVector,
    mut params: Vec<f64>,
    config: &TrainingConfig,
) -> Result<Option<RunOutcome>> {
    let n = params.len();
    let adam = &config.adam;
    let mut grad = vec![0.0; n];
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut history: Vec<f64> = Vec::with_capacity(config.max_iterations + 1);
    let mut best_cost = f64::INFINITY;
    let mut best = params.clone();
    let (mut b1t, mut b2t) = (1.0, 1.0);
    let mut iterations = 0;
    for it in 0..=config.max_iterations {
        let f = compiled.fidelity_and_gradient(&params, target, &mut grad)?;
        let cost = 1.0 - f;
        if !cost.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Ok(None);
        }
        if cost < best_cost {
            best_cost = cost;
            best.copy_from_slice(&params);
        }
        history.push(cost);
        iterations = it;
        if it == config.max_iterations {
            break;
        }
        if it >= config.window && (history[it - config.window] - cost).abs() < config.tolerance {
            break;
        }
        b1t *= adam.beta1;
        b2t *= adam.beta2;
        for i in 0..n {
            // minimizing 1 - F
            let g = -grad[i];
            m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g;
            v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g * g;
            let mh = m[i] / (1.0 - b1t);
            let vh = v[i] / (1.0 - b2t);
            params[i] -= adam.step_size * mh / (vh.sqrt() + adam.epsilon);
        }
    }
    Ok(Some(RunOutcome {
        fidelity: (1.0 - best_cost).clamp(0.0, 1.0),
        params: best,
        iterations,
    }))
}

/// Train one stage prefix towards `target`.
///
/// With a warm start, restart 0 keeps the new parameters at zero, so it
/// starts from the previous stage's optimum; every other restart (and
/// restart 0 without a warm start) draws them uniformly.
pub fn train_stage(
    spec_prefix: &AnsatzSpec,
    target: &StateVector,
    warm_params: Option<&ParameterVector>,
    config: &TrainingConfig,
) -> Result<StageResult> {
    config.validate()?;
    if target.num_qubits() != spec_prefix.num_qubits() {
        return Err(Error::validation(format!(
            "target has {} qubits, ansatz {}",
            target.num_qubits(),
            spec_prefix.num_qubits()
        )));
    }
    let compiled = spec_prefix.compile()?;
    let n = compiled.layout.len();
    let warm: &[f64] = match warm_params {
        Some(w) => {
            if w.len() > n || w.layout().slots() != &compiled.layout.slots()[..w.len()] {
                return Err(Error::validation(
                    "warm-start parameters are not a prefix of the stage layout",
                ));
            }
            w.values()
        }
        None => &[],
    };
    let stage = spec_prefix.stages() - 1;

    let outcomes: Vec<Result<Option<RunOutcome>>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut init = vec![0.0; n];
            init[..warm.len()].copy_from_slice(warm);
            if r > 0 || warm.is_empty() {
                let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.rng_seed, stage, r));
                for x in &mut init[warm.len()..] {
                    *x = rng.random_range(-config.init_range..=config.init_range);
                }
            }
            optimize(&compiled, target, init, config)
        })
        .collect();

    let mut best: Option<(usize, RunOutcome)> = None;
    let mut discarded = 0;
    for (r, out) in outcomes.into_iter().enumerate() {
        match out? {
            None => {
                discarded += 1;
                log::warn!("stage {stage} restart {r}: non-finite cost, restart discarded");
            }
            Some(o) => {
                if best.as_ref().is_none_or(|(_, b)| o.fidelity > b.fidelity) {
                    best = Some((r, o));
                }
            }
        }
    }
    let (restart, outcome) = best.ok_or_else(|| {
        Error::Numerical(format!("stage {stage}: every restart produced a non-finite cost"))
    })?;
    log::debug!(
        "stage {stage}: fidelity {:.9} (restart {restart}, {} iterations)",
        outcome.fidelity,
        outcome.iterations
    );
    Ok(StageResult {
        stage,
        d_target: max_schmidt_rank(spec_prefix),
        optimized_params: ParameterVector::from_values(spec_prefix, outcome.params)?,
        fidelity_to_stage_target: outcome.fidelity,
        restart_index_selected: restart,
        iterations: outcome.iterations,
        discarded_restarts: discarded,
    })
}

/// Exact ground state, staged training and final metrics.
pub fn train_full(model: &Hamiltonian, spec: &AnsatzSpec, config: &TrainingConfig) -> Result<TrainingResult> {
    if model.num_qubits() != spec.num_qubits() {
        return Err(Error::validation(format!(
            "model has {} qubits, ansatz {}",
            model.num_qubits(),
            spec.num_qubits()
        )));
    }
    let gs = model.ground_state()?;
    train_with_ground_state(model, &gs, spec, None, config)
}

/// [`train_full`] with a precomputed ground state and an optional warm start
/// for the first stage.
pub fn train_with_ground_state(
    model: &Hamiltonian,
    gs: &GroundStateSolution,
    spec: &AnsatzSpec,
    warm: Option<&ParameterVector>,
    config: &TrainingConfig,
) -> Result<TrainingResult> {
    config.validate()?;
    if model.num_qubits() != spec.num_qubits() || gs.state.num_qubits() != spec.num_qubits() {
        return Err(Error::validation("model, ground state and ansatz sizes differ"));
    }
    let start = Instant::now();
    let mut warnings = Vec::new();
    if gs.degenerate {
        warnings.push(format!(
            "ground state is degenerate (gap {:.2e}); target is one member of the ground manifold",
            gs.gap
        ));
    }
    let decomp = SchmidtDecomposition::new(&gs.state, spec.cut())?;
    let mut stages = Vec::with_capacity(spec.stages());
    let mut params = warm.cloned();
    for k in 0..spec.stages() {
        let prefix = spec.stage_prefix(k)?;
        let target = match spec.architecture() {
            Architecture::AllToAll => gs.state.clone(),
            _ => {
                let d = (1usize << prefix.n_interconnect()).min(decomp.rank());
                decomp.truncate_to_state(d)?
            }
        };
        let res = train_stage(&prefix, &target, params.as_ref(), config)?;
        params = Some(res.optimized_params.clone());
        stages.push(res);
    }
    let final_params = params.expect("at least one stage");
    let final_state = spec.evaluate(&final_params)?;
    let e_var = model.expectation(&final_state)?;
    let infidelity = (1.0 - final_state.fidelity(&gs.state)?).clamp(0.0, 1.0);
    let d = max_schmidt_rank(spec).min(decomp.values().len());
    let result = TrainingResult {
        stages,
        final_params,
        final_state,
        e_gs: gs.energy,
        e_var,
        epsilon: epsilon(e_var, gs.energy)?,
        epsilon_signed: epsilon_signed(e_var, gs.energy)?,
        infidelity_to_exact_gs: infidelity,
        discarded_weight: decomp.discarded_weight(d)?,
        warnings,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok(result)
}

/// All-to-all ansatz trained at increasing depth, each depth warm-started
/// from the previous optimum (extra layers start at identity in restart 0).
pub fn train_layer_sweep(
    model: &Hamiltonian,
    gs: &GroundStateSolution,
    base: &AnsatzSpec,
    layers: &[usize],
    config: &TrainingConfig,
) -> Result<Vec<TrainingResult>> {
    let mut sorted = layers.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != layers.len() || sorted != layers {
        return Err(Error::config("layer counts must be strictly increasing"));
    }
    let mut out: Vec<TrainingResult> = Vec::with_capacity(layers.len());
    for &l in layers {
        let spec = AnsatzSpec::all_to_all(base.num_qubits(), l)?.with_template(base.template().clone())?;
        let warm = out.last().map(|r| &r.final_params);
        out.push(train_with_ground_state(model, gs, &spec, warm, config)?);
    }
    Ok(out)
}
