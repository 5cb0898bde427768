//! Experiment drivers. Each produces one row per (model point, architecture),
//! or one error row when that combination fails.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::{AnsatzSpec, Architecture};
use crate::error::{Error, Result};
use crate::hamiltonian::{GroundStateSolution, Hamiltonian};
use crate::schmidt::SchmidtDecomposition;
use crate::statevector::StateVector;
use crate::trainer::{self, epsilon, epsilon_signed, max_schmidt_rank, TrainingResult};

use super::config::{ExperimentConfig, ExperimentKind, ModelPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    /// Largest `epsilon` among the successful rows of its architecture.
    Worst,
    Error,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Worst => "worst",
            RowStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub model: String,
    /// `key=value` pairs joined by `;`.
    pub model_params: String,
    pub num_qubits: usize,
    pub architecture: Architecture,
    pub n_i: usize,
    pub num_layers: usize,
    pub param_count: usize,
    pub e_gs: Option<f64>,
    pub e_var: Option<f64>,
    pub epsilon_signed: Option<f64>,
    pub epsilon: Option<f64>,
    pub infidelity: Option<f64>,
    pub discarded_weight: Option<f64>,
    pub seed: u64,
    pub wall_time: f64,
    pub status: RowStatus,
    pub message: String,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status != RowStatus::Error
    }
}

/// A Hamiltonian plus how it is reported.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub name: &'static str,
    pub params: String,
    pub hamiltonian: Hamiltonian,
    /// Constant removed from reported energies (the spin-1 triplet shift).
    pub energy_offset: f64,
}

fn fmt_param(v: f64) -> String {
    // shortest round-trip form keeps the column stable and readable
    format!("{v}")
}

impl ModelInstance {
    pub fn tfim(n: usize, j: f64, h_x: f64) -> Result<Self> {
        Ok(Self {
            name: "tfim",
            params: format!("j={};h_x={}", fmt_param(j), fmt_param(h_x)),
            hamiltonian: Hamiltonian::tfim(n, j, h_x)?,
            energy_offset: 0.0,
        })
    }

    pub fn xyz(n: usize, j_x: f64, j_y: f64, j_z: f64, h_x: f64) -> Result<Self> {
        Ok(Self {
            name: "xyz",
            params: format!(
                "j_x={};j_y={};j_z={};h_x={}",
                fmt_param(j_x),
                fmt_param(j_y),
                fmt_param(j_z),
                fmt_param(h_x)
            ),
            hamiltonian: Hamiltonian::xyz(n, j_x, j_y, j_z, h_x)?,
            energy_offset: 0.0,
        })
    }

    pub fn spin1(n: usize, j: f64, j_fm: f64) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::config(format!("spin-1 chain needs an even qubit count, got {n}")));
        }
        let pairs = n / 2;
        Ok(Self {
            name: "spin1",
            params: format!("j={};j_fm={};sites={pairs}", fmt_param(j), fmt_param(j_fm.abs())),
            hamiltonian: Hamiltonian::spin1_heisenberg(pairs, j, j_fm)?,
            energy_offset: Hamiltonian::spin1_offset(pairs, j_fm),
        })
    }

    pub fn from_point(point: ModelPoint, config: &ExperimentConfig) -> Result<Self> {
        let n = config.num_qubits;
        match point {
            ModelPoint::Tfim { h_x } => Self::tfim(n, config.j, h_x),
            ModelPoint::Xyz { j_y, j_z, h_x } => Self::xyz(n, config.j, j_y, j_z, h_x),
            ModelPoint::Spin1 => Self::spin1(n, config.j, config.j_fm),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.hamiltonian.num_qubits()
    }
}

/// Ansatz for `arch` on `n` qubits under `config`.
pub fn build_spec(config: &ExperimentConfig, arch: Architecture, n: usize, n_i: usize, extra: bool) -> Result<AnsatzSpec> {
    let spec = match arch {
        Architecture::DualCore => {
            let mut s = AnsatzSpec::dual_core(n, n_i, config.layers_per_block)?;
            if let Some(p) = &config.remote_pairs {
                s = s.with_remote_pairs(p[..n_i.min(p.len())].to_vec())?;
            }
            s.with_extra_layer(extra)
        }
        Architecture::Separable => AnsatzSpec::separable(n, config.separable_stages, config.layers_per_block)?,
        Architecture::AllToAll => AnsatzSpec::all_to_all(n, config.all_to_all_layers)?,
    };
    spec.with_template(config.template.clone())
}

/// Exact solution shared by every architecture at one model point.
pub struct PointContext {
    pub model: ModelInstance,
    pub gs: GroundStateSolution,
    pub decomp: SchmidtDecomposition,
}

impl PointContext {
    pub fn new(model: ModelInstance) -> Result<Self> {
        let gs = model.hamiltonian.ground_state()?;
        let decomp = SchmidtDecomposition::new(&gs.state, model.num_qubits() / 2)?;
        Ok(Self { model, gs, decomp })
    }
}

/// Measured quantities of one variational state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMetrics {
    pub e_gs: f64,
    pub e_var: f64,
    pub epsilon_signed: f64,
    pub epsilon: f64,
    pub infidelity: f64,
    pub discarded_weight: f64,
}

/// Energies here have the model's constant offset removed.
pub fn measure(ctx: &PointContext, spec: &AnsatzSpec, state: &StateVector) -> Result<StateMetrics> {
    let off = ctx.model.energy_offset;
    let e_gs = ctx.gs.energy - off;
    let e_var = ctx.model.hamiltonian.expectation(state)? - off;
    let d = max_schmidt_rank(spec).min(ctx.decomp.values().len());
    Ok(StateMetrics {
        e_gs,
        e_var,
        epsilon_signed: epsilon_signed(e_var, e_gs)?,
        epsilon: epsilon(e_var, e_gs)?,
        infidelity: (1.0 - state.fidelity(&ctx.gs.state)?).clamp(0.0, 1.0),
        discarded_weight: ctx.decomp.discarded_weight(d)?,
    })
}

struct RowMeta<'a> {
    config: &'a ExperimentConfig,
    model: &'a str,
    params: &'a str,
    num_qubits: usize,
    architecture: Architecture,
}

impl RowMeta<'_> {
    fn ok(&self, spec: &AnsatzSpec, m: &StateMetrics, wall: f64) -> ResultRow {
        ResultRow {
            experiment: self.config.experiment,
            model: self.model.to_string(),
            model_params: self.params.to_string(),
            num_qubits: self.num_qubits,
            architecture: self.architecture,
            n_i: spec.n_interconnect(),
            num_layers: spec.layers_per_module(),
            param_count: spec.param_count(),
            e_gs: Some(m.e_gs),
            e_var: Some(m.e_var),
            epsilon_signed: Some(m.epsilon_signed),
            epsilon: Some(m.epsilon),
            infidelity: Some(m.infidelity),
            discarded_weight: Some(m.discarded_weight),
            seed: self.config.training.rng_seed,
            wall_time: if self.config.record_wall_time { wall } else { 0.0 },
            status: RowStatus::Ok,
            message: String::new(),
        }
    }

    fn error(&self, spec: Option<&AnsatzSpec>, n_i: usize, err: &Error) -> ResultRow {
        log::error!("{} {} [{}]: {err}", self.model, self.params, self.architecture);
        ResultRow {
            experiment: self.config.experiment,
            model: self.model.to_string(),
            model_params: self.params.to_string(),
            num_qubits: self.num_qubits,
            architecture: self.architecture,
            n_i: spec.map_or(n_i, |s| s.n_interconnect()),
            num_layers: spec.map_or(0, |s| s.layers_per_module()),
            param_count: spec.map_or(0, |s| s.param_count()),
            e_gs: None,
            e_var: None,
            epsilon_signed: None,
            epsilon: None,
            infidelity: None,
            discarded_weight: None,
            seed: self.config.training.rng_seed,
            wall_time: 0.0,
            status: RowStatus::Error,
            message: err.to_string(),
        }
    }
}

/// One requested ansatz at a point, before training.
struct Job {
    architecture: Architecture,
    spec: Result<AnsatzSpec>,
    n_i: usize,
}

fn result_row(meta: &RowMeta<'_>, ctx: &PointContext, spec: &AnsatzSpec, res: &TrainingResult) -> Result<ResultRow> {
    let m = measure(ctx, spec, &res.final_state)?;
    Ok(meta.ok(spec, &m, res.wall_time))
}

/// Train every job against one exact ground state.
fn run_point(config: &ExperimentConfig, model: Result<ModelInstance>, params_hint: &str, n: usize, jobs: Vec<Job>) -> Vec<ResultRow> {
    let name = model.as_ref().map_or("unknown", |m| m.name);
    let params = model.as_ref().map_or(params_hint.to_string(), |m| m.params.clone());
    let ctx = model.and_then(PointContext::new);
    jobs.into_iter()
        .map(|job| {
            let meta = RowMeta {
                config,
                model: name,
                params: &params,
                num_qubits: n,
                architecture: job.architecture,
            };
            let ctx = match &ctx {
                Ok(c) => c,
                Err(e) => return meta.error(job.spec.as_ref().ok(), job.n_i, e),
            };
            let spec = match job.spec {
                Ok(s) => s,
                Err(e) => return meta.error(None, job.n_i, &e),
            };
            log::info!("{} {} [{}]", ctx.model.name, ctx.model.params, job.architecture);
            let out = trainer::train_with_ground_state(&ctx.model.hamiltonian, &ctx.gs, &spec, None, &config.training)
                .and_then(|res| {
                    for w in &res.warnings {
                        log::warn!("{} {}: {w}", ctx.model.name, ctx.model.params);
                    }
                    result_row(&meta, ctx, &spec, &res)
                });
            out.unwrap_or_else(|e| meta.error(Some(&spec), job.n_i, &e))
        })
        .collect()
}

fn default_jobs(config: &ExperimentConfig, n: usize, extra: bool) -> Vec<Job> {
    config
        .architecture_list()
        .into_iter()
        .map(|a| Job {
            architecture: a,
            spec: build_spec(config, a, n, config.n_i, extra && a == Architecture::DualCore),
            n_i: if a == Architecture::DualCore { config.n_i } else { 0 },
        })
        .collect()
}

/// Mark the largest-`epsilon` successful row of each architecture.
fn flag_worst(rows: &mut [ResultRow]) {
    let mut archs: Vec<Architecture> = Vec::new();
    for r in rows.iter() {
        if !archs.contains(&r.architecture) {
            archs.push(r.architecture);
        }
    }
    for a in archs {
        let worst = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.architecture == a && r.is_ok())
            .max_by(|(i, x), (j, y)| {
                // ties go to the earliest row
                x.epsilon.unwrap_or(0.0).total_cmp(&y.epsilon.unwrap_or(0.0)).then(j.cmp(i))
            })
            .map(|(i, _)| i);
        if let Some(i) = worst {
            rows[i].status = RowStatus::Worst;
        }
    }
}

/// Field scan of the transverse-field Ising chain.
pub fn run_tfim_scan(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let n = config.num_qubits;
    let rows: Vec<Vec<ResultRow>> = config
        .h_x_grid()
        .into_par_iter()
        .map(|h| {
            let model = ModelInstance::tfim(n, config.j, h);
            run_point(config, model, &format!("h_x={h}"), n, default_jobs(config, n, false))
        })
        .collect();
    let mut rows: Vec<ResultRow> = rows.into_iter().flatten().collect();
    flag_worst(&mut rows);
    Ok(rows)
}

/// `(J_y, J_z)` grid of the anisotropic chain at each field value.
pub fn run_xyz_grid(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let n = config.num_qubits;
    let mut points = Vec::new();
    for h in config.h_x_grid() {
        for jy in config.j_y_grid() {
            for jz in config.j_z_grid() {
                points.push((jy, jz, h));
            }
        }
    }
    let rows: Vec<Vec<ResultRow>> = points
        .into_par_iter()
        .map(|(jy, jz, h)| {
            let model = ModelInstance::xyz(n, config.j, jy, jz, h);
            run_point(
                config,
                model,
                &format!("j_y={jy};j_z={jz};h_x={h}"),
                n,
                default_jobs(config, n, false),
            )
        })
        .collect();
    let mut rows: Vec<ResultRow> = rows.into_iter().flatten().collect();
    flag_worst(&mut rows);
    Ok(rows)
}

/// Spin-1 Heisenberg chains of increasing length.
pub fn run_spin1_scan(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let rows: Vec<Vec<ResultRow>> = config
        .size_grid()
        .into_par_iter()
        .map(|n| {
            let model = ModelInstance::spin1(n, config.j, config.j_fm);
            let extra = config.extra_layer_sizes.contains(&n);
            run_point(config, model, &format!("sites={}", n / 2), n, default_jobs(config, n, extra))
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Dual-core runs with increasing remote-gate counts.
///
/// Each model is trained once with the largest requested count; the row for
/// `k` remote gates is read off stage `k`. Seeds depend only on the stage and
/// restart index, so this matches training each count from scratch.
pub fn run_interconnect_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let n = config.num_qubits;
    let counts = config.interconnect_grid();
    let max_k = *counts.iter().max().expect("validated non-empty");
    let rows: Vec<Vec<ResultRow>> = config
        .model_list()
        .into_par_iter()
        .map(|point| {
            let meta_model = ModelInstance::from_point(point, config);
            let name = meta_model.as_ref().map_or("unknown", |m| m.name);
            let params = meta_model.as_ref().map_or_else(|_| format!("{point:?}"), |m| m.params.clone());
            let meta = RowMeta {
                config,
                model: name,
                params: &params,
                num_qubits: n,
                architecture: Architecture::DualCore,
            };
            let run = |model: Result<ModelInstance>| -> Result<Vec<ResultRow>> {
                let ctx = PointContext::new(model?)?;
                let full = build_spec(config, Architecture::DualCore, n, max_k, false)?;
                log::info!("{} {} [interconnect sweep up to {max_k}]", ctx.model.name, ctx.model.params);
                let start = Instant::now();
                let res = trainer::train_with_ground_state(&ctx.model.hamiltonian, &ctx.gs, &full, None, &config.training)?;
                let wall = start.elapsed().as_secs_f64();
                counts
                    .iter()
                    .map(|&k| {
                        let prefix = full.stage_prefix(k)?;
                        let state = prefix.evaluate(&res.stages[k].optimized_params)?;
                        let m = measure(&ctx, &prefix, &state)?;
                        Ok(meta.ok(&prefix, &m, wall))
                    })
                    .collect()
            };
            run(meta_model).unwrap_or_else(|e| counts.iter().map(|&k| meta.error(None, k, &e)).collect())
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// All-to-all circuits of increasing depth, each warm-started from the
/// previous depth.
pub fn run_all_to_all_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let n = config.num_qubits;
    let layers = config.layer_grid();
    let rows: Vec<Vec<ResultRow>> = config
        .model_list()
        .into_par_iter()
        .map(|point| {
            let meta_model = ModelInstance::from_point(point, config);
            let name = meta_model.as_ref().map_or("unknown", |m| m.name);
            let params = meta_model.as_ref().map_or_else(|_| format!("{point:?}"), |m| m.params.clone());
            let meta = RowMeta {
                config,
                model: name,
                params: &params,
                num_qubits: n,
                architecture: Architecture::AllToAll,
            };
            let run = |model: Result<ModelInstance>| -> Result<Vec<ResultRow>> {
                let ctx = PointContext::new(model?)?;
                let base = AnsatzSpec::all_to_all(n, layers[0])?.with_template(config.template.clone())?;
                log::info!("{} {} [all-to-all sweep]", ctx.model.name, ctx.model.params);
                let results =
                    trainer::train_layer_sweep(&ctx.model.hamiltonian, &ctx.gs, &base, &layers, &config.training)?;
                results
                    .iter()
                    .zip(&layers)
                    .map(|(res, &l)| {
                        let spec = AnsatzSpec::all_to_all(n, l)?.with_template(config.template.clone())?;
                        result_row(&meta, &ctx, &spec, res)
                    })
                    .collect()
            };
            run(meta_model).unwrap_or_else(|e| layers.iter().map(|_| meta.error(None, 0, &e)).collect())
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Every requested architecture at each model point.
pub fn compare(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let n = config.num_qubits;
    let rows: Vec<Vec<ResultRow>> = config
        .model_list()
        .into_par_iter()
        .map(|point| {
            let model = ModelInstance::from_point(point, config);
            run_point(config, model, &format!("{point:?}"), n, default_jobs(config, n, false))
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Dispatch on `config.experiment`.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    match config.experiment {
        ExperimentKind::TfimScan => run_tfim_scan(config),
        ExperimentKind::XyzGrid => run_xyz_grid(config),
        ExperimentKind::Spin1Scan => run_spin1_scan(config),
        ExperimentKind::InterconnectSweep => run_interconnect_sweep(config),
        ExperimentKind::AllToAllSweep => run_all_to_all_sweep(config),
        ExperimentKind::CompareArchitectures => compare(config),
    }
}
