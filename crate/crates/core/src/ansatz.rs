//! Dual-core, separable and all-to-all ansatz families.
//!
//! A dual-core circuit on `N` qubits splits the register into module 0
//! (qubits `[0, N/2)`) and module 1 (`[N/2, N)`). Stage 0 applies a block of
//! `m` layers to each module; each later stage is one remote `ZZ(phi_k)`
//! straddling the cut followed by another pair of blocks. The separable
//! family keeps the blocks and drops every remote gate; the all-to-all family
//! is a single module spanning the whole register.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::factored::{FactoredCircuit, FactoredStage, RemoteGate};
use crate::statevector::{Axis, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    DualCore,
    Separable,
    AllToAll,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::DualCore => "dual_core",
            Architecture::Separable => "separable",
            Architecture::AllToAll => "all_to_all",
        })
    }
}

/// Which intra-module qubit pairs receive a parameterized ZZ in each layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerPattern {
    #[default]
    AllPairs,
    Linear,
    None,
}

/// Structure of one layer: rotations applied to every qubit in order, then
/// the entangler pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerTemplate {
    pub rotations: Vec<Axis>,
    pub entanglers: EntanglerPattern,
}

impl Default for LayerTemplate {
    fn default() -> Self {
        Self {
            rotations: vec![Axis::Y, Axis::Z],
            entanglers: EntanglerPattern::AllPairs,
        }
    }
}

impl LayerTemplate {
    fn pairs(&self, qubits: &[usize]) -> Vec<(usize, usize)> {
        let k = qubits.len();
        match self.entanglers {
            EntanglerPattern::AllPairs => (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .map(|(i, j)| (qubits[i], qubits[j]))
                .collect(),
            EntanglerPattern::Linear => qubits.windows(2).map(|w| (w[0], w[1])).collect(),
            EntanglerPattern::None => Vec::new(),
        }
    }

    /// Parameters per layer on `k` qubits.
    pub fn params_per_layer(&self, k: usize) -> usize {
        let pairs = match self.entanglers {
            EntanglerPattern::AllPairs => k * k.saturating_sub(1) / 2,
            EntanglerPattern::Linear => k.saturating_sub(1),
            EntanglerPattern::None => 0,
        };
        k * self.rotations.len() + pairs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec {
    architecture: Architecture,
    num_qubits: usize,
    stages: usize,
    layers_per_block: usize,
    template: LayerTemplate,
    remote_pairs: Vec<(usize, usize)>,
    extra_layer_after_last_remote: bool,
}

/// Address of one trainable angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamSlot {
    /// Angle of the remote gate that opens `stage` (`stage >= 1`).
    Remote { stage: usize },
    Local {
        stage: usize,
        module: usize,
        layer: usize,
        slot: usize,
    },
}

/// Bijection between [`ParamSlot`]s and flat indices: stage-major, then
/// module, then layer, then gate slot, the remote angle opening each stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterLayout {
    slots: Vec<ParamSlot>,
    index: HashMap<ParamSlot, usize>,
}

impl ParameterLayout {
    fn from_slots(slots: Vec<ParamSlot>) -> Self {
        let index = slots.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self { slots, index }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, index: usize) -> Option<ParamSlot> {
        self.slots.get(index).copied()
    }

    pub fn index_of(&self, slot: ParamSlot) -> Option<usize> {
        self.index.get(&slot).copied()
    }

    pub fn slots(&self) -> &[ParamSlot] {
        &self.slots
    }
}

/// Flat angle vector tied to the layout of the spec it was made for.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    values: Vec<f64>,
    layout: ParameterLayout,
}

impl ParameterVector {
    pub fn zeros(spec: &AnsatzSpec) -> Self {
        let layout = spec.layout();
        Self {
            values: vec![0.0; layout.len()],
            layout,
        }
    }

    pub fn from_values(spec: &AnsatzSpec, values: Vec<f64>) -> Result<Self> {
        let layout = spec.layout();
        if values.len() != layout.len() {
            return Err(Error::validation(format!(
                "ansatz has {} parameters, got {}",
                layout.len(),
                values.len()
            )));
        }
        Ok(Self { values, layout })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn layout(&self) -> &ParameterLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, slot: ParamSlot) -> Option<f64> {
        self.layout.index_of(slot).map(|i| self.values[i])
    }
}

/// Compiled circuit plus, for two-module families, its factored form.
#[derive(Debug, Clone)]
pub struct CompiledAnsatz {
    pub circuit: Circuit,
    pub factored: Option<FactoredCircuit>,
    pub layout: ParameterLayout,
}

fn require_even(num_qubits: usize) -> Result<()> {
    if num_qubits < 2 || num_qubits % 2 != 0 {
        return Err(Error::config(format!(
            "two-module architectures need an even qubit count >= 2, got {num_qubits}"
        )));
    }
    Ok(())
}

impl AnsatzSpec {
    /// Dual-core circuit with `n_i` remote gates on the default pair `(N/2 - 1, N/2)`.
    pub fn dual_core(num_qubits: usize, n_i: usize, m: usize) -> Result<Self> {
        require_even(num_qubits)?;
        let h = num_qubits / 2;
        let spec = Self {
            architecture: Architecture::DualCore,
            num_qubits,
            stages: n_i + 1,
            layers_per_block: m,
            template: LayerTemplate::default(),
            remote_pairs: vec![(h - 1, h); n_i],
            extra_layer_after_last_remote: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Two modules, `stages` blocks each, no remote gates.
    pub fn separable(num_qubits: usize, stages: usize, m: usize) -> Result<Self> {
        require_even(num_qubits)?;
        let spec = Self {
            architecture: Architecture::Separable,
            num_qubits,
            stages,
            layers_per_block: m,
            template: LayerTemplate::default(),
            remote_pairs: Vec::new(),
            extra_layer_after_last_remote: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Single module over all qubits with `num_layers` layers.
    pub fn all_to_all(num_qubits: usize, num_layers: usize) -> Result<Self> {
        let spec = Self {
            architecture: Architecture::AllToAll,
            num_qubits,
            stages: 1,
            layers_per_block: num_layers,
            template: LayerTemplate::default(),
            remote_pairs: Vec::new(),
            extra_layer_after_last_remote: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_template(mut self, template: LayerTemplate) -> Result<Self> {
        self.template = template;
        self.validate()?;
        Ok(self)
    }

    /// Replace the remote gate pairs; one pair per remote gate.
    pub fn with_remote_pairs(mut self, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.len() != self.remote_pairs.len() {
            return Err(Error::config(format!(
                "need {} remote pairs, got {}",
                self.remote_pairs.len(),
                pairs.len()
            )));
        }
        self.remote_pairs = pairs;
        self.validate()?;
        Ok(self)
    }

    /// Append one layer to both blocks of the final stage.
    pub fn with_extra_layer(mut self, extra: bool) -> Self {
        self.extra_layer_after_last_remote = extra;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        if !(crate::statevector::MIN_QUBITS..=crate::statevector::MAX_QUBITS).contains(&n) {
            return Err(Error::config(format!("qubit count {n} out of range")));
        }
        if self.layers_per_block == 0 {
            return Err(Error::config("need at least one layer per block"));
        }
        if self.stages == 0 {
            return Err(Error::config("need at least one stage"));
        }
        if self.template.rotations.is_empty() && self.template.entanglers == EntanglerPattern::None {
            return Err(Error::config("layer template has no gates"));
        }
        match self.architecture {
            Architecture::DualCore => {
                if self.remote_pairs.len() + 1 != self.stages {
                    return Err(Error::config("dual-core needs one remote gate per stage boundary"));
                }
                let h = n / 2;
                for &(a, b) in &self.remote_pairs {
                    let (lo, hi) = (a.min(b), a.max(b));
                    if hi >= n || lo >= h || hi < h {
                        return Err(Error::config(format!(
                            "remote pair ({a}, {b}) must straddle the cut at {h}"
                        )));
                    }
                }
            }
            Architecture::Separable => {
                if !self.remote_pairs.is_empty() {
                    return Err(Error::config("separable ansatz cannot have remote gates"));
                }
            }
            Architecture::AllToAll => {
                if self.stages != 1 || !self.remote_pairs.is_empty() {
                    return Err(Error::config("all-to-all ansatz is a single stage"));
                }
            }
        }
        Ok(())
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of U-block stages.
    pub fn stages(&self) -> usize {
        self.stages
    }

    /// `n_i`.
    pub fn n_interconnect(&self) -> usize {
        self.remote_pairs.len()
    }

    pub fn layers_per_block(&self) -> usize {
        self.layers_per_block
    }

    pub fn template(&self) -> &LayerTemplate {
        &self.template
    }

    pub fn remote_pairs(&self) -> &[(usize, usize)] {
        &self.remote_pairs
    }

    pub fn extra_layer(&self) -> bool {
        self.extra_layer_after_last_remote
    }

    /// Qubit lists of each module.
    pub fn modules(&self) -> Vec<Vec<usize>> {
        match self.architecture {
            Architecture::AllToAll => vec![(0..self.num_qubits).collect()],
            _ => {
                let h = self.num_qubits / 2;
                vec![(0..h).collect(), (h..self.num_qubits).collect()]
            }
        }
    }

    /// Cut used for Schmidt targets: the module boundary, or `N/2` for all-to-all.
    pub fn cut(&self) -> usize {
        self.num_qubits / 2
    }

    fn layers_in_stage(&self, stage: usize) -> usize {
        if self.extra_layer_after_last_remote && stage + 1 == self.stages {
            self.layers_per_block + 1
        } else {
            self.layers_per_block
        }
    }

    /// Layers executed on each module in total.
    pub fn layers_per_module(&self) -> usize {
        (0..self.stages).map(|s| self.layers_in_stage(s)).sum()
    }

    /// Remote gates that precede `stage`.
    pub fn remote_gates_before(&self, stage: usize) -> usize {
        stage.min(self.remote_pairs.len())
    }

    pub fn param_count(&self) -> usize {
        let per_stage: usize = self
            .modules()
            .iter()
            .map(|q| self.template.params_per_layer(q.len()))
            .sum();
        let layers: usize = (0..self.stages).map(|s| self.layers_in_stage(s)).sum();
        layers * per_stage + self.remote_pairs.len()
    }

    /// Circuit up to but excluding the remote gate that would open `stage + 1`.
    pub fn stage_prefix(&self, stage: usize) -> Result<AnsatzSpec> {
        if stage >= self.stages {
            return Err(Error::validation(format!(
                "stage {stage} out of range for {} stages",
                self.stages
            )));
        }
        let full = stage + 1 == self.stages;
        Ok(AnsatzSpec {
            stages: stage + 1,
            remote_pairs: self.remote_pairs[..self.remote_gates_before(stage)].to_vec(),
            extra_layer_after_last_remote: self.extra_layer_after_last_remote && full,
            ..self.clone()
        })
    }

    pub fn layout(&self) -> ParameterLayout {
        let mut slots = Vec::with_capacity(self.param_count());
        let modules = self.modules();
        for stage in 0..self.stages {
            if stage >= 1 && stage <= self.remote_pairs.len() {
                slots.push(ParamSlot::Remote { stage });
            }
            for (module, qubits) in modules.iter().enumerate() {
                let per_layer = self.template.params_per_layer(qubits.len());
                for layer in 0..self.layers_in_stage(stage) {
                    for slot in 0..per_layer {
                        slots.push(ParamSlot::Local {
                            stage,
                            module,
                            layer,
                            slot,
                        });
                    }
                }
            }
        }
        ParameterLayout::from_slots(slots)
    }

    /// Gates of one layer on `qubits`, drawing parameter indices from `next`.
    fn layer_gates(&self, qubits: &[usize], next: &mut usize, out: &mut Vec<Gate>) {
        for &qubit in qubits {
            for &axis in &self.template.rotations {
                out.push(Gate::Rotation {
                    qubit,
                    axis,
                    param: *next,
                });
                *next += 1;
            }
        }
        for (a, b) in self.template.pairs(qubits) {
            out.push(Gate::Zz { a, b, param: *next });
            *next += 1;
        }
    }

    pub fn compile(&self) -> Result<CompiledAnsatz> {
        let layout = self.layout();
        let num_params = layout.len();
        let modules = self.modules();
        let two_module = self.architecture != Architecture::AllToAll;

        let mut gates = Vec::new();
        let mut stages = Vec::new();
        let mut next = 0usize;
        for stage in 0..self.stages {
            let mut remote = None;
            if stage >= 1 && stage <= self.remote_pairs.len() {
                let (a, b) = self.remote_pairs[stage - 1];
                let (a, b) = (a.min(b), a.max(b));
                gates.push(Gate::Zz { a, b, param: next });
                remote = Some(RemoteGate {
                    left_qubit: a,
                    right_qubit: b - modules[0].len(),
                    param: next,
                });
                next += 1;
            }
            let mut blocks = Vec::with_capacity(modules.len());
            for qubits in &modules {
                let start = gates.len();
                for _ in 0..self.layers_in_stage(stage) {
                    self.layer_gates(qubits, &mut next, &mut gates);
                }
                if two_module {
                    let offset = qubits[0];
                    let local: Vec<Gate> = gates[start..]
                        .iter()
                        .map(|g| match *g {
                            Gate::Rotation { qubit, axis, param } => Gate::Rotation {
                                qubit: qubit - offset,
                                axis,
                                param,
                            },
                            Gate::Zz { a, b, param } => Gate::Zz {
                                a: a - offset,
                                b: b - offset,
                                param,
                            },
                        })
                        .collect();
                    blocks.push(Circuit::new(qubits.len(), num_params, local)?);
                }
            }
            if two_module {
                let right = blocks.pop().expect("two blocks");
                let left = blocks.pop().expect("two blocks");
                stages.push(FactoredStage {
                    remote,
                    left,
                    right,
                });
            }
        }
        debug_assert_eq!(next, num_params);
        let circuit = Circuit::new(self.num_qubits, num_params, gates)?;
        let factored = if two_module {
            Some(FactoredCircuit::new(modules[0].len(), modules[1].len(), num_params, stages))
        } else {
            None
        };
        Ok(CompiledAnsatz {
            circuit,
            factored,
            layout,
        })
    }

    /// Output state on `|0...0>`.
    pub fn evaluate(&self, params: &ParameterVector) -> Result<StateVector> {
        self.evaluate_values(params.values())
    }

    pub fn evaluate_values(&self, params: &[f64]) -> Result<StateVector> {
        self.check_len(params)?;
        self.compile()?.circuit.run(params)
    }

    fn check_len(&self, params: &[f64]) -> Result<()> {
        let n = self.param_count();
        if params.len() != n {
            return Err(Error::validation(format!(
                "ansatz has {n} parameters, got {}",
                params.len()
            )));
        }
        Ok(())
    }

    /// `dF/dtheta` for `F = |<target|evaluate(params)>|^2`, by adjoint
    /// accumulation over the full gate sequence.
    pub fn fidelity_gradient(&self, params: &ParameterVector, target: &StateVector) -> Result<Vec<f64>> {
        self.check_len(params.values())?;
        let (_, g) = self.compile()?.circuit.fidelity_gradient(params.values(), target)?;
        Ok(g)
    }
}

impl CompiledAnsatz {
    /// Fidelity and its gradient through the cheapest available route.
    pub fn fidelity_and_gradient(&self, params: &[f64], target: &StateVector, grad: &mut [f64]) -> Result<f64> {
        match &self.factored {
            Some(f) => f.fidelity_gradient_into(params, target, grad),
            None => self.circuit.fidelity_gradient_into(params, target.amplitudes(), grad),
        }
    }

    pub fn state(&self, params: &[f64]) -> Result<StateVector> {
        match &self.factored {
            Some(f) => f.state(params),
            None => self.circuit.run(params),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_core_counts() {
        let s = AnsatzSpec::dual_core(12, 3, 3).unwrap();
        assert_eq!(s.stages(), 4);
        assert_eq!(s.layers_per_module(), 12);
        assert_eq!(s.n_interconnect(), 3);
        assert_eq!(s.param_count(), 24 * 27 + 3);
        assert_eq!(s.param_count(), 651);
        assert_eq!(s.compile().unwrap().circuit.gates().len(), 651);
        assert_eq!(AnsatzSpec::separable(12, 4, 3).unwrap().param_count(), 648);
        assert_eq!(AnsatzSpec::all_to_all(12, 7).unwrap().param_count(), 630);
        assert_eq!(AnsatzSpec::all_to_all(2, 1).unwrap().param_count(), 5);
        assert!(matches!(AnsatzSpec::dual_core(11, 3, 3), Err(Error::Config(_))));
    }

    #[test]
    fn prefix_counts_grow_by_one_stage() {
        let s = AnsatzSpec::dual_core(12, 3, 3).unwrap();
        let p0 = s.stage_prefix(0).unwrap();
        assert_eq!(p0.n_interconnect(), 0);
        assert_eq!(p0.param_count(), 2 * 3 * 27);
        for k in 1..4 {
            let a = s.stage_prefix(k - 1).unwrap().param_count();
            let b = s.stage_prefix(k).unwrap().param_count();
            assert_eq!(b - a, 1 + 2 * 3 * 27);
        }
        assert_eq!(s.stage_prefix(3).unwrap(), s);
        assert!(s.stage_prefix(4).is_err());
    }

    #[test]
    fn layout_is_prefix_consistent() {
        let s = AnsatzSpec::dual_core(6, 2, 2).unwrap().with_extra_layer(true);
        let full = s.layout();
        for k in 0..s.stages() {
            let p = s.stage_prefix(k).unwrap().layout();
            assert_eq!(&full.slots()[..p.len()], p.slots());
        }
        assert_eq!(full.index_of(ParamSlot::Remote { stage: 1 }), Some(2 * 2 * 9));
    }

    #[test]
    fn extra_layer_adds_one_layer_per_module() {
        let s = AnsatzSpec::dual_core(10, 3, 3).unwrap();
        let e = s.clone().with_extra_layer(true);
        assert_eq!(e.layers_per_module(), 13);
        assert_eq!(e.param_count() - s.param_count(), 2 * (10 + 10));
    }

    #[test]
    fn remote_pairs_must_straddle() {
        let s = AnsatzSpec::dual_core(8, 2, 1).unwrap();
        assert!(s.clone().with_remote_pairs(vec![(0, 1), (3, 4)]).is_err());
        assert!(s.clone().with_remote_pairs(vec![(0, 7)]).is_err());
        let ok = s.with_remote_pairs(vec![(0, 7), (4, 2)]).unwrap();
        assert_eq!(ok.remote_pairs(), &[(0, 7), (4, 2)]);
    }

    #[test]
    fn zero_params_give_zero_state() {
        for s in [
            AnsatzSpec::dual_core(6, 2, 2).unwrap(),
            AnsatzSpec::all_to_all(4, 2).unwrap(),
        ] {
            let out = s.evaluate(&ParameterVector::zeros(&s)).unwrap();
            assert!((out.amplitudes()[0].re - 1.0).abs() < 1e-15);
        }
        let s = AnsatzSpec::dual_core(4, 1, 1).unwrap();
        assert!(s.evaluate_values(&[0.0; 3]).is_err());
    }
}
