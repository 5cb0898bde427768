//! JSON experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{Architecture, LayerTemplate};
use crate::error::{Error, Result};
use crate::trainer::TrainingConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TfimScan,
    XyzGrid,
    Spin1Scan,
    InterconnectSweep,
    AllToAllSweep,
    CompareArchitectures,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::TfimScan => "tfim_scan",
            ExperimentKind::XyzGrid => "xyz_grid",
            ExperimentKind::Spin1Scan => "spin1_scan",
            ExperimentKind::InterconnectSweep => "interconnect_sweep",
            ExperimentKind::AllToAllSweep => "all_to_all_sweep",
            ExperimentKind::CompareArchitectures => "compare_architectures",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A single model instance used by the fixed-point experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelPoint {
    Tfim { h_x: f64 },
    Xyz { j_y: f64, j_z: f64, h_x: f64 },
    /// Chain of `num_qubits / 2` spin-1 sites.
    Spin1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Register size for the fixed-size experiments.
    pub num_qubits: usize,
    /// Ising / spin-1 / x-axis coupling.
    pub j: f64,
    pub h_x: Option<Vec<f64>>,
    pub j_y: Option<Vec<f64>>,
    pub j_z: Option<Vec<f64>>,
    /// Register sizes for the spin-1 scan.
    pub sizes: Option<Vec<usize>>,
    pub j_fm: f64,
    /// Remote-gate counts for the interconnect sweep.
    pub n_interconnect: Option<Vec<usize>>,
    /// Remote gates of the dual-core ansatz in the other experiments.
    pub n_i: usize,
    /// Layer counts for the all-to-all sweep.
    pub layers: Option<Vec<usize>>,
    /// All-to-all depth used where a single all-to-all run is requested.
    pub all_to_all_layers: usize,
    pub layers_per_block: usize,
    pub separable_stages: usize,
    pub architectures: Option<Vec<Architecture>>,
    pub models: Option<Vec<ModelPoint>>,
    /// Spin-1 register sizes whose dual-core run gets one extra layer after
    /// the last remote gate.
    pub extra_layer_sizes: Vec<usize>,
    pub template: LayerTemplate,
    pub remote_pairs: Option<Vec<(usize, usize)>>,
    pub training: TrainingConfig,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Keep measured wall times in the output. Off by default so repeated
    /// runs write identical files.
    pub record_wall_time: bool,
    /// Permit register sizes above 12.
    pub allow_large: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::TfimScan,
            num_qubits: 12,
            j: 1.0,
            h_x: None,
            j_y: None,
            j_z: None,
            sizes: None,
            j_fm: 10.0,
            n_interconnect: None,
            n_i: 3,
            layers: None,
            all_to_all_layers: 7,
            layers_per_block: 3,
            separable_stages: 4,
            architectures: None,
            models: None,
            extra_layer_sizes: vec![10],
            template: LayerTemplate::default(),
            remote_pairs: None,
            training: TrainingConfig::default(),
            output: None,
            format: OutputFormat::Csv,
            record_wall_time: false,
            allow_large: false,
        }
    }
}

/// Field grid of the TFIM scan: `0, 0.1, ..., 2.0` plus `0.73`.
pub fn default_tfim_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..=20).map(|k| k as f64 / 10.0).collect();
    g.push(0.73);
    g.sort_by(f64::total_cmp);
    g
}

const DEFAULT_LARGE_LIMIT: usize = 12;

impl ExperimentConfig {
    pub fn for_experiment(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            ..Self::default()
        }
    }

    /// Parse a JSON document. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Load a file for a run of `kind`. A file naming a different
    /// experiment is rejected; one naming none is accepted.
    pub fn from_file_for(kind: ExperimentKind, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let raw: serde_json::Value = serde_json::from_str(&text)?;
        let mut c = Self::from_json(&text)?;
        if raw.get("experiment").is_some() && c.experiment != kind {
            return Err(Error::config(format!(
                "config file is for {}, not {kind}",
                c.experiment
            )));
        }
        c.experiment = kind;
        Ok(c)
    }

    pub fn h_x_grid(&self) -> Vec<f64> {
        match (&self.h_x, self.experiment) {
            (Some(g), _) => g.clone(),
            (None, ExperimentKind::XyzGrid) => vec![0.0, 0.5, 1.0],
            (None, _) => default_tfim_grid(),
        }
    }

    pub fn j_y_grid(&self) -> Vec<f64> {
        self.j_y.clone().unwrap_or_else(|| vec![-1.0, -0.5, 0.0, 0.5, 1.0])
    }

    pub fn j_z_grid(&self) -> Vec<f64> {
        self.j_z.clone().unwrap_or_else(|| vec![-1.0, -0.5, 0.0, 0.5, 1.0])
    }

    pub fn size_grid(&self) -> Vec<usize> {
        self.sizes.clone().unwrap_or_else(|| vec![4, 6, 8, 10, 12])
    }

    pub fn interconnect_grid(&self) -> Vec<usize> {
        self.n_interconnect.clone().unwrap_or_else(|| vec![0, 1, 2, 3])
    }

    pub fn layer_grid(&self) -> Vec<usize> {
        self.layers.clone().unwrap_or_else(|| (1..=7).collect())
    }

    pub fn architecture_list(&self) -> Vec<Architecture> {
        if let Some(a) = &self.architectures {
            return a.clone();
        }
        match self.experiment {
            ExperimentKind::TfimScan | ExperimentKind::Spin1Scan => {
                vec![Architecture::Separable, Architecture::DualCore]
            }
            ExperimentKind::XyzGrid | ExperimentKind::InterconnectSweep => vec![Architecture::DualCore],
            ExperimentKind::AllToAllSweep => vec![Architecture::AllToAll],
            ExperimentKind::CompareArchitectures => vec![
                Architecture::Separable,
                Architecture::DualCore,
                Architecture::AllToAll,
            ],
        }
    }

    pub fn model_list(&self) -> Vec<ModelPoint> {
        if let Some(m) = &self.models {
            return m.clone();
        }
        let tfim = ModelPoint::Tfim { h_x: 0.73 };
        let xyz = ModelPoint::Xyz {
            j_y: -1.0,
            j_z: 0.5,
            h_x: 1.0,
        };
        match self.experiment {
            ExperimentKind::InterconnectSweep => vec![tfim, xyz, ModelPoint::Spin1],
            _ => vec![tfim, ModelPoint::Spin1],
        }
    }

    fn check_size(&self, n: usize, what: &str) -> Result<()> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::config(format!("{what} {n} must be even and at least 4")));
        }
        if n > DEFAULT_LARGE_LIMIT && !self.allow_large {
            return Err(Error::config(format!(
                "{what} {n} exceeds {DEFAULT_LARGE_LIMIT}; set allow_large to run it"
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.training.validate()?;
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::config(format!("{name} grid is empty")))
            } else {
                Ok(())
            }
        };
        let finite = |name: &str, v: &[f64]| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} grid has a non-finite value")))
            }
        };
        let (h, jy, jz) = (self.h_x_grid(), self.j_y_grid(), self.j_z_grid());
        nonempty("h_x", h.len())?;
        nonempty("j_y", jy.len())?;
        nonempty("j_z", jz.len())?;
        finite("h_x", &h)?;
        finite("j_y", &jy)?;
        finite("j_z", &jz)?;
        nonempty("architecture", self.architecture_list().len())?;
        nonempty("model", self.model_list().len())?;
        nonempty("n_interconnect", self.interconnect_grid().len())?;
        nonempty("layers", self.layer_grid().len())?;
        let sizes = self.size_grid();
        nonempty("sizes", sizes.len())?;
        for &n in &sizes {
            self.check_size(n, "size")?;
        }
        self.check_size(self.num_qubits, "num_qubits")?;
        if !self.j.is_finite() || !self.j_fm.is_finite() {
            return Err(Error::config("couplings must be finite"));
        }
        if self.layers_per_block == 0 || self.separable_stages == 0 || self.all_to_all_layers == 0 {
            return Err(Error::config("layer and stage counts must be >= 1"));
        }
        if self.layer_grid().contains(&0) {
            return Err(Error::config("layer counts must be >= 1"));
        }
        let mut layers = self.layer_grid();
        layers.sort_unstable();
        layers.dedup();
        if layers != self.layer_grid() {
            return Err(Error::config("layer counts must be strictly increasing"));
        }
        Ok(())
    }
}
