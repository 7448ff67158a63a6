//! Experiment configuration files (TOML).
//!
//! A config names one model, an optional target grid and a list of tasks.
//! Every table rejects unknown keys.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Figure label shown by `list`.
    pub figure: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSpec,
    #[serde(default)]
    pub targets: Option<GridSpec>,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    XyChain,
    XxzChain,
    KagomeXxz,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Chain length (chains only).
    #[serde(default)]
    pub sites: Option<usize>,
    /// Unit cells `[nx, ny]` (kagome only).
    #[serde(default)]
    pub cells: Option<[usize; 2]>,
    /// Fixed parameter values; unspecified ones keep the model default.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// Product grid over named axes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
}

/// Either `lo`, `hi`, `count` (equally spaced, endpoints included) or an
/// explicit `values` list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

/// Training points: `count` equally spaced over the (one-dimensional)
/// target range, or an explicit grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<AxisSpec>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSpec {
    Forward,
    #[default]
    Symmetric,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartSpec {
    /// Equal superposition of computational basis states.
    #[default]
    Uniform,
    /// Haar-random state drawn from the master seed.
    Haar,
    /// Equal superposition of all eigenstates (overlap studies only).
    Eigenstates,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductSpec {
    #[default]
    Zeros,
    Ones,
    Neel,
}

fn default_init_scale() -> f64 {
    0.1
}

fn default_grad_tol() -> f64 {
    1e-6
}

/// Truncated preparation method.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodSpec {
    Ite {
        dtau: f64,
        tau_max: f64,
        #[serde(default)]
        initial: StartSpec,
        #[serde(default)]
        splitting: SplitSpec,
    },
    Asp {
        dt: f64,
        t_max: f64,
        /// Ramp start; the exact ground state there is the initial state.
        start: Vec<f64>,
    },
    Vqe {
        layers: usize,
        max_iters: usize,
        #[serde(default)]
        product_state: ProductSpec,
        #[serde(default = "default_init_scale")]
        init_scale: f64,
        #[serde(default = "default_grad_tol")]
        grad_tol: f64,
    },
    Exact,
}

impl MethodSpec {
    pub fn label(&self) -> &'static str {
        match self {
            MethodSpec::Ite { .. } => "ite",
            MethodSpec::Asp { .. } => "asp",
            MethodSpec::Vqe { .. } => "vqe",
            MethodSpec::Exact => "exact",
        }
    }
}

/// `sigma < below` selects `alpha`; first matching band wins.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub below: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default)]
    pub bands: Vec<BandSpec>,
    pub otherwise: f64,
}

fn default_true() -> bool {
    true
}

fn default_bootstrap() -> usize {
    1000
}

fn default_fraction() -> f64 {
    0.1
}

fn default_tolerance() -> f64 {
    0.05
}

/// One output-producing step. `name` becomes the CSV file stem.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// Lowest `levels` eigenvalues at every target.
    Spectrum {
        name: String,
        levels: usize,
        /// Chain lengths to scan instead of the model's own.
        #[serde(default)]
        sites: Vec<usize>,
    },
    /// Ground-state gap at every target.
    Gap {
        name: String,
        #[serde(default)]
        sites: Vec<usize>,
    },
    /// Truncated preparation alone at every target.
    Prep { name: String, method: MethodSpec },
    /// EC with a truncated-preparation basis, compared with the truncated
    /// method alone and with exact energies.
    Ec {
        name: String,
        method: MethodSpec,
        training: TrainingSpec,
        #[serde(default)]
        threshold: Option<f64>,
        /// Parameter changes applied to the target family only.
        #[serde(default)]
        target_params: BTreeMap<String, f64>,
        #[serde(default = "default_true")]
        compare_truncated: bool,
    },
    /// RMS error against the truncation knob (tau_max, t_max or max_iters).
    TruncationScan {
        name: String,
        method: MethodSpec,
        values: Vec<f64>,
        kp: Vec<usize>,
    },
    /// Fidelity along single ramps, one per `t_max`.
    AspTrajectory {
        name: String,
        dt: f64,
        t_max: Vec<f64>,
        start: Vec<f64>,
        end: Vec<f64>,
    },
    /// Eigenstate overlaps after every ITE step.
    IteOverlaps {
        name: String,
        point: Vec<f64>,
        dtau: f64,
        tau_max: f64,
        initial: Vec<StartSpec>,
        #[serde(default)]
        splitting: SplitSpec,
    },
    /// Relative RMS EC error over chain lengths and basis sizes.
    Scaling {
        name: String,
        sites: Vec<usize>,
        method: MethodSpec,
        #[serde(default)]
        kp_max: Option<usize>,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    /// Gate-noise study: direct ASP and trajectory-averaged EC.
    Noise {
        name: String,
        sigmas: Vec<f64>,
        trajectories: usize,
        dt: f64,
        /// Ramp start (exact ground state there).
        start: Vec<f64>,
        truncated_t_max: f64,
        /// Full-length ramp; omit to skip the direct full-ASP curve.
        #[serde(default)]
        full_t_max: Option<f64>,
        #[serde(default = "default_true")]
        direct_truncated: bool,
        kp: Vec<usize>,
        schedule: ScheduleSpec,
        #[serde(default = "default_bootstrap")]
        bootstrap: usize,
    },
    /// Basis-eigenstate overlap profile of an EC basis and a Krylov basis.
    BasisOverlap {
        name: String,
        point: Vec<f64>,
        method: MethodSpec,
        training: TrainingSpec,
        krylov_k: usize,
        #[serde(default = "default_fraction")]
        low_fraction: f64,
        /// Noise levels for the EC basis (0 is always included).
        #[serde(default)]
        sigmas: Vec<f64>,
        #[serde(default)]
        trajectories: usize,
    },
    /// Noise study with readout error on every estimated quantity.
    Measurement {
        name: String,
        sigmas: Vec<f64>,
        trajectories: usize,
        dt: f64,
        start: Vec<f64>,
        truncated_t_max: f64,
        #[serde(default)]
        full_t_max: Option<f64>,
        kp: usize,
        schedule: ScheduleSpec,
        p01: f64,
        p10: f64,
        pt1_max: f64,
    },
}

impl Task {
    pub fn name(&self) -> &str {
        match self {
            Task::Spectrum { name, .. }
            | Task::Gap { name, .. }
            | Task::Prep { name, .. }
            | Task::Ec { name, .. }
            | Task::TruncationScan { name, .. }
            | Task::AspTrajectory { name, .. }
            | Task::IteOverlaps { name, .. }
            | Task::Scaling { name, .. }
            | Task::Noise { name, .. }
            | Task::BasisOverlap { name, .. }
            | Task::Measurement { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Task::Spectrum { .. } => "spectrum",
            Task::Gap { .. } => "gap",
            Task::Prep { .. } => "prep",
            Task::Ec { .. } => "ec",
            Task::TruncationScan { .. } => "truncation_scan",
            Task::AspTrajectory { .. } => "asp_trajectory",
            Task::IteOverlaps { .. } => "ite_overlaps",
            Task::Scaling { .. } => "scaling",
            Task::Noise { .. } => "noise",
            Task::BasisOverlap { .. } => "basis_overlap",
            Task::Measurement { .. } => "measurement",
        }
    }
}

/// Parses a config; the error text names the offending key and its line.
pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}
