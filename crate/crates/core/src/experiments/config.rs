//! Experiment configuration: JSON in, schema-validated, unknown fields
//! rejected at both the envelope and the per-kind parameter level.

use serde::{Deserialize, Serialize};

use crate::activators::Theta;
use crate::coefficients::SampleGrid;
use crate::weights::WeightSpec;
use crate::{Error, Result};

/// The eight experiment kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    WeightsAxioms,
    SymbolFit,
    ExcisionBounds,
    SobolevSelftest,
    Solve,
    Cone,
    ActivatorSweep,
    CascadeScan,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::WeightsAxioms,
        ExperimentKind::SymbolFit,
        ExperimentKind::ExcisionBounds,
        ExperimentKind::SobolevSelftest,
        ExperimentKind::Solve,
        ExperimentKind::Cone,
        ExperimentKind::ActivatorSweep,
        ExperimentKind::CascadeScan,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::WeightsAxioms => "weights-axioms",
            ExperimentKind::SymbolFit => "symbol-fit",
            ExperimentKind::ExcisionBounds => "excision-bounds",
            ExperimentKind::SobolevSelftest => "sobolev-selftest",
            ExperimentKind::Solve => "solve",
            ExperimentKind::Cone => "cone",
            ExperimentKind::ActivatorSweep => "activator-sweep",
            ExperimentKind::CascadeScan => "cascade-scan",
        }
    }
}

/// Top-level config envelope: kind, seed, optional output directory, and the
/// kind-specific parameter object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub params: serde_json::Value,
}

fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("config parse error: {e}")))?;
        cfg.validated_params()?;
        Ok(cfg)
    }

    /// Parse and validate the kind-specific parameter block.
    pub fn validated_params(&self) -> Result<Params> {
        let v = self.params.clone();
        let fail = |e: serde_json::Error| {
            Error::Validation(format!(
                "invalid parameters for {}: {e}",
                self.experiment.name()
            ))
        };
        Ok(match self.experiment {
            ExperimentKind::WeightsAxioms => {
                Params::WeightsAxioms(serde_json::from_value(v).map_err(fail)?)
            }
            ExperimentKind::SymbolFit => {
                Params::SymbolFit(serde_json::from_value(v).map_err(fail)?)
            }
            ExperimentKind::ExcisionBounds => {
                Params::ExcisionBounds(serde_json::from_value(v).map_err(fail)?)
            }
            ExperimentKind::SobolevSelftest => {
                Params::SobolevSelftest(serde_json::from_value(v).map_err(fail)?)
            }
            ExperimentKind::Solve => Params::Solve(serde_json::from_value(v).map_err(fail)?),
            ExperimentKind::Cone => Params::Cone(serde_json::from_value(v).map_err(fail)?),
            ExperimentKind::ActivatorSweep => {
                Params::ActivatorSweep(serde_json::from_value(v).map_err(fail)?)
            }
            ExperimentKind::CascadeScan => {
                Params::CascadeScan(serde_json::from_value(v).map_err(fail)?)
            }
        })
    }

    /// FNV-1a of the canonical (key-sorted) JSON encoding.
    pub fn content_hash(&self) -> String {
        let canon = serde_json::to_string(self).unwrap_or_default();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canon.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone)]
pub enum Params {
    WeightsAxioms(WeightsAxiomsParams),
    SymbolFit(SymbolFitParams),
    ExcisionBounds(ExcisionBoundsParams),
    SobolevSelftest(SobolevSelftestParams),
    Solve(SolveParams),
    Cone(ConeParams),
    ActivatorSweep(ActivatorSweepParams),
    CascadeScan(CascadeScanParams),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct WeightsAxiomsParams {
    pub omega: WeightSpec,
    pub phi: WeightSpec,
    #[serde(default = "d_radius")]
    pub radius: f64,
    #[serde(default = "d_grid_points")]
    pub grid_points: usize,
    #[serde(default = "d_random_pairs")]
    pub random_pairs: usize,
}

fn d_radius() -> f64 {
    1e3
}
fn d_grid_points() -> usize {
    201
}
fn d_random_pairs() -> usize {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SymbolFitParams {
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(default)]
    pub grid: Option<SampleGrid>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExcisionBoundsParams {
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(default = "d_k")]
    pub k: f64,
    #[serde(default = "d_axis_max")]
    pub x_max: f64,
    #[serde(default = "d_axis_max")]
    pub xi_max: f64,
    #[serde(default = "d_points")]
    pub points: usize,
    #[serde(default = "d_t_points")]
    pub t_points: usize,
    #[serde(default)]
    pub tilde_symmetric: bool,
    #[serde(default = "d_t_end")]
    pub t_end: f64,
}

fn d_k() -> f64 {
    1.0
}
fn d_axis_max() -> f64 {
    1e3
}
fn d_points() -> usize {
    9
}
fn d_t_points() -> usize {
    32
}
fn d_t_end() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SobolevSelftestParams {
    #[serde(default = "d_half_width")]
    pub half_width: f64,
    #[serde(default = "d_grid_size")]
    pub grid_size: usize,
    #[serde(default = "d_random_states")]
    pub random_states: usize,
}

fn d_half_width() -> f64 {
    20.0
}
fn d_grid_size() -> usize {
    2048
}
fn d_random_states() -> usize {
    100
}

/// Coefficient families for the wave runs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientChoice {
    /// The oscillatory log-blowup model coefficient with `ω = ⟨x⟩^{κ1}`,
    /// `Φ = ⟨x⟩^{κ2}`.
    Example { kappa1: f64, kappa2: f64 },
    /// `a(t,x) = ω(x)²·(2 + sin(ln(1/t)))` — bounded, infinitely
    /// oscillating at `t = 0`, with `|∂_t a| ≤ ω²/t`.
    LogOscillation { kappa1: f64, kappa2: f64 },
}

/// Initial data shapes for the wave runs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataShape {
    /// `exp(−(x/width)²)`, numerically localized.
    Gaussian { width: f64 },
    /// Compactly supported mollifier bump of the given radius.
    Bump { radius: f64 },
    /// `sin(xi0·x)` standing mode.
    Mode { xi0: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SolveParams {
    pub coefficient: CoefficientChoice,
    #[serde(default = "d_half_width")]
    pub half_width: f64,
    #[serde(default = "d_grid_size")]
    pub grid_size: usize,
    pub data: DataShape,
    #[serde(default = "d_t_end")]
    pub t_end: f64,
    #[serde(default = "d_cfl")]
    pub cfl: f64,
    #[serde(default = "d_grading")]
    pub grading: f64,
    #[serde(default)]
    pub time_steps: Option<usize>,
    pub snapshots: Vec<f64>,
}

fn d_cfl() -> f64 {
    0.5
}
fn d_grading() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConeParams {
    pub coefficient: CoefficientChoice,
    #[serde(default = "d_half_width")]
    pub half_width: f64,
    #[serde(default = "d_grid_size")]
    pub grid_size: usize,
    pub data_radius: f64,
    pub vertex_x: f64,
    pub vertex_t: f64,
    /// Propagation-speed constant; omitted means fitted from the field.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "d_cfl")]
    pub cfl: f64,
    #[serde(default = "d_grading")]
    pub grading: f64,
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ActivatorSweepParams {
    pub gamma: f64,
    pub t1: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub theta: Theta,
    #[serde(default = "d_t_end")]
    pub t_end: f64,
    pub lambdas: Vec<f64>,
    pub delta: f64,
    #[serde(default = "d_tolerance")]
    pub tolerance: f64,
}

fn d_tolerance() -> f64 {
    1e-9
}

/// Speed choices for the cascade scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CascadeSpeedChoice {
    Constant { value: f64 },
    /// `2 + sin(ln(1/t))`: bounded, with `|c'| ≤ 1/t`.
    LogOscillation,
    /// The resonant perturbation tuned to each mode's own frequency.
    ActivatorPattern { gamma: f64, t1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightChoice {
    Unit,
    /// `exp(−√λ)`.
    ExpSqrt,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CascadeScanParams {
    pub speed: CascadeSpeedChoice,
    #[serde(default = "d_mu1")]
    pub mu1: f64,
    #[serde(default = "d_mu2")]
    pub mu2: f64,
    #[serde(default = "d_theta")]
    pub theta: Theta,
    pub lambdas: Vec<f64>,
    pub weights: WeightChoice,
    #[serde(default = "d_t_end")]
    pub t_end: f64,
    pub m_list: Vec<f64>,
    #[serde(default = "d_tolerance")]
    pub tolerance: f64,
}

fn d_mu1() -> f64 {
    0.5
}
fn d_mu2() -> f64 {
    2.0
}
fn d_theta() -> Theta {
    Theta::LogInverse
}

// ---------------------------------------------------------------------------
// Parameter catalog.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ParamField {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub ty: &'static str,
    pub required: bool,
    pub description: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct KindSchema {
    pub experiment: &'static str,
    pub params: Vec<ParamField>,
}

fn field(
    name: &'static str,
    ty: &'static str,
    required: bool,
    description: &'static str,
) -> ParamField {
    ParamField {
        name,
        ty,
        required,
        description,
    }
}

/// The stable catalog of kinds and their parameter schemas.
pub fn catalog() -> Vec<KindSchema> {
    vec![
        KindSchema {
            experiment: "weights-axioms",
            params: vec![
                field("omega", "weight-spec", true, "lower weight function"),
                field("phi", "weight-spec", true, "metric weight function"),
                field("radius", "number", false, "sample radius (default 1e3)"),
                field("grid-points", "integer", false, "grid resolution (default 201)"),
                field("random-pairs", "integer", false, "random pairs per axiom (default 10000)"),
            ],
        },
        KindSchema {
            experiment: "symbol-fit",
            params: vec![
                field("kappa1", "number", true, "weight exponent of ω"),
                field("kappa2", "number", true, "weight exponent of Φ"),
                field("grid", "sample-grid", false, "time/space sampling"),
            ],
        },
        KindSchema {
            experiment: "excision-bounds",
            params: vec![
                field("kappa1", "number", true, "weight exponent of ω"),
                field("kappa2", "number", true, "weight exponent of Φ"),
                field("k", "number", false, "spectral parameter (default 1)"),
                field("x-max", "number", false, "spatial axis bound (default 1e3)"),
                field("xi-max", "number", false, "frequency axis bound (default 1e3)"),
                field("points", "integer", false, "log points per half-axis (default 9)"),
                field("t-points", "integer", false, "time samples (default 32)"),
                field("tilde-symmetric", "boolean", false, "widened cutoff in both tilde terms"),
                field("t-end", "number", false, "integration horizon (default 1)"),
            ],
        },
        KindSchema {
            experiment: "sobolev-selftest",
            params: vec![
                field("half-width", "number", false, "grid half-width L (default 20)"),
                field("grid-size", "integer", false, "points M, power of two (default 2048)"),
                field("random-states", "integer", false, "monotonicity sample count (default 100)"),
            ],
        },
        KindSchema {
            experiment: "solve",
            params: vec![
                field("coefficient", "coefficient", true, "coefficient family"),
                field("half-width", "number", false, "domain half-width L (default 20)"),
                field("grid-size", "integer", false, "points M (default 2048)"),
                field("data", "data-shape", true, "initial position profile"),
                field("t-end", "number", false, "final time (default 1)"),
                field("cfl", "number", false, "CFL number (default 0.5)"),
                field("grading", "number", false, "time-mesh grading exponent (default 2)"),
                field("time-steps", "integer", false, "explicit step count (default auto)"),
                field("snapshots", "array<number>", true, "output times"),
            ],
        },
        KindSchema {
            experiment: "cone",
            params: vec![
                field("coefficient", "coefficient", true, "coefficient family"),
                field("half-width", "number", false, "domain half-width L (default 20)"),
                field("grid-size", "integer", false, "points M (default 2048)"),
                field("data-radius", "number", true, "support radius of the bump data"),
                field("vertex-x", "number", true, "cone vertex abscissa"),
                field("vertex-t", "number", true, "cone vertex time"),
                field("gamma", "number", false, "speed constant (default: fitted)"),
                field("cfl", "number", false, "CFL number (default 0.5)"),
                field("grading", "number", false, "grading exponent (default 2)"),
                field("snapshots", "array<number>", true, "check times"),
            ],
        },
        KindSchema {
            experiment: "activator-sweep",
            params: vec![
                field("gamma", "number", true, "plateau root: c_* = γ²"),
                field("t1", "number", true, "end of the constant plateau"),
                field("mu1", "number", true, "class band floor"),
                field("mu2", "number", true, "class band ceiling"),
                field("theta", "theta", true, "derivative envelope"),
                field("t-end", "number", false, "horizon T (default 1)"),
                field("lambdas", "array<number>", true, "frequency sweep"),
                field("delta", "number", true, "energy floor checked on [delta, T]"),
                field("tolerance", "number", false, "integrator tolerance (default 1e-9)"),
            ],
        },
        KindSchema {
            experiment: "cascade-scan",
            params: vec![
                field("speed", "cascade-speed", true, "speed driving the modes"),
                field("mu1", "number", false, "class band floor (default 0.5)"),
                field("mu2", "number", false, "class band ceiling (default 2)"),
                field("theta", "theta", false, "derivative envelope (default log-inverse)"),
                field("lambdas", "array<number>", true, "nondecreasing mode frequencies"),
                field("weights", "weight-choice", true, "mode data weights"),
                field("t-end", "number", false, "horizon T (default 1)"),
                field("m-list", "array<number>", true, "weighted-sum orders"),
                field("tolerance", "number", false, "integrator tolerance (default 1e-9)"),
            ],
        },
    ]
}

/// Check a parameter object against the emitted catalog entry: required
/// fields present, no unknown fields. Type checking happens in the typed
/// deserialization; this guards the schema round-trip.
pub fn validate_against_catalog(kind: ExperimentKind, params: &serde_json::Value) -> Result<()> {
    let schema = catalog()
        .into_iter()
        .find(|s| s.experiment == kind.name())
        .expect("every kind has a schema");
    let obj = params
        .as_object()
        .ok_or_else(|| Error::Validation("params must be an object".into()))?;
    for f in &schema.params {
        if f.required && !obj.contains_key(f.name) {
            return Err(Error::Validation(format!(
                "{}: missing required parameter `{}`",
                kind.name(),
                f.name
            )));
        }
    }
    for key in obj.keys() {
        if !schema.params.iter().any(|f| f.name == key) {
            return Err(Error::Validation(format!(
                "{}: unknown parameter `{key}`",
                kind.name()
            )));
        }
    }
    Ok(())
}
