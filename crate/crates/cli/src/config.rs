//! Structured run configuration: TOML in, fully resolved values out.
//!
//! Every defaulted field is materialized in [`RunConfig`] so the output
//! manifest echoes the exact numbers a run used.

use serde::{Deserialize, Serialize};

use bmeig::geometry::ShapeSpec;
use bmeig::spectral::PotentialSpec;
use bmeig::tolerances;
use bmeig::verify::VerifyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eig,
    Minkowski,
    Supconv,
    VerifyBm,
    VerifyLogconcave,
    Counterexample,
}

/// Raw deserialization target; unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    output_dir: Option<String>,
    seed: Option<u64>,
    parallelism: Option<usize>,
    #[serde(default)]
    grid: RawGrid,
    shape0: Option<RawShape>,
    shape1: Option<RawShape>,
    potential: Option<RawPotential>,
    #[serde(default)]
    deformation: RawDeformation,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    counterexample: RawCounterexample,
    #[serde(default)]
    logconcavity: RawLogConcavity,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    h: Option<f64>,
    extent: Option<[f64; 4]>,
    margin_cells: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
enum RawShape {
    Rectangle { corner: [f64; 2], width: f64, height: f64 },
    Disk { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], semi_axes: [f64; 2] },
    Polygon { vertices: Vec<[f64; 2]> },
    AnnulusSector { r_inner: f64, r_outer: f64, gap: f64, smoothing: Option<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
enum RawPotential {
    Zero,
    Constant { c: f64 },
    Quadratic { center: [f64; 2], coeff: f64 },
    Anisotropic { center: [f64; 2], qxx: f64, qxy: f64, qyy: f64 },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeformation {
    t_values: Option<Vec<f64>>,
    t_count: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    solver_tol: Option<f64>,
    max_iter: Option<usize>,
    chord_allowance: Option<f64>,
    inv_sqrt_allowance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCounterexample {
    epsilon: Option<f64>,
    rho: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLogConcavity {
    pair_budget: Option<usize>,
}

/// Fully resolved configuration; serialized verbatim into the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub output_dir: String,
    pub seed: u64,
    pub parallelism: usize,
    pub h: f64,
    pub extent: [f64; 4],
    pub margin_cells: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape0: Option<ShapeConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape1: Option<ShapeConfig>,
    pub potential: PotentialConfig,
    pub t_values: Vec<f64>,
    pub solver_tol: f64,
    pub max_iter: usize,
    pub chord_allowance: f64,
    pub inv_sqrt_allowance: f64,
    pub counterexample_epsilon: f64,
    /// Smoothing radius of the scan's annulus sector, resolved to a length.
    pub counterexample_rho: f64,
    pub pair_budget: usize,
}

/// Echo-friendly shape description mirroring [`ShapeSpec`].
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ShapeConfig {
    Rectangle { corner: [f64; 2], width: f64, height: f64 },
    Disk { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], semi_axes: [f64; 2] },
    Polygon { vertices: Vec<[f64; 2]> },
    AnnulusSector { r_inner: f64, r_outer: f64, gap: f64, smoothing: f64 },
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PotentialConfig {
    Zero,
    Constant { c: f64 },
    Quadratic { center: [f64; 2], coeff: f64 },
    Anisotropic { center: [f64; 2], qxx: f64, qxy: f64, qyy: f64 },
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ShapeConfig {
    pub fn to_spec(&self) -> ShapeSpec<f64> {
        match self {
            ShapeConfig::Rectangle { corner, width, height } => {
                ShapeSpec::Rectangle { corner: *corner, width: *width, height: *height }
            }
            ShapeConfig::Disk { center, radius } => {
                ShapeSpec::Disk { center: *center, radius: *radius }
            }
            ShapeConfig::Ellipse { center, semi_axes } => {
                ShapeSpec::Ellipse { center: *center, semi_axes: *semi_axes }
            }
            ShapeConfig::Polygon { vertices } => {
                ShapeSpec::ConvexPolygon { vertices: vertices.clone() }
            }
            ShapeConfig::AnnulusSector { r_inner, r_outer, gap, smoothing } => {
                ShapeSpec::AnnulusSector {
                    r_inner: *r_inner,
                    r_outer: *r_outer,
                    gap: *gap,
                    smoothing: *smoothing,
                }
            }
        }
    }
}

impl PotentialConfig {
    pub fn to_spec(&self) -> PotentialSpec<f64> {
        match self {
            PotentialConfig::Zero => PotentialSpec::Zero,
            PotentialConfig::Constant { c } => PotentialSpec::Constant { c: *c },
            PotentialConfig::Quadratic { center, coeff } => {
                PotentialSpec::Quadratic { center: *center, coeff: *coeff }
            }
            PotentialConfig::Anisotropic { center, qxx, qxy, qyy } => {
                PotentialSpec::AnisotropicQuadratic {
                    center: *center,
                    qxx: *qxx,
                    qxy: *qxy,
                    qyy: *qyy,
                }
            }
        }
    }
}

impl RunConfig {
    pub fn verify_params(&self) -> VerifyParams<f64> {
        VerifyParams {
            solver_tol: self.solver_tol,
            max_iter: self.max_iter,
            chord_allowance: self.chord_allowance,
            inv_sqrt_allowance: self.inv_sqrt_allowance,
            seed: self.seed,
        }
    }
}

/// Parses and validates a config document. Syntax and type errors carry the
/// TOML span (line/column); constraint violations name the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let h = raw.grid.h.unwrap_or(1.0 / 128.0);
    if !(h > 0.0 && h.is_finite()) {
        return Err(ConfigError(format!("grid.h must be positive, got {h}")));
    }
    let margin_cells = raw.grid.margin_cells.unwrap_or(3);
    if margin_cells < 2 {
        return Err(ConfigError("grid.margin_cells must be at least 2".into()));
    }

    let counterexample_epsilon = raw.counterexample.epsilon.unwrap_or(0.3);
    let counterexample_rho = raw.counterexample.rho.unwrap_or(4.0 * h);

    let shape0 = raw.shape0.map(|s| resolve_shape(s, h)).transpose()?;
    let shape1 = raw.shape1.map(|s| resolve_shape(s, h)).transpose()?;

    let needs_shape0 = matches!(
        raw.command,
        Command::Eig | Command::Minkowski | Command::Supconv | Command::VerifyBm
            | Command::VerifyLogconcave
    );
    if needs_shape0 && shape0.is_none() {
        return Err(ConfigError("shape0 is required for this command".into()));
    }
    let needs_shape1 =
        matches!(raw.command, Command::Minkowski | Command::Supconv | Command::VerifyBm);
    if needs_shape1 && shape1.is_none() {
        return Err(ConfigError("shape1 is required for this command".into()));
    }

    let potential = match raw.potential {
        None | Some(RawPotential::Zero) => PotentialConfig::Zero,
        Some(RawPotential::Constant { c }) => PotentialConfig::Constant { c },
        Some(RawPotential::Quadratic { center, coeff }) => {
            PotentialConfig::Quadratic { center, coeff }
        }
        Some(RawPotential::Anisotropic { center, qxx, qxy, qyy }) => {
            PotentialConfig::Anisotropic { center, qxx, qxy, qyy }
        }
    };
    potential
        .to_spec()
        .validate()
        .map_err(|e| ConfigError(format!("potential: {e}")))?;

    let t_values = match (raw.deformation.t_values, raw.deformation.t_count) {
        (Some(_), Some(_)) => {
            return Err(ConfigError(
                "deformation: give either t_values or t_count, not both".into(),
            ))
        }
        (Some(vs), None) => vs,
        (None, Some(n)) => {
            if n == 0 {
                return Err(ConfigError("deformation.t_count must be positive".into()));
            }
            (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
        }
        (None, None) => match raw.command {
            Command::Counterexample => (1..=40).map(|i| i as f64 / 41.0).collect(),
            _ => vec![0.5],
        },
    };
    for &t in &t_values {
        if !(0.0..=1.0).contains(&t) {
            return Err(ConfigError(format!(
                "deformation.t_values must lie in [0,1], got {t}"
            )));
        }
    }

    let solver_tol = raw.tolerances.solver_tol.unwrap_or(tolerances::DEFAULT_SOLVER_TOL);
    let max_iter = raw.tolerances.max_iter.unwrap_or(tolerances::DEFAULT_MAX_ITER);
    let chord_allowance =
        raw.tolerances.chord_allowance.unwrap_or(tolerances::DEFAULT_CHORD_ALLOWANCE);
    let inv_sqrt_allowance =
        raw.tolerances.inv_sqrt_allowance.unwrap_or(tolerances::DEFAULT_INV_SQRT_ALLOWANCE);
    for (name, v) in [
        ("tolerances.solver_tol", solver_tol),
        ("tolerances.chord_allowance", chord_allowance),
        ("tolerances.inv_sqrt_allowance", inv_sqrt_allowance),
        ("counterexample.epsilon", counterexample_epsilon),
        ("counterexample.rho", counterexample_rho),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(ConfigError(format!("{name} must be positive, got {v}")));
        }
    }

    let extent = match raw.grid.extent {
        Some(e) => {
            if !(e[0] < e[2] && e[1] < e[3]) {
                return Err(ConfigError("grid.extent must satisfy x0 < x1, y0 < y1".into()));
            }
            e
        }
        None => {
            let mut boxes: Vec<[f64; 4]> = Vec::new();
            if let Some(s) = &shape0 {
                boxes.push(s.to_spec().bounding_box());
            }
            if let Some(s) = &shape1 {
                boxes.push(s.to_spec().bounding_box());
            }
            if raw.command == Command::Counterexample {
                boxes.push([-2.0, -2.0, 2.0, 2.0]);
            }
            if boxes.is_empty() {
                return Err(ConfigError("grid.extent required when no shapes are given".into()));
            }
            boxes.iter().fold(
                [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
                |acc, b| {
                    [acc[0].min(b[0]), acc[1].min(b[1]), acc[2].max(b[2]), acc[3].max(b[3])]
                },
            )
        }
    };

    Ok(RunConfig {
        command: raw.command,
        output_dir: raw.output_dir.unwrap_or_else(|| "out".into()),
        seed: raw.seed.unwrap_or(0),
        parallelism: raw.parallelism.unwrap_or(0),
        h,
        extent,
        margin_cells,
        shape0,
        shape1,
        potential,
        t_values,
        solver_tol,
        max_iter,
        chord_allowance,
        inv_sqrt_allowance,
        counterexample_epsilon,
        counterexample_rho,
        pair_budget: raw.logconcavity.pair_budget.unwrap_or(200_000),
    })
}

fn resolve_shape(raw: RawShape, h: f64) -> Result<ShapeConfig, ConfigError> {
    let cfg = match raw {
        RawShape::Rectangle { corner, width, height } => {
            ShapeConfig::Rectangle { corner, width, height }
        }
        RawShape::Disk { center, radius } => ShapeConfig::Disk { center, radius },
        RawShape::Ellipse { center, semi_axes } => ShapeConfig::Ellipse { center, semi_axes },
        RawShape::Polygon { vertices } => ShapeConfig::Polygon { vertices },
        RawShape::AnnulusSector { r_inner, r_outer, gap, smoothing } => {
            ShapeConfig::AnnulusSector {
                r_inner,
                r_outer,
                gap,
                smoothing: smoothing.unwrap_or(4.0 * h),
            }
        }
    };
    cfg.to_spec().validate().map_err(|e| ConfigError(format!("shape: {e}")))?;
    Ok(cfg)
}
