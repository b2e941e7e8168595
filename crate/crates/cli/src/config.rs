// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use jumpfk::io::{read_field_binary, read_field_csv};
use jumpfk::lattice::{build_kernel, combined_kernel};
use jumpfk::random_fields::{JumpSymbolProfile, SpectrumProfile};
use jumpfk::solver::StepOptions;
use jumpfk::{Field, Grid, Kernel, KernelProfile, ModelParams, SignedKernel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::Experiment;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub extent: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub mortality: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub a_plus: KernelProfile<f64>,
    pub a_minus: KernelProfile<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub horizon: f64,
    pub dt: f64,
    pub store_every: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            dt: 0.01,
            store_every: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloSpec {
    pub n_paths: usize,
    pub master_seed: u64,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        Self {
            n_paths: 10_000,
            master_seed: 0,
        }
    }
}

/// Initial data or perturbation profile on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Constant {
        value: f64,
    },
    /// `factor * theta` everywhere.
    ThetaMultiple {
        factor: f64,
    },
    /// `base + amplitude * sin(2 pi mode x_1 / L)`.
    Sine {
        base: f64,
        amplitude: f64,
        mode: f64,
    },
    /// `base + height * exp(-|x - center|^2 / (2 width^2))`.
    Bump {
        base: f64,
        height: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// Field file in the binary or CSV format, relative to the config file.
    File {
        path: PathBuf,
    },
    /// The lattice indicator of one site.
    Spike {
        index: usize,
    },
}

impl Default for FieldSource {
    fn default() -> Self {
        FieldSource::ThetaMultiple { factor: 0.5 }
    }
}

/// `W(x) = offset + amplitude * sin(2 pi mode x_1 / L)`, constant in time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub offset: f64,
    pub amplitude: f64,
    pub mode: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FkVerifySpec {
    pub t: f64,
    pub dt: f64,
    pub duhamel_terms: usize,
    pub potential: PotentialSpec,
    /// Grid indices; empty means eight evenly spaced sites.
    pub eval_points: Vec<usize>,
    pub mc_sigmas: f64,
    pub deterministic_tol: f64,
    pub identity: bool,
    pub identity_tol: f64,
}

impl Default for FkVerifySpec {
    fn default() -> Self {
        Self {
            t: 1.0,
            dt: 0.005,
            duhamel_terms: 6,
            potential: PotentialSpec {
                offset: 0.0,
                amplitude: 0.5,
                mode: 1.0,
            },
            eval_points: Vec::new(),
            mc_sigmas: 3.0,
            deterministic_tol: 1e-4,
            identity: true,
            identity_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilitySpec {
    pub block_length: f64,
    pub n_blocks: usize,
    pub envelope_tol: f64,
    /// Fit window; `[T/2, T]` when absent.
    pub window: Option<(f64, f64)>,
    /// Allowed excess of the fitted slope over `-beta`, as a fraction of `beta`.
    pub slope_tol_fraction: f64,
}

impl Default for StabilitySpec {
    fn default() -> Self {
        Self {
            block_length: 1.0,
            n_blocks: 10,
            envelope_tol: 1e-4,
            window: None,
            slope_tol_fraction: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaylorSpec {
    pub xi: FieldSource,
    /// Explicit `lambda`; otherwise `radius_fraction * radius / ||xi||`.
    pub lambda: Option<f64>,
    pub radius_fraction: f64,
    pub order: usize,
    pub bound_tol: f64,
}

impl Default for TaylorSpec {
    fn default() -> Self {
        Self {
            xi: FieldSource::Sine {
                base: 0.0,
                amplitude: 1.0,
                mode: 1.0,
            },
            lambda: None,
            radius_fraction: 0.5,
            order: 8,
            bound_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomFieldSpec {
    pub spectrum: SpectrumProfile<f64>,
    pub symbol: JumpSymbolProfile<f64>,
    pub mc_times: Vec<f64>,
    pub n_samples: usize,
    pub sigmas: f64,
    /// Grid for the late-time exponent fit; the main grid when absent.
    pub fit_grid: Option<GridSpec>,
    pub fit_window: (f64, f64),
    pub fit_points: usize,
    pub exponent_tol: f64,
}

impl Default for RandomFieldSpec {
    fn default() -> Self {
        Self {
            spectrum: SpectrumProfile::new(0.5, 1.0),
            symbol: JumpSymbolProfile {
                b: 0.5,
                beta_spec: 2.0,
            },
            mc_times: vec![1.0, 2.0, 4.0],
            n_samples: 10_000,
            sigmas: 3.0,
            fit_grid: None,
            fit_window: (20.0, 200.0),
            fit_points: 40,
            exponent_tol: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AssumptionSpec {
    pub kappa_points: usize,
}

impl Default for AssumptionSpec {
    fn default() -> Self {
        Self { kappa_points: 21 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub model: ModelSpec,
    pub kernels: KernelSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub monte_carlo: MonteCarloSpec,
    #[serde(default)]
    pub initial: FieldSource,
    #[serde(default)]
    pub fk_verify: FkVerifySpec,
    #[serde(default)]
    pub stability: StabilitySpec,
    #[serde(default)]
    pub taylor: TaylorSpec,
    #[serde(default)]
    pub random_field: RandomFieldSpec,
    #[serde(default)]
    pub assumptions: AssumptionSpec,
}

/// Validated config with the lattice objects built.
pub struct Setup {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
    pub grid: Grid<f64>,
    pub params: ModelParams<f64>,
    pub a_plus: Kernel<f64>,
    pub a_minus: Kernel<f64>,
    pub j_theta: SignedKernel<f64>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))
    }

    /// SHA-256 of the canonical JSON form of the effective config.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn step_options(&self) -> StepOptions<f64> {
        StepOptions::new(self.solver.horizon, self.solver.dt).storing_every(self.solver.store_every)
    }

    /// Checks the shared fields and the block of `experiment`, and builds the
    /// lattice objects; all problems are reported together.
    pub fn validate(self, base_dir: &Path, experiment: Experiment) -> Result<Setup, CliError> {
        let mut errs = Vec::new();
        let grid = Grid::new(self.grid.dim, self.grid.extent, self.grid.points)
            .map_err(|e| errs.push(format!("grid: {e}")))
            .ok();
        let params = ModelParams::new(
            self.model.kappa_plus,
            self.model.kappa_minus,
            self.model.mortality,
        )
        .map_err(|e| errs.push(format!("model: {e}")))
        .ok();
        let mut kernel = |name: &str, profile: &KernelProfile<f64>| {
            grid.as_ref().and_then(|g| {
                build_kernel(profile, g)
                    .map_err(|e| errs.push(format!("kernels.{name}: {e}")))
                    .ok()
            })
        };
        let a_plus = kernel("a_plus", &self.kernels.a_plus);
        let a_minus = kernel("a_minus", &self.kernels.a_minus);

        let s = &self.solver;
        if !(s.dt > 0.0 && s.horizon > 0.0) {
            errs.push(format!(
                "solver: need horizon > 0 and dt > 0, got {} and {}",
                s.horizon, s.dt
            ));
        } else {
            let steps = (s.horizon / s.dt).round();
            if (steps * s.dt - s.horizon).abs() > 1e-9 * (1.0 + s.horizon) {
                errs.push(format!(
                    "solver.dt: {} does not divide horizon {}",
                    s.dt, s.horizon
                ));
            } else if s.store_every == 0 || !(steps as usize).is_multiple_of(s.store_every) {
                errs.push(format!(
                    "solver.store_every: {} does not divide the {steps} steps",
                    s.store_every
                ));
            }
        }
        if self.monte_carlo.n_paths < jumpfk::feynman_kac::MIN_PATHS {
            errs.push(format!(
                "monte_carlo.n_paths: need at least {}, got {}",
                jumpfk::feynman_kac::MIN_PATHS,
                self.monte_carlo.n_paths
            ));
        }

        let fk = &self.fk_verify;
        if experiment == Experiment::FkVerify {
            if !(fk.t > 0.0 && fk.dt > 0.0) {
                errs.push("fk_verify: need t > 0 and dt > 0".into());
            }
            if fk.duhamel_terms == 0 {
                errs.push("fk_verify.duhamel_terms: need at least one term".into());
            }
            if let Some(g) = &grid {
                if let Some(bad) = fk.eval_points.iter().find(|&&p| p >= g.len()) {
                    errs.push(format!(
                        "fk_verify.eval_points: {bad} is outside the {} sites",
                        g.len()
                    ));
                }
            }
        }

        let st = &self.stability;
        if experiment == Experiment::Stability {
            if !(st.block_length > 0.0) || st.n_blocks == 0 {
                errs.push("stability: need block_length > 0 and n_blocks >= 1".into());
            } else if st.block_length * st.n_blocks as f64 > s.horizon * (1.0 + 1e-12) {
                errs.push(format!(
                    "stability: {} blocks of length {} exceed the solver horizon {}",
                    st.n_blocks, st.block_length, s.horizon
                ));
            }
            if let Some((lo, hi)) = st.window {
                if !(lo < hi) {
                    errs.push(format!("stability.window: empty window [{lo}, {hi}]"));
                }
            }
        }

        let ty = &self.taylor;
        if experiment == Experiment::Taylor {
            if ty.order == 0 || ty.order > 30 {
                errs.push(format!(
                    "taylor.order: must lie in 1..=30, got {}",
                    ty.order
                ));
            }
            if ty.lambda.is_none() && !(ty.radius_fraction > 0.0 && ty.radius_fraction < 1.0) {
                errs.push(format!(
                    "taylor.radius_fraction: must lie in (0, 1), got {}",
                    ty.radius_fraction
                ));
            }
        }

        let rf = &self.random_field;
        if experiment == Experiment::RandomField {
            if let Err(e) = JumpSymbolProfile::new(rf.symbol.b, rf.symbol.beta_spec) {
                errs.push(format!("random_field.symbol: {e}"));
            }
            if let Some(g) = &grid {
                if let Err(e) = rf.spectrum.weights(g) {
                    errs.push(format!("random_field.spectrum: {e}"));
                }
            }
            if rf.mc_times.iter().any(|t| !(*t >= 0.0)) {
                errs.push("random_field.mc_times: times must be non-negative".into());
            }
            if rf.n_samples < 2 {
                errs.push("random_field.n_samples: need at least two samples".into());
            }
            if !(rf.fit_window.0 > 0.0 && rf.fit_window.0 < rf.fit_window.1) || rf.fit_points < 4 {
                errs.push(
                    "random_field: need 0 < fit_window.0 < fit_window.1 and fit_points >= 4".into(),
                );
            }
            if let Some(fg) = &rf.fit_grid {
                if let Err(e) = Grid::new(fg.dim, fg.extent, fg.points) {
                    errs.push(format!("random_field.fit_grid: {e}"));
                }
            }
        }
        if experiment == Experiment::Assumptions && self.assumptions.kappa_points < 2 {
            errs.push("assumptions.kappa_points: need at least 2".into());
        }

        let j_theta = match (&params, &a_plus, &a_minus) {
            (Some(p), Some(ap), Some(am)) => combined_kernel(p, ap, am, p.theta())
                .map_err(|e| errs.push(format!("kernels: {e}")))
                .ok(),
            _ => None,
        };
        if let Some(g) = &grid {
            let mut sources = vec![("initial", &self.initial)];
            if experiment == Experiment::Taylor {
                sources.push(("taylor.xi", &self.taylor.xi));
            }
            for (name, src) in sources {
                let theta = params.map_or(1.0, |p| p.theta());
                if let Err(e) = src.build(g, theta, base_dir) {
                    errs.push(format!("{name}: {e}"));
                }
            }
        }
        if !errs.is_empty() {
            return Err(CliError::Config(errs));
        }
        Ok(Setup {
            grid: grid.unwrap(),
            params: params.unwrap(),
            a_plus: a_plus.unwrap(),
            a_minus: a_minus.unwrap(),
            j_theta: j_theta.unwrap(),
            base_dir: base_dir.to_path_buf(),
            config: self,
        })
    }
}

impl FieldSource {
    pub fn build(
        &self,
        grid: &Grid<f64>,
        theta: f64,
        base_dir: &Path,
    ) -> Result<Field<f64>, String> {
        let l = grid.extent();
        let tau = std::f64::consts::TAU;
        let field = match self {
            FieldSource::Constant { value } => Field::constant(grid, *value),
            FieldSource::ThetaMultiple { factor } => Field::constant(grid, factor * theta),
            FieldSource::Sine {
                base,
                amplitude,
                mode,
            } => Field::from_fn(grid, |x| base + amplitude * (tau * mode * x[0] / l).sin())
                .map_err(|e| e.to_string())?,
            FieldSource::Bump {
                base,
                height,
                center,
                width,
            } => {
                if center.len() != grid.dim() {
                    return Err(format!(
                        "bump center has {} coordinates, grid has {}",
                        center.len(),
                        grid.dim()
                    ));
                }
                if !(*width > 0.0) {
                    return Err(format!("bump width must be positive, got {width}"));
                }
                Field::from_fn(grid, |x| {
                    let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                    base + height * (-r2 / (2.0 * width * width)).exp()
                })
                .map_err(|e| e.to_string())?
            }
            FieldSource::File { path } => {
                let full = base_dir.join(path);
                let file = File::open(&full).map_err(|e| format!("{}: {e}", full.display()))?;
                let field: Field<f64> = if full.extension().is_some_and(|e| e == "csv") {
                    read_field_csv(BufReader::new(file))
                } else {
                    read_field_binary(&mut BufReader::new(file))
                }
                .map_err(|e| format!("{}: {e}", full.display()))?;
                grid.ensure_same(field.grid()).map_err(|e| e.to_string())?;
                field
            }
            FieldSource::Spike { index } => {
                if *index >= grid.len() {
                    return Err(format!(
                        "spike index {index} is outside the {} sites",
                        grid.len()
                    ));
                }
                Field::indicator(grid, *index)
            }
        };
        if let Some(i) = field.values().iter().position(|v| !v.is_finite()) {
            return Err(format!("non-finite value at index {i}"));
        }
        Ok(field)
    }
}
