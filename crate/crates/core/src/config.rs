//! TOML run configuration: parsing, validation, and the resolved form the
//! runner consumes.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::models::{Boundary, HubbardParams, Tiling};
use crate::optimizer::OptimizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Ed,
    Ghft,
    Optimize,
    Pairing,
    Observables,
    FsbsM1,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Ed => "ed",
            Task::Ghft => "ghft",
            Task::Optimize => "optimize",
            Task::Pairing => "pairing",
            Task::Observables => "observables",
            Task::FsbsM1 => "fsbs-m1",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ed" => Task::Ed,
            "ghft" => Task::Ghft,
            "optimize" => Task::Optimize,
            "pairing" => Task::Pairing,
            "observables" => Task::Observables,
            "fsbs-m1" => Task::FsbsM1,
            other => {
                return Err(Error::Config(format!(
                    "tasks: unknown task '{other}' (expected ed, ghft, optimize, pairing, observables, fsbs-m1)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Hubbard,
    H4,
}

#[derive(Debug, Clone)]
pub struct M1Grid {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub mu: Vec<f64>,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub output: PathBuf,
    pub tasks: Vec<Task>,
    pub model_kind: ModelKind,
    pub hubbard: HubbardParams<f64>,
    pub optimizer: OptimizerConfig<f64>,
    pub m1_grid: Option<M1Grid>,
}

// ---------------------------------------------------------------------------
// raw deserialization layer
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    output: Option<String>,
    tasks: Vec<String>,
    lattice: Option<RawLattice>,
    model: Option<RawModel>,
    quartets: Option<RawQuartets>,
    optimizer: Option<RawOptimizer>,
    m1: Option<RawM1>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    lx: usize,
    ly: usize,
    bc: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(rename = "type")]
    kind: Option<String>,
    t: f64,
    u: f64,
    mu: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuartets {
    tiling: String,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptimizer {
    max_iters: Option<usize>,
    restarts: Option<usize>,
    dt0: Option<f64>,
    dt_max: Option<f64>,
    tol_grad: Option<f64>,
    tol_energy: Option<f64>,
    window: Option<usize>,
    init_gamma_scale: Option<f64>,
    init_beta_scale: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawM1 {
    t: Vec<f64>,
    u: Vec<f64>,
    mu: Vec<f64>,
}

fn parse_tiling(spec: &str, config_dir: &Path) -> Result<Tiling> {
    match spec {
        "h-domino" => Ok(Tiling::HDomino),
        "v-domino" => Ok(Tiling::VDomino),
        "none" => Ok(Tiling::None),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let path = config_dir.join(path);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::Config(format!("quartets.tiling: cannot read {}: {e}", path.display()))
                })?;
                let mut quartets = Vec::new();
                for (lineno, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let fields: Vec<usize> = line
                        .split_whitespace()
                        .map(|f| {
                            f.parse().map_err(|_| {
                                Error::Config(format!(
                                    "quartets file line {}: bad mode index '{f}'",
                                    lineno + 1
                                ))
                            })
                        })
                        .collect::<Result<_>>()?;
                    if fields.len() != 4 {
                        return Err(Error::Config(format!(
                            "quartets file line {}: expected 4 mode indices",
                            lineno + 1
                        )));
                    }
                    quartets.push([fields[0], fields[1], fields[2], fields[3]]);
                }
                Ok(Tiling::Explicit(quartets))
            } else {
                Err(Error::Config(format!(
                    "quartets.tiling: unknown tiling '{other}' (expected h-domino, v-domino, none, file:<path>)"
                )))
            }
        }
    }
}

/// Parse and validate a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let config_dir = path.parent().unwrap_or(Path::new("."));
    resolve(raw, config_dir)
}

fn resolve(raw: RawConfig, config_dir: &Path) -> Result<RunConfig> {
    if raw.tasks.is_empty() {
        return Err(Error::Config("tasks: at least one task required".into()));
    }
    let tasks: Vec<Task> = raw.tasks.iter().map(|s| Task::parse(s)).collect::<Result<_>>()?;

    // pairing and observables consume the optimized state
    for (i, t) in tasks.iter().enumerate() {
        if matches!(t, Task::Pairing | Task::Observables)
            && !tasks[..i].iter().any(|p| matches!(p, Task::Optimize | Task::Ghft))
        {
            return Err(Error::Config(format!(
                "tasks: '{}' requires 'optimize' (or 'ghft') earlier in the task list",
                t.name()
            )));
        }
    }

    let needs_model = tasks.iter().any(|t| !matches!(t, Task::FsbsM1));
    let (model_kind, hubbard) = if needs_model {
        let lattice = raw
            .lattice
            .as_ref()
            .ok_or_else(|| Error::Config("lattice: section required for lattice tasks".into()))?;
        let model = raw
            .model
            .as_ref()
            .ok_or_else(|| Error::Config("model: section required for lattice tasks".into()))?;
        if lattice.lx == 0 || lattice.ly == 0 {
            return Err(Error::Config("lattice.lx/ly: must be at least 1".into()));
        }
        let bc = match lattice.bc.as_deref().unwrap_or("periodic") {
            "periodic" => Boundary::Periodic,
            "open" => Boundary::Open,
            other => {
                return Err(Error::Config(format!(
                    "lattice.bc: unknown boundary '{other}' (expected periodic or open)"
                )))
            }
        };
        let kind = match model.kind.as_deref().unwrap_or("hubbard") {
            "hubbard" => ModelKind::Hubbard,
            "h4" => ModelKind::H4,
            other => {
                return Err(Error::Config(format!(
                    "model.type: unknown model '{other}' (expected hubbard or h4)"
                )))
            }
        };
        let tiling = match &raw.quartets {
            Some(q) => parse_tiling(&q.tiling, config_dir)?,
            None => Tiling::None,
        };
        if kind == ModelKind::H4 && matches!(tiling, Tiling::None) {
            return Err(Error::Config("model.type = h4 requires a quartet tiling".into()));
        }
        let params = HubbardParams {
            lx: lattice.lx,
            ly: lattice.ly,
            t: model.t,
            u: model.u,
            mu: model.mu.unwrap_or(0.0),
            bc,
            tiling,
        };
        (kind, params)
    } else {
        // placeholder, unused by pure fsbs-m1 runs
        (
            ModelKind::Hubbard,
            HubbardParams {
                lx: 1,
                ly: 1,
                t: 0.0,
                u: 0.0,
                mu: 0.0,
                bc: Boundary::Open,
                tiling: Tiling::None,
            },
        )
    };

    let m1_grid = match (&raw.m1, tasks.contains(&Task::FsbsM1)) {
        (Some(m), _) => {
            if m.t.is_empty() || m.u.is_empty() || m.mu.is_empty() {
                return Err(Error::Config("m1: t, u, mu grids must be non-empty".into()));
            }
            Some(M1Grid { t: m.t.clone(), u: m.u.clone(), mu: m.mu.clone() })
        }
        (None, true) => return Err(Error::Config("m1: section required by task fsbs-m1".into())),
        (None, false) => None,
    };

    let seed = raw.seed.unwrap_or(7);
    let ro = raw.optimizer.unwrap_or_default();
    let defaults = OptimizerConfig::<f64>::default();
    let optimizer = OptimizerConfig {
        dt0: ro.dt0.unwrap_or(defaults.dt0),
        ls_shrink: defaults.ls_shrink,
        ls_grow: defaults.ls_grow,
        dt_max: ro.dt_max.unwrap_or(defaults.dt_max),
        max_iters: ro.max_iters.unwrap_or(defaults.max_iters),
        tol_grad: ro.tol_grad.unwrap_or(defaults.tol_grad),
        tol_energy: ro.tol_energy.unwrap_or(defaults.tol_energy),
        window: ro.window.unwrap_or(defaults.window),
        init_gamma_scale: ro.init_gamma_scale.unwrap_or(defaults.init_gamma_scale),
        init_beta_scale: ro.init_beta_scale.unwrap_or(defaults.init_beta_scale),
        restarts: ro.restarts.unwrap_or(defaults.restarts),
        seed,
    };

    Ok(RunConfig {
        seed,
        output: PathBuf::from(raw.output.unwrap_or_else(|| "out".to_string())),
        tasks,
        model_kind,
        hubbard,
        optimizer,
        m1_grid,
    })
}

/// Parse a config from a TOML string (tests and tooling).
pub fn load_config_str(text: &str, config_dir: &Path) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    resolve(raw, config_dir)
}
