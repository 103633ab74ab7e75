//! Task orchestration: execute a validated run configuration and emit
//! artifacts (JSON summary, trajectory CSV, observable CSVs, state dump).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::algebra::MajoranaOperator;
use crate::config::{ModelKind, RunConfig, Task};
use crate::ed;
use crate::engine::rotated_covariance;
use crate::error::{Error, Result};
use crate::layout::ModeLayout;
use crate::m1::{m1_energy_density, M1Params};
use crate::models::{build_h4, build_hubbard, build_pairing_operator, hubbard_hopping_matrix};
use crate::observables;
use crate::optimizer::{optimize, optimize_seeded, Minimization, StopReason};
use crate::pairing::pairing_measure;
use crate::tensors::write_dense;

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub tasks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_ed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_ghft: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_tot: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing_measure: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ghft_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimize_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimize_stop: Option<String>,
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::GradientConverged => "gradient-converged",
        StopReason::EnergyPlateau => "energy-plateau",
        StopReason::MaxIters => "max-iters",
    }
}

fn build_model(cfg: &RunConfig) -> Result<(MajoranaOperator<f64>, ModeLayout)> {
    let (hub_op, layout) = build_hubbard(&cfg.hubbard)?;
    match cfg.model_kind {
        ModelKind::Hubbard => Ok((hub_op, layout)),
        ModelKind::H4 => {
            // same single-particle hopping (μ on the diagonal), quartic driver
            let t_matrix = hubbard_hopping_matrix(&cfg.hubbard, &layout);
            let op = build_h4(&layout, &t_matrix, cfg.hubbard.u)?;
            Ok((op, layout))
        }
    }
}

fn write_trajectory(run: &Minimization<f64>, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "iter,energy,gamma_grad_norm,beta_grad_norm,dt")?;
    for p in &run.trajectory {
        writeln!(
            f,
            "{},{:.12e},{:.6e},{:.6e},{:.6e}",
            p.iter, p.energy, p.gamma_grad_norm, p.beta_grad_norm, p.dt
        )?;
    }
    Ok(())
}

fn dump_state(run: &Minimization<f64>, layout: &ModeLayout, out: &Path) -> Result<()> {
    let mut f = fs::File::create(out.join("o_matrix.txt"))?;
    write_dense(run.point.ortho.matrix(), &mut f)?;
    let gp = rotated_covariance(layout, &run.point)?;
    let mut f = fs::File::create(out.join("g_prime.txt"))?;
    write_dense(&gp, &mut f)?;
    let mut f = fs::File::create(out.join("beta.txt"))?;
    for b in &run.point.beta {
        writeln!(f, "{b:.16e}")?;
    }
    Ok(())
}

/// Execute every task in order, writing artifacts into `cfg.output`.
pub fn run(cfg: &RunConfig) -> Result<Summary> {
    fs::create_dir_all(&cfg.output)?;
    let mut summary = Summary {
        seed: cfg.seed,
        tasks: cfg.tasks.iter().map(|t| t.name().to_string()).collect(),
        e_ed: None,
        e_ghft: None,
        e_final: None,
        n_tot: None,
        pairing_measure: None,
        ghft_iters: None,
        optimize_iters: None,
        optimize_stop: None,
    };

    let needs_model = cfg.tasks.iter().any(|t| !matches!(t, Task::FsbsM1));
    let model = if needs_model { Some(build_model(cfg)?) } else { None };

    let mut ghft_run: Option<Minimization<f64>> = None;
    let mut full_run: Option<Minimization<f64>> = None;

    for task in &cfg.tasks {
        match task {
            Task::Ed => {
                let (op, layout) = model.as_ref().unwrap();
                let (e, _) = ed::ed_ground(op, layout, ed::Sector::All)?;
                summary.e_ed = Some(e);
            }
            Task::Ghft => {
                let (op, layout) = model.as_ref().unwrap();
                let run = optimize(op, layout, &cfg.optimizer, true)?;
                summary.e_ghft = Some(run.energy);
                summary.ghft_iters = Some(run.trajectory.len());
                ghft_run = Some(run);
            }
            Task::Optimize => {
                let (op, layout) = model.as_ref().unwrap();
                let run = if ghft_run.is_some() {
                    optimize_seeded(op, layout, &cfg.optimizer)?
                } else {
                    optimize(op, layout, &cfg.optimizer, false)?
                };
                summary.e_final = Some(run.energy);
                summary.optimize_iters = Some(run.trajectory.len());
                summary.optimize_stop = Some(stop_name(run.stop).to_string());
                write_trajectory(&run, &cfg.output.join("trajectory.csv"))?;
                dump_state(&run, layout, &cfg.output)?;
                let (_, n_tot) = observables::occupations(layout, &run.point)?;
                summary.n_tot = Some(n_tot);
                full_run = Some(run);
            }
            Task::Pairing => {
                let (_, layout) = model.as_ref().unwrap();
                let state = full_run
                    .as_ref()
                    .or(ghft_run.as_ref())
                    .ok_or_else(|| Error::Config("pairing: no optimized state".into()))?;
                let pairing_op = build_pairing_operator(layout)?;
                let result = pairing_measure(&pairing_op, layout, &state.point, &cfg.optimizer)?;
                summary.pairing_measure = Some(result.measure);
                if summary.n_tot.is_none() {
                    summary.n_tot = Some(result.n_total);
                }
            }
            Task::Observables => {
                let (_, layout) = model.as_ref().unwrap();
                let state = full_run
                    .as_ref()
                    .or(ghft_run.as_ref())
                    .ok_or_else(|| Error::Config("observables: no optimized state".into()))?;
                let (lx, ly, bc) = (cfg.hubbard.lx, cfg.hubbard.ly, cfg.hubbard.bc);
                let c = observables::spin_spin_field(layout, &state.point, lx, ly, bc)?;
                let (s, _resid) = observables::structure_factor(&c);
                let a = observables::af_order_field(layout, &state.point, lx, ly, bc)?;
                let mut f = fs::File::create(cfg.output.join("spin_spin.csv"))?;
                observables::write_field_csv(&c, ("yx", "yy"), &mut f)?;
                let mut f = fs::File::create(cfg.output.join("structure_factor.csv"))?;
                observables::write_field_csv(&s, ("kx", "ky"), &mut f)?;
                let mut f = fs::File::create(cfg.output.join("af_order.csv"))?;
                observables::write_field_csv(&a, ("yx", "yy"), &mut f)?;
                let (per_site, n_tot) = observables::occupations(layout, &state.point)?;
                let mut f = fs::File::create(cfg.output.join("occupations.csv"))?;
                writeln!(f, "site,n_up,n_down")?;
                for (site, (up, dn)) in per_site.iter().enumerate() {
                    writeln!(f, "{site},{up:.12e},{dn:.12e}")?;
                }
                summary.n_tot = Some(n_tot);
            }
            Task::FsbsM1 => {
                let grid = cfg
                    .m1_grid
                    .as_ref()
                    .ok_or_else(|| Error::Config("fsbs-m1: missing m1 grid".into()))?;
                let mut f = fs::File::create(cfg.output.join("m1.csv"))?;
                writeln!(f, "t,u,mu,energy,x,rho")?;
                for &t in &grid.t {
                    for &u in &grid.u {
                        for &mu in &grid.mu {
                            let s = m1_energy_density(&M1Params { t, u, mu });
                            writeln!(
                                f,
                                "{t},{u},{mu},{:.12e},{},{:.12e}",
                                s.energy, s.x, s.rho
                            )?;
                        }
                    }
                }
            }
        }
    }

    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Numerical(format!("summary serialization: {e}")))?;
    fs::write(cfg.output.join("summary.json"), json)?;
    Ok(summary)
}
