//! Energy minimization over the variational family.
//!
//! Joint descent in the rotation and the quartet angles: the rotation moves
//! along `O → exp(-dt h*) O` with `h*` the Riemannian gradient, the angles by
//! plain gradient steps, with a shared Armijo backtracking line search so the
//! energy is monotonically non-increasing by construction. Multi-start
//! wrappers cover the non-convex landscape with seeded random initial points.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::MajoranaOperator;
use crate::engine::{beta_gradient, energy, gamma_gradient, VariationalPoint};
use crate::error::Result;
use crate::layout::ModeLayout;
use crate::orthogonal::OrthogonalMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct OptimizerConfig<T: Scalar> {
    /// Initial trial step size.
    pub dt0: T,
    /// Line-search backtracking factor.
    pub ls_shrink: T,
    /// Step-size growth factor after an accepted step.
    pub ls_grow: T,
    /// Largest step size the line search may grow to.
    pub dt_max: T,
    pub max_iters: usize,
    /// Stop when the combined gradient norm falls below this.
    pub tol_grad: T,
    /// Stop when the energy improvement over `window` iterations falls below this.
    pub tol_energy: T,
    pub window: usize,
    /// Scale of the random rotation generator at initialization.
    pub init_gamma_scale: T,
    /// Scale of the random quartet angles at initialization.
    pub init_beta_scale: T,
    /// Number of random starts in the multi-start wrappers.
    pub restarts: usize,
    pub seed: u64,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            dt0: T::lit(0.1),
            ls_shrink: T::lit(0.5),
            ls_grow: T::lit(1.3),
            dt_max: T::lit(1.0),
            max_iters: 2000,
            tol_grad: T::lit(1e-8),
            tol_energy: T::lit(1e-11),
            window: 25,
            init_gamma_scale: T::lit(0.5),
            init_beta_scale: T::lit(0.05),
            restarts: 4,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientConverged,
    EnergyPlateau,
    MaxIters,
}

#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint<T: Scalar> {
    pub iter: usize,
    pub energy: T,
    pub gamma_grad_norm: T,
    pub beta_grad_norm: T,
    pub dt: T,
}

#[derive(Debug, Clone)]
pub struct Minimization<T: Scalar> {
    pub point: VariationalPoint<T>,
    pub energy: T,
    pub trajectory: Vec<TrajectoryPoint<T>>,
    pub stop: StopReason,
}

fn frobenius<T: Scalar>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

fn vec_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Descend from `init`, optionally keeping the quartet angles frozen.
fn descend<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    init: VariationalPoint<T>,
    cfg: &OptimizerConfig<T>,
    freeze_beta: bool,
) -> Result<Minimization<T>> {
    let mut point = init;
    let mut e = energy(op, layout, &point)?;
    let mut dt = cfg.dt0;
    let mut trajectory = Vec::new();
    let armijo = T::lit(1e-4);
    let mut stop = StopReason::MaxIters;

    for iter in 0..cfg.max_iters {
        let h = gamma_gradient(op, layout, &point)?;
        let gb = if freeze_beta || layout.n_quartets() == 0 {
            vec![T::zero(); layout.n_quartets()]
        } else {
            beta_gradient(op, layout, &point)?
        };
        let h_norm = frobenius(&h);
        let b_norm = vec_norm(&gb);
        trajectory.push(TrajectoryPoint {
            iter,
            energy: e,
            gamma_grad_norm: h_norm,
            beta_grad_norm: b_norm,
            dt,
        });

        let grad_sq = h_norm * h_norm + b_norm * b_norm;
        if grad_sq.sqrt() < cfg.tol_grad {
            stop = StopReason::GradientConverged;
            break;
        }
        if trajectory.len() > cfg.window {
            let past = trajectory[trajectory.len() - 1 - cfg.window].energy;
            if past - e < cfg.tol_energy {
                stop = StopReason::EnergyPlateau;
                break;
            }
        }

        // Armijo backtracking on the joint step
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = VariationalPoint {
                beta: point.beta.iter().zip(&gb).map(|(&b, &g)| b - dt * g).collect(),
                ortho: point.ortho.step(&h, -dt)?,
            };
            let e_new = energy(op, layout, &candidate)?;
            if e_new <= e - armijo * dt * grad_sq {
                point = candidate;
                e = e_new;
                dt = (dt * cfg.ls_grow).min(cfg.dt_max);
                accepted = true;
                break;
            }
            dt *= cfg.ls_shrink;
            if dt < T::lit(1e-16) {
                break;
            }
        }
        if !accepted {
            stop = StopReason::EnergyPlateau;
            break;
        }
    }
    Ok(Minimization { point, energy: e, trajectory, stop })
}

pub fn minimize<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    init: VariationalPoint<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<Minimization<T>> {
    descend(op, layout, init, cfg, false)
}

/// Gaussian baseline: the quartet angles stay pinned at their initial values
/// (zero for the usual Hartree-Fock-type reference).
pub fn minimize_gaussian<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    init: VariationalPoint<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<Minimization<T>> {
    descend(op, layout, init, cfg, true)
}

/// Random antisymmetric matrix with entries uniform in `±scale/2`.
pub fn random_generator<T: Scalar>(d: usize, scale: T, rng: &mut impl Rng) -> DMatrix<T> {
    let mut g = DMatrix::<T>::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let v = T::lit(rng.gen::<f64>() - 0.5) * scale;
            g[(i, j)] = v;
            g[(j, i)] = -v;
        }
    }
    g
}

pub fn random_point<T: Scalar>(
    layout: &ModeLayout,
    cfg: &OptimizerConfig<T>,
    rng: &mut impl Rng,
) -> Result<VariationalPoint<T>> {
    let gamma = random_generator(layout.dim(), cfg.init_gamma_scale, rng);
    let beta = (0..layout.n_quartets())
        .map(|_| T::lit(rng.gen::<f64>() - 0.5) * cfg.init_beta_scale)
        .collect();
    Ok(VariationalPoint { beta, ortho: OrthogonalMatrix::from_generator(&gamma)? })
}

/// Multi-start minimization: the vacuum plus `restarts` seeded random initial
/// points; returns the lowest-energy run.
pub fn optimize<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    cfg: &OptimizerConfig<T>,
    gaussian_only: bool,
) -> Result<Minimization<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let runner = if gaussian_only { minimize_gaussian } else { minimize };
    let mut best = runner(op, layout, VariationalPoint::vacuum(layout), cfg)?;
    for _ in 0..cfg.restarts {
        let mut init = random_point(layout, cfg, &mut rng)?;
        if gaussian_only {
            init.beta.iter_mut().for_each(|b| *b = T::zero());
        }
        let run = runner(op, layout, init, cfg)?;
        if run.energy < best.energy {
            best = run;
        }
    }
    Ok(best)
}

/// Full minimization warm-started from the best Gaussian run: re-optimize
/// rotation and angles together starting at the Gaussian optimum.
pub fn optimize_seeded<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    cfg: &OptimizerConfig<T>,
) -> Result<Minimization<T>> {
    let gaussian = optimize(op, layout, cfg, true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut best = optimize(op, layout, cfg, false)?;
    for _ in 0..cfg.restarts.max(1) {
        let init = VariationalPoint {
            beta: (0..layout.n_quartets())
                .map(|_| T::lit(rng.gen::<f64>() - 0.5) * cfg.init_beta_scale)
                .collect(),
            ortho: gaussian.point.ortho.clone(),
        };
        let run = minimize(op, layout, init, cfg)?;
        if run.energy < best.energy {
            best = run;
        }
    }
    Ok(best)
}
