//! Pairing measure via number-conserving (passive) rotations.
//!
//! The pairing operator is `P = -B†B` with `B = Σ_x a_{x↓} a_{x↑}`, so its
//! expectation is non-positive and invariantly bounded. The measure is
//! `𝓜 = -min ⟨P⟩ / N` where the minimum runs over passive Bogoliubov
//! rotations of the state (the `U(M)` subgroup of `SO(2M)` that commutes with
//! particle number) and `N` is half the particle number. The minimizer is
//! found by projected Riemannian gradient descent: the full rotation gradient
//! is orthogonally projected onto the passive subalgebra before each step.
//! An independent brute-force search over random unitary pair bases, working
//! directly on the two-body reduced density matrix of an explicit Fock state,
//! serves as the oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::MajoranaOperator;
use crate::engine::{energy, gamma_gradient, rotated_covariance, VariationalPoint};
use crate::error::{Error, Result};
use crate::layout::ModeLayout;
use crate::optimizer::{random_generator, OptimizerConfig};
use crate::scalar::Scalar;

/// Orthogonal projection of an antisymmetric generator onto the passive
/// subalgebra. In the mode-split basis (all `c` first, then all `c'`) passive
/// generators are exactly the matrices `[[A, -S], [S, A]]` with `A`
/// antisymmetric and `S` symmetric.
pub fn passive_project<T: Scalar>(layout: &ModeLayout, h: &DMatrix<T>) -> DMatrix<T> {
    let m = layout.n_modes();
    let d = layout.dim();
    debug_assert_eq!(h.nrows(), d);
    // engine index -> mode-split index
    let mut split = vec![0usize; d];
    for p in 0..m {
        let (kx, kp) = layout.majorana_pair(p);
        split[kx] = p;
        split[kp] = m + p;
    }
    let mut z = DMatrix::<T>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            z[(split[i], split[j])] = h[(i, j)];
        }
    }
    let z11 = z.view((0, 0), (m, m));
    let z12 = z.view((0, m), (m, m));
    let z22 = z.view((m, m), (m, m));
    let half = T::lit(0.5);
    let a = (z11 + z22) * half;
    let a = (&a - a.transpose()) * half;
    let s = -(&z12 + z12.transpose()) * half;
    let mut out = DMatrix::<T>::zeros(d, d);
    for p in 0..m {
        for q in 0..m {
            out[(p, q)] = a[(p, q)];
            out[(m + p, m + q)] = a[(p, q)];
            out[(p, m + q)] = -s[(p, q)];
            out[(m + p, q)] = s[(p, q)];
        }
    }
    // back to engine indexing
    let mut back = DMatrix::<T>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            back[(i, j)] = out[(split[i], split[j])];
        }
    }
    back
}

/// Particle number of a variational point: `M/2 - Σ_p G'_{c_p c'_p} / 2`.
pub fn particle_number<T: Scalar>(layout: &ModeLayout, point: &VariationalPoint<T>) -> Result<T> {
    let gp = rotated_covariance(layout, point)?;
    let half = T::lit(0.5);
    let mut n = T::zero();
    for p in 0..layout.n_modes() {
        let (kx, kp) = layout.majorana_pair(p);
        n += half - half * gp[(kx, kp)];
    }
    Ok(n)
}

#[derive(Debug, Clone)]
pub struct PairingResult<T: Scalar> {
    /// `𝓜 = -min ⟨P⟩ / N`.
    pub measure: T,
    /// The minimized pairing expectation.
    pub min_expectation: T,
    /// Particle number of the state (passive-invariant).
    pub n_total: T,
    /// The minimizing rotated point.
    pub point: VariationalPoint<T>,
}

/// Minimize `⟨P⟩` over passive rotations of `point` and form the measure.
pub fn pairing_measure<T: Scalar>(
    pairing_op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<PairingResult<T>> {
    let n_total = particle_number(layout, point)?;
    if n_total < T::lit(1e-9) {
        return Err(Error::Model("pairing measure undefined on the vacuum".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e3779b9));
    let mut best: Option<(T, VariationalPoint<T>)> = None;
    for restart in 0..=cfg.restarts {
        let start = if restart == 0 {
            point.clone()
        } else {
            // random passive kick before descending
            let kick = passive_project(
                layout,
                &random_generator(layout.dim(), cfg.init_gamma_scale, &mut rng),
            );
            VariationalPoint { beta: point.beta.clone(), ortho: point.ortho.step(&kick, T::one())? }
        };
        let (e, p) = passive_descend(pairing_op, layout, start, cfg)?;
        if best.as_ref().map_or(true, |(be, _)| e < *be) {
            best = Some((e, p));
        }
    }
    let (min_expectation, minimizer) = best.unwrap();

    let n_after = particle_number(layout, &minimizer)?;
    if (n_after - n_total).abs() > T::lit(1e-8) {
        return Err(Error::Numerical(format!(
            "passive flow changed the particle number by {:.3e}",
            (n_after - n_total).to_f64().unwrap_or(f64::NAN)
        )));
    }
    let pairs = n_total * T::lit(0.5);
    Ok(PairingResult { measure: -min_expectation / pairs, min_expectation, n_total, point: minimizer })
}

fn passive_descend<T: Scalar>(
    pairing_op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    init: VariationalPoint<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<(T, VariationalPoint<T>)> {
    let mut point = init;
    let mut e = energy(pairing_op, layout, &point)?;
    let mut dt = cfg.dt0;
    let armijo = T::lit(1e-4);
    let mut history: Vec<T> = vec![e];
    for _ in 0..cfg.max_iters {
        let h = passive_project(layout, &gamma_gradient(pairing_op, layout, &point)?);
        let h_sq = h.iter().fold(T::zero(), |acc, &x| acc + x * x);
        if h_sq.sqrt() < cfg.tol_grad {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = VariationalPoint {
                beta: point.beta.clone(),
                ortho: point.ortho.step(&h, -dt)?,
            };
            let e_new = energy(pairing_op, layout, &candidate)?;
            if e_new <= e - armijo * dt * h_sq {
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
            break;
        }
        history.push(e);
        if history.len() > cfg.window {
            let past = history[history.len() - 1 - cfg.window];
            if past - e < cfg.tol_energy {
                break;
            }
        }
    }
    Ok((e, point))
}

/// Brute-force pairing measure of an explicit Fock state: random unitary
/// pair bases with local refinement, contracted against the two-body RDM.
/// Modes are paired as `(2k, 2k+1)` in site-major order.
pub fn pairing_measure_bruteforce(
    layout: &ModeLayout,
    psi: &[Complex64],
    samples: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<f64> {
    let m = layout.n_modes();
    if m % 2 != 0 {
        return Err(Error::Model("pairing needs an even number of modes".into()));
    }
    let n_total = crate::ed::total_number(layout, psi);
    if n_total < 1e-9 {
        return Err(Error::Model("pairing measure undefined on the vacuum".into()));
    }
    let rho = crate::ed::rdm2(layout, psi);
    let objective = |u: &DMatrix<Complex64>| -> f64 {
        // W_pq = Σ_pairs conj(u[k1, p]) conj(u[k2, q])
        let mut w = DMatrix::<Complex64>::zeros(m, m);
        for k in 0..m / 2 {
            for p in 0..m {
                for q in 0..m {
                    w[(p, q)] += (u[(2 * k, p)] * u[(2 * k + 1, q)]).conj();
                }
            }
        }
        let mut val = Complex64::new(0.0, 0.0);
        for p in 0..m {
            for q in 0..m {
                if w[(p, q)].norm() < 1e-15 {
                    continue;
                }
                for r in 0..m {
                    for s in 0..m {
                        val += w[(p, q)] * rho[((p * m + q) * m + r) * m + s] * w[(s, r)].conj();
                    }
                }
            }
        }
        val.re
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_u = DMatrix::<Complex64>::identity(m, m);
    let mut best = objective(&best_u);
    for _ in 0..samples {
        let u = haar_unitary(m, &mut rng);
        let v = objective(&u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    let mut eps = 0.3;
    let mut stale = 0;
    for _ in 0..refine_iters {
        let gen = random_hermitian(m, &mut rng) * Complex64::new(0.0, eps);
        let u = gen.exp() * &best_u;
        let v = objective(&u);
        if v > best + 1e-14 {
            best = v;
            best_u = u;
            stale = 0;
        } else {
            stale += 1;
            if stale > 20 {
                eps *= 0.5;
                stale = 0;
                if eps < 1e-7 {
                    break;
                }
            }
        }
    }
    Ok(best / (n_total / 2.0))
}

fn haar_unitary(m: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(m, m, |_, _| gaussian_c(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // fix the phase ambiguity of QR so the distribution is Haar
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn gaussian_c(rng: &mut impl Rng) -> Complex64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::new(r * (2.0 * std::f64::consts::PI * u2).cos(), r * (2.0 * std::f64::consts::PI * u2).sin())
}

fn random_hermitian(m: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(m, m, |_, _| gaussian_c(rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}
