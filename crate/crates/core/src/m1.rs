//! Closed-form ground-state energy density of the permutation-symmetric
//! single-mode-per-block Hamiltonian, plus its finite-size and
//! wavefunction-parametrized counterparts.
//!
//! The energy density is `E(x, ρ₀) = -t x + U ρ₀² + μ ρ₀` with the kinetic
//! weight `x ∈ {0, 1}` and density `ρ₀ ∈ [0, 1]` independent; both minimizers
//! are available in closed form. Degenerate minimizers resolve to the
//! lexicographically smallest `(x, ρ₀)`.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct M1Params<T: Scalar> {
    pub t: T,
    pub u: T,
    pub mu: T,
}

#[derive(Debug, Clone, Copy)]
pub struct M1Solution<T: Scalar> {
    pub energy: T,
    pub x: T,
    pub rho: T,
}

/// Analytic minimizer of `-t x + U ρ² + μ ρ` over `x ∈ {0,1}`, `ρ ∈ [0,1]`.
pub fn m1_energy_density<T: Scalar>(p: &M1Params<T>) -> M1Solution<T> {
    let x = if p.t > T::zero() { T::one() } else { T::zero() };
    let rho = if p.u > T::zero() {
        // convex parabola: clamp the vertex
        (-p.mu / (T::lit(2.0) * p.u)).clamp(T::zero(), T::one())
    } else {
        // concave or linear: compare endpoints, ties to 0
        if p.u + p.mu < T::zero() {
            T::one()
        } else {
            T::zero()
        }
    };
    let energy = -p.t * x + p.u * rho * rho + p.mu * rho;
    M1Solution { energy, x, rho }
}

/// Kinetic weight of the two-parameter wavefunction family:
/// `x = (sin α + c cos α)² / (1 + 2 c sin α cos α + c² cos² α)`,
/// continued to `1` where `cos α = 0` kills the denominator margin.
pub fn m1_x<T: Scalar>(c: T, alpha: T) -> T {
    let (s, co) = (alpha.sin(), alpha.cos());
    let num = (s + c * co) * (s + c * co);
    let den = num + co * co;
    if den == T::zero() {
        // cos α = 0 and sin α + c cos α = 0 cannot happen simultaneously
        return T::one();
    }
    num / den
}

/// Exact ground energy density at `N` blocks: discrete minimization over the
/// particle number `L` and the kinetic weight.
pub fn m1_finite_n_energy<T: Scalar>(p: &M1Params<T>, n: usize) -> T {
    assert!(n >= 1);
    let mut best = T::lit(f64::INFINITY);
    for l in 0..=n {
        let rho = T::lit(l as f64 / n as f64);
        let static_part = p.u * rho * rho + p.mu * rho;
        for x in [T::zero(), T::one().min(T::lit(l as f64))] {
            let e = -p.t * x + static_part;
            if e < best {
                best = e;
            }
        }
    }
    best
}

/// Numerical minimization over the `(c, α)` wavefunction parametrization
/// (with `ρ₀ = sin²α`): coarse grid on `c = tan θ` including the `c = ±∞`
/// boundary, followed by shrinking-box refinement.
pub fn m1_energy_via_c_alpha<T: Scalar>(p: &M1Params<T>) -> T {
    let pi = T::pi();
    let half_pi = pi * T::lit(0.5);
    let eval = |theta: T, alpha: T| -> T {
        let s = alpha.sin();
        let rho = s * s;
        let x = if theta.abs() >= half_pi { T::one() } else { m1_x(theta.tan(), alpha) };
        -p.t * x + p.u * rho * rho + p.mu * rho
    };

    let n = 64usize;
    let mut best = (T::lit(f64::INFINITY), T::zero(), T::zero());
    for i in 0..=n {
        let theta = -half_pi + pi * T::lit(i as f64 / n as f64);
        for j in 0..n {
            let alpha = pi * T::lit(j as f64 / n as f64);
            let e = eval(theta, alpha);
            if e < best.0 {
                best = (e, theta, alpha);
            }
        }
    }
    let mut span = pi * T::lit(2.0 / n as f64);
    let refine_n = 8usize;
    while span > T::lit(1e-9) {
        let (_, t0, a0) = best;
        for i in 0..=refine_n {
            let theta = (t0 - span + span * T::lit(2.0 * i as f64 / refine_n as f64))
                .clamp(-half_pi, half_pi);
            for j in 0..=refine_n {
                let alpha = a0 - span + span * T::lit(2.0 * j as f64 / refine_n as f64);
                let e = eval(theta, alpha);
                if e < best.0 {
                    best = (e, theta, alpha);
                }
            }
        }
        span *= T::lit(0.5);
    }
    best.0
}
