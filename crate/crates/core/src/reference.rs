//! Reference-state correlations: the covariance matrix of the quartic
//! product state and its four-point corrections beyond Wick's theorem.
//!
//! For a single quartet the state `cos β |0⟩ + sin β |1111⟩` has an exact
//! four-point tensor that is affine in `{1, sin²β, sin β cos β}`. The
//! coefficients are fitted once against exact state-vector evaluation on the
//! 16-dimensional quartet Fock space and cached process-wide; a residual
//! check at off-grid angles guards the ansatz. The non-Gaussian part
//! `ΔK = K − Wick(G₀)` is obtained by subtracting the analytic within-quartet
//! Wick contribution (`cos²2β` on mode-partnered tuples).

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::ed::{fourpoint_of_state, reference_fock_state};
use crate::error::{Error, Result};
use crate::layout::ModeLayout;
use crate::scalar::Scalar;

/// Fitted coefficients of `K(β) = k0 + k1 sin²β + k2 sinβ cosβ` per sorted
/// Majorana 4-tuple of one quartet block (local indices `0..8`).
#[derive(Debug, Clone)]
pub struct QuartetKTable {
    entries: Vec<([usize; 4], [f64; 3])>,
}

static TABLE: OnceLock<QuartetKTable> = OnceLock::new();

/// True on tuples of the form `(i, j, 4+i, 4+j)`: two complete `(c, c')`
/// mode pairs, the only tuples with a nonzero within-quartet Wick value.
fn is_partner_tuple(t: [usize; 4]) -> bool {
    t[0] < 4 && t[1] < 4 && t[2] == t[0] + 4 && t[3] == t[1] + 4
}

impl QuartetKTable {
    pub fn get() -> &'static QuartetKTable {
        TABLE.get_or_init(|| Self::build().expect("quartet four-point table construction failed"))
    }

    fn build() -> Result<Self> {
        let layout = ModeLayout::new(1, 4, vec![[0, 1, 2, 3]])?;
        let fit_betas = [0.3f64, 0.7, 1.1];
        let tables: Vec<_> = fit_betas
            .iter()
            .map(|&b| {
                let psi = reference_fock_state(&layout, &[b])?;
                fourpoint_of_state(&layout, &psi)
            })
            .collect::<Result<_>>()?;

        let design = DMatrix::<f64>::from_fn(3, 3, |r, c| {
            let b = fit_betas[r];
            match c {
                0 => 1.0,
                1 => b.sin() * b.sin(),
                _ => b.sin() * b.cos(),
            }
        });
        let lu = design.lu();

        let mut entries = Vec::new();
        for (&tuple, _) in &tables[0] {
            let y = nalgebra::DVector::from_iterator(3, tables.iter().map(|t| t[&tuple]));
            let coef = lu
                .solve(&y)
                .ok_or_else(|| Error::Numerical("singular four-point design matrix".into()))?;
            let coef = [coef[0], coef[1], coef[2]];
            if coef.iter().any(|c| c.abs() > 1e-10) || is_partner_tuple(tuple) {
                entries.push((tuple, coef));
            }
        }

        // the affine form must reproduce the exact tensor away from the fit grid
        let table = Self { entries };
        for &b in &[0.5f64, 1.9, -0.4, 0.123] {
            let psi = reference_fock_state(&layout, &[b])?;
            let exact = fourpoint_of_state(&layout, &psi)?;
            let mut approx: std::collections::BTreeMap<[usize; 4], f64> =
                exact.keys().map(|&t| (t, 0.0)).collect();
            for &(t, [k0, k1, k2]) in &table.entries {
                approx.insert(t, k0 + k1 * b.sin() * b.sin() + k2 * b.sin() * b.cos());
            }
            for (t, v) in &exact {
                let resid = (approx[t] - v).abs();
                if resid > 1e-12 {
                    return Err(Error::Numerical(format!(
                        "four-point affine fit residual {resid:.3e} at tuple {t:?}"
                    )));
                }
            }
        }
        Ok(table)
    }

    /// Exact minus Wick: `ΔK(β)` on every tracked tuple.
    pub fn delta<T: Scalar>(&self, beta: T) -> Vec<([usize; 4], T)> {
        let (s, c) = (beta.sin(), beta.cos());
        let g = T::one() - T::lit(2.0) * s * s; // cos 2β
        self.entries
            .iter()
            .map(|&(t, [k0, k1, k2])| {
                let mut v = T::lit(k0) + T::lit(k1) * s * s + T::lit(k2) * s * c;
                if is_partner_tuple(t) {
                    v -= g * g;
                }
                (t, v)
            })
            .collect()
    }

    /// `d ΔK / dβ` on every tracked tuple.
    pub fn delta_deriv<T: Scalar>(&self, beta: T) -> Vec<([usize; 4], T)> {
        let (s, c) = (beta.sin(), beta.cos());
        let two = T::lit(2.0);
        let g = T::one() - two * s * s;
        let dg = -two * two * s * c; // d(cos 2β)/dβ = -2 sin 2β
        self.entries
            .iter()
            .map(|&(t, [_, k1, k2])| {
                let mut v = T::lit(k1) * two * s * c + T::lit(k2) * (c * c - s * s);
                if is_partner_tuple(t) {
                    v -= two * g * dg;
                }
                (t, v)
            })
            .collect()
    }

    pub fn entries(&self) -> &[([usize; 4], [f64; 3])] {
        &self.entries
    }
}

/// Covariance matrix of the quartic product state: `g_q = cos 2β_q` on the
/// quartet `(c, c')` partner pairs, `1` on free-mode pairs.
pub fn reference_covariance<T: Scalar>(layout: &ModeLayout, beta: &[T]) -> Result<DMatrix<T>> {
    if beta.len() != layout.n_quartets() {
        return Err(Error::DimensionMismatch { expected: layout.n_quartets(), got: beta.len() });
    }
    let d = layout.dim();
    let mut g0 = DMatrix::<T>::zeros(d, d);
    for q in 0..layout.n_quartets() {
        let base = layout.quartet_majorana_base(q);
        let s = beta[q].sin();
        let g = T::one() - T::lit(2.0) * s * s;
        for i in 0..4 {
            g0[(base + i, base + 4 + i)] = g;
            g0[(base + 4 + i, base + i)] = -g;
        }
    }
    for p in 0..layout.n_modes() {
        if layout.quartet_of_mode(p).is_none() {
            let (kx, kp) = layout.majorana_pair(p);
            g0[(kx, kp)] = T::one();
            g0[(kp, kx)] = -T::one();
        }
    }
    Ok(g0)
}

/// `∂G₀/∂β_q` restricted to the 8×8 block of quartet `q`: `±dg` on the
/// partner pairs with `dg = -2 sin 2β_q`.
pub fn reference_covariance_block_deriv<T: Scalar>(beta_q: T) -> [T; 4] {
    let two = T::lit(2.0);
    let dg = -two * (two * beta_q).sin();
    [dg; 4]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::covariance_of_state;
    use approx::assert_relative_eq;

    #[test]
    fn table_has_expected_structure() {
        let table = QuartetKTable::get();
        // 6 mode-partnered tuples with constant value 1; 8 vacuum-quadruplon
        // mixing tuples (even number of momentum-type factors) carrying
        // ±2 sinβ cosβ
        assert_eq!(table.entries().len(), 14);
        let mut partner = 0;
        let mut mixing = 0;
        for &(t, [k0, k1, k2]) in table.entries() {
            assert!(k1.abs() < 1e-12);
            if is_partner_tuple(t) {
                partner += 1;
                assert_relative_eq!(k0, 1.0, epsilon = 1e-12);
                assert!(k2.abs() < 1e-12);
            } else {
                mixing += 1;
                assert!(k0.abs() < 1e-12);
                assert_relative_eq!(k2.abs(), 2.0, epsilon = 1e-12);
                let momentum_count = t.iter().filter(|&&i| i >= 4).count();
                assert_eq!(momentum_count % 2, 0);
            }
        }
        assert_eq!((partner, mixing), (6, 8));
    }

    #[test]
    fn reference_covariance_matches_state_vector() {
        let layout = ModeLayout::new(3, 2, vec![[0, 1, 2, 3]]).unwrap();
        let beta = [0.55];
        let g0 = reference_covariance(&layout, &beta).unwrap();
        let psi = reference_fock_state(&layout, &beta).unwrap();
        let g_ed = covariance_of_state(&layout, &psi);
        assert_relative_eq!((g0 - g_ed).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wick_plus_delta_reproduces_exact_fourpoint() {
        // two quartets: also exercises cross-quartet Wick factorization
        let layout = ModeLayout::new(4, 2, vec![[0, 1, 2, 3], [4, 5, 6, 7]]).unwrap();
        let beta = [0.37, 1.21];
        let g0 = reference_covariance(&layout, &beta).unwrap();
        let psi = reference_fock_state(&layout, &beta).unwrap();
        let exact = fourpoint_of_state(&layout, &psi).unwrap();
        let table = QuartetKTable::get();
        let mut predicted: std::collections::BTreeMap<[usize; 4], f64> = exact
            .keys()
            .map(|&[i, j, k, l]| {
                let w = -g0[(i, j)] * g0[(k, l)] + g0[(i, k)] * g0[(j, l)] - g0[(i, l)] * g0[(j, k)];
                ([i, j, k, l], w)
            })
            .collect();
        for (q, _) in layout.quartets().iter().enumerate() {
            let base = layout.quartet_majorana_base(q);
            for (t, v) in table.delta::<f64>(beta[q]) {
                let global = [base + t[0], base + t[1], base + t[2], base + t[3]];
                *predicted.get_mut(&global).unwrap() += v;
            }
        }
        for (t, v) in &exact {
            assert_relative_eq!(predicted[t], *v, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_derivative_matches_finite_differences() {
        let table = QuartetKTable::get();
        let beta = 0.81f64;
        let h = 1e-6;
        let plus = table.delta::<f64>(beta + h);
        let minus = table.delta::<f64>(beta - h);
        let deriv = table.delta_deriv::<f64>(beta);
        for ((tp, vp), ((_, vm), (td, vd))) in plus.iter().zip(minus.iter().zip(&deriv)) {
            assert_eq!(tp, td);
            let fd = (vp - vm) / (2.0 * h);
            assert_relative_eq!(fd, *vd, epsilon = 1e-8);
        }
    }
}
