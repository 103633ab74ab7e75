//! Energy and gradient evaluation for the variational family.
//!
//! A variational point is a quartet angle vector `β` together with a global
//! special-orthogonal Majorana rotation `O`. Expectation values are computed
//! from the rotated covariance matrix `G' = O G₀(β) Oᵀ` via Wick's theorem,
//! plus sparse per-quartet non-Gaussian corrections `ΔK` rotated as an
//! antisymmetric four-tensor (4×4 determinants of `O` submatrices). Gradients
//! come in two flavors: the Riemannian gradient on the rotation group for
//! left-multiplicative perturbations `O → exp(εh) O`, and the plain partial
//! derivative with respect to `β`.

use nalgebra::DMatrix;

use crate::algebra::MajoranaOperator;
use crate::error::{Error, Result};
use crate::layout::ModeLayout;
use crate::orthogonal::OrthogonalMatrix;
use crate::reference::{reference_covariance, QuartetKTable};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct VariationalPoint<T: Scalar> {
    pub beta: Vec<T>,
    pub ortho: OrthogonalMatrix<T>,
}

impl<T: Scalar> VariationalPoint<T> {
    /// The bare reference vacuum: all angles zero, identity rotation.
    pub fn vacuum(layout: &ModeLayout) -> Self {
        Self {
            beta: vec![T::zero(); layout.n_quartets()],
            ortho: OrthogonalMatrix::identity(layout.dim()),
        }
    }

    fn check(&self, op: &MajoranaOperator<T>, layout: &ModeLayout) -> Result<()> {
        if self.ortho.dim() != layout.dim() || op.dim() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), got: self.ortho.dim() });
        }
        if self.beta.len() != layout.n_quartets() {
            return Err(Error::DimensionMismatch {
                expected: layout.n_quartets(),
                got: self.beta.len(),
            });
        }
        Ok(())
    }
}

/// `G' = O G₀(β) Oᵀ`.
pub fn rotated_covariance<T: Scalar>(
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
) -> Result<DMatrix<T>> {
    let g0 = reference_covariance(layout, &point.beta)?;
    let o = point.ortho.matrix();
    Ok(o * g0 * o.transpose())
}

fn det3<T: Scalar>(m: &[[T; 4]; 4], rows: [usize; 3], cols: [usize; 3]) -> T {
    let a = |r: usize, c: usize| m[rows[r]][cols[c]];
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

fn det4<T: Scalar>(m: &[[T; 4]; 4]) -> T {
    let mut det = T::zero();
    let mut sign = T::one();
    for c in 0..4 {
        let cols = minor_indices(c);
        det += sign * m[0][c] * det3(m, [1, 2, 3], cols);
        sign = -sign;
    }
    det
}

fn minor_indices(skip: usize) -> [usize; 3] {
    let mut out = [0usize; 3];
    let mut w = 0;
    for i in 0..4 {
        if i != skip {
            out[w] = i;
            w += 1;
        }
    }
    out
}

/// All 16 cofactors: `cof[r][c] = ∂ det / ∂ m[r][c]`.
fn cofactors4<T: Scalar>(m: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut cof = [[T::zero(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let minor = det3(m, minor_indices(r), minor_indices(c));
            cof[r][c] = if (r + c) % 2 == 0 { minor } else { -minor };
        }
    }
    cof
}

fn submatrix<T: Scalar>(o: &DMatrix<T>, rows: &[usize; 4], cols: &[usize; 4]) -> [[T; 4]; 4] {
    let mut m = [[T::zero(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = o[(rows[r], cols[c])];
        }
    }
    m
}

/// Wick value of a sorted four-tuple under covariance `g`.
fn wick4<T: Scalar>(g: &DMatrix<T>, t: &[usize; 4]) -> T {
    let &[i, j, k, l] = t;
    -g[(i, j)] * g[(k, l)] + g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]
}

/// `∂E_quartic / ∂G'` accumulated over the Hamiltonian's canonical entries
/// (product rule on the Wick pairings). Not antisymmetric as built; only the
/// antisymmetric part is ever used.
fn wick_sensitivity<T: Scalar>(op: &MajoranaOperator<T>, gp: &DMatrix<T>) -> DMatrix<T> {
    let d = op.dim();
    let mut c = DMatrix::<T>::zeros(d, d);
    for &([i, j, k, l], w) in op.quart.entries() {
        c[(i, j)] -= w * gp[(k, l)];
        c[(k, l)] -= w * gp[(i, j)];
        c[(i, k)] += w * gp[(j, l)];
        c[(j, l)] += w * gp[(i, k)];
        c[(i, l)] -= w * gp[(j, k)];
        c[(j, k)] -= w * gp[(i, l)];
    }
    c
}

/// Variational energy at a point.
pub fn energy<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
) -> Result<T> {
    point.check(op, layout)?;
    let gp = rotated_covariance(layout, point)?;
    let o = point.ortho.matrix();
    let table = QuartetKTable::get();

    let mut e = op.offset + op.quad.matrix().component_mul(&gp).sum();
    for &(tuple, w) in op.quart.entries() {
        e += w * wick4(&gp, &tuple);
    }
    for q in 0..layout.n_quartets() {
        let base = layout.quartet_majorana_base(q);
        for (t, d_val) in table.delta::<T>(point.beta[q]) {
            if d_val == T::zero() {
                continue;
            }
            let cols = [base + t[0], base + t[1], base + t[2], base + t[3]];
            for &(rows, w) in op.quart.entries() {
                let m = submatrix(o, &rows, &cols);
                e += w * d_val * det4(&m);
            }
        }
    }
    Ok(e)
}

/// Riemannian energy gradient on the rotation group: the antisymmetric `h*`
/// with `dE[O → exp(εh) O] = ⟨h*, h⟩_F ε + O(ε²)`. Descent steps use `-h*`.
pub fn gamma_gradient<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
) -> Result<DMatrix<T>> {
    point.check(op, layout)?;
    let gp = rotated_covariance(layout, point)?;
    let o = point.ortho.matrix();
    let d = layout.dim();
    let table = QuartetKTable::get();

    // quadratic + Wick parts: dE = Σ C_ab (hG' - G'h)_ab with C = T + ∂E_w/∂G'
    let c = op.quad.matrix() + wick_sensitivity(op, &gp);
    let mut m = &gp * &c - &c * &gp;

    // ΔK part: sensitivity to O through the 4×4 determinants
    if layout.n_quartets() > 0 && !op.quart.is_empty() {
        let mut a = DMatrix::<T>::zeros(d, d);
        for q in 0..layout.n_quartets() {
            let base = layout.quartet_majorana_base(q);
            for (t, d_val) in table.delta::<T>(point.beta[q]) {
                if d_val == T::zero() {
                    continue;
                }
                let cols = [base + t[0], base + t[1], base + t[2], base + t[3]];
                for &(rows, w) in op.quart.entries() {
                    let sub = submatrix(o, &rows, &cols);
                    let cof = cofactors4(&sub);
                    let scale = w * d_val;
                    for r in 0..4 {
                        for s in 0..4 {
                            a[(rows[r], cols[s])] += scale * cof[r][s];
                        }
                    }
                }
            }
        }
        m += a * o.transpose();
    }
    Ok((&m - m.transpose()) * T::lit(0.5))
}

/// `∂E/∂β_q` for every quartet.
pub fn beta_gradient<T: Scalar>(
    op: &MajoranaOperator<T>,
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
) -> Result<Vec<T>> {
    point.check(op, layout)?;
    let gp = rotated_covariance(layout, point)?;
    let o = point.ortho.matrix();
    let table = QuartetKTable::get();

    // dE = Σ (T + C)_ab (O Ḃ Oᵀ)_ab = Σ Ḃ_uv (Oᵀ (T + C) O)_uv
    let c = op.quad.matrix() + wick_sensitivity(op, &gp);
    let ct = o.transpose() * c * o;

    let two = T::lit(2.0);
    let mut grad = vec![T::zero(); layout.n_quartets()];
    for q in 0..layout.n_quartets() {
        let base = layout.quartet_majorana_base(q);
        let dg = -two * (two * point.beta[q]).sin();
        let mut g = T::zero();
        for i in 0..4 {
            g += dg * (ct[(base + i, base + 4 + i)] - ct[(base + 4 + i, base + i)]);
        }
        for (t, dd) in table.delta_deriv::<T>(point.beta[q]) {
            if dd == T::zero() {
                continue;
            }
            let cols = [base + t[0], base + t[1], base + t[2], base + t[3]];
            for &(rows, w) in op.quart.entries() {
                g += w * dd * det4(&submatrix(o, &rows, &cols));
            }
        }
        grad[q] = g;
    }
    Ok(grad)
}
