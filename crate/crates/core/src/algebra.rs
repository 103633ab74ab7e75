//! Normal-ordered Majorana polynomial algebra.
//!
//! Second-quantized operators are expanded over products of Majorana
//! operators and reduced to a canonical form: a complex-weighted sum of
//! monomials `c_{i1} ... c_{ik}` with strictly increasing indices, using
//! `c_k^2 = 1` and `{c_k, c_l} = 2 δ_kl`. Hermitian operators of degree at
//! most four convert losslessly into `(T, W, offset)` coefficient tensors.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::layout::ModeLayout;
use crate::scalar::Scalar;
use crate::tensors::{QuadraticTensor, QuarticTensor};

/// Hamiltonian or observable in Majorana coefficient form:
/// `i Σ T_kl c_k c_l + Σ_canonical w c_i c_j c_k c_l + offset`.
#[derive(Debug, Clone)]
pub struct MajoranaOperator<T: Scalar> {
    pub quad: QuadraticTensor<T>,
    pub quart: QuarticTensor<T>,
    pub offset: T,
}

impl<T: Scalar> MajoranaOperator<T> {
    pub fn dim(&self) -> usize {
        self.quad.dim()
    }
}

/// Sum of canonical Majorana monomials with complex coefficients.
#[derive(Debug, Clone)]
pub struct MajoranaPolynomial<T: Scalar> {
    d: usize,
    terms: BTreeMap<Vec<u32>, Complex<T>>,
}

impl<T: Scalar> MajoranaPolynomial<T> {
    pub fn zero(d: usize) -> Self {
        Self { d, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, z: Complex<T>) -> Self {
        let mut p = Self::zero(d);
        p.add_term(Vec::new(), z);
        p
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Complex::new(T::one(), T::zero()))
    }

    /// A single Majorana operator `c_k`.
    pub fn majorana(d: usize, k: usize) -> Self {
        let mut p = Self::zero(d);
        p.add_term(vec![k as u32], Complex::new(T::one(), T::zero()));
        p
    }

    /// Annihilation operator `a_p = (c - i c') / 2` of a mode.
    pub fn annihilation(layout: &ModeLayout, mode: usize) -> Self {
        let (kx, kp) = layout.majorana_pair(mode);
        let mut p = Self::zero(layout.dim());
        let half = T::lit(0.5);
        p.add_term(vec![kx as u32], Complex::new(half, T::zero()));
        p.add_term(vec![kp as u32], Complex::new(T::zero(), -half));
        p
    }

    /// Creation operator `a†_p = (c + i c') / 2` of a mode.
    pub fn creation(layout: &ModeLayout, mode: usize) -> Self {
        let (kx, kp) = layout.majorana_pair(mode);
        let mut p = Self::zero(layout.dim());
        let half = T::lit(0.5);
        p.add_term(vec![kx as u32], Complex::new(half, T::zero()));
        p.add_term(vec![kp as u32], Complex::new(T::zero(), half));
        p
    }

    /// Number operator `a†_p a_p`.
    pub fn number(layout: &ModeLayout, mode: usize) -> Self {
        Self::creation(layout, mode).mul(&Self::annihilation(layout, mode))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Complex<T>> {
        &self.terms
    }

    fn add_term(&mut self, monomial: Vec<u32>, z: Complex<T>) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(monomial) {
            Entry::Vacant(e) => {
                if z.re != T::zero() || z.im != T::zero() {
                    e.insert(z);
                }
            }
            Entry::Occupied(mut e) => {
                let v = e.get_mut();
                *v += z;
                if v.re == T::zero() && v.im == T::zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (m, z) in &other.terms {
            self.add_term(m.clone(), *z);
        }
    }

    pub fn scale(&mut self, z: Complex<T>) {
        for v in self.terms.values_mut() {
            *v *= z;
        }
    }

    pub fn scaled(&self, z: Complex<T>) -> Self {
        let mut p = self.clone();
        p.scale(z);
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.d);
        for (ma, za) in &self.terms {
            for (mb, zb) in &other.terms {
                let (monomial, odd) = merge_monomials(ma, mb);
                let z = *za * *zb;
                out.add_term(monomial, if odd { -z } else { z });
            }
        }
        out
    }

    /// Hermitian adjoint: reverse each monomial and conjugate coefficients.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.d);
        for (m, z) in &self.terms {
            // reversing k elements costs k(k-1)/2 transpositions
            let k = m.len();
            let odd = (k * (k - 1) / 2) % 2 == 1;
            let zc = z.conj();
            out.add_term(m.clone(), if odd { -zc } else { zc });
        }
        out
    }

    /// Convert a Hermitian degree-≤4 polynomial into coefficient tensors.
    pub fn to_operator(&self) -> Result<MajoranaOperator<T>> {
        let d = self.d;
        let scale = self
            .terms
            .values()
            .fold(T::one(), |acc, z| acc.max(z.re.abs()).max(z.im.abs()));
        let tol = T::lit(1e-12) * scale;

        let mut offset = T::zero();
        let mut tmat = nalgebra::DMatrix::<T>::zeros(d, d);
        let mut quartic_raw = Vec::new();
        for (m, z) in &self.terms {
            match m.len() {
                0 => {
                    if z.im.abs() > tol {
                        return Err(Error::Numerical("non-Hermitian constant term".into()));
                    }
                    offset += z.re;
                }
                2 => {
                    // coefficient of sorted c_k c_l is 2 i T_kl
                    if z.re.abs() > tol {
                        return Err(Error::Numerical(
                            "quadratic term with real coefficient; operator is not Hermitian".into(),
                        ));
                    }
                    let (k, l) = (m[0] as usize, m[1] as usize);
                    let t = z.im * T::lit(0.5);
                    tmat[(k, l)] += t;
                    tmat[(l, k)] -= t;
                }
                4 => {
                    if z.im.abs() > tol {
                        return Err(Error::Numerical(
                            "quartic term with imaginary coefficient; operator is not Hermitian".into(),
                        ));
                    }
                    quartic_raw.push((
                        [m[0] as usize, m[1] as usize, m[2] as usize, m[3] as usize],
                        z.re,
                    ));
                }
                n => {
                    return Err(Error::Numerical(format!(
                        "operator has a degree-{n} Majorana monomial; only degrees 0, 2, 4 supported"
                    )));
                }
            }
        }
        Ok(MajoranaOperator {
            quad: QuadraticTensor::new(tmat)?,
            quart: QuarticTensor::antisymmetrize(d, &quartic_raw)?,
            offset,
        })
    }
}

/// Product of two canonical monomials: sorted indices plus parity.
/// Uses `c^2 = 1` for coinciding indices.
fn merge_monomials(a: &[u32], b: &[u32]) -> (Vec<u32>, bool) {
    let mut out: Vec<u32> = a.to_vec();
    let mut odd = false;
    for &x in b {
        // insert from the right, anticommuting past larger indices
        let mut pos = out.len();
        while pos > 0 && out[pos - 1] > x {
            pos -= 1;
        }
        let crossings = out.len() - pos;
        if crossings % 2 == 1 {
            odd = !odd;
        }
        if pos > 0 && out[pos - 1] == x {
            // c_x c_x = 1 after commuting x next to its partner
            out.remove(pos - 1);
        } else {
            out.insert(pos, x);
        }
    }
    (out, odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn layout1() -> ModeLayout {
        ModeLayout::without_quartets(1, 1).unwrap()
    }

    #[test]
    fn car_relations() {
        let d = 6;
        for k in 0..d {
            for l in 0..d {
                let ck = MajoranaPolynomial::<f64>::majorana(d, k);
                let cl = MajoranaPolynomial::<f64>::majorana(d, l);
                let mut anti = ck.mul(&cl);
                anti.add(&cl.mul(&ck));
                if k == l {
                    assert_eq!(anti.terms().len(), 1);
                    assert_eq!(anti.terms()[&Vec::new()], c(2.0, 0.0));
                } else {
                    assert!(anti.terms().is_empty());
                }
            }
        }
    }

    #[test]
    fn number_operator_form() {
        // n = 1/2 - (i/2) c c'
        let layout = layout1();
        let n = MajoranaPolynomial::<f64>::number(&layout, 0);
        assert_eq!(n.terms()[&Vec::new()], c(0.5, 0.0));
        assert_eq!(n.terms()[&vec![0, 1]], c(0.0, -0.5));
    }

    #[test]
    fn number_operator_is_idempotent() {
        let layout = layout1();
        let n = MajoranaPolynomial::<f64>::number(&layout, 0);
        let n2 = n.mul(&n);
        for (m, z) in n.terms() {
            let diff = n2.terms()[m] - z;
            assert!(diff.norm() < 1e-15);
        }
    }

    #[test]
    fn pauli_exclusion() {
        let layout = layout1();
        let adag = MajoranaPolynomial::<f64>::creation(&layout, 0);
        let square = adag.mul(&adag);
        assert!(square.terms().is_empty());
    }

    #[test]
    fn hermitian_conversion() {
        let layout = ModeLayout::without_quartets(2, 1).unwrap();
        // hopping -t (a0† a1 + a1† a0)
        let a0 = MajoranaPolynomial::<f64>::annihilation(&layout, 0);
        let a1 = MajoranaPolynomial::<f64>::annihilation(&layout, 1);
        let mut h = a0.adjoint().mul(&a1);
        h.add(&a1.adjoint().mul(&a0));
        h.scale(c(-1.3, 0.0));
        let op = h.to_operator().unwrap();
        assert_eq!(op.offset, 0.0);
        assert!(op.quart.is_empty());
        // reconstruct i sum T c c and compare
        let d = layout.dim();
        let mut back = MajoranaPolynomial::<f64>::zero(d);
        for k in 0..d {
            for l in 0..d {
                let t = op.quad.matrix()[(k, l)];
                if t != 0.0 {
                    let m = MajoranaPolynomial::majorana(d, k).mul(&MajoranaPolynomial::majorana(d, l));
                    back.add(&m.scaled(c(0.0, t)));
                }
            }
        }
        for (m, z) in h.terms() {
            assert!((back.terms()[m] - z).norm() < 1e-14, "monomial {m:?}");
        }
    }

    #[test]
    fn adjoint_involution() {
        let layout = ModeLayout::without_quartets(2, 2).unwrap();
        let mut p = MajoranaPolynomial::<f64>::creation(&layout, 0)
            .mul(&MajoranaPolynomial::creation(&layout, 1))
            .mul(&MajoranaPolynomial::annihilation(&layout, 3));
        p.scale(c(0.3, -0.7));
        let pdd = p.adjoint().adjoint();
        for (m, z) in p.terms() {
            assert!((pdd.terms()[m] - z).norm() < 1e-15);
        }
    }
}
