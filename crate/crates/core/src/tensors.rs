//! Antisymmetric Majorana coefficient tensors and their text formats.
//!
//! A quadratic tensor `T` enters the Hamiltonian as `i Σ_kl T_kl c_k c_l`.
//! A quartic tensor is stored in canonical form: one entry per strictly
//! increasing index tuple, whose value is the coefficient of the sorted
//! monomial `c_i c_j c_k c_l`. The fully antisymmetric tensor of the
//! conventional normalization is recovered by `expand_full` (value / 4!
//! per permutation).

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real antisymmetric matrix of quadratic Majorana couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticTensor<T: Scalar> {
    mat: DMatrix<T>,
}

impl<T: Scalar> QuadraticTensor<T> {
    /// Build from an already antisymmetric matrix; rejects defects above `1e-12`
    /// (scaled by the matrix magnitude) and then antisymmetrizes exactly.
    pub fn new(mat: DMatrix<T>) -> Result<Self> {
        let n = mat.nrows();
        if n != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: n, got: mat.ncols() });
        }
        let scale = T::one().max(mat.amax());
        let mut defect = T::zero();
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((mat[(i, j)] + mat[(j, i)]).abs());
            }
        }
        if defect > T::lit(1e-12) * scale {
            return Err(Error::NotAntisymmetric { defect: defect.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self::from_raw(mat))
    }

    /// Antisymmetrize `(A - A^T) / 2` without complaint.
    pub fn from_raw(mat: DMatrix<T>) -> Self {
        let anti = (&mat - mat.transpose()) * T::lit(0.5);
        Self { mat: anti }
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: DMatrix::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.mat
    }
}

/// Sparse canonical-order quartic tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticTensor<T: Scalar> {
    d: usize,
    entries: Vec<([usize; 4], T)>,
}

impl<T: Scalar> QuarticTensor<T> {
    pub fn empty(d: usize) -> Self {
        Self { d, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[([usize; 4], T)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Canonicalize raw monomial terms: sort each index tuple with the
    /// permutation sign and merge duplicates. Tuples with a repeated index
    /// are rejected; such monomials reduce to lower order and the caller
    /// must have normal-ordered them away.
    pub fn antisymmetrize(d: usize, raw_terms: &[([usize; 4], T)]) -> Result<Self> {
        let mut map: BTreeMap<[usize; 4], T> = BTreeMap::new();
        for &(idx, value) in raw_terms {
            for &i in &idx {
                if i >= d {
                    return Err(Error::IndexOutOfRange { index: i, dim: d });
                }
            }
            let (sorted, sign) = sort_with_sign(idx)
                .ok_or(Error::RepeatedIndex(idx[0], idx[1], idx[2], idx[3]))?;
            let signed = if sign { -value } else { value };
            *map.entry(sorted).or_insert_with(T::zero) += signed;
        }
        let entries = map.into_iter().filter(|(_, v)| *v != T::zero()).collect();
        Ok(Self { d, entries })
    }

    /// All 24 permutations of every entry, in the conventional normalization
    /// (fully antisymmetric tensor; canonical value / 4! per permutation).
    pub fn expand_full(&self) -> Vec<([usize; 4], T)> {
        let norm = T::lit(1.0 / 24.0);
        let mut out = Vec::with_capacity(24 * self.entries.len());
        for &(idx, v) in &self.entries {
            permute4(idx, |perm, odd| {
                let value = v * norm;
                out.push((perm, if odd { -value } else { value }));
            });
        }
        out
    }
}

/// Sort a 4-tuple, returning (sorted, parity is odd). `None` on repeats.
fn sort_with_sign(mut idx: [usize; 4]) -> Option<([usize; 4], bool)> {
    let mut odd = false;
    for i in 1..4 {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if idx[0] == idx[1] || idx[1] == idx[2] || idx[2] == idx[3] {
        return None;
    }
    Some((idx, odd))
}

fn permute4(idx: [usize; 4], mut f: impl FnMut([usize; 4], bool)) {
    // Heap's algorithm, tracking parity.
    let mut a = idx;
    let mut c = [0usize; 4];
    let mut odd = false;
    f(a, odd);
    let mut i = 0;
    while i < 4 {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            odd = !odd;
            f(a, odd);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Text formats. Quartic: one line per entry, "i j k l value", 0-based, value
// with 17 significant digits. Dense matrix: header line "d", then d rows of
// d whitespace-separated values.
// ---------------------------------------------------------------------------

pub fn write_quartic<T: Scalar>(tensor: &QuarticTensor<T>, w: &mut impl Write) -> Result<()> {
    for &([i, j, k, l], v) in tensor.entries() {
        writeln!(w, "{i} {j} {k} {l} {:.16e}", v.to_f64().unwrap_or(f64::NAN))?;
    }
    Ok(())
}

pub fn read_quartic<T: Scalar>(d: usize, r: &mut impl BufRead) -> Result<QuarticTensor<T>> {
    let mut raw = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse(format!("quartic line {}: expected 5 fields", lineno + 1)));
        }
        let idx: Vec<usize> = fields[..4]
            .iter()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad index on line {}", lineno + 1))))
            .collect::<Result<_>>()?;
        let value: f64 = fields[4]
            .parse()
            .map_err(|_| Error::Parse(format!("bad value on line {}", lineno + 1)))?;
        raw.push(([idx[0], idx[1], idx[2], idx[3]], T::lit(value)));
    }
    QuarticTensor::antisymmetrize(d, &raw)
}

pub fn write_dense<T: Scalar>(mat: &DMatrix<T>, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{}", mat.nrows())?;
    for i in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols())
            .map(|j| format!("{:.16e}", mat[(i, j)].to_f64().unwrap_or(f64::NAN)))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_dense<T: Scalar>(r: &mut impl BufRead) -> Result<DMatrix<T>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dense matrix file".into()))??;
    let d: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::Parse("bad dense matrix header".into()))?;
    let mut values = Vec::with_capacity(d * d);
    for line in lines {
        let line = line?;
        for field in line.split_whitespace() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse("bad dense matrix value".into()))?;
            values.push(T::lit(v));
        }
    }
    if values.len() != d * d {
        return Err(Error::Parse(format!(
            "dense matrix: expected {} values, got {}",
            d * d,
            values.len()
        )));
    }
    Ok(DMatrix::from_row_slice(d, d, &values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn already_canonical_passes_through() {
        let t = QuarticTensor::<f64>::antisymmetrize(4, &[([0, 1, 2, 3], 1.0)]).unwrap();
        assert_eq!(t.entries(), &[([0, 1, 2, 3], 1.0)]);
    }

    #[test]
    fn single_transposition_flips_sign() {
        let t = QuarticTensor::<f64>::antisymmetrize(4, &[([1, 0, 2, 3], 1.0)]).unwrap();
        assert_eq!(t.entries(), &[([0, 1, 2, 3], -1.0)]);
    }

    #[test]
    fn even_permutation_merges() {
        let t = QuarticTensor::<f64>::antisymmetrize(
            4,
            &[([0, 1, 2, 3], 0.5), ([2, 3, 0, 1], 0.5)],
        )
        .unwrap();
        assert_eq!(t.entries(), &[([0, 1, 2, 3], 1.0)]);
    }

    #[test]
    fn repeated_index_rejected() {
        let err = QuarticTensor::<f64>::antisymmetrize(4, &[([0, 1, 1, 3], 1.0)]);
        assert!(matches!(err, Err(Error::RepeatedIndex(..))));
    }

    #[test]
    fn expand_and_recanonicalize_roundtrip() {
        let t = QuarticTensor::<f64>::antisymmetrize(
            6,
            &[([0, 2, 3, 5], 0.75), ([1, 2, 4, 5], -1.25)],
        )
        .unwrap();
        let expanded = t.expand_full();
        assert_eq!(expanded.len(), 48);
        let back = QuarticTensor::antisymmetrize(6, &expanded).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn quartic_text_roundtrip() {
        let t = QuarticTensor::<f64>::antisymmetrize(
            8,
            &[([0, 1, 2, 3], 1.0 / 3.0), ([2, 4, 6, 7], -0.125)],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_quartic(&t, &mut buf).unwrap();
        let back = read_quartic::<f64>(8, &mut buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn dense_text_roundtrip() {
        let m = DMatrix::<f64>::from_fn(3, 3, |i, j| (i as f64 - j as f64) / 7.0);
        let mut buf = Vec::new();
        write_dense(&m, &mut buf).unwrap();
        let back = read_dense::<f64>(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }
}
