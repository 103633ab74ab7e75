//! Numerically exact steps on the orthogonal group.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense orthogonal matrix with a maintained defect bound.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix<T: Scalar> {
    mat: DMatrix<T>,
}

impl<T: Scalar> OrthogonalMatrix<T> {
    pub fn identity(d: usize) -> Self {
        Self { mat: DMatrix::identity(d, d) }
    }

    /// Accepts a matrix that is orthogonal up to roundoff. Defects above the
    /// scalar's tolerance are repaired by a sign-fixed QR; defects above
    /// `1e-6` are rejected.
    pub fn new(mat: DMatrix<T>) -> Result<Self> {
        let defect = defect_of(&mat);
        if defect > T::lit(1e-6) {
            return Err(Error::NotOrthogonal { defect: defect.to_f64().unwrap_or(f64::NAN) });
        }
        let mut o = Self { mat };
        if defect > T::orth_tol() {
            o.reorthonormalize();
        }
        Ok(o)
    }

    /// Exponential of a random-free antisymmetric generator.
    pub fn from_generator(gamma: &DMatrix<T>) -> Result<Self> {
        check_antisymmetric(gamma)?;
        Self::new(gamma.exp())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.mat
    }

    /// `||O O^T - I||_F`.
    pub fn defect(&self) -> T {
        defect_of(&self.mat)
    }

    /// Left-multiply by `exp(h dt)`. `h` must be antisymmetric within `1e-12`.
    pub fn step(&self, h: &DMatrix<T>, dt: T) -> Result<Self> {
        if h.nrows() != self.dim() || h.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: h.nrows() });
        }
        check_antisymmetric(h)?;
        let rot = (h * dt).exp();
        let mut out = Self { mat: rot * &self.mat };
        if out.defect() > T::orth_tol() {
            out.reorthonormalize();
        }
        Ok(out)
    }

    /// Nearest-orthogonal repair via QR with the R diagonal forced positive.
    fn reorthonormalize(&mut self) {
        let qr = self.mat.clone().qr();
        let r = qr.r();
        let mut q = qr.q();
        for j in 0..q.ncols() {
            if r[(j, j)] < T::zero() {
                for i in 0..q.nrows() {
                    q[(i, j)] = -q[(i, j)];
                }
            }
        }
        self.mat = q;
    }
}

pub fn defect_of<T: Scalar>(mat: &DMatrix<T>) -> T {
    let d = mat.nrows();
    (mat * mat.transpose() - DMatrix::<T>::identity(d, d)).norm()
}

pub fn check_antisymmetric<T: Scalar>(h: &DMatrix<T>) -> Result<()> {
    let scale = T::one().max(h.amax());
    let mut defect = T::zero();
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            defect = defect.max((h[(i, j)] + h[(j, i)]).abs());
        }
    }
    if defect > T::lit(1e-12) * scale {
        return Err(Error::NotAntisymmetric { defect: defect.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

/// Principal antisymmetric logarithm of a special orthogonal matrix, via the
/// real Schur form (block-diagonal rotations for orthogonal input).
pub fn orthogonal_log<T: Scalar>(o: &OrthogonalMatrix<T>) -> Result<DMatrix<T>> {
    let d = o.dim();
    let (q, s) = o.matrix().clone().schur().unpack();
    let mut log_s = DMatrix::<T>::zeros(d, d);
    let tol = T::lit(1e-8);
    let mut minus_ones: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < d {
        let two_by_two = i + 1 < d && s[(i + 1, i)].abs() > tol;
        if two_by_two {
            // rotation block [[cos, -sin], [sin, cos]]
            let angle = s[(i + 1, i)].atan2(s[(i, i)]);
            log_s[(i, i + 1)] = -angle;
            log_s[(i + 1, i)] = angle;
            i += 2;
        } else {
            if s[(i, i)] < T::zero() {
                minus_ones.push(i);
            }
            i += 1;
        }
    }
    if minus_ones.len() % 2 != 0 {
        return Err(Error::Numerical(
            "orthogonal matrix has determinant -1; no antisymmetric logarithm".into(),
        ));
    }
    // -1 eigenvalue pairs form invariant planes; give each pair a pi rotation.
    for pair in minus_ones.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        log_s[(a, b)] = -T::pi();
        log_s[(b, a)] = T::pi();
    }
    let gamma = &q * log_s * q.transpose();
    Ok((&gamma - gamma.transpose()) * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_antisymmetric(d: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let raw = DMatrix::<f64>::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        (&raw - raw.transpose()) * 0.5
    }

    #[test]
    fn identity_flow_is_identity() {
        let o = OrthogonalMatrix::<f64>::identity(6);
        let h = DMatrix::zeros(6, 6);
        let stepped = o.step(&h, 0.37).unwrap();
        assert_eq!(stepped.matrix(), o.matrix());
    }

    #[test]
    fn planar_generator_gives_rotation_blocks() {
        let theta: f64 = 0.4;
        let mut h = DMatrix::<f64>::zeros(4, 4);
        h[(0, 1)] = theta;
        h[(1, 0)] = -theta;
        h[(2, 3)] = theta;
        h[(3, 2)] = -theta;
        let o = OrthogonalMatrix::identity(4).step(&h, 1.0).unwrap();
        for base in [0, 2] {
            assert!((o.matrix()[(base, base)] - theta.cos()).abs() < 1e-14);
            assert!((o.matrix()[(base, base + 1)] - theta.sin()).abs() < 1e-14);
            assert!((o.matrix()[(base + 1, base)] + theta.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn step_preserves_orthogonality() {
        let mut rng = StdRng::seed_from_u64(7);
        let mut o = OrthogonalMatrix::<f64>::from_generator(&random_antisymmetric(10, &mut rng)).unwrap();
        for _ in 0..50 {
            let h = random_antisymmetric(10, &mut rng);
            o = o.step(&h, 1e-3).unwrap();
            assert!(o.defect() <= 1e-10);
        }
    }

    #[test]
    fn defect_examples() {
        let o = OrthogonalMatrix::<f64>::identity(5);
        assert!(o.defect() < 1e-15);
        let twice = DMatrix::<f64>::identity(5, 5) * 2.0;
        assert!((defect_of(&twice) - 3.0 * 5.0_f64.sqrt()).abs() < 1e-12);
        let mut rng = StdRng::seed_from_u64(3);
        let e = random_antisymmetric(8, &mut rng).exp();
        assert!(defect_of(&e) <= 1e-12);
    }

    #[test]
    fn non_antisymmetric_rejected() {
        let o = OrthogonalMatrix::<f64>::identity(3);
        let mut h = DMatrix::zeros(3, 3);
        h[(0, 1)] = 1.0;
        assert!(o.step(&h, 0.1).is_err());
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let gamma = random_antisymmetric(8, &mut rng);
            let o = OrthogonalMatrix::from_generator(&gamma).unwrap();
            let log = orthogonal_log(&o).unwrap();
            let back = OrthogonalMatrix::from_generator(&log).unwrap();
            assert!((back.matrix() - o.matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn log_handles_pi_rotations() {
        let mut s = DMatrix::<f64>::identity(4, 4);
        s[(0, 0)] = -1.0;
        s[(1, 1)] = -1.0;
        let o = OrthogonalMatrix::new(s).unwrap();
        let log = orthogonal_log(&o).unwrap();
        let back = OrthogonalMatrix::from_generator(&log).unwrap();
        assert!((back.matrix() - o.matrix()).norm() < 1e-9);
    }
}
