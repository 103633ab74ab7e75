//! Scalar abstraction for the numeric core.

use nalgebra::RealField;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Real scalar type the core math is generic over.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Num + Copy {
    /// Orthogonality defect above which matrices are re-orthonormalized.
    fn orth_tol() -> Self;

    /// Convert an `f64` literal, panicking only for non-representable values.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }
}

impl Scalar for f64 {
    fn orth_tol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn orth_tol() -> Self {
        1e-4
    }
}
