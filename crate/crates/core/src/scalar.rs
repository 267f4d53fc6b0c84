//! Scalar abstraction so the valuation math runs over `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used by every model in the crate.
///
/// Tolerances are part of the scalar because a normalization check that is
/// meaningful in `f64` is unattainable in `f32`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Allowed deviation of a probability vector's total from one.
    fn normalization_tol() -> Self;
    /// Allowed deviation between a coupling's row/column sums and its marginals.
    fn marginal_tol() -> Self;
    /// Relative tolerance used to detect exact ties between conditional
    /// expectations and outcome values.
    fn tie_tol() -> Self;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for finite literals with `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn normalization_tol() -> Self {
        1e-12
    }
    fn marginal_tol() -> Self {
        1e-10
    }
    fn tie_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn normalization_tol() -> Self {
        1e-5
    }
    fn marginal_tol() -> Self {
        1e-4
    }
    fn tie_tol() -> Self {
        1e-5
    }
}

/// `true` when `a` and `b` agree to within `tol` scaled by their magnitude
/// (never less than `tol` in absolute terms).
pub(crate) fn nearly_equal<T: Scalar>(a: T, b: T, tol: T) -> bool {
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale
}
