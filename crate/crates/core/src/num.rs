//! Scalar abstraction for the analytic routines.
//!
//! Generating-function algebra, fixed-point solvers and the edge-based ODEs are
//! written once against [`Real`] and instantiated for `f32` and `f64`. The graph
//! and simulation code is not generic and works in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar usable by the analytic modules.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Smallest root of a continuous `f` on `[lo, hi]` given `f(lo) > 0 > f(hi)`.
///
/// Plain bisection until the bracket is narrower than `tol`; returns the
/// midpoint of the final bracket.
pub(crate) fn bisect<F: Real>(mut lo: F, mut hi: F, tol: F, f: impl Fn(F) -> F) -> F {
    let two = F::lit(2.0);
    // bracket halves each step; the cap only matters for tol below resolution
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}
