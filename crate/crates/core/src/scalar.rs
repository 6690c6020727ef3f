//! Scalar abstraction: the whole crate is generic over the floating-point
//! type through [`Real`]; concrete aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable for grids, fields and solvers (f32 or f64).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an f64 literal into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must be representable")
}

/// Converts the working scalar into f64 (used by serialization paths).
#[inline]
pub fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar must convert to f64")
}

/// Unit-norm tolerance that makes sense for both f32 and f64.
#[inline]
pub fn unit_tol<T: Real>() -> T {
    real::<T>(1e-14).max(T::epsilon() * real(4.0))
}
