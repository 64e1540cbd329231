//! Scalar abstraction for the numeric core.
//!
//! Everything numeric in this crate is generic over [`Scalar`] so the same
//! code runs in `f32` or `f64`. File formats and the CLI pin `f64`; the
//! crate root exposes concrete aliases for that case.

/// Floating-point scalar usable throughout the numeric core.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssignOps
    + std::iter::Sum<Self>
    + std::fmt::Debug
    + std::fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` into the scalar type, panicking only on values no
/// float type can represent (never happens for finite inputs).
#[inline]
pub fn cast<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 value representable in scalar type")
}
