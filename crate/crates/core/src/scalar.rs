//! Scalar abstractions shared by the numeric modules.
//!
//! Floating-point code is written against [`Real`] so it runs in `f32` or
//! `f64`; integer lattice code is written against [`Int`], which covers the
//! machine-word fast path (`i64`, `i128`, checked arithmetic) and the exact
//! fallback (`BigInt`).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{
    CheckedAdd, CheckedMul, CheckedSub, Float, FloatConst, FromPrimitive, Signed, ToPrimitive,
};

/// Floating point: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("representable literal")
    }

    /// The Euler–Mascheroni constant.
    fn euler_gamma() -> Self {
        Self::lit(0.577_215_664_901_532_9)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Signed integers with checked arithmetic.
///
/// Machine integers report overflow through `None`; `BigInt` never does.
pub trait Int:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + 'static
{
    fn to_big(&self) -> BigInt;
    fn from_big(v: &BigInt) -> Option<Self>;

    fn add_c(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub_c(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul_c(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn lit(v: i64) -> Self {
        Self::from_i64(v).expect("small literal")
    }
    /// Least non-negative residue modulo `q`.
    fn rem_u64(&self, q: u64) -> u64;
}

/// Integers whose arithmetic can never overflow.
pub trait ExactInt: Int {}

macro_rules! impl_machine_int {
    ($t:ty, $to:ident) => {
        impl Int for $t {
            fn to_big(&self) -> BigInt {
                BigInt::from(*self)
            }
            fn from_big(v: &BigInt) -> Option<Self> {
                v.$to()
            }
            fn rem_u64(&self, q: u64) -> u64 {
                (*self as i128).rem_euclid(q as i128) as u64
            }
        }
    };
}

impl_machine_int!(i64, to_i64);
impl_machine_int!(i128, to_i128);

impl Int for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn rem_u64(&self, q: u64) -> u64 {
        let r = self.mod_floor(&BigInt::from(q));
        r.to_u64().expect("residue fits u64")
    }
}

impl ExactInt for BigInt {}
