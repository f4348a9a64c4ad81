//! Coefficient rings.
//!
//! Every matrix routine in [`crate::linalg`] is written against these traits so
//! the same elimination code runs over arbitrary-precision integers, machine
//! integers (for fast desk-scale property sweeps) and exact rationals.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring with exact arithmetic.
pub trait Ring:
    Clone + Debug + Display + PartialEq + Zero + One + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Converts an arbitrary-precision integer, `None` if it does not fit.
    fn from_bigint(v: &BigInt) -> Option<Self>;

    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() + (-other.clone())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
}

/// A Euclidean domain: division with remainder and a size comparison used for
/// pivot selection.
pub trait EuclideanRing: Ring {
    /// Compares Euclidean sizes of two nonzero elements.
    fn size_cmp(&self, other: &Self) -> Ordering;

    /// `(q, r)` with `self = q * d + r` and `r` zero or smaller than `d`.
    fn div_rem_euclid(&self, d: &Self) -> (Self, Self);

    /// A unit `u` such that `u * self` is the canonical associate
    /// (non-negative for integers, one for nonzero field elements).
    fn normalizing_unit(&self) -> Self;

    fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem_euclid(self).1.is_zero()
    }

    fn is_unit(&self) -> bool;
}

/// A field.
pub trait Field: EuclideanRing {
    fn inv(&self) -> Self;
}

/// Integer-like rings that embed into the arbitrary-precision integers.
pub trait Integral: EuclideanRing + Ord {
    fn to_bigint(&self) -> BigInt;
}

macro_rules! primitive_integer {
    ($($t:ty),*) => {$(
        impl Ring for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_bigint(v: &BigInt) -> Option<Self> {
                v.to_i128().and_then(|x| <$t>::try_from(x).ok())
            }
        }

        impl EuclideanRing for $t {
            fn size_cmp(&self, other: &Self) -> Ordering {
                self.unsigned_abs().cmp(&other.unsigned_abs())
            }
            fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
                let (q, r) = Integer::div_rem(self, d);
                // truncated division already gives |r| < |d|
                (q, r)
            }
            fn normalizing_unit(&self) -> Self {
                if *self < 0 { -1 } else { 1 }
            }
            fn is_unit(&self) -> bool {
                *self == 1 || *self == -1
            }
        }

        impl Integral for $t {
            fn to_bigint(&self) -> BigInt {
                BigInt::from(*self)
            }
        }
    )*};
}

primitive_integer!(i64, i128);

impl Ring for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
}

impl EuclideanRing for BigInt {
    fn size_cmp(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        Integer::div_rem(self, d)
    }
    fn normalizing_unit(&self) -> Self {
        if self.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
}

impl Integral for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

impl<T> Ring for Ratio<T>
where
    T: Clone + Integer + Signed + Debug + Display + Send + Sync + 'static + Ring,
{
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(T::from_i64(v))
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        T::from_bigint(v).map(Ratio::from_integer)
    }
}

impl<T> EuclideanRing for Ratio<T>
where
    T: Clone + Integer + Signed + Debug + Display + Send + Sync + 'static + Ring,
{
    fn size_cmp(&self, _other: &Self) -> Ordering {
        Ordering::Equal
    }
    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        (self.clone() / d.clone(), Self::zero())
    }
    fn normalizing_unit(&self) -> Self {
        if self.is_zero() {
            Self::one()
        } else {
            self.recip()
        }
    }
    fn is_unit(&self) -> bool {
        !self.is_zero()
    }
}

impl<T> Field for Ratio<T>
where
    T: Clone + Integer + Signed + Debug + Display + Send + Sync + 'static + Ring,
{
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// Converts between rings through the integers; panics if the value does not
/// fit the target, which only happens when a machine-integer ring overflows.
pub fn convert<A: Integral, B: Ring>(a: &A) -> B {
    B::from_bigint(&a.to_bigint()).expect("integer does not fit the target ring")
}
