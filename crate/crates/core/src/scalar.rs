//! Real scalar types usable as matrix entries.
//!
//! Everything in the crate is generic over [`Real`], implemented for `f64`
//! and for [`DoubleF64`], an unevaluated sum `hi + lo` of two doubles
//! (about 32 significant decimal digits). The extended type is used where
//! long operator words produce entries of order 10^5 and an absolute residual
//! tolerance of 1e-10 sits within a few ulps of `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};

/// Scalar field for the real and imaginary parts of operator entries.
pub trait Real:
    nalgebra::Scalar
    + Copy
    + PartialOrd
    + Send
    + Sync
    + Num
    + num_traits::NumAssign
    + Neg<Output = Self>
{
    /// Short human-readable name, echoed in reports.
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

impl Real for f64 {
    const NAME: &'static str = "double";

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// Double-double number: the exact sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleF64 {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

// requires |a| >= |b|
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleF64 {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn trunc(self) -> Self {
        let hi = self.hi.trunc();
        if hi != self.hi {
            Self::new(hi)
        } else {
            Self::renorm(hi, self.lo.trunc())
        }
    }
}

impl fmt::Debug for DoubleF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleF64({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi, f)
    }
}

impl PartialOrd for DoubleF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleF64 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleF64 {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for DoubleF64 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleF64 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        Self::renorm(p, e)
    }
}

impl Div for DoubleF64 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Self::new(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::new(q2);
        let q3 = r.hi / rhs.hi;
        Self::renorm(q1, q2) + Self::new(q3)
    }
}

impl Rem for DoubleF64 {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        self - rhs * (self / rhs).trunc()
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DoubleF64 {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Zero for DoubleF64 {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleF64 {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleF64 {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Self::new)
    }
}

impl Real for DoubleF64 {
    const NAME: &'static str = "double-double";

    #[inline]
    fn from_f64(x: f64) -> Self {
        Self::new(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::new(f64::NAN) };
        }
        // one Newton step on the f64 root
        let q = self.hi.sqrt();
        let (p, e) = two_prod(q, q);
        let resid = self - Self::renorm(p, e);
        Self::renorm(q, resid.hi * (0.5 / q))
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for DoubleF64 {
    fn from(x: f64) -> Self {
        Self::new(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captures_addition_error() {
        let a = DoubleF64::new(1.0) + DoubleF64::new(1e-20);
        assert_eq!(a.hi(), 1.0);
        assert_eq!(a.lo(), 1e-20);
        let b = a - DoubleF64::new(1.0);
        assert_eq!(b.to_f64(), 1e-20);
    }

    #[test]
    fn product_is_exact_for_two_doubles() {
        let x = 1.0 + f64::EPSILON;
        let p = DoubleF64::new(x) * DoubleF64::new(x);
        // (1 + e)^2 = 1 + 2e + e^2
        let back = p - DoubleF64::new(1.0) - DoubleF64::new(2.0 * f64::EPSILON);
        assert_eq!(back.to_f64(), f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn sqrt_squares_back() {
        for v in [2.0, 3.0, 47.5, 1e5 + 0.25] {
            let x = DoubleF64::new(v);
            let s = Real::sqrt(x);
            let err = (s * s - x).to_f64().abs();
            assert!(err <= v * 1e-30, "{v}: {err}");
        }
        assert_eq!(Real::sqrt(DoubleF64::ZERO), DoubleF64::ZERO);
        assert!(Real::sqrt(DoubleF64::new(-1.0)).to_f64().is_nan());
    }

    #[test]
    fn division_and_remainder() {
        let third = DoubleF64::ONE / DoubleF64::new(3.0);
        let err = (third * DoubleF64::new(3.0) - DoubleF64::ONE).to_f64().abs();
        assert!(err < 1e-31);
        let r = DoubleF64::new(7.5) % DoubleF64::new(2.0);
        assert_eq!(r.to_f64(), 1.5);
    }

    #[test]
    fn ordering_uses_low_word() {
        let a = DoubleF64::new(1.0) + DoubleF64::new(1e-20);
        assert!(a > DoubleF64::ONE);
        assert!(-a < -DoubleF64::ONE);
        assert_eq!(Real::abs(-a), a);
    }
}
