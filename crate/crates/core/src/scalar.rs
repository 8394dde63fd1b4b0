//! Scalar abstraction shared by every numerical routine.
//!
//! Two instantiations exist: hardware `f64` and, with the `extended` feature,
//! [`Ext`], an MPFR-backed float whose working precision is set by
//! [`set_extended_digits`]. Generic code is written against [`Real`] and only
//! ever clones values, so the non-`Copy` extended type is a drop-in.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn pi() -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn abs(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn is_finite(&self) -> bool;
    /// Significant decimal digits carried by this instantiation.
    fn digits() -> u32;
    /// `|φ|²` threshold below which a point counts as sitting on a node.
    fn singularity_floor() -> Self;
    /// Decimal rendering with [`Real::digits`] significant digits.
    fn to_sig_string(&self) -> String;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
    /// Exact rational `p/q` evaluated at working precision.
    fn ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }
    fn sin_cos(&self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self.clone();
        }
        acc
    }
    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn digits() -> u32 {
        15
    }
    fn singularity_floor() -> Self {
        1e-30
    }
    fn to_sig_string(&self) -> String {
        format!("{:.16e}", self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
}

#[cfg(feature = "extended")]
pub use ext::{extended_digits, set_extended_digits, Ext};

#[cfg(feature = "extended")]
mod ext {
    use super::Real;
    use rug::float::Constant;
    use rug::ops::Pow;
    use rug::Float;
    use std::cmp::Ordering;
    use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
    use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

    static DIGITS: AtomicU32 = AtomicU32::new(50);

    /// Sets the decimal precision used for every `Ext` created afterwards.
    /// Values already alive keep their precision.
    pub fn set_extended_digits(digits: u32) {
        DIGITS.store(digits.max(16), AtomicOrdering::SeqCst);
    }

    pub fn extended_digits() -> u32 {
        DIGITS.load(AtomicOrdering::SeqCst)
    }

    fn bits() -> u32 {
        // log2(10) = 3.3219..., plus guard bits
        (extended_digits() as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    #[derive(Clone, Debug)]
    pub struct Ext(pub Float);

    impl Ext {
        pub fn inner(&self) -> &Float {
            &self.0
        }
    }

    impl PartialEq for Ext {
        fn eq(&self, other: &Self) -> bool {
            self.0 == other.0
        }
    }

    impl PartialOrd for Ext {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            self.0.partial_cmp(&other.0)
        }
    }

    macro_rules! bin_op {
        ($tr:ident, $f:ident, $atr:ident, $af:ident) => {
            impl $tr for Ext {
                type Output = Ext;
                fn $f(self, rhs: Ext) -> Ext {
                    Ext($tr::$f(self.0, rhs.0))
                }
            }
            impl $tr<f64> for Ext {
                type Output = Ext;
                fn $f(self, rhs: f64) -> Ext {
                    Ext($tr::$f(self.0, rhs))
                }
            }
            impl $atr for Ext {
                fn $af(&mut self, rhs: Ext) {
                    $atr::$af(&mut self.0, rhs.0)
                }
            }
        };
    }

    bin_op!(Add, add, AddAssign, add_assign);
    bin_op!(Sub, sub, SubAssign, sub_assign);
    bin_op!(Mul, mul, MulAssign, mul_assign);
    bin_op!(Div, div, DivAssign, div_assign);

    impl Neg for Ext {
        type Output = Ext;
        fn neg(self) -> Ext {
            Ext(-self.0)
        }
    }

    impl Real for Ext {
        fn from_f64(x: f64) -> Self {
            Ext(Float::with_val(bits(), x))
        }
        fn from_i64(n: i64) -> Self {
            Ext(Float::with_val(bits(), n))
        }
        fn to_f64(&self) -> f64 {
            self.0.to_f64()
        }
        fn pi() -> Self {
            Ext(Float::with_val(bits(), Constant::Pi))
        }
        fn sqrt(&self) -> Self {
            Ext(self.0.clone().sqrt())
        }
        fn sin(&self) -> Self {
            Ext(self.0.clone().sin())
        }
        fn cos(&self) -> Self {
            Ext(self.0.clone().cos())
        }
        fn sin_cos(&self) -> (Self, Self) {
            let (s, c) = self.0.clone().sin_cos(Float::new(self.0.prec()));
            (Ext(s), Ext(c))
        }
        fn exp(&self) -> Self {
            Ext(self.0.clone().exp())
        }
        fn ln(&self) -> Self {
            Ext(self.0.clone().ln())
        }
        fn abs(&self) -> Self {
            Ext(self.0.clone().abs())
        }
        fn atan2(&self, x: &Self) -> Self {
            Ext(self.0.clone().atan2(&x.0))
        }
        fn is_finite(&self) -> bool {
            self.0.is_finite()
        }
        fn digits() -> u32 {
            extended_digits()
        }
        fn singularity_floor() -> Self {
            let exponent = -2 * extended_digits() as i32 + 10;
            Ext(Float::with_val(bits(), 10).pow(exponent))
        }
        fn to_sig_string(&self) -> String {
            format!("{:.*e}", extended_digits() as usize - 1, self.0)
        }
    }
}

/// Complex number over any [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Complex<R> {
    pub fn new(re: R, im: R) -> Self {
        Self { re, im }
    }
    pub fn zero() -> Self {
        Self::new(R::zero(), R::zero())
    }
    pub fn from_real(re: R) -> Self {
        Self::new(re, R::zero())
    }
    /// `e^{iθ}`
    pub fn cis(theta: &R) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }
    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
    pub fn abs(&self) -> R {
        self.norm_sqr().sqrt()
    }
    pub fn scale(&self, s: &R) -> Self {
        Self::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }
    pub fn exp(&self) -> Self {
        Complex::cis(&self.im).scale(&self.re.exp())
    }
    pub fn to_f64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> Add for Complex<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<R: Real> Sub for Complex<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<R: Real> Mul for Complex<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl<R: Real> Div for Complex<R> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let d = rhs.norm_sqr();
        let num = self * rhs.conj();
        Self::new(num.re / d.clone(), num.im / d)
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<R: Real> AddAssign for Complex<R> {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

pub type C64 = Complex<f64>;

pub fn norm<R: Real>(v: &[R]) -> R {
    v.iter()
        .fold(R::zero(), |acc, x| acc + x.clone() * x.clone())
        .sqrt()
}

pub fn dist<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter()
        .zip(b)
        .fold(R::zero(), |acc, (x, y)| {
            let d = x.clone() - y.clone();
            acc + d.clone() * d
        })
        .sqrt()
}

pub fn to_f64_vec<R: Real>(v: &[R]) -> Vec<f64> {
    v.iter().map(Real::to_f64).collect()
}

pub fn from_f64_vec<R: Real>(v: &[f64]) -> Vec<R> {
    v.iter().map(|&x| R::from_f64(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = C64::new(1.5, -0.25);
        let b = C64::new(-0.75, 2.0);
        let q = (a.clone() * b.clone()) / b;
        assert!((q.re - a.re).abs() < 1e-15 && (q.im - a.im).abs() < 1e-15);
    }

    #[test]
    fn cis_has_unit_modulus() {
        assert!((C64::cis(&0.7).abs() - 1.0).abs() < 1e-15);
    }

    #[cfg(feature = "extended")]
    #[test]
    fn extended_carries_fifty_digits() {
        set_extended_digits(50);
        let two = Ext::from_f64(2.0);
        let r = two.sqrt();
        let back = r.clone() * r - 2.0;
        assert!(back.abs().to_f64() < 1e-50);
        assert!(Ext::singularity_floor().to_f64() < 1e-80);
        let s = Ext::ratio(629, 676).to_sig_string();
        assert!(
            s.starts_with("9.30473372781065088757396449704142011834319526627"),
            "{s}"
        );
        assert!(
            s.len() > 50 || s.starts_with("9.3047337278106508875739644970414201183431952662722e-1")
        );
    }
}
