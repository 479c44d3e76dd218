//! Exact rational scalar used for every time, work and makespan guess.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a rational number")]
pub struct ParseRatError {
    input: String,
}

impl Rat {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "rational with zero denominator");
        Rat(BigRational::new(numer.into(), denom))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Multiplies by a machine count.
    pub fn mul_usize(&self, k: usize) -> Self {
        Rat(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    /// Divides by a machine count.
    pub fn div_usize(&self, k: usize) -> Self {
        assert!(k > 0, "division by zero machine count");
        Rat(&self.0 / BigRational::from_integer(BigInt::from(k)))
    }

    /// Nearest `f64`; lossy, only for reporting and for picking search midpoints.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Rounds `value` to a dyadic rational with a relative resolution of
    /// roughly 2^-40. Returns `None` for non-finite input.
    pub fn approx_from_f64(value: f64) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        if value == 0.0 {
            return Some(Rat::zero());
        }
        let exponent = value.abs().log2().floor() as i32;
        let shift = 40 - exponent;
        let scaled = (value * 2f64.powi(shift)).round();
        let numer = BigInt::from(scaled as i128);
        Some(if shift >= 0 {
            Rat::new(numer, BigInt::one() << shift as usize)
        } else {
            Rat::from_integer(numer * (BigInt::one() << (-shift) as usize))
        })
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }
}

impl From<i64> for Rat {
    fn from(value: i64) -> Self {
        Rat::from_integer(value)
    }
}

impl From<usize> for Rat {
    fn from(value: usize) -> Self {
        Rat::from_integer(value)
    }
}

impl From<BigRational> for Rat {
    fn from(value: BigRational) -> Self {
        Rat(value)
    }
}

/// `p/q` always, including `n/1` for integers.
impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `p/q`, plain integers and decimals such as `-12.375` or `1e-3`.
/// Decimals convert exactly.
impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRatError {
            input: s.to_string(),
        };
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Rat::new(p, q));
        }
        parse_decimal(s).ok_or_else(err)
    }
}

fn parse_decimal(s: &str) -> Option<Rat> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().ok()?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rat::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rat::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Shorthand for `Rat::new(p, q)` on small literals.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(p, q)
}

/// Compares `a` with `b` as exact rationals.
pub fn cmp(a: &Rat, b: &Rat) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/7".parse::<Rat>().unwrap(), rat(3, 7));
        assert_eq!("6/14".parse::<Rat>().unwrap(), rat(3, 7));
        assert_eq!("6.01".parse::<Rat>().unwrap(), rat(601, 100));
        assert_eq!("-0.75".parse::<Rat>().unwrap(), rat(-3, 4));
        assert_eq!("1e-3".parse::<Rat>().unwrap(), rat(1, 1000));
        assert_eq!("2.5E2".parse::<Rat>().unwrap(), rat(250, 1));
        assert_eq!("12".parse::<Rat>().unwrap(), rat(12, 1));
        assert_eq!(".5".parse::<Rat>().unwrap(), rat(1, 2));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("abc".parse::<Rat>().is_err());
        assert!("".parse::<Rat>().is_err());
        assert!("1.2.3".parse::<Rat>().is_err());
    }

    #[test]
    fn display_is_always_p_over_q() {
        assert_eq!(rat(6, 14).to_string(), "3/7");
        assert_eq!(rat(4, 2).to_string(), "2/1");
        assert_eq!(rat(-1, 3).to_string(), "-1/3");
    }

    #[test]
    fn denominator_stays_positive() {
        let r = Rat::new(3, -6);
        assert_eq!(r, rat(-1, 2));
        assert!(r.denom() > &BigInt::zero());
    }

    #[test]
    fn dyadic_approximation_is_close() {
        let r = Rat::approx_from_f64(std::f64::consts::PI).unwrap();
        assert!((r.to_f64() - std::f64::consts::PI).abs() < 1e-11);
        let tiny = Rat::approx_from_f64(3.5e-9).unwrap();
        assert!((tiny.to_f64() / 3.5e-9 - 1.0).abs() < 1e-11);
        assert!(Rat::approx_from_f64(f64::INFINITY).is_none());
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(p, q)| Rat::new(p, q))
    }

    proptest! {
        #[test]
        fn add_then_sub_is_identity(a in arb_rat(), b in arb_rat()) {
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn text_round_trip(a in arb_rat()) {
            prop_assert_eq!(a.to_string().parse::<Rat>().unwrap(), a);
        }

        #[test]
        fn gcd_reduced(p in any::<i32>(), q in 1i32..i32::MAX) {
            let r = Rat::new(p, q);
            let g = num_integer::Integer::gcd(r.numer(), r.denom());
            prop_assert!(g.is_one() || r.is_zero());
        }
    }
}
