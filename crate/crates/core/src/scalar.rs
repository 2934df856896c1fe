//! A small numeric tower shared by every measure and beta computation.
//!
//! Values are exact rationals, exact elements `a + b√D` of a real quadratic
//! field, or binary big-floats carrying an explicit precision. Mixed
//! arithmetic promotes rational → quadratic → big-float; comparisons between
//! exact values are exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_float::ops::SquareRoot;
use dashu_float::round::mode::Zero as RoundZero;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Precision used when two quadratic values from different fields meet.
pub const MIXED_FIELD_PRECISION: usize = 256;

type Float = FBig<RoundZero, 2>;

/// `a + b·√d` with rational `a`, `b` and square-free `d > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl Quadratic {
    /// Builds `a + b√d`, pulling square factors out of `d`. Returns a rational
    /// when the radicand turns out to be a perfect square.
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Result<ExactScalar> {
        if d.sign() != Sign::Plus {
            return Err(Error::InvalidArgument(format!("radicand {d} must be positive")));
        }
        let (f, core) = square_free_split(&d);
        let b = b * BigRational::from_integer(f);
        if core.is_one() {
            return Ok(ExactScalar::Rational(a + b));
        }
        Ok(ExactScalar::Quadratic(Quadratic { a, b, d: core }).normalized())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_coefficient(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    fn lift(r: &BigRational, d: &BigInt) -> Quadratic {
        Quadratic {
            a: r.clone(),
            b: BigRational::zero(),
            d: d.clone(),
        }
    }

    fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal || sa == sb {
            return sa;
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // opposite signs: |a| vs |b|√d, never equal since d is not a square
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(self.d.clone());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        let q = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&q / self.a.denom());
        let r = self.b.numer() * (&q / self.b.denom());
        let r2d = &r * &r * &self.d;
        let root: BigInt = r2d.sqrt();
        let m = if r.sign() == Sign::Minus {
            -(root + BigInt::one())
        } else {
            root
        };
        // r√d lies strictly inside (m, m+1), so the floor is that of (p+m)/q
        (p + m).div_floor(&q)
    }

    fn to_float(&self, precision: usize) -> Float {
        let d = int_to_float(&self.d, precision + 16).sqrt();
        let v = rational_to_float(&self.a, precision + 16) + rational_to_float(&self.b, precision + 16) * d;
        v.with_precision(precision).value()
    }

    fn mul(&self, o: &Quadratic) -> Quadratic {
        let d = BigRational::from_integer(self.d.clone());
        Quadratic {
            a: &self.a * &o.a + &self.b * &o.b * d,
            b: &self.a * &o.b + &self.b * &o.a,
            d: self.d.clone(),
        }
    }

    fn recip(&self) -> Quadratic {
        let norm = &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone());
        Quadratic {
            a: &self.a / &norm,
            b: -&self.b / &norm,
            d: self.d.clone(),
        }
    }
}

/// Binary floating point value with an explicit precision in bits.
#[derive(Clone, Debug)]
pub struct BigFloat(Float);

impl BigFloat {
    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn from_rational(r: &BigRational, precision: usize) -> BigFloat {
        BigFloat(rational_to_float(r, precision))
    }

    fn to_rational(&self) -> BigRational {
        let (sig, exp) = self.0.repr().clone().into_parts();
        let sig = ibig_to_bigint(&sig);
        if exp >= 0 {
            BigRational::from_integer(sig << (exp as usize))
        } else {
            BigRational::new(sig, BigInt::one() << ((-exp) as usize))
        }
    }

    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }
}

/// The shared numeric type.
#[derive(Clone, Debug)]
pub enum ExactScalar {
    Rational(BigRational),
    Quadratic(Quadratic),
    Float(BigFloat),
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        ExactScalar::Rational(BigRational::from_integer(n))
    }

    /// `n/d`; panics if `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        ExactScalar::Rational(BigRational::new(n.into(), d.into()))
    }

    /// `a + b√d` with integer coefficients over a common denominator `den`.
    pub fn quadratic(a: i64, b: i64, d: i64, den: i64) -> Result<Self> {
        Quadratic::new(
            BigRational::new(a.into(), den.into()),
            BigRational::new(b.into(), den.into()),
            d.into(),
        )
    }

    pub fn float_from_str(decimal: &str, precision: usize) -> Result<Self> {
        if precision < 2 {
            return Err(Error::Parse(format!("precision {precision} too small")));
        }
        let r = parse_rational(decimal)?;
        Ok(ExactScalar::Float(BigFloat::from_rational(&r, precision)))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, ExactScalar::Float(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Float precision, if this value is a big-float.
    pub fn precision(&self) -> Option<usize> {
        match self {
            ExactScalar::Float(f) => Some(f.precision()),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(r) => r.is_zero(),
            ExactScalar::Quadratic(q) => q.a.is_zero() && q.b.is_zero(),
            ExactScalar::Float(f) => f.is_zero(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            ExactScalar::Rational(r) => r.cmp(&BigRational::zero()),
            ExactScalar::Quadratic(q) => q.signum(),
            ExactScalar::Float(f) => match f.0.repr().sign() {
                _ if f.is_zero() => Ordering::Equal,
                dashu_int::Sign::Positive => Ordering::Greater,
                dashu_int::Sign::Negative => Ordering::Less,
            },
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> ExactScalar {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            ExactScalar::Rational(r) => r.floor().to_integer(),
            ExactScalar::Quadratic(q) => q.floor(),
            ExactScalar::Float(f) => ibig_to_bigint(&f.0.floor().to_int().value()),
        }
    }

    /// Fractional part `x - floor(x)`.
    pub fn fract(&self) -> ExactScalar {
        self - &ExactScalar::from_bigint(self.floor())
    }

    pub fn recip(&self) -> ExactScalar {
        match self {
            ExactScalar::Rational(r) => ExactScalar::Rational(r.recip()),
            ExactScalar::Quadratic(q) => ExactScalar::Quadratic(q.recip()).normalized(),
            ExactScalar::Float(f) => {
                let one = Float::ONE.with_precision(f.precision()).value();
                ExactScalar::Float(BigFloat(one / &f.0))
            }
        }
    }

    pub fn pow(&self, mut e: u32) -> ExactScalar {
        let mut base = self.clone();
        let mut acc = match self {
            ExactScalar::Float(f) => ExactScalar::Float(BigFloat(Float::ONE.with_precision(f.precision()).value())),
            _ => ExactScalar::one(),
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactScalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactScalar::Quadratic(q) => q.to_float(80).to_f64().value(),
            ExactScalar::Float(f) => f.0.to_f64().value(),
        }
    }

    /// Converts to a big-float of the given precision.
    pub fn to_float(&self, precision: usize) -> ExactScalar {
        ExactScalar::Float(BigFloat(self.float_repr(precision)))
    }

    /// Exact rational value of a rational or big-float (big-floats are dyadic).
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            ExactScalar::Rational(r) => Some(r.clone()),
            ExactScalar::Quadratic(_) => None,
            ExactScalar::Float(f) => Some(f.to_rational()),
        }
    }

    fn float_repr(&self, precision: usize) -> Float {
        match self {
            ExactScalar::Rational(r) => rational_to_float(r, precision),
            ExactScalar::Quadratic(q) => q.to_float(precision),
            ExactScalar::Float(f) => f.0.clone().with_precision(precision).value(),
        }
    }

    fn normalized(self) -> ExactScalar {
        match self {
            ExactScalar::Quadratic(q) if q.b.is_zero() => ExactScalar::Rational(q.a),
            other => other,
        }
    }

    fn combine(
        &self,
        rhs: &ExactScalar,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        quad: impl Fn(&Quadratic, &Quadratic) -> Quadratic,
        float: impl Fn(&Float, &Float) -> Float,
    ) -> ExactScalar {
        use ExactScalar::*;
        match (self, rhs) {
            (Rational(x), Rational(y)) => Rational(rat(x, y)),
            (Quadratic(x), Quadratic(y)) if x.d == y.d => Quadratic(quad(x, y)).normalized(),
            (Quadratic(x), Rational(y)) => Quadratic(quad(x, &self::Quadratic::lift(y, &x.d))).normalized(),
            (Rational(x), Quadratic(y)) => Quadratic(quad(&self::Quadratic::lift(x, &y.d), y)).normalized(),
            _ => {
                let p = match (self.precision(), rhs.precision()) {
                    (Some(a), Some(b)) => a.max(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => MIXED_FIELD_PRECISION,
                };
                Float(BigFloat(float(&self.float_repr(p), &rhs.float_repr(p))))
            }
        }
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self - other).signum())
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        ExactScalar::Rational(r)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $rat:expr, $quad:expr, $float:expr) => {
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                self.combine(rhs, $rat, $quad, $float)
            }
        }
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(
    Add,
    add,
    |x, y| x + y,
    |x, y| Quadratic {
        a: &x.a + &y.a,
        b: &x.b + &y.b,
        d: x.d.clone()
    },
    |x, y| x + y
);
forward_binop!(
    Sub,
    sub,
    |x, y| x - y,
    |x, y| Quadratic {
        a: &x.a - &y.a,
        b: &x.b - &y.b,
        d: x.d.clone()
    },
    |x, y| x - y
);
forward_binop!(Mul, mul, |x, y| x * y, |x, y| x.mul(y), |x, y| x * y);
forward_binop!(Div, div, |x, y| x / y, |x, y| x.mul(&y.recip()), |x, y| x / y);

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match self {
            ExactScalar::Rational(r) => ExactScalar::Rational(-r),
            ExactScalar::Quadratic(q) => ExactScalar::Quadratic(Quadratic {
                a: -&q.a,
                b: -&q.b,
                d: q.d.clone(),
            }),
            ExactScalar::Float(f) => ExactScalar::Float(BigFloat(-f.0.clone())),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| acc + x)
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExactScalar {
    /// Canonical text: `n`, `n/d`, `a+b*sqrt(D)`, or `<decimal>@<bits>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(r) => fmt_rational(r, f),
            ExactScalar::Quadratic(q) => {
                if !q.a.is_zero() {
                    fmt_rational(&q.a, f)?;
                    if q.b.is_positive() {
                        write!(f, "+")?;
                    }
                }
                fmt_rational(&q.b, f)?;
                write!(f, "*sqrt({})", q.d)
            }
            ExactScalar::Float(x) => write!(f, "{}@{}", x.0.to_decimal().value(), x.precision()),
        }
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((dec, bits)) = s.split_once('@') {
            let bits: usize = bits
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad precision in {s:?}")))?;
            return ExactScalar::float_from_str(dec, bits);
        }
        if let Some(idx) = s.find("sqrt(") {
            return parse_quadratic(s, idx);
        }
        parse_rational(s).map(ExactScalar::Rational)
    }
}

fn parse_quadratic(s: &str, idx: usize) -> Result<ExactScalar> {
    let bad = || Error::Parse(format!("bad quadratic literal {s:?}"));
    let radicand = s[idx + 5..].strip_suffix(')').ok_or_else(bad)?;
    let d: BigInt = radicand.trim().parse().map_err(|_| bad())?;
    let front = s[..idx].trim_end().trim_end_matches('*').trim_end();
    let bytes = front.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (a_str, b_str) = match split {
        Some(i) => (&front[..i], &front[i..]),
        None => ("", front),
    };
    let a = if a_str.is_empty() {
        BigRational::zero()
    } else {
        parse_rational(a_str)?
    };
    let b = match b_str.trim() {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        t => parse_rational(t.strip_prefix('+').unwrap_or(t))?,
    };
    Quadratic::new(a, b, d)
}

/// Parses integers, fractions `a/b` and decimals with optional exponent.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad number {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let digits = digits / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Returns `(f, c)` with `n = f²·c` and `c` square-free.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut f = BigInt::one();
    let mut core = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            f *= num_traits::pow(p.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                core *= &p;
            }
        }
        p += 1;
    }
    (f, core * rest)
}

fn bigint_to_ibig(n: &BigInt) -> IBig {
    n.to_string().parse().expect("decimal integer round-trips")
}

fn ibig_to_bigint(n: &IBig) -> BigInt {
    n.to_string().parse().expect("decimal integer round-trips")
}

fn int_to_float(n: &BigInt, precision: usize) -> Float {
    Float::from_parts(bigint_to_ibig(n), 0)
        .with_precision(precision)
        .value()
}

fn rational_to_float(r: &BigRational, precision: usize) -> Float {
    let num = int_to_float(r.numer(), precision + 8);
    let den = int_to_float(r.denom(), precision + 8);
    (num / den).with_precision(precision).value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    #[test]
    fn golden_ratio_identities() {
        let phi = q("1/2+1/2*sqrt(5)");
        assert_eq!(&phi * &phi, &phi + &ExactScalar::one());
        assert_eq!(phi.recip(), &phi - &ExactScalar::one());
        assert_eq!(phi.floor(), BigInt::from(1));
        assert_eq!(phi.to_string(), "1/2+1/2*sqrt(5)");
    }

    #[test]
    fn quadratic_floor_and_sign() {
        // 3 - sqrt(8) = 3 - 2√2 ≈ 0.1716
        let x = q("3-1*sqrt(8)");
        assert_eq!(x.to_string(), "3-2*sqrt(2)");
        assert_eq!(x.floor(), BigInt::from(0));
        assert!(x.is_positive());
        assert_eq!((-&x).floor(), BigInt::from(-1));
        let y = q("-7/3+5/3*sqrt(2)"); // ≈ 0.0237
        assert_eq!(y.floor(), BigInt::from(0));
        assert!(y.is_positive());
        assert_eq!(q("-1*sqrt(2)").floor(), BigInt::from(-2));
    }

    #[test]
    fn perfect_square_radicand_collapses() {
        assert_eq!(q("1+2*sqrt(9)"), ExactScalar::from_int(7));
        assert!(q("1+2*sqrt(9)").as_rational().is_some());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(
            parse_rational("1e-9").unwrap(),
            BigRational::new(1.into(), 1_000_000_000.into())
        );
        assert_eq!(parse_rational("0.3").unwrap(), BigRational::new(3.into(), 10.into()));
        assert_eq!(
            parse_rational("-2.50").unwrap(),
            BigRational::new((-5).into(), 2.into())
        );
        assert_eq!(parse_rational("6/4").unwrap(), BigRational::new(3.into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(q("4/2").to_string(), "2");
    }

    #[test]
    fn float_promotion_keeps_precision() {
        let x = q("1.8@192");
        assert_eq!(x.precision(), Some(192));
        let y = &x * &ExactScalar::ratio(1, 2);
        assert_eq!(y.precision(), Some(192));
        assert!((y.to_f64() - 0.9).abs() < 1e-15);
        assert_eq!(x.floor(), BigInt::from(1));
        assert!(x.to_string().ends_with("@192"));
    }

    #[test]
    fn comparisons_across_representations() {
        let phi = q("1/2+1/2*sqrt(5)");
        assert!(phi > ExactScalar::ratio(8, 5));
        assert!(phi < ExactScalar::ratio(13, 8));
        assert!(q("1.6@128") < phi);
        assert_eq!(ExactScalar::ratio(1, 2).pow(3), ExactScalar::ratio(1, 8));
    }
}
