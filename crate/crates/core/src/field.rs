//! Exact scalars over the ground fields `F_p` (odd `p`), `Q` and `Q(i)`.
//!
//! Every [`Scalar`] carries enough information to recover its [`Field`], and
//! its representation is canonical: residues live in `[0, p)`, fractions are
//! reduced with positive denominators. Two scalars are equal exactly when their
//! representations are, so scalars (and matrices of them) hash consistently.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest prime accepted for `F_p`; keeps every product inside `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not an odd prime below 2^31")]
    NotOddPrime(u64),
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(Field, Field),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("{0} is not a finite field")]
    NotFinite(Field),
    #[error("cannot parse {input:?} as an element of {field}: {reason}")]
    Parse {
        field: Field,
        input: String,
        reason: String,
    },
    #[error("unknown field descriptor {0:?} (expected f<p>, q or qi)")]
    UnknownField(String),
}

/// Ground field descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Field {
    Prime(u32),
    Rationals,
    GaussianRationals,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Square root modulo an odd prime by Tonelli-Shanks. Returns the smaller of
/// the two roots.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while pow_mod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = tt * tt % p;
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = b * b % p;
            t = t * c % p;
            r = r * b % p;
        }
        r
    };
    Some(root.min(p - root))
}

fn big_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    let num = big_sqrt_exact(x.numer())?;
    let den = big_sqrt_exact(x.denom())?;
    Some(BigRational::new(num, den))
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad integer {num:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad integer {den:?}"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(num, den))
}

fn fmt_rational(x: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x.denom().is_one() {
        write!(f, "{}", x.numer())
    } else {
        write!(f, "{}/{}", x.numer(), x.denom())
    }
}

impl Field {
    /// `F_p` for an odd prime `p`.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p == 2 || p > MAX_PRIME || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    /// Number of elements of a finite field.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(u64::from(*p)),
            _ => None,
        }
    }

    fn modulus(&self) -> Result<u64, FieldError> {
        self.order().ok_or(FieldError::NotFinite(*self))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Field::Prime(p) => Scalar::residue(p, n.rem_euclid(i64::from(p)) as u64),
            Field::Rationals => Scalar::rational(BigRational::from_integer(n.into())),
            Field::GaussianRationals => {
                Scalar::gaussian(BigRational::from_integer(n.into()), BigRational::zero())
            }
        }
    }

    /// The element `num / den`.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        let d = self.from_i64(den);
        self.from_i64(num).checked_div(&d)
    }

    /// Lift an exact rational into this field (reduction mod `p` for `F_p`).
    pub fn from_rational(&self, x: &BigRational) -> Result<Scalar, FieldError> {
        match *self {
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let n = x.numer().mod_floor(&pb).to_u64().unwrap_or(0);
                let d = x.denom().mod_floor(&pb).to_u64().unwrap_or(0);
                Scalar::residue(p, n).checked_div(&Scalar::residue(p, d))
            }
            Field::Rationals => Ok(Scalar::rational(x.clone())),
            Field::GaussianRationals => Ok(Scalar::gaussian(x.clone(), BigRational::zero())),
        }
    }

    /// All elements of a finite field, in ascending residue order.
    pub fn elements(&self) -> Result<Vec<Scalar>, FieldError> {
        let p = self.modulus()?;
        Ok((0..p).map(|v| Scalar::residue(p as u32, v)).collect())
    }

    /// All nonzero elements of a finite field.
    pub fn units(&self) -> Result<Vec<Scalar>, FieldError> {
        let p = self.modulus()?;
        Ok((1..p).map(|v| Scalar::residue(p as u32, v)).collect())
    }

    /// Smallest residue that is not a square (finite fields only).
    pub fn least_non_residue(&self) -> Option<Scalar> {
        let p = self.order()?;
        (2..p)
            .find(|&v| pow_mod(v, (p - 1) / 2, p) != 1)
            .map(|v| Scalar::residue(p as u32, v))
    }

    /// A generator of the multiplicative group (finite fields only).
    pub fn primitive_root(&self) -> Option<Scalar> {
        let p = self.order()?;
        let mut factors = Vec::new();
        let mut m = p - 1;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                factors.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        (2..p)
            .find(|&g| factors.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1))
            .map(|g| Scalar::residue(p as u32, g))
    }

    /// Parse a scalar in the text syntax: integers, `a/b`, and for `Q(i)`
    /// forms such as `1+i`, `-1/2+1/2i`, `3i`.
    pub fn parse_scalar(&self, input: &str) -> Result<Scalar, FieldError> {
        let err = |reason: String| FieldError::Parse {
            field: *self,
            input: input.to_string(),
            reason,
        };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty".into()));
        }
        match self {
            Field::Prime(_) | Field::Rationals => {
                let x = parse_rational(&s).map_err(err)?;
                self.from_rational(&x).map_err(|e| err(e.to_string()))
            }
            Field::GaussianRationals => {
                let Some(body) = s.strip_suffix('i') else {
                    let re = parse_rational(&s).map_err(err)?;
                    return Ok(Scalar::gaussian(re, BigRational::zero()));
                };
                let split = body
                    .char_indices()
                    .skip(1)
                    .filter(|&(_, c)| c == '+' || c == '-')
                    .map(|(k, _)| k)
                    .last();
                let (re_txt, im_txt) = match split {
                    Some(k) => (&body[..k], &body[k..]),
                    None => ("0", body),
                };
                let re = parse_rational(re_txt).map_err(err)?;
                let im = match im_txt {
                    "" | "+" => BigRational::one(),
                    "-" => -BigRational::one(),
                    t => parse_rational(t.strip_prefix('+').unwrap_or(t)).map_err(err)?,
                };
                Ok(Scalar::gaussian(re, im))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "f{p}"),
            Field::Rationals => write!(f, "q"),
            Field::GaussianRationals => write!(f, "qi"),
        }
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "q" => Ok(Field::Rationals),
            "qi" => Ok(Field::GaussianRationals),
            other => {
                let p = other
                    .strip_prefix('f')
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(|| FieldError::UnknownField(s.to_string()))?;
                Field::prime(p)
            }
        }
    }
}

impl TryFrom<String> for Field {
    type Error = FieldError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Field> for String {
    fn from(f: Field) -> String {
        f.to_string()
    }
}

/// A Gaussian rational `re + im·i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: BigRational,
    pub im: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Mod { p: u32, v: u32 },
    Rat(Box<BigRational>),
    Gauss(Box<Gaussian>),
}

/// An exact field element in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    fn residue(p: u32, v: u64) -> Scalar {
        Scalar(Repr::Mod {
            p,
            v: (v % u64::from(p)) as u32,
        })
    }

    pub fn rational(x: BigRational) -> Scalar {
        Scalar(Repr::Rat(Box::new(x)))
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Scalar {
        Scalar(Repr::Gauss(Box::new(Gaussian { re, im })))
    }

    pub fn field(&self) -> Field {
        match &self.0 {
            Repr::Mod { p, .. } => Field::Prime(*p),
            Repr::Rat(_) => Field::Rationals,
            Repr::Gauss(_) => Field::GaussianRationals,
        }
    }

    /// Residue in `[0, p)` for prime-field elements.
    pub fn as_residue(&self) -> Option<u32> {
        match self.0 {
            Repr::Mod { v, .. } => Some(v),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_gaussian(&self) -> Option<&Gaussian> {
        match &self.0 {
            Repr::Gauss(z) => Some(z),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Mod { v, .. } => *v == 0,
            Repr::Rat(x) => x.is_zero(),
            Repr::Gauss(z) => z.re.is_zero() && z.im.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Mod { v, .. } => *v == 1,
            Repr::Rat(x) => x.is_one(),
            Repr::Gauss(z) => z.re.is_one() && z.im.is_zero(),
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<(), FieldError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.field(), other.field()))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Mod { p, v }, Repr::Mod { v: w, .. }) => {
                Scalar::residue(*p, u64::from(*v) + u64::from(*w))
            }
            (Repr::Rat(x), Repr::Rat(y)) => Scalar::rational(x.as_ref() + y.as_ref()),
            (Repr::Gauss(x), Repr::Gauss(y)) => Scalar::gaussian(&x.re + &y.re, &x.im + &y.im),
            _ => unreachable!("fields already compared"),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Mod { p, v }, Repr::Mod { v: w, .. }) => {
                Scalar::residue(*p, u64::from(*v) * u64::from(*w))
            }
            (Repr::Rat(x), Repr::Rat(y)) => Scalar::rational(x.as_ref() * y.as_ref()),
            (Repr::Gauss(x), Repr::Gauss(y)) => Scalar::gaussian(
                &x.re * &y.re - &x.im * &y.im,
                &x.re * &y.im + &x.im * &y.re,
            ),
            _ => unreachable!("fields already compared"),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn neg(&self) -> Scalar {
        match &self.0 {
            Repr::Mod { p, v } => Scalar::residue(*p, u64::from(*p) - u64::from(*v)),
            Repr::Rat(x) => Scalar::rational(-x.as_ref()),
            Repr::Gauss(z) => Scalar::gaussian(-&z.re, -&z.im),
        }
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(match &self.0 {
            Repr::Mod { p, v } => {
                let p64 = u64::from(*p);
                Scalar::residue(*p, pow_mod(u64::from(*v), p64 - 2, p64))
            }
            Repr::Rat(x) => Scalar::rational(x.recip()),
            Repr::Gauss(z) => {
                let norm = &z.re * &z.re + &z.im * &z.im;
                Scalar::gaussian(&z.re / &norm, -&z.im / &norm)
            }
        })
    }

    /// `x · 2⁻¹`; every supported field has characteristic other than 2.
    pub fn half(&self) -> Scalar {
        let two = self.field().from_i64(2);
        self * &two.inv().expect("characteristic is not 2")
    }

    pub fn pow(&self, mut exp: u64) -> Scalar {
        let mut acc = self.field().one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// A square root when one exists in the field.
    ///
    /// `F_p` uses Euler's criterion then Tonelli-Shanks and returns the root
    /// with the smaller residue. `Q` returns the nonnegative root. `Q(i)`
    /// solves `(c + di)² = a + bi` exactly and returns the root with `c ≥ 0`.
    pub fn sqrt(&self) -> Option<Scalar> {
        match &self.0 {
            Repr::Mod { p, v } => {
                sqrt_mod(u64::from(*v), u64::from(*p)).map(|r| Scalar::residue(*p, r))
            }
            Repr::Rat(x) => rational_sqrt(x).map(Scalar::rational),
            Repr::Gauss(z) => {
                // |z| must be rational, then c² = (a + |z|)/2 and d² = (|z| - a)/2.
                let norm = &z.re * &z.re + &z.im * &z.im;
                let modulus = rational_sqrt(&norm)?;
                let two = BigRational::from_integer(2.into());
                let c = rational_sqrt(&((&z.re + &modulus) / &two))?;
                let mut d = rational_sqrt(&((&modulus - &z.re) / &two))?;
                if z.im.is_negative() {
                    d = -d;
                }
                let root = Scalar::gaussian(c, d);
                (&root * &root == *self).then_some(root)
            }
        }
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// Deterministic total order used to pick canonical class members:
    /// residue order on `F_p`; height `max(|num|, den)` then sign then value
    /// on `Q`; lexicographic on (re, im) for `Q(i)`.
    pub fn canonical_cmp(&self, other: &Scalar) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Mod { v, .. }, Repr::Mod { v: w, .. }) => v.cmp(w),
            (Repr::Rat(x), Repr::Rat(y)) => rational_key_cmp(x, y),
            (Repr::Gauss(x), Repr::Gauss(y)) => {
                rational_key_cmp(&x.re, &y.re).then_with(|| rational_key_cmp(&x.im, &y.im))
            }
            _ => self.field().cmp(&other.field()),
        }
    }
}

/// Height of a rational: `max(|num|, den)`.
pub fn height(x: &BigRational) -> BigInt {
    x.numer().abs().max(x.denom().clone())
}

fn rational_key_cmp(x: &BigRational, y: &BigRational) -> Ordering {
    height(x)
        .cmp(&height(y))
        .then_with(|| x.is_negative().cmp(&y.is_negative()))
        .then_with(|| x.abs().cmp(&y.abs()))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Mod { v, .. } => write!(f, "{v}"),
            Repr::Rat(x) => fmt_rational(x, f),
            Repr::Gauss(z) => {
                if z.im.is_zero() {
                    return fmt_rational(&z.re, f);
                }
                if !z.re.is_zero() {
                    fmt_rational(&z.re, f)?;
                    if z.im.is_positive() {
                        write!(f, "+")?;
                    }
                }
                if z.im.is_one() {
                    write!(f, "i")
                } else if (-&z.im).is_one() {
                    write!(f, "-i")
                } else {
                    fmt_rational(&z.im, f)?;
                    write!(f, "i")
                }
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            /// Panics when the operands belong to different fields.
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}
