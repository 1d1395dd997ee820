//! Arbitrary-precision integers with an inline fast path.
//!
//! Almost every entry met in practice fits in a machine word, so values are
//! kept as `i64` and promoted to a heap `BigInt` only when an operation
//! overflows. Results are normalised back to the small form whenever they fit,
//! which makes the derived equality and hashing structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i64),
    Big(Box<BigInt>),
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    #[inline]
    pub fn zero() -> Self {
        Int::Small(0)
    }

    #[inline]
    pub fn one() -> Self {
        Int::Small(1)
    }

    fn from_big(b: BigInt) -> Self {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(Box::new(b)),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => (**b).clone(),
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        matches!(self, Int::Small(1))
    }

    /// `true` for `1` and `-1`.
    #[inline]
    pub fn is_unit(&self) -> bool {
        matches!(self, Int::Small(1) | Int::Small(-1))
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(v) => *v < 0,
            Int::Big(b) => b.is_negative(),
        }
    }

    #[inline]
    pub fn signum(&self) -> i32 {
        match self {
            Int::Small(v) => v.signum() as i32,
            Int::Big(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Int {
        match self {
            Int::Small(v) => match v.checked_abs() {
                Some(a) => Int::Small(a),
                None => Int::from_big(BigInt::from(*v).abs()),
            },
            Int::Big(b) => Int::from_big(b.abs()),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Int::Small(v) => Some(*v),
            Int::Big(_) => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }

    /// Compares absolute values.
    pub fn cmp_abs(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.unsigned_abs().cmp(&b.unsigned_abs()),
            _ => self.to_big().abs().cmp(&other.to_big().abs()),
        }
    }

    /// Quotient rounded to the nearest integer (ties towards negative infinity),
    /// so that `self - q * d` has absolute value at most `|d| / 2`.
    pub fn div_round(&self, d: &Int) -> Int {
        assert!(!d.is_zero(), "division by zero");
        if let (Int::Small(a), Int::Small(b)) = (self, d) {
            if let (Some(q), Some(r)) = (a.checked_div_euclid(*b), a.checked_rem_euclid(*b)) {
                // 0 <= r < |b|
                let babs = b.unsigned_abs();
                if (r as u64) * 2 > babs {
                    let adj = if *b > 0 { 1 } else { -1 };
                    if let Some(q2) = q.checked_add(adj) {
                        return Int::Small(q2);
                    }
                } else {
                    return Int::Small(q);
                }
            }
        }
        let (a, b) = (self.to_big(), d.to_big());
        let (q, r) = a.div_mod_floor(&b);
        // r has the sign of b, |r| < |b|
        let two_r: BigInt = &r + &r;
        let q = if two_r.abs() > b.abs() { q + 1 } else { q };
        Int::from_big(q)
    }

    /// Floor division.
    pub fn div_floor(&self, d: &Int) -> Int {
        assert!(!d.is_zero(), "division by zero");
        if let (Int::Small(a), Int::Small(b)) = (self, d) {
            if let Some(q) = checked_div_floor(*a, *b) {
                return Int::Small(q);
            }
        }
        Int::from_big(self.to_big().div_floor(&d.to_big()))
    }

    /// Least nonnegative residue modulo `|m|`.
    pub fn rem_euclid(&self, m: &Int) -> Int {
        assert!(!m.is_zero(), "division by zero");
        if let (Int::Small(a), Int::Small(b)) = (self, m) {
            if let Some(r) = a.checked_rem_euclid(*b) {
                return Int::Small(r);
            }
        }
        let b = m.to_big().abs();
        Int::from_big(self.to_big().mod_floor(&b))
    }

    /// Exact division; panics in debug builds when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Int) -> Int {
        let q = self.div_floor(d);
        debug_assert!(&q * d == *self, "inexact division");
        q
    }

    pub fn divides(&self, other: &Int) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem_euclid(self).is_zero()
    }

    pub fn gcd(&self, other: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, other) {
            let g = gcd_u64(a.unsigned_abs(), b.unsigned_abs());
            if let Ok(g) = i64::try_from(g) {
                return Int::Small(g);
            }
        }
        Int::from_big(self.to_big().gcd(&other.to_big()))
    }

    pub fn lcm(&self, other: &Int) -> Int {
        if self.is_zero() || other.is_zero() {
            return Int::zero();
        }
        let g = self.gcd(other);
        (&self.div_exact(&g) * other).abs()
    }

    /// Returns `(g, s, t)` with `g = gcd(a, b) >= 0` and `s*a + t*b = g`.
    /// When `b` divides `a` the coefficients are chosen as `(0, sign(b))`
    /// so that elimination steps stay as simple as possible.
    pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
        if let (Int::Small(x), Int::Small(y)) = (a, b) {
            if let Some(r) = ext_gcd_i64(*x, *y) {
                return (Int::Small(r.0), Int::Small(r.1), Int::Small(r.2));
            }
        }
        let e = a.to_big().extended_gcd(&b.to_big());
        let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
        if g.is_negative() {
            g = -g;
            s = -s;
            t = -t;
        }
        (Int::from_big(g), Int::from_big(s), Int::from_big(t))
    }

    /// `self -= q * x`
    #[inline]
    pub fn sub_mul(&mut self, q: &Int, x: &Int) {
        if let (Int::Small(a), Int::Small(b), Int::Small(c)) = (&*self, q, x) {
            if let Some(v) = b.checked_mul(*c).and_then(|p| a.checked_sub(p)) {
                *self = Int::Small(v);
                return;
            }
        }
        let v = self.to_big() - q.to_big() * x.to_big();
        *self = Int::from_big(v);
    }

    /// `self += q * x`
    #[inline]
    pub fn add_mul(&mut self, q: &Int, x: &Int) {
        if let (Int::Small(a), Int::Small(b), Int::Small(c)) = (&*self, q, x) {
            if let Some(v) = b.checked_mul(*c).and_then(|p| a.checked_add(p)) {
                *self = Int::Small(v);
                return;
            }
        }
        let v = self.to_big() + q.to_big() * x.to_big();
        *self = Int::from_big(v);
    }

    pub fn pow(&self, e: u32) -> Int {
        let mut acc = Int::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Residue modulo a machine prime, used for rank certificates.
    pub fn mod_u64(&self, p: u64) -> u64 {
        match self {
            Int::Small(v) => v.rem_euclid(p as i64) as u64,
            Int::Big(b) => b.mod_floor(&BigInt::from(p)).to_u64().unwrap_or(0),
        }
    }
}

fn checked_div_floor(a: i64, b: i64) -> Option<i64> {
    let q = a.checked_div(b)?;
    let r = a.checked_rem(b)?;
    if r != 0 && ((r < 0) != (b < 0)) {
        q.checked_sub(1)
    } else {
        Some(q)
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn ext_gcd_i64(a: i64, b: i64) -> Option<(i64, i64, i64)> {
    if a == i64::MIN || b == i64::MIN {
        return None;
    }
    if b != 0 && a % b == 0 {
        return Some((b.abs(), 0, b.signum()));
    }
    if a != 0 && b % a == 0 {
        return Some((a.abs(), a.signum(), 0));
    }
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    Some((
        i64::try_from(old_r).ok()?,
        i64::try_from(old_s).ok()?,
        i64::try_from(old_t).ok()?,
    ))
}

impl Default for Int {
    fn default() -> Self {
        Int::zero()
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int::Small(v)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Self {
        Int::Small(v as i64)
    }
}

impl From<u64> for Int {
    fn from(v: u64) -> Self {
        match i64::try_from(v) {
            Ok(s) => Int::Small(s),
            Err(_) => Int::Big(Box::new(BigInt::from(v))),
        }
    }
}

impl From<usize> for Int {
    fn from(v: usize) -> Self {
        Int::from(v as u64)
    }
}

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Self {
        Int::from_big(b)
    }
}

impl FromStr for Int {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Int::Small(v));
        }
        Ok(Int::from_big(s.parse::<BigInt>()?))
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Int::Small(v) => s.serialize_i64(*v),
            Int::Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Int::Small(v)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident, $op:tt) => {
        impl $tr<&Int> for &Int {
            type Output = Int;
            #[inline]
            fn $m(self, rhs: &Int) -> Int {
                if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
                    if let Some(v) = a.$checked(*b) {
                        return Int::Small(v);
                    }
                }
                Int::from_big(self.to_big() $op rhs.to_big())
            }
        }
        impl $tr<Int> for Int {
            type Output = Int;
            #[inline]
            fn $m(self, rhs: Int) -> Int {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Int> for Int {
            type Output = Int;
            #[inline]
            fn $m(self, rhs: &Int) -> Int {
                (&self).$m(rhs)
            }
        }
        impl $tr<Int> for &Int {
            type Output = Int;
            #[inline]
            fn $m(self, rhs: Int) -> Int {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);

impl AddAssign<&Int> for Int {
    #[inline]
    fn add_assign(&mut self, rhs: &Int) {
        if let (Int::Small(a), Int::Small(b)) = (&*self, rhs) {
            if let Some(v) = a.checked_add(*b) {
                *self = Int::Small(v);
                return;
            }
        }
        *self = &*self + rhs;
    }
}

impl AddAssign<Int> for Int {
    fn add_assign(&mut self, rhs: Int) {
        *self += &rhs;
    }
}

impl SubAssign<&Int> for Int {
    #[inline]
    fn sub_assign(&mut self, rhs: &Int) {
        if let (Int::Small(a), Int::Small(b)) = (&*self, rhs) {
            if let Some(v) = a.checked_sub(*b) {
                *self = Int::Small(v);
                return;
            }
        }
        *self = &*self - rhs;
    }
}

impl SubAssign<Int> for Int {
    fn sub_assign(&mut self, rhs: Int) {
        *self -= &rhs;
    }
}

impl MulAssign<&Int> for Int {
    fn mul_assign(&mut self, rhs: &Int) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for Int {
    fn sum<I: Iterator<Item = Int>>(iter: I) -> Int {
        let mut acc = Int::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl<'a> std::iter::Sum<&'a Int> for Int {
    fn sum<I: Iterator<Item = &'a Int>>(iter: I) -> Int {
        let mut acc = Int::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl Zero for Int {
    fn zero() -> Self {
        Int::Small(0)
    }
    fn is_zero(&self) -> bool {
        Int::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overflow_promotes() {
        let a = Int::from(i64::MAX);
        let b = &a + &Int::one();
        assert!(matches!(b, Int::Big(_)));
        let c = &b - &Int::one();
        assert_eq!(c, a);
        assert!(matches!(c, Int::Small(_)));
        let sq = &a * &a;
        assert_eq!(sq.to_big(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        assert_eq!(-Int::from(i64::MIN), Int::from(BigInt::from(i64::MIN).abs()));
    }

    #[test]
    fn ext_gcd_prefers_trivial_coefficients() {
        let (g, s, t) = Int::ext_gcd(&Int::from(12), &Int::from(-4));
        assert_eq!((g, s, t), (Int::from(4), Int::zero(), Int::from(-1)));
    }

    #[test]
    fn rounding_division() {
        assert_eq!(Int::from(7).div_round(&Int::from(2)), Int::from(3));
        assert_eq!(Int::from(8).div_round(&Int::from(3)), Int::from(3));
        assert_eq!(Int::from(-8).div_round(&Int::from(3)), Int::from(-3));
        assert_eq!(Int::from(-7).div_floor(&Int::from(2)), Int::from(-4));
    }

    fn big(v: i128) -> Int {
        Int::from(BigInt::from(v))
    }

    proptest! {
        #[test]
        fn arithmetic_matches_i128(a in any::<i64>(), b in any::<i64>()) {
            let (x, y) = (Int::from(a), Int::from(b));
            prop_assert_eq!(&x + &y, big(a as i128 + b as i128));
            prop_assert_eq!(&x - &y, big(a as i128 - b as i128));
            prop_assert_eq!((&x * &y).to_big(), BigInt::from(a) * BigInt::from(b));
            let mut z = x.clone();
            z.sub_mul(&y, &Int::from(3));
            prop_assert_eq!(z, big(a as i128 - 3 * b as i128));
        }

        #[test]
        fn ext_gcd_is_bezout(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let (x, y) = (Int::from(a), Int::from(b));
            let (g, s, t) = Int::ext_gcd(&x, &y);
            prop_assert_eq!(&(&s * &x) + &(&t * &y), g.clone());
            prop_assert_eq!(g, x.gcd(&y));
        }

        #[test]
        fn div_round_remainder_is_small(a in any::<i64>(), b in any::<i64>().prop_filter("nonzero", |v| *v != 0)) {
            let (x, y) = (Int::from(a), Int::from(b));
            let q = x.div_round(&y);
            let r = &x - &(&q * &y);
            prop_assert!((&r * &Int::from(2)).cmp_abs(&y) != Ordering::Greater);
        }
    }
}
