//! Dyadic numbers `m * 2^e` and closed intervals with dyadic endpoints.
//!
//! Arithmetic on `Dyadic` is exact. Operations that cannot be exact
//! (division, roots, enclosing a non-dyadic rational) take a precision in
//! significant bits and round in a stated direction; interval operations
//! always round outward, so the true value stays enclosed.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::Serialize;

use crate::arith::{root_ceil, root_floor};

/// `m * 2^e`, normalized so `m` is odd (or zero with `e = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        Dyadic {
            m: m >> tz,
            e: e + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(BigInt::one())
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    /// `2^e`
    pub fn pow2(e: i64) -> Self {
        Dyadic::new(BigInt::one(), e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.m.sign()
    }

    pub fn is_positive(&self) -> bool {
        self.m.is_positive()
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            m: self.m.abs(),
            e: self.e,
        }
    }

    /// Position of the leading bit: `2^(mag-1) <= |x| < 2^mag`.
    pub fn magnitude_bits(&self) -> i64 {
        self.m.bits() as i64 + self.e
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &o.m << (o.e - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            m: -&self.m,
            e: self.e,
        }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.m * &o.m, self.e + o.e)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            m: self.m.clone(),
            e: self.e + k,
        }
    }

    pub fn pow(&self, k: u64) -> Dyadic {
        let k32 = u32::try_from(k).expect("exponent fits in u32");
        Dyadic::new(num_traits::pow::Pow::pow(&self.m, k32), self.e * k as i64)
    }

    pub fn floor(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as u64
        } else {
            self.m.div_floor(&pow2((-self.e) as u64))
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Value scaled by `2^k` and floored to an integer.
    fn scaled_floor(&self, k: i64) -> BigInt {
        self.mul_pow2(k).floor()
    }

    fn scaled_ceil(&self, k: i64) -> BigInt {
        self.mul_pow2(k).ceil()
    }

    /// Largest dyadic with at most `prec` significant bits that is `<= self`.
    pub fn round_down(&self, prec: u32) -> Dyadic {
        let bits = self.m.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        Dyadic::new(self.m.div_floor(&pow2(s)), self.e + s as i64)
    }

    pub fn round_up(&self, prec: u32) -> Dyadic {
        self.neg().round_down(prec).neg()
    }

    /// Rounds to `frac` fractional bits, downward.
    pub fn floor_to(&self, frac: i64) -> Dyadic {
        Dyadic::new(self.scaled_floor(frac), -frac)
    }

    pub fn ceil_to(&self, frac: i64) -> Dyadic {
        Dyadic::new(self.scaled_ceil(frac), -frac)
    }

    /// `a / b` rounded to `prec` significant bits in the given direction.
    fn div_rounded(a: &BigInt, b: &BigInt, prec: u32, up: bool) -> Dyadic {
        assert!(!b.is_zero(), "division by zero");
        if a.is_zero() {
            return Dyadic::zero();
        }
        // q = a 2^s / b has at least prec bits
        let s = prec as i64 + b.bits() as i64 - a.bits() as i64 + 1;
        let (num, den) = if s >= 0 {
            (a << s as u64, b.clone())
        } else {
            (a.clone(), b << (-s) as u64)
        };
        let q = if up {
            ceil_div(&num, &den)
        } else {
            num.div_floor(&den)
        };
        Dyadic::new(q, -s)
    }

    pub fn div_down(&self, o: &Dyadic, prec: u32) -> Dyadic {
        Dyadic::div_rounded(&self.m, &o.m, prec, false).mul_pow2(self.e - o.e)
    }

    pub fn div_up(&self, o: &Dyadic, prec: u32) -> Dyadic {
        Dyadic::div_rounded(&self.m, &o.m, prec, true).mul_pow2(self.e - o.e)
    }

    pub fn from_rational_down(r: &BigRational, prec: u32) -> Dyadic {
        Dyadic::div_rounded(r.numer(), r.denom(), prec, false)
    }

    pub fn from_rational_up(r: &BigRational, prec: u32) -> Dyadic {
        Dyadic::div_rounded(r.numer(), r.denom(), prec, true)
    }

    /// Exact conversion when the rational has a power-of-two denominator.
    pub fn from_rational_exact(r: &BigRational) -> Option<Dyadic> {
        let den = r.denom();
        let tz = den.trailing_zeros()?;
        if den.magnitude().bits() != tz + 1 {
            return None;
        }
        Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.e >= 0 {
            BigRational::from_integer(&self.m << self.e as u64)
        } else {
            // m is odd, so the fraction is already reduced
            BigRational::new_raw(self.m.clone(), pow2((-self.e) as u64))
        }
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // compare m 2^e den with num
        let den = Dyadic::from_int(r.denom().clone());
        self.mul(&den).cmp(&Dyadic::from_int(r.numer().clone()))
    }

    /// `floor(self^(1/k))` to `frac` fractional bits; `self >= 0`.
    pub fn root_down(&self, k: u32, frac: i64) -> Dyadic {
        assert!(!self.m.is_negative(), "root of a negative number");
        let v = self.scaled_floor(frac * k as i64);
        let r = root_floor(v.magnitude(), k);
        Dyadic::new(BigInt::from(r), -frac)
    }

    pub fn root_up(&self, k: u32, frac: i64) -> Dyadic {
        assert!(!self.m.is_negative(), "root of a negative number");
        let v = self.scaled_ceil(frac * k as i64);
        let r = root_ceil(v.magnitude(), k);
        Dyadic::new(BigInt::from(r), -frac)
    }

    /// Decimal text truncated toward zero after `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled = self.to_rational() * BigRational::from_integer(BigInt::from(10).pow(digits as u32));
        let q = scaled.trunc().to_integer();
        let neg = self.m.is_negative();
        let s = q.abs().to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Scientific notation with `digits` significant digits, truncated.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let r = self.to_rational().abs();
        // decimal exponent estimate from the binary magnitude, then corrected
        let mut k = ((self.magnitude_bits() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigInt::from(10);
        let scale = |k: i64| -> BigRational {
            if k >= 0 {
                BigRational::from_integer(ten.pow(k as u32))
            } else {
                BigRational::new(BigInt::one(), ten.pow((-k) as u32))
            }
        };
        loop {
            let lead = (&r / scale(k)).trunc().to_integer();
            if lead.is_zero() {
                k -= 1;
            } else if lead >= ten {
                k += 1;
            } else {
                break;
            }
        }
        let mant = (&r / scale(k - digits as i64 + 1)).trunc().to_integer().to_string();
        let sign = if self.m.is_negative() { "-" } else { "" };
        let (a, b) = mant.split_at(1);
        if b.is_empty() {
            format!("{sign}{a}e{k}")
        } else {
            format!("{sign}{a}.{b}e{k}")
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Dyadic) -> Ordering {
        self.sub(o).m.sign().cmp(&Sign::NoSign)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(30))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let r = self.to_rational();
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("num", &r.numer().to_string())?;
        map.serialize_entry("den", &r.denom().to_string())?;
        map.end()
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Interval::point(Dyadic::from_int(v))
    }

    /// Tightest enclosure at `prec` bits (exact when `r` is dyadic).
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        match Dyadic::from_rational_exact(r) {
            Some(d) => Interval::point(d),
            None => Interval {
                lo: Dyadic::from_rational_down(r, prec),
                hi: Dyadic::from_rational_up(r, prec),
            },
        }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo.cmp_rational(r) != Ordering::Greater && self.hi.cmp_rational(r) != Ordering::Less
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.neg().is_positive()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.add(&o.lo),
            hi: self.hi.add(&o.hi),
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.sub(&o.hi),
            hi: self.hi.sub(&o.lo),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        if self.is_positive() && o.is_positive() {
            return Interval {
                lo: self.lo.mul(&o.lo),
                hi: self.hi.mul(&o.hi),
            };
        }
        let c = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        Interval {
            lo: c.iter().min().unwrap().clone(),
            hi: c.iter().max().unwrap().clone(),
        }
    }

    /// `[0, max |x|]`-aware absolute value.
    pub fn abs(&self) -> Interval {
        if !self.lo.sign().eq(&Sign::Minus) {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: Dyadic::zero(),
                hi: self.lo.neg().max(self.hi.clone()),
            }
        }
    }

    pub fn abs_max(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    /// Outward rounding to `prec` significant bits.
    pub fn round(&self, prec: u32) -> Interval {
        Interval {
            lo: self.lo.round_down(prec),
            hi: self.hi.round_up(prec),
        }
    }

    /// `self^k`, rounding outward to `prec` bits after every product.
    pub fn pow_rounded(&self, mut k: u64, prec: u32) -> Interval {
        if k == 0 {
            return Interval::from_int(1);
        }
        let mut base = if k.is_multiple_of(2) { self.abs() } else { self.clone() };
        let mut acc: Option<Interval> = None;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base).round(prec),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base).round(prec);
        }
        acc.unwrap()
    }

    /// `1 / self` for intervals not containing zero.
    pub fn recip(&self, prec: u32) -> Interval {
        assert!(!self.contains_zero(), "reciprocal of an interval containing 0");
        let one = Dyadic::one();
        Interval {
            lo: one.div_down(&self.hi, prec),
            hi: one.div_up(&self.lo, prec),
        }
    }

    /// Nearest integer (halves round up), if both ends agree.
    pub fn nearest_integer(&self) -> Option<BigInt> {
        let half = Dyadic::pow2(-1);
        let a = self.lo.add(&half).floor();
        let b = self.hi.add(&half).floor();
        (a == b).then_some(a)
    }

    pub fn floor_unique(&self) -> Option<BigInt> {
        let a = self.lo.floor();
        (a == self.hi.floor()).then_some(a)
    }

    /// `self^(1/d^times)` for `self > 0` by repeated `d`-th roots, directed
    /// outward, intermediates kept to `frac` fractional bits.
    pub fn iterated_root(&self, d: u32, times: u32, frac: i64) -> Interval {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for _ in 0..times {
            lo = lo.root_down(d, frac);
            hi = hi.root_up(d, frac);
        }
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn normalization_and_order() {
        let a = Dyadic::new(BigInt::from(12), 0);
        assert_eq!(a, Dyadic::new(BigInt::from(3), 2));
        assert!(Dyadic::pow2(-1) < Dyadic::one());
        assert!(Dyadic::from_int(-3) < Dyadic::pow2(-10));
        assert_eq!(Dyadic::from_int(5).mul_pow2(-1).floor(), BigInt::from(2));
        assert_eq!(Dyadic::from_int(-5).mul_pow2(-1).floor(), BigInt::from(-3));
        assert_eq!(Dyadic::from_int(-5).mul_pow2(-1).ceil(), BigInt::from(-2));
    }

    #[test]
    fn rational_enclosures() {
        let third = q(1, 3);
        let iv = Interval::from_rational(&third, 64);
        assert!(iv.contains_rational(&third));
        assert!(!iv.is_point());
        assert!(iv.width() < Dyadic::pow2(-64));
        assert!(Interval::from_rational(&q(-3, 8), 8).is_point());
    }

    #[test]
    fn roots_bracket() {
        let two = Interval::from_int(2);
        let r = two.iterated_root(2, 1, 100);
        let sq_lo = r.lo.mul(&r.lo);
        let sq_hi = r.hi.mul(&r.hi);
        assert!(sq_lo <= Dyadic::from_int(2) && Dyadic::from_int(2) <= sq_hi);
        assert!(r.width() <= Dyadic::pow2(-99));
        let exact = Interval::from_int(1 << 16).iterated_root(2, 4, 40);
        assert_eq!(exact, Interval::from_int(2));
    }

    #[test]
    fn nearest_integer() {
        let iv = Interval::new(Dyadic::new(BigInt::from(7), -2), Dyadic::new(BigInt::from(9), -2));
        assert_eq!(iv.nearest_integer(), Some(BigInt::from(2)));
        let iv = Interval::new(Dyadic::new(BigInt::from(9), -2), Dyadic::new(BigInt::from(11), -1));
        assert_eq!(iv.nearest_integer(), None);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Dyadic::new(BigInt::from(3), -1).to_decimal(3), "1.500");
        assert_eq!(Dyadic::new(BigInt::from(-1), -3).to_decimal(2), "-0.12");
        assert_eq!(Dyadic::new(BigInt::from(3), -10).to_sci(3), "2.92e-3");
        assert_eq!(Dyadic::from_int(1000).to_sci(2), "1.0e3");
    }

    proptest! {
        #[test]
        fn interval_mul_encloses(a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000, d in -1000i64..1000) {
            let x = Interval::new(Dyadic::from_int(a.min(b)), Dyadic::from_int(a.max(b)));
            let y = Interval::new(Dyadic::from_int(c.min(d)), Dyadic::from_int(c.max(d)));
            let z = x.mul(&y);
            for u in [a, b] {
                for v in [c, d] {
                    prop_assert!(z.contains(&Dyadic::from_int(u * v)));
                }
            }
        }

        #[test]
        fn division_rounds_in_direction(n in -10_000i64..10_000, d in 1i64..10_000, prec in 8u32..80) {
            let r = q(n, d);
            let lo = Dyadic::from_rational_down(&r, prec);
            let hi = Dyadic::from_rational_up(&r, prec);
            prop_assert!(lo.cmp_rational(&r) != Ordering::Greater);
            prop_assert!(hi.cmp_rational(&r) != Ordering::Less);
        }

        #[test]
        fn pow_rounded_encloses(m in 1i64..1000, k in 1u64..40) {
            let x = Interval::new(Dyadic::new(BigInt::from(m), -5), Dyadic::new(BigInt::from(m + 1), -5));
            let p = x.pow_rounded(k, 24);
            prop_assert!(p.contains(&x.lo.pow(k)));
            prop_assert!(p.contains(&x.hi.pow(k)));
        }
    }
}
