//! Small integer helpers shared across modules.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Non-negative gcd; `gcd(0, k) = |k|`.
///
/// The larger operand is reduced modulo the smaller one before running the
/// binary algorithm, which matters for orbit terms whose sizes differ by a
/// factor of `d`.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from(gcd_abs(a.magnitude(), b.magnitude()))
}

pub fn gcd_abs(a: &BigUint, b: &BigUint) -> BigUint {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    let r = big % small;
    if r.is_zero() {
        return small.clone();
    }
    small.gcd(&r)
}

/// Non-negative lcm; `lcm(0, k) = 0`.
pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let g = gcd(a, b);
    (a.abs() / g) * b.abs()
}

/// `m | k`, with the convention that `0 | k` only for `k = 0`.
pub fn divides(m: &BigInt, k: &BigInt) -> bool {
    if m.is_zero() {
        k.is_zero()
    } else {
        (k % m).is_zero()
    }
}

pub fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Largest `r` with `r^k <= v`.
pub fn root_floor(v: &BigUint, k: u32) -> BigUint {
    assert!(k > 0);
    if k == 1 {
        return v.clone();
    }
    v.nth_root(k)
}

/// Smallest `r` with `r^k >= v`.
pub fn root_ceil(v: &BigUint, k: u32) -> BigUint {
    let r = root_floor(v, k);
    if num_traits::pow(r.clone(), k as usize) == *v {
        r
    } else {
        r + BigUint::one()
    }
}

/// `Some(r)` when `v = r^k` exactly.
pub fn exact_root(v: &BigUint, k: u32) -> Option<BigUint> {
    let r = root_floor(v, k);
    (num_traits::pow(r.clone(), k as usize) == *v).then_some(r)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
