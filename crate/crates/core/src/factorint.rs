//! Primality testing, budgeted factorization, and private / primitive prime
//! extraction from sequences.
//!
//! Below 2^64 primality is decided by Miller-Rabin with the first twelve
//! prime bases, which is deterministic in that range. Above it the test is
//! Baillie-PSW (strong base-2 Miller-Rabin plus a strong Lucas test with
//! Selfridge parameters); no BPSW pseudoprime is known, but the answer is
//! "probable prime". A composite verdict is always a proof.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{divides, gcd_abs, root_floor};

/// Factoring effort: trial division bound and total Pollard-rho iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Effort {
    pub trial_bound: u64,
    pub rho_iterations: u64,
}

impl Default for Effort {
    fn default() -> Self {
        Effort {
            trial_bound: 1_000_000,
            rho_iterations: 10_000_000,
        }
    }
}

impl Effort {
    pub fn new(trial_bound: u64, rho_iterations: u64) -> Self {
        Effort {
            trial_bound,
            rho_iterations,
        }
    }
}

const SIEVE_CACHE_LIMIT: u64 = 1_000_000;

fn sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn cached_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(SIEVE_CACHE_LIMIT))
}

fn primes_up_to(bound: u64) -> std::borrow::Cow<'static, [u64]> {
    if bound <= SIEVE_CACHE_LIMIT {
        let all = cached_primes();
        let end = all.partition_point(|&p| p <= bound);
        std::borrow::Cow::Borrowed(&all[..end])
    } else {
        std::borrow::Cow::Owned(sieve(bound))
    }
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Primality of `|n|`.
pub fn is_probable_prime(n: &BigInt) -> bool {
    is_probable_prime_u(n.magnitude())
}

pub fn is_probable_prime_u(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &cached_primes()[..64] {
        if (n % p).is_zero() {
            return false;
        }
    }
    strong_probable_prime(n, &BigUint::from(2u32)) && strong_lucas(n)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let mut a = a.mod_floor(&BigInt::from(n.clone())).to_biguint().unwrap();
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).to_u32().unwrap();
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test, Selfridge method A (`P = 1`).
fn strong_lucas(n: &BigUint) -> bool {
    if root_floor(n, 2).pow(2) == *n {
        return false;
    }
    let mut d_param = BigInt::from(5);
    loop {
        match jacobi(&d_param, n) {
            -1 => break,
            0 => return BigInt::from(n.clone()) == d_param.abs(),
            _ => {
                d_param = if d_param.sign() == Sign::Plus {
                    -(d_param + BigInt::from(2))
                } else {
                    -d_param + BigInt::from(2)
                };
            }
        }
    }
    let n_int = BigInt::from(n.clone());
    let modn = |x: BigInt| x.mod_floor(&n_int);
    let half = |x: BigInt| {
        let x = if x.is_odd() { x + &n_int } else { x };
        x >> 1
    };
    let p = BigInt::one();
    let q = modn((BigInt::one() - &d_param) / 4);
    let d_mod = modn(d_param.clone());

    let n_plus_1 = n + BigUint::one();
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.clone();
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = modn(&u * &v);
        v = modn(&v * &v - (&qk << 1));
        qk = modn(&qk * &qk);
        if k.bit(i) {
            let u_next = half(modn(&p * &u + &v));
            let v_next = half(modn(&d_mod * &u + &p * &v));
            u = u_next;
            v = v_next;
            qk = modn(&qk * &q);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = modn(&v * &v - (&qk << 1));
        if v.is_zero() {
            return true;
        }
        qk = modn(&qk * &qk);
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimePower {
    #[serde(serialize_with = "ser_biguint")]
    pub prime: BigUint,
    pub exponent: u32,
}

/// `n = unit * prod prime^exponent * cofactor`.
///
/// `cofactor`, when present, is a product of composites the budget could not
/// split; each was proven composite by a Miller-Rabin witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    #[serde(with = "crate::serde_str")]
    pub n: BigInt,
    pub unit: i8,
    pub prime_powers: Vec<PrimePower>,
    #[serde(serialize_with = "ser_opt_biguint")]
    pub cofactor: Option<BigUint>,
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_biguint<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.prime_powers.iter().map(|pp| &pp.prime)
    }

    /// Recomputes `unit * prod * cofactor`.
    pub fn product(&self) -> BigInt {
        let mut acc = BigUint::one();
        for pp in &self.prime_powers {
            acc *= pp.prime.pow(pp.exponent);
        }
        if let Some(c) = &self.cofactor {
            acc *= c;
        }
        let acc = BigInt::from(acc);
        if self.unit < 0 {
            -acc
        } else {
            acc
        }
    }
}

/// Factors `n` within `effort`. Incompleteness is recorded in `cofactor`.
///
/// # Panics
/// If `n` is zero.
pub fn factor(n: &BigInt, effort: Effort) -> Factorization {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut found: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut m = n.magnitude().clone();

    for &p in primes_up_to(effort.trial_bound).iter() {
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            // m has no prime factor <= p, hence is prime
            *found.entry(m.clone()).or_default() += 1;
            m = BigUint::one();
            break;
        }
        while (&m % p).is_zero() {
            m /= p;
            *found.entry(pb.clone()).or_default() += 1;
        }
    }

    let mut cofactor = BigUint::one();
    let mut budget = effort.rho_iterations;
    let mut queue = vec![(m, 1u32)];
    while let Some((x, mult)) = queue.pop() {
        if x.is_one() {
            continue;
        }
        if is_probable_prime_u(&x) {
            *found.entry(x).or_default() += mult;
            continue;
        }
        if let Some((root, k)) = perfect_power(&x) {
            queue.push((root, mult * k));
            continue;
        }
        match pollard_brent(&x, &mut budget) {
            Some(d) => {
                let other = &x / &d;
                queue.push((d, mult));
                queue.push((other, mult));
            }
            None => cofactor *= x.pow(mult),
        }
    }

    Factorization {
        n: n.clone(),
        unit: if n.sign() == Sign::Minus { -1 } else { 1 },
        prime_powers: found
            .into_iter()
            .map(|(prime, exponent)| PrimePower { prime, exponent })
            .collect(),
        cofactor: (!cofactor.is_one()).then_some(cofactor),
    }
}

/// `x = r^k` with `k >= 2` maximal-ish (smallest prime exponent found first).
fn perfect_power(x: &BigUint) -> Option<(BigUint, u32)> {
    let bits = x.bits() as u32;
    let mut k = 2;
    while k <= bits {
        let r = root_floor(x, k);
        if r > BigUint::one() && r.pow(k) == *x {
            return Some((r, k));
        }
        k += 1;
    }
    None
}

/// Brent's variant of Pollard rho, seeded from `n` so runs are reproducible.
fn pollard_brent(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    let seed = (n % 1_000_003u32).to_u64().unwrap_or(0);
    let mut attempt = 0u64;
    while *budget > 0 {
        attempt += 1;
        let c = BigUint::from(1 + (seed + attempt) % 997);
        let step = |y: &BigUint| (y * y + &c) % n;
        let mut y = BigUint::from(2 + (seed * 7 + attempt) % 1009) % n;
        let batch = 128u64;
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let lim = batch.min(r - k);
                for _ in 0..lim {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                *budget = budget.saturating_sub(lim);
                g = gcd_abs(&q, n);
                k += lim;
                if *budget == 0 && g.is_one() {
                    return None;
                }
            }
            r *= 2;
        }
        if &g == n {
            // backtrack one step at a time from the last saved point
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = gcd_abs(&diff, n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

/// Positive divisors of `|n|`, or `None` if `n` could not be fully factored.
pub fn divisors(n: &BigInt, effort: Effort) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return None;
    }
    let f = factor(n, effort);
    if !f.is_complete() {
        return None;
    }
    let mut divs = vec![BigInt::one()];
    for pp in &f.prime_powers {
        let p = BigInt::from(pp.prime.clone());
        let mut next = Vec::with_capacity(divs.len() * (pp.exponent as usize + 1));
        for d in &divs {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..pp.exponent {
                acc = &acc * &p;
                next.push(acc.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    Some(divs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PrimeStatus {
    /// `|a_n| <= 1`
    Skipped,
    Prime {
        #[serde(serialize_with = "ser_biguint")]
        prime: BigUint,
    },
    /// No prime factor found within the budget; only a composite cofactor.
    Unresolved {
        #[serde(serialize_with = "ser_biguint")]
        cofactor: BigUint,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrivatePrime {
    pub index: usize,
    #[serde(flatten)]
    pub status: PrimeStatus,
}

/// Smallest found prime factor of `n > 1`.
///
/// A hit during trial division is the true smallest prime factor, so the
/// rest of `n` is left unfactored.
fn smallest_prime_factor(n: &BigUint, effort: Effort) -> PrimeStatus {
    for &p in primes_up_to(effort.trial_bound).iter() {
        let pb = BigUint::from(p);
        if &pb * &pb > *n {
            return PrimeStatus::Prime { prime: n.clone() };
        }
        if (n % p).is_zero() {
            return PrimeStatus::Prime { prime: pb };
        }
    }
    if is_probable_prime_u(n) {
        return PrimeStatus::Prime { prime: n.clone() };
    }
    let f = factor(&BigInt::from(n.clone()), effort);
    match f.prime_powers.into_iter().next() {
        Some(pp) => PrimeStatus::Prime { prime: pp.prime },
        None => PrimeStatus::Unresolved {
            cofactor: f.cofactor.expect("n > 1 has a prime or a cofactor"),
        },
    }
}

/// Smallest found prime factor of each term with `|a_n| > 1`.
///
/// On a pairwise-coprime sequence the returned primes are private, hence
/// pairwise distinct.
pub fn private_primes(terms: &[BigInt], first_index: usize, effort: Effort) -> Vec<PrivatePrime> {
    terms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let index = first_index + i;
            if a.magnitude() <= &BigUint::one() {
                return PrivatePrime {
                    index,
                    status: PrimeStatus::Skipped,
                };
            }
            PrivatePrime {
                index,
                status: smallest_prime_factor(a.magnitude(), effort),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimitiveReport {
    pub index: usize,
    #[serde(serialize_with = "ser_primes")]
    pub primitive: Vec<BigUint>,
    #[serde(serialize_with = "ser_primes")]
    pub imprimitive: Vec<BigUint>,
    #[serde(serialize_with = "ser_opt_biguint")]
    pub unresolved_cofactor: Option<BigUint>,
    /// Whether the unresolved cofactor shares no factor with earlier terms
    /// (then all of its primes are primitive).
    pub cofactor_coprime_to_earlier: Option<bool>,
}

fn ser_primes<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for p in v {
        seq.serialize_element(&p.to_string())?;
    }
    seq.end()
}

impl PrimitiveReport {
    /// `Some(true)` if a primitive prime is known to exist, `Some(false)` if
    /// the factorization is complete and none exists, `None` if undecided.
    pub fn has_primitive(&self) -> Option<bool> {
        if !self.primitive.is_empty() || self.cofactor_coprime_to_earlier == Some(true) {
            Some(true)
        } else if self.unresolved_cofactor.is_none() {
            Some(false)
        } else {
            None
        }
    }
}

/// Prime factors of `terms[upto]` dividing no `terms[m]`, `1 <= m < upto`.
///
/// Index 0 is excluded from the comparison, matching the indexing of orbits
/// of 0 where `x_0 = 0`.
///
/// # Panics
/// If `terms[upto]` is zero or out of range.
pub fn primitive_primes(terms: &[BigInt], upto: usize, effort: Effort) -> PrimitiveReport {
    let target = &terms[upto];
    assert!(!target.is_zero(), "x_{upto} is zero");
    let earlier = &terms[1.min(upto)..upto];
    let f = factor(target, effort);
    let mut primitive = Vec::new();
    let mut imprimitive = Vec::new();
    for p in f.primes() {
        let pi = BigInt::from(p.clone());
        if earlier.iter().any(|x| divides(&pi, x)) {
            imprimitive.push(p.clone());
        } else {
            primitive.push(p.clone());
        }
    }
    let cofactor_coprime_to_earlier = f.cofactor.as_ref().map(|c| {
        earlier
            .iter()
            .all(|x| gcd_abs(c, x.magnitude()).is_one())
    });
    PrimitiveReport {
        index: upto,
        primitive,
        imprimitive,
        unresolved_cofactor: f.cofactor,
        cofactor_coprime_to_earlier,
    }
}
