//! Mills-type constants: primes `p_{n+1} in (p_n^3, (p_n + 1)^3)` and an
//! interval of `tau` with `floor(tau^{3^n}) = p_n` for every computed `n`.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use super::interval::{Dyadic, Interval};
use super::GrowthError;
use crate::factorint::is_probable_prime;
use crate::serde_str;

/// Largest working precision tried before giving up on the floor check.
const MAX_PRECISION: i64 = 1 << 20;

/// Picks a prime strictly between `lo` and `hi`.
pub trait PrimeChoice {
    fn choose(&self, lo: &BigInt, hi: &BigInt) -> Option<BigInt>;
}

/// Smallest prime in the open interval, found by scanning upward.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmallestPrime;

impl PrimeChoice for SmallestPrime {
    fn choose(&self, lo: &BigInt, hi: &BigInt) -> Option<BigInt> {
        let mut c = lo + 1;
        while &c < hi {
            if is_probable_prime(&c) {
                return Some(c);
            }
            c += 1;
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FloorCheck {
    pub n: usize,
    #[serde(with = "serde_str")]
    pub from_lo: BigInt,
    #[serde(with = "serde_str")]
    pub from_hi: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MillsResult {
    #[serde(with = "serde_str::vec")]
    pub primes: Vec<BigInt>,
    /// Dyadic interval inside `[p_L^{3^-L}, (p_L + 1)^{3^-L})`, `L = count - 1`.
    pub tau: Interval,
    pub precision_bits: u32,
    pub floor_checks: Vec<FloorCheck>,
}

pub fn mills_sequence(p0: &BigInt, count: usize) -> Result<MillsResult, GrowthError> {
    mills_sequence_with(p0, count, &SmallestPrime)
}

pub fn mills_sequence_with(
    p0: &BigInt,
    count: usize,
    choice: &dyn PrimeChoice,
) -> Result<MillsResult, GrowthError> {
    if p0.is_negative() || !is_probable_prime(p0) {
        return Err(GrowthError::NotPrime(p0.clone()));
    }
    let count = count.max(1);
    let mut primes = vec![p0.clone()];
    while primes.len() < count {
        let p = primes.last().unwrap();
        let lo = p.pow(3);
        let hi = (p + 1u32).pow(3);
        let next = choice
            .choose(&lo, &hi)
            .ok_or(GrowthError::EmptyInterval(primes.len() - 1))?;
        primes.push(next);
    }

    let last = count - 1;
    let p_last = &primes[last];
    let mut frac = p_last.bits() as i64 + 2 * last as i64 + 32;
    loop {
        if let Some((tau, floor_checks)) = certify(&primes, frac) {
            return Ok(MillsResult {
                primes,
                tau,
                precision_bits: frac as u32,
                floor_checks,
            });
        }
        frac *= 2;
        if frac > MAX_PRECISION {
            return Err(GrowthError::IntervalTooWide(last));
        }
    }
}

fn certify(primes: &[BigInt], frac: i64) -> Option<(Interval, Vec<FloorCheck>)> {
    let last = primes.len() - 1;
    let times = last as u32;
    let p = Dyadic::from_int(primes[last].clone());
    let p1 = Dyadic::from_int(&primes[last] + BigInt::one());
    let lo = Interval::point(p).iterated_root(3, times, frac).hi;
    let mut hi = Interval::point(p1.clone()).iterated_root(3, times, frac).lo;
    if hi.pow(3u64.pow(times)) >= p1 {
        // the root was exact; the right end is open
        hi = hi.sub(&Dyadic::pow2(-frac));
    }
    if lo > hi {
        return None;
    }
    let mut checks = Vec::with_capacity(primes.len());
    for (n, pn) in primes.iter().enumerate() {
        let e = 3u64.pow(n as u32);
        let from_lo = lo.pow(e).floor();
        let from_hi = hi.pow(e).floor();
        if &from_lo != pn || &from_hi != pn {
            return None;
        }
        checks.push(FloorCheck {
            n,
            from_lo,
            from_hi,
        });
    }
    Some((Interval::new(lo, hi), checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn mills_examples() {
        let r = mills_sequence(&bi(2), 3).unwrap();
        assert_eq!(r.primes, vec![bi(2), bi(11), bi(1361)]);
        let r = mills_sequence(&bi(2), 4).unwrap();
        assert_eq!(r.primes[3], bi(2521008887));
        assert_eq!(r.floor_checks.len(), 4);
    }

    #[test]
    fn single_term_interval() {
        let r = mills_sequence(&bi(7), 1).unwrap();
        assert_eq!(r.primes, vec![bi(7)]);
        assert_eq!(r.tau.lo, Dyadic::from_int(7));
        assert!(r.tau.hi < Dyadic::from_int(8));
    }

    #[test]
    fn rejects_composite_seed() {
        assert_eq!(
            mills_sequence(&bi(9), 2).unwrap_err(),
            GrowthError::NotPrime(bi(9))
        );
    }

    struct Largest;

    impl PrimeChoice for Largest {
        fn choose(&self, lo: &BigInt, hi: &BigInt) -> Option<BigInt> {
            let mut c = hi - 1;
            while &c > lo {
                if is_probable_prime(&c) {
                    return Some(c);
                }
                c -= 1;
            }
            None
        }
    }

    #[test]
    fn strategy_hook() {
        let r = mills_sequence_with(&bi(2), 3, &Largest).unwrap();
        assert_eq!(r.primes[1], bi(23));
        assert_eq!(r.floor_checks.len(), 3);
    }
}
