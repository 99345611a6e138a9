//! Strong divisibility of orbits of 0, `gcd(x_m, x_n) = |x_{gcd(m, n)}|`,
//! and the growth bound on `gcd(x_m, x_n)` for orbits of other points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::gcd;
use crate::growth::interval::Dyadic;
use crate::growth::TauEstimate;
use crate::orbit::{self, Orbit, OrbitError};
use crate::polynomial::IntPoly;
use crate::serde_str;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivError {
    #[error("the orbit of 0 is not wandering")]
    NotWandering,
    #[error("the orbit of the start value is not wandering")]
    StartNotWandering,
    #[error("the gcd bound needs degree at least 2")]
    DegreeTooSmall,
    #[error("tau estimate horizon {horizon} exceeds upto {upto}")]
    HorizonTooSmall { horizon: usize, upto: usize },
    #[error("indices must be at least 1")]
    ZeroIndex,
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivViolation {
    pub m: usize,
    pub n: usize,
    #[serde(with = "serde_str")]
    pub gcd: BigInt,
    #[serde(with = "serde_str")]
    pub expected: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The gcd lies between the two integer-exponent bounds around `d^{n/2}`.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub m: usize,
    pub n: usize,
    #[serde(with = "serde_str")]
    pub gcd: BigInt,
    /// `floor(2 hi^e)` with `e = isqrt(d^n) <= d^{n/2}`, a lower estimate of
    /// `2 hi^{d^{n/2}}`; a pass against it is a pass against the bound.
    #[serde(with = "serde_str")]
    pub bound: BigInt,
    pub exponent: u64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DivSeqReport {
    pub checked_pairs: usize,
    pub violations: Vec<DivViolation>,
    pub bound_checks: Vec<BoundCheck>,
    /// Pairs below the estimate's horizon, left unverified.
    pub unchecked: Vec<(usize, usize)>,
}

impl DivSeqReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.bound_checks.iter().all(|b| b.verdict == Verdict::Pass)
    }
}

fn require_zero_wandering(poly: &IntPoly) -> Result<(), DivError> {
    match orbit::is_wandering(poly, &BigInt::zero()) {
        Ok(true) => Ok(()),
        Ok(false) | Err(OrbitError::DegreeZero) => Err(DivError::NotWandering),
        Err(e) => Err(e.into()),
    }
}

/// Checks `gcd(x_m, x_n) = |x_{gcd(m,n)}|` for `1 <= m < n <= upto`, `x_k = f^k(0)`.
pub fn check_strong_divisibility(poly: &IntPoly, upto: usize) -> Result<DivSeqReport, DivError> {
    require_zero_wandering(poly)?;
    let mut orb = Orbit::new(poly.clone(), BigInt::zero());
    let xs = orb.extend(upto)?.to_vec();
    Ok(check_terms(&xs))
}

/// Same check on an externally supplied sequence; `terms[0]` is `x_1`.
pub fn check_strong_divisibility_terms(terms: &[BigInt]) -> DivSeqReport {
    let mut xs = Vec::with_capacity(terms.len() + 1);
    xs.push(BigInt::zero());
    xs.extend_from_slice(terms);
    check_terms(&xs)
}

fn check_terms(xs: &[BigInt]) -> DivSeqReport {
    let upto = xs.len() - 1;
    let mut report = DivSeqReport::default();
    for n in 2..=upto {
        for m in 1..n {
            let g = gcd(&xs[m], &xs[n]);
            let expected = xs[m.gcd(&n)].abs();
            report.checked_pairs += 1;
            if g != expected {
                report.violations.push(DivViolation {
                    m,
                    n,
                    gcd: g,
                    expected,
                });
            }
        }
    }
    report
        .violations
        .sort_by_key(|v| (v.m, v.n));
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdStep {
    pub i: usize,
    pub j: usize,
    #[serde(with = "serde_str")]
    pub gcd: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdTrace {
    /// The starting pair `(n, m)` followed by one entry per reduction.
    pub steps: Vec<GcdStep>,
    pub final_index: usize,
    #[serde(with = "serde_str")]
    pub final_value: BigInt,
}

impl GcdTrace {
    /// Number of reductions, equal to the Euclidean step count on `(m, n)`.
    pub fn reductions(&self) -> usize {
        self.steps.len() - 1
    }
}

/// Mirrors Euclid on the indices: `(n, m) -> (n mod m, m) -> ...` until one
/// index is 0, recording `gcd(x_i, x_j)` at each pair (with `x_0 = 0`).
pub fn gcd_reduce(poly: &IntPoly, m: usize, n: usize) -> Result<GcdTrace, DivError> {
    if m == 0 || n == 0 {
        return Err(DivError::ZeroIndex);
    }
    require_zero_wandering(poly)?;
    let mut orb = Orbit::new(poly.clone(), BigInt::zero());
    let xs = orb.extend(m.max(n))?.to_vec();
    let step = |i: usize, j: usize| GcdStep {
        i,
        j,
        gcd: gcd(&xs[i], &xs[j]),
    };
    let (mut i, mut j) = (n, m);
    let mut steps = vec![step(i, j)];
    while i != 0 && j != 0 {
        if i >= j {
            i %= j;
        } else {
            j %= i;
        }
        steps.push(step(i, j));
    }
    let final_index = i.max(j);
    Ok(GcdTrace {
        steps,
        final_index,
        final_value: xs[final_index].clone(),
    })
}

/// Checks `gcd(x_m, x_n) <= 2 tau_*^{d^{n/2}}` for `0 <= m < n <= upto`, with
/// `tau_*` the larger upper end of `tau` (orbit of `start`) and `tau0` (orbit
/// of 0, absent when 0 is preperiodic).
pub fn check_gcd_bound(
    poly: &IntPoly,
    start: &BigInt,
    upto: usize,
    tau: &TauEstimate,
    tau0: Option<&TauEstimate>,
) -> Result<DivSeqReport, DivError> {
    let d = poly.degree();
    if d < 2 {
        return Err(DivError::DegreeTooSmall);
    }
    match orbit::is_wandering(poly, start) {
        Ok(true) => {}
        Ok(false) | Err(OrbitError::DegreeZero) => return Err(DivError::StartNotWandering),
        Err(e) => return Err(e.into()),
    }
    let horizon = tau.horizon.max(tau0.map_or(0, |t| t.horizon));
    if horizon > upto {
        return Err(DivError::HorizonTooSmall { horizon, upto });
    }
    let hi = match tau0 {
        Some(t0) if t0.hi > tau.hi => t0.hi.clone(),
        _ => tau.hi.clone(),
    };
    let mut orb = Orbit::new(poly.clone(), start.clone());
    let xs = orb.extend(upto)?.to_vec();
    let two = Dyadic::from_int(2);

    let mut report = DivSeqReport::default();
    for n in 1..=upto {
        let dn = BigInt::from(d).pow(n as u32);
        let e = dn.sqrt();
        let e_u64 = u64::try_from(&e).expect("exponent fits in u64");
        // e^2 = d^n exactly when the bound exponent is an integer
        let e_is_exact = &e * &e == dn;
        let low_bound = two.mul(&hi.pow(e_u64)).floor();
        let high_bound = if e_is_exact {
            low_bound.clone()
        } else {
            two.mul(&hi.pow(e_u64 + 1)).ceil()
        };
        for m in 0..n {
            if n < horizon {
                report.unchecked.push((m, n));
                continue;
            }
            let g = gcd(&xs[m], &xs[n]);
            let verdict = if g <= low_bound {
                Verdict::Pass
            } else if g > high_bound {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            report.checked_pairs += 1;
            report.bound_checks.push(BoundCheck {
                m,
                n,
                gcd: g,
                bound: low_bound.clone(),
                exponent: e_u64,
                verdict,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::estimate_tau;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn mersenne_strong_divisibility() {
        let r = check_strong_divisibility(&p("2x+1"), 12).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.checked_pairs, 66);
        let t = gcd_reduce(&p("2x+1"), 4, 6).unwrap();
        assert_eq!(t.final_value, bi(3));
    }

    #[test]
    fn shifted_linear_map() {
        let r = check_strong_divisibility(&p("2x+3"), 12).unwrap();
        assert!(r.violations.is_empty());
    }

    #[test]
    fn strong_divisibility_errors() {
        assert_eq!(
            check_strong_divisibility(&p("x^2-2x+2"), 5).unwrap_err(),
            DivError::NotWandering
        );
    }

    #[test]
    fn external_terms_report_violations() {
        let r = check_strong_divisibility_terms(&[2, 4, 6, 8].map(bi));
        assert!(r.violations.is_empty());
        let r = check_strong_divisibility_terms(&[1, 3, 7, 14].map(bi));
        assert_eq!(
            r.violations,
            vec![
                DivViolation { m: 2, n: 4, gcd: bi(1), expected: bi(3) },
                DivViolation { m: 3, n: 4, gcd: bi(7), expected: bi(1) },
            ]
        );
    }

    #[test]
    fn gcd_reduce_examples() {
        let t = gcd_reduce(&p("2x+1"), 4, 6).unwrap();
        let pairs: Vec<_> = t.steps.iter().map(|s| (s.i, s.j)).collect();
        assert_eq!(pairs, vec![(6, 4), (2, 4), (2, 0)]);
        assert_eq!(t.final_index, 2);
        assert!(t.steps.iter().all(|s| s.gcd == bi(3)));

        let t = gcd_reduce(&p("2x+1"), 5, 7).unwrap();
        assert_eq!(t.final_index, 1);
        assert_eq!(t.final_value, bi(1));

        let t = gcd_reduce(&p("2x+1"), 3, 3).unwrap();
        assert_eq!(t.final_index, 3);
        assert_eq!(t.reductions(), 1);
    }

    #[test]
    fn gcd_bound_examples() {
        let f = p("x^2-x+1");
        let tau = estimate_tau(&f, &bi(2), 6, 128).unwrap();
        let tau0 = estimate_tau(&f, &bi(0), 6, 128);
        // 0 -> 1 -> 1 is preperiodic
        assert!(tau0.is_err());
        let r = check_gcd_bound(&f, &bi(2), 8, &tau, None).unwrap();
        assert!(r.passed());
        assert!(r.bound_checks.iter().all(|b| b.gcd == bi(1)));

        let f = p("x^2-2x+2");
        let tau = estimate_tau(&f, &bi(4), 6, 128).unwrap();
        let r = check_gcd_bound(&f, &bi(4), 8, &tau, None).unwrap();
        assert!(r.passed());
        assert!(r.bound_checks.iter().all(|b| b.gcd <= bi(2)));

        assert_eq!(
            check_gcd_bound(&p("2x+3"), &bi(-2), 8, &tau, None).unwrap_err(),
            DivError::DegreeTooSmall
        );
    }
}
