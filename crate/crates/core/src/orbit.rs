//! Exact orbits `x_0 -> f(x_0) -> ...`, the finite wandering criteria, and
//! cycle location.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::polynomial::IntPoly;
use crate::serde_str;

/// Default cap on the bit length of any orbit term.
pub const DEFAULT_MAX_BITS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("orbit term x_{index} would exceed {max_bits} bits")]
    CapExceeded { index: usize, max_bits: u64 },
    #[error("the map is constant; wandering is undefined")]
    DegreeZero,
    #[error("cycle horizon must be at least 5, got {0}")]
    HorizonTooShort(usize),
}

/// A lazily extended orbit with a bit-length cap on its terms.
#[derive(Debug, Clone)]
pub struct Orbit {
    poly: IntPoly,
    terms: Vec<BigInt>,
    max_bits: u64,
}

impl Orbit {
    pub fn new(poly: IntPoly, start: BigInt) -> Self {
        Self::with_max_bits(poly, start, DEFAULT_MAX_BITS)
    }

    pub fn with_max_bits(poly: IntPoly, start: BigInt, max_bits: u64) -> Self {
        Orbit {
            poly,
            terms: vec![start],
            max_bits,
        }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn start(&self) -> &BigInt {
        &self.terms[0]
    }

    pub fn max_bits(&self) -> u64 {
        self.max_bits
    }

    /// Terms materialized so far.
    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    /// Materializes `x_0..=x_upto` and returns them.
    pub fn extend(&mut self, upto: usize) -> Result<&[BigInt], OrbitError> {
        while self.terms.len() <= upto {
            let next = self.poly.eval(self.terms.last().expect("orbit has a start"));
            if next.bits() > self.max_bits {
                return Err(OrbitError::CapExceeded {
                    index: self.terms.len(),
                    max_bits: self.max_bits,
                });
            }
            self.terms.push(next);
        }
        Ok(&self.terms[..=upto])
    }

    pub fn term(&mut self, n: usize) -> Result<&BigInt, OrbitError> {
        self.extend(n)?;
        Ok(&self.terms[n])
    }
}

/// `f^k(x)` for `k = 0..=n`, without a bit cap (used for tiny prefixes only).
pub fn prefix(poly: &IntPoly, x: &BigInt, n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(x.clone());
    for _ in 0..n {
        let next = poly.eval(out.last().unwrap());
        out.push(next);
    }
    out
}

/// 0 is strictly preperiodic iff `f^2(0) = f^4(0) != 0`.
pub fn is_zero_strictly_preperiodic(poly: &IntPoly) -> bool {
    let z = prefix(poly, &BigInt::zero(), 4);
    z[2] == z[4] && !z[2].is_zero()
}

/// Whether the orbit of `start` never repeats.
///
/// Degree >= 2 uses `x_2 != x_4`; linear maps use the closed form of the orbit.
pub fn is_wandering(poly: &IntPoly, start: &BigInt) -> Result<bool, OrbitError> {
    match poly.degree() {
        0 => Err(OrbitError::DegreeZero),
        1 => {
            let a = poly.coeff(1);
            let b = poly.coeff(0);
            if a.is_one() {
                // x_n = x_0 + n b
                return Ok(!b.is_zero());
            }
            if a == -BigInt::one() {
                // x -> b - x is an involution
                return Ok(false);
            }
            // |a| >= 2: x_n - p = a^n (x_0 - p) with p = b / (1 - a); only the
            // fixed point itself repeats.
            let one_minus_a = BigInt::one() - &a;
            Ok(start * &one_minus_a != b)
        }
        _ => {
            let x = prefix(poly, start, 4);
            Ok(x[2] != x[4])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleInfo {
    pub preperiod: usize,
    pub period: usize,
    #[serde(with = "serde_str::vec")]
    pub cycle: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CycleOutcome {
    Cycle(CycleInfo),
    Wandering,
}

impl CycleOutcome {
    pub fn is_wandering(&self) -> bool {
        matches!(self, CycleOutcome::Wandering)
    }
}

/// Radius beyond which `|f(x)| > |x|`, so an orbit leaving it can never repeat.
///
/// `None` for maps that do not expand (`x + b`, `-x + b`) or are constant.
fn escape_radius(poly: &IntPoly) -> Option<BigInt> {
    let d = poly.degree();
    match d {
        0 => None,
        1 => {
            let a = poly.coeff(1);
            if a.abs().is_one() {
                None
            } else {
                // |a x + b| >= 2|x| - |b| > |x| once |x| > |b|
                Some(poly.coeff(0).abs() + 1)
            }
        }
        _ => {
            // |f(x)| >= |x|^{d-1} (|x| - S) >= 2|x|^{d-1} > |x| once |x| >= S + 2
            let s: BigInt = poly.coeffs()[..d].iter().map(|c| c.abs()).sum();
            Some(s + 2)
        }
    }
}

/// Searches the first `horizon` terms for a repeat.
///
/// A term that escapes past the expansion radius proves the orbit wanders,
/// which keeps the search exact without materializing enormous terms.
pub fn detect_cycle(
    poly: &IntPoly,
    start: &BigInt,
    horizon: usize,
) -> Result<CycleOutcome, OrbitError> {
    if horizon < 5 {
        return Err(OrbitError::HorizonTooShort(horizon));
    }
    let radius = escape_radius(poly);
    let mut orbit = Orbit::new(poly.clone(), start.clone());
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    for n in 0..horizon {
        let x = orbit.term(n)?.clone();
        if let Some(&first) = seen.get(&x) {
            return Ok(CycleOutcome::Cycle(CycleInfo {
                preperiod: first,
                period: n - first,
                cycle: orbit.terms()[first..n].to_vec(),
            }));
        }
        if radius.as_ref().is_some_and(|r| x.abs() >= *r) {
            return Ok(CycleOutcome::Wandering);
        }
        seen.insert(x, n);
    }
    Ok(CycleOutcome::Wandering)
}

/// A cycle of length >= the requested minimum found by [`search_long_cycles`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LongCycle {
    #[serde(with = "serde_str::vec")]
    pub coeffs: Vec<BigInt>,
    #[serde(with = "serde_str")]
    pub start: BigInt,
    pub info: CycleInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleSearchReport {
    pub maps: u64,
    pub orbits: u64,
    pub cycles_found: u64,
    pub long_cycles: Vec<LongCycle>,
}

/// Runs [`detect_cycle`] on every map with degree <= `degree_bound`,
/// coefficients in `[-coeff_bound, coeff_bound]`, and every start with
/// `|start| <= start_bound`, collecting cycles of length >= `min_len`.
pub fn search_long_cycles(
    coeff_bound: u32,
    degree_bound: u32,
    start_bound: u32,
    min_len: usize,
    horizon: usize,
) -> Result<CycleSearchReport, OrbitError> {
    let b = coeff_bound as i64;
    let s = start_bound as i64;
    let len = degree_bound as usize + 1;
    let mut report = CycleSearchReport {
        maps: 0,
        orbits: 0,
        cycles_found: 0,
        long_cycles: Vec::new(),
    };
    let mut coeffs = vec![-b; len];
    loop {
        report.maps += 1;
        let poly = IntPoly::from_i64(&coeffs);
        for x in -s..=s {
            report.orbits += 1;
            let start = BigInt::from(x);
            if let CycleOutcome::Cycle(info) = detect_cycle(&poly, &start, horizon)? {
                report.cycles_found += 1;
                if info.period >= min_len {
                    report.long_cycles.push(LongCycle {
                        coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
                        start,
                        info,
                    });
                }
            }
        }
        let mut i = 0;
        loop {
            if i == len {
                return Ok(report);
            }
            if coeffs[i] < b {
                coeffs[i] += 1;
                break;
            }
            coeffs[i] = -b;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| bi(x)).collect()
    }

    #[test]
    fn extend_examples() {
        let mut o = Orbit::new(p("x^2-x+1"), bi(2));
        assert_eq!(o.extend(4).unwrap(), ints(&[2, 3, 7, 43, 1807]).as_slice());
        let mut o = Orbit::new(p("x^2-2x+2"), bi(4));
        assert_eq!(o.extend(3).unwrap(), ints(&[4, 10, 82, 6562]).as_slice());
        let mut o = Orbit::new(p("x^2-6x-1"), bi(3));
        assert_eq!(
            o.extend(4).unwrap(),
            ints(&[3, -10, 159, 24326, 591608319]).as_slice()
        );
    }

    #[test]
    fn extend_reports_first_capped_index() {
        // 2 -> 3 -> 7 -> 43 -> 1807 (11 bits) -> 3263443 (22 bits)
        let mut o = Orbit::with_max_bits(p("x^2-x+1"), bi(2), 12);
        assert_eq!(
            o.extend(8).unwrap_err(),
            OrbitError::CapExceeded {
                index: 5,
                max_bits: 12
            }
        );
        assert_eq!(o.terms().len(), 5);
    }

    #[test]
    fn strict_preperiodicity_of_zero() {
        assert!(is_zero_strictly_preperiodic(&p("x^2-x+1")));
        assert!(!is_zero_strictly_preperiodic(&p("2x+1")));
        assert!(!is_zero_strictly_preperiodic(&p("x")));
    }

    #[test]
    fn wandering_examples() {
        assert!(is_wandering(&p("x^2-x+1"), &bi(2)).unwrap());
        assert!(!is_wandering(&p("x^2-2x+2"), &bi(2)).unwrap());
        assert!(is_wandering(&p("3-x(x-3)^2"), &bi(2)).unwrap());
        assert_eq!(is_wandering(&p("5"), &bi(0)), Err(OrbitError::DegreeZero));
    }

    #[test]
    fn wandering_linear_closed_form() {
        assert!(is_wandering(&p("x+3"), &bi(0)).unwrap());
        assert!(!is_wandering(&p("x"), &bi(4)).unwrap());
        assert!(!is_wandering(&p("7-x"), &bi(4)).unwrap());
        // fixed point of 3x - 4 is 2
        assert!(!is_wandering(&p("3x-4"), &bi(2)).unwrap());
        assert!(is_wandering(&p("3x-4"), &bi(3)).unwrap());
        assert!(is_wandering(&p("2x+1"), &bi(0)).unwrap());
    }

    #[test]
    fn cycle_examples() {
        let c = detect_cycle(&p("x^2-6x-1"), &bi(0), 64).unwrap();
        assert_eq!(
            c,
            CycleOutcome::Cycle(CycleInfo {
                preperiod: 1,
                period: 2,
                cycle: ints(&[-1, 6])
            })
        );
        let c = detect_cycle(&p("1+x+x^2-x^3"), &bi(0), 64).unwrap();
        assert_eq!(
            c,
            CycleOutcome::Cycle(CycleInfo {
                preperiod: 2,
                period: 2,
                cycle: ints(&[2, -1])
            })
        );
        let c = detect_cycle(&p("x^2-2"), &bi(0), 64).unwrap();
        assert_eq!(
            c,
            CycleOutcome::Cycle(CycleInfo {
                preperiod: 2,
                period: 1,
                cycle: ints(&[2])
            })
        );
        assert!(detect_cycle(&p("x^2-x+1"), &bi(2), 64).unwrap().is_wandering());
        assert!(detect_cycle(&p("x+1"), &bi(0), 64).unwrap().is_wandering());
        assert_eq!(
            detect_cycle(&p("x^2"), &bi(0), 4),
            Err(OrbitError::HorizonTooShort(4))
        );
    }

    #[test]
    fn extend_is_deterministic() {
        let a = Orbit::new(p("x^2-6x-1"), bi(3)).extend(8).unwrap().to_vec();
        let b = Orbit::new(p("x^2-6x-1"), bi(3)).extend(8).unwrap().to_vec();
        assert_eq!(a, b);
    }

    #[test]
    fn small_cycle_search() {
        let r = search_long_cycles(2, 2, 5, 3, 64).unwrap();
        assert_eq!(r.maps, 125);
        assert_eq!(r.orbits, 125 * 11);
        assert!(r.cycles_found > 0);
        assert!(r.long_cycles.is_empty());
    }
}
