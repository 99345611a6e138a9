//! Pairwise coprime sequences extracted from wandering orbits.
//!
//! Three rules, chosen by the behaviour of 0 under the map:
//!
//! * 0 strictly preperiodic: `a_n = x_n / gcd(x_n, l(f))` with
//!   `l(f) = lcm[f(0), f^2(0)]`, indexed from 0.
//! * 0 fixed: `f = x^r g`, `a_{n+1} = g(x_n) / gcd(g(x_n), g(0))`, indexed from 1.
//! * 0 of period 2: `f^2 = x^r G`, `a_{n+2} = G(x_n) / gcd(G(x_n), G(0) f(0))`,
//!   indexed from 2.
//!
//! Terms keep the sign of the value they are cut from.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{divides, gcd, lcm};
use crate::factorint::{self, Effort, PrivatePrime};
use crate::orbit::{self, Orbit, OrbitError};
use crate::polynomial::IntPoly;
use crate::serde_str;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoprimeError {
    #[error("f(0) or f^2(0) is zero; use the period-1 or period-2 rule")]
    ZeroAtOrigin,
    #[error("0 is not strictly preperiodic under the map")]
    NotPreperiodic,
    #[error("0 is not periodic of exact period 2 under the map")]
    NotPeriod2,
    #[error("the orbit of the start value is not wandering")]
    NotWandering,
    #[error("polynomial has nonzero constant term")]
    NonzeroConstantTerm,
    #[error("the zero polynomial has no x^r decomposition")]
    ZeroPolynomial,
    #[error("cofactor after removing x^r is constant")]
    ConstantCofactor,
    #[error("maps of the form a - x are excluded")]
    InvolutionExcluded,
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Preperiodic,
    Period1,
    Period2,
}

impl Rule {
    pub fn first_index(self) -> usize {
        match self {
            Rule::Preperiodic => 0,
            Rule::Period1 => 1,
            Rule::Period2 => 2,
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rule::Preperiodic => "preperiodic",
            Rule::Period1 => "period1",
            Rule::Period2 => "period2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DivisorData {
    Preperiodic {
        #[serde(with = "serde_str")]
        ell: BigInt,
    },
    Period1 {
        r: usize,
        #[serde(with = "serde_str::poly")]
        g: IntPoly,
        #[serde(with = "serde_str")]
        g0: BigInt,
    },
    Period2 {
        r: usize,
        #[serde(with = "serde_str::poly")]
        big_g: IntPoly,
        /// `G(0) f(0)`
        #[serde(with = "serde_str")]
        modulus: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoprimeSeq {
    pub rule: Rule,
    #[serde(with = "serde_str::poly")]
    pub poly: IntPoly,
    #[serde(with = "serde_str")]
    pub start: BigInt,
    pub first_index: usize,
    #[serde(with = "serde_str::vec")]
    pub terms: Vec<BigInt>,
    pub divisor_data: DivisorData,
    /// Indices with `|a_n| = 1`.
    pub unit_indices: Vec<usize>,
    /// Integer `x` with `|cofactor(x) / gcd(.., modulus)| = 1`, when the
    /// modulus could be factored (period rules only).
    #[serde(serialize_with = "ser_opt_vec")]
    pub exceptional_roots: Option<Vec<BigInt>>,
    /// Indices whose source orbit term lies in `exceptional_roots`.
    pub flagged_indices: Vec<usize>,
}

fn ser_opt_vec<S: serde::Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(xs) => serde_str::vec::serialize(xs, s),
        None => s.serialize_none(),
    }
}

impl CoprimeSeq {
    /// `(index, a_index)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.terms
            .iter()
            .enumerate()
            .map(move |(i, a)| (self.first_index + i, a))
    }

    pub fn term(&self, index: usize) -> Option<&BigInt> {
        index
            .checked_sub(self.first_index)
            .and_then(|i| self.terms.get(i))
    }

    /// First pair `(m, n)` of indices with `gcd(a_m, a_n) != 1`.
    pub fn first_common_factor(&self) -> Option<(usize, usize)> {
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if !gcd(&self.terms[i], &self.terms[j]).is_one() {
                    return Some((self.first_index + i, self.first_index + j));
                }
            }
        }
        None
    }

    pub fn is_pairwise_coprime(&self) -> bool {
        self.first_common_factor().is_none()
    }

    pub fn private_primes(&self, effort: Effort) -> Vec<PrivatePrime> {
        factorint::private_primes(&self.terms, self.first_index, effort)
    }
}

/// `lcm(|f(0)|, |f^2(0)|)`.
pub fn ell(poly: &IntPoly) -> Result<BigInt, CoprimeError> {
    let z = orbit::prefix(poly, &BigInt::zero(), 2);
    if z[1].is_zero() || z[2].is_zero() {
        return Err(CoprimeError::ZeroAtOrigin);
    }
    Ok(lcm(&z[1], &z[2]))
}

fn require_wandering(poly: &IntPoly, start: &BigInt) -> Result<(), CoprimeError> {
    match orbit::is_wandering(poly, start) {
        Ok(true) => Ok(()),
        Ok(false) | Err(OrbitError::DegreeZero) => Err(CoprimeError::NotWandering),
        Err(e) => Err(e.into()),
    }
}

fn unit_indices(terms: &[BigInt], first_index: usize) -> Vec<usize> {
    terms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.abs().is_one())
        .map(|(i, _)| first_index + i)
        .collect()
}

/// Strictly preperiodic rule: `a_n = x_n / gcd(x_n, l(f))`, `n = 0..count`.
pub fn coprime_preperiodic(
    poly: &IntPoly,
    start: &BigInt,
    count: usize,
) -> Result<CoprimeSeq, CoprimeError> {
    if !orbit::is_zero_strictly_preperiodic(poly) {
        return Err(CoprimeError::NotPreperiodic);
    }
    require_wandering(poly, start)?;
    let l = ell(poly)?;
    let mut orbit = Orbit::new(poly.clone(), start.clone());
    let xs = orbit.extend(count.saturating_sub(1))?;
    let terms: Vec<BigInt> = xs[..count].iter().map(|x| x / gcd(x, &l)).collect();
    Ok(CoprimeSeq {
        rule: Rule::Preperiodic,
        poly: poly.clone(),
        start: start.clone(),
        first_index: 0,
        unit_indices: unit_indices(&terms, 0),
        terms,
        divisor_data: DivisorData::Preperiodic { ell: l },
        exceptional_roots: None,
        flagged_indices: Vec::new(),
    })
}

/// `poly = x^r g` with `g(0) != 0`, `r >= 1` maximal.
pub fn decompose_xr(poly: &IntPoly) -> Result<(usize, IntPoly), CoprimeError> {
    if poly.is_zero() {
        return Err(CoprimeError::ZeroPolynomial);
    }
    let c = poly.coeffs();
    if !c[0].is_zero() {
        return Err(CoprimeError::NonzeroConstantTerm);
    }
    let r = c.iter().position(|v| !v.is_zero()).expect("nonzero polynomial");
    Ok((r, IntPoly::from_coeffs(c[r..].to_vec())))
}

/// Integer roots of `h`; `h` must not be the zero polynomial.
fn integer_roots(h: &IntPoly, effort: Effort) -> Option<Vec<BigInt>> {
    let c = h.coeffs();
    let low = c.iter().position(|v| !v.is_zero())?;
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(BigInt::zero());
    }
    if low == c.len() - 1 {
        return Some(roots);
    }
    // a nonzero root of x^low * q(x) divides q(0)
    for d in factorint::divisors(&c[low], effort)? {
        for cand in [d.clone(), -d] {
            if h.eval(&cand).is_zero() {
                roots.push(cand);
            }
        }
    }
    roots.sort();
    Some(roots)
}

/// Integers `x` with `cof(x) / gcd(cof(x), modulus) = +-1`, i.e. `cof(x)` a
/// signed divisor of `modulus`.
fn exceptional_roots(cof: &IntPoly, modulus: &BigInt, effort: Effort) -> Option<Vec<BigInt>> {
    let mut out = BTreeSet::new();
    for d in factorint::divisors(modulus, effort)? {
        for dd in [d.clone(), -d] {
            let h = cof - &IntPoly::constant(dd);
            out.extend(integer_roots(&h, effort)?);
        }
    }
    Some(out.into_iter().collect())
}

fn cofactor_sequence(
    poly: &IntPoly,
    start: &BigInt,
    count: usize,
    cof: &IntPoly,
    modulus: &BigInt,
    rule: Rule,
    divisor_data: DivisorData,
) -> Result<CoprimeSeq, CoprimeError> {
    let first_index = rule.first_index();
    let mut orbit = Orbit::new(poly.clone(), start.clone());
    let xs = orbit.extend(count.saturating_sub(1))?;
    let terms: Vec<BigInt> = xs[..count]
        .iter()
        .map(|x| {
            let v = cof.eval(x);
            &v / gcd(&v, modulus)
        })
        .collect();
    let roots = exceptional_roots(cof, modulus, Effort::default());
    let flagged_indices = match &roots {
        Some(rs) => xs[..count]
            .iter()
            .enumerate()
            .filter(|(_, x)| rs.binary_search(x).is_ok())
            .map(|(i, _)| first_index + i)
            .collect(),
        None => Vec::new(),
    };
    Ok(CoprimeSeq {
        rule,
        poly: poly.clone(),
        start: start.clone(),
        first_index,
        unit_indices: unit_indices(&terms, first_index),
        terms,
        divisor_data,
        exceptional_roots: roots,
        flagged_indices,
    })
}

/// Period-1 rule, terms `a_1..=a_count`.
pub fn coprime_period1(
    poly: &IntPoly,
    start: &BigInt,
    count: usize,
) -> Result<CoprimeSeq, CoprimeError> {
    let (r, g) = decompose_xr(poly)?;
    if g.is_constant() {
        return Err(CoprimeError::ConstantCofactor);
    }
    require_wandering(poly, start)?;
    let g0 = g.coeff(0);
    let data = DivisorData::Period1 {
        r,
        g: g.clone(),
        g0: g0.clone(),
    };
    cofactor_sequence(poly, start, count, &g, &g0, Rule::Period1, data)
}

/// Period-2 rule, terms `a_2..=a_{count+1}`.
pub fn coprime_period2(
    poly: &IntPoly,
    start: &BigInt,
    count: usize,
) -> Result<CoprimeSeq, CoprimeError> {
    let z = orbit::prefix(poly, &BigInt::zero(), 2);
    if z[1].is_zero() || !z[2].is_zero() {
        return Err(CoprimeError::NotPeriod2);
    }
    if (poly + &IntPoly::x()).is_constant() {
        return Err(CoprimeError::InvolutionExcluded);
    }
    let f2 = poly.compose(poly);
    let (r, big_g) = decompose_xr(&f2)?;
    if big_g.is_constant() {
        return Err(CoprimeError::ConstantCofactor);
    }
    require_wandering(poly, start)?;
    let modulus = big_g.coeff(0) * &z[1];
    let data = DivisorData::Period2 {
        r,
        big_g: big_g.clone(),
        modulus: modulus.clone(),
    };
    cofactor_sequence(poly, start, count, &big_g, &modulus, Rule::Period2, data)
}

/// Picks the rule from the orbit of 0 and builds `count` terms.
pub fn coprime_auto(
    poly: &IntPoly,
    start: &BigInt,
    count: usize,
) -> Result<CoprimeSeq, CoprimeError> {
    let z = orbit::prefix(poly, &BigInt::zero(), 2);
    if z[1].is_zero() {
        coprime_period1(poly, start, count)
    } else if z[2].is_zero() {
        coprime_period2(poly, start, count)
    } else {
        coprime_preperiodic(poly, start, count)
    }
}

pub fn coprime_with_rule(
    rule: Rule,
    poly: &IntPoly,
    start: &BigInt,
    count: usize,
) -> Result<CoprimeSeq, CoprimeError> {
    match rule {
        Rule::Preperiodic => coprime_preperiodic(poly, start, count),
        Rule::Period1 => coprime_period1(poly, start, count),
        Rule::Period2 => coprime_period2(poly, start, count),
    }
}

/// A chain `x -> y -> d` in the fixed-after-one family `0 -> a -> a` where
/// `d` is a proper signed divisor of `a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ExceptionalOrbit {
    pub a: i64,
    pub x: i64,
    pub y: i64,
    pub d: i64,
}

impl std::fmt::Display for ExceptionalOrbit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "a={}: {}->{}->{}", self.a, self.x, self.y, self.d)
    }
}

/// Exhaustive search for chains `x -> y -> d` compatible with a map
/// `f = a + x(x-a) h(x)`, `h` integral, where `d | a`, `d != a`, and `x`, `y`,
/// `d`, `a` are distinct.
///
/// Constraints: `x(x-a) | y-a`, `y(y-a) | d-a`, and `x-y | y-d` (since
/// `u - v | f(u) - f(v)`). `|x|, |y| <= x_bound`, `0 < a <= a_bound`.
pub fn search_exceptional_orbits(a_bound: i64, x_bound: i64) -> Vec<ExceptionalOrbit> {
    let mut out = Vec::new();
    for a in 1..=a_bound {
        let divs: Vec<i64> = (1..=a)
            .filter(|k| a % k == 0)
            .flat_map(|k| [k, -k])
            .filter(|&d| d != a)
            .collect();
        for x in -x_bound..=x_bound {
            if x == a {
                continue;
            }
            let xx = BigInt::from(x) * BigInt::from(x - a);
            for y in -x_bound..=x_bound {
                if y == x || y == a || !divides(&xx, &BigInt::from(y - a)) {
                    continue;
                }
                let yy = BigInt::from(y) * BigInt::from(y - a);
                for &d in &divs {
                    if d == x || d == y {
                        continue;
                    }
                    if divides(&yy, &BigInt::from(d - a))
                        && (y - d).is_multiple_of(&(x - y))
                    {
                        out.push(ExceptionalOrbit { a, x, y, d });
                    }
                }
            }
        }
    }
    out.sort();
    out
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
    fn ell_examples() {
        assert_eq!(ell(&p("x^2-x+1")).unwrap(), bi(1));
        assert_eq!(ell(&p("x^2-2x+2")).unwrap(), bi(2));
        assert_eq!(ell(&p("x^2-6x-1")).unwrap(), bi(6));
        assert_eq!(ell(&p("7+x^5(x-1)(x-7)")).unwrap(), bi(7));
        assert_eq!(ell(&p("x^2-5x+5")).unwrap(), bi(5));
        assert_eq!(ell(&p("2x+1")).unwrap(), bi(3));
        assert_eq!(ell(&p("x^2+x")), Err(CoprimeError::ZeroAtOrigin));
        assert_eq!(ell(&p("1-x^2")), Err(CoprimeError::ZeroAtOrigin));
    }

    #[test]
    fn preperiodic_examples() {
        let s = coprime_preperiodic(&p("x^2-2x+2"), &bi(4), 4).unwrap();
        assert_eq!(s.terms, ints(&[2, 5, 41, 3281]));
        let s = coprime_preperiodic(&p("x^2-6x-1"), &bi(3), 5).unwrap();
        assert_eq!(s.terms, ints(&[1, -5, 53, 12163, 197202773]));
        assert_eq!(s.unit_indices, vec![0]);
        let s = coprime_preperiodic(&p("x^2-x+1"), &bi(2), 5).unwrap();
        assert_eq!(s.terms, ints(&[2, 3, 7, 43, 1807]));
        assert!(s.is_pairwise_coprime());
    }

    #[test]
    fn preperiodic_errors() {
        assert_eq!(
            coprime_preperiodic(&p("x^2+1"), &bi(1), 3).unwrap_err(),
            CoprimeError::NotPreperiodic
        );
        assert_eq!(
            coprime_preperiodic(&p("x^2-2x+2"), &bi(2), 3).unwrap_err(),
            CoprimeError::NotWandering
        );
        assert_eq!(
            coprime_preperiodic(&p("5"), &bi(1), 3).unwrap_err(),
            CoprimeError::NotWandering
        );
    }

    #[test]
    fn seventh_power_example_divides_by_seven_late() {
        let f = p("7+x^5(x-1)(x-7)");
        let mut o = Orbit::new(f.clone(), bi(6));
        let xs = o.extend(6).unwrap().to_vec();
        let s = coprime_preperiodic(&f, &bi(6), 7).unwrap();
        for n in 0..7 {
            let seven = bi(7);
            assert_eq!(divides(&seven, &xs[n]), n >= 6, "x_{n}");
            let want = if n >= 6 { &xs[n] / 7 } else { xs[n].clone() };
            assert_eq!(s.terms[n], want);
        }
        assert!(s.is_pairwise_coprime());
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_xr(&p("x^3-2x^2")).unwrap(), (2, p("x-2")));
        assert_eq!(decompose_xr(&p("x")).unwrap(), (1, p("1")));
        assert_eq!(decompose_xr(&p("x^2+x")).unwrap(), (1, p("x+1")));
        assert_eq!(
            decompose_xr(&p("x+1")).unwrap_err(),
            CoprimeError::NonzeroConstantTerm
        );
        assert_eq!(
            decompose_xr(&IntPoly::zero()).unwrap_err(),
            CoprimeError::ZeroPolynomial
        );
    }

    #[test]
    fn period1_examples() {
        let s = coprime_period1(&p("x^2+x"), &bi(1), 4).unwrap();
        assert_eq!(s.first_index, 1);
        assert_eq!(s.terms, ints(&[2, 3, 7, 43]));

        let s = coprime_period1(&p("x^3-2x^2"), &bi(3), 2).unwrap();
        assert_eq!(s.terms, ints(&[1, 7]));
        assert_eq!(s.unit_indices, vec![1]);
        assert_eq!(s.flagged_indices, vec![1]);
        // g(x) = x - 2 in {+-1, +-2}
        assert_eq!(s.exceptional_roots, Some(ints(&[0, 1, 3, 4])));

        assert_eq!(
            coprime_period1(&p("2x^2"), &bi(1), 3).unwrap_err(),
            CoprimeError::ConstantCofactor
        );
        assert_eq!(
            coprime_period1(&p("x^2+x"), &bi(0), 3).unwrap_err(),
            CoprimeError::NotWandering
        );
    }

    #[test]
    fn period2_examples() {
        let s = coprime_period2(&p("1-x^2"), &bi(3), 2).unwrap();
        assert_eq!(s.first_index, 2);
        assert_eq!(s.terms, ints(&[-7, -31]));
        assert_eq!(
            s.divisor_data,
            DivisorData::Period2 {
                r: 2,
                big_g: p("2-x^2"),
                modulus: bi(2)
            }
        );
        assert_eq!(
            coprime_period2(&p("1-x^2"), &bi(0), 2).unwrap_err(),
            CoprimeError::NotWandering
        );
        assert_eq!(
            coprime_period2(&p("5-x"), &bi(0), 2).unwrap_err(),
            CoprimeError::InvolutionExcluded
        );
        assert_eq!(
            coprime_period2(&p("x^2-x-1"), &bi(3), 2).unwrap_err(),
            CoprimeError::NotPeriod2
        );
    }

    #[test]
    fn auto_selects_rule() {
        assert_eq!(coprime_auto(&p("x^2+x"), &bi(1), 2).unwrap().rule, Rule::Period1);
        assert_eq!(coprime_auto(&p("1-x^2"), &bi(3), 2).unwrap().rule, Rule::Period2);
        assert_eq!(
            coprime_auto(&p("x^2-6x-1"), &bi(3), 2).unwrap().rule,
            Rule::Preperiodic
        );
    }

    #[test]
    fn exceptional_search() {
        let want = vec![
            ExceptionalOrbit { a: 2, x: 1, y: 3, d: -1 },
            ExceptionalOrbit { a: 3, x: 2, y: 1, d: -3 },
            ExceptionalOrbit { a: 3, x: 2, y: 1, d: -1 },
        ];
        assert_eq!(search_exceptional_orbits(4, 5), want);
        assert!(search_exceptional_orbits(1, 1).is_empty());
    }

    #[test]
    fn exceptional_example_has_units_at_one_and_two() {
        let s = coprime_preperiodic(&p("3-x(x-3)^2"), &bi(2), 6).unwrap();
        assert_eq!(s.terms[1], bi(1));
        assert_eq!(s.terms[2], bi(-1));
        assert_eq!(s.unit_indices, vec![1, 2]);
    }

    #[test]
    fn json_shape() {
        let s = coprime_preperiodic(&p("x^2-6x-1"), &bi(3), 2).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["rule"], "preperiodic");
        assert_eq!(v["poly"], "x^2-6x-1");
        assert_eq!(v["terms"], serde_json::json!(["1", "-5"]));
        assert_eq!(v["divisor_data"]["ell"], "6");
    }
}
