//! Classification of the orbit of 0.
//!
//! When 0 is strictly preperiodic its orbit is one of four shapes, up to the
//! sign mirror `g(x) = -f(-x)`:
//!
//! | family                | orbit of 0                  | base map          |
//! |-----------------------|-----------------------------|-------------------|
//! | `FixedAfterOne`       | `0 -> a -> a`               | `a`               |
//! | `SignFlipThenFixed`   | `0 -> -a -> a -> a`, a=1,2  | `2x^2-1`, `x^2-2` |
//! | `TwoCycleAfterOne`    | `0 -> -1 -> a -> -1`        | `x^2-ax-1`        |
//! | `TwoCycleAfterTwo`    | `0 -> 1 -> 2 -> -1 -> 2`    | `1+x+x^2-x^3`     |
//!
//! Every map in a family is the base map plus `g(x)` times the product of
//! `(x - v)` over the orbit points `v`.
//!
//! The parameter `a` is read off the orbit, always as `f^2(0)` of the
//! unmirrored orientation, so it does not depend on how the map is written.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::lcm;
use crate::orbit::prefix;
use crate::polynomial::IntPoly;
use crate::serde_str;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    FixedAfterOne,
    SignFlipThenFixed,
    TwoCycleAfterOne,
    TwoCycleAfterTwo,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::FixedAfterOne,
        Family::SignFlipThenFixed,
        Family::TwoCycleAfterOne,
        Family::TwoCycleAfterTwo,
    ];

    /// Orbit of 0 (through index 4) of the unmirrored member with parameter `a`.
    fn pattern(self, a: &BigInt) -> [BigInt; 5] {
        let z = BigInt::zero();
        let one = BigInt::one();
        match self {
            Family::FixedAfterOne => [z, a.clone(), a.clone(), a.clone(), a.clone()],
            Family::SignFlipThenFixed => [z, -a, a.clone(), a.clone(), a.clone()],
            Family::TwoCycleAfterOne => [z, -&one, a.clone(), -&one, a.clone()],
            Family::TwoCycleAfterTwo => [
                z,
                one,
                BigInt::from(2),
                BigInt::from(-1),
                BigInt::from(2),
            ],
        }
    }

    fn admissible(self, a: &BigInt) -> bool {
        match self {
            Family::FixedAfterOne => a.is_positive(),
            Family::SignFlipThenFixed => *a == BigInt::from(1) || *a == BigInt::from(2),
            Family::TwoCycleAfterOne => !a.is_zero() && *a != BigInt::from(-1),
            Family::TwoCycleAfterTwo => *a == BigInt::from(2),
        }
    }

    fn base(self, a: &BigInt) -> IntPoly {
        match self {
            Family::FixedAfterOne => IntPoly::constant(a.clone()),
            Family::SignFlipThenFixed => {
                if a.is_one() {
                    IntPoly::from_i64(&[-1, 0, 2])
                } else {
                    IntPoly::from_i64(&[-2, 0, 1])
                }
            }
            Family::TwoCycleAfterOne => IntPoly::from_coeffs(vec![
                BigInt::from(-1),
                -a,
                BigInt::one(),
            ]),
            Family::TwoCycleAfterTwo => IntPoly::from_i64(&[1, 1, 1, -1]),
        }
    }

    /// Product of `(x - v)` over the distinct orbit points of 0.
    fn vanishing(self, a: &BigInt) -> IntPoly {
        let mut points: Vec<BigInt> = self.pattern(a).to_vec();
        points.sort();
        points.dedup();
        points
            .into_iter()
            .fold(IntPoly::constant(1), |acc, v| &acc * &IntPoly::linear_root(v))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::FixedAfterOne => "fixed_after_one",
            Family::SignFlipThenFixed => "sign_flip_then_fixed",
            Family::TwoCycleAfterOne => "two_cycle_after_one",
            Family::TwoCycleAfterTwo => "two_cycle_after_two",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroOrbitClass {
    StrictlyPreperiodic {
        family: Family,
        #[serde(with = "serde_str")]
        a: BigInt,
        mirrored: bool,
    },
    /// 0 lies on a cycle. `degenerate` marks `c x^d` and `a - x`, which yield
    /// no usable coprime construction.
    Periodic { period: usize, degenerate: bool },
    Wandering,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("the map is constant")]
    DegreeZero,
    #[error("orbit of 0 {prefix:?} matches no strictly preperiodic family")]
    ClassificationFailure { prefix: Vec<BigInt> },
    #[error("{family} with a = {a} is not an admissible family member")]
    InadmissibleParameters { family: Family, a: BigInt },
    #[error("{family} with a = {a} and this correction gives a constant map")]
    ConstantResult { family: Family, a: BigInt },
}

/// True for `c x^d` (including `x`) and `a - x`.
pub fn is_degenerate(poly: &IntPoly) -> bool {
    if poly.is_monomial() && poly.degree() >= 1 {
        return true;
    }
    poly.degree() == 1 && poly.coeff(1) == BigInt::from(-1)
}

pub fn classify_zero_orbit(poly: &IntPoly) -> Result<ZeroOrbitClass, ClassifyError> {
    if poly.degree() == 0 {
        return Err(ClassifyError::DegreeZero);
    }
    let z = prefix(poly, &BigInt::zero(), 6);
    if z[2] != z[4] {
        return Ok(ZeroOrbitClass::Wandering);
    }
    if z[1].is_zero() {
        return Ok(ZeroOrbitClass::Periodic {
            period: 1,
            degenerate: is_degenerate(poly),
        });
    }
    if z[2].is_zero() {
        return Ok(ZeroOrbitClass::Periodic {
            period: 2,
            degenerate: is_degenerate(poly),
        });
    }
    let failure = || ClassifyError::ClassificationFailure { prefix: z.clone() };

    let (family, mirrored) = if z[1] == z[2] {
        (Family::FixedAfterOne, z[1].is_negative())
    } else if z[2] == z[3] && z[1] == -&z[2] {
        (Family::SignFlipThenFixed, z[2].is_negative())
    } else if z[3] == z[1] && z[1].abs().is_one() {
        (Family::TwoCycleAfterOne, z[1].is_positive())
    } else if z[1].abs().is_one() {
        (Family::TwoCycleAfterTwo, z[1].is_negative())
    } else {
        return Err(failure());
    };
    let a = if mirrored { -&z[2] } else { z[2].clone() };
    if !family.admissible(&a) {
        return Err(failure());
    }
    // The full 7-term prefix must reproduce the family pattern.
    let sign = if mirrored { -BigInt::one() } else { BigInt::one() };
    let pattern = family.pattern(&a);
    let expected = |k: usize| -> BigInt {
        let idx = if k <= 4 { k } else { k - 2 };
        &pattern[idx] * &sign
    };
    if (0..=6).any(|k| z[k] != expected(k)) {
        return Err(failure());
    }
    Ok(ZeroOrbitClass::StrictlyPreperiodic {
        family,
        a,
        mirrored,
    })
}

/// A member of `family` built as `base + g * prod (x - v)`, mirrored on request.
pub fn family_generator(
    family: Family,
    a: &BigInt,
    g: &IntPoly,
    mirrored: bool,
) -> Result<IntPoly, ClassifyError> {
    if !family.admissible(a) {
        return Err(ClassifyError::InadmissibleParameters {
            family,
            a: a.clone(),
        });
    }
    let f = &family.base(a) + &(&family.vanishing(a) * g);
    if f.degree() == 0 {
        return Err(ClassifyError::ConstantResult {
            family,
            a: a.clone(),
        });
    }
    Ok(if mirrored { f.sign_conjugate() } else { f })
}

/// `lcm` of `f^k(0)` for `k = 1..=6`.
pub fn orbit_lcm(poly: &IntPoly) -> BigInt {
    prefix(poly, &BigInt::zero(), 6)[1..]
        .iter()
        .fold(BigInt::one(), |acc, v| lcm(&acc, v))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(with = "serde_str::vec")]
    pub coeffs: Vec<BigInt>,
    #[serde(with = "serde_str::vec")]
    pub prefix: Vec<BigInt>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FamilyCount {
    pub plain: u64,
    pub mirrored: u64,
}

impl FamilyCount {
    pub fn total(&self) -> u64 {
        self.plain + self.mirrored
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub coeff_bound: u32,
    pub degree_bound: u32,
    pub enumerated: u64,
    pub skipped_constant: u64,
    pub wandering: u64,
    pub periodic_1: u64,
    pub periodic_2: u64,
    pub families: BTreeMap<Family, FamilyCount>,
    pub violations: Vec<Violation>,
}

impl ClassificationReport {
    pub fn strictly_preperiodic(&self) -> u64 {
        self.families.values().map(FamilyCount::total).sum()
    }

    pub fn every_family_seen(&self) -> bool {
        Family::ALL
            .iter()
            .all(|f| self.families.get(f).is_some_and(|c| c.total() > 0))
    }
}

/// Classifies every polynomial with degree <= `degree_bound` and
/// coefficients in `[-coeff_bound, coeff_bound]`.
///
/// Cost is `(2 * coeff_bound + 1)^(degree_bound + 1)` classifications of a
/// 7-term prefix each; (3, 3) is 2401 maps. Violations are rows of the
/// report, never panics: a classification failure, a broken mirror duality,
/// or `lcm` of the orbit differing from `lcm[f(0), f^2(0)]`.
pub fn verify_classification_exhaustive(coeff_bound: u32, degree_bound: u32) -> ClassificationReport {
    let mut report = ClassificationReport {
        coeff_bound,
        degree_bound,
        enumerated: 0,
        skipped_constant: 0,
        wandering: 0,
        periodic_1: 0,
        periodic_2: 0,
        families: Family::ALL.iter().map(|f| (*f, FamilyCount::default())).collect(),
        violations: Vec::new(),
    };
    let b = coeff_bound as i64;
    let len = degree_bound as usize + 1;
    let mut coeffs = vec![-b; len];
    loop {
        report.enumerated += 1;
        let poly = IntPoly::from_i64(&coeffs);
        check_one(&poly, &coeffs, &mut report);
        // odometer over [-b, b]^len, lexicographic with the constant term fastest
        let mut i = 0;
        loop {
            if i == len {
                return report;
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

fn check_one(poly: &IntPoly, coeffs: &[i64], report: &mut ClassificationReport) {
    let violation = |reason: String| Violation {
        coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        prefix: prefix(poly, &BigInt::zero(), 6),
        reason,
    };
    let class = match classify_zero_orbit(poly) {
        Ok(c) => c,
        Err(ClassifyError::DegreeZero) => {
            report.skipped_constant += 1;
            return;
        }
        Err(e) => {
            report.violations.push(violation(e.to_string()));
            return;
        }
    };
    match &class {
        ZeroOrbitClass::Wandering => report.wandering += 1,
        ZeroOrbitClass::Periodic { period: 1, .. } => report.periodic_1 += 1,
        ZeroOrbitClass::Periodic { .. } => report.periodic_2 += 1,
        ZeroOrbitClass::StrictlyPreperiodic {
            family, mirrored, ..
        } => {
            let count = report.families.entry(*family).or_default();
            if *mirrored {
                count.mirrored += 1;
            } else {
                count.plain += 1;
            }
            let z = prefix(poly, &BigInt::zero(), 2);
            let ell = lcm(&z[1], &z[2]);
            let full = orbit_lcm(poly);
            if ell != full {
                report
                    .violations
                    .push(violation(format!("orbit lcm {full} differs from lcm[f(0), f^2(0)] = {ell}")));
            }
        }
    }
    let mirror = classify_zero_orbit(&poly.sign_conjugate());
    if mirror != Ok(mirrored_class(&class)) {
        report
            .violations
            .push(violation(format!("mirror classified as {mirror:?}")));
    }
}

fn mirrored_class(class: &ZeroOrbitClass) -> ZeroOrbitClass {
    match class {
        ZeroOrbitClass::StrictlyPreperiodic {
            family,
            a,
            mirrored,
        } => ZeroOrbitClass::StrictlyPreperiodic {
            family: *family,
            a: a.clone(),
            mirrored: !mirrored,
        },
        other => other.clone(),
    }
}
