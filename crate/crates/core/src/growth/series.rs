//! Truncations of the Laurent series `P(T) = c_1 T + c_0 + c_{-1}/T + ...`
//! solving `P(T^d) = f(P(T))`, and the residuals `|x_n - P_k(tau^{d^n})|`.
//!
//! Matching the coefficient of `T^{d-1-j}` gives `d * c_{-j}` plus terms in
//! the earlier coefficients, so each `c_{-j}` is one division by `d`.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::interval::{Dyadic, Interval};
use super::{normalize_affine_with, Alpha, GrowthError, TauEstimate, DEFAULT_PRECISION, GUARD_BITS};
use crate::orbit::Orbit;
use crate::polynomial::IntPoly;
use crate::serde_str;

/// Coefficient arithmetic shared by the exact and the enclosed solver.
trait Coef: Clone {
    fn from_int(v: &BigInt, prec: u32) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self, prec: u32) -> Self;
    fn div_int(&self, d: u64, prec: u32) -> Self;
    /// True when the value is certainly nonzero.
    fn nonzero(&self) -> bool;
}

impl Coef for BigRational {
    fn from_int(v: &BigInt, _: u32) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self, _: u32) -> Self {
        self * o
    }
    fn div_int(&self, d: u64, _: u32) -> Self {
        self / BigRational::from_integer(BigInt::from(d))
    }
    fn nonzero(&self) -> bool {
        !self.is_zero()
    }
}

impl Coef for Interval {
    fn from_int(v: &BigInt, _: u32) -> Self {
        Interval::from_int(v.clone())
    }
    fn add(&self, o: &Self) -> Self {
        Interval::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Interval::sub(self, o)
    }
    fn mul(&self, o: &Self, prec: u32) -> Self {
        Interval::mul(self, o).round(prec)
    }
    fn div_int(&self, d: u64, prec: u32) -> Self {
        let dd = Dyadic::from_int(d);
        Interval {
            lo: self.lo.div_down(&dd, prec),
            hi: self.hi.div_up(&dd, prec),
        }
    }
    fn nonzero(&self) -> bool {
        !self.contains_zero()
    }
}

/// Finite Laurent polynomial; `c[i]` is the coefficient of `T^(top - i)`.
#[derive(Clone)]
struct Laurent<C> {
    top: i64,
    c: Vec<C>,
}

impl<C: Coef> Laurent<C> {
    fn constant(v: C) -> Self {
        Laurent { top: 0, c: vec![v] }
    }

    fn bottom(&self) -> i64 {
        self.top - self.c.len() as i64 + 1
    }

    fn coef(&self, e: i64, zero: &C) -> C {
        if e > self.top || e < self.bottom() {
            zero.clone()
        } else {
            self.c[(self.top - e) as usize].clone()
        }
    }

    fn add(&self, o: &Self, zero: &C) -> Self {
        let top = self.top.max(o.top);
        let bottom = self.bottom().min(o.bottom());
        let c = (bottom..=top)
            .rev()
            .map(|e| self.coef(e, zero).add(&o.coef(e, zero)))
            .collect();
        Laurent { top, c }
    }

    fn mul(&self, o: &Self, zero: &C, prec: u32) -> Self {
        let mut c = vec![zero.clone(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b, prec));
            }
        }
        Laurent {
            top: self.top + o.top,
            c,
        }
    }

    /// `P(T^d)`
    fn stretch(&self, d: usize, zero: &C) -> Self {
        let mut c = vec![zero.clone(); (self.c.len() - 1) * d + 1];
        for (i, v) in self.c.iter().enumerate() {
            c[i * d] = v.clone();
        }
        Laurent {
            top: self.top * d as i64,
            c,
        }
    }
}

fn apply<C: Coef>(poly: &IntPoly, p: &Laurent<C>, zero: &C, prec: u32) -> Laurent<C> {
    let cs = poly.coeffs();
    let mut acc = Laurent::constant(C::from_int(cs.last().unwrap(), prec));
    for c in cs.iter().rev().skip(1) {
        acc = acc
            .mul(p, zero, prec)
            .add(&Laurent::constant(C::from_int(c, prec)), zero);
    }
    acc
}

/// Solves for `c_1, c_0, ..., c_{1-k}`; returns the coefficients and the
/// largest exponent at which `f(P_k) - P_k(T^d)` is (certainly) nonzero.
fn solve<C: Coef>(
    poly: &IntPoly,
    k: usize,
    c1: C,
    c0: C,
    zero: C,
    prec: u32,
) -> Result<(Vec<C>, Option<i64>), GrowthError> {
    let d = poly.degree();
    let mut coeffs = vec![c1, c0];
    for j in 1..k {
        let mut trial = coeffs.clone();
        trial.push(zero.clone());
        let p = Laurent { top: 1, c: trial };
        let e = d as i64 - 1 - j as i64;
        let r0 = apply(poly, &p, &zero, prec).coef(e, &zero);
        let lhs = if e.rem_euclid(d as i64) == 0 {
            p.coef(e / d as i64, &zero)
        } else {
            zero.clone()
        };
        // the coefficient of c_{-j} on the right is d a alpha^{d-1} = d
        coeffs.push(lhs.sub(&r0).div_int(d as u64, prec));
    }
    let p = Laurent {
        top: 1,
        c: coeffs.clone(),
    };
    let disc = apply(poly, &p, &zero, prec).add(
        &{
            let s = p.stretch(d, &zero);
            Laurent {
                top: s.top,
                c: s.c.iter().map(|v| zero.sub(v)).collect(),
            }
        },
        &zero,
    );
    let top = (disc.bottom()..=disc.top)
        .rev()
        .find(|&e| disc.coef(e, &zero).nonzero());
    Ok((coeffs, top))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum SeriesCoeff {
    Exact(#[serde(with = "serde_str::rational")] BigRational),
    Enclosed(Interval),
}

impl SeriesCoeff {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            SeriesCoeff::Exact(r) => Some(r),
            SeriesCoeff::Enclosed(_) => None,
        }
    }

    pub fn interval(&self, prec: u32) -> Interval {
        match self {
            SeriesCoeff::Exact(r) => Interval::from_rational(r, prec),
            SeriesCoeff::Enclosed(iv) => iv.clone(),
        }
    }

    fn is_certainly_zero(&self) -> bool {
        match self {
            SeriesCoeff::Exact(r) => r.is_zero(),
            SeriesCoeff::Enclosed(iv) => iv.is_point() && iv.lo.is_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesTruncation {
    #[serde(with = "serde_str::poly")]
    pub poly: IntPoly,
    pub k: usize,
    /// `c_1, c_0, c_{-1}, ..., c_{1-k}`
    pub coeffs: Vec<SeriesCoeff>,
    pub exact: bool,
    /// Largest exponent where `f(P_k) - P_k(T^d)` is nonzero; `None` when the
    /// truncation solves the functional equation exactly.
    pub discrepancy_top: Option<i64>,
    pub precision_bits: u32,
}

impl SeriesTruncation {
    /// `c_j` for `1 - k <= j <= 1`.
    pub fn coeff(&self, j: i64) -> Option<&SeriesCoeff> {
        usize::try_from(1 - j).ok().and_then(|i| self.coeffs.get(i))
    }

    fn is_affine(&self) -> bool {
        self.coeffs[2..].iter().all(SeriesCoeff::is_certainly_zero)
    }
}

pub fn series_coefficients(poly: &IntPoly, k: usize) -> Result<SeriesTruncation, GrowthError> {
    series_coefficients_with(poly, k, DEFAULT_PRECISION)
}

/// Truncation with `k + 1` coefficients `c_1..=c_{1-k}`; exact when `alpha`
/// is rational, otherwise interval enclosures at `prec` bits.
pub fn series_coefficients_with(
    poly: &IntPoly,
    k: usize,
    prec: u32,
) -> Result<SeriesTruncation, GrowthError> {
    let aff = normalize_affine_with(poly, prec)?;
    let d = aff.degree;
    let k = k.max(1);
    let (coeffs, top, exact) = match &aff.alpha {
        Alpha::Exact { value } => {
            let a = BigRational::from_integer(aff.leading.clone());
            debug_assert_eq!(&a * value.pow(d as i32), value.clone());
            let (c, top) = solve(
                poly,
                k,
                value.clone(),
                aff.beta.clone(),
                BigRational::zero(),
                prec,
            )?;
            (c.into_iter().map(SeriesCoeff::Exact).collect(), top, true)
        }
        Alpha::Enclosed { interval } => {
            let wp = prec + GUARD_BITS;
            let (c, top) = solve(
                poly,
                k,
                interval.clone(),
                Interval::from_rational(&aff.beta, wp),
                Interval::from_int(0),
                wp,
            )?;
            (c.into_iter().map(SeriesCoeff::Enclosed).collect(), top, false)
        }
    };
    if let Some(t) = top {
        // coefficients of T^d .. T^{d-k} were matched
        debug_assert!(t < d as i64 - k as i64);
    }
    Ok(SeriesTruncation {
        poly: poly.clone(),
        k,
        coeffs,
        exact,
        discrepancy_top: top,
        precision_bits: prec,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualRow {
    pub n: usize,
    #[serde(with = "serde_str")]
    pub x: BigInt,
    /// Enclosure of `| |x_n| - P_k(tau^{d^n}) |`.
    pub residual: Interval,
    /// Upper bound on `residual * tau^{k d^n}`.
    pub scaled: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    pub k: usize,
    pub rows: Vec<ResidualRow>,
    /// The truncation is an exact affine solution and `tau = y_0`, so every
    /// residual is exactly zero.
    pub exact_zero: bool,
    /// Smallest `C` with `residual <= C / tau^{k d^n}` over the range.
    pub fitted_c: Dyadic,
    pub strictly_decreasing: bool,
    /// Consecutive residual ratios stay within twice the predicted
    /// `(tau^{d^n} / tau^{d^{n+1}})^k`.
    pub decay_ok: bool,
}

/// Residuals of the truncation against the orbit over `n_range`.
pub fn series_residual_check(
    poly: &IntPoly,
    est: &TauEstimate,
    trunc: &SeriesTruncation,
    n_range: RangeInclusive<usize>,
) -> Result<ResidualReport, GrowthError> {
    if poly != &est.poly || poly != &trunc.poly {
        return Err(GrowthError::MismatchedEstimate);
    }
    let d = est.degree as u64;
    let k = trunc.k;
    let last = *n_range.end();
    let mut orb = Orbit::new(poly.clone(), est.start.clone());
    let xs = orb.extend(last)?.to_vec();

    if let Some(rows) = exact_rows(est, trunc, &xs, n_range.clone()) {
        return Ok(ResidualReport {
            k,
            rows,
            exact_zero: true,
            fitted_c: Dyadic::zero(),
            strictly_decreasing: false,
            decay_ok: true,
        });
    }

    let mut rows = Vec::new();
    let mut t_bounds = Vec::new();
    for n in n_range {
        let e = d
            .checked_pow(n as u32)
            .ok_or(GrowthError::IntervalTooWide(n))?;
        let x = xs[n].abs();
        let wp = est.precision_bits + x.bits() as u32 + GUARD_BITS;
        let t = est.interval().pow_rounded(e, wp);
        let u = t.recip(wp);
        let mut value = trunc.coeffs[0].interval(wp).mul(&t).round(wp);
        let mut u_pow = Interval::from_int(1);
        for c in &trunc.coeffs[1..] {
            value = value.add(&c.interval(wp).mul(&u_pow)).round(wp);
            u_pow = u_pow.mul(&u).round(wp);
        }
        let residual = Interval::from_int(x.clone()).sub(&value).abs();
        let scaled = residual
            .hi
            .mul(&t.hi.pow(k as u64))
            .round_up(est.precision_bits);
        t_bounds.push(t);
        rows.push(ResidualRow {
            n,
            x,
            residual,
            scaled,
        });
    }
    if let Some(r) = rows.iter().find(|r| !r.residual.lo.is_positive()) {
        // the enclosure cannot separate the residual from zero
        return Err(GrowthError::IntervalTooWide(r.n));
    }
    let fitted_c = rows
        .iter()
        .map(|r| r.scaled.clone())
        .max()
        .unwrap_or_else(Dyadic::zero);
    let strictly_decreasing = rows
        .windows(2)
        .all(|w| w[1].residual.hi < w[0].residual.lo);
    let two = Dyadic::from_int(2);
    let decay_ok = rows.windows(2).zip(t_bounds.windows(2)).all(|(r, t)| {
        let lhs = r[1].residual.hi.mul(&t[1].lo.pow(k as u64));
        let rhs = two.mul(&r[0].residual.lo).mul(&t[0].hi.pow(k as u64));
        lhs <= rhs
    });
    Ok(ResidualReport {
        k,
        rows,
        exact_zero: false,
        fitted_c,
        strictly_decreasing,
        decay_ok,
    })
}

/// When `P_k = alpha T + beta` solves the functional equation exactly, the
/// orbit is `x_n = alpha y_0^{d^n} + beta` and `tau = y_0`; checked exactly.
fn exact_rows(
    est: &TauEstimate,
    trunc: &SeriesTruncation,
    xs: &[BigInt],
    n_range: RangeInclusive<usize>,
) -> Option<Vec<ResidualRow>> {
    if !trunc.exact || trunc.discrepancy_top.is_some() || !trunc.is_affine() {
        return None;
    }
    let alpha = trunc.coeffs[0].exact()?;
    let beta = trunc.coeffs[1].exact()?;
    let x0 = BigRational::from_integer(xs[0].clone());
    let tau = (x0 - beta) / alpha;
    if !tau.is_positive() || !est.contains_rational(&tau) {
        return None;
    }
    let d = est.degree as u64;
    let mut rows = Vec::new();
    for n in n_range {
        let e = d.checked_pow(n as u32)?.to_i32()?;
        let value = alpha * tau.pow(e) + beta;
        let x = xs[n].abs();
        if value != BigRational::from_integer(x.clone()) {
            return None;
        }
        rows.push(ResidualRow {
            n,
            x,
            residual: Interval::from_int(0),
            scaled: Dyadic::zero(),
        });
    }
    Some(rows)
}

impl ResidualReport {
    pub fn residual_upper(&self, n: usize) -> Option<&Dyadic> {
        self.rows.iter().find(|r| r.n == n).map(|r| &r.residual.hi)
    }

    pub fn residual_lower(&self, n: usize) -> Option<&Dyadic> {
        self.rows.iter().find(|r| r.n == n).map(|r| &r.residual.lo)
    }
}
