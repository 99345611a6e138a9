//! Doubly exponential growth of wandering orbits.
//!
//! For `f(x) = a x^d + b x^{d-1} + ...` with `a > 0`, put
//! `alpha = a^{-1/(d-1)}`, `beta = -b/(d a)` and `y_n = (x_n - beta) / alpha`.
//! Then `y_{n+1} = y_n^d + h(y_n)` with `deg h <= d - 2`. Once `y_n` is large
//! enough the sandwich
//!
//! ```text
//! (y_n - eps)^d + eps < y_{n+1} < (y_n + eps)^d - eps
//! ```
//!
//! holds for every later index, so `(y_n - eps)^{1/d^n}` increases and
//! `(y_n + eps)^{1/d^n}` decreases to a common limit `tau`. With
//! `eps = 1/(2 alpha)` this yields `|x_n| = round(alpha tau^{d^n} + beta)`.
//!
//! All real quantities are intervals with dyadic endpoints (see [`interval`]).

pub mod interval;
pub mod mills;
pub mod series;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{binomial, exact_root};
use crate::orbit::{self, Orbit, OrbitError};
use crate::polynomial::IntPoly;
use crate::serde_str;
use interval::{Dyadic, Interval};

pub use mills::{mills_sequence, mills_sequence_with, MillsResult, PrimeChoice, SmallestPrime};
pub use series::{
    series_coefficients, series_coefficients_with, series_residual_check, ResidualReport,
    ResidualRow, SeriesCoeff, SeriesTruncation,
};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Extra bits carried by intermediate quantities.
const GUARD_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("degree must be at least 2")]
    DegreeTooSmall,
    #[error("leading coefficient is negative; sign-conjugate the map first")]
    NegativeLeading,
    #[error("the orbit is not wandering")]
    NotWandering,
    #[error("x_{0} is not positive; the orbit does not grow through positive values")]
    NotEventuallyPositive(usize),
    #[error("no eps makes the growth sandwich hold at the last computed index")]
    NoBracketingIndex,
    #[error("index {n} is below the reconstruction horizon {horizon}")]
    HorizonViolation { n: usize, horizon: usize },
    #[error("tau interval too wide to round unambiguously at index {0}")]
    IntervalTooWide(usize),
    #[error("estimate was computed for a different map")]
    MismatchedEstimate,
    #[error("degenerate linear equation for series coefficient c_-{0}")]
    DegenerateLinearSolve(usize),
    #[error("no prime found in the cube interval after p_{0}")]
    EmptyInterval(usize),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// `alpha = a^{-1/(d-1)}`, exact when `a` is a perfect `(d-1)`-th power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Alpha {
    Exact {
        #[serde(with = "serde_str::rational")]
        value: BigRational,
    },
    Enclosed {
        interval: Interval,
    },
}

impl Alpha {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Alpha::Exact { value } => Some(value),
            Alpha::Enclosed { .. } => None,
        }
    }

    pub fn interval(&self, prec: u32) -> Interval {
        match self {
            Alpha::Exact { value } => Interval::from_rational(value, prec),
            Alpha::Enclosed { interval } => interval.clone(),
        }
    }

    /// Enclosure of `1/alpha = a^{1/(d-1)}`.
    pub fn inverse(&self, prec: u32) -> Interval {
        match self {
            Alpha::Exact { value } => Interval::from_rational(&value.recip(), prec),
            Alpha::Enclosed { interval } => interval.recip(prec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Affine {
    pub degree: usize,
    #[serde(with = "serde_str")]
    pub leading: BigInt,
    pub alpha: Alpha,
    #[serde(with = "serde_str::rational")]
    pub beta: BigRational,
}

/// `(alpha, beta)` for a map of degree `>= 2` with positive leading coefficient.
pub fn normalize_affine(poly: &IntPoly) -> Result<Affine, GrowthError> {
    normalize_affine_with(poly, DEFAULT_PRECISION)
}

pub fn normalize_affine_with(poly: &IntPoly, prec: u32) -> Result<Affine, GrowthError> {
    let d = poly.degree();
    if d < 2 {
        return Err(GrowthError::DegreeTooSmall);
    }
    let a = poly.leading();
    if a.is_negative() {
        return Err(GrowthError::NegativeLeading);
    }
    let k = (d - 1) as u32;
    let alpha = match exact_root(a.magnitude(), k) {
        Some(r) => Alpha::Exact {
            value: BigRational::new(BigInt::one(), BigInt::from(r)),
        },
        None => {
            let frac = prec as i64 + GUARD_BITS as i64;
            let root = Interval::from_int(a.clone()).iterated_root(k, 1, frac);
            Alpha::Enclosed {
                interval: root.recip(prec + GUARD_BITS),
            }
        }
    };
    let b = poly.coeff(d - 1);
    let beta = BigRational::new(-b, BigInt::from(d) * &a);
    let affine = Affine {
        degree: d,
        leading: a,
        alpha,
        beta,
    };
    debug_assert!(shifted_coeffs(poly, &affine.beta)[d - 1].is_zero());
    Ok(affine)
}

/// Coefficients of `f(y + beta) - beta` in `y`.
fn shifted_coeffs(poly: &IntPoly, beta: &BigRational) -> Vec<BigRational> {
    let c = poly.coeffs();
    let d = poly.degree();
    let mut beta_pows = vec![BigRational::one()];
    for i in 1..=d {
        let next = &beta_pows[i - 1] * beta;
        beta_pows.push(next);
    }
    let mut q: Vec<BigRational> = (0..=d)
        .map(|j| {
            (j..=d)
                .map(|i| {
                    BigRational::from_integer(&c[i] * binomial(i, j)) * &beta_pows[i - j]
                })
                .fold(BigRational::zero(), |acc, t| acc + t)
        })
        .collect();
    q[0] -= beta;
    q
}

/// Upper bound on `sum_{j <= d-2} |h_j|`, where `h(y) = y_{n+1} - y_n^d`.
fn perturbation_bound(poly: &IntPoly, aff: &Affine, prec: u32) -> Dyadic {
    let d = aff.degree;
    let q = shifted_coeffs(poly, &aff.beta);
    assert!(q[d - 1].is_zero(), "x^(d-1) term survives the affine normalization");
    let alpha = aff.alpha.interval(prec);
    let alpha_inv = aff.alpha.inverse(prec);
    let mut s = Dyadic::zero();
    for (j, qj) in q.iter().enumerate().take(d - 1) {
        if qj.is_zero() {
            continue;
        }
        let scale = match j {
            0 => alpha_inv.hi.clone(),
            1 => Dyadic::one(),
            _ => alpha.pow_rounded((j - 1) as u64, prec).hi,
        };
        let qj_up = Dyadic::from_rational_up(&qj.abs(), prec);
        s = s.add(&qj_up.mul(&scale).round_up(prec));
    }
    s
}

/// Upper bound on the threshold `Y*(eps)`: for `y > Y*` the sandwich holds and
/// `y` keeps growing.
fn sandwich_threshold(s: &Dyadic, eps: &Dyadic, d: usize, prec: u32) -> Dyadic {
    let two = Dyadic::from_int(2);
    let num = s.add(eps).mul_pow2(d as i64 - 1);
    let den = eps.mul(&Dyadic::from_int(d as u64));
    let t = num.div_up(&den, prec);
    [Dyadic::one(), eps.mul(&two), eps.add(&two), t]
        .into_iter()
        .max()
        .unwrap()
}

/// Whether the strict sandwich holds between `y` (index n) and `z` (n+1).
fn sandwich_holds(y: &Interval, z: &Interval, eps: &Dyadic, d: usize) -> bool {
    let low = y.hi.sub(eps);
    if !y.lo.sub(eps).is_positive() {
        return false;
    }
    let lower = low.pow(d as u64).add(eps);
    let upper = y.lo.add(eps).pow(d as u64).sub(eps);
    lower < z.lo && z.hi < upper
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauEstimate {
    #[serde(with = "serde_str::poly")]
    pub poly: IntPoly,
    #[serde(with = "serde_str")]
    pub start: BigInt,
    pub degree: usize,
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub n_used: usize,
    pub alpha: Alpha,
    #[serde(with = "serde_str::rational")]
    pub beta: BigRational,
    /// Sandwich width used for the bracket at `n_used`.
    pub epsilon: Dyadic,
    /// Smallest index from which reconstruction matched `|x_n|` through `n_used`.
    pub horizon: usize,
    /// Smallest index from which the sandwich with `eps = 1/(2 alpha)` is
    /// proven for every later index, which proves reconstruction from there on.
    pub certified_from: Option<usize>,
    pub precision_bits: u32,
}

impl TauEstimate {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.interval().contains_rational(r)
    }

    fn affine(&self) -> Affine {
        Affine {
            degree: self.degree,
            leading: BigInt::zero(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        }
    }
}

fn y_interval(x: &BigInt, aff: &Affine, alpha_inv: &Interval, prec: u32) -> Interval {
    let shifted = Interval::from_int(x.clone()).sub(&Interval::from_rational(&aff.beta, prec));
    shifted.mul(alpha_inv).round(prec)
}

/// Certified enclosure of `tau` for the orbit of `start`, bracketed at `n_max`.
pub fn estimate_tau(
    poly: &IntPoly,
    start: &BigInt,
    n_max: usize,
    precision_bits: u32,
) -> Result<TauEstimate, GrowthError> {
    let aff = normalize_affine_with(poly, precision_bits)?;
    if !orbit::is_wandering(poly, start)? {
        return Err(GrowthError::NotWandering);
    }
    let d = aff.degree;
    let mut orb = Orbit::new(poly.clone(), start.clone());
    let xs = orb.extend(n_max)?.to_vec();
    if !xs[n_max].is_positive() {
        return Err(GrowthError::NotEventuallyPositive(n_max));
    }

    let mag_bits = xs[n_max].bits() as u32;
    let wp = precision_bits + mag_bits + GUARD_BITS;
    let alpha_inv = aff.alpha.inverse(wp);
    let s = perturbation_bound(poly, &aff, wp);
    let ys: Vec<Interval> = xs
        .iter()
        .map(|x| y_interval(x, &aff, &alpha_inv, wp))
        .collect();
    let y_n = &ys[n_max];

    // smallest eps = 2^-j for which the sandwich provably holds from n_max on
    let mut eps = None;
    let mut j = precision_bits as i64;
    while j >= -(mag_bits as i64) {
        let e = Dyadic::pow2(-j);
        if y_n.lo > sandwich_threshold(&s, &e, d, wp) {
            eps = Some(e);
            break;
        }
        j -= 1;
    }
    let eps = eps.ok_or(GrowthError::NoBracketingIndex)?;

    let times = u32::try_from(n_max).expect("n_max fits in u32");
    let frac = precision_bits as i64;
    let lower = y_n.lo.sub(&eps);
    let upper = y_n.hi.add(&eps);
    let lo = if n_max == 0 {
        lower.floor_to(frac)
    } else {
        Interval::point(lower).iterated_root(d as u32, times, frac).lo
    };
    let hi = if n_max == 0 {
        upper.ceil_to(frac)
    } else {
        Interval::point(upper).iterated_root(d as u32, times, frac).hi
    };

    // eps_r = 1/(2 alpha), taken from below
    let eps_r = alpha_inv.lo.mul_pow2(-1);
    let certified_from = if y_n.lo > sandwich_threshold(&s, &eps_r, d, wp) {
        let mut n0 = n_max;
        while n0 > 0 && sandwich_holds(&ys[n0 - 1], &ys[n0], &eps_r, d) {
            n0 -= 1;
        }
        Some(n0)
    } else {
        None
    };

    let mut est = TauEstimate {
        poly: poly.clone(),
        start: start.clone(),
        degree: d,
        lo,
        hi,
        n_used: n_max,
        alpha: aff.alpha,
        beta: aff.beta,
        epsilon: eps,
        horizon: n_max + 1,
        certified_from,
        precision_bits,
    };
    let mut horizon = n_max + 1;
    for n in (0..=n_max).rev() {
        match reconstruct_unchecked(&est, n) {
            Ok(v) if v == xs[n].abs() => horizon = n,
            _ => break,
        }
    }
    est.horizon = horizon;
    Ok(est)
}

/// `round(alpha tau^{d^n} + beta)`, certified over the whole `tau` interval.
pub fn reconstruct(poly: &IntPoly, est: &TauEstimate, n: usize) -> Result<BigInt, GrowthError> {
    if poly != &est.poly {
        return Err(GrowthError::MismatchedEstimate);
    }
    if n < est.horizon {
        return Err(GrowthError::HorizonViolation {
            n,
            horizon: est.horizon,
        });
    }
    reconstruct_unchecked(est, n)
}

fn reconstruct_unchecked(est: &TauEstimate, n: usize) -> Result<BigInt, GrowthError> {
    let k = (est.degree as u64)
        .checked_pow(u32::try_from(n).map_err(|_| GrowthError::IntervalTooWide(n))?)
        .ok_or(GrowthError::IntervalTooWide(n))?;
    let hi_bits = est.hi.magnitude_bits().max(1) as u64;
    let result_bits = k
        .checked_mul(hi_bits)
        .and_then(|b| u32::try_from(b).ok())
        .ok_or(GrowthError::IntervalTooWide(n))?;
    let wp = est.precision_bits + result_bits + GUARD_BITS;
    let t = est.interval().pow_rounded(k, wp);
    let aff = est.affine();
    let v = aff
        .alpha
        .interval(wp)
        .mul(&t)
        .add(&Interval::from_rational(&aff.beta, wp));
    v.nearest_integer().ok_or(GrowthError::IntervalTooWide(n))
}
