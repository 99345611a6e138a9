use arithdyn::growth::interval::{Dyadic, Interval};
use arithdyn::growth::{
    estimate_tau, mills_sequence, normalize_affine, reconstruct, series_coefficients, Alpha,
    SeriesCoeff,
};
use arithdyn::orbit::prefix;
use arithdyn::IntPoly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;

fn p(s: &str) -> IntPoly {
    s.parse().unwrap()
}

/// Wandering orbits with eventually positive terms; `alpha = 1` for the first group.
const UNIT_ALPHA: &[(&str, i64)] = &[
    ("x^2-x+1", 2),
    ("x^2-2", 3),
    ("x^2+1", 0),
    ("x^2-2x+2", 3),
    ("x^2-6x-1", 3),
    ("x^3-x+1", 2),
];
const OTHER: &[(&str, i64)] = &[("2x^2-1", 2), ("2x^3+1", 1), ("3x^2+x", 1), ("4x^3-x", 1)];

/// Bits sufficient for the estimate at `n` to resolve `x_n` itself.
fn prec_for(poly: &IntPoly, start: i64, n: usize) -> u32 {
    let x = &prefix(poly, &BigInt::from(start), n)[n];
    x.bits() as u32 + 2 * n as u32 + 96
}

#[test]
fn bracketing_is_monotone() {
    for &(f, s) in UNIT_ALPHA.iter().chain(OTHER) {
        let poly = p(f);
        let prec = prec_for(&poly, s, 7);
        let mut prev: Option<(Dyadic, Dyadic)> = None;
        for n in 1..=7 {
            let Ok(e) = estimate_tau(&poly, &BigInt::from(s), n, prec) else {
                assert!(prev.is_none(), "{f}: estimate failed at {n} after succeeding earlier");
                continue;
            };
            if let Some((lo, hi)) = &prev {
                // x^2-2x+2 conjugates to y^2 exactly, so y_n^{2^-n} = 2 is constant
                if f == "x^2-2x+2" {
                    assert!(e.lo >= *lo, "{f}: lo decreased at n = {n}");
                } else {
                    assert!(e.lo > *lo, "{f}: lo not increasing at n = {n}");
                }
                assert!(e.hi <= *hi, "{f}: hi increased at n = {n}");
            }
            prev = Some((e.lo, e.hi));
        }
        assert!(prev.is_some(), "{f}: no estimate succeeded");
    }
}

/// `floor(x^k)` and `ceil(x^k)` of a positive dyadic by integer shifts.
fn pow_floor_ceil(x: &Dyadic, k: u32) -> (BigInt, BigInt) {
    let m = x.mantissa().pow(k);
    let e = x.exponent() * k as i64;
    if e >= 0 {
        let v = m << e as u64;
        (v.clone(), v)
    } else {
        let sh = (-e) as u64;
        let fl = &m >> sh;
        let exact = (&fl << sh) == m;
        let ce = if exact { fl.clone() } else { &fl + 1 };
        (fl, ce)
    }
}

/// The interval predicts terms beyond those used to build it: for `alpha = 1`,
/// `lo^{d^n} + beta - 1/2 <= |x_n| <= hi^{d^n} + beta + 1/2`.
#[test]
fn interval_encloses_later_terms() {
    for &(f, s) in UNIT_ALPHA {
        let poly = p(f);
        let d = poly.degree() as u32;
        let n_max = 5;
        let est = estimate_tau(&poly, &BigInt::from(s), n_max, prec_for(&poly, s, n_max)).unwrap();
        let aff = normalize_affine(&poly).unwrap();
        assert_eq!(aff.alpha.exact(), Some(&BigRational::one()), "{f}");
        let beta = aff.beta;
        let xs = prefix(&poly, &BigInt::from(s), n_max + 2);
        for n in est.horizon..=n_max + 2 {
            let k = d.pow(n as u32);
            let (lo_floor, _) = pow_floor_ceil(&est.lo, k);
            let (_, hi_ceil) = pow_floor_ceil(&est.hi, k);
            let x = BigRational::from_integer(xs[n].abs());
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let low = BigRational::from_integer(lo_floor) + &beta - &half - BigRational::one();
            let high = BigRational::from_integer(hi_ceil) + &beta + &half + BigRational::one();
            assert!(low <= x && x <= high, "{f}: x_{n} = {} outside prediction", xs[n]);
        }
    }
}

/// Independent oracle: `y_N^{1/d^N}` and `(y_N + 1)^{1/d^N}` in `f64` bracket the
/// certified interval for `alpha = 1` maps.
#[test]
fn f64_root_bracket_oracle() {
    for &(f, s) in UNIT_ALPHA {
        let poly = p(f);
        let d = poly.degree() as i32;
        let n = 4;
        let est = estimate_tau(&poly, &BigInt::from(s), n, 128).unwrap();
        let beta = normalize_affine(&poly).unwrap().beta;
        let beta_f = beta.numer().to_string().parse::<f64>().unwrap()
            / beta.denom().to_string().parse::<f64>().unwrap();
        let x = prefix(&poly, &BigInt::from(s), n)[n].to_string().parse::<f64>().unwrap();
        let y = x - beta_f;
        let inv = 1.0 / (d as f64).powi(n as i32);
        let (olo, ohi) = ((y - 1.0).powf(inv), (y + 1.0).powf(inv));
        let lo: f64 = est.lo.to_sci(17).parse().unwrap();
        let hi: f64 = est.hi.to_sci(17).parse().unwrap();
        assert!(olo - 1e-12 <= lo && hi <= ohi + 1e-12, "{f}: [{lo}, {hi}] vs [{olo}, {ohi}]");
    }
}

#[test]
fn reconstruction_from_horizon() {
    for &(f, s) in UNIT_ALPHA.iter().chain(OTHER) {
        let poly = p(f);
        let n_max = 6;
        let est = estimate_tau(&poly, &BigInt::from(s), n_max, prec_for(&poly, s, n_max)).unwrap();
        assert!(est.horizon <= n_max, "{f}: horizon {}", est.horizon);
        let xs = prefix(&poly, &BigInt::from(s), n_max);
        for n in est.horizon..=n_max {
            assert_eq!(reconstruct(&poly, &est, n).unwrap(), xs[n].abs(), "{f} n = {n}");
        }
    }
    // negative early terms are matched in absolute value
    let poly = p("x^2-6x-1");
    let est = estimate_tau(&poly, &BigInt::from(3), 6, 256).unwrap();
    assert!(est.horizon >= 1 && est.horizon <= 2);
}

#[test]
fn fermat_interval_contains_two() {
    let est = estimate_tau(&p("x^2-2x+2"), &BigInt::from(3), 6, 128).unwrap();
    assert!(est.lo <= Dyadic::from_int(2) && Dyadic::from_int(2) <= est.hi);
}

fn alpha_contains(alpha: &Alpha, c: &SeriesCoeff, prec: u32) -> bool {
    match (alpha, c) {
        (Alpha::Exact { value }, SeriesCoeff::Exact(q)) => value == q,
        (a, c) => {
            let ai: Interval = a.interval(prec);
            let ci = c.interval(prec);
            ai.lo <= ci.hi && ci.lo <= ai.hi
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `c_1 = alpha` and `c_0 = beta` for every truncation.
    #[test]
    fn series_base_matches_normalization(
        lead in 1i64..=4,
        lower in prop::collection::vec(-4i64..=4, 2..=3),
        k in 1usize..=4,
    ) {
        let mut coeffs = lower;
        coeffs.push(lead);
        let poly = IntPoly::from_i64(&coeffs);
        let aff = normalize_affine(&poly).unwrap();
        let t = series_coefficients(&poly, k).unwrap();
        prop_assert!(alpha_contains(&aff.alpha, t.coeff(1).unwrap(), 128));
        let c0 = t.coeff(0).unwrap();
        match c0 {
            SeriesCoeff::Exact(q) => prop_assert_eq!(q, &aff.beta),
            SeriesCoeff::Enclosed(iv) => prop_assert!(iv.contains_rational(&aff.beta)),
        }
    }

    #[test]
    fn mills_floors_hold_at_both_ends(idx in 0usize..6) {
        let p0 = [2i64, 3, 5, 7, 11, 13][idx];
        let r = mills_sequence(&BigInt::from(p0), 3).unwrap();
        for (n, q) in r.primes.iter().enumerate() {
            let k = 3u32.pow(n as u32);
            prop_assert_eq!(&pow_floor_ceil(&r.tau.lo, k).0, q);
            prop_assert_eq!(&pow_floor_ceil(&r.tau.hi, k).0, q);
        }
        for w in r.primes.windows(2) {
            prop_assert!(w[0].pow(3) < w[1] && w[1] < (&w[0] + BigInt::one()).pow(3));
        }
    }
}
