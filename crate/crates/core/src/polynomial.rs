//! Integer polynomials: evaluation, composition, iteration and the two
//! conjugations used to normalise orbits.
//!
//! Coefficients are stored in ascending order (`coeffs[i]` multiplies `x^i`)
//! and the trailing coefficient is always nonzero; the zero polynomial is the
//! empty vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Default cap on the number of coefficients [`IntPoly::iterate`] may produce.
pub const DEFAULT_MAX_COEFFS: usize = 1 << 16;

/// Largest exponent accepted by the text parser.
const MAX_PARSE_DEGREE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("cannot parse polynomial {input:?} at byte {position}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },
    #[error("iterate would have degree {degree}, above the limit of {limit} coefficients")]
    CapExceeded { degree: u128, limit: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// The identity map `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `c * x^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::from_coeffs(coeffs)
    }

    /// `x - r`.
    pub fn linear_root(r: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![-r.into(), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// True for `c * x^d` with `c != 0` (including nonzero constants).
    pub fn is_monomial(&self) -> bool {
        !self.is_zero() && self.coeffs[..self.coeffs.len() - 1].iter().all(Zero::is_zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &IntPoly) -> IntPoly {
        let mut acc = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &IntPoly::constant(c.clone());
        }
        acc
    }

    /// The `n`-fold composite `f^n`, with `f^0 = x`.
    pub fn iterate(&self, n: u32) -> Result<IntPoly, PolyError> {
        self.iterate_with_limit(n, DEFAULT_MAX_COEFFS)
    }

    pub fn iterate_with_limit(&self, n: u32, max_coeffs: usize) -> Result<IntPoly, PolyError> {
        if n == 0 {
            return Ok(IntPoly::x());
        }
        let d = self.degree() as u128;
        if d >= 2 {
            let degree = d.checked_pow(n).unwrap_or(u128::MAX);
            if degree.saturating_add(1) > max_coeffs as u128 {
                return Err(PolyError::CapExceeded {
                    degree,
                    limit: max_coeffs,
                });
            }
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// `g(x) = -f(-x)`; the orbit of 0 under `g` is the negated orbit of 0 under `f`.
    pub fn sign_conjugate(&self) -> IntPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { -c } else { c.clone() })
            .collect();
        IntPoly::from_coeffs(coeffs)
    }

    /// `q(x) = f(x + t) - t`; the orbit of 0 under `q` is the orbit of `t`
    /// under `f`, shifted by `-t`.
    pub fn shift_conjugate(&self, t: &BigInt) -> IntPoly {
        let shifted = self.compose(&IntPoly::from_coeffs(vec![t.clone(), BigInt::one()]));
        &shifted - &IntPoly::constant(t.clone())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Number of distinct complex roots, `deg f - deg gcd(f, f')`.
    pub fn distinct_root_count(&self) -> usize {
        if self.is_constant() {
            return 0;
        }
        let f: Vec<BigRational> = self.coeffs.iter().cloned().map(BigRational::from_integer).collect();
        let df: Vec<BigRational> = self
            .derivative()
            .coeffs
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let g = rational_gcd(f, df);
        self.degree() - (g.len() - 1)
    }

    /// Ascending comma-separated coefficient list, e.g. `-1,-6,1`.
    pub fn to_coeff_list(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Accepts either an expression in `x` or an ascending coefficient list.
    pub fn parse(input: &str) -> Result<IntPoly, PolyError> {
        if input.contains(',') {
            parse_coeff_list(input)
        } else {
            Parser::new(input).parse()
        }
    }
}

fn rational_rem(mut a: Vec<BigRational>, b: &[BigRational]) -> Vec<BigRational> {
    let lb = b.last().expect("nonzero divisor").clone();
    while a.len() >= b.len() && !a.is_empty() {
        let shift = a.len() - b.len();
        let q = a.last().unwrap().clone() / &lb;
        for (i, c) in b.iter().enumerate() {
            a[shift + i] = &a[shift + i] - &q * c;
        }
        a.pop();
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
    }
    a
}

fn rational_gcd(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    while !b.is_empty() {
        let r = rational_rem(a, &b);
        a = b;
        b = r;
    }
    a
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            if i == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl FromStr for IntPoly {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntPoly::parse(s)
    }
}

fn parse_coeff_list(input: &str) -> Result<IntPoly, PolyError> {
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for part in input.split(',') {
        let trimmed = part.trim();
        let c = trimmed.parse::<BigInt>().map_err(|_| PolyError::Parse {
            input: input.to_string(),
            position: offset,
            message: format!("expected an integer coefficient, found {trimmed:?}"),
        })?;
        coeffs.push(c);
        offset += part.len() + 1;
    }
    Ok(IntPoly::from_coeffs(coeffs))
}

/// Recursive-descent parser for polynomial expressions in `x`.
///
/// Accepts sums of terms such as `c`, `c*x^k`, `cx^k`, `x^k`, `x`, plus
/// products and parenthesised factors (`7+x^5(x-1)(x-7)`).
struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input,
            bytes: input.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> PolyError {
        PolyError::Parse {
            input: self.input.to_string(),
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<IntPoly, PolyError> {
        if self.peek().is_none() {
            return Err(self.err("empty polynomial"));
        }
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<IntPoly, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.product()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<IntPoly, PolyError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                // juxtaposition: `6x`, `x(x-1)`, `2(x+1)`
                Some(b'x') | Some(b'X') | Some(b'(') => acc = &acc * &self.power()?,
                Some(c) if c.is_ascii_digit() => {
                    return Err(self.err("a number cannot follow a factor without '*'"))
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<IntPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a non-negative decimal exponent after '^'"));
            }
            let k: usize = self.input[start..self.pos]
                .parse()
                .map_err(|_| self.err("exponent too large"))?;
            if k.saturating_mul(base.degree().max(1)) > MAX_PARSE_DEGREE {
                return Err(self.err(format!("degree above {MAX_PARSE_DEGREE}")));
            }
            let mut acc = IntPoly::constant(1);
            for _ in 0..k {
                acc = &acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<IntPoly, PolyError> {
        match self.peek() {
            Some(b'x') | Some(b'X') => {
                self.pos += 1;
                Ok(IntPoly::x())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let value: BigInt = self.input[start..self.pos].parse().expect("digits");
                Ok(IntPoly::constant(value))
            }
            Some(_) => Err(self.err("expected a number, 'x' or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn orbit_of(f: &IntPoly, start: i64, n: usize) -> Vec<BigInt> {
        let mut out = vec![bi(start)];
        for _ in 0..n {
            let next = f.eval(out.last().unwrap());
            out.push(next);
        }
        out
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("x^2-x+1").eval_i64(2), bi(3));
        assert_eq!(p("x^2-x+1").eval_i64(0), bi(1));
        assert_eq!(p("x^2-6x-1").eval_i64(3), bi(-10));
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(p("x^2-2x+2").iterate(2).unwrap().eval_i64(0), bi(2));
        assert_eq!(p("x^3-7x+2").iterate(0).unwrap().eval_i64(7), bi(7));
        assert_eq!(p("x^2-x+1").iterate(3).unwrap().eval_i64(2), bi(43));
    }

    #[test]
    fn iterate_cap() {
        let err = p("x^2+1").iterate_with_limit(5, 16).unwrap_err();
        assert_eq!(
            err,
            PolyError::CapExceeded {
                degree: 32,
                limit: 16
            }
        );
        assert!(p("x^2+1").iterate_with_limit(4, 17).is_ok());
        // linear maps never grow in degree
        assert!(p("2x+1").iterate_with_limit(60, 4).is_ok());
    }

    #[test]
    fn sign_conjugate_examples() {
        let g = p("x^2-x+1").sign_conjugate();
        assert_eq!(g, p("-x^2-x-1"));
        assert_eq!(orbit_of(&g, 0, 2), vec![bi(0), bi(-1), bi(-1)]);
        assert_eq!(p("x").sign_conjugate(), p("x"));
        let g = p("x^2-2x+2").sign_conjugate();
        assert_eq!(g, p("-x^2-2x-2"));
        assert_eq!(orbit_of(&g, 0, 2), vec![bi(0), bi(-2), bi(-2)]);
    }

    #[test]
    fn shift_conjugate_examples() {
        let q = p("x^2-x+1").shift_conjugate(&bi(2));
        assert_eq!(
            orbit_of(&q, 0, 4),
            [0, 1, 5, 41, 1805].map(bi).to_vec()
        );
        let f = p("x^2-3x+7");
        assert_eq!(f.shift_conjugate(&bi(0)), f);
        let q = p("x^2-2x+2").shift_conjugate(&bi(3));
        assert_eq!(orbit_of(&q, 0, 3), [0, 2, 14, 254].map(bi).to_vec());
    }

    #[test]
    fn parse_forms_agree() {
        assert_eq!(p("x^2-6x-1"), p("-1,-6,1"));
        assert_eq!(p("x^2 - 6*x - 1"), p("-1, -6, 1"));
        assert_eq!(p("7+x^5(x-1)(x-7)"), p("7,0,0,0,0,7,-8,1"));
        assert_eq!(p("3-x(x-3)^2"), p("3,-9,6,-1"));
        assert_eq!(p("1+x+x^2-x^3"), p("1,1,1,-1"));
        assert_eq!(p("-x"), p("0,-1"));
        assert_eq!(p("0"), IntPoly::zero());
        assert_eq!(p("0,0,0"), IntPoly::zero());
        assert_eq!(p("5"), p("5,0"));
    }

    #[test]
    fn parse_errors_carry_position() {
        for bad in ["", "x^", "x^-2", "2x+", "(x+1", "x+y", "1,2,a", "x 3"] {
            let err = IntPoly::parse(bad).unwrap_err();
            assert!(matches!(err, PolyError::Parse { .. }), "{bad:?} -> {err:?}");
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(p("-1,-6,1").to_string(), "x^2-6x-1");
        assert_eq!(p("1,1,1,-1").to_string(), "-x^3+x^2+x+1");
        assert_eq!(p("0,-1").to_string(), "-x");
        assert_eq!(IntPoly::zero().to_string(), "0");
        assert_eq!(p("x^2-6x-1").to_coeff_list(), "-1,-6,1");
    }

    #[test]
    fn distinct_roots() {
        assert_eq!(p("x^2-1").distinct_root_count(), 2);
        assert_eq!(p("(x-1)^2(x-2)").distinct_root_count(), 2);
        assert_eq!(p("(x+3)^4").distinct_root_count(), 1);
        assert_eq!(p("x^2+1").distinct_root_count(), 2);
        assert_eq!(p("7").distinct_root_count(), 0);
    }

    fn small_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-5i64..=5, 1..=4).prop_map(|c| IntPoly::from_i64(&c))
    }

    proptest! {
        #[test]
        fn text_and_list_round_trip(poly in small_poly()) {
            prop_assert_eq!(IntPoly::parse(&poly.to_string()).unwrap(), poly.clone());
            prop_assert_eq!(IntPoly::parse(&poly.to_coeff_list()).unwrap(), poly);
        }

        #[test]
        fn iteration_is_a_homomorphism(poly in small_poly(), n in 0u32..=3, m in 0u32..=3, x in -10i64..=10) {
            let lhs = poly.iterate(n + m).unwrap().eval_i64(x);
            let inner = poly.iterate(m).unwrap().eval_i64(x);
            let rhs = poly.iterate(n).unwrap().eval(&inner);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn shift_conjugation_shifts_orbits(poly in small_poly(), t in -10i64..=10) {
            let q = poly.shift_conjugate(&bi(t));
            let shifted: Vec<BigInt> = orbit_of(&poly, t, 8).into_iter().map(|v| v - t).collect();
            prop_assert_eq!(orbit_of(&q, 0, 8), shifted);
        }

        #[test]
        fn sign_conjugation_negates_zero_orbit(poly in small_poly()) {
            let g = poly.sign_conjugate();
            let negated: Vec<BigInt> = orbit_of(&poly, 0, 8).into_iter().map(|v| -v).collect();
            prop_assert_eq!(orbit_of(&g, 0, 8), negated);
        }

        #[test]
        fn differences_divide_image_differences(poly in small_poly(), a in -50i64..=50, b in -50i64..=50) {
            prop_assume!(a != b);
            let diff = poly.eval_i64(a) - poly.eval_i64(b);
            prop_assert!((diff % bi(a - b)).is_zero());
        }
    }
}
