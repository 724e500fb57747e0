//! Expolynomials `sum_i c_i * p^(f_i(n))` with integer-valued polynomial
//! exponents, the closed form of most chi-sequences in this crate.
//!
//! Exponents are kept in the binomial basis `f(x) = sum_k a_k C(x, k)`, which
//! makes integer-valuedness automatic. Internally an [`ExpoPoly`] maps the
//! non-constant part of each exponent to a rational coefficient (the factor
//! `p^(f(0))` is folded into it), which is a canonical form: two expolynomials
//! are equal iff their term maps are equal. [`ExpoPoly::terms`] presents the
//! same data with p-adic unit coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, binomial, prime_pow, Rational};
use crate::error::{Error, Result};

/// Integer-valued polynomial in the binomial basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IntValuedPoly {
    coeffs: Vec<i64>,
}

impl IntValuedPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntValuedPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntValuedPoly::default()
    }

    pub fn constant(c: i64) -> Self {
        IntValuedPoly::new(vec![c])
    }

    /// `C(x, k)`.
    pub fn binom(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        IntValuedPoly::new(c)
    }

    /// The unique polynomial of degree `< values.len()` taking `values[i]` at
    /// `x = i`. Its binomial-basis coefficients are the forward differences.
    pub fn from_values(values: &[i64]) -> Self {
        let mut diffs = values.to_vec();
        let mut coeffs = Vec::with_capacity(values.len());
        while !diffs.is_empty() {
            coeffs.push(diffs[0]);
            diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        }
        IntValuedPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, n: i64) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| BigInt::from(a) * binomial(n, k as u64))
            .sum()
    }

    /// Evaluation for use as an exponent.
    pub fn eval_i64(&self, n: i64) -> i64 {
        self.eval(n)
            .to_i64()
            .expect("exponent polynomial value exceeds i64")
    }

    fn values(&self, len: usize) -> Vec<i64> {
        (0..len as i64).map(|n| self.eval_i64(n)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[i64], i: usize| v.get(i).copied().unwrap_or(0);
        IntValuedPoly::new(
            (0..len)
                .map(|i| get(&self.coeffs, i) + get(&other.coeffs, i))
                .collect(),
        )
    }

    pub fn scale(&self, c: i64) -> Self {
        IntValuedPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self.degree(), other.degree()) {
            (Some(a), Some(b)) => {
                let len = a + b + 1;
                let vals: Vec<i64> = self
                    .values(len)
                    .into_iter()
                    .zip(other.values(len))
                    .map(|(x, y)| x * y)
                    .collect();
                IntValuedPoly::from_values(&vals)
            }
            _ => IntValuedPoly::zero(),
        }
    }

    /// `x -> f(x + s)`.
    pub fn shift(&self, s: i64) -> Self {
        let len = self.coeffs.len();
        let vals: Vec<i64> = (0..len as i64).map(|n| self.eval_i64(n + s)).collect();
        IntValuedPoly::from_values(&vals)
    }

    /// `x -> x * f(x)`.
    pub fn mul_x(&self) -> Self {
        self.mul(&IntValuedPoly::binom(1))
    }
}

impl fmt::Display for IntValuedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let sign = if a < 0 { "-" } else { "+" };
            if first {
                if a < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let m = a.unsigned_abs();
            match (k, m) {
                (0, _) => write!(f, "{m}")?,
                (_, 1) => write!(f, "C(n,{k})")?,
                _ => write!(f, "{m}*C(n,{k})")?,
            }
        }
        Ok(())
    }
}

/// Finite rational combination of powers `p^(f(n))` over a single prime base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpoPoly {
    p: u64,
    terms: BTreeMap<IntValuedPoly, Rational>,
}

impl ExpoPoly {
    pub fn zero(p: u64) -> Self {
        ExpoPoly {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u64, c: Rational) -> Self {
        ExpoPoly::term(p, c, IntValuedPoly::zero())
    }

    pub fn term(p: u64, c: Rational, f: IntValuedPoly) -> Self {
        let mut e = ExpoPoly::zero(p);
        e.push(c, f);
        e
    }

    /// `p^(f(n))`.
    pub fn power(p: u64, f: IntValuedPoly) -> Self {
        ExpoPoly::term(p, Rational::one(), f)
    }

    /// Adds `c p^f`. Terms are keyed by the exponent with its constant part
    /// stripped, the factor `p^(f(0))` living in the coefficient.
    fn push(&mut self, c: Rational, f: IntValuedPoly) {
        if c.is_zero() {
            return;
        }
        let a0 = f.coeffs().first().copied().unwrap_or(0);
        let c = c * prime_pow(self.p, a0);
        let f = f.sub(&IntValuedPoly::constant(a0));
        match self.terms.entry(f) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn base(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(f, c)` with `c` a p-adic unit; any power of `p` is moved
    /// into the constant part of `f`.
    pub fn terms(&self) -> Vec<(IntValuedPoly, Rational)> {
        self.terms
            .iter()
            .map(|(f, c)| {
                let k = arith::l_valuation(c, self.p)
                    .finite()
                    .expect("stored coefficients are nonzero");
                (
                    f.add(&IntValuedPoly::constant(k)),
                    c / prime_pow(self.p, k),
                )
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.p != other.p && !self.is_trivial_base() && !other.is_trivial_base() {
            return Err(Error::MismatchedPrimes(self.p, other.p));
        }
        Ok(())
    }

    /// Constants (only exponent 0) combine with any base.
    fn is_trivial_base(&self) -> bool {
        self.terms.keys().all(IntValuedPoly::is_zero)
    }

    fn joint_base(&self, other: &Self) -> u64 {
        if self.is_trivial_base() {
            other.p
        } else {
            self.p
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let mut out = self.clone();
        out.p = self.joint_base(other);
        for (f, c) in &other.terms {
            out.push(c.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = ExpoPoly::zero(self.p);
        for (f, a) in &self.terms {
            out.push(a * c, f.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let mut out = ExpoPoly::zero(self.joint_base(other));
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                out.push(a * b, f.add(g));
            }
        }
        Ok(out)
    }

    /// Exact value at any integer, negative arguments included.
    pub fn eval(&self, n: i64) -> Rational {
        self.terms
            .iter()
            .map(|(f, c)| c * prime_pow(self.p, f.eval_i64(n)))
            .sum()
    }

    pub fn prefix(&self, len: usize) -> Vec<Rational> {
        (0..len as i64).map(|n| self.eval(n)).collect()
    }

    /// Value of the closed form at `n = -1`.
    pub fn extrapolate_minus_one(&self) -> Rational {
        self.eval(-1)
    }

    /// Largest exponent degree over all terms (0 for constants).
    pub fn exponent_degree(&self) -> usize {
        self.terms
            .keys()
            .filter_map(IntValuedPoly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ExpoPolyJson::from(self)).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: ExpoPolyJson = serde_json::from_value(v.clone())?;
        let mut e = ExpoPoly::zero(raw.p);
        for t in raw.terms {
            e.push(t.c, IntValuedPoly::new(t.f));
        }
        Ok(e)
    }
}

impl fmt::Display for ExpoPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if e.is_zero() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}^({e})", self.p)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(with = "arith::ratio_string")]
    c: Rational,
    f: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct ExpoPolyJson {
    p: u64,
    terms: Vec<TermJson>,
}

impl From<&ExpoPoly> for ExpoPolyJson {
    fn from(e: &ExpoPoly) -> Self {
        ExpoPolyJson {
            p: e.p,
            terms: e
                .terms()
                .into_iter()
                .map(|(f, c)| TermJson {
                    c,
                    f: f.coeffs().to_vec(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn d4_formula() -> ExpoPoly {
        // (1/8)(3 * 4^(n+1) - 2 * 2^(n+1)) = (3/8) 2^(2+2n) - (2/8) 2^(1+n)
        let a = ExpoPoly::term(2, rat(3, 8), IntValuedPoly::new(vec![2, 2]));
        let b = ExpoPoly::term(2, rat(-2, 8), IntValuedPoly::new(vec![1, 1]));
        a.add(&b).unwrap()
    }

    #[test]
    fn ip_eval_examples() {
        assert_eq!(IntValuedPoly::binom(2).eval(4), BigInt::from(6));
        for d in 0..6 {
            let want = if d % 2 == 0 { 1 } else { -1 };
            assert_eq!(IntValuedPoly::binom(d).eval(-1), BigInt::from(want));
        }
        // C(x-1, 0) at n = 1
        assert_eq!(IntValuedPoly::binom(0).shift(-1).eval(1), BigInt::from(1));
        // C(x-1, 2) = C(x,2) - C(x,1) + 1 (Pascal downwards)
        let s = IntValuedPoly::binom(2).shift(-1);
        for n in -4..6 {
            assert_eq!(s.eval(n), binomial(n - 1, 2));
        }
    }

    #[test]
    fn from_values_roundtrip() {
        let f = IntValuedPoly::new(vec![3, -1, 4, 0, 2]);
        let vals: Vec<i64> = (0..5).map(|n| f.eval_i64(n)).collect();
        assert_eq!(IntValuedPoly::from_values(&vals), f);
        // n^2 = 2 C(n,2) + C(n,1)
        assert_eq!(IntValuedPoly::binom(1).mul_x().coeffs(), &[0, 1, 2]);
    }

    #[test]
    fn ep_eval_examples() {
        let e = ExpoPoly::power(3, IntValuedPoly::binom(2));
        assert_eq!(e.eval(3), int(27));
        let d4 = d4_formula();
        assert_eq!(d4.eval(0), int(1));
        assert_eq!(d4.eval(1), int(5));
        assert_eq!(d4.eval(2), int(22));
    }

    #[test]
    fn extrapolation_examples() {
        for p in [3u64, 5, 7] {
            for d in [2usize, 4] {
                let e = ExpoPoly::power(p, IntValuedPoly::binom(d));
                assert_eq!(e.extrapolate_minus_one(), int(p as i64));
            }
            let odd = ExpoPoly::power(p, IntValuedPoly::binom(3));
            assert_eq!(odd.extrapolate_minus_one(), rat(1, p as i64));
        }
        assert_eq!(d4_formula().extrapolate_minus_one(), rat(1, 8));
        let trivial = ExpoPoly::power(5, IntValuedPoly::zero().mul_x());
        assert_eq!(trivial.extrapolate_minus_one(), int(1));
    }

    #[test]
    fn ring_examples() {
        let x = ExpoPoly::power(3, IntValuedPoly::binom(1));
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq, ExpoPoly::power(3, IntValuedPoly::new(vec![0, 2])));
        for n in 0..6 {
            assert_eq!(sq.eval(n), prime_pow(9, n));
        }
        assert!(x.add(&x.neg()).unwrap().is_zero());
        let other = ExpoPoly::power(5, IntValuedPoly::binom(1));
        assert_eq!(x.mul(&other), Err(Error::MismatchedPrimes(3, 5)));
        // constants mix with any base
        let two = ExpoPoly::constant(7, int(2));
        assert_eq!(two.mul(&x).unwrap().eval(2), int(18));
    }

    #[test]
    fn canonical_form_absorbs_powers_of_p() {
        let a = ExpoPoly::term(3, rat(1, 3), IntValuedPoly::new(vec![1, 1]));
        assert_eq!(a, ExpoPoly::power(3, IntValuedPoly::binom(1)));
        // 3^n + 2 * 3^n = 3^(n+1)
        let x = ExpoPoly::power(3, IntValuedPoly::binom(1));
        let sum = x.add(&x.scale(&int(2))).unwrap();
        assert_eq!(sum, ExpoPoly::power(3, IntValuedPoly::new(vec![1, 1])));
    }

    #[test]
    fn json_shape() {
        let d4 = d4_formula();
        let v = d4.to_json();
        assert_eq!(v["p"], 2);
        // (3/8) 2^(2+2n) - (1/4) 2^(1+n) = 3 * 2^(-1+2n) - 2^(-1+n)
        assert_eq!(v["terms"][0]["c"], "-1/1");
        assert_eq!(v["terms"][0]["f"], serde_json::json!([-1, 1]));
        assert_eq!(v["terms"][1]["c"], "3/1");
        assert_eq!(v["terms"][1]["f"], serde_json::json!([-1, 2]));
        assert_eq!(ExpoPoly::from_json(&v).unwrap(), d4);
    }
}
