//! Truncated power series over the rationals, and the generating functions
//! for symmetric groups: `sum_m chi_n(B Sigma_m) x^m` and
//! `sum_m |B Sigma_m|_p x^m`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, binomial_rational, int, qbinomial, ratio_vec, Rational};
use crate::error::{Error, Result};

/// Coefficients `a_0..=a_M`. Operations on series of different orders
/// truncate to the smaller one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedSeries {
    #[serde(with = "ratio_vec")]
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Pads with zeros or truncates to order `m`.
    pub fn new(mut coeffs: Vec<Rational>, m: usize) -> Self {
        coeffs.resize(m + 1, Rational::zero());
        TruncatedSeries { coeffs }
    }

    pub fn zero(m: usize) -> Self {
        Self::new(Vec::new(), m)
    }

    pub fn one(m: usize) -> Self {
        Self::new(vec![int(1)], m)
    }

    /// `c x^k`.
    pub fn monomial(c: Rational, k: usize, m: usize) -> Self {
        let mut s = Self::zero(m);
        if k <= m {
            s.coeffs[k] = c;
        }
        s
    }

    /// `1 - x^k`.
    pub fn one_minus_power(k: usize, m: usize) -> Self {
        Self::one(m).sub(&Self::monomial(int(1), k, m))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn truncate(&self, m: usize) -> Self {
        Self::new(self.coeffs[..=m.min(self.order())].to_vec(), m.min(self.order()))
    }

    fn common(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.common(other);
        Self::new((0..=m).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect(), m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.common(other);
        Self::new((0..=m).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect(), m)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.common(other);
        let mut out = vec![Rational::zero(); m + 1];
        for (i, a) in self.coeffs[..=m].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=m - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let mut out: Vec<Rational> = vec![inv0.clone()];
        for k in 1..=self.order() {
            let s: Rational = (1..=k).map(|i| &self.coeffs[i] * &out[k - i]).sum();
            out.push(-s * &inv0);
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn pow_int(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.reciprocal()? } else { self.clone() };
        let mut acc = Self::one(self.order());
        let mut sq = base;
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// `s^e = sum_k C(e, k) (s - 1)^k`; needs constant term 1 unless `e` is an
    /// integer.
    pub fn pow(&self, e: &Rational) -> Result<Self> {
        if e.is_integer() {
            if let Some(e) = e.to_integer().to_i64() {
                return self.pow_int(e);
            }
        }
        if self.coeffs[0].is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        if !self.coeffs[0].is_one() {
            return Err(Error::Unsupported(format!(
                "rational power {e} of a series with constant term {}",
                self.coeffs[0]
            )));
        }
        let m = self.order();
        let t = self.sub(&Self::one(m));
        let mut out = Self::zero(m);
        let mut t_k = Self::one(m);
        for k in 0..=m as u64 {
            out = out.add(&t_k.scale(&binomial_rational(e, k)));
            t_k = t_k.mul(&t);
        }
        Ok(out)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*x")?,
                _ => write!(f, "{a}*x^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

/// Number of subgroups of index `p^r` in `Z_p^n`: `qbinom(r+n-1, r)_p`.
pub fn subgroup_count_zpn(p: u64, n: u64, r: u64) -> Result<BigInt> {
    arith::ensure_prime(p)?;
    let q = qbinomial((r + n) as i64 - 1, r, &int(p as i64))?;
    Ok(q.to_integer())
}

/// `prod_(p^r <= M) (1 - x^(p^r))^(-qbinom(r+n-1, r)_p)` through `x^M`. For
/// `n >= 0` the coefficient of `x^m` is `chi_n(B Sigma_m)`; `n = -1` gives the
/// p-typical cardinality series.
pub fn chi_symmetric_gen_fun(p: u64, n: i64, m: usize) -> Result<TruncatedSeries> {
    arith::ensure_prime(p)?;
    let q = int(p as i64);
    let mut acc = TruncatedSeries::one(m);
    let mut r = 0u64;
    let mut pr = 1usize;
    while pr <= m {
        let e = qbinomial(r as i64 + n - 1, r, &q)?;
        if !e.is_zero() {
            acc = acc.mul(&TruncatedSeries::one_minus_power(pr, m).pow(&-e)?);
        }
        r += 1;
        pr = match pr.checked_mul(p as usize) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(acc)
}

/// `(1 - x^p)^(1/p) / (1 - x)` through `x^M`.
pub fn sym_cardinality_series(p: u64, m: usize) -> Result<TruncatedSeries> {
    arith::ensure_prime(p)?;
    if p == 2 {
        return Err(Error::EvenPrime(p));
    }
    let root = TruncatedSeries::one_minus_power(p as usize, m).pow(&arith::rat(1, p as i64))?;
    Ok(root.mul(&TruncatedSeries::one_minus_power(1, m).reciprocal()?))
}

/// `prod_(d <= m, p | d) (1 - 1/d)`: the probability that a uniform
/// permutation of `m` letters has order prime to `p`.
pub fn sym_cardinality_product(p: u64, m: u64) -> Rational {
    (1..=m / p)
        .map(|j| {
            let d = (j * p) as i64;
            arith::rat(d - 1, d)
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn geometric_series() {
        let s = TruncatedSeries::one_minus_power(1, 8).reciprocal().unwrap();
        assert!(s.coeffs().iter().all(|c| *c == int(1)));
        let s2 = TruncatedSeries::one_minus_power(1, 8).pow(&int(-1)).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn reciprocal_inverts() {
        let s = TruncatedSeries::new(vec![int(2), int(-3), rat(1, 5), int(7)], 9);
        assert_eq!(s.mul(&s.reciprocal().unwrap()), TruncatedSeries::one(9));
        let z = TruncatedSeries::new(vec![int(0), int(1)], 4);
        assert_eq!(z.reciprocal().unwrap_err(), Error::ZeroConstantTerm);
        assert_eq!(z.pow(&rat(1, 2)).unwrap_err(), Error::ZeroConstantTerm);
    }

    #[test]
    fn rational_power_roots() {
        let s = TruncatedSeries::new(vec![int(1), int(3), int(-2), rat(1, 7)], 10);
        let r = s.pow(&rat(1, 3)).unwrap();
        assert_eq!(r.pow_int(3).unwrap(), s);
        let sq = s.pow(&rat(1, 2)).unwrap().mul(&s.pow(&rat(1, 2)).unwrap());
        assert_eq!(sq, s);
        assert_eq!(s.pow(&int(0)).unwrap(), TruncatedSeries::one(10));
    }

    #[test]
    fn sym_cardinality_examples() {
        let s = sym_cardinality_series(3, 12).unwrap();
        assert_eq!(*s.coeff(4), rat(2, 3));
        assert_eq!(*s.coeff(3), rat(2, 3));
        for m in 0..3 {
            assert_eq!(*s.coeff(m), int(1));
        }
        assert_eq!(sym_cardinality_product(3, 4), rat(2, 3));
        assert_eq!(sym_cardinality_product(3, 6), rat(5, 9));
        assert_eq!(sym_cardinality_product(7, 6), int(1));
        assert!(matches!(sym_cardinality_series(2, 4), Err(Error::EvenPrime(2))));
    }

    #[test]
    fn series_matches_product() {
        for p in [3u64, 5, 7] {
            let s = sym_cardinality_series(p, 12).unwrap();
            for m in 0..=12 {
                assert_eq!(*s.coeff(m), sym_cardinality_product(p, m as u64), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn gen_fun_at_minus_one_is_cardinality_series() {
        for p in [3u64, 5] {
            assert_eq!(
                chi_symmetric_gen_fun(p, -1, 12).unwrap(),
                sym_cardinality_series(p, 12).unwrap()
            );
        }
    }

    #[test]
    fn gen_fun_examples() {
        let s = chi_symmetric_gen_fun(3, 1, 6).unwrap();
        assert_eq!(*s.coeff(3), int(2));
        assert_eq!(*s.coeff(4), int(2));
        for p in [3u64, 5, 7] {
            let s0 = chi_symmetric_gen_fun(p, 0, 10).unwrap();
            assert!(s0.coeffs().iter().all(|c| *c == int(1)));
        }
    }

    #[test]
    fn subgroup_counts() {
        for p in [3u64, 5] {
            for n in 0..4 {
                assert_eq!(subgroup_count_zpn(p, n, 0).unwrap(), BigInt::from(1));
            }
            for r in 0..5 {
                assert_eq!(subgroup_count_zpn(p, 1, r).unwrap(), BigInt::from(1));
            }
        }
        assert_eq!(subgroup_count_zpn(3, 2, 1).unwrap(), BigInt::from(4));
        // index p^2 in Z_p^2: p^2 + p + 1
        assert_eq!(subgroup_count_zpn(3, 2, 2).unwrap(), BigInt::from(13));
    }

    #[test]
    fn display() {
        let s = TruncatedSeries::new(vec![int(1), int(-2), int(0), rat(1, 3)], 3);
        assert_eq!(s.to_string(), "1 - 2*x + 1/3*x^3 + O(x^4)");
    }
}
