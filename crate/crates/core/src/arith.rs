//! Exact arithmetic kernel: rationals, generalized and Gaussian binomials,
//! l-adic valuations and the (inverse) binomial transform.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::par::{self, ExecMode};

/// Arbitrary precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `"num/den"`, also for integers (`"3/1"`).
pub fn format_ratio(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_ratio(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero(format!("rational literal {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Serde adapter storing a rational as a `"num/den"` string.
pub mod ratio_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_ratio(&s).map_err(serde::de::Error::custom)
    }
}

/// Same as [`ratio_string`] for sequences.
pub mod ratio_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_ratio))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_ratio(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn ensure_prime(p: u64) -> Result<u64> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `Some((p, e))` with `n = p^e`, `e >= 1`. `None` for `n < 2` or composite
/// non-prime-powers.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// Exponent of `p` in `n` when `n` is a power of `p` (`1 = p^0`).
pub fn log_exact(n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some(e)
}

/// Generalized binomial `n(n-1)...(n-k+1)/k!`, valid for negative `n`.
pub fn binomial(n: i64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n) - BigInt::from(i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// Binomial with a rational top argument.
pub fn binomial_rational(a: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= a - big(i);
        acc /= big(i + 1);
    }
    acc
}

/// `q^e` for any integer `e`; fails on `0^e` with `e < 0`.
pub fn pow_int(q: &Rational, e: i64) -> Result<Rational> {
    if e < 0 && q.is_zero() {
        return Err(Error::DivisionByZero(format!("0^{e}")));
    }
    let mag: BigInt = BigInt::from(e.unsigned_abs());
    let r: Rational = Pow::pow(q.clone(), mag);
    Ok(if e < 0 { r.recip() } else { r })
}

/// `p^e` for a natural base and integer exponent.
pub fn prime_pow(p: u64, e: i64) -> Rational {
    pow_int(&big(p), e).expect("nonzero base")
}

/// Gaussian binomial `prod_{j=1..b} (1 - q^(a-j+1)) / (1 - q^j)`, extended to
/// negative `a` by the same rational function.
pub fn qbinomial(a: i64, b: u64, q: &Rational) -> Result<Rational> {
    let mut num = Rational::one();
    let mut den = Rational::one();
    for j in 1..=b as i64 {
        num *= Rational::one() - pow_int(q, a - j + 1)?;
        den *= Rational::one() - pow_int(q, j)?;
    }
    if den.is_zero() {
        return Err(Error::DivisionByZero(format!(
            "qbinomial({a}, {b}) at q = {}",
            format_ratio(q)
        )));
    }
    Ok(num / den)
}

/// l-adic valuation of a rational; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

fn int_valuation(n: &BigInt, l: &BigInt) -> i64 {
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(l);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Exact power of `l` dividing `x` (negative when it divides the
/// denominator).
pub fn l_valuation(x: &Rational, l: u64) -> Valuation {
    assert!(l >= 2, "valuation base must be a prime, got {l}");
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let l = BigInt::from(l);
    Valuation::Finite(int_valuation(x.numer(), &l) - int_valuation(x.denom(), &l))
}

pub fn int_l_valuation(n: u64, l: u64) -> i64 {
    l_valuation(&big(n), l).finite().unwrap_or(i64::MAX)
}

/// `xbar(n) = sum_{k<=n} (-1)^(n-k) C(n,k) x(k)`, the n-th forward difference
/// at zero.
pub fn inverse_binomial_transform(xs: &[Rational]) -> Vec<Rational> {
    inverse_binomial_transform_with(xs, ExecMode::default())
}

pub fn inverse_binomial_transform_with(xs: &[Rational], mode: ExecMode) -> Vec<Rational> {
    par::map_range(mode, 0..xs.len(), |n| {
        let mut acc = Rational::zero();
        let mut c = BigInt::one();
        for k in (0..=n).rev() {
            // c = C(n, k) walking down from k = n
            let term = big(c.clone()) * &xs[k];
            if (n - k) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            if k > 0 {
                c = c * BigInt::from(k) / BigInt::from(n - k + 1);
            }
        }
        acc
    })
}

/// `x(n) = sum_{k<=n} C(n,k) xbar(k)`.
pub fn binomial_transform(xbar: &[Rational]) -> Vec<Rational> {
    binomial_transform_with(xbar, ExecMode::default())
}

pub fn binomial_transform_with(xbar: &[Rational], mode: ExecMode) -> Vec<Rational> {
    par::map_range(mode, 0..xbar.len(), |n| {
        let mut acc = Rational::zero();
        let mut c = BigInt::one();
        for (k, x) in xbar.iter().enumerate().take(n + 1) {
            acc += big(c.clone()) * x;
            c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        }
        acc
    })
}

/// Convert an integral rational to `i64` if it fits.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(4, 7), BigInt::from(0));
        for d in 0..8 {
            let expect = if d % 2 == 0 { 1 } else { -1 };
            assert_eq!(binomial(-1, d), BigInt::from(expect));
        }
        assert_eq!(binomial(-3, 2), BigInt::from(6));
    }

    #[test]
    fn qbinomial_examples() {
        for p in [2, 3, 5, 7] {
            assert_eq!(qbinomial(-1, 1, &int(p)).unwrap(), rat(-1, p));
            assert_eq!(qbinomial(-2, 0, &int(p)).unwrap(), int(1));
        }
        assert_eq!(qbinomial(3, 2, &int(3)).unwrap(), int(13));
        assert_eq!(qbinomial(4, 2, &int(3)).unwrap(), int(130));
        assert_eq!(qbinomial(2, 5, &int(3)).unwrap(), int(0));
    }

    #[test]
    fn qbinomial_vanishing_denominator() {
        assert!(matches!(
            qbinomial(3, 1, &int(1)),
            Err(Error::DivisionByZero(_))
        ));
        assert!(qbinomial(-1, 1, &int(0)).is_err());
        // b = 0 has an empty denominator
        assert_eq!(qbinomial(5, 0, &int(1)).unwrap(), int(1));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(l_valuation(&int(24), 2), Valuation::Finite(3));
        assert_eq!(l_valuation(&rat(1, 9), 3), Valuation::Finite(-2));
        assert_eq!(l_valuation(&int(0), 5), Valuation::Infinite);
        assert_eq!(l_valuation(&rat(-40, 3), 2), Valuation::Finite(3));
        assert!(Valuation::Infinite > Valuation::Finite(1000));
    }

    #[test]
    fn transform_examples() {
        let c: Vec<_> = (0..6).map(|_| rat(7, 2)).collect();
        let cb = inverse_binomial_transform(&c);
        assert_eq!(cb[0], rat(7, 2));
        assert!(cb[1..].iter().all(Zero::is_zero));
        assert_eq!(binomial_transform(&cb), c);

        let threes: Vec<_> = (0..10).map(|n| prime_pow(3, n)).collect();
        let nines: Vec<_> = (0..10).map(|n| prime_pow(9, n)).collect();
        let twos: Vec<_> = (0..10).map(|n| prime_pow(2, n)).collect();
        let eights: Vec<_> = (0..10).map(|n| prime_pow(8, n)).collect();
        assert_eq!(inverse_binomial_transform(&threes), twos);
        assert_eq!(inverse_binomial_transform(&nines), eights);
        assert_eq!(binomial_transform(&twos), threes);
    }

    #[test]
    fn ratio_strings() {
        assert_eq!(format_ratio(&int(3)), "3/1");
        assert_eq!(format_ratio(&rat(2, -4)), "-1/2");
        assert_eq!(parse_ratio("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_ratio("5").unwrap(), int(5));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn prime_helpers() {
        assert!(is_prime(2) && is_prime(97) && !is_prime(1) && !is_prime(91));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(log_exact(1, 5), Some(0));
        assert_eq!(log_exact(10, 5), None);
    }
}
