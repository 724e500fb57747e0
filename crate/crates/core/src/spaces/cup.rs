//! The fibres `X_{2,m}` of the cup-power map `B^2 C_p -> B^{2m} C_p`.
//!
//! `chi_n(X_{2,m}) = p^(C(n,2m-1) - n) * sum_{k<m} r_k(n+1)` where `r_k(n)`
//! counts skew-symmetric `n x n` matrices of rank `2k` over `F_p`. The
//! counting interpretation (2-forms `w` with `w^m = 0`) is checked by
//! [`s_count_brute`], which computes wedge powers in the exterior algebra
//! directly.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{binomial, int, prime_pow, qbinomial, Rational};
use crate::error::{Error, Result};
use crate::expoly::{ExpoPoly, IntValuedPoly};
use crate::groups::Budget;
use crate::par::{self, ExecMode};

fn ensure_odd(p: u64) -> Result<()> {
    crate::arith::ensure_prime(p)?;
    if p == 2 {
        return Err(Error::EvenPrime(p));
    }
    Ok(())
}

/// `p^(k(k-1)) * prod_{i<=k} (p^(2i-1) - 1)`, the part of `r_k(n)` that does
/// not depend on `n`.
fn rank_prefactor(k: u64, p: u64) -> Rational {
    let mut c = prime_pow(p, (k * k.saturating_sub(1)) as i64);
    for i in 1..=k {
        c *= prime_pow(p, 2 * i as i64 - 1) - int(1);
    }
    c
}

/// Number of `n x n` skew-symmetric matrices over `F_p` of rank `2k`.
pub fn skew_rank_count(n: u64, k: u64, p: u64) -> Result<BigInt> {
    ensure_odd(p)?;
    let q = int(p as i64);
    let r = rank_prefactor(k, p) * qbinomial(n as i64, 2 * k, &q)?;
    if !r.is_integer() {
        return Err(Error::Inconsistent(format!("r_{k}({n}) = {r} at p = {p}")));
    }
    Ok(r.to_integer())
}

/// `chi_n(X_{2,m})` from the rank-count formula, for any integer `n` (the
/// value at `n = -1` is the rational-function extension).
pub fn cup_fiber_chi(m: u32, p: u64, n: i64) -> Result<Rational> {
    ensure_odd(p)?;
    if m == 0 {
        return Err(Error::Parse("cup-power fibre needs m >= 1".into()));
    }
    let q = int(p as i64);
    let mut sum = Rational::zero();
    for k in 0..m as u64 {
        sum += rank_prefactor(k, p) * qbinomial(n + 1, 2 * k, &q)?;
    }
    let e = binomial(n, 2 * m as u64 - 1) - BigInt::from(n);
    let value = sum * prime_pow(p, e.to_i64().expect("small exponent"));
    if n >= 0 && !value.is_integer() {
        return Err(Error::Inconsistent(format!(
            "chi_{n}(X_(2,{m})) = {value} is not an integer"
        )));
    }
    Ok(value)
}

/// The same function as an expolynomial: `qbinom(n+1, 2k)_p` is a polynomial
/// in `p^n`, so every summand expands into terms `c p^(C(n,2m-1) - n + i n)`.
pub fn cup_fiber_closed_form(m: u32, p: u64) -> Result<ExpoPoly> {
    ensure_odd(p)?;
    if m == 0 {
        return Err(Error::Parse("cup-power fibre needs m >= 1".into()));
    }
    let pn = ExpoPoly::power(p, IntValuedPoly::binom(1));
    let mut total = ExpoPoly::zero(p);
    for k in 0..m as u64 {
        // prod_{j=1..2k} (1 - p^(n+2-j)) / (1 - p^j)
        let mut numer = ExpoPoly::constant(p, int(1));
        let mut denom = Rational::one();
        for j in 1..=2 * k as i64 {
            let factor = ExpoPoly::constant(p, int(1)).sub(&pn.scale(&prime_pow(p, 2 - j)))?;
            numer = numer.mul(&factor)?;
            denom *= int(1) - prime_pow(p, j);
        }
        total = total.add(&numer.scale(&(rank_prefactor(k, p) / denom)))?;
    }
    let shift = IntValuedPoly::binom(2 * m as usize - 1).sub(&IntValuedPoly::binom(1));
    total.mul(&ExpoPoly::power(p, shift))
}

/// Sign of `e_a ^ e_b` relative to `e_(a|b)` for disjoint index masks.
fn wedge_sign(a: u32, b: u32) -> bool {
    // count pairs (i in a, j in b) with i > j
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    inversions % 2 == 1
}

/// Dense exterior-algebra element over `F_p`, indexed by basis masks.
fn wedge(x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; x.len()];
    for (a, &ca) in x.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (b, &cb) in y.iter().enumerate() {
            if cb == 0 || a & b != 0 {
                continue;
            }
            let prod = ca * cb % p;
            let slot = &mut out[a | b];
            *slot = if wedge_sign(a as u32, b as u32) {
                (*slot + p - prod) % p
            } else {
                (*slot + prod) % p
            };
        }
    }
    out
}

pub fn s_count_brute(d: u32, m: u32, n: u32, p: u64, budget: &Budget) -> Result<u64> {
    s_count_brute_with(d, m, n, p, budget, ExecMode::default())
}

/// Number of `w` in `Lambda^d F_p^n` with `w^m = 0`, by listing all of them.
pub fn s_count_brute_with(
    d: u32,
    m: u32,
    n: u32,
    p: u64,
    budget: &Budget,
    mode: ExecMode,
) -> Result<u64> {
    crate::arith::ensure_prime(p)?;
    if n > 16 || m == 0 {
        return Err(Error::Parse(format!(
            "s_count_brute needs m >= 1 and n <= 16, got m = {m}, n = {n}"
        )));
    }
    let basis: Vec<usize> = (0..1usize << n)
        .filter(|s| s.count_ones() == d)
        .collect();
    let total = (p as u128)
        .checked_pow(basis.len() as u32)
        .unwrap_or(u128::MAX);
    budget.check(
        "exterior power enumeration",
        total.saturating_mul((basis.len() * basis.len()) as u128 * m as u128),
    )?;
    let total = total.to_u64().expect("bounded by the budget");

    let dim = 1usize << n;
    Ok(par::sum_range(mode, 0..total, |code| {
        let mut w = vec![0u64; dim];
        let mut c = code;
        for &b in &basis {
            w[b] = c % p;
            c /= p;
        }
        let mut power = w.clone();
        for _ in 1..m {
            if power.iter().all(|&x| x == 0) {
                break;
            }
            power = wedge(&power, &w, p);
        }
        u64::from(power.iter().all(|&x| x == 0))
    }))
}
