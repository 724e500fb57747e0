//! Slow, independent computations used to cross-check the closed forms.
//! None of them calls the formula it is meant to check.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{self, big, binomial, prime_pow, Rational};
use crate::error::{Error, Result};
use crate::groups::{Budget, FiniteGroup};
use crate::par::{self, ExecMode};
use crate::spaces::s_count_brute;

/// Rank of a matrix over `F_p` by Gaussian elimination.
#[allow(clippy::needless_range_loop)]
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][c] % p, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_multiple_of(p) {
                let factor = rows[r][c] % p;
                for k in 0..cols {
                    let sub = factor * rows[rank][k] % p;
                    rows[r][k] = (rows[r][k] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Histogram of ranks over all `n x n` skew-symmetric matrices over `F_p`:
/// entry `k` counts the matrices of rank `2k`.
#[allow(clippy::needless_range_loop)]
pub fn skew_rank_histogram(n: usize, p: u64, budget: &Budget, mode: ExecMode) -> Result<Vec<u64>> {
    arith::ensure_prime(p)?;
    let slots = n * n.saturating_sub(1) / 2;
    let total = (p as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    budget.check("skew matrix enumeration", total.saturating_mul((n * n * n).max(1) as u128))?;
    let total = total as u64;
    let hist = par::histogram_range(mode, 0..total, n + 1, |code| {
        let mut m = vec![vec![0u64; n]; n];
        let mut c = code;
        for i in 0..n {
            for j in i + 1..n {
                let v = c % p;
                c /= p;
                m[i][j] = v;
                m[j][i] = (p - v) % p;
            }
        }
        rank_mod_p(m, p)
    });
    if hist.iter().skip(1).step_by(2).any(|&c| c != 0) {
        return Err(Error::Inconsistent("a skew matrix has odd rank".into()));
    }
    Ok(hist.into_iter().step_by(2).collect())
}

/// `chi_n(X_(2,m))` reconstructed from the exhaustive count of 2-forms on
/// `F_p^(n+1)` with vanishing `m`-th power: `p^(C(n, 2m-1) - n) s(n+1)`.
pub fn cup_fiber_from_brute(m: u32, p: u64, n: u32, budget: &Budget) -> Result<Rational> {
    let s = s_count_brute(2, m, n + 1, p, budget)?;
    let e = binomial(n as i64, 2 * m as u64 - 1) - BigInt::from(n);
    let e = i64::try_from(e).expect("small exponent");
    Ok(big(s) * prime_pow(p, e))
}

/// `sum_(k<=n) (-1)^k N_k`, where `N_k` is the number of `k`-tuples of
/// non-identity elements, found by listing all `k`-tuples of `G`.
pub fn bar_nondegenerate_euler(g: &FiniteGroup, n: usize, budget: &Budget) -> Result<BigInt> {
    let order = g.order() as u64;
    let mut acc = BigInt::zero();
    for k in 0..=n {
        let total = (order as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        budget.check("bar simplex enumeration", total.saturating_mul(k.max(1) as u128))?;
        let count = par::sum_range(ExecMode::default(), 0..total as u64, |code| {
            let mut c = code;
            for _ in 0..k {
                if (c % order) as usize == g.identity() {
                    return 0;
                }
                c /= order;
            }
            1
        });
        if k % 2 == 0 {
            acc += count;
        } else {
            acc -= count;
        }
    }
    Ok(acc)
}

/// Mahler coefficients by repeated forward differencing.
pub fn forward_differences(xs: &[Rational]) -> Vec<Rational> {
    let mut row = xs.to_vec();
    let mut out = Vec::with_capacity(xs.len());
    while let Some(first) = row.first() {
        out.push(first.clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn ranks() {
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![3, 1]], 5), 1);
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![3, 1]], 3), 2);
        assert_eq!(rank_mod_p(vec![vec![0, 0], vec![0, 0]], 3), 0);
    }

    #[test]
    fn skew_histogram_small() {
        let b = Budget::default();
        let h = skew_rank_histogram(3, 3, &b, ExecMode::Sequential).unwrap();
        assert_eq!(h, vec![1, 26]);
        let h4 = skew_rank_histogram(4, 3, &b, ExecMode::Parallel).unwrap();
        assert_eq!(h4.iter().sum::<u64>(), 729);
        assert_eq!(h4[2], 468);
    }

    #[test]
    fn cup_from_brute() {
        let b = Budget::default();
        let vals: Vec<Rational> = (0..=3).map(|n| cup_fiber_from_brute(2, 3, n, &b).unwrap()).collect();
        assert_eq!(vals, vec![int(1), int(1), int(3), int(29)]);
    }

    #[test]
    fn bar_cells() {
        let b = Budget::default();
        let c3 = FiniteGroup::cyclic(3);
        let vals: Vec<BigInt> = (0..5).map(|n| bar_nondegenerate_euler(&c3, n, &b).unwrap()).collect();
        assert_eq!(vals, [1, -1, 3, -5, 11].map(BigInt::from));
    }

    #[test]
    fn differences() {
        let xs: Vec<Rational> = (0..6).map(|n| int(3i64.pow(n))).collect();
        let d = forward_differences(&xs);
        assert_eq!(d, (0..6).map(|n| int(2i64.pow(n))).collect::<Vec<_>>());
    }
}
