//! Moebius coefficients on the lattice of abelian subgroups and the resulting
//! closed form for `chi_n(BG)`.
//!
//! The coefficients `c_A` are fixed by requiring, for every abelian `A`, that
//! the `c_B` over abelian `B` *containing* `A` sum to one. Then any commuting
//! tuple (which generates an abelian subgroup) is counted exactly once by
//! `sum_A c_A * #{tuples inside A}`, which gives
//!
//! ```text
//! chi_n(BG) = |G|^-1 * sum_A c_A [A : A_p] |A_p|^(n+1)
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Budget, FiniteGroup, Subgroup};
use crate::arith::{big, log_exact, rat, Rational};
use crate::error::{Error, Result};
use crate::expoly::{ExpoPoly, IntValuedPoly};

/// `(A, c_A)` for every abelian subgroup, largest subgroups first. Zero
/// coefficients are kept so the list covers the whole abelian lattice.
pub fn moebius_coefficients(g: &FiniteGroup, budget: &Budget) -> Result<Vec<(Subgroup, i64)>> {
    let subs = g.abelian_subgroups(budget)?;
    let mut coeffs: Vec<i64> = Vec::with_capacity(subs.len());
    for (i, a) in subs.iter().enumerate() {
        // every proper overgroup sits strictly earlier in the order-sorted list
        let above: i64 = subs[..i]
            .iter()
            .zip(&coeffs)
            .filter(|(b, _)| b.order() > a.order() && a.is_subgroup_of(b))
            .map(|(_, &c)| c)
            .sum();
        coeffs.push(1 - above);
    }
    Ok(subs.into_iter().zip(coeffs).collect())
}

/// Closed form of `n -> chi_n(BG)` as an expolynomial in base `p`.
pub fn hkr_chi(g: &FiniteGroup, p: u64, budget: &Budget) -> Result<ExpoPoly> {
    let order = g.order() as i64;
    let mut e = ExpoPoly::zero(p);
    for (a, c) in moebius_coefficients(g, budget)? {
        if c == 0 {
            continue;
        }
        let ap = a.p_part_order(g, p) as u64;
        let k = log_exact(ap, p).ok_or_else(|| {
            Error::Inconsistent(format!("p-part of an abelian subgroup has order {ap}"))
        })? as i64;
        let index = a.order() as i64 / ap as i64;
        // |A_p|^(n+1) = p^(k + k n)
        let term = ExpoPoly::term(p, rat(c * index, order), IntValuedPoly::new(vec![k, k]));
        e = e.add(&term)?;
    }
    Ok(e)
}

pub fn p_typical_cardinality_by_moebius(
    g: &FiniteGroup,
    p: u64,
    budget: &Budget,
) -> Result<Rational> {
    let mut total = BigInt::zero();
    for (a, c) in moebius_coefficients(g, budget)? {
        let index = a.order() / a.p_part_order(g, p);
        total += BigInt::from(c) * BigInt::from(index);
    }
    Ok(big(total) / big(g.order()))
}

/// Fraction of elements whose order is prime to `p`.
pub fn p_typical_cardinality_by_counting(g: &FiniteGroup, p: u64) -> Rational {
    let prime_to_p = g
        .elements()
        .filter(|&a| !(g.element_order(a) as u64).is_multiple_of(p))
        .count();
    rat(prime_to_p as i64, g.order() as i64)
}

/// `|BG|_p`, computed by the Moebius sum and by direct counting; the two must
/// agree.
pub fn p_typical_cardinality(g: &FiniteGroup, p: u64, budget: &Budget) -> Result<Rational> {
    let moebius = p_typical_cardinality_by_moebius(g, p, budget)?;
    let counted = p_typical_cardinality_by_counting(g, p);
    if moebius != counted {
        return Err(Error::Inconsistent(format!(
            "p-typical cardinality of {}: Moebius sum {moebius} vs element count {counted}",
            g.display_name()
        )));
    }
    Ok(moebius)
}
