//! Orbits of commuting tuples of p-power-order elements under simultaneous
//! conjugation.
//!
//! [`chi_bg`] counts them with Burnside's lemma: the orbit count equals
//! `|G|^-1` times the number of commuting `(n+1)`-tuples whose first `n`
//! entries have p-power order, and that number is computed by recursing into
//! centralizers one entry at a time. [`brute_force_commuting_tuples`] instead
//! lists every tuple and keeps the lexicographically least member of each
//! orbit; it shares no code with the recursion.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::subgroups::{classes_within, element_centralizers, is_p_power};
use super::{Budget, FiniteGroup};
use crate::error::{Error, Result};
use crate::par::{self, ExecMode};

/// Elements whose order is a power of `p`, identity included, in index order.
pub fn p_power_order_elements(g: &FiniteGroup, p: u64) -> Vec<usize> {
    g.elements()
        .filter(|&a| is_p_power(g.element_order(a) as u64, p))
        .collect()
}

struct Recursion<'g> {
    g: &'g FiniteGroup,
    cent: Vec<FixedBitSet>,
    is_p: FixedBitSet,
    memo: HashMap<(FixedBitSet, usize), BigUint>,
}

impl Recursion<'_> {
    /// Number of commuting tuples `(g_1..g_k, h)` in `h_set` with each `g_i`
    /// of p-power order.
    fn weight(&mut self, h_set: &FixedBitSet, k: usize) -> BigUint {
        if k == 0 {
            return BigUint::from(h_set.count_ones(..));
        }
        let key = (h_set.clone(), k);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        for class in classes_within(self.g, h_set) {
            let rep = class[0];
            if !self.is_p.contains(rep) {
                continue;
            }
            let mut c = h_set.clone();
            c.intersect_with(&self.cent[rep]);
            total += self.weight(&c, k - 1) * BigUint::from(class.len());
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// `chi_n(BG)`: conjugation orbits of commuting `n`-tuples of p-power-order
/// elements.
pub fn chi_bg(g: &FiniteGroup, p: u64, n: usize, budget: &Budget) -> Result<BigUint> {
    budget.check_order(g)?;
    let mut is_p = FixedBitSet::with_capacity(g.order());
    for a in p_power_order_elements(g, p) {
        is_p.insert(a);
    }
    let mut rec = Recursion {
        g,
        cent: element_centralizers(g),
        is_p,
        memo: HashMap::new(),
    };
    let mut whole = FixedBitSet::with_capacity(g.order());
    whole.insert_range(..);
    let total = rec.weight(&whole, n);
    let (q, r) = total.div_rem(&BigUint::from(g.order()));
    if !r.is_zero() {
        return Err(Error::Inconsistent(format!(
            "Burnside total {total} not divisible by |G| = {}",
            g.order()
        )));
    }
    Ok(q)
}

pub fn brute_force_commuting_tuples(
    g: &FiniteGroup,
    p: u64,
    n: usize,
    budget: &Budget,
) -> Result<BigUint> {
    brute_force_commuting_tuples_with(g, p, n, budget, ExecMode::default())
}

/// Orbit count by exhaustive listing of p-element `n`-tuples. A tuple is
/// counted iff it is the lexicographic minimum of its conjugation orbit.
pub fn brute_force_commuting_tuples_with(
    g: &FiniteGroup,
    p: u64,
    n: usize,
    budget: &Budget,
    mode: ExecMode,
) -> Result<BigUint> {
    let elems = p_power_order_elements(g, p);
    let k = elems.len() as u64;
    let tuples = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    budget.check(
        "brute-force tuple enumeration",
        tuples.saturating_mul(g.order() as u128 * n.max(1) as u128),
    )?;
    let tuples = tuples.to_u64().expect("bounded by the budget");

    // position of each p-element in `elems`
    let mut pos = vec![usize::MAX; g.order()];
    for (i, &a) in elems.iter().enumerate() {
        pos[a] = i;
    }

    let count = par::sum_range(mode, 0..tuples, |code| {
        let mut tuple = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            tuple.push((c % k) as usize);
            c /= k;
        }
        // most significant coordinate first
        tuple.reverse();
        for i in 0..n {
            for j in 0..i {
                if !g.commute(elems[tuple[i]], elems[tuple[j]]) {
                    return 0;
                }
            }
        }
        let minimal = g.elements().all(|x| {
            let image = tuple.iter().map(|&t| pos[g.conj(x, elems[t])]);
            image.cmp(tuple.iter().copied()) != std::cmp::Ordering::Less
        });
        u64::from(minimal)
    });
    Ok(BigUint::from(count))
}
