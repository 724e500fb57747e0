//! Finite groups as explicit multiplication tables.
//!
//! Elements are indices `0..order`. Everything downstream (centralizers,
//! abelian subgroups, commuting-tuple counts) works on the table directly;
//! there is no isomorphism testing, a group is identified by its table.

mod counting;
mod hkr;
mod subgroups;

use std::fmt;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use counting::{
    brute_force_commuting_tuples, brute_force_commuting_tuples_with, chi_bg,
    p_power_order_elements,
};
pub use hkr::{
    hkr_chi, moebius_coefficients, p_typical_cardinality, p_typical_cardinality_by_counting,
    p_typical_cardinality_by_moebius,
};
pub use subgroups::Subgroup;

/// Enumeration limits shared by every counting routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Cap on elementary steps of any exhaustive enumeration.
    pub enumeration: u64,
    /// Largest group order the subgroup machinery will accept.
    pub max_group_order: usize,
}

impl Budget {
    pub const DEFAULT_ENUMERATION: u64 = 1 << 28;
    pub const DEFAULT_MAX_GROUP_ORDER: usize = 720;

    pub fn with_enumeration(mut self, cap: u64) -> Self {
        self.enumeration = cap;
        self
    }

    pub fn with_max_group_order(mut self, order: usize) -> Self {
        self.max_group_order = order;
        self
    }

    /// Default budget with the enumeration cap overridden by `CC_BUDGET` when
    /// that variable holds an integer.
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Some(cap) = std::env::var("CC_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            b.enumeration = cap;
        }
        b
    }

    pub(crate) fn check(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.enumeration as u128 {
            return Err(Error::ResourceLimit {
                what,
                needed,
                budget: self.enumeration,
            });
        }
        Ok(())
    }

    pub(crate) fn check_order(&self, g: &FiniteGroup) -> Result<()> {
        if g.order() > self.max_group_order {
            return Err(Error::ResourceLimit {
                what: "group order",
                needed: g.order() as u128,
                budget: self.max_group_order as u64,
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enumeration: Self::DEFAULT_ENUMERATION,
            max_group_order: Self::DEFAULT_MAX_GROUP_ORDER,
        }
    }
}

#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
    name: Option<String>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl Hash for FiniteGroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.table.hash(state);
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 128;
const SAMPLED_ASSOCIATIVITY_TRIPLES: usize = 200_000;

impl FiniteGroup {
    /// Build from a row-major multiplication table, verifying the group
    /// axioms. Violations are reported with a witness.
    pub fn from_table(table: Vec<Vec<usize>>, name: Option<String>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::GroupAxiom("empty table".into()));
        }
        let mut flat = Vec::with_capacity(order * order);
        for (a, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::GroupAxiom(format!(
                    "row {a} has {} entries, expected {order}",
                    row.len()
                )));
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= order {
                    return Err(Error::GroupAxiom(format!("{a}*{b} = {c} is out of range")));
                }
                flat.push(c as u32);
            }
        }
        Self::from_flat(order, flat, name)
    }

    fn from_flat(order: usize, table: Vec<u32>, name: Option<String>) -> Result<Self> {
        let at = |a: usize, b: usize| table[a * order + b] as usize;

        // Latin square
        for a in 0..order {
            let mut row = vec![false; order];
            let mut col = vec![false; order];
            for b in 0..order {
                let r = at(a, b);
                let c = at(b, a);
                if row[r] {
                    return Err(Error::GroupAxiom(format!(
                        "row {a} repeats {r}: not a Latin square"
                    )));
                }
                if col[c] {
                    return Err(Error::GroupAxiom(format!(
                        "column {a} repeats {c}: not a Latin square"
                    )));
                }
                row[r] = true;
                col[c] = true;
            }
        }

        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::GroupAxiom("no two-sided identity".into()))?;

        let mut inverse = vec![0; order];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..order)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| Error::GroupAxiom(format!("{a} has no two-sided inverse")))?;
        }

        let assoc = |a: usize, b: usize, c: usize| -> Result<()> {
            if at(at(a, b), c) != at(a, at(b, c)) {
                return Err(Error::GroupAxiom(format!(
                    "associativity fails at ({a}, {b}, {c})"
                )));
            }
            Ok(())
        };
        if order <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        assoc(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(order as u64);
            for _ in 0..SAMPLED_ASSOCIATIVITY_TRIPLES {
                assoc(
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                )?;
            }
        }

        Ok(FiniteGroup {
            order,
            table,
            identity,
            inverse,
            name,
        })
    }

    /// Table from a multiplication closure on `0..order`; used by the presets.
    fn from_fn(order: usize, name: String, mul: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                table.push(mul(a, b) as u32);
            }
        }
        Self::from_flat(order, table, Some(name)).expect("preset tables are groups")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1, "cyclic group needs positive order");
        Self::from_fn(m, format!("C{m}"), |a, b| (a + b) % m)
    }

    /// Dihedral group of order `2k`, symmetries of a `k`-gon (`D4` has order 8).
    pub fn dihedral(k: usize) -> Self {
        assert!(k >= 1);
        // r^i s^a encoded as i + k a;  (r^i s^a)(r^j s^b) = r^(i + (-1)^a j) s^(a+b)
        Self::from_fn(2 * k, format!("D{k}"), |x, y| {
            let (i, a) = (x % k, x / k);
            let (j, b) = (y % k, y / k);
            let rot = if a == 0 { (i + j) % k } else { (i + k - j) % k };
            rot + k * ((a + b) % 2)
        })
    }

    pub fn quaternion() -> Self {
        // index = 4 * sign + unit, unit in {1, i, j, k}
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        Self::from_fn(8, "Q8".into(), |x, y| {
            let (s, u) = (x / 4, x % 4);
            let (t, v) = (y / 4, y % 4);
            let (sign, unit) = UNIT[u][v];
            4 * ((s + t + sign) % 2) + unit
        })
    }

    /// Symmetric group on `m` points; permutations ranked in lexicographic
    /// order, composition `(st)(x) = s(t(x))`.
    pub fn symmetric(m: usize) -> Self {
        let perms = permutations(m);
        let order = perms.len();
        Self::from_fn(order, format!("S{m}"), |a, b| {
            let (s, t) = (&perms[a], &perms[b]);
            let comp: Vec<u8> = t.iter().map(|&x| s[x as usize]).collect();
            lex_rank(&comp)
        })
    }

    /// Heisenberg group of unitriangular 3x3 matrices over `F_p`.
    pub fn heisenberg(p: usize) -> Self {
        let enc = |a: usize, b: usize, c: usize| a + p * b + p * p * c;
        Self::from_fn(p * p * p, format!("He{p}"), |x, y| {
            let (a, b, c) = (x % p, (x / p) % p, x / (p * p));
            let (a2, b2, c2) = (y % p, (y / p) % p, y / (p * p));
            enc((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p)
        })
    }

    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let m = h.order;
        let name = format!("{}x{}", g.display_name(), h.display_name());
        Self::from_fn(g.order * m, name, |x, y| {
            g.mul(x / m, y / m) * m + h.mul(x % m, y % m)
        })
    }

    /// Preset names: `C<m>`, `D<k>`, `Q8`, `S<m>`, `He<p>`, and products
    /// joined by `x` such as `C2xC4`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidGroupSpec(spec.to_string());
        let mut factors = spec.split('x').map(|f| Self::preset(f.trim()).ok_or_else(bad));
        let first = factors.next().ok_or_else(bad)??;
        factors.try_fold(first, |acc, f| Ok(Self::direct_product(&acc, &f?)))
    }

    fn preset(name: &str) -> Option<Self> {
        let num = |prefix: &str| -> Option<usize> {
            name.strip_prefix(prefix)?.parse().ok().filter(|&m| m >= 1)
        };
        if name == "Q8" {
            return Some(Self::quaternion());
        }
        if let Some(p) = num("He") {
            return crate::arith::is_prime(p as u64).then(|| Self::heisenberg(p));
        }
        if let Some(m) = num("C") {
            return Some(Self::cyclic(m));
        }
        if let Some(k) = num("D") {
            return Some(Self::dihedral(k));
        }
        if let Some(m) = num("S") {
            return (m <= 7).then(|| Self::symmetric(m));
        }
        None
    }

    /// Parse `{"order": N, "table": [[...]], "name": "..."}`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: GroupJson = serde_json::from_value(v.clone())?;
        if raw.order != raw.table.len() {
            return Err(Error::GroupAxiom(format!(
                "declared order {} but table has {} rows",
                raw.order,
                raw.table.len()
            )));
        }
        Self::from_table(raw.table, raw.name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let table = (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect();
        serde_json::to_value(GroupJson {
            order: self.order,
            table,
            name: self.name.clone(),
        })
        .expect("plain data")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn display_name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("<group of order {}>", self.order))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g a g^-1`.
    #[inline]
    pub fn conj(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inverse[g])
    }

    #[inline]
    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_p_group(&self, p: u64) -> bool {
        crate::arith::log_exact(self.order as u64, p).is_some()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.commute(a, b)))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

fn permutations(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..m as u8).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn lex_rank(perm: &[u8]) -> usize {
    let m = perm.len();
    let mut rank = 0;
    for i in 0..m {
        let smaller = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank = rank * (m - i) + smaller;
    }
    rank
}
