use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use super::{Budget, FiniteGroup};
use crate::error::Result;

/// A subgroup of some [`FiniteGroup`], stored as its element set. Methods that
/// need the multiplication take the parent group explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    mask: FixedBitSet,
}

impl Subgroup {
    pub(crate) fn from_mask(mask: FixedBitSet) -> Self {
        Subgroup { mask }
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        let mut mask = FixedBitSet::with_capacity(g.order());
        mask.insert(g.identity());
        Subgroup { mask }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        let mut mask = FixedBitSet::with_capacity(g.order());
        mask.insert_range(..);
        Subgroup { mask }
    }

    /// Subgroup generated by `gens`.
    pub fn generated(g: &FiniteGroup, gens: &[usize]) -> Self {
        let mut mask = FixedBitSet::with_capacity(g.order());
        mask.insert(g.identity());
        let mut queue = vec![g.identity()];
        while let Some(x) = queue.pop() {
            for &s in gens {
                let y = g.mul(x, s);
                if !mask.put(y) {
                    queue.push(y);
                }
            }
        }
        Subgroup { mask }
    }

    pub fn order(&self) -> usize {
        self.mask.count_ones(..)
    }

    pub fn contains(&self, a: usize) -> bool {
        self.mask.contains(a)
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.ones()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.mask.is_subset(&other.mask)
    }

    pub fn mask(&self) -> &FixedBitSet {
        &self.mask
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let mut mask = self.mask.clone();
        mask.intersect_with(&other.mask);
        Subgroup { mask }
    }

    pub fn is_abelian(&self, g: &FiniteGroup) -> bool {
        let els: Vec<usize> = self.elements().collect();
        els.iter()
            .enumerate()
            .all(|(i, &a)| els[..i].iter().all(|&b| g.commute(a, b)))
    }

    /// Number of elements whose order is a power of `p`.
    pub fn p_part_order(&self, g: &FiniteGroup, p: u64) -> usize {
        self.elements()
            .filter(|&a| is_p_power(g.element_order(a) as u64, p))
            .count()
    }
}

pub(crate) fn is_p_power(mut n: u64, p: u64) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// Centralizer bitset of every element: `cent[a]` holds the `b` commuting
/// with `a`.
pub(crate) fn element_centralizers(g: &FiniteGroup) -> Vec<FixedBitSet> {
    g.elements()
        .map(|a| {
            let mut m = FixedBitSet::with_capacity(g.order());
            for b in g.elements() {
                if g.commute(a, b) {
                    m.insert(b);
                }
            }
            m
        })
        .collect()
}

/// Conjugacy classes of the elements of `h` under conjugation by `h`.
pub(crate) fn classes_within(g: &FiniteGroup, h: &FixedBitSet) -> Vec<Vec<usize>> {
    let mut seen = FixedBitSet::with_capacity(g.order());
    let mut classes = Vec::new();
    for a in h.ones() {
        if seen.contains(a) {
            continue;
        }
        let mut class = Vec::new();
        for x in h.ones() {
            let b = g.conj(x, a);
            if !seen.put(b) {
                class.push(b);
            }
        }
        classes.push(class);
    }
    classes
}

impl FiniteGroup {
    /// Every abelian subgroup, each exactly once, sorted by decreasing order
    /// (ties broken by element set).
    pub fn abelian_subgroups(&self, budget: &Budget) -> Result<Vec<Subgroup>> {
        budget.check_order(self)?;
        let cent = element_centralizers(self);

        let trivial = Subgroup::trivial(self);
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        seen.insert(trivial.mask.clone());
        let mut frontier = vec![(trivial, Vec::<usize>::new())];
        let mut all = Vec::new();

        while let Some((a, gens)) = frontier.pop() {
            // elements commuting with all of A
            let mut c = FixedBitSet::with_capacity(self.order());
            c.insert_range(..);
            for &s in &gens {
                c.intersect_with(&cent[s]);
            }
            c.difference_with(&a.mask);
            // each cyclic extension <A, x> is visited once per A
            let mut covered = FixedBitSet::with_capacity(self.order());
            for x in c.ones() {
                if covered.contains(x) {
                    continue;
                }
                let mut next_gens = gens.clone();
                next_gens.push(x);
                let b = Subgroup::generated(self, &next_gens);
                // every generator x^k of <x> gives the same B
                let ord = self.element_order(x);
                let mut y = x;
                for k in 1..ord {
                    if num_integer::gcd(k, ord) == 1 {
                        covered.insert(y);
                    }
                    y = self.mul(y, x);
                }
                if seen.insert(b.mask.clone()) {
                    frontier.push((b, next_gens));
                }
            }
            all.push(a);
        }

        all.sort_by(|x, y| y.order().cmp(&x.order()).then_with(|| x.cmp(y)));
        Ok(all)
    }

    pub fn centralizer_of(&self, elements: &[usize]) -> Subgroup {
        let mut mask = FixedBitSet::with_capacity(self.order());
        for b in self.elements() {
            if elements.iter().all(|&a| self.commute(a, b)) {
                mask.insert(b);
            }
        }
        Subgroup::from_mask(mask)
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut whole = FixedBitSet::with_capacity(self.order());
        whole.insert_range(..);
        classes_within(self, &whole)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_abelian(spec: &str) -> usize {
        FiniteGroup::from_spec(spec)
            .unwrap()
            .abelian_subgroups(&Budget::default())
            .unwrap()
            .len()
    }

    #[test]
    fn abelian_subgroup_counts() {
        assert_eq!(count_abelian("C5"), 2);
        assert_eq!(count_abelian("C7"), 2);
        assert_eq!(count_abelian("D4"), 9);
        assert_eq!(count_abelian("Q8"), 5);
        // C2 x C2: trivial, three lines, whole
        assert_eq!(count_abelian("C2xC2"), 5);
        assert_eq!(count_abelian("C1"), 1);
    }

    #[test]
    fn abelian_subgroups_are_closed_and_abelian() {
        let g = FiniteGroup::from_spec("S4").unwrap();
        let subs = g.abelian_subgroups(&Budget::default()).unwrap();
        for s in &subs {
            assert!(s.is_abelian(&g));
            for a in s.elements() {
                assert!(s.contains(g.inv(a)));
                for b in s.elements() {
                    assert!(s.contains(g.mul(a, b)));
                }
            }
        }
        let distinct: HashSet<_> = subs.iter().collect();
        assert_eq!(distinct.len(), subs.len());
    }

    #[test]
    fn class_equation() {
        for spec in ["D4", "Q8", "S4", "He3"] {
            let g = FiniteGroup::from_spec(spec).unwrap();
            let classes = g.conjugacy_classes();
            assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), g.order());
            for cl in &classes {
                let c = g.centralizer_of(&[cl[0]]);
                assert_eq!(cl.len() * c.order(), g.order());
            }
        }
        assert_eq!(FiniteGroup::from_spec("D4").unwrap().conjugacy_classes().len(), 5);
        assert_eq!(FiniteGroup::from_spec("S4").unwrap().conjugacy_classes().len(), 5);
    }

    #[test]
    fn order_cap_is_enforced() {
        let g = FiniteGroup::from_spec("C16").unwrap();
        let tight = Budget::default().with_max_group_order(8);
        assert!(g.abelian_subgroups(&tight).is_err());
    }
}
