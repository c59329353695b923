//! Subfamily enumeration over bit-indexed universes, split into independent
//! work units for parallel scans.

use crate::combinatorics::choose;

/// Calls `f` on every `size`-bit mask within the low `width` bits, in
/// increasing numeric order (Gosper's hack).
pub(crate) fn for_each_combination(width: u32, size: u32, mut f: impl FnMut(u64)) {
    debug_assert!(width < 64);
    if size > width {
        return;
    }
    if size == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << width;
    let mut x = (1u64 << size) - 1;
    while x < limit {
        f(x);
        let low = x & x.wrapping_neg();
        let ripple = x + low;
        x = (((ripple ^ x) >> 2) / low) | ripple;
    }
}

/// A slice of the `size`-subsets of an `items`-element universe: those whose
/// lowest chosen index is `lowest` (or the empty subset when `size == 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Unit {
    pub size: u32,
    pub lowest: u32,
}

impl Unit {
    #[cfg(test)]
    pub fn count(&self, items: u32) -> u64 {
        if self.size == 0 {
            1
        } else {
            choose(items - 1 - self.lowest, self.size - 1)
        }
    }

    pub fn for_each(&self, items: u32, mut f: impl FnMut(u64)) {
        if self.size == 0 {
            f(0);
            return;
        }
        let base = 1u64 << self.lowest;
        let width = items - 1 - self.lowest;
        let shift = self.lowest + 1;
        for_each_combination(width, self.size - 1, |rest| f(base | rest << shift));
    }
}

/// Work units covering every subset of `items` elements with size in
/// `sizes`. Together they enumerate each subset exactly once.
pub(crate) fn units(items: u32, sizes: impl IntoIterator<Item = u32>) -> Vec<Unit> {
    let mut out = Vec::new();
    for size in sizes {
        if size > items {
            continue;
        }
        if size == 0 {
            out.push(Unit { size, lowest: 0 });
            continue;
        }
        for lowest in 0..=(items - size) {
            out.push(Unit { size, lowest });
        }
    }
    out
}

pub(crate) fn subset_count(items: u32, sizes: impl IntoIterator<Item = u32>) -> u128 {
    sizes
        .into_iter()
        .map(|m| choose(items, m) as u128)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn gosper_visits_each_combination_once_in_order() {
        for width in 0..=10u32 {
            for size in 0..=width + 1 {
                let mut seen = Vec::new();
                for_each_combination(width, size, |m| seen.push(m));
                let expect: Vec<u64> = (0u64..1 << width).filter(|m| m.count_ones() == size).collect();
                assert_eq!(seen, expect);
            }
        }
    }

    #[test]
    fn units_partition_the_subsets() {
        for items in 1..=10u32 {
            let sizes = 0..=items;
            let all_units = units(items, sizes.clone());
            let mut seen = BTreeSet::new();
            let mut total = 0u64;
            for u in &all_units {
                let mut c = 0;
                u.for_each(items, |m| {
                    assert!(seen.insert(m), "duplicate {m:b}");
                    c += 1;
                });
                assert_eq!(c, u.count(items));
                total += c;
            }
            assert_eq!(total as u128, subset_count(items, sizes));
            assert_eq!(total, 1u64 << items);
        }
    }
}
