//! Exhaustive checks of the classical bounds the weighted theorem
//! specializes to.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::brute::{brute_force_max, BruteForceOptions};
use crate::bounds::{ekr_bound, ft_bound, hm_bound, hm_stability_bound, TheoremParams};
use crate::combinatorics::{choose, lex_masks, low_bits, Rational};
use crate::enumerate::{subset_count, units};
use crate::error::Result;
use crate::families::Family;
use crate::Budget;

/// Exhaustive maximum against a closed-form bound.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicVerdict {
    pub theorem: String,
    pub params: BTreeMap<String, String>,
    pub observed: Option<Rational>,
    pub bound: Rational,
    pub candidates_examined: u64,
    /// One maximizer, families in order.
    pub witness: Vec<Family>,
    pub matched: bool,
}

fn params(pairs: &[(&str, u32)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Max of `|A| + |B|` over non-empty cross-intersecting `A ⊆ C([n],k)`,
/// `B ⊆ C([n],l)`: every non-empty `b` paired with its maximal partner,
/// which must be non-empty.
fn pair_sum_max(n: u32, k: u32, l: u32, budget: &Budget) -> Result<(Option<Rational>, u64, Vec<Family>)> {
    let p = TheoremParams::new(n, k, l, l, Rational::one())?;
    let opts = BruteForceOptions {
        window: Some((1, choose(n, l))),
        require_nonempty_partner: true,
        budget: *budget,
        witness_limit: 1,
    };
    let r = brute_force_max(&p, &opts)?;
    let witness = r.witnesses.into_iter().next().map(|w| vec![w.a, w.b]).unwrap_or_default();
    Ok((r.observed_max, r.candidates_examined, witness))
}

fn verdict(
    theorem: &str,
    params: BTreeMap<String, String>,
    found: (Option<Rational>, u64, Vec<Family>),
    bound: Rational,
) -> ClassicVerdict {
    let (observed, candidates_examined, witness) = found;
    ClassicVerdict {
        theorem: theorem.into(),
        params,
        matched: observed.as_ref() == Some(&bound),
        observed,
        bound,
        candidates_examined,
        witness,
    }
}

/// Non-empty cross-intersecting pair of k-families: sum at most
/// `C(n,k) - C(n-k,k) + 1`.
pub fn verify_hm(n: u32, k: u32, budget: &Budget) -> Result<ClassicVerdict> {
    let bound = Rational::from(hm_bound(n, k)?);
    let found = pair_sum_max(n, k, k, budget)?;
    Ok(verdict("hm", params(&[("n", n), ("k", k)]), found, bound))
}

/// Non-empty cross-intersecting k- and l-families, `k >= l`.
pub fn verify_ft(n: u32, k: u32, l: u32, budget: &Budget) -> Result<ClassicVerdict> {
    let bound = Rational::from(ft_bound(n, k, l)?);
    let found = pair_sum_max(n, k, l, budget)?;
    Ok(verdict("ft", params(&[("n", n), ("k", k), ("l", l)]), found, bound))
}

/// Largest intersecting k-family.
pub fn verify_ekr(n: u32, k: u32, budget: &Budget) -> Result<ClassicVerdict> {
    let bound = Rational::from(ekr_bound(n, k)?);
    let found = intersecting_max(n, k, false, budget)?;
    Ok(verdict("ekr", params(&[("n", n), ("k", k)]), found, bound))
}

/// Largest intersecting k-family whose members share no common element.
pub fn verify_hm_stability(n: u32, k: u32, budget: &Budget) -> Result<ClassicVerdict> {
    let bound = Rational::from(hm_stability_bound(n, k)?);
    let found = intersecting_max(n, k, true, budget)?;
    Ok(verdict("hm-stability", params(&[("n", n), ("k", k)]), found, bound))
}

fn intersecting_max(n: u32, k: u32, empty_core: bool, budget: &Budget) -> Result<(Option<Rational>, u64, Vec<Family>)> {
    let universe = choose(n, k);
    budget.check("k-layer size for intersecting search", universe as u128, budget.max_universe.min(63))?;
    let items = universe as u32;
    let total = subset_count(items, 1..=items);
    budget.check_candidates("intersecting subfamilies", total)?;
    let masks = lex_masks(n, k);
    // conflict[i]: indices of sets disjoint from set i.
    let conflict: Vec<u64> = masks
        .iter()
        .map(|&a| {
            masks
                .iter()
                .enumerate()
                .filter(|(_, &b)| a & b == 0)
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let full = low_bits(n);
    let best = units(items, 1..=items)
        .into_par_iter()
        .map(|unit| {
            let mut best: Option<u64> = None;
            unit.for_each(items, |f| {
                let mut rest = f;
                let mut core = full;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    if conflict[i] & f != 0 {
                        return;
                    }
                    core &= masks[i];
                    rest &= rest - 1;
                }
                if empty_core && core != 0 {
                    return;
                }
                // Larger families first, then the lex-least index set.
                let better = match best {
                    None => true,
                    Some(b) => f.count_ones() > b.count_ones() || (f.count_ones() == b.count_ones() && f < b),
                };
                if better {
                    best = Some(f);
                }
            });
            best
        })
        .reduce(
            || None,
            |x, y| match (x, y) {
                (None, y) => y,
                (x, None) => x,
                (Some(a), Some(b)) => {
                    if a.count_ones() > b.count_ones() || (a.count_ones() == b.count_ones() && a < b) {
                        Some(a)
                    } else {
                        Some(b)
                    }
                }
            },
        );
    Ok(match best {
        None => (None, total as u64, Vec::new()),
        Some(f) => {
            let fam = Family::from_sorted_masks(
                n,
                k,
                (0..items as usize).filter(|i| f >> i & 1 == 1).map(|i| masks[i]),
            );
            (Some(Rational::from(f.count_ones() as u64)), total as u64, vec![fam])
        }
    })
}
