//! Exhaustive engine: every l-subfamily in the size window, each paired with
//! its maximal partner.

use rayon::prelude::*;
use serde::Serialize;

use super::classify::Classifier;
use super::{Engine, ScanResult, Witness, WitnessTally};
use crate::bounds::{main_bound, TheoremParams};
use crate::combinatorics::{lex_masks, Rational};
use crate::enumerate::{subset_count, units};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::Budget;

#[derive(Clone, Debug, Serialize)]
pub struct BruteForceOptions {
    /// `|b|` range; `None` means the theorem's window
    /// `[C(n-r,l-r), C(n-1,l-1)]`.
    pub window: Option<(u64, u64)>,
    /// Skip `b` whose maximal partner is empty.
    pub require_nonempty_partner: bool,
    pub budget: Budget,
    /// How many witnesses to materialize; all are still counted and
    /// classified.
    pub witness_limit: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            window: None,
            require_nonempty_partner: false,
            budget: Budget::default(),
            witness_limit: 64,
        }
    }
}

/// Precomputed tables shared by both engines.
pub(crate) struct Layers {
    pub k_masks: Vec<u64>,
    pub l_masks: Vec<u64>,
    /// `p_index[s]`: bitmask over l-indices of `P_s`, for `s` in `1..=l`.
    p_index: Vec<u64>,
}

impl Layers {
    pub fn new(p: &TheoremParams, l_masks: Vec<u64>) -> Self {
        let k_masks = lex_masks(p.n, p.k);
        let p_index = (0..=p.l)
            .map(|s| {
                let seg = (1u64 << s) - 1;
                l_masks
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m & seg == seg)
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        Layers {
            k_masks,
            l_masks,
            p_index,
        }
    }

    /// Least `s` with `P_s ⊆ b`, with `b` given over l-indices.
    pub fn minimal_s(&self, b: u64) -> Option<u32> {
        (1..self.p_index.len()).find(|&s| self.p_index[s] & !b == 0).map(|s| s as u32)
    }
}

/// `(numerator, denominator)` of `c` for scaled integer comparison.
pub(crate) fn scaled_weight(c: &Rational) -> Result<(u128, u128)> {
    c.to_u64_pair()
        .map(|(p, q)| (p as u128, q as u128))
        .ok_or(Error::pre("search", "c has a u64 numerator and denominator"))
}

fn window(p: &TheoremParams, opts: &BruteForceOptions, universe: u64) -> Result<(u64, u64)> {
    let (lo, hi) = opts.window.unwrap_or((p.window_lo(), p.window_hi()));
    if lo > hi {
        return Err(Error::pre("size window", "lo <= hi"));
    }
    Ok((lo, hi.min(universe)))
}

/// Maximum of `|a| + c|b|` over all `b ⊆ C([n],l)` with `|b|` in the
/// window and `a` the maximal partner of `b`.
pub fn brute_force_max(p: &TheoremParams, opts: &BruteForceOptions) -> Result<ScanResult> {
    let universe = crate::combinatorics::choose(p.n, p.l);
    opts.budget
        .check("l-layer size for brute force", universe as u128, opts.budget.max_universe.min(63))?;
    let (lo, hi) = window(p, opts, universe)?;
    let items = universe as u32;
    let sizes = lo.min(hi + 1) as u32..=hi as u32;
    let total = subset_count(items, sizes.clone());
    opts.budget.check_candidates("brute-force subfamilies", total)?;

    let layers = Layers::new(p, lex_masks(p.n, p.l));
    // disj[A]: l-indices disjoint from the k-set A. A belongs to the maximal
    // partner of b exactly when disj[A] misses b.
    let disj: Vec<u64> = layers
        .k_masks
        .iter()
        .map(|&a| {
            layers
                .l_masks
                .iter()
                .enumerate()
                .filter(|(_, &b)| a & b == 0)
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let (cp, cq) = scaled_weight(&p.c)?;
    let nonempty = opts.require_nonempty_partner;

    let best = units(items, sizes)
        .into_par_iter()
        .map(|unit| {
            let mut best: Option<(u128, Vec<u64>)> = None;
            unit.for_each(items, |b| {
                let partner = disj.iter().filter(|&&d| d & b == 0).count() as u128;
                if nonempty && partner == 0 {
                    return;
                }
                let value = cq * partner + cp * b.count_ones() as u128;
                match &mut best {
                    Some((v, list)) if *v == value => list.push(b),
                    Some((v, _)) if *v > value => {}
                    _ => best = Some((value, vec![b])),
                }
            });
            best
        })
        .reduce(|| None, merge);

    let bound = main_bound(p);
    let classifier = Classifier::new(p);
    let mut tally = WitnessTally::new(opts.witness_limit);
    let observed_max = match best {
        None => None,
        Some((value, mut bs)) => {
            // Lex-rank signature order: ascending ranks, compared as sequences.
            bs.sort_by_key(|&b| signature(b));
            for b in bs {
                let a_masks: Vec<u64> = layers
                    .k_masks
                    .iter()
                    .zip(&disj)
                    .filter(|(_, &d)| d & b == 0)
                    .map(|(&a, _)| a)
                    .collect();
                let b_masks: Vec<u64> = ones(b).map(|i| layers.l_masks[i]).collect();
                let case = classifier.classify(&a_masks, &b_masks);
                tally.record(&case, || Witness {
                    a: Family::from_sorted_masks(p.n, p.k, a_masks.iter().copied()),
                    b: Family::from_sorted_masks(p.n, p.l, b_masks.iter().copied()),
                    minimal_s: layers.minimal_s(b),
                    classification: case.clone(),
                });
            }
            Some(Rational::new(value, cq).expect("q > 0"))
        }
    };
    let matched = observed_max.as_ref() == Some(&bound.max_value);
    Ok(ScanResult {
        engine: Engine::Brute,
        params: p.clone(),
        window: (lo, hi),
        require_nonempty_partner: nonempty,
        candidates_examined: total as u64,
        observed_max,
        witnesses_truncated: tally.count > tally.witnesses.len() as u64,
        witness_count: tally.count,
        witnesses: tally.witnesses,
        classification_counts: tally.counts,
        unclassified_example: tally.unclassified,
        bound,
        matched,
    })
}

fn merge(x: Option<(u128, Vec<u64>)>, y: Option<(u128, Vec<u64>)>) -> Option<(u128, Vec<u64>)> {
    match (x, y) {
        (None, y) => y,
        (x, None) => x,
        (Some((vx, mut lx)), Some((vy, ly))) => {
            if vx > vy {
                Some((vx, lx))
            } else if vy > vx {
                Some((vy, ly))
            } else {
                lx.extend(ly);
                Some((vx, lx))
            }
        }
    }
}

fn ones(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

fn signature(b: u64) -> Vec<usize> {
    ones(b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{hm_bound, ExtremalCase};
    use crate::families::{is_cross_intersecting, maximal_partner};

    fn params(n: u32, k: u32, l: u32, r: u32, c: &str) -> TheoremParams {
        TheoremParams::new(n, k, l, r, c.parse().unwrap()).unwrap()
    }

    /// Independent oracle: walk every subfamily through the public family API.
    fn naive_max(p: &TheoremParams, lo: u64, hi: u64, nonempty: bool) -> Option<Rational> {
        let layer = Family::complete(p.n, p.l).unwrap();
        let n_sets = layer.len();
        let mut best: Option<Rational> = None;
        for bits in 0u64..1 << n_sets {
            let size = bits.count_ones() as u64;
            if size < lo || size > hi {
                continue;
            }
            let b = Family::new(
                p.n,
                p.l,
                layer.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, s)| *s),
            )
            .unwrap();
            let a = maximal_partner(&b, p.k).unwrap();
            if nonempty && a.is_empty() {
                continue;
            }
            let v = Rational::from(a.len() as u64) + p.c.clone() * Rational::from(size);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        best
    }

    #[test]
    fn matches_naive_oracle() {
        for (n, k, l, r, c) in [(4, 2, 2, 2, "1"), (5, 2, 2, 1, "1/2"), (5, 2, 3, 2, "2"), (5, 3, 2, 2, "1/10")] {
            let p = params(n, k, l, r, c);
            let got = brute_force_max(&p, &BruteForceOptions::default()).unwrap();
            assert_eq!(got.observed_max, naive_max(&p, p.window_lo(), p.window_hi(), false), "{p:?}");
        }
    }

    #[test]
    fn hm_values_with_nonempty_partner() {
        for (n, expect) in [(4u32, 6u64), (5, 8)] {
            let p = params(n, 2, 2, 2, "1");
            let layer = crate::combinatorics::choose(n, 2);
            let opts = BruteForceOptions {
                window: Some((1, layer)),
                require_nonempty_partner: true,
                ..Default::default()
            };
            let got = brute_force_max(&p, &opts).unwrap();
            assert_eq!(got.observed_max, Some(Rational::from(expect)));
            assert_eq!(Rational::from(hm_bound(n, 2).unwrap()), Rational::from(expect));
            assert_eq!(got.observed_max, naive_max(&p, 1, layer, true));
        }
    }

    #[test]
    fn four_two_two_witnesses_are_complement_pairs() {
        let p = params(4, 2, 2, 2, "1");
        let got = brute_force_max(&p, &BruteForceOptions::default()).unwrap();
        assert!(got.matched);
        // At n = k + l each member of b removes exactly its complement from
        // the partner, so all 6 + 15 + 20 subfamilies attain 6.
        assert_eq!(got.witness_count, 41);
        assert_eq!(got.classification_counts.get(&ExtremalCase::Iv), Some(&41));
        for w in &got.witnesses {
            assert!(is_cross_intersecting(&[&w.a, &w.b]).unwrap());
            assert_eq!(w.a.len() + w.b.len(), 6);
        }
    }

    #[test]
    fn witness_order_is_stable_and_truncation_flagged() {
        let p = params(4, 2, 2, 2, "1");
        let opts = BruteForceOptions {
            witness_limit: 5,
            ..Default::default()
        };
        let x = brute_force_max(&p, &opts).unwrap();
        let y = brute_force_max(&p, &opts).unwrap();
        assert_eq!(x.witnesses, y.witnesses);
        assert!(x.witnesses_truncated);
        assert_eq!(x.witnesses.len(), 5);
        let sigs: Vec<_> = x.witnesses.iter().map(|w| w.b.rank_signature()).collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        assert_eq!(sigs, sorted);
    }

    #[test]
    fn budget_is_enforced() {
        let p = params(7, 2, 3, 2, "1");
        let err = brute_force_max(&p, &BruteForceOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn minimal_s_tracks_initial_segments() {
        let p = params(6, 2, 3, 2, "1");
        let layers = Layers::new(&p, lex_masks(6, 3));
        // P_1 is the first 10 sets, P_2 the first 4, P_3 the first one.
        assert_eq!(layers.minimal_s((1 << 10) - 1), Some(1));
        assert_eq!(layers.minimal_s((1 << 4) - 1), Some(2));
        assert_eq!(layers.minimal_s(1), Some(3));
        assert_eq!(layers.minimal_s(2), None);
    }
}
