//! Counterexample search for the open multi-family questions: `t` non-empty,
//! pairwise cross-q-intersecting families of sizes `k_1 >= … >= k_t`, with
//! the conjectured maximum of `Σ|A_i|` from [`problem_bound`].
//!
//! A search never claims a conjecture is proved. It reports `consistent`
//! within its budget, `budget_exhausted`, or a re-validated
//! `COUNTEREXAMPLE`.

mod concepts;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{problem_bound, BoundReport, ProblemInstance};
use crate::combinatorics::{choose, lex_masks, low_bits, Rational};
use crate::error::{Error, Result};
use crate::families::{is_cross_q_intersecting, maximal_q_partner, Family};
use crate::Budget;

use concepts::{Layer, Search, MAX_SIDE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SearchStatus {
    #[serde(rename = "consistent")]
    Consistent,
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
    #[serde(rename = "budget_exhausted")]
    BudgetExhausted,
}

impl std::fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchStatus::Consistent => "consistent",
            SearchStatus::Counterexample => "COUNTEREXAMPLE",
            SearchStatus::BudgetExhausted => "budget_exhausted",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchEngine {
    Concepts,
    NestedLInitial,
    AlternatingMaximization,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub instance: ProblemInstance,
    pub engine: SearchEngine,
    pub bound: BoundReport,
    pub conjectured: Rational,
    /// `None` only when the budget ran out before any valid tuple was seen.
    pub best_found: Option<Rational>,
    pub witness: Vec<Family>,
    pub status: SearchStatus,
    pub candidates_examined: u64,
    /// Whether the search space was restricted to nested L-initial tuples.
    pub compression_applied: bool,
    pub rng_seed: Option<u64>,
    pub restarts: Option<u64>,
}

/// Checks that a tuple is a valid witness: right shapes, every family
/// non-empty, every pair cross-q-intersecting.
pub fn validate_tuple(inst: &ProblemInstance, fams: &[Family]) -> Result<bool> {
    if fams.len() != inst.t() {
        return Ok(false);
    }
    for (f, &k) in fams.iter().zip(&inst.sizes) {
        if f.ground_n() != inst.n || f.set_size() != k || f.is_empty() {
            return Ok(false);
        }
    }
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            if !is_cross_q_intersecting(&fams[i], &fams[j], inst.q)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn tuple_sum(fams: &[Family]) -> Rational {
    Rational::from(fams.iter().map(|f| f.len() as u64).sum::<u64>())
}

/// Final verdict. A tuple above the conjecture only counts after exact
/// re-validation.
fn conclude(
    inst: &ProblemInstance,
    engine: SearchEngine,
    best: Option<Vec<Family>>,
    exhausted: bool,
    candidates_examined: u64,
    compression_applied: bool,
) -> Result<SearchOutcome> {
    let bound = problem_bound(inst)?;
    let conjectured = bound.max_value.clone();
    let witness = best.unwrap_or_default();
    let best_found = (!witness.is_empty()).then(|| tuple_sum(&witness));
    let exceeds = best_found.as_ref().is_some_and(|b| *b > conjectured);
    let status = if exceeds && validate_tuple(inst, &witness)? {
        SearchStatus::Counterexample
    } else if exhausted {
        SearchStatus::BudgetExhausted
    } else if exceeds {
        return Err(Error::pre("search", "reported tuple re-validates"));
    } else {
        SearchStatus::Consistent
    };
    Ok(SearchOutcome {
        instance: inst.clone(),
        engine,
        bound,
        conjectured,
        best_found,
        witness,
        status,
        candidates_examined,
        compression_applied,
        rng_seed: None,
        restarts: None,
    })
}

/// Exact maximum of `Σ|A_i|`. Equal sizes with `q = 1` and `t >= 3` search
/// nested L-initial tuples, where compression is known to be safe; every
/// other instance runs the uncompressed concept search.
pub fn exhaustive_search(inst: &ProblemInstance, budget: &Budget) -> Result<SearchOutcome> {
    inst.validate()?;
    let equal = inst.sizes.iter().all(|&k| k == inst.sizes[0]);
    if inst.q == 1 && equal && inst.t() >= 3 {
        return nested_search(inst, budget);
    }
    let layers: Vec<Layer> = inst
        .sizes
        .iter()
        .map(|&k| Layer {
            masks: lex_masks(inst.n, k),
        })
        .collect();
    let later: u64 = inst.sizes[1..].iter().map(|&k| choose(inst.n, k)).sum();
    let first = choose(inst.n, inst.sizes[0]);
    budget.check("concept search side", first.max(later) as u128, MAX_SIDE as u64)?;
    let search = Search::new(&layers, inst.q, budget.max_candidates);
    let best = search.run();
    let witness = best.map(|(_, fams)| {
        fams.iter()
            .zip(&layers)
            .zip(&inst.sizes)
            .map(|((&bits, layer), &k)| {
                Family::from_sorted_masks(inst.n, k, concepts::ones(bits).map(|i| layer.masks[i]))
            })
            .collect()
    });
    conclude(inst, SearchEngine::Concepts, witness, search.exhausted(), search.visited(), false)
}

/// Non-increasing size tuples of nested L-initial families. Valid for `q = 1`
/// and equal sizes: compressing every family keeps each pair
/// cross-intersecting.
fn nested_search(inst: &ProblemInstance, budget: &Budget) -> Result<SearchOutcome> {
    let (n, k, t) = (inst.n, inst.sizes[0], inst.t());
    let total = choose(n, k);
    let tuples = crate::combinatorics::binomial(total + t as u64 - 1, t as i64);
    budget.check_candidates("nested L-initial tuples", tuples.try_into().unwrap_or(u128::MAX))?;
    // lim[m]: the largest m' with L(m), L(m') cross-intersecting.
    let masks = lex_masks(n, k);
    let full = low_bits(n);
    let mut lim = vec![total; total as usize + 1];
    for (i, &a) in masks.iter().enumerate() {
        let mut rest = full & !a;
        let mut first = 0u64;
        for _ in 0..k {
            let low = rest & rest.wrapping_neg();
            first |= low;
            rest ^= low;
        }
        // Rank of the lex-first k-set disjoint from a, or total if none.
        let fd = if first.count_ones() == k {
            crate::combinatorics::lex_rank(&crate::combinatorics::KSet::from_mask_unchecked(n, first))
        } else {
            total
        };
        lim[i + 1] = lim[i].min(fd);
    }
    let mut best: Option<(u64, Vec<u64>)> = None;
    let mut examined = 0u64;
    let mut tuple = vec![0u64; t];
    fn descend(max: u64, depth: usize, tuple: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
        if depth == tuple.len() {
            visit(tuple);
            return;
        }
        for m in (1..=max).rev() {
            tuple[depth] = m;
            descend(m, depth + 1, tuple, visit);
        }
    }
    descend(total, 0, &mut tuple, &mut |ms: &[u64]| {
        examined += 1;
        // ms is non-increasing and lim is non-increasing, so the binding
        // constraint for each pair is against the larger family.
        let ok = (0..ms.len()).all(|i| (i + 1..ms.len()).all(|j| lim[ms[i] as usize] >= ms[j]));
        let sum: u64 = ms.iter().sum();
        if ok && best.as_ref().is_none_or(|(b, _)| sum > *b) {
            best = Some((sum, ms.to_vec()));
        }
    });
    let witness = best.map(|(_, ms)| {
        ms.iter()
            .map(|&m| Family::from_sorted_masks(n, k, masks[..m as usize].iter().copied()))
            .collect()
    });
    conclude(inst, SearchEngine::NestedLInitial, witness, false, examined, true)
}

/// The two explicit constructions behind the conjectured branches.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionValues {
    pub instance: ProblemInstance,
    pub branch1: Rational,
    pub branch2: Rational,
    /// Both tuples are non-empty and pairwise cross-q-intersecting.
    pub validated: bool,
    pub branch1_families: Vec<Family>,
    pub branch2_families: Vec<Family>,
    /// Each sum equals the corresponding bound branch.
    pub matches_bound: bool,
}

/// `A_1 = {A : |A ∩ [k_t]| >= q}` with `A_i = {A : [k_t] ⊆ A}` for `i >= 2`.
fn first_construction(inst: &ProblemInstance) -> Vec<Family> {
    let kt = *inst.sizes.last().unwrap();
    let seg = low_bits(kt);
    inst.sizes
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let keep = |m: &u64| {
                if i == 0 {
                    (m & seg).count_ones() >= inst.q
                } else {
                    m & seg == seg
                }
            };
            Family::from_sorted_masks(inst.n, k, lex_masks(inst.n, k).into_iter().filter(keep))
        })
        .collect()
}

/// Every family is the star of `[q]`.
fn second_construction(inst: &ProblemInstance) -> Vec<Family> {
    let seg = low_bits(inst.q);
    inst.sizes
        .iter()
        .map(|&k| Family::from_sorted_masks(inst.n, k, lex_masks(inst.n, k).into_iter().filter(|m| m & seg == seg)))
        .collect()
}

pub fn construction_values(inst: &ProblemInstance) -> Result<ConstructionValues> {
    let bound = problem_bound(inst)?;
    let first = first_construction(inst);
    let second = second_construction(inst);
    let branch1 = tuple_sum(&first);
    let branch2 = tuple_sum(&second);
    let validated = validate_tuple(inst, &first)? && validate_tuple(inst, &second)?;
    let matches_bound = bound.branch("branch1") == Some(&branch1) && bound.branch("branch2") == Some(&branch2);
    Ok(ConstructionValues {
        instance: inst.clone(),
        branch1,
        branch2,
        validated,
        branch1_families: first,
        branch2_families: second,
        matches_bound,
    })
}

/// Replaces each family in turn by the maximal family q-intersecting all
/// the others until nothing changes. `None` if some family empties.
fn climb(inst: &ProblemInstance, mut fams: Vec<Family>) -> Result<Option<Vec<Family>>> {
    let mut valid = false;
    loop {
        let mut changed = false;
        for i in 0..fams.len() {
            let others: Vec<&Family> = fams.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f).collect();
            let next = maximal_q_partner(inst.n, &others, inst.sizes[i], inst.q)?;
            if next.is_empty() {
                return Ok(None);
            }
            if valid {
                // Once the tuple is valid, each step only adds sets.
                assert!(fams[i].is_subfamily_of(&next), "maximal completion lost a set");
            }
            if next != fams[i] {
                changed = true;
                fams[i] = next;
            }
        }
        // After one full round every later family was fitted to every
        // earlier one, so the tuple is pairwise valid.
        valid = true;
        if !changed {
            return Ok(Some(fams));
        }
    }
}

fn random_seed_tuple(inst: &ProblemInstance, rng: &mut ChaCha8Rng) -> Vec<Family> {
    inst.sizes
        .iter()
        .map(|&k| {
            let layer = lex_masks(inst.n, k);
            let size = rng.random_range(1..=layer.len().min(3));
            let mut picks: Vec<usize> = rand::seq::index::sample(rng, layer.len(), size).into_vec();
            picks.sort_unstable();
            Family::from_sorted_masks(inst.n, k, picks.into_iter().map(|i| layer[i]))
        })
        .collect()
}

/// Heuristic lower-bound search: both constructions, then `restarts`
/// random seed tuples, each climbed to a fixed point. Restart `i` draws from
/// stream `i` of a generator seeded with `seed`, so results do not depend
/// on scheduling.
pub fn alternating_maximization(inst: &ProblemInstance, restarts: u64, seed: u64) -> Result<SearchOutcome> {
    inst.validate()?;
    let seeds = [first_construction(inst), second_construction(inst)];
    let mut found: Vec<Option<Vec<Family>>> = seeds
        .into_iter()
        .map(|s| climb(inst, s))
        .collect::<Result<_>>()?;
    let random: Vec<Option<Vec<Family>>> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            climb(inst, random_seed_tuple(inst, &mut rng))
        })
        .collect::<Result<_>>()?;
    found.extend(random);
    let best = found.into_iter().flatten().fold(None, |acc: Option<Vec<Family>>, f| match acc {
        None => Some(f),
        Some(a) => {
            let (sa, sf) = (tuple_sum(&a), tuple_sum(&f));
            if sf > sa || (sf == sa && signature(&f) < signature(&a)) {
                Some(f)
            } else {
                Some(a)
            }
        }
    });
    let mut out = conclude(inst, SearchEngine::AlternatingMaximization, best, false, restarts + 2, false)?;
    out.rng_seed = Some(seed);
    out.restarts = Some(restarts);
    Ok(out)
}

fn signature(fams: &[Family]) -> Vec<Vec<u64>> {
    fams.iter().map(|f| f.rank_signature()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{corollary_bound, ProblemId};

    fn inst(p: u32, n: u32, sizes: &[u32], q: u32) -> ProblemInstance {
        ProblemInstance::new(ProblemId::from_number(p).unwrap(), n, sizes.to_vec(), q).unwrap()
    }

    fn rat(v: u64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn exhaustive_examples() {
        let b = Budget::default();
        for (i, expect) in [(inst(1, 4, &[2, 2], 1), 6), (inst(2, 5, &[2, 2], 1), 8), (inst(1, 5, &[3, 2], 1), 10)] {
            let out = exhaustive_search(&i, &b).unwrap();
            assert_eq!(out.best_found, Some(rat(expect)), "{i:?}");
            assert_eq!(out.conjectured, rat(expect));
            assert_eq!(out.status, SearchStatus::Consistent);
            assert!(validate_tuple(&i, &out.witness).unwrap());
        }
    }

    #[test]
    fn cross_two_intersecting_seven_three() {
        let i = inst(3, 7, &[3, 3], 2);
        let out = exhaustive_search(&i, &Budget::default()).unwrap();
        assert_eq!(out.best_found, Some(rat(14)));
        assert_eq!(out.status, SearchStatus::Consistent);
        assert!(!out.compression_applied);
    }

    #[test]
    fn nested_path_agrees_with_concepts() {
        let b = Budget::default();
        for n in 4..=5 {
            let i = inst(1, n, &[2, 2, 2], 1);
            let nested = exhaustive_search(&i, &b).unwrap();
            assert!(nested.compression_applied);
            let layers: Vec<Layer> = i.sizes.iter().map(|&k| Layer { masks: lex_masks(n, k) }).collect();
            let full = Search::new(&layers, 1, u64::MAX).run().unwrap();
            assert_eq!(nested.best_found, Some(rat(full.0)), "n = {n}");
        }
    }

    #[test]
    fn constructions_match_branches() {
        let c = construction_values(&inst(3, 7, &[3, 3], 2)).unwrap();
        assert_eq!((c.branch1.clone(), c.branch2.clone()), (rat(14), rat(10)));
        assert!(c.validated && c.matches_bound);
        for n in [4, 5, 6, 8] {
            let i = inst(1, n, &[2, 2], 1);
            let c = construction_values(&i).unwrap();
            let cor = corollary_bound(n, 2, 2).unwrap();
            assert_eq!(Some(&c.branch1), cor.branch("hm-branch"));
            assert_eq!(Some(&c.branch2), cor.branch("star-branch"));
            assert!(c.validated && c.matches_bound);
        }
    }

    #[test]
    fn alternating_is_deterministic_and_below_conjecture() {
        let i = inst(3, 7, &[3, 3], 2);
        let a = alternating_maximization(&i, 50, 7).unwrap();
        let b = alternating_maximization(&i, 50, 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.best_found, Some(rat(14)));
        assert_eq!(a.status, SearchStatus::Consistent);
        assert_eq!(a.rng_seed, Some(7));
    }

    #[test]
    fn star_seed_is_a_fixed_point() {
        let i = inst(2, 7, &[3, 3, 3], 2);
        let stars = second_construction(&i);
        let climbed = climb(&i, stars.clone()).unwrap().unwrap();
        assert_eq!(climbed, stars);
    }

    #[test]
    fn exhaustive_and_alternating_agree() {
        let b = Budget::default();
        for i in [inst(1, 5, &[2, 2], 1), inst(1, 6, &[3, 2], 1), inst(3, 6, &[3, 3], 2), inst(1, 5, &[2, 2, 1], 1)] {
            let e = exhaustive_search(&i, &b).unwrap();
            let a = alternating_maximization(&i, 100, 1).unwrap();
            assert_eq!(e.best_found, a.best_found, "{i:?}");
        }
    }

    #[test]
    fn fabricated_excess_is_a_counterexample_only_if_valid() {
        let i = inst(1, 4, &[2, 2], 1);
        // Two full layers exceed the conjecture but are not cross-intersecting.
        let bogus = vec![Family::complete(4, 2).unwrap(), Family::complete(4, 2).unwrap()];
        assert!(conclude(&i, SearchEngine::Concepts, Some(bogus), false, 0, false).is_err());
        let out = conclude(&i, SearchEngine::Concepts, None, true, 0, false).unwrap();
        assert_eq!(out.status, SearchStatus::BudgetExhausted);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let i = inst(3, 7, &[3, 3], 2);
        let out = exhaustive_search(&i, &Budget::with_max_candidates(5)).unwrap();
        assert_eq!(out.status, SearchStatus::BudgetExhausted);
    }
}
