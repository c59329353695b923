//! Checks for the supporting lemmas: compression preserves
//! cross-intersection, the disjointness-shadow minimum and its stars, and
//! the weighted independent-set bound on biregular bipartite graphs.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{choose, lex_masks, KSet, Rational};
use crate::enumerate::units;
use crate::error::{Error, Result};
use crate::families::{compress, is_cross_intersecting, random_cross_intersecting_pair, Family};
use crate::verification::brute::scaled_weight;
use crate::Budget;

#[derive(Clone, Debug, Serialize)]
pub struct KkReport {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub seed: u64,
    pub trials: u64,
    pub passed_trials: u64,
    /// First pair whose compression stopped being cross-intersecting.
    pub counterexample: Option<(Family, Family)>,
}

impl KkReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.passed_trials == self.trials
    }
}

/// Draws `trials` random cross-intersecting pairs from a seeded generator and
/// re-tests each after compressing both families.
pub fn verify_kk_preservation(n: u32, k: u32, l: u32, trials: u64, seed: u64) -> Result<KkReport> {
    if n < k + l {
        return Err(Error::pre("kk preservation", "n >= k + l"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed_trials = 0;
    let mut counterexample = None;
    for _ in 0..trials {
        let (a, b) = random_cross_intersecting_pair(n, k, l, &mut rng)?;
        if is_cross_intersecting(&[&compress(&a), &compress(&b)])? {
            passed_trials += 1;
        } else if counterexample.is_none() {
            counterexample = Some((a, b));
        }
    }
    Ok(KkReport {
        n,
        k,
        l,
        seed,
        trials,
        passed_trials,
        counterexample,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FmReport {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub r: u32,
    /// `|b| = C(n-r, l-r)`.
    pub family_size: u64,
    pub candidates_examined: u64,
    pub min_shadow: u64,
    /// `C(n-r, k)`.
    pub expected_min: u64,
    pub minimizer_count: u64,
    /// `C(n, r)`, the number of families `{B : R ⊆ B}`.
    pub expected_minimizers: u64,
    pub minimizers_are_stars: bool,
    /// Minimizers in lex-rank signature order.
    pub minimizers: Vec<Family>,
    pub passed: bool,
}

/// Enumerates every l-family of size `C(n-r,l-r)` and checks that
/// `|D_k(b)| >= C(n-r,k)`, with equality exactly for `b = {B : R ⊆ B}`.
pub fn verify_proposition_fm(n: u32, k: u32, l: u32, r: u32, budget: &Budget) -> Result<FmReport> {
    const CTX: &str = "shadow proposition";
    if k == 0 || l == 0 || n <= k + l {
        return Err(Error::pre(CTX, "n > k + l, k >= 1, l >= 1"));
    }
    if !(1..=l).contains(&r) {
        return Err(Error::pre(CTX, "1 <= r <= l"));
    }
    let universe = choose(n, l);
    budget.check("l-layer size for shadow enumeration", universe as u128, budget.max_universe.min(63))?;
    let m = choose(n - r, l - r);
    let total = crate::combinatorics::binomial(universe, m as i64);
    let total: u128 = total.try_into().unwrap_or(u128::MAX);
    budget.check_candidates("shadow-minimization families", total)?;

    let l_masks = lex_masks(n, l);
    let disj: Vec<u64> = lex_masks(n, k)
        .iter()
        .map(|&a| {
            l_masks
                .iter()
                .enumerate()
                .filter(|(_, &b)| a & b == 0)
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let items = universe as u32;
    let best = units(items, [m as u32])
        .into_par_iter()
        .map(|unit| {
            let mut best: Option<(u64, Vec<u64>)> = None;
            unit.for_each(items, |b| {
                let shadow = disj.iter().filter(|&&d| d & b != 0).count() as u64;
                match &mut best {
                    Some((v, list)) if *v == shadow => list.push(b),
                    Some((v, _)) if *v < shadow => {}
                    _ => best = Some((shadow, vec![b])),
                }
            });
            best
        })
        .reduce(
            || None,
            |x, y| match (x, y) {
                (None, y) => y,
                (x, None) => x,
                (Some((vx, mut lx)), Some((vy, ly))) => match vx.cmp(&vy) {
                    std::cmp::Ordering::Less => Some((vx, lx)),
                    std::cmp::Ordering::Greater => Some((vy, ly)),
                    std::cmp::Ordering::Equal => {
                        lx.extend(ly);
                        Some((vx, lx))
                    }
                },
            },
        );
    let (min_shadow, mut mins) = best.expect("at least one family of each size");
    mins.sort_by_key(|&b| bit_indices(b));
    let minimizers: Vec<Family> = mins
        .iter()
        .map(|&b| Family::from_sorted_masks(n, l, bit_indices(b).into_iter().map(|i| l_masks[i])))
        .collect();
    // A family of C(n-r,l-r) l-sets all containing a common r-set R is the
    // whole star of R.
    let minimizers_are_stars = minimizers
        .iter()
        .all(|f| f.common_elements().count_ones() == r);
    let expected_min = choose(n - r, k);
    let expected_minimizers = choose(n, r);
    let minimizer_count = minimizers.len() as u64;
    Ok(FmReport {
        n,
        k,
        l,
        r,
        family_size: m,
        candidates_examined: total as u64,
        min_shadow,
        expected_min,
        minimizer_count,
        expected_minimizers,
        minimizers_are_stars,
        minimizers,
        passed: min_shadow == expected_min && minimizers_are_stars && minimizer_count == expected_minimizers,
    })
}

fn bit_indices(mut m: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// The graph `G_s`: `(k-1)`-subsets and `(l-s+1)`-subsets of `[s+1, n]`,
/// adjacent when disjoint.
#[derive(Clone, Debug, Serialize)]
pub struct BipartiteTestInstance {
    pub s: u32,
    pub x_side: Vec<KSet>,
    pub y_side: Vec<KSet>,
    /// `(x index, y index)` pairs.
    pub edges: Vec<(usize, usize)>,
}

pub fn bipartite_instance(n: u32, k: u32, l: u32, s: u32) -> Result<BipartiteTestInstance> {
    const CTX: &str = "bipartite lemma";
    if k == 0 || n < k + l {
        return Err(Error::pre(CTX, "n >= k + l, k >= 1"));
    }
    if !(1..=l).contains(&s) {
        return Err(Error::pre(CTX, "1 <= s <= l"));
    }
    let side = |size: u32| -> Vec<KSet> {
        // Subsets of [n - s] shifted up by s.
        lex_masks(n - s, size)
            .into_iter()
            .map(|m| KSet::from_mask_unchecked(n, m << s))
            .collect()
    };
    let x_side = side(k - 1);
    let y_side = side(l - s + 1);
    let edges = x_side
        .iter()
        .enumerate()
        .flat_map(|(i, x)| {
            y_side
                .iter()
                .enumerate()
                .filter(move |(_, y)| x.is_disjoint(y))
                .map(move |(j, _)| (i, j))
        })
        .collect();
    Ok(BipartiteTestInstance {
        s,
        x_side,
        y_side,
        edges,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BipartiteReport {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub s: u32,
    pub c: Rational,
    pub x_size: u64,
    pub y_size: u64,
    pub biregular: bool,
    pub connected: bool,
    /// Connectivity is only claimed for `n > k + l`.
    pub connectivity_required: bool,
    pub independent_sets: u128,
    pub max_value: Rational,
    /// `max{|X|, c|Y|}`.
    pub bound: Rational,
    /// Independent sets attaining the bound, as `(|P0|, |Q0|)`.
    pub equality_sets: Vec<(u64, u64)>,
    pub equality_only_at_sides: bool,
    pub passed: bool,
}

/// Builds `G_s` and checks the lemma on it: biregularity, connectivity when
/// `n > k + l`, the weighted bound over every independent set, and that
/// equality happens only at a full side.
pub fn verify_bipartite_lemma(n: u32, k: u32, l: u32, s: u32, c: &Rational, budget: &Budget) -> Result<BipartiteReport> {
    if !c.is_positive() {
        return Err(Error::pre("bipartite lemma", "c > 0"));
    }
    let vertices = choose(n - s.min(n), k.saturating_sub(1)) as u128 + choose(n - s.min(n), (l + 1).saturating_sub(s)) as u128;
    budget.check("bipartite vertices", vertices, budget.max_bipartite_vertices.min(64))?;
    let g = bipartite_instance(n, k, l, s)?;
    let lemma = check_lemma(g.x_side.len(), g.y_side.len(), &g.edges, c)?;
    let connectivity_required = n > k + l;
    let passed = lemma.biregular
        && lemma.within_bound
        && (!connectivity_required || (lemma.connected && lemma.equality_only_at_sides));
    Ok(BipartiteReport {
        n,
        k,
        l,
        s,
        c: c.clone(),
        x_size: g.x_side.len() as u64,
        y_size: g.y_side.len() as u64,
        biregular: lemma.biregular,
        connected: lemma.connected,
        connectivity_required,
        independent_sets: lemma.independent_sets,
        max_value: lemma.max_value,
        bound: lemma.bound,
        equality_sets: lemma.equality_sets,
        equality_only_at_sides: lemma.equality_only_at_sides,
        passed,
    })
}

struct LemmaCheck {
    biregular: bool,
    connected: bool,
    independent_sets: u128,
    max_value: Rational,
    bound: Rational,
    within_bound: bool,
    equality_sets: Vec<(u64, u64)>,
    equality_only_at_sides: bool,
}

/// The lemma on an arbitrary bipartite graph with sides of `nx` and `ny`
/// vertices. Enumerates subsets of the smaller side; the other side of an
/// independent set is then any subset of the non-neighbours, so only the
/// full non-neighbourhood needs a value check.
fn check_lemma(nx: usize, ny: usize, edges: &[(usize, usize)], c: &Rational) -> Result<LemmaCheck> {
    if nx.max(ny) > 64 || nx.min(ny) > 30 {
        return Err(Error::pre("bipartite lemma", "sides fit the enumeration word"));
    }
    let mut x_adj = vec![0u64; nx];
    let mut y_adj = vec![0u64; ny];
    for &(i, j) in edges {
        x_adj[i] |= 1 << j;
        y_adj[j] |= 1 << i;
    }
    let degrees = |adj: &[u64]| adj.windows(2).all(|w| w[0].count_ones() == w[1].count_ones());
    let biregular = degrees(&x_adj) && degrees(&y_adj);
    let connected = is_connected(&x_adj, &y_adj);

    let (cp, cq) = scaled_weight(c)?;
    let bound_scaled = (cq * nx as u128).max(cp * ny as u128);
    // Enumerate the smaller side; keep track of which side is which.
    let x_small = nx <= ny;
    let (small_adj, n_small, n_large) = if x_small { (&x_adj, nx, ny) } else { (&y_adj, ny, nx) };
    let large_full = if n_large == 64 { u64::MAX } else { (1u64 << n_large) - 1 };
    let mut independent_sets = 0u128;
    let mut best = 0u128;
    let mut equality_sets = Vec::new();
    for small in 0u64..1 << n_small {
        let mut blocked = 0u64;
        let mut rest = small;
        while rest != 0 {
            blocked |= small_adj[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        let free = (large_full & !blocked).count_ones() as u64;
        independent_sets += 1u128 << free;
        let (p0, q0) = if x_small {
            (small.count_ones() as u64, free)
        } else {
            (free, small.count_ones() as u64)
        };
        let value = cq * p0 as u128 + cp * q0 as u128;
        best = best.max(value);
        if value == bound_scaled {
            equality_sets.push((p0, q0));
        }
    }
    equality_sets.sort_unstable();
    let sides = [(nx as u64, 0u64), (0u64, ny as u64)];
    let equality_only_at_sides = equality_sets.iter().all(|e| sides.contains(e));
    Ok(LemmaCheck {
        biregular,
        connected,
        independent_sets,
        max_value: Rational::new(best, cq).expect("q > 0"),
        bound: Rational::new(bound_scaled, cq).expect("q > 0"),
        within_bound: best <= bound_scaled,
        equality_sets,
        equality_only_at_sides,
    })
}

fn is_connected(x_adj: &[u64], y_adj: &[u64]) -> bool {
    let total = x_adj.len() + y_adj.len();
    if total == 0 {
        return true;
    }
    // Vertices 0..nx are X, nx.. are Y.
    let nx = x_adj.len();
    let mut seen = vec![false; total];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        let (adj, offset) = if v < nx { (x_adj[v], nx) } else { (y_adj[v - nx], 0) };
        for u in bit_indices(adj) {
            if !seen[u + offset] {
                seen[u + offset] = true;
                queue.push_back(u + offset);
            }
        }
    }
    seen.into_iter().all(|b| b)
}
