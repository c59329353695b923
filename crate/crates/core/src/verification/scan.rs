//! L-initial engine. By the Kruskal–Katona reformulation, compressing both
//! families of a cross-intersecting pair keeps it cross-intersecting, so the
//! optimum over `|b| = m` is attained at `b = L(m)`.
//!
//! For a k-set `A`, let `fd(A)` be the lex rank of the first l-set disjoint
//! from `A` (the `l` smallest elements of its complement). `A` meets every
//! member of `L(m)` iff `fd(A) >= m`, so one histogram of `fd` gives the
//! partner size for every `m` at once.

use serde::Serialize;

use super::brute::{scaled_weight, BruteForceOptions};
use super::classify::Classifier;
use super::{Engine, ScanResult, Witness, WitnessTally};
use crate::bounds::{main_bound, TheoremParams};
use crate::combinatorics::{choose, lex_masks, lex_rank, low_bits, KSet, LexSubsets, Rational};
use crate::error::{Error, Result};
use crate::families::Family;

/// Value of one L-initial candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfilePoint {
    pub m: u64,
    pub partner_size: u64,
    pub value: Rational,
    pub minimal_s: Option<u32>,
}

/// First-disjoint ranks of every k-set, in lex order of the k-sets.
fn first_disjoint(p: &TheoremParams, k_masks: &[u64]) -> Vec<u64> {
    let full = low_bits(p.n);
    k_masks
        .iter()
        .map(|&a| {
            let mut rest = full & !a;
            let mut first = 0u64;
            for _ in 0..p.l {
                let low = rest & rest.wrapping_neg();
                first |= low;
                rest ^= low;
            }
            lex_rank(&KSet::from_mask_unchecked(p.n, first))
        })
        .collect()
}

/// `partner[m]` = `|maximal_partner(L(m))|` for `m` in `0..=hi`.
fn partner_sizes(fd: &[u64], hi: u64) -> Vec<u64> {
    let mut hist = vec![0u64; hi as usize + 2];
    for &f in fd {
        hist[f.min(hi + 1) as usize] += 1;
    }
    // Suffix sums: #{A : fd(A) >= m}.
    let mut out = vec![0u64; hi as usize + 1];
    let mut acc = hist[hi as usize + 1];
    for m in (0..=hi as usize).rev() {
        acc += hist[m];
        out[m] = acc;
    }
    out
}

/// Least `s` with `P_s ⊆ L(m)`. `P_s` is itself the initial segment of length
/// `C(n-s, l-s)`, so this is a size comparison.
fn minimal_s(p: &TheoremParams, m: u64) -> Option<u32> {
    (1..=p.l).find(|&s| choose(p.n - s, p.l - s) <= m)
}

fn scan_window(p: &TheoremParams, opts: &BruteForceOptions) -> Result<(u64, u64)> {
    let (lo, hi) = opts.window.unwrap_or((p.window_lo(), p.window_hi()));
    if lo > hi {
        return Err(Error::pre("size window", "lo <= hi"));
    }
    let hi = hi.min(choose(p.n, p.l));
    opts.budget
        .check_candidates("L-initial scan", choose(p.n, p.k) as u128 + hi as u128)?;
    Ok((lo, hi))
}

/// `|maximal_partner(L(m))| + c·m` for every `m` in the window.
pub fn l_initial_profile(p: &TheoremParams, opts: &BruteForceOptions) -> Result<Vec<ProfilePoint>> {
    let (lo, hi) = scan_window(p, opts)?;
    let fd = first_disjoint(p, &lex_masks(p.n, p.k));
    let partner = partner_sizes(&fd, hi);
    Ok((lo..=hi)
        .map(|m| ProfilePoint {
            m,
            partner_size: partner[m as usize],
            value: Rational::from(partner[m as usize]) + p.c.clone() * Rational::from(m),
            minimal_s: minimal_s(p, m),
        })
        .collect())
}

/// Maximum of `|a| + c|b|` over L-initial `b` in the window, with `a` the
/// maximal partner of `b`.
pub fn l_initial_scan(p: &TheoremParams, opts: &BruteForceOptions) -> Result<ScanResult> {
    let (lo, hi) = scan_window(p, opts)?;
    let k_masks = lex_masks(p.n, p.k);
    let fd = first_disjoint(p, &k_masks);
    let partner = partner_sizes(&fd, hi);
    let (cp, cq) = scaled_weight(&p.c)?;
    let nonempty = opts.require_nonempty_partner;

    let mut best: Option<(u128, Vec<u64>)> = None;
    for m in lo..=hi {
        let a = partner[m as usize] as u128;
        if nonempty && a == 0 {
            continue;
        }
        let value = cq * a + cp * m as u128;
        match &mut best {
            Some((v, list)) if *v == value => list.push(m),
            Some((v, _)) if *v > value => {}
            _ => best = Some((value, vec![m])),
        }
    }

    let bound = main_bound(p);
    let classifier = Classifier::new(p);
    let mut tally = WitnessTally::new(opts.witness_limit);
    let observed_max = match best {
        None => None,
        Some((value, ms)) => {
            let b_all: Vec<u64> = LexSubsets::new(p.n, p.l)?
                .take(*ms.last().unwrap() as usize)
                .map(|s| s.mask())
                .collect();
            for m in ms {
                let b_masks = &b_all[..m as usize];
                let a_masks: Vec<u64> = k_masks
                    .iter()
                    .zip(&fd)
                    .filter(|(_, &f)| f >= m)
                    .map(|(&a, _)| a)
                    .collect();
                let case = classifier.classify(&a_masks, b_masks);
                tally.record(&case, || Witness {
                    a: Family::from_sorted_masks(p.n, p.k, a_masks.iter().copied()),
                    b: Family::from_sorted_masks(p.n, p.l, b_masks.iter().copied()),
                    minimal_s: minimal_s(p, m),
                    classification: case.clone(),
                });
            }
            Some(Rational::new(value, cq).expect("q > 0"))
        }
    };
    let matched = observed_max.as_ref() == Some(&bound.max_value);
    Ok(ScanResult {
        engine: Engine::LInitial,
        params: p.clone(),
        window: (lo, hi),
        require_nonempty_partner: nonempty,
        candidates_examined: (lo..=hi).count() as u64,
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

/// Values of the dual pairs `(R_i, P_i)` for `i` in `1..=r`.
#[derive(Clone, Debug, Serialize)]
pub struct EndpointReport {
    pub params: TheoremParams,
    /// `(i, |R_i| + c|P_i|)`.
    pub values: Vec<(u32, Rational)>,
    pub argmax: Vec<u32>,
    /// True when some maximizer is `i = 1` or `i = r`.
    pub attained_at_endpoint: bool,
}

/// Scans `|R_i| + c|P_i|` over `i` in `[1, r]`; the maximum should sit at an
/// endpoint.
pub fn endpoint_profile(p: &TheoremParams) -> EndpointReport {
    let values: Vec<(u32, Rational)> = (1..=p.r)
        .map(|i| {
            let r_i = choose(p.n, p.k) - choose(p.n - i, p.k);
            let p_i = choose(p.n - i, p.l - i);
            (i, Rational::from(r_i) + p.c.clone() * Rational::from(p_i))
        })
        .collect();
    let max = values.iter().map(|(_, v)| v).max().cloned().expect("r >= 1");
    let argmax: Vec<u32> = values.iter().filter(|(_, v)| *v == max).map(|(i, _)| *i).collect();
    let attained_at_endpoint = argmax.iter().any(|&i| i == 1 || i == p.r);
    EndpointReport {
        params: p.clone(),
        values,
        argmax,
        attained_at_endpoint,
    }
}
