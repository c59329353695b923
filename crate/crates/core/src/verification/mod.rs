//! Exhaustive and scan-based engines reproducing the bounds at desk scale.
//!
//! Two independent engines search for the maximum of `|A| + c|B|` over the
//! `|B|` window:
//!
//! * [`brute_force_max`] enumerates every l-subfamily `B` in the window and
//!   pairs it with its maximal partner.
//! * [`l_initial_scan`] only visits L-initial `B`, which is sound because
//!   lexicographic compression preserves cross-intersection.
//!
//! [`verify_main_theorem`] runs either or both, compares against the closed
//! form, classifies every witness, and records any disagreement as a
//! [`Falsification`] rather than panicking.

mod brute;
mod classic;
mod classify;
mod corollary;
mod inequalities;
mod lemmas;
mod scan;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::{main_bound, BoundReport, ExtremalCase, TheoremParams};
use crate::combinatorics::Rational;
use crate::error::Result;
use crate::families::Family;

pub use brute::{brute_force_max, BruteForceOptions};
pub use classic::{verify_ekr, verify_ft, verify_hm, verify_hm_stability, ClassicVerdict};
pub use classify::{classify_extremal, ExtremalClassification};
pub use corollary::{verify_corollary, CorollaryMode, CorollaryVerdict};
pub use inequalities::{scan_inequalities, InequalityReport, InequalityViolation};
pub use lemmas::{
    bipartite_instance, verify_bipartite_lemma, verify_kk_preservation, verify_proposition_fm,
    BipartiteReport, BipartiteTestInstance, FmReport, KkReport,
};
pub use scan::{endpoint_profile, l_initial_profile, l_initial_scan, EndpointReport, ProfilePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Brute,
    LInitial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Brute,
    Scan,
    Both,
}

/// One optimal pair found by an engine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub a: Family,
    pub b: Family,
    /// Least `s` with `P^{(l)}_s ⊆ b`, if any.
    pub minimal_s: Option<u32>,
    pub classification: ExtremalClassification,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub engine: Engine,
    pub params: TheoremParams,
    pub window: (u64, u64),
    pub require_nonempty_partner: bool,
    pub candidates_examined: u64,
    /// `None` when no candidate survived (only possible with the non-empty
    /// partner filter).
    pub observed_max: Option<Rational>,
    pub witness_count: u64,
    /// The first `witness_limit` witnesses in signature order.
    pub witnesses: Vec<Witness>,
    pub witnesses_truncated: bool,
    /// Case tallies over all witnesses, stored or not.
    pub classification_counts: BTreeMap<ExtremalCase, u64>,
    /// First witness the classifier could not match, if any.
    pub unclassified_example: Option<Witness>,
    pub bound: BoundReport,
    pub matched: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FalsificationKind {
    ExceedsBound,
    BoundNotAttained,
    EnginesDisagree,
    UnclassifiedWitness,
    UnexpectedCase,
}

/// A replayable disagreement between an engine and the closed form.
#[derive(Clone, Debug, Serialize)]
pub struct Falsification {
    pub kind: FalsificationKind,
    pub engine: Option<Engine>,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MainVerdict {
    pub params: TheoremParams,
    pub mode: Mode,
    pub bound: BoundReport,
    pub brute: Option<ScanResult>,
    pub scan: Option<ScanResult>,
    pub falsifications: Vec<Falsification>,
    pub passed: bool,
}

impl MainVerdict {
    /// Case tallies summed over the engines that ran.
    pub fn classification_counts(&self) -> BTreeMap<ExtremalCase, u64> {
        let mut out = BTreeMap::new();
        for r in self.brute.iter().chain(self.scan.iter()) {
            for (case, count) in &r.classification_counts {
                *out.entry(*case).or_insert(0) += count;
            }
        }
        out
    }
}

/// Runs the chosen engines on `p` and checks the bound: never exceeded,
/// always attained, every witness matches a predicted case, and in `Both`
/// mode the engines agree.
pub fn verify_main_theorem(p: &TheoremParams, mode: Mode, opts: &BruteForceOptions) -> Result<MainVerdict> {
    let bound = main_bound(p);
    let brute = match mode {
        Mode::Brute | Mode::Both => Some(brute_force_max(p, opts)?),
        Mode::Scan => None,
    };
    let scan = match mode {
        Mode::Scan | Mode::Both => Some(l_initial_scan(p, opts)?),
        Mode::Brute => None,
    };
    let mut falsifications = Vec::new();
    for r in brute.iter().chain(scan.iter()) {
        check_engine(r, &bound, &mut falsifications);
    }
    if let (Some(b), Some(s)) = (&brute, &scan) {
        if b.observed_max != s.observed_max {
            falsifications.push(Falsification {
                kind: FalsificationKind::EnginesDisagree,
                engine: None,
                detail: format!(
                    "brute force found {}, L-initial scan found {}",
                    fmt_opt(&b.observed_max),
                    fmt_opt(&s.observed_max)
                ),
                witness: b.witnesses.first().cloned(),
            });
        }
    }
    Ok(MainVerdict {
        params: p.clone(),
        mode,
        passed: falsifications.is_empty(),
        bound,
        brute,
        scan,
        falsifications,
    })
}

fn fmt_opt(v: &Option<Rational>) -> String {
    v.as_ref().map_or_else(|| "nothing".to_string(), |v| v.to_string())
}

fn check_engine(r: &ScanResult, bound: &BoundReport, out: &mut Vec<Falsification>) {
    let engine = Some(r.engine);
    match &r.observed_max {
        None => out.push(Falsification {
            kind: FalsificationKind::BoundNotAttained,
            engine,
            detail: "no candidate in the window".into(),
            witness: None,
        }),
        Some(v) if *v > bound.max_value => out.push(Falsification {
            kind: FalsificationKind::ExceedsBound,
            engine,
            detail: format!("observed {v} exceeds bound {}", bound.max_value),
            witness: r.witnesses.first().cloned(),
        }),
        Some(v) if *v < bound.max_value => out.push(Falsification {
            kind: FalsificationKind::BoundNotAttained,
            engine,
            detail: format!("observed {v} below bound {}", bound.max_value),
            witness: r.witnesses.first().cloned(),
        }),
        Some(_) => {}
    }
    if let Some(w) = &r.unclassified_example {
        out.push(Falsification {
            kind: FalsificationKind::UnclassifiedWitness,
            engine,
            detail: format!(
                "{} witness(es) match no extremal case",
                r.classification_counts.get(&ExtremalCase::None).unwrap_or(&0)
            ),
            witness: Some(w.clone()),
        });
    }
    for (case, count) in &r.classification_counts {
        if *case != ExtremalCase::None && !bound.predicted_cases.contains(case) {
            out.push(Falsification {
                kind: FalsificationKind::UnexpectedCase,
                engine,
                detail: format!("{count} witness(es) in case {case}, predicted {:?}", bound.predicted_cases),
                witness: r
                    .witnesses
                    .iter()
                    .find(|w| w.classification.case_label == *case)
                    .cloned(),
            });
        }
    }
}

/// Shared witness bookkeeping for both engines.
pub(crate) struct WitnessTally {
    limit: usize,
    pub witnesses: Vec<Witness>,
    pub count: u64,
    pub counts: BTreeMap<ExtremalCase, u64>,
    pub unclassified: Option<Witness>,
}

impl WitnessTally {
    pub fn new(limit: usize) -> Self {
        WitnessTally {
            limit,
            witnesses: Vec::new(),
            count: 0,
            counts: BTreeMap::new(),
            unclassified: None,
        }
    }

    /// Records one classified witness; `build` materializes it only when it
    /// will be stored.
    pub fn record(&mut self, case: &ExtremalClassification, build: impl FnOnce() -> Witness) {
        self.count += 1;
        *self.counts.entry(case.case_label).or_insert(0) += 1;
        let store = self.witnesses.len() < self.limit;
        let unclassified = case.case_label == ExtremalCase::None && self.unclassified.is_none();
        if store || unclassified {
            let w = build();
            if unclassified {
                self.unclassified = Some(w.clone());
            }
            if store {
                self.witnesses.push(w);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, k: u32, l: u32, r: u32, c: &str) -> TheoremParams {
        TheoremParams::new(n, k, l, r, c.parse().unwrap()).unwrap()
    }

    #[test]
    fn main_theorem_examples() {
        let opts = BruteForceOptions::default();
        let v = verify_main_theorem(&params(4, 2, 2, 2, "1"), Mode::Both, &opts).unwrap();
        assert!(v.passed, "{:?}", v.falsifications);
        assert_eq!(v.classification_counts().keys().copied().collect::<Vec<_>>(), vec![ExtremalCase::Iv]);

        let v = verify_main_theorem(&params(6, 2, 3, 2, "1"), Mode::Both, &opts).unwrap();
        assert!(v.passed, "{:?}", v.falsifications);
        assert_eq!(v.classification_counts().keys().copied().collect::<Vec<_>>(), vec![ExtremalCase::Ii]);
        let brute = v.brute.unwrap();
        assert_eq!(brute.witness_count, 6, "one star pair per element of [6]");

        let v = verify_main_theorem(&params(6, 2, 3, 2, "10"), Mode::Scan, &opts).unwrap();
        assert!(v.passed);
        assert_eq!(v.classification_counts().keys().copied().collect::<Vec<_>>(), vec![ExtremalCase::Ii]);
    }

    #[test]
    fn disagreement_is_reported_not_panicked() {
        let p = params(6, 2, 3, 2, "1");
        let mut r = brute_force_max(&p, &BruteForceOptions::default()).unwrap();
        r.observed_max = Some(Rational::from(16u64));
        let mut out = Vec::new();
        check_engine(&r, &main_bound(&p), &mut out);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].kind, FalsificationKind::ExceedsBound);
        assert!(out[0].witness.is_some());
    }
}
