//! Structural matching of extremal pairs against the equality cases
//! (i)–(v) of the weighted bound.
//!
//! Cases (i) and (ii) name families built on `[r]` and `{1}`; exhaustive
//! search sees every relabeling of them, so the matcher looks for *some*
//! r-set `R` (resp. some element `x`) rather than the canonical one.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::Serialize;

use crate::bounds::{main_bound, ExtremalCase, TheoremParams, ONE_BRANCH, R_BRANCH};
use crate::combinatorics::{choose, low_bits, KSet, Rational};
use crate::error::{Error, Result};
use crate::families::Family;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalClassification {
    pub case_label: ExtremalCase,
    /// The set `R` (or `{x}`) when a case (i)/(ii) structure was found.
    pub witness_r_set: Option<KSet>,
}

impl ExtremalClassification {
    fn none() -> Self {
        ExtremalClassification {
            case_label: ExtremalCase::None,
            witness_r_set: None,
        }
    }
}

/// Everything about `p` the matcher needs, computed once per scan.
#[derive(Clone, Debug)]
pub(crate) struct Classifier {
    n: u32,
    k: u32,
    l: u32,
    r: u32,
    /// r-branch compared with 1-branch.
    branch_order: Ordering,
    c_vs_one: Ordering,
    window: (u64, u64),
}

impl Classifier {
    pub fn new(p: &TheoremParams) -> Self {
        let report = main_bound(p);
        let branch_order = report
            .branch(R_BRANCH)
            .unwrap()
            .cmp(report.branch(ONE_BRANCH).unwrap());
        Classifier {
            n: p.n,
            k: p.k,
            l: p.l,
            r: p.r,
            branch_order,
            c_vs_one: p.c.cmp(&Rational::one()),
            window: (p.window_lo(), p.window_hi()),
        }
    }

    /// `a` holds k-set masks, `b` l-set masks; neither needs to be sorted.
    pub fn classify(&self, a: &[u64], b: &[u64]) -> ExtremalClassification {
        if self.n > self.k + self.l {
            let try_i = self.branch_order != Ordering::Less;
            let try_ii = self.branch_order != Ordering::Greater;
            if try_i {
                if let Some(r_set) = self.match_r_structure(a, b) {
                    return ExtremalClassification {
                        case_label: ExtremalCase::I,
                        witness_r_set: Some(r_set),
                    };
                }
            }
            if try_ii {
                if let Some(x) = self.match_star_structure(a, b) {
                    return ExtremalClassification {
                        case_label: ExtremalCase::Ii,
                        witness_r_set: Some(x),
                    };
                }
            }
            return ExtremalClassification::none();
        }
        if !self.is_complement_pair(a, b) {
            return ExtremalClassification::none();
        }
        let size = b.len() as u64;
        let case = match self.c_vs_one {
            Ordering::Less if size == self.window.0 => ExtremalCase::Iii,
            Ordering::Equal if (self.window.0..=self.window.1).contains(&size) => ExtremalCase::Iv,
            Ordering::Greater if size == self.window.1 => ExtremalCase::V,
            _ => ExtremalCase::None,
        };
        ExtremalClassification {
            case_label: case,
            witness_r_set: None,
        }
    }

    /// `b = {B : R ⊆ B}` and `a = {A : A ∩ R ≠ ∅}` for some r-set `R`.
    fn match_r_structure(&self, a: &[u64], b: &[u64]) -> Option<KSet> {
        let (n, k, l, r) = (self.n, self.k, self.l, self.r);
        if b.len() as u64 != choose(n - r, l - r) {
            return None;
        }
        if a.len() as u64 != choose(n, k) - choose(n - r, k) {
            return None;
        }
        let common = b.iter().fold(low_bits(n), |acc, &m| acc & m);
        if common.count_ones() != r {
            return None;
        }
        // b has C(n-r,l-r) distinct supersets of R, so it is all of them; a
        // has the right size and only sets meeting R, so it is all of those.
        if a.iter().any(|&m| m & common == 0) {
            return None;
        }
        Some(KSet::from_mask_unchecked(n, common))
    }

    /// `a` and `b` are the full stars of one element `x`.
    fn match_star_structure(&self, a: &[u64], b: &[u64]) -> Option<KSet> {
        let (n, k, l) = (self.n, self.k, self.l);
        if b.len() as u64 != choose(n - 1, l - 1) || a.len() as u64 != choose(n - 1, k - 1) {
            return None;
        }
        let common = a.iter().chain(b).fold(low_bits(n), |acc, &m| acc & m);
        if common == 0 {
            return None;
        }
        let x = common & common.wrapping_neg();
        Some(KSet::from_mask_unchecked(n, x))
    }

    /// `a = C([n],k) \ {complements of b}` (only meaningful at `n = k + l`).
    fn is_complement_pair(&self, a: &[u64], b: &[u64]) -> bool {
        let full = low_bits(self.n);
        if a.len() as u64 + b.len() as u64 != choose(self.n, self.k) {
            return false;
        }
        let complements: HashSet<u64> = b.iter().map(|&m| !m & full).collect();
        a.iter().all(|m| !complements.contains(m))
    }
}

/// Matches `(a, b)` against the extremal cases of `p`; `none` when no case's
/// structure fits.
pub fn classify_extremal(a: &Family, b: &Family, p: &TheoremParams) -> Result<ExtremalClassification> {
    for (f, size) in [(a, p.k), (b, p.l)] {
        if f.ground_n() != p.n {
            return Err(Error::GroundMismatch {
                left: p.n,
                right: f.ground_n(),
            });
        }
        if f.set_size() != size {
            return Err(Error::SizeMismatch {
                left: size,
                right: f.set_size(),
            });
        }
    }
    let a_masks: Vec<u64> = a.iter().map(|s| s.mask()).collect();
    let b_masks: Vec<u64> = b.iter().map(|s| s.mask()).collect();
    Ok(Classifier::new(p).classify(&a_masks, &b_masks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{maximal_partner, p_family, r_family, Family};

    fn params(n: u32, k: u32, l: u32, r: u32, c: &str) -> TheoremParams {
        TheoremParams::new(n, k, l, r, c.parse().unwrap()).unwrap()
    }

    fn star(n: u32, k: u32, x: u32) -> Family {
        Family::new(
            n,
            k,
            crate::combinatorics::LexSubsets::new(n, k).unwrap().filter(|s| s.contains(x)),
        )
        .unwrap()
    }

    #[test]
    fn r_structure_is_case_i() {
        // (6,2,3,2) with c = 1/10: r-branch 9 + 4/10 beats 1-branch 5 + 1.
        let p = params(6, 2, 3, 2, "1/10");
        let a = r_family(6, 2, 2).unwrap();
        let b = p_family(6, 3, 2).unwrap();
        let got = classify_extremal(&a, &b, &p).unwrap();
        assert_eq!(got.case_label, ExtremalCase::I);
        assert_eq!(got.witness_r_set.unwrap().elements(), vec![1, 2]);
    }

    #[test]
    fn relabeled_r_structure_is_case_i() {
        let p = params(7, 3, 3, 3, "1/10");
        let rset = KSet::new(7, &[2, 5, 7]).unwrap();
        let b = Family::new(7, 3, [rset]).unwrap();
        let a = maximal_partner(&b, 3).unwrap();
        let got = classify_extremal(&a, &b, &p).unwrap();
        assert_eq!(got.case_label, ExtremalCase::I);
        assert_eq!(got.witness_r_set, Some(rset));
    }

    #[test]
    fn stars_are_case_ii() {
        let p = params(6, 2, 3, 2, "1");
        let got = classify_extremal(&star(6, 2, 1), &star(6, 3, 1), &p).unwrap();
        assert_eq!(got.case_label, ExtremalCase::Ii);
        let got = classify_extremal(&star(6, 2, 4), &star(6, 3, 4), &p).unwrap();
        assert_eq!(got.case_label, ExtremalCase::Ii);
        assert_eq!(got.witness_r_set.unwrap().elements(), vec![4]);
        // Stars on different elements are not a pair of the theorem.
        let got = classify_extremal(&star(6, 2, 1), &star(6, 3, 2), &p).unwrap();
        assert_eq!(got.case_label, ExtremalCase::None);
    }

    #[test]
    fn wrong_branch_direction_is_rejected() {
        // c = 1 makes the 1-branch strictly larger, so an R-structure is not
        // extremal here.
        let p = params(6, 2, 3, 2, "1");
        let got = classify_extremal(&r_family(6, 2, 2).unwrap(), &p_family(6, 3, 2).unwrap(), &p).unwrap();
        assert_eq!(got.case_label, ExtremalCase::None);
    }

    #[test]
    fn complement_pairs_at_n_equal_k_plus_l() {
        let b = Family::from_elements(4, 2, &[&[1, 2], &[1, 3]]).unwrap();
        let a = Family::complete(4, 2)
            .unwrap()
            .iter()
            .filter(|s| s.elements() != vec![3, 4] && s.elements() != vec![2, 4])
            .copied()
            .collect::<Vec<_>>();
        let a = Family::new(4, 2, a).unwrap();
        assert_eq!(
            classify_extremal(&a, &b, &params(4, 2, 2, 2, "1")).unwrap().case_label,
            ExtremalCase::Iv
        );
        // |b| = 2 is neither the lower (1) nor the upper (3) window end.
        assert_eq!(
            classify_extremal(&a, &b, &params(4, 2, 2, 2, "1/2")).unwrap().case_label,
            ExtremalCase::None
        );
        let b1 = Family::from_elements(4, 2, &[&[2, 3]]).unwrap();
        let a1 = maximal_partner(&b1, 2).unwrap();
        assert_eq!(
            classify_extremal(&a1, &b1, &params(4, 2, 2, 2, "1/2")).unwrap().case_label,
            ExtremalCase::Iii
        );
        let b3 = star(4, 2, 3);
        let a3 = maximal_partner(&b3, 2).unwrap();
        assert_eq!(
            classify_extremal(&a3, &b3, &params(4, 2, 2, 2, "2")).unwrap().case_label,
            ExtremalCase::V
        );
    }

    #[test]
    fn shape_errors() {
        let p = params(6, 2, 3, 2, "1");
        assert!(classify_extremal(&star(6, 3, 1), &star(6, 3, 1), &p).is_err());
        assert!(classify_extremal(&star(7, 2, 1), &star(6, 3, 1), &p).is_err());
    }
}
