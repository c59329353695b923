//! Exact scan of the three binomial inequalities behind the derivation of
//! the non-empty k/l bound from the weighted theorem. Over all
//! `n >= k + l`, `k >= l >= 1`:
//!
//! * `star_sum`: `C(n-1,k-1) + C(n-1,l-1) <= C(n,k) - C(n-l,k) + 1`
//! * `swap`: `C(n,l) - C(n-k,l) <= C(n,k) - C(n-l,k)`
//! * `termwise`: `C(n-i,l+1-i) <= C(n-i,k-1)` for `2 <= i <= l`

use serde::Serialize;

use crate::combinatorics::choose;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityViolation {
    pub inequality: String,
    pub n: u32,
    pub k: u32,
    pub l: u32,
    /// Only for `termwise`.
    pub i: Option<u32>,
    pub lhs: u128,
    pub rhs: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub max_n: u32,
    pub star_sum_checked: u64,
    pub swap_checked: u64,
    pub termwise_checked: u64,
    pub violations: Vec<InequalityViolation>,
    /// `(n, k, l)` where `star_sum` is tight.
    pub star_sum_equalities: Vec<(u32, u32, u32)>,
    /// `(n, k, l)` with `k > l` where `swap` is tight.
    pub swap_equalities: Vec<(u32, u32, u32)>,
    /// At `k = l` both sides of `swap` are the same expression.
    pub swap_equalities_k_eq_l: u64,
    /// Every tight `swap` with `k > l` has `n = k + l`, and every `n = k + l`
    /// is tight.
    pub swap_equality_locus_is_n_eq_k_plus_l: bool,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.swap_equality_locus_is_n_eq_k_plus_l
    }
}

pub fn scan_inequalities(max_n: u32) -> Result<InequalityReport> {
    if max_n > 60 {
        return Err(Error::pre("inequality scan", "max_n <= 60"));
    }
    let c = |n: u32, k: u32| choose(n, k) as u128;
    let mut rep = InequalityReport {
        max_n,
        star_sum_checked: 0,
        swap_checked: 0,
        termwise_checked: 0,
        violations: Vec::new(),
        star_sum_equalities: Vec::new(),
        swap_equalities: Vec::new(),
        swap_equalities_k_eq_l: 0,
        swap_equality_locus_is_n_eq_k_plus_l: true,
    };
    let violation = |name: &str, n, k, l, i, lhs, rhs| InequalityViolation {
        inequality: name.into(),
        n,
        k,
        l,
        i,
        lhs,
        rhs,
    };
    for n in 2..=max_n {
        for l in 1..=n / 2 {
            for k in l..=n - l {
                rep.star_sum_checked += 1;
                let lhs = c(n - 1, k - 1) + c(n - 1, l - 1);
                let rhs = c(n, k) - c(n - l, k) + 1;
                if lhs > rhs {
                    rep.violations.push(violation("star_sum", n, k, l, None, lhs, rhs));
                } else if lhs == rhs {
                    rep.star_sum_equalities.push((n, k, l));
                }

                rep.swap_checked += 1;
                let lhs = c(n, l) - c(n - k, l);
                let rhs = c(n, k) - c(n - l, k);
                if lhs > rhs {
                    rep.violations.push(violation("swap", n, k, l, None, lhs, rhs));
                }
                let tight = lhs == rhs;
                if k == l {
                    rep.swap_equalities_k_eq_l += tight as u64;
                } else {
                    if tight {
                        rep.swap_equalities.push((n, k, l));
                    }
                    if tight != (n == k + l) {
                        rep.swap_equality_locus_is_n_eq_k_plus_l = false;
                    }
                }

                for i in 2..=l {
                    rep.termwise_checked += 1;
                    let lhs = c(n - i, l + 1 - i);
                    let rhs = c(n - i, k - 1);
                    if lhs > rhs {
                        rep.violations.push(violation("termwise", n, k, l, Some(i), lhs, rhs));
                    }
                }
            }
        }
    }
    Ok(rep)
}
