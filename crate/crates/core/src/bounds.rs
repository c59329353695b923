//! Exact evaluators for the closed-form bounds on (cross-)intersecting
//! families, with branch-level detail for max-shaped bounds.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{choose_signed, Rational};
use crate::error::{Error, Result};

pub const R_BRANCH: &str = "r-branch";
pub const ONE_BRANCH: &str = "1-branch";

fn c(n: u32, k: u32) -> BigUint {
    choose_signed(n as i64, k as i64)
}

fn ci(n: i64, k: i64) -> BigUint {
    choose_signed(n, k)
}

/// Parameters `(n, k, l, r, c)` of the weighted non-empty cross-intersecting
/// bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub r: u32,
    pub c: Rational,
}

impl TheoremParams {
    pub fn new(n: u32, k: u32, l: u32, r: u32, c: Rational) -> Result<Self> {
        const CTX: &str = "main theorem";
        if k == 0 || l == 0 {
            return Err(Error::pre(CTX, "k >= 1 and l >= 1"));
        }
        if n < k + l {
            return Err(Error::pre(CTX, "n >= k + l"));
        }
        if !(1..=l).contains(&r) {
            return Err(Error::pre(CTX, "l >= r >= 1"));
        }
        if !c.is_positive() {
            return Err(Error::pre(CTX, "c > 0"));
        }
        if n > crate::combinatorics::MAX_GROUND {
            return Err(Error::GroundTooLarge(n));
        }
        Ok(TheoremParams { n, k, l, r, c })
    }

    /// Lower end of the `|B|` window, `C(n-r, l-r)`.
    pub fn window_lo(&self) -> u64 {
        crate::combinatorics::choose(self.n - self.r, self.l - self.r)
    }

    /// Upper end of the `|B|` window, `C(n-1, l-1)`.
    pub fn window_hi(&self) -> u64 {
        crate::combinatorics::choose(self.n - 1, self.l - 1)
    }

    pub(crate) fn to_map(&self) -> BTreeMap<String, String> {
        [
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("l", self.l.to_string()),
            ("r", self.r.to_string()),
            ("c", self.c.to_string()),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect()
    }
}

/// The equality configurations (i)–(v) of the weighted bound, plus `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExtremalCase {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    Ii,
    #[serde(rename = "iii")]
    Iii,
    #[serde(rename = "iv")]
    Iv,
    #[serde(rename = "v")]
    V,
    #[serde(rename = "none")]
    None,
}

impl fmt::Display for ExtremalCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremalCase::I => "i",
            ExtremalCase::Ii => "ii",
            ExtremalCase::Iii => "iii",
            ExtremalCase::Iv => "iv",
            ExtremalCase::V => "v",
            ExtremalCase::None => "none",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub label: String,
    pub value: Rational,
}

/// A max-of-branches bound evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub theorem: String,
    pub params: BTreeMap<String, String>,
    pub branch_values: Vec<Branch>,
    pub max_value: Rational,
    pub argmax_labels: Vec<String>,
    pub tie: bool,
    pub predicted_cases: Vec<ExtremalCase>,
}

impl BoundReport {
    fn from_branches(
        theorem: &str,
        params: BTreeMap<String, String>,
        branches: Vec<(&str, Rational)>,
    ) -> Self {
        let max_value = branches
            .iter()
            .map(|(_, v)| v)
            .max()
            .cloned()
            .expect("at least one branch");
        let argmax_labels: Vec<String> = branches
            .iter()
            .filter(|(_, v)| *v == max_value)
            .map(|(l, _)| l.to_string())
            .collect();
        BoundReport {
            theorem: theorem.to_string(),
            params,
            tie: argmax_labels.len() > 1,
            argmax_labels,
            max_value,
            branch_values: branches
                .into_iter()
                .map(|(label, value)| Branch {
                    label: label.to_string(),
                    value,
                })
                .collect(),
            predicted_cases: Vec::new(),
        }
    }

    /// A single-valued bound in report form, with one branch `value`.
    pub fn scalar(theorem: &str, params: BTreeMap<String, String>, value: Rational) -> Self {
        Self::from_branches(theorem, params, vec![("value", value)])
    }

    pub fn branch(&self, label: &str) -> Option<&Rational> {
        self.branch_values
            .iter()
            .find(|b| b.label == label)
            .map(|b| &b.value)
    }

    pub fn csv_header() -> &'static str {
        "theorem,params,branches,max,tie,argmax,predicted_cases"
    }

    /// One flat CSV row; multi-valued cells are `;`-joined.
    pub fn to_csv_row(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let branches: Vec<String> = self
            .branch_values
            .iter()
            .map(|b| format!("{}={}", b.label, b.value))
            .collect();
        let cases: Vec<String> = self.predicted_cases.iter().map(|c| c.to_string()).collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.theorem,
            params.join(";"),
            branches.join(";"),
            self.max_value,
            self.tie,
            self.argmax_labels.join(";"),
            cases.join(";")
        )
    }
}

fn params(pairs: &[(&str, u32)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Maximum intersecting k-family: `C(n-1, k-1)` for `n >= 2k`.
pub fn ekr_bound(n: u32, k: u32) -> Result<BigUint> {
    if k == 0 || n < 2 * k {
        return Err(Error::pre("ekr", "n >= 2k >= 2"));
    }
    Ok(c(n - 1, k - 1))
}

/// Sum of `t` cross-intersecting k-families: `C(n,k)` when `t <= n/k`,
/// `t C(n-1,k-1)` when `t >= n/k`. Since `C(n,k) = (n/k) C(n-1,k-1)` this is
/// the larger of the two, with a tie exactly at `t = n/k`.
pub fn hilton_bound(n: u32, k: u32, t: u32) -> Result<BoundReport> {
    if k == 0 || n < 2 * k {
        return Err(Error::pre("hilton", "n >= 2k >= 2"));
    }
    if t < 2 {
        return Err(Error::pre("hilton", "t >= 2"));
    }
    let small_t = Rational::from(c(n, k));
    let large_t = Rational::from(BigUint::from(t) * c(n - 1, k - 1));
    Ok(BoundReport::from_branches(
        "hilton",
        params(&[("n", n), ("k", k), ("t", t)]),
        vec![("t<=n/k", small_t), ("t>=n/k", large_t)],
    ))
}

/// Non-empty cross-intersecting pair of k-families: `C(n,k) - C(n-k,k) + 1`.
pub fn hm_bound(n: u32, k: u32) -> Result<BigUint> {
    if k == 0 || n < 2 * k {
        return Err(Error::pre("hm", "n >= 2k >= 2"));
    }
    Ok(c(n, k) - c(n - k, k) + 1u32)
}

/// The weighted bound `max{ C(n,k) - C(n-r,k) + c C(n-r,l-r),
/// C(n-1,k-1) + c C(n-1,l-1) }` together with the equality cases it
/// predicts.
pub fn main_bound(p: &TheoremParams) -> BoundReport {
    let (n, k, l, r) = (p.n, p.k, p.l, p.r);
    let r_branch = Rational::from(c(n, k) - c(n - r, k)) + &p.c * &Rational::from(c(n - r, l - r));
    let one_branch = Rational::from(c(n - 1, k - 1)) + &p.c * &Rational::from(c(n - 1, l - 1));
    let mut report = BoundReport::from_branches(
        "main",
        p.to_map(),
        vec![(R_BRANCH, r_branch.clone()), (ONE_BRANCH, one_branch.clone())],
    );
    report.predicted_cases = if n > k + l {
        match r_branch.cmp(&one_branch) {
            std::cmp::Ordering::Greater => vec![ExtremalCase::I],
            std::cmp::Ordering::Less => vec![ExtremalCase::Ii],
            std::cmp::Ordering::Equal => vec![ExtremalCase::I, ExtremalCase::Ii],
        }
    } else {
        match p.c.cmp(&Rational::one()) {
            std::cmp::Ordering::Less => vec![ExtremalCase::Iii],
            std::cmp::Ordering::Equal => vec![ExtremalCase::Iv],
            std::cmp::Ordering::Greater => vec![ExtremalCase::V],
        }
    };
    report
}

/// Sum of `t` non-empty cross-intersecting k-families:
/// `max{ C(n,k) - C(n-k,k) + t - 1, t C(n-1,k-1) }`.
pub fn corollary_bound(n: u32, k: u32, t: u32) -> Result<BoundReport> {
    if k == 0 || n < 2 * k {
        return Err(Error::pre("corollary", "n >= 2k >= 2"));
    }
    if t < 2 {
        return Err(Error::pre("corollary", "t >= 2"));
    }
    let hm_branch = Rational::from(c(n, k) - c(n - k, k) + (t - 1));
    let star_branch = Rational::from(BigUint::from(t) * c(n - 1, k - 1));
    Ok(BoundReport::from_branches(
        "corollary",
        params(&[("n", n), ("k", k), ("t", t)]),
        vec![("hm-branch", hm_branch), ("star-branch", star_branch)],
    ))
}

/// Non-empty cross-intersecting k- and l-families with `k >= l`:
/// `C(n,k) - C(n-l,k) + 1`.
pub fn ft_bound(n: u32, k: u32, l: u32) -> Result<BigUint> {
    if l == 0 || k < l {
        return Err(Error::pre("ft", "k >= l >= 1"));
    }
    if n < k + l {
        return Err(Error::pre("ft", "n >= k + l"));
    }
    Ok(c(n, k) - c(n - l, k) + 1u32)
}

/// Intersecting k-family with empty common intersection:
/// `C(n-1,k-1) - C(n-k-1,k-1) + 1` for `n > 2k`.
pub fn hm_stability_bound(n: u32, k: u32) -> Result<BigUint> {
    if k == 0 || n <= 2 * k {
        return Err(Error::pre("hm-stability", "n > 2k >= 2"));
    }
    Ok(c(n - 1, k - 1) - c(n - k - 1, k - 1) + 1u32)
}

fn q_tail(n: u32, k_small: u32, k_big: u32, q: u32) -> BigUint {
    (0..q)
        .map(|i| c(k_small, i) * ci(n as i64 - k_small as i64, k_big as i64 - i as i64))
        .sum()
}

/// Non-empty cross-q-intersecting pair of k-families:
/// `C(n,k) - Σ_{i<q} C(k,i) C(n-k,k-i) + 1`.
pub fn fk_bound(n: u32, k: u32, q: u32) -> Result<BigUint> {
    if !(q >= 1 && k > q) {
        return Err(Error::pre("fk", "k > q >= 1"));
    }
    if n + q <= 2 * k {
        return Err(Error::pre("fk", "n > 2k - q"));
    }
    Ok(c(n, k) - q_tail(n, k, k, q) + 1u32)
}

/// Non-empty cross-q-intersecting k- and l-families:
/// `C(n,k) - Σ_{i<q} C(k,i) C(n-k,l-i) + 1`. Each precondition is reported
/// separately.
pub fn wz_bound(n: u32, k: u32, l: u32, q: u32) -> Result<BigUint> {
    const CTX: &str = "wz";
    if n < 4 {
        return Err(Error::pre(CTX, "n >= 4"));
    }
    if k < 2 || l < 2 {
        return Err(Error::pre(CTX, "k >= 2 and l >= 2"));
    }
    if q == 0 {
        return Err(Error::pre(CTX, "q >= 1"));
    }
    if q >= k.min(l) {
        return Err(Error::pre(CTX, "q < min(k, l)"));
    }
    if n + q <= k + l {
        return Err(Error::pre(CTX, "n > k + l - q"));
    }
    if n == k + l && q == 1 {
        return Err(Error::pre(CTX, "(n, q) != (k + l, 1)"));
    }
    if c(n, k) > c(n, l) {
        return Err(Error::pre(CTX, "C(n,k) <= C(n,l)"));
    }
    Ok(wz_formula(n, k, l, q))
}

fn wz_formula(n: u32, k: u32, l: u32, q: u32) -> BigUint {
    c(n, k) - q_tail(n, k, l, q) + 1u32
}

/// Which of the three open multi-family questions an instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemId {
    #[serde(rename = "problem1")]
    One,
    #[serde(rename = "problem2")]
    Two,
    #[serde(rename = "problem3")]
    Three,
}

impl ProblemId {
    pub fn from_number(id: u32) -> Result<Self> {
        match id {
            1 => Ok(ProblemId::One),
            2 => Ok(ProblemId::Two),
            3 => Ok(ProblemId::Three),
            _ => Err(Error::Parse(format!("unknown problem id {id}"))),
        }
    }

    pub fn number(self) -> u32 {
        match self {
            ProblemId::One => 1,
            ProblemId::Two => 2,
            ProblemId::Three => 3,
        }
    }
}

/// An instance of one of the open problems: `t = sizes.len()` families of
/// sizes `k_1 >= ... >= k_t`, pairwise cross-q-intersecting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub problem: ProblemId,
    pub n: u32,
    pub sizes: Vec<u32>,
    pub q: u32,
}

impl ProblemInstance {
    pub fn new(problem: ProblemId, n: u32, sizes: Vec<u32>, q: u32) -> Result<Self> {
        let inst = ProblemInstance {
            problem,
            n,
            sizes,
            q,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn t(&self) -> usize {
        self.sizes.len()
    }

    pub fn validate(&self) -> Result<()> {
        const CTX: &str = "problem instance";
        let s = &self.sizes;
        if s.len() < 2 {
            return Err(Error::pre(CTX, "t >= 2"));
        }
        if s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::pre(CTX, "k_1 >= k_2 >= ... >= k_t"));
        }
        if self.n == 0 || self.n > crate::combinatorics::MAX_GROUND {
            return Err(Error::GroundTooLarge(self.n));
        }
        let kt = *s.last().unwrap();
        match self.problem {
            ProblemId::One => {
                if self.q != 1 {
                    return Err(Error::pre(CTX, "q = 1 for problem 1"));
                }
                if kt == 0 {
                    return Err(Error::pre(CTX, "k_t >= 1"));
                }
                if self.n < s[0] + s[1] {
                    return Err(Error::pre(CTX, "n >= k_1 + k_2"));
                }
            }
            ProblemId::Two => {
                if s.iter().any(|&k| k != s[0]) {
                    return Err(Error::pre(CTX, "all sizes equal for problem 2"));
                }
                if !(self.q >= 1 && s[0] > self.q) {
                    return Err(Error::pre(CTX, "k > q >= 1"));
                }
                if self.n + self.q <= 2 * s[0] {
                    return Err(Error::pre(CTX, "n > 2k - q"));
                }
            }
            ProblemId::Three => {
                if !(self.q >= 1 && kt > self.q) {
                    return Err(Error::pre(CTX, "k_t > q >= 1"));
                }
                if self.n + self.q <= s[0] + s[1] {
                    return Err(Error::pre(CTX, "n > k_1 + k_2 - q"));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn to_map(&self) -> BTreeMap<String, String> {
        let sizes: Vec<String> = self.sizes.iter().map(|k| k.to_string()).collect();
        [
            ("problem", self.problem.number().to_string()),
            ("n", self.n.to_string()),
            ("t", self.t().to_string()),
            ("sizes", sizes.join(",")),
            ("q", self.q.to_string()),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect()
    }
}

/// First branch of the multi-family bound without precondition checks:
/// `C(n,k_1) - Σ_{i<q} C(k_t,i) C(n-k_t,k_1-i) + Σ_{i>=2} C(n-k_t,k_i-k_t)`.
pub fn problem_first_branch(n: u32, sizes: &[u32], q: u32) -> BigUint {
    let k1 = sizes[0];
    let kt = *sizes.last().unwrap();
    let tail: BigUint = sizes[1..]
        .iter()
        .map(|&ki| ci(n as i64 - kt as i64, ki as i64 - kt as i64))
        .sum();
    c(n, k1) + tail - q_tail(n, kt, k1, q)
}

/// Second branch: `Σ_i C(n-q, k_i-q)`.
pub fn problem_second_branch(n: u32, sizes: &[u32], q: u32) -> BigUint {
    sizes
        .iter()
        .map(|&ki| ci(n as i64 - q as i64, ki as i64 - q as i64))
        .sum()
}

/// The conjectured bound of an open problem, evaluated as the general
/// multi-size, multi-q formula (problems 1 and 2 are its specializations).
pub fn problem_bound(inst: &ProblemInstance) -> Result<BoundReport> {
    inst.validate()?;
    let b1 = Rational::from(problem_first_branch(inst.n, &inst.sizes, inst.q));
    let b2 = Rational::from(problem_second_branch(inst.n, &inst.sizes, inst.q));
    Ok(BoundReport::from_branches(
        &format!("problem{}", inst.problem.number()),
        inst.to_map(),
        vec![("branch1", b1), ("branch2", b2)],
    ))
}
