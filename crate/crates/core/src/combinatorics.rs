//! Exact arithmetic and the lexicographic coordinate system on k-subsets.
//!
//! A [`KSet`] stores its members as a bit mask (element `e` is bit `e - 1`),
//! so ground sets are limited to `n <= 64`. The sorted element list is the
//! canonical value; the mask is what the search loops test against.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_GROUND: u32 = 64;

/// Exact `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` for ground sets that fit a mask. Panics on overflow, which cannot
/// happen for `n <= 64`.
pub fn choose(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// Signed variant used by closed-form bound formulas, where the lower index
/// can go negative.
pub(crate) fn choose_signed(n: i64, k: i64) -> BigUint {
    if n < 0 {
        return BigUint::zero();
    }
    binomial(n as u64, k)
}

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Displays and parses as `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Numerator and denominator as machine integers, for scaled integer
    /// comparisons inside search loops.
    pub fn to_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.numer().to_u64()?, self.denom().to_u64()?))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Rational::new(parse(p)?, parse(q)?),
            None => Ok(Rational::integer(parse(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<BigUint> for Rational {
    fn from(v: BigUint) -> Self {
        Rational::integer(BigInt::from(v))
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational::integer(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

/// A k-subset of the ground set `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct KSet {
    ground_n: u8,
    mask: u64,
}

impl KSet {
    pub fn new(ground_n: u32, elements: &[u32]) -> Result<Self> {
        check_ground(ground_n)?;
        let mut mask = 0u64;
        for &e in elements {
            if e == 0 || e > ground_n {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    ground_n,
                });
            }
            let bit = 1u64 << (e - 1);
            if mask & bit != 0 {
                return Err(Error::DuplicateElement(e));
            }
            mask |= bit;
        }
        Ok(KSet {
            ground_n: ground_n as u8,
            mask,
        })
    }

    pub fn from_mask(ground_n: u32, mask: u64) -> Result<Self> {
        check_ground(ground_n)?;
        if ground_n < 64 && mask >> ground_n != 0 {
            return Err(Error::ElementOutOfRange {
                element: 64 - mask.leading_zeros(),
                ground_n,
            });
        }
        Ok(KSet {
            ground_n: ground_n as u8,
            mask,
        })
    }

    /// Caller guarantees the mask fits `ground_n`.
    pub(crate) fn from_mask_unchecked(ground_n: u32, mask: u64) -> Self {
        debug_assert!(ground_n == 64 || mask >> ground_n == 0);
        KSet {
            ground_n: ground_n as u8,
            mask,
        }
    }

    /// `[i] = {1, ..., i}`.
    pub fn initial_segment(ground_n: u32, i: u32) -> Result<Self> {
        if i > ground_n {
            return Err(Error::ElementOutOfRange {
                element: i,
                ground_n,
            });
        }
        KSet::from_mask(ground_n, low_bits(i))
    }

    pub fn ground_n(&self) -> u32 {
        self.ground_n as u32
    }

    pub fn size(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Ascending element list.
    pub fn elements(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut m = self.mask;
        while m != 0 {
            out.push(m.trailing_zeros() + 1);
            m &= m - 1;
        }
        out
    }

    pub fn contains(&self, element: u32) -> bool {
        element >= 1 && element <= self.ground_n() && self.mask & (1u64 << (element - 1)) != 0
    }

    pub fn is_subset_of(&self, other: &KSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn intersection_size(&self, other: &KSet) -> u32 {
        (self.mask & other.mask).count_ones()
    }

    pub fn is_disjoint(&self, other: &KSet) -> bool {
        self.mask & other.mask == 0
    }

    pub fn complement(&self) -> KSet {
        KSet {
            ground_n: self.ground_n,
            mask: !self.mask & low_bits(self.ground_n()),
        }
    }

    fn check_same_shape(&self, other: &KSet) -> Result<()> {
        if self.ground_n != other.ground_n {
            return Err(Error::GroundMismatch {
                left: self.ground_n(),
                right: other.ground_n(),
            });
        }
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.ground_n)
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for KSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

/// Sets of one shape are ordered by `≺`; mixed shapes fall back to
/// (ground, size) first so the order stays total.
impl Ord for KSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ground_n
            .cmp(&other.ground_n)
            .then(self.size().cmp(&other.size()))
            .then_with(|| lex_order_masks(self.mask, other.mask))
    }
}

impl PartialOrd for KSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_ground(ground_n: u32) -> Result<()> {
    if ground_n == 0 || ground_n > MAX_GROUND {
        return Err(Error::GroundTooLarge(ground_n));
    }
    Ok(())
}

pub(crate) fn low_bits(i: u32) -> u64 {
    if i >= 64 {
        u64::MAX
    } else {
        (1u64 << i) - 1
    }
}

/// `A ≺ B` iff the least element of the symmetric difference lies in `A`.
pub(crate) fn lex_order_masks(a: u64, b: u64) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        Ordering::Equal
    } else if a & (diff & diff.wrapping_neg()) != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

pub fn lex_compare(a: &KSet, b: &KSet) -> Result<Ordering> {
    a.check_same_shape(b)?;
    Ok(lex_order_masks(a.mask, b.mask))
}

/// Number of same-size sets preceding `a` under `≺`.
///
/// Closed form: `C(n,k) - 1 - Σ_j C(n - e_j, k - j + 1)` over the sorted
/// elements `e_1 < ... < e_k`.
pub fn lex_rank(a: &KSet) -> u64 {
    let n = a.ground_n();
    let k = a.size();
    let mut tail = 0u64;
    for (j, e) in a.elements().into_iter().enumerate() {
        tail += choose(n - e, k - j as u32);
    }
    choose(n, k) - 1 - tail
}

pub fn lex_unrank(n: u32, k: u32, rank: u64) -> Result<KSet> {
    check_ground(n)?;
    let total = choose(n, k);
    if rank >= total {
        return Err(Error::RankOutOfRange { n, k, rank, total });
    }
    let mut rest = rank;
    let mut mask = 0u64;
    let mut next = 1u32;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            // Sets whose next element is `next` number C(n - next, remaining).
            let block = choose(n - next, remaining);
            if rest < block {
                mask |= 1u64 << (next - 1);
                next += 1;
                break;
            }
            rest -= block;
            next += 1;
        }
    }
    Ok(KSet::from_mask_unchecked(n, mask))
}

/// All k-subsets of `[n]` in `≺` order.
#[derive(Clone, Debug)]
pub struct LexSubsets {
    n: u32,
    idx: Vec<u32>,
    done: bool,
}

impl LexSubsets {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        check_ground(n)?;
        Ok(LexSubsets {
            n,
            idx: (1..=k).collect(),
            done: k > n,
        })
    }
}

impl Iterator for LexSubsets {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        if self.done {
            return None;
        }
        let mask = self.idx.iter().fold(0u64, |m, &e| m | 1u64 << (e - 1));
        let out = KSet::from_mask_unchecked(self.n, mask);
        let k = self.idx.len();
        let mut pos = k;
        while pos > 0 {
            let i = pos - 1;
            if self.idx[i] < self.n - (k - 1 - i) as u32 {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
            pos -= 1;
        }
        if pos == 0 {
            self.done = true;
        }
        Some(out)
    }
}

/// Masks of all k-subsets of `[n]`, indexed by lex rank.
pub(crate) fn lex_masks(n: u32, k: u32) -> Vec<u64> {
    LexSubsets::new(n, k)
        .map(|it| it.map(|s| s.mask).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: every k-subset via bit masks, sorted by the symmetric
    /// difference definition of `≺`.
    fn enumerate_sorted(n: u32, k: u32) -> Vec<u64> {
        let mut all: Vec<u64> = (0u64..1 << n).filter(|m| m.count_ones() == k).collect();
        all.sort_by(|a, b| {
            let only_a = a & !b;
            let only_b = b & !a;
            if only_a == 0 && only_b == 0 {
                Ordering::Equal
            } else {
                only_a.trailing_zeros().cmp(&only_b.trailing_zeros())
            }
        });
        all
    }

    fn pascal(max_n: usize) -> Vec<Vec<BigUint>> {
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = vec![BigUint::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            rows.push(row);
        }
        rows
    }

    fn set(n: u32, e: &[u32]) -> KSet {
        KSet::new(n, e).unwrap()
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(7, 0), BigUint::one());
        assert_eq!(binomial(30, 15), pascal(30)[30][15]);
        assert_eq!(binomial(30, 15), BigUint::from(155_117_520u64));
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(5, 6), BigUint::zero());
    }

    #[test]
    fn binomial_matches_pascal_up_to_128() {
        let table = pascal(128);
        for n in 0..=128u64 {
            for k in 0..=n {
                assert_eq!(binomial(n, k as i64), table[n as usize][k as usize]);
            }
        }
        for n in 2..=40u64 {
            for k in 1..n as i64 {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k - 1) + binomial(n - 1, k)
                );
            }
        }
    }

    #[test]
    fn choose_agrees_with_binomial() {
        for n in 0..=64u32 {
            for k in 0..=n + 1 {
                assert_eq!(BigUint::from(choose(n, k)), binomial(n as u64, k as i64));
            }
        }
    }

    #[test]
    fn lex_compare_examples() {
        assert_eq!(
            lex_compare(&set(4, &[1, 2]), &set(4, &[1, 3])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            lex_compare(&set(4, &[1, 4]), &set(4, &[2, 3])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            lex_compare(&set(4, &[2, 3]), &set(4, &[2, 3])).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn lex_compare_rejects_mismatched_shapes() {
        assert!(matches!(
            lex_compare(&set(4, &[1, 2]), &set(5, &[1, 2])),
            Err(Error::GroundMismatch { .. })
        ));
        assert!(matches!(
            lex_compare(&set(4, &[1, 2]), &set(4, &[1, 2, 3])),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn enumeration_order_of_two_subsets_of_four() {
        let got: Vec<Vec<u32>> = LexSubsets::new(4, 2).unwrap().map(|s| s.elements()).collect();
        assert_eq!(
            got,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
    }

    #[test]
    fn rank_and_unrank_examples() {
        assert_eq!(lex_rank(&set(5, &[1, 2])), 0);
        assert_eq!(lex_rank(&set(5, &[4, 5])), 9);
        assert_eq!(lex_rank(&set(4, &[1, 3])), 1);
        assert_eq!(lex_unrank(4, 2, 0).unwrap(), set(4, &[1, 2]));
        assert_eq!(lex_unrank(4, 2, 5).unwrap(), set(4, &[3, 4]));
        // 123, 124, 125, 134, 135, 145, ...
        assert_eq!(lex_unrank(5, 3, 4).unwrap(), set(5, &[1, 3, 5]));
        assert_eq!(lex_unrank(5, 3, 5).unwrap(), set(5, &[1, 4, 5]));
        assert_eq!(
            enumerate_sorted(5, 3)[5],
            set(5, &[1, 4, 5]).mask(),
            "oracle agrees"
        );
        assert!(matches!(
            lex_unrank(4, 2, 6),
            Err(Error::RankOutOfRange { total: 6, .. })
        ));
    }

    #[test]
    fn rank_matches_enumeration_oracle() {
        for n in 1..=10 {
            for k in 0..=n {
                let oracle = enumerate_sorted(n, k);
                let ours = lex_masks(n, k);
                assert_eq!(oracle, ours, "n={n} k={k}");
                for (r, &m) in oracle.iter().enumerate() {
                    assert_eq!(lex_rank(&KSet::from_mask(n, m).unwrap()), r as u64);
                }
            }
        }
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(KSet::new(4, &[0]), Err(Error::ElementOutOfRange { .. })));
        assert!(matches!(KSet::new(4, &[5]), Err(Error::ElementOutOfRange { .. })));
        assert!(matches!(KSet::new(4, &[2, 2]), Err(Error::DuplicateElement(2))));
        assert!(matches!(KSet::new(65, &[1]), Err(Error::GroundTooLarge(65))));
        assert!(KSet::from_mask(3, 0b1000).is_err());
    }

    #[test]
    fn mask_agrees_with_elements() {
        let a = set(9, &[2, 5, 9]);
        assert_eq!(a.elements(), vec![2, 5, 9]);
        assert_eq!(a.mask(), 0b1_0001_0010);
        assert_eq!(a.complement().elements(), vec![1, 3, 4, 6, 7, 8]);
        assert!(a.contains(5) && !a.contains(4) && !a.contains(0) && !a.contains(10));
    }

    #[test]
    fn rational_parse_and_format() {
        let r: Rational = "2/4".parse().unwrap();
        assert_eq!(r.to_string(), "1/2");
        assert_eq!("15".parse::<Rational>().unwrap().to_string(), "15/1");
        assert_eq!("-3/6".parse::<Rational>().unwrap().to_string(), "-1/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        let a: Rational = "1/10".parse().unwrap();
        let b = Rational::from(31u64);
        assert_eq!((&b + &a).to_string(), "311/10");
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"1/10\"");
        let back: Rational = serde_json::from_str("\"311/10\"").unwrap();
        assert_eq!(back, &b + &a);
    }
}
