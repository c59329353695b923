//! Uniform set families, cross-intersection predicates, the canonical
//! families `P_i` / `R_i`, lexicographic compression, disjointness shadows
//! and maximal-pair closure.

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::combinatorics::{choose, lex_masks, lex_order_masks, low_bits, KSet, LexSubsets};
use crate::error::{Error, Result};

/// Candidate counts above this are scanned in parallel.
const PARALLEL_SCAN_MIN: usize = 1 << 12;

/// A family of `set_size`-subsets of `[ground_n]`, members kept in `≺` order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    ground_n: u32,
    set_size: u32,
    members: Vec<KSet>,
}

impl Family {
    pub fn new(ground_n: u32, set_size: u32, members: impl IntoIterator<Item = KSet>) -> Result<Self> {
        let mut out = Vec::new();
        for m in members {
            if m.ground_n() != ground_n {
                return Err(Error::GroundMismatch {
                    left: ground_n,
                    right: m.ground_n(),
                });
            }
            if m.size() != set_size {
                return Err(Error::SizeMismatch {
                    left: set_size,
                    right: m.size(),
                });
            }
            out.push(m);
        }
        Ok(Self::from_sorted_unchecked(ground_n, set_size, sort_dedup(out)))
    }

    pub fn empty(ground_n: u32, set_size: u32) -> Result<Self> {
        check_shape(ground_n, set_size)?;
        Ok(Family {
            ground_n,
            set_size,
            members: Vec::new(),
        })
    }

    /// Every `set_size`-subset of `[ground_n]`.
    pub fn complete(ground_n: u32, set_size: u32) -> Result<Self> {
        check_shape(ground_n, set_size)?;
        Ok(Family {
            ground_n,
            set_size,
            members: LexSubsets::new(ground_n, set_size)?.collect(),
        })
    }

    pub fn from_elements(ground_n: u32, set_size: u32, sets: &[&[u32]]) -> Result<Self> {
        let members = sets
            .iter()
            .map(|s| KSet::new(ground_n, s))
            .collect::<Result<Vec<_>>>()?;
        Family::new(ground_n, set_size, members)
    }

    /// Members given as masks, already lex-sorted and of the right size.
    pub(crate) fn from_sorted_masks(ground_n: u32, set_size: u32, masks: impl IntoIterator<Item = u64>) -> Self {
        let members: Vec<KSet> = masks
            .into_iter()
            .map(|m| KSet::from_mask_unchecked(ground_n, m))
            .collect();
        debug_assert!(members.iter().all(|m| m.size() == set_size));
        Self::from_sorted_unchecked(ground_n, set_size, members)
    }

    fn from_sorted_unchecked(ground_n: u32, set_size: u32, members: Vec<KSet>) -> Self {
        debug_assert!(members.windows(2).all(|w| lex_order_masks(w[0].mask(), w[1].mask()).is_lt()));
        Family {
            ground_n,
            set_size,
            members,
        }
    }

    pub fn ground_n(&self) -> u32 {
        self.ground_n
    }

    pub fn set_size(&self) -> u32 {
        self.set_size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &KSet> {
        self.members.iter()
    }

    pub(crate) fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|m| m.mask())
    }

    pub fn contains(&self, set: &KSet) -> bool {
        set.ground_n() == self.ground_n
            && set.size() == self.set_size
            && self
                .members
                .binary_search_by(|m| lex_order_masks(m.mask(), set.mask()))
                .is_ok()
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.members.iter().all(|m| other.contains(m))
    }

    /// Intersection of all members (the full ground set for an empty family).
    pub fn common_elements(&self) -> u64 {
        self.masks().fold(low_bits(self.ground_n), |acc, m| acc & m)
    }

    /// True when the family is the first `|self|` sets under `≺`.
    pub fn is_l_initial(&self) -> bool {
        self.members
            .iter()
            .zip(LexSubsets::new(self.ground_n, self.set_size).into_iter().flatten())
            .all(|(a, b)| a.mask() == b.mask())
    }

    /// Lex ranks of the members, ascending. Used as a deterministic signature.
    pub fn rank_signature(&self) -> Vec<u64> {
        self.members.iter().map(crate::combinatorics::lex_rank).collect()
    }

    /// Text block: a header `family n=<n> k=<k> size=<m>` and one
    /// comma-separated set per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "family n={} k={} size={}\n",
            self.ground_n,
            self.set_size,
            self.len()
        );
        for m in &self.members {
            let line: Vec<String> = m.elements().iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(n={}, k={}) ", self.ground_n, self.set_size)?;
        f.debug_list().entries(self.members.iter().map(|m| m.to_string())).finish()
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

/// Parses one or more family blocks in the text format.
pub fn parse_families(text: &str) -> Result<Vec<Family>> {
    let mut out = Vec::new();
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    while let Some(header) = lines.next() {
        let (n, k, size) = parse_header(header)?;
        let mut members = Vec::with_capacity(size);
        for _ in 0..size {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("family truncated after {} of {size} sets", members.len())))?;
            let elems = line
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad set line {line:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let set = KSet::new(n, &elems)?;
            if set.size() != k {
                return Err(Error::SizeMismatch {
                    left: k,
                    right: set.size(),
                });
            }
            members.push(set);
        }
        let fam = Family::new(n, k, members)?;
        if fam.len() != size {
            return Err(Error::Parse(format!("family declares size={size} but has duplicate sets")));
        }
        out.push(fam);
    }
    Ok(out)
}

fn parse_header(line: &str) -> Result<(u32, u32, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("family") {
        return Err(Error::Parse(format!("expected family header, got {line:?}")));
    }
    let (mut n, mut k, mut size) = (None, None, None);
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {part:?}")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::Parse(format!("bad header value {part:?}")))?;
        match key {
            "n" => n = Some(value as u32),
            "k" => k = Some(value as u32),
            "size" => size = Some(value),
            _ => return Err(Error::Parse(format!("unknown header field {key:?}"))),
        }
    }
    match (n, k, size) {
        (Some(n), Some(k), Some(size)) => {
            check_shape(n, k)?;
            Ok((n, k, size))
        }
        _ => Err(Error::Parse(format!("incomplete header {line:?}"))),
    }
}

fn check_shape(ground_n: u32, set_size: u32) -> Result<()> {
    if ground_n == 0 || ground_n > crate::combinatorics::MAX_GROUND {
        return Err(Error::GroundTooLarge(ground_n));
    }
    if set_size > ground_n {
        return Err(Error::pre("family", "set size <= n"));
    }
    Ok(())
}

fn sort_dedup(mut members: Vec<KSet>) -> Vec<KSet> {
    members.sort_by(|a, b| lex_order_masks(a.mask(), b.mask()));
    members.dedup();
    members
}

fn check_same_ground(fams: &[&Family]) -> Result<u32> {
    let n = fams[0].ground_n;
    for f in &fams[1..] {
        if f.ground_n != n {
            return Err(Error::GroundMismatch {
                left: n,
                right: f.ground_n,
            });
        }
    }
    Ok(n)
}

/// Every pair of members drawn from two distinct families intersects.
pub fn is_cross_intersecting(fams: &[&Family]) -> Result<bool> {
    is_cross_t_intersecting(fams, 1)
}

/// Pairwise cross-q-intersection over a list of families.
pub(crate) fn is_cross_t_intersecting(fams: &[&Family], q: u32) -> Result<bool> {
    if fams.len() < 2 {
        return Err(Error::pre("cross-intersection", "at least two families"));
    }
    check_same_ground(fams)?;
    for (i, f) in fams.iter().enumerate() {
        for g in &fams[i + 1..] {
            if !masks_cross_q(f, g, q) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `|F ∩ G| >= q` for all `F` in `f`, `G` in `g`.
pub fn is_cross_q_intersecting(f: &Family, g: &Family, q: u32) -> Result<bool> {
    check_same_ground(&[f, g])?;
    Ok(masks_cross_q(f, g, q))
}

fn masks_cross_q(f: &Family, g: &Family, q: u32) -> bool {
    f.masks()
        .all(|a| g.masks().all(|b| (a & b).count_ones() >= q))
}

/// `P^{(l)}_i`: the l-sets containing `[i]`.
pub fn p_family(n: u32, l: u32, i: u32) -> Result<Family> {
    if i == 0 || i > l || l > n {
        return Err(Error::pre("p_family", "1 <= i <= l <= n"));
    }
    check_shape(n, l)?;
    let seg = low_bits(i);
    Ok(Family::from_sorted_masks(
        n,
        l,
        lex_masks(n, l).into_iter().filter(|m| m & seg == seg),
    ))
}

/// `R^{(k)}_i`: the k-sets meeting `[i]`.
pub fn r_family(n: u32, k: u32, i: u32) -> Result<Family> {
    if i == 0 || i > n || k > n {
        return Err(Error::pre("r_family", "1 <= i <= n, k <= n"));
    }
    check_shape(n, k)?;
    let seg = low_bits(i);
    Ok(Family::from_sorted_masks(
        n,
        k,
        lex_masks(n, k).into_iter().filter(|m| m & seg != 0),
    ))
}

/// The first `m` k-sets under `≺`.
pub fn l_initial(n: u32, k: u32, m: u64) -> Result<Family> {
    check_shape(n, k)?;
    if m > choose(n, k) {
        return Err(Error::pre("l_initial", "m <= C(n,k)"));
    }
    Ok(Family::from_sorted_masks(
        n,
        k,
        LexSubsets::new(n, k)?.take(m as usize).map(|s| s.mask()),
    ))
}

/// `f ↦ f_L`, the L-initial family of the same cardinality.
pub fn compress(f: &Family) -> Family {
    l_initial(f.ground_n, f.set_size, f.len() as u64).expect("family shape already validated")
}

/// `D_j(f)`: the j-sets disjoint from at least one member of `f`.
pub fn disjointness_shadow(f: &Family, j: u32) -> Result<Family> {
    if f.ground_n < f.set_size + j {
        return Err(Error::pre("disjointness_shadow", "n >= set size + j"));
    }
    let members: Vec<u64> = f.masks().collect();
    Ok(Family::from_sorted_masks(
        f.ground_n,
        j,
        scan_candidates(f.ground_n, j, |c| members.iter().any(|&b| b & c == 0)),
    ))
}

/// The largest k-family cross-intersecting with `b`, i.e. the complement of
/// `D_k(b)`.
pub fn maximal_partner(b: &Family, k: u32) -> Result<Family> {
    if b.ground_n < b.set_size + k {
        return Err(Error::pre("maximal_partner", "n >= l + k"));
    }
    maximal_q_partner(b.ground_n, &[b], k, 1)
}

/// All k-sets that meet every member of every given family in at least `q`
/// elements. With no constraining members this is the complete layer.
pub fn maximal_q_partner(n: u32, others: &[&Family], k: u32, q: u32) -> Result<Family> {
    check_shape(n, k)?;
    if let Some(f) = others.iter().find(|f| f.ground_n != n) {
        return Err(Error::GroundMismatch {
            left: n,
            right: f.ground_n,
        });
    }
    let members: Vec<u64> = others.iter().flat_map(|f| f.masks()).collect();
    Ok(Family::from_sorted_masks(
        n,
        k,
        scan_candidates(n, k, |c| members.iter().all(|&m| (m & c).count_ones() >= q)),
    ))
}

/// Lex-ordered candidates of one layer satisfying `keep`. The result does not
/// depend on whether the scan runs in parallel.
fn scan_candidates(n: u32, k: u32, keep: impl Fn(u64) -> bool + Sync) -> Vec<u64> {
    let candidates = lex_masks(n, k);
    if candidates.len() >= PARALLEL_SCAN_MIN {
        candidates.into_par_iter().filter(|&c| keep(c)).collect()
    } else {
        candidates.into_iter().filter(|&c| keep(c)).collect()
    }
}

/// A cross-intersecting pair where each family is the maximal partner of the
/// other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalPair {
    pub a: Family,
    pub b: Family,
}

/// Alternately replaces each family by the maximal partner of the other
/// until nothing changes. Converges after one round: `a' = partner(b)` and
/// `b' = partner(a')` already satisfy `partner(b') = a'`.
pub fn close_to_maximal_pair(a: &Family, b: &Family) -> Result<MaximalPair> {
    check_same_ground(&[a, b])?;
    if a.ground_n < a.set_size + b.set_size {
        return Err(Error::pre("close_to_maximal_pair", "n >= k + l"));
    }
    if !masks_cross_q(a, b, 1) {
        return Err(Error::NotCrossIntersecting("close_to_maximal_pair"));
    }
    let (k, l) = (a.set_size, b.set_size);
    let mut cur_a = a.clone();
    let mut cur_b = b.clone();
    for _ in 0..3 {
        let next_a = maximal_partner(&cur_b, k)?;
        let next_b = maximal_partner(&next_a, l)?;
        debug_assert!(cur_a.is_subfamily_of(&next_a) && cur_b.is_subfamily_of(&next_b));
        if next_a == cur_a && next_b == cur_b {
            return Ok(MaximalPair { a: cur_a, b: cur_b });
        }
        cur_a = next_a;
        cur_b = next_b;
    }
    unreachable!("maximal-pair closure did not stabilize")
}

/// Random cross-intersecting pair for property tests: two random families
/// are drawn, then every member of the larger one that is disjoint from some
/// member of the smaller one is deleted. Draws leaving either family empty are
/// rejected and redrawn.
pub fn random_cross_intersecting_pair<R: Rng + ?Sized>(
    n: u32,
    k: u32,
    l: u32,
    rng: &mut R,
) -> Result<(Family, Family)> {
    check_shape(n, k)?;
    check_shape(n, l)?;
    if n < k + l {
        return Err(Error::pre("random_cross_intersecting_pair", "n >= k + l"));
    }
    let layer_a = lex_masks(n, k);
    let layer_b = lex_masks(n, l);
    loop {
        let mut a = random_subfamily(&layer_a, rng);
        let mut b = random_subfamily(&layer_b, rng);
        if a.len() >= b.len() {
            a.retain(|&x| b.iter().all(|&y| x & y != 0));
        } else {
            b.retain(|&y| a.iter().all(|&x| x & y != 0));
        }
        if !a.is_empty() && !b.is_empty() {
            return Ok((
                Family::from_sorted_masks(n, k, a),
                Family::from_sorted_masks(n, l, b),
            ));
        }
    }
}

fn random_subfamily<R: Rng + ?Sized>(layer: &[u64], rng: &mut R) -> Vec<u64> {
    let size = rng.random_range(1..=layer.len());
    let mut picked = sample(rng, layer.len(), size).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| layer[i]).collect()
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape() -> impl Strategy<Value = (u32, u32, u32)> {
        (2u32..=8, 1u32..=4, 1u32..=4).prop_filter("n >= k + l", |&(n, k, l)| n >= k + l)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn compression_preserves_cross_intersection((n, k, l) in shape(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = random_cross_intersecting_pair(n, k, l, &mut rng).unwrap();
            prop_assert!(is_cross_intersecting(&[&compress(&a), &compress(&b)]).unwrap());
        }

        #[test]
        fn closure_is_monotone_and_maximal((n, k, l) in shape(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = random_cross_intersecting_pair(n, k, l, &mut rng).unwrap();
            let pair = close_to_maximal_pair(&a, &b).unwrap();
            prop_assert!(a.is_subfamily_of(&pair.a));
            prop_assert!(b.is_subfamily_of(&pair.b));
            prop_assert_eq!(&maximal_partner(&pair.b, k).unwrap(), &pair.a);
            prop_assert_eq!(&maximal_partner(&pair.a, l).unwrap(), &pair.b);
        }
    }
}
