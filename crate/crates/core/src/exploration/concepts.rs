//! Exact maximization of `Σ|A_i|` over non-empty, pairwise
//! cross-q-intersecting tuples.
//!
//! At an optimum, `A_1` is exactly the set of `k_1`-sets compatible with all
//! of `A_2 ∪ … ∪ A_t`, so `(A_1, compatible(A_1))` is a formal concept of
//! the compatibility relation between layer 1 and the later layers. The
//! search enumerates those concepts with Close-by-One and recurses on the
//! later families restricted to the concept's intent.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

/// Largest object or attribute set one concept level can hold.
pub(crate) const MAX_SIDE: usize = 128;

/// One layer: its sets as masks over `[n]`, in lex order.
pub(crate) struct Layer {
    pub masks: Vec<u64>,
}

/// Best tuple found: value and, per family, a bitset over its layer.
pub(crate) type Best = Option<(u64, Vec<u128>)>;

pub(crate) struct Search<'a> {
    layers: &'a [Layer],
    q: u32,
    limit: u64,
    visited: AtomicU64,
    exhausted: AtomicBool,
}

impl<'a> Search<'a> {
    pub fn new(layers: &'a [Layer], q: u32, limit: u64) -> Self {
        Search {
            layers,
            q,
            limit,
            visited: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
        }
    }

    pub fn visited(&self) -> u64 {
        self.visited.load(Ordering::Relaxed)
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    /// Runs the search with every set allowed.
    pub fn run(&self) -> Best {
        let allowed: Vec<u128> = self.layers.iter().map(|l| full(l.masks.len())).collect();
        self.solve(0, &allowed, true)
    }

    fn tick(&self) -> bool {
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.limit {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !self.exhausted()
    }

    /// Best tuple for families `depth..` restricted to `allowed`.
    fn solve(&self, depth: usize, allowed: &[u128], parallel: bool) -> Best {
        if allowed.contains(&0) {
            return None;
        }
        if allowed.len() == 1 {
            self.tick();
            return Some((allowed[0].count_ones() as u64, vec![allowed[0]]));
        }
        let ctx = Context::new(self, depth, allowed);
        let top_intent = ctx.intent(ctx.objects);
        let root = self.visit(&ctx, depth, ctx.objects, top_intent);
        let branches = |j: usize| {
            let mut best = None;
            if top_intent >> j & 1 == 0 {
                self.cbo(&ctx, depth, ctx.objects, top_intent, j, &mut best);
            }
            best
        };
        let rest = if parallel {
            (0..ctx.attrs.len()).into_par_iter().map(branches).reduce(|| None, merge)
        } else {
            (0..ctx.attrs.len()).map(branches).fold(None, merge)
        };
        merge(root, rest)
    }

    /// Close-by-One from concept `(ext, int)`, adding attribute `j` first.
    fn cbo(&self, ctx: &Context, depth: usize, ext: u128, int: u128, j: usize, best: &mut Best) {
        if self.exhausted() {
            return;
        }
        let c = ext & ctx.cols[j];
        if c == 0 {
            // Extents only shrink below here.
            return;
        }
        let d = ctx.intent(c);
        let below = (1u128 << j) - 1;
        if d & below != int & below {
            return;
        }
        let here = self.visit(ctx, depth, c, d);
        *best = merge(best.take(), here);
        for next in j + 1..ctx.attrs.len() {
            if d >> next & 1 == 0 {
                self.cbo(ctx, depth, c, d, next, best);
            }
        }
    }

    /// Scores the concept `(ext, int)`: `ext` is family `depth`, the later
    /// families are solved inside `int`.
    fn visit(&self, ctx: &Context, depth: usize, ext: u128, int: u128) -> Best {
        if ext == 0 || !self.tick() {
            return None;
        }
        let sub = ctx.split(int);
        let (value, mut fams) = self.solve(depth + 1, &sub, false)?;
        fams.insert(0, ctx.lift(ext));
        Some((value + ext.count_ones() as u64, fams))
    }
}

/// The relation between family `depth` (objects) and the union of the later
/// layers (attributes), restricted to allowed sets.
struct Context {
    /// Object bitset over compacted indices.
    objects: u128,
    /// Compacted object index -> layer index.
    obj_index: Vec<usize>,
    /// Attribute -> (later family offset, layer index).
    attrs: Vec<(usize, usize)>,
    /// rows[g]: attributes compatible with object g.
    rows: Vec<u128>,
    /// cols[m]: objects compatible with attribute m.
    cols: Vec<u128>,
    later: usize,
}

impl Context {
    fn new(search: &Search, depth: usize, allowed: &[u128]) -> Self {
        let layers = &search.layers[depth..];
        let obj_index: Vec<usize> = ones(allowed[0]).collect();
        let attrs: Vec<(usize, usize)> = allowed[1..]
            .iter()
            .enumerate()
            .flat_map(|(f, &a)| ones(a).map(move |i| (f, i)))
            .collect();
        assert!(
            obj_index.len() <= MAX_SIDE && attrs.len() <= MAX_SIDE,
            "concept sides exceed {MAX_SIDE}"
        );
        let q = search.q;
        let rows: Vec<u128> = obj_index
            .iter()
            .map(|&g| {
                let a = layers[0].masks[g];
                attrs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(f, i))| (a & layers[f + 1].masks[i]).count_ones() >= q)
                    .fold(0u128, |acc, (m, _)| acc | 1 << m)
            })
            .collect();
        let mut cols = vec![0u128; attrs.len()];
        for (g, &row) in rows.iter().enumerate() {
            for m in ones(row) {
                cols[m] |= 1 << g;
            }
        }
        Context {
            objects: full(obj_index.len()),
            obj_index,
            attrs,
            rows,
            cols,
            later: allowed.len() - 1,
        }
    }

    fn intent(&self, ext: u128) -> u128 {
        ones(ext).fold(full(self.attrs.len()), |acc, g| acc & self.rows[g])
    }

    /// Intent as per-family bitsets over layer indices.
    fn split(&self, int: u128) -> Vec<u128> {
        let mut out = vec![0u128; self.later];
        for m in ones(int) {
            let (f, i) = self.attrs[m];
            out[f] |= 1 << i;
        }
        out
    }

    /// Compacted extent back to layer indices.
    fn lift(&self, ext: u128) -> u128 {
        ones(ext).fold(0u128, |acc, g| acc | 1 << self.obj_index[g])
    }
}

pub(crate) fn full(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

pub(crate) fn ones(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

/// Deterministic merge: larger value, then the lex-least signature (member
/// index lists compared family by family).
pub(crate) fn merge(x: Best, y: Best) -> Best {
    match (x, y) {
        (None, y) => y,
        (x, None) => x,
        (Some(a), Some(b)) => {
            if a.0 != b.0 {
                return Some(if a.0 > b.0 { a } else { b });
            }
            Some(if signature(&a.1) <= signature(&b.1) { a } else { b })
        }
    }
}

fn signature(fams: &[u128]) -> Vec<Vec<usize>> {
    fams.iter().map(|&f| ones(f).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::lex_masks;

    fn layers(n: u32, sizes: &[u32]) -> Vec<Layer> {
        sizes.iter().map(|&k| Layer { masks: lex_masks(n, k) }).collect()
    }

    /// Oracle: every non-empty first family with maximal completion of the
    /// second (t = 2 only).
    fn pair_oracle(n: u32, k1: u32, k2: u32, q: u32) -> u64 {
        let a = lex_masks(n, k1);
        let b = lex_masks(n, k2);
        let mut best = 0;
        for f in 1u64..1 << a.len() {
            let partner = b
                .iter()
                .filter(|&&y| ones(f as u128).all(|i| (a[i] & y).count_ones() >= q))
                .count() as u64;
            if partner > 0 {
                best = best.max(f.count_ones() as u64 + partner);
            }
        }
        best
    }

    /// Oracle for t = 3: all triples of non-empty subfamilies.
    fn triple_oracle(n: u32, sizes: [u32; 3], q: u32) -> u64 {
        let ls: Vec<Vec<u64>> = sizes.iter().map(|&k| lex_masks(n, k)).collect();
        let ok = |x: &[u64], fx: u64, y: &[u64], fy: u64| {
            ones(fx as u128).all(|i| ones(fy as u128).all(|j| (x[i] & y[j]).count_ones() >= q))
        };
        let mut best = 0;
        for f0 in 1u64..1 << ls[0].len() {
            for f1 in 1u64..1 << ls[1].len() {
                if !ok(&ls[0], f0, &ls[1], f1) {
                    continue;
                }
                for f2 in 1u64..1 << ls[2].len() {
                    if ok(&ls[0], f0, &ls[2], f2) && ok(&ls[1], f1, &ls[2], f2) {
                        best = best.max((f0.count_ones() + f1.count_ones() + f2.count_ones()) as u64);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn pairs_match_oracle() {
        for (n, k1, k2, q) in [(4, 2, 2, 1), (5, 2, 2, 1), (5, 3, 2, 1), (5, 3, 3, 2), (6, 2, 2, 1), (4, 3, 1, 1)] {
            let ls = layers(n, &[k1, k2]);
            let s = Search::new(&ls, q, u64::MAX);
            let (value, fams) = s.run().unwrap();
            assert_eq!(value, pair_oracle(n, k1, k2, q), "{n} {k1} {k2} {q}");
            assert_eq!(fams.len(), 2);
        }
    }

    #[test]
    fn triples_match_oracle() {
        for (n, sizes, q) in [(4, [2, 2, 2], 1), (4, [2, 2, 1], 1), (3, [1, 1, 1], 1), (4, [3, 3, 3], 2)] {
            let ls = layers(n, &sizes);
            let s = Search::new(&ls, q, u64::MAX);
            assert_eq!(s.run().unwrap().0, triple_oracle(n, sizes, q), "{n} {sizes:?} {q}");
        }
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let ls = layers(6, &[2, 2, 2]);
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let s = Search::new(&ls, 1, u64::MAX);
                (s.run(), s.visited())
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn limit_marks_exhaustion() {
        let ls = layers(6, &[2, 2]);
        let s = Search::new(&ls, 1, 10);
        s.run();
        assert!(s.exhausted());
    }
}
