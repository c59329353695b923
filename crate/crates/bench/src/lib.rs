//! Parameter sets shared by the benchmarks.

use crossint_core::{ProblemId, ProblemInstance, Rational, TheoremParams};

/// Weighted-bound cells, from a trivial layer up to the 20-set layer.
pub fn theorem_cells() -> Vec<(&'static str, TheoremParams)> {
    [
        ("n5k2l2r2", (5, 2, 2, 2, 1u64, 1u64)),
        ("n6k2l3r2", (6, 2, 3, 2, 1, 1)),
        ("n6k3l3r3c1/10", (6, 3, 3, 3, 1, 10)),
    ]
    .into_iter()
    .map(|(name, (n, k, l, r, p, q))| {
        let c = Rational::new(p, q).expect("positive weight");
        (name, TheoremParams::new(n, k, l, r, c).expect("valid cell"))
    })
    .collect()
}

/// Instances for the exact and heuristic counterexample searches.
pub fn search_instances() -> Vec<(&'static str, ProblemInstance)> {
    [
        ("p1n6s3-2", ProblemId::One, 6, vec![3, 2], 1),
        ("p1n8s3-3-3", ProblemId::One, 8, vec![3, 3, 3], 1),
        ("p3n7s3-3q2", ProblemId::Three, 7, vec![3, 3], 2),
    ]
    .into_iter()
    .map(|(name, id, n, sizes, q)| (name, ProblemInstance::new(id, n, sizes, q).expect("valid instance")))
    .collect()
}
