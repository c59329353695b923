//! Exact bounds, lexicographic compression and exhaustive verification for
//! non-empty cross-intersecting set families.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinatorics`]: binomials, exact rationals, k-subsets and their
//!   lexicographic rank.
//! * [`families`]: uniform families, cross-intersection, `P_i`/`R_i`,
//!   compression, disjointness shadows and maximal pairs.
//! * [`bounds`]: closed-form bound evaluators.
//! * [`verification`]: brute-force and L-initial engines, extremal
//!   classification and the supporting lemma checks.
//! * [`exploration`]: counterexample search for the open multi-family
//!   questions.

pub mod bounds;
pub mod combinatorics;
pub mod error;
pub mod exploration;
pub mod families;
pub mod verification;

mod enumerate;

pub use bounds::{BoundReport, ExtremalCase, ProblemId, ProblemInstance, TheoremParams};
pub use combinatorics::{binomial, lex_compare, lex_rank, lex_unrank, KSet, Rational};
pub use error::{Error, Result};
pub use families::{Family, MaximalPair};

use serde::{Deserialize, Serialize};

/// Explicit enumeration ceilings. Exceeding one is an error, never a silent
/// truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest layer `C(n,l)` whose full power set may be enumerated.
    pub max_universe: u64,
    /// Largest vertex count for independent-set enumeration.
    pub max_bipartite_vertices: u64,
    /// Largest number of candidates (subfamilies, concepts, ...) one run may
    /// examine.
    pub max_candidates: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_universe: 24,
            max_bipartite_vertices: 26,
            max_candidates: 200_000_000,
        }
    }
}

impl Budget {
    pub fn with_max_candidates(max_candidates: u64) -> Self {
        Budget {
            max_candidates,
            ..Budget::default()
        }
    }

    pub(crate) fn check(&self, what: &'static str, required: u128, limit: u64) -> Result<()> {
        if required > limit as u128 {
            return Err(Error::BudgetExceeded {
                what,
                required,
                limit: limit as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_candidates(&self, what: &'static str, required: u128) -> Result<()> {
        self.check(what, required, self.max_candidates)
    }
}
