use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "crossint", version, about = "Bounds, exhaustive verification and counterexample search for cross-intersecting families")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Ceiling on candidates examined by one run.
    #[arg(long, global = true, env = "CROSSINT_BUDGET")]
    pub budget: Option<u64>,
    /// Omit wall-clock timing so identical runs produce identical output.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate a closed-form bound.
    Bound(BoundArgs),
    /// Run an exhaustive or scan-based verification.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Search for counterexamples to one of the open problems.
    Explore(ExploreArgs),
    /// Lexicographic rank utilities.
    #[command(subcommand)]
    Lex(LexCmd),
    /// Disjointness shadow of a family read from a file.
    Shadow(ShadowArgs),
    /// Build or inspect families in the text format.
    #[command(subcommand)]
    Family(FamilyCmd),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Bound(b) => format!("bound {}", b.theorem.name()),
            Command::Verify(v) => format!("verify {}", v.name()),
            Command::Explore(e) => format!("explore {}", e.problem.name()),
            Command::Lex(l) => format!("lex {}", l.name()),
            Command::Shadow(_) => "shadow".into(),
            Command::Family(f) => format!("family {}", f.name()),
        }
    }
}

fn variant_name<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| match v {
            serde_json::Value::String(s) => Some(s),
            serde_json::Value::Object(m) => m.keys().next().cloned(),
            _ => None,
        })
        .unwrap_or_default()
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Main,
    Corollary,
    Ekr,
    Hilton,
    Hm,
    Ft,
    HmStability,
    Fk,
    Wz,
    Problem,
}

impl Theorem {
    pub fn name(&self) -> String {
        variant_name(self)
    }
}

/// A sweep over one integer parameter, written `name=lo..hi` (inclusive).
#[derive(Clone, Debug, Serialize)]
pub struct Sweep {
    pub name: String,
    pub lo: u32,
    pub hi: u32,
}

impl std::str::FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected name=lo..hi, got {s:?}");
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(format!("empty sweep range in {s:?}"));
        }
        Ok(Sweep {
            name: name.trim().to_string(),
            lo,
            hi,
        })
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[arg(short = 'n')]
    pub n: Option<u32>,
    #[arg(short = 'k')]
    pub k: Option<u32>,
    #[arg(short = 'l')]
    pub l: Option<u32>,
    #[arg(short = 'r')]
    pub r: Option<u32>,
    /// Weight, as `p/q` or an integer.
    #[arg(short = 'c')]
    pub c: Option<String>,
    #[arg(short = 't')]
    pub t: Option<u32>,
    #[arg(short = 'q')]
    pub q: Option<u32>,
    /// Problem number for `--theorem problem`.
    #[arg(long)]
    pub problem: Option<u32>,
    /// Comma-separated family sizes for `--theorem problem`.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Iterate one integer parameter, e.g. `n=6..12`.
    #[arg(long)]
    pub sweep: Option<Sweep>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MainArgs {
    #[arg(short = 'n')]
    pub n: u32,
    #[arg(short = 'k')]
    pub k: u32,
    #[arg(short = 'l')]
    pub l: u32,
    #[arg(short = 'r')]
    pub r: u32,
    #[arg(short = 'c', default_value = "1")]
    pub c: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineMode {
    Brute,
    Scan,
    Both,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyMainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: MainArgs,
    #[arg(long, value_enum, default_value_t = EngineMode::Both)]
    pub mode: EngineMode,
    /// Override the `|B|` window as `lo,hi`.
    #[arg(long)]
    pub window: Option<String>,
    /// Discard `B` whose maximal partner is empty.
    #[arg(long)]
    pub nonempty: bool,
    /// Witnesses kept in the report (all are counted and classified).
    #[arg(long, default_value_t = 16)]
    pub witness_limit: usize,
    /// Write witness families (or the falsifying witness) to this file.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
    /// Iterate one integer parameter, e.g. `n=6..9`.
    #[arg(long)]
    pub sweep: Option<Sweep>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NkArgs {
    #[arg(short = 'n')]
    pub n: u32,
    #[arg(short = 'k')]
    pub k: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NklArgs {
    #[arg(short = 'n')]
    pub n: u32,
    #[arg(short = 'k')]
    pub k: u32,
    #[arg(short = 'l')]
    pub l: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollaryModeArg {
    Construction,
    Exhaustive,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCmd {
    /// Weighted bound: brute force and/or L-initial scan, with witness
    /// classification.
    Main(VerifyMainArgs),
    /// Non-empty cross-intersecting pair of k-families.
    Hm(NkArgs),
    /// Non-empty cross-intersecting k- and l-families.
    Ft(NklArgs),
    /// Largest intersecting family.
    Ekr(NkArgs),
    /// Largest intersecting family with empty common intersection.
    HmStability(NkArgs),
    /// Compression keeps random cross-intersecting pairs cross-intersecting.
    Kk {
        #[command(flatten)]
        #[serde(flatten)]
        shape: NklArgs,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimum disjointness shadow and its minimizers.
    Fm {
        #[command(flatten)]
        #[serde(flatten)]
        shape: NklArgs,
        #[arg(short = 'r')]
        r: u32,
    },
    /// Weighted independent-set bound on the bipartite graph G_s.
    Bipartite {
        #[command(flatten)]
        #[serde(flatten)]
        shape: NklArgs,
        #[arg(short = 's')]
        s: u32,
        #[arg(short = 'c', default_value = "1")]
        c: String,
    },
    /// Sum bound for t cross-intersecting families.
    Corollary {
        #[command(flatten)]
        #[serde(flatten)]
        shape: NkArgs,
        #[arg(short = 't')]
        t: u32,
        #[arg(long, value_enum, default_value_t = CorollaryModeArg::Construction)]
        mode: CorollaryModeArg,
    },
    /// Exact scan of the binomial inequalities used by the k/l bound.
    Inequalities {
        #[arg(long, default_value_t = 40)]
        max_n: u32,
    },
    /// Classify a pair (A then B, text format) against the extremal cases.
    Classify {
        #[command(flatten)]
        #[serde(flatten)]
        params: MainArgs,
        #[arg(long)]
        input: PathBuf,
    },
    /// Values of the dual pairs (R_i, P_i) for i in [1, r].
    Endpoint(MainArgs),
}

impl VerifyCmd {
    pub fn name(&self) -> String {
        variant_name(self)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemArg {
    Problem1,
    Problem2,
    Problem3,
}

impl ProblemArg {
    pub fn name(&self) -> String {
        variant_name(self)
    }

    pub fn number(&self) -> u32 {
        match self {
            ProblemArg::Problem1 => 1,
            ProblemArg::Problem2 => 2,
            ProblemArg::Problem3 => 3,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploreMode {
    Exhaustive,
    Alternating,
    Both,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExploreArgs {
    #[arg(value_enum)]
    pub problem: ProblemArg,
    #[arg(short = 'n')]
    pub n: u32,
    /// Number of families; checked against `--sizes` or used with `-k`.
    #[arg(short = 't')]
    pub t: Option<u32>,
    /// Common size, with `-t`, when `--sizes` is not given.
    #[arg(short = 'k')]
    pub k: Option<u32>,
    /// Comma-separated non-increasing sizes.
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(short = 'q', default_value_t = 1)]
    pub q: u32,
    #[arg(long, value_enum, default_value_t = ExploreMode::Both)]
    pub mode: ExploreMode,
    #[arg(long, default_value_t = 100)]
    pub restarts: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the best tuple found to this file.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexCmd {
    /// Rank of a set among the k-subsets of [n].
    Rank {
        #[arg(short = 'n')]
        n: u32,
        #[arg(long)]
        set: String,
    },
    /// The k-subset of [n] with a given rank.
    Unrank {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'k')]
        k: u32,
        #[arg(long)]
        rank: u64,
    },
    /// Compare two sets under the lexicographic order.
    Compare {
        #[arg(short = 'n')]
        n: u32,
        a: String,
        b: String,
    },
    /// The first m k-subsets (all when m is omitted).
    List {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'k')]
        k: u32,
        #[arg(short = 'm')]
        m: Option<u64>,
    },
}

impl LexCmd {
    pub fn name(&self) -> String {
        variant_name(self)
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShadowArgs {
    /// Family file in the text format.
    #[arg(long)]
    pub input: PathBuf,
    /// Which family in the file (0-based).
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(short = 'j')]
    pub j: u32,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyCmd {
    /// P_i: l-sets containing [i].
    P {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'l')]
        l: u32,
        #[arg(short = 'i')]
        i: u32,
    },
    /// R_i: k-sets meeting [i].
    R {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'k')]
        k: u32,
        #[arg(short = 'i')]
        i: u32,
    },
    /// The first m k-sets.
    LInitial {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'k')]
        k: u32,
        #[arg(short = 'm')]
        m: u64,
    },
    /// Largest k-family cross-q-intersecting every family in the file.
    Partner {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 'k')]
        k: u32,
        #[arg(short = 'q', default_value_t = 1)]
        q: u32,
    },
    /// Compress every family in the file.
    Compress {
        #[arg(long)]
        input: PathBuf,
    },
    /// Whether the families in the file are pairwise cross-q-intersecting.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 'q', default_value_t = 1)]
        q: u32,
    },
    /// Close the first two families of the file to a maximal pair.
    Closure {
        #[arg(long)]
        input: PathBuf,
    },
}

impl FamilyCmd {
    pub fn name(&self) -> String {
        variant_name(self)
    }
}
