use std::collections::BTreeMap;
use std::path::Path;

use crossint_core::bounds::{
    corollary_bound, ekr_bound, fk_bound, ft_bound, hilton_bound, hm_bound, hm_stability_bound, main_bound,
    problem_bound, wz_bound,
};
use crossint_core::exploration::{
    alternating_maximization, construction_values, exhaustive_search, SearchOutcome, SearchStatus,
};
use crossint_core::families::{
    close_to_maximal_pair, compress, disjointness_shadow, is_cross_q_intersecting, l_initial, maximal_q_partner,
    p_family, parse_families, r_family,
};
use crossint_core::verification::{
    classify_extremal, endpoint_profile, scan_inequalities, verify_bipartite_lemma, verify_corollary, verify_ekr,
    verify_ft, verify_hm, verify_hm_stability, verify_kk_preservation, verify_main_theorem, verify_proposition_fm,
    BruteForceOptions, ClassicVerdict, CorollaryMode, MainVerdict, Mode,
};
use crossint_core::{
    lex_compare, lex_rank, lex_unrank, BoundReport, Budget, Error, Family, KSet, ProblemId, ProblemInstance,
    Rational, TheoremParams,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    BoundArgs, Command, CorollaryModeArg, EngineMode, ExploreArgs, ExploreMode, FamilyCmd, LexCmd, MainArgs,
    ShadowArgs, Sweep, Theorem, VerifyCmd, VerifyMainArgs,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok,
    Falsified,
    Budget,
}

impl Exit {
    pub fn code(self) -> u8 {
        match self {
            Exit::Ok => 0,
            Exit::Falsified => 2,
            Exit::Budget => 3,
        }
    }

    fn worst(self, other: Exit) -> Exit {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

pub struct Table {
    pub header: String,
    pub rows: Vec<String>,
}

pub struct Report {
    pub result: Value,
    pub text: String,
    /// Command-specific CSV; when absent the scalar fields of `result` are
    /// flattened instead.
    pub csv: Option<Table>,
    pub exit: Exit,
}

impl Report {
    fn new(result: impl Serialize, text: String, exit: Exit) -> Self {
        Report {
            result: to_value(&result),
            text,
            csv: None,
            exit,
        }
    }

    pub fn budget(err: &Error) -> Self {
        Report {
            result: json!({ "status": "budget_exhausted", "detail": err.to_string() }),
            text: format!("budget exhausted: {err}\n"),
            csv: None,
            exit: Exit::Budget,
        }
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn dispatch(cmd: &Command, budget: &Budget) -> Result<Report> {
    match cmd {
        Command::Bound(a) => bound(a),
        Command::Verify(v) => verify(v, budget),
        Command::Explore(a) => explore(a, budget),
        Command::Lex(l) => lex(l),
        Command::Shadow(a) => shadow(a),
        Command::Family(f) => family(f),
    }
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing required parameter -{name}")))
}

pub fn parse_c(s: &str) -> Result<Rational> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("bad weight {s:?}: expected p/q or an integer")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad {what} {s:?}: expected comma-separated integers")))
        })
        .collect()
}

fn parse_set(n: u32, s: &str) -> Result<KSet> {
    Ok(KSet::new(n, &parse_list(s.trim_matches(|c| c == '{' || c == '}'), "set")?)?)
}

fn read_families(path: &Path) -> Result<Vec<Family>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_families(&text)?)
}

fn write_families(path: &Path, fams: &[&Family]) -> Result<()> {
    let text: String = fams.iter().map(|f| f.to_text()).collect();
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn families_text(fams: &[&Family]) -> String {
    fams.iter().map(|f| f.to_text()).collect()
}

fn sweep_values(sweep: &Option<Sweep>) -> Vec<Option<(String, u32)>> {
    match sweep {
        None => vec![None],
        Some(s) => (s.lo..=s.hi).map(|v| Some((s.name.clone(), v))).collect(),
    }
}

fn unknown_sweep(name: &str) -> CliError {
    CliError::Usage(format!("cannot sweep parameter {name:?}"))
}

fn pm(pairs: &[(&str, u32)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

// ---------------------------------------------------------------- bound

fn bound(args: &BoundArgs) -> Result<Report> {
    let mut reports = Vec::new();
    for point in sweep_values(&args.sweep) {
        let mut a = args.clone();
        if let Some((name, v)) = point {
            match name.as_str() {
                "n" => a.n = Some(v),
                "k" => a.k = Some(v),
                "l" => a.l = Some(v),
                "r" => a.r = Some(v),
                "t" => a.t = Some(v),
                "q" => a.q = Some(v),
                _ => return Err(unknown_sweep(&name)),
            }
        }
        reports.push(bound_one(&a)?);
    }
    let text = reports.iter().map(bound_text).collect();
    let csv = Table {
        header: BoundReport::csv_header().to_string(),
        rows: reports.iter().map(BoundReport::to_csv_row).collect(),
    };
    let result = if args.sweep.is_some() {
        to_value(&reports)
    } else {
        to_value(&reports[0])
    };
    Ok(Report {
        result,
        text,
        csv: Some(csv),
        exit: Exit::Ok,
    })
}

fn bound_one(a: &BoundArgs) -> Result<BoundReport> {
    let n = || need(a.n, "n");
    let k = || need(a.k, "k");
    let l = || need(a.l, "l");
    let t = || need(a.t, "t");
    let q = || need(a.q, "q");
    Ok(match a.theorem {
        Theorem::Main => {
            let c = parse_c(a.c.as_deref().unwrap_or("1"))?;
            main_bound(&TheoremParams::new(n()?, k()?, l()?, need(a.r, "r")?, c)?)
        }
        Theorem::Corollary => corollary_bound(n()?, k()?, t()?)?,
        Theorem::Hilton => hilton_bound(n()?, k()?, t()?)?,
        Theorem::Ekr => scalar("ekr", &[("n", n()?), ("k", k()?)], ekr_bound(n()?, k()?)?),
        Theorem::Hm => scalar("hm", &[("n", n()?), ("k", k()?)], hm_bound(n()?, k()?)?),
        Theorem::Ft => scalar(
            "ft",
            &[("n", n()?), ("k", k()?), ("l", l()?)],
            ft_bound(n()?, k()?, l()?)?,
        ),
        Theorem::HmStability => scalar(
            "hm-stability",
            &[("n", n()?), ("k", k()?)],
            hm_stability_bound(n()?, k()?)?,
        ),
        Theorem::Fk => scalar(
            "fk",
            &[("n", n()?), ("k", k()?), ("q", q()?)],
            fk_bound(n()?, k()?, q()?)?,
        ),
        Theorem::Wz => scalar(
            "wz",
            &[("n", n()?), ("k", k()?), ("l", l()?), ("q", q()?)],
            wz_bound(n()?, k()?, l()?, q()?)?,
        ),
        Theorem::Problem => {
            let inst = instance(need(a.problem, "-problem")?, n()?, a.sizes.as_deref(), a.k, a.t, a.q)?;
            problem_bound(&inst)?
        }
    })
}

fn scalar<V>(name: &str, params: &[(&str, u32)], v: V) -> BoundReport
where
    Rational: From<V>,
{
    BoundReport::scalar(name, pm(params), Rational::from(v))
}

fn bound_text(r: &BoundReport) -> String {
    let params = join(r.params.iter().map(|(k, v)| format!("{k}={v}")), " ");
    let mut out = format!("{} {}: {}", r.theorem, params, r.max_value);
    if r.branch_values.len() > 1 {
        let branches = join(r.branch_values.iter().map(|b| format!("{}={}", b.label, b.value)), ", ");
        out.push_str(&format!(" [{branches}] argmax {}", r.argmax_labels.join("+")));
    }
    if !r.predicted_cases.is_empty() {
        out.push_str(&format!(" cases {}", join(&r.predicted_cases, ",")));
    }
    out.push('\n');
    out
}

fn instance(
    problem: u32,
    n: u32,
    sizes: Option<&str>,
    k: Option<u32>,
    t: Option<u32>,
    q: Option<u32>,
) -> Result<ProblemInstance> {
    let sizes = match sizes {
        Some(s) => parse_list(s, "sizes")?,
        None => vec![need(k, "k")?; need(t, "t")? as usize],
    };
    if let Some(t) = t {
        if t as usize != sizes.len() {
            return Err(CliError::Usage(format!("-t {t} but {} sizes given", sizes.len())));
        }
    }
    Ok(ProblemInstance::new(ProblemId::from_number(problem)?, n, sizes, q.unwrap_or(1))?)
}

// ---------------------------------------------------------------- verify

fn verify(cmd: &VerifyCmd, budget: &Budget) -> Result<Report> {
    match cmd {
        VerifyCmd::Main(a) => verify_main(a, budget),
        VerifyCmd::Hm(a) => Ok(classic(verify_hm(a.n, a.k, budget)?)),
        VerifyCmd::Ft(a) => Ok(classic(verify_ft(a.n, a.k, a.l, budget)?)),
        VerifyCmd::Ekr(a) => Ok(classic(verify_ekr(a.n, a.k, budget)?)),
        VerifyCmd::HmStability(a) => Ok(classic(verify_hm_stability(a.n, a.k, budget)?)),
        VerifyCmd::Kk { shape, trials, seed } => {
            let r = verify_kk_preservation(shape.n, shape.k, shape.l, *trials, *seed)?;
            let text = format!(
                "kk n={} k={} l={}: {}/{} random pairs stay cross-intersecting after compression (seed {}) {}\n",
                r.n,
                r.k,
                r.l,
                r.passed_trials,
                r.trials,
                r.seed,
                verdict(r.passed())
            );
            let exit = pass_exit(r.passed());
            let mut result = to_value(&r);
            result["passed"] = Value::Bool(r.passed());
            Ok(Report {
                result,
                text,
                csv: None,
                exit,
            })
        }
        VerifyCmd::Fm { shape, r } => {
            let rep = verify_proposition_fm(shape.n, shape.k, shape.l, *r, budget)?;
            let text = format!(
                "fm n={} k={} l={} r={}: {} families of size {}, min shadow {} (expected {}), {} minimizers (expected {}), all stars {} {}\n",
                rep.n,
                rep.k,
                rep.l,
                rep.r,
                rep.candidates_examined,
                rep.family_size,
                rep.min_shadow,
                rep.expected_min,
                rep.minimizer_count,
                rep.expected_minimizers,
                rep.minimizers_are_stars,
                verdict(rep.passed)
            );
            let exit = pass_exit(rep.passed);
            Ok(Report::new(rep, text, exit))
        }
        VerifyCmd::Bipartite { shape, s, c } => {
            let c = parse_c(c)?;
            let rep = verify_bipartite_lemma(shape.n, shape.k, shape.l, *s, &c, budget)?;
            let text = format!(
                "bipartite n={} k={} l={} s={} c={}: |X|={} |Y|={} biregular {} connected {} (required {}), {} independent sets, max {} vs bound {}, equality only at sides {} {}\n",
                rep.n,
                rep.k,
                rep.l,
                rep.s,
                rep.c,
                rep.x_size,
                rep.y_size,
                rep.biregular,
                rep.connected,
                rep.connectivity_required,
                rep.independent_sets,
                rep.max_value,
                rep.bound,
                rep.equality_only_at_sides,
                verdict(rep.passed)
            );
            let exit = pass_exit(rep.passed);
            Ok(Report::new(rep, text, exit))
        }
        VerifyCmd::Corollary { shape, t, mode } => {
            let mode = match mode {
                CorollaryModeArg::Construction => CorollaryMode::Construction,
                CorollaryModeArg::Exhaustive => CorollaryMode::Exhaustive,
            };
            let v = verify_corollary(shape.n, shape.k, *t, mode, budget)?;
            let mut text = format!(
                "corollary n={} k={} t={}: bound {} [{}]",
                v.n,
                v.k,
                v.t,
                v.bound.max_value,
                join(v.bound.branch_values.iter().map(|b| format!("{}={}", b.label, b.value)), ", ")
            );
            if let Some(obs) = &v.observed {
                text.push_str(&format!(", observed {obs}"));
                if v.compression_applied {
                    text.push_str(" (nested L-initial tuples)");
                }
            }
            text.push_str(&format!(" {}\n", verdict(v.passed)));
            for c in &v.constructions {
                text.push_str(&format!(
                    "  {}: sum {} vs branch {}, cross-intersecting {}\n",
                    c.branch, c.sum, c.branch_value, c.cross_intersecting
                ));
            }
            let exit = pass_exit(v.passed);
            Ok(Report::new(v, text, exit))
        }
        VerifyCmd::Inequalities { max_n } => {
            let rep = scan_inequalities(*max_n)?;
            let text = format!(
                "inequalities n<={}: star_sum {} checked ({} tight), swap {} checked ({} tight with k>l, locus n=k+l {}), termwise {} checked, {} violations {}\n",
                rep.max_n,
                rep.star_sum_checked,
                rep.star_sum_equalities.len(),
                rep.swap_checked,
                rep.swap_equalities.len(),
                rep.swap_equality_locus_is_n_eq_k_plus_l,
                rep.termwise_checked,
                rep.violations.len(),
                verdict(rep.passed())
            );
            let exit = pass_exit(rep.passed());
            let mut result = to_value(&rep);
            result["passed"] = Value::Bool(rep.passed());
            Ok(Report {
                result,
                text,
                csv: None,
                exit,
            })
        }
        VerifyCmd::Classify { params, input } => {
            let p = theorem_params(params)?;
            let fams = read_families(input)?;
            let [a, b] = fams.as_slice() else {
                return Err(CliError::Usage(format!(
                    "{} must hold exactly two families (A then B), found {}",
                    input.display(),
                    fams.len()
                )));
            };
            let cls = classify_extremal(a, b, &p)?;
            let mut text = format!("case {}", cls.case_label);
            if let Some(r) = &cls.witness_r_set {
                text.push_str(&format!(" with R = {r}"));
            }
            text.push('\n');
            Ok(Report::new(cls, text, Exit::Ok))
        }
        VerifyCmd::Endpoint(params) => {
            let rep = endpoint_profile(&theorem_params(params)?);
            let text = format!(
                "endpoint: {} argmax i in {{{}}} {}\n",
                join(rep.values.iter().map(|(i, v)| format!("i={i}:{v}")), " "),
                join(&rep.argmax, ","),
                verdict(rep.attained_at_endpoint)
            );
            let exit = pass_exit(rep.attained_at_endpoint);
            Ok(Report::new(rep, text, exit))
        }
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn pass_exit(passed: bool) -> Exit {
    if passed {
        Exit::Ok
    } else {
        Exit::Falsified
    }
}

fn theorem_params(a: &MainArgs) -> Result<TheoremParams> {
    Ok(TheoremParams::new(a.n, a.k, a.l, a.r, parse_c(&a.c)?)?)
}

fn classic(v: ClassicVerdict) -> Report {
    let params = join(v.params.iter().map(|(k, x)| format!("{k}={x}")), " ");
    let observed = v.observed.as_ref().map_or("none".to_string(), |o| o.to_string());
    let text = format!(
        "{} {}: observed {}, bound {}, {} candidates {}\n",
        v.theorem,
        params,
        observed,
        v.bound,
        v.candidates_examined,
        verdict(v.matched)
    );
    let exit = pass_exit(v.matched);
    Report::new(v, text, exit)
}

fn verify_main(args: &VerifyMainArgs, budget: &Budget) -> Result<Report> {
    let window = args
        .window
        .as_deref()
        .map(|w| match parse_list(w, "window")?.as_slice() {
            [lo, hi] => Ok((*lo as u64, *hi as u64)),
            _ => Err(CliError::Usage(format!("bad window {w:?}: expected lo,hi"))),
        })
        .transpose()?;
    let opts = BruteForceOptions {
        window,
        require_nonempty_partner: args.nonempty,
        budget: *budget,
        witness_limit: args.witness_limit,
    };
    let mode = match args.mode {
        EngineMode::Brute => Mode::Brute,
        EngineMode::Scan => Mode::Scan,
        EngineMode::Both => Mode::Both,
    };
    let mut verdicts = Vec::new();
    for point in sweep_values(&args.sweep) {
        let mut a = args.params.clone();
        if let Some((name, v)) = point {
            match name.as_str() {
                "n" => a.n = v,
                "k" => a.k = v,
                "l" => a.l = v,
                "r" => a.r = v,
                _ => return Err(unknown_sweep(&name)),
            }
        }
        verdicts.push(verify_main_theorem(&theorem_params(&a)?, mode, &opts)?);
    }
    if let Some(path) = &args.witness_out {
        let mut fams: Vec<&Family> = Vec::new();
        let falsified: Vec<_> = verdicts.iter().flat_map(|v| &v.falsifications).filter_map(|f| f.witness.as_ref()).collect();
        if falsified.is_empty() {
            for v in &verdicts {
                for w in v.brute.iter().chain(v.scan.iter()).flat_map(|r| &r.witnesses) {
                    fams.extend([&w.a, &w.b]);
                }
            }
        } else {
            for w in falsified {
                fams.extend([&w.a, &w.b]);
            }
        }
        write_families(path, &fams)?;
    }
    let exit = verdicts
        .iter()
        .fold(Exit::Ok, |e, v| e.worst(pass_exit(v.passed)));
    let text = verdicts.iter().map(main_text).collect();
    let csv = Table {
        header: "n,k,l,r,c,bound,brute_max,scan_max,witness_count,cases,falsifications,passed".into(),
        rows: verdicts.iter().map(main_row).collect(),
    };
    let result = if args.sweep.is_some() {
        to_value(&verdicts)
    } else {
        to_value(&verdicts[0])
    };
    Ok(Report {
        result,
        text,
        csv: Some(csv),
        exit,
    })
}

fn observed(r: Option<&crossint_core::verification::ScanResult>) -> String {
    r.and_then(|r| r.observed_max.as_ref())
        .map_or(String::new(), |v| v.to_string())
}

fn main_cases(v: &MainVerdict) -> String {
    join(v.classification_counts().iter().map(|(c, n)| format!("{c}:{n}")), ";")
}

fn main_text(v: &MainVerdict) -> String {
    let p = &v.params;
    let mut out = format!("n={} k={} l={} r={} c={}: bound {}", p.n, p.k, p.l, p.r, p.c, v.bound.max_value);
    for (name, r) in [("brute", &v.brute), ("scan", &v.scan)] {
        if let Some(r) = r {
            out.push_str(&format!(", {name} {} ({} witnesses)", observed(Some(r)), r.witness_count));
        }
    }
    out.push_str(&format!(", cases [{}] {}\n", main_cases(v), verdict(v.passed)));
    for f in &v.falsifications {
        let engine = f.engine.map_or(String::new(), |e| format!(" ({})", to_value(&e).as_str().unwrap_or("")));
        out.push_str(&format!(
            "  FALSIFIED {}{engine}: {}\n",
            to_value(&f.kind).as_str().unwrap_or(""),
            f.detail
        ));
    }
    out
}

fn main_row(v: &MainVerdict) -> String {
    let p = &v.params;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        p.n,
        p.k,
        p.l,
        p.r,
        p.c,
        v.bound.max_value,
        observed(v.brute.as_ref()),
        observed(v.scan.as_ref()),
        v.brute.as_ref().or(v.scan.as_ref()).map_or(0, |r| r.witness_count),
        main_cases(v),
        v.falsifications.len(),
        v.passed
    )
}

// ---------------------------------------------------------------- explore

fn explore(a: &ExploreArgs, budget: &Budget) -> Result<Report> {
    let inst = instance(a.problem.number(), a.n, a.sizes.as_deref(), a.k, a.t, Some(a.q))?;
    let constructions = construction_values(&inst)?;
    let mut result = serde_json::Map::new();
    let mut text = format!(
        "problem {} n={} sizes={} q={}: conjectured {} (branch1 {}, branch2 {}), constructions valid {}\n",
        inst.problem.number(),
        inst.n,
        join(&inst.sizes, ","),
        inst.q,
        constructions.branch1.clone().max(constructions.branch2.clone()),
        constructions.branch1,
        constructions.branch2,
        constructions.validated && constructions.matches_bound
    );
    let mut exit = pass_exit(constructions.validated && constructions.matches_bound);
    let mut outcomes: Vec<SearchOutcome> = Vec::new();
    result.insert("constructions".into(), to_value(&constructions));
    if matches!(a.mode, ExploreMode::Exhaustive | ExploreMode::Both) {
        match exhaustive_search(&inst, budget) {
            Ok(o) => {
                text.push_str(&outcome_text("exhaustive", &o));
                result.insert("exhaustive".into(), to_value(&o));
                outcomes.push(o);
            }
            Err(e @ Error::BudgetExceeded { .. }) if a.mode == ExploreMode::Both => {
                text.push_str(&format!("  exhaustive: skipped, {e}\n"));
                result.insert("exhaustive".into(), json!({ "status": "budget_exhausted", "detail": e.to_string() }));
                exit = exit.worst(Exit::Budget);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if matches!(a.mode, ExploreMode::Alternating | ExploreMode::Both) {
        let o = alternating_maximization(&inst, a.restarts, a.seed)?;
        text.push_str(&outcome_text("alternating", &o));
        result.insert("alternating".into(), to_value(&o));
        outcomes.push(o);
    }
    for o in &outcomes {
        exit = exit.worst(match o.status {
            SearchStatus::Consistent => Exit::Ok,
            SearchStatus::Counterexample => Exit::Falsified,
            SearchStatus::BudgetExhausted => Exit::Budget,
        });
    }
    if let Some(path) = &a.witness_out {
        let best = outcomes
            .iter()
            .filter(|o| !o.witness.is_empty())
            .max_by(|x, y| x.best_found.cmp(&y.best_found));
        if let Some(o) = best {
            write_families(path, &o.witness.iter().collect::<Vec<_>>())?;
        }
    }
    Ok(Report {
        result: Value::Object(result),
        text,
        csv: None,
        exit,
    })
}

fn outcome_text(label: &str, o: &SearchOutcome) -> String {
    let best = o.best_found.as_ref().map_or("none".to_string(), |b| b.to_string());
    let mut out = format!(
        "  {label} ({}): best {best}, status {}, {} candidates",
        to_value(&o.engine).as_str().unwrap_or(""),
        o.status,
        o.candidates_examined
    );
    if let (Some(seed), Some(restarts)) = (o.rng_seed, o.restarts) {
        out.push_str(&format!(", seed {seed}, {restarts} restarts"));
    }
    out.push('\n');
    out
}

// ---------------------------------------------------------------- lex

fn lex(cmd: &LexCmd) -> Result<Report> {
    Ok(match cmd {
        LexCmd::Rank { n, set } => {
            let s = parse_set(*n, set)?;
            let rank = lex_rank(&s);
            Report::new(json!({ "n": n, "set": s, "rank": rank }), format!("{rank}\n"), Exit::Ok)
        }
        LexCmd::Unrank { n, k, rank } => {
            let s = lex_unrank(*n, *k, *rank)?;
            let text = format!("{s}\n");
            Report::new(json!({ "n": n, "k": k, "rank": rank, "set": s }), text, Exit::Ok)
        }
        LexCmd::Compare { n, a, b } => {
            let (x, y) = (parse_set(*n, a)?, parse_set(*n, b)?);
            let ord = lex_compare(&x, &y)?;
            let (word, sym) = match ord {
                std::cmp::Ordering::Less => ("less", "<"),
                std::cmp::Ordering::Equal => ("equal", "="),
                std::cmp::Ordering::Greater => ("greater", ">"),
            };
            Report::new(
                json!({ "n": n, "a": x, "b": y, "order": word }),
                format!("{x} {sym} {y}\n"),
                Exit::Ok,
            )
        }
        LexCmd::List { n, k, m } => {
            let m = m.unwrap_or_else(|| crossint_core::combinatorics::choose(*n, *k));
            family_report(&[&l_initial(*n, *k, m)?])
        }
    })
}

// ---------------------------------------------------------------- shadow / family

fn pick(fams: &[Family], index: usize, path: &Path) -> Result<Family> {
    fams.get(index).cloned().ok_or_else(|| {
        CliError::Usage(format!("{} holds {} families, no index {index}", path.display(), fams.len()))
    })
}

fn shadow(a: &ShadowArgs) -> Result<Report> {
    let f = pick(&read_families(&a.input)?, a.index, &a.input)?;
    let d = disjointness_shadow(&f, a.j)?;
    let text = format!("# |F| = {}, |D_{}(F)| = {}\n{}", f.len(), a.j, d.len(), d.to_text());
    Ok(Report::new(
        json!({ "input_size": f.len(), "j": a.j, "shadow_size": d.len(), "shadow": d }),
        text,
        Exit::Ok,
    ))
}

fn family_report(fams: &[&Family]) -> Report {
    let sizes: Vec<usize> = fams.iter().map(|f| f.len()).collect();
    Report::new(json!({ "sizes": sizes, "families": fams }), families_text(fams), Exit::Ok)
}

fn family(cmd: &FamilyCmd) -> Result<Report> {
    Ok(match cmd {
        FamilyCmd::P { n, l, i } => family_report(&[&p_family(*n, *l, *i)?]),
        FamilyCmd::R { n, k, i } => family_report(&[&r_family(*n, *k, *i)?]),
        FamilyCmd::LInitial { n, k, m } => family_report(&[&l_initial(*n, *k, *m)?]),
        FamilyCmd::Partner { input, k, q } => {
            let fams = read_families(input)?;
            let first = pick(&fams, 0, input)?;
            let refs: Vec<&Family> = fams.iter().collect();
            family_report(&[&maximal_q_partner(first.ground_n(), &refs, *k, *q)?])
        }
        FamilyCmd::Compress { input } => {
            let out: Vec<Family> = read_families(input)?.iter().map(compress).collect();
            family_report(&out.iter().collect::<Vec<_>>())
        }
        FamilyCmd::Check { input, q } => {
            let fams = read_families(input)?;
            let mut failing = None;
            'outer: for i in 0..fams.len() {
                for j in i + 1..fams.len() {
                    if !is_cross_q_intersecting(&fams[i], &fams[j], *q)? {
                        failing = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let text = match failing {
                None => format!("pairwise cross-{q}-intersecting: true\n"),
                Some((i, j)) => format!("pairwise cross-{q}-intersecting: false (families {i} and {j})\n"),
            };
            Report::new(
                json!({ "families": fams.len(), "q": q, "cross_intersecting": failing.is_none(), "failing_pair": failing }),
                text,
                Exit::Ok,
            )
        }
        FamilyCmd::Closure { input } => {
            let fams = read_families(input)?;
            let (a, b) = (pick(&fams, 0, input)?, pick(&fams, 1, input)?);
            let pair = close_to_maximal_pair(&a, &b)?;
            family_report(&[&pair.a, &pair.b])
        }
    })
}

// ---------------------------------------------------------------- csv

/// Flattens the scalar leaves of `v` into dotted keys. Arrays of scalars
/// become `;`-joined cells; nested arrays of objects are skipped.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn scalar(v: &Value) -> Option<String> {
        match v {
            Value::Null => Some(String::new()),
            Value::Bool(b) => Some(b.to_string()),
            Value::Number(n) => Some(n.to_string()),
            Value::String(s) if !s.contains('\n') => Some(s.clone()),
            _ => None,
        }
    }
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    walk(&key(k), x, out);
                }
            }
            Value::Array(xs) => {
                if let Some(cells) = xs.iter().map(scalar).collect::<Option<Vec<_>>>() {
                    out.push((prefix.to_string(), cells.join(";")));
                }
            }
            other => {
                if let Some(s) = scalar(other) {
                    out.push((prefix.to_string(), s));
                }
            }
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

pub fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
