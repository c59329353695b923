//! Acceptance suite: one pass/fail line per criterion. Runs without the
//! libtest harness so the lines always reach stdout; exits non-zero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use crossint_core::bounds::{corollary_bound, fk_bound, hm_bound, main_bound};
use crossint_core::combinatorics::choose;
use crossint_core::exploration::{
    alternating_maximization, construction_values, exhaustive_search, SearchStatus,
};
use crossint_core::verification::{
    brute_force_max, scan_inequalities, verify_bipartite_lemma, verify_corollary, verify_kk_preservation,
    verify_main_theorem, verify_proposition_fm, BruteForceOptions, CorollaryMode, MainVerdict, Mode,
};
use crossint_core::{
    lex_rank, lex_unrank, Budget, Error, ExtremalCase, ProblemId, ProblemInstance, Rational, TheoremParams,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let limit_note = match limit {
        Some(l) => {
            if elapsed > l {
                pass = false;
                detail = format!("{detail}; over time limit");
            }
            format!(", limit {}s", l.as_secs())
        }
        None => String::new(),
    };
    println!(
        "criterion {id:>2} {}: {name}: {detail} ({:.2}s{limit_note})",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn hm_pairs() -> Check {
    let mut notes = Vec::new();
    for (n, expected) in [(4u32, 6u64), (5, 8)] {
        let start = Instant::now();
        let p = TheoremParams::new(n, 2, 2, 2, Rational::one()).map_err(|e| e.to_string())?;
        let opts = BruteForceOptions {
            window: Some((1, choose(n, 2))),
            require_nonempty_partner: true,
            ..BruteForceOptions::default()
        };
        let r = brute_force_max(&p, &opts).map_err(|e| e.to_string())?;
        let closed = choose(n, 2) - choose(n - 2, 2) + 1;
        let t = start.elapsed();
        ensure!(
            r.observed_max == Some(Rational::from(expected)) && closed == expected,
            "n={n}: observed {:?}, closed form {closed}, expected {expected}",
            r.observed_max.map(|v| v.to_string())
        );
        ensure!(t < Duration::from_secs(1), "n={n} took {:.2}s", t.as_secs_f64());
        notes.push(format!("n={n} max {expected}"));
    }
    Ok(notes.join(", "))
}

/// The criterion-2 sweep, shared with criterion 3.
fn sweep() -> Result<Vec<MainVerdict>, String> {
    let weights = ["1/10", "1/2", "1", "2", "10"];
    let mut out = Vec::new();
    for k in 2..=3u32 {
        for l in 2..=3u32 {
            for n in k + l..=k + l + 3 {
                if choose(n, l) > 20 {
                    continue;
                }
                for r in 1..=l {
                    for c in weights {
                        let p = TheoremParams::new(n, k, l, r, q(c)).map_err(|e| e.to_string())?;
                        let v = verify_main_theorem(&p, Mode::Both, &BruteForceOptions::default())
                            .map_err(|e| format!("({n},{k},{l},{r},{c}): {e}"))?;
                        out.push(v);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn main_theorem(verdicts: &Result<Vec<MainVerdict>, String>) -> Check {
    let verdicts = verdicts.as_ref().map_err(Clone::clone)?;
    for v in verdicts {
        let p = &v.params;
        let cell = format!("({},{},{},{},{})", p.n, p.k, p.l, p.r, p.c);
        ensure!(v.falsifications.is_empty(), "{cell}: {} falsifications", v.falsifications.len());
        let brute = v.brute.as_ref().and_then(|r| r.observed_max.clone());
        let scan = v.scan.as_ref().and_then(|r| r.observed_max.clone());
        ensure!(brute.is_some() && brute == scan, "{cell}: engines disagree");
        ensure!(brute.as_ref() == Some(&v.bound.max_value), "{cell}: observed differs from bound");
    }
    Ok(format!("{} cells, engines agree, zero falsifications", verdicts.len()))
}

fn classification(verdicts: &Result<Vec<MainVerdict>, String>) -> Check {
    let verdicts = verdicts.as_ref().map_err(Clone::clone)?;
    let mut totals: BTreeMap<ExtremalCase, u64> = BTreeMap::new();
    for v in verdicts {
        let p = &v.params;
        let allowed: Vec<ExtremalCase> = if p.n > p.k + p.l {
            vec![ExtremalCase::I, ExtremalCase::Ii]
        } else if p.c < Rational::one() {
            vec![ExtremalCase::Iii]
        } else if p.c == Rational::one() {
            vec![ExtremalCase::Iv]
        } else {
            vec![ExtremalCase::V]
        };
        let counts = v.classification_counts();
        ensure!(!counts.is_empty(), "({},{},{},{},{}): no witnesses", p.n, p.k, p.l, p.r, p.c);
        for (case, count) in counts {
            ensure!(
                allowed.contains(&case),
                "({},{},{},{},{}): {count} witnesses classified {case}",
                p.n,
                p.k,
                p.l,
                p.r,
                p.c
            );
            *totals.entry(case).or_insert(0) += count;
        }
    }
    let summary: Vec<String> = totals.iter().map(|(c, n)| format!("{c}:{n}")).collect();
    Ok(format!("witness cases {}", summary.join(" ")))
}

fn shadow_minimum() -> Check {
    let r = verify_proposition_fm(6, 2, 3, 2, &Budget::default()).map_err(|e| e.to_string())?;
    ensure!(r.candidates_examined == 4845, "enumerated {}", r.candidates_examined);
    ensure!(r.min_shadow == 6, "min shadow {}", r.min_shadow);
    ensure!(r.minimizer_count == 15 && r.minimizers_are_stars, "{} minimizers", r.minimizer_count);
    ensure!(r.passed, "report failed");
    Ok("4845 families, min 6, 15 minimizers {B ⊇ R}".into())
}

fn bipartite() -> Check {
    let mut checked = 0;
    let mut skipped = 0;
    for n in 2..=7u32 {
        for k in 1..n {
            for l in 1..=n - k {
                for s in 2..=k.min(l) {
                    // |X| = C(n-s, k-1), |Y| = C(n-s, l-s+1).
                    if choose(n - s, k - 1) + choose(n - s, l - s + 1) > 26 {
                        skipped += 1;
                        continue;
                    }
                    for c in ["1/2", "1", "2"] {
                        let r = verify_bipartite_lemma(n, k, l, s, &q(c), &Budget::default())
                            .map_err(|e| format!("({n},{k},{l},{s},{c}): {e}"))?;
                        ensure!(r.passed, "({n},{k},{l},{s},{c}) failed");
                        checked += 1;
                    }
                }
            }
        }
    }
    ensure!(checked > 0, "no instances");
    Ok(format!("{checked} instances pass, {skipped} shapes over the vertex budget"))
}

fn inequalities() -> Check {
    let r = scan_inequalities(40).map_err(|e| e.to_string())?;
    ensure!(r.violations.is_empty(), "{} violations", r.violations.len());
    ensure!(r.swap_equality_locus_is_n_eq_k_plus_l, "swap equality outside n = k + l");
    ensure!(r.passed(), "report failed");
    Ok(format!(
        "{} + {} + {} checks, zero violations, swap tight exactly at n = k + l",
        r.star_sum_checked, r.swap_checked, r.termwise_checked
    ))
}

fn corollary() -> Check {
    let budget = Budget::default();
    for (n, k, t) in [(4, 2, 2), (6, 2, 3), (10, 2, 2)] {
        let v = verify_corollary(n, k, t, CorollaryMode::Construction, &budget).map_err(|e| e.to_string())?;
        let winner = &v.bound.argmax_labels;
        let attained = v
            .constructions
            .iter()
            .any(|c| winner.contains(&c.branch) && c.cross_intersecting && c.sum == v.bound.max_value);
        ensure!(v.passed && attained, "({n},{k},{t}): winning branch not attained");
    }
    let ex = verify_corollary(4, 2, 2, CorollaryMode::Exhaustive, &budget).map_err(|e| e.to_string())?;
    ensure!(ex.observed == Some(Rational::from(6u64)) && ex.passed, "exhaustive (4,2,2) max {:?}", ex.observed);
    let mut specialized = 0;
    for (n, k, t) in [(4, 2, 2), (6, 2, 3), (10, 2, 2), (7, 3, 2), (8, 3, 4), (9, 2, 5)] {
        let cor = corollary_bound(n, k, t).map_err(|e| e.to_string())?;
        let p = TheoremParams::new(n, k, k, k, Rational::from((t - 1) as u64)).map_err(|e| e.to_string())?;
        ensure!(main_bound(&p).max_value == cor.max_value, "({n},{k},{t}): specialization differs");
        specialized += 1;
    }
    Ok(format!("3 constructions attain, exhaustive (4,2,2) = 6, {specialized} specializations agree"))
}

fn fk_consistency() -> Check {
    let mut compared = 0;
    for n in 1..=30u32 {
        for k in 1..=n {
            if let (Ok(a), Ok(b)) = (fk_bound(n, k, 1), hm_bound(n, k)) {
                ensure!(a == b, "({n},{k}): fk {a} vs hm {b}");
                compared += 1;
            }
        }
    }
    ensure!(compared > 0, "no valid pairs");
    let inst = ProblemInstance::new(ProblemId::Three, 7, vec![3, 3], 2).map_err(|e| e.to_string())?;
    let o = exhaustive_search(&inst, &Budget::default()).map_err(|e| e.to_string())?;
    let fk = fk_bound(7, 3, 2).map_err(|e| e.to_string())?;
    ensure!(o.status == SearchStatus::Consistent, "search status {}", o.status);
    ensure!(
        o.best_found == Some(Rational::from(fk.clone())) && fk == 14u32.into(),
        "search max {:?}, fk {fk}",
        o.best_found.map(|v| v.to_string())
    );
    Ok(format!("fk = hm on {compared} pairs; cross-2 search at (7,3,3) max 14 = fk"))
}

fn explore_instance(inst: &ProblemInstance) -> Result<(), String> {
    let label = format!("problem {} n={} sizes={:?} q={}", inst.problem.number(), inst.n, inst.sizes, inst.q);
    let cv = construction_values(inst).map_err(|e| format!("{label}: {e}"))?;
    ensure!(cv.validated && cv.matches_bound, "{label}: constructions do not match the branches");
    let ex = exhaustive_search(inst, &Budget::default()).map_err(|e| format!("{label}: {e}"))?;
    ensure!(ex.status == SearchStatus::Consistent, "{label}: exhaustive {}", ex.status);
    let alt = alternating_maximization(inst, 20, 1).map_err(|e| format!("{label}: {e}"))?;
    ensure!(alt.status == SearchStatus::Consistent, "{label}: alternating {}", alt.status);
    Ok(())
}

fn open_problems() -> Check {
    let mut instances = Vec::new();
    for n in 2..=6u32 {
        for t in 2..=3usize {
            let mut sizes = vec![1u32; t];
            loop {
                if sizes[0] + sizes[1] <= n {
                    instances.push(ProblemInstance::new(ProblemId::One, n, sizes.clone(), 1));
                }
                // Next non-increasing tuple in [1, n]^t.
                let Some(i) = (0..t).rev().find(|&i| sizes[i] < if i == 0 { n } else { sizes[i - 1] }) else {
                    break;
                };
                sizes[i] += 1;
                for s in sizes.iter_mut().skip(i + 1) {
                    *s = 1;
                }
            }
        }
    }
    instances.push(ProblemInstance::new(ProblemId::Two, 7, vec![3, 3], 2));
    instances.push(ProblemInstance::new(ProblemId::Three, 7, vec![3, 3], 2));
    let count = instances.len();
    for inst in instances {
        let inst = inst.map_err(|e: Error| e.to_string())?;
        explore_instance(&inst)?;
    }
    Ok(format!("{count} instances consistent, constructions match both branches"))
}

fn infrastructure() -> Check {
    let mut pairs = 0u64;
    for n in 1..=12u32 {
        for k in 0..=n {
            for rank in 0..choose(n, k) {
                let s = lex_unrank(n, k, rank).map_err(|e| e.to_string())?;
                ensure!(lex_rank(&s) == rank, "({n},{k}) rank {rank} round-trips to {}", lex_rank(&s));
                pairs += 1;
            }
        }
    }
    let seed = 2024;
    let mut kk = Vec::new();
    for (n, k, l) in [(6, 2, 3), (7, 3, 3)] {
        let r = verify_kk_preservation(n, k, l, 1000, seed).map_err(|e| e.to_string())?;
        ensure!(r.passed() && r.passed_trials == 1000, "kk ({n},{k},{l}) {}/1000", r.passed_trials);
        kk.push(format!("({n},{k},{l}) 1000/1000"));
    }
    let bin = env!("CARGO_BIN_EXE_crossint");
    let invoke = |workers: &str| {
        let out = Command::new(bin)
            .args(["--format", "json", "--no-timing", "--workers", workers])
            .args(["explore", "problem3", "-n", "7", "-t", "2", "--sizes", "3,3", "-q", "2"])
            .args(["--restarts", "50", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.success(), "cli exited {:?}", out.status.code());
        Ok::<Vec<u8>, String>(out.stdout)
    };
    let (a, b, c) = (invoke("1")?, invoke("1")?, invoke("4")?);
    ensure!(a == b, "repeated run differs");
    ensure!(a == c, "run with 4 workers differs");
    Ok(format!(
        "{pairs} rank round-trips; kk {} (seed {seed}); JSON byte-identical across reruns and worker counts",
        kk.join(", ")
    ))
}

fn main() {
    let mut results = Vec::new();
    results.push(run(1, "HM by brute force", Some(Duration::from_secs(2)), hm_pairs));
    let start = Instant::now();
    let verdicts = sweep();
    let sweep_time = start.elapsed();
    results.push(run(2, "weighted bound sweep", None, || {
        ensure!(sweep_time <= Duration::from_secs(600), "sweep took {:.0}s, limit 600s", sweep_time.as_secs_f64());
        main_theorem(&verdicts).map(|d| format!("{d}, sweep {:.2}s", sweep_time.as_secs_f64()))
    }));
    let over = sweep_time > Duration::from_secs(600);
    results.push(run(3, "extremal classification", None, || {
        ensure!(!over, "sweep over its time limit");
        classification(&verdicts)
    }));
    results.push(run(4, "shadow minimum", Some(Duration::from_secs(5)), shadow_minimum));
    results.push(run(5, "bipartite independence", Some(Duration::from_secs(60)), bipartite));
    results.push(run(6, "binomial inequalities", Some(Duration::from_secs(5)), inequalities));
    results.push(run(7, "t-family corollary", None, corollary));
    results.push(run(8, "cross-q consistency", Some(Duration::from_secs(120)), fk_consistency));
    results.push(run(9, "open problems", None, open_problems));
    results.push(run(10, "infrastructure", None, infrastructure));
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
