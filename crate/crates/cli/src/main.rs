//! `crossint`: bounds, exhaustive verification and counterexample search for
//! cross-intersecting families.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a verification failed or
//! a counterexample was found, 3 a budget was exhausted.

mod args;
mod run;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use crossint_core::{Budget, Error};
use serde::Serialize;
use serde_json::Value;

use args::{Cli, Format};
use run::{CliError, Report};

/// Everything needed to replay a run. Worker count is left out on purpose:
/// results do not depend on it.
#[derive(Serialize)]
struct RunConfig {
    command: String,
    parameters: Value,
    budget: Budget,
    format: Format,
    rng_seed: Option<u64>,
}

impl RunConfig {
    fn new(cli: &Cli, budget: Budget) -> Self {
        let mut parameters = serde_json::to_value(&cli.command).expect("arguments serialize");
        normalize(&mut parameters);
        RunConfig {
            command: cli.command.name(),
            rng_seed: find_seed(&parameters),
            parameters,
            budget,
            format: cli.global.format,
        }
    }
}

/// Drops unset options and writes weights in canonical `p/q` form.
fn normalize(v: &mut Value) {
    if let Value::Object(m) = v {
        m.retain(|_, x| !x.is_null());
        for (k, x) in m.iter_mut() {
            if k == "c" {
                if let Some(c) = x.as_str().and_then(|s| s.parse::<crossint_core::Rational>().ok()) {
                    *x = Value::String(c.to_string());
                }
            }
            normalize(x);
        }
    }
}

fn find_seed(v: &Value) -> Option<u64> {
    match v {
        Value::Object(m) => m
            .get("seed")
            .and_then(Value::as_u64)
            .or_else(|| m.values().find_map(find_seed)),
        _ => None,
    }
}

fn render(config: &RunConfig, report: &Report, format: Format, wall_ms: Option<u128>) -> String {
    let config_json = serde_json::to_string(config).expect("config serializes");
    match format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
            doc.insert("result".into(), report.result.clone());
            if let Some(ms) = wall_ms {
                doc.insert("wall_time_ms".into(), Value::from(ms as u64));
            }
            let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
            out.push('\n');
            out
        }
        Format::Text => {
            let mut out = format!("# config {config_json}\n{}", report.text);
            if let Some(ms) = wall_ms {
                out.push_str(&format!("# wall_time_ms {ms}\n"));
            }
            out
        }
        Format::Csv => {
            let mut out = format!("# config {config_json}\n");
            match &report.csv {
                Some(t) => {
                    out.push_str(&t.header);
                    out.push('\n');
                    for row in &t.rows {
                        out.push_str(row);
                        out.push('\n');
                    }
                }
                None => {
                    let cells = run::flatten(&report.result);
                    let header: Vec<String> = cells.iter().map(|(k, _)| run::csv_cell(k)).collect();
                    let row: Vec<String> = cells.iter().map(|(_, v)| run::csv_cell(v)).collect();
                    out.push_str(&format!("{}\n{}\n", header.join(","), row.join(",")));
                }
            }
            if let Some(ms) = wall_ms {
                out.push_str(&format!("# wall_time_ms {ms}\n"));
            }
            out
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(w) = cli.global.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let budget = cli.global.budget.map(Budget::with_max_candidates).unwrap_or_default();
    let config = RunConfig::new(&cli, budget);
    let start = Instant::now();
    let report = match run::dispatch(&cli.command, &budget) {
        Ok(r) => r,
        Err(CliError::Core(e @ Error::BudgetExceeded { .. })) => Report::budget(&e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let wall_ms = (!cli.global.no_timing).then(|| start.elapsed().as_millis());
    let out = render(&config, &report, cli.global.format, wall_ms);
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, &out).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(out.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(report.exit.code())
}
