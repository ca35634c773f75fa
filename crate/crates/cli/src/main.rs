//! Batch front end for the qfock library: Q-function computation, the
//! Virasoro action in both realizations, exhaustive verification suites, and
//! the Hirota conjecture probe. Output is deterministic JSON or text;
//! identical invocations produce byte-identical output regardless of the
//! parallelism width.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or operational
//! error.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use qfock::hirota::{probe_record, ProbeReport, NORMALIZATION_NOTE};
use qfock::partitions::{strict_partitions_of, IndexSequence, PartFilter, StrictPartition};
use qfock::polyring::OddPolynomial;
use qfock::qcalc::{
    check_append_expansion, check_quadratic_t_identity, check_quadratic_relation, expand_in_q, q, q_lambda, q_norm_sq,
    q_of_sequence, AppendCase, QExpansion,
};
use qfock::rat::{frac, parse_rat, rat, Rat};
use qfock::virasoro::{
    act_closed_lower, act_closed_raise, act_diff, check_contravariance, check_even_invariance,
    check_product_rule, check_virasoro_bracket, matrix_of_l,
};
use qfock::Monomial;

#[derive(Parser)]
#[command(name = "qfock", version, about = "Exact Q-function calculus with the Virasoro action")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps; any width yields identical output
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Diff,
    Closed,
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Quadratic relations, appended-index identities, the quadratic
    /// t-identity, the q_n lowering formulas, and the product rules
    Identities,
    /// The Virasoro bracket with its central term, as exact matrices
    Bracket,
    /// Orthogonality, contravariance, and the L_0 eigenvalue
    Gram,
    /// Invariance of the even-parts span under L_(-1), L_0, L_1
    Even,
}

#[derive(Subcommand)]
enum Command {
    /// Print the polynomial Q of an index sequence (straightened)
    Qfun {
        /// Non-negative indices, e.g. `3 1` or `0 2 3 0 1`
        #[arg(allow_negative_numbers = true)]
        indices: Vec<i64>,
    },
    /// Apply L_k to Q_lambda and print the Q-expansion
    Act {
        /// Virasoro index (any sign)
        #[arg(allow_negative_numbers = true)]
        k: i32,
        /// Parts of a strict partition, decreasing
        parts: Vec<u32>,
        /// Which realization to use; `both` exits nonzero on disagreement
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// The exact matrix of L_k from V(n) to V(n-2k)
    Matrix {
        #[arg(allow_negative_numbers = true)]
        k: i32,
        n: u32,
    },
    /// Run a verification suite exhaustively within bounds
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Size/budget bound for the identities suite
        #[arg(long, default_value_t = 9)]
        max: u32,
        /// Largest degree n for the bracket, gram, and even suites
        #[arg(long, default_value_t = 8)]
        n: u32,
        /// Largest |k| for the bracket and gram suites
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// Sweep Q_lambda(D~) tau.tau over all strict lambda up to a weight
    Probe {
        /// Soliton parameters `p` or `p:c`, comma separated, or `none`
        #[arg(long, default_value = "none")]
        solitons: String,
        /// Largest partition weight to probe
        #[arg(long, default_value_t = 8)]
        max: u32,
        /// Odd truncation index for the tau support (default: smallest odd
        /// index covering `max`)
        #[arg(long)]
        support: Option<u32>,
    },
}

enum Outcome {
    Success,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    if cli.parallel == 0 {
        bail!("--parallel must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.parallel)
        .build()
        .context("building the worker pool")?;

    match &cli.command {
        Command::Qfun { indices } => cmd_qfun(cli, indices),
        Command::Act { k, parts, method } => cmd_act(cli, *k, parts, *method),
        Command::Matrix { k, n } => cmd_matrix(cli, *k, *n),
        Command::Verify { suite, max, n, kmax } => {
            pool.install(|| cmd_verify(cli, *suite, *max, *n, *kmax))
        }
        Command::Probe {
            solitons,
            max,
            support,
        } => pool.install(|| cmd_probe(cli, solitons, *max, *support)),
    }
}

fn emit(cli: &Cli, json: serde_json::Value, text: String) -> Result<()> {
    let content = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json)?;
            s.push('\n');
            s
        }
        Format::Text => text,
    };
    match &cli.out {
        None => print!("{content}"),
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
    }
    Ok(())
}

fn cmd_qfun(cli: &Cli, indices: &[i64]) -> Result<Outcome> {
    let seq = IndexSequence::new(indices.to_vec());
    let poly = q_of_sequence(&seq).map_err(|e| anyhow!("{e}"))?;
    emit(cli, poly.to_json(), format!("{poly}\n"))?;
    Ok(Outcome::Success)
}

fn parse_partition(parts: &[u32]) -> Result<StrictPartition> {
    StrictPartition::new(parts.to_vec()).map_err(|e| anyhow!("{e}"))
}

fn act_closed(k: i32, lambda: &StrictPartition) -> QExpansion {
    match k.cmp(&0) {
        std::cmp::Ordering::Greater => {
            act_closed_raise(k as u32, &QExpansion::single(lambda.clone(), rat(1)))
        }
        std::cmp::Ordering::Less => {
            act_closed_lower((-k) as u32, &QExpansion::single(lambda.clone(), rat(1)))
        }
        std::cmp::Ordering::Equal => {
            QExpansion::single(lambda.clone(), rat(lambda.size() as i64) + frac(1, 8))
        }
    }
}

fn cmd_act(cli: &Cli, k: i32, parts: &[u32], method: Method) -> Result<Outcome> {
    let lambda = parse_partition(parts)?;
    let lambda_json = lambda.to_json();
    match method {
        Method::Closed | Method::Diff => {
            let e = if method == Method::Closed {
                act_closed(k, &lambda)
            } else {
                expand_in_q(&act_diff(k, &q_lambda(&lambda)))
            };
            let name = if method == Method::Closed { "closed" } else { "diff" };
            emit(
                cli,
                serde_json::json!({
                    "k": k,
                    "lambda": lambda_json,
                    "method": name,
                    "expansion": e.to_json(),
                }),
                format!("L_{k} Q{lambda} = {e}\n"),
            )?;
            Ok(Outcome::Success)
        }
        Method::Both => {
            let closed = act_closed(k, &lambda);
            let diff = expand_in_q(&act_diff(k, &q_lambda(&lambda)));
            let agree = closed == diff;
            emit(
                cli,
                serde_json::json!({
                    "k": k,
                    "lambda": lambda_json,
                    "method": "both",
                    "closed": closed.to_json(),
                    "diff": diff.to_json(),
                    "agree": agree,
                }),
                format!(
                    "closed: {closed}\ndiff:   {diff}\nagree: {agree}\n"
                ),
            )?;
            if agree {
                Ok(Outcome::Success)
            } else {
                Ok(Outcome::VerificationFailed)
            }
        }
    }
}

fn cmd_matrix(cli: &Cli, k: i32, n: u32) -> Result<Outcome> {
    let m = matrix_of_l(k, n);
    emit(cli, m.to_json(), m.to_string())?;
    Ok(Outcome::Success)
}

type Check = (String, Box<dyn Fn() -> bool + Send + Sync>);

fn run_checks(checks: Vec<Check>) -> (usize, Vec<String>) {
    let failures: Vec<String> = checks
        .par_iter()
        .filter_map(|(name, f)| if f() { None } else { Some(name.clone()) })
        .collect();
    (checks.len(), failures)
}

fn identities_suite(max: u32) -> (usize, Vec<String>) {
    let mut checks: Vec<Check> = Vec::new();

    for n in 0..=max {
        for lambda in strict_partitions_of(n, PartFilter::All) {
            checks.push((
                format!("quadratic relation at {lambda}"),
                Box::new(move || check_quadratic_relation(&lambda)),
            ));
        }
    }

    for n in 1..=max {
        for alpha_partition in strict_partitions_of(n, PartFilter::All) {
            let odd = alpha_partition.len() % 2 == 1;
            let budget = max - n;
            for x in 0..=budget {
                let alpha = IndexSequence::from(&alpha_partition);
                let case = if odd { AppendCase::SingleOdd } else { AppendCase::SingleEven };
                checks.push((
                    format!("single-append identity at alpha={alpha_partition}, x={x}"),
                    Box::new(move || check_append_expansion(case, &alpha, x, 0).unwrap()),
                ));
                for y in 0..=(budget - x) {
                    let alpha = IndexSequence::from(&alpha_partition);
                    let case = if odd { AppendCase::DoubleOdd } else { AppendCase::DoubleEven };
                    checks.push((
                        format!(
                            "double-append identity at alpha={alpha_partition}, x={x}, y={y}"
                        ),
                        Box::new(move || check_append_expansion(case, &alpha, x, y).unwrap()),
                    ));
                }
            }
        }
    }

    for m in 1..=(max / 2).max(1) {
        checks.push((
            format!("quadratic t-identity at m={m}"),
            Box::new(move || check_quadratic_t_identity(m)),
        ));
    }

    for n in 0..=max {
        checks.push((
            format!("q_n lowering formula (k=1) at n={n}"),
            Box::new(move || {
                let rhs = &q(n + 2).scale(&rat(n as i64 + 1))
                    + &q_of_sequence(&IndexSequence::new(vec![n as i64, 2]))
                        .unwrap()
                        .scale(&frac(1, 2));
                act_diff(-1, &q(n)) == rhs
            }),
        ));
        checks.push((
            format!("q_n lowering formula (k=2) at n={n}"),
            Box::new(move || {
                let rhs = &(&q(n + 4).scale(&rat(n as i64 + 2))
                    + &q_of_sequence(&IndexSequence::new(vec![n as i64, 4])).unwrap())
                    - &q_of_sequence(&IndexSequence::new(vec![n as i64, 3, 1]))
                        .unwrap()
                        .scale(&frac(1, 2));
                act_diff(-2, &q(n)) == rhs
            }),
        ));
    }

    for k in 1..=3u32 {
        for seed in 0..4u64 {
            checks.push((
                format!("product rule at k={k}, seed={seed}"),
                Box::new(move || {
                    let v = OddPolynomial::sample(2 * seed + 1, 4);
                    let w = OddPolynomial::sample(1000 + 3 * seed, 4);
                    check_product_rule(k, &v, &w)
                }),
            ));
        }
    }

    checks.push((
        "degree-4 bilinear operator coefficients".to_string(),
        Box::new(|| {
            let h = qfock::to_hirota(&StrictPartition::new(vec![3, 1]).unwrap());
            let mut ok = true;
            let mut seen = 0;
            for (m, c) in h.d_coefficients() {
                seen += 1;
                if m == Monomial::from_exponents([(1, 4)]) {
                    ok &= c == frac(1, 12);
                } else if m == Monomial::from_exponents([(1, 1), (3, 1)]) {
                    ok &= c == frac(-1, 3);
                } else {
                    ok = false;
                }
            }
            ok && seen == 2
        }),
    ));

    run_checks(checks)
}

fn bracket_suite(n_max: u32, kmax: u32) -> (usize, Vec<String>) {
    let kmax = kmax as i32;
    let mut checks: Vec<Check> = Vec::new();
    for n in 0..=n_max {
        for k in -kmax..=kmax {
            for l in -kmax..=kmax {
                checks.push((
                    format!("bracket identity at k={k}, l={l}, n={n}"),
                    Box::new(move || check_virasoro_bracket(k, l, n)),
                ));
            }
        }
    }
    run_checks(checks)
}

fn gram_suite(n_max: u32, kmax: u32) -> (usize, Vec<String>) {
    let mut checks: Vec<Check> = Vec::new();
    for n in 0..=n_max {
        checks.push((
            format!("orthogonality on degree {n}"),
            Box::new(move || {
                let basis = strict_partitions_of(n, PartFilter::All);
                for (i, l1) in basis.iter().enumerate() {
                    if q_norm_sq(l1) == rat(0) {
                        return false;
                    }
                    for l2 in &basis[i + 1..] {
                        if q_lambda(l1).inner_product(&q_lambda(l2)) != rat(0) {
                            return false;
                        }
                    }
                }
                true
            }),
        ));
        for k in 1..=kmax {
            checks.push((
                format!("contravariance at k={k}, n={n}"),
                Box::new(move || check_contravariance(k, n)),
            ));
        }
        checks.push((
            format!("L_0 eigenvalue on degree {n}"),
            Box::new(move || {
                strict_partitions_of(n, PartFilter::All).iter().all(|l| {
                    let p = q_lambda(l);
                    act_diff(0, &p) == p.scale(&(rat(n as i64) + frac(1, 8)))
                })
            }),
        ));
    }
    run_checks(checks)
}

fn even_suite(n_max: u32) -> (usize, Vec<String>) {
    let mut checks: Vec<Check> = Vec::new();
    for n in 0..=n_max {
        checks.push((
            format!("even-parts span invariance at n={n}"),
            Box::new(move || check_even_invariance(n)),
        ));
    }
    run_checks(checks)
}

fn cmd_verify(cli: &Cli, suite: Suite, max: u32, n: u32, kmax: u32) -> Result<Outcome> {
    let (name, bounds, (checks, failures)) = match suite {
        Suite::Identities => (
            "identities",
            serde_json::json!({ "max": max }),
            identities_suite(max),
        ),
        Suite::Bracket => (
            "bracket",
            serde_json::json!({ "n": n, "kmax": kmax }),
            bracket_suite(n, kmax),
        ),
        Suite::Gram => (
            "gram",
            serde_json::json!({ "n": n, "kmax": kmax }),
            gram_suite(n, kmax),
        ),
        Suite::Even => ("even", serde_json::json!({ "n": n }), even_suite(n)),
    };

    let mut text = format!(
        "suite {name}: {checks} checks, {} failures\n",
        failures.len()
    );
    for f in &failures {
        let _ = writeln!(text, "FAIL {f}");
    }
    emit(
        cli,
        serde_json::json!({
            "suite": name,
            "bounds": bounds,
            "checks": checks,
            "failures": failures,
        }),
        text,
    )?;
    if failures.is_empty() {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::VerificationFailed)
    }
}

fn parse_solitons(raw: &str) -> Result<Vec<(Rat, Rat)>> {
    let raw = raw.trim();
    if raw.is_empty() || raw == "none" {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|item| {
            let (p_str, c_str) = match item.split_once(':') {
                Some((p, c)) => (p, c),
                None => (item, "1"),
            };
            let p = parse_rat(p_str)
                .ok_or_else(|| anyhow!("malformed soliton parameter {p_str:?}"))?;
            let c = parse_rat(c_str)
                .ok_or_else(|| anyhow!("malformed soliton amplitude {c_str:?}"))?;
            Ok((p, c))
        })
        .collect()
}

fn cmd_probe(cli: &Cli, solitons: &str, max: u32, support: Option<u32>) -> Result<Outcome> {
    let params = parse_solitons(solitons)?;
    let support = support.unwrap_or(if max % 2 == 1 { max.max(1) } else { max + 1 });
    let tau = qfock::kdv_tau(&params, support).map_err(|e| anyhow!("{e}"))?;

    if !tau.is_constant() && tau.support_bound() < max {
        bail!(
            "tau support stops at t_{} but the probe needs t_{max}",
            tau.support_bound()
        );
    }
    let lambdas: Vec<StrictPartition> = (1..=max)
        .flat_map(|w| strict_partitions_of(w, PartFilter::All))
        .collect();
    let records: Vec<_> = lambdas
        .par_iter()
        .map(|lambda| probe_record(&tau, lambda))
        .collect();
    let normalization_note = if records.iter().any(|r| !r.in_esp && !r.is_zero) {
        Some(NORMALIZATION_NOTE.to_string())
    } else {
        None
    };
    let report = ProbeReport {
        max_weight: max,
        oracle_validated: qfock::validate_kdv_tau(&tau),
        records,
        normalization_note,
    };
    emit(cli, report.to_json(), report.to_string())?;
    Ok(Outcome::Success)
}
