//! `tabula`: integrate by parts from the command line, run the worked
//! examples, check Taylor and asymptotic identities, or serve sessions.
//!
//! Exit codes: 0 success, 2 bad input, 3 no derivation found, 4 a check
//! failed.

use std::net::{IpAddr, SocketAddr};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tabula::calculus::{RuleName, RuleTable};
use tabula::ibp::{auto_integrate_with, verify, AutoError, IntegralProblem, Policy, Split};
use tabula::showcase::{asymptotic_identity_check, run_examples, taylor};
use tabula::{parse, render, Expr, Format, ParseError, Rational, Symbol};
use tabula_service::{serve, Store, DEFAULT_PORT};

const BAD_INPUT: u8 = 2;
const EXHAUSTED: u8 = 3;
const CHECK_FAILED: u8 = 4;

/// Numeric checks pass below this absolute error.
const CHECK_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "tabula", version, about = "Tabular integration by parts")]
struct Cli {
    /// Output notation for expressions.
    #[arg(long, global = true, default_value = "ascii")]
    format: Format,
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find an antiderivative and verify it.
    Integrate(IntegrateArgs),
    /// Run every worked example and print one PASS/FAIL line each.
    Examples {
        /// Doubles the output of one base rule, to see checks fail.
        #[arg(long, hide = true)]
        fault: Option<String>,
    },
    /// Taylor's formula with integral remainder, built from a table.
    Taylor {
        /// The function, in `t` (or in `x`, which is renamed to `t`).
        function: String,
        /// Center of the expansion.
        center: String,
        /// Order of the polynomial.
        order: usize,
        /// Check the identity numerically at these points.
        #[arg(long = "at", num_args = 1..)]
        at: Vec<f64>,
    },
    /// The exact finite identity behind the expansion of ∫_x^∞ e^(x-t)/t dt.
    Asymptotic { x: f64, n: usize },
    /// Serve the JSON session API.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Append each session's actions to `<dir>/<id>.jsonl`.
        #[arg(long)]
        log_dir: Option<std::path::PathBuf>,
    },
}

#[derive(Args)]
struct IntegrateArgs {
    /// The integrand, e.g. "x^2*exp(x)".
    integrand: String,
    #[arg(long, default_value = "x")]
    var: String,
    /// Try this u first; dv is the integrand over u unless given.
    #[arg(long)]
    u: Option<String>,
    /// Try this dv first; u is the integrand over dv unless given.
    #[arg(long)]
    dv: Option<String>,
    /// Only try the given split, and give up on a harder residual.
    #[arg(long)]
    no_retry: bool,
    /// Print every table, including abandoned ones.
    #[arg(long)]
    trace: bool,
}

struct Failure {
    code: u8,
    message: String,
    span: Option<tabula::SourceSpan>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
            span: None,
        }
    }

    fn parse(input: &str, e: ParseError) -> Failure {
        let caret = format!("{}{}", " ".repeat(e.span.start), "^".repeat((e.span.end - e.span.start).max(1)));
        Failure {
            code: BAD_INPUT,
            message: format!("{}\n  {input}\n  {caret}", e.message),
            span: Some(e.span),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(text: &str) -> Result<Expr, Failure> {
    parse(text).map_err(|e| Failure::parse(text, e))
}

fn emit(cli: &Cli, text: String, value: serde_json::Value) {
    if cli.json {
        println!("{value}");
    } else {
        print!("{text}");
    }
}

fn integrate(cli: &Cli, args: &IntegrateArgs) -> Outcome {
    let f = read(&args.integrand)?;
    let problem = IntegralProblem::new(f.clone(), args.var.as_str());
    let split = match (&args.u, &args.dv) {
        (None, None) => None,
        (Some(u), None) => {
            let u = read(u)?;
            Some(Split::new(u.clone(), &f / &u))
        }
        (None, Some(dv)) => {
            let dv = read(dv)?;
            Some(Split::new(&f / &dv, dv))
        }
        (Some(u), Some(dv)) => Some(Split::new(read(u)?, read(dv)?)),
    };
    let mut policy = Policy::default();
    if args.no_retry {
        policy.split_attempts = Some(1);
        policy.retry_harder = false;
    }
    let trace = match auto_integrate_with(&problem, &policy, split.as_ref()) {
        Ok(t) => t,
        Err(AutoError::InvalidSplit(e)) => return Err(Failure::new(BAD_INPUT, e.to_string())),
        Err(AutoError::Exhausted { attempts }) => {
            let mut message = format!("no derivation found for {}", render(&f, cli.format));
            if args.trace {
                for a in &attempts {
                    message.push('\n');
                    message.push_str(a.render(cli.format).trim_end());
                }
            }
            return Err(Failure::new(EXHAUSTED, message));
        }
    };
    let report = verify(&trace);
    let result = trace.render_result(cli.format);
    let mut text = String::new();
    if args.trace {
        text.push_str(&trace.render_trace(cli.format));
    }
    text.push_str(&result);
    text.push('\n');
    let value = json!({
        "integrand": render(&f, Format::Ascii),
        "var": args.var,
        "antiderivative": render(&trace.antiderivative, Format::Ascii),
        "result": result,
        "verification": report,
        "trace": args.trace.then(|| trace.render_trace(cli.format)),
    });
    emit(cli, text, value);
    if report.passed {
        Ok(())
    } else {
        Err(Failure::new(CHECK_FAILED, "the antiderivative failed verification"))
    }
}

fn examples(cli: &Cli, fault: Option<&str>) -> Outcome {
    let rules = match fault {
        None => RuleTable::standard(),
        Some(name) => {
            let rule = RuleName::ALL
                .into_iter()
                .find(|r| r.as_str() == name)
                .ok_or_else(|| Failure::new(BAD_INPUT, format!("unknown rule {name:?}")))?;
            RuleTable::with_fault(rule)
        }
    };
    let items = run_examples(&rules);
    let failed = items.iter().filter(|i| !i.passed).count();
    let text: String = items.iter().map(|i| format!("{i}\n")).collect();
    emit(cli, text, json!({ "items": items, "failed": failed }));
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::new(CHECK_FAILED, format!("{failed} of {} items failed", items.len())))
    }
}

fn taylor_cmd(cli: &Cli, function: &str, center: &str, order: usize, at: &[f64]) -> Outcome {
    let mut f = read(function)?;
    let (t, x) = (Symbol::new("t"), Symbol::new("x"));
    if !f.free_of(&x) && f.free_of(&t) {
        f = f.substitute(&x, &Expr::symbol(&t));
    }
    let a: Rational = center
        .parse()
        .map_err(|_| Failure::new(BAD_INPUT, format!("{center:?} is not a rational number")))?;
    let result = taylor(&f, &a, order).map_err(|e| Failure::new(BAD_INPUT, e.to_string()))?;
    let mut text = format!(
        "polynomial: {}\nremainder: integral from {} to x of {} dt\n",
        render(&result.polynomial, cli.format),
        a,
        render(&result.remainder_integrand, cli.format)
    );
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for &xv in at {
        let err = result.check(xv).map_err(|e| Failure::new(CHECK_FAILED, e.to_string()))?;
        worst = worst.max(err);
        text.push_str(&format!("x = {xv}: error {err:.3e}\n"));
        checks.push(json!({ "x": xv, "error": err }));
    }
    let value = json!({
        "polynomial": render(&result.polynomial, Format::Ascii),
        "remainder_integrand": render(&result.remainder_integrand, Format::Ascii),
        "checks": checks,
    });
    emit(cli, text, value);
    if worst < CHECK_TOL {
        Ok(())
    } else {
        Err(Failure::new(CHECK_FAILED, format!("error {worst:e} exceeds {CHECK_TOL:e}")))
    }
}

fn asymptotic_cmd(cli: &Cli, x: f64, n: usize) -> Outcome {
    let c = asymptotic_identity_check(x, n).map_err(|e| Failure::new(BAD_INPUT, e.to_string()))?;
    let text = format!(
        "integral: {:.15e}\npartial sum: {} = {:.15e}\nremainder: {:.15e}\nerror: {:.3e}\n",
        c.integral,
        render(&c.partial_sum_expr, cli.format),
        c.partial_sum,
        c.remainder,
        c.error
    );
    emit(cli, text, serde_json::to_value(&c).unwrap_or_default());
    if c.error < CHECK_TOL {
        Ok(())
    } else {
        Err(Failure::new(CHECK_FAILED, format!("error {:e} exceeds {CHECK_TOL:e}", c.error)))
    }
}

fn serve_cmd(host: IpAddr, port: u16, log_dir: Option<std::path::PathBuf>) -> Outcome {
    let store = Arc::new(match log_dir {
        Some(dir) => Store::with_log_dir(dir),
        None => Store::new(),
    });
    let addr = SocketAddr::new(host, port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(1, e.to_string()))?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(serve(store, addr))
        .map_err(|e| Failure::new(1, format!("{addr}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Integrate(args) => integrate(&cli, args),
        Command::Examples { fault } => examples(&cli, fault.as_deref()),
        Command::Taylor {
            function,
            center,
            order,
            at,
        } => taylor_cmd(&cli, function, center, *order, at),
        Command::Asymptotic { x, n } => asymptotic_cmd(&cli, *x, *n),
        Command::Serve { host, port, log_dir } => serve_cmd(*host, *port, log_dir.clone()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if cli.json {
                eprintln!("{}", json!({ "code": f.code, "message": f.message, "span": f.span }));
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
