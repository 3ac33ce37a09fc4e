//! `betaspace`: series evaluation, axiom and uniformity checks, property
//! suites, Cauchy limits and the contraction solver.

mod sequence;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use betaspace::beta::{
    check_axioms, field_metric_space, AxiomReport, BetaError, FiniteBetaSpace, LaurentLine,
    RationalLine,
};
use betaspace::laurent::{eval_expression, LimitError};
use betaspace::level::{
    certify_contraction, cmt_solve, product_space, AffineMap, LevelError, SolveOptions,
};
use betaspace::props::{run_suite, Suite, SuiteConfig};
use betaspace::rational::{int, rat};
use betaspace::uniformity::{beta_to_uniformity, roundtrip_check, BridgeError};
use betaspace::{PrecisionBudget, SeriesError, SeriesVector};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(
    name = "betaspace",
    version,
    about = "Beta-spaces over exact formal Laurent series"
)]
struct Cli {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Highest exponent materialized and compared.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(i64).range(1..))]
    horizon: i64,
    /// Coefficients scanned when searching for a leading term.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    /// Samples per sampled check.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a series expression and print it to the horizon.
    Eval { expression: String },
    /// Check axioms 1-4 on a builtin space or a space file.
    Axioms {
        /// `laurent`, `rational`, `two-point`, `discrete`, `indiscrete` or a JSON space file.
        space: String,
    },
    /// Build the uniformity of a finite space, optionally round-tripping it.
    Uniform {
        space: String,
        #[arg(long)]
        roundtrip: bool,
    },
    /// Solve `y = a·y + b` by level descent.
    FixedPoint {
        /// `affine a=<series> b=<series>`; use `[e1; e2]` for vectors.
        map: String,
        /// Starting point, one expression per component separated by `;`.
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 256)]
        stages: usize,
    },
    /// Run a seeded property suite.
    Props { suite: String },
    /// Limit of a listed sequence: Cauchy limit, or r-limit when the file names a radius.
    Limit { file: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Refused(String),
    #[error("{0}")]
    Undecidable(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Refused(_) => 1,
            CliError::Input(_) => 2,
            CliError::Undecidable(_) => 3,
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Undecidable { .. } | SeriesError::ZeroDivisor { provable: false } => {
                CliError::Undecidable(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<BetaError> for CliError {
    fn from(e: BetaError) -> Self {
        match e {
            BetaError::Series(s) => s.into(),
            BetaError::Malformed(_) | BetaError::CarrierTooLarge { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Refused(e.to_string()),
        }
    }
}

impl From<BridgeError> for CliError {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::Beta(b) => b.into(),
            BridgeError::Malformed(_) => CliError::Input(e.to_string()),
            _ => CliError::Refused(e.to_string()),
        }
    }
}

impl From<LimitError> for CliError {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::Series(s) => s.into(),
            _ => CliError::Refused(e.to_string()),
        }
    }
}

impl From<LevelError> for CliError {
    fn from(e: LevelError) -> Self {
        if e.is_budget() {
            return CliError::Undecidable(e.to_string());
        }
        match e {
            LevelError::Malformed(_) | LevelError::Arity { .. } => CliError::Input(e.to_string()),
            LevelError::Beta(b) => b.into(),
            LevelError::Limit(l) => l.into(),
            _ => CliError::Refused(e.to_string()),
        }
    }
}

/// Report text or JSON plus the exit code it implies.
struct Output {
    text: String,
    structured: serde_json::Value,
    code: u8,
}

impl Output {
    fn new<T: Serialize>(text: String, value: &T, pass: bool) -> Self {
        Self {
            text,
            structured: serde_json::to_value(value).expect("reports serialize"),
            code: if pass { 0 } else { 1 },
        }
    }
}

fn budget(cli: &Cli) -> PrecisionBudget {
    PrecisionBudget::new(cli.horizon, cli.depth as usize)
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(Path::new(path)).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn finite_space(name: &str) -> Result<FiniteBetaSpace, CliError> {
    Ok(match name {
        "two-point" => FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]),
        "discrete" => FiniteBetaSpace::discrete(3),
        "indiscrete" => FiniteBetaSpace::indiscrete(2),
        path => FiniteBetaSpace::from_json(&read(path)?)?,
    })
}

fn axiom_output(report: AxiomReport) -> Output {
    let pass = report.all_hold();
    Output::new(report.to_text(), &report, pass)
}

fn eval(cli: &Cli, expression: &str) -> Result<Output, CliError> {
    let b = budget(cli);
    let value = eval_expression(expression, &b)?.normalized(&b)?;
    let shown = value.display(b.horizon).to_string();
    let structured = json!({ "expression": expression, "horizon": b.horizon, "value": shown });
    Ok(Output::new(format!("{shown}\n"), &structured, true))
}

fn axioms(cli: &Cli, space: &str) -> Result<Output, CliError> {
    let b = budget(cli);
    let samples = cli.samples as usize;
    Ok(match space {
        "laurent" => axiom_output(check_axioms(
            &field_metric_space(LaurentLine, b)?,
            samples,
            cli.seed,
        )),
        "rational" => axiom_output(check_axioms(
            &field_metric_space(RationalLine, b)?,
            samples,
            cli.seed,
        )),
        other => axiom_output(check_axioms(&finite_space(other)?, samples, cli.seed)),
    })
}

fn uniform(space: &str, roundtrip: bool) -> Result<Output, CliError> {
    let space = finite_space(space)?;
    if roundtrip {
        let rt = roundtrip_check(&space)?;
        let mut text = format!(
            "round trip {}: topology {}, ball families {}, {} generators, {} radii after\n",
            if rt.passed() { "passes" } else { "fails" },
            if rt.topology_equal { "equal" } else { "differ" },
            if rt.ball_families_equal {
                "equal"
            } else {
                "differ"
            },
            rt.generators,
            rt.radii_after
        );
        if let Some(m) = &rt.mismatch {
            text += &format!("mismatch: {m}\n");
        }
        let pass = rt.passed();
        return Ok(Output::new(text, &rt, pass));
    }
    let u = beta_to_uniformity(&space)?;
    let report = u.check();
    let pass = report.all_hold();
    let file = u.to_file();
    let text = format!(
        "{} points, {} generators; uniformity axioms {}\n",
        file.points.len(),
        file.generators.len(),
        if pass { "hold" } else { "fail" }
    );
    Ok(Output::new(
        text,
        &json!({ "uniformity": file, "report": report }),
        pass,
    ))
}

fn parse_point(text: &str, arity: usize, b: &PrecisionBudget) -> Result<SeriesVector, CliError> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let parts = inner
        .split(';')
        .map(|e| eval_expression(e, b))
        .collect::<Result<Vec<_>, _>>()?;
    if parts.len() != arity {
        return Err(CliError::Input(format!(
            "starting point has {} components, the map expects {arity}",
            parts.len()
        )));
    }
    Ok(SeriesVector::new(parts))
}

fn fixed_point(cli: &Cli, map: &str, x0: Option<&str>, stages: usize) -> Result<Output, CliError> {
    let b = budget(cli);
    let map = AffineMap::parse(map, &b)?;
    let arity = map.a().len();
    let x0 = match x0 {
        Some(text) => parse_point(text, arity, &b)?,
        None => SeriesVector::zeros(arity),
    };
    let cert = certify_contraction(map, &b)?;
    let space = product_space(arity, b)?;
    let options = SolveOptions {
        stage_budget: stages,
        ..SolveOptions::default()
    };
    let result = cmt_solve(&space, &cert, &x0, &options)?;
    let pass =
        result.residual_valuation.exceeds(b.horizon) && result.closed_form_agrees != Some(false);
    Ok(Output::new(result.to_text(), &result.summary(), pass))
}

fn props(cli: &Cli, suite: &str) -> Result<Output, CliError> {
    let suite: Suite = suite
        .parse()
        .map_err(|e: betaspace::props::UnknownSuite| CliError::Input(e.to_string()))?;
    let report = run_suite(
        suite,
        &SuiteConfig {
            seed: cli.seed,
            samples: cli.samples as usize,
            budget: budget(cli),
        },
    );
    let pass = report.clean();
    Ok(Output::new(report.to_text(), &report, pass))
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Eval { expression } => eval(cli, expression),
        Command::Axioms { space } => axioms(cli, space),
        Command::Uniform { space, roundtrip } => uniform(space, *roundtrip),
        Command::FixedPoint { map, x0, stages } => fixed_point(cli, map, x0.as_deref(), *stages),
        Command::Props { suite } => props(cli, suite),
        Command::Limit { file } => sequence::limit(&read(file)?, &budget(cli)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Structured => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.structured).expect("json values serialize")
                ),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Structured => println!(
                    "{}",
                    json!({ "error": e.to_string(), "exit_code": e.code() })
                ),
            }
            ExitCode::from(e.code())
        }
    }
}
