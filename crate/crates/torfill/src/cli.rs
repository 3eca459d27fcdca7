//! Argument handling and command dispatch.

use std::collections::BTreeMap;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{json, Value};
use torfill_core::{
    adapted_basis, best_gamma, bound_constant, check_truncated, complement_measure_estimate, critical_cutoff,
    duality_check, empirical_fill_time, filling_time_bound, hitting_time, polar_body, resonance_search,
    resonant_reference, successive_minima, AxialBody, Budget, CylinderBody, DioParams, DirectionVector, Error,
    FillOptions, TruncatedCheck,
};

use crate::parse;
use crate::report::{round_floats, Format, Report};

/// Process exit status.
pub mod exit {
    pub const OK: i32 = 0;
    /// A check failed or a target was not reached.
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    /// The enumeration budget or integer range was exhausted.
    pub const RESOURCE: i32 = 3;
}

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Significant digits of floating output, 1 to 17.
    pub precision: u8,
    pub seed: u64,
    pub budget: u64,
    pub output_format: Format,
}

#[derive(Debug, Parser)]
#[command(name = "torfill", version, about = "Filling times of linear flows on the torus")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Significant digits for floating output.
    #[arg(long, global = true, default_value_t = 17, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node budget for lattice enumeration.
    #[arg(long, global = true, env = "TORFILL_BUDGET", default_value_t = DEFAULT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone)]
struct Vector(Vec<f64>);

fn vector(s: &str) -> Result<Vector, String> {
    parse::vector(s).map(Vector)
}

#[derive(Debug, Args)]
struct AlphaArgs {
    /// Direction, comma-separated decimals or p/q rationals.
    #[arg(long, value_parser = vector, allow_hyphen_values = true)]
    alpha: Vector,
    /// Scale the direction to unit length first.
    #[arg(long)]
    normalize: bool,
}

impl AlphaArgs {
    fn direction(&self) -> Result<DirectionVector, Error> {
        if self.normalize {
            DirectionVector::normalize(&self.alpha.0)
        } else {
            DirectionVector::new(self.alpha.0.clone())
        }
    }
}

#[derive(Debug, Args)]
struct DioArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    #[arg(long, value_parser = parse::real)]
    tau: f64,
    #[arg(long, value_parser = parse::real)]
    gamma: f64,
    /// Cutoff N on |k|.
    #[arg(long = "N", value_parser = parse::real)]
    cutoff: f64,
}

impl DioArgs {
    fn resolve(&self) -> Result<(DirectionVector, DioParams), Error> {
        let alpha = self.alpha.direction()?;
        let params = DioParams::new(alpha.dim(), self.tau, self.gamma, Some(self.cutoff))?;
        Ok((alpha, params))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the truncated Diophantine condition.
    Check(DioArgs),
    /// Largest admissible gamma.
    Gamma {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, value_parser = parse::real)]
        tau: f64,
        #[arg(long = "N", value_parser = parse::real)]
        cutoff: f64,
    },
    /// Primitive integer vectors nearly orthogonal to the direction.
    Resonances {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, value_parser = parse::real)]
        max_order: f64,
        #[arg(long, value_parser = parse::real, default_value = "0")]
        tol: f64,
    },
    /// Critical cutoff for a target radius.
    Cutoff {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse::real)]
        delta: f64,
    },
    /// Upper bound on the filling time.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse::real)]
        tau: f64,
        #[arg(long, value_parser = parse::real)]
        gamma: f64,
        #[arg(long, value_parser = parse::real)]
        delta: f64,
    },
    /// Adapted integer basis with its invariant report.
    Basis(DioArgs),
    /// Hitting time of a target from the origin.
    Hit {
        #[command(flatten)]
        dio: DioArgs,
        #[arg(long, value_parser = vector, allow_hyphen_values = true)]
        theta: Vector,
        #[arg(long, value_parser = parse::real)]
        delta: f64,
    },
    /// Simulated filling time; a comma list of deltas gives a sweep.
    Fill {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, value_parser = vector)]
        delta: Vector,
        /// Time step; defaults to delta / 10.
        #[arg(long, value_parser = parse::real)]
        dt: Option<f64>,
        #[arg(long, value_parser = parse::real, default_value = "1000")]
        max_time: f64,
        /// Starting point; defaults to the origin.
        #[arg(long, value_parser = vector, allow_hyphen_values = true)]
        theta0: Option<Vector>,
        /// Grid cell side; defaults to delta / (2 sqrt n).
        #[arg(long, value_parser = parse::real)]
        grid_side: Option<f64>,
    },
    /// Products of successive minima of a cylinder and its polar.
    Duality {
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Axial half-extent.
        #[arg(long, value_parser = parse::real)]
        a: f64,
        /// Radial half-extent.
        #[arg(long, value_parser = parse::real)]
        b: f64,
    },
    /// Monte Carlo measure of the excluded set of directions.
    Measure {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse::real)]
        tau: f64,
        #[arg(long, value_parser = parse::real)]
        gamma: f64,
        #[arg(long = "N", value_parser = parse::real)]
        cutoff: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Resonant directions N(q, 1) and their filling times.
    DemoResonant {
        /// One or more positive integers, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u32>,
        /// Also measure the fill time with the grid simulator.
        #[arg(long)]
        simulate: bool,
    },
}

/// What a finished invocation prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Done {
    result: Value,
    diagnostics: Vec<String>,
    code: i32,
}

impl Done {
    fn ok(result: Value) -> Self {
        Self { result, diagnostics: Vec::new(), code: exit::OK }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        _ if e.is_resource() => exit::RESOURCE,
        Error::NotDiophantine(_) | Error::ExclusionFailed(_) | Error::NotUnimodular { .. } | Error::Internal(_) => {
            exit::FAILURE
        }
        _ => exit::USAGE,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::NotUnit { .. } => "not_unit",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::MissingCutoff => "missing_cutoff",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::Overflow { .. } => "overflow",
        Error::CutoffTooSmall { .. } => "cutoff_too_small",
        Error::NotDiophantine(_) => "not_diophantine",
        Error::DeltaTooSmall { .. } => "delta_too_small",
        Error::NotUnimodular { .. } => "not_unimodular",
        Error::Internal(_) => "internal",
        Error::ExclusionFailed(_) => "exclusion_failed",
    }
}

fn echo_params(name: &str, matches: &clap::ArgMatches) -> BTreeMap<String, Value> {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = cmd.find_subcommand(name).expect("parsed subcommand exists");
    let mut out = BTreeMap::new();
    for arg in sub.get_arguments() {
        let (Some(long), id) = (arg.get_long(), arg.get_id().as_str()) else { continue };
        if long == "help" || long == "version" {
            continue;
        }
        if arg.get_action().takes_values() {
            if let Some(raw) = matches.get_raw(id) {
                let parts: Vec<String> = raw.map(|s| s.to_string_lossy().into_owned()).collect();
                out.insert(long.to_string(), Value::String(parts.join(",")));
            }
        } else {
            out.insert(long.to_string(), Value::Bool(matches.get_flag(id)));
        }
    }
    out
}

/// Runs one invocation. `args` excludes the program name.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = std::iter::once("torfill".to_string()).chain(args.into_iter().map(Into::into)).collect();
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: exit::OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: exit::USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches come from the same definition");
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let params = echo_params(name, sub);
    let config = RunConfig { precision: cli.precision, seed: cli.seed, budget: cli.budget, output_format: cli.format };

    let (mut done, stderr) = match dispatch(&cli.command, &config) {
        Ok(d) => (d, String::new()),
        Err(e) => {
            let msg = format!("error: {e}\n");
            let code = error_code(&e);
            if code == exit::USAGE {
                return Outcome { code, stdout: String::new(), stderr: msg };
            }
            let d = Done {
                result: json!({"error": error_kind(&e), "message": e.to_string()}),
                diagnostics: vec![e.to_string()],
                code,
            };
            (d, msg)
        }
    };
    round_floats(&mut done.result, config.precision as usize);
    let report = Report {
        command: name.to_string(),
        params,
        result: done.result,
        diagnostics: done.diagnostics,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut stderr = stderr;
    if config.output_format != Format::Json {
        for d in &report.diagnostics {
            if !stderr.contains(d.as_str()) {
                stderr.push_str(&format!("note: {d}\n"));
            }
        }
    }
    Outcome { code: done.code, stdout: report.render(config.output_format), stderr }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Done, Error> {
    let budget = Budget(cfg.budget);
    match cmd {
        Command::Check(args) => {
            let (alpha, params) = args.resolve()?;
            Ok(match check_truncated(&alpha, &params, budget)? {
                TruncatedCheck::Pass => Done::ok(json!({"status": "pass"})),
                TruncatedCheck::Violated(w) => Done {
                    result: json!({"status": "violated", "k": w.k, "inner": w.inner, "threshold": w.threshold}),
                    diagnostics: vec![format!("k = {:?} violates the condition", w.k)],
                    code: exit::FAILURE,
                },
            })
        }
        Command::Gamma { alpha, tau, cutoff } => {
            let bg = best_gamma(&alpha.direction()?, *tau, *cutoff, budget)?;
            Ok(Done::ok(json!({"gamma_max": bg.gamma_max, "argmin_k": bg.argmin_k})))
        }
        Command::Resonances { alpha, max_order, tol } => {
            let found = resonance_search(&alpha.direction()?, *max_order, *tol, budget)?;
            let rows: Vec<Value> =
                found.iter().map(|r| json!({"k": r.k, "order": r.order, "residual": r.residual})).collect();
            Ok(Done::ok(json!({"count": rows.len(), "rows": rows})))
        }
        Command::Cutoff { n, delta } => Ok(Done::ok(json!({"cutoff": critical_cutoff(*n, *delta)?}))),
        Command::Bound { n, tau, gamma, delta } => Ok(Done::ok(json!({
            "bound": filling_time_bound(*n, *tau, *gamma, *delta)?,
            "constant": bound_constant(*n, *tau)?,
        }))),
        Command::Basis(args) => {
            let (alpha, params) = args.resolve()?;
            let b = adapted_basis(&alpha, &params, budget)?;
            let inv = b.invariants();
            Ok(Done::ok(json!({
                "columns": b.integer_basis().columns(),
                "multipliers": b.multipliers(),
                "directions": b.directions(),
                "minima": b.minima().lambdas,
                "invariants": inv,
            })))
        }
        Command::Hit { dio, theta, delta } => {
            let (alpha, params) = dio.resolve()?;
            let b = adapted_basis(&alpha, &params, budget)?;
            let c = hitting_time(&b, &theta.0, *delta)?;
            let mut done = Done::ok(serde_json::to_value(&c).expect("certificate serialises"));
            if !c.guaranteed {
                done.diagnostics.push(format!(
                    "cutoff {} is below the critical cutoff for delta = {}; distance not guaranteed",
                    c.cutoff, c.delta
                ));
            } else if c.endpoint_distance >= c.delta {
                done.code = exit::FAILURE;
                done.diagnostics.push("endpoint misses the target ball".into());
            }
            Ok(done)
        }
        Command::Fill { alpha, delta, dt, max_time, theta0, grid_side } => {
            let alpha = alpha.direction()?;
            let theta0 = theta0.as_ref().map_or_else(|| vec![0.0; alpha.dim()], |t| t.0.clone());
            let mut rows = Vec::new();
            let mut code = exit::OK;
            for &d in &delta.0 {
                let opts = FillOptions { dt: dt.unwrap_or(d / 10.0), max_time: *max_time, grid_side: *grid_side };
                let res = empirical_fill_time(&alpha, &theta0, d, &opts)?;
                if !res.filled() {
                    code = exit::FAILURE;
                }
                rows.push(serde_json::to_value(&res).expect("coverage serialises"));
            }
            let result = if rows.len() == 1 { rows.pop().expect("one row") } else { json!({"rows": rows}) };
            let mut done = Done::ok(result);
            done.code = code;
            if code != exit::OK {
                done.diagnostics.push("not filled within max-time".into());
            }
            Ok(done)
        }
        Command::Duality { alpha, a, b } => {
            let body = CylinderBody::new(alpha.direction()?, *a, *b)?;
            let products = duality_check(&body, budget)?;
            let own = successive_minima(&body, budget)?;
            let polar = successive_minima(&polar_body(&body), budget)?;
            let fact: f64 = (1..=body.dim()).map(|i| i as f64).product();
            let ok = products.iter().all(|p| (1.0 - 1e-9..=fact + 1e-9).contains(p));
            let mut done = Done::ok(json!({
                "products": products,
                "cylinder_minima": own.lambdas,
                "polar_minima": polar.lambdas,
                "within_bounds": ok,
            }));
            if !ok {
                done.code = exit::FAILURE;
                done.diagnostics.push(format!("a product lies outside [1, {fact}]"));
            }
            Ok(done)
        }
        Command::Measure { n, tau, gamma, cutoff, samples } => {
            let params = DioParams::new(*n, *tau, *gamma, Some(*cutoff))?;
            let m = complement_measure_estimate(&params, *samples, cfg.seed, budget)?;
            Ok(Done::ok(serde_json::to_value(m).expect("estimate serialises")))
        }
        Command::DemoResonant { q, simulate } => {
            let mut rows = Vec::new();
            let mut done = Done::ok(Value::Null);
            for &q in q {
                let r = resonant_reference(q)?;
                let mut row = json!({
                    "q": q,
                    "alpha": r.alpha.coords(),
                    "delta": r.delta,
                    "expected_time": r.expected_time,
                });
                if *simulate {
                    let s = r.setup();
                    let res = empirical_fill_time(&r.alpha, &[0.0, 0.0], s.delta, &s.options)?;
                    let tolerance = 2.0 * s.options.dt;
                    let within = res.fill_time.is_some_and(|t| (t - r.expected_time).abs() <= tolerance);
                    if !within {
                        done.code = exit::FAILURE;
                        done.diagnostics.push(format!("q = {q}: measured time outside the tolerance"));
                    }
                    let o = row.as_object_mut().expect("object");
                    o.insert("simulated_delta".into(), json!(s.delta));
                    o.insert("dt".into(), json!(s.options.dt));
                    o.insert("grid_side".into(), json!(res.grid_side));
                    o.insert("measured_time".into(), json!(res.fill_time));
                    o.insert("tolerance".into(), json!(tolerance));
                    o.insert("within_tolerance".into(), json!(within));
                }
                rows.push(row);
            }
            done.result = json!({"rows": rows});
            Ok(done)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_codes() {
        assert_eq!(error_code(&Error::BudgetExceeded { budget: 1 }), exit::RESOURCE);
        assert_eq!(error_code(&Error::MissingCutoff), exit::USAGE);
        assert_eq!(error_code(&Error::Internal("x".into())), exit::FAILURE);
    }
}
