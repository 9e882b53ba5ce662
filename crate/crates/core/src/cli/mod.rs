//! Command-line surface: expression parsing, JSON documents and the
//! subcommands of the `finterm` binary.
//!
//! Exit codes: 0 on success, 1 on domain errors (reported on standard
//! output as `{"error": {"code": …, "message": …}}`), 2 on usage errors.
//! Documents are pretty-printed JSON by default and compact single-line
//! JSON with `--json`; `derive` and `laurent` print plain text unless
//! `--json` is given.

pub mod expr;
pub mod schema;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::numfield::Consts;
use crate::algebra::ratfunc::RatFunc;
use crate::certificate::CertificateError;
use crate::descent;
use crate::laurent;
use crate::ratint;
use crate::riccati::{self, RiccatiProblem};
use crate::tower::{Tower, TowerElem};

#[derive(Debug, Parser)]
#[command(
    name = "finterm",
    version,
    about = "Elementary-integral certificates over differential field towers"
)]
struct Cli {
    /// Compact single-line JSON output for every subcommand.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Differentiate an expression in a tower.
    Derive {
        /// Tower JSON file (defaults to the base field Q(x)).
        #[arg(long)]
        tower: Option<PathBuf>,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Integrate a rational function of x; prints a certificate.
    IntegrateRational {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Check a certificate against a tower.
    VerifyCert {
        #[arg(long)]
        tower: Option<PathBuf>,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Descend a certificate to the base field.
    Descend {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        /// Print the full descent report instead of the output certificate.
        #[arg(long)]
        trace: bool,
    },
    /// Laurent expansion in a transcendental generator.
    Laurent {
        #[arg(long)]
        tower: Option<PathBuf>,
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Expansion point (an element below the generator).
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Generator to expand in.
        #[arg(long, default_value = "x")]
        var: String,
        /// Number of terms beyond the leading one (default 8, or
        /// FINTERM_MAX_TRUNCATION).
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long, value_enum, default_value_t = SeriesKind::Plain)]
        series: SeriesKind,
    },
    /// Rational solutions of u' + u^2 = r u + s.
    Riccati {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Validate a tower description and print it with level metadata.
    BuildTower { path: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeriesKind {
    /// The expression itself.
    Plain,
    /// Its derivative.
    Derivative,
    /// Its logarithmic derivative.
    Logderiv,
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    Domain { code: String, message: String },
    Usage(String),
}

fn domain(code: &str, message: impl ToString) -> Failure {
    Failure::Domain {
        code: code.into(),
        message: message.to_string(),
    }
}

impl From<schema::SchemaError> for Failure {
    fn from(e: schema::SchemaError) -> Self {
        domain(e.code(), e)
    }
}

enum Output {
    Json(Value),
    Text(String, Value),
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_tower(path: &Option<PathBuf>) -> Result<Tower, Failure> {
    match path {
        None => Ok(Tower::base(None)),
        Some(p) => Ok(schema::tower_from_json(&schema::parse_json(&read(p)?)?)?),
    }
}

fn parse_expr(src: &str, tower: &Tower) -> Result<TowerElem, Failure> {
    expr::parse(src, tower).map_err(|e| domain("parse_error", e))
}

fn certificate_failure(e: CertificateError) -> Failure {
    let code = descent::DescentErrorKind::Certificate(e.clone()).code();
    domain(code, e)
}

fn execute(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Derive { tower, expr } => {
            let tower = load_tower(&tower)?;
            let e = parse_expr(&expr, &tower)?;
            let d = tower.format(&tower.derive(&e));
            Ok(Output::Text(d.clone(), json!({ "derivative": d })))
        }
        Command::IntegrateRational { expr } => {
            let tower = Tower::base(None);
            let f = parse_expr(&expr, &tower)?;
            let cert = ratint::integrate_rational(&tower, &f).map_err(|e| domain("not_rational", e))?;
            Ok(Output::Json(schema::certificate_to_json(&tower, &cert)?))
        }
        Command::VerifyCert { tower, cert } => {
            let tower = load_tower(&tower)?;
            let cert = schema::certificate_from_json(&tower, &schema::parse_json(&read(&cert)?)?)?;
            cert.check(&tower).map_err(certificate_failure)?;
            Ok(Output::Json(json!({ "verified": true })))
        }
        Command::Descend { tower, cert, trace } => {
            let tower = load_tower(&Some(tower))?;
            let cert = schema::certificate_from_json(&tower, &schema::parse_json(&read(&cert)?)?)?;
            let report = descent::descend_all(&tower, &cert).map_err(|e| domain(e.code(), e))?;
            let out = if trace {
                schema::report_to_json(&tower, &report)?
            } else {
                schema::certificate_to_json(&tower, &report.output)?
            };
            Ok(Output::Json(out))
        }
        Command::Laurent {
            tower,
            expr,
            at,
            var,
            truncation,
            series,
        } => {
            let tower = load_tower(&tower)?;
            let x = parse_expr(&expr, &tower)?;
            let a = parse_expr(&at, &tower)?;
            let slot = tower
                .lookup(&var)
                .ok_or_else(|| domain("parse_error", format!("unknown generator '{var}'")))?;
            let n = truncation.unwrap_or_else(laurent::default_truncation);
            let s = match series {
                SeriesKind::Plain => laurent::expand(&tower, &x, slot, &a, n),
                SeriesKind::Derivative => laurent::derivative_series(&tower, &x, slot, &a, n),
                SeriesKind::Logderiv => laurent::logderiv_series(&tower, &x, slot, &a, n),
            }
            .map_err(|e| domain("laurent_error", e))?;
            let name = tower.slot(slot).name.clone();
            let point = tower.format(&a);
            let coeffs: Vec<String> = s.coeffs.iter().map(|c| tower.format(c)).collect();
            let text = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| format!("({c})*({name} - ({point}))^{}", s.order + j as i64))
                .collect::<Vec<_>>()
                .join(" + ");
            let text = format!(
                "order {}\n{} + O(({name} - ({point}))^{})",
                s.order,
                text,
                s.order + s.coeffs.len() as i64
            );
            Ok(Output::Text(
                text,
                json!({
                    "var": name,
                    "point": point,
                    "order": s.order,
                    "coeffs": coeffs,
                    "truncation": s.truncation,
                }),
            ))
        }
        Command::Riccati { r, s } => {
            let base = Tower::base(None);
            let to_rf = |src: &str| -> Result<_, Failure> {
                let e = parse_expr(src, &base)?;
                base.to_base_ratfunc(&e)
                    .ok_or_else(|| domain("not_rational", "coefficients must be rational functions of x"))
            };
            let problem = RiccatiProblem {
                r: to_rf(&r)?,
                s: to_rf(&s)?,
            };
            let sols = riccati::rational_solutions(&problem);
            let printer = Tower::base(sols.field.clone());
            let show = |rf: &RatFunc<_>| printer.format(&printer.from_base_ratfunc(rf));
            let mut out = serde_json::Map::new();
            if let Some(k) = &sols.field {
                out.insert("constants".into(), schema::field_to_json(k, None));
            }
            out.insert("solutions".into(), sols.solutions.iter().map(show).collect());
            if !sols.families.is_empty() {
                let fams: Vec<Value> = sols
                    .families
                    .iter()
                    .map(|f| {
                        let basis: Vec<String> = f
                            .basis
                            .iter()
                            .map(|p| show(&RatFunc::from_poly(&Consts, p.clone())))
                            .collect();
                        json!({ "base": show(&f.base), "basis": basis })
                    })
                    .collect();
                out.insert("families".into(), fams.into());
            }
            Ok(Output::Json(Value::Object(out)))
        }
        Command::BuildTower { path } => {
            let tower = load_tower(&Some(path))?;
            Ok(Output::Json(schema::tower_to_json(&tower)))
        }
    }
}

fn render(v: &Value, compact: bool) -> String {
    if compact {
        v.to_string()
    } else {
        serde_json::to_string_pretty(v).expect("serializable")
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let compact = cli.json;
    match execute(cli.command) {
        Ok(Output::Json(v)) => {
            let _ = writeln!(out, "{}", render(&v, compact));
            0
        }
        Ok(Output::Text(text, v)) => {
            let _ = writeln!(out, "{}", if compact { v.to_string() } else { text });
            0
        }
        Err(Failure::Domain { code, message }) => {
            let v = json!({ "error": { "code": code, "message": message } });
            let _ = writeln!(out, "{}", render(&v, compact));
            1
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}
