//! Command-line front end. `main` only parses arguments and forwards here, so
//! every command can also be driven in-process.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bessel::{BesselZeroTable, TableConfig, ZeroRecord};
use crate::bifurcation::{self, BifurcationOptions, GlobalReport};
use crate::burnside::{self, OrbitType};
use crate::caps::Caps;
use crate::degree::{self, DegreeOptions, ExistenceReport};
use crate::error::{Error, Result};
use crate::spectral::{
    real_spectrum, MatrixFamily, MatrixJson, SpectrumAnalysis, SpectrumEntry, DEFAULT_GUARD, DEFAULT_SPECTRAL_TOL,
};

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CERTIFICATE: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_NON_ISOLATED: i32 = 5;
pub const EXIT_CAPACITY: i32 = 6;

/// Hypotheses on the nonlinearity recorded by `--assert-hypotheses`.
pub const EXIST_HYPOTHESES: [&str; 4] = ["A1", "A2", "A3", "A4"];
/// `exist` hypotheses plus finiteness of the critical set.
pub const BIFURCATE_HYPOTHESES: [&str; 5] = ["A1", "A2", "A3", "A4", "B-tilde"];

#[derive(Debug, Parser)]
#[command(
    name = "equideg",
    version,
    about = "Equivariant degree certificates for O(2)-symmetric elliptic systems on the disc"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zeros j_{m,n} of Bessel functions and Dirichlet eigenvalues s_{m,n}.
    Bessel(BesselArgs),
    /// Products of basic degrees in the Burnside ring.
    Burnside(BurnsideArgs),
    /// Existence certificates for a coefficient matrix or explicit spectrum.
    Exist(ExistArgs),
    /// Bifurcation report for a one-parameter family.
    Bifurcate(BifurcateArgs),
}

#[derive(Debug, Args)]
pub struct BesselArgs {
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, requires = "m", conflicts_with = "below")]
    pub n: Option<u32>,
    /// List every s_{m,n} strictly below this bound (restricted to --m if given).
    #[arg(long)]
    pub below: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BurnsideArgs {
    /// Comma separated positive modes; repeats are allowed.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub modes: Vec<u32>,
    /// Report the (H_{m0}) coefficient by all three routes.
    #[arg(long)]
    pub coeff: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON file, `-` for stdin, or an inline JSON object.
    #[arg(long)]
    pub input: String,
    /// Record the analytic hypotheses as asserted.
    #[arg(long)]
    pub assert_hypotheses: bool,
    /// Relative guard for the non-degeneracy check.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: f64,
    /// Relative tolerance for eigenvalue clustering and rank decisions.
    #[arg(long, default_value_t = DEFAULT_SPECTRAL_TOL)]
    pub spectral_tol: f64,
}

#[derive(Debug, Args)]
pub struct ExistArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Parameter interval `a,b`; overrides any `domain` in the input.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    /// Scan spacing; defaults to (b - a)/1024.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Bisection width relative to max(1, |alpha|).
    #[arg(long, default_value_t = bifurcation::DEFAULT_REL_TOL)]
    pub tol: f64,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad lower end `{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad upper end `{b}`: {e}"))?;
    Ok((a, b))
}

/// Exit status of an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Schema(_) | Error::Json(_) | Error::Domain(_) | Error::Io(_) => EXIT_USAGE,
        Error::Degenerate(_) => EXIT_DEGENERATE,
        Error::NonIsolated { .. } => EXIT_NON_ISOLATED,
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::UnsupportedProduct(_) | Error::Overflow | Error::Consistency(_) => EXIT_OTHER,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain(_) => "domain",
        Error::Capacity { .. } => "capacity",
        Error::Degenerate(_) => "degenerate",
        Error::NonIsolated { .. } => "non_isolated",
        Error::UnsupportedProduct(_) => "unsupported_product",
        Error::Overflow => "overflow",
        Error::Consistency(_) => "consistency",
        Error::Schema(_) | Error::Json(_) => "schema",
        Error::Io(_) => "io",
    }
}

/// JSON body printed for a failed command.
pub fn error_json(err: &Error) -> serde_json::Value {
    let mut body = json!({
        "kind": error_kind(err),
        "message": err.to_string(),
    });
    match err {
        Error::Degenerate(v) => body["violations"] = json!(v),
        Error::NonIsolated { alpha, .. } => body["alpha"] = json!(alpha),
        _ => {}
    }
    json!({ "schema": crate::SCHEMA_VERSION, "error": body })
}

/// Output of a successful command plus the exit status it implies.
pub struct Outcome {
    pub code: i32,
    pub json: serde_json::Value,
    pub table: String,
}

/// Runs one command with caps taken from `EQUIDEG_CAPS`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = Caps::from_env().and_then(|caps| execute(&cli.command, &caps));
    match result {
        Ok(o) => {
            let text = match cli.format {
                Format::Json => render_json(&o.json),
                Format::Table => o.table,
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_OTHER;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "equideg: {e}");
            if let Error::Degenerate(v) = &e {
                for x in v {
                    let _ = writeln!(
                        err,
                        "  mu_{} = {} is within the guard of s_{{{},{}}} = {}",
                        x.j, x.mu, x.m, x.n, x.eigenvalue
                    );
                }
            }
            if cli.format == Format::Json {
                let _ = out.write_all(render_json(&error_json(&e)).as_bytes());
            }
            exit_code(&e)
        }
    }
}

fn render_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

pub fn execute(cmd: &Command, caps: &Caps) -> Result<Outcome> {
    let table = BesselZeroTable::new(TableConfig::from_caps(caps));
    match cmd {
        Command::Bessel(a) => run_bessel(a, &table),
        Command::Burnside(a) => run_burnside(a, caps),
        Command::Exist(a) => run_exist(a, &table, caps),
        Command::Bifurcate(a) => run_bifurcate(a, &table, caps),
    }
}

fn run_bessel(a: &BesselArgs, table: &BesselZeroTable) -> Result<Outcome> {
    let records: Vec<ZeroRecord> = match (a.m, a.n, a.below) {
        (Some(m), Some(n), None) => {
            let zero = table.zero(m, n)?;
            vec![ZeroRecord {
                m,
                n,
                zero,
                eigenvalue: zero * zero,
            }]
        }
        (m, None, Some(bound)) => {
            if !bound.is_finite() {
                return Err(Error::Schema("--below must be finite".into()));
            }
            let modes: Vec<u32> = match m {
                Some(m) => vec![m],
                None => table.max_mode(bound)?.map_or(Vec::new(), |top| (0..=top).collect()),
            };
            let mut out = Vec::new();
            for m in modes {
                for (n, s) in table.zeros_below(m, bound)? {
                    out.push(ZeroRecord {
                        m,
                        n,
                        zero: table.zero(m, n)?,
                        eigenvalue: s,
                    });
                }
            }
            out.sort_by(|x, y| x.eigenvalue.total_cmp(&y.eigenvalue).then(x.m.cmp(&y.m)));
            out
        }
        _ => return Err(Error::Schema("bessel needs `--m M --n N` or `--below B`".into())),
    };
    let mut text = format!("{:>5} {:>5} {:>22} {:>22}\n", "m", "n", "j_mn", "s_mn");
    for r in &records {
        text.push_str(&format!("{:>5} {:>5} {:>22} {:>22}\n", r.m, r.n, r.zero, r.eigenvalue));
    }
    Ok(Outcome {
        code: EXIT_CERTIFIED,
        json: json!({ "schema": crate::SCHEMA_VERSION, "zeros": records }),
        table: text,
    })
}

#[derive(Serialize)]
struct CoeffReport {
    m0: u32,
    expanded: i64,
    iterated: i64,
    closed_form: i64,
    agree: bool,
}

fn run_burnside(a: &BurnsideArgs, caps: &Caps) -> Result<Outcome> {
    let expanded = burnside::expand_product_capped(&a.modes, caps.powerset)?;
    let iterated = burnside::product_of_basic_degrees(&a.modes)?;
    // pairs of equal modes cancel before the closed form is applied
    let mut reduced: Vec<u32> = Vec::new();
    let mut sorted = a.modes.clone();
    sorted.sort_unstable();
    for chunk in sorted.chunk_by(|x, y| x == y) {
        if chunk.len() % 2 == 1 {
            reduced.push(chunk[0]);
        }
    }
    let coeff = match a.coeff {
        Some(m0) => {
            let closed = burnside::closed_form_coeff_capped(&reduced, m0, caps.powerset)?;
            let e = expanded.coeff(OrbitType::Dihedral(m0));
            let i = iterated.coeff(OrbitType::Dihedral(m0));
            Some(CoeffReport {
                m0,
                expanded: e,
                iterated: i,
                closed_form: closed,
                agree: e == i && i == closed,
            })
        }
        None => None,
    };
    let products_agree = expanded == iterated;
    let mut text = format!("modes: {:?}\nproduct: {}\n", a.modes, expanded);
    text.push_str(&format!("expansion matches iterated product: {products_agree}\n"));
    if let Some(c) = &coeff {
        text.push_str(&format!(
            "coeff (H_{}): {} (expanded {}, iterated {}, agree {})\n",
            c.m0, c.closed_form, c.expanded, c.iterated, c.agree
        ));
    }
    let consistent = products_agree && coeff.as_ref().is_none_or(|c| c.agree);
    let json = json!({
        "schema": crate::SCHEMA_VERSION,
        "modes": a.modes,
        "element": expanded,
        "display": expanded.to_string(),
        "is_unit": expanded.is_unit(),
        "products_agree": products_agree,
        "coeff": coeff,
    });
    if !consistent {
        return Err(Error::Consistency(format!(
            "Burnside routes disagree for modes {:?}: {json}",
            a.modes
        )));
    }
    Ok(Outcome {
        code: EXIT_CERTIFIED,
        json,
        table: text,
    })
}

fn read_input(spec: &str) -> Result<String> {
    let t = spec.trim_start();
    if t.starts_with('{') {
        return Ok(spec.to_string());
    }
    if spec == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    Ok(std::fs::read_to_string(PathBuf::from(spec))?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExistInput {
    #[serde(default)]
    schema: Option<u32>,
    #[serde(default)]
    spectrum: Option<Vec<SpectrumEntry>>,
    #[serde(default)]
    matrix: Option<MatrixJson>,
}

fn check_schema(v: Option<u32>) -> Result<()> {
    match v {
        Some(v) if v != crate::SCHEMA_VERSION => Err(Error::Schema(format!("unsupported schema version {v}"))),
        _ => Ok(()),
    }
}

/// Parses an `exist` input document into a real spectrum.
pub fn parse_exist_input(text: &str, spectral_tol: f64) -> Result<SpectrumAnalysis> {
    let input: ExistInput = serde_json::from_str(text)?;
    check_schema(input.schema)?;
    match (input.spectrum, input.matrix) {
        (Some(entries), None) => {
            crate::spectral::validate_spectrum(&entries)?;
            Ok(SpectrumAnalysis {
                entries,
                complex_count: 0,
            })
        }
        (None, Some(m)) => real_spectrum(&m.to_matrix()?, spectral_tol),
        _ => Err(Error::Schema(
            "input needs exactly one of `spectrum` or `matrix`".into(),
        )),
    }
}

fn degree_options(c: &CommonArgs, caps: &Caps) -> DegreeOptions {
    DegreeOptions {
        guard: c.guard,
        powerset_cap: caps.powerset,
    }
}

fn assumptions(asserted: bool, list: &[&str]) -> Vec<String> {
    if asserted {
        list.iter().map(|s| s.to_string()).collect()
    } else {
        Vec::new()
    }
}

fn run_exist(a: &ExistArgs, table: &BesselZeroTable, caps: &Caps) -> Result<Outcome> {
    let c = &a.common;
    let analysis = parse_exist_input(&read_input(&c.input)?, c.spectral_tol)?;
    let report = degree::existence_report(
        &analysis,
        table,
        &degree_options(c, caps),
        &assumptions(c.assert_hypotheses, &EXIST_HYPOTHESES),
    )?;
    Ok(Outcome {
        code: if report.certificates.is_empty() {
            EXIT_NO_CERTIFICATE
        } else {
            EXIT_CERTIFIED
        },
        table: exist_table(&report),
        json: serde_json::to_value(&report)?,
    })
}

fn exist_table(r: &ExistenceReport) -> String {
    let mut t = String::new();
    t.push_str("spectrum:\n");
    for (j, e) in r.spectrum.iter().enumerate() {
        t.push_str(&format!("  mu_{} = {} (mult {})\n", j + 1, e.mu, e.geom_mult));
    }
    if r.complex_eigenvalues > 0 {
        t.push_str(&format!("  ({} non-real eigenvalues ignored)\n", r.complex_eigenvalues));
    }
    t.push_str(&format!("|Sigma_0| = {}\n", r.sigma0.len()));
    let counts: Vec<String> = r.counts.iter().map(|(m, c)| format!("n^{m}={c}")).collect();
    t.push_str(&format!("counts: {}\n", counts.join(" ")));
    t.push_str(&format!("S = {:?}\n", r.s));
    t.push_str(&format!("radial indicator: {:?}\n", r.radial_indicator).to_lowercase());
    if r.certificates.is_empty() {
        t.push_str("no dihedral certificates\n");
    }
    for c in &r.certificates {
        t.push_str(&format!("m0 = {:>3}  coeff = {:>4}  {}\n", c.m0, c.coeff, c.guarantee));
    }
    if r.conditional {
        t.push_str("conditional on hypotheses A1-A4 (not asserted)\n");
    }
    t
}

/// Parses a family document, applying an explicit `--range` when given.
pub fn parse_family_input(text: &str, range: Option<(f64, f64)>) -> Result<MatrixFamily> {
    MatrixFamily::from_json(text, range)
}

fn run_bifurcate(a: &BifurcateArgs, table: &BesselZeroTable, caps: &Caps) -> Result<Outcome> {
    let c = &a.common;
    if !(a.tol > 0.0) {
        return Err(Error::Schema("--tol must be positive".into()));
    }
    let family = parse_family_input(&read_input(&c.input)?, a.range)?;
    let opts = BifurcationOptions {
        grid_step: a.grid_step,
        rel_tol: a.tol,
        spectral_tol: c.spectral_tol,
        degree: degree_options(c, caps),
    };
    let report = bifurcation::global_report(&family, table, &opts)?;
    let asserted = assumptions(c.assert_hypotheses, &BIFURCATE_HYPOTHESES);
    let json = serde_json::to_value(report.to_json_view(family.domain(), &asserted))?;
    Ok(Outcome {
        code: if report.has_certificates() {
            EXIT_CERTIFIED
        } else {
            EXIT_NO_CERTIFICATE
        },
        table: bifurcate_table(&report, asserted.is_empty()),
        json,
    })
}

fn bifurcate_table(r: &GlobalReport, conditional: bool) -> String {
    let mut t = format!("critical points: {}\n", r.lambda.len());
    for l in &r.local {
        let coeffs: Vec<String> = l.coeffs.iter().map(|(m, c)| format!("H_{m}:{c}")).collect();
        t.push_str(&format!(
            "  alpha = {:<20} J = {:<12} coeffs [{}] closed form {}\n",
            l.alpha,
            format!("{:?}", l.j_set),
            coeffs.join(", "),
            if l.closed_form_agrees { "agrees" } else { "DISAGREES" }
        ));
    }
    let sums: Vec<String> = r.sum_coeffs.iter().map(|(m, c)| format!("H_{m}:{c}")).collect();
    t.push_str(&format!("J_Lambda = {:?}  sum [{}]\n", r.j_lambda, sums.join(", ")));
    for u in &r.kfixed_certificates {
        t.push_str(&format!(
            "unbounded non-radial branch, m0 = {}, within [{}, {}]\n",
            u.m0, u.interval.0, u.interval.1
        ));
    }
    for w in &r.warnings {
        t.push_str(&format!("warning: {w}\n"));
    }
    if conditional {
        t.push_str("conditional on hypotheses A1-A4, B-tilde (not asserted)\n");
    }
    t
}
