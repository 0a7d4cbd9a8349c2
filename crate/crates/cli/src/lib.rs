//! Command-line front end. Every command prints a versioned JSON envelope
//! (or CSV where asked) on stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 2 invalid input or failed verification, 3 when a
//! computation exceeds its budget.

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hyperorbit_core::densities::{self, DensityReport};
use hyperorbit_core::finite_fields::{self, OrbitStats};
use hyperorbit_core::orbits::{self, x_minus_t};
use hyperorbit_core::rings::{same_square_class, RankNRing};
use hyperorbit_core::search::{self, SurveyAggregate};
use hyperorbit_core::{json, BinaryForm, CurvePoint, Error, SymmetricPair};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hyperorbit", version, about = "Orbits of symmetric matrix pairs attached to hyperelliptic curves")]
pub struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Include wall-clock timing in the envelope (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the pair attached to a point on z^2 = f(x, y).
    Orbit(OrbitArgs),
    /// Check a pair against a form, or the ideal data attached to a point.
    Verify(VerifyArgs),
    /// Count pairs over F_p with a given invariant form.
    CountFp(CountFpArgs),
    /// Local density factors and the assembled bound.
    Densities(DensitiesArgs),
    /// Partial product bounding genus-0 curves with a point.
    Genus0(Genus0Args),
    /// Local solubility and small points on random curves.
    Survey(SurveyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct OrbitArgs {
    #[arg(long)]
    pub n: usize,
    /// Coefficients f0,...,fn.
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
    /// Point x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// Also run the ideal construction and compare.
    #[arg(long)]
    pub via_ideal: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
    /// Pair as JSON {"A": [[...]], "B": [[...]]}, or @path to a file.
    #[arg(long, conflicts_with = "point")]
    pub pair: Option<String>,
    /// Point x,y,z: check the ideal data built from it.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct CountFpArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DensitiesArgs {
    /// One or more genera, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub genus: Vec<usize>,
    /// Truncation prime for the Euler product.
    #[arg(long, default_value_t = 1000)]
    pub primes: u64,
    /// Monte Carlo samples for the real-root distribution.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Emit CSV (header plus one row per genus) instead of JSON.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct Genus0Args {
    #[arg(long, default_value_t = 10_000)]
    pub primes: u64,
    /// Include the exact product as a fraction string.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct SurveyArgs {
    #[arg(long)]
    pub n: usize,
    /// Coefficient height bound.
    #[arg(long)]
    pub height: u64,
    /// Height bound for the point search.
    #[arg(long, default_value_t = 30)]
    pub point_bound: u64,
    #[arg(long)]
    pub count: u64,
    #[arg(long)]
    pub csv: bool,
}

/// Envelope around every JSON payload.
#[derive(Debug, Serialize, Deserialize)]
pub struct CommandResult<T> {
    pub schema_version: u32,
    pub command: String,
    pub input: Value,
    pub seed: u64,
    pub payload: T,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::BudgetExceeded(_)) => EXIT_BUDGET,
            CliError::Io(_) => 1,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_form(s: &str, n: Option<usize>) -> CliResult<BinaryForm> {
    let f: BinaryForm = s.parse()?;
    if let Some(n) = n {
        if f.degree() != n {
            return Err(CliError::Input(format!(
                "form has degree {} but --n {n}",
                f.degree()
            )));
        }
    }
    Ok(f)
}

fn parse_point(s: &str) -> CliResult<CurvePoint> {
    Ok(s.parse()?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

struct Emitter<'a> {
    out: &'a mut dyn Write,
    seed: u64,
    timing: bool,
    start: Instant,
}

impl Emitter<'_> {
    fn envelope<T: Serialize>(&mut self, command: &str, input: Value, payload: T) -> CliResult<()> {
        let result = CommandResult {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input,
            seed: self.seed,
            payload,
            timing_ms: self
                .timing
                .then(|| self.start.elapsed().as_secs_f64() * 1000.0),
        };
        serde_json::to_writer(&mut *self.out, &result).map_err(std::io::Error::from)?;
        writeln!(self.out)?;
        Ok(())
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        // Only the first call per process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let mut em = Emitter {
        out,
        seed: cli.seed,
        timing: cli.timing,
        start: Instant::now(),
    };
    match &cli.command {
        Command::Orbit(a) => orbit(a, &mut em),
        Command::Verify(a) => verify(a, &mut em),
        Command::CountFp(a) => count_fp(a, &mut em),
        Command::Densities(a) => densities_cmd(a, &mut em),
        Command::Genus0(a) => genus0(a, &mut em),
        Command::Survey(a) => survey(a, &mut em),
    }
}

fn orbit(a: &OrbitArgs, em: &mut Emitter) -> CliResult<i32> {
    let f = parse_form(&a.form, Some(a.n))?;
    let p = parse_point(&a.point)?;
    let built = orbits::pair_from_point(&f, &p)?;
    let invariant = built.pair.invariant_form()?;
    let identity = invariant == f;
    let mut payload = json!({
        "form": f,
        "point": p,
        "gamma": [[json::int_value(&built.gamma.a), json::int_value(&built.gamma.b)],
                  [json::int_value(&built.gamma.c), json::int_value(&built.gamma.d)]],
        "moved_form": built.moved_form,
        "pair": built.pair,
        "invariant_form": invariant,
        "determinant_identity": identity,
    });
    if a.via_ideal {
        let ip = orbits::pair_from_point_via_ideal(&f, &p)?;
        let e = x_minus_t(&f, &p)?;
        let verdict = same_square_class(&e, &ip.class, 50, em.seed)?;
        let moved = f.act(&ip.gamma);
        let ring = RankNRing::from_form(&moved)?;
        let (ideal, alpha) = orbits::construct_ideal(&ring, &p.z)?;
        let report = orbits::verify_pair_data(&ring, &ideal, &alpha)?;
        payload["ideal"] = json!({
            "pair": ip.pair,
            "invariant_form": ip.pair.invariant_form()?,
            "pair_data": report,
            "class_agreement": format!("{verdict:?}"),
        });
    }
    em.envelope("orbit", to_value(a), payload)?;
    if identity {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Verification("invariant form differs from f".into()))
    }
}

fn read_pair(s: &str) -> CliResult<SymmetricPair> {
    let text = match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => s.to_string(),
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(SymmetricPair::from_json(&v)?)
}

fn verify(a: &VerifyArgs, em: &mut Emitter) -> CliResult<i32> {
    let f = parse_form(&a.form, None)?;
    let (payload, ok) = match (&a.pair, &a.point) {
        (Some(pair), None) => {
            let pair = read_pair(pair)?;
            let inv = pair.invariant_form()?;
            let ok = inv == f;
            (json!({ "form": f, "invariant_form": inv, "matches": ok }), ok)
        }
        (None, Some(point)) => {
            let p = parse_point(point)?;
            if !p.lies_on(&f) {
                return Err(Error::NotOnCurve.into());
            }
            let gamma = orbits::moving_matrix(&f, &p.x, &p.y)?;
            let moved = f.act(&gamma);
            let ring = RankNRing::from_form(&moved)?;
            let (ideal, alpha) = orbits::construct_ideal(&ring, &p.z)?;
            let report = orbits::verify_pair_data(&ring, &ideal, &alpha)?;
            let ok = report.passes();
            (
                json!({ "form": f, "point": p, "moved_form": moved, "pair_data": report, "passes": ok }),
                ok,
            )
        }
        _ => return Err(CliError::Input("give exactly one of --pair or --point".into())),
    };
    em.envelope("verify", to_value(a), payload)?;
    if ok {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Verification("pair data rejected".into()))
    }
}

fn count_fp(a: &CountFpArgs, em: &mut Emitter) -> CliResult<i32> {
    let f = parse_form(&a.form, Some(a.n))?;
    let stats: OrbitStats = finite_fields::count_pairs_with_form(&f, a.p)?;
    em.envelope("count-fp", to_value(a), &stats)?;
    Ok(EXIT_OK)
}

fn densities_cmd(a: &DensitiesArgs, em: &mut Emitter) -> CliResult<i32> {
    let reports = a
        .genus
        .iter()
        .map(|&g| densities::density_bound(g, a.primes, a.samples, em.seed))
        .collect::<hyperorbit_core::Result<Vec<DensityReport>>>()?;
    if a.csv {
        writeln!(em.out, "{}", DensityReport::CSV_HEADER)?;
        for r in &reports {
            writeln!(em.out, "{}", r.csv_row())?;
        }
    } else {
        em.envelope("densities", to_value(a), &reports)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Genus0Payload {
    pub truncation_prime: u64,
    pub log10: f64,
    pub below_one_twentieth: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
}

fn genus0(a: &Genus0Args, em: &mut Emitter) -> CliResult<i32> {
    if a.primes < 3 {
        return Err(CliError::Input("--primes must be at least 3".into()));
    }
    let q = densities::genus0_product(a.primes);
    let payload = Genus0Payload {
        truncation_prime: a.primes,
        log10: densities::rational_log10(&q),
        below_one_twentieth: q.numer() * BigInt::from(20) < *q.denom(),
        exact: a.exact.then(|| json::rational_string(&q)),
    };
    em.envelope("genus0", to_value(a), &payload)?;
    Ok(EXIT_OK)
}

fn survey(a: &SurveyArgs, em: &mut Emitter) -> CliResult<i32> {
    let (records, agg): (_, SurveyAggregate) =
        search::survey(a.n, a.height, a.point_bound, a.count, em.seed)?;
    if a.csv {
        writeln!(em.out, "{}", search::SurveyRecord::CSV_HEADER)?;
        for r in &records {
            writeln!(em.out, "{}", r.csv_row())?;
        }
        writeln!(em.out)?;
        writeln!(em.out, "{}", SurveyAggregate::CSV_HEADER)?;
        writeln!(em.out, "{}", agg.csv_row())?;
    } else {
        for r in &records {
            serde_json::to_writer(&mut *em.out, r).map_err(std::io::Error::from)?;
            writeln!(em.out)?;
        }
        em.envelope("survey", to_value(a), &agg)?;
    }
    Ok(EXIT_OK)
}
