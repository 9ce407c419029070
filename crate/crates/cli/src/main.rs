use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use rrunits::cyclounits::{cusp_limit, exact_norm, exponent_vector, golden_minimal_residual};
use rrunits::galois::stabilizer_report;
use rrunits::hallittlewood::{phi_1a, phi_1b, product_side_1a, product_side_1b, psi_1};
use rrunits::numeric::{eval_unit, point, point_i, point_rho, working_bits, Descriptor};
use rrunits::qseries::{rr_continued_fraction, QSeries};
use rrunits::rational::{fmt_big, parse_small, primes_between};
use rrunits::siegel::{g_capital, r_unit, s_unit, siegel_g, SiegelIndex};
use rrunits::units::{kl_unit_check, rank_report};
use rrunits::verify::{run_suite, Status, Suite, SuiteParams, SuiteReport};
use rrunits::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "rrunits", version, about = "Generalized Rogers-Ramanujan modular units: expansions and checks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,
    /// Seed for randomized case selection.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Exact q-expansion of a unit or sum side.
    Expand(ExpandArgs),
    /// Run a named verification suite (or `all`).
    Verify(VerifyArgs),
    /// Rank formula against the exact divisor-matrix rank.
    Rank(RankArgs),
    /// Kubert-Lang unit criterion for s_{l,m}.
    UnitCheck(LevelArgs),
    /// Exact limit of s_{l,m} at the cusp 0.
    CuspLimit(CuspArgs),
    /// Stabilizer of s_{l,m} in GL2(Z/l)/{±1}.
    Stabilizer(LevelArgs),
    /// High-precision evaluation at a point of the upper half plane.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Object {
    /// Siegel function g_(m/l, r/l).
    #[value(name = "g")]
    SiegelG,
    /// g(m) = prod_s g_(m/l, s/l).
    #[value(name = "G")]
    SiegelCapital,
    /// r_unit(l, m); without --ell, the continued fraction r.
    R,
    S,
    Psi1,
    Phi1a,
    Phi1b,
    ProductA,
    ProductB,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, value_enum)]
    object: Object,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    n: Option<i64>,
    /// Second numerator for `g`.
    #[arg(long, default_value_t = 0)]
    r: i64,
    /// Truncation order, a rational such as 20 or 41/3.
    #[arg(long, default_value = "20")]
    order: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    order: Option<i64>,
    #[arg(long)]
    max_prime: Option<u64>,
    #[arg(long)]
    prec: Option<u32>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long, default_value_t = 2)]
    c: i64,
    /// Sweep every prime 5 <= l <= MAX.
    #[arg(long, value_name = "MAX")]
    sweep_primes: Option<u64>,
}

#[derive(Args)]
struct LevelArgs {
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    m: i64,
}

#[derive(Args)]
struct CuspArgs {
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    m: i64,
    /// Also print the real value to this many digits.
    #[arg(long, value_name = "PREC")]
    numeric: Option<u32>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    object: Object,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    n: Option<i64>,
    /// `i` or `rho`.
    #[arg(long, conflicts_with_all = ["point_re", "point_im"])]
    point: Option<String>,
    #[arg(long, requires = "point_im", allow_hyphen_values = true)]
    point_re: Option<String>,
    #[arg(long, requires = "point_re")]
    point_im: Option<String>,
    #[arg(long, default_value_t = 30)]
    prec: u32,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidIndex(_)
            | Error::UnsupportedLevel(_)
            | Error::Parse(_)
            | Error::Domain(_)
            | Error::ReductionRequired(_)
            | Error::Level(_)
            | Error::Denominator(_)
            | Error::InvalidAutomorphism { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

/// The rendered report and whether every check in it passed.
struct Output {
    json: Value,
    text: String,
    ok: bool,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("--{name} is required for this object")))
}

fn series_text(s: &QSeries) -> String {
    let mut parts = Vec::new();
    for (e, c) in s.terms() {
        let coeff = match c.as_rational() {
            Some(r) => fmt_big(&r),
            None => format!("{c:?}"),
        };
        parts.push(format!("({coeff}) q^({e})"));
    }
    if parts.is_empty() {
        parts.push("0".into());
    }
    format!("{} + O(q^({}))", parts.join(" + "), s.order())
}

fn expand(a: &ExpandArgs) -> Result<Output, Failure> {
    let order = parse_small(&a.order)?;
    let mn = || -> Result<(u32, u32), Failure> {
        let (m, n) = (need(a.m, "m")?, need(a.n, "n")?);
        if m < 1 || n < 1 {
            return Err(usage("--m and --n must be positive"));
        }
        Ok((m as u32, n as u32))
    };
    let whole = |o: Rational64| -> Result<usize, Failure> {
        if !o.is_integer() || o < Rational64::from_integer(0) {
            return Err(usage("this object needs a non-negative integer order"));
        }
        Ok(o.to_integer() as usize)
    };
    let series = match a.object {
        Object::SiegelG => siegel_g(&SiegelIndex::new(need(a.m, "m")?, a.r, need(a.ell, "ell")?)?, order)?,
        Object::SiegelCapital => g_capital(need(a.m, "m")?, need(a.ell, "ell")?, order)?,
        Object::R => match a.ell {
            Some(l) => r_unit(l, need(a.m, "m")?, order)?,
            None => rr_continued_fraction(order),
        },
        Object::S => s_unit(need(a.ell, "ell")?, need(a.m, "m")?, order)?,
        Object::Psi1 => {
            let (m, n) = mn()?;
            psi_1(m, n, order)?
        }
        Object::Phi1a => {
            let (m, n) = mn()?;
            phi_1a(m, n, order)?
        }
        Object::Phi1b => {
            let (m, n) = mn()?;
            phi_1b(m, n, order)?
        }
        Object::ProductA => {
            let (m, n) = mn()?;
            product_side_1a(m, n, whole(order)?)?
        }
        Object::ProductB => {
            let (m, n) = mn()?;
            product_side_1b(m, n, whole(order)?)?
        }
    };
    let leading = series.leading().map(|(e, _)| e.to_string());
    let mut json = series.to_json();
    if let Value::Object(map) = &mut json {
        map.insert("schema".into(), json!(1));
        map.insert("leading_exponent".into(), json!(leading));
    }
    Ok(Output { text: series_text(&series), json, ok: true })
}

fn suite_text(r: &SuiteReport) -> String {
    let mut out = String::new();
    for c in &r.cases {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        out.push_str(&format!("{tag:<12} {:<28} {}\n", c.id, c.detail));
    }
    out.push_str(&format!(
        "{}: {} passed, {} failed, {} inconclusive ({} ms)",
        r.suite, r.summary.pass, r.summary.fail, r.summary.inconclusive, r.wall_time_ms
    ));
    out
}

fn verify(a: &VerifyArgs, seed: Option<u64>) -> Result<Output, Failure> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse::<Suite>().map_err(|e| usage(e.to_string()))?]
    };
    let params = SuiteParams {
        ell: a.ell,
        m: a.m,
        n: a.n,
        order: a.order,
        max_prime: a.max_prime,
        prec: a.prec,
        seed,
    };
    let mut reports = Vec::new();
    for s in suites {
        reports.push(run_suite(s, &params)?);
    }
    let ok = reports.iter().all(SuiteReport::passed);
    let text = reports.iter().map(suite_text).collect::<Vec<_>>().join("\n\n");
    let json = if reports.len() == 1 {
        serde_json::to_value(&reports[0]).expect("report serializes")
    } else {
        json!({"schema": 1, "reports": reports})
    };
    Ok(Output { json, text, ok })
}

fn rank(a: &RankArgs) -> Result<Output, Failure> {
    let ells = match (a.ell, a.sweep_primes) {
        (_, Some(max)) => primes_between(5, max),
        (Some(l), None) => vec![l],
        (None, None) => return Err(usage("give --ell or --sweep-primes")),
    };
    let reports = ells.iter().map(|&l| rank_report(l, a.c)).collect::<Result<Vec<_>, _>>()?;
    let ok = reports.iter().all(|r| r.agree);
    let text = reports
        .iter()
        .map(|r| {
            format!(
                "ell={} c={} d={} formula_rank={} matrix_rank={} agree={}",
                r.ell, r.c, r.d, r.formula_rank, r.matrix_rank, r.agree
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let json = if reports.len() == 1 && a.sweep_primes.is_none() {
        serde_json::to_value(&reports[0]).expect("report serializes")
    } else {
        serde_json::to_value(&reports).expect("reports serialize")
    };
    Ok(Output { json, text, ok })
}

fn unit_check(a: &LevelArgs) -> Result<Output, Failure> {
    let e = rrunits::siegel::s_expr_quotient(a.ell, a.m)?;
    let r = kl_unit_check(&e)?;
    let text = format!(
        "s_{{{},{}}}: is_unit={} (sum p^2={}, sum r^2={}, sum pr={}, sum m={})",
        a.ell, a.m, r.is_unit, r.sum_p2, r.sum_r2, r.sum_pr, r.sum_m
    );
    Ok(Output { json: serde_json::to_value(&r).expect("report serializes"), text, ok: true })
}

fn cusp(a: &CuspArgs) -> Result<Output, Failure> {
    let x = cusp_limit(a.ell, a.m)?;
    let v = exponent_vector(a.ell, a.m)?;
    let norm = exact_norm(&x)?;
    let mut json = json!({
        "schema": 1,
        "ell": a.ell,
        "m": a.m,
        "exact": x,
        "norm": fmt_big(&norm),
        "exponents": v.exps,
    });
    let mut text = format!("lim s_{{{},{}}} = {x:?}\nnorm = {}\nexponents = {:?}", a.ell, a.m, fmt_big(&norm), v.exps);
    let mut ok = true;
    if (a.ell, a.m) == (5, 1) {
        let golden = golden_minimal_residual(&x).is_zero();
        ok &= golden;
        json["minimal_check"] = json!(golden);
        text.push_str(&format!("\nx^2 - x - 1 = 0: {golden}"));
    }
    if let Some(p) = a.numeric {
        let s = x.embed(p).re.to_decimal(p);
        text.push_str(&format!("\nnumeric = {s}"));
        json["numeric"] = json!(s);
    }
    Ok(Output { json, text, ok })
}

fn stabilizer(a: &LevelArgs) -> Result<Output, Failure> {
    let r = stabilizer_report(a.ell, a.m)?;
    let text = format!(
        "stabilizer of s_{{{},{}}}: {} of {} classes, gamma_d set: {}\n{:?}",
        a.ell, a.m, r.count, r.total_classes, r.is_gamma_d_set, r.classes
    );
    let ok = r.is_gamma_d_set;
    Ok(Output { json: serde_json::to_value(&r).expect("report serializes"), text, ok })
}

fn eval(a: &EvalArgs) -> Result<Output, Failure> {
    let d = match a.object {
        Object::R => match a.ell {
            Some(ell) => Descriptor::R { ell, m: need(a.m, "m")? },
            None => Descriptor::ContinuedFraction,
        },
        Object::S => Descriptor::S { ell: need(a.ell, "ell")?, m: need(a.m, "m")? },
        Object::Psi1 => {
            let (m, n) = (need(a.m, "m")?, need(a.n, "n")?);
            if m < 1 || n < 1 {
                return Err(usage("--m and --n must be positive"));
            }
            Descriptor::Psi1 { m: m as u32, n: n as u32 }
        }
        _ => return Err(usage("eval supports the objects r, s and psi1")),
    };
    let bits = working_bits(a.prec);
    let tau = match (a.point.as_deref(), &a.point_re, &a.point_im) {
        (Some("i"), _, _) | (None, None, None) => point_i(bits),
        (Some("rho"), _, _) => point_rho(bits),
        (Some(p), _, _) => return Err(usage(format!("unknown point {p:?}; use i, rho or --point-re/--point-im"))),
        (None, Some(x), Some(y)) => point(&parse_small(x)?, &parse_small(y)?, bits),
        _ => return Err(usage("--point-re and --point-im go together")),
    };
    let r = eval_unit(&d, &tau, a.prec)?;
    let j = r.to_json(a.prec);
    let text = format!("{} = {} + {} i  (error <= {:e})", d.label(), j.re, j.im, j.err);
    Ok(Output { json: serde_json::to_value(&j).expect("result serializes"), text, ok: true })
}

fn configure_threads() {
    if let Some(n) = std::env::var("RRUNITS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Expand(a) => expand(a),
        Command::Verify(a) => verify(a, cli.seed),
        Command::Rank(a) => rank(a),
        Command::UnitCheck(a) => unit_check(a),
        Command::CuspLimit(a) => cusp(a),
        Command::Stabilizer(a) => stabilizer(a),
        Command::Eval(a) => eval(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json renders"),
                Format::Text => out.text,
            };
            let written = match &cli.out {
                Some(path) => fs::write(path, format!("{body}\n")),
                None => writeln!(std::io::stdout(), "{body}"),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
