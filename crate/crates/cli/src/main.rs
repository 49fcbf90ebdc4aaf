use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use macbeath::census::{self, cps_discriminant, matrix_oracle, CensusRecord};
use macbeath::density::patterns::pattern_census_seeded;
use macbeath::density::sweep::default_stream;
use macbeath::density::{
    galois_model, predicted_sigma_densities, rational_to_f64, structure_cycle_distribution, partition_label,
    sweep, GaloisStructure, SweepOptions,
};
use macbeath::gf::factor::DEFAULT_SEED;
use macbeath::gf::{FieldCtx, FieldCtxExt};
use macbeath::intpoly::{discriminant, psi, psi_at_one, s_polynomial, IntPoly};
use macbeath::numkit::{self, PrimeLimit};
use macbeath::par::Exec;
use macbeath::report;
use macbeath::verify::{self, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "macbeath", version, about = "Inner/outer regularity census for Macbeath maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for sweeps (1 = sequential, 0 = one per core).
    #[arg(long, global = true, env = "MACBEATH_WORKERS")]
    workers: Option<usize>,
    /// Seed for the randomized polynomial factorization.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl Common {
    fn exec(&self) -> Exec {
        match self.workers {
            None | Some(0) => Exec::Parallel(0),
            Some(n) => Exec::workers(n),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiscTarget {
    Psi,
    F1,
    F2,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal polynomial of 2cos(2π/n) and its value at 1.
    Psi {
        #[arg(long)]
        n: u64,
    },
    /// Discriminant of Ψ_n, f₁ or f₂, or the hypermap discriminant of a trace triple mod p.
    Disc {
        #[arg(long, default_value_t = 3)]
        m: u64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum, default_value_t = DiscTarget::F1)]
        of: DiscTarget,
        /// Prime for a trace triple.
        #[arg(long, requires = "traces")]
        p: Option<u64>,
        /// Trace triple a,b,c (integers reduced mod p).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "p")]
        traces: Option<Vec<i64>>,
    },
    /// Trace classes and their regularity for one (m, n, p).
    Classify {
        #[arg(long, default_value_t = 3)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
    },
    /// Explicit matrix witness for each class of a type-{3, n} census.
    Oracle {
        #[arg(long, default_value_t = 3)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        /// Only this class index.
        #[arg(long)]
        class: Option<usize>,
        /// Try only r = 1/2, the degenerate branch.
        #[arg(long)]
        force_half: bool,
    },
    /// Degree patterns of f₂ mod p over primes up to a bound.
    Pattern {
        #[arg(long, default_value_t = 3)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        galois_override: Option<GaloisStructure>,
    },
    /// Census over a stream of primes, tallied by the number of inner classes.
    Sweep {
        #[arg(long, default_value_t = 3)]
        m: u64,
        #[arg(long)]
        n: u64,
        /// The first K primes of the stream.
        #[arg(long, conflicts_with = "bound", required_unless_present = "bound")]
        first: Option<usize>,
        /// All primes of the stream up to this bound.
        #[arg(long)]
        bound: Option<u64>,
        /// Append-only JSONL cache used to resume long sweeps.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        galois_override: Option<GaloisStructure>,
    },
    /// Galois model and predicted densities of the sets Σ_k.
    Predict {
        #[arg(long, default_value_t = 3)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        galois_override: Option<GaloisStructure>,
    },
    /// Run a named verification suite, or all of them.
    Verify {
        /// table1, examples, appendix, parity, oracle, patterns or all.
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        parity_bound: u64,
        #[arg(long, default_value_t = 1_000_000)]
        pattern_bound: u64,
    },
}

/// Outcome of a successful run: the rendered report and whether every
/// verification check passed.
struct Rendered {
    text: String,
    ok: bool,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Rendered { text, ok: true }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(report::to_json(v)? + "\n")
}

fn unsupported(fmt: Format, what: &str) -> Result<Rendered> {
    let name = match fmt {
        Format::Table => "table",
        Format::Csv => "csv",
        Format::Json => "json",
    };
    Err(macbeath::Error::InvalidArgument(format!("{what} has no {name} output")).into())
}

#[derive(Serialize)]
struct PsiOut {
    n: u64,
    degree: usize,
    polynomial: String,
    /// Constant term first.
    coefficients: IntPoly,
    #[serde(serialize_with = "as_string")]
    value_at_one: BigInt,
}

fn as_string<S: serde::Serializer, T: ToString>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn run_psi(n: u64, fmt: Format) -> Result<Rendered> {
    let f = psi(n)?;
    let out = PsiOut {
        n,
        degree: f.degree().unwrap_or(0),
        polynomial: f.to_string(),
        value_at_one: psi_at_one(n)?.direct,
        coefficients: f,
    };
    Ok(Rendered::ok(match fmt {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut s = String::from("degree,coefficient\n");
            for (i, c) in out.coefficients.coeffs().iter().enumerate() {
                writeln!(s, "{i},{c}")?;
            }
            s
        }
        Format::Table => format!(
            "Psi_{n}(x) = {}\ndegree     {}\nPsi_{n}(1)  {}\n",
            out.polynomial, out.degree, out.value_at_one
        ),
    }))
}

#[derive(Serialize)]
struct DiscOut {
    polynomial: String,
    #[serde(serialize_with = "as_string")]
    discriminant: BigInt,
    /// Prime factors found by trial division, with exponents.
    factors: Vec<(u64, u32)>,
    #[serde(serialize_with = "as_string")]
    cofactor: BigInt,
}

const TRIAL_DIVISION_BOUND: u64 = 100_000;

fn small_factors(v: &BigInt) -> (Vec<(u64, u32)>, BigInt) {
    let mut rest = v.abs();
    let mut out = Vec::new();
    if rest.is_zero() {
        return (out, rest);
    }
    for p in numkit::primes_up_to(TRIAL_DIVISION_BOUND) {
        let bp = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    (out, rest)
}

#[derive(Serialize)]
struct CpsOut {
    p: u64,
    traces: [u64; 3],
    minus_d: u64,
    chi: i8,
}

fn run_disc(m: u64, n: Option<u64>, of: DiscTarget, p: Option<u64>, traces: Option<Vec<i64>>, fmt: Format) -> Result<Rendered> {
    if let (Some(p), Some(t)) = (p, traces) {
        if t.len() != 3 {
            bail!(macbeath::Error::InvalidArgument(format!("--traces needs three values, got {}", t.len())));
        }
        let ctx = FieldCtx::prime(p, 1)?;
        let e: Vec<_> = t.iter().map(|&v| ctx.from_i64(v)).collect();
        let (v, chi) = cps_discriminant(&e[0], &e[1], &e[2])?;
        let red = |x: i64| x.rem_euclid(p as i64) as u64;
        let out = CpsOut {
            p,
            traces: [red(t[0]), red(t[1]), red(t[2])],
            minus_d: v.as_prime().unwrap_or(0),
            chi,
        };
        return Ok(Rendered::ok(match fmt {
            Format::Json => json(&out)?,
            Format::Csv => format!("p,a,b,c,minus_d,chi\n{},{},{},{},{},{}\n", p, out.traces[0], out.traces[1], out.traces[2], out.minus_d, chi),
            Format::Table => format!("-D = {} in F_{p}\nchi  {chi}\n", out.minus_d),
        }));
    }
    let Some(n) = n else { bail!(macbeath::Error::InvalidArgument("disc needs --n, or --p with --traces".into())) };
    let f = match of {
        DiscTarget::Psi => psi(n)?,
        DiscTarget::F1 => s_polynomial(m, n)?,
        DiscTarget::F2 => s_polynomial(m, n)?.doubled(),
    };
    let d = discriminant(&f)?;
    let (factors, cofactor) = small_factors(&d);
    let out = DiscOut { polynomial: f.to_string(), discriminant: d, factors, cofactor };
    Ok(Rendered::ok(match fmt {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut s = String::from("prime,exponent\n");
            for (p, e) in &out.factors {
                writeln!(s, "{p},{e}")?;
            }
            s
        }
        Format::Table => {
            let fac: Vec<String> = out.factors.iter().map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") }).collect();
            let mut s = format!("f(x) = {}\ndisc  {}\nprimes {}\n", out.polynomial, out.discriminant, fac.join(" * "));
            if out.cofactor > BigInt::from(1) {
                writeln!(s, "unfactored cofactor {}", out.cofactor)?;
            }
            s
        }
    }))
}

fn classify_table(r: &CensusRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "type {{{},{}}} p={} d={} q={} genus={}", r.m, r.n, r.p, r.field.d, r.field.q, r.genus);
    let _ = writeln!(s, "{:>5}  {:<24} {:>3}  {:<16} {:>4}  regularity", "class", "factor", "e", "s", "chi");
    for (i, c) in r.classes.iter().enumerate() {
        let factor: Vec<String> = c.factor.iter().map(u64::to_string).collect();
        let _ = writeln!(
            s,
            "{i:>5}  {:<24} {:>3}  {:<16} {:>4}  {}",
            factor.join(" "),
            c.e,
            c.describe_s(r.p),
            c.chi,
            c.regularity
        );
    }
    let _ = writeln!(s, "k={} (inner) l={} (outer) expected classes={}", r.k, r.l, r.expected_classes);
    if let Some(v) = &r.parity {
        let _ = writeln!(
            s,
            "parity: Psi_n(1)={} predicted={} observed={} consistent={}",
            v.psi_at_one,
            v.predicted.map_or("-".to_string(), |p| format!("{p:?}").to_lowercase()),
            format!("{:?}", v.observed).to_lowercase(),
            v.consistent
        );
    }
    s
}

fn run_classify(m: u64, n: u64, p: u64, seed: u64, fmt: Format) -> Result<Rendered> {
    let r = census::map_census_seeded(m, n, p, seed)?;
    Ok(Rendered::ok(match fmt {
        Format::Json => json(&r)?,
        Format::Csv => report::classify_csv(&r)?,
        Format::Table => classify_table(&r),
    }))
}

#[derive(Serialize)]
struct OracleRow {
    class: usize,
    census: macbeath::census::Regularity,
    #[serde(flatten)]
    witness: macbeath::census::oracle::OracleReport,
}

fn run_oracle(m: u64, n: u64, p: u64, class: Option<usize>, force_half: bool, seed: u64, fmt: Format) -> Result<Rendered> {
    let r = census::map_census_seeded(m, n, p, seed)?;
    let indices: Vec<usize> = match class {
        Some(i) if i >= r.classes.len() => {
            bail!(macbeath::Error::InvalidArgument(format!("class {i} out of range (0..{})", r.classes.len())))
        }
        Some(i) => vec![i],
        None => (0..r.classes.len()).collect(),
    };
    let mut rows = Vec::new();
    for i in indices {
        let o = matrix_oracle(&r, i, force_half)?;
        rows.push(OracleRow { class: i, census: r.classes[i].regularity, witness: o.report() });
    }
    let ok = rows.iter().all(|r| r.witness.agrees);
    let text = match fmt {
        Format::Json => json(&rows)?,
        Format::Csv => return unsupported(fmt, "oracle"),
        Format::Table => {
            let mut s = String::new();
            for row in &rows {
                let w = &row.witness;
                writeln!(s, "class {}: t = {} in {}", row.class, w.t, w.t_field)?;
                writeln!(s, "  x = [[{}, {}], [{}, {}]]", w.x[0], w.x[1], w.x[2], w.x[3])?;
                writeln!(s, "  w = [[{}, {}], [{}, {}]]  det w = {}", w.w[0], w.w[1], w.w[2], w.w[3], w.det_w)?;
                writeln!(
                    s,
                    "  oracle {} census {} agree={} degenerate={} sign={}",
                    w.regularity, row.census, w.agrees, w.degenerate, w.sign
                )?;
            }
            s
        }
    };
    Ok(Rendered { text, ok })
}

fn run_pattern(m: u64, n: u64, bound: u64, ovr: Option<GaloisStructure>, c: &Common) -> Result<Rendered> {
    let pc = pattern_census_seeded(m, n, bound, c.exec(), ovr, c.seed)?;
    let ok = pc.cross_check_failures.is_empty();
    let text = match c.format {
        Format::Json => json(&pc)?,
        Format::Csv => report::pattern_csv(&pc)?,
        Format::Table => {
            let mut s = format!(
                "f2 degree patterns for ({m},{n}), primes <= {bound}: {} sampled, bad primes {:?}\n",
                pc.sampled, pc.bad_primes
            );
            writeln!(s, "{:<16} {:>9} {:>10} {:>10}", "pattern", "count", "frequency", "predicted")?;
            for r in &pc.rows {
                let pred = r.predicted.as_ref().map_or("-".to_string(), |q| format!("{q} ({:.4})", rational_to_f64(q)));
                writeln!(s, "{:<16} {:>9} {:>10.4} {:>10}", r.label, r.count, r.frequency, pred)?;
            }
            if let Some(d) = pc.max_abs_deviation {
                writeln!(s, "max |deviation| {d:.4}")?;
            }
            writeln!(s, "cross-check failures: {}", pc.cross_check_failures.len())?;
            s
        }
    };
    Ok(Rendered { text, ok })
}

fn run_sweep(
    m: u64,
    n: u64,
    first: Option<usize>,
    bound: Option<u64>,
    cache: Option<PathBuf>,
    ovr: Option<GaloisStructure>,
    c: &Common,
) -> Result<Rendered> {
    let limit = match (first, bound) {
        (Some(k), _) => PrimeLimit::First(k),
        (None, Some(b)) => PrimeLimit::UpTo(b),
        (None, None) => bail!(macbeath::Error::InvalidArgument("sweep needs --first or --bound".into())),
    };
    let stream = default_stream(m, n, limit)?;
    let opts = SweepOptions { exec: c.exec(), cache, galois_override: ovr, seed: c.seed };
    let res = sweep(m, n, &stream, &opts)?;
    Ok(Rendered::ok(match c.format {
        Format::Json => json(&res)?,
        Format::Csv => report::sweep_csv(&res)?,
        Format::Table => {
            let t = &res.tally;
            let mut s = format!("sweep ({m},{n}): {} primes classified, {} skipped\n", t.total, res.skipped.len());
            let classes: Vec<&String> = t.split.keys().collect();
            write!(s, "{:>3} {:>8} {:>9}", "k", "count", "frequency")?;
            for cl in &classes {
                write!(s, " {:>8}", format!("p={cl}"))?;
            }
            writeln!(s, " {:>10}", "predicted")?;
            for k in 0..t.counts.len() {
                write!(s, "{k:>3} {:>8} {:>9.4}", t.counts[k], t.frequencies[k])?;
                for cl in &classes {
                    write!(s, " {:>8}", t.split[*cl][k])?;
                }
                let pred = t.predicted.as_ref().map_or("-".to_string(), |p| p[k].to_string());
                writeln!(s, " {pred:>10}")?;
            }
            if let Some(d) = t.max_abs_deviation {
                writeln!(s, "max |deviation| {d:.4}")?;
            }
            s
        }
    }))
}

#[derive(Serialize)]
struct PredictOut {
    model: macbeath::density::GaloisModel,
    sigma_densities: Vec<String>,
    cycle_types: Vec<(String, String)>,
}

fn run_predict(m: u64, n: u64, ovr: Option<GaloisStructure>, fmt: Format) -> Result<Rendered> {
    let model = galois_model(m, n, ovr)?;
    let sigma: Vec<String> = predicted_sigma_densities(&model)?.iter().map(ToString::to_string).collect();
    let cycle_types = match structure_cycle_distribution(n, model.structure) {
        Ok(d) => d.iter().map(|(p, q)| (partition_label(p), q.to_string())).collect(),
        Err(e) if e.is_domain() || matches!(e, macbeath::Error::BoundExceeded(_)) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let out = PredictOut { model, sigma_densities: sigma, cycle_types };
    Ok(Rendered::ok(match fmt {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut s = String::from("k,density\n");
            for (k, d) in out.sigma_densities.iter().enumerate() {
                writeln!(s, "{k},{d}")?;
            }
            s
        }
        Format::Table => {
            let g = &out.model;
            let mut s = format!(
                "({m},{n}): r={} structure={}{} negative roots={}\n",
                g.r,
                g.structure,
                if g.overridden { " (override)" } else { "" },
                g.negative_roots
            );
            for (k, d) in out.sigma_densities.iter().enumerate() {
                writeln!(s, "Sigma_{k:<3} {d}")?;
            }
            if !out.cycle_types.is_empty() {
                writeln!(s, "cycle types of f2:")?;
                for (p, d) in &out.cycle_types {
                    writeln!(s, "  {p:<16} {d}")?;
                }
            }
            s
        }
    }))
}

fn run_verify(name: &str, parity_bound: u64, pattern_bound: u64, c: &Common) -> Result<Rendered> {
    let suites: Vec<Suite> = if name == "all" { Suite::ALL.to_vec() } else { vec![name.parse()?] };
    let opts = VerifyOptions { exec: c.exec(), parity_bound, pattern_bound };
    let mut reports = Vec::new();
    for s in suites {
        reports.push(verify::run_suite(s, &opts)?);
    }
    let ok = reports.iter().all(|r| r.passed());
    let text = match c.format {
        Format::Json => json(&reports)?,
        Format::Csv => {
            let mut w = String::from("suite,check,expected,actual,pass\n");
            let esc = |v: &str| format!("\"{}\"", v.replace('"', "\"\""));
            for r in &reports {
                for ch in &r.checks {
                    writeln!(w, "{},{},{},{},{}", r.suite, esc(&ch.name), esc(&ch.expected), esc(&ch.actual), ch.pass)?;
                }
            }
            w
        }
        Format::Table => {
            let mut s = String::new();
            for r in &reports {
                let failed = r.checks.iter().filter(|c| !c.pass).count();
                writeln!(s, "== {} : {} checks, {} failed", r.suite, r.checks.len(), failed)?;
                for ch in &r.checks {
                    let tag = if ch.pass { "ok  " } else { "FAIL" };
                    if ch.pass {
                        write!(s, "{tag} {} = {}", ch.name, ch.actual)?;
                    } else {
                        write!(s, "{tag} {}: expected {} got {}", ch.name, ch.expected, ch.actual)?;
                    }
                    match &ch.note {
                        Some(n) => writeln!(s, "  ({n})")?,
                        None => writeln!(s)?,
                    }
                }
            }
            s
        }
    };
    Ok(Rendered { text, ok })
}

fn run(cli: Cli) -> Result<Rendered> {
    let c = &cli.common;
    let fmt = c.format;
    match cli.command {
        Command::Psi { n } => run_psi(n, fmt),
        Command::Disc { m, n, of, p, traces } => run_disc(m, n, of, p, traces, fmt),
        Command::Classify { m, n, p } => run_classify(m, n, p, c.seed, fmt),
        Command::Oracle { m, n, p, class, force_half } => run_oracle(m, n, p, class, force_half, c.seed, fmt),
        Command::Pattern { m, n, bound, galois_override } => run_pattern(m, n, bound, galois_override, c),
        Command::Sweep { m, n, first, bound, cache, galois_override } => {
            run_sweep(m, n, first, bound, cache, galois_override, c)
        }
        Command::Predict { m, n, galois_override } => run_predict(m, n, galois_override, fmt),
        Command::Verify { suite, parity_bound, pattern_bound } => run_verify(&suite, parity_bound, pattern_bound, c),
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn error_code(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<macbeath::Error>() {
        Some(err) => err.code(),
        None if e.downcast_ref::<io::Error>().is_some() => "io",
        None => "error",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let output = cli.common.output.clone();
    let result = run(cli).and_then(|r| emit(&r.text, output.as_ref()).map(|_| r.ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("macbeath: error[verification-failed]: one or more checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("macbeath: error[{}]: {e:#}", error_code(&e));
            ExitCode::from(1)
        }
    }
}
