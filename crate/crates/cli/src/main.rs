//! `hforge`: construct, verify and compare complex Hadamard matrices.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails, 2 on usage
//! or input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hforge::chm::{detect_butson, fixture, fourier, is_regular, verify_chm, FIXTURE_NAMES};
use hforge::construct::{
    classify_two_entry, conference_to_chm, hadamard_design_to_chm, induce_from_design, sym_hadamard_to_chm, TwoEntryClass,
};
use hforge::designs::{
    hadamard_core_design, paley_conference, paley_design, sylvester_hadamard, verify_2design, IntMatrixJson,
};
use hforge::equivalence::certify_inequivalent;
use hforge::invariants::{
    default_dmax, duality_check, exhaustive_minor_census, fingerprint, haagerup_set, klms_unit, sample_minor_census,
};
use hforge::matrix::is_circulant;
use hforge::scalar::format_rational;
use hforge::{Budget, BlockDesign, ComplexHadamardMatrix, ConferenceMatrixReal, Engine, Error, RealHadamard, Sign};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hforge", version, about = "Complex Hadamard matrices from designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for minor enumeration and sampling.
    #[arg(long, global = true, env = "HFORGE_WORKERS", value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to this file instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,

    /// Abort minor enumerations after this many seconds.
    #[arg(long, global = true, value_parser = positive_seconds)]
    budget_seconds: Option<f64>,

    /// Abort minor enumerations that would exceed this many minors.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_minors: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build a matrix.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Check H·H* = nI.
    Verify { file: PathBuf },
    /// Compute an equivalence invariant.
    Invariant {
        #[command(subcommand)]
        what: Invariant,
    },
    /// Try to certify that two matrices are inequivalent.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        dmax: Option<usize>,
    },
    /// Histogram of |det| over d×d submatrices of a real Hadamard matrix.
    Census {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate every minor instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// List the named matrices this tool can build.
    Catalogue,
    /// Check that the d and n−d minor spectra correspond.
    Duality {
        file: PathBuf,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DesignSource {
    /// Incidence matrix file `{"order": v, "rows": [[0, 1, ...], ...]}`.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Paley design over GF(q), q ≡ 3 (mod 4).
    #[arg(long)]
    q: Option<u64>,
    /// Core design of the Sylvester matrix of order 2^t.
    #[arg(long)]
    t: Option<u32>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ConferenceSource {
    /// Paley conference matrix over GF(q), q ≡ 1 (mod 4).
    #[arg(long)]
    q: Option<u64>,
    /// Conference matrix file `{"order": n, "rows": [...]}`.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SymmetricSource {
    /// Sylvester matrix of order 2^t.
    #[arg(long)]
    t: Option<u32>,
    /// Symmetric normalized real Hadamard matrix file.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Construct {
    /// Hadamard design with 0 ↦ a.
    Theorem1 {
        #[command(flatten)]
        source: DesignSource,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
    },
    /// Core of a symmetric conference matrix with ±1 ↦ c, c̄.
    Theorem2 {
        #[command(flatten)]
        source: ConferenceSource,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
    },
    /// Core of a symmetric real Hadamard matrix with three entry values.
    Theorem3 {
        #[command(flatten)]
        source: SymmetricSource,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
    },
    /// Any symmetric design with 0 ↦ a.
    Induce {
        #[command(flatten)]
        source: DesignSource,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
    },
    /// A stored matrix.
    Fixture { name: String },
    /// The Fourier matrix of order n.
    Fourier {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// The Sylvester matrix of order 2^t.
    Sylvester {
        #[arg(long)]
        t: u32,
    },
}

#[derive(Subcommand)]
enum Invariant {
    /// The set of products h_ij·h_kl·conj(h_il)·conj(h_kj).
    Haagerup { file: PathBuf },
    /// Minor spectra for d = 2..=dmax.
    Fingerprint {
        file: PathBuf,
        #[arg(long)]
        dmax: Option<usize>,
    },
}

fn positive_seconds(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number of seconds, got {s:?}")),
    }
}

enum Failure {
    /// A mathematical check failed.
    Math(anyhow::Error),
    /// Bad arguments or unreadable input.
    Usage(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Json(_) | Error::UnknownFixture(_) | Error::Dimension(_) => Failure::Usage(e.into()),
            _ => Failure::Math(e.into()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

struct Ctx {
    format: Format,
    output: Option<PathBuf>,
    engine: Engine,
}

impl Ctx {
    fn emit(&self, json: serde_json::Value, text: impl FnOnce() -> String) -> Outcome<()> {
        let body = match self.format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&json).expect("serializable")),
            Format::Text => {
                let mut t = text();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
        };
        match &self.output {
            Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())).map_err(usage),
            None => std::io::stdout().write_all(body.as_bytes()).map_err(usage),
        }
    }
}

fn read_json(path: &Path) -> Outcome<serde_json::Value> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display())).map_err(usage)
}

/// A complex Hadamard matrix file, or a ±1 matrix file read as one.
fn load_chm(path: &Path) -> Outcome<ComplexHadamardMatrix> {
    let value = read_json(path)?;
    if value.get("backend").is_some() {
        return Ok(ComplexHadamardMatrix::from_json(value)?);
    }
    Ok(ComplexHadamardMatrix::from_real(&load_real_value(value)?))
}

fn load_real_value(value: serde_json::Value) -> Outcome<RealHadamard> {
    if value.get("backend").is_some() {
        return ComplexHadamardMatrix::from_json(value)?
            .to_real()
            .ok_or_else(|| Failure::Usage(anyhow!("matrix is not a real ±1 matrix")));
    }
    let m: IntMatrixJson = serde_json::from_value(value).map_err(usage)?;
    Ok(RealHadamard::new(m.to_matrix()?)?)
}

fn load_design(source: &DesignSource) -> Outcome<BlockDesign> {
    Ok(match (&source.design, source.q, source.t) {
        (Some(path), _, _) => {
            let m: IntMatrixJson = serde_json::from_value(read_json(path)?).map_err(usage)?;
            verify_2design(&m.to_incidence()?)?
        }
        (_, Some(q), _) => paley_design(q)?,
        (_, _, Some(t)) => hadamard_core_design(&sylvester_hadamard(t))?,
        _ => unreachable!("clap enforces one source"),
    })
}

fn sylvester(t: u32) -> Outcome<RealHadamard> {
    if t > 6 {
        return Err(usage(anyhow!("--t must be at most 6")));
    }
    Ok(sylvester_hadamard(t))
}

fn construct(what: &Construct) -> Outcome<ComplexHadamardMatrix> {
    Ok(match what {
        Construct::Theorem1 { source, sign } => {
            if source.t.is_some_and(|t| t > 6) {
                return Err(usage(anyhow!("--t must be at most 6")));
            }
            hadamard_design_to_chm(&load_design(source)?, *sign)?
        }
        Construct::Induce { source, sign } => induce_from_design(&load_design(source)?, *sign)?,
        Construct::Theorem2 { source, sign } => {
            let c = match (source.q, &source.matrix) {
                (Some(q), _) => paley_conference(q)?,
                (_, Some(path)) => {
                    let m: IntMatrixJson = serde_json::from_value(read_json(path)?).map_err(usage)?;
                    ConferenceMatrixReal::new(m.to_matrix()?)?
                }
                _ => unreachable!("clap enforces one source"),
            };
            conference_to_chm(&c, *sign)?
        }
        Construct::Theorem3 { source, sign } => {
            let h = match (source.t, &source.matrix) {
                (Some(t), _) => sylvester(t)?,
                (_, Some(path)) => load_real_value(read_json(path)?)?,
                _ => unreachable!("clap enforces one source"),
            };
            sym_hadamard_to_chm(&h, *sign)?
        }
        Construct::Fixture { name } => fixture(name)?,
        Construct::Fourier { n } => fourier(*n as usize),
        Construct::Sylvester { t } => ComplexHadamardMatrix::from_real(&sylvester(*t)?),
    })
}

fn backend_label(h: &ComplexHadamardMatrix) -> String {
    match h.radicand() {
        Some(1) => "exact over Q(i)".to_string(),
        Some(d) => format!("exact over Q(i√{d})"),
        None => "float".to_string(),
    }
}

fn verify(ctx: &Ctx, file: &Path) -> Outcome<()> {
    let h = load_chm(file)?;
    let n = h.order();
    match verify_chm(&h) {
        Ok(()) => {
            let regular = is_regular(&h).regular;
            let butson = detect_butson(&h);
            let circulant = is_circulant(&h.float_entries());
            let two_entry = match classify_two_entry(&h) {
                TwoEntryClass::Regular { design, .. } => {
                    let (v, k, l) = design.params();
                    Some(format!("2-({v},{k},{l})"))
                }
                TwoEntryClass::RealMenon => Some("real".to_string()),
                TwoEntryClass::NotTwoEntry => None,
            };
            ctx.emit(
                json!({
                    "ok": true, "n": n, "exact": h.is_exact(), "radicand": h.radicand(),
                    "regular": regular, "butson": butson, "circulant": circulant, "design": two_entry,
                }),
                || {
                    let mut s = format!("ok: complex Hadamard matrix of order {n}, {}", backend_label(&h));
                    if let Some(q) = butson {
                        s.push_str(&format!("\nButson type: {q}th roots of unity"));
                    }
                    if regular {
                        s.push_str("\nregular");
                    }
                    if circulant {
                        s.push_str("\ncirculant");
                    }
                    if let Some(d) = &two_entry {
                        s.push_str(&format!("\ntwo-entry design: {d}"));
                    }
                    s
                },
            )
        }
        Err(v) => {
            ctx.emit(
                json!({ "ok": false, "n": n, "row_i": v.row_i, "row_j": v.row_j, "deviation": v.deviation }),
                || format!("FAILED: {v}"),
            )?;
            Err(Failure::Math(anyhow!("not a complex Hadamard matrix: {v}")))
        }
    }
}

fn census(ctx: &Ctx, matrix: &Path, d: usize, count: u64, seed: u64, exhaustive: bool) -> Outcome<()> {
    let h = load_real_value(read_json(matrix)?)?;
    let c = if exhaustive {
        exhaustive_minor_census(&h, d, &ctx.engine)?
    } else {
        sample_minor_census(&h, d, count, seed, &ctx.engine)?
    };
    let report = (d + 8 == h.order()).then(|| klms_unit(h.order())).flatten().map(|u| c.klms_report(u));
    ctx.emit(c.to_json(), || {
        let mut s = format!("order {}, d = {}, {} minors", h.order(), c.d, c.count);
        if let Some(seed) = c.seed {
            s.push_str(&format!(", seed {seed}"));
        }
        s.push('\n');
        for (v, m) in &c.histogram {
            s.push_str(&format!("|det| = {v}: {m}\n"));
        }
        if let Some(r) = &report {
            s.push_str(&format!("unit 2^7·n^(n/2-8) = {}; all multiples: {}\n", r.unit, r.all_multiples));
            let ks: Vec<String> = r.multiples.keys().map(u64::to_string).collect();
            s.push_str(&format!("k values: {}\n", ks.join(" ")));
            s.push_str(&format!("k in 28..=31 observed: {:?}\n", r.forbidden_hits));
        }
        s
    })
}

struct CatalogueEntry {
    name: &'static str,
    construction: &'static str,
    command: &'static str,
    build: fn() -> hforge::Result<ComplexHadamardMatrix>,
}

const CATALOGUE: &[CatalogueEntry] = &[
    CatalogueEntry {
        name: "F_3",
        construction: "Paley design 2-(3,1,0), a = -1/2 + i√3/2",
        command: "construct theorem1 --q 3 --sign +",
        build: || hadamard_design_to_chm(&paley_design(3)?, Sign::Plus),
    },
    CatalogueEntry {
        name: "C_7A",
        construction: "Paley design 2-(7,3,1), a = -3/4 + i√7/4",
        command: "construct theorem1 --q 7 --sign +",
        build: || hadamard_design_to_chm(&paley_design(7)?, Sign::Plus),
    },
    CatalogueEntry {
        name: "C_7B",
        construction: "Paley design 2-(7,3,1), a = -3/4 - i√7/4",
        command: "construct theorem1 --q 7 --sign -",
        build: || hadamard_design_to_chm(&paley_design(7)?, Sign::Minus),
    },
    CatalogueEntry {
        name: "C_11A",
        construction: "Paley design 2-(11,5,2), a = -5/6 + i√11/6",
        command: "construct theorem1 --q 11 --sign +",
        build: || hadamard_design_to_chm(&paley_design(11)?, Sign::Plus),
    },
    CatalogueEntry {
        name: "C_11B",
        construction: "Paley design 2-(11,5,2), a = -5/6 - i√11/6",
        command: "construct theorem1 --q 11 --sign -",
        build: || hadamard_design_to_chm(&paley_design(11)?, Sign::Minus),
    },
    CatalogueEntry {
        name: "U_15",
        construction: "core design of the Sylvester matrix of order 16, a = -7/8 + i√15/8",
        command: "construct theorem1 --t 4 --sign +",
        build: || hadamard_design_to_chm(&hadamard_core_design(&sylvester_hadamard(4))?, Sign::Plus),
    },
    CatalogueEntry {
        name: "V_15",
        construction: "core of the Sylvester matrix of order 16, b = -5/6 + i√11/6",
        command: "construct theorem3 --t 4 --sign +",
        build: || sym_hadamard_to_chm(&sylvester_hadamard(4), Sign::Plus),
    },
    CatalogueEntry {
        name: "P_7",
        construction: "core of the Sylvester matrix of order 8, b = -1/2 + i√3/2",
        command: "construct theorem3 --t 3 --sign +",
        build: || sym_hadamard_to_chm(&sylvester_hadamard(3), Sign::Plus),
    },
    CatalogueEntry {
        name: "W_9A",
        construction: "Paley conference matrix over GF(9), c = 1/4 + i√15/4",
        command: "construct theorem2 --q 9 --sign +",
        build: || conference_to_chm(&paley_conference(9)?, Sign::Plus),
    },
    CatalogueEntry {
        name: "W_9B",
        construction: "Paley conference matrix over GF(9), c = -1/2 + i√3/2",
        command: "construct theorem2 --q 9 --sign -",
        build: || conference_to_chm(&paley_conference(9)?, Sign::Minus),
    },
    CatalogueEntry {
        name: "W_13A",
        construction: "Paley conference matrix over GF(13), Re c = (-1 + √13)/12",
        command: "construct theorem2 --q 13 --sign +",
        build: || conference_to_chm(&paley_conference(13)?, Sign::Plus),
    },
    CatalogueEntry {
        name: "W_13B",
        construction: "Paley conference matrix over GF(13), Re c = (-1 - √13)/12",
        command: "construct theorem2 --q 13 --sign -",
        build: || conference_to_chm(&paley_conference(13)?, Sign::Minus),
    },
];

fn catalogue(ctx: &Ctx) -> Outcome<()> {
    let mut rows = Vec::new();
    for e in CATALOGUE {
        let h = (e.build)()?;
        rows.push((e, h.order(), backend_label(&h), verify_chm(&h).is_ok()));
    }
    let json = json!({
        "families": rows.iter().map(|(e, n, backend, ok)| json!({
            "name": e.name, "order": n, "backend": backend, "verified": ok,
            "construction": e.construction, "command": e.command,
        })).collect::<Vec<_>>(),
        "fixtures": FIXTURE_NAMES,
    });
    ctx.emit(json, || {
        let mut s = String::new();
        for (e, n, backend, ok) in &rows {
            let status = if *ok { "verified" } else { "FAILED" };
            s.push_str(&format!("{:<6} order {:>2}  {:<20} {:<9} {}\n", e.name, n, backend, status, e.command));
        }
        s.push_str(&format!("fixtures: {}\n", FIXTURE_NAMES.join(", ")));
        s
    })
}

fn run(cli: Cli) -> Outcome<()> {
    let mut engine = match cli.workers {
        Some(w) => Engine::new(usize::from(w)),
        None => Engine::default(),
    };
    engine.budget = Budget {
        max_minors: cli.budget_minors,
        max_time: cli.budget_seconds.map(Duration::from_secs_f64),
    };
    let ctx = Ctx { format: cli.format, output: cli.output, engine };
    match &cli.command {
        Command::Construct { what } => {
            let h = construct(what)?;
            ctx.emit(h.to_json(), || h.render_text())
        }
        Command::Verify { file } => verify(&ctx, file),
        Command::Invariant { what: Invariant::Haagerup { file } } => {
            let lambda = haagerup_set(&load_chm(file)?);
            ctx.emit(lambda.to_json(), || lambda.to_string())
        }
        Command::Invariant { what: Invariant::Fingerprint { file, dmax } } => {
            let fp = fingerprint(&load_chm(file)?, *dmax, &ctx.engine)?;
            ctx.emit(fp.to_json(), || fp.to_string())
        }
        Command::Compare { first, second, dmax } => {
            let (a, b) = (load_chm(first)?, load_chm(second)?);
            let dmax = dmax.unwrap_or_else(|| default_dmax(a.order()));
            let verdict = certify_inequivalent(&a, &b, dmax, &ctx.engine)?;
            ctx.emit(verdict.to_json(), || verdict.to_string())
        }
        Command::Census { matrix, d, count, seed, exhaustive } => census(&ctx, matrix, *d, *count, *seed, *exhaustive),
        Command::Catalogue => catalogue(&ctx),
        Command::Duality { file, d } => {
            let r = duality_check(&load_chm(file)?, *d, &ctx.engine)?;
            ctx.emit(
                json!({
                    "ok": true, "n": r.n, "d": r.d, "scale_sq": format_rational(&r.scale_sq),
                    "low": r.low.to_json(), "high": r.high.to_json(),
                }),
                || format!("ok: n = {}, scale on |det|² = {}\n{}\n{}", r.n, format_rational(&r.scale_sq), r.low, r.high),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
