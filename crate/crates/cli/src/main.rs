use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use cartier::field::parse_u32_list;
use cartier::poly::split_top_level;
use cartier::search::DEFAULT_COLLECT_LIMIT;
use cartier::verify::{
    find_p_rank_witnesses, reproduce_script, verify_genus_p_minus_1, verify_theorem1, Script,
    ScriptOptions, DEFAULT_SEED, SCRIPT2_SAMPLES,
};
use cartier::{
    Curve, CurveError, Elem, Field, FieldError, Mode, Poly, PolyError, RunOptions, SearchError,
    SearchReport, SearchSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Cartier-Manin matrices, a-numbers and p-ranks of hyperelliptic curves.
#[derive(Parser, Debug)]
#[command(name = "cartier", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants of a single curve y^2 = f(x).
    Invariants {
        #[command(flatten)]
        field: FieldArgs,
        /// Coefficients of f, ascending powers, e.g. "0,1,0,0,0,1".
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Search a family of curves.
    Search(Box<SearchArgs>),
    /// Run a verification suite.
    Verify {
        suite: Suite,
        /// Characteristic (theorem1, p-rank-witnesses).
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        genus: Option<usize>,
        #[command(flatten)]
        exec: ExecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rerun one of the two published search listings.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        script: u8,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = SCRIPT2_SAMPLES)]
        samples: u64,
        #[command(flatten)]
        exec: ExecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    Theorem1,
    PropP5,
    PRankWitnesses,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Odd prime characteristic.
    #[arg(long)]
    p: u64,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Monic irreducible modulus, ascending, e.g. "[1,0,1]".
    #[arg(long = "mod")]
    modulus: Option<String>,
}

#[derive(Args, Debug)]
struct ExecArgs {
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Cap on exhaustive candidates.
    #[arg(long, default_value_t = cartier::search::DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// JSON report on stdout (the default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Witness rows as CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep elapsed_ms in reports (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, conflicts_with = "degree")]
    genus: Option<usize>,
    /// Degree of f (odd); alternative to --genus.
    #[arg(long)]
    degree: Option<usize>,
    /// Fixed factor of f; --fix and --free then index its cofactor.
    #[arg(long, allow_hyphen_values = true)]
    factor: Option<String>,
    /// Pinned coefficients, e.g. "c0=0,c9=1". Defaults to c0=0 and a monic top.
    #[arg(long)]
    fix: Option<String>,
    /// Free coefficient indices; defaults to every index not fixed.
    #[arg(long)]
    free: Option<String>,
    #[arg(long, conflicts_with = "random")]
    exhaustive: bool,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    require_smooth: bool,
    #[arg(long)]
    target_a: Option<usize>,
    #[arg(long)]
    target_p_rank: Option<usize>,
    /// Skip candidates whose first and last matrix rows are independent.
    #[arg(long)]
    prefilter: bool,
    /// Maximum number of witnesses stored.
    #[arg(long, default_value_t = DEFAULT_COLLECT_LIMIT)]
    limit: usize,
    #[command(flatten)]
    exec: ExecArgs,
    #[command(flatten)]
    out: OutputArgs,
}

/// Exit-code classes.
#[derive(Debug)]
enum Failure {
    Input(String),
    Unsupported(String),
    Budget(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) | Failure::Io(_) => 2,
            Failure::Unsupported(_) => 3,
            Failure::Budget(_) => 4,
        }
    }

    fn line(&self) -> String {
        let (kind, msg) = match self {
            Failure::Input(m) => ("invalid-input", m),
            Failure::Unsupported(m) => ("unsupported", m),
            Failure::Budget(m) => ("budget-exceeded", m),
            Failure::Io(m) => ("io", m),
        };
        format!("error: {kind}: {}", msg.replace('\n', " "))
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::UnsupportedDegree(_) => Failure::Unsupported(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("{}", Failure::Input(first.to_string()).line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Invariants { field, poly, out } => {
            let field = build_field(&field)?;
            let f = parse_poly(&field, &poly)?;
            let curve = Curve::new(f.clone())?;
            let inv = curve.invariants();
            eprintln!(
                "genus {}, smooth {}, rank(A) {}, a-number {}, p-rank {}",
                inv.genus, inv.smooth, inv.rank_a, inv.a_number, inv.p_rank
            );
            let doc = if out.csv {
                cartier::report::witnesses_to_csv(
                    &field,
                    &[cartier::Witness {
                        coeffs: f.coeffs().to_vec(),
                        invariants: inv,
                    }],
                )
                .map_err(|e| Failure::Io(e.to_string()))?
            } else {
                cartier::report::invariants_json(&f, &inv)
            };
            emit(&out, &doc)?;
            Ok(0)
        }
        Command::Search(args) => {
            let spec = build_search_spec(&args)?;
            let report = cartier::run_search_with_threads(&spec, args.exec.threads)?;
            eprintln!(
                "enumerated {}, squarefree {}, rank one {}, matched {}",
                report.counts.enumerated,
                report.counts.squarefree,
                report.counts.rank_matched,
                report.matched()
            );
            emit_search(&args.out, &report)?;
            Ok(0)
        }
        Command::Verify {
            suite,
            p,
            k,
            genus,
            exec,
            out,
        } => {
            let opts = RunOptions {
                threads: exec.threads,
                budget: exec.budget,
            };
            let mut report = match suite {
                Suite::Theorem1 => {
                    let p = p.ok_or_else(|| Failure::Input("theorem1 needs --p".into()))?;
                    let genus =
                        genus.ok_or_else(|| Failure::Input("theorem1 needs --genus".into()))?;
                    verify_theorem1(p, k, genus, &opts)?
                }
                Suite::PropP5 => {
                    if p.is_some_and(|p| p != 5) || genus.is_some_and(|g| g != 4) || k != 1 {
                        return Err(Failure::Input(
                            "prop-p5 runs only at p = 5, k = 1, genus 4".into(),
                        ));
                    }
                    verify_genus_p_minus_1(&opts)?
                }
                Suite::PRankWitnesses => {
                    let p = p.ok_or_else(|| Failure::Input("p-rank-witnesses needs --p".into()))?;
                    if genus.is_some_and(|g| g != 3) || k != 1 {
                        return Err(Failure::Input(
                            "p-rank-witnesses runs at k = 1, genus 3".into(),
                        ));
                    }
                    find_p_rank_witnesses(p, &opts)?.consistency()
                }
            };
            if !out.timing {
                report = report.without_timing();
            }
            eprintln!(
                "{}: expected {}; observed {}; {}",
                report.claim,
                report.expected,
                report.observed,
                if report.pass { "PASS" } else { "FAIL" }
            );
            let doc = if out.csv {
                report.to_csv().map_err(|e| Failure::Io(e.to_string()))?
            } else {
                report.to_json()
            };
            emit(&out, &doc)?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Reproduce {
            script,
            seed,
            samples,
            exec,
            out,
        } => {
            let script = if script == 1 {
                Script::One
            } else {
                Script::Two
            };
            let opts = RunOptions {
                threads: exec.threads,
                budget: exec.budget,
            };
            let mut rep = reproduce_script(script, &ScriptOptions { seed, samples }, &opts)?;
            if !out.timing {
                rep.report = rep.report.without_timing();
            }
            eprintln!("{}", rep.summary());
            let doc = if out.csv {
                rep.report
                    .to_csv()
                    .map_err(|e| Failure::Io(e.to_string()))?
            } else {
                rep.to_json()
            };
            emit(&out, &doc)?;
            Ok(if rep.pass() { 0 } else { 1 })
        }
    }
}

fn build_field(args: &FieldArgs) -> Result<Field, Failure> {
    let modulus = match &args.modulus {
        Some(m) => Some(
            parse_u32_list(m).ok_or_else(|| Failure::Input(format!("invalid modulus `{m}`")))?,
        ),
        None => None,
    };
    Ok(Field::new(args.p, args.k, modulus.as_deref())?)
}

/// Signed integers are read into the prime subfield of any field.
fn parse_coeff(field: &Field, s: &str) -> Option<Elem> {
    match s.trim().parse::<i64>() {
        Ok(n) => Some(field.from_int(n)),
        Err(_) => field.parse_elem(s).ok(),
    }
}

fn parse_poly(field: &Field, s: &str) -> Result<Poly, Failure> {
    let coeffs = split_top_level(s)
        .into_iter()
        .map(|t| parse_coeff(field, t))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Failure::Input(format!("invalid polynomial `{s}`")))?;
    Ok(Poly::from_indices(field, coeffs))
}

fn parse_fix(field: &Field, s: &str) -> Result<BTreeMap<usize, Elem>, Failure> {
    let mut out = BTreeMap::new();
    for part in split_top_level(s) {
        let bad = || Failure::Input(format!("invalid --fix entry `{part}`"));
        let (key, value) = part.split_once('=').ok_or_else(bad)?;
        let index: usize = key
            .trim()
            .strip_prefix('c')
            .and_then(|i| i.parse().ok())
            .ok_or_else(bad)?;
        let value = parse_coeff(field, value).ok_or_else(bad)?;
        if out.insert(index, value).is_some() {
            return Err(bad());
        }
    }
    Ok(out)
}

fn build_search_spec(args: &SearchArgs) -> Result<SearchSpec, Failure> {
    let field = build_field(&args.field)?;
    let degree = match (args.genus, args.degree) {
        (Some(g), None) => 2 * g + 1,
        (None, Some(d)) if d % 2 == 0 => {
            return Err(Failure::Unsupported(format!(
                "unsupported-degree: only odd-degree models are supported, got degree {d}"
            )))
        }
        (None, Some(d)) => d,
        _ => {
            return Err(Failure::Input(
                "one of --genus or --degree is required".into(),
            ))
        }
    };
    if degree < 3 {
        return Err(Failure::Input("degree must be at least 3".into()));
    }
    let factor = match &args.factor {
        Some(s) => Some(parse_poly(&field, s)?),
        None => None,
    };
    let cofactor_degree = degree
        .checked_sub(factor.as_ref().and_then(Poly::degree).unwrap_or(0))
        .ok_or_else(|| Failure::Input("fixed factor degree exceeds the curve degree".into()))?;
    let fixed = match &args.fix {
        Some(s) => parse_fix(&field, s)?,
        None => BTreeMap::from([(0, Elem::ZERO), (cofactor_degree, Elem::ONE)]),
    };
    let free = match &args.free {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().trim_start_matches('c').parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::Input(format!("invalid --free `{s}`")))?,
        None => (0..=cofactor_degree)
            .filter(|i| !fixed.contains_key(i))
            .collect(),
    };
    let mode = if args.random {
        Mode::Random {
            samples: args.samples,
            seed: args.seed,
        }
    } else {
        Mode::Exhaustive
    };
    let spec = SearchSpec {
        field,
        degree,
        factor,
        fixed,
        free,
        mode,
        target_a: args.target_a,
        target_p_rank: args.target_p_rank,
        require_smooth: args.require_smooth,
        collect_limit: args.limit,
        prefilter: args.prefilter,
        budget: args.exec.budget,
    };
    spec.validate()?;
    Ok(spec)
}

fn emit_search(out: &OutputArgs, report: &SearchReport) -> Result<(), Failure> {
    let report = if out.timing {
        report.clone()
    } else {
        report.without_timing()
    };
    let doc = if out.csv {
        report.to_csv().map_err(|e| Failure::Io(e.to_string()))?
    } else {
        report.to_json()
    };
    emit(out, &doc)
}

fn emit(out: &OutputArgs, doc: &str) -> Result<(), Failure> {
    let mut text = doc.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &out.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
