use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rsubst::complexity::FamilyParams;
use rsubst::entropy::EngineChoice;
use rsubst::report::{self, FitModel, OutputMode, Report, RunConfig};
use rsubst::{bundled, parse_spec_with_warnings, Budget, Error, LanguageMode, RandomSubstitution};

const EXIT_USAGE: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

/// Analysis of random substitutions: structure, languages, entropy and
/// complexity growth.
#[derive(Parser, Debug)]
#[command(name = "rsubst", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Primitivity, compatibility, constant length, realisation paths and splitting pairs.
    Check(SpecArgs),
    /// Inflation word entropy with certified bounds and frequency analysis.
    Entropy(SpecArgs),
    /// Entropy classification (`--m` powers searched, `--n` language depth).
    Classify(SpecArgs),
    /// Complexity table p(1..=N).
    Language(SpecArgs),
    /// Emit a member of the permutation family as a substitution document.
    Family(FamilyArgs),
    /// Complexity on a geometric grid with a growth fit.
    Complexity(SpecArgs),
    /// List the bundled example names.
    Examples,
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Path to a substitution document, or the name of a bundled example.
    spec: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Block length.
    #[arg(long)]
    ell: usize,
    /// Comma-separated permutations of the first `ell` letters, e.g. `abc,acb`.
    #[arg(long, value_delimiter = ',', conflicts_with = "all")]
    perms: Vec<String>,
    /// Use every permutation (small `ell` only).
    #[arg(long)]
    all: bool,
    /// Write the document here and print the report instead.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long, conflicts_with = "json")]
    text: bool,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Extension margin for subshift words.
    #[arg(long)]
    margin: Option<usize>,
    /// auto, enumerate or recurrence.
    #[arg(long, default_value = "auto")]
    engine: EngineChoice,
    /// legal or subshift. `complexity` defaults to legal, the rest to subshift.
    #[arg(long)]
    mode: Option<LanguageMode>,
    /// JSON output with stable key order.
    #[arg(long)]
    json: bool,
    /// Aligned plain-text output.
    #[arg(long, conflicts_with = "json")]
    text: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// Defaults to $RSUBST_BUDGET_WORDS or 10^7.
    #[arg(long)]
    budget_words: Option<usize>,
    /// Defaults to $RSUBST_BUDGET_BYTES or 1 GiB.
    #[arg(long)]
    budget_bytes: Option<usize>,
    /// Reference value to compare the entropy estimate against.
    #[arg(long)]
    reference: Option<f64>,
    /// polynomial or stretched.
    #[arg(long, default_value = "polynomial")]
    fit: FitModel,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output_mode(json: bool, text: bool) -> OutputMode {
    if json {
        OutputMode::Json
    } else if text {
        OutputMode::Text
    } else {
        OutputMode::Tsv
    }
}

#[derive(Clone, Copy)]
struct Defaults {
    m: usize,
    k: usize,
    n: usize,
    mode: LanguageMode,
}

const fn defaults(m: usize, k: usize, n: usize) -> Defaults {
    Defaults { m, k, n, mode: LanguageMode::Subshift }
}

impl Common {
    fn config(&self, defaults: Defaults) -> RunConfig {
        let mut budget = Budget::from_env();
        if let Some(w) = self.budget_words {
            budget.max_words = w;
        }
        if let Some(b) = self.budget_bytes {
            budget.max_bytes = b;
        }
        RunConfig {
            m: self.m.unwrap_or(defaults.m),
            k: self.k.unwrap_or(defaults.k),
            n: self.n.unwrap_or(defaults.n),
            margin: self.margin,
            engine: self.engine,
            mode: self.mode.unwrap_or(defaults.mode),
            output: output_mode(self.json, self.text),
            threads: self.threads,
            budget,
            reference: self.reference,
            fit: self.fit,
            ..RunConfig::default()
        }
    }
}

enum Failure {
    Usage(String),
    Run(Error),
    Io(String),
    /// The report was written but a table stopped at the budget.
    Truncated,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_spec_error() {
        EXIT_SPEC
    } else if matches!(e, Error::BudgetExceeded { .. }) {
        EXIT_BUDGET
    } else {
        EXIT_PRECONDITION
    }
}

fn load_spec(spec: &str) -> Result<RandomSubstitution, Failure> {
    let path = Path::new(spec);
    let text = if path.exists() {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Run(Error::InvalidSpec(format!("{spec}: {e}"))))?
    } else if let Some(src) = bundled::source(spec) {
        src.to_string()
    } else {
        return Err(Failure::Run(Error::InvalidSpec(format!(
            "{spec}: no such file or bundled example"
        ))));
    };
    let (sub, warnings) = parse_spec_with_warnings(&text)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(sub)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn run_spec(
    args: &SpecArgs,
    defaults: Defaults,
    cmd: fn(&RandomSubstitution, &RunConfig) -> rsubst::Result<Report>,
) -> Result<(), Failure> {
    let sub = load_spec(&args.spec)?;
    let cfg = args.common.config(defaults);
    cfg.validate()?;
    let report = cfg.install(|| cmd(&sub, &cfg))??;
    emit(&report.render(cfg.output), args.common.out.as_deref())?;
    if report.truncated() {
        return Err(Failure::Truncated);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Check(a) => run_spec(a, defaults(4, 1, 8), report::cmd_check),
        Command::Entropy(a) => run_spec(a, defaults(12, 4, 1), report::cmd_entropy),
        Command::Classify(a) => run_spec(a, defaults(4, 1, 12), report::cmd_classify),
        Command::Language(a) => run_spec(a, defaults(1, 1, 12), report::cmd_language),
        Command::Complexity(a) => {
            // beyond 81 the stretched envelope relies on count lower bounds
            let n = if a.common.fit == FitModel::Stretched { 81 } else { 243 };
            let d = Defaults { mode: LanguageMode::Legal, ..defaults(8, 8, n) };
            run_spec(a, d, report::cmd_complexity)
        }
        Command::Family(a) => {
            let params = if a.all {
                FamilyParams::all_permutations(a.ell)?
            } else {
                if a.perms.is_empty() {
                    return Err(Failure::Usage("family needs --perms or --all".into()));
                }
                let perms: Vec<&str> = a.perms.iter().map(String::as_str).collect();
                FamilyParams::new(a.ell, &perms)?
            };
            let (doc, report) = report::cmd_family(&params)?;
            match &a.out {
                Some(p) => {
                    emit(&doc, Some(p))?;
                    emit(&report.render(output_mode(a.json, a.text)), None)
                }
                None => emit(&doc, None),
            }
        }
        Command::Examples => {
            let mut s = String::new();
            for n in bundled::names() {
                s.push_str(n);
                s.push('\n');
            }
            emit(&s, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Truncated) => {
            eprintln!("error: expansion budget exceeded; output truncated at the last completed length");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
