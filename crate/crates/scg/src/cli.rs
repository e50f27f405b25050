//! The `scg` command line. [`run`] does the work so tests can drive it in-process.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use scg_core::derive::{self, ReplayError, WordError};
use scg_core::geffert::{self, GeffertGrammar, GeffertReplayError, GeffertRule};
use scg_core::{
    check_geffert, check_lemma1, check_three_nt, decide_membership, enumerate, BoundedLanguage, CheckError,
    EnumerationBounds, Family, MembershipVerdict, Reach, ScatteredContextGrammar, ShowcaseError, ShowcaseParams,
    SweepReport, TransformError, Word,
};

use crate::format::{self, GrammarFile, ParseError};

/// Exit status for success and `equal`.
pub const EXIT_OK: i32 = 0;
/// Exit status for a language mismatch, a non-member word or an invariant violation.
pub const EXIT_MISMATCH: i32 = 1;
/// Exit status for usage, IO and parse errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "scg", version, about = "Scattered context grammar workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
struct BoundsArgs {
    /// Longest sentential form kept during search.
    #[arg(long, default_value_t = EnumerationBounds::DEFAULT_MAX_FORM_LENGTH)]
    max_len: usize,
    /// Longest derivation, in steps [default: 4 * max-len].
    #[arg(long)]
    max_depth: Option<usize>,
    /// Most distinct forms visited.
    #[arg(long, default_value_t = EnumerationBounds::DEFAULT_MAX_FORMS)]
    max_forms: usize,
}

impl BoundsArgs {
    fn bounds(&self) -> EnumerationBounds {
        let b = EnumerationBounds::new(self.max_len).with_max_forms(self.max_forms);
        match self.max_depth {
            Some(d) => b.with_max_depth(d),
            None => b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShowcaseName {
    Example1,
    Lemma1,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print descriptional metrics of a grammar file.
    Metrics { file: PathBuf },
    /// List the words found by a bounded breadth-first search.
    Enumerate {
        file: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Decide membership of a word (whitespace-separated tokens, `@` for the empty word).
    Member {
        file: PathBuf,
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        word: Vec<String>,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Build the three-nonterminal grammar of a Geffert file.
    Transform {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Provenance sidecar [default: <output>.provenance].
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Compare the bounded languages of two grammar files.
    Diff {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Compare words of at most this many tokens [default: max-len].
        #[arg(long)]
        word_len: Option<usize>,
    },
    /// Emit a built-in grammar.
    Showcase {
        name: ShowcaseName,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        l: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep reachable forms and test a family invariant.
    Check {
        file: PathBuf,
        #[arg(long)]
        family: Family,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Visit only forms that can still derive a terminal word.
        #[arg(long)]
        productive: bool,
    },
    /// Re-execute a derivation trace and print every form.
    Replay { grammar: PathBuf, trace: PathBuf },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Showcase(#[from] ShowcaseError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    GeffertReplay(#[from] GeffertReplayError),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Replay(_) | CliError::GeffertReplay(_) => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        }
    }
}

/// Runs one invocation and returns its exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load(path: &Path, err: &mut dyn Write) -> Result<GrammarFile, CliError> {
    let file = format::parse_any(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })?;
    if let GrammarFile::Scg(g) = &file {
        for (a, b) in g.duplicate_productions() {
            writeln!(err, "warning: {}: productions {a} and {b} are identical", path.display())?;
        }
    }
    Ok(file)
}

fn load_scg(path: &Path, err: &mut dyn Write, what: &str) -> Result<ScatteredContextGrammar, CliError> {
    match load(path, err)? {
        GrammarFile::Scg(g) => Ok(g),
        GrammarFile::Geffert(_) => Err(CliError::Usage(format!("{what} expects an scg file"))),
    }
}

fn load_geffert(path: &Path, err: &mut dyn Write, what: &str) -> Result<GeffertGrammar, CliError> {
    match load(path, err)? {
        GrammarFile::Geffert(g) => Ok(g),
        GrammarFile::Scg(_) => Err(CliError::Usage(format!("{what} expects a geffert file"))),
    }
}

fn language(file: &GrammarFile, bounds: &EnumerationBounds) -> BoundedLanguage {
    match file {
        GrammarFile::Scg(g) => enumerate(g, bounds),
        GrammarFile::Geffert(g) => geffert::enumerate_geffert(g, bounds),
    }
}

fn print_bounds(out: &mut dyn Write, b: &EnumerationBounds) -> io::Result<()> {
    writeln!(
        out,
        "bounds: max-len {} max-depth {} max-forms {}",
        b.max_form_length, b.max_depth, b.max_forms
    )
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Metrics { file } => {
            match load(&file, err)? {
                GrammarFile::Scg(g) => writeln!(out, "format: scg\n{}", g.metrics())?,
                GrammarFile::Geffert(g) => {
                    writeln!(out, "format: geffert")?;
                    writeln!(out, "nonterminals: {}", geffert::NONTERMINALS.len())?;
                    writeln!(out, "terminals: {}", g.terminals().len())?;
                    writeln!(out, "rules: {}", g.rules().len())?;
                    for (shape, n) in rule_shapes(&g) {
                        writeln!(out, "{shape} rules: {n}")?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Enumerate { file, bounds } => {
            let file = load(&file, err)?;
            let bounds = bounds.bounds();
            print_bounds(out, &bounds)?;
            let lang = language(&file, &bounds);
            for w in &lang.words {
                writeln!(out, "{w}")?;
            }
            writeln!(out, "exhaustive: {}", lang.exhaustive)?;
            writeln!(out, "visited: {}", lang.visited_forms)?;
            Ok(EXIT_OK)
        }
        Command::Member { file, word, bounds } => {
            let file = load(&file, err)?;
            let bounds = bounds.bounds();
            let word = Word::parse(&word.join(" "));
            print_bounds(out, &bounds)?;
            match file {
                GrammarFile::Scg(g) => match decide_membership(&g, word.tokens(), &bounds)? {
                    MembershipVerdict::Member(trace) => {
                        writeln!(out, "member")?;
                        out.write_all(format::render_trace(&g, &trace).as_bytes())?;
                        Ok(EXIT_OK)
                    }
                    MembershipVerdict::NotMemberExhaustive => {
                        writeln!(out, "not a member")?;
                        Ok(EXIT_MISMATCH)
                    }
                    MembershipVerdict::Unknown => {
                        writeln!(out, "unknown")?;
                        Ok(EXIT_MISMATCH)
                    }
                },
                GrammarFile::Geffert(g) => match geffert::find_geffert_trace(&g, word.tokens(), &bounds)? {
                    Some(trace) => {
                        writeln!(out, "member")?;
                        out.write_all(format::render_geffert_trace(&g, &trace).as_bytes())?;
                        Ok(EXIT_OK)
                    }
                    None => {
                        writeln!(out, "unknown")?;
                        Ok(EXIT_MISMATCH)
                    }
                },
            }
        }
        Command::Transform {
            file,
            output,
            provenance,
        } => {
            let g = load_geffert(&file, err, "transform")?;
            let result = scg_core::transform(&g)?;
            let sidecar = provenance.unwrap_or_else(|| {
                let mut p = output.clone().into_os_string();
                p.push(".provenance");
                p.into()
            });
            write_file(&output, &format::render_grammar(&result.grammar))?;
            write_file(&sidecar, &format::render_provenance(&result.provenance))?;
            writeln!(
                out,
                "wrote {} ({} productions) and {}",
                output.display(),
                result.grammar.productions().len(),
                sidecar.display()
            )?;
            Ok(EXIT_OK)
        }
        Command::Diff {
            first,
            second,
            bounds,
            word_len,
        } => {
            let (a, b) = (load(&first, err)?, load(&second, err)?);
            let bounds = bounds.bounds();
            let word_len = word_len.unwrap_or(bounds.max_form_length);
            print_bounds(out, &bounds)?;
            writeln!(out, "word-len: {word_len}")?;
            let (la, lb) = (language(&a, &bounds), language(&b, &bounds));
            writeln!(out, "exhaustive: {} {}", la.exhaustive, lb.exhaustive)?;
            let (wa, wb) = (la.words_up_to(word_len), lb.words_up_to(word_len));
            let only_first = wa.difference(&wb).next();
            let only_second = wb.difference(&wa).next();
            match (only_first, only_second) {
                (None, None) => {
                    writeln!(out, "equal")?;
                    Ok(EXIT_OK)
                }
                (first_word, second_word) => {
                    writeln!(out, "differ")?;
                    if let Some(w) = first_word.or(second_word) {
                        writeln!(out, "counterexample: {w}")?;
                    }
                    if let Some(w) = first_word {
                        writeln!(out, "only in first: {w}")?;
                    }
                    if let Some(w) = second_word {
                        writeln!(out, "only in second: {w}")?;
                    }
                    Ok(EXIT_MISMATCH)
                }
            }
        }
        Command::Showcase { name, k, l, output } => {
            let g = match name {
                ShowcaseName::Example1 => {
                    if k.is_some() || l.is_some() {
                        return Err(CliError::Usage("example1 takes no parameters".into()));
                    }
                    scg_core::example1()
                }
                ShowcaseName::Lemma1 => {
                    let (Some(k), Some(l)) = (k, l) else {
                        return Err(CliError::Usage("lemma1 needs --k and --l".into()));
                    };
                    scg_core::lemma1(ShowcaseParams::new(k, l)?)
                }
            };
            let text = format::render_grammar(&g);
            match output {
                Some(path) => write_file(&path, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            file,
            family,
            bounds,
            productive,
        } => {
            let bounds = bounds.bounds();
            let reach = if productive { Reach::Productive } else { Reach::All };
            match family {
                Family::Geffert => {
                    let g = load_geffert(&file, err, "family geffert")?;
                    print_bounds(out, &bounds)?;
                    let report = check_geffert(&g, &bounds);
                    report_sweep(out, family, &report, |t| format::render_geffert_trace(&g, t))
                }
                Family::ThreeNt | Family::Lemma1 => {
                    let g = load_scg(&file, err, &format!("family {family}"))?;
                    print_bounds(out, &bounds)?;
                    let report = if family == Family::ThreeNt {
                        check_three_nt(&g, &bounds, reach)?
                    } else {
                        check_lemma1(&g, &bounds, reach)?
                    };
                    report_sweep(out, family, &report, |t| format::render_trace(&g, t))
                }
            }
        }
        Command::Replay { grammar, trace } => {
            let text = read(&trace)?;
            let parse_err = |source| CliError::Parse {
                path: trace.clone(),
                source,
            };
            match load(&grammar, err)? {
                GrammarFile::Scg(g) => {
                    let t = format::parse_trace(&g, &text).map_err(parse_err)?;
                    let mut form = t.start.clone();
                    writeln!(out, "{}", g.render_symbols(form.as_slice()))?;
                    for (i, step) in t.steps.iter().enumerate() {
                        form = derive::apply_step(&g, form.as_slice(), step)
                            .map_err(|source| ReplayError { step: i, source })?;
                        writeln!(out, "{}", g.render_symbols(form.as_slice()))?;
                    }
                }
                GrammarFile::Geffert(g) => {
                    let t = format::parse_geffert_trace(&g, &text).map_err(parse_err)?;
                    let mut form = t.start.clone();
                    writeln!(out, "{}", g.render_symbols(form.as_slice()))?;
                    for (i, &step) in t.steps.iter().enumerate() {
                        form = geffert::apply_geffert_step(&g, form.as_slice(), step)
                            .map_err(|source| GeffertReplayError { step: i, source })?;
                        writeln!(out, "{}", g.render_symbols(form.as_slice()))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn report_sweep<T>(
    out: &mut dyn Write,
    family: Family,
    report: &SweepReport<T>,
    render: impl Fn(&T) -> String,
) -> Result<i32, CliError> {
    writeln!(out, "family: {family}")?;
    writeln!(out, "visited: {}", report.visited)?;
    writeln!(out, "violations: {}", report.violations)?;
    if let Some(v) = &report.first {
        writeln!(out, "first violation: {}", v.message)?;
        writeln!(out, "witness:")?;
        out.write_all(render(&v.trace).as_bytes())?;
    }
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_MISMATCH })
}

fn rule_shapes(g: &GeffertGrammar) -> [(&'static str, usize); 3] {
    let count = |f: fn(&GeffertRule) -> bool| g.rules().iter().filter(|r| f(r)).count();
    [
        ("append-terminal", count(|r| matches!(r, GeffertRule::AppendTerminal { .. }))),
        ("bilateral", count(|r| matches!(r, GeffertRule::Bilateral { .. }))),
        ("erase", count(|r| matches!(r, GeffertRule::Erase))),
    ]
}
