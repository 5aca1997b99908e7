//! The `reqlens` command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path as FsPath, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use reqlens_core::checker::lint_class_names;
use reqlens_core::stories::{story_class, story_manifest};
use reqlens_core::testgen::build_test_skeletons;
use reqlens_core::{
    build_model, driver_story, extract_stories, parse_source, print_class, sort_diagnostics,
    CheckConfig, CheckError, Checker, Code, Diagnostic, Model, Severity, SourceFile, Story,
    StoryError, StoryRule,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "reqlens",
    version,
    about = "Checks, story extraction and test generation for RSL requirements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check scenario routines, chains and invariant feasibility
    Check(CheckArgs),
    /// Extract use-case stories into an inheriting stories class
    Stories(GenerateArgs),
    /// Generate test skeletons for the stories of a class
    Testgen(GenerateArgs),
    /// Report redundant invariant clauses and class name style
    Lint(ReportArgs),
    /// Syntax-check files
    Parse(ReportArgs),
}

#[derive(Args)]
struct ReportArgs {
    /// RSL files or directories containing them
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    report: ReportArgs,
    /// Check only this routine, written CLASS.NAME
    #[arg(long, value_name = "CLASS.NAME")]
    routine: Option<String>,
    /// Check that each call's postcondition establishes the next call's precondition
    #[arg(long)]
    chain: bool,
    /// Treat equal arguments as giving equal predicate results
    #[arg(long)]
    functional_equality: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_name = "NAME")]
    class: String,
    /// Only this routine of the class
    #[arg(long, value_name = "NAME")]
    routine: Option<String>,
    /// Directory for the generated files; standard output when absent
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorChoice {
    Auto,
    Always,
    Never,
}

impl ColorChoice {
    pub fn from_env() -> Result<ColorChoice> {
        match std::env::var("REQLENS_COLOR") {
            Err(_) => Ok(ColorChoice::Auto),
            Ok(v) => match v.as_str() {
                "" | "auto" => Ok(ColorChoice::Auto),
                "always" => Ok(ColorChoice::Always),
                "never" => Ok(ColorChoice::Never),
                other => bail!("REQLENS_COLOR must be auto, always or never, not `{other}`"),
            },
        }
    }

    fn enabled(self, is_terminal: bool) -> bool {
        match self {
            ColorChoice::Auto => is_terminal,
            ColorChoice::Always => true,
            ColorChoice::Never => false,
        }
    }
}

/// Where command output goes.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    pub color: bool,
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let is_terminal = stdout.is_terminal();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let color = match ColorChoice::from_env() {
        Ok(c) => c.enabled(is_terminal),
        Err(e) => {
            let _ = writeln!(err, "reqlens: {e}");
            return EXIT_USAGE;
        }
    };
    run_with(
        argv,
        &mut Io {
            out: &mut out,
            err: &mut err,
            color,
        },
    )
}

pub fn run_with<I, T>(argv: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(io.out, "{e}");
                EXIT_OK
            } else {
                let _ = write!(io.err, "{e}");
                EXIT_USAGE
            };
        }
    };
    let result = match cli.command {
        Command::Check(args) => check(args, io),
        Command::Stories(args) => stories(args, io),
        Command::Testgen(args) => testgen(args, io),
        Command::Lint(args) => lint(args, io),
        Command::Parse(args) => parse(args, io),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "reqlens: {e:#}");
            EXIT_USAGE
        }
    }
}

struct Inputs {
    names: Vec<String>,
    files: Vec<SourceFile>,
}

/// Files in argument order, with directories replaced by their `.rsl`
/// files in name order. Every unreadable path is reported before failing.
fn load(paths: &[PathBuf], err: &mut dyn Write) -> Result<Inputs> {
    let mut expanded = Vec::new();
    let mut failures = 0;
    for p in paths {
        if p.is_dir() {
            match rsl_files_in(p) {
                Ok(files) => expanded.extend(files),
                Err(e) => {
                    writeln!(err, "reqlens: cannot read {}: {e}", p.display())?;
                    failures += 1;
                }
            }
        } else {
            expanded.push(p.clone());
        }
    }
    let mut inputs = Inputs {
        names: Vec::new(),
        files: Vec::new(),
    };
    for p in expanded {
        let name = p.to_string_lossy().into_owned();
        match fs::read_to_string(&p) {
            Ok(text) => {
                inputs.files.push(parse_source(&name, &text));
                inputs.names.push(name);
            }
            Err(e) => {
                writeln!(err, "reqlens: cannot read {name}: {e}")?;
                failures += 1;
            }
        }
    }
    if failures > 0 {
        bail!("{failures} input(s) could not be read");
    }
    Ok(inputs)
}

fn rsl_files_in(dir: &FsPath) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "rsl") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

impl Inputs {
    fn parse_diagnostics(&self) -> Vec<Diagnostic> {
        self.files
            .iter()
            .flat_map(|f| f.diagnostics.iter().map(|d| d.to_diagnostic()))
            .collect()
    }

    fn has_parse_errors(&self) -> bool {
        self.files.iter().any(|f| f.has_errors())
    }

    fn model(&self) -> std::result::Result<Model, Vec<Diagnostic>> {
        let classes = self
            .files
            .iter()
            .flat_map(|f| f.classes.iter().cloned())
            .collect();
        build_model(classes).map_err(|errors| {
            errors
                .0
                .iter()
                .map(|e| {
                    Diagnostic::error(Code::ResolutionError, e.location().clone(), e.to_string())
                })
                .collect()
        })
    }
}

/// Parses and resolves the inputs. `Err` carries the diagnostics that stop
/// any further analysis.
fn analyze(inputs: &Inputs) -> std::result::Result<(Model, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut diags = inputs.parse_diagnostics();
    if inputs.has_parse_errors() {
        return Err(diags);
    }
    match inputs.model() {
        Ok(model) => Ok((model, diags)),
        Err(errors) => {
            diags.extend(errors);
            Err(diags)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub errors: usize,
    pub warnings: usize,
    pub infos: usize,
}

impl Summary {
    fn of(diags: &[Diagnostic]) -> Summary {
        let mut s = Summary::default();
        for d in diags {
            match d.severity {
                Severity::Error => s.errors += 1,
                Severity::Warning => s.warnings += 1,
                Severity::Info => s.infos += 1,
            }
        }
        s
    }

    fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            EXIT_FINDINGS
        } else {
            EXIT_OK
        }
    }
}

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct JsonDiagnostic<'a> {
    severity: Severity,
    code: Code,
    file: &'a str,
    line: u32,
    column: u32,
    message: &'a str,
    witness: Option<BTreeMap<String, bool>>,
}

#[derive(Serialize)]
struct FileReport<'a> {
    file: &'a str,
    diagnostics: Vec<JsonDiagnostic<'a>>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    tool: Tool,
    command: &'a str,
    inputs: &'a [String],
    files: Vec<FileReport<'a>>,
    summary: Summary,
}

fn json_report<'a>(command: &'a str, inputs: &'a [String], diags: &'a [Diagnostic]) -> Report<'a> {
    let mut order: Vec<&str> = inputs.iter().map(String::as_str).collect();
    let mut extra: Vec<&str> = diags
        .iter()
        .map(|d| d.location.file.as_str())
        .filter(|f| !order.contains(f))
        .collect();
    extra.sort();
    extra.dedup();
    order.extend(extra);
    let files = order
        .into_iter()
        .map(|file| FileReport {
            file,
            diagnostics: diags
                .iter()
                .filter(|d| d.location.file == file)
                .map(|d| JsonDiagnostic {
                    severity: d.severity,
                    code: d.code,
                    file: &d.location.file,
                    line: d.location.line,
                    column: d.location.column,
                    message: &d.message,
                    witness: d.witness.as_ref().map(|w| w.to_map()),
                })
                .collect(),
        })
        .collect();
    Report {
        schema: REPORT_SCHEMA,
        tool: Tool {
            name: "reqlens",
            version: env!("CARGO_PKG_VERSION"),
        },
        command,
        inputs,
        files,
        summary: Summary::of(diags),
    }
}

fn paint(text: &str, severity: Severity, color: bool) -> String {
    if !color {
        return text.to_string();
    }
    let code = match severity {
        Severity::Error => "1;31",
        Severity::Warning => "1;33",
        Severity::Info => "1;36",
    };
    format!("\x1b[{code}m{text}\x1b[0m")
}

fn write_text(w: &mut dyn Write, diags: &[Diagnostic], color: bool) -> io::Result<()> {
    for d in diags {
        writeln!(
            w,
            "{}: {}: {}",
            d.location,
            paint(&format!("{}[{}]", d.severity, d.code), d.severity, color),
            d.message
        )?;
        if let Some(witness) = &d.witness {
            writeln!(w, "    witness: {witness}")?;
        }
    }
    Ok(())
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn write_summary(w: &mut dyn Write, s: &Summary) -> io::Result<()> {
    writeln!(
        w,
        "{}, {}, {}",
        plural(s.errors, "error"),
        plural(s.warnings, "warning"),
        plural(s.infos, "info")
    )
}

/// Sorts `diags`, writes them in `format` and returns the exit code.
fn report(
    command: &str,
    inputs: &[String],
    mut diags: Vec<Diagnostic>,
    format: Format,
    io: &mut Io<'_>,
) -> Result<i32> {
    sort_diagnostics(&mut diags);
    let summary = Summary::of(&diags);
    match format {
        Format::Text => {
            write_text(io.out, &diags, io.color)?;
            write_summary(io.out, &summary)?;
        }
        Format::Json => {
            let report = json_report(command, inputs, &diags);
            serde_json::to_writer_pretty(&mut *io.out, &report)?;
            writeln!(io.out)?;
        }
    }
    Ok(summary.exit_code())
}

fn parse(args: ReportArgs, io: &mut Io<'_>) -> Result<i32> {
    let inputs = load(&args.files, io.err)?;
    let diags = inputs.parse_diagnostics();
    report("parse", &inputs.names, diags, args.format, io)
}

fn lint(args: ReportArgs, io: &mut Io<'_>) -> Result<i32> {
    let inputs = load(&args.files, io.err)?;
    let (model, mut diags) = match analyze(&inputs) {
        Ok(x) => x,
        Err(diags) => return report("lint", &inputs.names, diags, args.format, io),
    };
    let checker = Checker::new(&model, CheckConfig::default());
    for class in model.classes() {
        match checker.lint_redundant_invariants(class.name()) {
            Ok(d) => diags.extend(d),
            Err(e) => diags.push(check_failure(&model, class.name(), None, e)?),
        }
    }
    diags.extend(lint_class_names(&model));
    report("lint", &inputs.names, diags, args.format, io)
}

/// Turns a solver failure into a diagnostic; any other error is a usage
/// failure.
fn check_failure(
    model: &Model,
    class: &str,
    routine: Option<&str>,
    e: CheckError,
) -> Result<Diagnostic> {
    match e {
        CheckError::Logic(logic) => {
            let location = model
                .location_of(class, routine)
                .cloned()
                .unwrap_or_default();
            let what = match routine {
                Some(r) => format!("{class}.{r}"),
                None => class.to_string(),
            };
            Ok(Diagnostic::error(
                Code::CapacityExceeded,
                location,
                format!("{what}: {logic}"),
            ))
        }
        other => Err(other.into()),
    }
}

fn split_routine(spec: &str) -> Result<(String, String)> {
    match spec.split_once('.') {
        Some((c, r)) if !c.is_empty() && !r.is_empty() => Ok((c.to_string(), r.to_string())),
        _ => bail!("--routine expects CLASS.NAME, got `{spec}`"),
    }
}

fn check(args: CheckArgs, io: &mut Io<'_>) -> Result<i32> {
    let inputs = load(&args.report.files, io.err)?;
    let format = args.report.format;
    let (model, mut diags) = match analyze(&inputs) {
        Ok(x) => x,
        Err(diags) => return report("check", &inputs.names, diags, format, io),
    };
    let checker = Checker::new(
        &model,
        CheckConfig {
            functional_equality: args.functional_equality,
            ..CheckConfig::default()
        },
    );

    let targets: Vec<(String, String)> = match &args.routine {
        Some(spec) => {
            let (class, routine) = split_routine(spec)?;
            let c = model
                .class(&class)
                .ok_or_else(|| anyhow!("unknown class {class}"))?;
            let f = c
                .feature(&routine)
                .ok_or_else(|| anyhow!("class {class} has no routine {routine}"))?;
            if f.decl.body().is_none() {
                bail!("{class}.{routine} has no body to check");
            }
            vec![(class, routine)]
        }
        None => {
            for class in model.classes() {
                match checker.check_invariant_feasibility(class.name()) {
                    Ok(d) => diags.extend(d),
                    Err(e) => diags.push(check_failure(&model, class.name(), None, e)?),
                }
            }
            model
                .classes()
                .flat_map(|c| {
                    c.features()
                        .iter()
                        .filter(|f| {
                            f.origin == c.name()
                                && f.decl.body().is_some_and(|b| !b.statements.is_empty())
                        })
                        .map(|f| (c.name().to_string(), f.decl.name.clone()))
                })
                .collect()
        }
    };

    for (class, routine) in &targets {
        let result = if args.chain {
            match checker.check_chain(class, routine) {
                Err(CheckError::NotAPlainSequence { location, .. }) => {
                    diags.push(Diagnostic::warning(
                        Code::NotAPlainSequence,
                        location,
                        format!("{class}.{routine} is not a plain call sequence; checked as a scenario instead"),
                    ));
                    checker.check_scenario(class, routine)
                }
                other => other,
            }
        } else {
            checker.check_scenario(class, routine)
        };
        match result {
            Ok(d) => diags.extend(d),
            Err(e) => diags.push(check_failure(&model, class, Some(routine), e)?),
        }
    }
    report("check", &inputs.names, diags, format, io)
}

fn story_file_stem(class: &str) -> String {
    format!("{}_stories", class.to_lowercase())
}

/// Stories of every routine with a body in `class` (or only `routine`).
/// Routines without stories give an info diagnostic, or a driver story when
/// `drivers` is set.
fn collect_stories(
    model: &Model,
    class: &str,
    routine: Option<&str>,
    drivers: bool,
    diags: &mut Vec<Diagnostic>,
) -> Result<Vec<Story>> {
    let c = model
        .class(class)
        .ok_or_else(|| anyhow!("unknown class {class}"))?;
    let routines: Vec<String> = match routine {
        Some(r) => {
            let f = c
                .feature(r)
                .ok_or_else(|| anyhow!("class {class} has no routine {r}"))?;
            if f.decl.body().is_none() {
                bail!("{class}.{r} has no body");
            }
            vec![r.to_string()]
        }
        None => c
            .features()
            .iter()
            .filter(|f| f.decl.body().is_some())
            .map(|f| f.decl.name.clone())
            .collect(),
    };
    let mut stories = Vec::new();
    for r in &routines {
        match extract_stories(model, class, r) {
            Ok(s) => stories.extend(s),
            Err(StoryError::NothingToExtract { .. }) if drivers => {
                stories.push(driver_story(model, class, r)?)
            }
            Err(e @ StoryError::NothingToExtract { .. }) => {
                let location = model
                    .location_of(class, Some(r))
                    .cloned()
                    .unwrap_or_default();
                diags.push(Diagnostic::info(
                    Code::NothingToExtract,
                    location,
                    e.to_string(),
                ));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(stories)
}

struct Output {
    file_name: String,
    text: String,
}

/// Writes each output into `dir`, or its text to standard output.
fn emit(outputs: &[Output], dir: Option<&FsPath>, io: &mut Io<'_>) -> Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for o in outputs {
                let path = dir.join(&o.file_name);
                fs::write(&path, &o.text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                writeln!(io.err, "wrote {}", path.display())?;
            }
        }
        None => {
            for o in outputs.iter().filter(|o| o.file_name.ends_with(".rsl")) {
                write!(io.out, "{}", o.text)?;
            }
        }
    }
    Ok(())
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn story_outputs(stories: &[Story], class: &str) -> Result<Vec<Output>> {
    let stem = story_file_stem(class);
    let rsl = format!("{stem}.rsl");
    let text = print_class(&story_class(stories, class)?);
    let manifest = json_text(&story_manifest(stories, &rsl))?;
    Ok(vec![
        Output {
            file_name: rsl,
            text,
        },
        Output {
            file_name: format!("{stem}.json"),
            text: manifest,
        },
    ])
}

/// Writes generator diagnostics to standard error and returns the exit code.
fn finish_generation(mut diags: Vec<Diagnostic>, io: &mut Io<'_>) -> Result<i32> {
    sort_diagnostics(&mut diags);
    write_text(io.err, &diags, io.color)?;
    Ok(Summary::of(&diags).exit_code())
}

fn stories(args: GenerateArgs, io: &mut Io<'_>) -> Result<i32> {
    let inputs = load(&args.files, io.err)?;
    let (model, mut diags) = match analyze(&inputs) {
        Ok(x) => x,
        Err(diags) => return finish_generation(diags, io),
    };
    let stories = collect_stories(
        &model,
        &args.class,
        args.routine.as_deref(),
        false,
        &mut diags,
    )?;
    if !stories.is_empty() {
        emit(
            &story_outputs(&stories, &args.class)?,
            args.out.as_deref(),
            io,
        )?;
    }
    finish_generation(diags, io)
}

fn testgen(args: GenerateArgs, io: &mut Io<'_>) -> Result<i32> {
    let inputs = load(&args.files, io.err)?;
    let (model, mut diags) = match analyze(&inputs) {
        Ok(x) => x,
        Err(diags) => return finish_generation(diags, io),
    };
    let stories = collect_stories(
        &model,
        &args.class,
        args.routine.as_deref(),
        true,
        &mut diags,
    )?;
    let mut outputs = Vec::new();
    if stories.iter().any(|s| s.rule != StoryRule::Driver) {
        let extracted: Vec<Story> = stories
            .iter()
            .filter(|s| s.rule != StoryRule::Driver)
            .cloned()
            .collect();
        outputs.extend(story_outputs(&extracted, &args.class)?);
    }
    for skeleton in build_test_skeletons(&model, &stories)? {
        let stem = skeleton.file_name().trim_end_matches(".rsl").to_string();
        outputs.push(Output {
            file_name: skeleton.file_name(),
            text: skeleton.render(),
        });
        outputs.push(Output {
            file_name: format!("{stem}.json"),
            text: json_text(&skeleton.manifest())?,
        });
    }
    emit(&outputs, args.out.as_deref(), io)?;
    finish_generation(diags, io)
}
