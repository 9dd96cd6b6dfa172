//! Command-line front end. [`run`] is the whole program minus process
//! plumbing, so tests drive it in-process with captured output.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 domain,
//! capability or numerical failure, 4 a failed validation criterion.

mod args;
mod table;

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::error::ErrorKind;
use clap::Parser;
use frizione::analytic::{
    composed_density, density, flight_density, moment, transform, ComposedLaw, LawSelector, MixtureMethod,
    TransformKind, TransformMethod,
};
use frizione::motion::{sample_composed, sample_flights, sample_positions, Conditioning, SampleBatch};
use frizione::stats::empirical_moment;
use frizione::validation::run_suite;
use serde_json::{json, Map, Value};

use args::{Cli, Command, Format, Kind, Method, Output};
pub use table::significant;
use table::Table;

const DEFAULT_SAMPLES: usize = 1000;
const DEFAULT_MIXTURE_SAMPLES: usize = 10_000;
const DEFAULT_TRANSFORM_SAMPLES: usize = 100_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(frizione::Error),
    Io(io::Error),
    /// Output was written; at least one criterion failed.
    ValidationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) | CliError::Core(frizione::Error::Usage(_)) => 2,
            CliError::Core(_) => 3,
            CliError::ValidationFailed => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Usage(_) | CliError::Core(frizione::Error::Usage(_)) => "usage",
            CliError::Core(frizione::Error::Domain(_)) => "domain",
            CliError::Core(frizione::Error::Capability(_)) => "capability",
            CliError::Core(_) => "numerical",
            CliError::ValidationFailed => "validation",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::ValidationFailed => f.write_str("validation failed"),
        }
    }
}

impl From<frizione::Error> for CliError {
    fn from(e: frizione::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Runs the program on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json_errors = wants_json(&argv);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return match write!(stdout, "{}", e.render()) {
                Ok(()) => 0,
                Err(_) => 1,
            };
        }
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            if json_errors {
                let rendered = e.to_string();
                let first = rendered.lines().next().unwrap_or_default();
                let _ = write_json_error(stdout, "usage", first.trim_start_matches("error: "), 2);
            }
            return 2;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(CliError::ValidationFailed) => 4,
        Err(e) => {
            let code = e.exit_code();
            let _ = writeln!(stderr, "error: {e}");
            if json_errors {
                let _ = write_json_error(stdout, e.kind(), &e.to_string(), code);
            }
            code
        }
    }
}

/// JSON is requested explicitly, or implied by `validate` without `--format csv`.
fn wants_json(argv: &[OsString]) -> bool {
    let words: Vec<&str> = argv.iter().skip(1).filter_map(|a| a.to_str()).collect();
    let format = words.iter().enumerate().find_map(|(i, w)| match *w {
        "--format" => words.get(i + 1).copied(),
        w => w.strip_prefix("--format="),
    });
    match format {
        Some(f) => f == "json",
        None => words.first() == Some(&"validate"),
    }
}

fn write_json_error(out: &mut dyn Write, kind: &str, message: &str, code: i32) -> io::Result<()> {
    let doc = json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    writeln!(out, "{}", serde_json::to_string(&doc)?)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => {
            let params = a.kinematics.params(a.friction.nu())?;
            let count = a.sampling.samples.unwrap_or(DEFAULT_SAMPLES);
            let cond = a.events.conditioning();
            let batch = sample_positions(&params, cond, a.kinematics.t, count, a.sampling.seed)?;
            emit(&a.output, Format::Csv, stdout, batch_table("simulate", &batch))
        }
        Command::Compose(a) => {
            let params = a.kinematics.params(a.friction.nu())?;
            let count = a.sampling.samples.unwrap_or(DEFAULT_SAMPLES);
            let cond = a.events.conditioning();
            let batch = sample_composed(&params, &a.time_change, cond, a.kinematics.t, count, a.sampling.seed)?;
            emit(&a.output, Format::Csv, stdout, batch_table("compose", &batch))
        }
        Command::Flight(a) => {
            let k = &a.kinematics;
            let table = match a.grid {
                None => {
                    let count = a.sampling.samples.unwrap_or(DEFAULT_SAMPLES);
                    let cond = a.events.conditioning();
                    let batch = sample_flights(a.dim, k.c, k.lambda, cond, k.t, count, a.sampling.seed)?;
                    batch_table("flight", &batch)
                }
                Some(grid) => {
                    let Conditioning::FixedEvents { n } = a.events.conditioning() else {
                        return Err(CliError::Usage("flight densities are tabulated for --events N".into()));
                    };
                    let mut meta = Map::new();
                    meta.insert("command".into(), "flight".into());
                    meta.insert("dim".into(), a.dim.into());
                    meta.insert("events".into(), n.into());
                    meta.insert("c".into(), k.c.into());
                    meta.insert("t".into(), k.t.into());
                    let mut table = Table::new(meta, &["r", "density"]);
                    for r in grid.values() {
                        table.rows.push(vec![r, flight_density(a.dim, n, k.c, k.t, r)?]);
                    }
                    table
                }
            };
            emit(&a.output, Format::Csv, stdout, table)
        }
        Command::Density(a) => {
            let law = a.friction.law(&a.events)?;
            let h = a.kinematics.horizon(&a.events);
            let mut meta = law_meta("density", &law, &h);
            let table = match a.time_change {
                None => {
                    let mut table = Table::new(meta, &["x", "density"]);
                    for x in a.grid.values() {
                        table.rows.push(vec![x, density(&law, &h, x)?]);
                    }
                    table
                }
                Some(change) => {
                    let method = if change.is_iterated() {
                        let count = a.sampling.samples.unwrap_or(DEFAULT_MIXTURE_SAMPLES);
                        meta.insert("seed".into(), a.sampling.seed.into());
                        meta.insert("samples".into(), count.into());
                        MixtureMethod::MonteCarlo { count, seed: a.sampling.seed }
                    } else {
                        MixtureMethod::Closed
                    };
                    meta.insert("time_change".into(), change.to_string().into());
                    let composed = ComposedLaw { base: law, change };
                    let mut table = Table::new(meta, &["x", "density", "std_err"]);
                    for x in a.grid.values() {
                        let d = composed_density(&composed, &h, x, method)?;
                        table.rows.push(vec![x, d.value, d.std_err]);
                    }
                    table
                }
            };
            emit(&a.output, Format::Csv, stdout, table)
        }
        Command::Transform(a) => {
            let law = a.friction.law(&a.events)?;
            let h = a.kinematics.horizon(&a.events);
            let count = a.sampling.samples.unwrap_or(DEFAULT_TRANSFORM_SAMPLES);
            let method = match a.method {
                Method::Closed => TransformMethod::Closed,
                Method::Integral => TransformMethod::Integral,
                Method::Mc => TransformMethod::MonteCarlo { count, seed: a.sampling.seed },
                Method::Auto => match law {
                    LawSelector::Uncond { .. } => TransformMethod::Integral,
                    _ if law.conditional_shape().is_some() => TransformMethod::Closed,
                    _ => TransformMethod::MonteCarlo { count, seed: a.sampling.seed },
                },
            };
            let kind = match a.kind {
                Kind::Cf => TransformKind::Cf,
                Kind::Mgf => TransformKind::Mgf,
            };
            let mut meta = law_meta("transform", &law, &h);
            meta.insert("kind".into(), format!("{:?}", a.kind).to_lowercase().into());
            meta.insert("method".into(), serde_json::to_value(method).expect("method serializes"));
            let mut table = Table::new(meta, &["arg", "value", "std_err"]);
            for arg in a.grid.values() {
                let e = transform(&law, &h, kind, arg, method)?;
                table.rows.push(vec![arg, e.value, e.std_err]);
            }
            emit(&a.output, Format::Csv, stdout, table)
        }
        Command::Moments(a) => {
            let law = a.friction.law(&a.events)?;
            let h = a.kinematics.horizon(&a.events);
            let mut meta = law_meta("moments", &law, &h);
            let batch = match a.sampling.samples {
                Some(count) => {
                    let params = a.kinematics.params(a.friction.nu())?;
                    meta.insert("seed".into(), a.sampling.seed.into());
                    meta.insert("samples".into(), count.into());
                    Some(sample_positions(&params, a.events.conditioning(), a.kinematics.t, count, a.sampling.seed)?)
                }
                None => None,
            };
            let columns: &[&str] =
                if batch.is_some() { &["order", "value", "empirical", "std_err"] } else { &["order", "value"] };
            let mut table = Table::new(meta, columns);
            for &p in &a.orders {
                let mut row = vec![f64::from(p), moment(&law, &h, p)?];
                if let Some(b) = &batch {
                    let (m, se) = empirical_moment(&b.values, p)?;
                    row.extend([m, se]);
                }
                table.rows.push(row);
            }
            emit(&a.output, Format::Csv, stdout, table)
        }
        Command::Validate(a) => {
            let report = run_suite(&a.criteria, a.seed)?;
            let mut meta = Map::new();
            meta.insert("command".into(), "validate".into());
            meta.insert("seed".into(), a.seed.into());
            meta.insert("passed".into(), report.passed.into());
            let format = a.output.format.unwrap_or(Format::Json);
            with_output(&a.output, stdout, |out| match format {
                Format::Json => {
                    let doc = json!({ "meta": meta, "data": report.criteria });
                    serde_json::to_writer_pretty(&mut *out, &doc)?;
                    writeln!(out)
                }
                Format::Csv => {
                    writeln!(out, "id,name,passed,checks,failed_checks,error")?;
                    for c in &report.criteria {
                        let failed = c.checks.iter().filter(|k| !k.passed()).count();
                        let error = c.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
                        writeln!(out, "{},{},{},{},{failed},{error}", c.id, c.name, c.passed, c.checks.len())?;
                    }
                    Ok(())
                }
            })?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::ValidationFailed)
            }
        }
    }
}

fn law_meta(command: &str, law: &LawSelector, h: &frizione::analytic::Horizon) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("command".into(), command.into());
    meta.insert("law".into(), serde_json::to_value(law).expect("law serializes"));
    meta.insert("horizon".into(), serde_json::to_value(h).expect("horizon serializes"));
    meta
}

fn batch_table(command: &str, batch: &SampleBatch) -> Table {
    let mut meta = Map::new();
    meta.insert("command".into(), command.into());
    meta.insert("seed".into(), batch.seed.into());
    meta.insert("descriptor".into(), batch.descriptor.clone().into());
    let names: Vec<String> =
        if batch.dim == 1 { vec!["x".into()] } else { (1..=batch.dim).map(|k| format!("x{k}")).collect() };
    let columns: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut table = Table::new(meta, &columns);
    table.rows = batch.rows().map(<[f64]>::to_vec).collect();
    table
}

fn emit(output: &Output, default: Format, stdout: &mut dyn Write, table: Table) -> Result<(), CliError> {
    let format = output.format.unwrap_or(default);
    with_output(output, stdout, |out| table.write(format, out))
}

fn with_output(
    output: &Output,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            body(&mut file)?;
            file.flush()?;
        }
        None => {
            body(stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
