//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad input, 3 field too small, 4 verification failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::locality::{computational_locality, reed_muller_bound, AssociatedCode};
use crate::matmul::{matdot_plan, polynomial_code_plan, verify_all_patterns, MatmulScheme};
use crate::scenario::{Scenario, DEFAULT_MODULUS};
use crate::simulator::{run, sweep, sweep_csv, RunReport};
use crate::Point;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FIELD: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "codedcomp",
    version,
    about = "Coded computation planner, simulator and locality oracle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the query plan for a scenario.
    Plan {
        #[command(flatten)]
        input: ScenarioArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Simulate a scenario against every adversary pattern.
    Run {
        #[command(flatten)]
        input: ScenarioArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Run a file of scenarios and tabulate the results.
    Sweep {
        #[command(flatten)]
        input: ScenarioArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Brute-force computational locality of a Reed-Muller code.
    Locality {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        /// Use the code of homogeneous degree-d polynomials instead.
        #[arg(long)]
        homogeneous: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Coded multiplication of two random n x n matrices.
    Matmul {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        /// polynomial or matdot
        #[arg(long, default_value = "polynomial")]
        scheme: MatmulScheme,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MODULUS)]
        modulus: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Serialize)]
struct RunOutput<'a> {
    scenario: &'a Scenario,
    #[serde(flatten)]
    report: &'a RunReport,
}

#[derive(Serialize)]
struct LocalityOutput {
    q: u64,
    m: usize,
    d: u32,
    k: usize,
    s: usize,
    homogeneous: bool,
    code_length: usize,
    locality: usize,
    targets: Vec<Point>,
    /// `(position, copy)` for each witness symbol, copies numbered from 1.
    witness: Vec<(Point, usize)>,
    bound: Option<usize>,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FieldTooSmall { .. } => EXIT_FIELD,
        _ => EXIT_INPUT,
    }
}

fn load(input: &ScenarioArgs) -> Result<Scenario> {
    let mut sc = Scenario::load(&input.scenario)?;
    if let Some(seed) = input.seed {
        sc.seed = seed;
    }
    Ok(sc)
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|e| Error::usage(format!("cannot write output: {e}")))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Error::usage(format!("cannot write {}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn json_only(output: &Output) -> Result<()> {
    match output.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::usage("csv output is only available for sweep")),
    }
}

/// Runs a parsed command. `Ok(false)` means it ran but verification failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Plan { input, output } => {
            json_only(output)?;
            let inst = load(input)?.build()?;
            let p = &inst.plan;
            eprintln!(
                "plan {}: scheme={} k={} d={} s={} b={} w={} baseline={}",
                inst.name, p.scheme, p.k, p.degree, p.s, p.b, p.workers, p.baseline_oblivious
            );
            emit(output, &json(p))?;
            Ok(true)
        }
        Command::Run { input, output } => {
            json_only(output)?;
            let sc = load(input)?;
            let inst = sc.build()?;
            let r = run(&inst.plan, &inst.function, &inst.inputs, &inst.adversary)?;
            eprintln!(
                "run {}: scheme={} k={} d={} s={} b={} w={} baseline={} patterns={}{} failures={} time={}ms",
                inst.name,
                r.scheme,
                r.k,
                r.d,
                r.s,
                r.b,
                r.w,
                r.baseline_oblivious,
                r.patterns_tested,
                if r.sampled { " (sampled)" } else { "" },
                r.failures.len(),
                r.wall_time_ms
            );
            emit(
                output,
                &json(&RunOutput {
                    scenario: &sc,
                    report: &r,
                }),
            )?;
            Ok(r.verified)
        }
        Command::Sweep { input, output } => {
            let mut scenarios = Scenario::load_many(&input.scenario)?;
            if let Some(seed) = input.seed {
                scenarios.iter_mut().for_each(|s| s.seed = seed);
            }
            let rows = sweep(&scenarios);
            for r in &rows {
                match &r.error {
                    None => eprintln!(
                        "{}: scheme={} w={} baseline={} verified={}",
                        r.name,
                        r.scheme,
                        r.w.unwrap_or(0),
                        r.baseline.unwrap_or(0),
                        r.verified
                    ),
                    Some(kind) => eprintln!("{}: error={kind} {}", r.name, r.message.as_deref().unwrap_or("")),
                }
            }
            let text = match output.format {
                Format::Json => json(&rows),
                Format::Csv => sweep_csv(&rows).trim_end().to_string(),
            };
            emit(output, &text)?;
            Ok(rows.iter().all(|r| r.verified))
        }
        Command::Locality {
            q,
            m,
            d,
            k,
            s,
            homogeneous,
            output,
        } => {
            json_only(output)?;
            let field = PrimeField::new(*q)?;
            let code = if *homogeneous {
                AssociatedCode::homogeneous(field, *m, *d)?
            } else {
                AssociatedCode::reed_muller(field, *m, *d)?
            };
            let rep = code.repeated(*s);
            let res = computational_locality(&rep, *k)?;
            let bound = (!homogeneous).then(|| reed_muller_bound(*q, *k, *d as usize, *s));
            let out = LocalityOutput {
                q: *q,
                m: *m,
                d: *d,
                k: *k,
                s: *s,
                homogeneous: *homogeneous,
                code_length: rep.len(),
                locality: res.locality,
                targets: res.targets.iter().map(|&i| code.domain()[i].clone()).collect(),
                witness: res
                    .witness
                    .iter()
                    .map(|&j| {
                        let (i, copy) = rep.symbol(j);
                        (code.domain()[i].clone(), copy)
                    })
                    .collect(),
                bound,
            };
            eprintln!(
                "locality q={q} m={m} d={d} k={k} s={s}: L={}{}",
                out.locality,
                bound.map(|b| format!(" bound={b}")).unwrap_or_default()
            );
            emit(output, &json(&out))?;
            Ok(bound.is_none_or(|b| out.locality <= b))
        }
        Command::Matmul {
            n,
            t,
            s,
            scheme,
            seed,
            modulus,
            output,
        } => {
            json_only(output)?;
            let field = PrimeField::new(*modulus)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let a = Matrix::random(field, *n, *n, &mut rng);
            let b = Matrix::random(field, *n, *n, &mut rng);
            let plan = match scheme {
                MatmulScheme::Polynomial => polynomial_code_plan(&a, &b, *t, *s)?,
                MatmulScheme::MatDot => matdot_plan(&a, &b, *t, *s)?,
            };
            let report = verify_all_patterns(&plan, &a, &b)?;
            eprintln!(
                "matmul {}: n={n} t={t} s={s} workers={} patterns={} failures={}",
                serde_json::to_value(scheme).expect("unit variant"),
                report.workers,
                report.patterns_tested,
                report.failures.len()
            );
            emit(output, &json(&report))?;
            Ok(report.verified)
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("verification failed");
            EXIT_VERIFY
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
