use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cremona_core::textio::{parse_expression, parse_polynomial};
use cremona_core::{Field, Ring};
use cremona_suite::scenario::load_map_file;
use cremona_suite::{detect_errata, load_dir, run_all, run_scenarios, scenario_dir, SuiteError, SuiteResult};

#[derive(Parser)]
#[command(name = "cremona", about = "Exact verification of a Cremona involution's rationality proof")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonLike,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario chains and write a report.
    VerifyPaper {
        /// Scenario id, or `all` for every scenario plus errata and property suites.
        #[arg(long, default_value = "all")]
        section: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include per-step wall-clock durations (breaks byte stability).
        #[arg(long)]
        timings: bool,
    },
    /// Print the pullback of an expression under a map.
    Apply {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        expr: String,
    },
    /// Print the composition of two maps (the second is applied first to expressions).
    Compose {
        #[arg(long = "map", num_args = 1, required = true)]
        maps: Vec<PathBuf>,
    },
    /// Exit with status 0 iff the map is an involution.
    InvolutionCheck {
        #[arg(long)]
        map: PathBuf,
    },
    /// Print the resultant of two polynomials with respect to a variable.
    Resultant {
        #[arg(long)]
        var: String,
        #[arg(long = "poly", num_args = 1, required = true)]
        polys: Vec<String>,
        /// Variable order; defaults to order of first appearance.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        characteristic: u64,
    },
    /// Decide between alternative readings of the displayed formulas.
    Errata {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn input<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> SuiteError + '_ {
    move |e| SuiteError::Input(format!("{what}: {e}"))
}

fn run(command: Command) -> SuiteResult<bool> {
    match command {
        Command::VerifyPaper { section, seed, report, format, timings } => {
            let scenarios = load_dir(&scenario_dir())?;
            let result = if section == "all" {
                run_all(&scenarios, seed, timings)
            } else {
                let chosen: Vec<_> = scenarios.into_iter().filter(|s| s.id() == section).collect();
                if chosen.is_empty() {
                    return Err(SuiteError::Input(format!("unknown section `{section}`")));
                }
                run_scenarios(&chosen, seed, timings)
            };
            let json = format == Format::JsonLike;
            match report {
                Some(path) => result.save(&path, json)?,
                None => print!("{}", if json { result.to_json() } else { result.to_text() }),
            }
            Ok(result.passed())
        }
        Command::Apply { map, expr } => {
            let m = load_map_file(&map)?;
            let e = parse_expression(&expr, m.ring()).map_err(input("expression"))?;
            let image = m.pullback(&e).map_err(input("pullback"))?;
            println!("{image}");
            Ok(true)
        }
        Command::Compose { maps } => {
            if maps.len() != 2 {
                return Err(SuiteError::Input("compose takes exactly two --map arguments".into()));
            }
            let a = load_map_file(&maps[0])?;
            let b = load_map_file(&maps[1])?;
            let c = a.compose(&b).map_err(input("compose"))?;
            for (v, img) in c.ring().vars().iter().zip(c.images()) {
                println!("{v} -> {img}");
            }
            Ok(true)
        }
        Command::InvolutionCheck { map } => {
            let m = load_map_file(&map)?;
            let ok = m.verify_involution().map_err(input("compose"))?;
            println!("{ok}");
            Ok(ok)
        }
        Command::Resultant { var, polys, vars, characteristic } => {
            if polys.len() != 2 {
                return Err(SuiteError::Input("resultant takes exactly two --poly arguments".into()));
            }
            let field = Field::with_characteristic(characteristic).map_err(input("characteristic"))?;
            let names = vars.unwrap_or_else(|| identifiers(&polys));
            let ring = Ring::new(field, &names).map_err(input("variables"))?;
            let a = parse_polynomial(&polys[0], &ring).map_err(input("first polynomial"))?;
            let b = parse_polynomial(&polys[1], &ring).map_err(input("second polynomial"))?;
            let r = a.resultant_named(&b, &var).map_err(input("resultant"))?;
            println!("{r}");
            Ok(true)
        }
        Command::Errata { seed } => {
            let scenarios = load_dir(&scenario_dir())?;
            let report = detect_errata(&scenarios, seed);
            print!("{}", report.to_text());
            Ok(report.determined())
        }
    }
}

/// Identifiers in order of first appearance.
fn identifiers(texts: &[String]) -> Vec<String> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for t in texts {
        let mut chars = t.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if c.is_ascii_alphabetic() || c == '_' {
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let name = t[i..end].to_string();
                if seen.insert(name.clone(), ()).is_none() {
                    out.push(name);
                }
            }
        }
    }
    out
}
