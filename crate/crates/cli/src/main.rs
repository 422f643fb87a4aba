use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use twinspace::distinguish::{
    search_distinguishing_measurement, separable_feasibility, zero_constraints,
};
use twinspace::montecarlo::{validate_abl, PrePostExperiment};
use twinspace::reproduce::reproduce;
use twinspace::structure::{find_story_measurement, null_subspace};
use twinspace::workspace::Workspace;
use twinspace::{abl_probabilities, forms_story, outcome_amplitudes, Error, Measurement};

const EXIT_INPUT: u8 = 1;
const EXIT_NO_STORY: u8 = 2;
const EXIT_CHECK: u8 = 3;

/// Two-state vector toolkit: ABL probabilities, stories, null subspaces,
/// distinguishability and worked-example reproduction.
#[derive(Parser)]
#[command(name = "twinspace", version)]
struct Cli {
    /// Workspace JSON file (defaults to the bundled example workspace).
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = twinspace::DEFAULT_TOL)]
    tol: f64,
    /// Print a JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ABL outcome distribution of a vector for a measurement.
    Abl { vector: String, measurement: String },
    /// Whether a vector forms a story with a measurement.
    Story { vector: String, measurement: String },
    /// Construct a measurement the vector forms a story with.
    FindStory { vector: String },
    /// Basis of the vectors forming no story with a measurement.
    Nullspace { measurement: String },
    /// Search random measurements for one separating two ensembles.
    Distinguish {
        /// Mixture or vector name.
        a: String,
        /// Mixture or vector name.
        b: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        outcomes: usize,
    },
    /// Search for a separable vector meeting a target's zero-outcome constraints.
    Feasibility {
        vector: String,
        #[arg(required = true)]
        measurements: Vec<String>,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 1e-3)]
        feas_tol: f64,
    },
    /// Run the pipeline for worked example 1, 2 or 3.
    Reproduce {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        example: u8,
    },
    /// Simulate pre/post-selection and compare with the ABL rule.
    Montecarlo {
        pre: String,
        post: String,
        measurement: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Pass bound in binomial standard errors.
        #[arg(long, default_value_t = 4.0)]
        sigma: f64,
    },
    /// Validate a workspace; with --json print its canonical form.
    Validate,
}

struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            code: 0,
        }
    }
}

fn load(path: &Option<PathBuf>) -> Result<Workspace, Error> {
    match path {
        None => Ok(Workspace::bundled()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Workspace(format!("cannot read {}: {e}", p.display())))?;
            Workspace::from_json(&text)
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn outcome_label(m: &Measurement, i: usize) -> String {
    m.labels().map_or_else(|| i.to_string(), |l| l[i].clone())
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let ws = load(&cli.workspace)?;
    let tol = cli.tol;
    Ok(match &cli.command {
        Command::Abl {
            vector,
            measurement,
        } => {
            let m = ws.measurement(measurement)?;
            let p = abl_probabilities(ws.vector(vector)?, m, tol)?;
            let mut text = format!("{:>8}  {}\n", "outcome", "probability");
            for (i, q) in p.probabilities.iter().enumerate() {
                text += &format!("{:>8}  {q:.12}\n", outcome_label(m, i));
            }
            Output::ok(
                text,
                json!({"vector": vector, "measurement": measurement, "probabilities": p.probabilities}),
            )
        }
        Command::Story {
            vector,
            measurement,
        } => {
            let v = ws.vector(vector)?;
            let m = ws.measurement(measurement)?;
            let story = forms_story(v, m, tol)?;
            let amps = outcome_amplitudes(v, m)?;
            let mut text = format!("forms story: {story}\n");
            for (i, a) in amps.iter().enumerate() {
                text += &format!("  |Tr P_{i} v| = {:.6e}\n", a.norm());
            }
            Output::ok(text, json!({"forms_story": story, "amplitudes": amps}))
        }
        Command::FindStory { vector } => {
            let cert = find_story_measurement(ws.vector(vector)?, tol)?;
            let w: Vec<String> = cert
                .witness_state
                .amplitudes()
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect();
            let text = format!(
                "case: {}\nwitness: ({})\namplitude: {:.6e}\nmeasurement: {{|w⟩⟨w|, 1 - |w⟩⟨w|}}\n",
                to_value(&cert.case_tag).as_str().unwrap_or_default(),
                w.join(", "),
                cert.amplitude_magnitude
            );
            Output::ok(text, to_value(&cert))
        }
        Command::Nullspace { measurement } => {
            let ns = null_subspace(ws.measurement(measurement)?, tol)?;
            let text = format!(
                "dimension {} (dim² = {}, outcomes = {})\n",
                ns.dimension,
                ns.measurement.dim().pow(2),
                ns.measurement.len()
            );
            Output::ok(
                text,
                json!({"dimension": ns.dimension, "outcomes": ns.measurement.len(), "basis": to_value(&ns.basis)}),
            )
        }
        Command::Distinguish {
            a,
            b,
            trials,
            outcomes,
        } => {
            let found = search_distinguishing_measurement(
                &ws.ensemble(a)?,
                &ws.ensemble(b)?,
                *trials,
                *outcomes,
                cli.seed,
                tol,
            )?;
            let text = match &found {
                None => format!("indistinguishable after {trials} trials\n"),
                Some(d) => format!(
                    "distinguishing measurement found at trial {} with gap {:.6}\n",
                    d.trial, d.max_gap
                ),
            };
            Output::ok(
                text,
                json!({"trials": trials, "seed": cli.seed, "found": to_value(&found)}),
            )
        }
        Command::Feasibility {
            vector,
            measurements,
            starts,
            feas_tol,
        } => {
            let family = measurements
                .iter()
                .map(|n| ws.measurement(n).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            let sys = zero_constraints(ws.vector(vector)?, &family, tol)?;
            let r = separable_feasibility(&sys, *starts, cli.seed, *feas_tol)?;
            let text = format!(
                "zero outcomes: {:?}\nverdict: {}\nbest residual: {:.6e}\nstarts: {}, seed: {}\n",
                sys.zero_outcomes,
                to_value(&r.verdict).as_str().unwrap_or_default(),
                r.best_residual,
                r.starts,
                r.seed
            );
            Output::ok(
                text,
                json!({"zero_outcomes": sys.zero_outcomes, "report": to_value(&r)}),
            )
        }
        Command::Reproduce { example } => {
            let r = reproduce(&ws, *example, cli.seed)?;
            Output {
                text: r.text(),
                json: to_value(&r),
                code: if r.pass { 0 } else { EXIT_CHECK },
            }
        }
        Command::Montecarlo {
            pre,
            post,
            measurement,
            trials,
            sigma,
        } => {
            let exp = PrePostExperiment::new(
                ws.state(pre)?.clone(),
                ws.state(post)?.clone(),
                ws.measurement(measurement)?.clone(),
                *trials,
                cli.seed,
            )?;
            let v = validate_abl(&exp, *sigma)?;
            Output {
                text: v.table(),
                json: to_value(&v),
                code: if v.pass { 0 } else { EXIT_CHECK },
            }
        }
        Command::Validate => {
            let text = format!(
                "valid workspace: {} states, {} vectors, {} measurements, {} mixtures\n",
                ws.states.len(),
                ws.vectors.len(),
                ws.measurements.len(),
                ws.mixtures.len()
            );
            // The canonical document is printed verbatim under --json.
            Output::ok(text, Value::Null)
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotAStory | Error::NotAStoryWith(_) | Error::NoStoryInMixture => EXIT_NO_STORY,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                if matches!(cli.command, Command::Validate) {
                    print!("{}", load(&cli.workspace).expect("loaded above").to_json());
                } else {
                    println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
                }
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
