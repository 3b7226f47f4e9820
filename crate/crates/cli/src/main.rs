//! `ppdm` command-line tool.
//!
//! Exit codes: 0 success, 1 infeasible parameters or ambiguity detected,
//! 2 usage, parse or dimension errors. Failures print a JSON object
//! `{"error": {"kind": .., "message": ..}}` on standard error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ppdm::figures::{render_figure, FIGURE_IDS};
use ppdm::geometry::compute_ppdm;
use ppdm::io::{configuration_from_json, configuration_to_json, ppdm_from_csv, ppdm_to_csv, ConfigurationDto};
use ppdm::reconstruct::reconstruct_with_anchor;
use ppdm::sampling::{complete_params, stream_rng};
use ppdm::uniqueness::{classify, rank3_feasibility_solve, DEFAULT_TOL};
use ppdm::verify::verify_pair;
use ppdm::{ClassId, ClassSpec, Configuration, Error, Verdict};

#[derive(Parser)]
#[command(name = "ppdm", version, about = "Point-to-plane distance matrices: generation, uniqueness and reconstruction")]
struct Cli {
    /// Relative tolerance for rank and equality decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (generate, figures) or output file (classify,
    /// reconstruct, verify; standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reference configuration and an equivalent one sharing its PPDM.
    Generate {
        /// Class id, e.g. Rank2Parallelogram.
        #[arg(long)]
        class: String,
        /// Class parameters as a JSON object; missing fields are drawn at random.
        #[arg(long, default_value = "{}")]
        params: String,
    },
    /// Decide whether a configuration is determined by its PPDM.
    Classify {
        #[arg(long)]
        config: PathBuf,
        /// Restarts of the numerical search for a non-rigid rank-3 map (3D only).
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Recover a configuration from a PPDM in CSV form.
    Reconstruct {
        #[arg(long)]
        ppdm: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: u8,
        /// Waypoint used as the origin (0-based).
        #[arg(long, default_value_t = 0)]
        anchor: usize,
    },
    /// Compare two configurations.
    Verify {
        a: PathBuf,
        b: PathBuf,
    },
    /// Export the data behind figures 3 to 13.
    Figures {
        /// A figure number or `all`.
        #[arg(default_value = "all")]
        id: String,
    },
}

struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::DimensionMismatch { .. } | Error::InvalidInput(_) => 2,
            _ => 1,
        };
        Failure { code, kind: e.kind().to_string(), message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, kind: "Usage".into(), message: message.into() }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, kind: "Io".into(), message: format!("{}: {e}", path.display()) }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn out_dir(out: &Option<PathBuf>) -> Result<PathBuf, Failure> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    Ok(dir)
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes a report to `--out` or prints it.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<Configuration, Failure> {
    Ok(configuration_from_json(&read(path)?)?)
}

fn run_generate(cli: &Cli, class: &str, params: &str) -> Result<u8, Failure> {
    let class: ClassId = class.parse()?;
    let partial: Value = serde_json::from_str(params).map_err(|e| usage(format!("--params is not JSON: {e}")))?;
    let mut rng = stream_rng(cli.seed, 0);
    let full = complete_params(class, &partial, &mut rng)?;
    let pair = ClassSpec::<f64>::from_json(class, full.clone())?.generate()?;
    let dir = out_dir(&cli.out)?;
    write(&dir.join("reference.json"), &configuration_to_json(&pair.reference))?;
    write(&dir.join("equivalent.json"), &configuration_to_json(&pair.equivalent))?;
    write(&dir.join("ppdm.csv"), &ppdm_to_csv(&compute_ppdm(&pair.reference)))?;
    write(&dir.join("params.json"), &pretty(&json!({ "class": class, "seed": cli.seed, "params": full })))?;
    Ok(0)
}

fn run_classify(cli: &Cli, config: &Path, restarts: usize) -> Result<u8, Failure> {
    let c = load_config(config)?;
    let report = classify(&c, cli.tol)?;
    let mut doc = serde_json::to_value(&report).expect("report serializes");
    if c.dim() == 3 && report.normal_rank == 3 && c.n_walls() >= 6 {
        let search = rank3_feasibility_solve(&c, restarts, cli.tol, cli.seed)?;
        doc["rank3_search"] = json!({
            "restarts": search.restarts,
            "found": search.solution.is_some(),
            "residual": search.solution.as_ref().map(|s| s.residual),
            "params": search.solution.as_ref().map(|s| s.params.to_vec()),
            "best_nontrivial_residual": search.best_nontrivial_residual,
            "numerical": true,
        });
    }
    emit(&cli.out, &pretty(&doc))?;
    Ok(if report.verdict == Verdict::Ambiguous { 1 } else { 0 })
}

fn run_reconstruct(cli: &Cli, ppdm: &Path, dim: u8, anchor: usize) -> Result<u8, Failure> {
    let d = ppdm_from_csv(&read(ppdm)?)?;
    let result = reconstruct_with_anchor(&d, dim as usize, cli.tol, anchor)?;
    let dto = ConfigurationDto::from_configuration(&result.configuration);
    match &cli.out {
        Some(p) => {
            write(p, &configuration_to_json(&result.configuration))?;
            print!("{}", pretty(&result));
        }
        None => print!("{}", pretty(&json!({ "configuration": dto, "report": result }))),
    }
    Ok(0)
}

fn run_verify(cli: &Cli, a: &Path, b: &Path) -> Result<u8, Failure> {
    let report = verify_pair(&load_config(a)?, &load_config(b)?)?;
    emit(&cli.out, &pretty(&report))?;
    Ok(0)
}

fn run_figures(cli: &Cli, id: &str) -> Result<u8, Failure> {
    let ids: Vec<u32> = if id.eq_ignore_ascii_case("all") {
        FIGURE_IDS.collect()
    } else {
        match id.parse::<u32>() {
            Ok(n) if FIGURE_IDS.contains(&n) => vec![n],
            _ => return Err(usage(format!("unknown figure `{id}`; choose 3 to 13 or all"))),
        }
    };
    let dir = out_dir(&cli.out)?;
    let mut summary = Vec::new();
    let mut all_passed = true;
    for n in ids {
        let fig = render_figure(n, cli.seed)?;
        let data = format!("figure_{n:02}.json");
        let matrix = format!("figure_{n:02}_ppdm.csv");
        write(&dir.join(&data), &pretty(&fig))?;
        write(&dir.join(&matrix), &ppdm_to_csv(&fig.ppdm))?;
        all_passed &= fig.passed;
        summary.push(json!({ "id": n, "passed": fig.passed, "files": [data, matrix] }));
    }
    print!("{}", pretty(&summary));
    Ok(if all_passed { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        return Err(usage("--tol must lie in (0, 1)"));
    }
    match &cli.command {
        Command::Generate { class, params } => run_generate(cli, class, params),
        Command::Classify { config, restarts } => run_classify(cli, config, *restarts),
        Command::Reconstruct { ppdm, dim, anchor } => run_reconstruct(cli, ppdm, *dim, *anchor),
        Command::Verify { a, b } => run_verify(cli, a, b),
        Command::Figures { id } => run_figures(cli, id),
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": f.kind, "message": f.message } }));
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_failure(&usage(e.to_string().trim_end())),
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => report_failure(&f),
    }
}
