use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cfscope::classify::DEFAULT_TOLERANCE;
use cfscope::lab::{self, DEFAULT_TOLERANCE_GRID};
use cfscope::text::{human, tolerance};
use cfscope::{
    cf, classify, decompose, AuditConfig, Distribution, Error, Event, Family, IndependenceVariant, Literal, Problem,
};

const EXIT_INPUT: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cfscope",
    version,
    about = "Certainty factors against an exact Bayesian oracle"
)]
struct Cli {
    /// Worker threads for parallel work; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random distribution and write it as JSON.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        attrs: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a problem as decomposable, weakly decomposable or holistic.
    Classify {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        hypothesis: String,
        /// strict (given h=true), h-false, or symmetric.
        #[arg(long, default_value = "strict")]
        variant: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Direct and combined certainty factors for an evidence assignment.
    Cf {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        hypothesis: String,
        /// Comma-separated `name=true|false`; omitted attributes are unknown.
        #[arg(long, default_value = "")]
        evidence: String,
    },
    /// Sample many distributions and write per-row and summary CSVs.
    Audit {
        #[arg(long, default_value = "dirichlet")]
        families: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        attrs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tols: Option<String>,
        /// Tolerance for the per-row class columns.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        class_tol: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Greedily group interacting evidence until the surrogate is accurate.
    Decompose {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        hypothesis: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Defaults to the number of evidence attributes.
        #[arg(long)]
        max_group_size: Option<usize>,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_computational() {
            EXIT_COMPUTATION
        } else {
            EXIT_INPUT
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

fn load_problem(path: &PathBuf, hypothesis: &str) -> Result<(Distribution, Problem), Failure> {
    let dist = Distribution::read_json(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let problem = Problem::by_name(dist.space(), hypothesis)?;
    Ok((dist, problem))
}

fn classification_line(report: &cfscope::Classification) -> String {
    format!(
        "{} ci_gap={} marginal_gap={} variant={} tol={}",
        report.class,
        human(report.ci_gap),
        human(report.marginal_gap),
        report.variant,
        tolerance(report.tolerance)
    )
}

fn cmd_gen(family: &str, attrs: usize, seed: u64, out: &PathBuf) -> CmdResult {
    let family: Family = family.parse()?;
    let dist = lab::sample_distribution(family, attrs, seed)?;
    dist.write_json(out)
        .map_err(|e| input_error(format!("{}: {e}", out.display())))?;
    let problem = Problem::new(dist.space(), 0)?;
    for variant in IndependenceVariant::ALL {
        match classify::classify(&dist, &problem, variant, DEFAULT_TOLERANCE) {
            Ok(r) => println!("{}", classification_line(&r)),
            Err(e) => println!("Unclassified variant={variant} reason={e}"),
        }
    }
    Ok(())
}

fn cmd_classify(dist: &PathBuf, hypothesis: &str, variant: &str, tol: f64) -> CmdResult {
    let (dist, problem) = load_problem(dist, hypothesis)?;
    let variant: IndependenceVariant = variant.parse()?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(input_error("tolerance must be positive"));
    }
    let report = classify::classify(&dist, &problem, variant, tol)?;
    println!("{}", classification_line(&report));
    Ok(())
}

fn parse_evidence(problem: &Problem, text: &str) -> Result<Vec<Literal>, Failure> {
    let space = problem.space();
    let mut literals = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| input_error(format!("evidence item `{item}` is not name=true|false")))?;
        let attr = space.index_of(name.trim())?;
        if !problem.is_evidence(attr) {
            return Err(Error::NotEvidence(attr).into());
        }
        let value = match value.trim() {
            "true" => true,
            "false" => false,
            other => return Err(input_error(format!("evidence value `{other}` is not true or false"))),
        };
        literals.push(Literal::new(attr, value));
    }
    // Rejects repeated attributes.
    Event::new(literals.iter().copied())?;
    Ok(literals)
}

fn cmd_cf(dist: &PathBuf, hypothesis: &str, evidence: &str) -> CmdResult {
    let (dist, problem) = load_problem(dist, hypothesis)?;
    let literals = parse_evidence(&problem, evidence)?;
    let rec = lab::gap_for_literals(&dist, &problem, &literals)?;
    let line = |label: &str, m: &cf::BeliefMeasures<f64>| {
        println!(
            "{label} mb={} md={} cf={}",
            human(*m.mb()),
            human(*m.md()),
            human(*m.cf())
        )
    };
    line("direct", &rec.direct);
    line("combined", &rec.combined);
    println!(
        "gaps m1_gap={} m2_gap={} cf_gap={}",
        human(rec.m1_gap),
        human(rec.m2_gap),
        human(rec.cf_gap)
    );
    Ok(())
}

fn parse_list<T>(s: &str, parse: impl Fn(&str) -> Result<T, Failure>) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(parse)
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    families: &str,
    count: usize,
    attrs: usize,
    seed: u64,
    tols: Option<&str>,
    class_tol: f64,
    out_dir: &PathBuf,
    threads: Option<usize>,
) -> CmdResult {
    let families = parse_list(families, |f| f.parse::<Family>().map_err(Failure::from))?;
    let tolerances = match tols {
        Some(t) => parse_list(t, |x| {
            x.parse::<f64>()
                .map_err(|_| input_error(format!("tolerance `{x}` is not a number")))
        })?,
        None => DEFAULT_TOLERANCE_GRID.to_vec(),
    };
    let config = AuditConfig {
        families,
        count,
        k: attrs,
        seed,
        tolerances,
        class_tolerance: class_tol,
        threads,
    };
    let report = lab::audit(&config)?;
    let (rows, summary) = report
        .write_to(out_dir)
        .map_err(|e| input_error(format!("{}: {e}", out_dir.display())))?;
    eprintln!("wrote {} and {}", rows.display(), summary.display());
    eprint!("{}", report.describe());
    Ok(())
}

fn cmd_decompose(
    dist: &PathBuf,
    hypothesis: &str,
    tol: f64,
    max_group_size: Option<usize>,
    out: Option<&PathBuf>,
) -> CmdResult {
    let (dist, problem) = load_problem(dist, hypothesis)?;
    let max_group_size = max_group_size.unwrap_or(problem.evidence().len());
    let report = decompose::greedy_decompose(&dist, &problem, tol, max_group_size)?;
    let json = serde_json::to_string_pretty(&report.to_json(&problem)).expect("report serializes");
    if let Some(path) = out {
        std::fs::write(path, format!("{json}\n")).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    println!("{json}");
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Gen {
            family,
            attrs,
            seed,
            out,
        } => cmd_gen(family, *attrs, *seed, out),
        Command::Classify {
            dist,
            hypothesis,
            variant,
            tol,
        } => cmd_classify(dist, hypothesis, variant, *tol),
        Command::Cf {
            dist,
            hypothesis,
            evidence,
        } => cmd_cf(dist, hypothesis, evidence),
        Command::Audit {
            families,
            count,
            attrs,
            seed,
            tols,
            class_tol,
            out_dir,
        } => cmd_audit(
            families,
            *count,
            *attrs,
            *seed,
            tols.as_deref(),
            *class_tol,
            out_dir,
            cli.threads,
        ),
        Command::Decompose {
            dist,
            hypothesis,
            tol,
            max_group_size,
            out,
        } => cmd_decompose(dist, hypothesis, *tol, *max_group_size, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
