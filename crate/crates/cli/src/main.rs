use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lattice_lab::Complex64;
use lattice_lab_cli::config::{parse_complex, parse_methods, Model, OutputFormat, Suite};
use lattice_lab_cli::{run, verify, ConfigError, EvalReport, RunConfig, VerifyConfig};

const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "lattice-lab", version, about = "Partition functions and R-matrix identities, cross-checked")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one instance by several routes and compare them.
    Run(RunArgs),
    /// Run a seeded property suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    tau_re: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    tau_im: f64,
    #[arg(long, default_value_t = 0.31, allow_hyphen_values = true)]
    hbar_re: f64,
    #[arg(long, default_value_t = 0.07, allow_hyphen_values = true)]
    hbar_im: f64,
    #[arg(long, allow_hyphen_values = true)]
    lambda_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_im: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "json")]
    output: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out_file: Option<PathBuf>,
}

impl Common {
    fn lambda(&self) -> Option<Complex64> {
        match (self.lambda_re, self.lambda_im) {
            (None, None) => None,
            (re, im) => Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "sixvertex")]
    model: Model,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    q_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q_im: Option<f64>,
    /// Spectral parameter `re,im`; repeat `n` times.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    u: Vec<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    v: Vec<Complex64>,
    /// Comma list of enum, transfer, izergin, projection, formula, or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    /// Fixed number of theta terms instead of the certified default.
    #[arg(long)]
    trunc: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[command(flatten)]
    common: Common,
}

fn run_config(a: RunArgs) -> Result<RunConfig, ConfigError> {
    let d = RunConfig::default();
    let c = &a.common;
    let q = match (a.q_re, a.q_im) {
        (None, None) => None,
        (re, im) => Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
    };
    let nonempty = |l: Vec<Complex64>| (!l.is_empty()).then_some(l);
    Ok(RunConfig {
        model: a.model,
        n: a.n,
        tau: Complex64::new(c.tau_re, c.tau_im),
        hbar: Complex64::new(c.hbar_re, c.hbar_im),
        lambda: c.lambda().unwrap_or(d.lambda),
        q,
        seed: c.seed,
        methods: parse_methods(&a.methods)?,
        tol: c.tol.unwrap_or(d.tol),
        trunc: a.trunc,
        output: c.output,
        u: nonempty(a.u),
        v: nonempty(a.v),
    })
}

fn verify_config(a: VerifyArgs) -> VerifyConfig {
    let c = &a.common;
    VerifyConfig {
        suite: a.suite,
        seed: c.seed,
        count: a.count,
        tol: c.tol.unwrap_or(VerifyConfig::default().tol),
        tau: Complex64::new(c.tau_re, c.tau_im),
        hbar: Complex64::new(c.hbar_re, c.hbar_im),
        lambda: c.lambda(),
        output: c.output,
    }
}

fn emit(report: &EvalReport, format: OutputFormat, out: Option<PathBuf>) -> ExitCode {
    let text = report.render(format);
    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(USAGE);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => {
            let out = a.common.out_file.clone();
            run_config(a).and_then(|cfg| run::run(&cfg).map(|r| (r, cfg.output, out)))
        }
        Command::Verify(a) => {
            let out = a.common.out_file.clone();
            let cfg = verify_config(a);
            verify::verify(&cfg).map(|r| (r, cfg.output, out))
        }
    };
    match outcome {
        Ok((report, format, out)) => emit(&report, format, out),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}
