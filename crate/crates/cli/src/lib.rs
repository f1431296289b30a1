//! Command-line front end: argument parsing, configuration resolution,
//! worker-pool setup and output rendering.

pub mod commands;
pub mod config;
pub mod error;
pub mod fit;
pub mod grid;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::Value;

pub use config::{Command, ConfigMap, RunConfig};
pub use error::CliError;

/// Environment variable overriding the default worker count.
pub const THREADS_ENV: &str = "HPSYM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hpsym", version, about = "Information recovery with a conserved angular momentum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Recovery-error bounds swept over ell, for every (L, dL) pair.
    Bounds(Flags),
    /// Least ell meeting each Delta and its excess over the symmetric baseline.
    Delay(Flags),
    /// `delay` over a `--sweep-N` range, optionally with `--fit`.
    Scaling(Flags),
    /// Clipping thresholds over a lambda grid.
    Clipping(Flags),
    /// Information remnant and its heuristic bounds over ell.
    Remnant(Flags),
    /// Q function on a disk-masked grid.
    Qfunc(Flags),
    /// Dense Monte-Carlo check of the decoupling bounds.
    Validate(Flags),
}

/// Shared flags. Values are kept as text and typed during resolution, so a
/// config file and the command line go through the same parser.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Flat JSON object keyed by long flag names; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named parameter set, overridden by the config file and flags.
    #[arg(long)]
    pub preset: Option<String>,
    /// pure or mixed.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long = "N")]
    pub n: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long = "L", allow_hyphen_values = true)]
    pub l: Option<String>,
    #[arg(long = "L-grid", allow_hyphen_values = true)]
    pub l_grid: Option<String>,
    /// Grid of L/N; `L = lambda N`.
    #[arg(long = "lambda-grid", allow_hyphen_values = true)]
    pub lambda_grid: Option<String>,
    #[arg(long = "dL-coeff")]
    pub dl_coeff: Option<String>,
    #[arg(long = "dL-grid")]
    pub dl_grid: Option<String>,
    /// sqrt (dL = coeff sqrt N), linear (coeff N) or absolute.
    #[arg(long = "dL-scale")]
    pub dl_scale: Option<String>,
    /// stddev or literal Gaussian width.
    #[arg(long)]
    pub width: Option<String>,
    /// CSV with columns mu,chi replacing the Gaussian profile.
    #[arg(long)]
    pub chi: Option<String>,
    #[arg(long = "Delta")]
    pub delta_level: Option<String>,
    #[arg(long = "sweep-N")]
    pub sweep_n: Option<String>,
    /// Fit delay against N.
    #[arg(long)]
    pub fit: bool,
    #[arg(long)]
    pub c: Option<String>,
    /// density or sector-count entropy of a mixed B_in.
    #[arg(long)]
    pub entropy: Option<String>,
    #[arg(long = "T")]
    pub t: Option<String>,
    #[arg(long)]
    pub ell: Option<String>,
    #[arg(long = "ell-grid")]
    pub ell_grid: Option<String>,
    #[arg(long)]
    pub resolution: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    /// smoothed-tail or refined-tail.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long = "d-th")]
    pub d_th: Option<String>,
    /// Worker threads; overrides HPSYM_THREADS.
    #[arg(long)]
    pub threads: Option<String>,
    /// csv, json or svg.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<String>,
}

impl Flags {
    pub fn to_map(&self) -> ConfigMap {
        let pairs = [
            ("preset", &self.preset),
            ("kind", &self.kind),
            ("N", &self.n),
            ("k", &self.k),
            ("L", &self.l),
            ("L-grid", &self.l_grid),
            ("lambda-grid", &self.lambda_grid),
            ("dL-coeff", &self.dl_coeff),
            ("dL-grid", &self.dl_grid),
            ("dL-scale", &self.dl_scale),
            ("width", &self.width),
            ("chi", &self.chi),
            ("Delta", &self.delta_level),
            ("sweep-N", &self.sweep_n),
            ("c", &self.c),
            ("entropy", &self.entropy),
            ("T", &self.t),
            ("ell", &self.ell),
            ("ell-grid", &self.ell_grid),
            ("resolution", &self.resolution),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("delta", &self.delta),
            ("epsilon", &self.epsilon),
            ("mode", &self.mode),
            ("d-th", &self.d_th),
            ("threads", &self.threads),
            ("format", &self.format),
            ("out", &self.out),
        ];
        let mut m: ConfigMap = pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), Value::String(v.clone()))))
            .collect();
        if self.fit {
            m.insert("fit".into(), Value::Bool(true));
        }
        m
    }
}

impl Sub {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::Bounds(f) => (Command::Bounds, f),
            Sub::Delay(f) => (Command::Delay, f),
            Sub::Scaling(f) => (Command::Scaling, f),
            Sub::Clipping(f) => (Command::Clipping, f),
            Sub::Remnant(f) => (Command::Remnant, f),
            Sub::Qfunc(f) => (Command::Qfunc, f),
            Sub::Validate(f) => (Command::Validate, f),
        }
    }
}

/// Merges presets, the config file and flags, then validates.
pub fn resolve(sub: &Sub) -> Result<RunConfig, CliError> {
    let (command, flags) = sub.split();
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            config::parse_config_json(&text)?
        }
        None => ConfigMap::new(),
    };
    RunConfig::resolve(command, &config::merge(file, flags.to_map())?)
}

/// `--threads`, then `HPSYM_THREADS`, then available parallelism (0).
pub fn worker_count(cfg: &RunConfig, env: Option<&str>) -> Result<usize, CliError> {
    if let Some(t) = cfg.threads {
        return Ok(t);
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(0),
        Some(s) => match s.parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

/// Runs a resolved configuration on its own worker pool and renders it.
pub fn execute(cfg: &RunConfig, env_threads: Option<&str>) -> Result<String, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(cfg, env_threads)?)
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let outcome = pool.install(|| commands::run(cfg))?;
    Ok(output::render(cfg, &outcome))
}

/// Whole-program entry: returns the process exit code.
pub fn main_with<I, T>(argv: I, env_threads: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let name = cli.command.split().0.to_string();
    let result = resolve(&cli.command).and_then(|cfg| {
        let text = execute(&cfg, env_threads)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, text).map_err(|e| std::io::Error::new(e.kind(), format!("{path}: {e}")))?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(stderr, "hpsym: error: {e}");
            if e.exit_code() == 2 {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(&name) {
                    let _ = writeln!(stderr, "\n{}", sub.render_usage());
                }
                let _ = writeln!(stderr, "For more information, try 'hpsym {name} --help'.");
            }
            e.exit_code()
        }
    }
}
