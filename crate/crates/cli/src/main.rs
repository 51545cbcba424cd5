use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chevalley_cli::{emit_report, exit_code, explain, run_suite, Command, Format, RunConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chevalley", version, about = "Verification suites for Chevalley maps of finite reflection groups")]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the basic invariants; `--out DIR` writes `DIR/<type>.json`.
    Invariants,
    /// Factor det J, count roots and generate the group.
    VerifyJacobian,
    /// Rank and minors of the Jacobian on every stratum.
    VerifyStatement,
    /// Critical points of p_{k+1} on fibers of P_k.
    Morse,
    /// Connectivity and value intervals of sampled fibers.
    Fiber,
    /// Geodesic ratios, lift derivatives and envelopes on the image of a ball.
    Whitney,
    /// Re-render a saved JSON report.
    Report { input: Option<PathBuf> },
    /// Every suite except `report`.
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Flags {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the claim checked by the subcommand and exit.
    #[arg(long, global = true)]
    explain: bool,
    /// Coxeter type, e.g. B3, D6, I2:7, H3.
    #[arg(long = "type", global = true)]
    ty: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Zero threshold for normalized minors.
    #[arg(long, visible_alias = "tol-zero", global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    #[arg(long, global = true)]
    eps_fiber: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Fiber target, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    m: Option<Vec<f64>>,
    /// Points per sampled fiber.
    #[arg(long, visible_alias = "fiber-points", global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    fibers: Option<usize>,
    #[arg(long, global = true)]
    multistarts: Option<usize>,
    #[arg(long, global = true)]
    pairs: Option<usize>,
    #[arg(long, global = true)]
    bins: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,
}

fn command_of(c: &Cmd) -> Command {
    match c {
        Cmd::Invariants => Command::Invariants,
        Cmd::VerifyJacobian => Command::VerifyJacobian,
        Cmd::VerifyStatement => Command::VerifyStatement,
        Cmd::Morse => Command::Morse,
        Cmd::Fiber => Command::Fiber,
        Cmd::Whitney => Command::Whitney,
        Cmd::Report { .. } => Command::Report,
        Cmd::All => Command::All,
    }
}

fn config(cli: Cli) -> chevalley::Result<RunConfig> {
    let f = cli.flags;
    let mut cfg = match &f.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &cli.command {
        cfg.command = Some(command_of(c));
        if let Cmd::Report { input: Some(p) } = c {
            cfg.input = Some(p.clone());
        }
    }
    macro_rules! set {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = f.$flag { cfg.$field = v; })*
        };
    }
    set!(seed => seed, tol => tol_zero, tol_rank => tol_rank, eps_fiber => eps_fiber, a => a,
         samples => samples, n => fiber_points, fibers => fibers, multistarts => multistarts,
         pairs => pairs, bins => bins);
    if f.ty.is_some() {
        cfg.ty = f.ty;
    }
    if f.h.is_some() {
        cfg.h = f.h;
    }
    if f.k.is_some() {
        cfg.k = f.k;
    }
    if f.m.is_some() {
        cfg.m = f.m;
    }
    if f.out.is_some() {
        cfg.out = f.out;
    }
    if f.csv.is_some() {
        cfg.csv = f.csv;
    }
    if let Some(fmt) = f.format {
        cfg.format = match fmt {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        };
    }
    Ok(cfg)
}

fn run(cli: Cli) -> chevalley::Result<bool> {
    if cli.flags.explain {
        let mut out = std::io::stdout().lock();
        match &cli.command {
            Some(c) => out.write_all(explain(command_of(c)).as_bytes())?,
            None => {
                for c in Command::ALL {
                    out.write_all(explain(c).as_bytes())?;
                }
            }
        }
        return Ok(true);
    }
    let cfg = config(cli)?;
    let report = run_suite(&cfg)?;
    let bytes = emit_report(&report, cfg.format);
    match &cfg.out {
        Some(p) if cfg.command != Some(Command::Invariants) => std::fs::write(p, &bytes)?,
        _ => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("chevalley: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
