use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use transurf::app::{cmd_mesh, cmd_scan, cmd_verify, CurveInput, OutputFormat, RunConfig, SurfaceInput};
use transurf::curves::expr::Expr;
use transurf::tolerances::Tolerances;
use transurf::{Error, Result};

/// Translation surfaces of framed curves: singular points, their
/// classification, and mesh export.
#[derive(Parser)]
#[command(name = "transurf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find and classify singular points; writes the report and the locus CSV.
    Scan(SurfaceArgs),
    /// Sample the surface on a grid and write an OBJ (or CSV) mesh.
    Mesh(SurfaceArgs),
    /// Run invariant suites: jets, frames, compat, lemma, examples or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Threshold override NAME=VALUE (repeatable).
        #[arg(long = "tol", value_name = "NAME=VAL")]
        tol: Vec<String>,
        /// Also write the checks as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SurfaceArgs {
    /// First curve: expression `(x, y, z)` in one variable, or `@name`.
    #[arg(long = "curve-a", value_name = "EXPR|@name", allow_hyphen_values = true)]
    curve_a: Option<String>,
    /// Frame of the first curve: `frenet` or `ν1; ν2`.
    #[arg(long = "frame-a", value_name = "frenet|EXPR pair", allow_hyphen_values = true)]
    frame_a: Option<String>,
    #[arg(long = "curve-b", value_name = "EXPR|@name", allow_hyphen_values = true)]
    curve_b: Option<String>,
    #[arg(long = "frame-b", value_name = "frenet|EXPR pair", allow_hyphen_values = true)]
    frame_b: Option<String>,
    /// Catalog pair: s0, s1p or s1m.
    #[arg(long)]
    pair: Option<String>,
    /// Self-translation of the first curve, `(γ(u) ± γ(v)) / 2`.
    #[arg(long = "self", value_name = "plus|minus")]
    self_sign: Option<String>,
    /// Parameter window; entries may use `pi`.
    #[arg(long, value_name = "u0,u1,v0,v1", allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, default_value_t = 48)]
    grid: usize,
    /// Threshold override NAME=VALUE (repeatable).
    #[arg(long = "tol", value_name = "NAME=VAL")]
    tol: Vec<String>,
    /// Output path: locus CSV for scan, mesh for mesh.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report path for scan (stdout when absent).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Singular-locus CSV written alongside a mesh.
    #[arg(long)]
    locus: Option<PathBuf>,
    #[arg(long, default_value = "obj", value_name = "obj|csv")]
    format: String,
}

fn tolerances(overrides: &[String]) -> Result<Tolerances> {
    let mut t = Tolerances::default();
    for o in overrides {
        t.apply(o)?;
    }
    Ok(t)
}

fn parse_window(src: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Input(format!("window needs four values u0,u1,v0,v1, got `{src}`")));
    }
    let mut w = [0.0; 4];
    for (slot, p) in w.iter_mut().zip(parts) {
        *slot = Expr::parse(p, &[])?.eval_f64(0.0)?;
    }
    Ok(w)
}

fn config(a: SurfaceArgs) -> Result<RunConfig> {
    let surface = match (a.pair, a.self_sign, a.curve_a, a.curve_b) {
        (Some(name), None, None, None) => SurfaceInput::Named { name },
        (None, Some(sign), Some(c), None) => {
            SurfaceInput::SelfTranslation { curve: CurveInput::new(c, a.frame_a), sign: sign.parse()? }
        }
        (None, None, Some(ca), Some(cb)) => SurfaceInput::Pair {
            a: CurveInput::new(ca, a.frame_a),
            b: CurveInput::new(cb, a.frame_b),
        },
        _ => {
            return Err(Error::Input(
                "give --pair NAME, or --curve-a with --self, or both --curve-a and --curve-b".into(),
            ))
        }
    };
    let mut cfg = RunConfig::new(surface);
    cfg.window = a.window.as_deref().map(parse_window).transpose()?;
    cfg.grid = a.grid;
    cfg.tolerances = tolerances(&a.tol)?;
    cfg.out = a.out;
    cfg.report = a.report;
    cfg.locus = a.locus;
    cfg.format = a.format.parse::<OutputFormat>()?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Scan(a) => cmd_scan(&config(a)?),
        Command::Mesh(a) => cmd_mesh(&config(a)?),
        Command::Verify { suite, tol, report } => cmd_verify(&suite, &tolerances(&tol)?, report.as_ref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

