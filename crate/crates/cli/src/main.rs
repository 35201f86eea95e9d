//! `rotsurf` command-line front end.
//!
//! Exit codes: 0 success, 2 input error (bad spec, flag or literal),
//! 3 numerical degeneracy (degenerate radius or metric, zero divisor, ...).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotsurf::commands::{
    cmd_analyze, cmd_bicomplex, cmd_classify, cmd_group_check, cmd_laplacian, AnalysisConfig,
    BicomplexOp, GroupCheckConfig, SourceChoice,
};
use rotsurf::report::{Envelope, Tabular};
use rotsurf::{parse_interval, Error, Interval, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "rotsurf", version, about = "Rotational surfaces in E4: invariants, Gauss map type, bicomplex group checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form invariants against the numerical oracle on a grid.
    Analyze(SweepArgs),
    /// Pointwise 1-type classification of the Gauss map.
    Classify(SweepArgs),
    /// Closed-form vs numeric Laplacian of the Gauss map, with step halving.
    Laplacian(SweepArgs),
    /// Group axioms of the surface under the bicomplex product.
    GroupCheck(GroupArgs),
    /// Bicomplex calculator; literals look like `1+2i-3j+0.5ij`.
    Bicomplex {
        #[command(subcommand)]
        op: BicomplexCmd,
        #[arg(long, value_enum, default_value_t = CalcFormat::Text, global = true)]
        format: CalcFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CalcFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Closed,
    Numeric,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// `family:name(k=v,...)` or `expr:x=..;y=..;s=lo:hi`.
    #[arg(long)]
    profile: String,
    /// Grid as `RxC`: R nodes in s, C nodes in t.
    #[arg(long, default_value = "16x16")]
    grid: String,
    /// s range `lo:hi` (defaults to the profile's domain).
    #[arg(long = "s", allow_hyphen_values = true)]
    s_range: Option<String>,
    /// t range `lo:hi` (defaults to 0:2*pi).
    #[arg(long = "t", allow_hyphen_values = true)]
    t_range: Option<String>,
    /// Finite-difference step of the Laplacian oracle.
    #[arg(long, default_value_t = rotsurf::numeric::LAPLACIAN_STEP)]
    step: f64,
    /// Laplacian fed to the classifier.
    #[arg(long, value_enum, default_value_t = Source::Numeric)]
    source: Source,
    /// Normalized residual threshold of the 1-type fit.
    #[arg(long)]
    tol_residual: Option<f64>,
    /// ‖C‖ threshold separating first from second kind.
    #[arg(long)]
    tol_c: Option<f64>,
    /// Relative ‖ΔG‖ floor for harmonic samples.
    #[arg(long)]
    tol_harmonic: Option<f64>,
    /// Radius floor for x² + y².
    #[arg(long)]
    rho_min: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GroupArgs {
    /// `clifford`, a family spec such as `circle(lambda=2)`, or an `expr:` spec.
    #[arg(long, alias = "profile")]
    surface: String,
    #[arg(long, default_value = "5x5")]
    grid: String,
    #[arg(long = "s", allow_hyphen_values = true, default_value = "-1:1")]
    s_range: String,
    #[arg(long = "t", allow_hyphen_values = true, default_value = "-pi:pi")]
    t_range: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum BicomplexCmd {
    /// Product of two literals.
    Mul {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Inverse (fails on zero divisors).
    Inv {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Conjugation t1, t2 or t3.
    Conj {
        #[arg(allow_hyphen_values = true)]
        a: String,
        which: String,
    },
    /// The 4×4 real matrix image.
    Matrix {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("grid must look like RxC, got `{text}`"));
    let (r, c) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        r.trim().parse().map_err(|_| bad())?,
        c.trim().parse().map_err(|_| bad())?,
    ))
}

fn range(text: &str) -> Result<Interval> {
    parse_interval(text)
}

impl SweepArgs {
    fn config(&self) -> Result<AnalysisConfig> {
        let mut cfg = AnalysisConfig::new(&self.profile);
        cfg.grid = parse_grid(&self.grid)?;
        cfg.s_range = self.s_range.as_deref().map(range).transpose()?;
        cfg.t_range = self.t_range.as_deref().map(range).transpose()?;
        cfg.step = self.step;
        cfg.source = match self.source {
            Source::Closed => SourceChoice::Closed,
            Source::Numeric => SourceChoice::Numeric,
        };
        if let Some(v) = self.tol_residual {
            cfg.thresholds.residual = v;
        }
        if let Some(v) = self.tol_c {
            cfg.thresholds.c_norm = v;
        }
        if let Some(v) = self.tol_harmonic {
            cfg.thresholds.harmonic = v;
        }
        if let Some(v) = self.rho_min {
            cfg.rho_min = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: &Output, text: String) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render<T: Serialize + Tabular>(command: &'static str, report: T, out: &Output) -> Result<()> {
    let text = match out.format {
        Format::Json => Envelope::new(command, report).to_json()?,
        Format::Csv => report.to_csv()?,
    };
    emit(out, text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => render("analyze", cmd_analyze(&a.config()?)?, &a.output),
        Command::Classify(a) => render("classify", cmd_classify(&a.config()?)?, &a.output),
        Command::Laplacian(a) => render("laplacian", cmd_laplacian(&a.config()?)?, &a.output),
        Command::GroupCheck(g) => {
            if matches!(g.output.format, Format::Csv) {
                return Err(Error::Config("group-check reports are JSON only".into()));
            }
            let mut cfg = GroupCheckConfig::new(&g.surface);
            cfg.grid = parse_grid(&g.grid)?;
            cfg.s_range = range(&g.s_range)?;
            cfg.t_range = range(&g.t_range)?;
            let rep = cmd_group_check(&cfg)?;
            emit(&g.output, Envelope::new("group-check", rep).to_json()?)
        }
        Command::Bicomplex { op, format } => {
            let op = match op {
                BicomplexCmd::Mul { a, b } => BicomplexOp::Mul(a, b),
                BicomplexCmd::Inv { a } => BicomplexOp::Inv(a),
                BicomplexCmd::Conj { a, which } => BicomplexOp::Conj(a, which),
                BicomplexCmd::Matrix { a } => BicomplexOp::Matrix(a),
            };
            let rep = cmd_bicomplex(&op)?;
            match format {
                CalcFormat::Text => println!("{}", rep.text()),
                CalcFormat::Json => print!("{}", Envelope::new("bicomplex", rep).to_json()?),
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = ErrorBody {
                kind: e.kind(),
                message: e.to_string(),
                offset: match &e {
                    Error::Parse(p) => Some(p.offset),
                    _ => None,
                },
            };
            let json = serde_json::json!({ "error": body });
            eprintln!("{json}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
