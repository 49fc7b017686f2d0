//! `chromadapt`: batch chromatic adaptation, spectral reconstruction,
//! dataset evaluation and locus sweeps.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chromadapt::{presets, Method, Tristimulus};

#[derive(Debug, Parser)]
#[command(name = "chromadapt", version, about = "Chromatic adaptation by spectral reconstruction")]
pub struct Cli {
    /// Colour-matching functions: `builtin` or a `wavelength_nm,xbar,ybar,zbar` CSV.
    #[arg(long, global = true, default_value = "builtin")]
    pub cmf: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Auto,
    #[value(name = "0-1")]
    Unit,
    #[value(name = "0-100")]
    Percent,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict destination tristimulus values.
    Transform(TransformArgs),
    /// Reconstruct a reflectance from a tristimulus value.
    Reconstruct(ReconstructArgs),
    /// Score methods against corresponding-colour datasets.
    Eval(EvalArgs),
    /// Map an optimum-colour slice to destinations near the spectral locus.
    GamutSweep(SweepArgs),
    /// Dump the spectral-locus polygon.
    Locus,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, default_value = "spectral", value_parser = parse_method)]
    pub method: Method,
    /// Source white: A, C, D65, EE, or X,Y,Z.
    #[arg(long, value_parser = parse_white)]
    pub src_wp: Tristimulus,
    /// Destination white: A, C, D65, EE, or X,Y,Z.
    #[arg(long, value_parser = parse_white)]
    pub dst_wp: Tristimulus,
    /// Degree of adaptation.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    /// Scale of the input tristimulus values; outputs use the same scale.
    #[arg(long, value_enum, default_value_t = ScaleArg::Auto)]
    pub scale: ScaleArg,
    #[arg(long, value_parser = parse_xyz, conflicts_with = "input", required_unless_present = "input")]
    pub xyz: Option<Tristimulus>,
    /// CSV with columns X,Y,Z and an optional id column.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long, value_parser = parse_xyz)]
    pub xyz: Tristimulus,
    /// Referencing illuminant given by its white point (A, C, D65, EE, or X,Y,Z).
    #[arg(long, value_parser = parse_white, conflicts_with = "illuminant_file", required_unless_present = "illuminant_file")]
    pub illuminant_wp: Option<Tristimulus>,
    /// Referencing illuminant as a `wavelength_nm,value` CSV.
    #[arg(long)]
    pub illuminant_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ScaleArg::Auto)]
    pub scale: ScaleArg,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of dataset CSV files with JSON sidecars.
    #[arg(long)]
    pub datasets: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "hpe,cat02,cat16,spectral", value_parser = parse_method)]
    pub methods: Vec<Method>,
    /// Where to write the full JSON report in CSV mode (default `<out>.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "spectral-sym", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = 0.3)]
    pub y_slice: f64,
    #[arg(long, default_value_t = 0.9)]
    pub fraction: f64,
    #[arg(long, default_value_t = 9)]
    pub count: usize,
    /// Boundary points on the optimum-colour slice.
    #[arg(long, default_value_t = 360)]
    pub samples: usize,
    /// Source white and sweep centre (A, C, D65, EE, or X,Y,Z).
    #[arg(long, default_value = "EE", value_parser = parse_white)]
    pub center: Tristimulus,
    /// Where to write the summary JSON in CSV mode (default `<out>.summary.json`, else stderr).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: chromadapt::Error| e.to_string())
}

fn parse_xyz(s: &str) -> Result<Tristimulus, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(format!("expected X,Y,Z, got `{s}`"));
    };
    let num = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("`{t}` is not a number"));
    Ok(Tristimulus::new(num(x)?, num(y)?, num(z)?))
}

fn parse_white(s: &str) -> Result<Tristimulus, String> {
    if let Some(wp) = presets::white_point(s.trim()) {
        return Ok(wp);
    }
    let wp = parse_xyz(s).map_err(|_| format!("`{s}` is neither a preset ({}) nor X,Y,Z", presets::NAMES.join(", ")))?;
    if wp.y <= 0.0 {
        return Err(format!("white point `{s}` has Y <= 0"));
    }
    Ok(wp)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { commands::EXIT_CONFIG.into() } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().into()
        }
    }
}
