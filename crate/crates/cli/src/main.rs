// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use memfir::filter_design::{FilterFamily, FilterSpec, Window};
use memfir::Error;

use commands::Outputs;
use config::{MethodArg, NormArg, RunConfig, ScaleArg, SpacingArg};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_DEAD_ZONE: u8 = 4;

/// Memristor FIR filter synthesis and behavioral verification.
#[derive(Debug, Parser)]
#[command(name = "memfir", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for generated files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Grid resolutions, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=16))]
    bits: Option<Vec<u32>>,
    #[arg(long, global = true)]
    grid_min_ohms: Option<f64>,
    #[arg(long, global = true)]
    grid_max_ohms: Option<f64>,
    #[arg(long, global = true, value_enum)]
    grid_spacing: Option<SpacingArg>,
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    /// Fixed feedback resistor instead of the search sweep.
    #[arg(long, global = true)]
    rf_ohms: Option<f64>,
    /// Objective minimized by the advanced search.
    #[arg(long, global = true, value_enum)]
    objective: Option<NormArg>,
    /// Input attenuation in (0, 1], or `auto` for the largest value inside the dead-zone.
    #[arg(long, global = true)]
    scale_a: Option<ScaleArg>,
    /// Run the pipeline twice, serially and in parallel, and fail unless
    /// every output is byte-identical.
    #[arg(long, global = true)]
    seedless: bool,
    /// Evaluate R_f candidates on one thread.
    #[arg(long, global = true)]
    serial: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Lowpass,
    Highpass,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WindowArg {
    Rectangular,
    Hamming,
    Hann,
    Blackman,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Design a windowed-sinc filter and write its coefficient file.
    Design {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Sampling frequency in Hz.
        #[arg(long)]
        fs: f64,
        /// Cutoff frequency in Hz.
        #[arg(long)]
        fc: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
        #[arg(long, value_enum, default_value = "hamming")]
        window: WindowArg,
        /// Coefficient file to write [default: OUT_DIR/coefficients.txt].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Map target coefficients onto memristor pairs.
    Synth {
        #[arg(long)]
        coeff_file: PathBuf,
    },
    /// Run a synthesis result on a tone input through the behavioral circuit.
    Simulate {
        /// Synthesis JSON written by `synth`. Without it only the sampled
        /// input (and delay taps, if asked for) are written.
        #[arg(long)]
        result: Option<PathBuf>,
        /// Tone specification JSON `{"components": [{"amp_v", "freq_hz", "phase_rad"}]}`.
        #[arg(long)]
        tones: PathBuf,
        /// Filter sampling frequency in Hz.
        #[arg(long)]
        fs: f64,
        /// Dense-signal rate as a multiple of the sampling frequency.
        #[arg(long, default_value_t = 10)]
        oversample: usize,
        /// Signal length in s.
        #[arg(long, default_value_t = 5e-3)]
        duration: f64,
        /// Output samples to discard before measuring [default: filter order].
        #[arg(long)]
        settle: Option<usize>,
        /// Also write the first N outputs of the unit-delay chain.
        #[arg(long)]
        delay_taps: Option<usize>,
    },
    /// Ideal and realized frequency responses with their deviation.
    Response {
        #[arg(long)]
        coeff_file: PathBuf,
        /// Synthesis JSON to compare against the ideal response; repeatable.
        #[arg(long)]
        result: Vec<PathBuf>,
        /// Filter sampling frequency in Hz.
        #[arg(long)]
        fs: f64,
        #[arg(long, default_value_t = memfir::analysis::DEFAULT_RESPONSE_POINTS)]
        points: usize,
        /// Passband edges in Hz as `lo,hi` [default: 0,f_s/2].
        #[arg(long, value_parser = parse_band)]
        passband: Option<(f64, f64)>,
    },
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower edge: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper edge: {e}"))?;
    if lo < 0.0 || hi < lo {
        return Err(format!("passband needs 0 ≤ lo ≤ hi, got {lo},{hi}"));
    }
    Ok((lo, hi))
}

fn resolve_config(global: &GlobalArgs) -> memfir::Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &global.out_dir {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = &global.bits {
        cfg.bits = v.clone();
    }
    if let Some(v) = global.grid_min_ohms {
        cfg.grid_min_ohms = v;
    }
    if let Some(v) = global.grid_max_ohms {
        cfg.grid_max_ohms = v;
    }
    if let Some(v) = global.grid_spacing {
        cfg.grid_spacing = v;
    }
    if let Some(v) = global.method {
        cfg.method = v;
    }
    if let Some(v) = global.rf_ohms {
        cfg.rf_ohms = Some(v);
    }
    if let Some(v) = global.objective {
        cfg.objective = v;
    }
    if let Some(v) = global.scale_a {
        cfg.scale_a = v;
    }
    cfg.serial |= global.serial;
    cfg.validate()?;
    Ok(cfg)
}

fn execute(command: &Command, cfg: &RunConfig, method_given: bool) -> memfir::Result<Outputs> {
    match command {
        Command::Design {
            family,
            fs,
            fc,
            order,
            window,
            output,
        } => {
            let spec = FilterSpec {
                family: match family {
                    FamilyArg::Lowpass => FilterFamily::Lowpass,
                    FamilyArg::Highpass => FilterFamily::Highpass,
                },
                f_s: *fs,
                f_c: *fc,
                order: *order as usize,
                window: match window {
                    WindowArg::Rectangular => Window::Rectangular,
                    WindowArg::Hamming => Window::Hamming,
                    WindowArg::Hann => Window::Hann,
                    WindowArg::Blackman => Window::Blackman,
                },
            };
            commands::design(&spec, output.as_deref(), cfg)
        }
        Command::Synth { coeff_file } => commands::synth(coeff_file, cfg),
        Command::Simulate {
            result,
            tones,
            fs,
            oversample,
            duration,
            settle,
            delay_taps,
        } => commands::simulate(
            &commands::SimulateArgs {
                result: result.as_deref(),
                tones,
                f_s: *fs,
                oversample: *oversample,
                duration: *duration,
                settle: *settle,
                delay_taps: *delay_taps,
            },
            cfg,
        ),
        Command::Response {
            coeff_file,
            result,
            fs,
            points,
            passband,
        } => commands::response(
            &commands::ResponseArgs {
                coeff_file,
                results: result,
                synthesize: method_given,
                f_s: *fs,
                points: *points,
                passband: *passband,
            },
            cfg,
        ),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidSpec(_)
        | Error::Unsupported(_)
        | Error::Parse { .. }
        | Error::EmptyFile
        | Error::TooFewTaps(_)
        | Error::InvalidRange { .. }
        | Error::InvalidBits(_)
        | Error::InvalidConfig(_)
        | Error::RateMismatch { .. }
        | Error::UnalignedFrequency { .. }
        | Error::WindowTooShort { .. }
        | Error::MismatchedTargets
        | Error::LengthMismatch { .. }
        | Error::Json(_) => EXIT_USAGE,
        Error::Infeasible(_) | Error::TargetOutOfDeviceRange { .. } => EXIT_INFEASIBLE,
        Error::DeadZoneViolation { .. } => EXIT_DEAD_ZONE,
        _ => EXIT_FAILURE,
    }
}

fn write_outputs(outputs: &Outputs) -> std::io::Result<()> {
    for (path, contents) in &outputs.files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, contents)?;
    }
    Ok(())
}

fn first_difference(a: &Outputs, b: &Outputs) -> Option<String> {
    if a.files.len() != b.files.len() {
        return Some(format!("{} files vs {}", a.files.len(), b.files.len()));
    }
    a.files
        .iter()
        .zip(&b.files)
        .find(|(x, y)| x != y)
        .map(|((p, _), _)| p.display().to_string())
        .or_else(|| (a.summary != b.summary).then(|| "stdout summary".to_string()))
}

fn run(cli: &Cli) -> Result<Outputs, (u8, String)> {
    let cfg = resolve_config(&cli.global).map_err(|e| (exit_code(&e), e.to_string()))?;
    // `response` only synthesizes when a method is asked for explicitly.
    let method_given = cli.global.method.is_some();
    let outputs =
        execute(&cli.command, &cfg, method_given).map_err(|e| (exit_code(&e), e.to_string()))?;
    if cli.global.seedless {
        let other = RunConfig {
            serial: !cfg.serial,
            ..cfg.clone()
        };
        let again = execute(&cli.command, &other, method_given)
            .map_err(|e| (exit_code(&e), e.to_string()))?;
        if let Some(diff) = first_difference(&outputs, &again) {
            return Err((EXIT_FAILURE, format!("repeat run differs in {diff}")));
        }
    }
    Ok(outputs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outputs) => {
            for line in &outputs.summary {
                println!("{line}");
            }
            if let Err(e) = write_outputs(&outputs) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_FAILURE);
            }
            if cli.global.seedless {
                println!("seedless: serial and parallel runs produced identical output");
            }
            match &outputs.failure {
                Some(message) => {
                    eprintln!("error: {message}");
                    ExitCode::from(outputs.failure_code)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
