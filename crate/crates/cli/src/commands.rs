//! Subcommand bodies. Each one computes every output in memory and returns
//! it; nothing touches the filesystem except input reads.

use std::path::{Path, PathBuf};

use serde::Serialize;

use memfir::analysis::{
    common_window, error_report, frequency_response, report_to_csv, response_at,
    response_deviation, response_to_csv, tone_amplitude_window, ResponseDeviation,
};
use memfir::device::DeviceParams;
use memfir::filter_design::{
    design_windowed, format_coefficients, load_coefficients, FilterFamily, FilterSpec,
};
use memfir::sim::{
    delay_chain, drift_check, evaluate_circuit, generate_tones, sample_hold, signal_to_csv,
    CircuitConfig, DriftReport, Signal, ToneSpec,
};
use memfir::synthesis::{
    result_from_json, result_to_csv, result_to_json, synthesize_advanced, synthesize_simple,
    Method, SynthesisResult,
};
use memfir::{Error, Result};

use crate::config::{MethodArg, RunConfig, ScaleArg};

/// Files to write plus lines for stdout. `failure` carries a non-fatal
/// error to report through the exit code once the files are written.
#[derive(Debug, Default, PartialEq)]
pub struct Outputs {
    pub files: Vec<(PathBuf, String)>,
    pub summary: Vec<String>,
    pub failure: Option<String>,
    pub failure_code: u8,
}

impl Outputs {
    fn file(&mut self, path: PathBuf, contents: String) {
        self.files.push((path, contents));
    }

    fn line(&mut self, line: String) {
        self.summary.push(line);
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn design(spec: &FilterSpec<f64>, output: Option<&Path>, cfg: &RunConfig) -> Result<Outputs> {
    let set = design_windowed(spec)?;
    let family = match spec.family {
        FilterFamily::Lowpass => "lowpass",
        FilterFamily::Highpass => "highpass",
    };
    let window = format!("{:?}", spec.window).to_lowercase();
    let header = vec![format!(
        "{family} order {}, f_s = {} Hz, f_c = {} Hz, {window} window",
        spec.order, spec.f_s, spec.f_c
    )];
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.out_dir.join("coefficients.txt"));
    let mut out = Outputs::default();
    out.file(
        path.clone(),
        format_coefficients(set.coefficients(), &header),
    );
    out.line(format!("wrote {} taps to {}", set.len(), path.display()));
    out.line(format!("symmetry: {}", set.symmetry()));
    out.line(format!("dc gain: {}", set.dc_gain()));
    out.line(format!("nyquist gain: {}", set.nyquist_gain()));
    Ok(out)
}

fn methods(arg: MethodArg) -> &'static [Method] {
    match arg {
        MethodArg::Simple => &[Method::Simple],
        MethodArg::Advanced => &[Method::Advanced],
        MethodArg::Both => &[Method::Simple, Method::Advanced],
    }
}

fn run_method(
    targets: &[f64],
    method: Method,
    bits: u32,
    cfg: &RunConfig,
) -> Result<SynthesisResult<f64>> {
    match method {
        Method::Simple => {
            synthesize_simple(targets, &cfg.grid(bits)?, cfg.rf_ohms, cfg.objective.into())
        }
        Method::Advanced => synthesize_advanced(targets, &cfg.search(bits)?),
    }
}

pub fn synth(coeff_file: &Path, cfg: &RunConfig) -> Result<Outputs> {
    let targets = load_coefficients::<f64>(coeff_file)?;
    let mut out = Outputs::default();
    let mut results = Vec::new();
    let mut labels = Vec::new();
    for &method in methods(cfg.method) {
        for &bits in &cfg.bits {
            let stem = format!("synth_{method}_{bits}bit");
            match run_method(targets.coefficients(), method, bits, cfg) {
                Ok(r) => {
                    out.file(
                        cfg.out_dir.join(format!("{stem}.json")),
                        result_to_json(&r)? + "\n",
                    );
                    out.file(cfg.out_dir.join(format!("{stem}.csv")), result_to_csv(&r)?);
                    out.line(format!(
                        "{:>8} {bits:>2} bit  R_f = {} Ω  max error {:.6} %  mean error {:.6} %",
                        method.to_string(),
                        r.r_f,
                        r.max_percent_error(),
                        r.mean_percent_error()
                    ));
                    labels.push(format!("{method}_{bits}bit"));
                    results.push(r);
                }
                Err(e @ Error::Infeasible(_)) => {
                    out.line(format!(
                        "{:>8} {bits:>2} bit  infeasible: {e}",
                        method.to_string()
                    ));
                    out.failure.get_or_insert_with(|| e.to_string());
                    out.failure_code = 3;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if !results.is_empty() {
        let report = error_report(&results, &labels)?;
        out.file(
            cfg.out_dir.join("error_report.csv"),
            report_to_csv(&report)?,
        );
        out.file(cfg.out_dir.join("error_report.json"), to_json(&report)?);
    }
    Ok(out)
}

pub struct SimulateArgs<'a> {
    pub result: Option<&'a Path>,
    pub tones: &'a Path,
    pub f_s: f64,
    pub oversample: usize,
    pub duration: f64,
    pub settle: Option<usize>,
    pub delay_taps: Option<usize>,
}

#[derive(Debug, Serialize)]
struct ComponentMeasurement {
    freq_hz: f64,
    input_amp_v: f64,
    output_amp_v: f64,
    measured_gain: f64,
    /// `|H(f)|` of the realized coefficients.
    expected_gain: f64,
}

#[derive(Debug, Serialize)]
struct Measurement {
    scaling_gain_a: f64,
    peak_input_v: f64,
    peak_device_v: f64,
    f_s_hz: f64,
    dense_rate_hz: f64,
    /// Leading output samples discarded before measuring.
    settle_samples: usize,
    window_samples: usize,
    components: Vec<ComponentMeasurement>,
    drift: DriftReport<f64>,
}

/// CSV `n,tap0,…` of the unit-delay chain driven by `input`.
fn delay_taps_csv(input: &Signal<f64>, taps: usize) -> Result<String> {
    let chain = delay_chain(input, taps - 1);
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("n".to_string())
        .chain((0..taps).map(|k| format!("tap{k}")))
        .collect();
    writer.write_record(&header)?;
    for n in 0..input.len() {
        let row: Vec<String> = std::iter::once(n.to_string())
            .chain(chain.iter().map(|tap| tap[n].to_string()))
            .collect();
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn simulate(args: &SimulateArgs<'_>, cfg: &RunConfig) -> Result<Outputs> {
    let spec: ToneSpec<f64> = serde_json::from_str(&std::fs::read_to_string(args.tones)?)?;
    spec.validate()?;
    if args.oversample == 0 {
        return Err(Error::InvalidConfig(
            "oversampling factor must be at least 1".into(),
        ));
    }
    let dense_rate = args.f_s * args.oversample as f64;
    let dense = generate_tones(&spec, dense_rate, args.duration)?;
    let input = sample_hold(&dense, args.f_s)?;

    let mut out = Outputs::default();
    let (input_csv, input_meta) = signal_to_csv(&input)?;
    out.file(cfg.out_dir.join("input.csv"), input_csv);
    out.file(cfg.out_dir.join("input.json"), input_meta + "\n");
    if let Some(taps) = args.delay_taps {
        if taps == 0 {
            return Err(Error::InvalidConfig(
                "--delay-taps needs at least one tap".into(),
            ));
        }
        out.file(
            cfg.out_dir.join("delay_taps.csv"),
            delay_taps_csv(&input, taps)?,
        );
        out.line(format!(
            "wrote {taps} delay taps over {} samples",
            input.len()
        ));
    }
    let Some(result_path) = args.result else {
        if args.delay_taps.is_none() {
            return Err(Error::InvalidConfig(
                "simulate needs --result, --delay-taps or both".into(),
            ));
        }
        return Ok(out);
    };
    let result: SynthesisResult<f64> = result_from_json(&std::fs::read_to_string(result_path)?)?;

    let mut circuit = CircuitConfig {
        dead_zone_v: cfg.dead_zone_v,
        ..CircuitConfig::default()
    };
    circuit.scaling_gain_a = match cfg.scale_a {
        ScaleArg::Value(a) => a,
        ScaleArg::Auto => circuit.max_scale_for(input.peak()),
    };
    let output = evaluate_circuit(&result, &input, &circuit)?;
    let device = DeviceParams {
        v_threshold: cfg.dead_zone_v,
        ..DeviceParams::default()
    };
    let drift = drift_check(&result, &input, &circuit, &device)?;

    let settle = args.settle.unwrap_or(result.taps() - 1);
    let available = output.len().saturating_sub(settle);
    let freqs: Vec<f64> = spec.components.iter().map(|c| c.freq_hz).collect();
    let window = if freqs.is_empty() {
        0
    } else {
        common_window(&freqs, args.f_s, available)
            .filter(|&w| w >= 2)
            .ok_or(Error::WindowTooShort {
                available,
                required: 2,
            })?
    };
    let components = spec
        .components
        .iter()
        .map(|c| {
            let input_amp = tone_amplitude_window(&input, c.freq_hz, settle, window)?;
            let output_amp = tone_amplitude_window(&output, c.freq_hz, settle, window)?;
            Ok(ComponentMeasurement {
                freq_hz: c.freq_hz,
                input_amp_v: input_amp,
                output_amp_v: output_amp,
                measured_gain: if input_amp > 0.0 {
                    output_amp / input_amp
                } else {
                    0.0
                },
                expected_gain: response_at(&result.realized, c.freq_hz, args.f_s).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (output_csv, output_meta) = signal_to_csv(&output)?;
    out.file(cfg.out_dir.join("output.csv"), output_csv);
    out.file(cfg.out_dir.join("output.json"), output_meta + "\n");
    for c in &components {
        out.line(format!(
            "{:>10} Hz  in {:.6e} V  out {:.6e} V  gain {:.6e} (|H| {:.6e})",
            c.freq_hz, c.input_amp_v, c.output_amp_v, c.measured_gain, c.expected_gain
        ));
    }
    out.line(format!(
        "a = {}, peak device voltage {:.6} V, max drift {:e}",
        circuit.scaling_gain_a, drift.peak_device_voltage, drift.max_relative_change
    ));
    let measurement = Measurement {
        scaling_gain_a: circuit.scaling_gain_a,
        peak_input_v: input.peak(),
        peak_device_v: drift.peak_device_voltage,
        f_s_hz: args.f_s,
        dense_rate_hz: dense_rate,
        settle_samples: settle,
        window_samples: window,
        components,
        drift,
    };
    out.file(cfg.out_dir.join("measurement.json"), to_json(&measurement)?);
    Ok(out)
}

pub struct ResponseArgs<'a> {
    pub coeff_file: &'a Path,
    pub results: &'a [PathBuf],
    pub synthesize: bool,
    pub f_s: f64,
    pub points: usize,
    pub passband: Option<(f64, f64)>,
}

#[derive(Debug, Serialize)]
struct DeviationEntry {
    label: String,
    passband_lo_hz: f64,
    passband_hi_hz: f64,
    #[serde(flatten)]
    deviation: ResponseDeviation<f64>,
}

pub fn response(args: &ResponseArgs<'_>, cfg: &RunConfig) -> Result<Outputs> {
    let targets = load_coefficients::<f64>(args.coeff_file)?;
    let ideal = frequency_response(targets.coefficients(), args.f_s, args.points)?;
    let mut out = Outputs::default();
    out.file(
        cfg.out_dir.join("response_ideal.csv"),
        response_to_csv(&ideal)?,
    );
    out.line(format!(
        "ideal: |H(0)| = {}, |H(f_s/2)| = {}",
        ideal.points[0].magnitude,
        ideal.points[args.points - 1].magnitude
    ));

    let mut realized = Vec::new();
    for path in args.results {
        let r: SynthesisResult<f64> = result_from_json(&std::fs::read_to_string(path)?)?;
        if r.targets != targets.coefficients() {
            return Err(Error::MismatchedTargets);
        }
        realized.push(r);
    }
    if args.synthesize {
        for &method in methods(cfg.method) {
            for &bits in &cfg.bits {
                realized.push(run_method(targets.coefficients(), method, bits, cfg)?);
            }
        }
    }

    let (lo, hi) = args.passband.unwrap_or((0.0, args.f_s / 2.0));
    let mut deviations = Vec::new();
    for r in &realized {
        let label = format!("{}_{}bit", r.method, r.grid.bits);
        let resp = frequency_response(&r.realized, args.f_s, args.points)?;
        let deviation = response_deviation(&ideal, &resp, (lo, hi))?;
        out.file(
            cfg.out_dir.join(format!("response_{label}.csv")),
            response_to_csv(&resp)?,
        );
        out.line(format!(
            "{label}: passband max |ΔdB| {:.6e}, overall max |ΔdB| {:.6e}",
            deviation.passband_max_db, deviation.overall_max_db
        ));
        deviations.push(DeviationEntry {
            label,
            passband_lo_hz: lo,
            passband_hi_hz: hi,
            deviation,
        });
    }
    if !deviations.is_empty() {
        out.file(cfg.out_dir.join("deviation.json"), to_json(&deviations)?);
    }
    Ok(out)
}
