//! Behavioral model of the sampled analog filter: test tones, ideal
//! track-and-hold, unit-delay chain, direct-form convolution and the
//! two-branch differential summing circuit.

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, MemristorState, DEFAULT_DEAD_ZONE_V};
use crate::error::{Error, Result};
use crate::scalar::{unit_phasor, Real};
use crate::synthesis::{verify_detail, SynthesisResult};

/// Uniformly sampled real waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    pub samples: Vec<T>,
    /// Sample rate in Hz.
    pub f_sample: T,
    /// Time of `samples[0]` in s.
    pub t0: T,
}

impl<T: Real> Signal<T> {
    pub fn new(samples: Vec<T>, f_sample: T) -> Result<Self> {
        Self::with_start(samples, f_sample, T::zero())
    }

    pub fn with_start(samples: Vec<T>, f_sample: T, t0: T) -> Result<Self> {
        if !(f_sample > T::zero() && f_sample.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sample rate {f_sample} must be positive"
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig(
                "signal contains non-finite samples".into(),
            ));
        }
        Ok(Self {
            samples,
            f_sample,
            t0,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn peak(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, s| m.max(s.abs()))
    }

    pub fn time(&self, n: usize) -> T {
        self.t0 + T::from_usize_lossy(n) / self.f_sample
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneComponent<T> {
    pub amp_v: T,
    pub freq_hz: T,
    #[serde(default)]
    pub phase_rad: T,
}

/// Sum of sinusoids `Σ A_k sin(2π f_k t + φ_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct ToneSpec<T> {
    pub components: Vec<ToneComponent<T>>,
}

impl<T: Real> ToneSpec<T> {
    pub fn new(components: Vec<ToneComponent<T>>) -> Result<Self> {
        let spec = Self { components };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tone(amp_v: T, freq_hz: T) -> ToneComponent<T> {
        ToneComponent {
            amp_v,
            freq_hz,
            phase_rad: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.components {
            if !(c.freq_hz >= T::zero()
                && c.freq_hz.is_finite()
                && c.amp_v.is_finite()
                && c.phase_rad.is_finite())
            {
                return Err(Error::InvalidConfig(format!(
                    "invalid tone component {c:?}"
                )));
            }
        }
        Ok(())
    }

    /// Upper bound on `max|x(t)|`.
    pub fn amplitude_bound(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.amp_v.abs())
    }
}

/// Samples a [`ToneSpec`] at `f_sample` for `duration` seconds.
pub fn generate_tones<T: Real>(spec: &ToneSpec<T>, f_sample: T, duration: T) -> Result<Signal<T>> {
    spec.validate()?;
    if !(duration > T::zero() && f_sample > T::zero()) {
        return Err(Error::InvalidConfig(
            "duration and sample rate must be positive".into(),
        ));
    }
    let count = (duration * f_sample).round().to_usize().unwrap_or(0).max(1);
    let samples = (0..count)
        .map(|n| {
            let n = T::from_usize_lossy(n);
            spec.components.iter().fold(T::zero(), |acc, c| {
                // Phase in turns, reduced before scaling so long runs stay exact.
                let turns = (c.freq_hz * n / f_sample).fract() + c.phase_rad / T::TAU();
                acc + c.amp_v * unit_phasor(turns).1
            })
        })
        .collect();
    Signal::new(samples, f_sample)
}

/// Integer ratio between two rates, if `fast` is a whole multiple of `slow`.
fn rate_ratio<T: Real>(fast: T, slow: T) -> Option<usize> {
    let ratio = fast / slow;
    let rounded = ratio.round();
    if rounded >= T::one() && (ratio - rounded).abs() <= T::lit(1e-9) * rounded {
        rounded.to_usize()
    } else {
        None
    }
}

/// Ideal track-and-hold: takes every sample that falls on a clock edge of
/// `f_s`. The dense rate must be an integer multiple of `f_s`.
pub fn sample_hold<T: Real>(signal: &Signal<T>, f_s: T) -> Result<Signal<T>> {
    if !(f_s > T::zero()) || signal.f_sample < f_s {
        return Err(Error::RateMismatch {
            f_sample: signal.f_sample.as_f64(),
            f_s: f_s.as_f64(),
        });
    }
    let ratio = rate_ratio(signal.f_sample, f_s).ok_or(Error::RateMismatch {
        f_sample: signal.f_sample.as_f64(),
        f_s: f_s.as_f64(),
    })?;
    let samples = signal.samples.iter().step_by(ratio).copied().collect();
    Signal::with_start(samples, f_s, signal.t0)
}

/// Outputs of an `m`-stage unit-delay chain: `taps[k][n] = x[n − k]`, with
/// the line at rest (0 V) before the first sample.
pub fn delay_chain<T: Real>(signal: &Signal<T>, m: usize) -> Vec<Vec<T>> {
    let len = signal.len();
    (0..=m)
        .map(|k| {
            let mut tap = vec![T::zero(); len];
            if k < len {
                tap[k..].copy_from_slice(&signal.samples[..len - k]);
            }
            tap
        })
        .collect()
}

/// Direct-form convolution `y[n] = Σ b_i x[n − i]` with zero initial state.
pub fn evaluate_direct<T: Real>(coeffs: &[T], input: &Signal<T>) -> Signal<T> {
    let x = &input.samples;
    let samples = (0..x.len())
        .map(|n| {
            coeffs
                .iter()
                .take(n + 1)
                .enumerate()
                .fold(T::zero(), |acc, (i, &b)| acc + b * x[n - i])
        })
        .collect();
    Signal {
        samples,
        f_sample: input.f_sample,
        t0: input.t0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpAmpModel {
    #[default]
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig<T> {
    /// Input attenuation `a` ahead of the sampler, `0 < a ≤ 1`.
    pub scaling_gain_a: T,
    /// Equal final-stage resistors; only their ratio matters and it is 1.
    pub r_s: T,
    pub op_amp_model: OpAmpModel,
    /// Divide the output by `a` so it is reported at input scale.
    pub compensate_output: bool,
    /// Largest voltage a memristor may see without drifting.
    pub dead_zone_v: T,
    /// Hold capacitance in F. Has no effect with an ideal sampler.
    pub hold_capacitance_f: T,
}

impl<T: Real> Default for CircuitConfig<T> {
    fn default() -> Self {
        Self {
            scaling_gain_a: T::lit(0.1),
            r_s: T::lit(10e3),
            op_amp_model: OpAmpModel::Ideal,
            compensate_output: true,
            dead_zone_v: T::lit(DEFAULT_DEAD_ZONE_V),
            hold_capacitance_f: T::lit(5e-12),
        }
    }
}

impl<T: Real> CircuitConfig<T> {
    pub fn with_scale(scaling_gain_a: T) -> Self {
        Self {
            scaling_gain_a,
            ..Self::default()
        }
    }

    /// Largest `a` that keeps `a·peak` inside the dead-zone (capped at 1).
    pub fn max_scale_for(&self, peak: T) -> T {
        if peak > T::zero() {
            let mut a = (self.dead_zone_v / peak).min(T::one());
            // The quotient can round up by an ulp; back off until the product fits.
            while a * peak > self.dead_zone_v {
                a = a * (T::one() - T::epsilon());
            }
            a
        } else {
            T::one()
        }
    }

    fn check(&self, input: &Signal<T>) -> Result<()> {
        let a = self.scaling_gain_a;
        if !(a > T::zero() && a <= T::one()) {
            return Err(Error::InvalidConfig(format!(
                "scaling gain a = {a} must lie in (0, 1]"
            )));
        }
        let peak = input.peak();
        if a * peak > self.dead_zone_v {
            return Err(Error::DeadZoneViolation {
                peak_v: peak.as_f64(),
                scale: a.as_f64(),
                limit_v: self.dead_zone_v.as_f64(),
                required_scale: self.max_scale_for(peak).as_f64(),
            });
        }
        Ok(())
    }
}

/// Node voltages of one circuit run.
struct CircuitRun<T> {
    /// Voltage seen by every memristor: the scaled, delayed taps.
    taps: Vec<Vec<T>>,
    output: Vec<T>,
}

fn run_circuit<T: Real>(
    result: &SynthesisResult<T>,
    input: &Signal<T>,
    cfg: &CircuitConfig<T>,
) -> Result<CircuitRun<T>> {
    let grid = result.grid.build()?;
    verify_detail(result, &grid)?;
    cfg.check(input)?;
    let a = cfg.scaling_gain_a;
    let scaled = Signal {
        samples: input.samples.iter().map(|&x| a * x).collect(),
        ..input.clone()
    };
    let taps = delay_chain(&scaled, result.taps().saturating_sub(1));

    let r_f = result.r_f;
    let gain_plus: Vec<T> = result.pairs.iter().map(|p| r_f / p.r_plus).collect();
    let gain_minus: Vec<T> = result.pairs.iter().map(|p| r_f / p.r_minus).collect();
    // Equal R_s: the subtractor passes (v_minus − v_plus) with unit gain.
    let stage_gain = result.overall_gain;
    let output = (0..scaled.len())
        .map(|n| {
            // Virtual-ground summers invert their weighted input sums.
            let v_plus = -taps
                .iter()
                .zip(&gain_plus)
                .fold(T::zero(), |acc, (tap, &g)| acc + g * tap[n]);
            let v_minus = -taps
                .iter()
                .zip(&gain_minus)
                .fold(T::zero(), |acc, (tap, &g)| acc + g * tap[n]);
            let y = stage_gain * (v_minus - v_plus);
            if cfg.compensate_output {
                y / a
            } else {
                y
            }
        })
        .collect();
    Ok(CircuitRun { taps, output })
}

/// Output of the two-branch differential circuit for `input`.
///
/// With ideal op-amps this equals [`evaluate_direct`] on the realized
/// coefficients, up to floating-point rounding.
pub fn evaluate_circuit<T: Real>(
    result: &SynthesisResult<T>,
    input: &Signal<T>,
    cfg: &CircuitConfig<T>,
) -> Result<Signal<T>> {
    let run = run_circuit(result, input, cfg)?;
    Ok(Signal {
        samples: run.output,
        f_sample: input.f_sample,
        t0: input.t0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftReport<T> {
    /// Largest `|M(t) − M(0)| / M(0)` over every device and time step.
    pub max_relative_change: T,
    pub devices: usize,
    pub steps: usize,
    /// Largest voltage magnitude applied across any device, in V.
    pub peak_device_voltage: T,
}

/// Drives every tuned memristor with its tap voltage for the whole input
/// and reports the largest memristance change.
pub fn drift_check<T: Real>(
    result: &SynthesisResult<T>,
    input: &Signal<T>,
    cfg: &CircuitConfig<T>,
    device: &DeviceParams<T>,
) -> Result<DriftReport<T>> {
    device.validate()?;
    let run = run_circuit(result, input, cfg)?;
    let grid = result.grid.build()?;
    let dt = input.f_sample.recip();
    let blank = MemristorState::off(*device);

    let mut max_change = T::zero();
    let mut peak_v = T::zero();
    for (pair, tap) in result.pairs.iter().zip(&run.taps) {
        for r in [pair.r_plus, pair.r_minus] {
            let mut state = blank.tune(r, &grid)?;
            let initial = state.memristance();
            for &v in tap {
                peak_v = peak_v.max(v.abs());
                state = state.step(v, dt);
                max_change = max_change.max((state.memristance() - initial).abs() / initial);
            }
        }
    }
    Ok(DriftReport {
        max_relative_change: max_change,
        devices: 2 * result.pairs.len(),
        steps: input.len(),
        peak_device_voltage: peak_v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSidecar<T> {
    pub f_sample_hz: T,
    pub t0: T,
}

/// CSV body `t_seconds,volts` plus its JSON sidecar.
pub fn signal_to_csv<T: Real>(signal: &Signal<T>) -> Result<(String, String)> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["t_seconds", "volts"])?;
    for (n, v) in signal.samples.iter().enumerate() {
        writer.write_record([signal.time(n).to_string(), v.to_string()])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let sidecar = serde_json::to_string_pretty(&SignalSidecar {
        f_sample_hz: signal.f_sample,
        t0: signal.t0,
    })?;
    Ok((
        String::from_utf8(bytes).expect("csv output is ASCII"),
        sidecar,
    ))
}

/// Reads a signal CSV with header `t_seconds,volts` or `n,volts`; timing
/// comes from the sidecar.
pub fn signal_from_csv<T: Real>(csv_text: &str, sidecar_json: &str) -> Result<Signal<T>> {
    let sidecar: SignalSidecar<T> = serde_json::from_str(sidecar_json)?;
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || !matches!(&headers[0], "t_seconds" | "n") || &headers[1] != "volts" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `t_seconds,volts` or `n,volts`".into(),
        });
    }
    let mut samples = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let value = record[1].trim().parse::<T>().map_err(|_| Error::Parse {
            line: idx + 2,
            message: format!("not a number: {:?}", &record[1]),
        })?;
        samples.push(value);
    }
    Signal::with_start(samples, sidecar.f_sample_hz, sidecar.t0)
}
