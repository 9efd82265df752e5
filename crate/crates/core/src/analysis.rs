//! Frequency response, single-bin tone measurement and coefficient error
//! reporting.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{unit_phasor, Real};
use crate::sim::Signal;
use crate::synthesis::{Method, SynthesisResult};

/// Floor applied to magnitudes in dB so exact nulls stay finite.
pub const DB_FLOOR: f64 = -300.0;
pub const DEFAULT_RESPONSE_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint<T> {
    pub f_hz: T,
    pub magnitude: T,
    pub magnitude_db: T,
    pub phase_rad: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse<T> {
    pub points: Vec<ResponsePoint<T>>,
    pub f_s: T,
}

pub fn to_db<T: Real>(magnitude: T) -> T {
    let floor = T::lit(DB_FLOOR);
    if magnitude == T::zero() {
        floor
    } else {
        (T::lit(20.0) * magnitude.log10()).max(floor)
    }
}

fn transfer<T: Real>(coeffs: &[T], turns_of: impl Fn(usize) -> T) -> Complex<T> {
    coeffs
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (i, &b)| {
            let (c, s) = unit_phasor(turns_of(i));
            Complex::new(acc.re + b * c, acc.im - b * s)
        })
}

/// `H(f) = Σ b_i e^{−j2πfi/f_s}` at a single frequency.
pub fn response_at<T: Real>(coeffs: &[T], f_hz: T, f_s: T) -> Complex<T> {
    transfer(coeffs, |i| (f_hz * T::from_usize_lossy(i) / f_s).fract())
}

/// Response on `n_points` uniformly spaced frequencies over `[0, f_s/2]`.
///
/// Phases are reduced with integer arithmetic, so the DC and Nyquist
/// points equal `|Σ b_i|` and `|Σ (−1)^i b_i|` exactly.
pub fn frequency_response<T: Real>(
    coeffs: &[T],
    f_s: T,
    n_points: usize,
) -> Result<FrequencyResponse<T>> {
    if n_points < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 response points, got {n_points}"
        )));
    }
    if !(f_s > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "sample rate {f_s} must be positive"
        )));
    }
    let intervals = n_points - 1;
    // Point k sits at k/(2·intervals) cycles per sample.
    let period = 2 * intervals;
    let points = (0..n_points)
        .map(|k| {
            let h = transfer(coeffs, |i| {
                let residue = ((k as u128 * i as u128) % period as u128) as usize;
                T::from_usize_lossy(residue) / T::from_usize_lossy(period)
            });
            let f_hz = if k == intervals {
                f_s / T::lit(2.0)
            } else {
                f_s * T::from_usize_lossy(k) / T::from_usize_lossy(period)
            };
            let magnitude = h.norm();
            ResponsePoint {
                f_hz,
                magnitude,
                magnitude_db: to_db(magnitude),
                phase_rad: h.im.atan2(h.re),
            }
        })
        .collect();
    Ok(FrequencyResponse { points, f_s })
}

/// CSV `f_hz,magnitude,magnitude_db,phase_rad`.
pub fn response_to_csv<T: Real>(response: &FrequencyResponse<T>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["f_hz", "magnitude", "magnitude_db", "phase_rad"])?;
    for p in &response.points {
        writer.write_record([
            p.f_hz.to_string(),
            p.magnitude.to_string(),
            p.magnitude_db.to_string(),
            p.phase_rad.to_string(),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Smallest window length `q` with `q·f/f_s` integral, and that integer.
fn alignment<T: Real>(f_hz: T, f_s: T, max_len: usize) -> Option<(usize, usize)> {
    let ratio = f_hz / f_s;
    (1..=max_len).find_map(|q| {
        let cycles = ratio * T::from_usize_lossy(q);
        let whole = cycles.round();
        if (cycles - whole).abs() <= T::lit(1e-9) * whole.max(T::one()) {
            Some((q, whole.to_usize()?))
        } else {
            None
        }
    })
}

fn check_tone_frequency<T: Real>(signal: &Signal<T>, f_hz: T) -> Result<()> {
    if !(f_hz >= T::zero()) || f_hz > signal.f_sample / T::lit(2.0) {
        return Err(Error::InvalidConfig(format!(
            "frequency {f_hz} Hz outside [0, f_s/2]"
        )));
    }
    Ok(())
}

/// Amplitude of the sinusoid at `f_hz` by single-bin projection over the
/// samples after `settle`.
///
/// The window is the longest run of post-settle samples holding a whole
/// number of cycles of `f_hz`, and it must hold at least two. Other
/// components in the signal are rejected exactly only if the window is
/// whole-cycle for them too; see [`common_window`] and
/// [`tone_amplitude_window`] for multi-tone signals.
pub fn tone_amplitude<T: Real>(signal: &Signal<T>, f_hz: T, settle: usize) -> Result<T> {
    check_tone_frequency(signal, f_hz)?;
    let available = signal.len().saturating_sub(settle);
    if available < 2 {
        return Err(Error::WindowTooShort {
            available,
            required: 2,
        });
    }
    let (q, _) = alignment(f_hz, signal.f_sample, available).ok_or(Error::UnalignedFrequency {
        freq: f_hz.as_f64(),
    })?;
    tone_amplitude_window(signal, f_hz, settle, (available / q) * q)
}

/// Longest window `≤ available` samples that holds a whole number of
/// cycles of every frequency in `freqs`.
pub fn common_window<T: Real>(freqs: &[T], f_s: T, available: usize) -> Option<usize> {
    let mut period = 1usize;
    for &f in freqs {
        let (q, _) = alignment(f, f_s, available)?;
        period = period / gcd(period, q) * q;
        if period > available {
            return None;
        }
    }
    Some((available / period) * period)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Single-bin amplitude at `f_hz` over exactly `len` samples after `settle`.
pub fn tone_amplitude_window<T: Real>(
    signal: &Signal<T>,
    f_hz: T,
    settle: usize,
    len: usize,
) -> Result<T> {
    check_tone_frequency(signal, f_hz)?;
    let available = signal.len().saturating_sub(settle);
    if len > available || len < 2 {
        return Err(Error::WindowTooShort {
            available: available.min(len),
            required: len.max(2),
        });
    }
    let (q, p) = alignment(f_hz, signal.f_sample, len).ok_or(Error::UnalignedFrequency {
        freq: f_hz.as_f64(),
    })?;
    if !len.is_multiple_of(q) {
        return Err(Error::UnalignedFrequency {
            freq: f_hz.as_f64(),
        });
    }
    if p > 0 && (len / q) * p < 2 {
        let required = q * 2usize.div_ceil(p);
        return Err(Error::WindowTooShort {
            available: len,
            required,
        });
    }
    let window = &signal.samples[settle..settle + len];
    let q_t = T::from_usize_lossy(q);
    let sum = window
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (n, &x)| {
            let residue = ((n as u128 * p as u128) % q as u128) as usize;
            let (c, s) = unit_phasor(T::from_usize_lossy(residue) / q_t);
            Complex::new(acc.re + x * c, acc.im - x * s)
        });
    let n = T::from_usize_lossy(len);
    // DC and Nyquist bins have no conjugate image.
    let edge_bin = p == 0 || 2 * p == q;
    let scale = if edge_bin { n.recip() } else { T::lit(2.0) / n };
    Ok(sum.norm() * scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow<T> {
    pub label: String,
    pub tap: usize,
    pub method: Method,
    pub bits: u32,
    pub target: T,
    pub realized: T,
    pub error_pct: T,
    pub zero_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary<T> {
    pub label: String,
    pub method: Method,
    pub bits: u32,
    pub r_f_ohms: T,
    pub max_error_pct: T,
    pub mean_error_pct: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport<T> {
    pub rows: Vec<ReportRow<T>>,
    pub summaries: Vec<ReportSummary<T>>,
}

/// Per-tap percent errors for several syntheses of the same targets.
pub fn error_report<T: Real>(
    results: &[SynthesisResult<T>],
    labels: &[String],
) -> Result<ErrorReport<T>> {
    if labels.len() != results.len() {
        return Err(Error::LengthMismatch {
            expected: results.len(),
            found: labels.len(),
        });
    }
    if let Some(first) = results.first() {
        if results.iter().any(|r| r.targets != first.targets) {
            return Err(Error::MismatchedTargets);
        }
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (result, label) in results.iter().zip(labels) {
        for (tap, ((&target, &realized), err)) in result
            .targets
            .iter()
            .zip(&result.realized)
            .zip(&result.errors)
            .enumerate()
        {
            rows.push(ReportRow {
                label: label.clone(),
                tap,
                method: result.method,
                bits: result.grid.bits,
                target,
                realized,
                error_pct: err.value(),
                zero_target: err.is_zero_target(),
            });
        }
        summaries.push(ReportSummary {
            label: label.clone(),
            method: result.method,
            bits: result.grid.bits,
            r_f_ohms: result.r_f,
            max_error_pct: result.max_percent_error(),
            mean_error_pct: result.mean_percent_error(),
        });
    }
    Ok(ErrorReport { rows, summaries })
}

/// CSV `tap,method,bits,target,realized,error_pct`.
pub fn report_to_csv<T: Real>(report: &ErrorReport<T>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["tap", "method", "bits", "target", "realized", "error_pct"])?;
    for row in &report.rows {
        writer.write_record([
            row.tap.to_string(),
            row.method.to_string(),
            row.bits.to_string(),
            row.target.to_string(),
            row.realized.to_string(),
            row.error_pct.to_string(),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseDeviation<T> {
    pub passband_max_db: T,
    pub overall_max_db: T,
}

/// Largest `|ΔdB|` between two responses on the same grid, inside the
/// closed band `passband` and over all points.
pub fn response_deviation<T: Real>(
    ideal: &FrequencyResponse<T>,
    realized: &FrequencyResponse<T>,
    passband: (T, T),
) -> Result<ResponseDeviation<T>> {
    if ideal.f_s != realized.f_s
        || ideal.points.len() != realized.points.len()
        || ideal
            .points
            .iter()
            .zip(&realized.points)
            .any(|(a, b)| a.f_hz != b.f_hz)
    {
        return Err(Error::GridMismatch);
    }
    let (lo, hi) = passband;
    let mut in_band = false;
    let mut passband_max = T::zero();
    let mut overall_max = T::zero();
    for (a, b) in ideal.points.iter().zip(&realized.points) {
        let delta = (a.magnitude_db - b.magnitude_db).abs();
        overall_max = overall_max.max(delta);
        if a.f_hz >= lo && a.f_hz <= hi {
            in_band = true;
            passband_max = passband_max.max(delta);
        }
    }
    if !in_band {
        return Err(Error::InvalidConfig(format!(
            "passband [{lo}, {hi}] Hz contains no response points"
        )));
    }
    Ok(ResponseDeviation {
        passband_max_db: passband_max,
        overall_max_db: overall_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_tones, ToneSpec};

    #[test]
    fn unit_impulse_is_flat() {
        let r = frequency_response(&[1.0_f64], 48e3, 64).unwrap();
        assert!(r
            .points
            .iter()
            .all(|p| p.magnitude == 1.0 && p.magnitude_db == 0.0));
        assert_eq!(r.points.last().unwrap().f_hz, 24e3);
        assert_eq!(r.points[0].f_hz, 0.0);
    }

    #[test]
    fn endpoints_are_exact_sums() {
        let c = [0.1_f64, -0.37, 0.22, 0.05, 0.9];
        let r = frequency_response(&c, 10e3, 7).unwrap();
        let dc: f64 = c.iter().fold(0.0, |a, b| a + b);
        let ny = c
            .iter()
            .enumerate()
            .fold(0.0, |a, (i, b)| if i % 2 == 0 { a + b } else { a - b });
        assert_eq!(r.points[0].magnitude, dc.abs());
        assert_eq!(r.points[6].magnitude, ny.abs());
    }

    #[test]
    fn antisymmetric_has_dc_null() {
        let r = frequency_response(&[0.5_f64, 0.25, -0.25, -0.5], 1e3, 16).unwrap();
        assert_eq!(r.points[0].magnitude, 0.0);
        assert_eq!(r.points[0].magnitude_db, DB_FLOOR);
    }

    #[test]
    fn single_point_matches_grid() {
        let c = [0.25_f64, 0.5, 0.25];
        let r = frequency_response(&c, 8e3, 9).unwrap();
        for p in &r.points {
            assert!((response_at(&c, p.f_hz, 8e3).norm() - p.magnitude).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_tone_amplitude() {
        let s = generate_tones(
            &ToneSpec::new(vec![ToneSpec::tone(0.7_f64, 5e3)]).unwrap(),
            400e3,
            2e-3,
        )
        .unwrap();
        assert!((tone_amplitude(&s, 5e3, 0).unwrap() - 0.7).abs() < 1e-9);
        assert!(tone_amplitude(&s, 30e3, 0).unwrap() < 1e-9);
    }

    #[test]
    fn two_tone_separation() {
        let spec = ToneSpec::new(vec![
            ToneSpec::tone(0.4_f64, 5e3),
            ToneSpec::tone(0.4, 60e3),
        ])
        .unwrap();
        let s = generate_tones(&spec, 400e3, 1e-3).unwrap();
        assert!((tone_amplitude(&s, 5e3, 0).unwrap() - 0.4).abs() < 1e-9);
        let len = common_window(&[5e3, 60e3], 400e3, s.len() - 17).unwrap();
        assert_eq!(len, 320);
        assert!((tone_amplitude_window(&s, 60e3, 17, len).unwrap() - 0.4).abs() < 1e-9);
        assert!(tone_amplitude_window(&s, 5e3, 0, 100).is_err());
    }

    #[test]
    fn tone_amplitude_errors() {
        let s = Signal::new(vec![0.0; 100], 400e3).unwrap();
        assert!(matches!(
            tone_amplitude(&s, 5e3, 0),
            Err(Error::WindowTooShort { .. })
        ));
        assert!(matches!(
            tone_amplitude(&s, 1234.5678, 0),
            Err(Error::UnalignedFrequency { .. })
        ));
        assert!(matches!(
            tone_amplitude(&s, 5e3, 100),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn dc_and_nyquist_bins() {
        let s = Signal::new(vec![0.5_f64, 0.5, 0.5, 0.5], 4.0).unwrap();
        assert!((tone_amplitude(&s, 0.0, 0).unwrap() - 0.5).abs() < 1e-15);
        let alt = Signal::new(vec![0.2_f64, -0.2, 0.2, -0.2, 0.2, -0.2], 4.0).unwrap();
        assert!((tone_amplitude(&alt, 2.0, 0).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn deviation_requires_matching_grids() {
        let a = frequency_response(&[0.5_f64, 0.5], 1e3, 8).unwrap();
        let b = frequency_response(&[0.5_f64, 0.5], 1e3, 9).unwrap();
        assert!(matches!(
            response_deviation(&a, &b, (0.0, 100.0)),
            Err(Error::GridMismatch)
        ));
        let d = response_deviation(&a, &a, (0.0, 100.0)).unwrap();
        assert_eq!((d.passband_max_db, d.overall_max_db), (0.0, 0.0));
    }
}
