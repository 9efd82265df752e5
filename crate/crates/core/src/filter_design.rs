//! Target coefficient sets: windowed-sinc design and file ingestion.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default tolerance used when classifying coefficient symmetry.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterFamily {
    Lowpass,
    Highpass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    #[default]
    Hamming,
    Hann,
    Blackman,
}

impl Window {
    /// Symmetric window value at index `n` of an `order + 1` point window.
    fn value<T: Real>(self, n: usize, order: usize) -> T {
        let x = T::from_usize_lossy(n) / T::from_usize_lossy(order);
        let c1 = (T::TAU() * x).cos();
        match self {
            Window::Rectangular => T::one(),
            Window::Hamming => T::lit(0.54) - T::lit(0.46) * c1,
            Window::Hann => T::lit(0.5) - T::lit(0.5) * c1,
            Window::Blackman if n == 0 || n == order => T::zero(),
            Window::Blackman => {
                let c2 = (T::lit(2.0) * T::TAU() * x).cos();
                T::lit(0.42) - T::lit(0.5) * c1 + T::lit(0.08) * c2
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    None,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Antisymmetric => "antisymmetric",
            Symmetry::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec<T> {
    pub family: FilterFamily,
    /// Sampling frequency in Hz.
    pub f_s: T,
    /// Cutoff frequency in Hz.
    pub f_c: T,
    /// Filter order `m`; the filter has `m + 1` taps.
    pub order: usize,
    #[serde(default)]
    pub window: Window,
}

impl<T: Real> FilterSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_s > T::zero()) || !self.f_s.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "sampling frequency {} must be positive",
                self.f_s
            )));
        }
        if !(self.f_c > T::zero() && self.f_c < self.f_s / T::lit(2.0)) {
            return Err(Error::InvalidSpec(format!(
                "cutoff {} Hz must lie strictly between 0 and f_s/2 = {} Hz",
                self.f_c,
                self.f_s / T::lit(2.0)
            )));
        }
        if self.order < 1 {
            return Err(Error::InvalidSpec("order must be at least 1".into()));
        }
        Ok(())
    }
}

/// Ordered target coefficients `b_0..b_m` with their symmetry class.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet<T> {
    coefficients: Vec<T>,
    symmetry: Symmetry,
}

impl<T: Real> CoefficientSet<T> {
    /// Builds a set classified with [`DEFAULT_SYMMETRY_TOL`].
    pub fn new(coefficients: Vec<T>) -> Result<Self> {
        Self::with_tolerance(coefficients, T::lit(DEFAULT_SYMMETRY_TOL))
    }

    pub fn with_tolerance(coefficients: Vec<T>, tol: T) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::TooFewTaps(coefficients.len()));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite coefficient {bad}")));
        }
        let symmetry = classify_symmetry(&coefficients, tol);
        Ok(Self {
            coefficients,
            symmetry,
        })
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Gain at DC, `Σ b_i`.
    pub fn dc_gain(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, &b| acc + b)
    }

    /// Gain at Nyquist, `Σ (-1)^i b_i`.
    pub fn nyquist_gain(&self) -> T {
        self.coefficients
            .iter()
            .enumerate()
            .fold(
                T::zero(),
                |acc, (i, &b)| if i % 2 == 0 { acc + b } else { acc - b },
            )
    }

    pub fn into_inner(self) -> Vec<T> {
        self.coefficients
    }
}

impl<T> AsRef<[T]> for CoefficientSet<T> {
    fn as_ref(&self) -> &[T] {
        &self.coefficients
    }
}

/// Classifies `coeffs` as symmetric, antisymmetric or neither.
///
/// Symmetry is tested first, so an all-zero set is symmetric.
pub fn classify_symmetry<T: Real>(coeffs: &[T], tol: T) -> Symmetry {
    let m = coeffs.len().saturating_sub(1);
    let mirrored = |i: usize| coeffs[m - i];
    if (0..coeffs.len()).all(|i| (coeffs[i] - mirrored(i)).abs() <= tol) {
        Symmetry::Symmetric
    } else if (0..coeffs.len()).all(|i| (coeffs[i] + mirrored(i)).abs() <= tol) {
        Symmetry::Antisymmetric
    } else {
        Symmetry::None
    }
}

/// `sin(πx)/(πx)` with the removable singularity filled in.
fn sinc<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        let px = T::PI() * x;
        px.sin() / px
    }
}

/// Designs a linear-phase (Type I) FIR filter by the windowed-sinc method.
///
/// Lowpass results are scaled to unit DC gain and highpass results to unit
/// gain at Nyquist. Only the first half is computed; the second half is a
/// mirror copy so the output is exactly symmetric.
pub fn design_windowed<T: Real>(spec: &FilterSpec<T>) -> Result<CoefficientSet<T>> {
    spec.validate()?;
    let order = spec.order;
    if spec.family == FilterFamily::Highpass && order % 2 == 1 {
        return Err(Error::Unsupported(format!(
            "highpass design needs an even order (got {order}); ingest precomputed coefficients with --coeff-file instead"
        )));
    }

    let cutoff = T::lit(2.0) * spec.f_c / spec.f_s;
    let center = T::from_usize_lossy(order) / T::lit(2.0);
    let mut taps = vec![T::zero(); order + 1];
    for n in 0..=order / 2 {
        let offset = T::from_usize_lossy(n) - center;
        let lowpass = cutoff * sinc(cutoff * offset);
        let ideal = match spec.family {
            FilterFamily::Lowpass => lowpass,
            FilterFamily::Highpass => sinc(offset) - lowpass,
        };
        let value = ideal * spec.window.value::<T>(n, order);
        taps[n] = value;
        taps[order - n] = value;
    }

    let gain = match spec.family {
        FilterFamily::Lowpass => taps.iter().fold(T::zero(), |acc, &b| acc + b),
        FilterFamily::Highpass => {
            // Gain at Nyquist referenced to the center tap, which keeps it positive.
            taps.iter().enumerate().fold(T::zero(), |acc, (n, &b)| {
                if (n + order / 2).is_multiple_of(2) {
                    acc + b
                } else {
                    acc - b
                }
            })
        }
    };
    if !(gain.abs() > T::zero() && gain.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "{:?} window of order {order} leaves no passband gain to normalize",
            spec.window
        )));
    }
    for tap in &mut taps {
        *tap = *tap / gain;
    }
    CoefficientSet::new(taps)
}

#[derive(Deserialize)]
struct CoefficientDocument<T> {
    coefficients: Vec<T>,
}

/// Parses coefficient text: either one decimal value per line (with `#`
/// comment lines) or a JSON document `{"coefficients": [...]}`.
pub fn parse_coefficients<T: Real>(text: &str) -> Result<CoefficientSet<T>> {
    let trimmed = text.trim_start_matches('\u{feff}').trim();
    let values = if trimmed.starts_with('{') {
        let doc: CoefficientDocument<T> =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
        doc.coefficients
    } else {
        let mut values = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value = line.parse::<T>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("not a decimal number: {line:?}"),
            })?;
            values.push(value);
        }
        values
    };
    if values.is_empty() {
        return Err(Error::EmptyFile);
    }
    CoefficientSet::new(values)
}

pub fn load_coefficients<T: Real>(path: impl AsRef<Path>) -> Result<CoefficientSet<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_coefficients(&text)
}

/// Renders coefficients in the one-per-line text format using shortest
/// round-trip decimal representation.
pub fn format_coefficients<T: Real>(coeffs: &[T], header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for c in coeffs {
        out.push_str(&format!("{c}\n"));
    }
    out
}
