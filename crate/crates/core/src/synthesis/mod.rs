//! Mapping of signed target coefficients onto differential memristor pairs.
//!
//! Each tap `i` is realized as `b̄_i = R_f/R_i+ − R_f/R_i−`, with both
//! memristances restricted to a [`MemristanceGrid`]. Two strategies are
//! provided: [`synthesize_simple`] pins the opposing memristor at the top of
//! the range, [`synthesize_advanced`] searches `R_f` and both memristors.

mod advanced;
mod io;
mod simple;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use advanced::{synthesize_advanced, PairSearch, RfCandidates, SearchConfig, TapChoice};
pub use io::{result_from_json, result_to_csv, result_to_json, SynthesisDocument, TapRecord};
pub use simple::{simple_rf_sweep, synthesize_simple};

use crate::device::{build_grid, GridSpacing, MemristanceGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Simple,
    Advanced,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Simple => "simple",
            Method::Advanced => "advanced",
        })
    }
}

/// Aggregate of per-tap coefficient errors used to rank `R_f` candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveNorm {
    /// `Σ |b_i − b̄_i| / |b_i|`; zero targets contribute `|b̄_i|`.
    #[default]
    SumRelative,
    /// `Σ |b_i − b̄_i|`
    SumAbs,
    /// `Σ (b_i − b̄_i)²`
    SumSquared,
    /// `max |b_i − b̄_i|`
    MaxAbs,
}

impl ObjectiveNorm {
    /// Contribution of one tap before aggregation.
    fn tap_term<T: Real>(self, target: T, realized: T) -> T {
        let diff = (target - realized).abs();
        match self {
            ObjectiveNorm::SumRelative => {
                if target == T::zero() {
                    diff
                } else {
                    diff / target.abs()
                }
            }
            ObjectiveNorm::SumAbs | ObjectiveNorm::MaxAbs => diff,
            ObjectiveNorm::SumSquared => diff * diff,
        }
    }

    fn combine<T: Real>(self, acc: T, term: T) -> T {
        match self {
            ObjectiveNorm::MaxAbs => acc.max(term),
            _ => acc + term,
        }
    }
}

/// Objective `F` between targets and realized coefficients under `norm`.
///
/// Always `≥ 0`, and `0` exactly when the two lists are equal.
pub fn objective<T: Real>(targets: &[T], realized: &[T], norm: ObjectiveNorm) -> Result<T> {
    if targets.len() != realized.len() {
        return Err(Error::LengthMismatch {
            expected: targets.len(),
            found: realized.len(),
        });
    }
    Ok(targets
        .iter()
        .zip(realized)
        .fold(T::zero(), |acc, (&b, &r)| {
            norm.combine(acc, norm.tap_term(b, r))
        }))
}

/// `R_f/R_+ − R_f/R_−`; positive iff `R_+ < R_−`.
#[inline]
pub fn coefficient_from_pair<T: Real>(r_f: T, r_plus: T, r_minus: T) -> T {
    r_f / r_plus - r_f / r_minus
}

/// Per-tap coefficient error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TapError<T> {
    /// `|(b − b̄)/b|·100` for a nonzero target.
    Percent(T),
    /// `|b̄|` for a zero target, where a relative error is undefined.
    Absolute(T),
}

impl<T: Real> TapError<T> {
    pub fn value(self) -> T {
        match self {
            TapError::Percent(v) | TapError::Absolute(v) => v,
        }
    }

    pub fn is_zero_target(self) -> bool {
        matches!(self, TapError::Absolute(_))
    }
}

pub fn percent_error<T: Real>(target: T, realized: T) -> TapError<T> {
    if target == T::zero() {
        TapError::Absolute(realized.abs())
    } else {
        TapError::Percent(((target - realized) / target).abs() * T::lit(100.0))
    }
}

/// Memristances of one tap's differential pair, in Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemristorPair<T> {
    pub r_plus: T,
    pub r_minus: T,
}

impl<T: Real> MemristorPair<T> {
    pub fn new(r_plus: T, r_minus: T) -> Self {
        Self { r_plus, r_minus }
    }

    pub fn swapped(self) -> Self {
        Self {
            r_plus: self.r_minus,
            r_minus: self.r_plus,
        }
    }

    pub fn coefficient(self, r_f: T) -> T {
        coefficient_from_pair(r_f, self.r_plus, self.r_minus)
    }
}

/// Parameters sufficient to rebuild the grid a result was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor<T> {
    pub r_min: T,
    pub r_max: T,
    pub bits: u32,
    pub spacing: GridSpacing,
}

impl<T: Real> GridDescriptor<T> {
    pub fn of(grid: &MemristanceGrid<T>) -> Self {
        Self {
            r_min: grid.r_min(),
            r_max: grid.r_max(),
            bits: grid.bits(),
            spacing: grid.spacing(),
        }
    }

    pub fn build(&self) -> Result<MemristanceGrid<T>> {
        build_grid(self.r_min, self.r_max, self.bits, self.spacing)
    }
}

/// Feedback resistor and per-tap memristor pairs realizing a coefficient set.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult<T> {
    pub method: Method,
    pub r_f: T,
    pub pairs: Vec<MemristorPair<T>>,
    pub targets: Vec<T>,
    pub realized: Vec<T>,
    pub errors: Vec<TapError<T>>,
    pub objective: T,
    pub norm: ObjectiveNorm,
    pub grid: GridDescriptor<T>,
    /// Gain of the final subtracting stage; equal `R_s` resistors give 1.
    pub overall_gain: T,
}

impl<T: Real> SynthesisResult<T> {
    /// Derives realized coefficients, errors and objective from the pairs.
    pub fn from_pairs(
        method: Method,
        r_f: T,
        pairs: Vec<MemristorPair<T>>,
        targets: &[T],
        grid: GridDescriptor<T>,
        norm: ObjectiveNorm,
    ) -> Result<Self> {
        if pairs.len() != targets.len() {
            return Err(Error::LengthMismatch {
                expected: targets.len(),
                found: pairs.len(),
            });
        }
        let realized: Vec<T> = pairs.iter().map(|p| p.coefficient(r_f)).collect();
        let errors = targets
            .iter()
            .zip(&realized)
            .map(|(&b, &r)| percent_error(b, r))
            .collect();
        let objective = objective(targets, &realized, norm)?;
        Ok(Self {
            method,
            r_f,
            pairs,
            targets: targets.to_vec(),
            realized,
            errors,
            objective,
            norm,
            grid,
            overall_gain: T::one(),
        })
    }

    pub fn taps(&self) -> usize {
        self.pairs.len()
    }

    /// Per-tap errors as plain numbers (percent, or absolute for zero targets).
    pub fn errors_pct(&self) -> Vec<T> {
        self.errors.iter().map(|e| e.value()).collect()
    }

    /// Largest percent error over taps with nonzero targets.
    pub fn max_percent_error(&self) -> T {
        self.errors
            .iter()
            .filter_map(|e| match e {
                TapError::Percent(v) => Some(*v),
                TapError::Absolute(_) => None,
            })
            .fold(T::zero(), T::max)
    }

    pub fn mean_percent_error(&self) -> T {
        let percents: Vec<T> = self
            .errors
            .iter()
            .filter_map(|e| match e {
                TapError::Percent(v) => Some(*v),
                TapError::Absolute(_) => None,
            })
            .collect();
        if percents.is_empty() {
            return T::zero();
        }
        percents.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize_lossy(percents.len())
    }
}

/// Checks every structural invariant of `result` against `grid`: matching
/// lengths, grid membership of every memristance and bit-exact agreement of
/// the realized coefficients with the pair formula.
pub fn verify_result<T: Real>(result: &SynthesisResult<T>, grid: &MemristanceGrid<T>) -> bool {
    verify_detail(result, grid).is_ok()
}

pub(crate) fn verify_detail<T: Real>(
    result: &SynthesisResult<T>,
    grid: &MemristanceGrid<T>,
) -> Result<()> {
    let n = result.pairs.len();
    if result.realized.len() != n || result.errors.len() != n || result.targets.len() != n {
        return Err(Error::InvalidResult(
            "per-tap lists have different lengths".into(),
        ));
    }
    if result.grid != GridDescriptor::of(grid) {
        return Err(Error::InvalidResult(
            "result was produced on a different grid".into(),
        ));
    }
    if !(result.r_f > T::zero() && result.r_f.is_finite()) {
        return Err(Error::InvalidResult(format!(
            "R_f = {} is not a positive resistance",
            result.r_f
        )));
    }
    for (i, (pair, &realized)) in result.pairs.iter().zip(&result.realized).enumerate() {
        if !grid.contains(pair.r_plus) || !grid.contains(pair.r_minus) {
            return Err(Error::InvalidResult(format!(
                "tap {i}: memristance not on the grid"
            )));
        }
        if pair.coefficient(result.r_f) != realized {
            return Err(Error::InvalidResult(format!(
                "tap {i}: realized {realized} differs from R_f/R+ − R_f/R−"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::build_grid;

    #[test]
    fn pair_formula_matches_listed_value() {
        let b = coefficient_from_pair(624e3_f64, 493e3, 1000e3);
        assert!((b - 0.641720081).abs() < 5e-10, "{b}");
        assert_eq!(coefficient_from_pair(48e3_f64, 5e5, 5e5), 0.0);
        let small = coefficient_from_pair(48e3_f64, 688e3, 703e3);
        assert!((small - 0.00148863).abs() < 1e-8, "{small}");
    }

    #[test]
    fn sign_follows_pair_order() {
        assert!(coefficient_from_pair(1e4_f64, 2e3, 3e3) > 0.0);
        assert!(coefficient_from_pair(1e4_f64, 3e3, 2e3) < 0.0);
    }

    #[test]
    fn objective_norms() {
        assert_eq!(
            objective(&[0.5, -0.5], &[0.5, -0.5], ObjectiveNorm::SumAbs).unwrap(),
            0.0
        );
        let f = objective(&[1.0_f64, 0.0], &[0.9, 0.1], ObjectiveNorm::SumAbs).unwrap();
        assert!((f - 0.2).abs() < 1e-15);
        let sq = objective(&[1.0_f64, 0.0], &[0.9, 0.1], ObjectiveNorm::SumSquared).unwrap();
        assert!((sq - 0.02).abs() < 1e-15);
        let mx = objective(&[1.0_f64, 0.0], &[0.9, 0.3], ObjectiveNorm::MaxAbs).unwrap();
        assert!((mx - 0.3).abs() < 1e-15);
        let rel = objective(&[2.0_f64, 0.0], &[1.0, 0.25], ObjectiveNorm::SumRelative).unwrap();
        assert!((rel - 0.75).abs() < 1e-15);
        assert!(matches!(
            objective(&[1.0_f64], &[1.0, 2.0], ObjectiveNorm::SumAbs),
            Err(Error::LengthMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn percent_error_cases() {
        let e = percent_error(0.6108322_f64, 0.641720081).value();
        assert!((e - 5.0567).abs() < 5e-4, "{e}");
        let e = percent_error(0.00154566_f64, 0.002156537).value();
        assert!((e - 39.52).abs() < 5e-3, "{e}");
        assert_eq!(percent_error(0.3_f64, 0.3), TapError::Percent(0.0));
        assert_eq!(percent_error(0.0_f64, -0.25), TapError::Absolute(0.25));
    }

    #[test]
    fn verify_catches_tampering() {
        let grid = build_grid(1e3_f64, 1e6, 4, GridSpacing::LinearResistance).unwrap();
        let result = synthesize_simple(&[0.1, 0.2], &grid, None, ObjectiveNorm::default()).unwrap();
        assert!(verify_result(&result, &grid));

        let mut off_grid = result.clone();
        off_grid.pairs[0].r_plus += 1.0;
        off_grid.realized[0] = off_grid.pairs[0].coefficient(off_grid.r_f);
        assert!(!verify_result(&off_grid, &grid));

        let mut wrong_value = result.clone();
        wrong_value.realized[1] += 1e-12;
        assert!(!verify_result(&wrong_value, &grid));

        let mut short = result;
        short.errors.pop();
        assert!(!verify_result(&short, &grid));
    }
}
