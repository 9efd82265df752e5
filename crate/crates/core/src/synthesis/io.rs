//! JSON and CSV forms of [`SynthesisResult`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{verify_detail, GridDescriptor, MemristorPair, Method, ObjectiveNorm, SynthesisResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TapRecord<T> {
    pub r_plus_ohms: T,
    pub r_minus_ohms: T,
    pub target: T,
    pub realized: T,
    /// Percent error, or `|realized|` when `zero_target` is set.
    pub error_pct: T,
    #[serde(default)]
    pub zero_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisDocument<T> {
    pub method: Method,
    pub r_f_ohms: T,
    pub taps: Vec<TapRecord<T>>,
    pub objective: T,
    #[serde(default)]
    pub objective_norm: ObjectiveNorm,
    pub overall_gain: T,
    pub grid: GridDescriptor<T>,
}

impl<T: Real> From<&SynthesisResult<T>> for SynthesisDocument<T> {
    fn from(r: &SynthesisResult<T>) -> Self {
        let taps = r
            .pairs
            .iter()
            .zip(&r.targets)
            .zip(&r.realized)
            .zip(&r.errors)
            .map(|(((pair, &target), &realized), err)| TapRecord {
                r_plus_ohms: pair.r_plus,
                r_minus_ohms: pair.r_minus,
                target,
                realized,
                error_pct: err.value(),
                zero_target: err.is_zero_target(),
            })
            .collect();
        Self {
            method: r.method,
            r_f_ohms: r.r_f,
            taps,
            objective: r.objective,
            objective_norm: r.norm,
            overall_gain: r.overall_gain,
            grid: r.grid,
        }
    }
}

pub fn result_to_json<T: Real>(result: &SynthesisResult<T>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SynthesisDocument::from(
        result,
    ))?)
}

/// Parses a result and re-verifies it against the grid it names.
///
/// Realized coefficients, errors and the objective are recomputed from the
/// stored pairs; a document whose stored values disagree is rejected.
pub fn result_from_json<T: Real>(text: &str) -> Result<SynthesisResult<T>> {
    let doc: SynthesisDocument<T> = serde_json::from_str(text)?;
    let grid = doc.grid.build()?;
    let pairs: Vec<MemristorPair<T>> = doc
        .taps
        .iter()
        .map(|t| MemristorPair::new(t.r_plus_ohms, t.r_minus_ohms))
        .collect();
    let targets: Vec<T> = doc.taps.iter().map(|t| t.target).collect();
    let mut result = SynthesisResult::from_pairs(
        doc.method,
        doc.r_f_ohms,
        pairs,
        &targets,
        doc.grid,
        doc.objective_norm,
    )?;
    result.overall_gain = doc.overall_gain;
    verify_detail(&result, &grid)?;
    if let Some((i, _)) = doc
        .taps
        .iter()
        .zip(&result.realized)
        .enumerate()
        .find(|(_, (t, &r))| t.realized != r)
    {
        return Err(Error::InvalidResult(format!(
            "tap {i}: stored realized value disagrees with its pair"
        )));
    }
    Ok(result)
}

/// One row per tap: `tap,target,realized,r_plus_ohms,r_minus_ohms,error_pct`.
pub fn result_to_csv<T: Real>(result: &SynthesisResult<T>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "tap",
        "target",
        "realized",
        "r_plus_ohms",
        "r_minus_ohms",
        "error_pct",
    ])?;
    for (i, record) in SynthesisDocument::from(result).taps.iter().enumerate() {
        writer.write_record([
            format!("b{i}"),
            record.target.to_string(),
            record.realized.to_string(),
            record.r_plus_ohms.to_string(),
            record.r_minus_ohms.to_string(),
            record.error_pct.to_string(),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{build_grid, GridSpacing};
    use crate::synthesis::{synthesize_advanced, RfCandidates, SearchConfig};

    fn sample() -> SynthesisResult<f64> {
        let grid = build_grid(1e3, 1e6, 5, GridSpacing::LinearResistance).unwrap();
        let cfg = SearchConfig::new(grid).with_candidates(RfCandidates::List(vec![10e3, 47e3]));
        synthesize_advanced(&[0.1, 0.0, -0.3, 1.0 / 3.0], &cfg).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let json = result_to_json(&r).unwrap();
        assert!(json.contains("\"r_f_ohms\""));
        assert!(json.contains("\"linear_resistance\""));
        let back: SynthesisResult<f64> = result_from_json(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn tampered_json_is_rejected() {
        let r = sample();
        let mut doc = SynthesisDocument::from(&r);
        doc.taps[0].r_plus_ohms += 0.5;
        let json = serde_json::to_string(&doc).unwrap();
        assert!(matches!(
            result_from_json::<f64>(&json),
            Err(Error::InvalidResult(_))
        ));
    }

    #[test]
    fn csv_has_one_row_per_tap() {
        let csv = result_to_csv(&sample()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "tap,target,realized,r_plus_ohms,r_minus_ohms,error_pct"
        );
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("b1,0,"));
    }
}
