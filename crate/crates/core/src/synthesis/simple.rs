use crate::device::MemristanceGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{GridDescriptor, MemristorPair, Method, ObjectiveNorm, SynthesisResult};

/// Step of the `R_f` sweep used when no feedback resistor is given.
const RF_SWEEP_STEP_OHMS: f64 = 1e3;

/// Unquantized memristance that realizes `|b|` against an opposing `r_max`.
fn active_memristance<T: Real>(r_f: T, magnitude: T, r_max: T) -> T {
    if magnitude == T::zero() {
        return r_max;
    }
    r_f / (magnitude + r_f / r_max)
}

/// `R_f` places every active memristance inside the device range.
///
/// The upper bound holds analytically for any `|b| ≥ 0`, so only the lower
/// bound is checked.
fn rf_is_feasible<T: Real>(r_f: T, targets: &[T], grid: &MemristanceGrid<T>) -> bool {
    targets
        .iter()
        .all(|&b| active_memristance(r_f, b.abs(), grid.r_max()) >= grid.r_min())
}

/// Candidates scanned by the simple method: `r_min, r_min + 1 kΩ, …` up to `r_max`.
pub fn simple_rf_sweep<T: Real>(grid: &MemristanceGrid<T>) -> Vec<T> {
    let step = T::lit(RF_SWEEP_STEP_OHMS);
    (0usize..)
        .map(|k| grid.r_min() + T::from_usize_lossy(k) * step)
        .take_while(|&r| r <= grid.r_max())
        .collect()
}

/// One degree of freedom: the opposing memristor sits at `r_max` and the
/// active one is rounded to the nearest grid level.
///
/// Without `r_f`, the smallest sweep value that keeps every unquantized
/// memristance in range is used.
pub fn synthesize_simple<T: Real>(
    targets: &[T],
    grid: &MemristanceGrid<T>,
    r_f: Option<T>,
    norm: ObjectiveNorm,
) -> Result<SynthesisResult<T>> {
    if targets.is_empty() {
        return Err(Error::Infeasible("no target coefficients".into()));
    }
    let r_f = match r_f {
        Some(r_f) => {
            if !(r_f > T::zero() && r_f.is_finite()) {
                return Err(Error::InvalidConfig(format!("R_f = {r_f} must be a positive resistance")));
            }
            if !rf_is_feasible(r_f, targets, grid) {
                return Err(Error::Infeasible(format!(
                    "R_f = {r_f} Ω puts at least one memristance below {} Ω",
                    grid.r_min()
                )));
            }
            r_f
        }
        None => simple_rf_sweep(grid)
            .into_iter()
            .find(|&r| rf_is_feasible(r, targets, grid))
            .ok_or_else(|| {
                Error::Infeasible(format!(
                    "no R_f in [{}, {}] Ω keeps every memristance in range; coefficient magnitude too large for the grid",
                    grid.r_min(),
                    grid.r_max()
                ))
            })?,
    };

    let r_max = grid.r_max();
    let pairs = targets
        .iter()
        .map(|&b| {
            let active = grid.quantize(active_memristance(r_f, b.abs(), r_max));
            if b < T::zero() {
                MemristorPair::new(r_max, active)
            } else {
                MemristorPair::new(active, r_max)
            }
        })
        .collect();
    SynthesisResult::from_pairs(
        Method::Simple,
        r_f,
        pairs,
        targets,
        GridDescriptor::of(grid),
        norm,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{build_grid, GridSpacing};
    use crate::synthesis::verify_result;

    fn grid7() -> MemristanceGrid<f64> {
        build_grid(1e3, 1e6, 7, GridSpacing::LinearResistance).unwrap()
    }

    #[test]
    fn zero_target_uses_top_pair() {
        let g = grid7();
        let r = synthesize_simple(&[0.0], &g, None, ObjectiveNorm::SumAbs).unwrap();
        assert_eq!(r.pairs[0], MemristorPair::new(1e6, 1e6));
        assert_eq!(r.realized[0], 0.0);
        assert_eq!(r.errors[0].value(), 0.0);
    }

    #[test]
    fn negative_targets_mirror_positive_ones() {
        let g = grid7();
        let r = synthesize_simple(&[0.3, -0.3], &g, Some(100e3), ObjectiveNorm::SumAbs).unwrap();
        assert_eq!(r.pairs[0], r.pairs[1].swapped());
        assert_eq!(r.realized[0], -r.realized[1]);
        assert_eq!(r.pairs[0].r_minus, 1e6);
        assert!(verify_result(&r, &g));
    }

    #[test]
    fn default_rf_is_smallest_feasible() {
        let g = grid7();
        let r = synthesize_simple(&[0.5, 0.1], &g, None, ObjectiveNorm::SumAbs).unwrap();
        assert_eq!(r.r_f, 1e3);
        // A coefficient near 999 needs almost the full range.
        let r = synthesize_simple(&[900.0, 1.0], &g, None, ObjectiveNorm::SumAbs).unwrap();
        assert!(r.r_f > 1e3);
        assert!(rf_is_feasible(r.r_f, &[900.0, 1.0], &g));
        assert!(!rf_is_feasible(r.r_f - 1e3, &[900.0, 1.0], &g));
    }

    #[test]
    fn oversized_coefficient_is_infeasible() {
        let g = grid7();
        assert!(matches!(
            synthesize_simple(&[5000.0, 1.0], &g, None, ObjectiveNorm::SumAbs),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            synthesize_simple(&[0.9, 0.1], &g, Some(100.0), ObjectiveNorm::SumAbs),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn sweep_covers_range_in_kilohm_steps() {
        let g = grid7();
        let sweep = simple_rf_sweep(&g);
        assert_eq!(sweep.len(), 1000);
        assert_eq!(sweep[0], 1e3);
        assert_eq!(*sweep.last().unwrap(), 1e6);
    }
}
