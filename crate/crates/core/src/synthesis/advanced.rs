use std::cmp::Ordering;

use rayon::prelude::*;

use crate::device::MemristanceGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{
    coefficient_from_pair, objective, GridDescriptor, MemristorPair, Method, ObjectiveNorm,
    SynthesisResult,
};

/// Feedback resistor values the advanced search evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum RfCandidates<T> {
    List(Vec<T>),
    /// `start, start + step, …` while `≤ stop`.
    Sweep {
        start: T,
        stop: T,
        step: T,
    },
}

impl<T: Real> Default for RfCandidates<T> {
    /// 1 kΩ steps over 1 kΩ–1 MΩ.
    fn default() -> Self {
        RfCandidates::Sweep {
            start: T::lit(1e3),
            stop: T::lit(1e6),
            step: T::lit(1e3),
        }
    }
}

impl<T: Real> RfCandidates<T> {
    /// Sorted, deduplicated candidate list, snapped to `grid` when `on_grid`.
    pub fn resolve(&self, grid: &MemristanceGrid<T>, on_grid: bool) -> Result<Vec<T>> {
        let mut values = match self {
            RfCandidates::List(values) => values.clone(),
            RfCandidates::Sweep { start, stop, step } => {
                if !(*step > T::zero()) || !(*start > T::zero()) || stop < start {
                    return Err(Error::InvalidConfig(format!(
                        "R_f sweep needs 0 < start ≤ stop and step > 0 (got {start}..{stop} by {step})"
                    )));
                }
                (0usize..)
                    .map(|k| *start + T::from_usize_lossy(k) * *step)
                    .take_while(|r| r <= stop)
                    .collect()
            }
        };
        if let Some(bad) = values.iter().find(|r| !(**r > T::zero() && r.is_finite())) {
            return Err(Error::InvalidConfig(format!(
                "R_f candidate {bad} is not a positive resistance"
            )));
        }
        if on_grid {
            for r in &mut values {
                *r = grid.quantize(*r);
            }
        }
        values.sort_by(|a, b| a.total_cmp_real(b));
        values.dedup();
        if values.is_empty() {
            return Err(Error::Infeasible("no R_f candidates".into()));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig<T> {
    pub grid: MemristanceGrid<T>,
    pub r_f_candidates: RfCandidates<T>,
    pub norm: ObjectiveNorm,
    /// Restrict `R_f` to grid levels instead of treating it as an ideal resistor.
    pub rf_on_grid: bool,
    /// Evaluate `R_f` candidates on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl<T: Real> SearchConfig<T> {
    pub fn new(grid: MemristanceGrid<T>) -> Self {
        Self {
            grid,
            r_f_candidates: RfCandidates::default(),
            norm: ObjectiveNorm::default(),
            rf_on_grid: false,
            parallel: true,
        }
    }

    pub fn with_candidates(mut self, candidates: RfCandidates<T>) -> Self {
        self.r_f_candidates = candidates;
        self
    }

    pub fn with_norm(mut self, norm: ObjectiveNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct PairEntry<T> {
    /// `1/R_+ − 1/R_−`, non-negative because `plus ≤ minus`.
    key: T,
    plus: u32,
    minus: u32,
}

/// Exact nearest-coefficient lookup over all grid pairs.
///
/// Holds every pair `(R_+, R_−)` with `R_+ ≤ R_−` sorted by conductance
/// difference. A query binary-searches the scaled target and then walks
/// outward on both sides, evaluating the exact pair formula, until the
/// remaining entries provably cannot beat the best error found. Negative
/// targets are solved on their magnitude and the pair is swapped, which
/// keeps `b → −b` an exact mirror.
#[derive(Debug, Clone)]
pub struct PairSearch<'g, T> {
    grid: &'g MemristanceGrid<T>,
    entries: Vec<PairEntry<T>>,
}

/// Best pair for one tap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapChoice<T> {
    pub pair: MemristorPair<T>,
    pub realized: T,
    pub error: T,
}

impl<'g, T: Real> PairSearch<'g, T> {
    pub fn new(grid: &'g MemristanceGrid<T>) -> Self {
        let levels = grid.levels();
        let n = levels.len();
        let mut entries = Vec::with_capacity(n * (n + 1) / 2);
        for plus in 0..n {
            for minus in plus..n {
                entries.push(PairEntry {
                    key: levels[plus].recip() - levels[minus].recip(),
                    plus: plus as u32,
                    minus: minus as u32,
                });
            }
        }
        entries.sort_by(|a, b| {
            a.key
                .total_cmp_real(&b.key)
                .then(a.plus.cmp(&b.plus))
                .then(a.minus.cmp(&b.minus))
        });
        Self { grid, entries }
    }

    /// Tie order between two pairs with identical error: equal pairs first,
    /// highest level wins; otherwise lexicographically smallest `(R_+, R_−)`.
    fn preferred(a: &PairEntry<T>, b: &PairEntry<T>) -> Ordering {
        match (a.plus == a.minus, b.plus == b.minus) {
            (true, true) => b.plus.cmp(&a.plus),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => a.plus.cmp(&b.plus).then(a.minus.cmp(&b.minus)),
        }
    }

    /// Grid pair minimizing `|target − (R_f/R_+ − R_f/R_−)|`.
    pub fn best(&self, target: T, r_f: T) -> TapChoice<T> {
        let levels = self.grid.levels();
        let magnitude = target.abs();
        let scaled = magnitude / r_f;
        let split = self.entries.partition_point(|e| e.key < scaled);
        // Bound on |R_f·key − realized| from rounding in both expressions.
        let slack = T::epsilon() * T::lit(64.0) * (r_f / self.grid.r_min() + magnitude);

        let mut best: Option<(T, PairEntry<T>)> = None;
        let mut consider = |entry: &PairEntry<T>| -> T {
            let realized = coefficient_from_pair(
                r_f,
                levels[entry.plus as usize],
                levels[entry.minus as usize],
            );
            let error = (magnitude - realized).abs();
            let better = match &best {
                None => true,
                Some((best_error, best_entry)) => match error.total_cmp_real(best_error) {
                    Ordering::Less => true,
                    Ordering::Equal => Self::preferred(entry, best_entry) == Ordering::Less,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((error, *entry));
            }
            best.as_ref().map(|(e, _)| *e).unwrap_or(error)
        };

        let mut bound = T::infinity();
        for entry in self.entries[..split].iter().rev() {
            if magnitude - r_f * entry.key > bound + slack {
                break;
            }
            bound = consider(entry);
        }
        for entry in &self.entries[split..] {
            if r_f * entry.key - magnitude > bound + slack {
                break;
            }
            bound = consider(entry);
        }

        let (_, entry) = best.expect("grid has at least two levels");
        let pair = MemristorPair::new(levels[entry.plus as usize], levels[entry.minus as usize]);
        let (pair, realized) = if target < T::zero() {
            let pair = pair.swapped();
            (pair, pair.coefficient(r_f))
        } else {
            (pair, pair.coefficient(r_f))
        };
        TapChoice {
            pair,
            realized,
            error: (target - realized).abs(),
        }
    }

    fn evaluate(&self, targets: &[T], r_f: T, norm: ObjectiveNorm) -> (T, Vec<MemristorPair<T>>) {
        let choices: Vec<TapChoice<T>> = targets.iter().map(|&b| self.best(b, r_f)).collect();
        let realized: Vec<T> = choices.iter().map(|c| c.realized).collect();
        let f = objective(targets, &realized, norm).expect("lengths match by construction");
        (f, choices.into_iter().map(|c| c.pair).collect())
    }
}

/// Three degrees of freedom: `R_f` from the candidate sweep and both
/// memristors per tap.
///
/// For each `R_f` the taps decouple and each is solved exactly over the
/// grid; the candidate with the smallest objective wins, ties going to the
/// lowest `R_f`. Serial and parallel evaluation give bitwise-identical
/// results.
pub fn synthesize_advanced<T: Real>(
    targets: &[T],
    config: &SearchConfig<T>,
) -> Result<SynthesisResult<T>> {
    if targets.is_empty() {
        return Err(Error::Infeasible("no target coefficients".into()));
    }
    if let Some(bad) = targets.iter().find(|b| !b.is_finite()) {
        return Err(Error::InvalidConfig(format!("non-finite target {bad}")));
    }
    let grid = &config.grid;
    let candidates = config.r_f_candidates.resolve(grid, config.rf_on_grid)?;
    let search = PairSearch::new(grid);
    let norm = config.norm;

    let score =
        |idx: usize| -> (T, usize) { (search.evaluate(targets, candidates[idx], norm).0, idx) };
    let pick = |a: (T, usize), b: (T, usize)| -> (T, usize) {
        match a.0.total_cmp_real(&b.0).then(a.1.cmp(&b.1)) {
            Ordering::Greater => b,
            _ => a,
        }
    };
    let (_, best_idx) = if config.parallel {
        (0..candidates.len())
            .into_par_iter()
            .map(score)
            .reduce_with(pick)
            .expect("candidate list is non-empty")
    } else {
        (0..candidates.len())
            .map(score)
            .reduce(pick)
            .expect("candidate list is non-empty")
    };

    let r_f = candidates[best_idx];
    let (_, pairs) = search.evaluate(targets, r_f, norm);
    SynthesisResult::from_pairs(
        Method::Advanced,
        r_f,
        pairs,
        targets,
        GridDescriptor::of(grid),
        norm,
    )
}
