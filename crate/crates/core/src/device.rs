//! Memristor device model: the programmable memristance grid and HP
//! linear ion-drift state dynamics with a voltage dead-zone.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower end of the default device range in Ω.
pub const DEFAULT_R_MIN: f64 = 1e3;
/// Upper end of the default device range in Ω.
pub const DEFAULT_R_MAX: f64 = 1e6;
/// Voltage magnitude below which the device state does not move.
pub const DEFAULT_DEAD_ZONE_V: f64 = 0.1;

/// How the `2^bits` programmable levels are spread over the range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpacing {
    #[default]
    LinearResistance,
    LinearConductance,
}

impl fmt::Display for GridSpacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridSpacing::LinearResistance => "linear_resistance",
            GridSpacing::LinearConductance => "linear_conductance",
        })
    }
}

/// The set of memristances a tuning circuit of a given resolution can program.
#[derive(Debug, Clone, PartialEq)]
pub struct MemristanceGrid<T> {
    r_min: T,
    r_max: T,
    bits: u32,
    spacing: GridSpacing,
    levels: Vec<T>,
}

/// Builds the `2^bits` level grid over `[r_min, r_max]`.
pub fn build_grid<T: Real>(
    r_min: T,
    r_max: T,
    bits: u32,
    spacing: GridSpacing,
) -> Result<MemristanceGrid<T>> {
    if !(r_min > T::zero() && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidRange {
            r_min: r_min.as_f64(),
            r_max: r_max.as_f64(),
        });
    }
    if !(1..=16).contains(&bits) {
        return Err(Error::InvalidBits(bits));
    }
    let count = 1usize << bits;
    let last = T::from_usize_lossy(count - 1);
    let mut levels: Vec<T> = match spacing {
        GridSpacing::LinearResistance => {
            let step = (r_max - r_min) / last;
            (0..count)
                .map(|k| r_min + T::from_usize_lossy(k) * step)
                .collect()
        }
        GridSpacing::LinearConductance => {
            let g_lo = r_max.recip();
            let g_hi = r_min.recip();
            let step = (g_hi - g_lo) / last;
            // Walk conductances from high to low so resistances come out ascending.
            (0..count)
                .map(|k| (g_hi - T::from_usize_lossy(k) * step).recip())
                .collect()
        }
    };
    levels[0] = r_min;
    levels[count - 1] = r_max;
    if levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidRange {
            r_min: r_min.as_f64(),
            r_max: r_max.as_f64(),
        });
    }
    Ok(MemristanceGrid {
        r_min,
        r_max,
        bits,
        spacing,
        levels,
    })
}

impl<T: Real> MemristanceGrid<T> {
    pub fn r_min(&self) -> T {
        self.r_min
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn spacing(&self) -> GridSpacing {
        self.spacing
    }

    /// Sorted ascending levels; `levels()[0] == r_min`, last is `r_max`.
    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of the level nearest to `r`, lower level on ties.
    pub fn nearest_index(&self, r: T) -> usize {
        let upper = self.levels.partition_point(|&level| level < r);
        if upper == 0 {
            return 0;
        }
        if upper == self.levels.len() {
            return upper - 1;
        }
        let below = r - self.levels[upper - 1];
        let above = self.levels[upper] - r;
        if above < below {
            upper
        } else {
            upper - 1
        }
    }

    /// Nearest programmable level to `r`; out-of-range values clamp.
    pub fn quantize(&self, r: T) -> T {
        self.levels[self.nearest_index(r)]
    }

    /// Exact membership test.
    pub fn contains(&self, r: T) -> bool {
        self.levels
            .binary_search_by(|level| level.total_cmp_real(&r))
            .is_ok()
    }
}

/// HP device constants shared by every memristor in a filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams<T> {
    /// Device thickness `D` in m.
    pub thickness: T,
    pub r_on: T,
    pub r_off: T,
    /// Dopant mobility in m²·s⁻¹·V⁻¹.
    pub mu_v: T,
    /// Dead-zone half-width in V.
    pub v_threshold: T,
}

impl<T: Real> Default for DeviceParams<T> {
    /// Representative HP constants over the 1 kΩ–1 MΩ range.
    fn default() -> Self {
        Self {
            thickness: T::lit(10e-9),
            r_on: T::lit(DEFAULT_R_MIN),
            r_off: T::lit(DEFAULT_R_MAX),
            mu_v: T::lit(1e-14),
            v_threshold: T::lit(DEFAULT_DEAD_ZONE_V),
        }
    }
}

impl<T: Real> DeviceParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_on > T::zero() && self.r_on < self.r_off) {
            return Err(Error::InvalidRange {
                r_min: self.r_on.as_f64(),
                r_max: self.r_off.as_f64(),
            });
        }
        if !(self.thickness > T::zero()) || self.mu_v < T::zero() || self.v_threshold < T::zero() {
            return Err(Error::InvalidConfig(
                "device thickness must be positive, mobility and threshold non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// State of one HP memristor: doped-region width `w` plus device constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorState<T> {
    w: T,
    params: DeviceParams<T>,
}

impl<T: Real> MemristorState<T> {
    /// New state with `w` clamped into `[0, D]`.
    pub fn new(params: DeviceParams<T>, w: T) -> Self {
        Self {
            w: w.max(T::zero()).min(params.thickness),
            params,
        }
    }

    /// Fully undoped device, memristance `r_off`.
    pub fn off(params: DeviceParams<T>) -> Self {
        Self::new(params, T::zero())
    }

    pub fn w(&self) -> T {
        self.w
    }

    pub fn params(&self) -> &DeviceParams<T> {
        &self.params
    }

    /// `M(w) = r_on·(w/D) + r_off·(1 − w/D)`.
    pub fn memristance(&self) -> T {
        let p = &self.params;
        let x = self.w / p.thickness;
        p.r_on * x + p.r_off * (T::one() - x)
    }

    /// One explicit Euler step under voltage `v` for `dt` seconds.
    ///
    /// Positive `v` drives current into the polarity terminal, widening the
    /// doped region and lowering the memristance. Inside the dead-zone the
    /// state is returned unchanged.
    pub fn step(&self, v: T, dt: T) -> Self {
        let p = &self.params;
        if v.abs() <= p.v_threshold {
            return *self;
        }
        let current = v / self.memristance();
        let dw = p.mu_v * (p.r_on / p.thickness) * current * dt;
        Self::new(self.params, self.w + dw)
    }

    /// Programs the device to the grid level nearest `target`.
    pub fn tune(&self, target: T, grid: &MemristanceGrid<T>) -> Result<Self> {
        let p = &self.params;
        let out_of_range = || Error::TargetOutOfDeviceRange {
            target: target.as_f64(),
            r_on: p.r_on.as_f64(),
            r_off: p.r_off.as_f64(),
        };
        if !(target >= p.r_on && target <= p.r_off) {
            return Err(out_of_range());
        }
        let level = grid.quantize(target);
        if !(level >= p.r_on && level <= p.r_off) {
            return Err(out_of_range());
        }
        Ok(self.with_memristance(level))
    }

    /// Closed-form inversion of the memristance expression for `w`.
    pub fn with_memristance(&self, r: T) -> Self {
        let p = &self.params;
        let x = (p.r_off - r) / (p.r_off - p.r_on);
        Self::new(self.params, x * p.thickness)
    }
}
