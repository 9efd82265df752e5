//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Real scalar the filter, device and simulation code is generic over.
///
/// Implemented for `f32` and `f64`. Everything that has to be bit-exact
/// (grid membership, the pair-to-coefficient map) is computed in `T` itself,
/// never via an intermediate cast.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Conversion from a count or index.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Total order used for deterministic tie-breaking and reductions.
    fn total_cmp_real(&self, other: &Self) -> std::cmp::Ordering;
}

impl Real for f32 {
    fn total_cmp_real(&self, other: &Self) -> std::cmp::Ordering {
        self.total_cmp(other)
    }
}

impl Real for f64 {
    fn total_cmp_real(&self, other: &Self) -> std::cmp::Ordering {
        self.total_cmp(other)
    }
}

/// Returns `(cos, sin)` of `2π·turns`, exact at every quarter turn.
///
/// `turns` is reduced into `[0, 1)` first so large phase accumulations keep
/// their precision.
pub fn unit_phasor<T: Real>(turns: T) -> (T, T) {
    let t = turns - turns.floor();
    let quarter = T::lit(0.25);
    if t == T::zero() {
        (T::one(), T::zero())
    } else if t == quarter {
        (T::zero(), T::one())
    } else if t == T::lit(0.5) {
        (-T::one(), T::zero())
    } else if t == T::lit(0.75) {
        (T::zero(), -T::one())
    } else {
        let angle = T::TAU() * t;
        (angle.cos(), angle.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(unit_phasor(0.0_f64), (1.0, 0.0));
        assert_eq!(unit_phasor(0.5_f64), (-1.0, 0.0));
        assert_eq!(unit_phasor(3.25_f64), (0.0, 1.0));
        assert_eq!(unit_phasor(-0.25_f64), (0.0, -1.0));
    }

    #[test]
    fn generic_phasor_matches_trig() {
        let (c, s) = unit_phasor(0.1_f32);
        assert!((c - (0.2 * std::f32::consts::PI).cos()).abs() < 1e-6);
        assert!((s - (0.2 * std::f32::consts::PI).sin()).abs() < 1e-6);
    }
}
