#![allow(dead_code)]

use std::path::PathBuf;

use memfir::filter_design::{load_coefficients, CoefficientSet};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn lowpass_targets() -> CoefficientSet<f64> {
    load_coefficients(fixture("lowpass16_targets.txt")).expect("lowpass fixture")
}

pub fn highpass_targets() -> CoefficientSet<f64> {
    load_coefficients(fixture("highpass11_targets.txt")).expect("highpass fixture")
}

fn mirror(half: &[f64], sign: f64, odd_length: bool) -> Vec<f64> {
    let mut out = half.to_vec();
    let tail = if odd_length {
        &half[..half.len() - 1]
    } else {
        half
    };
    out.extend(tail.iter().rev().map(|v| sign * v));
    out
}

/// Reference 7-bit realized coefficients of the 16th-order lowpass,
/// one-degree-of-freedom mapping (R_f = 136 kΩ).
pub fn lowpass_simple_reference() -> Vec<f64> {
    mirror(
        &[
            0.002156537,
            0.006681507,
            0.016683004,
            0.032968697,
            0.05734059,
            0.08421784,
            0.112479831,
            0.131556061,
            0.140032665,
        ],
        1.0,
        true,
    )
}

/// Reference 7-bit realized coefficients of the 16th-order lowpass,
/// full search (R_f = 48 kΩ).
pub fn lowpass_advanced_reference() -> Vec<f64> {
    mirror(
        &[
            0.001543060,
            0.005681641,
            0.015224887,
            0.031811106,
            0.055341896,
            0.083064799,
            0.109803747,
            0.129297782,
            0.136423789,
        ],
        1.0,
        true,
    )
}

/// Reference 7-bit realized coefficients of the 11th-order highpass, full search.
pub fn highpass_advanced_reference() -> Vec<f64> {
    mirror(
        &[
            0.003404031,
            0.010744041,
            0.014369824,
            -0.011372795,
            -0.119496585,
            -0.610829511,
        ],
        -1.0,
        false,
    )
}

/// Reference windowed-sinc lowpass (17 taps, cutoff 0.1·Nyquist, Hamming),
/// first half including the center tap, from an independent FIR design
/// routine.
pub const REFERENCE_HAMMING_LOWPASS_HALF: [f64; 9] = [
    0.0025399938350134568,
    0.005744201059608384,
    0.014708336514842971,
    0.031456060871750804,
    0.05548225080960399,
    0.08344191096544862,
    0.10988891143829414,
    0.12885958166909486,
    0.13575750567268552,
];

/// Same routine, 13-tap highpass at 10 kHz / 500 kHz, Hamming, unit gain
/// at Nyquist.
pub const REFERENCE_HAMMING_HIGHPASS_HALF: [f64; 7] = [
    -0.0029136917686037383,
    -0.005314963649860582,
    -0.011918683018561601,
    -0.021152846664310002,
    -0.0305647175292906,
    -0.037544184134575526,
    0.9627701957354197,
];

pub fn mirror_symmetric(half: &[f64]) -> Vec<f64> {
    mirror(half, 1.0, true)
}

/// `max|a − b| / max|b|`, or the plain difference when `b` is all zero.
pub fn max_relative(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
