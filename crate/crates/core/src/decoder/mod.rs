//! Circuit-level cross-check on rotated surface codes.
//!
//! Four independent bit-flip channels of rate p̃ act on each qubit pair:
//! `ec1` on the control before the CNOT, `ec2` after it, `et1`/`et2` on
//! the target. The CNOT copies `ec1` onto the target, so the detectors see
//! `E^c = ec1 ^ ec2` and `E^t = et1 ^ et2 ^ ec1`. A most-likely-error
//! decoder then picks the single configuration `(c, t)` with the largest
//! joint probability among all those reproducing both syndromes.

mod code;
mod mle;

pub use code::RotatedCode;
pub use mle::{exact_ler_d3, ler_estimate, DecodeOutcome, ExactLer, LerRow, MleDecoder};

use rand::Rng;

use crate::error::check_probability;
use crate::rng::{self, Domain};
use crate::Result;

/// The four channel masks of one shot (bit set = X flip).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorSample {
    pub ec1: u32,
    pub ec2: u32,
    pub et1: u32,
    pub et2: u32,
}

impl ErrorSample {
    /// `(E^c, E^t)` as seen by the detectors.
    pub fn effective(&self) -> (u32, u32) {
        (self.ec1 ^ self.ec2, self.et1 ^ self.et2 ^ self.ec1)
    }
}

fn flip_mask<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> u32 {
    (0..n).fold(0, |m, i| if rng.random::<f64>() < p { m | 1 << i } else { m })
}

pub fn sample_error_with<R: Rng + ?Sized>(code: &RotatedCode, p_tilde: f64, rng: &mut R) -> Result<ErrorSample> {
    check_probability("p_tilde", p_tilde, 0.0, 0.5)?;
    let n = code.n_qubits();
    Ok(ErrorSample {
        ec1: flip_mask(n, p_tilde, rng),
        ec2: flip_mask(n, p_tilde, rng),
        et1: flip_mask(n, p_tilde, rng),
        et2: flip_mask(n, p_tilde, rng),
    })
}

/// One shot drawn from its own stream.
pub fn sample_error(code: &RotatedCode, p_tilde: f64, seed: u64) -> Result<ErrorSample> {
    let mut rng = rng::stream(seed, Domain::CircuitShots, &[code.distance() as u64, p_tilde.to_bits()]);
    sample_error_with(code, p_tilde, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DetectorSet {
    pub control: u32,
    pub target: u32,
}

pub fn detectors(code: &RotatedCode, sample: &ErrorSample) -> DetectorSet {
    let (ec, et) = sample.effective();
    DetectorSet { control: code.syndrome(ec), target: code.syndrome(et) }
}

/// First crossing of two logical-error curves sampled on a common grid.
///
/// `small` and `large` are `(p, ler)` pairs for the smaller and larger code,
/// sorted by `p`. Returns the `p` where `large - small` first turns from
/// negative to non-negative, by linear interpolation; `None` if it never does.
pub fn ler_crossing(small: &[(f64, f64)], large: &[(f64, f64)]) -> Option<f64> {
    let diff: Vec<(f64, f64)> = small
        .iter()
        .zip(large)
        .filter(|(a, b)| a.0 == b.0)
        .map(|(a, b)| (a.0, b.1 - a.1))
        .collect();
    diff.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        (y0 < 0.0 && y1 >= 0.0).then(|| x0 + (x1 - x0) * (-y0) / (y1 - y0))
    })
}

#[cfg(test)]
mod tests;
