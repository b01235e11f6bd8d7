use super::hamiltonian;
use crate::lattice::Torus2D;
use crate::noise::{ATCouplings, DisorderField2D};
use crate::{Error, Result};

/// Total spin count (`σ` plus `τ`) the enumerator accepts.
pub const EXACT_SPIN_LIMIT: usize = 18;

/// Exact thermal averages of one disorder realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactAverages {
    pub z: f64,
    pub ln_z: f64,
    pub m_sigma: f64,
    pub m_tau: f64,
    pub energy: f64,
}

/// Sums all `4^N` spin configurations of a lattice with `L <= 3`.
pub fn exact_partition_small(
    lattice: &Torus2D,
    disorder: &DisorderField2D,
    couplings: ATCouplings,
    beta: f64,
) -> Result<ExactAverages> {
    let n = lattice.n_sites();
    if 2 * n > EXACT_SPIN_LIMIT {
        return Err(Error::SizeCap { limit: EXACT_SPIN_LIMIT, got: 2 * n });
    }
    let configs = 1usize << (2 * n);
    let spins = |bits: usize, offset: usize| -> Vec<i8> {
        (0..n).map(|i| if bits >> (offset + i) & 1 == 1 { -1 } else { 1 }).collect()
    };
    let energies: Vec<(f64, f64, f64)> = (0..configs)
        .map(|bits| {
            let (sigma, tau) = (spins(bits, 0), spins(bits, n));
            let e = hamiltonian(lattice, disorder, couplings, &sigma, &tau);
            let m = |v: &[i8]| v.iter().map(|&s| s as i32).sum::<i32>().abs() as f64 / n as f64;
            (e, m(&sigma), m(&tau))
        })
        .collect();
    let e_min = energies.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let (mut z, mut ms, mut mt, mut en) = (0.0, 0.0, 0.0, 0.0);
    for &(e, a, b) in &energies {
        let w = (-beta * (e - e_min)).exp();
        z += w;
        ms += w * a;
        mt += w * b;
        en += w * e;
    }
    let ln_z = z.ln() - beta * e_min;
    Ok(ExactAverages { z: ln_z.exp(), ln_z, m_sigma: ms / z, m_tau: mt / z, energy: en / z })
}
