use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AtState, MoveSet, SweepStats};
use crate::lattice::Torus2D;
use crate::noise::{at_couplings, net_rate, sample_disorder_2d, ATCouplings, DisorderField2D};
use crate::rng::{self, Domain};
use crate::stats::mean_stderr;
use crate::{Error, Result};

/// Annealing ladder and measurement plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Ascending inverse temperatures; the last rung is exactly 1.
    pub betas: Vec<f64>,
    pub sweeps_per_rung: usize,
    /// Sweeps at `beta = 1` after the ladder, measured every `measure_interval`.
    pub measure_sweeps: usize,
    pub measure_interval: usize,
    pub realizations: usize,
}

impl Schedule {
    /// Geometric ladder from `beta_min` to 1 in `rungs` steps.
    pub fn geometric(
        beta_min: f64,
        rungs: usize,
        sweeps_per_rung: usize,
        measure_sweeps: usize,
        measure_interval: usize,
        realizations: usize,
    ) -> Self {
        let rungs = rungs.max(1);
        let mut betas: Vec<f64> = if rungs == 1 {
            vec![1.0]
        } else {
            let ratio = (1.0 / beta_min).ln() / (rungs - 1) as f64;
            (0..rungs).map(|k| beta_min * (ratio * k as f64).exp()).collect()
        };
        if let Some(last) = betas.last_mut() {
            *last = 1.0;
        }
        Self { betas, sweeps_per_rung, measure_sweeps, measure_interval, realizations }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Schedule(m.to_string()));
        if self.betas.last() != Some(&1.0) {
            return err("final rung must be beta = 1");
        }
        if self.betas.iter().any(|&b| !(b > 0.0)) || self.betas.windows(2).any(|w| w[1] < w[0]) {
            return err("betas must be positive and ascending");
        }
        if self.sweeps_per_rung == 0
            || self.measure_sweeps == 0
            || self.measure_interval == 0
            || self.realizations == 0
        {
            return err("all counts must be >= 1");
        }
        if self.measure_interval > self.measure_sweeps {
            return err("measure interval exceeds measurement sweeps");
        }
        Ok(())
    }

    pub fn total_sweeps(&self) -> usize {
        self.betas.len() * self.sweeps_per_rung + self.measure_sweeps
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self::geometric(0.1, 20, 500, 2000, 10, 200)
    }
}

/// Measurements of one chain at `beta = 1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainSeries {
    pub m_sigma: Vec<f64>,
    pub m_tau: Vec<f64>,
    pub energy: Vec<f64>,
    pub acceptance: f64,
}

impl ChainSeries {
    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len().max(1) as f64
    }

    pub fn mean_m_sigma(&self) -> f64 {
        Self::mean(&self.m_sigma)
    }

    pub fn mean_m_tau(&self) -> f64 {
        Self::mean(&self.m_tau)
    }

    pub fn mean_energy(&self) -> f64 {
        Self::mean(&self.energy)
    }
}

/// Random start, ladder, then measurements at `beta = 1`.
pub fn anneal_run(
    disorder: &DisorderField2D,
    couplings: ATCouplings,
    schedule: &Schedule,
    seed: u64,
) -> Result<ChainSeries> {
    schedule.validate()?;
    let lat = disorder.lattice;
    let mut rng = rng::stream(seed, Domain::Chain2D, &[lat.size() as u64]);
    let mut state = AtState::random(disorder.clone(), couplings, schedule.betas[0], &mut rng)?;
    let mut stats = SweepStats::default();
    for &beta in &schedule.betas {
        state.set_beta(beta)?;
        for _ in 0..schedule.sweeps_per_rung {
            stats += state.metropolis_sweep(MoveSet::ALL, &mut rng);
        }
    }
    let n_meas = schedule.measure_sweeps / schedule.measure_interval;
    let mut series = ChainSeries {
        m_sigma: Vec::with_capacity(n_meas),
        m_tau: Vec::with_capacity(n_meas),
        energy: Vec::with_capacity(n_meas),
        acceptance: 0.0,
    };
    for sweep in 1..=schedule.measure_sweeps {
        stats += state.metropolis_sweep(MoveSet::ALL, &mut rng);
        if sweep % schedule.measure_interval == 0 {
            let (ms, mt) = state.magnetizations();
            series.m_sigma.push(ms);
            series.m_tau.push(mt);
            series.energy.push(state.tracked_energy());
        }
    }
    series.acceptance = stats.rate();
    Ok(series)
}

/// Time averages of one disorder realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationMeans {
    pub index: usize,
    pub m_sigma: f64,
    pub m_tau: f64,
    pub energy: f64,
}

/// Seed of realization `index` at size `L` under a master seed.
///
/// The seed does not depend on the error rate, so realization `index` reuses
/// the same uniforms at every point of a scan (common random numbers). This
/// keeps curves smooth in p̃ without biasing any single point.
pub fn realization_seed(master: u64, l: usize, index: usize) -> u64 {
    rng::stream_id(Domain::Disorder2D, &[master, l as u64, index as u64])
}

/// Samples disorder realization `index` and anneals it.
pub fn run_realization(
    lattice: Torus2D,
    p_tilde: f64,
    schedule: &Schedule,
    index: usize,
    master_seed: u64,
) -> Result<RealizationMeans> {
    if p_tilde == 0.0 {
        // Infinite couplings on clean bonds: only the four aligned ground states carry weight.
        return Ok(RealizationMeans {
            index,
            m_sigma: 1.0,
            m_tau: 1.0,
            energy: f64::NEG_INFINITY,
        });
    }
    let seed = realization_seed(master_seed, lattice.size(), index);
    let disorder = sample_disorder_2d(lattice, p_tilde, seed)?;
    let series = anneal_run(&disorder, at_couplings(p_tilde)?, schedule, seed)?;
    Ok(RealizationMeans {
        index,
        m_sigma: series.mean_m_sigma(),
        m_tau: series.mean_m_tau(),
        energy: series.mean_energy(),
    })
}

/// One point of a magnetization curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub l: usize,
    pub p_tilde: f64,
    pub p: f64,
    pub m_sigma: f64,
    pub m_sigma_err: f64,
    pub m_tau: f64,
    pub m_tau_err: f64,
    pub energy: f64,
    pub energy_err: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

impl CurvePoint {
    /// Reduces per-realization means, in index order.
    pub fn from_realizations(
        l: usize,
        p_tilde: f64,
        seed: u64,
        mut runs: Vec<RealizationMeans>,
    ) -> Self {
        runs.sort_by_key(|r| r.index);
        let col = |f: fn(&RealizationMeans) -> f64| runs.iter().map(f).collect::<Vec<_>>();
        let (m_sigma, m_sigma_err) = mean_stderr(&col(|r| r.m_sigma));
        let (m_tau, m_tau_err) = mean_stderr(&col(|r| r.m_tau));
        let (energy, energy_err) = mean_stderr(&col(|r| r.energy));
        Self {
            l,
            p_tilde,
            p: net_rate(p_tilde),
            m_sigma,
            m_sigma_err,
            m_tau,
            m_tau_err,
            energy,
            energy_err: if energy_err.is_nan() { 0.0 } else { energy_err },
            n_realizations: runs.len(),
            seed,
        }
    }
}

/// Disorder average over `n_realizations` independent realizations; they
/// run in parallel and are reduced in index order.
pub fn disorder_average(
    lattice: Torus2D,
    p_tilde: f64,
    schedule: &Schedule,
    n_realizations: usize,
    master_seed: u64,
) -> Result<CurvePoint> {
    if n_realizations < 2 {
        return Err(Error::Schedule("need at least two disorder realizations".into()));
    }
    schedule.validate()?;
    let runs = (0..n_realizations)
        .into_par_iter()
        .map(|r| run_realization(lattice, p_tilde, schedule, r, master_seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvePoint::from_realizations(lattice.size(), p_tilde, master_seed, runs))
}
