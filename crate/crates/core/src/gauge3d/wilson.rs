use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GaugeSpecies, GaugeState3D};
use crate::at2d::Schedule;
use crate::lattice::Cubic3D;
use crate::noise::{sample_disorder_3d, GaugeCouplings};
use crate::rng::{self, Domain};
use crate::stats::mean_stderr;
use crate::{Error, Result};

/// A rectangular spatial loop; `t = None` averages over interior slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonLoopSpec {
    pub r1: usize,
    pub r2: usize,
    pub t: Option<usize>,
    pub species: GaugeSpecies,
}

impl WilsonLoopSpec {
    pub fn sigma(r1: usize, r2: usize) -> Self {
        Self {
            r1,
            r2,
            t: None,
            species: GaugeSpecies::Sigma,
        }
    }

    pub fn perimeter(&self) -> usize {
        2 * (self.r1 + self.r2)
    }

    pub fn validate(&self, lattice: &Cubic3D) -> Result<()> {
        let half = lattice.size() / 2;
        for r in [self.r1, self.r2] {
            if r < 2 || r > half {
                return Err(Error::Geometry(format!(
                    "loop side {r} outside [2, {half}] for L = {}",
                    lattice.size()
                )));
            }
        }
        if let Some(t) = self.t {
            if t >= lattice.tmax() {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    limit: lattice.tmax(),
                });
            }
        }
        Ok(())
    }

    /// Slices measured: the requested one, else all but the two boundary slices.
    fn slices(&self, lattice: &Cubic3D) -> Vec<usize> {
        match self.t {
            Some(t) => vec![t],
            None if lattice.tmax() >= 3 => (1..lattice.tmax() - 1).collect(),
            None => (0..lattice.tmax()).collect(),
        }
    }

    /// Average of the loop over every position and both orientations.
    pub fn measure(&self, state: &GaugeState3D) -> f64 {
        let lat = *state.lattice();
        let n_sites = lat.plane().n_sites();
        let shapes: &[(usize, usize)] = if self.r1 == self.r2 {
            &[(self.r1, self.r2)]
        } else {
            &[(self.r1, self.r2), (self.r2, self.r1)]
        };
        let mut sum = 0i64;
        let mut n = 0usize;
        for t in self.slices(&lat) {
            for &(a, b) in shapes {
                for corner in 0..n_sites {
                    sum += state.wilson_loop(self.species, corner, a, b, t) as i64;
                    n += 1;
                }
            }
        }
        sum as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeRunConfig {
    pub l: usize,
    pub tmax: usize,
    pub defect: Option<usize>,
    pub p: f64,
    pub q: f64,
    /// Explicit couplings; defaults to the Nishimori values of `(p, q)`.
    pub couplings: Option<GaugeCouplings>,
    pub schedule: Schedule,
    pub loops: Vec<WilsonLoopSpec>,
    pub seed: u64,
}

impl GaugeRunConfig {
    /// `Tmax = 2L + 1` with the defect at `T = L`, σ loops with sides in `2..=L/2`.
    pub fn standard(l: usize, p: f64, q: f64, schedule: Schedule, seed: u64) -> Self {
        let half = l / 2;
        let mut loops = Vec::new();
        for r1 in 2..=half {
            for r2 in r1..=half {
                loops.push(WilsonLoopSpec::sigma(r1, r2));
            }
        }
        GaugeRunConfig {
            l,
            tmax: 2 * l + 1,
            defect: Some(l),
            p,
            q,
            couplings: None,
            schedule,
            loops,
            seed,
        }
    }

    pub fn lattice(&self) -> Result<Cubic3D> {
        Cubic3D::new(self.l, self.tmax)
    }

    pub fn resolved_couplings(&self) -> Result<GaugeCouplings> {
        match self.couplings {
            Some(c) => Ok(c),
            None => GaugeCouplings::from_rates(self.p, self.q),
        }
    }
}

/// Per-realization time averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeRealization {
    pub index: usize,
    /// One entry per configured loop.
    pub wilson: Vec<f64>,
    /// τ timelike-term average for each row `t + 1/2`.
    pub rows: Vec<f64>,
    pub energy: f64,
    pub acceptance: f64,
}

/// Samples realization `index`, anneals and measures.
pub fn run_gauge_realization(cfg: &GaugeRunConfig, index: usize) -> Result<GaugeRealization> {
    cfg.schedule.validate()?;
    let lat = cfg.lattice()?;
    for spec in &cfg.loops {
        spec.validate(&lat)?;
    }
    let couplings = cfg.resolved_couplings()?;
    let seed = rng::stream_id(
        Domain::Disorder3D,
        &[cfg.seed, cfg.l as u64, cfg.tmax as u64, index as u64],
    );
    let disorder = sample_disorder_3d(lat, cfg.p, cfg.q, seed)?;
    let mut rng = rng::stream(seed, Domain::Chain3D, &[cfg.l as u64, cfg.tmax as u64]);
    let mut state = GaugeState3D::random(disorder, couplings, cfg.defect, &mut rng)?;

    let mut stats = crate::at2d::SweepStats::default();
    for &beta in &cfg.schedule.betas {
        state.set_beta(beta)?;
        for _ in 0..cfg.schedule.sweeps_per_rung {
            stats += state.metropolis_sweep(&mut rng);
        }
    }
    let n_rows = lat.tmax() - 1;
    let mut wilson = vec![0.0; cfg.loops.len()];
    let mut rows = vec![0.0; n_rows];
    let mut energy = 0.0;
    let mut n = 0usize;
    for sweep in 1..=cfg.schedule.measure_sweeps {
        stats += state.metropolis_sweep(&mut rng);
        if sweep % cfg.schedule.measure_interval == 0 {
            for (w, spec) in wilson.iter_mut().zip(&cfg.loops) {
                *w += spec.measure(&state);
            }
            for (t, r) in rows.iter_mut().enumerate() {
                *r += state.tau_row_average(t);
            }
            energy += state.tracked_energy();
            n += 1;
        }
    }
    let scale = 1.0 / n as f64;
    wilson
        .iter_mut()
        .chain(rows.iter_mut())
        .for_each(|x| *x *= scale);
    Ok(GaugeRealization {
        index,
        wilson,
        rows,
        energy: energy * scale,
        acceptance: stats.rate(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonEstimate {
    pub r1: usize,
    pub r2: usize,
    pub perimeter: usize,
    pub mean: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeEnsemble {
    pub config: GaugeRunConfig,
    pub n_realizations: usize,
    pub loops: Vec<WilsonEstimate>,
    /// `(mean, err)` of the τ row average per `t + 1/2`.
    pub rows: Vec<(f64, f64)>,
}

/// Disorder average over `n` realizations, run in parallel and reduced in
/// index order.
pub fn wilson_ensemble(cfg: &GaugeRunConfig, n: usize) -> Result<GaugeEnsemble> {
    if n < 2 {
        return Err(Error::Schedule("need at least 2 realizations".into()));
    }
    let runs: Vec<GaugeRealization> = (0..n)
        .into_par_iter()
        .map(|i| run_gauge_realization(cfg, i))
        .collect::<Result<_>>()?;
    Ok(GaugeEnsemble::from_realizations(cfg, runs))
}

impl GaugeEnsemble {
    /// Reduces finished realizations in index order.
    pub fn from_realizations(cfg: &GaugeRunConfig, mut runs: Vec<GaugeRealization>) -> Self {
        runs.sort_by_key(|r| r.index);
        let n = runs.len();
        let column = |f: &dyn Fn(&GaugeRealization) -> f64| {
            let xs: Vec<f64> = runs.iter().map(f).collect();
            mean_stderr(&xs)
        };
        let loops = cfg
            .loops
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let (mean, err) = column(&|r| r.wilson[k]);
                WilsonEstimate {
                    r1: spec.r1,
                    r2: spec.r2,
                    perimeter: spec.perimeter(),
                    mean,
                    err,
                }
            })
            .collect();
        let n_rows = cfg.tmax - 1;
        let rows = (0..n_rows).map(|t| column(&|r| r.rows[t])).collect();
        GaugeEnsemble {
            config: cfg.clone(),
            n_realizations: n,
            loops,
            rows,
        }
    }
}

/// τ row averages as `(t, mean, err)`, the row `t` standing for `t + 1/2`.
pub fn defect_local_order(ensemble: &GaugeEnsemble) -> Vec<(usize, f64, f64)> {
    ensemble
        .rows
        .iter()
        .enumerate()
        .map(|(t, &(m, e))| (t, m, e))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopTensionFit {
    /// Perimeter coefficient in `-ln W = A |γ| + c`.
    pub a: f64,
    pub a_err: f64,
    pub intercept: f64,
    pub intercept_err: f64,
    pub perimeters: Vec<usize>,
    pub residuals: Vec<f64>,
}

/// Weighted least squares of `-ln W` against perimeter over loops with
/// `W > 3 err`. Needs three distinct perimeters among them.
pub fn loop_tension(loops: &[WilsonEstimate]) -> Result<LoopTensionFit> {
    let usable: Vec<&WilsonEstimate> = loops
        .iter()
        .filter(|w| w.mean > 0.0 && w.mean > 3.0 * w.err)
        .collect();
    let mut distinct: Vec<usize> = usable.iter().map(|w| w.perimeter).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Indeterminate(format!(
            "confined or too noisy: {} resolvable perimeters",
            distinct.len()
        )));
    }
    let unit = usable.iter().any(|w| !(w.err > 0.0));
    let pts: Vec<(f64, f64, f64)> = usable
        .iter()
        .map(|w| {
            let sy = if unit { 1.0 } else { w.err / w.mean };
            (w.perimeter as f64, -w.mean.ln(), 1.0 / (sy * sy))
        })
        .collect();
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, w) in &pts {
        s += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    let a = (s * sxy - sx * sy) / det;
    let c = (sxx * sy - sx * sxy) / det;
    let residuals: Vec<f64> = pts.iter().map(|&(x, y, _)| y - (a * x + c)).collect();
    let dof = pts.len().saturating_sub(2).max(1) as f64;
    let chi2: f64 = pts
        .iter()
        .zip(&residuals)
        .map(|(&(_, _, w), r)| w * r * r)
        .sum();
    // Unit weights carry no scale; otherwise inflate by the reduced χ² when it exceeds 1.
    let scale = if unit {
        chi2 / dof
    } else {
        (chi2 / dof).max(1.0)
    };
    Ok(LoopTensionFit {
        a,
        a_err: (s / det * scale).sqrt(),
        intercept: c,
        intercept_err: (sxx / det * scale).sqrt(),
        perimeters: usable.iter().map(|w| w.perimeter).collect(),
        residuals,
    })
}
