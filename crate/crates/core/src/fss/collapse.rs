use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simplex::nelder_mead;
use crate::at2d::CurvePoint;
use crate::noise::net_rate;
use crate::rng::{self, Domain};
use crate::{Error, Result};

/// Which block's magnetization a curve describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Sigma,
    Tau,
}

impl Species {
    pub fn name(self) -> &'static str {
        match self {
            Species::Sigma => "sigma",
            Species::Tau => "tau",
        }
    }
}

impl std::str::FromStr for Species {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" | "control" => Ok(Species::Sigma),
            "tau" | "target" => Ok(Species::Tau),
            _ => Err(Error::Config(format!("unknown species {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FssRow {
    pub l: usize,
    pub p_tilde: f64,
    pub m: f64,
    pub m_err: f64,
}

/// Magnetization curves for one species at several sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct FssDataset {
    species: Species,
    rows: Vec<FssRow>,
}

impl FssDataset {
    /// Requires at least two sizes, four rates per size and positive errors.
    pub fn new(species: Species, rows: Vec<FssRow>) -> Result<Self> {
        for r in &rows {
            if !(r.m_err > 0.0 && r.m_err.is_finite()) {
                return Err(Error::Dataset(format!(
                    "non-positive error {} at L={} p~={}",
                    r.m_err, r.l, r.p_tilde
                )));
            }
            if !(r.p_tilde > 0.0 && r.p_tilde.is_finite() && r.m.is_finite()) {
                return Err(Error::Dataset(format!("bad row {r:?}")));
            }
        }
        let ds = FssDataset { species, rows };
        let sizes = ds.sizes();
        if sizes.len() < 2 {
            return Err(Error::Dataset(format!("need at least 2 sizes, got {}", sizes.len())));
        }
        for &l in &sizes {
            let n = ds.rows.iter().filter(|r| r.l == l).count();
            if n < 4 {
                return Err(Error::Dataset(format!("size {l} has {n} points, need at least 4")));
            }
        }
        Ok(ds)
    }

    pub fn from_curve(points: &[CurvePoint], species: Species) -> Result<Self> {
        let rows = points
            .iter()
            .map(|c| {
                let (m, m_err) = match species {
                    Species::Sigma => (c.m_sigma, c.m_sigma_err),
                    Species::Tau => (c.m_tau, c.m_tau_err),
                };
                FssRow { l: c.l, p_tilde: c.p_tilde, m, m_err }
            })
            .collect();
        Self::new(species, rows)
    }

    /// Keeps rows with `lo <= p̃ <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .filter(|r| r.p_tilde >= lo && r.p_tilde <= hi)
            .copied()
            .collect();
        Self::new(self.species, rows)
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn rows(&self) -> &[FssRow] {
        &self.rows
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.rows.iter().map(|r| r.l).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn p_range(&self) -> (f64, f64) {
        self.rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.p_tilde), hi.max(r.p_tilde))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub beta: f64,
    pub nu: f64,
    pub p_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

pub fn rescale(row: &FssRow, params: &ScalingParams) -> Scaled {
    let l = row.l as f64;
    let eps = (row.p_tilde - params.p_c) / params.p_c;
    let fy = l.powf(params.beta / params.nu);
    Scaled {
        x: eps * l.powf(1.0 / params.nu),
        y: row.m * fy,
        dy: row.m_err * fy,
    }
}

/// Inverse of [`rescale`]: returns `(p̃, M)`.
pub fn unscale(l: usize, x: f64, y: f64, params: &ScalingParams) -> (f64, f64) {
    let l = l as f64;
    let eps = x / l.powf(1.0 / params.nu);
    (params.p_c * (1.0 + eps), y / l.powf(params.beta / params.nu))
}

/// Weighted straight-line fit evaluated at `x0`; returns value and variance.
fn line_at(pts: &[Scaled], x0: f64) -> (f64, f64) {
    let (mut k, mut kx, mut ky, mut kxx, mut kxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in pts {
        let w = 1.0 / (p.dy * p.dy);
        k += w;
        kx += w * p.x;
        ky += w * p.y;
        kxx += w * p.x * p.x;
        kxy += w * p.x * p.y;
    }
    let det = k * kxx - kx * kx;
    if det <= 1e-12 * k * kxx.max(f64::MIN_POSITIVE) {
        return (ky / k, 1.0 / k);
    }
    let y = (kxx * ky - kx * kxy + x0 * (k * kxy - kx * ky)) / det;
    let var = (kxx - 2.0 * x0 * kx + x0 * x0 * k) / det;
    (y, var.max(0.0))
}

/// Collapse quality: mean of `(y - Y)² / (dy² + dY²)` where `Y ± dY` is the
/// local master curve built from the bracketing points of every other size.
/// Points outside the x-range of all other sizes are skipped.
pub fn collapse_quality(ds: &FssDataset, params: &ScalingParams) -> Result<f64> {
    if !(params.p_c > 0.0 && params.nu > 0.0) {
        return Err(Error::Dataset(format!("invalid scaling parameters {params:?}")));
    }
    let sizes = ds.sizes();
    let mut by_size: Vec<Vec<Scaled>> = sizes
        .iter()
        .map(|&l| ds.rows.iter().filter(|r| r.l == l).map(|r| rescale(r, params)).collect())
        .collect();
    for curve in &mut by_size {
        curve.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    }

    let mut sum = 0.0;
    let mut used = 0usize;
    let mut bracket = Vec::with_capacity(2 * sizes.len());
    for (i, curve) in by_size.iter().enumerate() {
        for p in curve {
            bracket.clear();
            for (j, other) in by_size.iter().enumerate() {
                if j == i {
                    continue;
                }
                if let Some(k) = other.windows(2).position(|w| w[0].x <= p.x && p.x <= w[1].x) {
                    bracket.push(other[k]);
                    bracket.push(other[k + 1]);
                }
            }
            if bracket.is_empty() {
                continue;
            }
            let (y, var) = line_at(&bracket, p.x);
            sum += (p.y - y).powi(2) / (p.dy * p.dy + var);
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::Dataset("fewer than 2 sizes overlap in x-range".into()));
    }
    Ok(sum / used as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub beta: (f64, f64),
    pub nu: (f64, f64),
    pub p_c: (f64, f64),
}

impl Bounds {
    /// β ∈ [0, 1], ν ∈ [0.5, 3], p̃_c over the scanned window.
    pub fn default_for(ds: &FssDataset) -> Self {
        Bounds { beta: (0.0, 1.0), nu: (0.5, 3.0), p_c: ds.p_range() }
    }

    fn as_arrays(&self) -> ([f64; 3], [f64; 3]) {
        (
            [self.beta.0, self.nu.0, self.p_c.0],
            [self.beta.1, self.nu.1, self.p_c.1],
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub initial: Option<ScalingParams>,
    pub bounds: Option<Bounds>,
    pub n_bootstrap: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { initial: None, bounds: None, n_bootstrap: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub species: Species,
    pub beta: f64,
    pub nu: f64,
    pub p_tilde_c: f64,
    /// Net flip rate at the critical point, `2 p̃_c (1 - p̃_c)`.
    pub p_c: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub uncertainties: Uncertainties,
    pub n_bootstrap: usize,
    pub seed: u64,
    /// Names of parameters that ended on a bound.
    pub pinned: Vec<String>,
    /// False when p̃_c is not strictly inside the scanned window.
    pub inside_window: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uncertainties {
    pub beta: f64,
    pub nu: f64,
    pub p_tilde_c: f64,
    pub p_c: f64,
}

const PARAM_NAMES: [&str; 3] = ["beta", "nu", "p_tilde_c"];

fn objective(ds: &FssDataset, lo: &[f64; 3], hi: &[f64; 3], x: &[f64; 3]) -> f64 {
    let mut clamped = *x;
    let mut excess = 0.0;
    for k in 0..3 {
        let c = x[k].clamp(lo[k], hi[k]);
        excess += ((x[k] - c) / (hi[k] - lo[k])).powi(2);
        clamped[k] = c;
    }
    let params = ScalingParams { beta: clamped[0], nu: clamped[1], p_c: clamped[2] };
    match collapse_quality(ds, &params) {
        Ok(s) => s + 1e3 * excess * (1.0 + s),
        Err(_) => f64::INFINITY,
    }
}

fn minimize_from(ds: &FssDataset, lo: &[f64; 3], hi: &[f64; 3], start: [f64; 3]) -> ([f64; 3], f64) {
    let step = [0.1 * (hi[0] - lo[0]), 0.1 * (hi[1] - lo[1]), 0.1 * (hi[2] - lo[2])];
    let f = |x: &[f64; 3]| objective(ds, lo, hi, x);
    let mut r = nelder_mead(f, start, step, 2000, 1e-10);
    // One restart around the first optimum guards against a collapsed simplex.
    let r2 = nelder_mead(f, r.x, step.map(|s| 0.25 * s), 2000, 1e-12);
    if r2.f <= r.f {
        r = r2;
    }
    let mut x = r.x;
    for k in 0..3 {
        x[k] = x[k].clamp(lo[k], hi[k]);
    }
    (x, r.f)
}

fn best_fit(ds: &FssDataset, lo: &[f64; 3], hi: &[f64; 3], initial: Option<[f64; 3]>) -> ([f64; 3], f64) {
    let mut starts: Vec<[f64; 3]> = Vec::new();
    if let Some(s) = initial {
        starts.push(s);
    }
    let frac = |k: usize, t: f64| lo[k] + t * (hi[k] - lo[k]);
    for &tb in &[0.15, 0.35, 0.6] {
        for &tn in &[0.15, 0.4, 0.7] {
            for &tp in &[0.2, 0.35, 0.5, 0.65, 0.8] {
                starts.push([frac(0, tb), frac(1, tn), frac(2, tp)]);
            }
        }
    }
    let fits: Vec<([f64; 3], f64)> = starts.par_iter().map(|&s| minimize_from(ds, lo, hi, s)).collect();
    fits.into_iter()
        .fold(None::<([f64; 3], f64)>, |best, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .unwrap_or(([f64::NAN; 3], f64::INFINITY))
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Multi-start simplex fit of (β, ν, p̃_c), with bootstrap errors from
/// resampling every M within its error bar.
pub fn fit_collapse(ds: &FssDataset, opts: &FitOptions) -> Result<CollapseResult> {
    let bounds = opts.bounds.unwrap_or_else(|| Bounds::default_for(ds));
    let (lo, hi) = bounds.as_arrays();
    for k in 0..3 {
        if !(lo[k] < hi[k]) {
            return Err(Error::Dataset(format!("empty bound for {}", PARAM_NAMES[k])));
        }
    }
    if lo[1] <= 0.0 || lo[2] <= 0.0 {
        return Err(Error::Dataset("ν and p̃_c bounds must be positive".into()));
    }
    let initial = opts.initial.map(|p| [p.beta, p.nu, p.p_c]);
    let (x, s) = best_fit(ds, &lo, &hi, initial);
    if !s.is_finite() {
        return Err(Error::Dataset("fewer than 2 sizes overlap in x-range".into()));
    }
    let s = collapse_quality(ds, &ScalingParams { beta: x[0], nu: x[1], p_c: x[2] })?;

    let samples: Vec<[f64; 3]> = (0..opts.n_bootstrap)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(opts.seed, Domain::Bootstrap, &[b as u64]);
            let rows = ds
                .rows
                .iter()
                .map(|r| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    FssRow { m: r.m + z * r.m_err, ..*r }
                })
                .collect();
            let resampled = FssDataset { species: ds.species, rows };
            minimize_from(&resampled, &lo, &hi, x).0
        })
        .collect();
    let column = |k: usize| samples.iter().map(|s| s[k]).collect::<Vec<_>>();
    let p_tilde_err = std_dev(&column(2));
    let p_c_err = std_dev(&column(2).iter().map(|&p| net_rate(p)).collect::<Vec<_>>());

    let tol = 1e-3;
    let pinned: Vec<String> = (0..3)
        .filter(|&k| {
            let w = hi[k] - lo[k];
            x[k] - lo[k] <= tol * w || hi[k] - x[k] <= tol * w
        })
        .map(|k| PARAM_NAMES[k].to_string())
        .collect();
    let (pmin, pmax) = ds.p_range();
    let inside_window = x[2] > pmin && x[2] < pmax && !pinned.iter().any(|n| n == "p_tilde_c");

    Ok(CollapseResult {
        species: ds.species,
        beta: x[0],
        nu: x[1],
        p_tilde_c: x[2],
        p_c: net_rate(x[2]),
        s,
        uncertainties: Uncertainties {
            beta: std_dev(&column(0)),
            nu: std_dev(&column(1)),
            p_tilde_c: p_tilde_err,
            p_c: p_c_err,
        },
        n_bootstrap: opts.n_bootstrap,
        seed: opts.seed,
        pinned,
        inside_window,
    })
}
