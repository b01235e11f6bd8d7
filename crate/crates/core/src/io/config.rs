//! Flat key-value configs.
//!
//! Grammar: a TOML document with top-level `key = value` pairs only (no
//! tables). Values are numbers, booleans, strings or arrays of numbers. Each
//! subcommand has its own key set; unknown keys are rejected and missing keys
//! take the documented defaults. Command-line overrides `key=value` use the
//! same value syntax, with bare words taken as strings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::at2d::Schedule;
use crate::{Error, Result};

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses `key=value` into a single-entry table.
pub fn parse_overrides(pairs: &[String]) -> Result<toml::Table> {
    let mut table = toml::Table::new();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| config_err(format!("override `{pair}` is not key=value")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(config_err(format!("override `{pair}` has an empty key")));
        }
        let value = value.trim();
        let parsed = format!("v = {value}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        table.insert(key.to_string(), parsed);
    }
    Ok(table)
}

pub fn apply_override(base: &mut toml::Table, key: &str, value: toml::Value) {
    base.insert(key.to_string(), value);
}

/// Reads the optional config file, layers overrides on top and decodes.
pub fn load_config<T: DeserializeOwned>(
    path: Option<&Path>,
    overrides: toml::Table,
) -> Result<T> {
    let mut table = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| config_err(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| config_err(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table()) {
        return Err(config_err(format!("nested table `{k}`: configs are flat")));
    }
    table.extend(overrides);
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| config_err(e.message()))
}

fn check_grid(name: &str, grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(config_err(format!("`{name}` grid is empty")));
    }
    if let Some(x) = grid.iter().find(|&&x| !(x >= lo && x <= hi)) {
        return Err(config_err(format!("`{name}` value {x} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn default_p_tilde_grid() -> Vec<f64> {
    (1..=50).map(|k| k as f64 / 100.0).collect()
}

/// `couplings`: `p_tilde` grid, each in (0, ½].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingsConfig {
    pub p_tilde: Vec<f64>,
}

impl Default for CouplingsConfig {
    fn default() -> Self {
        CouplingsConfig { p_tilde: default_p_tilde_grid() }
    }
}

impl CouplingsConfig {
    pub fn validate(&self) -> Result<()> {
        check_grid("p_tilde", &self.p_tilde, f64::MIN_POSITIVE, 0.5)
    }
}

/// `sample-disorder`: `dim = 2` uses `l`, `p_tilde`; `dim = 3` uses `l`,
/// `tmax`, `p`, `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisorderConfig {
    pub dim: usize,
    pub l: usize,
    pub tmax: Option<usize>,
    pub p_tilde: f64,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl Default for DisorderConfig {
    fn default() -> Self {
        DisorderConfig { dim: 2, l: 8, tmax: None, p_tilde: 0.042, p: 0.03, q: 0.03, seed: 0 }
    }
}

impl DisorderConfig {
    pub fn validate(&self) -> Result<()> {
        match self.dim {
            2 => check_grid("p_tilde", &[self.p_tilde], 0.0, 0.5),
            3 => {
                check_grid("p", &[self.p], 0.0, 0.5)?;
                check_grid("q", &[self.q], 0.0, 0.5)
            }
            d => Err(config_err(format!("`dim` must be 2 or 3, got {d}"))),
        }
    }
}

/// `mc2d`: sizes, rate grid and annealing schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mc2dConfig {
    pub sizes: Vec<usize>,
    pub p_tilde: Vec<f64>,
    pub realizations: usize,
    pub beta_min: f64,
    pub rungs: usize,
    pub sweeps_per_rung: usize,
    pub measure_sweeps: usize,
    pub measure_interval: usize,
    pub seed: u64,
}

impl Default for Mc2dConfig {
    fn default() -> Self {
        let s = Schedule::default();
        Mc2dConfig {
            sizes: vec![8, 12, 16],
            p_tilde: (0..14).map(|k| 0.034 + 0.002 * k as f64).collect(),
            realizations: s.realizations,
            beta_min: s.betas[0],
            rungs: s.betas.len(),
            sweeps_per_rung: s.sweeps_per_rung,
            measure_sweeps: s.measure_sweeps,
            measure_interval: s.measure_interval,
            seed: 0,
        }
    }
}

impl Mc2dConfig {
    pub fn schedule(&self) -> Schedule {
        Schedule::geometric(
            self.beta_min,
            self.rungs,
            self.sweeps_per_rung,
            self.measure_sweeps,
            self.measure_interval,
            self.realizations,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&l| l < 2) {
            return Err(config_err("`sizes` must be non-empty with every L >= 2"));
        }
        check_grid("p_tilde", &self.p_tilde, 0.0, 0.5)?;
        if self.realizations < 2 {
            return Err(config_err("`realizations` must be >= 2"));
        }
        if !(self.beta_min > 0.0 && self.beta_min <= 1.0) {
            return Err(config_err("`beta_min` must lie in (0, 1]"));
        }
        self.schedule().validate().map_err(|e| config_err(e.to_string()))
    }
}

/// `mc3d`: one `(L, p, q)` point of the gauge model with a defect at `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mc3dConfig {
    pub l: usize,
    /// Defaults to `2L + 1`.
    pub tmax: Option<usize>,
    /// Gate time; defaults to `L`. Ignored when `defect = false`.
    pub t: Option<usize>,
    pub defect: bool,
    pub p: f64,
    pub q: f64,
    /// Explicit couplings replacing the Nishimori values of `p`, `q`.
    pub j: Option<f64>,
    pub k: Option<f64>,
    pub realizations: usize,
    pub beta_min: f64,
    pub rungs: usize,
    pub sweeps_per_rung: usize,
    pub measure_sweeps: usize,
    pub measure_interval: usize,
    /// Memory threshold fed to the defect estimate.
    pub p_star: f64,
    /// Tension table path; defaults to `<out stem>_tension.csv`.
    pub tension_out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for Mc3dConfig {
    fn default() -> Self {
        Mc3dConfig {
            l: 8,
            tmax: None,
            t: None,
            defect: true,
            p: 0.03,
            q: 0.03,
            j: None,
            k: None,
            realizations: 20,
            beta_min: 0.1,
            rungs: 10,
            sweeps_per_rung: 200,
            measure_sweeps: 1000,
            measure_interval: 10,
            p_star: crate::noise::MEMORY_THRESHOLD_NOISY,
            tension_out: None,
            seed: 0,
        }
    }
}

impl Mc3dConfig {
    pub fn schedule(&self) -> Schedule {
        Schedule::geometric(
            self.beta_min,
            self.rungs,
            self.sweeps_per_rung,
            self.measure_sweeps,
            self.measure_interval,
            self.realizations,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 4 {
            return Err(config_err("`l` must be >= 4 so that loops of side 2 fit"));
        }
        check_grid("p", &[self.p], 0.0, 0.5)?;
        check_grid("q", &[self.q], 0.0, 0.5)?;
        if self.realizations < 2 {
            return Err(config_err("`realizations` must be >= 2"));
        }
        if self.j.is_some() != self.k.is_some() {
            return Err(config_err("`j` and `k` must be given together"));
        }
        if !(self.beta_min > 0.0 && self.beta_min <= 1.0) {
            return Err(config_err("`beta_min` must lie in (0, 1]"));
        }
        self.schedule().validate().map_err(|e| config_err(e.to_string()))
    }
}

/// `collapse`: per-species fit windows and bootstrap size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollapseConfig {
    /// `sigma`, `tau` or `both`.
    pub species: String,
    /// `[lo, hi]` in p̃; the whole scan when absent.
    pub window_sigma: Option<Vec<f64>>,
    pub window_tau: Option<Vec<f64>>,
    pub beta_bounds: Vec<f64>,
    pub nu_bounds: Vec<f64>,
    pub n_bootstrap: usize,
    pub seed: u64,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        CollapseConfig {
            species: "both".into(),
            window_sigma: None,
            window_tau: None,
            beta_bounds: vec![0.0, 1.0],
            nu_bounds: vec![0.5, 3.0],
            n_bootstrap: 200,
            seed: 0,
        }
    }
}

fn pair(name: &str, v: &[f64]) -> Result<(f64, f64)> {
    match v {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(config_err(format!("`{name}` must be [lo, hi] with lo < hi"))),
    }
}

impl CollapseConfig {
    pub fn species_list(&self) -> Result<Vec<crate::fss::Species>> {
        use crate::fss::Species;
        match self.species.as_str() {
            "both" => Ok(vec![Species::Sigma, Species::Tau]),
            s => Ok(vec![s.parse().map_err(|_| config_err(format!("unknown species `{s}`")))?]),
        }
    }

    pub fn window(&self, species: crate::fss::Species) -> Result<Option<(f64, f64)>> {
        let (name, w) = match species {
            crate::fss::Species::Sigma => ("window_sigma", &self.window_sigma),
            crate::fss::Species::Tau => ("window_tau", &self.window_tau),
        };
        w.as_deref().map(|v| pair(name, v)).transpose()
    }

    pub fn bounds(&self) -> Result<((f64, f64), (f64, f64))> {
        Ok((pair("beta_bounds", &self.beta_bounds)?, pair("nu_bounds", &self.nu_bounds)?))
    }

    pub fn validate(&self) -> Result<()> {
        for s in self.species_list()? {
            self.window(s)?;
        }
        self.bounds()?;
        if self.n_bootstrap < 2 {
            return Err(config_err("`n_bootstrap` must be >= 2"));
        }
        Ok(())
    }
}

/// `decode`: code distances, rate grid and shots per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecodeConfig {
    pub distances: Vec<usize>,
    pub p_tilde: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            distances: vec![3, 5],
            p_tilde: (1..=8).map(|k| 0.01 * k as f64).collect(),
            shots: 100_000,
            seed: 0,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.distances.is_empty() || self.distances.iter().any(|d| ![3, 5].contains(d)) {
            return Err(config_err("`distances` must be drawn from {3, 5}"));
        }
        check_grid("p_tilde", &self.p_tilde, 0.0, 0.5)?;
        if self.shots < 1000 {
            return Err(config_err("`shots` must be >= 1000"));
        }
        Ok(())
    }
}

/// `report`: paths of earlier outputs plus the defect-estimate inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    /// JSON from `collapse`; required.
    pub collapse: Option<PathBuf>,
    /// CSV from `decode`.
    pub decode: Option<PathBuf>,
    /// Tension CSV from `mc3d`; its `A` replaces `loop_tension` when present.
    pub tension: Option<PathBuf>,
    pub loop_tension: f64,
    pub p_star: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            collapse: None,
            decode: None,
            tension: None,
            loop_tension: crate::noise::REFERENCE_LOOP_TENSION,
            p_star: crate::noise::MEMORY_THRESHOLD_NOISY,
        }
    }
}

impl ReportConfig {
    pub fn validate(&self) -> Result<()> {
        if self.collapse.is_none() {
            return Err(config_err("`collapse` input is required"));
        }
        if !(self.loop_tension >= 0.0) {
            return Err(config_err("`loop_tension` must be >= 0"));
        }
        check_grid("p_star", &[self.p_star], f64::MIN_POSITIVE, 0.5)
    }
}
