//! Batch front-end.
//!
//! Each subcommand reads a flat config (see [`crate::io`]), applies
//! `--set key=value` and `--seed` overrides, runs and writes one documented
//! file. Exit codes: 0 success, 1 usage or config error, 2 runtime failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::at2d::{run_realization, CurvePoint, RealizationMeans};
use crate::decoder::{ler_crossing, ler_estimate};
use crate::fss::{fit_collapse, Bounds, CollapseResult, FitOptions, FssDataset};
use crate::gauge3d::{loop_tension, run_gauge_realization, GaugeEnsemble, GaugeRunConfig};
use crate::io::{
    self, load_config, parse_overrides, Checkpoint, CollapseConfig, CouplingRow, CouplingsConfig,
    DecodeConfig, DecodeRow, DisorderConfig, MagnetizationRow, Mc2dConfig, Mc3dConfig,
    Provenance, ReportConfig, TensionRow, WilsonRow,
};
use crate::lattice::{Cubic3D, Torus2D};
use crate::noise::{
    defect_threshold_estimate, independent_target_threshold, net_rate, sample_disorder_2d,
    sample_disorder_3d, GaugeCouplings,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "tcnot-lab", version, about = "Thresholds of surface codes across a transversal CNOT")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat TOML config file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Master seed (overrides `seed` in the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Continue from `<out>.ckpt` (mc2d, mc3d).
    #[arg(long, global = true)]
    pub resume: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of p, J, K2, K4 over a p̃ grid.
    Couplings,
    /// Write one disorder realization (2D bonds or 3D plaquettes).
    SampleDisorder,
    /// Disorder-averaged magnetizations of the random Ashkin-Teller model.
    Mc2d,
    /// Wilson loops and loop tension of the gauge model with a defect plane.
    Mc3d,
    /// Finite-size-scaling collapse of mc2d tables.
    Collapse {
        /// One or more mc2d CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Logical error rates of the correlated MLE decoder.
    Decode,
    /// Consolidated threshold summary.
    Report {
        #[arg(long)]
        collapse: Option<PathBuf>,
        #[arg(long)]
        decode: Option<PathBuf>,
        #[arg(long)]
        tension: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| dispatch(&cli.command, &cli.common))
}

fn dispatch(cmd: &Command, common: &Common) -> Result<()> {
    let seeded = !matches!(cmd, Command::Couplings | Command::Report { .. });
    if common.seed.is_some() && !seeded {
        return Err(Error::Config("--seed has no effect on this subcommand".into()));
    }
    if common.resume && !matches!(cmd, Command::Mc2d | Command::Mc3d) {
        return Err(Error::Config("--resume applies to mc2d and mc3d only".into()));
    }
    if common.resume && common.out.is_none() {
        return Err(Error::Config("--resume needs --out".into()));
    }
    let mut overrides = parse_overrides(&common.set)?;
    if let Some(seed) = common.seed {
        let seed = i64::try_from(seed).map_err(|_| Error::Config("--seed exceeds 2^63".into()))?;
        io::apply_override(&mut overrides, "seed", toml::Value::Integer(seed));
    }
    let cfg_path = common.config.as_deref();
    match cmd {
        Command::Couplings => couplings(load_config(cfg_path, overrides)?, common),
        Command::SampleDisorder => sample_disorder(load_config(cfg_path, overrides)?, common),
        Command::Mc2d => mc2d(load_config(cfg_path, overrides)?, common),
        Command::Mc3d => mc3d(load_config(cfg_path, overrides)?, common),
        Command::Collapse { inputs } => collapse(load_config(cfg_path, overrides)?, inputs, common),
        Command::Decode => decode(load_config(cfg_path, overrides)?, common),
        Command::Report { collapse, decode, tension } => {
            let mut cfg: ReportConfig = load_config(cfg_path, overrides)?;
            cfg.collapse = collapse.clone().or(cfg.collapse);
            cfg.decode = decode.clone().or(cfg.decode);
            cfg.tension = tension.clone().or(cfg.tension);
            report(cfg, common)
        }
    }
}

fn provenance<C: Serialize>(command: &str, cfg: &C, common: &Common) -> Result<Provenance> {
    let prov = Provenance::new(command, cfg)?;
    match &common.config {
        Some(path) => prov.with_input(path),
        None => Ok(prov),
    }
}

/// Coarse progress on stderr, one line per tenth of the work.
struct Progress {
    what: &'static str,
    total: usize,
    done: AtomicUsize,
}

impl Progress {
    fn new(what: &'static str, total: usize, done: usize) -> Self {
        if done > 0 {
            eprintln!("{what}: resuming with {done}/{total} tasks done");
        }
        Progress { what, total, done: AtomicUsize::new(done) }
    }

    fn tick(&self) {
        let k = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        let step = (self.total / 10).max(1);
        if k % step == 0 || k == self.total {
            eprintln!("{}: {k}/{} tasks", self.what, self.total);
        }
    }
}

fn open_checkpoint<C: Serialize>(cfg: &C, common: &Common) -> Result<Option<Checkpoint>> {
    let Some(out) = &common.out else { return Ok(None) };
    let text = toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))?;
    let fingerprint = io::content_hash(text.as_bytes());
    Checkpoint::open(&Checkpoint::path_for(out), &fingerprint, common.resume).map(Some)
}

fn couplings(cfg: CouplingsConfig, common: &Common) -> Result<()> {
    cfg.validate()?;
    let rows = cfg.p_tilde.iter().map(|&pt| CouplingRow::evaluate(pt)).collect::<Result<Vec<_>>>()?;
    io::write_csv(common.out.as_deref(), &provenance("couplings", &cfg, common)?, &rows)
}

fn sample_disorder(cfg: DisorderConfig, common: &Common) -> Result<()> {
    cfg.validate()?;
    let body = if cfg.dim == 2 {
        io::write_disorder_2d(&sample_disorder_2d(Torus2D::new(cfg.l)?, cfg.p_tilde, cfg.seed)?)
    } else {
        let lat = Cubic3D::new(cfg.l, cfg.tmax.unwrap_or(2 * cfg.l + 1))?;
        io::write_disorder_3d(&sample_disorder_3d(lat, cfg.p, cfg.q, cfg.seed)?)
    };
    let prov = provenance("sample-disorder", &cfg, common)?;
    io::emit(common.out.as_deref(), &(prov.comment_block() + &body))
}

fn mc2d(cfg: Mc2dConfig, common: &Common) -> Result<()> {
    cfg.validate()?;
    let schedule = cfg.schedule();
    let prov = provenance("mc2d", &cfg, common)?;
    let ckpt = open_checkpoint(&cfg, common)?;
    let mut tasks = Vec::new();
    for &l in &cfg.sizes {
        for &pt in &cfg.p_tilde {
            tasks.extend((0..cfg.realizations).map(|r| (l, pt, r)));
        }
    }
    let key = |&(l, pt, r): &(usize, f64, usize)| [l as u64, pt.to_bits(), r as u64];
    let cached = |t: &(usize, f64, usize)| {
        ckpt.as_ref().and_then(|c| c.get::<RealizationMeans>(&key(t)))
    };
    let already = tasks.iter().filter(|t| cached(t).is_some()).count();
    let progress = Progress::new("mc2d", tasks.len(), already);
    let runs: Vec<RealizationMeans> = tasks
        .par_iter()
        .map(|t| {
            if let Some(m) = cached(t) {
                return Ok(m);
            }
            let m = run_realization(Torus2D::new(t.0)?, t.1, &schedule, t.2, cfg.seed)?;
            if let Some(c) = &ckpt {
                c.record(&key(t), &m)?;
            }
            progress.tick();
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<MagnetizationRow> = runs
        .chunks(cfg.realizations)
        .zip(tasks.chunks(cfg.realizations))
        .map(|(chunk, t)| {
            let point = CurvePoint::from_realizations(t[0].0, t[0].1, cfg.seed, chunk.to_vec());
            MagnetizationRow::from(&point)
        })
        .collect();
    io::write_csv(common.out.as_deref(), &prov, &rows)?;
    ckpt.map_or(Ok(()), Checkpoint::finish)
}

fn gauge_run_config(cfg: &Mc3dConfig) -> GaugeRunConfig {
    let mut run = GaugeRunConfig::standard(cfg.l, cfg.p, cfg.q, cfg.schedule(), cfg.seed);
    run.tmax = cfg.tmax.unwrap_or(2 * cfg.l + 1);
    run.defect = cfg.defect.then(|| cfg.t.unwrap_or(cfg.l));
    if let (Some(j), Some(k)) = (cfg.j, cfg.k) {
        run.couplings = Some(GaugeCouplings { j, k });
    }
    run
}

fn tension_path(cfg: &Mc3dConfig, out: Option<&Path>) -> Option<PathBuf> {
    cfg.tension_out.clone().or_else(|| {
        out.map(|o| {
            let stem = o.file_stem().unwrap_or_default().to_string_lossy();
            o.with_file_name(format!("{stem}_tension.csv"))
        })
    })
}

fn mc3d(cfg: Mc3dConfig, common: &Common) -> Result<()> {
    cfg.validate()?;
    let run = gauge_run_config(&cfg);
    // Geometry and couplings errors surface before any work starts.
    run.lattice()?;
    run.resolved_couplings()?;
    let prov = provenance("mc3d", &cfg, common)?;
    let ckpt = open_checkpoint(&cfg, common)?;
    let cached = |i: usize| ckpt.as_ref().and_then(|c| c.get(&[i as u64]));
    let already = (0..cfg.realizations).filter(|&i| cached(i).is_some()).count();
    let progress = Progress::new("mc3d", cfg.realizations, already);
    let runs = (0..cfg.realizations)
        .into_par_iter()
        .map(|i| {
            if let Some(r) = cached(i) {
                return Ok(r);
            }
            let r = run_gauge_realization(&run, i)?;
            if let Some(c) = &ckpt {
                c.record(&[i as u64], &r)?;
            }
            progress.tick();
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let ens = GaugeEnsemble::from_realizations(&run, runs);
    let loops: Vec<WilsonRow> = ens
        .loops
        .iter()
        .map(|w| WilsonRow {
            l: run.l,
            tmax: run.tmax,
            t: run.defect,
            p: run.p,
            q: run.q,
            r1: w.r1,
            r2: w.r2,
            w_mean: w.mean,
            w_err: w.err,
        })
        .collect();
    let tension = match loop_tension(&ens.loops) {
        Ok(fit) => TensionRow {
            a: Some(fit.a),
            a_err: Some(fit.a_err),
            p_c_estimate: defect_threshold_estimate(fit.a, cfg.p_star).ok().map(|e| e.p),
        },
        Err(e) => {
            eprintln!("mc3d: {e}");
            TensionRow { a: None, a_err: None, p_c_estimate: None }
        }
    };
    io::write_csv(common.out.as_deref(), &prov, &loops)?;
    io::write_csv(tension_path(&cfg, common.out.as_deref()).as_deref(), &prov, &[tension])?;
    ckpt.map_or(Ok(()), Checkpoint::finish)
}

fn collapse(cfg: CollapseConfig, inputs: &[PathBuf], common: &Common) -> Result<()> {
    cfg.validate()?;
    let mut prov = provenance("collapse", &cfg, common)?;
    let mut rows: Vec<MagnetizationRow> = Vec::new();
    for path in inputs {
        rows.extend(io::read_csv::<MagnetizationRow>(path)?);
        prov = prov.with_input(path)?;
    }
    let (beta, nu) = cfg.bounds()?;
    let mut results = BTreeMap::new();
    for species in cfg.species_list()? {
        let mut ds = FssDataset::new(species, rows.iter().map(|r| r.fss_row(species)).collect())?;
        if let Some((lo, hi)) = cfg.window(species)? {
            ds = ds.window(lo, hi)?;
        }
        let opts = FitOptions {
            initial: None,
            bounds: Some(Bounds { beta, nu, p_c: ds.p_range() }),
            n_bootstrap: cfg.n_bootstrap,
            seed: cfg.seed,
        };
        results.insert(species.name().to_string(), fit_collapse(&ds, &opts)?);
    }
    io::write_json(common.out.as_deref(), &prov, &results)
}

fn decode(cfg: DecodeConfig, common: &Common) -> Result<()> {
    cfg.validate()?;
    let prov = provenance("decode", &cfg, common)?;
    let mut rows = Vec::new();
    for &d in &cfg.distances {
        let ler = ler_estimate(d, &cfg.p_tilde, cfg.shots, cfg.seed)?;
        rows.extend(ler.iter().map(|r| DecodeRow::new(r, cfg.seed)));
        eprintln!("decode: d = {d} done");
    }
    io::write_csv(common.out.as_deref(), &prov, &rows)
}

/// `collapse` output as read back by `report`.
#[derive(Debug, Deserialize)]
struct CollapseFile {
    sigma: Option<CollapseResult>,
    tau: Option<CollapseResult>,
}

#[derive(Debug, Serialize)]
pub struct Crossing {
    pub block: &'static str,
    pub d_small: usize,
    pub d_large: usize,
    pub p_tilde: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct RateEstimate {
    pub p_tilde: f64,
    pub p: f64,
}

#[derive(Debug, Serialize)]
pub struct DefectSummary {
    pub loop_tension: f64,
    /// `fitted` from an mc3d tension table or `reference`.
    pub source: &'static str,
    pub p_star: f64,
    pub p_c_target: f64,
    pub clamped: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub control: Option<RateEstimate>,
    pub target: Option<RateEstimate>,
    pub decoder_crossings: Vec<Crossing>,
    pub separate_decoding: RateEstimate,
    pub defect: DefectSummary,
}

/// Crossings of every pair of distances, for both blocks, in `p̃`.
pub fn decoder_crossings(rows: &[DecodeRow]) -> Vec<Crossing> {
    let mut ds: Vec<usize> = rows.iter().map(|r| r.d).collect();
    ds.sort_unstable();
    ds.dedup();
    let curve = |d: usize, target: bool| {
        let mut c: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.d == d)
            .map(|r| (r.p_tilde, if target { r.ler_target } else { r.ler_control }))
            .collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    };
    let mut out = Vec::new();
    for (i, &small) in ds.iter().enumerate() {
        for &large in &ds[i + 1..] {
            for (block, target) in [("control", false), ("target", true)] {
                let x = ler_crossing(&curve(small, target), &curve(large, target));
                out.push(Crossing {
                    block,
                    d_small: small,
                    d_large: large,
                    p_tilde: x,
                    p: x.map(net_rate),
                });
            }
        }
    }
    out
}

fn report(cfg: ReportConfig, common: &Common) -> Result<()> {
    cfg.validate()?;
    let collapse_path = cfg.collapse.clone().expect("validated");
    let mut prov = provenance("report", &cfg, common)?.with_input(&collapse_path)?;
    let fits: CollapseFile = io::read_json(&collapse_path)?;
    let rate = |r: &Option<CollapseResult>| {
        r.as_ref().map(|r| RateEstimate { p_tilde: r.p_tilde_c, p: net_rate(r.p_tilde_c) })
    };
    let decoder_crossings = match &cfg.decode {
        Some(path) => {
            prov = prov.with_input(path)?;
            decoder_crossings(&io::read_csv::<DecodeRow>(path)?)
        }
        None => Vec::new(),
    };
    let fitted = match &cfg.tension {
        Some(path) => {
            prov = prov.with_input(path)?;
            io::read_csv::<TensionRow>(path)?.first().and_then(|t| t.a)
        }
        None => None,
    };
    let (loop_tension, source) = match fitted {
        Some(a) => (a.max(0.0), "fitted"),
        None => (cfg.loop_tension, "reference"),
    };
    let est = defect_threshold_estimate(loop_tension, cfg.p_star)?;
    let (pt, p) = independent_target_threshold();
    let report = Report {
        control: rate(&fits.sigma),
        target: rate(&fits.tau),
        decoder_crossings,
        separate_decoding: RateEstimate { p_tilde: pt, p },
        defect: DefectSummary {
            loop_tension,
            source,
            p_star: cfg.p_star,
            p_c_target: est.p,
            clamped: est.clamped,
        },
    };
    io::write_json(common.out.as_deref(), &prov, &report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        run(std::iter::once("tcnot-lab").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(code(&["bogus"]), 1);
        assert_eq!(code(&["couplings", "--set", "p_tilde=[]"]), 1);
        assert_eq!(code(&["couplings", "--set", "nonsense=1"]), 1);
        assert_eq!(code(&["couplings", "--seed", "3"]), 1);
        assert_eq!(code(&["couplings", "--resume"]), 1);
    }

    #[test]
    fn missing_input_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("none.csv");
        assert_eq!(code(&["collapse", missing.to_str().unwrap()]), 2);
    }

    #[test]
    fn couplings_table() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.csv");
        let args = ["couplings", "--set", "p_tilde=[0.042, 0.5]", "--out", out.to_str().unwrap()];
        assert_eq!(code(&args), 0);
        let rows: Vec<CouplingRow> = io::read_csv(&out).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].k4 < rows[0].k2 && rows[0].k2 < rows[0].j);
        assert_eq!((rows[1].k2, rows[1].k4), (0.0, 0.0));
    }

    #[test]
    fn crossings_from_rows() {
        let row = |d, pt: f64, lt| DecodeRow {
            d,
            p_tilde: pt,
            p: net_rate(pt),
            shots: 1000,
            ler_control: lt / 2.0,
            ler_control_ci_lo: 0.0,
            ler_control_ci_hi: 1.0,
            ler_target: lt,
            ler_target_ci_lo: 0.0,
            ler_target_ci_hi: 1.0,
            ties: 0,
            seed: 0,
        };
        let rows = vec![
            row(3, 0.03, 0.10),
            row(3, 0.05, 0.20),
            row(5, 0.03, 0.05),
            row(5, 0.05, 0.25),
        ];
        let c = decoder_crossings(&rows);
        assert_eq!(c.len(), 2);
        let target = c.iter().find(|c| c.block == "target").unwrap();
        assert!((target.p_tilde.unwrap() - 0.04).abs() < 1e-12);
        assert!((target.p.unwrap() - net_rate(0.04)).abs() < 1e-15);
    }
}
