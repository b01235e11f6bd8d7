//! Statistical behaviour of the two samplers at desk-scale sizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tcnot_lab::at2d::{anneal_run, disorder_average, run_realization, Schedule};
use tcnot_lab::gauge3d::{
    defect_local_order, loop_tension, wilson_ensemble, GaugeEnsemble,
    GaugeRunConfig, GaugeSpecies, GaugeState3D, WilsonLoopSpec,
};
use tcnot_lab::lattice::{Cubic3D, Torus2D};
use tcnot_lab::noise::{at_couplings, sample_disorder_2d, sample_disorder_3d, Block, GaugeCouplings};
use tcnot_lab::stats::mean_stderr;

fn short_2d(realizations: usize) -> Schedule {
    Schedule::geometric(0.25, 8, 200, 600, 10, realizations)
}

#[test]
fn low_noise_saturates_and_high_noise_disorders() {
    let lat = Torus2D::new(8).unwrap();
    let low = disorder_average(lat, 0.005, &short_2d(16), 16, 11).unwrap();
    assert!(low.m_sigma >= 0.99 && low.m_tau >= 0.99, "{low:?}");

    // Near-free spins: |M| of L² independent signs is about sqrt(2/π)/L.
    let high = disorder_average(lat, 0.49, &short_2d(16), 16, 11).unwrap();
    let free = (2.0 / std::f64::consts::PI).sqrt() / 8.0;
    assert!(high.m_sigma < 2.0 * free && high.m_tau < 2.0 * free, "{high:?}");
}

#[test]
fn tau_orders_weaker_between_the_thresholds() {
    let lat = Torus2D::new(16).unwrap();
    let sched = short_2d(32);
    // Paired per realization: both species see the same disorder.
    let gaps: Vec<f64> = (0..32)
        .map(|r| {
            let m = run_realization(lat, 0.046, &sched, r, 5).unwrap();
            m.m_sigma - m.m_tau
        })
        .collect();
    let (gap, err) = mean_stderr(&gaps);
    assert!(gap > 0.05 && gap > 4.0 * err, "gap {gap} ± {err}");
}

#[test]
fn stderr_scales_as_inverse_root_realizations() {
    let lat = Torus2D::new(4).unwrap();
    let sched = Schedule::geometric(0.3, 3, 20, 100, 5, 1);
    let small = disorder_average(lat, 0.12, &sched, 300, 17).unwrap();
    let large = disorder_average(lat, 0.12, &sched, 600, 18).unwrap();
    for (a, b) in [(small.m_sigma_err, large.m_sigma_err), (small.m_tau_err, large.m_tau_err)] {
        let ratio = a / b;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.3, "ratio {ratio}");
    }
}

/// The energy is gauge invariant, so moving the disorder by star cycles on
/// both blocks must leave its thermal average unchanged.
#[test]
fn gauge_moved_disorder_has_the_same_energy_at_l8() {
    let lat = Torus2D::new(8).unwrap();
    let c = at_couplings(0.04).unwrap();
    let d = sample_disorder_2d(lat, 0.04, 3).unwrap();
    let stars = lat.logical_representatives().trivial;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut moved = d.clone();
    for _ in 0..20 {
        let star = &stars[rng.random_range(0..stars.len())];
        let block = if rng.random::<bool>() { Block::Control } else { Block::Target };
        moved.apply_cycle(block, star);
    }
    assert_ne!(moved, d);
    let sched = Schedule::geometric(0.25, 8, 200, 2000, 10, 1);
    let chains = |field: &tcnot_lab::noise::DisorderField2D, base: u64| {
        let e: Vec<f64> =
            (0..12).map(|k| anneal_run(field, c, &sched, base + k).unwrap().mean_energy()).collect();
        mean_stderr(&e)
    };
    let (e0, s0) = chains(&d, 100);
    let (e1, s1) = chains(&moved, 200);
    assert!((e0 - e1).abs() < 4.0 * s0.hypot(s1), "{e0} ± {s0} vs {e1} ± {s1}");
}

fn short_3d() -> Schedule {
    Schedule::geometric(0.3, 6, 60, 300, 10, 1)
}

fn ensemble_l8(p: f64, n: usize, seed: u64) -> GaugeEnsemble {
    let cfg = GaugeRunConfig::standard(8, p, p, short_3d(), seed);
    wilson_ensemble(&cfg, n).unwrap()
}

#[test]
fn deconfined_loops_follow_a_perimeter_law() {
    let ens = ensemble_l8(0.02, 6, 21);
    let small: Vec<_> = ens.loops.iter().filter(|w| w.r1.max(w.r2) <= 3).copied().collect();
    let fit = loop_tension(&small).unwrap();
    assert!(fit.perimeters.len() >= 3);
    for (w, r) in small.iter().zip(&fit.residuals) {
        // Residual of -ln W in units of its propagated error.
        assert!(r.abs() < 4.0 * w.err / w.mean + 1e-3, "{w:?} residual {r}");
    }
}

#[test]
fn tension_is_order_one_percent_near_threshold() {
    let fit = loop_tension(&ensemble_l8(0.03, 6, 22).loops).unwrap();
    assert!((0.003..=0.05).contains(&fit.a), "{fit:?}");
}

#[test]
fn tension_vanishes_in_the_ordered_limit() {
    let fit = loop_tension(&ensemble_l8(0.001, 4, 23).loops).unwrap();
    assert!(fit.a.abs() < 4.0 * fit.a_err + 1e-3, "{fit:?}");
}

#[test]
fn defect_rows_are_one_without_noise() {
    let mut cfg = GaugeRunConfig::standard(4, 0.0, 0.0, short_3d(), 1);
    cfg.couplings = Some(GaugeCouplings { j: 3.0, k: 3.0 });
    let ens = wilson_ensemble(&cfg, 3).unwrap();
    assert!(defect_local_order(&ens).iter().all(|&(_, m, _)| m == 1.0));
}

/// Clean disorder at finite couplings: rows mirror each other about the
/// middle of the slab, except the pair straddling the defect.
#[test]
fn only_the_defect_row_breaks_mirror_symmetry() {
    let mut cfg = GaugeRunConfig::standard(4, 0.0, 0.0, Schedule::geometric(0.3, 6, 100, 2000, 10, 1), 2);
    cfg.couplings = Some(GaugeCouplings { j: 0.6, k: 0.6 });
    let t = cfg.defect.unwrap();
    let ens = wilson_ensemble(&cfg, 8).unwrap();
    let rows = defect_local_order(&ens);
    let last = rows.len() - 1;
    for &(r, m, e) in &rows[..t - 1] {
        let (_, m2, e2) = rows[last - r];
        assert!((m - m2).abs() < 4.0 * e.hypot(e2) + 1e-3, "row {r}: {m} vs {m2}");
    }
    let (_, md, ed) = rows[t];
    let (_, mb, eb) = rows[t - 2];
    assert!(mb - md > 4.0 * ed.hypot(eb), "defect {md} ± {ed} vs bulk {mb} ± {eb}");
}

#[test]
fn defect_row_degrades_at_least_as_fast_as_the_bulk() {
    let drop = |p_lo: f64, p_hi: f64| {
        let row = |p: f64| {
            let cfg = GaugeRunConfig::standard(6, p, p, short_3d(), 4);
            let ens = wilson_ensemble(&cfg, 6).unwrap();
            let t = cfg.defect.unwrap();
            let rows = defect_local_order(&ens);
            (rows[t].1, rows[t].2, rows[2].1, rows[2].2)
        };
        let (d0, de0, b0, be0) = row(p_lo);
        let (d1, de1, b1, be1) = row(p_hi);
        let err = (de0.powi(2) + de1.powi(2) + be0.powi(2) + be1.powi(2)).sqrt();
        ((d0 - d1) - (b0 - b1), err)
    };
    let (excess, err) = drop(0.01, 0.04);
    assert!(excess > -3.0 * err, "excess {excess} ± {err}");
}

/// Without the defect the σ sector never sees the τ disorder.
#[test]
fn sectors_decouple_without_the_defect() {
    let lat = Cubic3D::new(4, 5).unwrap();
    let c = GaugeCouplings::from_rates(0.06, 0.06).unwrap();
    let base = sample_disorder_3d(lat, 0.06, 0.06, 1).unwrap();
    let other = sample_disorder_3d(lat, 0.06, 0.06, 2).unwrap();
    let mut swapped = base.clone();
    swapped.s_t = other.s_t.clone();
    swapped.r_t = other.r_t.clone();
    assert_ne!(swapped, base);

    let spec = WilsonLoopSpec::sigma(2, 2);
    let loops = |d: &tcnot_lab::noise::Disorder3D, seed: u64| {
        let w: Vec<f64> = (0..10)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed + k);
                let mut s = GaugeState3D::random(d.clone(), c, None, &mut rng).unwrap();
                for _ in 0..200 {
                    s.metropolis_sweep(&mut rng);
                }
                let mut sum = 0.0;
                for _ in 0..100 {
                    for _ in 0..5 {
                        s.metropolis_sweep(&mut rng);
                    }
                    sum += spec.measure(&s);
                }
                sum / 100.0
            })
            .collect();
        mean_stderr(&w)
    };
    let (w0, e0) = loops(&base, 30);
    let (w1, e1) = loops(&swapped, 60);
    assert!((w0 - w1).abs() < 4.0 * e0.hypot(e1), "{w0} ± {e0} vs {w1} ± {e1}");
    assert_eq!(GaugeSpecies::Sigma, spec.species);
}
