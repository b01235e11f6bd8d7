use super::*;
use crate::noise::sample_disorder_3d;
use crate::rng::{self, Domain};
use rand::Rng;

fn random_disorder(l: usize, tmax: usize, p: f64, seed: u64) -> Disorder3D {
    sample_disorder_3d(Cubic3D::new(l, tmax).unwrap(), p, p, seed).unwrap()
}

fn random_spins<R: Rng>(n: usize, rng: &mut R) -> Vec<i8> {
    (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

const C: GaugeCouplings = GaugeCouplings { j: 0.83, k: 1.21 };

#[test]
fn clean_ground_state_energy() {
    for (l, tmax, defect) in [(2, 3, Some(1)), (3, 5, Some(2)), (4, 9, Some(4)), (4, 4, None)] {
        let lat = Cubic3D::new(l, tmax).unwrap();
        let s = GaugeState3D::new(Disorder3D::clean(lat), C, defect).unwrap();
        let per_species =
            -(C.j * lat.n_timelike_plaquettes() as f64 + C.k * lat.n_spatial_plaquettes() as f64);
        assert!((s.tracked_energy() - 2.0 * per_species).abs() < 1e-9);
        assert!((energy_3d(&s) - 2.0 * per_species).abs() < 1e-9);
        if let Some(t) = defect {
            assert_eq!(s.tau_row_average(t), 1.0);
        }
    }
}

#[test]
fn defect_must_precede_last_slice() {
    let lat = Cubic3D::new(2, 3).unwrap();
    assert!(GaugeState3D::new(Disorder3D::clean(lat), C, Some(2)).is_err());
    assert!(GaugeState3D::new(Disorder3D::clean(lat), GaugeCouplings { j: f64::INFINITY, k: 1.0 }, None).is_err());
}

#[test]
fn gauge_moves_preserve_every_term_exhaustively() {
    let mut rng = rng::stream(1, Domain::Audit, &[]);
    for defect in [None, Some(0), Some(1)] {
        let disorder = random_disorder(2, 3, 0.3, 17);
        let mut s = GaugeState3D::random(disorder, C, defect, &mut rng).unwrap();
        for _ in 0..20 {
            let n = s.n_links();
            let sigma = random_spins(n, &mut rng);
            let tau = random_spins(n, &mut rng);
            s.set_spins(&sigma, &tau).unwrap();
            let before: Vec<i32> = (0..s.terms.n_terms()).map(|k| s.terms.value(k, &s.spins)).collect();
            for species in [GaugeSpecies::Sigma, GaugeSpecies::Tau] {
                for t in 0..3 {
                    for site in 0..4 {
                        let saved = s.spins.clone();
                        s.gauge_move(species, site, t);
                        assert_ne!(saved, s.spins);
                        let after: Vec<i32> =
                            (0..s.terms.n_terms()).map(|k| s.terms.value(k, &s.spins)).collect();
                        assert_eq!(before, after, "{species:?} ({site}, {t}) defect {defect:?}");
                        s.set_spins(&saved[..n], &saved[n..]).unwrap();
                    }
                }
            }
        }
    }
}

#[test]
fn naive_sigma_move_breaks_the_defect_row() {
    // Flipping only σ at the defect vertex changes the 5-body terms.
    let disorder = random_disorder(2, 3, 0.0, 3);
    let mut s = GaugeState3D::new(disorder, C, Some(1)).unwrap();
    let e0 = s.tracked_energy();
    let lat = *s.lattice();
    for link in lat.vertex_links(0, 1) {
        let i = lat.link_index(link);
        s.spins[i] = -s.spins[i];
    }
    s.recount();
    assert!((s.tracked_energy() - e0).abs() > 1.0);
}

#[test]
fn tracked_energy_matches_geometric_resummation() {
    let mut rng = rng::stream(2, Domain::Audit, &[]);
    for (l, tmax, defect) in [(2, 4, Some(1)), (3, 5, Some(2)), (2, 4, None)] {
        let disorder = random_disorder(l, tmax, 0.2, 5);
        for _ in 0..50 {
            let s = GaugeState3D::random(disorder.clone(), C, defect, &mut rng).unwrap();
            assert!((s.tracked_energy() - energy_3d(&s)).abs() < 1e-9);
        }
    }
}

#[test]
fn permutation_form_equals_redefined_form() {
    let mut rng = rng::stream(3, Domain::Audit, &[]);
    let lat = Cubic3D::new(3, 7).unwrap();
    let disorder = sample_disorder_3d(lat, 0.15, 0.1, 9).unwrap();
    let defect = 3;
    let mut s = GaugeState3D::new(disorder.clone(), C, Some(defect)).unwrap();
    for _ in 0..1000 {
        let sigma = random_spins(lat.n_links(), &mut rng);
        let tau_prime = random_spins(lat.n_links(), &mut rng);
        let tau = redefine_tau(&lat, defect, &sigma, &tau_prime);
        s.set_spins(&sigma, &tau).unwrap();
        let literal = energy_3d_permuted(&disorder, C, defect, &sigma, &tau_prime);
        assert!((literal - s.tracked_energy()).abs() < 1e-9);
    }
}

#[test]
fn delta_energy_matches_recompute() {
    let mut rng = rng::stream(4, Domain::Audit, &[]);
    let disorder = random_disorder(3, 7, 0.2, 11);
    let mut s = GaugeState3D::random(disorder, C, Some(3), &mut rng).unwrap();
    s.set_beta(0.4).unwrap();
    for _ in 0..1000 {
        let i = rng.random_range(0..s.spins.len());
        let e0 = energy_3d(&s);
        let de = s.delta_energy(i);
        let (a, b) = s.local_sums(i);
        s.flip(i, a, b);
        assert!((energy_3d(&s) - e0 - de).abs() < 1e-9);
        assert!((s.tracked_energy() - energy_3d(&s)).abs() < 1e-9);
        s.metropolis_step(rng.random_range(0..s.spins.len()), &mut rng);
    }
}

#[test]
fn anneal_reaches_ground_state_without_errors() {
    for l in [2, 3, 4] {
        let lat = Cubic3D::new(l, 2 * l + 1).unwrap();
        let strong = GaugeCouplings { j: 1.5, k: 1.5 };
        let mut rng = rng::stream(5, Domain::Audit, &[l as u64]);
        let mut s = GaugeState3D::random(Disorder3D::clean(lat), strong, Some(l), &mut rng).unwrap();
        for k in 0..30 {
            s.set_beta(0.05 + k as f64 * 0.1).unwrap();
            for _ in 0..100 {
                s.metropolis_sweep(&mut rng);
            }
        }
        let (nj, nk) = s.term_sums();
        assert_eq!(nj as usize, 2 * lat.n_timelike_plaquettes(), "L = {l}");
        assert_eq!(nk as usize, 2 * lat.n_spatial_plaquettes(), "L = {l}");
    }
}

/// Exact distribution of the σ term sums on a 2x2x2 lattice without a
/// defect, enumerating the 16 spatial links in temporal gauge.
fn exact_sigma_sums(disorder: &Disorder3D, c: GaugeCouplings) -> std::collections::BTreeMap<(i64, i64), f64> {
    let lat = disorder.lattice;
    let mut s = GaugeState3D::new(disorder.clone(), c, None).unwrap();
    let n = lat.n_links();
    let n_spatial = lat.plane().n_bonds() * lat.tmax();
    let n_sigma_terms = lat.n_plaquettes();
    let mut weights = std::collections::BTreeMap::new();
    let mut z = 0.0;
    for mask in 0u32..(1 << n_spatial) {
        let sigma: Vec<i8> = (0..n).map(|i| if i < n_spatial && mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        s.set_spins(&sigma, &vec![1; n]).unwrap();
        let (mut nj, mut nk) = (0i64, 0i64);
        for k in 0..n_sigma_terms {
            let v = s.terms.value(k, &s.spins) as i64;
            match s.terms.class[k] {
                Class::J => nj += v,
                Class::K => nk += v,
            }
        }
        let w = (c.j * nj as f64 + c.k * nk as f64).exp();
        *weights.entry((nj, nk)).or_insert(0.0) += w;
        z += w;
    }
    weights.values_mut().for_each(|w| *w /= z);
    weights
}

#[test]
fn sampled_gauge_invariant_distribution_matches_exact() {
    let lat = Cubic3D::new(2, 2).unwrap();
    let disorder = sample_disorder_3d(lat, 0.25, 0.25, 4).unwrap();
    let c = GaugeCouplings { j: 0.4, k: 0.3 };
    let exact = exact_sigma_sums(&disorder, c);
    let mut rng = rng::stream(6, Domain::Audit, &[]);
    let mut s = GaugeState3D::random(disorder, c, None, &mut rng).unwrap();
    for _ in 0..1000 {
        s.metropolis_sweep(&mut rng);
    }
    let n_sigma_terms = lat.n_plaquettes();
    let samples = 100_000;
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..samples {
        for _ in 0..2 {
            s.metropolis_sweep(&mut rng);
        }
        let (mut nj, mut nk) = (0i64, 0i64);
        for k in 0..n_sigma_terms {
            let v = s.terms.value(k, &s.spins) as i64;
            match s.terms.class[k] {
                Class::J => nj += v,
                Class::K => nk += v,
            }
        }
        *counts.entry((nj, nk)).or_insert(0usize) += 1;
    }
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    for (key, &p) in &exact {
        let expected = p * samples as f64;
        if expected < 5.0 {
            continue;
        }
        let o = *counts.get(key).unwrap_or(&0) as f64;
        chi2 += (o - expected).powi(2) / expected;
        dof += 1;
    }
    let dof = dof - 1;
    // Correlated samples inflate χ² somewhat; allow 1.5x over the 4σ level.
    let limit = 1.5 * crate::stats::chi2_quantile(dof, 4.0);
    assert!(chi2 < limit, "chi2 {chi2} dof {dof} limit {limit}");
}

#[test]
fn wilson_loops_clean_limit_and_free_spins() {
    let sched = crate::at2d::Schedule::geometric(0.2, 6, 100, 400, 10, 4);
    let mut cfg = GaugeRunConfig::standard(4, 0.0, 0.0, sched.clone(), 3);
    cfg.couplings = Some(GaugeCouplings { j: 3.0, k: 3.0 });
    let ens = wilson_ensemble(&cfg, 3).unwrap();
    assert!(ens.loops.iter().all(|w| w.mean == 1.0), "{:?}", ens.loops);
    assert!(defect_local_order(&ens).iter().all(|&(_, m, _)| m == 1.0));

    let mut free = GaugeRunConfig::standard(4, 0.5, 0.5, sched, 3);
    free.couplings = None;
    assert_eq!(free.resolved_couplings().unwrap(), GaugeCouplings { j: 0.0, k: 0.0 });
    let ens = wilson_ensemble(&free, 4).unwrap();
    for w in &ens.loops {
        assert!(w.mean.abs() <= 4.0 * w.err.max(1e-3), "{w:?}");
        assert!(w.mean.abs() <= 1.0);
    }
}

#[test]
fn loop_spec_validation() {
    let lat = Cubic3D::new(4, 5).unwrap();
    assert!(WilsonLoopSpec::sigma(2, 2).validate(&lat).is_ok());
    assert!(WilsonLoopSpec::sigma(1, 2).validate(&lat).is_err());
    assert!(WilsonLoopSpec::sigma(2, 3).validate(&lat).is_err());
    let spec = WilsonLoopSpec { t: Some(5), ..WilsonLoopSpec::sigma(2, 2) };
    assert!(spec.validate(&lat).is_err());
}

#[test]
fn tension_of_synthetic_perimeter_law() {
    let loops: Vec<WilsonEstimate> = [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)]
        .iter()
        .map(|&(r1, r2)| {
            let per = 2 * (r1 + r2);
            let w = (-0.01 * per as f64 + 0.02).exp();
            WilsonEstimate { r1, r2, perimeter: per, mean: w, err: 1e-3 }
        })
        .collect();
    let fit = loop_tension(&loops).unwrap();
    assert!((fit.a - 0.01).abs() < 1e-6);
    assert!((fit.intercept + 0.02).abs() < 1e-6);
    assert!(fit.residuals.iter().all(|r| r.abs() < 1e-9));

    let exact: Vec<WilsonEstimate> = loops.iter().map(|w| WilsonEstimate { err: 0.0, ..*w }).collect();
    assert!((loop_tension(&exact).unwrap().a - 0.01).abs() < 1e-6);
}

#[test]
fn tension_indeterminate_when_confined() {
    let loops: Vec<WilsonEstimate> = [(2, 2), (2, 3), (3, 3)]
        .iter()
        .map(|&(r1, r2)| WilsonEstimate { r1, r2, perimeter: 2 * (r1 + r2), mean: 0.01, err: 0.02 })
        .collect();
    assert!(matches!(loop_tension(&loops), Err(Error::Indeterminate(_))));
}

#[test]
fn gauge_run_is_deterministic() {
    let sched = crate::at2d::Schedule::geometric(0.2, 3, 20, 40, 10, 2);
    let cfg = GaugeRunConfig::standard(4, 0.05, 0.05, sched, 8);
    let a = run_gauge_realization(&cfg, 1).unwrap();
    let b = run_gauge_realization(&cfg, 1).unwrap();
    assert_eq!(a, b);
}
