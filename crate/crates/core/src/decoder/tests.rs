use super::*;
use crate::noise::net_rate;
use rand::Rng;

fn bulk_qubit(d: usize) -> u32 {
    1 << ((d / 2) * d + d / 2)
}

#[test]
fn zero_rate_gives_clean_masks() {
    let code = RotatedCode::new(5).unwrap();
    for seed in 0..100 {
        assert_eq!(sample_error(&code, 0.0, seed).unwrap(), ErrorSample::default());
    }
    assert!(sample_error(&code, 0.6, 0).is_err());
}

#[test]
fn flip_fraction_is_binomial() {
    let code = RotatedCode::new(5).unwrap();
    let mut rng = rng::stream(1, Domain::Audit, &[]);
    let shots = 10_000;
    let mut ones = 0u64;
    for _ in 0..shots {
        let s = sample_error_with(&code, 0.1, &mut rng).unwrap();
        ones += [s.ec1, s.ec2, s.et1, s.et2].iter().map(|m| m.count_ones() as u64).sum::<u64>();
    }
    let n = (shots * 4 * 25) as f64;
    let sd = (n * 0.1 * 0.9).sqrt();
    assert!((ones as f64 - 0.1 * n).abs() < 4.0 * sd);
}

#[test]
fn same_seed_same_sample() {
    let code = RotatedCode::new(3).unwrap();
    assert_eq!(sample_error(&code, 0.2, 9).unwrap(), sample_error(&code, 0.2, 9).unwrap());
}

#[test]
fn single_flip_detector_patterns() {
    for d in [3, 5] {
        let code = RotatedCode::new(d).unwrap();
        let q = bulk_qubit(d);
        let det = detectors(&code, &ErrorSample { ec1: q, ..Default::default() });
        assert_eq!((det.control.count_ones(), det.target.count_ones()), (2, 2));
        assert_eq!(det.control, det.target);
        let det = detectors(&code, &ErrorSample { ec2: q, ..Default::default() });
        assert_eq!((det.control.count_ones(), det.target), (2, 0));
        for s in [ErrorSample { et1: q, ..Default::default() }, ErrorSample { et2: q, ..Default::default() }] {
            let det = detectors(&code, &s);
            assert_eq!((det.control, det.target.count_ones()), (0, 2));
        }
    }
}

#[test]
fn detectors_invariant_under_x_checks_exhaustively() {
    let code = RotatedCode::new(3).unwrap();
    let mut rng = rng::stream(2, Domain::Audit, &[]);
    for _ in 0..50 {
        let s = sample_error_with(&code, 0.3, &mut rng).unwrap();
        let base = detectors(&code, &s);
        for &g in code.x_checks() {
            let variants = [
                ErrorSample { ec2: s.ec2 ^ g, ..s },
                ErrorSample { et1: s.et1 ^ g, ..s },
                ErrorSample { et2: s.et2 ^ g, ..s },
                ErrorSample { ec1: s.ec1 ^ g, et1: s.et1 ^ g, ..s },
                ErrorSample { ec1: s.ec1 ^ g, ..s },
            ];
            for v in variants {
                assert_eq!(detectors(&code, &v), base);
            }
            // The compensated move leaves the target error itself unchanged.
            let v = ErrorSample { ec1: s.ec1 ^ g, et1: s.et1 ^ g, ..s };
            assert_eq!(v.effective().1, s.effective().1);
        }
    }
}

#[test]
fn no_detectors_means_no_correction() {
    for d in [3, 5] {
        for pt in [0.0, 0.01, 0.1, 0.3] {
            let dec = MleDecoder::new(RotatedCode::new(d).unwrap(), pt).unwrap();
            let out = dec.decode(DetectorSet::default()).unwrap();
            assert_eq!((out.control, out.target, out.tie), (0, 0, false));
            assert!(!out.logical_control && !out.logical_target);
        }
    }
}

#[test]
fn correlated_single_flip_is_undone() {
    let code = RotatedCode::new(3).unwrap();
    let dec = MleDecoder::new(code.clone(), 0.04).unwrap();
    let s = ErrorSample { ec1: bulk_qubit(3), ..Default::default() };
    let out = dec.decode(detectors(&code, &s)).unwrap();
    let (ec, et) = s.effective();
    assert_eq!((out.control, out.target), (ec, et));
    assert!(!out.tie);
}

fn brute_force_class_optima(dec: &MleDecoder, det: DetectorSet) -> [f64; 4] {
    let code = dec.code();
    let span = code.cycle_span(true);
    let rc = code.pure_error(det.control).unwrap();
    let rt = code.pure_error(det.target).unwrap();
    let mut best = [f64::INFINITY; 4];
    for &gc in &span {
        for &gt in &span {
            let (c, t) = (rc ^ gc, rt ^ gt);
            let k = 2 * usize::from(code.is_logical(c)) + usize::from(code.is_logical(t));
            best[k] = best[k].min(dec.cost(c, t));
        }
    }
    best
}

#[test]
fn decoder_is_optimal_and_valid_on_every_d3_syndrome() {
    let code = RotatedCode::new(3).unwrap();
    for pt in [0.01, 0.04, 0.1] {
        let dec = MleDecoder::new(code.clone(), pt).unwrap();
        for sc in 0..16 {
            for st in 0..16 {
                let det = DetectorSet { control: sc, target: st };
                let out = dec.decode(det).unwrap();
                assert_eq!(code.syndrome(out.control), sc);
                assert_eq!(code.syndrome(out.target), st);
                let best = brute_force_class_optima(&dec, det);
                let min = best.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!((out.cost - min).abs() < 1e-9, "p~={pt} {det:?}");
                let chosen = 2 * usize::from(out.logical_control) + usize::from(out.logical_target);
                assert!((best[chosen] - min).abs() < 1e-9);
                let n_opt = best.iter().filter(|&&b| (b - min).abs() < 1e-9).count();
                assert_eq!(out.tie, n_opt > 1);
            }
        }
    }
}

#[test]
fn d5_decoder_beats_random_alternatives() {
    let code = RotatedCode::new(5).unwrap();
    let dec = MleDecoder::new(code.clone(), 0.05).unwrap();
    let span = code.cycle_span(true);
    let mut rng = rng::stream(3, Domain::Audit, &[]);
    for _ in 0..5 {
        let s = sample_error_with(&code, 0.05, &mut rng).unwrap();
        let det = detectors(&code, &s);
        let out = dec.decode(det).unwrap();
        assert_eq!(code.syndrome(out.control), det.control);
        assert_eq!(code.syndrome(out.target), det.target);
        for _ in 0..2000 {
            let c = out.control ^ span[rng.random_range(0..span.len())];
            let t = out.target ^ span[rng.random_range(0..span.len())];
            assert!(dec.cost(c, t) >= out.cost - 1e-9);
        }
    }
}

#[test]
fn half_rate_is_a_tie() {
    let code = RotatedCode::new(3).unwrap();
    let dec = MleDecoder::new(code, 0.5).unwrap();
    assert!(dec.decode(DetectorSet { control: 3, target: 1 }).unwrap().tie);
}

#[test]
fn exact_ler_conserves_probability() {
    assert_eq!(exact_ler_d3(0.0).unwrap(), ExactLer { control: 0.0, target: 0.0, total: 1.0 });
    let mut prev_t = 0.0;
    for k in 1..=10 {
        let pt = 0.01 * k as f64;
        let e = exact_ler_d3(pt).unwrap();
        assert!((e.total - 1.0).abs() < 1e-12, "{}", e.total - 1.0);
        assert!(e.target >= e.control, "p~={pt} {e:?}");
        assert!(e.target > prev_t);
        prev_t = e.target;
    }
}

#[test]
fn sampled_ler_matches_exact_d3() {
    let pt = 0.06;
    let exact = exact_ler_d3(pt).unwrap();
    let row = &ler_estimate(3, &[pt], 20_000, 4).unwrap()[0];
    assert_eq!(row.p, net_rate(pt));
    for (est, ex) in [(row.ler_control, exact.control), (row.ler_target, exact.target)] {
        let sd = (ex * (1.0 - ex) / row.shots as f64).sqrt();
        assert!((est - ex).abs() < 4.0 * sd, "{est} vs {ex}");
    }
    assert!(ler_estimate(3, &[pt], 10, 4).is_err());
}

#[test]
fn ler_estimate_is_deterministic() {
    let a = ler_estimate(3, &[0.03, 0.05], 3000, 7).unwrap();
    assert_eq!(a, ler_estimate(3, &[0.03, 0.05], 3000, 7).unwrap());
}

#[test]
fn crossing_interpolates_sign_change() {
    let small = [(0.02, 0.01), (0.04, 0.04), (0.06, 0.08), (0.08, 0.12)];
    let large = [(0.02, 0.002), (0.04, 0.02), (0.06, 0.09), (0.08, 0.16)];
    let x = ler_crossing(&small, &large).unwrap();
    assert!((x - (0.04 + 0.02 * 0.02 / 0.03)).abs() < 1e-12);
    assert_eq!(ler_crossing(&small, &small[..1]), None);
    assert_eq!(ler_crossing(&large, &small), None);
}
