//! Error rates, the couplings they induce, and quenched-disorder samplers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::check_probability;
use crate::lattice::{Cubic3D, Torus2D};
use crate::rng::{self, Domain};
use crate::{Error, Result};

/// Bit-flip threshold of the toric-code memory with perfect syndromes.
pub const MEMORY_THRESHOLD: f64 = 0.109;

/// Memory threshold with syndrome errors at `q = p`.
pub const MEMORY_THRESHOLD_NOISY: f64 = 0.033;

/// Loop tension reported for the random plaquette gauge model just below
/// its confinement point.
pub const REFERENCE_LOOP_TENSION: f64 = 0.01;

/// Net flip probability of two consecutive channels of rate `p_tilde`.
pub fn net_rate(p_tilde: f64) -> f64 {
    2.0 * p_tilde * (1.0 - p_tilde)
}

/// Per-channel rate whose two-fold composition has net rate `p`.
pub fn split_rate(p: f64) -> Result<f64> {
    check_probability("net rate p", p, 0.0, 0.5)?;
    Ok((1.0 - (1.0 - 2.0 * p).sqrt()) / 2.0)
}

/// Physical error rates of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Net bit-flip probability per syndrome interval.
    pub p: f64,
    /// Rate of each of the two persistent channels around the gate.
    pub p_tilde: f64,
    /// Syndrome measurement error probability.
    pub q: f64,
}

impl NoiseParams {
    pub fn persistent(p_tilde: f64, q: f64) -> Result<Self> {
        check_probability("p_tilde", p_tilde, 0.0, 0.5)?;
        check_probability("q", q, 0.0, 0.5)?;
        Ok(Self { p: net_rate(p_tilde), p_tilde, q })
    }

    pub fn from_net(p: f64, q: f64) -> Result<Self> {
        check_probability("q", q, 0.0, 0.5)?;
        Ok(Self { p, p_tilde: split_rate(p)?, q })
    }
}

/// Couplings `(K2, K4)` of the random Ashkin-Teller model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ATCouplings {
    pub k2: f64,
    pub k4: f64,
}

/// `K2`, `K4` from the log-linear form of the joint bond-sign law.
pub fn at_couplings(p_tilde: f64) -> Result<ATCouplings> {
    check_probability("p_tilde", p_tilde, 0.0, 0.5)?;
    if p_tilde == 0.0 {
        return Err(Error::InfiniteCoupling("K2, K4 at p_tilde = 0"));
    }
    let x = 1.0 - 2.0 * p_tilde;
    let (x2, x3) = (x * x, x * x * x);
    let k2 = 0.25 * (((1.0 + x2).powi(2) - 4.0 * x3 * x3) / (1.0 - x2).powi(2)).ln();
    let k4 = 0.25 * ((1.0 + x2 + 2.0 * x3) / (1.0 + x2 - 2.0 * x3)).ln();
    Ok(ATCouplings { k2, k4 })
}

/// Nishimori coupling `½ ln((1 - p) / p)` of a flip probability.
pub fn ising_coupling(p: f64) -> Result<f64> {
    check_probability("flip rate", p, 0.0, 0.5)?;
    if p == 0.0 {
        return Err(Error::InfiniteCoupling("J at p = 0"));
    }
    Ok(0.5 * ((1.0 - p) / p).ln())
}

/// Couplings of the random plaquette gauge model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeCouplings {
    /// Timelike (bit-flip) plaquettes.
    pub j: f64,
    /// Spatial (syndrome) plaquettes.
    pub k: f64,
}

impl GaugeCouplings {
    pub fn from_rates(p: f64, q: f64) -> Result<Self> {
        Ok(Self { j: ising_coupling(p)?, k: ising_coupling(q)? })
    }
}

/// Joint law of the detector-triggering signs `(s_c, s_t)` of one qubit pair.
///
/// Indexed `[c][t]` with index 0 for sign `+1` and 1 for sign `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointBondDist {
    pub table: [[f64; 2]; 2],
}

impl JointBondDist {
    pub fn prob(&self, sc: i8, st: i8) -> f64 {
        self.table[usize::from(sc < 0)][usize::from(st < 0)]
    }

    pub fn marginal_control_flip(&self) -> f64 {
        self.table[1][0] + self.table[1][1]
    }

    /// Draws one pair from a uniform variate in `[0, 1)`.
    pub fn draw(&self, u: f64) -> (i8, i8) {
        let t = &self.table;
        if u < t[0][0] {
            (1, 1)
        } else if u < t[0][0] + t[0][1] {
            (1, -1)
        } else if u < t[0][0] + t[0][1] + t[1][0] {
            (-1, 1)
        } else {
            (-1, -1)
        }
    }
}

/// Closed-form joint distribution
/// `p(s_c, s_t) = [1 + x² s_c + x³ s_t (1 + s_c)] / 4`, `x = 1 - 2 p_tilde`.
pub fn joint_bond_dist(p_tilde: f64) -> Result<JointBondDist> {
    check_probability("p_tilde", p_tilde, 0.0, 0.5)?;
    let x = 1.0 - 2.0 * p_tilde;
    let f = |sc: f64, st: f64| ((1.0 + x * x * sc + x.powi(3) * st * (1.0 + sc)) / 4.0).max(0.0);
    Ok(JointBondDist { table: [[f(1.0, 1.0), f(1.0, -1.0)], [f(-1.0, 1.0), f(-1.0, -1.0)]] })
}

/// Which block a disorder sign belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Control,
    Target,
}

/// Per-bond quenched signs `(s_c, s_t)` on a periodic square lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderField2D {
    pub lattice: Torus2D,
    pub p_tilde: f64,
    pub seed: u64,
    pub sc: Vec<i8>,
    pub st: Vec<i8>,
}

impl DisorderField2D {
    pub fn clean(lattice: Torus2D) -> Self {
        let n = lattice.n_bonds();
        Self { lattice, p_tilde: 0.0, seed: 0, sc: vec![1; n], st: vec![1; n] }
    }

    /// Multiplies one block's signs by a cycle (a set of bonds).
    pub fn apply_cycle(&mut self, block: Block, bonds: &[bool]) {
        let signs = match block {
            Block::Control => &mut self.sc,
            Block::Target => &mut self.st,
        };
        for (s, &flip) in signs.iter_mut().zip(bonds) {
            if flip {
                *s = -*s;
            }
        }
    }
}

/// I.i.d. per-bond draws from [`joint_bond_dist`], bonds in index order.
pub fn sample_disorder_2d(lattice: Torus2D, p_tilde: f64, seed: u64) -> Result<DisorderField2D> {
    let mut rng = rng::stream(seed, Domain::Disorder2D, &[lattice.size() as u64]);
    sample_disorder_2d_with(lattice, p_tilde, seed, &mut rng)
}

pub fn sample_disorder_2d_with<R: Rng + ?Sized>(
    lattice: Torus2D,
    p_tilde: f64,
    seed: u64,
    rng: &mut R,
) -> Result<DisorderField2D> {
    let dist = joint_bond_dist(p_tilde)?;
    let n = lattice.n_bonds();
    let (mut sc, mut st) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let (c, t) = dist.draw(rng.random());
        sc.push(c);
        st.push(t);
    }
    Ok(DisorderField2D { lattice, p_tilde, seed, sc, st })
}

/// Quenched signs of the 3D model for both blocks.
///
/// `s_*` are indexed by timelike plaquette `t * 2L² + bond` (a bit flip on
/// the qubit at `bond` between rounds `t` and `t + 1`); `r_*` by spatial
/// plaquette `t * L² + plaq` (a wrong outcome of check `plaq` in round `t`).
#[derive(Debug, Clone, PartialEq)]
pub struct Disorder3D {
    pub lattice: Cubic3D,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    pub s_c: Vec<i8>,
    pub s_t: Vec<i8>,
    pub r_c: Vec<i8>,
    pub r_t: Vec<i8>,
}

impl Disorder3D {
    pub fn clean(lattice: Cubic3D) -> Self {
        let (ns, nr) = (lattice.n_timelike_plaquettes(), lattice.n_spatial_plaquettes());
        Self {
            lattice,
            p: 0.0,
            q: 0.0,
            seed: 0,
            s_c: vec![1; ns],
            s_t: vec![1; ns],
            r_c: vec![1; nr],
            r_t: vec![1; nr],
        }
    }
}

fn flips<R: Rng + ?Sized>(rng: &mut R, n: usize, prob: f64) -> Vec<i8> {
    (0..n).map(|_| if rng.random::<f64>() < prob { -1 } else { 1 }).collect()
}

/// Independent flips with `P(s = -1) = p`, `P(r = -1) = q`; each block and
/// each kind of sign uses its own stream.
pub fn sample_disorder_3d(lattice: Cubic3D, p: f64, q: f64, seed: u64) -> Result<Disorder3D> {
    check_probability("p", p, 0.0, 0.5)?;
    check_probability("q", q, 0.0, 0.5)?;
    let key = |kind: u64| {
        rng::stream(
            seed,
            Domain::Disorder3D,
            &[lattice.size() as u64, lattice.tmax() as u64, p.to_bits(), q.to_bits(), kind],
        )
    };
    let (ns, nr) = (lattice.n_timelike_plaquettes(), lattice.n_spatial_plaquettes());
    Ok(Disorder3D {
        lattice,
        p,
        q,
        seed,
        s_c: flips(&mut key(0), ns, p),
        s_t: flips(&mut key(1), ns, p),
        r_c: flips(&mut key(2), nr, q),
        r_t: flips(&mut key(3), nr, q),
    })
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Net flip probability of three consecutive channels of rate `p_tilde`.
pub fn three_channel_rate(p_tilde: f64) -> f64 {
    p_tilde.powi(3) + 3.0 * (1.0 - p_tilde).powi(2) * p_tilde
}

/// Threshold of the target block decoded on its own: its detectors see
/// three consecutive channels, so the per-channel rate solves
/// `three_channel_rate(p_tilde) = p_th`. Returns `(p_tilde, 2 p_tilde (1 - p_tilde))`.
pub fn separate_decoding_threshold(p_th: f64) -> (f64, f64) {
    let root = bisect(|x| three_channel_rate(x) - p_th, 0.0, 0.5, 1e-12);
    (root, net_rate(root))
}

pub fn independent_target_threshold() -> (f64, f64) {
    separate_decoding_threshold(MEMORY_THRESHOLD)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectEstimate {
    pub p: f64,
    /// Set when the loop tension is too large for any positive solution.
    pub clamped: bool,
}

/// Local target threshold at the gate: solves `e^{-A} (1 - 2p) = 1 - 2 p_star`.
pub fn defect_threshold_estimate(loop_tension: f64, p_star: f64) -> Result<DefectEstimate> {
    if !(loop_tension >= 0.0 && loop_tension.is_finite()) {
        return Err(Error::Config(format!("loop tension must be >= 0, got {loop_tension}")));
    }
    check_probability("p_star", p_star, f64::MIN_POSITIVE, 0.5)?;
    if loop_tension == 0.0 {
        return Ok(DefectEstimate { p: p_star, clamped: false });
    }
    let scaled = loop_tension.exp() * (1.0 - 2.0 * p_star);
    if scaled > 1.0 {
        return Ok(DefectEstimate { p: 0.0, clamped: true });
    }
    Ok(DefectEstimate { p: (1.0 - scaled) / 2.0, clamped: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates the sixteen channel outcomes with `E_t = E_t1 E_t2 E_c1`.
    fn brute_joint(p_tilde: f64) -> [[f64; 2]; 2] {
        let mut table = [[0.0; 2]; 2];
        let pr = |s: i8| if s < 0 { p_tilde } else { 1.0 - p_tilde };
        for bits in 0..16u8 {
            let s = |k: u8| if bits >> k & 1 == 1 { -1i8 } else { 1 };
            let (c1, c2, t1, t2) = (s(0), s(1), s(2), s(3));
            let sc = c1 * c2;
            let st = t1 * t2 * c1;
            table[usize::from(sc < 0)][usize::from(st < 0)] += pr(c1) * pr(c2) * pr(t1) * pr(t2);
        }
        table
    }

    #[test]
    fn split_rate_examples() {
        assert!((net_rate(0.042) - 0.080).abs() < 5e-4);
        assert_eq!(split_rate(0.5).unwrap(), 0.5);
        let pt = split_rate(0.109).unwrap();
        assert!((pt - 0.057_846_180_611).abs() < 1e-9);
        assert!((net_rate(pt) - 0.109).abs() < 1e-12);
        assert!(split_rate(0.6).is_err());
        assert!(split_rate(-0.1).is_err());
    }

    #[test]
    fn couplings_examples() {
        let c = at_couplings(0.5).unwrap();
        assert_eq!((c.k2, c.k4), (0.0, 0.0));
        let c = at_couplings(0.042).unwrap();
        assert!((c.k2 - 0.9181).abs() < 1e-4);
        assert!((c.k4 - 0.6036).abs() < 1e-4);
        let j = ising_coupling(net_rate(0.042)).unwrap();
        assert!((j - 1.2180).abs() < 1e-4);
        assert!(c.k4 < c.k2 && c.k2 < j);
        assert!(matches!(at_couplings(0.0), Err(Error::InfiniteCoupling(_))));
    }

    #[test]
    fn couplings_decrease_monotonically() {
        let mut prev = at_couplings(0.01).unwrap();
        for i in 2..=49 {
            let c = at_couplings(i as f64 * 0.01).unwrap();
            assert!(c.k2 < prev.k2 && c.k4 < prev.k4, "at {i}");
            prev = c;
        }
    }

    #[test]
    fn couplings_reproduce_joint_law() {
        // p(sc, st) ∝ exp(K2 sc + K4 st + K4 sc st)
        for pt in [0.01, 0.1, 0.3] {
            let c = at_couplings(pt).unwrap();
            let d = joint_bond_dist(pt).unwrap();
            let w = |sc: f64, st: f64| (c.k2 * sc + c.k4 * st + c.k4 * sc * st).exp();
            let z = w(1., 1.) + w(1., -1.) + w(-1., 1.) + w(-1., -1.);
            for (sc, st) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                assert!((w(sc as f64, st as f64) / z - d.prob(sc, st)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_examples() {
        let d = joint_bond_dist(0.0).unwrap();
        assert_eq!(d.table, [[1.0, 0.0], [0.0, 0.0]]);
        let d = joint_bond_dist(0.1).unwrap();
        let expect = [[0.666, 0.154], [0.090, 0.090]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((d.table[i][k] - expect[i][k]).abs() < 1e-12);
            }
        }
        let brute = brute_joint(0.1);
        for i in 0..2 {
            for k in 0..2 {
                assert!((d.table[i][k] - brute[i][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_matches_brute_force_on_grid() {
        for i in 0..=50 {
            let pt = i as f64 * 0.01;
            let d = joint_bond_dist(pt).unwrap();
            let brute = brute_joint(pt);
            let sum: f64 = d.table.iter().flatten().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(d.table.iter().flatten().all(|&v| v >= 0.0));
            for a in 0..2 {
                for b in 0..2 {
                    assert!((d.table[a][b] - brute[a][b]).abs() < 1e-12);
                }
            }
            assert!((d.marginal_control_flip() - net_rate(pt)).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_ordering_dense_grid() {
        for i in 1..=4500 {
            let pt = i as f64 * 1e-4;
            let c = at_couplings(pt).unwrap();
            let j = ising_coupling(net_rate(pt)).unwrap();
            assert!(c.k4 <= c.k2 && c.k2 <= j, "p_tilde = {pt}");
        }
    }

    #[test]
    fn disorder_2d_clean_and_deterministic() {
        let lat = Torus2D::new(6).unwrap();
        let d = sample_disorder_2d(lat, 0.0, 1).unwrap();
        assert!(d.sc.iter().chain(&d.st).all(|&s| s == 1));
        let a = sample_disorder_2d(lat, 0.1, 99).unwrap();
        let b = sample_disorder_2d(lat, 0.1, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_disorder_2d(lat, 0.1, 100).unwrap());
    }

    #[test]
    fn disorder_2d_frequencies_match_table() {
        let lat = Torus2D::new(708).unwrap(); // 2 * 708² ≈ 10⁶ bonds
        let d = sample_disorder_2d(lat, 0.1, 5).unwrap();
        let n = d.sc.len() as f64;
        let mut counts = [[0.0; 2]; 2];
        for (&c, &t) in d.sc.iter().zip(&d.st) {
            counts[usize::from(c < 0)][usize::from(t < 0)] += 1.0;
        }
        let table = joint_bond_dist(0.1).unwrap().table;
        for a in 0..2 {
            for b in 0..2 {
                let p = table[a][b];
                let sigma = (n * p * (1.0 - p)).sqrt();
                assert!((counts[a][b] - n * p).abs() < 4.0 * sigma, "cell {a}{b}");
            }
        }
    }

    #[test]
    fn disorder_3d_rates() {
        let lat = Cubic3D::new(4, 3).unwrap();
        let d = sample_disorder_3d(lat, 0.0, 0.0, 3).unwrap();
        assert_eq!(d, Disorder3D { seed: 3, ..Disorder3D::clean(lat) });

        let lat = Cubic3D::new(64, 64).unwrap();
        let d = sample_disorder_3d(lat, 0.033, 0.033, 3).unwrap();
        for signs in [&d.s_c, &d.s_t, &d.r_c, &d.r_t] {
            let n = signs.len() as f64;
            let k = signs.iter().filter(|&&s| s < 0).count() as f64;
            let sigma = (n * 0.033 * 0.967).sqrt();
            assert!((k - 0.033 * n).abs() < 4.0 * sigma);
        }
        assert_ne!(d.s_c, d.s_t);
        assert_ne!(d.r_c, d.r_t);
    }

    #[test]
    fn separate_threshold() {
        let (pt, p) = independent_target_threshold();
        assert!((pt - 0.039).abs() < 5e-4);
        assert!((p - 0.076).abs() < 5e-4);
        assert!((three_channel_rate(pt) - MEMORY_THRESHOLD).abs() <= 1e-10);
    }

    #[test]
    fn defect_estimate() {
        let e = defect_threshold_estimate(0.01, 0.033).unwrap();
        assert!((e.p - 0.028).abs() < 5e-4 && !e.clamped);
        assert_eq!(defect_threshold_estimate(0.0, 0.033).unwrap().p, 0.033);
        let e = defect_threshold_estimate(0.02, 0.033).unwrap();
        assert!((e.p - (1.0 - 0.02f64.exp() * 0.934) / 2.0).abs() < 1e-15);
        let by_bisection = bisect(|p| (-0.02f64).exp() * (1.0 - 2.0 * p) - 0.934, 0.0, 0.5, 1e-14);
        assert!((e.p - by_bisection).abs() < 1e-12);
        let e = defect_threshold_estimate(1.0, 0.033).unwrap();
        assert!(e.clamped && e.p == 0.0);
    }
}
