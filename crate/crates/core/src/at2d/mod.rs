//! Random Ashkin-Teller model on the periodic square lattice.
//!
//! ```text
//! H = -K2 Σ_l s^c_l σσ - K4 Σ_l s^t_l ττ - K4 Σ_l s^c_l s^t_l σσττ
//! ```
//!
//! with the products taken over the two endpoint sites of bond `l`. Setting
//! `K4 = 0` and ignoring `τ` leaves the random-bond Ising model.

mod anneal;
mod exact;

pub use anneal::{realization_seed, run_realization, RealizationMeans,
    anneal_run, disorder_average, ChainSeries, CurvePoint, Schedule,
};
pub use exact::{exact_partition_small, ExactAverages, EXACT_SPIN_LIMIT};

use rand::Rng;

use crate::lattice::Torus2D;
use crate::noise::{ATCouplings, DisorderField2D};
use crate::{Error, Result};

/// Single-site proposals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Sigma,
    Tau,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveSet {
    pub sigma: bool,
    pub tau: bool,
    pub both: bool,
}

impl MoveSet {
    pub const ALL: MoveSet = MoveSet { sigma: true, tau: true, both: true };

    fn moves(self) -> impl Iterator<Item = Move> {
        [(self.sigma, Move::Sigma), (self.tau, Move::Tau), (self.both, Move::Both)]
            .into_iter()
            .filter_map(|(on, m)| on.then_some(m))
    }
}

impl Default for MoveSet {
    fn default() -> Self {
        Self::ALL
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub proposed: u64,
    pub accepted: u64,
}

impl SweepStats {
    pub fn rate(&self) -> f64 {
        self.accepted as f64 / self.proposed.max(1) as f64
    }
}

impl std::ops::AddAssign for SweepStats {
    fn add_assign(&mut self, rhs: Self) {
        self.proposed += rhs.proposed;
        self.accepted += rhs.accepted;
    }
}

#[derive(Debug, Clone, Copy)]
struct Neighbour {
    site: u32,
    sc: i8,
    st: i8,
}

/// Integer bond sums; the energy is `-(K2 n2 + K4 n4 + K4 n44)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct BondSums {
    n2: i64,
    n4: i64,
    n44: i64,
}

// Local sums lie in [-4, 4]; the tables are indexed by (u + 4) * 9 + (v + 4).
const TABLE: usize = 81;

fn table_index(u: i32, v: i32) -> usize {
    ((u + 4) * 9 + (v + 4)) as usize
}

/// Spin configuration of one disorder realization plus its bookkeeping.
#[derive(Debug, Clone)]
pub struct AtState {
    lattice: Torus2D,
    couplings: ATCouplings,
    disorder: DisorderField2D,
    beta: f64,
    sigma: Vec<i8>,
    tau: Vec<i8>,
    neighbours: Vec<[Neighbour; 4]>,
    sums: BondSums,
    m_sigma: i64,
    m_tau: i64,
    accept: [[f64; TABLE]; 3],
}

impl AtState {
    /// All spins up at inverse temperature `beta`.
    pub fn new(disorder: DisorderField2D, couplings: ATCouplings, beta: f64) -> Result<Self> {
        let lattice = disorder.lattice;
        let n = lattice.n_sites();
        let mut neighbours = Vec::with_capacity(n);
        for s in 0..n {
            let bonds = lattice.site_bonds(s);
            neighbours.push(bonds.map(|b| {
                let (a, c) = lattice.bond_endpoints(b).expect("bond in range");
                Neighbour { site: if a == s { c } else { a } as u32, sc: disorder.sc[b], st: disorder.st[b] }
            }));
        }
        let mut state = Self {
            lattice,
            couplings,
            disorder,
            beta,
            sigma: vec![1; n],
            tau: vec![1; n],
            neighbours,
            sums: BondSums::default(),
            m_sigma: 0,
            m_tau: 0,
            accept: [[0.0; TABLE]; 3],
        };
        state.set_beta(beta)?;
        state.recount();
        Ok(state)
    }

    pub fn random<R: Rng + ?Sized>(
        disorder: DisorderField2D,
        couplings: ATCouplings,
        beta: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut state = Self::new(disorder, couplings, beta)?;
        let n = state.sigma.len();
        let sigma = (0..n).map(|_| if rng.random() { 1 } else { -1 }).collect();
        let tau = (0..n).map(|_| if rng.random() { 1 } else { -1 }).collect();
        state.set_spins(sigma, tau)?;
        Ok(state)
    }

    pub fn lattice(&self) -> &Torus2D {
        &self.lattice
    }

    pub fn couplings(&self) -> ATCouplings {
        self.couplings
    }

    pub fn disorder(&self) -> &DisorderField2D {
        &self.disorder
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> &[i8] {
        &self.sigma
    }

    pub fn tau(&self) -> &[i8] {
        &self.tau
    }

    pub fn set_spins(&mut self, sigma: Vec<i8>, tau: Vec<i8>) -> Result<()> {
        let n = self.lattice.n_sites();
        if sigma.len() != n || tau.len() != n {
            return Err(Error::Geometry(format!("expected {n} spins per species")));
        }
        if sigma.iter().chain(&tau).any(|&s| s != 1 && s != -1) {
            return Err(Error::Geometry("spins must be +1 or -1".into()));
        }
        self.sigma = sigma;
        self.tau = tau;
        self.recount();
        Ok(())
    }

    pub fn set_beta(&mut self, beta: f64) -> Result<()> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Schedule(format!("beta must be positive, got {beta}")));
        }
        self.beta = beta;
        let ATCouplings { k2, k4 } = self.couplings;
        // Sigma flip: ΔE = 2 (K2 a + K4 c); tau flip: 2 K4 (b + c); both: 2 (K2 a + K4 b).
        let weights: [(f64, f64); 3] = [(k2, k4), (k4, k4), (k2, k4)];
        for (table, (wu, wv)) in self.accept.iter_mut().zip(weights) {
            for u in -4..=4 {
                for v in -4..=4 {
                    let de = 2.0 * (wu * u as f64 + wv * v as f64);
                    table[table_index(u, v)] = (-beta * de).exp().min(1.0);
                }
            }
        }
        Ok(())
    }

    fn recount(&mut self) {
        let mut sums = BondSums::default();
        for (i, nbrs) in self.neighbours.iter().enumerate() {
            // Each bond is seen from both ends.
            for nb in nbrs {
                let j = nb.site as usize;
                let ss = (self.sigma[i] * self.sigma[j]) as i64;
                let tt = (self.tau[i] * self.tau[j]) as i64;
                sums.n2 += nb.sc as i64 * ss;
                sums.n4 += nb.st as i64 * tt;
                sums.n44 += (nb.sc * nb.st) as i64 * ss * tt;
            }
        }
        self.sums = BondSums { n2: sums.n2 / 2, n4: sums.n4 / 2, n44: sums.n44 / 2 };
        self.m_sigma = self.sigma.iter().map(|&s| s as i64).sum();
        self.m_tau = self.tau.iter().map(|&s| s as i64).sum();
    }

    /// Energy from the bookkept integer sums.
    pub fn tracked_energy(&self) -> f64 {
        let ATCouplings { k2, k4 } = self.couplings;
        -(k2 * self.sums.n2 as f64 + k4 * self.sums.n4 as f64 + k4 * self.sums.n44 as f64)
    }

    /// `(|M_σ|, |M_τ|)` per site.
    pub fn magnetizations(&self) -> (f64, f64) {
        let n = self.sigma.len() as f64;
        (self.m_sigma.abs() as f64 / n, self.m_tau.abs() as f64 / n)
    }

    /// Local sums `(a, b, c)` at site `i`: `Σ s^c σσ`, `Σ s^t ττ`, `Σ s^c s^t σσττ`.
    #[inline]
    fn local_sums(&self, i: usize) -> (i32, i32, i32) {
        let (si, ti) = (self.sigma[i], self.tau[i]);
        let (mut a, mut b, mut c) = (0i32, 0i32, 0i32);
        for nb in &self.neighbours[i] {
            let j = nb.site as usize;
            let ss = si * self.sigma[j];
            let tt = ti * self.tau[j];
            a += (nb.sc * ss) as i32;
            b += (nb.st * tt) as i32;
            c += (nb.sc * nb.st * ss * tt) as i32;
        }
        (a, b, c)
    }

    /// Energy change of `mv` at site `i` in the current state.
    pub fn delta_energy(&self, i: usize, mv: Move) -> f64 {
        let ATCouplings { k2, k4 } = self.couplings;
        let (a, b, c) = self.local_sums(i);
        match mv {
            Move::Sigma => 2.0 * (k2 * a as f64 + k4 * c as f64),
            Move::Tau => 2.0 * k4 * (b + c) as f64,
            Move::Both => 2.0 * (k2 * a as f64 + k4 * b as f64),
        }
    }

    /// One Metropolis proposal; returns whether it was accepted.
    #[inline]
    pub fn metropolis_step<R: Rng + ?Sized>(&mut self, i: usize, mv: Move, rng: &mut R) -> bool {
        let (a, b, c) = self.local_sums(i);
        let w = match mv {
            Move::Sigma => self.accept[0][table_index(a, c)],
            Move::Tau => self.accept[1][table_index(b, c)],
            Move::Both => self.accept[2][table_index(a, b)],
        };
        if w < 1.0 && rng.random::<f64>() >= w {
            return false;
        }
        let (a, b, c) = (a as i64, b as i64, c as i64);
        match mv {
            Move::Sigma => {
                self.sums.n2 -= 2 * a;
                self.sums.n44 -= 2 * c;
                self.m_sigma -= 2 * self.sigma[i] as i64;
                self.sigma[i] = -self.sigma[i];
            }
            Move::Tau => {
                self.sums.n4 -= 2 * b;
                self.sums.n44 -= 2 * c;
                self.m_tau -= 2 * self.tau[i] as i64;
                self.tau[i] = -self.tau[i];
            }
            Move::Both => {
                self.sums.n2 -= 2 * a;
                self.sums.n4 -= 2 * b;
                self.m_sigma -= 2 * self.sigma[i] as i64;
                self.m_tau -= 2 * self.tau[i] as i64;
                self.sigma[i] = -self.sigma[i];
                self.tau[i] = -self.tau[i];
            }
        }
        true
    }

    /// Visits every site in index order and proposes each enabled move.
    pub fn metropolis_sweep<R: Rng + ?Sized>(&mut self, moves: MoveSet, rng: &mut R) -> SweepStats {
        let mut stats = SweepStats::default();
        for i in 0..self.sigma.len() {
            for mv in moves.moves() {
                stats.proposed += 1;
                stats.accepted += u64::from(self.metropolis_step(i, mv, rng));
            }
        }
        stats
    }
}

/// Energy summed bond by bond from scratch.
pub fn energy(state: &AtState) -> f64 {
    hamiltonian(&state.lattice, &state.disorder, state.couplings, &state.sigma, &state.tau)
}

pub fn hamiltonian(
    lattice: &Torus2D,
    disorder: &DisorderField2D,
    couplings: ATCouplings,
    sigma: &[i8],
    tau: &[i8],
) -> f64 {
    let mut e = 0.0;
    for b in 0..lattice.n_bonds() {
        let (i, j) = lattice.bond_endpoints(b).expect("bond in range");
        let ss = (sigma[i] * sigma[j]) as f64;
        let tt = (tau[i] * tau[j]) as f64;
        let (sc, st) = (disorder.sc[b] as f64, disorder.st[b] as f64);
        e -= couplings.k2 * sc * ss + couplings.k4 * st * tt + couplings.k4 * sc * st * ss * tt;
    }
    e
}

/// `(|Σσ| / N, |Στ| / N)` summed directly.
pub fn measure_magnetizations(state: &AtState) -> (f64, f64) {
    let n = state.sigma.len() as f64;
    let m = |v: &[i8]| v.iter().map(|&s| s as i64).sum::<i64>().abs() as f64 / n;
    (m(&state.sigma), m(&state.tau))
}
