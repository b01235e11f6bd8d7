//! Two-species random plaquette gauge model with a transversal-CNOT defect.
//!
//! Both code blocks contribute a random 4-body Ising model on the links of
//! an `L x L x Tmax` lattice (periodic in space, open in time): coupling `K`
//! on spatial plaquettes with signs `r`, coupling `J` on timelike plaquettes
//! with signs `s`. The gate after round `T` permutes `τ -> στ` for all later
//! links. After redefining `τ` there, the species only interact through one
//! row of 5-body terms at `T + 1/2`,
//! `-J s^t σ_l(T) τ_l(T) τ_l(T+1) τ_{l1}(T+1/2) τ_{l2}(T+1/2)`.
//!
//! Spins are stored in one array: σ on link `i` at index `i`, τ at
//! `n_links + i`.

mod wilson;

pub use wilson::{
    defect_local_order, loop_tension, run_gauge_realization, wilson_ensemble, GaugeEnsemble,
    GaugeRealization, GaugeRunConfig, LoopTensionFit, WilsonEstimate, WilsonLoopSpec,
};

use rand::Rng;

use crate::at2d::SweepStats;
use crate::lattice::{Cubic3D, Link, Plaquette3D};
use crate::noise::{Disorder3D, GaugeCouplings};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeSpecies {
    Sigma,
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    J,
    K,
}

/// Interaction terms as flat spin lists plus the inverse incidence map.
#[derive(Debug, Clone)]
struct TermTable {
    offsets: Vec<u32>,
    spins: Vec<u32>,
    sign: Vec<i8>,
    class: Vec<Class>,
    inc_offsets: Vec<u32>,
    inc: Vec<u32>,
}

impl TermTable {
    fn build(disorder: &Disorder3D, defect: Option<usize>) -> Self {
        let lat = &disorder.lattice;
        let nl = lat.n_links() as u32;
        let mut t = TermTable {
            offsets: vec![0],
            spins: Vec::new(),
            sign: Vec::new(),
            class: Vec::new(),
            inc_offsets: Vec::new(),
            inc: Vec::new(),
        };
        let push = |t: &mut TermTable, spins: &[u32], sign: i8, class: Class| {
            t.spins.extend_from_slice(spins);
            t.offsets.push(t.spins.len() as u32);
            t.sign.push(sign);
            t.class.push(class);
        };
        for (species, shift) in [(GaugeSpecies::Sigma, 0), (GaugeSpecies::Tau, nl)] {
            let (s, r) = match species {
                GaugeSpecies::Sigma => (&disorder.s_c, &disorder.r_c),
                GaugeSpecies::Tau => (&disorder.s_t, &disorder.r_t),
            };
            for idx in 0..lat.n_plaquettes() {
                let p = lat.plaquette(idx).expect("index in range");
                let links = lat.plaquette_links(p).expect("plaquette in range");
                let mut ids: Vec<u32> =
                    links.iter().map(|&l| lat.link_index(l) as u32 + shift).collect();
                match p {
                    Plaquette3D::Spatial { .. } => {
                        push(&mut t, &ids, r[idx], Class::K);
                    }
                    Plaquette3D::Timelike { bond, t: time } => {
                        let k = idx - lat.n_spatial_plaquettes();
                        if species == GaugeSpecies::Tau && defect == Some(time) {
                            ids.push(lat.link_index(Link::Spatial { bond, t: time }) as u32);
                        }
                        push(&mut t, &ids, s[k], Class::J);
                    }
                }
            }
        }
        let n_spins = 2 * nl as usize;
        let mut count = vec![0u32; n_spins + 1];
        for &s in &t.spins {
            count[s as usize + 1] += 1;
        }
        for i in 0..n_spins {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        t.inc = vec![0; t.spins.len()];
        for k in 0..t.sign.len() {
            for &s in &t.spins[t.offsets[k] as usize..t.offsets[k + 1] as usize] {
                t.inc[fill[s as usize] as usize] = k as u32;
                fill[s as usize] += 1;
            }
        }
        t.inc_offsets = count;
        t
    }

    fn n_terms(&self) -> usize {
        self.sign.len()
    }

    fn value(&self, k: usize, spins: &[i8]) -> i32 {
        let mut v = self.sign[k] as i32;
        for &s in &self.spins[self.offsets[k] as usize..self.offsets[k + 1] as usize] {
            v *= spins[s as usize] as i32;
        }
        v
    }

    fn terms_of(&self, spin: usize) -> &[u32] {
        &self.inc[self.inc_offsets[spin] as usize..self.inc_offsets[spin + 1] as usize]
    }
}

// Each spin sits in at most 5 terms of one class.
const LOCAL: i32 = 6;
const TABLE_SIDE: usize = (2 * LOCAL + 1) as usize;

/// Spin configuration of both species with incrementally tracked energy.
#[derive(Debug, Clone)]
pub struct GaugeState3D {
    disorder: Disorder3D,
    couplings: GaugeCouplings,
    defect: Option<usize>,
    terms: TermTable,
    spins: Vec<i8>,
    beta: f64,
    /// Sums of term values per coupling class.
    nj: i64,
    nk: i64,
    accept: Vec<f64>,
}

impl GaugeState3D {
    /// All spins `+1` at `beta = 1`. `defect = Some(T)` needs `T + 1 < Tmax`.
    pub fn new(disorder: Disorder3D, couplings: GaugeCouplings, defect: Option<usize>) -> Result<Self> {
        let lat = disorder.lattice;
        if let Some(t) = defect {
            if t + 1 >= lat.tmax() {
                return Err(Error::Geometry(format!(
                    "defect slice {t} needs a later slice (Tmax = {})",
                    lat.tmax()
                )));
            }
        }
        if !(couplings.j.is_finite() && couplings.k.is_finite()) {
            return Err(Error::InfiniteCoupling("gauge couplings"));
        }
        let terms = TermTable::build(&disorder, defect);
        let spins = vec![1i8; 2 * lat.n_links()];
        let mut state = GaugeState3D {
            disorder,
            couplings,
            defect,
            terms,
            spins,
            beta: 1.0,
            nj: 0,
            nk: 0,
            accept: Vec::new(),
        };
        state.recount();
        state.set_beta(1.0)?;
        Ok(state)
    }

    /// Independent uniform spins.
    pub fn random<R: Rng + ?Sized>(
        disorder: Disorder3D,
        couplings: GaugeCouplings,
        defect: Option<usize>,
        rng: &mut R,
    ) -> Result<Self> {
        let mut s = Self::new(disorder, couplings, defect)?;
        for x in &mut s.spins {
            *x = if rng.random::<bool>() { 1 } else { -1 };
        }
        s.recount();
        Ok(s)
    }

    pub fn lattice(&self) -> &Cubic3D {
        &self.disorder.lattice
    }

    pub fn disorder(&self) -> &Disorder3D {
        &self.disorder
    }

    pub fn couplings(&self) -> GaugeCouplings {
        self.couplings
    }

    pub fn defect(&self) -> Option<usize> {
        self.defect
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> &[i8] {
        &self.spins[..self.n_links()]
    }

    pub fn tau(&self) -> &[i8] {
        &self.spins[self.n_links()..]
    }

    fn n_links(&self) -> usize {
        self.disorder.lattice.n_links()
    }

    fn spin_index(&self, species: GaugeSpecies, link: usize) -> usize {
        match species {
            GaugeSpecies::Sigma => link,
            GaugeSpecies::Tau => self.n_links() + link,
        }
    }

    pub fn spin(&self, species: GaugeSpecies, link: Link) -> i8 {
        self.spins[self.spin_index(species, self.lattice().link_index(link))]
    }

    pub fn set_spins(&mut self, sigma: &[i8], tau: &[i8]) -> Result<()> {
        let n = self.n_links();
        if sigma.len() != n || tau.len() != n {
            return Err(Error::Geometry(format!("expected {n} links per species")));
        }
        if sigma.iter().chain(tau).any(|&s| s != 1 && s != -1) {
            return Err(Error::Geometry("spins must be +1 or -1".into()));
        }
        self.spins[..n].copy_from_slice(sigma);
        self.spins[n..].copy_from_slice(tau);
        self.recount();
        Ok(())
    }

    fn recount(&mut self) {
        let (mut nj, mut nk) = (0, 0);
        for k in 0..self.terms.n_terms() {
            let v = self.terms.value(k, &self.spins) as i64;
            match self.terms.class[k] {
                Class::J => nj += v,
                Class::K => nk += v,
            }
        }
        self.nj = nj;
        self.nk = nk;
    }

    pub fn set_beta(&mut self, beta: f64) -> Result<()> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Schedule(format!("beta must be positive, got {beta}")));
        }
        self.beta = beta;
        let GaugeCouplings { j, k } = self.couplings;
        self.accept = (0..TABLE_SIDE * TABLE_SIDE)
            .map(|i| {
                let a = (i / TABLE_SIDE) as i32 - LOCAL;
                let b = (i % TABLE_SIDE) as i32 - LOCAL;
                (-beta * 2.0 * (j * a as f64 + k * b as f64)).exp().min(1.0)
            })
            .collect();
        Ok(())
    }

    /// Energy from the tracked class sums.
    pub fn tracked_energy(&self) -> f64 {
        -self.couplings.j * self.nj as f64 - self.couplings.k * self.nk as f64
    }

    /// `(Σ J-term values, Σ K-term values)`.
    pub fn term_sums(&self) -> (i64, i64) {
        (self.nj, self.nk)
    }

    fn local_sums(&self, spin: usize) -> (i32, i32) {
        let (mut a, mut b) = (0, 0);
        for &k in self.terms.terms_of(spin) {
            let v = self.terms.value(k as usize, &self.spins);
            match self.terms.class[k as usize] {
                Class::J => a += v,
                Class::K => b += v,
            }
        }
        (a, b)
    }

    /// Energy change of flipping one spin (combined index).
    pub fn delta_energy(&self, spin: usize) -> f64 {
        let (a, b) = self.local_sums(spin);
        2.0 * (self.couplings.j * a as f64 + self.couplings.k * b as f64)
    }

    fn flip(&mut self, spin: usize, a: i32, b: i32) {
        self.spins[spin] = -self.spins[spin];
        self.nj -= 2 * a as i64;
        self.nk -= 2 * b as i64;
    }

    pub fn metropolis_step<R: Rng + ?Sized>(&mut self, spin: usize, rng: &mut R) -> bool {
        let (a, b) = self.local_sums(spin);
        let p = self.accept[((a + LOCAL) as usize) * TABLE_SIDE + (b + LOCAL) as usize];
        if p >= 1.0 || rng.random::<f64>() < p {
            self.flip(spin, a, b);
            true
        } else {
            false
        }
    }

    /// One pass over every link of both species in index order.
    pub fn metropolis_sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) -> SweepStats {
        let mut stats = SweepStats::default();
        for spin in 0..self.spins.len() {
            stats.proposed += 1;
            stats.accepted += u64::from(self.metropolis_step(spin, rng));
        }
        stats
    }

    /// Flips every link of `species` at vertex `(site, t)`. For σ with the
    /// defect present, the τ copies of those links later than `T` flip too,
    /// which is the σ gauge move in the redefined variables.
    pub fn gauge_move(&mut self, species: GaugeSpecies, site: usize, t: usize) {
        let lat = *self.lattice();
        for link in lat.vertex_links(site, t) {
            let i = lat.link_index(link);
            let s = self.spin_index(species, i);
            self.spins[s] = -self.spins[s];
            if species == GaugeSpecies::Sigma {
                if let Some(big_t) = self.defect {
                    if lat.link_half_time(link) > 2 * big_t {
                        let s = self.spin_index(GaugeSpecies::Tau, i);
                        self.spins[s] = -self.spins[s];
                    }
                }
            }
        }
        self.recount();
    }

    /// Product of `species` spins around a spatial rectangle.
    pub fn wilson_loop(&self, species: GaugeSpecies, corner: usize, r1: usize, r2: usize, t: usize) -> i32 {
        self.lattice()
            .rectangle_links(corner, r1, r2, t)
            .into_iter()
            .map(|l| self.spin(species, l) as i32)
            .product()
    }

    /// Mean value of the τ timelike terms in row `t + 1/2` (including the
    /// 5-body row at the defect).
    pub fn tau_row_average(&self, t: usize) -> f64 {
        let lat = self.lattice();
        let nb = lat.plane().n_bonds();
        let base = 2 * lat.n_plaquettes() - lat.n_timelike_plaquettes();
        // τ terms follow all σ terms; timelike terms follow spatial ones.
        let first = base + t * nb;
        (first..first + nb).map(|k| self.terms.value(k, &self.spins) as f64).sum::<f64>() / nb as f64
    }
}

/// Energy of the redefined-variable Hamiltonian from scratch, walking the
/// lattice geometry directly.
pub fn energy_3d(state: &GaugeState3D) -> f64 {
    let lat = state.lattice();
    let d = state.disorder();
    let GaugeCouplings { j, k } = state.couplings();
    let sig = |l: Link| state.spin(GaugeSpecies::Sigma, l) as f64;
    let tau = |l: Link| state.spin(GaugeSpecies::Tau, l) as f64;
    let plane = lat.plane();
    let mut e = 0.0;
    for t in 0..lat.tmax() {
        for plaq in 0..plane.n_plaquettes() {
            let idx = t * plane.n_plaquettes() + plaq;
            let bonds = plane.plaquette_bonds(plaq).expect("plaquette");
            let ps: f64 = bonds.iter().map(|&b| sig(Link::Spatial { bond: b, t })).product();
            let pt: f64 = bonds.iter().map(|&b| tau(Link::Spatial { bond: b, t })).product();
            e -= k * (d.r_c[idx] as f64 * ps + d.r_t[idx] as f64 * pt);
        }
    }
    for t in 0..lat.tmax() - 1 {
        for bond in 0..plane.n_bonds() {
            let idx = t * plane.n_bonds() + bond;
            let (v1, v2) = plane.bond_endpoints(bond).expect("bond");
            let row = |f: &dyn Fn(Link) -> f64| {
                f(Link::Spatial { bond, t })
                    * f(Link::Spatial { bond, t: t + 1 })
                    * f(Link::Temporal { site: v1, t })
                    * f(Link::Temporal { site: v2, t })
            };
            let mut tt = row(&tau);
            if state.defect() == Some(t) {
                tt *= sig(Link::Spatial { bond, t });
            }
            e -= j * (d.s_c[idx] as f64 * row(&sig) + d.s_t[idx] as f64 * tt);
        }
    }
    e
}

/// Energy in the original variables, where the defect acts as a domain wall
/// exchanging `τ' -> στ'` on every term after `T`. `tau_prime` holds the
/// unredefined target spins.
pub fn energy_3d_permuted(
    disorder: &Disorder3D,
    couplings: GaugeCouplings,
    defect: usize,
    sigma: &[i8],
    tau_prime: &[i8],
) -> f64 {
    let lat = &disorder.lattice;
    let plane = lat.plane();
    let GaugeCouplings { j, k } = couplings;
    let sig = |l: Link| sigma[lat.link_index(l)] as f64;
    let tp = |l: Link| tau_prime[lat.link_index(l)] as f64;
    let mut e = 0.0;
    for t in 0..lat.tmax() {
        for plaq in 0..plane.n_plaquettes() {
            let idx = t * plane.n_plaquettes() + plaq;
            let mut ps = 1.0;
            let mut pt = 1.0;
            for b in plane.plaquette_bonds(plaq).expect("plaquette") {
                let l = Link::Spatial { bond: b, t };
                ps *= sig(l);
                pt *= if t > defect { sig(l) * tp(l) } else { tp(l) };
            }
            e -= k * (disorder.r_c[idx] as f64 * ps + disorder.r_t[idx] as f64 * pt);
        }
    }
    for t in 0..lat.tmax() - 1 {
        for bond in 0..plane.n_bonds() {
            let idx = t * plane.n_bonds() + bond;
            let (v1, v2) = plane.bond_endpoints(bond).expect("bond");
            let links = [
                Link::Spatial { bond, t },
                Link::Spatial { bond, t: t + 1 },
                Link::Temporal { site: v1, t },
                Link::Temporal { site: v2, t },
            ];
            let ps: f64 = links.iter().map(|&l| sig(l)).product();
            // Terms from t = T + 1/2 on see the permuted spins on all four links.
            let pt: f64 = if t >= defect {
                links.iter().map(|&l| sig(l) * tp(l)).product()
            } else {
                links.iter().map(|&l| tp(l)).product()
            };
            e -= j * (disorder.s_c[idx] as f64 * ps + disorder.s_t[idx] as f64 * pt);
        }
    }
    e
}

/// Maps unredefined target spins to the stored ones: `τ = στ'` for every
/// link later than `T`.
pub fn redefine_tau(lattice: &Cubic3D, defect: usize, sigma: &[i8], tau_prime: &[i8]) -> Vec<i8> {
    (0..lattice.n_links())
        .map(|i| {
            let link = lattice.link(i).expect("index in range");
            if lattice.link_half_time(link) > 2 * defect {
                sigma[i] * tau_prime[i]
            } else {
                tau_prime[i]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests;
