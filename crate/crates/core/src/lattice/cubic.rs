use super::{Dir, Torus2D};
use crate::{Error, Result};

/// A link of the cubic lattice.
///
/// `Spatial { bond, t }` is the spatial link of 2D bond `bond` on time slice
/// `t`; `Temporal { site, t }` is the time-directed link at `site` between
/// slices `t` and `t + 1` (time `t + 1/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    Spatial { bond: usize, t: usize },
    Temporal { site: usize, t: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaquetteKind {
    /// 2D plaquette `plaq` on slice `t` (syndrome-measurement term).
    Spatial,
    /// Bond `bond` swept from slice `t` to `t + 1` (bit-flip term).
    Timelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plaquette3D {
    Spatial { plaq: usize, t: usize },
    Timelike { bond: usize, t: usize },
}

/// `L x L x Tmax` lattice, periodic in space and open in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cubic3D {
    plane: Torus2D,
    tmax: usize,
}

impl Cubic3D {
    pub fn new(l: usize, tmax: usize) -> Result<Self> {
        if tmax < 2 {
            return Err(Error::Geometry(format!("need at least two time slices, got {tmax}")));
        }
        Ok(Self { plane: Torus2D::new(l)?, tmax })
    }

    pub fn plane(&self) -> &Torus2D {
        &self.plane
    }

    pub fn size(&self) -> usize {
        self.plane.size()
    }

    pub fn tmax(&self) -> usize {
        self.tmax
    }

    fn n_spatial_links(&self) -> usize {
        self.plane.n_bonds() * self.tmax
    }

    pub fn n_links(&self) -> usize {
        self.n_spatial_links() + self.plane.n_sites() * (self.tmax - 1)
    }

    pub fn n_spatial_plaquettes(&self) -> usize {
        self.plane.n_plaquettes() * self.tmax
    }

    pub fn n_timelike_plaquettes(&self) -> usize {
        self.plane.n_bonds() * (self.tmax - 1)
    }

    pub fn n_plaquettes(&self) -> usize {
        self.n_spatial_plaquettes() + self.n_timelike_plaquettes()
    }

    pub fn link_index(&self, link: Link) -> usize {
        match link {
            Link::Spatial { bond, t } => t * self.plane.n_bonds() + bond,
            Link::Temporal { site, t } => self.n_spatial_links() + t * self.plane.n_sites() + site,
        }
    }

    pub fn link(&self, index: usize) -> Result<Link> {
        if index >= self.n_links() {
            return Err(Error::IndexOutOfRange { index, limit: self.n_links() });
        }
        let nb = self.plane.n_bonds();
        Ok(if index < self.n_spatial_links() {
            Link::Spatial { bond: index % nb, t: index / nb }
        } else {
            let r = index - self.n_spatial_links();
            let ns = self.plane.n_sites();
            Link::Temporal { site: r % ns, t: r / ns }
        })
    }

    /// Time coordinate of a link in units of half steps: spatial links at
    /// `2t`, temporal links at `2t + 1`.
    pub fn link_half_time(&self, link: Link) -> usize {
        match link {
            Link::Spatial { t, .. } => 2 * t,
            Link::Temporal { t, .. } => 2 * t + 1,
        }
    }

    /// Plaquettes are ordered spatial first (`t * L^2 + plaq`), then
    /// timelike (`t * 2L^2 + bond`).
    pub fn plaquette_index(&self, p: Plaquette3D) -> usize {
        match p {
            Plaquette3D::Spatial { plaq, t } => t * self.plane.n_plaquettes() + plaq,
            Plaquette3D::Timelike { bond, t } => {
                self.n_spatial_plaquettes() + t * self.plane.n_bonds() + bond
            }
        }
    }

    pub fn plaquette(&self, index: usize) -> Result<Plaquette3D> {
        if index >= self.n_plaquettes() {
            return Err(Error::IndexOutOfRange { index, limit: self.n_plaquettes() });
        }
        Ok(if index < self.n_spatial_plaquettes() {
            let np = self.plane.n_plaquettes();
            Plaquette3D::Spatial { plaq: index % np, t: index / np }
        } else {
            let r = index - self.n_spatial_plaquettes();
            let nb = self.plane.n_bonds();
            Plaquette3D::Timelike { bond: r % nb, t: r / nb }
        })
    }

    /// The four member links of a plaquette. A timelike plaquette for bond
    /// `l` at `t + 1/2` holds `l(t)`, `l(t+1)` and the temporal links at the
    /// two endpoints `l1`, `l2` of `l`.
    pub fn plaquette_links(&self, p: Plaquette3D) -> Result<[Link; 4]> {
        match p {
            Plaquette3D::Spatial { plaq, t } => {
                if t >= self.tmax {
                    return Err(Error::IndexOutOfRange { index: t, limit: self.tmax });
                }
                let b = self.plane.plaquette_bonds(plaq)?;
                Ok(b.map(|bond| Link::Spatial { bond, t }))
            }
            Plaquette3D::Timelike { bond, t } => {
                if t + 1 >= self.tmax {
                    return Err(Error::IndexOutOfRange { index: t, limit: self.tmax - 1 });
                }
                let (l1, l2) = self.plane.bond_endpoints(bond)?;
                Ok([
                    Link::Spatial { bond, t },
                    Link::Spatial { bond, t: t + 1 },
                    Link::Temporal { site: l1, t },
                    Link::Temporal { site: l2, t },
                ])
            }
        }
    }

    /// Plaquettes containing `link` (4 in the bulk, 3 on the first and last slice).
    pub fn link_plaquettes(&self, link: Link) -> Vec<Plaquette3D> {
        match link {
            Link::Spatial { bond, t } => {
                let mut out: Vec<Plaquette3D> = self
                    .plane
                    .bond_plaquettes(bond)
                    .expect("bond in range")
                    .into_iter()
                    .map(|plaq| Plaquette3D::Spatial { plaq, t })
                    .collect();
                if t >= 1 {
                    out.push(Plaquette3D::Timelike { bond, t: t - 1 });
                }
                if t + 1 < self.tmax {
                    out.push(Plaquette3D::Timelike { bond, t });
                }
                out
            }
            Link::Temporal { site, t } => self
                .plane
                .site_bonds(site)
                .into_iter()
                .map(|bond| Plaquette3D::Timelike { bond, t })
                .collect(),
        }
    }

    /// Links touching vertex `(site, t)`: the four spatial bonds of the star
    /// and the temporal links below and above, when present.
    pub fn vertex_links(&self, site: usize, t: usize) -> Vec<Link> {
        let mut out: Vec<Link> = self
            .plane
            .site_bonds(site)
            .into_iter()
            .map(|bond| Link::Spatial { bond, t })
            .collect();
        if t >= 1 {
            out.push(Link::Temporal { site, t: t - 1 });
        }
        if t + 1 < self.tmax {
            out.push(Link::Temporal { site, t });
        }
        out
    }

    /// Spatial links around the `r1 x r2` rectangle with lower-left corner at
    /// `corner`, on slice `t`.
    pub fn rectangle_links(&self, corner: usize, r1: usize, r2: usize, t: usize) -> Vec<Link> {
        let pl = &self.plane;
        let mut out = Vec::with_capacity(2 * (r1 + r2));
        for i in 0..r1 {
            out.push(pl.bond(pl.shift(corner, i as isize, 0), Dir::Horizontal));
            out.push(pl.bond(pl.shift(corner, i as isize, r2 as isize), Dir::Horizontal));
        }
        for j in 0..r2 {
            out.push(pl.bond(pl.shift(corner, 0, j as isize), Dir::Vertical));
            out.push(pl.bond(pl.shift(corner, r1 as isize, j as isize), Dir::Vertical));
        }
        out.into_iter().map(|bond| Link::Spatial { bond, t }).collect()
    }
}
