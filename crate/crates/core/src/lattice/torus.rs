use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Horizontal,
    Vertical,
}

/// Periodic `L x L` square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Torus2D {
    l: usize,
}

impl Torus2D {
    pub fn new(l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::Geometry(format!("torus size must be >= 2, got {l}")));
        }
        Ok(Self { l })
    }

    pub fn size(&self) -> usize {
        self.l
    }

    pub fn n_sites(&self) -> usize {
        self.l * self.l
    }

    pub fn n_bonds(&self) -> usize {
        2 * self.l * self.l
    }

    pub fn n_plaquettes(&self) -> usize {
        self.l * self.l
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        (y % self.l) * self.l + (x % self.l)
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s % self.l, s / self.l)
    }

    /// Site shifted by `(dx, dy)` with periodic wrap.
    pub fn shift(&self, s: usize, dx: isize, dy: isize) -> usize {
        let l = self.l as isize;
        let (x, y) = self.coords(s);
        let nx = (x as isize + dx).rem_euclid(l) as usize;
        let ny = (y as isize + dy).rem_euclid(l) as usize;
        self.site(nx, ny)
    }

    pub fn bond(&self, site: usize, dir: Dir) -> usize {
        match dir {
            Dir::Horizontal => site,
            Dir::Vertical => self.n_sites() + site,
        }
    }

    /// Inverse of [`Torus2D::bond`].
    pub fn bond_site_dir(&self, b: usize) -> Result<(usize, Dir)> {
        self.check_bond(b)?;
        let n = self.n_sites();
        Ok(if b < n { (b, Dir::Horizontal) } else { (b - n, Dir::Vertical) })
    }

    fn check_bond(&self, b: usize) -> Result<()> {
        if b < self.n_bonds() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: b, limit: self.n_bonds() })
        }
    }

    /// The two sites `(l1, l2)` at the ends of bond `b`.
    pub fn bond_endpoints(&self, b: usize) -> Result<(usize, usize)> {
        let (s, dir) = self.bond_site_dir(b)?;
        let other = match dir {
            Dir::Horizontal => self.shift(s, 1, 0),
            Dir::Vertical => self.shift(s, 0, 1),
        };
        Ok((s, other))
    }

    /// Bonds of the star around site `s`: right, left, up, down.
    pub fn site_bonds(&self, s: usize) -> [usize; 4] {
        [
            self.bond(s, Dir::Horizontal),
            self.bond(self.shift(s, -1, 0), Dir::Horizontal),
            self.bond(s, Dir::Vertical),
            self.bond(self.shift(s, 0, -1), Dir::Vertical),
        ]
    }

    /// Bonds of plaquette `p`: bottom, right, top, left.
    pub fn plaquette_bonds(&self, p: usize) -> Result<[usize; 4]> {
        if p >= self.n_plaquettes() {
            return Err(Error::IndexOutOfRange { index: p, limit: self.n_plaquettes() });
        }
        Ok([
            self.bond(p, Dir::Horizontal),
            self.bond(self.shift(p, 1, 0), Dir::Vertical),
            self.bond(self.shift(p, 0, 1), Dir::Horizontal),
            self.bond(p, Dir::Vertical),
        ])
    }

    /// The two plaquettes sharing bond `b`.
    pub fn bond_plaquettes(&self, b: usize) -> Result<[usize; 2]> {
        let (s, dir) = self.bond_site_dir(b)?;
        Ok(match dir {
            Dir::Horizontal => [s, self.shift(s, 0, -1)],
            Dir::Vertical => [s, self.shift(s, -1, 0)],
        })
    }

    /// Plaquette parities (`true` = odd number of flagged bonds).
    pub fn plaquette_syndrome(&self, flagged: &[bool]) -> Vec<bool> {
        (0..self.n_plaquettes())
            .map(|p| {
                let bonds = self.plaquette_bonds(p).expect("plaquette in range");
                bonds.iter().filter(|&&b| flagged[b]).count() % 2 == 1
            })
            .collect()
    }

    /// Straight non-contractible representatives of the three logical classes.
    pub fn logical_representatives(&self) -> CycleBasis {
        let n = self.n_bonds();
        // Domain wall running along x: cuts the vertical bond of every site in row 0.
        let mut horizontal = vec![false; n];
        for x in 0..self.l {
            horizontal[self.bond(self.site(x, 0), Dir::Vertical)] = true;
        }
        // Domain wall running along y: cuts the horizontal bond of every site in column 0.
        let mut vertical = vec![false; n];
        for y in 0..self.l {
            vertical[self.bond(self.site(0, y), Dir::Horizontal)] = true;
        }
        let both = horizontal.iter().zip(&vertical).map(|(a, b)| a ^ b).collect();
        let stars = (0..self.n_sites())
            .map(|s| {
                let mut star = vec![false; n];
                for b in self.site_bonds(s) {
                    star[b] ^= true;
                }
                star
            })
            .collect();
        CycleBasis { trivial: stars, logical: [horizontal, vertical, both] }
    }

    /// Homology class of a syndrome-free bond set, as the parities of its
    /// intersections with the primal loops along y (column 0) and x (row 0).
    /// `(0, 0)` is trivial; the representatives map to `(1,0)`, `(0,1)`, `(1,1)`.
    pub fn homology_class(&self, flagged: &[bool]) -> (bool, bool) {
        let col = (0..self.l)
            .filter(|&y| flagged[self.bond(self.site(0, y), Dir::Vertical)])
            .count();
        let row = (0..self.l)
            .filter(|&x| flagged[self.bond(self.site(x, 0), Dir::Horizontal)])
            .count();
        (col % 2 == 1, row % 2 == 1)
    }
}

/// Trivial-cycle generators (site stars) and the three non-trivial classes.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    pub trivial: Vec<Vec<bool>>,
    pub logical: [Vec<bool>; 3],
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};

    #[test]
    fn endpoints_small() {
        let lat = Torus2D::new(2).unwrap();
        let h00 = lat.bond(lat.site(0, 0), Dir::Horizontal);
        assert_eq!(lat.bond_endpoints(h00).unwrap(), (lat.site(0, 0), lat.site(1, 0)));
        let h10 = lat.bond(lat.site(1, 0), Dir::Horizontal);
        assert_eq!(lat.bond_endpoints(h10).unwrap(), (lat.site(1, 0), lat.site(0, 0)));
        assert!(lat.bond_endpoints(8).is_err());
    }

    #[test]
    fn every_bond_in_two_plaquettes_by_scan() {
        let lat = Torus2D::new(4).unwrap();
        let mut count = vec![0; lat.n_bonds()];
        for p in 0..lat.n_plaquettes() {
            let bonds = lat.plaquette_bonds(p).unwrap();
            assert_eq!(bonds.iter().collect::<HashSet<_>>().len(), 4);
            for b in bonds {
                count[b] += 1;
            }
        }
        assert_eq!(count.len(), 32);
        assert!(count.iter().all(|&c| c == 2));
        for b in 0..lat.n_bonds() {
            for p in lat.bond_plaquettes(b).unwrap() {
                assert!(lat.plaquette_bonds(p).unwrap().contains(&b));
            }
        }
    }

    #[test]
    fn index_maps_are_bijections() {
        for l in 2..=8 {
            let lat = Torus2D::new(l).unwrap();
            for s in 0..lat.n_sites() {
                let (x, y) = lat.coords(s);
                assert_eq!(lat.site(x, y), s);
                assert_eq!(lat.site_bonds(s).iter().collect::<HashSet<_>>().len(), 4);
            }
            for b in 0..lat.n_bonds() {
                let (s, d) = lat.bond_site_dir(b).unwrap();
                assert_eq!(lat.bond(s, d), b);
            }
        }
    }

    #[test]
    fn star_endpoints_consistent() {
        let lat = Torus2D::new(5).unwrap();
        for s in 0..lat.n_sites() {
            for b in lat.site_bonds(s) {
                let (a, c) = lat.bond_endpoints(b).unwrap();
                assert!(a == s || c == s);
            }
        }
    }

    #[test]
    fn representatives_are_closed_and_length_l() {
        let lat = Torus2D::new(3).unwrap();
        let basis = lat.logical_representatives();
        assert_eq!(basis.logical[0].iter().filter(|&&b| b).count(), 3);
        assert_eq!(basis.logical[1].iter().filter(|&&b| b).count(), 3);
        for rep in &basis.logical {
            assert!(lat.plaquette_syndrome(rep).iter().all(|&s| !s));
        }
        for star in &basis.trivial {
            assert!(lat.plaquette_syndrome(star).iter().all(|&s| !s));
            assert_eq!(lat.homology_class(star), (false, false));
        }
    }

    fn to_mask(v: &[bool]) -> u32 {
        v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1u32 << i).fold(0, |a, b| a | b)
    }

    /// Brute-force homology at L = 2: enumerate every bond subset, keep the
    /// syndrome-free ones and split them into cosets of the star group.
    #[test]
    fn exhaustive_homology_at_l2() {
        let lat = Torus2D::new(2).unwrap();
        let nb = lat.n_bonds();
        let plaqs: Vec<u32> = (0..lat.n_plaquettes())
            .map(|p| lat.plaquette_bonds(p).unwrap().iter().fold(0, |m, &b| m ^ (1 << b)))
            .collect();
        let closed: Vec<u32> = (0u32..1 << nb)
            .filter(|m| plaqs.iter().all(|&p| (m & p).count_ones() % 2 == 0))
            .collect();
        let basis = lat.logical_representatives();
        let stars: Vec<u32> = basis.trivial.iter().map(|s| to_mask(s)).collect();
        let mut group = BTreeSet::from([0u32]);
        loop {
            let next: BTreeSet<u32> =
                group.iter().flat_map(|g| stars.iter().map(move |s| g ^ s)).chain(group.iter().copied()).collect();
            if next.len() == group.len() {
                break;
            }
            group = next;
        }
        assert_eq!(group.len(), 1 << (lat.n_sites() - 1));
        assert_eq!(closed.len(), 4 * group.len());
        let coset = |m: u32| group.iter().map(|g| g ^ m).min().unwrap();
        let reps: Vec<u32> = basis.logical.iter().map(|r| to_mask(r)).collect();
        let labels: HashSet<u32> = reps.iter().map(|&r| coset(r)).chain([coset(0)]).collect();
        assert_eq!(labels.len(), 4, "representatives span three distinct non-trivial classes");
        for &r in &reps {
            for &s in &stars {
                assert_eq!(coset(r ^ s), coset(r));
                assert!(plaqs.iter().all(|&p| ((r ^ s) & p).count_ones() % 2 == 0));
            }
        }
        // The intersection-parity classifier agrees with the coset labelling.
        for &m in &closed {
            let flags: Vec<bool> = (0..nb).map(|b| m >> b & 1 == 1).collect();
            let cls = lat.homology_class(&flags);
            let expected = reps
                .iter()
                .position(|&r| coset(r) == coset(m))
                .map(|i| [(true, false), (false, true), (true, true)][i])
                .unwrap_or((false, false));
            assert_eq!(cls, expected);
        }
    }
}
