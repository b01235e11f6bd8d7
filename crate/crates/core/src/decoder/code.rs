use crate::{Error, Result};

/// Rotated surface code of odd distance `d`, one block.
///
/// Data qubits sit on a `d x d` grid, qubit `(r, c)` at bit `r * d + c`.
/// Face `(i, j)` has top-left qubit `(i, j)`; bulk faces are Z-type when
/// `i + j` is even. Weight-2 Z checks close the left and right edges, X
/// checks the top and bottom, so X logicals run top to bottom and the
/// logical Z used to read out a residual is row 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotatedCode {
    d: usize,
    z_checks: Vec<u32>,
    x_checks: Vec<u32>,
    logical_x: u32,
    logical_z: u32,
    /// `pure[k]` has syndrome exactly bit `k`.
    pure: Vec<u32>,
}

impl RotatedCode {
    /// Distances 3 and 5 keep every mask in a `u32` and the checks
    /// enumerable.
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 || d % 2 == 0 || d > 5 {
            return Err(Error::Geometry(format!("distance must be 3 or 5, got {d}")));
        }
        let q = |r: usize, c: usize| 1u32 << (r * d + c);
        let mut z_checks = Vec::new();
        let mut x_checks = Vec::new();
        for i in 0..d - 1 {
            for j in 0..d - 1 {
                let m = q(i, j) | q(i, j + 1) | q(i + 1, j) | q(i + 1, j + 1);
                if (i + j) % 2 == 0 {
                    z_checks.push(m);
                } else {
                    x_checks.push(m);
                }
            }
        }
        for i in 0..d - 1 {
            // Face (i, -1) on the left, (i, d - 1) on the right.
            if i % 2 == 1 {
                z_checks.push(q(i, 0) | q(i + 1, 0));
            }
            if (i + d - 1) % 2 == 0 {
                z_checks.push(q(i, d - 1) | q(i + 1, d - 1));
            }
        }
        for j in 0..d - 1 {
            // Face (-1, j) on top, (d - 1, j) at the bottom.
            if j % 2 == 0 {
                x_checks.push(q(0, j) | q(0, j + 1));
            }
            if (d - 1 + j) % 2 == 1 {
                x_checks.push(q(d - 1, j) | q(d - 1, j + 1));
            }
        }
        let logical_x = (0..d).fold(0, |m, r| m | q(r, 0));
        let logical_z = (0..d).fold(0, |m, c| m | q(0, c));
        let mut code = RotatedCode { d, z_checks, x_checks, logical_x, logical_z, pure: Vec::new() };
        code.pure = code.solve_pure_errors()?;
        Ok(code)
    }

    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn n_qubits(&self) -> usize {
        self.d * self.d
    }

    pub fn n_checks(&self) -> usize {
        self.z_checks.len()
    }

    /// Z-check supports as qubit masks.
    pub fn z_checks(&self) -> &[u32] {
        &self.z_checks
    }

    /// X-check supports; as X-error masks they are the trivial cycles.
    pub fn x_checks(&self) -> &[u32] {
        &self.x_checks
    }

    pub fn logical_x(&self) -> u32 {
        self.logical_x
    }

    pub fn logical_z(&self) -> u32 {
        self.logical_z
    }

    /// Z-check syndrome of an X-error mask, bit `k` for check `k`.
    pub fn syndrome(&self, x_error: u32) -> u32 {
        self.z_checks
            .iter()
            .enumerate()
            .fold(0, |s, (k, &m)| s | (((x_error & m).count_ones() & 1) << k))
    }

    /// Whether an undetected X error flips the logical Z readout.
    pub fn is_logical(&self, x_error: u32) -> bool {
        (x_error & self.logical_z).count_ones() % 2 == 1
    }

    /// Some X error with the given syndrome.
    pub fn pure_error(&self, syndrome: u32) -> Result<u32> {
        if syndrome >> self.n_checks() != 0 {
            return Err(Error::Infeasible);
        }
        Ok((0..self.n_checks())
            .filter(|&k| syndrome >> k & 1 == 1)
            .fold(0, |e, k| e ^ self.pure[k]))
    }

    /// Right inverse of the check matrix by elimination over GF(2).
    fn solve_pure_errors(&self) -> Result<Vec<u32>> {
        let mut basis: Vec<(u32, u32)> = Vec::new();
        for qubit in 0..self.n_qubits() {
            let (mut v, mut combo) = (self.syndrome(1 << qubit), 1u32 << qubit);
            for &(bv, bc) in &basis {
                if v & (bv & bv.wrapping_neg()) != 0 {
                    v ^= bv;
                    combo ^= bc;
                }
            }
            if v != 0 {
                basis.push((v, combo));
            }
        }
        if basis.len() != self.n_checks() {
            return Err(Error::Geometry("Z checks are not independent".into()));
        }
        // Back-substitute so every vector keeps only its pivot bit.
        for i in 0..basis.len() {
            let pivot = basis[i].0 & basis[i].0.wrapping_neg();
            for j in 0..basis.len() {
                if j != i && basis[j].0 & pivot != 0 {
                    basis[j].0 ^= basis[i].0;
                    basis[j].1 ^= basis[i].1;
                }
            }
        }
        let mut pure = vec![0; self.n_checks()];
        for (v, combo) in basis {
            pure[v.trailing_zeros() as usize] = combo;
        }
        Ok(pure)
    }

    /// Every element of the X-check group, times logical X when `with_logical`.
    pub fn cycle_span(&self, with_logical: bool) -> Vec<u32> {
        let mut gens = self.x_checks.clone();
        if with_logical {
            gens.push(self.logical_x);
        }
        (0u32..1 << gens.len())
            .map(|m| gens.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).fold(0, |a, (_, &g)| a ^ g))
            .collect()
    }
}
