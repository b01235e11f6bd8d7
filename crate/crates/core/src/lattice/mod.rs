//! Periodic square and cubic lattices.
//!
//! Index conventions are fixed so that disorder files are portable:
//!
//! * site `(x, y)` has index `y * L + x` (row major);
//! * bonds are ordered all horizontal first, then all vertical; the
//!   horizontal bond at site `s` joins `s` to `s + x̂`, the vertical one joins
//!   `s` to `s + ŷ`;
//! * plaquette `(x, y)` is the unit square whose lower-left corner is `(x, y)`.
//!
//! Qubits sit on bonds, Ising spins on sites and `Z` checks on plaquettes. A
//! spin flip at a site toggles the four bonds of its star, which is the
//! trivial cycle that leaves every plaquette parity unchanged.

mod cubic;
mod torus;

pub use cubic::{Cubic3D, Link, Plaquette3D, PlaquetteKind};
pub use torus::{CycleBasis, Dir, Torus2D};
