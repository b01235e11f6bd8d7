//! Disorder-averaged magnetizations of both species across the transitions
//! on a small lattice. Species τ orders less well than σ at every rate.

use tcnot_lab::at2d::{disorder_average, Schedule};
use tcnot_lab::lattice::Torus2D;

fn main() -> tcnot_lab::Result<()> {
    let lattice = Torus2D::new(6)?;
    let schedule = Schedule::geometric(0.2, 5, 40, 200, 5, 16);
    println!("{:>6} {:>16} {:>16}", "p~", "M_sigma", "M_tau");
    for pt in [0.02, 0.04, 0.06, 0.08, 0.12] {
        let c = disorder_average(lattice, pt, &schedule, schedule.realizations, 1)?;
        println!("{pt:6.3} {:8.4}+-{:.4} {:8.4}+-{:.4}", c.m_sigma, c.m_sigma_err, c.m_tau, c.m_tau_err);
    }
    Ok(())
}
