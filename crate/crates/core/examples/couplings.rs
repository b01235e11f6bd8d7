//! Coupling constants of the random Ashkin-Teller model against the
//! single-block Nishimori coupling.

use tcnot_lab::io::CouplingRow;

fn main() -> tcnot_lab::Result<()> {
    println!("{:>7} {:>7} {:>8} {:>8} {:>8}", "p~", "p", "J", "K2", "K4");
    for k in 1..=10 {
        let r = CouplingRow::evaluate(0.05 * k as f64)?;
        println!("{:7.3} {:7.4} {:8.4} {:8.4} {:8.4}", r.p_tilde, r.p, r.j, r.k2, r.k4);
        assert!(r.p_tilde == 0.5 || (r.k4 < r.k2 && r.k2 < r.j));
    }
    Ok(())
}
