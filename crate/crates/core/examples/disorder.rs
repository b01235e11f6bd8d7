//! Samples correlated bond disorder and compares empirical frequencies of
//! the four sign pairs with the joint law.

use tcnot_lab::lattice::Torus2D;
use tcnot_lab::noise::{joint_bond_dist, net_rate, sample_disorder_2d};

fn main() -> tcnot_lab::Result<()> {
    let p_tilde = 0.1;
    let lattice = Torus2D::new(64)?;
    let field = sample_disorder_2d(lattice, p_tilde, 7)?;
    let law = joint_bond_dist(p_tilde)?;
    let n = field.sc.len() as f64;
    for sc in [1i8, -1] {
        for st in [1i8, -1] {
            let hits = field.sc.iter().zip(&field.st).filter(|&(&c, &t)| c == sc && t == st).count();
            println!("s_c={sc:+} s_t={st:+}  empirical {:.4}  law {:.4}", hits as f64 / n, law.prob(sc, st));
        }
    }
    let flips = field.sc.iter().filter(|&&c| c < 0).count() as f64 / n;
    println!("control flip fraction {flips:.4}, net rate {:.4}", net_rate(p_tilde));
    Ok(())
}
