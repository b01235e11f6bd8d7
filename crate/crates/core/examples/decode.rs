//! Correlated MLE decoding on rotated surface codes: a few shots by hand,
//! then exact and sampled logical error rates at distance 3.

use tcnot_lab::decoder::{detectors, exact_ler_d3, ler_estimate, sample_error, MleDecoder, RotatedCode};

fn main() -> tcnot_lab::Result<()> {
    let code = RotatedCode::new(5)?;
    let dec = MleDecoder::new(code.clone(), 0.04)?;
    for seed in 0..5 {
        let shot = sample_error(&code, 0.04, seed)?;
        let out = dec.decode(detectors(&code, &shot))?;
        let (ec, et) = shot.effective();
        let fail_c = code.is_logical(ec ^ out.control);
        let fail_t = code.is_logical(et ^ out.target);
        println!("shot {seed}: errors {:2}/{:2}, failures {fail_c}/{fail_t}", ec.count_ones(), et.count_ones());
    }
    for pt in [0.02, 0.04, 0.06] {
        let exact = exact_ler_d3(pt)?;
        let row = &ler_estimate(3, &[pt], 4000, 11)?[0];
        println!(
            "p~ {pt}: target exact {:.4}, sampled {:.4} [{:.4}, {:.4}]",
            exact.target, row.ler_target, row.ler_target_lo, row.ler_target_hi
        );
    }
    Ok(())
}
