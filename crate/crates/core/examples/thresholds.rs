//! Closed-form threshold estimates: the target block decoded on its own,
//! and the local threshold at the gate for a given loop tension.

use tcnot_lab::noise::{
    defect_threshold_estimate, independent_target_threshold, MEMORY_THRESHOLD_NOISY,
    REFERENCE_LOOP_TENSION,
};

fn main() -> tcnot_lab::Result<()> {
    let (pt, p) = independent_target_threshold();
    println!("separate decoding: p~ = {pt:.4}, p = {p:.4}");
    for a in [0.0, 0.005, REFERENCE_LOOP_TENSION, 0.02] {
        let est = defect_threshold_estimate(a, MEMORY_THRESHOLD_NOISY)?;
        println!("A = {a:.3}: p_c^t = {:.4}", est.p);
    }
    Ok(())
}
