//! Wilson loops of the gauge model in the deconfined phase, the perimeter
//! fit, and the τ row profile around the gate.

use tcnot_lab::at2d::Schedule;
use tcnot_lab::gauge3d::{defect_local_order, loop_tension, wilson_ensemble, GaugeRunConfig};
use tcnot_lab::noise::{defect_threshold_estimate, MEMORY_THRESHOLD_NOISY};

fn main() -> tcnot_lab::Result<()> {
    let schedule = Schedule::geometric(0.3, 4, 20, 60, 5, 4);
    let mut cfg = GaugeRunConfig::standard(6, 0.02, 0.02, schedule, 3);
    cfg.tmax = 7;
    cfg.defect = Some(3);
    let ens = wilson_ensemble(&cfg, 4)?;
    for w in &ens.loops {
        println!("{}x{} loop: W = {:.4} +- {:.4}", w.r1, w.r2, w.mean, w.err);
    }
    match loop_tension(&ens.loops) {
        Ok(fit) => {
            let est = defect_threshold_estimate(fit.a.max(0.0), MEMORY_THRESHOLD_NOISY)?;
            println!("A = {:.4} +- {:.4} -> local threshold p = {:.4}", fit.a, fit.a_err, est.p);
        }
        Err(e) => println!("{e}"),
    }
    for (t, m, e) in defect_local_order(&ens) {
        println!("row {t}+1/2: {m:.4} +- {e:.4}");
    }
    Ok(())
}
