use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{detectors, sample_error_with, DetectorSet, RotatedCode};
use crate::error::check_probability;
use crate::noise::{at_couplings, joint_bond_dist, net_rate};
use crate::rng::{self, Domain};
use crate::stats::wilson_interval;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    /// Chosen `E^c` and `E^t` corrections.
    pub control: u32,
    pub target: u32,
    /// Logical parity of each correction.
    pub logical_control: bool,
    pub logical_target: bool,
    /// Another logical class reached the same optimum.
    pub tie: bool,
    /// `-ln` of the configuration weight, up to a constant.
    pub cost: f64,
}

/// Most-likely-error decoder for one code pair at a fixed p̃.
///
/// Up to a constant, `-ln Π p(s^c, s^t)` equals
/// `K2 |c| + K4 |t| + K4 |c ^ t|` for flip masks `c`, `t`.
#[derive(Debug, Clone)]
pub struct MleDecoder {
    code: RotatedCode,
    p_tilde: f64,
    w_c: f64,
    w_t: f64,
    span: Vec<u32>,
}

impl MleDecoder {
    pub fn new(code: RotatedCode, p_tilde: f64) -> Result<Self> {
        check_probability("p_tilde", p_tilde, 0.0, 0.5)?;
        let (w_c, w_t) = if p_tilde == 0.0 {
            // Infinite couplings: any finite equal weights give the same arg-min.
            (1.0, 1.0)
        } else {
            let k = at_couplings(p_tilde)?;
            (k.k2, k.k4)
        };
        let span = code.cycle_span(true);
        Ok(MleDecoder { code, p_tilde, w_c, w_t, span })
    }

    pub fn code(&self) -> &RotatedCode {
        &self.code
    }

    pub fn p_tilde(&self) -> f64 {
        self.p_tilde
    }

    pub fn cost(&self, c: u32, t: u32) -> f64 {
        self.w_c * c.count_ones() as f64 + self.w_t * (t.count_ones() + (c ^ t).count_ones()) as f64
    }

    /// Coset `reference ^ span`, ordered by Hamming weight.
    fn coset_by_weight(&self, reference: u32) -> Vec<u32> {
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); self.code.n_qubits() + 1];
        for &g in &self.span {
            let m = reference ^ g;
            buckets[m.count_ones() as usize].push(m);
        }
        buckets.concat()
    }

    pub fn decode(&self, det: DetectorSet) -> Result<DecodeOutcome> {
        let rc = self.code.pure_error(det.control)?;
        let rt = self.code.pure_error(det.target)?;
        if self.w_c == 0.0 && self.w_t == 0.0 {
            // p̃ = 1/2: every configuration is equally likely.
            return Ok(self.outcome(rc, rt, true, 0.0));
        }
        let cs = self.coset_by_weight(rc);
        let ts = self.coset_by_weight(rt);
        let eps = 1e-9 * self.w_c.max(self.w_t);
        let lz = self.code.logical_z();

        let mut global = f64::INFINITY;
        let mut best = [(f64::INFINITY, 0u32, 0u32); 4];
        for &c in &cs {
            let nc = c.count_ones() as f64;
            if (self.w_c + self.w_t) * nc > global + eps {
                break;
            }
            let lc = ((c & lz).count_ones() & 1) as usize;
            for &t in &ts {
                let nt = t.count_ones() as f64;
                if self.w_c * nc + self.w_t * (2.0 * nt - nc) > global + eps {
                    break;
                }
                let cost = self.cost(c, t);
                let class = 2 * lc + ((t & lz).count_ones() & 1) as usize;
                if cost < best[class].0 {
                    best[class] = (cost, c, t);
                }
                global = global.min(cost);
            }
        }
        let tied: Vec<usize> = (0..4).filter(|&k| best[k].0 <= global + eps).collect();
        let (cost, c, t) = best[tied[0]];
        Ok(self.outcome(c, t, tied.len() > 1, cost))
    }

    fn outcome(&self, c: u32, t: u32, tie: bool, cost: f64) -> DecodeOutcome {
        DecodeOutcome {
            control: c,
            target: t,
            logical_control: self.code.is_logical(c),
            logical_target: self.code.is_logical(t),
            tie,
            cost,
        }
    }
}

/// Exact d = 3 logical error rates by summing over all `4^9` joint flip
/// configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactLer {
    pub control: f64,
    pub target: f64,
    /// Total probability visited, 1 up to rounding.
    pub total: f64,
}

pub fn exact_ler_d3(p_tilde: f64) -> Result<ExactLer> {
    let code = RotatedCode::new(3)?;
    let dist = joint_bond_dist(p_tilde)?;
    let dec = MleDecoder::new(code.clone(), p_tilde)?;
    let n_syn = 1usize << code.n_checks();
    let mut table = Vec::with_capacity(n_syn * n_syn);
    for sc in 0..n_syn as u32 {
        for st in 0..n_syn as u32 {
            table.push(dec.decode(DetectorSet { control: sc, target: st })?);
        }
    }
    let n = code.n_qubits();
    let (mut control, mut target, mut total) = (Compensated::default(), Compensated::default(), Compensated::default());
    for c in 0u32..1 << n {
        for t in 0u32..1 << n {
            let mut prob = 1.0;
            for q in 0..n {
                prob *= dist.table[(c >> q & 1) as usize][(t >> q & 1) as usize];
            }
            if prob == 0.0 {
                continue;
            }
            let out = table[code.syndrome(c) as usize * n_syn + code.syndrome(t) as usize];
            total.add(prob);
            if code.is_logical(c ^ out.control) {
                control.add(prob);
            }
            if code.is_logical(t ^ out.target) {
                target.add(prob);
            }
        }
    }
    Ok(ExactLer { control: control.value(), target: target.value(), total: total.value() })
}

/// Neumaier summation.
#[derive(Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// One Monte-Carlo logical-error-rate point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LerRow {
    pub d: usize,
    pub p_tilde: f64,
    pub p: f64,
    pub shots: u64,
    pub fails_control: u64,
    pub fails_target: u64,
    pub ties: u64,
    pub ler_control: f64,
    pub ler_control_lo: f64,
    pub ler_control_hi: f64,
    pub ler_target: f64,
    pub ler_target_lo: f64,
    pub ler_target_hi: f64,
}

const CHUNK: u64 = 2000;

/// Samples `shots` circuits per rate and decodes them. Work is split into
/// fixed chunks with their own streams, so results do not depend on the
/// thread count. Intervals are 95% Wilson intervals.
pub fn ler_estimate(d: usize, p_grid: &[f64], shots: u64, seed: u64) -> Result<Vec<LerRow>> {
    if shots < 1000 {
        return Err(Error::Config(format!("need at least 1000 shots, got {shots}")));
    }
    let code = RotatedCode::new(d)?;
    p_grid
        .iter()
        .map(|&pt| {
            let dec = MleDecoder::new(code.clone(), pt)?;
            let n_chunks = shots.div_ceil(CHUNK);
            let counts: Vec<[u64; 3]> = (0..n_chunks)
                .into_par_iter()
                .map(|chunk| {
                    let mut rng = rng::stream(seed, Domain::CircuitShots, &[d as u64, pt.to_bits(), chunk]);
                    let mut cache: HashMap<DetectorSet, DecodeOutcome> = HashMap::new();
                    let mut acc = [0u64; 3];
                    let n = CHUNK.min(shots - chunk * CHUNK);
                    for _ in 0..n {
                        let sample = sample_error_with(&code, pt, &mut rng)?;
                        let det = detectors(&code, &sample);
                        let out = match cache.get(&det) {
                            Some(o) => *o,
                            None => {
                                let o = dec.decode(det)?;
                                if code.syndrome(o.control) != det.control || code.syndrome(o.target) != det.target {
                                    return Err(Error::Infeasible);
                                }
                                cache.insert(det, o);
                                o
                            }
                        };
                        let (ec, et) = sample.effective();
                        acc[0] += u64::from(code.is_logical(ec ^ out.control));
                        acc[1] += u64::from(code.is_logical(et ^ out.target));
                        acc[2] += u64::from(out.tie);
                    }
                    Ok(acc)
                })
                .collect::<Result<_>>()?;
            let [fc, ft, ties] = counts.iter().fold([0; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
            let (c_lo, c_hi) = wilson_interval(fc, shots, 1.96);
            let (t_lo, t_hi) = wilson_interval(ft, shots, 1.96);
            Ok(LerRow {
                d,
                p_tilde: pt,
                p: net_rate(pt),
                shots,
                fails_control: fc,
                fails_target: ft,
                ties,
                ler_control: fc as f64 / shots as f64,
                ler_control_lo: c_lo,
                ler_control_hi: c_hi,
                ler_target: ft as f64 / shots as f64,
                ler_target_lo: t_lo,
                ler_target_hi: t_hi,
            })
        })
        .collect()
}
