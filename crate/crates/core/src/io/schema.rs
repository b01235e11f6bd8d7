use serde::{Deserialize, Serialize};

use crate::at2d::CurvePoint;
use crate::decoder::LerRow;
use crate::fss::{FssRow, Species};
use crate::noise::{at_couplings, ising_coupling, net_rate};
use crate::Result;

/// `p_tilde,p,J,K2,K4`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub p_tilde: f64,
    pub p: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "K4")]
    pub k4: f64,
}

impl CouplingRow {
    /// `J` is the bond-disorder coupling of one block at the net rate `p`.
    pub fn evaluate(p_tilde: f64) -> Result<Self> {
        let c = at_couplings(p_tilde)?;
        let p = net_rate(p_tilde);
        Ok(CouplingRow { p_tilde, p, j: ising_coupling(p)?, k2: c.k2, k4: c.k4 })
    }
}

/// `L,p_tilde,p,M_sigma_mean,M_sigma_err,M_tau_mean,M_tau_err,n_realizations,seed`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub p_tilde: f64,
    pub p: f64,
    #[serde(rename = "M_sigma_mean")]
    pub m_sigma_mean: f64,
    #[serde(rename = "M_sigma_err")]
    pub m_sigma_err: f64,
    #[serde(rename = "M_tau_mean")]
    pub m_tau_mean: f64,
    #[serde(rename = "M_tau_err")]
    pub m_tau_err: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

impl From<&CurvePoint> for MagnetizationRow {
    fn from(c: &CurvePoint) -> Self {
        MagnetizationRow {
            l: c.l,
            p_tilde: c.p_tilde,
            p: c.p,
            m_sigma_mean: c.m_sigma,
            m_sigma_err: c.m_sigma_err,
            m_tau_mean: c.m_tau,
            m_tau_err: c.m_tau_err,
            n_realizations: c.n_realizations,
            seed: c.seed,
        }
    }
}

impl MagnetizationRow {
    pub fn fss_row(&self, species: Species) -> FssRow {
        let (m, m_err) = match species {
            Species::Sigma => (self.m_sigma_mean, self.m_sigma_err),
            Species::Tau => (self.m_tau_mean, self.m_tau_err),
        };
        FssRow { l: self.l, p_tilde: self.p_tilde, m, m_err }
    }
}

/// `L,Tmax,T,p,q,loop_R1,loop_R2,W_mean,W_err`; `T` is empty without a defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilsonRow {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "Tmax")]
    pub tmax: usize,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "loop_R1")]
    pub r1: usize,
    #[serde(rename = "loop_R2")]
    pub r2: usize,
    #[serde(rename = "W_mean")]
    pub w_mean: f64,
    #[serde(rename = "W_err")]
    pub w_err: f64,
}

/// `A,A_err,p_c_estimate`; all empty when the tension is indeterminate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensionRow {
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "A_err")]
    pub a_err: Option<f64>,
    pub p_c_estimate: Option<f64>,
}

/// `d,p_tilde,p,shots,ler_control,ler_control_ci_lo,ler_control_ci_hi,
/// ler_target,ler_target_ci_lo,ler_target_ci_hi,ties,seed`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeRow {
    pub d: usize,
    pub p_tilde: f64,
    pub p: f64,
    pub shots: u64,
    pub ler_control: f64,
    pub ler_control_ci_lo: f64,
    pub ler_control_ci_hi: f64,
    pub ler_target: f64,
    pub ler_target_ci_lo: f64,
    pub ler_target_ci_hi: f64,
    pub ties: u64,
    pub seed: u64,
}

impl DecodeRow {
    pub fn new(r: &LerRow, seed: u64) -> Self {
        DecodeRow {
            d: r.d,
            p_tilde: r.p_tilde,
            p: r.p,
            shots: r.shots,
            ler_control: r.ler_control,
            ler_control_ci_lo: r.ler_control_lo,
            ler_control_ci_hi: r.ler_control_hi,
            ler_target: r.ler_target,
            ler_target_ci_lo: r.ler_target_lo,
            ler_target_ci_hi: r.ler_target_hi,
            ties: r.ties,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::csv_body;

    #[test]
    fn headers_follow_documented_schemas() {
        let c = CouplingRow::evaluate(0.042).unwrap();
        assert!(c.k4 < c.k2 && c.k2 < c.j);
        assert!(csv_body(&[c]).unwrap().starts_with("p_tilde,p,J,K2,K4\n"));

        let w = WilsonRow {
            l: 4,
            tmax: 9,
            t: None,
            p: 0.03,
            q: 0.03,
            r1: 2,
            r2: 2,
            w_mean: 0.5,
            w_err: 0.1,
        };
        let body = csv_body(&[w]).unwrap();
        assert!(body.starts_with("L,Tmax,T,p,q,loop_R1,loop_R2,W_mean,W_err\n"));
        assert!(body.contains("\n4,9,,0.03"));

        let t = TensionRow { a: None, a_err: None, p_c_estimate: None };
        assert_eq!(csv_body(&[t]).unwrap(), "A,A_err,p_c_estimate\n,,\n");
    }

    #[test]
    fn half_rate_row_has_zero_couplings() {
        let c = CouplingRow::evaluate(0.5).unwrap();
        assert_eq!((c.p, c.k2, c.k4), (0.5, 0.0, 0.0));
        assert!(c.j.abs() < 1e-15);
    }
}
