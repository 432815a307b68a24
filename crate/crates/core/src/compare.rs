//! Parameter sweeps that put the percolation and edge-based routes side by
//! side.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::{DegreeDistribution, FamilyKind};
use crate::ebcm::final_size;
use crate::error::Result;
use crate::percolation::{EpidemicParams, PercolationReport};
use crate::pgf::PowerSeries;

pub const FIGURE_MEAN: f64 = 10.0;
pub const FIGURE_DELTA: usize = 200;
pub const FIGURE_GAMMAS: [f64; 3] = [0.5, 1.0, 3.0];

/// `points` evenly spaced values `max·i/points`, `i = 1..=points`.
pub fn beta_grid(points: usize, max: f64) -> Vec<f64> {
    (1..=points).map(|i| max * i as f64 / points as f64).collect()
}

/// Family tuned to mean 10 on `1..=200`.
pub fn figure_distribution(kind: FamilyKind) -> Result<DegreeDistribution> {
    DegreeDistribution::with_mean(kind, FIGURE_MEAN, FIGURE_DELTA, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub beta: f64,
    pub gamma: f64,
    #[serde(rename = "ST")]
    pub s_t: f64,
    #[serde(rename = "Rinf")]
    pub r_inf: f64,
    pub residual: f64,
}

pub const COMPARE_CSV_HEADER: &str = "beta,gamma,ST,Rinf,residual";

/// `S_T` at `T = β/(β+γ)` against `R(∞)` for every `(γ, β)` pair, γ-major.
pub fn compare(
    g_p: &PowerSeries<f64>,
    gammas: &[f64],
    betas: &[f64],
    tol: f64,
) -> Result<Vec<CompareRow>> {
    let grid: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| betas.iter().map(move |&b| (b, g)))
        .collect();
    grid.par_iter()
        .map(|&(beta, gamma)| {
            let params = EpidemicParams::new(beta, gamma)?;
            let rep = PercolationReport::analyze(g_p, params.constant_rates_t(), tol)?;
            let fs = final_size(g_p, &params, tol)?;
            Ok(CompareRow {
                beta,
                gamma,
                s_t: rep.s_t,
                r_inf: fs.r_inf,
                residual: (rep.s_t - fs.r_inf).abs(),
            })
        })
        .collect()
}

pub fn max_residual(rows: &[CompareRow]) -> f64 {
    rows.iter().map(|r| r.residual).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub gamma: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Tc")]
    pub t_c: Option<f64>,
    #[serde(rename = "uT")]
    pub u_t: f64,
    #[serde(rename = "ST")]
    pub s_t: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "Rinf")]
    pub r_inf: f64,
}

pub const SWEEP_CSV_HEADER: &str = "beta,gamma,T,Tc,uT,ST,R0,Rinf";

pub fn sweep(g_p: &PowerSeries<f64>, gamma: f64, betas: &[f64], tol: f64) -> Result<Vec<SweepRow>> {
    betas
        .par_iter()
        .map(|&beta| {
            let params = EpidemicParams::new(beta, gamma)?;
            let t = params.constant_rates_t();
            let rep = PercolationReport::analyze(g_p, t, tol)?;
            let fs = final_size(g_p, &params, tol)?;
            Ok(SweepRow {
                beta,
                gamma,
                t,
                t_c: rep.t_c,
                u_t: rep.u_t,
                s_t: rep.s_t,
                r0: fs.r0,
                r_inf: fs.r_inf,
            })
        })
        .collect()
}
