//! Wage support for the productive optimum: closed-form role wages, the
//! firm unit-cost problem, the primitive wage-ratio bound and a lattice
//! check that no design undercuts the productive one.

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::knowledge::{overlap, simplex_grid};
use crate::politics::group_knowledge;
use crate::production::{
    for_each_grid_design, productive_optimum, OracleGrid, SpecialistDesign,
};

/// Largest admissible cost advantage of a deviating design.
pub const DEVIATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WageSupport {
    pub w_s: f64,
    pub w_m: f64,
    /// `log(B_M / B_S)` at the productive optimum.
    pub delta_q: f64,
    /// `theta D(q) / H(h*)`.
    pub beta: f64,
    pub v_tilde: f64,
    /// `V~ - w_S - theta w_M Gamma(q (1 - q))`.
    pub zero_profit_residual: f64,
    /// `(w_S - w_M) - Delta^q`.
    pub indifference_residual: f64,
}

impl WageSupport {
    pub fn ratio(&self) -> f64 {
        self.w_m / self.w_s
    }
}

/// Role wages supporting the productive optimum.
pub fn support_wages(econ: &Economy) -> Result<WageSupport> {
    let (opt, alloc) = productive_optimum(econ)?;
    let (b_s, b_m) = group_knowledge(&alloc, econ);
    let delta_q = (b_m / b_s).ln();
    let v_tilde = econ.v_tilde();
    if !(delta_q < v_tilde) {
        return Err(Error::Hypothesis(format!(
            "continuation-value gap {delta_q} is not below net productivity {v_tilde}"
        )));
    }
    let beta = econ.theta * opt.d_q / opt.h_hstar;
    let w_m = (v_tilde - delta_q) / (1.0 + beta);
    let w_s = (v_tilde + beta * delta_q) / (1.0 + beta);
    let gamma_q: Vec<f64> = econ.q.iter().map(|v| v * (1.0 - v)).collect();
    let a = econ.tech.gamma_index(&gamma_q);
    Ok(WageSupport {
        w_s,
        w_m,
        delta_q,
        beta,
        v_tilde,
        zero_profit_residual: v_tilde - w_s - econ.theta * w_m * a,
        indifference_residual: (w_s - w_m) - delta_q,
    })
}

/// Unit cost `(E_nu[lambda] + theta r Gamma(z_nu(x))) / C(x, q)`.
pub fn unit_cost(design: &SpecialistDesign, r: f64, econ: &Economy) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "[0, inf)",
        });
    }
    let x = design.mean();
    let cov = overlap(x, &econ.q);
    if cov <= 0.0 {
        return Err(Error::ZeroCoverage);
    }
    let z = design.gap_profile(x);
    let e_lambda = design.mean_inverse_scale(&econ.tech);
    Ok((e_lambda + econ.theta * r * econ.tech.gamma_index(&z)) / cov)
}

/// The primitive bound on interior wage ratios and the uniqueness cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBound {
    pub r_bar: f64,
    /// `p log l_bar - log u_(1)`.
    pub delta_bar: f64,
    pub q_min: f64,
    /// `V~ q_(1) / (2 l_bar Delta_bar)`.
    pub ratio_cutoff: f64,
    /// `theta_bar / r_bar`.
    pub support_cutoff: f64,
    /// `theta < ratio_cutoff`, under which the bound applies.
    pub bound_applies: bool,
    /// `theta < min(support_cutoff, ratio_cutoff)`.
    pub unique: bool,
}

impl RatioBound {
    pub fn uniqueness_cutoff(&self) -> f64 {
        self.support_cutoff.min(self.ratio_cutoff)
    }
}

pub fn ratio_bound(econ: &Economy) -> RatioBound {
    let ell_bar = econ.constants.ell_bar;
    let v_tilde = econ.v_tilde();
    let u_min = econ.civ.u.iter().copied().fold(f64::INFINITY, f64::min);
    let q_min = econ.q.iter().copied().fold(f64::INFINITY, f64::min);
    let delta_bar = econ.civ.p * ell_bar.ln() - u_min.ln();
    let r_bar = 2.0 * (v_tilde + ell_bar * delta_bar) / (v_tilde * q_min);
    let ratio_cutoff = v_tilde * q_min / (2.0 * ell_bar * delta_bar);
    let support_cutoff = econ.theta_bar() / r_bar;
    RatioBound {
        r_bar,
        delta_bar,
        q_min,
        ratio_cutoff,
        support_cutoff,
        bound_applies: econ.theta < ratio_cutoff,
        unique: econ.theta < support_cutoff.min(ratio_cutoff),
    }
}

/// Result of the lattice no-deviation check.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    /// Unit cost of the productive design at the supporting wage ratio.
    pub reference_cost: f64,
    /// Smallest `c(x, nu) - c(q, corners)` over the lattice.
    pub worst_margin: f64,
    pub worst_mix: Vec<f64>,
    pub evaluated: u128,
}

/// Checks that no lattice design has lower unit cost than the productive
/// one at the wage ratio `w_M / w_S`.
pub fn no_deviation_check(
    wages: &WageSupport,
    econ: &Economy,
    grid: &OracleGrid,
) -> Result<DeviationReport> {
    let r = wages.ratio();
    let tech = &econ.tech;
    let reference_cost = unit_cost(&SpecialistDesign::corners(&econ.q), r, econ)?;
    let lambdas: Vec<f64> = simplex_grid(econ.k(), grid.resolution)
        .iter()
        .map(|d| tech.lambda_index(d))
        .collect();
    let mut worst = (f64::INFINITY, Vec::new());
    let mut z = vec![0.0; econ.k()];
    let (_, evaluated) = for_each_grid_design(econ.k(), grid, |gd| {
        let x = gd.mean();
        z.iter_mut().for_each(|v| *v = 0.0);
        let mut e_lambda = 0.0;
        for (i, (d, _)) in gd.atoms.iter().enumerate() {
            let w = gd.weight(i);
            e_lambda += w * lambdas[*d];
            for ((zk, xk), pk) in z.iter_mut().zip(&x).zip(gd.directions[*d].iter()) {
                *zk += w * (xk - pk).max(0.0);
            }
        }
        let cost = (e_lambda + econ.theta * r * tech.gamma_index(&z)) / overlap(&x, &econ.q);
        let margin = cost - reference_cost;
        if margin < worst.0 {
            worst = (margin, x);
        }
    })?;
    if worst.0 < -DEVIATION_TOL {
        return Err(Error::DeviationFound {
            mix: worst.1,
            gain: -worst.0,
        });
    }
    Ok(DeviationReport {
        reference_cost,
        worst_margin: worst.0,
        worst_mix: worst.1,
        evaluated,
    })
}
