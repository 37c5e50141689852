//! The oracle suite behind `civic verify`.
//!
//! Every check recomputes a model object by an independent route (random
//! sampling, exhaustive lattice search, best-response iteration, finite
//! differences) and compares it with the closed form. The rendered report
//! depends only on the scenario and the seed.

use std::fmt::Write as _;

use rand::Rng;

use crate::competitive::{no_deviation_check, ratio_bound, support_wages};
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::knowledge::{check_diffuse, coverage, fragmentation, l1_distance, KnowledgeBundle, SimplexVector};
use crate::numerics::{central_difference, forward_difference};
use crate::politics::{group_knowledge, kkt_residuals, Platform, ServiceGame};
use crate::production::{
    brute_force_design, design_output, grid_tolerance, integrator_capacity, nearest_grid_point,
    output_of, productive_optimum, coordination_slack, OracleGrid, SpecialistDesign,
};
use crate::reforms::{
    bisect_broadening_flip, interface_threshold, monotonicity_margins, theta_statics,
    BroadeningFamily, InterfaceFamily,
};
use crate::sampling::{equal_mass_pair, random_economy, random_interior, random_simplex, seeded};
use crate::scenario::Scenario;
use crate::welfare::{total_welfare, DECOMPOSITION_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub anchor: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    pub grid: OracleGrid,
    /// Divides every tolerance by ten.
    pub strict: bool,
}

impl VerifyOptions {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            seed: s.oracle.seed,
            samples: s.oracle.samples,
            grid: s.oracle.grid,
            strict: false,
        }
    }

    fn tol(&self, base: f64) -> f64 {
        if self.strict {
            base * 0.1
        } else {
            base
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn all_pass(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn render(&self) -> String {
        let o = &self.options;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "oracle suite: seed {}, {} samples, lattice 1/{} with up to {} atoms{}",
            o.seed,
            o.samples,
            o.grid.resolution,
            o.grid.max_atoms,
            if o.strict { ", strict tolerances" } else { "" }
        );
        let width = self.checks.iter().map(|c| c.anchor.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<8} {:<width$}  {}",
                c.status.label(),
                c.anchor,
                c.detail,
                width = width
            );
        }
        let _ = writeln!(
            s,
            "summary: {} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        );
        s
    }
}

enum Outcome {
    Checked(bool, String),
    Skip(String),
}

fn checked(ok: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome::Checked(ok, detail))
}

fn e3(x: f64) -> String {
    format!("{x:.3e}")
}

struct Suite {
    checks: Vec<CheckResult>,
}

impl Suite {
    fn run(&mut self, anchor: &'static str, f: impl FnOnce() -> Result<Outcome>) {
        let (status, detail) = match f() {
            Ok(Outcome::Checked(true, d)) => (Status::Pass, d),
            Ok(Outcome::Checked(false, d)) => (Status::Fail, d),
            Ok(Outcome::Skip(d)) => (Status::Skipped, d),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        self.checks.push(CheckResult {
            anchor,
            status,
            detail,
        });
    }
}

/// Runs every oracle against `econ`, using `theta_fractions` for the
/// comparative-statics grid and `alphas` for the interface family.
pub fn run(econ: &Economy, alphas: &[f64], theta_fractions: &[f64], opts: &VerifyOptions) -> VerifyReport {
    let mut rng = seeded(opts.seed);
    let n = opts.samples;
    let k = econ.k();
    let tech = &econ.tech;
    let mut suite = Suite { checks: Vec::new() };

    suite.run("coverage-distance identity", || {
        let tol = opts.tol(1e-12);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let (a, b) = equal_mass_pair(&mut rng, k);
            let mass: f64 = a.iter().sum();
            let l1: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
            worst = worst.max((coverage(&a, &b)? - (mass - 0.5 * l1)).abs());
        }
        checked(worst <= tol, format!("max error {} over {n} pairs (tol {})", e3(worst), e3(tol)))
    });

    suite.run("feasible-scale frontier bounds", || {
        let tol = opts.tol(1e-10);
        let lo = 1.0 / econ.constants.ell_bar;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let h = tech.max_scale(&random_simplex(&mut rng, k));
            worst = worst.max(lo - h).max(h - 1.0);
        }
        let corner = (0..k)
            .map(|i| (tech.max_scale(&SimplexVector::corner(i, k)) - 1.0).abs())
            .fold(0.0, f64::max);
        checked(
            worst <= tol && corner <= tol,
            format!("worst excursion {} over {n} draws, corner error {}", e3(worst.max(0.0)), e3(corner)),
        )
    });

    suite.run("frontier Lipschitz bound", || {
        let l = econ.constants.frontier_lipschitz();
        let mut worst = f64::INFINITY;
        for _ in 0..n {
            let a = random_simplex(&mut rng, k);
            let b = random_simplex(&mut rng, k);
            let d: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum();
            let gap = l * d - (tech.max_scale(&a) - tech.max_scale(&b)).abs();
            worst = worst.min(gap);
        }
        checked(worst >= -opts.tol(1e-12), format!("min slack {} over {n} pairs (L = {})", e3(worst), e3(l)))
    });

    suite.run("integrator capacity bound", || {
        let mut excess = f64::NEG_INFINITY;
        let mut at_frontier = 0.0f64;
        for _ in 0..n {
            let h = random_interior(&mut rng, k, 0.01);
            let hh = tech.max_scale(&h);
            let dir = random_simplex(&mut rng, k);
            let s = KnowledgeBundle::along(&dir, rng.gen_range(0.0..1.0) * tech.max_scale(&dir));
            excess = excess.max(integrator_capacity(&s, &h)? - hh);
            let best = integrator_capacity(&KnowledgeBundle::along(&h, hh), &h)?;
            at_frontier = at_frontier.max((best - hh).abs());
        }
        checked(
            excess <= opts.tol(1e-10) && at_frontier <= opts.tol(1e-8),
            format!("max J - H(h) = {}, frontier error {}", e3(excess), e3(at_frontier)),
        )
    });

    let optimum = productive_optimum(econ);

    suite.run("productive optimum closed forms", || {
        let (opt, alloc) = optimum.clone()?;
        let tol = opts.tol(1e-10);
        let general = design_output(&SpecialistDesign::corners(&econ.q), econ);
        let y_err = (output_of(&alloc, econ)? - opt.y_star).abs().max((general - opt.y_star).abs());
        let slack = coordination_slack(&alloc, econ)?.abs();
        let d = fragmentation(&econ.q);
        let h_err = opt
            .h_star
            .iter()
            .zip(econ.q.iter())
            .map(|(h, q)| (h - q * (1.0 - q) / d).abs())
            .fold(0.0, f64::max);
        checked(
            y_err <= tol * opt.y_star.max(1.0) && slack <= tol && h_err <= tol && opt.m_star < 1.0 / 3.0,
            format!(
                "output error {}, slack {}, profile error {}, m* = {:.6}",
                e3(y_err),
                e3(slack),
                e3(h_err),
                opt.m_star
            ),
        )
    });

    suite.run("design lattice oracle (bang-bang and alignment)", || {
        let required = opts.grid.design_count(k);
        if required > opts.grid.budget {
            return Ok(Outcome::Skip(format!(
                "lattice has {required} designs, over the budget of {}",
                opts.grid.budget
            )));
        }
        let (opt, _) = optimum.clone()?;
        let best = brute_force_design(econ, &opts.grid)?;
        let tol = grid_tolerance(econ, opts.grid.resolution);
        let target = nearest_grid_point(&econ.q, opts.grid.resolution);
        let aligned = l1_distance(&best.x, &target) < 1e-12;
        let within = best.y <= opt.y_star + 1e-10 && opt.y_star - best.y <= tol;
        checked(
            within && aligned && best.design.is_corner_design(),
            format!(
                "{} designs, Y* - best = {} (tol {}), best mix {:?}, nearest lattice point {:?}",
                best.evaluated,
                e3(opt.y_star - best.y),
                e3(tol),
                best.x.as_slice(),
                target.as_slice()
            ),
        )
    });

    suite.run("integrator civic advantage", || {
        let diffuse = match check_diffuse(&econ.civ, tech) {
            Ok(d) => d,
            Err(Error::TwoDomains) => return Ok(Outcome::Skip("hypothesis not met: K = 2".into())),
            Err(e) => return Err(e),
        };
        if !diffuse.holds {
            return Ok(Outcome::Skip(format!(
                "hypothesis not met: p = {} is not below the diffuseness bound {}",
                econ.civ.p,
                e3(diffuse.p_bound)
            )));
        }
        let mut worst = f64::INFINITY;
        for i in 0..=n {
            let q = if i == 0 { econ.q.clone() } else { random_interior(&mut rng, k, 0.01) };
            let e = Economy { q, ..econ.clone() };
            let (_, alloc) = productive_optimum(&e)?;
            let (b_s, b_m) = group_knowledge(&alloc, &e);
            worst = worst.min(b_m - b_s);
        }
        checked(worst > 0.0, format!("min B_M - B_S = {} over {} production profiles", e3(worst), n + 1))
    });

    let welfare = optimum.clone().and_then(|(_, a)| total_welfare(econ, &a));

    suite.run("political equilibrium by best response", || {
        let w = welfare.clone()?;
        let out = w.outcome;
        let game = ServiceGame::from_outcome(&econ.gov, econ.gov.lambda0, &out)?;
        let tol = opts.tol(1e-6);
        let starts = n.clamp(1, 10);
        let mut worst = 0.0f64;
        let mut iters = 0;
        for _ in 0..starts {
            let start = Platform {
                e: out.e_pol * rng.gen_range(0.2..2.0),
                z: rng.gen_range(0.05..0.95),
            };
            let (p, it) = game.iterate(start, 1.0, 1e-12, 500)?;
            iters = iters.max(it);
            worst = worst.max((p.e - out.e_pol).abs()).max((p.z - out.z_pol).abs());
        }
        checked(
            worst <= tol,
            format!("max distance {} to the closed form from {starts} starts (at most {iters} rounds)", e3(worst)),
        )
    });

    suite.run("equilibrium first-order conditions", || {
        let w = welfare.clone()?;
        let r = kkt_residuals(&econ.gov, econ.gov.lambda0, &w.outcome);
        let worst = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        checked(worst <= opts.tol(1e-9), format!("max residual {}", e3(worst)))
    });

    suite.run("targeting follows knowledge", || {
        let mut agree = 0;
        for _ in 0..n {
            let e = random_economy(&mut rng, k);
            let (_, alloc) = productive_optimum(&e)?;
            let w = total_welfare(&e, &alloc)?;
            let o = w.outcome;
            if (o.z_pol > o.m) == (o.b_m > o.b_s) {
                agree += 1;
            }
        }
        checked(agree == n, format!("{agree} of {n} random economies"))
    });

    suite.run("welfare representation", || {
        let tol = opts.tol(1e-10);
        let mut worst = 0.0f64;
        let mut min_disp = f64::INFINITY;
        for i in 0..=n {
            let e = if i == 0 { econ.clone() } else { random_economy(&mut rng, k) };
            let (_, alloc) = productive_optimum(&e)?;
            let w = total_welfare(&e, &alloc)?;
            worst = worst.max((w.service_welfare - (w.outcome.r.ln() - w.dispersion)).abs());
            min_disp = min_disp.min(w.dispersion);
        }
        checked(
            worst <= tol && min_disp >= 0.0,
            format!("max error {} over {} economies, min penalty {}", e3(worst), n + 1, e3(min_disp)),
        )
    });

    let broadening = BroadeningFamily::new(econ);

    suite.run("broadening welfare decomposition", || {
        let fam = broadening.clone()?;
        let tol = opts.tol(DECOMPOSITION_TOL);
        let mut worst = 0.0f64;
        for b in [0.0, 0.25, 0.5] {
            let d = crate::welfare::decompose_along(
                &econ.gov,
                econ.gov.lambda0,
                econ.gov.tau,
                |t| fam.welfare(t),
                b,
                crate::welfare::FAMILY_STEP,
                (0.0, 1.0),
            )?;
            worst = worst.max(d.residual);
        }
        checked(worst <= tol, format!("max residual {} at b = 0, 0.25, 0.5 (tol {})", e3(worst), e3(tol)))
    });

    suite.run("interface welfare decomposition", || {
        let fam = InterfaceFamily::new(econ)?;
        let tol = opts.tol(DECOMPOSITION_TOL);
        let mut worst = 0.0f64;
        for &a in alphas {
            worst = worst.max(fam.decompose(a)?.residual);
        }
        checked(worst <= tol, format!("max residual {} over {} values of alpha (tol {})", e3(worst), alphas.len(), e3(tol)))
    });

    suite.run("broadening slope at zero", || {
        let fam = broadening.clone()?;
        let fd = forward_difference(|b| fam.b_soc(b), 0.0, 1e-7);
        let err = (fd - fam.derivative_at_zero()).abs();
        checked(
            err <= opts.tol(1e-6),
            format!("closed form {}, difference {}", e3(fam.derivative_at_zero()), e3(err)),
        )
    });

    suite.run("broadening sign flip", || {
        let fam = broadening.clone()?;
        let cutoff = fam.cutoff();
        let tb = econ.theta_bar();
        match cutoff.threshold() {
            Some(c) if c > 0.0 && c < tb => {
                let found = bisect_broadening_flip(econ, 1e-9 * tb, tb * (1.0 - 1e-9))?;
                let err = (found - c).abs();
                checked(
                    err <= opts.tol(1e-6),
                    format!("formula {}, bisection {}, gap {}", e3(c), e3(found), e3(err)),
                )
            }
            _ => {
                let fd = forward_difference(|b| fam.b_soc(b), 0.0, 1e-7);
                checked(
                    (fd > 0.0) == cutoff.is_positive_at(econ.theta),
                    format!("no cutoff inside (0, theta_bar) ({cutoff:?}); slope {} at the scenario theta", e3(fd)),
                )
            }
        }
    });

    suite.run("interface slopes", || {
        let fam = InterfaceFamily::new(econ)?;
        let tol = opts.tol(1e-8);
        let mut worst = 0.0f64;
        for &a in alphas.iter().filter(|a| **a > 1e-4 && **a < 1.0 - 1e-4) {
            let bs = central_difference(|t| fam.group_knowledge(t).map_or(f64::NAN, |g| g.0), a, 1e-4);
            let bm = central_difference(|t| fam.group_knowledge(t).map_or(f64::NAN, |g| g.1), a, 1e-4);
            worst = worst.max((bs - fam.b_s_slope()).abs()).max((bm - fam.b_m_slope()).abs());
        }
        checked(
            fam.b_s_slope() <= 0.0 && fam.b_m_slope() >= 0.0 && worst <= tol,
            format!(
                "B_S' = {}, B_M' = {}, max difference {}",
                e3(fam.b_s_slope()),
                e3(fam.b_m_slope()),
                e3(worst)
            ),
        )
    });

    suite.run("interface harm threshold", || {
        let spread = econ.q.iter().fold(0.0f64, |a, v| a.max((v - 1.0 / k as f64).abs()));
        if spread < 1e-12 {
            return Ok(Outcome::Skip("uniform production profile".into()));
        }
        match interface_threshold(econ, alphas, 1e-3)? {
            Some(t) => checked(t > 0.0, format!("harm holds for theta up to {}", e3(t))),
            None => checked(false, "no theta with uniform harm found".into()),
        }
    });

    let thetas: Vec<f64> = theta_fractions.iter().map(|f| f * econ.theta_bar()).collect();
    let rows = theta_statics(econ, &thetas);

    suite.run("theta statics monotone", || {
        let rows = rows.clone()?;
        let (dm, dy, db) = monotonicity_margins(&rows);
        let margin = 1e-12;
        checked(
            dm > margin && dy > margin && db > margin,
            format!("min steps: m {}, -Y {}, B_soc {} over {} points", e3(dm), e3(dy), e3(db), rows.len()),
        )
    });

    suite.run("theta statics closed-form slope", || {
        let rows = rows.clone()?;
        let worst = rows.iter().map(|r| (r.dm_closed - r.dm_fd).abs()).fold(0.0, f64::max);
        checked(worst <= opts.tol(1e-8), format!("max |dm closed - dm fd| = {}", e3(worst)))
    });

    let wages = support_wages(econ);

    suite.run("competitive wage identities", || {
        let w = match &wages {
            Ok(w) => *w,
            Err(Error::Hypothesis(m)) => return Ok(Outcome::Skip(format!("hypothesis not met: {m}"))),
            Err(e) => return Err(e.clone()),
        };
        let worst = w.zero_profit_residual.abs().max(w.indifference_residual.abs());
        checked(
            worst <= opts.tol(1e-10) && w.w_m > 0.0,
            format!("w_S = {}, w_M = {}, max residual {}", e3(w.w_s), e3(w.w_m), e3(worst)),
        )
    });

    suite.run("wage ratio bound", || {
        let Ok(w) = &wages else {
            return Ok(Outcome::Skip("no supporting wages".into()));
        };
        let rb = ratio_bound(econ);
        if !rb.bound_applies {
            return Ok(Outcome::Skip(format!(
                "hypothesis not met: theta above {}",
                e3(rb.ratio_cutoff)
            )));
        }
        checked(w.ratio() <= rb.r_bar, format!("w_M/w_S = {}, bound {}", e3(w.ratio()), e3(rb.r_bar)))
    });

    suite.run("no profitable deviation", || {
        let rb = ratio_bound(econ);
        let (e, note) = if rb.unique {
            (econ.clone(), String::new())
        } else {
            let t = 0.5 * rb.uniqueness_cutoff();
            (econ.with_theta(t), format!(" at theta = {} inside the uniqueness cutoffs", e3(t)))
        };
        let required = opts.grid.design_count(k);
        if required > opts.grid.budget {
            return Ok(Outcome::Skip(format!("lattice has {required} designs, over budget")));
        }
        let w = support_wages(&e)?;
        match no_deviation_check(&w, &e, &opts.grid) {
            Ok(r) => checked(
                true,
                format!("worst margin {} over {} designs{note}", e3(r.worst_margin), r.evaluated),
            ),
            Err(Error::DeviationFound { mix, gain }) => {
                checked(false, format!("mix {mix:?} undercuts by {}{note}", e3(gain)))
            }
            Err(err) => Err(err),
        }
    });

    VerifyReport {
        options: opts.clone(),
        checks: suite.checks,
    }
}

/// Runs the suite with the grids and budgets stored in a scenario.
pub fn run_scenario(scenario: &Scenario, strict: bool, seed: Option<u64>) -> VerifyReport {
    let mut opts = VerifyOptions::from_scenario(scenario);
    opts.strict = strict;
    if let Some(s) = seed {
        opts.seed = s;
    }
    run(&scenario.econ, &scenario.sweep.alpha, &scenario.sweep.theta_fraction, &opts)
}
