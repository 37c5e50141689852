//! Acceptance suite: fourteen property and oracle checks, one PASS/FAIL line
//! each. Reference values are recomputed here from first principles rather
//! than read back from the library.

use std::time::Instant;

use civic_core::competitive::{no_deviation_check, ratio_bound, support_wages};
use civic_core::economy::Economy;
use civic_core::knowledge::check_diffuse;
use civic_core::politics::{
    equilibrium_from_parts, group_knowledge, kkt_residuals, Platform, ServiceGame,
};
use civic_core::production::{
    brute_force_design, coordination_slack, grid_tolerance, integrator_capacity, output_of,
    productive_optimum, OracleGrid,
};
use civic_core::reforms::{
    bisect_broadening_flip, interface_threshold, BroadeningCutoff, BroadeningFamily,
    InterfaceFamily,
};
use civic_core::scenario::Scenario;
use civic_core::politics::GovernanceTech;
use civic_core::verify;
use civic_core::welfare::{dispersion, service_welfare, WelfareReport};
use civic_core::{coverage, CivicParams, KnowledgeBundle, LearningFamily, LearningTech, SimplexVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------------------
// Independent reference computations.

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Flat Dirichlet draw by normalized exponentials.
fn simplex(r: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| -(1.0 - r.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn interior(r: &mut ChaCha8Rng, k: usize, floor: f64) -> Vec<f64> {
    let keep = 1.0 - k as f64 * floor;
    simplex(r, k).into_iter().map(|x| keep * x + floor).collect()
}

fn sv(v: &[f64]) -> SimplexVector {
    SimplexVector::new(v.to_vec()).unwrap()
}

fn cost(tech: &LearningTech, s: f64) -> f64 {
    match tech.family() {
        LearningFamily::Rational { c } => (1.0 + c) * s / (1.0 + c * s),
        LearningFamily::Exponential { lambda } => (1.0 - (-lambda * s).exp()) / (1.0 - (-lambda).exp()),
    }
}

fn slope_at(tech: &LearningTech, s: f64) -> f64 {
    match tech.family() {
        LearningFamily::Rational { c } => (1.0 + c) / ((1.0 + c * s) * (1.0 + c * s)),
        LearningFamily::Exponential { lambda } => lambda * (-lambda * s).exp() / (1.0 - (-lambda).exp()),
    }
}

/// Frontier scale by plain bisection of `sum_k l(H pi_k) = 1` on `[0, 1]`.
fn frontier(tech: &LearningTech, pi: &[f64]) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let total: f64 = pi.iter().map(|p| cost(tech, mid * p)).sum();
        if total > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn overlap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn frag(q: &[f64]) -> f64 {
    1.0 - q.iter().map(|x| x * x).sum::<f64>()
}

fn gap_profile(q: &[f64]) -> Vec<f64> {
    let d = frag(q);
    q.iter().map(|x| x * (1.0 - x) / d).collect()
}

fn gov() -> GovernanceTech {
    GovernanceTech::new(0.5, 0.125, 0.2, 1.0).unwrap()
}

fn economy(tech: LearningTech, q: &[f64], u: &[f64], p: f64, theta_frac: f64) -> Economy {
    let civ = CivicParams::new(sv(u), p).unwrap();
    let e = Economy::new(tech, sv(q), civ, 0.0, 10.0, gov()).unwrap();
    let t = theta_frac * e.theta_bar();
    e.with_theta(t)
}

fn random_tech(r: &mut ChaCha8Rng) -> LearningTech {
    let param = r.gen_range(0.25..4.0);
    if r.gen_bool(0.5) {
        LearningTech::rational(param).unwrap()
    } else {
        LearningTech::exponential(param).unwrap()
    }
}

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Second-order one-sided difference that stays inside `[lo, hi]`.
fn inside_difference(f: impl Fn(f64) -> f64, x: f64, h: f64, lo: f64, hi: f64) -> f64 {
    if x - h < lo {
        (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
    } else if x + h > hi {
        (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
    } else {
        central(f, x, h)
    }
}

// ---------------------------------------------------------------------------
// Criteria.

fn coverage_identity() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let k = 2 + i % 6;
        let mass = r.gen_range(0.1..5.0);
        let a: Vec<f64> = simplex(&mut r, k).into_iter().map(|x| mass * x).collect();
        let b: Vec<f64> = simplex(&mut r, k).into_iter().map(|x| mass * x).collect();
        let err = (coverage(&a, &b).unwrap() - (mass - 0.5 * l1(&a, &b))).abs();
        worst = worst.max(err);
    }
    ensure!(worst <= 1e-12, "max error {worst:e}");
    Ok(format!("max error {worst:.2e} over 1000 equal-mass pairs"))
}

fn frontier_bounds() -> Outcome {
    let mut r = rng(2);
    let techs = [
        LearningTech::rational(1.0).unwrap(),
        LearningTech::rational(6.0).unwrap(),
        LearningTech::exponential(0.5).unwrap(),
        LearningTech::exponential(3.0).unwrap(),
    ];
    let mut worst_bound = f64::NEG_INFINITY;
    let mut worst_oracle = 0.0f64;
    for i in 0..10_000 {
        let tech = &techs[i % techs.len()];
        let k = 2 + i % 5;
        let pi = simplex(&mut r, k);
        let h = tech.max_scale(&pi);
        let floor = 1.0 / slope_at(tech, 0.0);
        worst_bound = worst_bound.max(floor - h).max(h - 1.0);
        worst_oracle = worst_oracle.max((h - frontier(tech, &pi)).abs());
    }
    ensure!(worst_bound <= 0.0, "bounds violated by {worst_bound:e}");
    ensure!(worst_oracle <= 1e-12, "frontier differs from reference by {worst_oracle:e}");
    let mut corner_err = 0.0f64;
    for tech in &techs {
        for k in 2..6 {
            for i in 0..k {
                let h = tech.max_scale(&SimplexVector::corner(i, k));
                corner_err = corner_err.max((h - 1.0).abs());
            }
        }
    }
    ensure!(corner_err <= 1e-10, "corner error {corner_err:e}");
    let mut min_slack = f64::INFINITY;
    for i in 0..1000 {
        let tech = &techs[i % techs.len()];
        let lip = slope_at(tech, 0.0) / slope_at(tech, 1.0);
        let k = 3 + i % 3;
        let a = simplex(&mut r, k);
        let b = simplex(&mut r, k);
        let slack = lip * l1(&a, &b) - (tech.max_scale(&a) - tech.max_scale(&b)).abs();
        min_slack = min_slack.min(slack);
    }
    ensure!(min_slack >= 0.0, "Lipschitz bound violated by {:e}", -min_slack);
    Ok(format!(
        "10^4 draws inside [1/l_bar, 1], reference gap {worst_oracle:.1e}, corner error {corner_err:.1e}, min Lipschitz slack {min_slack:.2e}"
    ))
}

fn integrator_optimality() -> Outcome {
    let mut r = rng(3);
    let tech = LearningTech::rational(2.0).unwrap();
    let mut max_excess = f64::NEG_INFINITY;
    let mut equality_err = 0.0f64;
    let mut max_off = f64::NEG_INFINITY;
    for i in 0..1000 {
        let k = 3 + i % 3;
        let h = interior(&mut r, k, 0.01);
        let hh = frontier(&tech, &h);
        let dir = simplex(&mut r, k);
        let scale = r.gen_range(0.05..1.0) * frontier(&tech, &dir);
        let s = KnowledgeBundle::new(dir.iter().map(|x| scale * x).collect()).unwrap();
        if !s.is_feasible(&tech) {
            return Err("sampled bundle is infeasible".into());
        }
        let j = integrator_capacity(&s, &sv(&h)).unwrap();
        max_excess = max_excess.max(j - hh);
        if l1(&s, &h.iter().map(|x| hh * x).collect::<Vec<_>>()) > 1e-6 {
            max_off = max_off.max(j - hh);
        }
        let best = KnowledgeBundle::new(h.iter().map(|x| hh * x).collect()).unwrap();
        equality_err = equality_err.max((integrator_capacity(&best, &sv(&h)).unwrap() - hh).abs());
    }
    ensure!(max_excess <= 1e-10, "J exceeds H(h) by {max_excess:e}");
    ensure!(equality_err <= 1e-8, "equality error {equality_err:e}");
    ensure!(max_off < -1e-8, "a bundle away from H(h) h attains the bound ({max_off:e})");
    Ok(format!(
        "max J - H(h) = {max_excess:.3e}, off-frontier max {max_off:.3e}, equality error {equality_err:.1e}"
    ))
}

fn optimum_formulas() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    let mut max_m = 0.0f64;
    for i in 0..50 {
        let tech = random_tech(&mut r);
        let k = 3 + i % 3;
        let q = interior(&mut r, k, 0.02);
        let u = interior(&mut r, k, 0.02);
        let e = economy(tech.clone(), &q, &u, 0.5, r.gen_range(0.01..0.99));
        let (opt, alloc) = productive_optimum(&e).map_err(|e| e.to_string())?;
        let h = gap_profile(&q);
        let hh = frontier(&tech, &h);
        let d = frag(&q);
        let m = e.theta * d / (hh + e.theta * d);
        let y = e.v * hh / (hh + e.theta * d);
        let errs = [
            l1(&opt.h_star, &h),
            (opt.h_hstar - hh).abs(),
            (opt.m_star - m).abs(),
            (opt.y_star - y).abs() / y,
            (output_of(&alloc, &e).unwrap() - y).abs() / y,
            coordination_slack(&alloc, &e).unwrap().abs(),
            (opt.m_star * hh - e.theta * (1.0 - opt.m_star) * d).abs(),
        ];
        worst = errs.iter().copied().fold(worst, f64::max);
        max_m = max_m.max(opt.m_star);
    }
    ensure!(worst <= 1e-10, "max formula error {worst:e}");
    ensure!(max_m < 1.0 / 3.0, "m* = {max_m} is not below 1/3");
    Ok(format!("max error {worst:.2e} over 50 economies, max m* = {max_m:.4}"))
}

fn design_oracle() -> Outcome {
    let q = [0.5, 0.3, 0.2];
    let grid = OracleGrid::default();
    ensure!(grid.resolution == 8 && grid.max_atoms == 3, "unexpected default grid");
    // Reference nearest lattice point to q by direct enumeration.
    let mut nearest = (f64::INFINITY, vec![]);
    for a in 0..=8 {
        for b in 0..=(8 - a) {
            let p = vec![a as f64 / 8.0, b as f64 / 8.0, (8 - a - b) as f64 / 8.0];
            let d = l1(&p, &q);
            if d < nearest.0 - 1e-12 {
                nearest = (d, p);
            }
        }
    }
    let mut notes = Vec::new();
    let start = Instant::now();
    for tech in [LearningTech::rational(1.0).unwrap(), LearningTech::exponential(2.0).unwrap()] {
        let e = economy(tech.clone(), &q, &[0.3, 0.35, 0.35], 0.5, 0.5);
        let best = brute_force_design(&e, &grid).map_err(|e| e.to_string())?;
        let hh = frontier(&tech, &gap_profile(&q));
        let d = frag(&q);
        let y_star = e.v * hh / (hh + e.theta * d);
        let tol = grid_tolerance(&e, grid.resolution);
        ensure!(best.y <= y_star + 1e-10, "{tech}: lattice beats Y* by {:e}", best.y - y_star);
        ensure!(y_star - best.y <= tol, "{tech}: gap {} above tolerance {tol}", y_star - best.y);
        ensure!(
            l1(&best.x, &nearest.1) < 1e-12,
            "{tech}: best mix {:?}, nearest lattice point {:?}",
            best.x.as_slice(),
            nearest.1
        );
        ensure!(best.design.is_corner_design(), "{tech}: best design is not bang-bang");
        notes.push(format!("{tech}: gap {:.3} (tol {tol:.3})", y_star - best.y));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs <= 30.0, "runtime {secs:.1} s");
    Ok(format!("{}; best mix {:?}; {secs:.1} s", notes.join(", "), nearest.1))
}

fn civic_advantage() -> Outcome {
    let mut r = rng(6);
    let (mut passed, mut drawn) = (0, 0);
    let mut min_gap = f64::INFINITY;
    while passed < 100 {
        drawn += 1;
        ensure!(drawn < 100_000, "too few draws pass the diffuseness check");
        let tech = random_tech(&mut r);
        let k = 3 + drawn % 3;
        let q = interior(&mut r, k, 0.02);
        let u = interior(&mut r, k, 0.05);
        let p = r.gen_range(0.02..1.5);
        let civ = CivicParams::new(sv(&u), p).unwrap();
        if !check_diffuse(&civ, &tech).unwrap().holds {
            continue;
        }
        passed += 1;
        let b_s: f64 = q.iter().zip(&u).map(|(a, b)| a * b).sum();
        let h = gap_profile(&q);
        let b_m = frontier(&tech, &h).powf(p) * overlap(&h, &u);
        let e = economy(tech, &q, &u, p, 0.5);
        let (_, alloc) = productive_optimum(&e).map_err(|e| e.to_string())?;
        let (lib_s, lib_m) = group_knowledge(&alloc, &e);
        ensure!((lib_s - b_s).abs() < 1e-12 && (lib_m - b_m).abs() < 1e-12, "group knowledge mismatch");
        min_gap = min_gap.min(b_m - b_s);
    }
    ensure!(min_gap > 0.0, "B_M - B_S = {min_gap:e}");
    Ok(format!("min B_M - B_S = {min_gap:.3e} over 100 passing draws ({drawn} drawn)"))
}

fn political_equilibrium() -> Outcome {
    let mut r = rng(7);
    let mut agree = 0;
    let mut worst_kkt = 0.0f64;
    let mut worst_closed = 0.0f64;
    for i in 0..100 {
        let tech = random_tech(&mut r);
        let k = 3 + i % 3;
        let q = interior(&mut r, k, 0.02);
        let u = interior(&mut r, k, 0.02);
        let p = r.gen_range(0.05..2.0);
        let e = economy(tech, &q, &u, p, r.gen_range(0.05..0.95));
        let (_, alloc) = productive_optimum(&e).map_err(|e| e.to_string())?;
        let y = output_of(&alloc, &e).unwrap();
        let (b_s, b_m) = group_knowledge(&alloc, &e);
        let g = e.gov;
        let out = equilibrium_from_parts(&g, g.lambda0, y, alloc.m, b_s, b_m).map_err(|e| e.to_string())?;
        let b_soc = (1.0 - alloc.m) * b_s + alloc.m * b_m;
        let e_ref = (g.eta * b_soc / (4.0 * g.lambda0 * g.c0)).sqrt();
        let r_ref = g.tau * y * e_ref.powf(g.eta);
        worst_closed = worst_closed
            .max((out.e_pol - e_ref).abs())
            .max((out.z_pol - alloc.m * b_m / b_soc).abs())
            .max((out.t_s - b_s / b_soc * r_ref).abs())
            .max((out.t_m - b_m / b_soc * r_ref).abs());
        let res = kkt_residuals(&g, g.lambda0, &out);
        worst_kkt = res.iter().fold(worst_kkt, |a, x| a.max(x.abs()));
        if (out.z_pol > out.m) == (b_m > b_s) {
            agree += 1;
        }
    }
    ensure!(worst_closed <= 1e-9, "closed form mismatch {worst_closed:e}");
    ensure!(worst_kkt <= 1e-9, "first-order residual {worst_kkt:e}");
    ensure!(agree == 100, "targeting direction wrong in {} economies", 100 - agree);

    let e = economy(LearningTech::rational(1.0).unwrap(), &[0.5, 0.3, 0.2], &[0.3, 0.35, 0.35], 0.5, 0.5);
    let (_, alloc) = productive_optimum(&e).unwrap();
    let (b_s, b_m) = group_knowledge(&alloc, &e);
    let y = output_of(&alloc, &e).unwrap();
    let g = e.gov;
    let out = equilibrium_from_parts(&g, g.lambda0, y, alloc.m, b_s, b_m).unwrap();
    let game = ServiceGame::new(&g, g.lambda0, y, alloc.m, b_s, b_m).unwrap();
    let mut worst_br = 0.0f64;
    for _ in 0..10 {
        let start = Platform {
            e: out.e_pol * r.gen_range(0.2..3.0),
            z: r.gen_range(0.01..0.99),
        };
        let (p, _) = game.iterate(start, 1.0, 1e-12, 500).map_err(|e| e.to_string())?;
        let (t_s, t_m) = game.services(p);
        worst_br = worst_br
            .max((p.e - out.e_pol).abs())
            .max((p.z - out.z_pol).abs())
            .max((t_s - out.t_s).abs())
            .max((t_m - out.t_m).abs());
    }
    ensure!(worst_br <= 1e-6, "best-response limit off by {worst_br:e}");
    Ok(format!(
        "10 starts within {worst_br:.1e}; closed form {worst_closed:.1e}; KKT {worst_kkt:.1e}; targeting 100/100"
    ))
}

fn welfare_representation() -> Outcome {
    let mut r = rng(8);
    let g = gov();
    let mut worst = 0.0f64;
    let mut equal_max = 0.0f64;
    let mut unequal_min = f64::INFINITY;
    for i in 0..1000 {
        let m = r.gen_range(0.01..0.6);
        let y = r.gen_range(1.0..20.0);
        let b_s = r.gen_range(0.05..1.0);
        let b_m = if i % 2 == 0 { b_s } else { r.gen_range(0.05..1.0) };
        let out = equilibrium_from_parts(&g, 1.0, y, m, b_s, b_m).map_err(|e| e.to_string())?;
        let v = service_welfare(&out).unwrap();
        let v_ref = (1.0 - m) * out.t_s.ln() + m * out.t_m.ln();
        let b_soc = (1.0 - m) * b_s + m * b_m;
        let d_ref = b_soc.ln() - (1.0 - m) * b_s.ln() - m * b_m.ln();
        let d = dispersion(b_s, b_m, m);
        worst = worst
            .max((v - (out.r.ln() - d)).abs())
            .max((v - v_ref).abs())
            .max((d - d_ref.max(0.0)).abs());
        ensure!(d >= 0.0, "negative penalty {d:e}");
        if (b_s - b_m).abs() <= 1e-8 {
            equal_max = equal_max.max(d);
        } else {
            unequal_min = unequal_min.min(d);
        }
    }
    ensure!(worst <= 1e-10, "representation error {worst:e}");
    ensure!(equal_max == 0.0, "penalty {equal_max:e} with equal knowledge");
    ensure!(unequal_min > 0.0, "zero penalty with unequal knowledge");
    Ok(format!(
        "max error {worst:.1e}; penalty 0 on 500 equal pairs, min {unequal_min:.1e} on 500 unequal pairs"
    ))
}

/// Decomposition rebuilt from finite differences of `Y`, `B_soc`, the
/// penalty and `W`, with `R_B / R = eta / (2 B_soc)` and `R_Y / R = 1 / Y`.
fn decomposition_residual(
    family: &dyn Fn(f64) -> WelfareReport,
    x: f64,
    g: &GovernanceTech,
) -> f64 {
    let h = 1e-5;
    let d = |pick: fn(&WelfareReport) -> f64| inside_difference(|t| pick(&family(t)), x, h, 0.0, 1.0);
    let at = family(x);
    let productive = ((1.0 - g.tau) + 1.0 / at.y) * d(|w| w.y);
    let governance = g.eta / (2.0 * at.outcome.b_soc) * d(|w| w.outcome.b_soc);
    let targeting = -d(|w| w.dispersion);
    (productive + governance + targeting - d(|w| w.total)).abs()
}

fn welfare_decomposition() -> Outcome {
    let e = economy(LearningTech::rational(1.0).unwrap(), &[0.5, 0.3, 0.2], &[0.3, 0.35, 0.35], 0.5, 0.5);
    let g = e.gov;
    let broad = BroadeningFamily::new(&e).unwrap();
    let bfam = |b: f64| broad.welfare(b).unwrap();
    let iface = InterfaceFamily::new(&e).unwrap();
    let afam = |a: f64| iface.welfare(a).unwrap();
    let mut worst_b = 0.0f64;
    for b in [0.0, 0.2, 0.5, 0.8] {
        worst_b = worst_b.max(decomposition_residual(&bfam, b, &g));
        let lib = broad_decomp(&broad, b)?;
        worst_b = worst_b.max(lib);
    }
    let mut worst_a = 0.0f64;
    for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
        worst_a = worst_a.max(decomposition_residual(&afam, a, &g));
        worst_a = worst_a.max(iface.decompose(a).map_err(|e| e.to_string())?.residual);
    }
    ensure!(worst_b <= 1e-4, "broadening residual {worst_b:e}");
    ensure!(worst_a <= 1e-4, "interface residual {worst_a:e}");
    Ok(format!("max residual {worst_b:.1e} along broadening, {worst_a:.1e} along the interface family"))
}

fn broad_decomp(fam: &BroadeningFamily, b: f64) -> Result<f64, String> {
    let e = &fam.econ;
    civic_core::welfare::decompose_along(
        &e.gov,
        e.gov.lambda0,
        e.gov.tau,
        |t| fam.welfare(t),
        b,
        1e-5,
        (0.0, 1.0),
    )
    .map(|d| d.residual)
    .map_err(|e| e.to_string())
}

/// Civic exponent placing the broadening cutoff at `target` times the
/// coordination cutoff, found by bisection on the reference formula.
fn exponent_for_cutoff(q: &[f64], u: &[f64], target: f64) -> f64 {
    let tech = LearningTech::rational(1.0).unwrap();
    let theta_bar = economy(tech.clone(), q, u, 1.0, 0.5).theta_bar();
    let h = gap_profile(q);
    let hh = frontier(&tech, &h);
    let hq = frontier(&tech, q);
    let qu: f64 = q.iter().zip(u).map(|(a, b)| a * b).sum();
    let cut = |p: f64| {
        let a = hq.powf(p) * overlap(q, u);
        let bm = hh.powf(p) * overlap(&h, u);
        hh * (a - qu) / (frag(q) * (bm - a)) - target * theta_bar
    };
    let p_bar = (overlap(q, u) / qu).ln() / -hq.ln();
    let (mut lo, mut hi) = (p_bar - 1.0, p_bar);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cut(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn broadening() -> Outcome {
    let q = [0.5, 0.3, 0.2];
    let u = [0.3, 0.35, 0.35];
    let mut worst_slope = 0.0f64;
    let mut worst_flip = 0.0f64;
    for target in [0.3, 0.5, 0.7] {
        let p = exponent_for_cutoff(&q, &u, target);
        let tech = LearningTech::rational(1.0).unwrap();
        let e = economy(tech.clone(), &q, &u, p, 0.5);
        let fam = BroadeningFamily::new(&e).unwrap();
        // Slope from allocations rebuilt at small b, not from the closed form.
        let b_soc = |b: f64| {
            let alloc = fam.allocation(b).unwrap();
            let (s, m) = group_knowledge(&alloc, &e);
            (1.0 - alloc.m) * s + alloc.m * m
        };
        let h = 1e-6;
        let fd = (-3.0 * b_soc(0.0) + 4.0 * b_soc(h) - b_soc(2.0 * h)) / (2.0 * h);
        worst_slope = worst_slope.max((fd - fam.derivative_at_zero()).abs());
        let cutoff = match fam.cutoff() {
            BroadeningCutoff::PositiveBelow(c) | BroadeningCutoff::PositiveAbove(c) => c,
            other => return Err(format!("cutoff undefined for p = {p}: {other:?}")),
        };
        let theta_bar = e.theta_bar();
        ensure!((cutoff - target * theta_bar).abs() < 1e-9, "cutoff {cutoff} vs target {}", target * theta_bar);
        let found = bisect_broadening_flip(&e, 1e-9 * theta_bar, theta_bar * (1.0 - 1e-9)).map_err(|e| e.to_string())?;
        worst_flip = worst_flip.max((found - cutoff).abs());
        for side in [0.9, 1.1] {
            let slope = BroadeningFamily::new(&e.with_theta(side * cutoff)).unwrap().derivative_at_zero();
            ensure!((slope > 0.0) == (side < 1.0), "slope sign {slope:e} at {side} x cutoff");
        }
    }
    ensure!(worst_slope <= 1e-6, "slope mismatch {worst_slope:e}");
    ensure!(worst_flip <= 1e-6, "flip located {worst_flip:e} from the formula");
    Ok(format!("slope error {worst_slope:.1e}; flip within {worst_flip:.1e} of the formula on 3 scenarios"))
}

fn interface_statics() -> Outcome {
    let q = [0.5, 0.3, 0.2];
    let e = economy(LearningTech::rational(1.0).unwrap(), &q, &[0.3, 0.35, 0.35], 0.5, 0.5);
    let fam = InterfaceFamily::new(&e).unwrap();
    let h = gap_profile(&q);
    let s2: f64 = q.iter().map(|x| x * x).sum();
    let s3: f64 = q.iter().map(|x| x * x * x).sum();
    let bs_ref = (s2 * s2 - s3) / frag(&q);
    let bm_ref = frontier(&e.tech, &h).powf(0.5) * (1.0 - overlap(&h, &q));
    ensure!((fam.b_s_slope() - bs_ref).abs() < 1e-12, "B_S' closed form {} vs {bs_ref}", fam.b_s_slope());
    ensure!((fam.b_m_slope() - bm_ref).abs() < 1e-12, "B_M' closed form {} vs {bm_ref}", fam.b_m_slope());
    ensure!(bs_ref <= 0.0 && bm_ref >= 0.0, "slope signs {bs_ref}, {bm_ref}");
    let mut worst = 0.0f64;
    for i in 0..=10 {
        let a = i as f64 / 10.0;
        let bs = |t: f64| fam.group_knowledge(t).unwrap().0;
        let bm = |t: f64| fam.group_knowledge(t).unwrap().1;
        worst = worst
            .max((inside_difference(bs, a, 1e-4, 0.0, 1.0) - bs_ref).abs())
            .max((inside_difference(bm, a, 1e-4, 0.0, 1.0) - bm_ref).abs());
    }
    ensure!(worst <= 1e-8, "slope mismatch {worst:e}");

    let alphas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let small = interface_threshold(&e, &alphas, 1e-4)
        .map_err(|e| e.to_string())?
        .ok_or("no threshold found")?;
    ensure!(small > 0.0, "threshold {small}");
    for frac in [0.01, 0.5, 0.99] {
        let ef = e.with_theta(frac * small);
        let f = InterfaceFamily::new(&ef).unwrap();
        for i in 0..=20 {
            let a = i as f64 / 20.0;
            let w = |t: f64| f.welfare(t).unwrap().total;
            let b = |t: f64| f.welfare(t).unwrap().outcome.b_soc;
            let dw = inside_difference(w, a, 1e-5, 0.0, 1.0);
            let db = inside_difference(b, a, 1e-5, 0.0, 1.0);
            ensure!(dw < 0.0 && db < 0.0, "no harm at theta = {}, alpha = {a}: dW {dw:e}, dB {db:e}", frac * small);
        }
    }
    Ok(format!(
        "B_S' = {bs_ref:.4e}, B_M' = {bm_ref:.4e}, difference {worst:.1e}; harm below theta_small = {small:.4e}"
    ))
}

fn theta_statics() -> Outcome {
    let q = [0.5, 0.3, 0.2];
    let tech = LearningTech::exponential(2.0).unwrap();
    let e = economy(tech.clone(), &q, &[0.3, 0.35, 0.35], 0.5, 0.5);
    let theta_bar = e.theta_bar();
    let hh = frontier(&tech, &gap_profile(&q));
    let d = frag(&q);
    let rows: Vec<(f64, f64, f64, f64)> = (1..=50)
        .map(|i| {
            let t = theta_bar * i as f64 / 51.0;
            let et = e.with_theta(t);
            let (opt, alloc) = productive_optimum(&et).unwrap();
            let w = civic_core::welfare::total_welfare(&et, &alloc).unwrap();
            (t, opt.m_star, opt.y_star, w.outcome.b_soc)
        })
        .collect();
    let mut margins = [f64::INFINITY; 3];
    for w in rows.windows(2) {
        margins[0] = margins[0].min(w[1].1 - w[0].1);
        margins[1] = margins[1].min(w[0].2 - w[1].2);
        margins[2] = margins[2].min(w[1].3 - w[0].3);
    }
    ensure!(margins.iter().all(|m| *m > 1e-12), "strictness margins {margins:?}");
    let mut worst = 0.0f64;
    for &(t, ..) in &rows {
        let closed = d * hh / ((hh + t * d) * (hh + t * d));
        let m_of = |x: f64| productive_optimum(&e.with_theta(x)).unwrap().0.m_star;
        let fd = central(m_of, t, 1e-6 * t);
        worst = worst.max((fd - closed).abs());
    }
    ensure!(worst <= 1e-8, "dm/dtheta mismatch {worst:e}");
    Ok(format!(
        "margins m {:.2e}, -Y {:.2e}, B_soc {:.2e}; dm/dtheta error {worst:.1e}",
        margins[0], margins[1], margins[2]
    ))
}

fn competitive_support() -> Outcome {
    let q = [0.5, 0.3, 0.2];
    let u = [0.2, 0.4, 0.4];
    let tech = LearningTech::rational(1.0).unwrap();
    let base = economy(tech.clone(), &q, &u, 0.5, 0.5);
    let v_tilde = (1.0 - base.gov.tau) * base.v;
    let ell_bar = slope_at(&tech, 0.0);
    let delta_bar = 0.5 * ell_bar.ln() - 0.2f64.ln();
    let r_bar = 2.0 * (v_tilde + ell_bar * delta_bar) / (v_tilde * 0.2);
    let cutoff = (base.theta_bar() / r_bar).min(v_tilde * 0.2 / (2.0 * ell_bar * delta_bar));
    let rb = ratio_bound(&base);
    ensure!((rb.r_bar - r_bar).abs() < 1e-12 * r_bar, "r_bar {} vs {r_bar}", rb.r_bar);
    ensure!((rb.uniqueness_cutoff() - cutoff).abs() < 1e-15, "cutoff mismatch");
    let h = gap_profile(&q);
    let hh = frontier(&tech, &h);
    let b_s: f64 = q.iter().zip(&u).map(|(a, b)| a * b).sum();
    let b_m = hh.sqrt() * overlap(&h, &u);
    let mut worst_res = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    for frac in [0.25, 0.5, 0.9] {
        let e = base.with_theta(frac * cutoff);
        ensure!(ratio_bound(&e).unique, "uniqueness flag off at {frac} x cutoff");
        let w = support_wages(&e).map_err(|e| e.to_string())?;
        let beta = e.theta * frag(&q) / hh;
        let delta = (b_m / b_s).ln();
        worst_res = worst_res
            .max((w.w_s + beta * w.w_m - v_tilde).abs())
            .max((w.w_s - w.w_m - delta).abs())
            .max((w.w_m - (v_tilde - delta) / (1.0 + beta)).abs());
        ensure!(w.w_m > 0.0, "nonpositive integrator wage");
        ensure!(w.ratio() <= r_bar, "ratio {} above bound {r_bar}", w.ratio());
        let rep = no_deviation_check(&w, &e, &OracleGrid::default()).map_err(|e| e.to_string())?;
        worst_margin = worst_margin.min(rep.worst_margin);
    }
    ensure!(worst_res <= 1e-10, "residual {worst_res:e}");
    ensure!(worst_margin >= -1e-9, "deviation margin {worst_margin:e}");
    Ok(format!(
        "residuals {worst_res:.1e}; worst lattice margin {worst_margin:.3e}; r_bar = {r_bar:.4}"
    ))
}

fn determinism() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/default.cfg");
    let scenario = Scenario::load(path).map_err(|e| e.to_string())?;
    let first = verify::run_scenario(&scenario, false, Some(42)).render();
    let second = verify::run_scenario(&scenario, false, Some(42)).render();
    ensure!(first.as_bytes() == second.as_bytes(), "reports differ");
    let other = verify::run_scenario(&scenario, false, Some(43)).render();
    ensure!(other != first, "seed has no effect on the report");
    Ok(format!("{} identical bytes", first.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("coverage identity", coverage_identity),
        ("frontier bounds", frontier_bounds),
        ("integrator optimality", integrator_optimality),
        ("productive optimum formulas", optimum_formulas),
        ("bang-bang and alignment oracle", design_oracle),
        ("integrator civic advantage", civic_advantage),
        ("political equilibrium", political_equilibrium),
        ("welfare representation", welfare_representation),
        ("welfare decomposition", welfare_decomposition),
        ("broadening", broadening),
        ("interface statics", interface_statics),
        ("theta statics", theta_statics),
        ("competitive support", competitive_support),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        match run() {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail}"),
            Err(why) => {
                println!("FAIL {n:>2} {name}: {why}");
                failed.push(n);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: 14/14 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
