//! Fixtures shared by the benchmarks.

use civic_core::{CivicParams, Economy, GovernanceTech, LearningTech, SimplexVector};

/// Evenly spread three-domain economy at half the coordination cutoff.
pub fn baseline(tech: LearningTech) -> Economy {
    let q = SimplexVector::new(vec![0.5, 0.3, 0.2]).unwrap();
    let u = SimplexVector::new(vec![0.3, 0.35, 0.35]).unwrap();
    let civ = CivicParams::new(u, 0.5).unwrap();
    let gov = GovernanceTech::new(0.5, 0.125, 0.2, 1.0).unwrap();
    let econ = Economy::new(tech, q, civ, 0.0, 10.0, gov).unwrap();
    let theta = 0.5 * econ.theta_bar();
    econ.with_theta(theta)
}

/// Normalized weights `1, 2, ..., k`.
pub fn ramp(k: usize) -> Vec<f64> {
    let total = (k * (k + 1) / 2) as f64;
    (1..=k).map(|i| i as f64 / total).collect()
}
