//! Scalar root finding, line search and finite differences.

use crate::error::{Error, Result};

/// Bisection for a root of `f` on `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs (or one of them is zero).
///
/// Stops once the bracket is no wider than `x_tol` or `|f|` falls to `f_tol`.
/// Returns the endpoint of the final bracket with the smaller residual.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64, f_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NonConvergence {
            routine: "bisection (bracket has no sign change)",
            iterations: 0,
            residual: f_lo.abs().min(f_hi.abs()),
        });
    }
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= x_tol {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 || f_mid.abs() <= f_tol {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

const MAX_BISECTION_STEPS: usize = 2000;

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)` once the bracket is narrower than `tol`.
pub fn golden_section_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if x2 <= x1 {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference<F>(mut f: F, x: f64, h: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Second-order one-sided difference `(-3f(x) + 4f(x+h) - f(x+2h)) / 2h`,
/// for points on the lower edge of a domain.
pub fn forward_difference<F>(mut f: F, x: f64, h: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
}

/// Mirror image of [`forward_difference`] for the upper edge of a domain.
pub fn backward_difference<F>(mut f: F, x: f64, h: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
}

/// Which stencil a derivative was taken with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Central,
    Forward,
    Backward,
}

/// Picks the widest stencil that stays inside `[lower, upper]` and applies it.
pub fn derivative_in<F>(f: F, x: f64, h: f64, lower: f64, upper: f64) -> (f64, Stencil)
where
    F: FnMut(f64) -> f64,
{
    if x - h >= lower && x + h <= upper {
        (central_difference(f, x, h), Stencil::Central)
    } else if x + 2.0 * h <= upper {
        (forward_difference(f, x, h), Stencil::Forward)
    } else {
        (backward_difference(f, x, h), Stencil::Backward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 0.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0).is_err());
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-13);
    }

    #[test]
    fn stencils_agree_on_cubic() {
        let f = |x: f64| x * x * x - x;
        let exact = 3.0 * 0.5f64.powi(2) - 1.0;
        let h = 1e-4;
        assert!((central_difference(f, 0.5, h) - exact).abs() < 1e-7);
        assert!((forward_difference(f, 0.5, h) - exact).abs() < 1e-7);
        assert!((backward_difference(f, 0.5, h) - exact).abs() < 1e-7);
        let (_, s) = derivative_in(f, 0.0, h, 0.0, 1.0);
        assert_eq!(s, Stencil::Forward);
        let (_, s) = derivative_in(f, 1.0, h, 0.0, 1.0);
        assert_eq!(s, Stencil::Backward);
    }
}
