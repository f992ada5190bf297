//! One-dimensional search and root finding.

use crate::error::{HybridError, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search until the bracket is below `tol`.
/// Returns `(x, f(x))`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Coarse grid with `step`, then golden-section refinement around the best node.
///
/// Ties go to the smaller abscissa. A bracket narrower than `tol` returns its midpoint.
/// An objective that is constant on the grid yields [`HybridError::NoOptimum`].
pub fn grid_then_golden<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, step: f64, tol: f64) -> Result<(f64, f64)> {
    if hi - lo < tol {
        let x = 0.5 * (lo + hi);
        return Ok((x, f(x)));
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let xs: Vec<f64> = (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for k in 1..vals.len() {
        if vals[k] > vals[best] {
            best = k;
        }
    }
    if vals.iter().all(|&v| v == vals[0]) {
        return Err(HybridError::NoOptimum);
    }
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(xs.len() - 1)];
    let (x, v) = golden_section_max(&mut f, a, b, tol);
    if v > vals[best] {
        Ok((x, v))
    } else {
        Ok((xs[best], vals[best]))
    }
}

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(HybridError::NoSolution(format!("no sign change on [{lo}, {hi}]")));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
