//! Deterministic scalar search and quadrature primitives.
//!
//! Golden-section search covers the one-dimensional optimizations of the
//! cycle analyses (all objectives there are unimodal on the brackets used);
//! bisection locates sign changes; composite Simpson quadrature with mesh
//! doubling handles the smooth protocol integrals.

use crate::error::{Error, Result};

/// Inverse golden ratio, the section fraction kept per iteration.
const INVPHI: f64 = 0.618_033_988_749_894_9;

fn check_finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Accuracy(format!("{what} evaluated to a non-finite value")))
    }
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
///
/// Returns `(x_min, f(x_min))` with `x_min` located to within `tol`.
pub fn minimize(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "minimize needs a < b and tol > 0, got a={a}, b={b}, tol={tol}"
        )));
    }
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = check_finite(f(x1), "objective")?;
    let mut f2 = check_finite(f(x2), "objective")?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = check_finite(f(x1), "objective")?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = check_finite(f(x2), "objective")?;
        }
    }
    let xm = 0.5 * (lo + hi);
    Ok((xm, check_finite(f(xm), "objective")?))
}

/// Golden-section maximization; returns `(x_max, f(x_max))`.
pub fn maximize(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let (x, neg) = minimize(|x| -f(x), a, b, tol)?;
    Ok((x, -neg))
}

/// Bisection root of a sign-changing continuous function on `[a, b]`.
pub fn bisect(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> Result<f64> {
    if !(a < b) || !(xtol > 0.0) {
        return Err(Error::Domain(format!(
            "bisect needs a < b and xtol > 0, got a={a}, b={b}, xtol={xtol}"
        )));
    }
    let fa = check_finite(f(a), "bracket endpoint")?;
    let fb = check_finite(f(b), "bracket endpoint")?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain(format!(
            "bisect bracket [{a}, {b}] does not change sign"
        )));
    }
    let (mut lo, mut hi, mut flo) = (a, b, fa);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        let fm = check_finite(f(mid), "bisection midpoint")?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Composite Simpson rule with `n` panels (`n` rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Simpson quadrature refined by mesh doubling until two successive meshes
/// agree to `tol` (relative to the magnitude of the integral, with an
/// absolute floor). Fails if `max_doublings` is exhausted.
pub fn simpson_converged(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    n0: usize,
    max_doublings: usize,
) -> Result<f64> {
    let mut n = n0.max(2);
    let mut prev = simpson(&f, a, b, n);
    for _ in 0..max_doublings {
        n *= 2;
        let next = simpson(&f, a, b, n);
        let scale = next.abs().max(1.0);
        if (next - prev).abs() <= tol * scale {
            return check_finite(next, "integral");
        }
        prev = next;
    }
    Err(Error::Accuracy(format!(
        "quadrature did not converge to {tol:.1e} within {max_doublings} refinements"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn minimize_quadratic() {
        let (x, fx) = minimize(|x| (x - 1.3) * (x - 1.3), 0.0, 3.0, 1e-10).unwrap();
        // x resolution at a quadratic minimum is sqrt(machine eps), not tol
        assert_abs_diff_eq!(x, 1.3, epsilon = 1e-7);
        assert!(fx < 1e-15);
    }

    #[test]
    fn maximize_sine() {
        let (x, fx) = maximize(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-10).unwrap();
        assert_abs_diff_eq!(x, std::f64::consts::FRAC_PI_2, epsilon = 1e-7);
        assert_relative_eq!(fx, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn minimize_rejects_bad_bracket() {
        assert!(minimize(|x| x, 2.0, 1.0, 1e-8).is_err());
        assert!(minimize(|_| f64::NAN, 0.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn bisect_cosine_root() {
        let root = bisect(|x| x.cos(), 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(root, std::f64::consts::FRAC_PI_2, epsilon = 1e-11);
    }

    #[test]
    fn bisect_needs_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let integral = simpson(|x| x * x * x, 0.0, 1.0, 2);
        assert_abs_diff_eq!(integral, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn simpson_converged_sine() {
        let integral = simpson_converged(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 4, 20)
            .unwrap();
        assert_relative_eq!(integral, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn simpson_converged_reports_failure() {
        // integrable singularity converges too slowly for two refinements
        let res = simpson_converged(|x| x.max(1e-300).sqrt().recip(), 0.0, 1.0, 1e-12, 4, 2);
        assert!(res.is_err());
    }
}
