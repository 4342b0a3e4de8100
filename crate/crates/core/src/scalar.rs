//! Bracketed scalar minimization and root finding.
//!
//! The minimizer is the classic golden-section / successive-parabolic
//! combination on a fixed bracket: derivative-free, robust to mild kinks
//! (the objectives here contain |y|^{5/2} terms), and deterministic. A
//! minimum that lands on a bracket endpoint is reported as a bracketing
//! failure instead of being returned silently.

use crate::{Error, Result};

/// Result of a bracketed minimization.
#[derive(Debug, Clone, Copy)]
pub struct Minimum {
    pub argmin: f64,
    pub value: f64,
    pub iterations: u32,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1; // 2 - phi

/// Minimizes `f` on [lo, hi] to absolute argmin tolerance `tol`.
///
/// Errors with [`Error::BracketingFailure`] if the minimum hugs an endpoint,
/// which signals a non-unimodal objective or a wrong bracket.
pub fn minimize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: u32) -> Result<Minimum> {
    assert!(lo < hi, "invalid bracket [{lo}, {hi}]");
    assert!(tol > 0.0, "tolerance must be positive, got {tol}");
    let (mut a, mut b) = (lo, hi);
    // x: best, w: second best, v: previous second best.
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let mid = 0.5 * (a + b);
        let tol1 = tol * x.abs() + tol * 1e-3 + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Parabola through (x,fx), (w,fw), (v,fv).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            // Accept only if the step is small and stays inside the bracket.
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if mid > x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < mid { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    // Endpoint hugging: the minimizer ran into the bracket wall.
    let edge = (hi - lo) * 1e-6 + 4.0 * tol;
    if x - lo < edge || hi - x < edge {
        return Err(Error::BracketingFailure { lo, hi, at: x });
    }
    Ok(Minimum {
        argmin: x,
        value: fx,
        iterations,
    })
}

/// Finds a root of `f` on [lo, hi] by bisection to absolute x-tolerance
/// `tol`. Requires a sign change over the bracket.
pub fn bisect_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: u32) -> Result<f64> {
    assert!(lo < hi, "invalid bracket [{lo}, {hi}]");
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BisectionBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if b - a <= tol {
            return Ok(m);
        }
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let m = minimize(|x| (x - 1.25) * (x - 1.25) + 3.0, 0.0, 3.0, 1e-10, 200).unwrap();
        assert!((m.argmin - 1.25).abs() < 1e-7);
        assert!((m.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn handles_fractional_power_kink() {
        // |x|^{5/2} + x has a smooth interior minimum left of 0 at
        // x = -(2/5)^{2/3}; the kink at 0 must not derail the search.
        let m = minimize(|x: f64| x.abs().powf(2.5) + x, -2.0, 2.0, 1e-10, 200).unwrap();
        let expected = -(0.4f64.powf(2.0 / 3.0));
        assert!((m.argmin - expected).abs() < 1e-6);
    }

    #[test]
    fn reports_endpoint_hugging_as_bracket_failure() {
        let err = minimize(|x| x, 0.0, 1.0, 1e-10, 200).unwrap_err();
        match err {
            Error::BracketingFailure { lo, hi, .. } => {
                assert_eq!((lo, hi), (0.0, 1.0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bisection_finds_root_and_rejects_bad_bracket() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-13, 200).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }
}
