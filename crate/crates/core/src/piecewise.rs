//! Piecewise-quadratic functions on [0, inf).
//!
//! A function is a strictly increasing knot sequence starting at 0, one
//! (value, slope, curvature) triple per bounded interval, and a constant tail
//! value beyond the last knot. Coefficients are local to each piece: on
//! [a_i, a_{i+1}) with u = t - a_i the function is
//! value + slope*u + curvature*u^2/2.
//!
//! Integrals of piece polynomials are evaluated in closed form (squared-norm)
//! or by per-cell 3-point Gauss-Legendre quadrature, which is exact through
//! polynomial degree 5 and therefore exact for products of two quadratics and
//! for low moments. An adaptive Simpson rule is kept as an independent
//! cross-check and for integrands that are not piecewise polynomial.

use crate::{Error, Result};

/// Local coefficients of one quadratic piece, anchored at its left knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    /// Function value at the left knot.
    pub value: f64,
    /// Derivative at the left knot.
    pub slope: f64,
    /// Constant second derivative on the piece.
    pub curvature: f64,
}

impl Piece {
    /// Value at local offset u from the left knot.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.value + u * (self.slope + 0.5 * self.curvature * u)
    }

    /// Derivative at local offset u.
    #[inline]
    pub fn deriv(&self, u: f64) -> f64 {
        self.slope + self.curvature * u
    }

    /// Exact integral of the squared piece over a cell of the given length:
    /// v^2 L + v s L^2 + (s^2 + v c) L^3/3 + s c L^4/4 + c^2 L^5/20.
    fn norm_sq_over(&self, len: f64) -> f64 {
        let (v, s, c) = (self.value, self.slope, self.curvature);
        let l2 = len * len;
        let l3 = l2 * len;
        v * v * len
            + v * s * l2
            + (s * s + v * c) * l3 / 3.0
            + s * c * l3 * len / 4.0
            + c * c * l3 * l2 / 20.0
    }
}

/// Piecewise quadratic on [0, inf): knots, per-interval pieces, constant tail.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseQuadratic {
    knots: Vec<f64>,
    pieces: Vec<Piece>,
    tail_value: f64,
}

impl PiecewiseQuadratic {
    /// Builds a function from raw parts, validating the structural
    /// invariants: knots start at 0 and strictly increase, one piece per
    /// bounded interval, everything finite.
    pub fn new(knots: Vec<f64>, pieces: Vec<Piece>, tail_value: f64) -> Result<Self> {
        if knots.is_empty() || knots[0] != 0.0 {
            return Err(Error::InvalidParameter {
                name: "knots",
                requirement: "non-empty and starting at 0",
                value: knots.first().copied().unwrap_or(f64::NAN),
            });
        }
        for w in knots.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter {
                    name: "knots",
                    requirement: "strictly increasing",
                    value: w[1],
                });
            }
        }
        if pieces.len() + 1 != knots.len() {
            return Err(Error::InvalidParameter {
                name: "pieces",
                requirement: "exactly one per bounded knot interval",
                value: pieces.len() as f64,
            });
        }
        let finite = knots.iter().all(|k| k.is_finite())
            && tail_value.is_finite()
            && pieces
                .iter()
                .all(|p| p.value.is_finite() && p.slope.is_finite() && p.curvature.is_finite());
        if !finite {
            return Err(Error::InvalidParameter {
                name: "coefficients",
                requirement: "finite",
                value: f64::NAN,
            });
        }
        Ok(Self {
            knots,
            pieces,
            tail_value,
        })
    }

    /// The zero function (single knot at 0, tail 0).
    pub fn zero() -> Self {
        Self {
            knots: vec![0.0],
            pieces: Vec::new(),
            tail_value: 0.0,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn tail_value(&self) -> f64 {
        self.tail_value
    }

    /// Last knot; the function equals `tail_value` at and beyond it.
    pub fn support_end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    #[inline]
    fn piece_index(&self, t: f64) -> usize {
        // partition_point returns the count of knots <= t, at least 1 since
        // knots[0] = 0 <= t.
        self.knots.partition_point(|&k| k <= t) - 1
    }

    /// Pointwise value. Total on t >= 0; beyond the last knot it returns the
    /// tail value.
    pub fn eval(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "eval requires t >= 0, got {t}");
        if t >= self.support_end() {
            return self.tail_value;
        }
        let i = self.piece_index(t);
        self.pieces[i].eval(t - self.knots[i])
    }

    /// Pointwise derivative (0 in the constant tail; left piece value at
    /// knots).
    pub fn deriv(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "deriv requires t >= 0, got {t}");
        if t >= self.support_end() {
            return 0.0;
        }
        let i = self.piece_index(t);
        self.pieces[i].deriv(t - self.knots[i])
    }

    /// Exact integral of f^2 over [0, inf). Requires a zero tail, otherwise
    /// the integral diverges.
    pub fn norm_sq(&self) -> f64 {
        assert!(
            self.tail_value == 0.0,
            "norm_sq requires a zero tail, got {}",
            self.tail_value
        );
        let mut total = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            total += p.norm_sq_over(self.knots[i + 1] - self.knots[i]);
        }
        total
    }

    /// The function t -> amplitude * f(time_factor * t). Knots shrink by the
    /// time factor; local coefficients pick up one factor of `time_factor`
    /// per derivative order.
    pub fn scaled(&self, amplitude: f64, time_factor: f64) -> Self {
        assert!(
            time_factor > 0.0 && time_factor.is_finite(),
            "time_factor must be positive and finite, got {time_factor}"
        );
        Self {
            knots: self.knots.iter().map(|k| k / time_factor).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    value: amplitude * p.value,
                    slope: amplitude * time_factor * p.slope,
                    curvature: amplitude * time_factor * time_factor * p.curvature,
                })
                .collect(),
            tail_value: amplitude * self.tail_value,
        }
    }

    /// Integral of t^k f(t) over the support, exact for k <= 3 (integrand
    /// degree k+2 <= 5). Requires a zero tail.
    pub fn moment(&self, k: u32) -> f64 {
        assert!(k <= 3, "moment is exact only for k <= 3, got {k}");
        assert!(self.tail_value == 0.0, "moment requires a zero tail");
        let mut total = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let (l, r) = (self.knots[i], self.knots[i + 1]);
            total += gauss3(l, r, |t| t.powi(k as i32) * p.eval(t - l));
        }
        total
    }
}

/// 3-point Gauss-Legendre on [l, r]: exact for polynomials of degree <= 5.
fn gauss3(l: f64, r: f64, f: impl Fn(f64) -> f64) -> f64 {
    // Nodes +-sqrt(3/5) and 0, weights 5/9, 8/9, 5/9.
    const X: f64 = 0.774_596_669_241_483_4; // sqrt(0.6)
    const W0: f64 = 5.0 / 9.0;
    const W1: f64 = 8.0 / 9.0;
    let mid = 0.5 * (l + r);
    let half = 0.5 * (r - l);
    half * (W0 * f(mid - half * X) + W1 * f(mid) + W0 * f(mid + half * X))
}

/// Exact inner product of two piecewise quadratics over [0, inf).
///
/// Integrates over the merged knot grid up to the point where the product is
/// identically zero; at least one argument must have a zero tail (otherwise
/// the integral need not exist).
pub fn inner_product(a: &PiecewiseQuadratic, b: &PiecewiseQuadratic) -> f64 {
    let end = match (a.tail_value == 0.0, b.tail_value == 0.0) {
        (true, true) => a.support_end().min(b.support_end()),
        (true, false) => a.support_end(),
        (false, true) => b.support_end(),
        (false, false) => panic!("inner_product requires at least one zero-tail factor"),
    };
    let mut cuts: Vec<f64> = a
        .knots
        .iter()
        .chain(b.knots.iter())
        .copied()
        .filter(|&k| k < end)
        .collect();
    cuts.push(end);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] - w[0] > 0.0 {
            total += gauss3(w[0], w[1], |t| a.eval(t) * b.eval(t));
        }
    }
    total
}

/// Adaptive Simpson quadrature with Richardson acceptance test, used as an
/// integration method independent of the closed forms above.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(l: f64, r: f64, fl: f64, fm: f64, fr: f64) -> f64 {
        (r - l) / 6.0 * (fl + 4.0 * fm + fr)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        l: f64,
        r: f64,
        fl: f64,
        fm: f64,
        fr: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (l + r);
        let (lm, rm) = (0.5 * (l + m), 0.5 * (m + r));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(l, m, fl, flm, fm);
        let right = simpson(m, r, fm, frm, fr);
        // The factor 15 is the standard Richardson error estimate for
        // Simpson halving.
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, l, m, fl, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, r, fm, frm, fr, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola() -> PiecewiseQuadratic {
        // 1 - t^2/2 on [0, 1), tail 0.
        PiecewiseQuadratic::new(
            vec![0.0, 1.0],
            vec![Piece {
                value: 1.0,
                slope: 0.0,
                curvature: -1.0,
            }],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn eval_matches_polynomial_and_tail() {
        let p = parabola();
        assert_eq!(p.eval(0.0), 1.0);
        assert!((p.eval(0.5) - (1.0 - 0.125)).abs() < 1e-15);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(7.0), 0.0);
        assert_eq!(p.deriv(0.25), -0.25);
        assert_eq!(p.deriv(2.0), 0.0);
    }

    #[test]
    fn norm_sq_closed_form_matches_simpson() {
        let p = parabola();
        // integral of (1 - t^2/2)^2 on [0,1] = 1 - 1/3 + 1/20 = 43/60.
        assert!((p.norm_sq() - 43.0 / 60.0).abs() < 1e-15);
        let via_simpson = adaptive_simpson(&|t| p.eval(t) * p.eval(t), 0.0, 1.0, 1e-12);
        assert!((p.norm_sq() - via_simpson).abs() < 1e-10);
    }

    #[test]
    fn inner_product_exact_on_merged_grid() {
        let p = parabola();
        // q = t on [0, 2), tail 0; <p, q> = int_0^1 t - t^3/2 = 1/2 - 1/8.
        let q = PiecewiseQuadratic::new(
            vec![0.0, 2.0],
            vec![Piece {
                value: 0.0,
                slope: 1.0,
                curvature: 0.0,
            }],
            0.0,
        )
        .unwrap();
        assert!((inner_product(&p, &q) - 0.375).abs() < 1e-15);
        assert!((inner_product(&q, &p) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn inner_product_ignores_nonzero_tail_beyond_support() {
        let p = parabola();
        // r = t^2/2 on [0, 50) with nonzero tail; only [0,1) overlaps p.
        let r = PiecewiseQuadratic::new(
            vec![0.0, 50.0],
            vec![Piece {
                value: 0.0,
                slope: 0.0,
                curvature: 1.0,
            }],
            1250.0,
        )
        .unwrap();
        // int_0^1 (1 - t^2/2) t^2/2 = 1/6 - 1/20.
        assert!((inner_product(&p, &r) - (1.0 / 6.0 - 0.05)).abs() < 1e-15);
    }

    #[test]
    fn moments_exact() {
        let p = parabola();
        // m0 = 1 - 1/6, m1 = 1/2 - 1/8.
        assert!((p.moment(0) - 5.0 / 6.0).abs() < 1e-15);
        assert!((p.moment(1) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn scaling_law_for_norms() {
        let p = parabola();
        let (m, lam) = (3.0, 2.0);
        let s = p.scaled(m, lam);
        // ||m f(lam .)||^2 = m^2 / lam ||f||^2; support shrinks by lam.
        assert!((s.norm_sq() - m * m / lam * p.norm_sq()).abs() < 1e-12);
        assert!((s.support_end() - 0.5).abs() < 1e-15);
        assert!((s.eval(0.3) - m * p.eval(0.6)).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(PiecewiseQuadratic::new(vec![], vec![], 0.0).is_err());
        assert!(PiecewiseQuadratic::new(vec![0.5, 1.0], vec![], 0.0).is_err());
        assert!(PiecewiseQuadratic::new(vec![0.0, 1.0, 1.0], vec![], 0.0).is_err());
        assert!(PiecewiseQuadratic::new(vec![0.0, 1.0], vec![], 0.0).is_err());
    }

    #[test]
    fn simpson_handles_nonpolynomial_integrands() {
        let val = adaptive_simpson(&|t: f64| t.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((val - 2.0).abs() < 1e-10);
    }
}
