//! Penalized cubic smoothing splines with knots at the sample times.
//!
//! For samples `(t_i, y_i)` and a penalty weight `λ ≥ 0` the fitted curve `g`
//! minimizes
//!
//! ```text
//! Σ (y_i − g(t_i))² + λ ∫ g''(t)² dt
//! ```
//!
//! The minimizer is a natural cubic spline (`g'' = 0` at both ends). It is
//! computed with the Reinsch scheme: with `Q` the `n × (n−2)` second-difference
//! matrix and `R` the `(n−2) × (n−2)` tridiagonal Gram matrix, the interior
//! second derivatives `γ` solve the pentadiagonal system
//! `(R + λ·QᵀQ) γ = Qᵀy`, and the knot values are `g = y − λ·Q·γ`.
//! `λ = 0` yields the natural interpolating spline.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Minimum number of samples accepted by [`CubicSpline::fit`].
pub const MIN_SAMPLES: usize = 4;

/// Value, first and second derivative of a spline at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplinePoint {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Piecewise cubic polynomial, `C²` across every interior knot.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    /// `[a, b, c, d]` per segment, in powers of `t − knots[i]`.
    coeffs: Vec<[f64; 4]>,
}

impl CubicSpline {
    pub fn fit(times: &[f64], values: &[f64], lambda: f64) -> Result<Self> {
        let n = times.len();
        if values.len() != n {
            return Err(Error::InvalidParameter("times and values differ in length"));
        }
        if n < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                needed: MIN_SAMPLES,
                got: n,
            });
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(
                "smoothing weight must be finite and nonnegative",
            ));
        }
        if times.iter().chain(values).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "spline samples",
            });
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTime { index: i + 1 });
        }

        let h: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        let m = n - 2;

        // column j of Q touches rows j, j+1, j+2
        let q = |j: usize| -> [f64; 3] {
            let (a, b) = (1.0 / h[j], 1.0 / h[j + 1]);
            [a, -a - b, b]
        };

        // banded storage: band[i] = [A(i,i), A(i,i−1), A(i,i−2)]
        let mut band = vec![[0.0f64; 3]; m];
        let mut rhs = vec![0.0f64; m];
        for j in 0..m {
            let qj = q(j);
            band[j][0] =
                (h[j] + h[j + 1]) / 3.0 + lambda * (qj[0] * qj[0] + qj[1] * qj[1] + qj[2] * qj[2]);
            if j >= 1 {
                let qp = q(j - 1);
                // rows shared by columns j−1 and j: j, j+1
                band[j][1] = h[j] / 6.0 + lambda * (qp[1] * qj[0] + qp[2] * qj[1]);
            }
            if j >= 2 {
                let qpp = q(j - 2);
                // shared row: j
                band[j][2] = lambda * (qpp[2] * qj[0]);
            }
            rhs[j] = qj[0] * values[j] + qj[1] * values[j + 1] + qj[2] * values[j + 2];
        }
        let gamma_inner = solve_pentadiagonal_spd(&band, &rhs)?;

        let mut gamma = vec![0.0f64; n];
        gamma[1..n - 1].copy_from_slice(&gamma_inner);
        let mut g = values.to_vec();
        if lambda > 0.0 {
            for (j, &gj) in gamma_inner.iter().enumerate() {
                let qj = q(j);
                for (k, qk) in qj.iter().enumerate() {
                    g[j + k] -= lambda * qk * gj;
                }
            }
        }

        let coeffs = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                [
                    g[i],
                    (g[i + 1] - g[i]) / hi - hi * (2.0 * gamma[i] + gamma[i + 1]) / 6.0,
                    0.5 * gamma[i],
                    (gamma[i + 1] - gamma[i]) / (6.0 * hi),
                ]
            })
            .collect();
        Ok(CubicSpline {
            knots: times.to_vec(),
            coeffs,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn segment_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Polynomial coefficients of segment `i` in powers of `t − knots[i]`.
    pub fn segment(&self, i: usize) -> [f64; 4] {
        self.coeffs[i]
    }

    /// Index of the segment containing `t`; the right end belongs to the last segment.
    pub fn segment_index(&self, t: f64) -> Option<usize> {
        if !(t >= self.start() && t <= self.end()) {
            return None;
        }
        let idx = self.knots.partition_point(|&k| k <= t);
        Some(idx.saturating_sub(1).min(self.coeffs.len() - 1))
    }

    pub fn eval(&self, t: f64) -> Option<SplinePoint> {
        self.segment_index(t).map(|i| self.eval_segment(i, t))
    }

    /// Evaluates segment `i`'s polynomial at `t` (no domain check).
    pub fn eval_segment(&self, i: usize, t: f64) -> SplinePoint {
        let [a, b, c, d] = self.coeffs[i];
        let x = t - self.knots[i];
        SplinePoint {
            value: a + x * (b + x * (c + x * d)),
            d1: b + x * (2.0 * c + x * 3.0 * d),
            d2: 2.0 * c + 6.0 * d * x,
        }
    }

    /// Largest mismatch of value, first and second derivative between the
    /// left and right polynomial over all interior knots.
    pub fn max_knot_discontinuity(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 1..self.coeffs.len() {
            let left = self.eval_segment(i - 1, self.knots[i]);
            let right = self.eval_segment(i, self.knots[i]);
            worst = worst
                .max((left.value - right.value).abs())
                .max((left.d1 - right.d1).abs())
                .max((left.d2 - right.d2).abs());
        }
        worst
    }
}

/// Cholesky solve for a symmetric positive definite matrix with half
/// bandwidth 2, stored as `[A(i,i), A(i,i−1), A(i,i−2)]` per row.
fn solve_pentadiagonal_spd(band: &[[f64; 3]], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = band.len();
    // l[i] = [L(i,i), L(i,i−1), L(i,i−2)]
    let mut l = vec![[0.0f64; 3]; m];
    for i in 0..m {
        if i >= 2 {
            l[i][2] = band[i][2] / l[i - 2][0];
        }
        if i >= 1 {
            let mut s = band[i][1];
            if i >= 2 {
                s -= l[i][2] * l[i - 1][1];
            }
            l[i][1] = s / l[i - 1][0];
        }
        let d = band[i][0] - l[i][1] * l[i][1] - l[i][2] * l[i][2];
        if !(d > 0.0) {
            return Err(Error::InvalidParameter(
                "spline system is not positive definite",
            ));
        }
        l[i][0] = libm::sqrt(d);
    }
    let mut y = vec![0.0f64; m];
    for i in 0..m {
        let mut s = rhs[i];
        if i >= 1 {
            s -= l[i][1] * y[i - 1];
        }
        if i >= 2 {
            s -= l[i][2] * y[i - 2];
        }
        y[i] = s / l[i][0];
    }
    let mut x = vec![0.0f64; m];
    for i in (0..m).rev() {
        let mut s = y[i];
        if i + 1 < m {
            s -= l[i + 1][1] * x[i + 1];
        }
        if i + 2 < m {
            s -= l[i + 2][2] * x[i + 2];
        }
        x[i] = s / l[i][0];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Natural cubic spline through the samples by dense Gaussian elimination
    /// on the moment equations; returns knot first derivatives.
    #[allow(clippy::needless_range_loop)]
    fn dense_natural_spline_slopes(t: &[f64], y: &[f64]) -> Vec<f64> {
        let n = t.len();
        let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
        let mut a = vec![vec![0.0; n + 1]; n];
        a[0][0] = 1.0;
        a[n - 1][n - 1] = 1.0;
        for i in 1..n - 1 {
            a[i][i - 1] = h[i - 1];
            a[i][i] = 2.0 * (h[i - 1] + h[i]);
            a[i][i + 1] = h[i];
            a[i][n] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        let moments: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * moments[i] + moments[i + 1]) / 6.0
                } else {
                    let j = n - 2;
                    (y[j + 1] - y[j]) / h[j] + h[j] * (moments[j] + 2.0 * moments[j + 1]) / 6.0
                }
            })
            .collect()
    }

    #[test]
    fn collinear_samples_have_zero_curvature() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|v| 2.0 * v).collect();
        let s = CubicSpline::fit(&t, &y, 0.0).unwrap();
        for k in 0..1000 {
            let p = s.eval(k as f64 * 0.0099).unwrap();
            assert!(p.d2.abs() < 1e-9);
            assert!((p.d1 - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cubic_interpolation_matches_dense_oracle() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|v| v * v * v).collect();
        let s = CubicSpline::fit(&t, &y, 0.0).unwrap();
        let oracle = dense_natural_spline_slopes(&t, &y);
        for (i, &ti) in t.iter().enumerate() {
            let p = s.eval(ti).unwrap();
            assert!((p.value - y[i]).abs() < 1e-9);
            assert!(
                (p.d1 - oracle[i]).abs() < 1e-9,
                "knot {i}: {} vs {}",
                p.d1,
                oracle[i]
            );
        }
        // away from the natural end conditions the slope is the analytic 3t²
        for &ti in &t[30..=70] {
            let p = s.eval(ti).unwrap();
            assert!((p.d1 - 3.0 * ti * ti).abs() < 1e-9);
        }
    }

    #[test]
    fn continuity_across_knots() {
        let t: Vec<f64> = (0..40)
            .map(|i| i as f64 * 0.13 + (i as f64 * 0.7).sin() * 0.02)
            .collect();
        let y: Vec<f64> = t.iter().map(|v| (v * 1.3).sin() * 5.0).collect();
        for lambda in [0.0, 0.01, 1.0] {
            let s = CubicSpline::fit(&t, &y, lambda).unwrap();
            assert!(s.max_knot_discontinuity() < 1e-9);
        }
    }

    /// Σ residual² + λ∫g''², with the integral done by Simpson's rule
    /// (exact for the piecewise quadratic g''²).
    fn objective(s: &CubicSpline, t: &[f64], y: &[f64], lambda: f64) -> f64 {
        let fit: f64 = t
            .iter()
            .zip(y)
            .map(|(&ti, yi)| (s.eval(ti).unwrap().value - yi).powi(2))
            .sum();
        let mut rough = 0.0;
        for i in 0..s.segment_count() {
            let (a, b) = (t[i], t[i + 1]);
            let f = |x: f64| s.eval_segment(i, x).d2.powi(2);
            rough += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        }
        fit + lambda * rough
    }

    #[test]
    fn smoothing_spline_minimizes_penalized_objective() {
        let t: Vec<f64> = (0..25).map(|i| i as f64 * 0.4).collect();
        let y: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(i, v)| v.cos() + if i % 2 == 0 { 0.1 } else { -0.1 })
            .collect();
        let lambda = 0.3;
        let s = CubicSpline::fit(&t, &y, lambda).unwrap();
        let best = objective(&s, &t, &y, lambda);
        let knot_values: Vec<f64> = t.iter().map(|&ti| s.eval(ti).unwrap().value).collect();
        for k in 0..t.len() {
            for eps in [1e-3, -1e-3] {
                let mut v = knot_values.clone();
                v[k] += eps;
                let other = CubicSpline::fit(&t, &v, 0.0).unwrap();
                assert!(objective(&other, &t, &y, lambda) > best);
            }
        }
    }

    #[test]
    fn heavy_smoothing_tends_to_regression_line() {
        let t: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|v| 1.0 + 0.5 * v + (v * 2.1).sin()).collect();
        let s = CubicSpline::fit(&t, &y, 1e12).unwrap();
        let n = t.len() as f64;
        let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let slope = t
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - mt) * (b - my))
            .sum::<f64>()
            / t.iter().map(|a| (a - mt).powi(2)).sum::<f64>();
        let p = s.eval(10.0).unwrap();
        assert!((p.d1 - slope).abs() < 1e-5);
        assert!((p.value - (my + slope * (10.0 - mt))).abs() < 1e-5);
    }

    #[test]
    fn domain_is_closed_interval() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let s = CubicSpline::fit(&t, &[0.0, 1.0, 0.0, 1.0], 0.0).unwrap();
        assert!(s.eval(3.0).is_some());
        assert!(s.eval(0.0).is_some());
        assert!(s.eval(3.0 + 1e-12).is_none());
        assert!(s.eval(-1e-12).is_none());
        assert!(s.eval(f64::NAN).is_none());
    }

    #[test]
    fn input_validation() {
        assert_eq!(
            CubicSpline::fit(&[0.0, 1.0, 2.0], &[0.0; 3], 0.0),
            Err(Error::TooFewSamples { needed: 4, got: 3 })
        );
        assert_eq!(
            CubicSpline::fit(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4], 0.0),
            Err(Error::NonMonotoneTime { index: 2 })
        );
        assert!(CubicSpline::fit(&[0.0, 1.0, 2.0, 3.0], &[0.0; 4], -1.0).is_err());
    }
}
