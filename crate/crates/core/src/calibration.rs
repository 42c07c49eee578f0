//! Steering-function estimation and channel-comparison metrics.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Cubic steering function `δ_SWA = c0 + c1·δ + c2·δ² + c3·δ³`, mapping a
/// wheel angle `δ` (rad) to a steering wheel angle (deg).
///
/// The polynomial is strictly increasing on its declared wheel-angle range,
/// which makes it invertible there.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringPolynomial {
    coeffs: [f64; 4],
    range: (f64, f64),
}

impl SteeringPolynomial {
    pub fn new(coeffs: [f64; 4], range: (f64, f64)) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "steering coefficients",
            });
        }
        let (lo, hi) = range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(
                "steering range must satisfy min < max",
            ));
        }
        let poly = SteeringPolynomial { coeffs, range };
        if poly.min_slope() <= 0.0 {
            return Err(Error::NonMonotoneSteering);
        }
        Ok(poly)
    }

    /// A linear steering function `δ_SWA = ratio·δ`.
    pub fn linear(ratio: f64, range: (f64, f64)) -> Result<Self> {
        Self::new([0.0, ratio, 0.0, 0.0], range)
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.coeffs
    }

    /// Declared wheel-angle range `(δ_min, δ_max)` in rad.
    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn eval(&self, delta: f64) -> f64 {
        let [c0, c1, c2, c3] = self.coeffs;
        c0 + delta * (c1 + delta * (c2 + delta * c3))
    }

    pub fn derivative(&self, delta: f64) -> f64 {
        let [_, c1, c2, c3] = self.coeffs;
        c1 + delta * (2.0 * c2 + delta * 3.0 * c3)
    }

    /// Steering wheel angles reachable on the declared range.
    pub fn image(&self) -> (f64, f64) {
        (self.eval(self.range.0), self.eval(self.range.1))
    }

    /// Smallest derivative over the declared range.
    fn min_slope(&self) -> f64 {
        let (lo, hi) = self.range;
        let mut m = self.derivative(lo).min(self.derivative(hi));
        let [_, _, c2, c3] = self.coeffs;
        if c3 != 0.0 {
            let vertex = -c2 / (3.0 * c3);
            if vertex > lo && vertex < hi {
                m = m.min(self.derivative(vertex));
            }
        }
        m
    }

    /// Wheel angle `δ` in the declared range with `eval(δ) = delta_swa`.
    ///
    /// Safeguarded Newton iteration: Newton steps that leave the current
    /// bracket are replaced by bisection.
    pub fn invert(&self, delta_swa: f64) -> Result<f64> {
        if !delta_swa.is_finite() {
            return Err(Error::NonFinite {
                what: "steering wheel angle",
            });
        }
        let (lo_val, hi_val) = self.image();
        let slack = 1e-12 * lo_val.abs().max(hi_val.abs()).max(1.0);
        if delta_swa < lo_val - slack || delta_swa > hi_val + slack {
            return Err(Error::OutOfRange {
                value: delta_swa,
                min: lo_val,
                max: hi_val,
            });
        }
        let (mut a, mut b) = self.range;
        if delta_swa <= lo_val {
            return Ok(a);
        }
        if delta_swa >= hi_val {
            return Ok(b);
        }
        let mut x = a + (b - a) * (delta_swa - lo_val) / (hi_val - lo_val);
        for _ in 0..200 {
            let f = self.eval(x) - delta_swa;
            if f == 0.0 {
                return Ok(x);
            }
            if f < 0.0 {
                a = x;
            } else {
                b = x;
            }
            let newton = x - f / self.derivative(x);
            let next = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            let step = (next - x).abs();
            x = next;
            if step <= 1e-16 * x.abs().max(1.0) || b - a <= 1e-15 {
                break;
            }
        }
        Ok(x)
    }
}

/// Which wheel a steering-angle observation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WheelSide {
    Left,
    /// Mirrored into the left-wheel function as `(−δ, −δ_SWA)`.
    Right,
    /// Virtual center wheel; used as is.
    Center,
}

/// One observed pair of wheel angle (rad) and steering wheel angle (deg).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringSample {
    pub delta_wheel: f64,
    pub delta_swa: f64,
    pub side: WheelSide,
}

impl SteeringSample {
    pub fn new(delta_wheel: f64, delta_swa: f64, side: WheelSide) -> Self {
        SteeringSample {
            delta_wheel,
            delta_swa,
            side,
        }
    }

    /// The pair as it enters the pooled fit.
    pub fn pooled(&self) -> (f64, f64) {
        match self.side {
            WheelSide::Right => (-self.delta_wheel, -self.delta_swa),
            WheelSide::Left | WheelSide::Center => (self.delta_wheel, self.delta_swa),
        }
    }
}

/// Ordinary least-squares cubic of `δ_SWA` over `δ`, with right-wheel samples
/// pooled through the left/right symmetry. The declared range of the result
/// is the span of the pooled wheel angles.
pub fn fit_steering(samples: &[SteeringSample]) -> Result<SteeringPolynomial> {
    let pooled: Vec<(f64, f64)> = samples.iter().map(SteeringSample::pooled).collect();
    if pooled.iter().any(|(d, s)| !d.is_finite() || !s.is_finite()) {
        return Err(Error::NonFinite {
            what: "steering samples",
        });
    }
    let mut abscissae: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    abscissae.sort_by(f64::total_cmp);
    abscissae.dedup();
    if abscissae.len() < 4 {
        return Err(Error::DegenerateDesign);
    }
    let lo = abscissae[0];
    let hi = abscissae[abscissae.len() - 1];
    // fit in a scaled variable u = δ / scale to keep the Vandermonde columns comparable
    let scale = lo.abs().max(hi.abs());
    let rows: Vec<[f64; 4]> = pooled
        .iter()
        .map(|&(d, _)| {
            let u = d / scale;
            [1.0, u, u * u, u * u * u]
        })
        .collect();
    let rhs: Vec<f64> = pooled.iter().map(|p| p.1).collect();
    let scaled = least_squares_4(&rows, &rhs)?;
    let mut coeffs = [0.0; 4];
    let mut s = 1.0;
    for (c, a) in coeffs.iter_mut().zip(scaled) {
        *c = a / s;
        s *= scale;
    }
    SteeringPolynomial::new(coeffs, (lo, hi))
}

/// Solves `min ‖A·x − b‖` for a tall `n × 4` system by Householder QR.
fn least_squares_4(rows: &[[f64; 4]], rhs: &[f64]) -> Result<[f64; 4]> {
    let n = rows.len();
    if n < 4 {
        return Err(Error::DegenerateDesign);
    }
    let mut a: Vec<[f64; 4]> = rows.to_vec();
    let mut b: Vec<f64> = rhs.to_vec();
    let mut diag = [0.0f64; 4];
    for k in 0..4 {
        let norm = libm::sqrt(a[k..].iter().map(|r| r[k] * r[k]).sum::<f64>());
        if norm == 0.0 {
            return Err(Error::DegenerateDesign);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        // v = x − alpha·e1, stored in place of column k
        a[k][k] -= alpha;
        let vnorm2: f64 = a[k..].iter().map(|r| r[k] * r[k]).sum();
        if vnorm2 > 0.0 {
            for j in (k + 1)..4 {
                let dot: f64 = a[k..].iter().map(|r| r[k] * r[j]).sum();
                let f = 2.0 * dot / vnorm2;
                for r in a[k..].iter_mut() {
                    r[j] -= f * r[k];
                }
            }
            let dot: f64 = a[k..].iter().zip(&b[k..]).map(|(r, bi)| r[k] * bi).sum();
            let f = 2.0 * dot / vnorm2;
            for (r, bi) in a[k..].iter().zip(b[k..].iter_mut()) {
                *bi -= f * r[k];
            }
        }
        diag[k] = alpha;
    }
    let largest = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if diag.iter().any(|d| d.abs() <= 1e-12 * largest) {
        return Err(Error::DegenerateDesign);
    }
    let mut x = [0.0; 4];
    for k in (0..4).rev() {
        let mut s = b[k];
        for j in (k + 1)..4 {
            s -= a[k][j] * x[j];
        }
        x[k] = s / diag[k];
    }
    Ok(x)
}

/// Agreement metrics between a reference channel and its estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelComparison {
    /// Mean of `estimate − reference`.
    pub mu: f64,
    /// Population standard deviation (1/N) of `estimate − reference`.
    pub sigma: f64,
    /// Scale `m` minimizing `Σ (m·reference − estimate)²`.
    pub slope: f64,
    pub samples: usize,
}

/// Mean error, error spread and best-fit scale of `estimate` against
/// `reference`, both sampled on the same grid.
///
/// Returns [`Error::ZeroReferenceEnergy`] (carrying `mu` and `sigma`) when
/// the reference is identically zero.
pub fn compare_channels(reference: &[f64], estimate: &[f64]) -> Result<ChannelComparison> {
    if reference.len() != estimate.len() {
        return Err(Error::InvalidParameter("channels differ in length"));
    }
    let n = reference.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if reference.iter().chain(estimate).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "channel samples",
        });
    }
    let count = n as f64;
    let mu = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| e - r)
        .sum::<f64>()
        / count;
    let var = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| {
            let d = (e - r) - mu;
            d * d
        })
        .sum::<f64>()
        / count;
    let sigma = libm::sqrt(var);
    let energy: f64 = reference.iter().map(|r| r * r).sum();
    if energy == 0.0 {
        return Err(Error::ZeroReferenceEnergy { mu, sigma });
    }
    let cross: f64 = reference.iter().zip(estimate).map(|(r, e)| r * e).sum();
    Ok(ChannelComparison {
        mu,
        sigma,
        slope: cross / energy,
        samples: n,
    })
}
