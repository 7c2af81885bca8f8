//! Function estimation on the regular design: trigonometric basis, Sobolev
//! ellipsoids, truncation bias, the projection estimator, and adaptive
//! (thresholding) estimators that do not need the smoothness parameter.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::regression::TuningParameters;
use crate::{Error, Result};

/// Function represented by coefficients on the trigonometric basis. The
/// L2 norm on the unit interval equals the Euclidean norm of the coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFunction {
    pub coefficients: Vec<f64>,
    pub basis_size: usize,
}

impl FourierFunction {
    pub fn new(coefficients: Vec<f64>) -> Self {
        let basis_size = coefficients.len();
        FourierFunction {
            coefficients,
            basis_size,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(idx, c)| c * trig_basis_eval(idx + 1, x).expect("index >= 1"))
            .sum()
    }
}

/// Smoothness class parameters: all coefficient vectors with weighted norm
/// at most `q_budget` at smoothness `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSpec {
    pub beta: f64,
    pub q_budget: f64,
}

impl SobolevSpec {
    pub fn new(beta: f64, q_budget: f64) -> Result<Self> {
        if beta <= 0.5 {
            return Err(Error::invalid("beta must exceed 1/2"));
        }
        if q_budget <= 0.0 {
            return Err(Error::invalid("q_budget must be positive"));
        }
        Ok(SobolevSpec { beta, q_budget })
    }
}

/// `phi_1 = 1`, `phi_{2k}(x) = sqrt(2) cos(2 pi k x)`,
/// `phi_{2k+1}(x) = sqrt(2) sin(2 pi k x)`.
pub fn trig_basis_eval(j: usize, x: f64) -> Result<f64> {
    if j == 0 {
        return Err(Error::invalid("basis index starts at 1"));
    }
    if j == 1 {
        return Ok(1.0);
    }
    let k = (j / 2) as f64;
    let angle = 2.0 * std::f64::consts::PI * k * x;
    let val = if j % 2 == 0 {
        2f64.sqrt() * angle.cos()
    } else {
        2f64.sqrt() * angle.sin()
    };
    Ok(val)
}

/// Ellipsoid weight `a_j`: `j^beta` for even `j`, `(j-1)^beta` for odd `j`.
/// The formula gives `a_1 = 0`; callers that need a budgeted first
/// coefficient (e.g. [`ellipsoid_norm`]) substitute weight 1 there.
pub fn sobolev_weight(j: usize, beta: f64) -> f64 {
    let base = if j % 2 == 0 { j as f64 } else { (j - 1) as f64 };
    base.powf(beta)
}

/// Weighted squared norm `theta_1^2 + sum_{j>=2} a_j^2 theta_j^2`. The first
/// coefficient enters with weight 1 so membership in the ellipsoid stays a
/// bounded condition.
pub fn ellipsoid_norm(theta: &[f64], beta: f64) -> f64 {
    theta
        .iter()
        .enumerate()
        .map(|(idx, t)| {
            let w = if idx == 0 {
                1.0
            } else {
                sobolev_weight(idx + 1, beta)
            };
            w * w * t * t
        })
        .sum()
}

/// Worst-case squared bias of truncating at level `m`: `Q m^{-2 beta}`.
pub fn truncation_bias_bound(spec: &SobolevSpec, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("truncation level must be >= 1"));
    }
    Ok(spec.q_budget * (m as f64).powf(-2.0 * spec.beta))
}

/// First `m` trigonometric coefficients `(Phi^T y) / n` of responses on the
/// regular grid `x_i = (i-1)/n`. Uses an FFT once `m` is large; both paths
/// compute the same inner products.
pub fn trig_coefficients(y: &[f64], m: usize) -> Vec<f64> {
    let n = y.len();
    assert!(m < n, "need m <= n - 1 on the regular design");
    if m <= 64 {
        let mut out = vec![0.0; m];
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &yi) in y.iter().enumerate() {
                acc += yi * trig_basis_eval(idx + 1, i as f64 / n as f64).unwrap();
            }
            *slot = acc / n as f64;
        }
        return out;
    }

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let scale = 2f64.sqrt() / n as f64;
    let mut out = vec![0.0; m];
    for (idx, slot) in out.iter_mut().enumerate() {
        let j = idx + 1;
        *slot = if j == 1 {
            buf[0].re / n as f64
        } else {
            let k = j / 2;
            if j % 2 == 0 {
                scale * buf[k].re
            } else {
                -scale * buf[k].im
            }
        };
    }
    out
}

/// Least squares on the first `M = ceil(n^(1/(2 beta + 1)))` basis functions
/// of the regular design, which reduces to the direct coefficients
/// `(Phi^T y) / n`.
pub fn projection_estimator(y: &[f64], beta: f64) -> Result<FourierFunction> {
    if beta <= 0.5 {
        return Err(Error::invalid("beta must exceed 1/2"));
    }
    let n = y.len();
    let m = (n as f64).powf(1.0 / (2.0 * beta + 1.0)).ceil() as usize;
    if m >= n {
        return Err(Error::invalid(format!(
            "projection level M={m} needs M <= n-1 (n={n})"
        )));
    }
    Ok(FourierFunction::new(trig_coefficients(y, m)))
}

/// Which penalized estimator drives the adaptive thresholding rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdaptiveMethod {
    /// l0 penalty: hard thresholding of the coefficients at `tau`.
    Bic,
    /// l1 penalty: soft thresholding of the coefficients at `tau`.
    Lasso,
}

/// Thresholding estimator over the first `n - 1` basis functions. Under the
/// regular design the penalized estimators reduce to coordinatewise rules on
/// `(Phi^T y) / n`, so no smoothness input is needed.
pub fn adaptive_estimator(
    y: &[f64],
    method: AdaptiveMethod,
    tuning: &TuningParameters,
) -> Result<FourierFunction> {
    let n = y.len();
    if n < 4 {
        return Err(Error::invalid("need at least 4 observations"));
    }
    let raw = trig_coefficients(y, n - 1);
    let tau = tuning.tau;
    let coefficients = raw
        .iter()
        .map(|&c| match method {
            AdaptiveMethod::Bic => {
                if c.abs() > tau {
                    c
                } else {
                    0.0
                }
            }
            AdaptiveMethod::Lasso => c.signum() * (c.abs() - tau).max(0.0),
        })
        .collect();
    Ok(FourierFunction::new(coefficients))
}

/// Squared L2 distance on the unit interval between two coefficient
/// functions, i.e. the
/// squared Euclidean distance after zero-padding to a common length.
pub fn function_l2_error(est: &FourierFunction, truth: &FourierFunction) -> f64 {
    let len = est.coefficients.len().max(truth.coefficients.len());
    (0..len)
        .map(|j| {
            let a = est.coefficients.get(j).copied().unwrap_or(0.0);
            let b = truth.coefficients.get(j).copied().unwrap_or(0.0);
            (a - b) * (a - b)
        })
        .sum()
}
