//! Gaussian least-squares peak fit (Levenberg–Marquardt).

use crate::error::{Error, Result};
use nalgebra::{Matrix3, Vector3};

/// FWHM of a Gaussian with standard deviation σ is `FWHM_PER_SIGMA·σ`.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub centre: f64,
    pub sigma: f64,
    /// Root-mean-square residual relative to the peak amplitude.
    pub rel_rms: f64,
}

impl GaussianFit {
    pub fn fwhm(&self) -> f64 {
        FWHM_PER_SIGMA * self.sigma
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.centre) / self.sigma;
        self.amplitude * (-0.5 * u * u).exp()
    }
}

/// Fits `A·exp(−(x−μ)²/2σ²)` to samples, starting from `(μ0, σ0)`.
pub fn fit_gaussian(x: &[f64], y: &[f64], centre0: f64, sigma0: f64) -> Result<GaussianFit> {
    if x.len() != y.len() || x.len() < 4 {
        return Err(Error::FitFailed("need at least four samples".into()));
    }
    let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(ymax > 0.0 && sigma0 > 0.0) {
        return Err(Error::FitFailed("no positive peak".into()));
    }
    // Work in scaled coordinates for conditioning.
    let xs: Vec<f64> = x.iter().map(|v| (v - centre0) / sigma0).collect();
    let ys: Vec<f64> = y.iter().map(|v| v / ymax).collect();

    let cost = |p: &Vector3<f64>| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(&u, &v)| {
                let d = (u - p[1]) / p[2];
                let r = p[0] * (-0.5 * d * d).exp() - v;
                r * r
            })
            .sum()
    };

    let mut p = Vector3::new(1.0, 0.0, 1.0);
    let mut lambda = 1e-3;
    let mut current = cost(&p);
    let mut converged = false;
    for _ in 0..500 {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (&u, &v) in xs.iter().zip(&ys) {
            let d = (u - p[1]) / p[2];
            let g = (-0.5 * d * d).exp();
            let r = p[0] * g - v;
            let jac = Vector3::new(g, p[0] * g * d / p[2], p[0] * g * d * d / p[2]);
            jtj += jac * jac.transpose();
            jtr += jac * r;
        }
        let mut damped = jtj;
        for k in 0..3 {
            damped[(k, k)] *= 1.0 + lambda;
        }
        let step = damped
            .lu()
            .solve(&(-jtr))
            .ok_or_else(|| Error::FitFailed("singular normal equations".into()))?;
        let trial = p + step;
        let trial_cost = if trial[2] > 0.0 { cost(&trial) } else { f64::INFINITY };
        if trial_cost < current {
            let rel_step = step.norm() / p.norm();
            p = trial;
            let improvement = current - trial_cost;
            current = trial_cost;
            lambda = (lambda * 0.3).max(1e-12);
            if rel_step < 1e-12 || improvement <= 1e-15 * current.max(1e-300) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                // No descent direction left: at a minimum to working precision.
                converged = true;
                break;
            }
        }
    }
    if !converged || !p.iter().all(|v| v.is_finite()) {
        return Err(Error::FitFailed("Levenberg-Marquardt did not converge".into()));
    }
    Ok(GaussianFit {
        amplitude: p[0] * ymax,
        centre: centre0 + p[1] * sigma0,
        sigma: p[2].abs() * sigma0,
        rel_rms: (current / xs.len() as f64).sqrt(),
    })
}
