use crate::error::{Error, Result};
use crate::fit::{fit_gaussian, FWHM_PER_SIGMA};
use crate::map::{ComplexMap2D, MapAxis};
use crate::phasematching::halfmax_width;

/// Relative difference between the two FWHM estimators above which both are flagged.
pub const DISAGREEMENT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FwhmMethod {
    #[default]
    GaussianFit,
    HalfMax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwhmEstimate {
    /// Width from the requested method, Hz.
    pub value: f64,
    pub method: FwhmMethod,
    pub gaussian_fit: Option<f64>,
    pub halfmax: f64,
    /// Peak position from the Gaussian fit if it converged, otherwise the
    /// sample maximum.
    pub centre: f64,
}

impl FwhmEstimate {
    /// True when both estimators exist and differ by more than [`DISAGREEMENT_THRESHOLD`].
    pub fn disagreement(&self) -> bool {
        self.gaussian_fit
            .is_some_and(|g| ((g - self.halfmax) / self.halfmax).abs() > DISAGREEMENT_THRESHOLD)
    }
}

/// FWHM of a sampled single-peaked spectrum.
pub fn spectrum_fwhm(x: &[f64], y: &[f64], method: FwhmMethod) -> Result<FwhmEstimate> {
    if x.len() != y.len() || x.len() < 5 {
        return Err(Error::FitFailed("need at least 5 samples".into()));
    }
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(ymax > 0.0 && ymax.is_finite()) {
        return Err(Error::FitFailed("spectrum has no positive peak".into()));
    }
    // Everything above half maximum must form one contiguous run.
    let above: Vec<usize> = (0..y.len()).filter(|&i| y[i] >= 0.5 * ymax).collect();
    if above.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::FitFailed("spectrum has more than one peak above half maximum".into()));
    }
    let halfmax = halfmax_width(x, y)
        .ok_or_else(|| Error::FitFailed("half-maximum crossing lies outside the sampled range".into()))?;
    let fit = fit_gaussian(x, y, x[imax], halfmax / FWHM_PER_SIGMA);
    let gaussian_fit = fit.as_ref().ok().map(|f| f.fwhm());
    let value = match method {
        FwhmMethod::HalfMax => halfmax,
        FwhmMethod::GaussianFit => fit.as_ref().map_err(Clone::clone)?.fwhm(),
    };
    Ok(FwhmEstimate {
        value,
        method,
        gaussian_fit,
        halfmax,
        centre: fit.map(|f| f.centre).unwrap_or(x[imax]),
    })
}

/// FWHM (Hz) of the marginal intensity of `map` along `axis`.
pub fn marginal_fwhm(map: &ComplexMap2D, axis: MapAxis, method: FwhmMethod) -> Result<FwhmEstimate> {
    let x = map.axis(axis).frequencies_hz();
    let y = map.marginal(axis);
    spectrum_fwhm(&x, &y, method)
}

/// Ratio of input to output bandwidth.
pub fn compression_factor(input_fwhm_hz: f64, output_fwhm_hz: f64) -> Result<f64> {
    for (name, v) in [("input_fwhm", input_fwhm_hz), ("output_fwhm", output_fwhm_hz)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, format!("{v} Hz must be positive")));
        }
    }
    Ok(input_fwhm_hz / output_fwhm_hz)
}

/// Compression factor and its first-order propagated standard uncertainty
/// from independent input and output uncertainties.
pub fn compression_factor_with_uncertainty(
    input_fwhm_hz: f64,
    input_sigma_hz: f64,
    output_fwhm_hz: f64,
    output_sigma_hz: f64,
) -> Result<(f64, f64)> {
    let r = compression_factor(input_fwhm_hz, output_fwhm_hz)?;
    let rel = (input_sigma_hz / input_fwhm_hz).hypot(output_sigma_hz / output_fwhm_hz);
    Ok((r, r * rel))
}
