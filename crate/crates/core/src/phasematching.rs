//! Quasi-phasematched three-wave mismatch, poling-period selection and the
//! phasematching amplitude over the (input × pump) plane.
//!
//! Conventions: `Δk = k_out − k_in − k_pump − G` with `k = 2π n(λ, T) / λ` and
//! grating wavevector `G = ±m·2π/Λ`. The grating sign follows the material
//! mismatch at the design point so that `Λ > 0` for every process. The
//! phasematching amplitude is `sinc(ΔkL/2)·exp(iΔkL/2)` with
//! `sinc(x) = sin(x)/x`.

use crate::dispersion::MaterialModel;
use crate::error::{Error, Result};
use crate::map::ComplexMap2D;
use crate::units::{hz_to_nm, nm_to_hz, sum_wavelength_nm, SpectralGrid, Temperature, Wavelength};
use nalgebra::Complex;
use std::f64::consts::PI;

/// Physical search bracket for poling periods, metres.
pub const POLING_PERIOD_BRACKET_M: (f64, f64) = (0.1e-6, 1e-3);

/// Relative FWHM change at which [`phasematching_output_fwhm`] stops refining.
pub const FWHM_CONVERGENCE: f64 = 1e-3;
const MAX_REFINEMENTS: usize = 12;

/// Argument where `sinc²(x) = 1/2`.
pub const SINC2_HALF_MAX_ARG: f64 = 1.391_557_378_251_510_5;

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sinc(ΔkL/2)·exp(iΔkL/2)`.
pub fn phasematching_amplitude(delta_k: f64, length_m: f64) -> Complex<f64> {
    let x = 0.5 * delta_k * length_m;
    Complex::from_polar(sinc(x), x)
}

/// `k_high − k_a − k_b` with the high-frequency wavelength fixed by energy
/// conservation.
pub(crate) fn material_mismatch(
    a: &MaterialModel,
    lambda_a_nm: f64,
    b: &MaterialModel,
    lambda_b_nm: f64,
    high: &MaterialModel,
    t: Temperature,
) -> Result<f64> {
    let la = Wavelength::from_nm(lambda_a_nm)?;
    let lb = Wavelength::from_nm(lambda_b_nm)?;
    let lh = Wavelength::from_nm(sum_wavelength_nm(lambda_a_nm, lambda_b_nm))?;
    Ok(high.wavenumber(lh, t)? - a.wavenumber(la, t)? - b.wavenumber(lb, t)?)
}

/// Uniform poling grating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grating {
    pub period_m: f64,
    pub order: u32,
    /// `+1` or `-1`, the direction of the material mismatch it compensates.
    pub sign: f64,
}

impl Grating {
    pub fn wavevector(&self) -> f64 {
        self.sign * self.order as f64 * 2.0 * PI / self.period_m
    }

    /// The period that cancels `material_mismatch` at order `order`.
    ///
    /// `|Δk_mat| − m·2π/Λ` is monotone in Λ, so the root is unique when it
    /// lies inside [`POLING_PERIOD_BRACKET_M`]; it is evaluated in closed form.
    pub fn solve(material_mismatch: f64, order: u32) -> Result<Self> {
        check_order(order)?;
        let g = order as f64 * 2.0 * PI;
        let residual = |period: f64| material_mismatch.abs() - g / period;
        let (lo, hi) = POLING_PERIOD_BRACKET_M;
        if !(residual(lo) < 0.0 && residual(hi) > 0.0) {
            return Err(Error::NoRoot(format!(
                "phase mismatch {material_mismatch:e} 1/m has no grating period in [{lo:e}, {hi:e}] m at order {order}"
            )));
        }
        Ok(Self {
            period_m: g / material_mismatch.abs(),
            order,
            sign: material_mismatch.signum(),
        })
    }
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 || order % 2 == 0 {
        return Err(Error::invalid("qpm_order", format!("{order} is not an odd positive integer")));
    }
    Ok(())
}

fn check_length(length_m: f64) -> Result<()> {
    if !(length_m.is_finite() && length_m > 0.0) {
        return Err(Error::invalid("length", format!("{length_m} m must be positive")));
    }
    Ok(())
}

/// Sum-frequency conversion process: input + pump → output.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub input: MaterialModel,
    pub pump: MaterialModel,
    pub output: MaterialModel,
    length_m: f64,
    temperature: Temperature,
    qpm_order: u32,
    lambda_in: Wavelength,
    lambda_pump: Wavelength,
    grating: Option<Grating>,
}

impl ProcessSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        input: MaterialModel,
        pump: MaterialModel,
        output: MaterialModel,
        length_m: f64,
        temperature: Temperature,
        qpm_order: u32,
        lambda_in: Wavelength,
        lambda_pump: Wavelength,
    ) -> Result<Self> {
        check_length(length_m)?;
        check_order(qpm_order)?;
        let spec = Self {
            input,
            pump,
            output,
            length_m,
            temperature,
            qpm_order,
            lambda_in,
            lambda_pump,
            grating: None,
        };
        spec.centre_material_mismatch()?;
        Ok(spec)
    }

    /// Uses a given poling period; the grating direction follows the centre mismatch.
    pub fn with_poling_period(mut self, period_m: f64) -> Result<Self> {
        if !(period_m.is_finite() && period_m > 0.0) {
            return Err(Error::invalid("poling_period", format!("{period_m} m must be positive")));
        }
        let sign = self.centre_material_mismatch()?.signum();
        self.grating = Some(Grating {
            period_m,
            order: self.qpm_order,
            sign,
        });
        Ok(self)
    }

    /// Sets the poling period that phasematches the centre wavelengths.
    pub fn solved(mut self) -> Result<Self> {
        self.grating = Some(Grating::solve(self.centre_material_mismatch()?, self.qpm_order)?);
        Ok(self)
    }

    pub fn with_length(mut self, length_m: f64) -> Result<Self> {
        check_length(length_m)?;
        self.length_m = length_m;
        Ok(self)
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn temperature(&self) -> Temperature {
        self.temperature
    }

    pub fn qpm_order(&self) -> u32 {
        self.qpm_order
    }

    pub fn lambda_in(&self) -> Wavelength {
        self.lambda_in
    }

    pub fn lambda_pump(&self) -> Wavelength {
        self.lambda_pump
    }

    /// Output wavelength from energy conservation at the centre.
    pub fn lambda_out(&self) -> Wavelength {
        Wavelength::from_nm(sum_wavelength_nm(self.lambda_in.nm(), self.lambda_pump.nm()))
            .expect("sum of positive wavelengths is positive")
    }

    pub fn grating(&self) -> Option<Grating> {
        self.grating
    }

    pub fn poling_period_m(&self) -> Option<f64> {
        self.grating.map(|g| g.period_m)
    }

    fn centre_material_mismatch(&self) -> Result<f64> {
        material_mismatch(
            &self.input,
            self.lambda_in.nm(),
            &self.pump,
            self.lambda_pump.nm(),
            &self.output,
            self.temperature,
        )
    }
}

/// Wavevector mismatch in 1/m at the given input and pump wavelengths.
pub fn delta_k(spec: &ProcessSpec, lambda_in: Wavelength, lambda_pump: Wavelength) -> Result<f64> {
    let grating = spec
        .grating
        .ok_or_else(|| Error::invalid("poling_period", "not set; solve it or supply one"))?;
    let km = material_mismatch(
        &spec.input,
        lambda_in.nm(),
        &spec.pump,
        lambda_pump.nm(),
        &spec.output,
        spec.temperature,
    )?;
    Ok(km - grating.wavevector())
}

/// Poling period in metres that phasematches the centre wavelengths of `spec`.
pub fn solve_poling_period(spec: &ProcessSpec) -> Result<f64> {
    Ok(Grating::solve(spec.centre_material_mismatch()?, spec.qpm_order)?.period_m)
}

/// Phasematching amplitude at one (input, pump) wavelength pair.
pub fn phasematching_value(spec: &ProcessSpec, lambda_in: Wavelength, lambda_pump: Wavelength) -> Result<Complex<f64>> {
    Ok(phasematching_amplitude(delta_k(spec, lambda_in, lambda_pump)?, spec.length_m))
}

/// Phasematching amplitude over input rows and pump columns.
pub fn phasematching_map(spec: &ProcessSpec, grid_in: &SpectralGrid, grid_pump: &SpectralGrid) -> Result<ComplexMap2D> {
    let spec = if spec.grating.is_some() { spec.clone() } else { spec.clone().solved()? };
    ComplexMap2D::from_fn(grid_in.clone(), grid_pump.clone(), |i, j| {
        phasematching_value(
            &spec,
            Wavelength::from_nm(grid_in.wavelength_nm_at(i))?,
            Wavelength::from_nm(grid_pump.wavelength_nm_at(j))?,
        )
    })
}

/// `|phasematching|²` along the output frequency at the fixed centre input,
/// with the pump following energy conservation. Offsets are in Hz.
fn output_cut(spec: &ProcessSpec, offset_hz: f64) -> Result<f64> {
    let f_in = spec.lambda_in.to_frequency().hz();
    let f_out = spec.lambda_out().to_frequency().hz() + offset_hz;
    let lp = Wavelength::from_nm(hz_to_nm(f_out - f_in))?;
    Ok(phasematching_value(spec, spec.lambda_in, lp)?.norm_sqr())
}

/// Full width at half maximum of a sampled single peak by linear
/// interpolation of the half-maximum crossings.
pub(crate) fn halfmax_width(x: &[f64], y: &[f64]) -> Option<f64> {
    let (imax, &ymax) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if ymax <= 0.0 {
        return None;
    }
    let half = 0.5 * ymax;
    let mut left = None;
    for i in (0..imax).rev() {
        if y[i] < half {
            left = Some(x[i] + (half - y[i]) / (y[i + 1] - y[i]) * (x[i + 1] - x[i]));
            break;
        }
    }
    let mut right = None;
    for i in imax + 1..y.len() {
        if y[i] < half {
            right = Some(x[i - 1] + (y[i - 1] - half) / (y[i - 1] - y[i]) * (x[i] - x[i - 1]));
            break;
        }
    }
    Some(right? - left?)
}

/// Output-frequency FWHM (Hz) of `|phasematching|²` at the central input.
///
/// The 1-D cut is resampled with doubled density until the width changes by
/// less than [`FWHM_CONVERGENCE`].
pub fn phasematching_output_fwhm(spec: &ProcessSpec) -> Result<f64> {
    let spec = if spec.grating.is_some() { spec.clone() } else { spec.clone().solved()? };
    // Slope of Δk along the cut sets the expected width.
    let h = 1e9;
    let dk = |off: f64| -> Result<f64> {
        let f_in = spec.lambda_in.to_frequency().hz();
        let f_out = spec.lambda_out().to_frequency().hz() + off;
        delta_k(&spec, spec.lambda_in, Wavelength::from_nm(hz_to_nm(f_out - f_in))?)
    };
    let slope = (dk(h)? - dk(-h)?) / (2.0 * h);
    let centre_offset = -dk(0.0)? / slope;
    let hwhm_guess = 2.0 * SINC2_HALF_MAX_ARG / (spec.length_m * slope.abs());
    if !hwhm_guess.is_finite() || hwhm_guess <= 0.0 {
        return Err(Error::NumericalFailure("phase mismatch does not vary along the output axis".into()));
    }
    let half_span = 4.0 * hwhm_guess;
    let mut n = 65;
    let mut previous: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        let x: Vec<f64> = (0..n)
            .map(|k| centre_offset - half_span + 2.0 * half_span * k as f64 / (n - 1) as f64)
            .collect();
        let y = x.iter().map(|&off| output_cut(&spec, off)).collect::<Result<Vec<_>>>()?;
        let width = halfmax_width(&x, &y)
            .ok_or_else(|| Error::NumericalFailure("half-maximum crossing outside the sampled cut".into()))?;
        if let Some(prev) = previous {
            last_change = ((width - prev) / prev).abs();
            if last_change < FWHM_CONVERGENCE {
                return Ok(width);
            }
        }
        previous = Some(width);
        n = 2 * (n - 1) + 1;
    }
    Err(Error::GridNotConverged {
        refinements: MAX_REFINEMENTS,
        last_change,
    })
}

/// Frequency-space helpers for building grids around a spec.
impl ProcessSpec {
    pub fn input_frequency_hz(&self) -> f64 {
        nm_to_hz(self.lambda_in.nm())
    }

    pub fn output_frequency_hz(&self) -> f64 {
        nm_to_hz(self.lambda_out().nm())
    }
}

#[cfg(test)]
mod tests;
