//! Joint spectral amplitudes of the photon-pair source and of the converter,
//! Schmidt analysis, marginal spectra and bandwidth figures of merit.
//!
//! All joint amplitudes are sampled on frequency grids. Rows are the signal
//! (source) or input (converter) axis; columns are the idler or output axis.

mod schmidt;
mod spectra;
mod tune;

pub use schmidt::{schmidt, SchmidtDecomposition};
pub use spectra::{
    compression_factor, compression_factor_with_uncertainty, marginal_fwhm, spectrum_fwhm, FwhmEstimate,
    FwhmMethod, DISAGREEMENT_THRESHOLD,
};
pub use tune::{
    minimize_schmidt_number, tune_pump_for_decorrelation, TunedPump, DECORRELATION_THRESHOLD,
};

use crate::dispersion::MaterialModel;
use crate::error::{Error, Result};
use crate::map::ComplexMap2D;
use crate::phasematching::{material_mismatch, phasematching_amplitude, Grating, ProcessSpec};
use crate::units::{hz_to_nm, nm_to_hz, sum_wavelength_nm, SpectralGrid, Temperature, Wavelength};
use nalgebra::Complex;

const TWO_LN2: f64 = 2.0 * std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq)]
pub enum PumpShape {
    Gaussian,
    /// Complex amplitude samples on a frequency grid, linearly interpolated
    /// and zero outside the grid.
    Sampled {
        grid: SpectralGrid,
        amplitude: Vec<Complex<f64>>,
    },
}

/// Spectral amplitude of a pump pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpEnvelope {
    pub shape: PumpShape,
    pub centre: Wavelength,
    /// Intensity FWHM in Hz. Infinite for a flat (unbounded) Gaussian.
    pub fwhm_hz: f64,
}

impl PumpEnvelope {
    /// Gaussian amplitude `exp(−2 ln2 (ν−ν0)²/FWHM²)`, so `|α|²` has the given FWHM.
    pub fn gaussian(centre: Wavelength, fwhm_hz: f64) -> Result<Self> {
        if !(fwhm_hz > 0.0) {
            return Err(Error::invalid("pump_fwhm", format!("{fwhm_hz} Hz must be positive")));
        }
        Ok(Self {
            shape: PumpShape::Gaussian,
            centre,
            fwhm_hz,
        })
    }

    /// A spectrally flat pump, the infinite-bandwidth limit.
    pub fn flat(centre: Wavelength) -> Self {
        Self {
            shape: PumpShape::Gaussian,
            centre,
            fwhm_hz: f64::INFINITY,
        }
    }

    /// User-sampled amplitude, normalized to unit peak magnitude.
    pub fn sampled(grid: SpectralGrid, amplitude: Vec<Complex<f64>>) -> Result<Self> {
        if grid.len() != amplitude.len() || grid.len() < 3 {
            return Err(Error::invalid("pump", "sample count must match a grid of at least 3 points"));
        }
        if grid.unit() != crate::units::AxisUnit::FrequencyHz {
            return Err(Error::invalid("pump", "sampled envelopes need a frequency grid"));
        }
        let peak = amplitude.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(Error::invalid("pump", "envelope has no finite nonzero sample"));
        }
        let amplitude: Vec<Complex<f64>> = amplitude.into_iter().map(|a| a / peak).collect();
        let freqs = grid.frequencies_hz();
        let intensity: Vec<f64> = amplitude.iter().map(|a| a.norm_sqr()).collect();
        let fwhm_hz = crate::phasematching::halfmax_width(&freqs, &intensity)
            .ok_or_else(|| Error::invalid("pump", "envelope half maximum is not inside the grid"))?;
        let (imax, _) = intensity
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        Ok(Self {
            centre: Wavelength::from_nm(hz_to_nm(freqs[imax]))?,
            shape: PumpShape::Sampled { grid, amplitude },
            fwhm_hz,
        })
    }

    pub fn with_fwhm(&self, fwhm_hz: f64) -> Result<Self> {
        match self.shape {
            PumpShape::Gaussian => Self::gaussian(self.centre, fwhm_hz),
            PumpShape::Sampled { .. } => Err(Error::invalid("pump", "cannot rescale a sampled envelope")),
        }
    }

    pub fn amplitude(&self, frequency_hz: f64) -> Complex<f64> {
        match &self.shape {
            PumpShape::Gaussian => {
                let d = (frequency_hz - nm_to_hz(self.centre.nm())) / self.fwhm_hz;
                Complex::new((-TWO_LN2 * d * d).exp(), 0.0)
            }
            PumpShape::Sampled { grid, amplitude } => {
                let step = grid.step();
                let pos = (frequency_hz - grid.start()) / step;
                if pos < 0.0 || pos > (grid.len() - 1) as f64 {
                    return Complex::new(0.0, 0.0);
                }
                let k = (pos.floor() as usize).min(grid.len() - 2);
                let frac = pos - k as f64;
                amplitude[k] * (1.0 - frac) + amplitude[k + 1] * frac
            }
        }
    }
}

/// Parametric down-conversion source: pump → signal + idler.
#[derive(Debug, Clone)]
pub struct PdcSpec {
    pub signal: MaterialModel,
    pub idler: MaterialModel,
    pub pump: MaterialModel,
    length_m: f64,
    temperature: Temperature,
    qpm_order: u32,
    lambda_signal: Wavelength,
    lambda_idler: Wavelength,
    grating: Option<Grating>,
}

impl PdcSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        signal: MaterialModel,
        idler: MaterialModel,
        pump: MaterialModel,
        length_m: f64,
        temperature: Temperature,
        qpm_order: u32,
        lambda_signal: Wavelength,
        lambda_idler: Wavelength,
    ) -> Result<Self> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(Error::invalid("length", format!("{length_m} m must be positive")));
        }
        if qpm_order == 0 || qpm_order % 2 == 0 {
            return Err(Error::invalid("qpm_order", format!("{qpm_order} is not an odd positive integer")));
        }
        let spec = Self {
            signal,
            idler,
            pump,
            length_m,
            temperature,
            qpm_order,
            lambda_signal,
            lambda_idler,
            grating: None,
        };
        spec.centre_mismatch()?;
        Ok(spec)
    }

    pub fn solved(mut self) -> Result<Self> {
        self.grating = Some(Grating::solve(self.centre_mismatch()?, self.qpm_order)?);
        Ok(self)
    }

    pub fn with_length(mut self, length_m: f64) -> Result<Self> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(Error::invalid("length", format!("{length_m} m must be positive")));
        }
        self.length_m = length_m;
        Ok(self)
    }

    fn centre_mismatch(&self) -> Result<f64> {
        material_mismatch(
            &self.signal,
            self.lambda_signal.nm(),
            &self.idler,
            self.lambda_idler.nm(),
            &self.pump,
            self.temperature,
        )
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn temperature(&self) -> Temperature {
        self.temperature
    }

    pub fn lambda_signal(&self) -> Wavelength {
        self.lambda_signal
    }

    pub fn lambda_idler(&self) -> Wavelength {
        self.lambda_idler
    }

    pub fn lambda_pump(&self) -> Wavelength {
        Wavelength::from_nm(sum_wavelength_nm(self.lambda_signal.nm(), self.lambda_idler.nm()))
            .expect("positive")
    }

    pub fn poling_period_m(&self) -> Option<f64> {
        self.grating.map(|g| g.period_m)
    }

    /// `k_p − k_s − k_i − G` in 1/m.
    pub fn delta_k(&self, lambda_signal_nm: f64, lambda_idler_nm: f64) -> Result<f64> {
        let grating = self
            .grating
            .ok_or_else(|| Error::invalid("poling_period", "not set; solve it first"))?;
        Ok(material_mismatch(
            &self.signal,
            lambda_signal_nm,
            &self.idler,
            lambda_idler_nm,
            &self.pump,
            self.temperature,
        )? - grating.wavevector())
    }

    /// Signal and idler grids of `len` points spanning `span_hz` around the centre.
    pub fn grids(&self, span_hz: f64, len: usize) -> Result<(SpectralGrid, SpectralGrid)> {
        Ok((
            SpectralGrid::centred_frequency(nm_to_hz(self.lambda_signal.nm()), span_hz, len)?,
            SpectralGrid::centred_frequency(nm_to_hz(self.lambda_idler.nm()), span_hz, len)?,
        ))
    }
}

/// Source JSA `pump(ν_s + ν_i)·sinc(ΔkL/2)·exp(iΔkL/2)` over (signal × idler).
pub fn pdc_jsa(spec: &PdcSpec, pump: &PumpEnvelope, grid_signal: &SpectralGrid, grid_idler: &SpectralGrid) -> Result<ComplexMap2D> {
    ComplexMap2D::from_fn(grid_signal.clone(), grid_idler.clone(), |i, j| {
        let fs = grid_signal.frequency_hz_at(i);
        let fi = grid_idler.frequency_hz_at(j);
        let dk = spec.delta_k(hz_to_nm(fs), hz_to_nm(fi))?;
        Ok(pump.amplitude(fs + fi) * phasematching_amplitude(dk, spec.length_m))
    })
}

/// Converter transfer amplitude `pump(ν_out − ν_in)·sinc(ΔkL/2)·exp(iΔkL/2)`
/// over (input × output).
pub fn conversion_jta(spec: &ProcessSpec, pump: &PumpEnvelope, grid_in: &SpectralGrid, grid_out: &SpectralGrid) -> Result<ComplexMap2D> {
    let spec = if spec.grating().is_some() { spec.clone() } else { spec.clone().solved()? };
    ComplexMap2D::from_fn(grid_in.clone(), grid_out.clone(), |i, j| {
        let fin = grid_in.frequency_hz_at(i);
        let fout = grid_out.frequency_hz_at(j);
        let fp = fout - fin;
        if fp <= 0.0 {
            return Err(Error::invalid("grid", "output frequency below input frequency"));
        }
        let dk = crate::phasematching::delta_k(&spec, Wavelength::from_nm(hz_to_nm(fin))?, Wavelength::from_nm(hz_to_nm(fp))?)?;
        Ok(pump.amplitude(fp) * phasematching_amplitude(dk, spec.length_m()))
    })
}

/// Output spectrum `|Σ_in a(ν_in)·T(ν_in, ν_out)|²` of a pure input photon
/// with spectral amplitude `input[i]` on the transfer map's input axis.
pub fn convert_spectrum(jta: &ComplexMap2D, input: &[Complex<f64>]) -> Result<Vec<f64>> {
    if input.len() != jta.rows() {
        return Err(Error::invalid("input", "amplitude length does not match the input axis"));
    }
    Ok((0..jta.cols())
        .map(|j| {
            input
                .iter()
                .enumerate()
                .map(|(i, a)| a * jta.get(i, j))
                .sum::<Complex<f64>>()
                .norm_sqr()
        })
        .collect())
}

/// Gaussian amplitude samples on `grid` with intensity FWHM `fwhm_hz` around `centre_hz`.
pub fn gaussian_amplitude(grid: &SpectralGrid, centre_hz: f64, fwhm_hz: f64) -> Vec<Complex<f64>> {
    grid.frequencies_hz()
        .iter()
        .map(|f| {
            let d = (f - centre_hz) / fwhm_hz;
            Complex::new((-TWO_LN2 * d * d).exp(), 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests;
