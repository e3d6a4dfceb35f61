//! Scalar quantities with fixed canonical units and the 1-D spectral axis.
//!
//! Wavelengths are vacuum wavelengths in nanometres, frequencies are in hertz
//! (not angular), temperatures in degrees Celsius.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Wavelength(f64);

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Temperature(f64);

impl Wavelength {
    pub fn from_nm(nm: f64) -> Result<Self> {
        if nm.is_finite() && nm > 0.0 {
            Ok(Self(nm))
        } else {
            Err(Error::invalid("wavelength", format!("{nm} nm is not a positive finite value")))
        }
    }

    pub fn nm(self) -> f64 {
        self.0
    }

    pub fn um(self) -> f64 {
        self.0 * 1e-3
    }

    pub fn metres(self) -> f64 {
        self.0 * 1e-9
    }

    pub fn to_frequency(self) -> Frequency {
        Frequency(nm_to_hz(self.0))
    }
}

impl Frequency {
    pub fn from_hz(hz: f64) -> Result<Self> {
        if hz.is_finite() && hz > 0.0 {
            Ok(Self(hz))
        } else {
            Err(Error::invalid("frequency", format!("{hz} Hz is not a positive finite value")))
        }
    }

    pub fn hz(self) -> f64 {
        self.0
    }

    pub fn angular(self) -> f64 {
        2.0 * PI * self.0
    }

    pub fn to_wavelength(self) -> Wavelength {
        Wavelength(hz_to_nm(self.0))
    }
}

impl Temperature {
    pub fn from_celsius(c: f64) -> Result<Self> {
        if c.is_finite() && c > -273.15 {
            Ok(Self(c))
        } else {
            Err(Error::invalid("temperature", format!("{c} degC is not physical")))
        }
    }

    pub fn celsius(self) -> f64 {
        self.0
    }
}

#[inline]
pub fn nm_to_hz(nm: f64) -> f64 {
    SPEED_OF_LIGHT / (nm * 1e-9)
}

#[inline]
pub fn hz_to_nm(hz: f64) -> f64 {
    SPEED_OF_LIGHT / hz * 1e9
}

/// Energy conservation for a sum process: the high-frequency wavelength.
#[inline]
pub fn sum_wavelength_nm(a_nm: f64, b_nm: f64) -> f64 {
    1.0 / (1.0 / a_nm + 1.0 / b_nm)
}

/// Energy conservation solved for the partner of `a_nm` that sums to `sum_nm`.
#[inline]
pub fn partner_wavelength_nm(sum_nm: f64, a_nm: f64) -> f64 {
    1.0 / (1.0 / sum_nm - 1.0 / a_nm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisUnit {
    WavelengthNm,
    FrequencyHz,
}

/// Uniform 1-D axis, uniform in its own unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    unit: AxisUnit,
    start: f64,
    stop: f64,
    len: usize,
}

impl SpectralGrid {
    pub fn new(unit: AxisUnit, start: f64, stop: f64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("grid", "grid needs at least one point"));
        }
        if !(start.is_finite() && stop.is_finite()) || start <= 0.0 {
            return Err(Error::invalid("grid", format!("bounds [{start}, {stop}] must be positive and finite")));
        }
        if len > 1 && stop <= start {
            return Err(Error::invalid("grid", format!("stop {stop} must exceed start {start}")));
        }
        let stop = if len == 1 { start } else { stop };
        Ok(Self { unit, start, stop, len })
    }

    pub fn wavelength_nm(start: f64, stop: f64, len: usize) -> Result<Self> {
        Self::new(AxisUnit::WavelengthNm, start, stop, len)
    }

    pub fn frequency_hz(start: f64, stop: f64, len: usize) -> Result<Self> {
        Self::new(AxisUnit::FrequencyHz, start, stop, len)
    }

    /// Frequency grid of `len` points spanning `span_hz` around `centre_hz`.
    pub fn centred_frequency(centre_hz: f64, span_hz: f64, len: usize) -> Result<Self> {
        if len == 1 {
            return Self::frequency_hz(centre_hz, centre_hz, 1);
        }
        Self::frequency_hz(centre_hz - 0.5 * span_hz, centre_hz + 0.5 * span_hz, len)
    }

    pub fn unit(&self) -> AxisUnit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn step(&self) -> f64 {
        if self.len > 1 {
            (self.stop - self.start) / (self.len - 1) as f64
        } else {
            0.0
        }
    }

    /// Value of point `i` in the grid's own unit.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            self.stop
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    pub fn wavelength_nm_at(&self, i: usize) -> f64 {
        match self.unit {
            AxisUnit::WavelengthNm => self.value(i),
            AxisUnit::FrequencyHz => hz_to_nm(self.value(i)),
        }
    }

    pub fn frequency_hz_at(&self, i: usize) -> f64 {
        match self.unit {
            AxisUnit::WavelengthNm => nm_to_hz(self.value(i)),
            AxisUnit::FrequencyHz => self.value(i),
        }
    }

    pub fn wavelengths_nm(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.wavelength_nm_at(i)).collect()
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.frequency_hz_at(i)).collect()
    }

    /// Same bounds with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Self {
        let len = if self.len > 1 { (self.len - 1) * factor + 1 } else { 1 };
        Self { len, ..self.clone() }
    }
}
