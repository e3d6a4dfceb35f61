//! Operating points of the demonstrated device and its photon-pair source.

use crate::dispersion::{Material, MaterialModel, Polarization};
use crate::error::Result;
use crate::jsa::PdcSpec;
use crate::phasematching::ProcessSpec;
use crate::units::{Temperature, Wavelength};

pub const QPG_LENGTH_M: f64 = 27e-3;
pub const QPG_TEMPERATURE_C: f64 = 190.0;
pub const QPG_INPUT_NM: f64 = 1545.0;
pub const QPG_PUMP_NM: f64 = 854.0;

/// Measured signal marginal FWHM of the source, Hz.
pub const PDC_SIGNAL_FWHM_HZ: f64 = 963e9;
/// Measured converted-output FWHM, Hz.
pub const QPG_OUTPUT_FWHM_HZ: f64 = 129e9;

/// ppKTP source length. Not a measured device value: chosen so that the
/// decorrelated source reproduces the measured signal bandwidth.
pub const PDC_LENGTH_M: f64 = 3.87e-3;
pub const PDC_TEMPERATURE_C: f64 = 25.0;
pub const PDC_SIGNAL_NM: f64 = 1545.0;

/// Type-II QPG in Ti:LiNbO3: ordinary input, extraordinary pump, ordinary
/// output, first-order poling solved at the centre.
pub fn qpg_spec() -> Result<ProcessSpec> {
    qpg_spec_at(QPG_LENGTH_M, QPG_TEMPERATURE_C, QPG_INPUT_NM, QPG_PUMP_NM)
}

pub fn qpg_spec_at(length_m: f64, temperature_c: f64, input_nm: f64, pump_nm: f64) -> Result<ProcessSpec> {
    let o = MaterialModel::lookup(Material::LithiumNiobateWaveguide, Polarization::Ordinary)?;
    let e = MaterialModel::lookup(Material::LithiumNiobateWaveguide, Polarization::Extraordinary)?;
    ProcessSpec::new(
        o.clone(),
        e,
        o,
        length_m,
        Temperature::from_celsius(temperature_c)?,
        1,
        Wavelength::from_nm(input_nm)?,
        Wavelength::from_nm(pump_nm)?,
    )?
    .solved()
}

/// Type-II ppKTP source at degeneracy: y-polarized pump and signal,
/// z-polarized idler.
pub fn pdc_spec() -> Result<PdcSpec> {
    let y = MaterialModel::lookup(Material::KtpBulk, Polarization::Y)?;
    let z = MaterialModel::lookup(Material::KtpBulk, Polarization::Z)?;
    PdcSpec::new(
        y.clone(),
        z,
        y,
        PDC_LENGTH_M,
        Temperature::from_celsius(PDC_TEMPERATURE_C)?,
        1,
        Wavelength::from_nm(PDC_SIGNAL_NM)?,
        Wavelength::from_nm(PDC_SIGNAL_NM)?,
    )?
    .solved()
}

/// QPG pump bandwidth, matched to the input photon. Not a measured value.
pub const QPG_PUMP_FWHM_HZ: f64 = 963e9;
pub const PDC_SIGNAL_FWHM_SIGMA_HZ: f64 = 11e9;
pub const QPG_OUTPUT_FWHM_SIGMA_HZ: f64 = 4e9;

/// Klyshko efficiencies of the unconverted arm with the QPG pump blocked and
/// open. Only their ratio is published; the blocked value is representative.
pub const ETA_BLOCKED: f64 = 0.200;
pub const ETA_OPEN: f64 = 0.049;
/// Klyshko efficiencies of the converted and unconverted arms for the
/// external efficiency, with the detector efficiencies they were measured with.
pub const ETA_CONVERTED: f64 = 0.026;
pub const ETA_UNCONVERTED: f64 = 0.2;
pub const DETECTOR_CONVERTED: f64 = 0.65;
pub const DETECTOR_REFERENCE: f64 = 0.5;
pub const COUPLING_CONVERTED: f64 = 0.5;
pub const COUPLING_REFERENCE: f64 = 0.8;

/// Internal conversion efficiency at the operating point.
pub const INTERNAL_EFFICIENCY: f64 = 0.755;
pub const G2_TARGET: f64 = 0.32;

/// Representative herald and signal-arm transmissions for the photon
/// statistics model, with the internal efficiency as conversion.
pub fn device_channel() -> Result<crate::photonstats::ChannelModel> {
    crate::photonstats::ChannelModel::new(0.2, 0.2, INTERNAL_EFFICIENCY, 1.0)
}
