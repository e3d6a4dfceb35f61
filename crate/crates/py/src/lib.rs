//! Python bindings. Materials and polarizations are passed by name,
//! frequencies in Hz, wavelengths in nm, temperatures in degrees Celsius.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use qpgsim_core::dispersion::{self, Material, MaterialModel, Polarization};
use qpgsim_core::efficiency::{self, CountStatistics};
use qpgsim_core::error::Error;
use qpgsim_core::jsa::{self, PdcSpec, PumpEnvelope};
use qpgsim_core::phasematching::{self, ProcessSpec};
use qpgsim_core::photonstats::{self, ChannelModel, Method, SourceModel};
use qpgsim_core::processfinder::{self, FinderOptions, Mixing, ProcessMaterials};
use qpgsim_core::units::{SpectralGrid, Temperature, Wavelength};
use qpgsim_core::{presets, report};
use std::collections::HashMap;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::UnknownMaterial(_) | Error::Parse { .. } | Error::OutOfValidityRange { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn model(material: &str, polarization: &str) -> PyResult<MaterialModel> {
    let m: Material = material.parse().map_err(PyValueError::new_err)?;
    let p: Polarization = polarization.parse().map_err(PyValueError::new_err)?;
    MaterialModel::lookup(m, p).map_err(err)
}

fn nm(v: f64) -> PyResult<Wavelength> {
    Wavelength::from_nm(v).map_err(err)
}

fn celsius(v: f64) -> PyResult<Temperature> {
    Temperature::from_celsius(v).map_err(err)
}

#[pyfunction]
fn refractive_index(material: &str, polarization: &str, wavelength_nm: f64, temperature_c: f64) -> PyResult<f64> {
    model(material, polarization)?
        .refractive_index(nm(wavelength_nm)?, celsius(temperature_c)?)
        .map_err(err)
}

#[pyfunction]
fn group_index(material: &str, polarization: &str, wavelength_nm: f64, temperature_c: f64) -> PyResult<f64> {
    model(material, polarization)?
        .group_index(nm(wavelength_nm)?, celsius(temperature_c)?)
        .map_err(err)
}

/// `1/v_g(input) - 1/v_g(pump)` in s/m.
#[pyfunction]
#[pyo3(signature = (material, input_nm, pump_nm, temperature_c, input_polarization="ordinary", pump_polarization="extraordinary"))]
fn gvm(
    material: &str,
    input_nm: f64,
    pump_nm: f64,
    temperature_c: f64,
    input_polarization: &str,
    pump_polarization: &str,
) -> PyResult<f64> {
    dispersion::gvm(
        &model(material, input_polarization)?,
        nm(input_nm)?,
        &model(material, pump_polarization)?,
        nm(pump_nm)?,
        celsius(temperature_c)?,
    )
    .map_err(err)
}

/// Group-velocity-matched point closest to degeneracy, as a dict.
#[pyfunction]
#[pyo3(signature = (material, temperature_c, target_nm, mixing="sum", input_polarization="ordinary", pump_polarization="extraordinary", output_polarization="ordinary"))]
fn find_gvm_point(
    material: &str,
    temperature_c: f64,
    target_nm: f64,
    mixing: &str,
    input_polarization: &str,
    pump_polarization: &str,
    output_polarization: &str,
) -> PyResult<HashMap<String, f64>> {
    let mixing = match mixing {
        "sum" => Mixing::SumFrequency,
        "difference" => Mixing::DifferenceFrequency,
        other => return Err(PyValueError::new_err(format!("mixing `{other}` is not `sum` or `difference`"))),
    };
    let materials = ProcessMaterials {
        input: model(material, input_polarization)?,
        pump: model(material, pump_polarization)?,
        output: model(material, output_polarization)?,
    };
    let options = FinderOptions { mixing, bracket_nm: None };
    let p = processfinder::find_gvm_point(&materials, celsius(temperature_c)?, target_nm, options).map_err(err)?;
    Ok(HashMap::from([
        ("lambda_in_nm".into(), p.lambda_in_nm),
        ("lambda_pump_nm".into(), p.lambda_pump_nm),
        ("lambda_out_nm".into(), p.lambda_out_nm),
        ("residual_gvm".into(), p.residual_gvm),
        ("poling_period_m".into(), p.poling_period_m.unwrap_or(f64::NAN)),
    ]))
}

/// Sum-frequency converter with its poling period solved for the centre wavelengths.
#[pyclass(name = "ProcessSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProcessSpec {
    inner: ProcessSpec,
}

#[pymethods]
impl PyProcessSpec {
    #[new]
    #[pyo3(signature = (material, length_m, temperature_c, input_nm, pump_nm, qpm_order=1, input_polarization="ordinary", pump_polarization="extraordinary", output_polarization="ordinary"))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        material: &str,
        length_m: f64,
        temperature_c: f64,
        input_nm: f64,
        pump_nm: f64,
        qpm_order: u32,
        input_polarization: &str,
        pump_polarization: &str,
        output_polarization: &str,
    ) -> PyResult<Self> {
        let inner = ProcessSpec::new(
            model(material, input_polarization)?,
            model(material, pump_polarization)?,
            model(material, output_polarization)?,
            length_m,
            celsius(temperature_c)?,
            qpm_order,
            nm(input_nm)?,
            nm(pump_nm)?,
        )
        .and_then(ProcessSpec::solved)
        .map_err(err)?;
        Ok(Self { inner })
    }

    /// The 27 mm converter at 190 C, 1545 nm + 854 nm.
    #[staticmethod]
    fn device() -> PyResult<Self> {
        Ok(Self {
            inner: presets::qpg_spec().map_err(err)?,
        })
    }

    fn with_length(&self, length_m: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.clone().with_length(length_m).map_err(err)?,
        })
    }

    #[getter]
    fn length_m(&self) -> f64 {
        self.inner.length_m()
    }

    #[getter]
    fn poling_period_m(&self) -> Option<f64> {
        self.inner.poling_period_m()
    }

    #[getter]
    fn output_nm(&self) -> f64 {
        self.inner.lambda_out().nm()
    }

    /// Phase mismatch in rad/m at the given input and pump wavelengths.
    fn delta_k(&self, input_nm: f64, pump_nm: f64) -> PyResult<f64> {
        phasematching::delta_k(&self.inner, nm(input_nm)?, nm(pump_nm)?).map_err(err)
    }

    /// FWHM in Hz of the phasematching function along the output frequency.
    fn output_fwhm_hz(&self) -> PyResult<f64> {
        phasematching::phasematching_output_fwhm(&self.inner).map_err(err)
    }

    /// Phasematching intensity, rows over input, columns over pump wavelength.
    fn phasematching_intensity(
        &self,
        input_nm: (f64, f64, usize),
        pump_nm: (f64, f64, usize),
    ) -> PyResult<Vec<Vec<f64>>> {
        let gi = SpectralGrid::wavelength_nm(input_nm.0, input_nm.1, input_nm.2).map_err(err)?;
        let gp = SpectralGrid::wavelength_nm(pump_nm.0, pump_nm.1, pump_nm.2).map_err(err)?;
        let map = phasematching::phasematching_map(&self.inner, &gi, &gp).map_err(err)?;
        Ok((0..map.rows()).map(|i| (0..map.cols()).map(|j| map.intensity(i, j)).collect()).collect())
    }

    /// Converts a Gaussian input photon; returns the output spectrum and its width.
    #[pyo3(signature = (input_fwhm_hz, pump_fwhm_hz, points=256))]
    fn convert<'py>(
        &self,
        py: Python<'py>,
        input_fwhm_hz: f64,
        pump_fwhm_hz: f64,
        points: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let pump = PumpEnvelope::gaussian(self.inner.lambda_pump(), pump_fwhm_hz).map_err(err)?;
        let out = report::simulate_conversion(&self.inner, &pump, input_fwhm_hz, points).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("frequencies_hz", out.frequencies_hz)?;
        d.set_item("intensity", out.intensity)?;
        d.set_item("fwhm_hz", out.fwhm_hz)?;
        d.set_item("halfmax_fwhm_hz", out.halfmax_fwhm_hz)?;
        d.set_item("centre_nm", out.centre_nm)?;
        Ok(d)
    }
}

fn device_source(length_m: Option<f64>) -> PyResult<PdcSpec> {
    let spec = presets::pdc_spec().map_err(err)?;
    match length_m {
        Some(l) => spec.with_length(l).map_err(err),
        None => Ok(spec),
    }
}

/// Schmidt number of the ppKTP source JSA for a Gaussian pump.
#[pyfunction]
#[pyo3(signature = (pump_fwhm_hz, span_hz=6e12, points=128, length_m=None))]
fn source_schmidt_number(pump_fwhm_hz: f64, span_hz: f64, points: usize, length_m: Option<f64>) -> PyResult<f64> {
    let spec = device_source(length_m)?;
    let (gs, gi) = spec.grids(span_hz, points).map_err(err)?;
    let pump = PumpEnvelope::gaussian(spec.lambda_pump(), pump_fwhm_hz).map_err(err)?;
    let map = jsa::pdc_jsa(&spec, &pump, &gs, &gi).map_err(err)?;
    Ok(jsa::schmidt(&map).map_err(err)?.schmidt_number())
}

/// Pump FWHM in Hz and Schmidt number reached when tuning toward `target_k`.
#[pyfunction]
#[pyo3(signature = (target_k, span_hz=6e12, points=128, length_m=None))]
fn tune_source_pump(target_k: f64, span_hz: f64, points: usize, length_m: Option<f64>) -> PyResult<(f64, f64)> {
    let spec = device_source(length_m)?;
    let (gs, gi) = spec.grids(span_hz, points).map_err(err)?;
    let t = jsa::tune_pump_for_decorrelation(&spec, target_k, &gs, &gi).map_err(err)?;
    Ok((t.pump.fwhm_hz, t.schmidt_number))
}

#[pyfunction]
fn compression_factor(input_fwhm_hz: f64, output_fwhm_hz: f64) -> PyResult<f64> {
    jsa::compression_factor(input_fwhm_hz, output_fwhm_hz).map_err(err)
}

/// Throughput of a spectral filter narrowed to the output bandwidth.
#[pyfunction]
fn filter_baseline(input_fwhm_hz: f64, output_fwhm_hz: f64) -> PyResult<f64> {
    Ok(efficiency::filter_baseline(input_fwhm_hz, output_fwhm_hz).map_err(err)?.ratio)
}

#[pyfunction]
fn internal_efficiency(eta_open: f64, eta_blocked: f64) -> PyResult<f64> {
    Ok(efficiency::internal_efficiency(eta_open, eta_blocked).map_err(err)?.value)
}

#[pyfunction]
fn external_efficiency(eta_converted: f64, eta_unconverted: f64, det_converted: f64, det_reference: f64) -> PyResult<f64> {
    efficiency::external_efficiency(eta_converted, eta_unconverted, det_converted, det_reference).map_err(err)
}

#[pyfunction]
fn coupling_corrected(external: f64, coupling_converted: f64, coupling_reference: f64) -> PyResult<f64> {
    efficiency::coupling_corrected(external, coupling_converted, coupling_reference).map_err(err)
}

/// Klyshko efficiency and its standard error from herald-conditioned probabilities.
#[pyfunction]
fn klyshko(trials: u64, p_h: f64, p_cc: f64, p_1: f64, p_2: f64, p_cc12: f64) -> PyResult<(f64, f64)> {
    let stats = CountStatistics {
        trials,
        p_h,
        p_cc,
        p_1,
        p_2,
        p_cc12,
    };
    let e = efficiency::klyshko(&stats).map_err(err)?;
    Ok((e.value, e.std_error))
}

/// Heralded g2 and its standard error. `trials = 0` evaluates exactly.
#[pyfunction]
#[pyo3(signature = (mean_photon_pairs, herald, before, conversion, after, schmidt_modes=1, trials=0, seed=0))]
#[allow(clippy::too_many_arguments)]
fn heralded_g2(
    mean_photon_pairs: f64,
    herald: f64,
    before: f64,
    conversion: f64,
    after: f64,
    schmidt_modes: usize,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let source = SourceModel::auto(mean_photon_pairs, schmidt_modes).map_err(err)?;
    let channel = ChannelModel::new(herald, before, conversion, after).map_err(err)?;
    let method = if trials == 0 {
        Method::FockExact
    } else {
        Method::MonteCarlo { seed, trials }
    };
    let g = photonstats::heralded_g2(&source, &channel, method).map_err(err)?;
    Ok((g.value, g.std_error))
}

/// Mean pair number giving the target heralded g2 through the channel.
#[pyfunction]
#[pyo3(signature = (target, herald, before, conversion, after, schmidt_modes=1))]
fn fit_mean_pairs_for_g2(target: f64, herald: f64, before: f64, conversion: f64, after: f64, schmidt_modes: usize) -> PyResult<f64> {
    let channel = ChannelModel::new(herald, before, conversion, after).map_err(err)?;
    Ok(photonstats::fit_mean_pairs_for_g2(target, schmidt_modes, &channel)
        .map_err(err)?
        .mean_photon_pairs())
}

/// The full-chain summary for the built-in configuration, as `(key, value)` pairs.
#[pyfunction]
#[pyo3(signature = (seed=1))]
fn device_report(seed: u64) -> PyResult<Vec<(String, String)>> {
    let cfg = report::ReportConfig {
        seed,
        ..report::ReportConfig::device().map_err(err)?
    };
    let r = report::run(&cfg).map_err(err)?;
    Ok(r.entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

#[pymodule]
fn qpgsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyProcessSpec>()?;
    m.add_function(wrap_pyfunction!(refractive_index, m)?)?;
    m.add_function(wrap_pyfunction!(group_index, m)?)?;
    m.add_function(wrap_pyfunction!(gvm, m)?)?;
    m.add_function(wrap_pyfunction!(find_gvm_point, m)?)?;
    m.add_function(wrap_pyfunction!(source_schmidt_number, m)?)?;
    m.add_function(wrap_pyfunction!(tune_source_pump, m)?)?;
    m.add_function(wrap_pyfunction!(compression_factor, m)?)?;
    m.add_function(wrap_pyfunction!(filter_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(internal_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(external_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_corrected, m)?)?;
    m.add_function(wrap_pyfunction!(klyshko, m)?)?;
    m.add_function(wrap_pyfunction!(heralded_g2, m)?)?;
    m.add_function(wrap_pyfunction!(fit_mean_pairs_for_g2, m)?)?;
    m.add_function(wrap_pyfunction!(device_report, m)?)?;
    Ok(())
}
