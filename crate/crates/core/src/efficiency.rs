//! Conversion-efficiency accounting: Klyshko estimators, depletion-based
//! internal efficiency, external efficiency with its fibre-coupling
//! correction, the spectral-filter baseline and the pump-power response.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Header line of the count-statistics CSV format.
pub const COUNTS_HEADER: &str = "trials,P_h,P_cc,P_1,P_2,P_cc12";

fn check_fraction(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(name, format!("{v} is not in [0, 1]")));
    }
    Ok(())
}

/// Loss budget of the conversion set-up. Every entry is a fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyBudget {
    pub internal: f64,
    pub optics_transmission: f64,
    pub waveguide_incoupling: f64,
    pub fiber_coupling_converted: f64,
    pub fiber_coupling_reference: f64,
    pub detector_efficiencies: BTreeMap<String, f64>,
}

impl EfficiencyBudget {
    pub fn validate(&self) -> Result<()> {
        check_fraction("internal", self.internal)?;
        check_fraction("optics_transmission", self.optics_transmission)?;
        check_fraction("waveguide_incoupling", self.waveguide_incoupling)?;
        check_fraction("fiber_coupling_converted", self.fiber_coupling_converted)?;
        check_fraction("fiber_coupling_reference", self.fiber_coupling_reference)?;
        for v in self.detector_efficiencies.values() {
            check_fraction("detector_efficiencies", *v)?;
        }
        Ok(())
    }

    /// Product of internal efficiency, optics, incoupling and converted-arm fibre coupling.
    pub fn end_to_end(&self) -> f64 {
        self.internal * self.optics_transmission * self.waveguide_incoupling * self.fiber_coupling_converted
    }
}

/// Herald-conditioned click record. `p_1`, `p_2` and `p_cc12` are
/// coincidences with the herald; `p_cc` is herald and either signal detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountStatistics {
    pub trials: u64,
    pub p_h: f64,
    pub p_cc: f64,
    pub p_1: f64,
    pub p_2: f64,
    pub p_cc12: f64,
}

impl CountStatistics {
    pub fn validate(&self) -> Result<()> {
        check_fraction("P_h", self.p_h)?;
        check_fraction("P_cc", self.p_cc)?;
        check_fraction("P_1", self.p_1)?;
        check_fraction("P_2", self.p_2)?;
        check_fraction("P_cc12", self.p_cc12)?;
        let tol = 1e-12;
        if self.p_cc > self.p_h + tol || self.p_cc12 > self.p_1.min(self.p_2) + tol {
            return Err(Error::invalid("P_cc", "coincidence probability exceeds a marginal"));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{COUNTS_HEADER}").unwrap();
        writeln!(
            s,
            "{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}",
            self.trials, self.p_h, self.p_cc, self.p_1, self.p_2, self.p_cc12
        )
        .unwrap();
        s
    }

    /// Parses every data row of a count file.
    pub fn parse_csv(text: &str) -> Result<Vec<Self>> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        match lines.next() {
            Some((_, h)) if h.split(',').map(str::trim).eq(COUNTS_HEADER.split(',')) => {}
            Some((i, _)) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected header `{COUNTS_HEADER}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 0,
                    message: "empty count file".into(),
                })
            }
        }
        lines
            .map(|(i, l)| {
                let err = |message: String| Error::Parse { line: i + 1, message };
                let f: Vec<&str> = l.split(',').map(str::trim).collect();
                if f.len() != 6 {
                    return Err(err(format!("expected 6 fields, found {}", f.len())));
                }
                let trials = f[0].parse::<u64>().map_err(|e| err(format!("trials: {e}")))?;
                let mut p = [0.0; 5];
                for (k, v) in p.iter_mut().enumerate() {
                    *v = f[k + 1].parse::<f64>().map_err(|e| err(format!("field {}: {e}", k + 2)))?;
                }
                let stats = Self {
                    trials,
                    p_h: p[0],
                    p_cc: p[1],
                    p_1: p[2],
                    p_2: p[3],
                    p_cc12: p[4],
                };
                stats.validate().map_err(|e| err(e.to_string()))?;
                Ok(stats)
            })
            .collect()
    }

    pub fn read_csv(path: &Path) -> Result<Vec<Self>> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::parse_csv(&text)
    }
}

/// Estimate with a standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Klyshko efficiency `P_cc / P_h`, with the binomial standard error of a
/// proportion among `P_h·trials` heralds.
pub fn klyshko(stats: &CountStatistics) -> Result<Estimate> {
    if stats.p_h == 0.0 {
        return Err(Error::DivisionByZero("herald probability is zero"));
    }
    let value = stats.p_cc / stats.p_h;
    let heralds = stats.p_h * stats.trials as f64;
    let std_error = if heralds > 0.0 {
        (value * (1.0 - value) / heralds).max(0.0).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(Estimate { value, std_error })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalEfficiency {
    pub value: f64,
    /// Set when the estimate is negative, which happens on noisy data.
    pub negative: bool,
}

/// Depletion-based internal efficiency `1 − η_open / η_blocked`.
pub fn internal_efficiency(eta_open: f64, eta_blocked: f64) -> Result<InternalEfficiency> {
    if eta_blocked == 0.0 {
        return Err(Error::DivisionByZero("blocked-pump Klyshko efficiency is zero"));
    }
    let value = 1.0 - eta_open / eta_blocked;
    Ok(InternalEfficiency {
        value,
        negative: value < 0.0,
    })
}

/// External efficiency `η_c·det_converted / (η_u·det_reference)`.
pub fn external_efficiency(eta_c: f64, eta_u: f64, det_converted: f64, det_reference: f64) -> Result<f64> {
    if eta_u == 0.0 || det_reference == 0.0 {
        return Err(Error::DivisionByZero("reference arm efficiency is zero"));
    }
    Ok(eta_c * det_converted / (eta_u * det_reference))
}

/// Rescales an external efficiency by `reference / converted` fibre coupling.
pub fn coupling_corrected(external: f64, coupling_converted: f64, coupling_reference: f64) -> Result<f64> {
    if coupling_converted == 0.0 {
        return Err(Error::DivisionByZero("converted-arm fibre coupling is zero"));
    }
    Ok(external * coupling_reference / coupling_converted)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterBaseline {
    /// Throughput `output / input`.
    pub ratio: f64,
    /// Fraction of a Gaussian spectrum transmitted by a Gaussian filter whose
    /// intensity FWHM is the output bandwidth.
    pub gaussian: f64,
}

/// Throughput of a spectral filter that narrows `input_fwhm` to `output_fwhm`.
pub fn filter_baseline(input_fwhm_hz: f64, output_fwhm_hz: f64) -> Result<FilterBaseline> {
    for (name, v) in [("input_fwhm", input_fwhm_hz), ("output_fwhm", output_fwhm_hz)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, format!("{v} Hz must be positive")));
        }
    }
    if output_fwhm_hz > input_fwhm_hz {
        return Err(Error::InvalidOrdering(format!(
            "output bandwidth {output_fwhm_hz:e} Hz exceeds input bandwidth {input_fwhm_hz:e} Hz"
        )));
    }
    let r = output_fwhm_hz / input_fwhm_hz;
    Ok(FilterBaseline {
        ratio: r,
        gaussian: r / (1.0 + r * r).sqrt(),
    })
}

/// Internal efficiency `sin²θ` of a mode-selective converter at coupling θ.
pub fn pump_power_response(theta: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::invalid("theta", format!("{theta} must be nonnegative")));
    }
    Ok(theta.sin().powi(2))
}

/// `θ = κ·√E` calibrated from one measured (pulse energy, efficiency) pair on
/// the first rising branch of `sin²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpCalibration {
    pub kappa: f64,
}

impl PumpCalibration {
    pub fn from_measurement(pulse_energy: f64, efficiency: f64) -> Result<Self> {
        if !(pulse_energy > 0.0) {
            return Err(Error::invalid("pulse_energy", "must be positive"));
        }
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::invalid("efficiency", format!("{efficiency} is not in (0, 1]")));
        }
        Ok(Self {
            kappa: efficiency.sqrt().asin() / pulse_energy.sqrt(),
        })
    }

    pub fn efficiency(&self, pulse_energy: f64) -> Result<f64> {
        if !(pulse_energy >= 0.0) {
            return Err(Error::invalid("pulse_energy", "must be nonnegative"));
        }
        pump_power_response(self.kappa * pulse_energy.sqrt())
    }

    /// Smallest pulse energy reaching `efficiency`.
    pub fn energy_for(&self, efficiency: f64) -> Result<f64> {
        if !(efficiency >= 0.0 && efficiency <= 1.0) {
            return Err(Error::invalid("efficiency", format!("{efficiency} is not in [0, 1]")));
        }
        Ok((efficiency.sqrt().asin() / self.kappa).powi(2))
    }
}
