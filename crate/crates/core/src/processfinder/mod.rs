//! Search for group-velocity-matched operating points along the
//! energy-conservation curve of a three-wave process.

use crate::dispersion::{gvm, MaterialModel};
use crate::error::{Error, Result};
use crate::phasematching::{material_mismatch, Grating};
use crate::units::{Temperature, Wavelength};
use rayon::prelude::*;

/// Samples of the coarse scan along the constraint curve.
pub const SCAN_SAMPLES: usize = 128;
/// Required `|GVM|` at a returned point, s/m.
pub const GVM_TOLERANCE: f64 = 1e-13;

/// Which energy-conservation constraint ties input, pump and output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mixing {
    /// `1/λ_out = 1/λ_in + 1/λ_pump`.
    #[default]
    SumFrequency,
    /// `1/λ_out = 1/λ_in − 1/λ_pump`.
    DifferenceFrequency,
}

impl Mixing {
    fn pump_nm(self, lambda_out_nm: f64, lambda_in_nm: f64) -> f64 {
        match self {
            Mixing::SumFrequency => 1.0 / (1.0 / lambda_out_nm - 1.0 / lambda_in_nm),
            Mixing::DifferenceFrequency => 1.0 / (1.0 / lambda_in_nm - 1.0 / lambda_out_nm),
        }
    }

    fn out_nm(self, lambda_in_nm: f64, lambda_pump_nm: f64) -> f64 {
        match self {
            Mixing::SumFrequency => 1.0 / (1.0 / lambda_in_nm + 1.0 / lambda_pump_nm),
            Mixing::DifferenceFrequency => 1.0 / (1.0 / lambda_in_nm - 1.0 / lambda_pump_nm),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProcessMaterials {
    pub input: MaterialModel,
    pub pump: MaterialModel,
    pub output: MaterialModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub lambda_in_nm: f64,
    pub lambda_pump_nm: f64,
    pub lambda_out_nm: f64,
    pub temperature_c: f64,
    /// `1/v_g(in) − 1/v_g(pump)` at the point, s/m.
    pub residual_gvm: f64,
    pub tolerance: f64,
    /// First-order poling period, or `None` when it lies outside the physical bracket.
    pub poling_period_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FinderOptions {
    pub mixing: Mixing,
    /// Input-wavelength search interval in nm. Defaults to the widest
    /// interval where both input and pump stay inside their validity windows.
    pub bracket_nm: Option<(f64, f64)>,
}

fn default_bracket(m: &ProcessMaterials, target_nm: f64, mixing: Mixing) -> Option<(f64, f64)> {
    let (ilo, ihi) = m.input.validity.lambda_nm();
    let (plo, phi) = m.pump.validity.lambda_nm();
    // The pump wavelength is monotone in λ_in on each branch, so invert the
    // pump window through the constraint.
    let (a, b) = match mixing {
        // λ_p decreases with λ_in; λ_in > λ_out.
        Mixing::SumFrequency => {
            let from_phi = if phi > target_nm { 1.0 / (1.0 / target_nm - 1.0 / phi) } else { f64::INFINITY };
            let from_plo = if plo > target_nm { 1.0 / (1.0 / target_nm - 1.0 / plo) } else { f64::INFINITY };
            (from_phi.max(target_nm), from_plo)
        }
        // λ_p = 1/(1/λ_in − 1/λ_out) increases with λ_in; λ_in < λ_out.
        Mixing::DifferenceFrequency => {
            let lo = 1.0 / (1.0 / plo + 1.0 / target_nm);
            let hi = 1.0 / (1.0 / phi + 1.0 / target_nm);
            (lo, hi.min(target_nm))
        }
    };
    let lo = a.max(ilo);
    let hi = b.min(ihi);
    // Shrink slightly so rounding cannot push an endpoint outside a window.
    let (lo, hi) = (lo * (1.0 + 1e-9), hi * (1.0 - 1e-9));
    (hi > lo).then_some((lo, hi))
}

fn gvm_along(m: &ProcessMaterials, t: Temperature, target_nm: f64, mixing: Mixing, lin: f64) -> Result<(f64, f64)> {
    let lp = mixing.pump_nm(target_nm, lin);
    Ok((gvm(&m.input, Wavelength::from_nm(lin)?, &m.pump, Wavelength::from_nm(lp)?, t)?, lp))
}

fn refine(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    // Bisection with a secant proposal whenever it stays inside the bracket.
    for _ in 0..200 {
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        let x = if secant.is_finite() && secant > a.min(b) && secant < a.max(b) && (b - a).abs() > 1e-9 {
            secant
        } else {
            mid
        };
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        // Force a bisection step if the secant stalls on one side.
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Every zero of the GVM along the constraint curve, ordered by input wavelength.
pub fn find_gvm_points(
    materials: &ProcessMaterials,
    temperature: Temperature,
    lambda_out_target_nm: f64,
    options: FinderOptions,
) -> Result<Vec<OperatingPoint>> {
    let target = Wavelength::from_nm(lambda_out_target_nm)?.nm();
    let mixing = options.mixing;
    let (lo, hi) = match options.bracket_nm {
        Some((lo, hi)) if hi > lo && lo > 0.0 => (lo, hi),
        Some((lo, hi)) => return Err(Error::invalid("bracket", format!("[{lo}, {hi}] nm is empty"))),
        None => default_bracket(materials, target, mixing).ok_or_else(|| {
            Error::NoRoot(format!("no input wavelength keeps input and pump inside their windows for {target} nm"))
        })?,
    };
    let f = |lin: f64| gvm_along(materials, temperature, target, mixing, lin).map(|v| v.0);
    let xs: Vec<f64> = (0..SCAN_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_SAMPLES - 1) as f64)
        .collect();
    let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    for i in 0..SCAN_SAMPLES - 1 {
        let root = if ys[i] == 0.0 {
            xs[i]
        } else if ys[i] * ys[i + 1] < 0.0 {
            refine(f, xs[i], xs[i + 1], ys[i], ys[i + 1])?
        } else {
            continue;
        };
        points.push(operating_point(materials, temperature, target, mixing, root)?);
    }
    if points.is_empty() {
        let (min, max) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
        return Err(Error::NoRoot(format!(
            "GVM keeps one sign over input {lo:.3}..{hi:.3} nm for {target} nm at {} C (range {min:e}..{max:e} s/m)",
            temperature.celsius()
        )));
    }
    Ok(points)
}

fn operating_point(m: &ProcessMaterials, t: Temperature, target: f64, mixing: Mixing, lin: f64) -> Result<OperatingPoint> {
    let (residual, lp) = gvm_along(m, t, target, mixing, lin)?;
    if residual.abs() >= GVM_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "GVM root refinement stopped at {residual:e} s/m, above {GVM_TOLERANCE:e}"
        )));
    }
    let lout = mixing.out_nm(lin, lp);
    let mismatch = match mixing {
        Mixing::SumFrequency => material_mismatch(&m.input, lin, &m.pump, lp, &m.output, t)?,
        Mixing::DifferenceFrequency => material_mismatch(&m.pump, lp, &m.output, lout, &m.input, t)?,
    };
    Ok(OperatingPoint {
        lambda_in_nm: lin,
        lambda_pump_nm: lp,
        lambda_out_nm: lout,
        temperature_c: t.celsius(),
        residual_gvm: residual,
        tolerance: GVM_TOLERANCE,
        poling_period_m: Grating::solve(mismatch, 1).ok().map(|g| g.period_m),
    })
}

/// The GVM zero closest to degeneracy (`λ_in = λ_pump`).
pub fn find_gvm_point(
    materials: &ProcessMaterials,
    temperature: Temperature,
    lambda_out_target_nm: f64,
    options: FinderOptions,
) -> Result<OperatingPoint> {
    let points = find_gvm_points(materials, temperature, lambda_out_target_nm, options)?;
    Ok(points
        .into_iter()
        .min_by(|a, b| {
            (a.lambda_in_nm - a.lambda_pump_nm)
                .abs()
                .total_cmp(&(b.lambda_in_nm - b.lambda_pump_nm).abs())
        })
        .expect("non-empty"))
}

/// Target output wavelength as a function of temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSchedule {
    Fixed(f64),
    /// Linear from `(t0, target0)` to `(t1, target1)`.
    Linear { t0: f64, target0: f64, t1: f64, target1: f64 },
}

impl TargetSchedule {
    pub fn at(&self, t_c: f64) -> f64 {
        match *self {
            TargetSchedule::Fixed(v) => v,
            TargetSchedule::Linear { t0, target0, t1, target1 } => {
                if t1 == t0 {
                    target0
                } else {
                    target0 + (target1 - target0) * (t_c - t0) / (t1 - t0)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub temperature_c: f64,
    pub target_nm: f64,
    pub result: Result<OperatingPoint>,
}

#[derive(Debug, Clone)]
pub struct TemperatureSweep {
    pub entries: Vec<SweepEntry>,
}

impl TemperatureSweep {
    /// `Some(+1)` if λ_pump rises with temperature over all solved entries,
    /// `Some(-1)` if it falls, `None` otherwise or with fewer than two points.
    pub fn pump_monotonicity(&self) -> Option<i8> {
        let lp: Vec<f64> = self
            .entries
            .iter()
            .filter_map(|e| e.result.as_ref().ok().map(|p| p.lambda_pump_nm))
            .collect();
        if lp.len() < 2 {
            return None;
        }
        if lp.windows(2).all(|w| w[1] > w[0]) {
            Some(1)
        } else if lp.windows(2).all(|w| w[1] < w[0]) {
            Some(-1)
        } else {
            None
        }
    }
}

/// Operating point at each temperature. Failures stay in the list.
pub fn sweep_temperature(
    materials: &ProcessMaterials,
    temperatures_c: &[f64],
    target: TargetSchedule,
    options: FinderOptions,
) -> TemperatureSweep {
    let entries = temperatures_c
        .par_iter()
        .map(|&tc| {
            let target_nm = target.at(tc);
            let result = Temperature::from_celsius(tc)
                .and_then(|t| find_gvm_point(materials, t, target_nm, options));
            SweepEntry {
                temperature_c: tc,
                target_nm,
                result,
            }
        })
        .collect();
    TemperatureSweep { entries }
}

#[cfg(test)]
mod tests;
