use super::{pdc_jsa, schmidt, PdcSpec, PumpEnvelope};
use crate::error::{Error, Result};
use crate::units::SpectralGrid;

/// Schmidt number below which a pair source counts as decorrelated.
pub const DECORRELATION_THRESHOLD: f64 = 1.15;

const SCAN_POINTS: usize = 25;
const GOLDEN_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct TunedPump {
    pub pump: PumpEnvelope,
    pub schmidt_number: f64,
}

/// Minimizes `k(fwhm)` over `fwhm ∈ [lo, hi]` (Hz): logarithmic scan, then
/// golden-section refinement in log-bandwidth around the best scan point.
/// Returns `(fwhm, k)`.
pub fn minimize_schmidt_number<F>(k: F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid("pump_fwhm_bracket", format!("[{lo}, {hi}] Hz is not a valid bracket")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| a + (b - a) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let ks = xs.iter().map(|x| k(x.exp())).collect::<Result<Vec<_>>>()?;
    let ibest = (0..SCAN_POINTS).min_by(|&i, &j| ks[i].total_cmp(&ks[j])).expect("non-empty");
    let mut left = xs[ibest.saturating_sub(1)];
    let mut right = xs[(ibest + 1).min(SCAN_POINTS - 1)];
    let (mut best_x, mut best_k) = (xs[ibest], ks[ibest]);

    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = right - g * (right - left);
    let mut d = left + g * (right - left);
    let mut kc = k(c.exp())?;
    let mut kd = k(d.exp())?;
    while right - left > GOLDEN_TOL {
        if kc < kd {
            right = d;
            d = c;
            kd = kc;
            c = right - g * (right - left);
            kc = k(c.exp())?;
        } else {
            left = c;
            c = d;
            kc = kd;
            d = left + g * (right - left);
            kd = k(d.exp())?;
        }
    }
    for (x, kx) in [(c, kc), (d, kd)] {
        if kx < best_k {
            best_x = x;
            best_k = kx;
        }
    }
    Ok((best_x.exp(), best_k))
}

/// Gaussian pump bandwidth that minimizes the Schmidt number of the source
/// on the given grids. The pump is centred at the spec's pump wavelength.
///
/// Fails with [`Error::TargetUnreachable`] if the best `K` exceeds `target_k`.
pub fn tune_pump_for_decorrelation(
    spec: &PdcSpec,
    target_k: f64,
    grid_signal: &SpectralGrid,
    grid_idler: &SpectralGrid,
) -> Result<TunedPump> {
    if !(target_k >= 1.0) {
        return Err(Error::invalid("target_k", format!("{target_k} must be at least 1")));
    }
    let centre = spec.lambda_pump();
    let span = (grid_signal.frequency_hz_at(grid_signal.len() - 1) - grid_signal.frequency_hz_at(0)).abs();
    let k_of = |fwhm: f64| -> Result<f64> {
        let pump = PumpEnvelope::gaussian(centre, fwhm)?;
        Ok(schmidt(&pdc_jsa(spec, &pump, grid_signal, grid_idler)?)?.schmidt_number())
    };
    let (fwhm, k) = minimize_schmidt_number(k_of, span / 100.0, 4.0 * span)?;
    if k > target_k {
        return Err(Error::TargetUnreachable {
            target: target_k,
            best_k: k,
            best_fwhm_hz: fwhm,
        });
    }
    Ok(TunedPump {
        pump: PumpEnvelope::gaussian(centre, fwhm)?,
        schmidt_number: k,
    })
}
