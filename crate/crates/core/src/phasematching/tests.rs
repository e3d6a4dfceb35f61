use super::*;
use crate::presets;
use crate::units::partner_wavelength_nm;

fn wl(nm: f64) -> Wavelength {
    Wavelength::from_nm(nm).unwrap()
}

#[test]
fn solved_period_cancels_centre_mismatch() {
    let spec = presets::qpg_spec().unwrap();
    let period = spec.poling_period_m().unwrap();
    let dk = delta_k(&spec, spec.lambda_in(), spec.lambda_pump()).unwrap();
    assert!(dk.abs() < 1e-6 * 2.0 * PI / period);
}

#[test]
fn design_operating_point() {
    let spec = presets::qpg_spec().unwrap();
    assert!((spec.lambda_out().nm() - 550.0).abs() < 0.05);
    // Independent scan-and-bisect evaluation of the same coefficient set.
    let period = spec.poling_period_m().unwrap();
    assert!(((period - 4.275_939_412_251_61e-6) / period).abs() < 1e-9, "{period:e}");
}

#[test]
fn third_order_period_is_three_times_first() {
    let first = presets::qpg_spec().unwrap();
    let third = ProcessSpec::new(
        first.input.clone(),
        first.pump.clone(),
        first.output.clone(),
        first.length_m(),
        first.temperature(),
        3,
        first.lambda_in(),
        first.lambda_pump(),
    )
    .unwrap()
    .solved()
    .unwrap();
    let ratio = third.poling_period_m().unwrap() / first.poling_period_m().unwrap();
    assert!((ratio - 3.0).abs() < 1e-12);
}

#[test]
fn period_perturbation_shifts_mismatch_linearly() {
    let spec = presets::qpg_spec().unwrap();
    let period = spec.poling_period_m().unwrap();
    let eps = 1e-5;
    let perturbed = spec.clone().with_poling_period(period / (1.0 + eps)).unwrap();
    let shift = delta_k(&perturbed, spec.lambda_in(), spec.lambda_pump()).unwrap()
        - delta_k(&spec, spec.lambda_in(), spec.lambda_pump()).unwrap();
    let expected = -(spec.qpm_order() as f64) * 2.0 * PI * eps / period;
    assert!(((shift - expected) / expected).abs() < 1e-4, "{shift} vs {expected}");
}

#[test]
fn unreachable_period_is_no_root() {
    let base = presets::qpg_spec().unwrap();
    let err = ProcessSpec::new(
        base.input.clone(),
        base.pump.clone(),
        base.output.clone(),
        base.length_m(),
        base.temperature(),
        1001,
        base.lambda_in(),
        base.lambda_pump(),
    )
    .unwrap()
    .solved();
    assert!(matches!(err, Err(Error::NoRoot(_))));
}

#[test]
fn rejects_invalid_construction() {
    let base = presets::qpg_spec().unwrap();
    let mk = |len: f64, order: u32| {
        ProcessSpec::new(
            base.input.clone(),
            base.pump.clone(),
            base.output.clone(),
            len,
            base.temperature(),
            order,
            base.lambda_in(),
            base.lambda_pump(),
        )
    };
    assert!(mk(0.0, 1).is_err());
    assert!(mk(0.01, 2).is_err());
    assert!(mk(0.01, 0).is_err());
    assert!(base.clone().with_poling_period(-1e-6).is_err());
    // Input outside validity.
    assert!(ProcessSpec::new(
        base.input.clone(),
        base.pump.clone(),
        base.output.clone(),
        0.01,
        base.temperature(),
        1,
        wl(3500.0),
        base.lambda_pump()
    )
    .is_err());
    let unsolved = mk(0.01, 1).unwrap();
    assert!(delta_k(&unsolved, base.lambda_in(), base.lambda_pump()).is_err());
}

#[test]
fn map_centre_is_unity_and_bounded() {
    let spec = presets::qpg_spec().unwrap();
    let gi = SpectralGrid::wavelength_nm(1535.0, 1555.0, 41).unwrap();
    let gp = SpectralGrid::wavelength_nm(853.0, 855.0, 41).unwrap();
    let map = phasematching_map(&spec, &gi, &gp).unwrap();
    assert!((map.get(20, 20).norm() - 1.0).abs() < 1e-9);
    assert!(map.values().iter().all(|v| v.norm() <= 1.0 + 1e-15));
}

#[test]
fn intensity_depends_only_on_mismatch() {
    let spec = presets::qpg_spec().unwrap();
    // Two pixels with identical Δk: pick a second input, then solve the pump
    // that reproduces the first pixel's mismatch.
    let a = (1550.0, 854.3);
    let dk_a = delta_k(&spec, wl(a.0), wl(a.1)).unwrap();
    let li = 1530.0;
    let f = |lp: f64| delta_k(&spec, wl(li), wl(lp)).unwrap() - dk_a;
    let (mut lo, mut hi) = (840.0, 870.0);
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let ia = phasematching_value(&spec, wl(a.0), wl(a.1)).unwrap().norm_sqr();
    let dk_b = delta_k(&spec, wl(li), wl(lo)).unwrap();
    let ib = phasematching_amplitude(dk_b, spec.length_m()).norm_sqr();
    assert!((dk_a - dk_b).abs() < 1e-6);
    assert!((ia - ib).abs() < 1e-12);
}

#[test]
fn sinc_intensity_is_even() {
    for x in [0.1, 1.0, 2.5, 7.0] {
        let l = 0.027;
        let dk = 2.0 * x / l;
        let a = phasematching_amplitude(dk, l).norm_sqr();
        let b = phasematching_amplitude(-dk, l).norm_sqr();
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(sinc(0.0), 1.0);
    assert!((sinc(SINC2_HALF_MAX_ARG).powi(2) - 0.5).abs() < 1e-15);
}

#[test]
fn output_bandwidth_scales_inversely_with_length() {
    let spec = presets::qpg_spec().unwrap();
    let products: Vec<f64> = [13.5e-3, 27e-3, 54e-3]
        .iter()
        .map(|&l| {
            let s = spec.clone().with_length(l).unwrap();
            phasematching_output_fwhm(&s).unwrap() * l
        })
        .collect();
    for p in &products {
        assert!(((p - products[1]) / products[1]).abs() < 0.02);
    }
    let f27 = phasematching_output_fwhm(&spec).unwrap();
    let f54 = phasematching_output_fwhm(&spec.clone().with_length(54e-3).unwrap()).unwrap();
    assert!(((f27 / f54) - 2.0).abs() < 0.04);
}

#[test]
fn output_bandwidth_matches_group_index_estimate() {
    // sinc² half width from the first-order slope 1/v_out − 1/v_pump.
    let spec = presets::qpg_spec().unwrap();
    let t = spec.temperature();
    let ng_out = spec.output.group_index(spec.lambda_out(), t).unwrap();
    let ng_pump = spec.pump.group_index(spec.lambda_pump(), t).unwrap();
    let slope = 2.0 * PI * (ng_out - ng_pump) / crate::units::SPEED_OF_LIGHT;
    let estimate = 4.0 * SINC2_HALF_MAX_ARG / (spec.length_m() * slope.abs());
    let fwhm = phasematching_output_fwhm(&spec).unwrap();
    assert!(((fwhm - estimate) / estimate).abs() < 0.01, "{fwhm:e} vs {estimate:e}");
}

#[test]
fn broad_input_acceptance_along_matched_direction() {
    // Fixed output frequency: input and pump move together.
    let spec = presets::qpg_spec().unwrap();
    let out = spec.lambda_out().nm();
    for k in 0..=40 {
        let li = 1535.0 + 20.0 * k as f64 / 40.0;
        let lp = partner_wavelength_nm(out, li);
        let v = phasematching_value(&spec, wl(li), wl(lp)).unwrap().norm();
        assert!(v > 0.9, "|pm| = {v} at {li} nm");
    }
}

#[test]
fn halfmax_width_of_triangle() {
    let x: Vec<f64> = (0..=20).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|&v| (1.0 - (v - 10.0).abs() / 8.0).max(0.0)).collect();
    assert!((halfmax_width(&x, &y).unwrap() - 8.0).abs() < 1e-12);
}
