//! One function per subcommand. Each validates its whole configuration
//! into library types first, then runs the library and returns the files
//! to write.

use crate::config::{Config, ConfigError};
use qpgsim_core::dispersion::{gvm_map, Material, MaterialModel, Polarization};
use qpgsim_core::error::Error;
use qpgsim_core::export::{gvm_table, map_table, marginal_table, schmidt_table, xy_table, Metadata};
use qpgsim_core::jsa::{marginal_fwhm, pdc_jsa, schmidt, tune_pump_for_decorrelation, FwhmMethod, PdcSpec, PumpEnvelope};
use qpgsim_core::map::MapAxis;
use qpgsim_core::phasematching::{phasematching_map, phasematching_output_fwhm, ProcessSpec};
use qpgsim_core::photonstats::ChannelModel;
use qpgsim_core::processfinder::{
    find_gvm_point, find_gvm_points, sweep_temperature, FinderOptions, Mixing, ProcessMaterials, TargetSchedule,
};
use qpgsim_core::report::{run, simulate_conversion, ReportConfig};
use qpgsim_core::units::{partner_wavelength_nm, SpectralGrid, Temperature, Wavelength};
use std::fmt::Write as _;

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Compute(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

impl Output {
    fn new(name: impl Into<String>, contents: String) -> Self {
        Self {
            name: name.into(),
            contents,
        }
    }
}

fn at(key: &str) -> impl FnOnce(Error) -> ConfigError + '_ {
    move |e| ConfigError::new(key, e)
}

fn material(cfg: &Config, section: &str, polarization_key: &str) -> Result<MaterialModel, ConfigError> {
    let mkey = format!("{section}.material");
    let pkey = format!("{section}.{polarization_key}");
    let m: Material = cfg.parse(&mkey)?;
    let p: Polarization = cfg.parse(&pkey)?;
    MaterialModel::lookup(m, p).map_err(|e| ConfigError::new(pkey, e))
}

fn temperature(cfg: &Config, key: &str) -> Result<Temperature, ConfigError> {
    Temperature::from_celsius(cfg.f64(key)?).map_err(|e| ConfigError::new(key, e))
}

fn wavelength(cfg: &Config, key: &str) -> Result<Wavelength, ConfigError> {
    Wavelength::from_nm(cfg.positive(key)?).map_err(|e| ConfigError::new(key, e))
}

fn order(cfg: &Config, key: &str) -> Result<u32, ConfigError> {
    u32::try_from(cfg.count(key)?).map_err(|e| ConfigError::new(key, e))
}

pub fn process_spec(cfg: &Config) -> Result<ProcessSpec, ConfigError> {
    let spec = ProcessSpec::new(
        material(cfg, "process", "input_polarization")?,
        material(cfg, "process", "pump_polarization")?,
        material(cfg, "process", "output_polarization")?,
        cfg.positive("process.length_mm")? * 1e-3,
        temperature(cfg, "process.temperature_c")?,
        order(cfg, "process.qpm_order")?,
        wavelength(cfg, "process.input_nm")?,
        wavelength(cfg, "process.pump_nm")?,
    )
    .map_err(|e| ConfigError::new("process", e))?;
    match cfg.opt_f64("process.poling_period_um")? {
        Some(um) => spec.with_poling_period(um * 1e-6).map_err(at("process.poling_period_um")),
        None => spec.solved().map_err(|e| ConfigError::new("process", e)),
    }
}

fn qpg_pump(cfg: &Config, spec: &ProcessSpec) -> Result<PumpEnvelope, ConfigError> {
    let key = "process.pump_fwhm_ghz";
    PumpEnvelope::gaussian(spec.lambda_pump(), cfg.positive(key)? * 1e9).map_err(|e| ConfigError::new(key, e))
}

pub fn pdc_spec(cfg: &Config) -> Result<PdcSpec, ConfigError> {
    PdcSpec::new(
        material(cfg, "source", "signal_polarization")?,
        material(cfg, "source", "idler_polarization")?,
        material(cfg, "source", "pump_polarization")?,
        cfg.positive("source.length_mm")? * 1e-3,
        temperature(cfg, "source.temperature_c")?,
        order(cfg, "source.qpm_order")?,
        wavelength(cfg, "source.signal_nm")?,
        wavelength(cfg, "source.idler_nm")?,
    )
    .and_then(PdcSpec::solved)
    .map_err(|e| ConfigError::new("source", e))
}

fn channel(cfg: &Config) -> Result<ChannelModel, ConfigError> {
    ChannelModel::new(
        cfg.fraction("photonstats.herald_transmission")?,
        cfg.fraction("photonstats.signal_transmission_before")?,
        cfg.fraction("photonstats.conversion_efficiency")?,
        cfg.fraction("photonstats.signal_transmission_after")?,
    )
    .map_err(|e| ConfigError::new("photonstats", e))
}

fn label(t_c: f64) -> String {
    format!("{t_c}C")
}

pub fn cmd_gvm_map(cfg: &Config, meta: &Metadata) -> Result<Vec<Output>, Failure> {
    let input = material(cfg, "gvm-map", "input_polarization")?;
    let pump = material(cfg, "gvm-map", "pump_polarization")?;
    let temps = cfg.f64_list("gvm-map.temperatures_c")?;
    let targets = cfg.f64_list("gvm-map.targets_nm")?;
    if temps.is_empty() {
        return Err(ConfigError::new("gvm-map.temperatures_c", "needs at least one temperature").into());
    }
    if targets.len() != temps.len() {
        return Err(ConfigError::new(
            "gvm-map.targets_nm",
            format!("needs one entry per temperature ({})", temps.len()),
        )
        .into());
    }
    let temps = temps
        .iter()
        .map(|&t| Temperature::from_celsius(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(at("gvm-map.temperatures_c"))?;
    let grid_in = SpectralGrid::wavelength_nm(
        cfg.positive("gvm-map.input_start_nm")?,
        cfg.positive("gvm-map.input_stop_nm")?,
        cfg.count("gvm-map.input_points")?,
    )
    .map_err(at("gvm-map.input_stop_nm"))?;
    let grid_pump = SpectralGrid::wavelength_nm(
        cfg.positive("gvm-map.pump_start_nm")?,
        cfg.positive("gvm-map.pump_stop_nm")?,
        cfg.count("gvm-map.pump_points")?,
    )
    .map_err(at("gvm-map.pump_stop_nm"))?;

    let mut files = Vec::new();
    for (t, target) in temps.into_iter().zip(targets) {
        let map = gvm_map(&input, &pump, &grid_in, &grid_pump, t)?;
        let tag = label(t.celsius());
        let m = meta.clone().with("temperature_c", t.celsius());
        files.push(Output::new(format!("gvm_map_{tag}.dat"), gvm_table(&map, &m)));
        files.push(Output::new(
            format!("gvm_zero_{tag}.dat"),
            xy_table(&map.zero_contour(), &m, "lambda_in", "lambda_pump"),
        ));
        let line: Vec<(f64, f64)> = grid_in
            .wavelengths_nm()
            .into_iter()
            .map(|li| (li, partner_wavelength_nm(target, li)))
            .filter(|&(_, lp)| lp.is_finite() && lp > 0.0)
            .collect();
        files.push(Output::new(
            format!("gvm_target_{tag}.dat"),
            xy_table(&line, &m.with("target_nm", target), "lambda_in", "lambda_pump"),
        ));
    }
    Ok(files)
}

pub fn cmd_phasematching(cfg: &Config, meta: &Metadata) -> Result<Vec<Output>, Failure> {
    let spec = process_spec(cfg)?;
    let centred = |centre: f64, span_key: &str, points_key: &str| -> Result<SpectralGrid, ConfigError> {
        let span = cfg.positive(span_key)?;
        SpectralGrid::wavelength_nm(centre - 0.5 * span, centre + 0.5 * span, cfg.count(points_key)?)
            .map_err(|e| ConfigError::new(span_key, e))
    };
    let grid_in = centred(spec.lambda_in().nm(), "phasematching.input_span_nm", "phasematching.input_points")?;
    let grid_pump = centred(spec.lambda_pump().nm(), "phasematching.pump_span_nm", "phasematching.pump_points")?;

    let map = phasematching_map(&spec, &grid_in, &grid_pump)?;
    let m = meta
        .clone()
        .with("poling_period_m", format!("{:e}", spec.poling_period_m().unwrap_or(f64::NAN)))
        .with("output_fwhm_hz", format!("{:e}", phasematching_output_fwhm(&spec)?));
    Ok(vec![Output::new("phasematching.dat", map_table(&map, &m, "pump"))])
}

pub fn cmd_jsa(cfg: &Config, meta: &Metadata) -> Result<Vec<Output>, Failure> {
    let source = pdc_spec(cfg)?;
    let (gs, gi) = source
        .grids(cfg.positive("source.span_thz")? * 1e12, cfg.count("source.points")?)
        .map_err(at("source.span_thz"))?;
    let fixed = match cfg.opt_f64("jsa.pump_fwhm_ghz")? {
        Some(ghz) => Some(
            PumpEnvelope::gaussian(source.lambda_pump(), ghz * 1e9).map_err(at("jsa.pump_fwhm_ghz"))?,
        ),
        None => None,
    };
    let target_k = cfg.positive("source.target_schmidt")?;
    let qpg = process_spec(cfg)?;
    let qpg_pump = qpg_pump(cfg, &qpg)?;
    let converted_points = cfg.count("jsa.converted_points")?;

    let pump = match fixed {
        Some(p) => p,
        None => tune_pump_for_decorrelation(&source, target_k, &gs, &gi)?.pump,
    };
    let jsa = pdc_jsa(&source, &pump, &gs, &gi)?;
    let decomp = schmidt(&jsa)?;
    let input = marginal_fwhm(&jsa, MapAxis::Input, FwhmMethod::GaussianFit)?;
    let converted = simulate_conversion(&qpg, &qpg_pump, input.value, converted_points)?;

    let m = meta.clone().with("pump_fwhm_hz", format!("{:e}", pump.fwhm_hz));
    Ok(vec![
        Output::new("jsa.dat", map_table(&jsa, &m, "idler")),
        Output::new(
            "jsa_marginal_signal.dat",
            marginal_table(&gs.frequencies_hz(), &jsa.marginal(MapAxis::Input), &m.clone().with("fwhm_hz", format!("{:e}", input.value))),
        ),
        Output::new(
            "jsa_marginal_idler.dat",
            marginal_table(&gi.frequencies_hz(), &jsa.marginal(MapAxis::Second), &m),
        ),
        Output::new("schmidt.dat", schmidt_table(&decomp, &m)),
        Output::new(
            "converted_marginal.dat",
            marginal_table(
                &converted.frequencies_hz,
                &converted.intensity,
                &meta.clone().with("fwhm_hz", format!("{:e}", converted.fwhm_hz)),
            ),
        ),
    ])
}

pub fn report_config(cfg: &Config) -> Result<ReportConfig, ConfigError> {
    let ghz = |key: &str| cfg.positive(key).map(|v| v * 1e9);
    Ok(ReportConfig {
        qpg: process_spec(cfg)?,
        qpg_pump_fwhm_hz: ghz("process.pump_fwhm_ghz")?,
        pdc: pdc_spec(cfg)?,
        pdc_target_k: cfg.positive("source.target_schmidt")?,
        pdc_grid_points: cfg.count("source.points")?,
        pdc_span_hz: cfg.positive("source.span_thz")? * 1e12,
        conversion_grid_points: cfg.count("report.converted_points")?,
        measured_input_fwhm_hz: (ghz("efficiency.measured_input_fwhm_ghz")?, cfg.f64("efficiency.measured_input_sigma_ghz")? * 1e9),
        measured_output_fwhm_hz: (ghz("efficiency.measured_output_fwhm_ghz")?, cfg.f64("efficiency.measured_output_sigma_ghz")? * 1e9),
        eta_open: cfg.fraction("efficiency.klyshko_open")?,
        eta_blocked: cfg.fraction("efficiency.klyshko_blocked")?,
        eta_converted: cfg.fraction("efficiency.klyshko_converted")?,
        eta_unconverted: cfg.fraction("efficiency.klyshko_unconverted")?,
        detector_converted: cfg.fraction("efficiency.detector_converted")?,
        detector_reference: cfg.fraction("efficiency.detector_reference")?,
        coupling_converted: cfg.fraction("efficiency.coupling_converted")?,
        coupling_reference: cfg.fraction("efficiency.coupling_reference")?,
        channel: channel(cfg)?,
        schmidt_modes: cfg.count("photonstats.schmidt_modes")?,
        g2_target: cfg.positive("photonstats.g2_target")?,
        seed: cfg.u64("seed")?,
        mc_trials: cfg.count("photonstats.monte_carlo_trials")? as u64,
    })
}

pub fn cmd_report(cfg: &Config, meta: &Metadata) -> Result<Vec<Output>, Failure> {
    let rc = report_config(cfg)?;
    let report = run(&rc)?;
    Ok(vec![Output::new("report.txt", meta.header() + &report.render())])
}

fn finder_setup(cfg: &Config) -> Result<(ProcessMaterials, FinderOptions), ConfigError> {
    let materials = ProcessMaterials {
        input: material(cfg, "find-point", "input_polarization")?,
        pump: material(cfg, "find-point", "pump_polarization")?,
        output: material(cfg, "find-point", "output_polarization")?,
    };
    let mixing = match cfg.string("find-point.mixing")? {
        "sum" => Mixing::SumFrequency,
        "difference" => Mixing::DifferenceFrequency,
        other => return Err(ConfigError::new("find-point.mixing", format!("`{other}` is not `sum` or `difference`"))),
    };
    let bracket_nm = match cfg.opt_f64_list("find-point.bracket_nm")? {
        None => None,
        Some(v) if v.len() == 2 && v[0] > 0.0 && v[1] > v[0] => Some((v[0], v[1])),
        Some(_) => return Err(ConfigError::new("find-point.bracket_nm", "expected [lo, hi] with 0 < lo < hi")),
    };
    Ok((materials, FinderOptions { mixing, bracket_nm }))
}

pub fn cmd_find_point(cfg: &Config, meta: &Metadata) -> Result<Vec<Output>, Failure> {
    let (materials, options) = finder_setup(cfg)?;
    let t = temperature(cfg, "find-point.temperature_c")?;
    let target = cfg.positive("find-point.target_nm")?;

    let all = find_gvm_points(&materials, t, target, options)?;
    let p = find_gvm_point(&materials, t, target, options)?;
    let mut s = meta.header();
    let _ = writeln!(s, "lambda_in_nm = {:.6}", p.lambda_in_nm);
    let _ = writeln!(s, "lambda_pump_nm = {:.6}", p.lambda_pump_nm);
    let _ = writeln!(s, "lambda_out_nm = {:.6}", p.lambda_out_nm);
    let _ = writeln!(s, "temperature_c = {}", p.temperature_c);
    let _ = writeln!(s, "residual_gvm_s_per_m = {:.6e}", p.residual_gvm);
    match p.poling_period_m {
        Some(period) => {
            let _ = writeln!(s, "poling_period_m = {period:.6e}");
        }
        None => {
            let _ = writeln!(s, "poling_period_m = none");
        }
    }
    let _ = writeln!(s, "roots = {}", all.len());
    for (k, r) in all.iter().enumerate() {
        let _ = writeln!(s, "root_{k} = {:.6} {:.6}", r.lambda_in_nm, r.lambda_pump_nm);
    }
    Ok(vec![Output::new("operating_point.txt", s)])
}

pub fn cmd_sweep(cfg: &Config, meta: &Metadata) -> Result<Vec<Output>, Failure> {
    let (materials, options) = finder_setup(cfg)?;
    let (t0, t1) = (cfg.f64("sweep.start_c")?, cfg.f64("sweep.stop_c")?);
    let n = cfg.count("sweep.points")?;
    let schedule = TargetSchedule::Linear {
        t0,
        target0: cfg.positive("sweep.target_start_nm")?,
        t1,
        target1: cfg.positive("sweep.target_stop_nm")?,
    };
    let temps: Vec<f64> = if n == 1 {
        vec![t0]
    } else {
        (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
    };
    for &t in &temps {
        Temperature::from_celsius(t).map_err(at("sweep.start_c"))?;
    }

    let sweep = sweep_temperature(&materials, &temps, schedule, options);
    let solved = sweep.entries.iter().filter(|e| e.result.is_ok()).count();
    if solved == 0 {
        return Err(Error::NoRoot("no temperature in the sweep has a group-velocity-matched point".into()).into());
    }
    let trend = match sweep.pump_monotonicity() {
        Some(1) => "rising",
        Some(_) => "falling",
        None => "none",
    };
    let mut s = meta.clone().with("pump_trend", trend).header();
    let _ = writeln!(s, "# columns: temperature_c target_nm lambda_in lambda_pump lambda_out residual_gvm");
    for e in &sweep.entries {
        match &e.result {
            Ok(p) => {
                let _ = writeln!(
                    s,
                    "{} {:.6} {:.6} {:.6} {:.6} {:.6e}",
                    e.temperature_c, e.target_nm, p.lambda_in_nm, p.lambda_pump_nm, p.lambda_out_nm, p.residual_gvm
                );
            }
            Err(err) => {
                let _ = writeln!(s, "# {} C, target {:.6} nm: {err}", e.temperature_c, e.target_nm);
            }
        }
    }
    Ok(vec![Output::new("sweep.dat", s)])
}

/// A gnuplot script that draws the files written by a command.
pub fn plot_script(command: &str, files: &[Output]) -> Option<Output> {
    let names = |prefix: &'static str| files.iter().filter(move |f| f.name.starts_with(prefix)).map(|f| f.name.as_str());
    let mut s = String::from("set terminal pngcairo size 900,700\n");
    match command {
        "gvm-map" => {
            for map in names("gvm_map_") {
                let tag = map.trim_start_matches("gvm_map_").trim_end_matches(".dat");
                let _ = writeln!(s, "set output 'gvm_{tag}.png'");
                let _ = writeln!(s, "set xlabel 'input (nm)'; set ylabel 'pump (nm)'");
                let _ = writeln!(
                    s,
                    "plot '{map}' using 1:2:3 with points pt 5 ps 0.4 palette notitle, \\\n     'gvm_zero_{tag}.dat' using 1:2 with lines lw 2 title 'GVM = 0', \\\n     'gvm_target_{tag}.dat' using 1:2 with lines dt 2 title 'target'"
                );
            }
        }
        "phasematching" => {
            s.push_str("set output 'phasematching.png'\nset xlabel 'input (nm)'; set ylabel 'pump (nm)'\n");
            s.push_str("plot 'phasematching.dat' using 1:2:5 with points pt 5 ps 0.4 palette notitle\n");
        }
        "jsa" => {
            s.push_str("set output 'jsi.png'\nset xlabel 'signal (nm)'; set ylabel 'idler (nm)'\n");
            s.push_str("plot 'jsa.dat' using 1:2:5 with points pt 5 ps 0.4 palette notitle\n");
            s.push_str("set output 'marginals.png'\nset xlabel 'frequency (Hz)'; set ylabel 'intensity (norm.)'\n");
            s.push_str("stats 'jsa_marginal_signal.dat' using 2 name 'A' nooutput\n");
            s.push_str("stats 'converted_marginal.dat' using 2 name 'B' nooutput\n");
            s.push_str("set multiplot layout 1,2\n");
            s.push_str("plot 'jsa_marginal_signal.dat' using 1:($2/A_max) with lines title 'input'\n");
            s.push_str("plot 'converted_marginal.dat' using 1:($2/B_max) with lines title 'converted'\n");
            s.push_str("unset multiplot\n");
        }
        _ => return None,
    }
    Some(Output::new(format!("{command}.gp"), s))
}
