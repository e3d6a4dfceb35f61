use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qpgsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpgsim")).args(args).output().unwrap()
}

fn in_dir(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    qpgsim(&all)
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn report_is_byte_identical_across_runs_and_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert!(in_dir(&a, &["report", "--threads", "1"]).status.success());
    assert!(in_dir(&b, &["report", "--threads", "1"]).status.success());
    assert!(in_dir(&c, &["report", "--threads", "4"]).status.success());
    let ra = read(&a, "report.txt");
    assert_eq!(ra, read(&b, "report.txt"));
    assert_eq!(ra, read(&c, "report.txt"));

    assert!((value(&ra, "compression_factor_measured") - 7.47).abs() < 0.01);
    assert!((value(&ra, "filter_baseline") - 0.1340).abs() < 5e-4);
    assert!((value(&ra, "efficiency_internal") - 0.755).abs() < 1e-9);
    assert!((value(&ra, "efficiency_external") - 0.169).abs() < 1e-9);
    assert!((value(&ra, "efficiency_external_corrected") - 0.2704).abs() < 1e-9);
    for key in ["input_fwhm_hz", "output_fwhm_hz", "compression_factor", "g2_before", "g2_after"] {
        value(&ra, key);
    }
}

#[test]
fn every_file_carries_the_metadata_header() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["phasematching", "--set", "seed=7", "--plot-script"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["phasematching.dat", "config.toml"] {
        let text = read(tmp.path(), name);
        let head: Vec<&str> = text.lines().take(4).collect();
        assert_eq!(head[0], format!("# tool: qpgsim {}", env!("CARGO_PKG_VERSION")));
        assert_eq!(head[1], "# command: phasematching");
        assert!(head[2].starts_with("# config_sha256: ") && head[2].len() == 17 + 64);
        assert_eq!(head[3], "# seed: 7");
    }
    assert!(read(tmp.path(), "phasematching.gp").contains("phasematching.dat"));
}

#[test]
fn written_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(in_dir(&a, &["find-point", "--set", "find-point.temperature_c=300", "--set", "find-point.target_nm=574"]).status.success());
    let cfg = a.join("config.toml");
    assert!(in_dir(&b, &["find-point", "--config", cfg.to_str().unwrap()]).status.success());
    assert_eq!(read(&a, "operating_point.txt"), read(&b, "operating_point.txt"));
    let p = read(&a, "operating_point.txt");
    assert!((value(&p, "lambda_in_nm") - 1560.0).abs() < 15.0);
    assert!((value(&p, "lambda_pump_nm") - 907.0).abs() < 15.0);
}

#[test]
fn gvm_map_zero_contour_passes_the_design_point() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["gvm-map"]);
    assert!(out.status.success());
    for (tag, lin, lp) in [("190C", 1545.0, 854.0), ("300C", 1560.0, 907.0)] {
        assert_eq!(data_rows(&read(tmp.path(), &format!("gvm_map_{tag}.dat"))).len(), 101 * 101);
        let zero = data_rows(&read(tmp.path(), &format!("gvm_zero_{tag}.dat")));
        let near = zero
            .iter()
            .min_by(|a, b| (a[0] - lin).abs().total_cmp(&(b[0] - lin).abs()))
            .unwrap();
        assert!((near[0] - lin).abs() <= 5.0 && (near[1] - lp).abs() < 15.0, "{tag}: {near:?}");
        assert!(!data_rows(&read(tmp.path(), &format!("gvm_target_{tag}.dat"))).is_empty());
    }
}

#[test]
fn degenerate_grid_gives_a_single_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(
        tmp.path(),
        &[
            "gvm-map",
            "--set", "gvm-map.temperatures_c=[190.0]",
            "--set", "gvm-map.targets_nm=[550.0]",
            "--set", "gvm-map.input_points=1",
            "--set", "gvm-map.pump_points=1",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&read(tmp.path(), "gvm_map_190C.dat"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].len(), 3);
}

#[test]
fn invalid_material_is_a_config_error_naming_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["gvm-map", "--set", "gvm-map.material=unobtainium"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gvm-map.material"), "{err}");
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn unknown_keys_and_bad_values_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["report", "--set", "process.lenght_mm=3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("process.lenght_mm"));

    let out = in_dir(tmp.path(), &["report", "--set", "photonstats.herald_transmission=1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("photonstats.herald_transmission"));

    let file = tmp.path().join("bad.toml");
    fs::write(&file, "[process]\nlength_mm = -1.0\n").unwrap();
    let out = in_dir(tmp.path(), &["phasematching", "--config", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("process.length_mm"));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn computational_failure_exits_1_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(
        tmp.path(),
        &["find-point", "--set", "find-point.bracket_nm=[1000.0, 1100.0]"],
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn sweep_tracks_the_pump_with_temperature() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["sweep", "--set", "sweep.points=4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(tmp.path(), "sweep.dat");
    assert!(text.contains("# pump_trend: rising"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    assert!((rows[3][2] - 1560.0).abs() < 15.0 && (rows[3][3] - 907.0).abs() < 15.0);
}

#[test]
fn jsa_writes_the_figure_data() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["jsa", "--set", "source.points=48", "--set", "jsa.pump_fwhm_ghz=1330"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(data_rows(&read(tmp.path(), "jsa.dat")).len(), 48 * 48);
    assert_eq!(data_rows(&read(tmp.path(), "schmidt.dat")).len(), 48);
    let conv = data_rows(&read(tmp.path(), "converted_marginal.dat"));
    assert_eq!(conv.len(), 256);
}

#[test]
fn help_lists_config_keys_and_defaults_parse() {
    let help = String::from_utf8_lossy(&qpgsim(&["report", "--help"]).stdout).to_string();
    for key in ["g2_target", "klyshko_open", "[process]", "seed = 1"] {
        assert!(help.contains(key), "{key}");
    }
    let defaults = qpgsim(&["defaults"]);
    assert!(defaults.status.success());
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("d.toml");
    fs::write(&file, &defaults.stdout).unwrap();
    assert!(in_dir(tmp.path(), &["find-point", "--config", file.to_str().unwrap()]).status.success());
}
