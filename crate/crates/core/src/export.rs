//! Plain-text tabular exports. Every file opens with `#` metadata lines, then
//! a `# columns:` line, then whitespace-separated rows.

use crate::dispersion::GvmMap;
use crate::jsa::SchmidtDecomposition;
use crate::map::ComplexMap2D;
use std::fmt::Write as _;

/// Header lines identifying how a file was produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    /// The `#` header lines on their own.
    pub fn header(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        for (k, v) in &self.entries {
            let _ = writeln!(out, "# {k}: {v}");
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// `lambda_in lambda_second re im intensity` rows, wavelengths in nm.
pub fn map_table(map: &ComplexMap2D, meta: &Metadata, second_name: &str) -> String {
    let mut out = String::new();
    meta.write(&mut out);
    let _ = writeln!(
        out,
        "# axis_in: {} points, {:.6} .. {:.6} nm",
        map.rows(),
        map.axis_in.wavelength_nm_at(0),
        map.axis_in.wavelength_nm_at(map.rows() - 1)
    );
    let _ = writeln!(
        out,
        "# axis_{second_name}: {} points, {:.6} .. {:.6} nm",
        map.cols(),
        map.axis_second.wavelength_nm_at(0),
        map.axis_second.wavelength_nm_at(map.cols() - 1)
    );
    let _ = writeln!(out, "# columns: lambda_in lambda_{second_name} re im intensity");
    for i in 0..map.rows() {
        let li = map.axis_in.wavelength_nm_at(i);
        for j in 0..map.cols() {
            let v = map.get(i, j);
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                num(li),
                num(map.axis_second.wavelength_nm_at(j)),
                num(v.re),
                num(v.im),
                num(v.norm_sqr())
            );
        }
    }
    out
}

/// `lambda_in lambda_pump gvm` rows, GVM in s/m.
pub fn gvm_table(map: &GvmMap, meta: &Metadata) -> String {
    let mut out = String::new();
    meta.write(&mut out);
    let _ = writeln!(out, "# temperature_c: {}", map.temperature.celsius());
    let _ = writeln!(out, "# columns: lambda_in lambda_pump gvm_s_per_m");
    for i in 0..map.grid_in.len() {
        for j in 0..map.grid_pump.len() {
            let _ = writeln!(
                out,
                "{} {} {}",
                num(map.grid_in.wavelength_nm_at(i)),
                num(map.grid_pump.wavelength_nm_at(j)),
                num(map.get(i, j))
            );
        }
    }
    out
}

/// Two-column point list, e.g. a contour or constraint line.
pub fn xy_table(points: &[(f64, f64)], meta: &Metadata, x_name: &str, y_name: &str) -> String {
    let mut out = String::new();
    meta.write(&mut out);
    let _ = writeln!(out, "# columns: {x_name} {y_name}");
    for &(x, y) in points {
        let _ = writeln!(out, "{} {}", num(x), num(y));
    }
    out
}

/// `frequency intensity` rows, frequency in Hz.
pub fn marginal_table(frequencies_hz: &[f64], intensity: &[f64], meta: &Metadata) -> String {
    let pts: Vec<(f64, f64)> = frequencies_hz.iter().copied().zip(intensity.iter().copied()).collect();
    xy_table(&pts, meta, "frequency", "intensity")
}

/// `index coefficient` rows.
pub fn schmidt_table(decomp: &SchmidtDecomposition, meta: &Metadata) -> String {
    let mut out = String::new();
    meta.write(&mut out);
    let _ = writeln!(out, "# schmidt_number: {}", num(decomp.schmidt_number()));
    let _ = writeln!(out, "# columns: index coefficient");
    for (k, c) in decomp.coefficients.iter().enumerate() {
        let _ = writeln!(out, "{k} {}", num(*c));
    }
    out
}
