//! Temperature-dependent refractive index, group index and group-velocity
//! mismatch for the supported nonlinear materials.
//!
//! Coefficients live in a plain-text table (see `data/sellmeier.dat`). The
//! bundled copy is compiled in; setting `QPGSIM_DATA_DIR` to a directory
//! containing a `sellmeier.dat` replaces it at load time.

mod sellmeier;

pub use sellmeier::{parse_table, SellmeierForm};

use crate::error::{Axis, Error, Result};
use crate::units::{SpectralGrid, Temperature, Wavelength, SPEED_OF_LIGHT};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

/// Environment variable naming the directory that holds `sellmeier.dat`.
pub const DATA_DIR_ENV: &str = "QPGSIM_DATA_DIR";
pub const TABLE_FILE_NAME: &str = "sellmeier.dat";

const BUNDLED_TABLE: &str = include_str!("../../data/sellmeier.dat");

/// Relative wavelength step of the central difference in [`MaterialModel::group_index`].
pub const GROUP_INDEX_REL_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Material {
    /// Effective index of Ti-indiffused LiNbO3 waveguide modes.
    LithiumNiobateWaveguide,
    LithiumNiobateBulk,
    LithiumTantalateBulk,
    KtpBulk,
}

impl Material {
    pub const ALL: [Material; 4] = [
        Material::LithiumNiobateWaveguide,
        Material::LithiumNiobateBulk,
        Material::LithiumTantalateBulk,
        Material::KtpBulk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Material::LithiumNiobateWaveguide => "lithium-niobate-waveguide",
            Material::LithiumNiobateBulk => "lithium-niobate-bulk",
            Material::LithiumTantalateBulk => "lithium-tantalate-bulk",
            Material::KtpBulk => "ktp-bulk",
        }
    }
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Material {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Material::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown material `{s}`"))
    }
}

/// Polarization axis. Uniaxial crystals use ordinary/extraordinary, KTP its
/// principal axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Ordinary,
    Extraordinary,
    X,
    Y,
    Z,
}

impl Polarization {
    pub fn name(self) -> &'static str {
        match self {
            Polarization::Ordinary => "ordinary",
            Polarization::Extraordinary => "extraordinary",
            Polarization::X => "x",
            Polarization::Y => "y",
            Polarization::Z => "z",
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "ordinary" | "o" => Polarization::Ordinary,
            "extraordinary" | "e" => Polarization::Extraordinary,
            "x" => Polarization::X,
            "y" => Polarization::Y,
            "z" => Polarization::Z,
            other => return Err(format!("unknown polarization `{other}`")),
        })
    }
}

/// Wavelength (µm) and temperature (°C) window of a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub lambda_um: (f64, f64),
    pub temperature_c: (f64, f64),
}

impl Validity {
    pub fn lambda_nm(&self) -> (f64, f64) {
        (self.lambda_um.0 * 1e3, self.lambda_um.1 * 1e3)
    }

    pub fn contains_nm(&self, nm: f64) -> bool {
        let (lo, hi) = self.lambda_nm();
        nm >= lo && nm <= hi
    }
}

/// A material/polarization pair with its coefficient set.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub material: Material,
    pub polarization: Polarization,
    pub form: SellmeierForm,
    pub validity: Validity,
}

impl MaterialModel {
    /// Looks up a record in the active coefficient table.
    pub fn lookup(material: Material, polarization: Polarization) -> Result<Self> {
        MaterialLibrary::active()?.get(material, polarization)
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.material, self.polarization)
    }

    fn check(&self, lambda: Wavelength, t: Temperature) -> Result<()> {
        let (lo, hi) = self.validity.lambda_nm();
        if lambda.nm() < lo || lambda.nm() > hi {
            return Err(Error::OutOfValidityRange {
                material: self.label(),
                axis: Axis::Wavelength,
                value: lambda.nm(),
                min: lo,
                max: hi,
            });
        }
        let (tlo, thi) = self.validity.temperature_c;
        if t.celsius() < tlo || t.celsius() > thi {
            return Err(Error::OutOfValidityRange {
                material: self.label(),
                axis: Axis::Temperature,
                value: t.celsius(),
                min: tlo,
                max: thi,
            });
        }
        Ok(())
    }

    pub fn refractive_index(&self, lambda: Wavelength, t: Temperature) -> Result<f64> {
        self.check(lambda, t)?;
        Ok(self.form.index(lambda.um(), t.celsius()))
    }

    /// Group index `n - λ dn/dλ` by central difference with relative step
    /// [`GROUP_INDEX_REL_STEP`].
    pub fn group_index(&self, lambda: Wavelength, t: Temperature) -> Result<f64> {
        self.group_index_with_step(lambda, t, GROUP_INDEX_REL_STEP)
    }

    pub fn group_index_with_step(&self, lambda: Wavelength, t: Temperature, rel_step: f64) -> Result<f64> {
        self.check(lambda, t)?;
        let l = lambda.um();
        let tc = t.celsius();
        let h = l * rel_step;
        let dn = (self.form.index(l + h, tc) - self.form.index(l - h, tc)) / (2.0 * h);
        Ok(self.form.index(l, tc) - l * dn)
    }

    /// Group velocity in m/s.
    pub fn group_velocity(&self, lambda: Wavelength, t: Temperature) -> Result<f64> {
        Ok(SPEED_OF_LIGHT / self.group_index(lambda, t)?)
    }

    /// Inverse group velocity in s/m.
    pub fn inverse_group_velocity(&self, lambda: Wavelength, t: Temperature) -> Result<f64> {
        Ok(self.group_index(lambda, t)? / SPEED_OF_LIGHT)
    }

    /// Wavenumber `2π n / λ` in 1/m.
    pub fn wavenumber(&self, lambda: Wavelength, t: Temperature) -> Result<f64> {
        Ok(2.0 * std::f64::consts::PI * self.refractive_index(lambda, t)? / lambda.metres())
    }
}

/// Group-velocity mismatch `1/v_g(input) − 1/v_g(pump)` in s/m.
pub fn gvm(
    input: &MaterialModel,
    lambda_in: Wavelength,
    pump: &MaterialModel,
    lambda_pump: Wavelength,
    t: Temperature,
) -> Result<f64> {
    Ok(input.inverse_group_velocity(lambda_in, t)? - pump.inverse_group_velocity(lambda_pump, t)?)
}

/// Set of coefficient records.
#[derive(Debug, Clone)]
pub struct MaterialLibrary {
    records: Vec<MaterialModel>,
}

impl MaterialLibrary {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self { records: parse_table(text)? })
    }

    pub fn bundled() -> &'static MaterialLibrary {
        static BUNDLED: OnceLock<MaterialLibrary> = OnceLock::new();
        BUNDLED.get_or_init(|| MaterialLibrary::parse(BUNDLED_TABLE).expect("bundled coefficient table parses"))
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        let path = dir.join(TABLE_FILE_NAME);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// The table selected by [`DATA_DIR_ENV`], or the bundled table. Read once per process.
    pub fn active() -> Result<&'static MaterialLibrary> {
        static ACTIVE: OnceLock<std::result::Result<MaterialLibrary, Error>> = OnceLock::new();
        let loaded = ACTIVE.get_or_init(|| match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => MaterialLibrary::from_dir(Path::new(&dir)),
            None => Ok(MaterialLibrary::bundled().clone()),
        });
        loaded.as_ref().map_err(Clone::clone)
    }

    pub fn get(&self, material: Material, polarization: Polarization) -> Result<MaterialModel> {
        self.records
            .iter()
            .find(|m| m.material == material && m.polarization == polarization)
            .cloned()
            .ok_or_else(|| Error::UnknownMaterial(format!("{material}/{polarization}")))
    }

    pub fn records(&self) -> &[MaterialModel] {
        &self.records
    }
}

/// Group-velocity mismatch over an (input × pump) wavelength grid.
#[derive(Debug, Clone)]
pub struct GvmMap {
    pub grid_in: SpectralGrid,
    pub grid_pump: SpectralGrid,
    pub temperature: Temperature,
    /// Row-major, `grid_in.len()` rows by `grid_pump.len()` columns, s/m.
    pub values: Vec<f64>,
}

impl GvmMap {
    pub fn get(&self, i_in: usize, j_pump: usize) -> f64 {
        self.values[i_in * self.grid_pump.len() + j_pump]
    }

    /// Zero-GVM points found by linear interpolation along the pump axis of
    /// every input row, as `(lambda_in_nm, lambda_pump_nm)`.
    pub fn zero_contour(&self) -> Vec<(f64, f64)> {
        let cols = self.grid_pump.len();
        let mut points = Vec::new();
        for i in 0..self.grid_in.len() {
            let row = &self.values[i * cols..(i + 1) * cols];
            for j in 0..cols.saturating_sub(1) {
                let (a, b) = (row[j], row[j + 1]);
                if a == 0.0 {
                    points.push((self.grid_in.wavelength_nm_at(i), self.grid_pump.wavelength_nm_at(j)));
                } else if a * b < 0.0 {
                    let frac = a / (a - b);
                    let lp = self.grid_pump.wavelength_nm_at(j)
                        + frac * (self.grid_pump.wavelength_nm_at(j + 1) - self.grid_pump.wavelength_nm_at(j));
                    points.push((self.grid_in.wavelength_nm_at(i), lp));
                }
            }
            if cols > 0 && row[cols - 1] == 0.0 {
                points.push((self.grid_in.wavelength_nm_at(i), self.grid_pump.wavelength_nm_at(cols - 1)));
            }
        }
        points
    }
}

/// Matrix of `1/v_g(input) − 1/v_g(pump)` over the two grids.
pub fn gvm_map(
    material_in: &MaterialModel,
    material_pump: &MaterialModel,
    grid_in: &SpectralGrid,
    grid_pump: &SpectralGrid,
    t: Temperature,
) -> Result<GvmMap> {
    let inv_in = (0..grid_in.len())
        .map(|i| material_in.inverse_group_velocity(Wavelength::from_nm(grid_in.wavelength_nm_at(i))?, t))
        .collect::<Result<Vec<_>>>()?;
    let inv_pump = (0..grid_pump.len())
        .map(|j| material_pump.inverse_group_velocity(Wavelength::from_nm(grid_pump.wavelength_nm_at(j))?, t))
        .collect::<Result<Vec<_>>>()?;
    let values = inv_in
        .iter()
        .flat_map(|a| inv_pump.iter().map(move |b| a - b))
        .collect();
    Ok(GvmMap {
        grid_in: grid_in.clone(),
        grid_pump: grid_pump.clone(),
        temperature: t,
        values,
    })
}
