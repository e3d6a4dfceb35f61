//! Functional forms of the bundled Sellmeier equations and the coefficient
//! file parser. All forms take wavelength in micrometres and temperature in
//! degrees Celsius.

use super::{Material, MaterialModel, Polarization, Validity};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SellmeierForm {
    /// `A1 A2 A3 A4 B1 B2 B3`
    EdwardsLawrence([f64; 7]),
    /// `a1 a2 a3 a4 a5 a6 b1 b2 b3 b4`
    Jundt([f64; 10]),
    /// Jundt coefficients followed by the effective-mode correction `q r`.
    JundtWaveguide([f64; 12]),
    /// `a1 a2 a3 a4 a5 a6 b1 b2 b3 b4 b5`
    Dolev([f64; 11]),
    /// `A B C D E t3 t2 t1 t0`, thermo-optic polynomial in units of 1e-5 / K.
    KatoTakaoka([f64; 9]),
}

impl SellmeierForm {
    pub fn name(&self) -> &'static str {
        match self {
            SellmeierForm::EdwardsLawrence(_) => "edwards-lawrence",
            SellmeierForm::Jundt(_) => "jundt",
            SellmeierForm::JundtWaveguide(_) => "jundt-waveguide",
            SellmeierForm::Dolev(_) => "dolev",
            SellmeierForm::KatoTakaoka(_) => "kato-takaoka",
        }
    }

    fn from_tokens(name: &str, coeffs: &[f64]) -> std::result::Result<Self, String> {
        fn take<const N: usize>(name: &str, c: &[f64]) -> std::result::Result<[f64; N], String> {
            c.try_into()
                .map_err(|_| format!("form `{name}` expects {N} coefficients, found {}", c.len()))
        }
        Ok(match name {
            "edwards-lawrence" => SellmeierForm::EdwardsLawrence(take(name, coeffs)?),
            "jundt" => SellmeierForm::Jundt(take(name, coeffs)?),
            "jundt-waveguide" => SellmeierForm::JundtWaveguide(take(name, coeffs)?),
            "dolev" => SellmeierForm::Dolev(take(name, coeffs)?),
            "kato-takaoka" => SellmeierForm::KatoTakaoka(take(name, coeffs)?),
            other => return Err(format!("unknown Sellmeier form `{other}`")),
        })
    }

    /// Raw index with no validity check.
    pub fn index(&self, l_um: f64, t_c: f64) -> f64 {
        let l2 = l_um * l_um;
        match self {
            SellmeierForm::EdwardsLawrence(c) => {
                let f = (t_c - 24.5) * (t_c + 570.5);
                let pole = c[2] + c[5] * f;
                (c[0] + (c[1] + c[4] * f) / (l2 - pole * pole) + c[6] * f - c[3] * l2).sqrt()
            }
            SellmeierForm::Jundt(c) => jundt_n2(c[..10].try_into().unwrap(), l2, t_c).sqrt(),
            SellmeierForm::JundtWaveguide(c) => {
                let f = (t_c - 24.5) * (t_c + 570.82);
                let base = jundt_n2(c[..10].try_into().unwrap(), l2, t_c);
                (base - (c[10] + c[11] * f) * l2).sqrt()
            }
            SellmeierForm::Dolev(c) => {
                let f = (t_c - 24.5) * (t_c + 24.5 + 2.0 * 273.16);
                let p1 = c[2] + c[8] * f;
                let p2 = c[4] + c[10] * f;
                (c[0] + c[6] * f + (c[1] + c[7] * f) / (l2 - p1 * p1)
                    + (c[3] + c[9] * f) / (l2 - p2 * p2)
                    - c[5] * l2)
                    .sqrt()
            }
            SellmeierForm::KatoTakaoka(c) => {
                let n20 = (c[0] + c[1] / (l2 - c[2]) + c[3] / (l2 - c[4])).sqrt();
                let dndt = (c[5] / (l2 * l_um) + c[6] / l2 + c[7] / l_um + c[8]) * 1e-5;
                n20 + dndt * (t_c - 20.0)
            }
        }
    }
}

fn jundt_n2(c: &[f64; 10], l2: f64, t_c: f64) -> f64 {
    let f = (t_c - 24.5) * (t_c + 570.82);
    let pole = c[2] + c[8] * f;
    c[0] + c[6] * f + (c[1] + c[7] * f) / (l2 - pole * pole) + (c[3] + c[9] * f) / (l2 - c[4] * c[4])
        - c[5] * l2
}

/// Parses the line-oriented coefficient table.
///
/// Each non-comment line reads
/// `material polarization form c0 .. cN lambda_min_um lambda_max_um t_min_c t_max_c`.
/// `#` starts a comment anywhere on a line.
pub fn parse_table(text: &str) -> Result<Vec<MaterialModel>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 + 4 {
            return Err(err(format!("expected at least 7 fields, found {}", tokens.len())));
        }
        let material: Material = tokens[0].parse().map_err(err)?;
        let polarization: Polarization = tokens[1].parse().map_err(err)?;
        let numbers = tokens[3..]
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
            .collect::<std::result::Result<Vec<f64>, String>>()
            .map_err(err)?;
        if numbers.iter().any(|v| !v.is_finite()) {
            return Err(err("non-finite coefficient".into()));
        }
        let (coeffs, window) = numbers.split_at(numbers.len() - 4);
        let form = SellmeierForm::from_tokens(tokens[2], coeffs).map_err(err)?;
        let validity = Validity {
            lambda_um: (window[0], window[1]),
            temperature_c: (window[2], window[3]),
        };
        if !(validity.lambda_um.0 > 0.0 && validity.lambda_um.0 < validity.lambda_um.1)
            || validity.temperature_c.0 >= validity.temperature_c.1
        {
            return Err(err("validity window is empty or inverted".into()));
        }
        if out
            .iter()
            .any(|m: &MaterialModel| m.material == material && m.polarization == polarization)
        {
            return Err(err(format!("duplicate record {material} {polarization}")));
        }
        out.push(MaterialModel {
            material,
            polarization,
            form,
            validity,
        });
    }
    Ok(out)
}
