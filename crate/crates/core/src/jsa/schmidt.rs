use crate::error::{Error, Result};
use crate::map::ComplexMap2D;
use nalgebra::{Complex, DMatrix};

/// Singular-value decomposition of a sampled joint amplitude.
///
/// `coefficients` are the normalized Schmidt coefficients `c_k ≥ 0` with
/// `Σ c_k² = 1`, sorted in descending order. Mode `k` is column `k` of
/// `input_modes` and `second_modes`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub input_modes: DMatrix<Complex<f64>>,
    pub second_modes: DMatrix<Complex<f64>>,
    norm: f64,
}

impl SchmidtDecomposition {
    /// `K = 1 / Σ c_k⁴`.
    pub fn schmidt_number(&self) -> f64 {
        1.0 / self.coefficients.iter().map(|c| c.powi(4)).sum::<f64>()
    }

    /// Frobenius norm of the decomposed matrix.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Rebuilds the sampled amplitude from the leading `modes` terms.
    pub fn reconstruct(&self, modes: usize) -> DMatrix<Complex<f64>> {
        let (r, c) = (self.input_modes.nrows(), self.second_modes.nrows());
        let mut out = DMatrix::zeros(r, c);
        for k in 0..modes.min(self.coefficients.len()) {
            let u = self.input_modes.column(k);
            let v = self.second_modes.column(k);
            let s = Complex::new(self.coefficients[k] * self.norm, 0.0);
            out += u * v.transpose() * s;
        }
        out
    }
}

pub fn schmidt(map: &ComplexMap2D) -> Result<SchmidtDecomposition> {
    let m = map.to_matrix();
    let norm = m.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::NumericalFailure("joint amplitude is identically zero".into()));
    }
    let svd = m
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("singular value decomposition did not converge".into()))?;
    let u = svd.u.ok_or_else(|| Error::NumericalFailure("missing left singular vectors".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::NumericalFailure("missing right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coefficients: Vec<f64> = order.iter().map(|&k| svd.singular_values[k] / norm).collect();
    let input_modes = DMatrix::from_columns(&order.iter().map(|&k| u.column(k)).collect::<Vec<_>>());
    // A = U Σ Vᴴ, so storing row k of Vᴴ (unconjugated) as v_k gives
    // A = Σ s_k u_k v_kᵀ.
    let second_modes = DMatrix::from_columns(
        &order
            .iter()
            .map(|&k| v_t.row(k).transpose().into_owned())
            .collect::<Vec<_>>(),
    );
    Ok(SchmidtDecomposition {
        coefficients,
        input_modes,
        second_modes,
        norm,
    })
}
