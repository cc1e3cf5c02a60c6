//! Extension of the distribution metric to a Lorentzian metric on the
//! whole tangent space.

use nalgebra::{DMatrix, DVector};

use super::SubSpaceTime;
use crate::error::{Error, Result};

/// Lorentzian extension `g_lambda = g . pi_D + lambda^2 h . pi_{D_perp}`
/// of the distribution metric, with `h`-orthogonal projections. The
/// auxiliary Riemannian metric defaults to the Euclidean one.
#[derive(Clone)]
pub struct ExtendedMetric {
    base: SubSpaceTime,
    lambda: f64,
    aux: Option<std::sync::Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>>,
}

impl ExtendedMetric {
    pub fn base(&self) -> &SubSpaceTime {
        &self.base
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_aux(
        mut self,
        aux: std::sync::Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>,
    ) -> Self {
        self.aux = Some(aux);
        self
    }

    fn aux_at(&self, p: &[f64]) -> DMatrix<f64> {
        match &self.aux {
            Some(f) => f(p),
            None => DMatrix::identity(self.base.dim(), self.base.dim()),
        }
    }

    /// Full `n x n` metric matrix at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.base.check_contains(p)?;
        let n = self.base.dim();
        let k = self.base.rank();
        let mut frame = vec![0.0; k * n];
        self.base.geometry().frame(p, &mut frame);
        // Columns of F are the frame fields.
        let f = DMatrix::from_fn(n, k, |r, c| frame[c * n + r]);
        let h = self.aux_at(p);
        let m = f.transpose() * &h * &f;
        let m_inv = m
            .try_inverse()
            .ok_or_else(|| Error::BadIndex { point: p.to_vec() })?;
        // P maps an ambient vector to the frame coefficients of its
        // h-orthogonal projection onto the distribution.
        let proj = m_inv * f.transpose() * &h;
        let mut g = vec![0.0; k * k];
        self.base.geometry().metric(p, &mut g);
        let gk = DMatrix::from_row_slice(k, k, &g);
        let complement = DMatrix::identity(n, n) - &f * &proj;
        let lam2 = self.lambda * self.lambda;
        Ok(proj.transpose() * gk * &proj + lam2 * complement.transpose() * h * complement)
    }

    /// `g_lambda(v, w)` for ambient vectors at `p`.
    pub fn value(&self, p: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
        let g = self.eval(p)?;
        let gv = g * DVector::from_column_slice(w);
        Ok(DVector::from_column_slice(v).dot(&gv))
    }
}

/// Extends the distribution metric of `st` by `lambda^2` times the
/// auxiliary metric on the orthogonal complement.
pub fn extend_metric(st: &SubSpaceTime, lambda: f64) -> Result<ExtendedMetric> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "extension weight must be positive, got {lambda}"
        )));
    }
    Ok(ExtendedMetric {
        base: st.clone(),
        lambda,
        aux: None,
    })
}
