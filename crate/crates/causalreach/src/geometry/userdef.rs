//! User-defined sub-space-times loaded from a JSON document.
//!
//! The document lists polynomial frame-field coefficients, polynomial or
//! piecewise-polynomial metric coefficients, time-orientation coefficients
//! and the domain box:
//!
//! ```json
//! {
//!   "name": "my_manifold",
//!   "dim": 3,
//!   "rank": 2,
//!   "domain": { "lo": [-2, -2, -2], "hi": [2, 2, 2] },
//!   "frame": [
//!     [ {"terms": [{"coef": 1.0, "powers": [0,0,0]}]}, ... n entries ],
//!     ... k rows
//!   ],
//!   "metric": [[ ... k x k coefficient expressions ... ]],
//!   "orientation": [ ... k coefficient expressions ... ]
//! }
//! ```
//!
//! A coefficient expression is either a polynomial `{"terms": [...]}` or a
//! one-variable piecewise polynomial
//! `{"axis": 1, "breakpoints": [...], "pieces": [poly, ...]}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{classify_with, AxisBox, Geometry, Scratch, SubSpaceTime};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Poly {
    pub terms: Vec<Term>,
}

impl Poly {
    pub fn constant(c: f64, n: usize) -> Self {
        Poly {
            terms: vec![Term {
                coef: c,
                powers: vec![0; n],
            }],
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coef
                    * t.powers
                        .iter()
                        .zip(p)
                        .map(|(e, x)| x.powi(*e as i32))
                        .product::<f64>()
            })
            .sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Poly(Poly),
    Piecewise {
        axis: usize,
        breakpoints: Vec<f64>,
        pieces: Vec<Poly>,
    },
}

impl Coef {
    pub fn eval(&self, p: &[f64]) -> f64 {
        match self {
            Coef::Poly(poly) => poly.eval(p),
            Coef::Piecewise {
                axis,
                breakpoints,
                pieces,
            } => {
                let x = p[*axis];
                let idx = breakpoints.partition_point(|b| *b <= x);
                pieces[idx.min(pieces.len() - 1)].eval(p)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    pub domain: AxisBox,
    pub frame: Vec<Vec<Poly>>,
    pub metric: Vec<Vec<Coef>>,
    pub orientation: Vec<Coef>,
}

struct PolyGeometry {
    spec: ManifoldSpec,
}

impl Geometry for PolyGeometry {
    fn dim(&self) -> usize {
        self.spec.dim
    }
    fn rank(&self) -> usize {
        self.spec.rank
    }

    fn frame(&self, p: &[f64], out: &mut [f64]) {
        let n = self.spec.dim;
        for (i, row) in self.spec.frame.iter().enumerate() {
            for (j, poly) in row.iter().enumerate() {
                out[i * n + j] = poly.eval(p);
            }
        }
    }

    fn metric(&self, p: &[f64], out: &mut [f64]) {
        let k = self.spec.rank;
        for i in 0..k {
            for j in 0..k {
                out[i * k + j] = self.spec.metric[i][j].eval(p);
            }
        }
    }

    fn orientation(&self, p: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.spec.orientation) {
            *o = c.eval(p);
        }
    }
}

impl ManifoldSpec {
    pub fn validate(&self) -> Result<()> {
        let (n, k) = (self.dim, self.rank);
        if n < 2 || k < 2 || k > n {
            return Err(Error::ManifoldDef(format!(
                "need 2 <= rank <= dim, got rank {k}, dim {n}"
            )));
        }
        if self.domain.dim() != n {
            return Err(Error::ManifoldDef("domain dimension mismatch".into()));
        }
        if self.frame.len() != k || self.frame.iter().any(|row| row.len() != n) {
            return Err(Error::ManifoldDef(format!(
                "frame must be {k} fields of {n} components"
            )));
        }
        if self.metric.len() != k || self.metric.iter().any(|row| row.len() != k) {
            return Err(Error::ManifoldDef(format!("metric must be {k} x {k}")));
        }
        if self.orientation.len() != k {
            return Err(Error::ManifoldDef(format!(
                "orientation must have {k} coefficients"
            )));
        }
        Ok(())
    }
}

/// Builds a [`SubSpaceTime`] from a parsed spec, checking the structural
/// invariants (index 1, timelike orientation, independent frame) at
/// sampled domain points.
pub fn build(spec: ManifoldSpec) -> Result<SubSpaceTime> {
    spec.validate()?;
    let name = spec.name.clone();
    let domain = spec.domain.clone();
    let (n, k) = (spec.dim, spec.rank);
    let geometry: Arc<dyn Geometry> = Arc::new(PolyGeometry { spec });
    let st = SubSpaceTime::new(name.clone(), geometry, domain);

    let mut rng = crate::rng::stream(0x5eed, 0);
    let mut scratch = Scratch::new(n, k);
    let mut p = vec![0.0; n];
    for sample in 0..256 {
        st.domain().sample(&mut rng, &mut p);
        st.geometry().metric(&p, &mut scratch.metric);
        let m = nalgebra::DMatrix::from_row_slice(k, k, &scratch.metric);
        let sym = nalgebra::SymmetricEigen::new(m.clone());
        let negatives = sym.eigenvalues.iter().filter(|e| **e < 0.0).count();
        let max_asym = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| (m[(i, j)] - m[(j, i)]).abs())
            .fold(0.0f64, f64::max);
        if max_asym > 1e-9 {
            return Err(Error::ManifoldDef(format!(
                "metric not symmetric at {p:?} (sample {sample})"
            )));
        }
        if negatives != 1 {
            return Err(Error::ManifoldDef(format!(
                "metric index is {negatives}, expected 1, at {p:?}"
            )));
        }
        st.geometry().orientation(&p, &mut scratch.orient);
        let cls = classify_with(&scratch.metric, k, &scratch.orient, &scratch.orient.clone());
        if cls.character != super::Character::Timelike {
            return Err(Error::ManifoldDef(format!(
                "time orientation is not timelike at {p:?}"
            )));
        }
        st.geometry().frame(&p, &mut scratch.frame);
        let f = nalgebra::DMatrix::from_row_slice(k, n, &scratch.frame);
        let svd = f.svd(false, false);
        let smin = svd.singular_values.min();
        let smax = svd.singular_values.max();
        if smin < 1e-8 * smax.max(1.0) {
            return Err(Error::ManifoldDef(format!(
                "frame fields are linearly dependent at {p:?}"
            )));
        }
    }
    Ok(st)
}

/// Loads a user manifold from a JSON file.
pub fn load(path: &std::path::Path) -> Result<SubSpaceTime> {
    let text = std::fs::read_to_string(path)?;
    let spec: ManifoldSpec = serde_json::from_str(&text)?;
    build(spec)
}
