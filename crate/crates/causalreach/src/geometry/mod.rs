//! Sub-space-time structures and pointwise causal algebra.
//!
//! A [`SubSpaceTime`] bundles a frame-field evaluator spanning the
//! distribution, the index-1 metric coefficients on that frame, a
//! horizontal timelike time orientation and an axis-aligned domain box.
//! Horizontal vectors are always handled in frame coefficients (`R^k`);
//! conversion to ambient coordinates is an explicit operation.

mod bracket;
mod extend;
pub mod userdef;

pub use bracket::{lie_bracket, two_step_check, BracketExpr};
pub use extend::{extend_metric, ExtendedMetric};

use std::sync::Arc;

use crate::error::{Error, Result};

/// Band below which `|g(u,u)|` relative to `|u|^2` classifies as null.
pub const EPS_NULL: f64 = 1e-9;
/// `|det g|` below this raises an error instead of classifying.
pub const DEGENERATE_DET: f64 = 1e-12;
/// Base step for finite-difference brackets, scaled by `1 + |p|`.
pub const FD_STEP: f64 = 1e-5;

/// Axis-aligned box in `R^n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidConfig(format!(
                "invalid box: lo {lo:?}, hi {hi:?}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Cube `[-r, r]^n`.
    pub fn cube(n: usize, r: f64) -> Self {
        Self {
            lo: vec![-r; n],
            hi: vec![r; n],
        }
    }

    /// Cube of half-width `r` centred at `c`.
    pub fn around(c: &[f64], r: f64) -> Self {
        Self {
            lo: c.iter().map(|x| x - r).collect(),
            hi: c.iter().map(|x| x + r).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).collect()
    }

    /// Uniform sample, written into `out`.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R, out: &mut [f64]) {
        for ((x, lo), hi) in out.iter_mut().zip(&self.lo).zip(&self.hi) {
            *x = rng.gen_range(*lo..*hi);
        }
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| a.min(*b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| a.max(*b))
                .collect(),
        }
    }
}

/// Evaluators for the frame fields, metric coefficients and time
/// orientation of a sub-space-time. All buffers are row-major.
pub trait Geometry: Send + Sync {
    fn dim(&self) -> usize;
    fn rank(&self) -> usize;

    /// Writes the `k` frame fields at `p` as `k` rows of `n` entries.
    fn frame(&self, p: &[f64], out: &mut [f64]);

    /// Writes the symmetric `k x k` metric coefficient matrix at `p`.
    fn metric(&self, p: &[f64], out: &mut [f64]);

    /// Writes the `k` frame coefficients of the time orientation at `p`.
    fn orientation(&self, p: &[f64], out: &mut [f64]);

    /// Analytic bracket `[X_i, X_j]` at `p`, when the structure provides
    /// one. Returns `false` to fall back to the difference stencil.
    fn bracket(&self, _i: usize, _j: usize, _p: &[f64], _out: &mut [f64]) -> bool {
        false
    }
}

/// Region removed from the manifold (e.g. deleted orbit lines). Trajectory
/// segments crossing it are truncated.
pub trait Exclusion: Send + Sync {
    fn excluded(&self, p: &[f64]) -> bool;

    /// Conservative test whether the straight segment `a -> b` meets the
    /// excluded set.
    fn segment_excluded(&self, a: &[f64], b: &[f64]) -> bool {
        self.excluded(a) || self.excluded(b)
    }
}

/// A sub-space-time: distribution frame, index-1 metric, time orientation
/// and domain. Immutable after construction and cheap to clone.
#[derive(Clone)]
pub struct SubSpaceTime {
    name: String,
    geometry: Arc<dyn Geometry>,
    domain: AxisBox,
    exclusion: Option<Arc<dyn Exclusion>>,
}

impl std::fmt::Debug for SubSpaceTime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubSpaceTime")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("rank", &self.rank())
            .field("domain", &self.domain)
            .finish()
    }
}

impl SubSpaceTime {
    pub fn new(name: impl Into<String>, geometry: Arc<dyn Geometry>, domain: AxisBox) -> Self {
        assert_eq!(domain.dim(), geometry.dim(), "domain dimension mismatch");
        Self {
            name: name.into(),
            geometry,
            domain,
            exclusion: None,
        }
    }

    pub fn with_exclusion(mut self, exclusion: Arc<dyn Exclusion>) -> Self {
        self.exclusion = Some(exclusion);
        self
    }

    /// Same structure on a different domain box (used for covering spaces).
    pub fn with_domain(&self, domain: AxisBox) -> Self {
        let mut st = self.clone();
        st.domain = domain;
        st
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }
    pub fn rank(&self) -> usize {
        self.geometry.rank()
    }
    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }
    pub fn geometry(&self) -> &Arc<dyn Geometry> {
        &self.geometry
    }
    pub fn exclusion(&self) -> Option<&Arc<dyn Exclusion>> {
        self.exclusion.as_ref()
    }

    /// True when `p` lies in the domain box and outside any excluded set.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.domain.contains(p) && !self.exclusion.as_ref().is_some_and(|e| e.excluded(p))
    }

    pub fn check_contains(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                manifold: self.name.clone(),
                point: p.to_vec(),
            })
        }
    }

    /// True when the straight segment `a -> b` stays clear of excluded sets.
    pub fn segment_allowed(&self, a: &[f64], b: &[f64]) -> bool {
        !self
            .exclusion
            .as_ref()
            .is_some_and(|e| e.segment_excluded(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Character {
    Spacelike,
    Null,
    Timelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    Future,
    Past,
    Unoriented,
}

/// Causal character of a horizontal vector together with its orientation
/// relative to the time orientation. `Unoriented` exactly for spacelike
/// vectors (including the zero vector).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CausalCharacter {
    pub character: Character,
    pub orientation: Orientation,
}

impl CausalCharacter {
    pub fn is_causal_future(&self) -> bool {
        self.orientation == Orientation::Future
            && matches!(self.character, Character::Timelike | Character::Null)
    }
}

impl std::fmt::Display for CausalCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}/{:?}", self.character, self.orientation)
    }
}

/// Scratch buffers for pointwise evaluation; reusable across calls to
/// avoid allocation in integration loops.
#[derive(Debug, Clone)]
pub struct Scratch {
    pub frame: Vec<f64>,  // k*n
    pub metric: Vec<f64>, // k*k
    pub orient: Vec<f64>, // k
    pub ortho: Vec<f64>,  // k*k, columns are orthonormal vectors
    pub tmp: Vec<f64>,    // k
    pub tmp2: Vec<f64>,   // k
}

impl Scratch {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            frame: vec![0.0; k * n],
            metric: vec![0.0; k * k],
            orient: vec![0.0; k],
            ortho: vec![0.0; k * k],
            tmp: vec![0.0; k],
            tmp2: vec![0.0; k],
        }
    }

    pub fn for_st(st: &SubSpaceTime) -> Self {
        Self::new(st.dim(), st.rank())
    }
}

/// `u^T g v` for frame-coefficient vectors.
pub fn metric_product(g: &[f64], k: usize, u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..k {
        let mut row = 0.0;
        for j in 0..k {
            row += g[i * k + j] * v[j];
        }
        s += u[i] * row;
    }
    s
}

fn det_small(g: &[f64], k: usize) -> f64 {
    match k {
        1 => g[0],
        2 => g[0] * g[3] - g[1] * g[2],
        3 => {
            g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6])
                + g[2] * (g[3] * g[7] - g[4] * g[6])
        }
        _ => {
            let m = nalgebra::DMatrix::from_row_slice(k, k, g);
            m.determinant()
        }
    }
}

/// Classifies a horizontal vector given in frame coefficients `u` at `p`.
///
/// The zero vector is spacelike; values of `g(u,u)` within the relative
/// band [`EPS_NULL`] classify as null. Orientation comes from the sign of
/// `g(u, T)`.
pub fn classify_vector(st: &SubSpaceTime, p: &[f64], u: &[f64]) -> Result<CausalCharacter> {
    st.check_contains(p)?;
    let k = st.rank();
    if u.len() != k {
        return Err(Error::InvalidConfig(format!(
            "expected {k} frame coefficients, got {}",
            u.len()
        )));
    }
    let mut s = Scratch::for_st(st);
    st.geometry().metric(p, &mut s.metric);
    let det = det_small(&s.metric, k);
    if det.abs() < DEGENERATE_DET {
        return Err(Error::DegenerateMetric {
            point: p.to_vec(),
            det,
        });
    }
    st.geometry().orientation(p, &mut s.orient);
    Ok(classify_with(&s.metric, k, &s.orient, u))
}

/// Classification against explicitly supplied metric and orientation.
pub fn classify_with(g: &[f64], k: usize, orient: &[f64], u: &[f64]) -> CausalCharacter {
    let norm2: f64 = u.iter().map(|x| x * x).sum();
    if norm2 == 0.0 {
        return CausalCharacter {
            character: Character::Spacelike,
            orientation: Orientation::Unoriented,
        };
    }
    let guu = metric_product(g, k, u, u);
    let character = if guu.abs() <= EPS_NULL * norm2 {
        Character::Null
    } else if guu < 0.0 {
        Character::Timelike
    } else {
        Character::Spacelike
    };
    let orientation = if character == Character::Spacelike {
        Orientation::Unoriented
    } else {
        let gut = metric_product(g, k, u, orient);
        if gut < 0.0 {
            Orientation::Future
        } else {
            Orientation::Past
        }
    };
    CausalCharacter {
        character,
        orientation,
    }
}

/// Lorentzian orthonormal frame for the distribution at one point.
///
/// `transform` maps orthonormal coefficients to raw frame coefficients;
/// its columns satisfy `A^T g A = diag(-1, 1, ..., 1)` with the first
/// column future directed.
#[derive(Debug, Clone)]
pub struct OrthonormalFrame {
    pub base_point: Vec<f64>,
    pub transform: nalgebra::DMatrix<f64>,
}

/// Signature-aware Gram-Schmidt seeded with the time orientation.
///
/// Writes the `k x k` transform into `scratch.ortho` (row-major, columns
/// are the orthonormal vectors). Requires `scratch.metric` and
/// `scratch.orient` to be filled for the evaluation point.
pub fn ortho_into(scratch: &mut Scratch, k: usize) -> Result<()> {
    let g = &scratch.metric;
    let c = &scratch.orient;
    let gcc = metric_product(g, k, c, c);
    if !(gcc < 0.0) {
        return Err(Error::BadIndex { point: vec![] });
    }
    let inv = 1.0 / (-gcc).sqrt();
    // Column 0: normalized time orientation (future directed since
    // g(e0, c) = g(c,c)/sqrt(-g(c,c)) < 0).
    for r in 0..k {
        scratch.ortho[r * k] = c[r] * inv;
    }
    let mut cols = 1usize;
    let mut cand = 0usize;
    while cols < k && cand < k {
        // Start from the standard basis vector `cand`.
        for r in 0..k {
            scratch.tmp[r] = if r == cand { 1.0 } else { 0.0 };
        }
        // Two projection passes for numerical stability.
        for _ in 0..2 {
            for col in 0..cols {
                for r in 0..k {
                    scratch.tmp2[r] = scratch.ortho[r * k + col];
                }
                let sign = if col == 0 { 1.0 } else { -1.0 };
                let proj = metric_product(g, k, &scratch.tmp, &scratch.tmp2);
                for r in 0..k {
                    scratch.tmp[r] += sign * proj * scratch.tmp2[r];
                }
            }
        }
        let nrm2 = metric_product(g, k, &scratch.tmp, &scratch.tmp);
        let euclid2: f64 = scratch.tmp.iter().map(|x| x * x).sum();
        if nrm2 > 1e-10 * (1.0 + euclid2) {
            let s = 1.0 / nrm2.sqrt();
            for r in 0..k {
                scratch.ortho[r * k + cols] = scratch.tmp[r] * s;
            }
            cols += 1;
        }
        cand += 1;
    }
    if cols < k {
        return Err(Error::BadIndex { point: vec![] });
    }
    Ok(())
}

/// Deterministic Lorentzian orthonormal frame at `p`.
pub fn orthonormal_frame(st: &SubSpaceTime, p: &[f64]) -> Result<OrthonormalFrame> {
    st.check_contains(p)?;
    let k = st.rank();
    let mut s = Scratch::for_st(st);
    st.geometry().metric(p, &mut s.metric);
    let det = det_small(&s.metric, k);
    if det.abs() < DEGENERATE_DET {
        return Err(Error::DegenerateMetric {
            point: p.to_vec(),
            det,
        });
    }
    st.geometry().orientation(p, &mut s.orient);
    ortho_into(&mut s, k).map_err(|e| match e {
        Error::BadIndex { .. } => Error::BadIndex { point: p.to_vec() },
        other => other,
    })?;
    Ok(OrthonormalFrame {
        base_point: p.to_vec(),
        transform: nalgebra::DMatrix::from_row_slice(k, k, &s.ortho),
    })
}

/// Converts frame coefficients to an ambient vector using the frame at `p`.
pub fn to_ambient(st: &SubSpaceTime, p: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    st.check_contains(p)?;
    let (n, k) = (st.dim(), st.rank());
    let mut frame = vec![0.0; k * n];
    st.geometry().frame(p, &mut frame);
    let mut out = vec![0.0; n];
    for j in 0..k {
        for i in 0..n {
            out[i] += u[j] * frame[j * n + i];
        }
    }
    Ok(out)
}

/// Least-squares frame coefficients of an ambient vector at `p`, with the
/// residual norm (horizontality defect).
pub fn to_frame_coords(st: &SubSpaceTime, p: &[f64], v: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (n, k) = (st.dim(), st.rank());
    let mut frame = vec![0.0; k * n];
    st.geometry().frame(p, &mut frame);
    let f = nalgebra::DMatrix::from_row_slice(k, n, &frame);
    let gram = &f * f.transpose();
    let rhs = &f * nalgebra::DVector::from_column_slice(v);
    let coeffs = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::BadIndex { point: p.to_vec() })?;
    let recon = f.transpose() * &coeffs;
    let defect = (nalgebra::DVector::from_column_slice(v) - recon).norm();
    Ok((coeffs.as_slice().to_vec(), defect))
}

#[cfg(test)]
mod tests;
