//! Lie brackets of frame fields and the two-step spanning test.

use super::{AxisBox, SubSpaceTime, FD_STEP};
use crate::error::{Error, Result};

/// Frame index or nested bracket expression, e.g. `[X, [X, T]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketExpr {
    Field(usize),
    Bracket(Box<BracketExpr>, Box<BracketExpr>),
}

impl BracketExpr {
    pub fn field(i: usize) -> Self {
        BracketExpr::Field(i)
    }

    pub fn bracket(a: BracketExpr, b: BracketExpr) -> Self {
        BracketExpr::Bracket(Box::new(a), Box::new(b))
    }

    pub fn depth(&self) -> usize {
        match self {
            BracketExpr::Field(_) => 1,
            BracketExpr::Bracket(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn max_index(&self) -> usize {
        match self {
            BracketExpr::Field(i) => *i,
            BracketExpr::Bracket(a, b) => a.max_index().max(b.max_index()),
        }
    }
}

fn fd_step(p: &[f64]) -> f64 {
    let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    FD_STEP * (1.0 + norm)
}

/// The stencil needs room `margin` around `p` inside the domain box.
fn check_stencil_room(domain: &AxisBox, p: &[f64], margin: f64) -> Result<()> {
    let ok = p
        .iter()
        .zip(domain.lo.iter().zip(&domain.hi))
        .all(|(x, (lo, hi))| *x - margin >= *lo && *x + margin <= *hi);
    if ok {
        Ok(())
    } else {
        Err(Error::StencilOutsideDomain { point: p.to_vec() })
    }
}

/// Evaluates the vector field described by `expr` at `p` (ambient
/// coordinates, written to `out`). Plain `[X_i, X_j]` uses an analytic
/// bracket when the structure supplies one.
fn eval_expr(st: &SubSpaceTime, expr: &BracketExpr, p: &[f64], out: &mut [f64]) {
    let n = st.dim();
    let k = st.rank();
    match expr {
        BracketExpr::Field(i) => {
            let mut frame = vec![0.0; k * n];
            st.geometry().frame(p, &mut frame);
            out.copy_from_slice(&frame[i * n..(i + 1) * n]);
        }
        BracketExpr::Bracket(a, b) => {
            if let (BracketExpr::Field(i), BracketExpr::Field(j)) = (a.as_ref(), b.as_ref()) {
                if st.geometry().bracket(*i, *j, p, out) {
                    return;
                }
            }
            // [A, B](p) = (DB)(p) A(p) - (DA)(p) B(p), with directional
            // derivatives by central differences along the evaluated
            // directions.
            let mut va = vec![0.0; n];
            let mut vb = vec![0.0; n];
            eval_expr(st, a, p, &mut va);
            eval_expr(st, b, p, &mut vb);
            let mut shifted = vec![0.0; n];
            let mut plus = vec![0.0; n];
            let mut minus = vec![0.0; n];
            out.iter_mut().for_each(|x| *x = 0.0);

            let mut directional = |field: &BracketExpr, dir: &[f64], sign: f64, out: &mut [f64]| {
                let norm: f64 = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return;
                }
                let h = fd_step(p);
                for (s, (pi, di)) in shifted.iter_mut().zip(p.iter().zip(dir)) {
                    *s = pi + h * di / norm;
                }
                eval_expr(st, field, &shifted, &mut plus);
                for (s, (pi, di)) in shifted.iter_mut().zip(p.iter().zip(dir)) {
                    *s = pi - h * di / norm;
                }
                eval_expr(st, field, &shifted, &mut minus);
                let scale = sign * norm / (2.0 * h);
                for i in 0..out.len() {
                    out[i] += scale * (plus[i] - minus[i]);
                }
            };
            directional(b, &va, 1.0, out);
            directional(a, &vb, -1.0, out);
        }
    }
}

/// Central finite-difference Lie bracket `[a, b](p)` in ambient
/// coordinates; error `O(h^2)` in the stencil step.
pub fn lie_bracket(
    st: &SubSpaceTime,
    a: &BracketExpr,
    b: &BracketExpr,
    p: &[f64],
) -> Result<Vec<f64>> {
    st.check_contains(p)?;
    let expr = BracketExpr::bracket(a.clone(), b.clone());
    if expr.depth() > 4 {
        // depth 4 here corresponds to bracket nesting three deep
        return Err(Error::BracketTooDeep);
    }
    let k = st.rank();
    if expr.max_index() >= k {
        return Err(Error::BadFrameIndex {
            index: expr.max_index(),
            rank: k,
        });
    }
    // Nested stencils reach out up to depth * h from p.
    let margin = 4.0 * fd_step(p) * expr.depth() as f64;
    check_stencil_room(st.domain(), p, margin)?;
    let mut out = vec![0.0; st.dim()];
    eval_expr(st, &expr, p, &mut out);
    Ok(out)
}

/// True when the frame fields together with their first-order brackets
/// span `R^n` at `p` (rank test with relative tolerance `1e-8`).
pub fn two_step_check(st: &SubSpaceTime, p: &[f64]) -> Result<bool> {
    st.check_contains(p)?;
    check_stencil_room(st.domain(), p, 8.0 * fd_step(p))?;
    let n = st.dim();
    let k = st.rank();
    let mut frame = vec![0.0; k * n];
    st.geometry().frame(p, &mut frame);

    let mut cols: Vec<f64> = Vec::with_capacity(n * (k + k * (k - 1) / 2));
    for i in 0..k {
        cols.extend_from_slice(&frame[i * n..(i + 1) * n]);
    }
    let mut br = vec![0.0; n];
    for i in 0..k {
        for j in (i + 1)..k {
            if !st.geometry().bracket(i, j, p, &mut br) {
                eval_expr(
                    st,
                    &BracketExpr::bracket(BracketExpr::field(i), BracketExpr::field(j)),
                    p,
                    &mut br,
                );
            }
            cols.extend_from_slice(&br);
        }
    }
    let ncols = cols.len() / n;
    let m = nalgebra::DMatrix::from_fn(n, ncols, |r, c| cols[c * n + r]);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > 1e-8 * smax.max(1.0))
        .count();
    Ok(rank == n)
}
