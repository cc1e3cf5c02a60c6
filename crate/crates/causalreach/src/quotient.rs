//! Quotients of sub-space-times by cyclic groups of isometries.
//!
//! Quotient reachability is sampled in the covering space over a fixed
//! number of fundamental-domain copies and projected by canonicalization;
//! this reuses the flat integrator and is exact up to the covering
//! truncation, which is detected and reported.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::curves::{self, ControlLaw, ControlSignal, HorizontalCurve, Strictness};
use crate::error::{Error, Result};
use crate::geometry::{AxisBox, Scratch, SubSpaceTime};
use crate::reach::{
    Direction, GridMeta, GridSemantics, ReachConfig, ReachGrid, TrajectorySink,
};
use crate::rng;

pub type PtFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type JacFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A diffeomorphism with its inverse and (optionally analytic) Jacobian.
#[derive(Clone)]
pub struct Isometry {
    pub name: String,
    map: PtFn,
    inverse: PtFn,
    jacobian: Option<JacFn>,
}

impl std::fmt::Debug for Isometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Isometry({})", self.name)
    }
}

impl Isometry {
    pub fn new(name: impl Into<String>, map: PtFn, inverse: PtFn, jacobian: Option<JacFn>) -> Self {
        Self {
            name: name.into(),
            map,
            inverse,
            jacobian,
        }
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        (self.map)(p, &mut out);
        out
    }

    pub fn apply_inverse(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        (self.inverse)(p, &mut out);
        out
    }

    /// Analytic Jacobian when available, central differences otherwise.
    pub fn jacobian_at(&self, p: &[f64]) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(p);
        }
        let n = p.len();
        let h = 1e-6 * (1.0 + p.iter().map(|x| x * x).sum::<f64>().sqrt());
        let mut out = DMatrix::zeros(n, n);
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        let mut shifted = p.to_vec();
        for j in 0..n {
            shifted[j] = p[j] + h;
            (self.map)(&shifted, &mut plus);
            shifted[j] = p[j] - h;
            (self.map)(&shifted, &mut minus);
            shifted[j] = p[j];
            for i in 0..n {
                out[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        out
    }
}

/// Numerical check that a map preserves the sub-Lorentzian structure:
/// pushed frame vectors stay in the distribution, the pulled-back metric
/// equals the metric, and the pushed time orientation stays in the future
/// cone.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IsometryReport {
    pub samples: usize,
    pub max_distribution_defect: f64,
    pub max_metric_defect: f64,
    /// Maximum of `g(push(T), T)` over samples; negative means the map
    /// preserves time orientation.
    pub orientation_sign: f64,
    pub max_inverse_defect: f64,
}

impl IsometryReport {
    pub fn preserves_structure(&self) -> bool {
        self.max_distribution_defect < 1e-6 && self.max_metric_defect < 1e-6
    }

    pub fn preserves_orientation(&self) -> bool {
        self.orientation_sign < 0.0
    }

    pub fn passes(&self) -> bool {
        self.preserves_structure() && self.preserves_orientation() && self.max_inverse_defect < 1e-9
    }
}

pub fn verify_isometry(
    st: &SubSpaceTime,
    iso: &Isometry,
    samples: usize,
    seed: u64,
) -> IsometryReport {
    let n = st.dim();
    let k = st.rank();
    let mut rng = rng::stream(seed, 0);
    let mut report = IsometryReport {
        samples: 0,
        max_distribution_defect: 0.0,
        max_metric_defect: 0.0,
        orientation_sign: f64::NEG_INFINITY,
        max_inverse_defect: 0.0,
    };
    let mut p = vec![0.0; n];
    let mut scratch_p = Scratch::new(n, k);
    let mut scratch_q = Scratch::new(n, k);
    let mut attempts = 0;
    while report.samples < samples && attempts < samples * 20 {
        attempts += 1;
        st.domain().sample(&mut rng, &mut p);
        if !st.contains(&p) {
            continue;
        }
        let q = iso.apply(&p);
        if !st.contains(&q) {
            continue;
        }
        let back = iso.apply_inverse(&q);
        let inv_defect = p
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();

        let jac = iso.jacobian_at(&p);
        st.geometry().frame(&p, &mut scratch_p.frame);
        st.geometry().metric(&p, &mut scratch_p.metric);
        st.geometry().orientation(&p, &mut scratch_p.orient);
        st.geometry().metric(&q, &mut scratch_q.metric);
        st.geometry().orientation(&q, &mut scratch_q.orient);

        // Push each frame field and express it in the frame at q.
        let mut coeffs = Vec::with_capacity(k);
        let mut dist_defect = 0.0f64;
        for i in 0..k {
            let v: Vec<f64> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| jac[(r, c)] * scratch_p.frame[i * n + c])
                        .sum()
                })
                .collect();
            let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            match crate::geometry::to_frame_coords(st, &q, &v) {
                Ok((c, defect)) => {
                    dist_defect = dist_defect.max(defect / vnorm);
                    coeffs.push(c);
                }
                Err(_) => continue,
            }
        }
        if coeffs.len() != k {
            continue;
        }
        let mut metric_defect = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let pulled =
                    crate::geometry::metric_product(&scratch_q.metric, k, &coeffs[i], &coeffs[j]);
                metric_defect = metric_defect.max((pulled - scratch_p.metric[i * k + j]).abs());
            }
        }
        // Push the time orientation vector and compare cones at q.
        let t_coeff: Vec<f64> = scratch_p.orient.clone();
        let pushed_t: Vec<f64> = (0..k)
            .map(|row| {
                (0..k)
                    .map(|c| coeffs[c][row] * t_coeff[c])
                    .sum()
            })
            .collect();
        let sign =
            crate::geometry::metric_product(&scratch_q.metric, k, &pushed_t, &scratch_q.orient);

        report.samples += 1;
        report.max_distribution_defect = report.max_distribution_defect.max(dist_defect);
        report.max_metric_defect = report.max_metric_defect.max(metric_defect);
        report.orientation_sign = report.orientation_sign.max(sign);
        report.max_inverse_defect = report.max_inverse_defect.max(inv_defect);
    }
    report
}

/// Canonicalization schemes for the registry's cyclic actions.
#[derive(Debug, Clone)]
pub enum CanonKind {
    Trivial,
    /// `axis`-coordinate taken modulo `period` into `[0, period)`.
    ShiftAxis { axis: usize, period: f64 },
    /// Boost-translation quotient of the Heisenberg structure; the
    /// winding coordinate `x cosh(phi) - y sinh(phi)` is reduced into
    /// `[0, 1)`.
    Boost { phi: f64 },
}

/// Single-generator cyclic group action with a canonicalization map onto
/// a fundamental domain. `fundamental_box` is the axis-aligned region the
/// quotient grids cover; `copies` is the number of fundamental copies the
/// covering-space sampler keeps on each side.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub name: String,
    pub generator: Isometry,
    pub kind: CanonKind,
    pub fundamental_box: AxisBox,
    pub copies: usize,
}

impl GroupAction {
    /// Continuous winding coordinate; drops by 1 under the generator.
    pub fn winding(&self, p: &[f64]) -> f64 {
        match &self.kind {
            CanonKind::Trivial => 0.0,
            CanonKind::ShiftAxis { axis, period } => -p[*axis] / period,
            CanonKind::Boost { phi } => p[0] * phi.cosh() - p[1] * phi.sinh(),
        }
    }

    /// Closed-form `n`-fold application of the generator, into `out`.
    pub fn apply_n_into(&self, p: &[f64], steps: i64, out: &mut [f64]) {
        out.copy_from_slice(p);
        match &self.kind {
            CanonKind::Trivial => {}
            CanonKind::ShiftAxis { axis, period } => {
                out[*axis] += steps as f64 * period;
            }
            CanonKind::Boost { phi } => {
                let (c, s) = (phi.cosh(), phi.sinh());
                let n = steps as f64;
                out[0] = p[0] - n * c;
                out[1] = p[1] - n * s;
                out[2] = p[2] + 0.5 * n * (p[1] * c - p[0] * s);
            }
        }
    }

    pub fn apply_n(&self, p: &[f64], steps: i64) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        self.apply_n_into(p, steps, &mut out);
        out
    }

    /// Representative of the orbit of `p` in the fundamental domain, into
    /// `out`. Idempotent, and constant on orbits.
    pub fn canonicalize_into(&self, p: &[f64], out: &mut [f64]) {
        match &self.kind {
            CanonKind::Trivial => out.copy_from_slice(p),
            CanonKind::ShiftAxis { axis, period } => {
                out.copy_from_slice(p);
                out[*axis] = p[*axis] - period * (p[*axis] / period).floor();
            }
            CanonKind::Boost { .. } => {
                let nu = self.winding(p);
                self.apply_n_into(p, nu.floor() as i64, out);
            }
        }
    }

    pub fn canonicalize(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        self.canonicalize_into(p, &mut out);
        out
    }

    /// Distance between orbits, as the minimum over generator powers.
    pub fn orbit_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut buf = vec![0.0; b.len()];
        self.orbit_distance_buf(a, b, &mut buf)
    }

    fn orbit_distance_buf(&self, a: &[f64], b: &[f64], buf: &mut [f64]) -> f64 {
        let range = self.copies as i64 + 1;
        let mut best = f64::INFINITY;
        for n in -range..=range {
            self.apply_n_into(b, n, buf);
            let d2: f64 = a
                .iter()
                .zip(buf.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            best = best.min(d2);
        }
        best.sqrt()
    }

    /// Covering-space box: the hull of `base` with its first `copies`
    /// translates in both directions.
    pub fn cover_box(&self, base: &AxisBox) -> AxisBox {
        let mut cover = base.clone();
        let n = base.dim();
        let corners: Vec<Vec<f64>> = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|ax| {
                        if mask & (1 << ax) != 0 {
                            base.hi[ax]
                        } else {
                            base.lo[ax]
                        }
                    })
                    .collect()
            })
            .collect();
        for step in 1..=self.copies as i64 {
            for dir in [-1i64, 1] {
                for corner in &corners {
                    let moved = self.apply_n(corner, dir * step);
                    for ax in 0..n {
                        cover.lo[ax] = cover.lo[ax].min(moved[ax]);
                        cover.hi[ax] = cover.hi[ax].max(moved[ax]);
                    }
                }
            }
        }
        cover
    }
}

/// Trivial action (identity quotient) for uniform treatment.
pub fn trivial_action(st: &SubSpaceTime) -> GroupAction {
    GroupAction {
        name: "trivial".into(),
        generator: Isometry::new(
            "identity",
            Arc::new(|p: &[f64], out: &mut [f64]| out.copy_from_slice(p)),
            Arc::new(|p: &[f64], out: &mut [f64]| out.copy_from_slice(p)),
            None,
        ),
        kind: CanonKind::Trivial,
        fundamental_box: st.domain().clone(),
        copies: 0,
    }
}

struct QuotientSink {
    grid: ReachGrid,
    action: GroupAction,
    base_winding: f64,
    max_excursion: f64,
    buf: Vec<f64>,
}

impl TrajectorySink for QuotientSink {
    fn fresh(&self) -> Self {
        QuotientSink {
            grid: ReachGrid::empty(
                self.grid.bounds().clone(),
                self.grid.dims().to_vec(),
                self.grid.semantics(),
                self.grid.meta().clone(),
            ),
            action: self.action.clone(),
            base_winding: self.base_winding,
            max_excursion: 0.0,
            buf: self.buf.clone(),
        }
    }

    fn node(&mut self, _traj: u64, _t: f64, p: &[f64], _cumlen: f64) {
        let (grid, buf) = (&mut self.grid, &mut self.buf);
        self.action.canonicalize_into(p, buf);
        grid.mark_point(buf);
        let w = (self.action.winding(p) - self.base_winding).abs();
        self.max_excursion = self.max_excursion.max(w);
    }

    fn merge(&mut self, other: Self) {
        self.grid.or_assign(&other.grid);
        self.max_excursion = self.max_excursion.max(other.max_excursion);
    }
}

/// Samples reachability in the covering space over the action's copies
/// and projects marked cells through canonicalization onto the
/// fundamental grid box. Errors when trajectories wind far enough to risk
/// leaving the configured cover.
pub fn reach_quotient(
    st: &SubSpaceTime,
    action: &GroupAction,
    p: &[f64],
    direction: Direction,
    cfg: &ReachConfig,
    leads: &[ControlLaw],
) -> Result<ReachGrid> {
    cfg.validate()?;
    if matches!(action.kind, CanonKind::Trivial) {
        return crate::reach::sample_reach_with_leads(st, p, direction, cfg, leads);
    }
    let cover = st.with_domain(action.cover_box(st.domain()));
    let start = action.canonicalize(p);
    cover.check_contains(&start)?;
    let bounds = cfg.grid_box.clone().unwrap_or_else(|| action.fundamental_box.clone());
    let semantics = match cfg.strictness {
        Strictness::Nonspacelike => GridSemantics::UnderJ,
        Strictness::Timelike => GridSemantics::UnderI,
    };
    let meta = GridMeta {
        manifold: format!("{}/{}", st.name(), action.name),
        kind: "reach_quotient".into(),
        source: start.clone(),
        target: None,
        direction,
        samples: cfg.samples,
        seed: cfg.seed,
        digest: cfg.digest(st.name(), &start, direction),
    };
    let template = QuotientSink {
        grid: ReachGrid::uniform(bounds, cfg.resolution, semantics, meta),
        action: action.clone(),
        base_winding: action.winding(&start),
        max_excursion: 0.0,
        buf: vec![0.0; st.dim()],
    };
    let sink = crate::reach::sampler_run(&cover, &start, direction, cfg, leads, &template)?;
    if sink.max_excursion >= action.copies as f64 - 0.5 {
        return Err(Error::HorizonExceedsCover {
            horizon: cfg.horizon,
            copies: action.copies,
        });
    }
    Ok(sink.grid)
}

/// Documented closed causal curve of a registry quotient.
#[derive(Clone)]
pub struct ClosedCurveHint {
    pub start: Vec<f64>,
    pub law: ControlLaw,
    pub duration: f64,
    pub steps: usize,
}

impl std::fmt::Debug for ClosedCurveHint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClosedCurveHint({}, T={})", self.law.name, self.duration)
    }
}

/// A closed t.f.d. witness: the curve plus the orbit-distance gap between
/// its endpoint and its start.
#[derive(Debug, Clone)]
pub struct ClosedCurveWitness {
    pub curve: HorizontalCurve,
    pub gap: f64,
    pub via: String,
}

/// Closure gap tolerance for closed-curve witnesses.
pub const CLOSURE_TOL: f64 = 1e-9;

struct CtcSink {
    action: GroupAction,
    start: Vec<f64>,
    cur_traj: u64,
    cur_excursion: f64,
    buf: Vec<f64>,
    /// (trajectory, node time, gap) of the best candidate, ordered by
    /// (trajectory, time).
    found: Option<(u64, f64, f64)>,
}

impl TrajectorySink for CtcSink {
    fn fresh(&self) -> Self {
        CtcSink {
            action: self.action.clone(),
            start: self.start.clone(),
            cur_traj: u64::MAX,
            cur_excursion: 0.0,
            buf: self.buf.clone(),
            found: None,
        }
    }

    fn node(&mut self, traj: u64, t: f64, p: &[f64], _cumlen: f64) {
        if traj != self.cur_traj {
            self.cur_traj = traj;
            self.cur_excursion = 0.0;
        }
        let direct: f64 = self
            .start
            .iter()
            .zip(p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        self.cur_excursion = self.cur_excursion.max(direct);
        if self.cur_excursion < 0.05 || t == 0.0 {
            return;
        }
        let gap = self
            .action
            .orbit_distance_buf(p, &self.start, &mut self.buf);
        if gap <= CLOSURE_TOL {
            let cand = (traj, t, gap);
            if self
                .found
                .map_or(true, |(bt, btime, _)| (traj, t) < (bt, btime))
            {
                self.found = Some(cand);
            }
        }
    }

    fn merge(&mut self, other: Self) {
        if let Some(o) = other.found {
            if self
                .found
                .map_or(true, |(bt, btime, _)| (o.0, o.1) < (bt, btime))
            {
                self.found = Some(o);
            }
        }
    }
}

/// Searches for a closed causal curve through `p`.
///
/// Documented closed curves of the registry entry are tested directly
/// first; then sampled t.f.d. trajectories from `p` are scanned for a
/// return of the canonicalized endpoint to within [`CLOSURE_TOL`] of the
/// canonicalized start. Absence is a negative verdict at the tested
/// sampling level only.
pub fn find_closed_causal(
    st: &SubSpaceTime,
    action: &GroupAction,
    p: &[f64],
    cfg: &ReachConfig,
    hints: &[ClosedCurveHint],
) -> Result<Option<ClosedCurveWitness>> {
    let cover = st.with_domain(action.cover_box(st.domain()));
    for hint in hints {
        let curve = curves::integrate_law(
            &cover,
            &hint.start,
            &hint.law,
            hint.duration,
            hint.steps,
            Strictness::Timelike,
        )?;
        if curve.exit().is_some() {
            continue;
        }
        let gap = action.orbit_distance(curve.endpoint(), &hint.start);
        if gap <= CLOSURE_TOL {
            return Ok(Some(ClosedCurveWitness {
                curve,
                gap,
                via: format!("documented curve `{}`", hint.law.name),
            }));
        }
    }

    let start = action.canonicalize(p);
    cover.check_contains(&start)?;
    let mut cfg_t = cfg.clone();
    cfg_t.strictness = Strictness::Timelike;
    let template = CtcSink {
        action: action.clone(),
        start: start.clone(),
        cur_traj: u64::MAX,
        cur_excursion: 0.0,
        buf: vec![0.0; st.dim()],
        found: None,
    };
    let sink = crate::reach::sampler_run(&cover, &start, Direction::Future, &cfg_t, &[], &template)?;
    if let Some((traj, t_hit, gap)) = sink.found {
        // Rebuild the witness trajectory from its stream.
        let mut stream = rng::stream(cfg_t.seed, traj);
        let mut rows = Vec::new();
        crate::reach::sampler_draw_rows(
            &mut stream,
            cfg_t.steps,
            st.rank(),
            cfg_t.cone_margin,
            &mut rows,
        );
        let ctrl = ControlSignal::new(
            rows,
            st.rank(),
            cfg_t.horizon / cfg_t.steps as f64,
            Strictness::Nonspacelike,
        )?;
        let curve = curves::integrate_with(&cover, &start, &ctrl, cfg_t.substeps)?;
        let node = curve.node_at(t_hit);
        let gap_check = action.orbit_distance(curve.point(node), &start);
        return Ok(Some(ClosedCurveWitness {
            curve,
            gap: gap.min(gap_check),
            via: format!("sampled trajectory {traj}"),
        }));
    }
    Ok(None)
}

struct AlignedCoverSink {
    fundamental: ReachGrid,
    cover: ReachGrid,
    axis: usize,
    buf: Vec<f64>,
    action: GroupAction,
}

impl TrajectorySink for AlignedCoverSink {
    fn fresh(&self) -> Self {
        AlignedCoverSink {
            fundamental: ReachGrid::empty(
                self.fundamental.bounds().clone(),
                self.fundamental.dims().to_vec(),
                self.fundamental.semantics(),
                self.fundamental.meta().clone(),
            ),
            cover: ReachGrid::empty(
                self.cover.bounds().clone(),
                self.cover.dims().to_vec(),
                self.cover.semantics(),
                self.cover.meta().clone(),
            ),
            axis: self.axis,
            buf: self.buf.clone(),
            action: self.action.clone(),
        }
    }

    fn node(&mut self, _traj: u64, _t: f64, p: &[f64], _cumlen: f64) {
        self.cover.mark_point(p);
        let (grid, buf) = (&mut self.fundamental, &mut self.buf);
        self.action.canonicalize_into(p, buf);
        grid.mark_point(buf);
    }

    fn merge(&mut self, other: Self) {
        self.fundamental.or_assign(&other.fundamental);
        self.cover.or_assign(&other.cover);
    }
}

/// Two-route check of `pi(reach in cover) = reach_quotient` for shift
/// actions: the cover grid is cell-aligned with the fundamental grid, so
/// projecting marked cover cells by index arithmetic must reproduce the
/// canonicalized grid exactly. Returns the symmetric-difference cell
/// count (zero when consistent).
pub fn projection_consistency(
    st: &SubSpaceTime,
    action: &GroupAction,
    p: &[f64],
    cfg: &ReachConfig,
) -> Result<usize> {
    let CanonKind::ShiftAxis { axis, period } = action.kind else {
        return Err(Error::InvalidConfig(
            "projection consistency check requires a shift action".into(),
        ));
    };
    cfg.validate()?;
    let fb = &action.fundamental_box;
    if (fb.hi[axis] - fb.lo[axis] - period).abs() > 1e-12 || fb.lo[axis].abs() > 1e-12 {
        return Err(Error::InvalidConfig(
            "fundamental box must span exactly [0, period) on the acting axis".into(),
        ));
    }
    let m = action.copies;
    let mut cover_box = fb.clone();
    cover_box.lo[axis] -= m as f64 * period;
    cover_box.hi[axis] += m as f64 * period;
    let mut cover_dims = vec![cfg.resolution; fb.dim()];
    cover_dims[axis] = cfg.resolution * (2 * m + 1);

    let cover_st = st.with_domain(action.cover_box(st.domain()));
    let start = action.canonicalize(p);
    let meta = GridMeta {
        manifold: st.name().to_string(),
        kind: "projection_check".into(),
        source: start.clone(),
        target: None,
        direction: Direction::Future,
        samples: cfg.samples,
        seed: cfg.seed,
        digest: cfg.digest(st.name(), &start, Direction::Future),
    };
    let template = AlignedCoverSink {
        fundamental: ReachGrid::uniform(fb.clone(), cfg.resolution, GridSemantics::UnderJ, meta.clone()),
        cover: ReachGrid::empty(cover_box, cover_dims, GridSemantics::UnderJ, meta),
        axis,
        buf: vec![0.0; st.dim()],
        action: action.clone(),
    };
    let sink = crate::reach::sampler_run(&cover_st, &start, Direction::Future, cfg, &[], &template)?;

    // Project the cover grid by index arithmetic and compare.
    let mut projected = sink.fundamental.clone();
    let zero = ReachGrid::empty(
        projected.bounds().clone(),
        projected.dims().to_vec(),
        projected.semantics(),
        projected.meta().clone(),
    );
    projected = zero;
    for flat in sink.cover.iter_marked() {
        let mut idx = sink.cover.unflat(flat);
        idx[axis] %= cfg.resolution;
        let f = projected.flat(&idx);
        projected.mark_flat(f);
    }
    let diff = projected
        .iter_marked()
        .filter(|f| !sink.fundamental.is_marked_flat(*f))
        .count()
        + sink
            .fundamental
            .iter_marked()
            .filter(|f| !projected.is_marked_flat(*f))
            .count();
    Ok(diff)
}

/// Exclusion of periodically repeated coordinate lines, e.g. the removed
/// orbit lines `{x = 0, y in period Z}` of the shifted structures. The
/// conservative segment test truncates trajectories whose step interval
/// overlaps a line's thin slab.
pub struct PeriodicLineExclusion {
    pub x_axis: usize,
    pub y_axis: usize,
    pub y_period: f64,
    pub half_width: f64,
}

impl crate::geometry::Exclusion for PeriodicLineExclusion {
    fn excluded(&self, p: &[f64]) -> bool {
        let x = p[self.x_axis];
        let y = p[self.y_axis];
        let fract = y - self.y_period * (y / self.y_period).round();
        x.abs() <= self.half_width && fract.abs() <= self.half_width
    }

    fn segment_excluded(&self, a: &[f64], b: &[f64]) -> bool {
        let (xl, xh) = minmax(a[self.x_axis], b[self.x_axis]);
        if xl > self.half_width || xh < -self.half_width {
            return false;
        }
        let (yl, yh) = minmax(a[self.y_axis], b[self.y_axis]);
        let lo = ((yl - self.half_width) / self.y_period).ceil() as i64;
        let hi = ((yh + self.half_width) / self.y_period).floor() as i64;
        lo <= hi
    }
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
