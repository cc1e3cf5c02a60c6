//! Horizontal causal curves as control trajectories.
//!
//! Controls are piecewise constant in the Lorentzian orthonormal frame of
//! the distribution: a row `(u0, u1, ..., u_{k-1})` with `u0 > 0` and
//! `sum_{i>=1} u_i^2 <= u0^2` is nonspacelike future directed by
//! construction. Curves are integrated with fixed-step RK4 and are
//! immutable values afterwards.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::{
    self, classify_with, metric_product, AxisBox, CausalCharacter, Character, Orientation,
    Scratch, SubSpaceTime,
};

/// Whether a family of curves is required to be strictly timelike or only
/// nonspacelike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Strictness {
    Nonspacelike,
    Timelike,
}

/// Piecewise-constant orthonormal-frame controls.
#[derive(Debug, Clone)]
pub struct ControlSignal {
    rank: usize,
    dt: f64,
    rows: Vec<f64>,
    strictness: Strictness,
}

impl ControlSignal {
    pub fn new(rows: Vec<f64>, rank: usize, dt: f64, strictness: Strictness) -> Result<Self> {
        if rank == 0 || rows.is_empty() || rows.len() % rank != 0 {
            return Err(Error::InvalidConfig(format!(
                "control rows of length {} do not fit rank {rank}",
                rows.len()
            )));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive: {dt}")));
        }
        let sig = Self {
            rank,
            dt,
            rows,
            strictness,
        };
        sig.validate()?;
        Ok(sig)
    }

    /// Constant-control signal of `steps` rows.
    pub fn constant(u: &[f64], steps: usize, dt: f64, strictness: Strictness) -> Result<Self> {
        let mut rows = Vec::with_capacity(steps * u.len());
        for _ in 0..steps {
            rows.extend_from_slice(u);
        }
        Self::new(rows, u.len(), dt, strictness)
    }

    pub fn validate(&self) -> Result<()> {
        for r in 0..self.steps() {
            let row = self.row(r);
            let u0 = row[0];
            let sp2: f64 = row[1..].iter().map(|x| x * x).sum();
            let bad = match self.strictness {
                Strictness::Nonspacelike => !(u0 > 0.0) || sp2 > u0 * u0 * (1.0 + 1e-12),
                Strictness::Timelike => !(u0 > 0.0) || sp2 >= u0 * u0,
            };
            if bad {
                return Err(Error::ConeViolation {
                    row: r,
                    u0,
                    spatial: sp2.sqrt(),
                });
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn steps(&self) -> usize {
        self.rows.len() / self.rank
    }
    pub fn duration(&self) -> f64 {
        self.dt * self.steps() as f64
    }
    pub fn strictness(&self) -> Strictness {
        self.strictness
    }
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.rank..(i + 1) * self.rank]
    }
    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    /// Minkowski-coefficient value `g(v, v) = -(u0)^2 + |u_spatial|^2` of
    /// the velocity generated by row `i`; exact because the controls live
    /// in an orthonormal frame.
    pub fn eta(&self, i: usize) -> f64 {
        let row = self.row(i);
        let sp2: f64 = row[1..].iter().map(|x| x * x).sum();
        sp2 - row[0] * row[0]
    }
}

/// State-dependent control law `u(t, p)`, used for documented curves and
/// deterministic lead trajectories.
#[derive(Clone)]
pub struct ControlLaw {
    pub name: String,
    pub eval: Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>,
}

impl ControlLaw {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// The central ray: follows the normalized time orientation.
    pub fn central_ray(rank: usize) -> Self {
        Self::new("central_ray", move |_t, _p, u: &mut [f64]| {
            u[0] = 1.0;
            u[1..rank].iter_mut().for_each(|x| *x = 0.0);
        })
    }
}

impl std::fmt::Debug for ControlLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ControlLaw({})", self.name)
    }
}

/// Point where integration left the domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DomainExit {
    pub time: f64,
    pub step: usize,
}

/// Discretized admissible trajectory.
#[derive(Debug)]
pub struct HorizontalCurve {
    dim: usize,
    times: Vec<f64>,
    points: Vec<f64>,
    controls: ControlSignal,
    substeps: usize,
    exit: Option<DomainExit>,
    length_cache: OnceLock<f64>,
}

impl Clone for HorizontalCurve {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(v) = self.length_cache.get() {
            let _ = cache.set(*v);
        }
        Self {
            dim: self.dim,
            times: self.times.clone(),
            points: self.points.clone(),
            controls: self.controls.clone(),
            substeps: self.substeps,
            exit: self.exit,
            length_cache: cache,
        }
    }
}

impl HorizontalCurve {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn node_count(&self) -> usize {
        self.times.len()
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
    pub fn start(&self) -> &[f64] {
        self.point(0)
    }
    pub fn endpoint(&self) -> &[f64] {
        self.point(self.node_count() - 1)
    }
    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }
    pub fn controls(&self) -> &ControlSignal {
        &self.controls
    }
    pub fn exit(&self) -> Option<DomainExit> {
        self.exit
    }
    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Control row applied on the substep interval `s -> s+1`.
    pub fn row_for_interval(&self, s: usize) -> usize {
        (s / self.substeps).min(self.controls.steps() - 1)
    }

    /// Curve with reversed node order. Orientation-reversing by
    /// construction; the stored controls still describe the forward curve.
    pub fn reversed(&self) -> HorizontalCurve {
        let n = self.dim;
        let total = self.duration();
        let count = self.node_count();
        let mut points = Vec::with_capacity(self.points.len());
        let mut times = Vec::with_capacity(count);
        for i in (0..count).rev() {
            points.extend_from_slice(self.point(i));
            times.push(total - self.times[i]);
        }
        HorizontalCurve {
            dim: n,
            times,
            points,
            controls: self.controls.clone(),
            substeps: self.substeps,
            exit: None,
            length_cache: OnceLock::new(),
        }
    }

    /// Node index closest in parameter to `t in [0, duration]`.
    pub fn node_at(&self, t: f64) -> usize {
        let idx = self
            .times
            .partition_point(|x| *x < t)
            .min(self.node_count() - 1);
        if idx > 0 && (t - self.times[idx - 1]).abs() < (self.times[idx] - t).abs() {
            idx - 1
        } else {
            idx
        }
    }
}

/// Default total substep count for fixed-step RK4.
pub const DEFAULT_SUBSTEPS_TOTAL: usize = 256;

pub(crate) struct FlowSpec<'a> {
    pub rows: &'a [f64],
    pub rank: usize,
    pub dt_row: f64,
    pub substeps: usize,
    /// +1 integrates the future flow, -1 the past (reversed cone).
    pub sign: f64,
    /// Truncate before applying a row that is not strictly timelike.
    pub clip_timelike: bool,
}

pub(crate) fn velocity_of(
    st: &SubSpaceTime,
    scratch: &mut Scratch,
    p: &[f64],
    row: &[f64],
    sign: f64,
    out: &mut [f64],
) -> Result<()> {
    let n = st.dim();
    let k = st.rank();
    let geom = st.geometry();
    geom.frame(p, &mut scratch.frame);
    geom.metric(p, &mut scratch.metric);
    geom.orientation(p, &mut scratch.orient);
    geometry::ortho_into(scratch, k).map_err(|_| Error::BadIndex { point: p.to_vec() })?;
    // raw = A * u
    for r in 0..k {
        let mut acc = 0.0;
        for c in 0..k {
            acc += scratch.ortho[r * k + c] * row[c];
        }
        scratch.tmp[r] = acc;
    }
    for i in 0..n {
        let mut acc = 0.0;
        for r in 0..k {
            acc += scratch.tmp[r] * scratch.frame[r * n + i];
        }
        out[i] = sign * acc;
    }
    Ok(())
}

fn row_eta(row: &[f64]) -> f64 {
    let sp2: f64 = row[1..].iter().map(|x| x * x).sum();
    sp2 - row[0] * row[0]
}

/// Fixed-step RK4 flow of piecewise-constant controls. Calls `on_node`
/// with `(time, point, cumulative length)` at the start point and after
/// every accepted substep; truncates at domain exit.
pub(crate) fn flow(
    st: &SubSpaceTime,
    p0: &[f64],
    spec: &FlowSpec<'_>,
    scratch: &mut Scratch,
    mut on_node: impl FnMut(f64, &[f64], f64),
) -> Result<Option<DomainExit>> {
    let n = st.dim();
    let k = spec.rank;
    let steps = spec.rows.len() / k;
    let h = spec.dt_row / spec.substeps as f64;

    let mut p = p0.to_vec();
    let mut ptmp = vec![0.0; n];
    let mut pnew = vec![0.0; n];
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];

    let mut t = 0.0;
    let mut cumlen = 0.0;
    on_node(t, &p, cumlen);

    let mut step_index = 0usize;
    for r in 0..steps {
        let row = &spec.rows[r * k..(r + 1) * k];
        let eta = row_eta(row);
        if spec.clip_timelike && eta >= -1e-9 * row[0] * row[0] {
            return Ok(Some(DomainExit {
                time: t,
                step: step_index,
            }));
        }
        let dlen = h * (-eta).max(0.0).sqrt();
        for _ in 0..spec.substeps {
            velocity_of(st, scratch, &p, row, spec.sign, &mut k1)?;
            for i in 0..n {
                ptmp[i] = p[i] + 0.5 * h * k1[i];
            }
            velocity_of(st, scratch, &ptmp, row, spec.sign, &mut k2)?;
            for i in 0..n {
                ptmp[i] = p[i] + 0.5 * h * k2[i];
            }
            velocity_of(st, scratch, &ptmp, row, spec.sign, &mut k3)?;
            for i in 0..n {
                ptmp[i] = p[i] + h * k3[i];
            }
            velocity_of(st, scratch, &ptmp, row, spec.sign, &mut k4)?;
            for i in 0..n {
                pnew[i] = p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if !st.contains(&pnew) || !st.segment_allowed(&p, &pnew) {
                return Ok(Some(DomainExit {
                    time: t,
                    step: step_index,
                }));
            }
            p.copy_from_slice(&pnew);
            t += h;
            cumlen += dlen;
            step_index += 1;
            on_node(t, &p, cumlen);
        }
    }
    Ok(None)
}

/// Integrates the frame ODE `p' = sum_j (A(p) u)_j X_j(p)` for the given
/// controls, truncating at domain exit. The default substep count keeps
/// the total near [`DEFAULT_SUBSTEPS_TOTAL`].
pub fn integrate(st: &SubSpaceTime, p0: &[f64], ctrl: &ControlSignal) -> Result<HorizontalCurve> {
    let substeps = DEFAULT_SUBSTEPS_TOTAL.div_ceil(ctrl.steps()).max(1);
    integrate_with(st, p0, ctrl, substeps)
}

pub fn integrate_with(
    st: &SubSpaceTime,
    p0: &[f64],
    ctrl: &ControlSignal,
    substeps: usize,
) -> Result<HorizontalCurve> {
    st.check_contains(p0)?;
    ctrl.validate()?;
    if ctrl.rank() != st.rank() {
        return Err(Error::InvalidConfig(format!(
            "control rank {} does not match structure rank {}",
            ctrl.rank(),
            st.rank()
        )));
    }
    let mut scratch = Scratch::for_st(st);
    let mut times = Vec::new();
    let mut points = Vec::new();
    let spec = FlowSpec {
        rows: ctrl.rows(),
        rank: ctrl.rank(),
        dt_row: ctrl.dt(),
        substeps,
        sign: 1.0,
        clip_timelike: false,
    };
    let exit = flow(st, p0, &spec, &mut scratch, |t, p, _len| {
        times.push(t);
        points.extend_from_slice(p);
    })?;
    Ok(HorizontalCurve {
        dim: st.dim(),
        times,
        points,
        controls: ctrl.clone(),
        substeps,
        exit,
        length_cache: OnceLock::new(),
    })
}

/// Integrates a smooth control law with RK4, evaluating the law at every
/// stage. The stored signal samples the law at substep starts, one row per
/// substep.
pub fn integrate_law(
    st: &SubSpaceTime,
    p0: &[f64],
    law: &ControlLaw,
    horizon: f64,
    steps: usize,
    strictness: Strictness,
) -> Result<HorizontalCurve> {
    st.check_contains(p0)?;
    if !(horizon > 0.0) || steps == 0 {
        return Err(Error::InvalidConfig("law integration needs a positive horizon and at least one step".into()));
    }
    let n = st.dim();
    let k = st.rank();
    let h = horizon / steps as f64;
    let mut scratch = Scratch::for_st(st);

    let mut p = p0.to_vec();
    let mut times = vec![0.0];
    let mut points = p.clone();
    let mut rows: Vec<f64> = Vec::with_capacity(steps * k);
    let mut exit = None;

    let mut u = vec![0.0; k];
    let mut ptmp = vec![0.0; n];
    let mut pnew = vec![0.0; n];
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];

    let eval_vel = |t: f64,
                        pt: &[f64],
                        u: &mut Vec<f64>,
                        scratch: &mut Scratch,
                        out: &mut Vec<f64>|
     -> Result<()> {
        (law.eval)(t, pt, u);
        velocity_of(st, scratch, pt, u, 1.0, out)
    };

    for s in 0..steps {
        let t = s as f64 * h;
        (law.eval)(t, &p, &mut u);
        let eta = row_eta(&u);
        let stop = match strictness {
            Strictness::Timelike => eta >= -1e-9 * u[0] * u[0],
            Strictness::Nonspacelike => eta > 1e-9 * u[0] * u[0] || !(u[0] > 0.0),
        };
        if stop {
            exit = Some(DomainExit { time: t, step: s });
            break;
        }
        rows.extend_from_slice(&u);
        eval_vel(t, &p, &mut u, &mut scratch, &mut k1)?;
        for i in 0..n {
            ptmp[i] = p[i] + 0.5 * h * k1[i];
        }
        eval_vel(t + 0.5 * h, &ptmp, &mut u, &mut scratch, &mut k2)?;
        for i in 0..n {
            ptmp[i] = p[i] + 0.5 * h * k2[i];
        }
        eval_vel(t + 0.5 * h, &ptmp, &mut u, &mut scratch, &mut k3)?;
        for i in 0..n {
            ptmp[i] = p[i] + h * k3[i];
        }
        eval_vel(t + h, &ptmp, &mut u, &mut scratch, &mut k4)?;
        for i in 0..n {
            pnew[i] = p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !st.contains(&pnew) || !st.segment_allowed(&p, &pnew) {
            exit = Some(DomainExit {
                time: t,
                step: s,
            });
            break;
        }
        p.copy_from_slice(&pnew);
        times.push(t + h);
        points.extend_from_slice(&p);
    }
    if rows.is_empty() {
        // Clipped before the first step: degenerate single-node curve.
        rows.extend(std::iter::once(1.0).chain(std::iter::repeat(0.0).take(k - 1)));
    }
    let ctrl = ControlSignal::new(rows, k, h, Strictness::Nonspacelike)?;
    Ok(HorizontalCurve {
        dim: n,
        times,
        points,
        controls: ctrl,
        substeps: 1,
        exit,
        length_cache: OnceLock::new(),
    })
}

/// Lorentzian length by the composite trapezoid rule over substeps, with
/// the integrand `sqrt(-g(c', c'))` evaluated from the generating controls
/// at both interval ends.
pub fn length(st: &SubSpaceTime, c: &HorizontalCurve) -> Result<f64> {
    if let Some(v) = c.length_cache.get() {
        return Ok(*v);
    }
    let k = st.rank();
    let mut scratch = Scratch::for_st(st);
    let mut raw = vec![0.0; k];
    let mut density = |p: &[f64], row: &[f64], step: usize| -> Result<f64> {
        let geom = st.geometry();
        geom.frame(p, &mut scratch.frame);
        geom.metric(p, &mut scratch.metric);
        geom.orientation(p, &mut scratch.orient);
        geometry::ortho_into(&mut scratch, k).map_err(|_| Error::BadIndex { point: p.to_vec() })?;
        for r in 0..k {
            let mut acc = 0.0;
            for cc in 0..k {
                acc += scratch.ortho[r * k + cc] * row[cc];
            }
            raw[r] = acc;
        }
        let g = metric_product(&scratch.metric, k, &raw, &raw);
        let norm2: f64 = raw.iter().map(|x| x * x).sum();
        if g > geometry::EPS_NULL * norm2 {
            return Err(Error::SpacelikeSegment {
                step,
                value: g,
            });
        }
        Ok((-g).max(0.0).sqrt())
    };
    let mut total = 0.0;
    for s in 0..c.node_count().saturating_sub(1) {
        let row = c.controls().row(c.row_for_interval(s));
        let dl = density(c.point(s), row, s)?;
        let dr = density(c.point(s + 1), row, s)?;
        let dt = c.time(s + 1) - c.time(s);
        total += dt * 0.5 * (dl + dr);
    }
    let _ = c.length_cache.set(total);
    Ok(total)
}

/// Per-interval causal verification report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CausalReport {
    pub intervals: usize,
    pub timelike: usize,
    pub null: usize,
    pub spacelike: usize,
    pub orientation_violations: usize,
    /// Worst (largest) value of `g(c', c')` over intervals.
    pub max_g: f64,
    /// Best (most negative) value of `g(c', c')` over intervals.
    pub min_g: f64,
    pub max_horizontality_defect: f64,
    #[serde(skip)]
    pub characters: Vec<CausalCharacter>,
}

/// Verifies causal character per interval from finite-difference midpoint
/// velocities, independently of the stored controls.
pub fn verify_causal(st: &SubSpaceTime, c: &HorizontalCurve) -> Result<CausalReport> {
    let n = c.dim();
    let k = st.rank();
    let mut report = CausalReport {
        intervals: 0,
        timelike: 0,
        null: 0,
        spacelike: 0,
        orientation_violations: 0,
        max_g: f64::NEG_INFINITY,
        min_g: f64::INFINITY,
        max_horizontality_defect: 0.0,
        characters: Vec::new(),
    };
    let mut scratch = Scratch::for_st(st);
    let mut mid = vec![0.0; n];
    let mut vel = vec![0.0; n];
    for s in 0..c.node_count().saturating_sub(1) {
        let a = c.point(s);
        let b = c.point(s + 1);
        let dt = c.time(s + 1) - c.time(s);
        for i in 0..n {
            mid[i] = 0.5 * (a[i] + b[i]);
            vel[i] = (b[i] - a[i]) / dt;
        }
        let (coeffs, defect) = geometry::to_frame_coords(st, &mid, &vel)?;
        st.geometry().metric(&mid, &mut scratch.metric);
        st.geometry().orientation(&mid, &mut scratch.orient);
        let cls = classify_with(&scratch.metric, k, &scratch.orient, &coeffs);
        let g = metric_product(&scratch.metric, k, &coeffs, &coeffs);
        report.intervals += 1;
        match cls.character {
            Character::Timelike => report.timelike += 1,
            Character::Null => report.null += 1,
            Character::Spacelike => report.spacelike += 1,
        }
        if cls.orientation != Orientation::Future {
            report.orientation_violations += 1;
        }
        report.max_g = report.max_g.max(g);
        report.min_g = report.min_g.min(g);
        report.max_horizontality_defect = report.max_horizontality_defect.max(defect);
        report.characters.push(cls);
    }
    Ok(report)
}

/// Box exit with optional reentry, at node resolution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TubeEvent {
    pub exit_time: f64,
    pub reentry_time: Option<f64>,
}

/// Ordered crossing events of `tube` by the curve polyline, starting from
/// the curve's first entry into the tube. Empty iff the curve never leaves
/// afterwards.
pub fn tube_events(c: &HorizontalCurve, tube: &AxisBox) -> Vec<TubeEvent> {
    tube_events_mapped(c, tube, |p, out| out.copy_from_slice(p))
}

/// Same as [`tube_events`] but with node points passed through `map`
/// first (e.g. canonicalization into a quotient fundamental domain).
pub fn tube_events_mapped(
    c: &HorizontalCurve,
    tube: &AxisBox,
    map: impl Fn(&[f64], &mut [f64]),
) -> Vec<TubeEvent> {
    let mut events = Vec::new();
    let mut mapped = vec![0.0; c.dim()];
    let mut entered = false;
    let mut outside_since: Option<f64> = None;
    for i in 0..c.node_count() {
        map(c.point(i), &mut mapped);
        let inside = tube.contains(&mapped);
        if !entered {
            entered = inside;
            continue;
        }
        match (inside, outside_since) {
            (false, None) => outside_since = Some(c.time(i)),
            (true, Some(t_exit)) => {
                events.push(TubeEvent {
                    exit_time: t_exit,
                    reentry_time: Some(c.time(i)),
                });
                outside_since = None;
            }
            _ => {}
        }
    }
    if let Some(t_exit) = outside_since {
        events.push(TubeEvent {
            exit_time: t_exit,
            reentry_time: None,
        });
    }
    events
}

/// Exports a curve as CSV: header then `t, x_1..x_n, u_0..u_{k-1}` rows,
/// with the control row of the preceding interval (first row repeats the
/// initial controls).
pub fn to_csv(c: &HorizontalCurve) -> String {
    let n = c.dim();
    let k = c.controls().rank();
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    for i in 0..k {
        out.push_str(&format!(",u{i}"));
    }
    out.push('\n');
    for i in 0..c.node_count() {
        out.push_str(&format!("{:.12}", c.time(i)));
        for x in c.point(i) {
            out.push_str(&format!(",{x:.12}"));
        }
        let row = c.controls().row(c.row_for_interval(i.saturating_sub(1)));
        for u in row {
            out.push_str(&format!(",{u:.12}"));
        }
        out.push('\n');
    }
    out
}
