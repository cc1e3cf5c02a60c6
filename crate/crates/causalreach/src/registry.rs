//! Built-in example sub-space-times with closed-form oracles and
//! documented expected behaviour.

use std::sync::Arc;

use crate::curves::ControlLaw;
use crate::error::{Error, Result};
use crate::geometry::{AxisBox, Geometry, SubSpaceTime};
use crate::quotient::{
    CanonKind, ClosedCurveHint, GroupAction, Isometry, PeriodicLineExclusion,
};

/// Tri-state membership verdict used by closed-form oracles and grid
/// oracles alike: under-approximations never fabricate `Out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Unknown,
}

pub type PairPred = Arc<dyn Fn(&[f64], &[f64]) -> Membership + Send + Sync>;
pub type TsepFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Closed-form predicates documented for a registry structure. All are
/// exact where they answer `In`/`Out`; `Unknown` marks genuinely
/// undecided configurations.
#[derive(Clone, Default)]
pub struct Oracles {
    /// `q in I+(p)`.
    pub chron: Option<PairPred>,
    /// `q in J+(p)`.
    pub causal: Option<PairPred>,
    /// Exact time separation.
    pub tsep: Option<TsepFn>,
    /// Heisenberg-type cone value at `q` relative to `p`: negative values
    /// with positive first component lie inside the chronological future.
    pub cone_value: Option<Arc<dyn Fn(&[f64], &[f64]) -> (f64, f64) + Send + Sync>>,
}

impl std::fmt::Debug for Oracles {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracles")
            .field("chron", &self.chron.is_some())
            .field("causal", &self.causal.is_some())
            .field("tsep", &self.tsep.is_some())
            .field("cone_value", &self.cone_value.is_some())
            .finish()
    }
}

/// How the manifold and Alexandrov topologies are expected to relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TopologyRelation {
    Equal,
    /// Manifold topology strictly finer (Alexandrov coarser).
    TauStrictlyFiner,
    /// Alexandrov topology strictly finer.
    AlexStrictlyFiner,
    Incomparable,
}

/// Documented verdicts; each is covered by an acceptance criterion.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Expected {
    pub chronologically_open: Option<bool>,
    pub strongly_causal: Option<bool>,
    pub chronological: Option<bool>,
    pub causal: Option<bool>,
    pub tau_vs_alex: Option<TopologyRelation>,
    pub notes: Vec<&'static str>,
}

/// A built-in structure: geometry, optional quotient action, oracles,
/// deterministic lead laws, documented closed curves and probe hints.
#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub structure: SubSpaceTime,
    pub action: Option<GroupAction>,
    pub oracles: Oracles,
    pub expected: Expected,
    pub lead_laws: Vec<ControlLaw>,
    pub closed_curves: Vec<ClosedCurveHint>,
    /// Default source point for reachability and probes.
    pub base_point: Vec<f64>,
    pub special_points: Vec<Vec<f64>>,
    pub special_pairs: Vec<(Vec<f64>, Vec<f64>)>,
    pub description: &'static str,
}

impl RegistryEntry {
    pub fn name(&self) -> &str {
        self.structure.name()
    }
}

// ---------------------------------------------------------------------
// Geometries
// ---------------------------------------------------------------------

struct MinkowskiGeom {
    n: usize,
}

impl Geometry for MinkowskiGeom {
    fn dim(&self) -> usize {
        self.n
    }
    fn rank(&self) -> usize {
        self.n
    }
    fn frame(&self, _p: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..self.n {
            out[i * self.n + i] = 1.0;
        }
    }
    fn metric(&self, _p: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        out[0] = -1.0;
        for i in 1..self.n {
            out[i * self.n + i] = 1.0;
        }
    }
    fn orientation(&self, _p: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        out[0] = 1.0;
    }
    fn bracket(&self, _i: usize, _j: usize, _p: &[f64], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|x| *x = 0.0);
        true
    }
}

/// Lorentzian Heisenberg group: `X = d/dx + (y/2) d/dz`,
/// `Y = d/dy - (x/2) d/dz`, `g(X,X) = -g(Y,Y) = -1`, orientation `X`.
struct HeisenbergGeom;

impl Geometry for HeisenbergGeom {
    fn dim(&self) -> usize {
        3
    }
    fn rank(&self) -> usize {
        2
    }
    fn frame(&self, p: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        out[1] = 0.0;
        out[2] = 0.5 * p[1];
        out[3] = 0.0;
        out[4] = 1.0;
        out[5] = -0.5 * p[0];
    }
    fn metric(&self, _p: &[f64], out: &mut [f64]) {
        out[0] = -1.0;
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = 1.0;
    }
    fn orientation(&self, _p: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        out[1] = 0.0;
    }
    fn bracket(&self, i: usize, j: usize, _p: &[f64], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|x| *x = 0.0);
        if i != j {
            // [X, Y] = -d/dz
            out[2] = if i == 0 { -1.0 } else { 1.0 };
        }
        true
    }
}

/// Martinet-type structure: `T = d/dy + x^2 d/dz`, `X = d/dx`,
/// `g(T,T) = -1`, `g(X,X) = 1`, orientation `T`. The double bracket
/// `[X,[X,T]]` is needed to span the `z` direction on `{x = 0}`.
struct MartinetGeom;

impl Geometry for MartinetGeom {
    fn dim(&self) -> usize {
        3
    }
    fn rank(&self) -> usize {
        2
    }
    fn frame(&self, p: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = 1.0;
        out[2] = p[0] * p[0];
        out[3] = 1.0;
        out[4] = 0.0;
        out[5] = 0.0;
    }
    fn metric(&self, _p: &[f64], out: &mut [f64]) {
        out[0] = -1.0;
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = 1.0;
    }
    fn orientation(&self, _p: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        out[1] = 0.0;
    }
    fn bracket(&self, i: usize, j: usize, p: &[f64], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|x| *x = 0.0);
        if i != j {
            // [T, X] = -2x d/dz
            out[2] = if i == 0 { -2.0 * p[0] } else { 2.0 * p[0] };
        }
        true
    }
}

/// Smoothstep bump used by the `varmetric` structure: 1 for `y <= 1/3`,
/// 0 for `y >= 2/3`, cubic in between.
pub fn varmetric_psi(y: f64) -> f64 {
    if y <= 1.0 / 3.0 {
        1.0
    } else if y >= 2.0 / 3.0 {
        0.0
    } else {
        let s = 3.0 * (y - 1.0 / 3.0);
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

/// Analytic length of the axis curve `(0, t, 0)` of `varmetric` on
/// `[0, 1]`: the integrand is `sqrt(psi)`, giving `0.2 (1 + sqrt 3)`.
pub fn varmetric_axis_length() -> f64 {
    0.2 * (1.0 + 3.0f64.sqrt())
}

/// Variable-metric structure on the Martinet frame: `X = d/dy + x^2 d/dz`,
/// `Y = d/dx`, `g(X,X) = -psi(y)`, `g(X,Y) = 1`, `g(Y,Y) = 1`,
/// orientation `X - Y`. The metric degenerates in the `X` direction for
/// `y >= 2/3` while `det g = -psi(y) - 1` stays negative.
struct VarMetricGeom;

impl Geometry for VarMetricGeom {
    fn dim(&self) -> usize {
        3
    }
    fn rank(&self) -> usize {
        2
    }
    fn frame(&self, p: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = 1.0;
        out[2] = p[0] * p[0];
        out[3] = 1.0;
        out[4] = 0.0;
        out[5] = 0.0;
    }
    fn metric(&self, p: &[f64], out: &mut [f64]) {
        out[0] = -varmetric_psi(p[1]);
        out[1] = 1.0;
        out[2] = 1.0;
        out[3] = 1.0;
    }
    fn orientation(&self, _p: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        out[1] = -1.0;
    }
    fn bracket(&self, i: usize, j: usize, p: &[f64], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|x| *x = 0.0);
        if i != j {
            out[2] = if i == 0 { -2.0 * p[0] } else { 2.0 * p[0] };
        }
        true
    }
}

// ---------------------------------------------------------------------
// Isometries
// ---------------------------------------------------------------------

/// Heisenberg group translation taking `p0` to the origin.
pub fn heisenberg_translation(x0: f64, y0: f64, z0: f64) -> Isometry {
    let map = move |p: &[f64], out: &mut [f64]| {
        out[0] = p[0] - x0;
        out[1] = p[1] - y0;
        out[2] = p[2] - z0 + 0.5 * (p[1] * x0 - p[0] * y0);
    };
    let inverse = move |p: &[f64], out: &mut [f64]| {
        out[0] = p[0] + x0;
        out[1] = p[1] + y0;
        out[2] = p[2] + z0 - 0.5 * (p[1] * x0 - p[0] * y0);
    };
    let jac = move |_p: &[f64]| {
        nalgebra::DMatrix::from_row_slice(3, 3, &[
            1.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, //
            -0.5 * y0, 0.5 * x0, 1.0,
        ])
    };
    Isometry::new(
        format!("heisenberg_translation({x0},{y0},{z0})"),
        Arc::new(map),
        Arc::new(inverse),
        Some(Arc::new(jac)),
    )
}

/// The orientation-reversing Heisenberg flip `(x,y,z) -> (-x,-y,z)`.
pub fn heisenberg_flip() -> Isometry {
    let map = |p: &[f64], out: &mut [f64]| {
        out[0] = -p[0];
        out[1] = -p[1];
        out[2] = p[2];
    };
    Isometry::new(
        "heisenberg_flip",
        Arc::new(map),
        Arc::new(map),
        Some(Arc::new(|_p: &[f64]| {
            nalgebra::DMatrix::from_row_slice(3, 3, &[
                -1.0, 0.0, 0.0, //
                0.0, -1.0, 0.0, //
                0.0, 0.0, 1.0,
            ])
        })),
    )
}

fn shift_y(period: f64) -> Isometry {
    let map = move |p: &[f64], out: &mut [f64]| {
        out.copy_from_slice(p);
        out[1] += period;
    };
    let inverse = move |p: &[f64], out: &mut [f64]| {
        out.copy_from_slice(p);
        out[1] -= period;
    };
    Isometry::new(
        format!("shift_y({period})"),
        Arc::new(map),
        Arc::new(inverse),
        Some(Arc::new(|_p: &[f64]| nalgebra::DMatrix::identity(3, 3))),
    )
}

// ---------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------

fn minkowski_oracles(n: usize) -> Oracles {
    let sep = move |p: &[f64], q: &[f64]| -> f64 {
        let dt = q[0] - p[0];
        let dx: f64 = (1..n)
            .map(|i| (q[i] - p[i]) * (q[i] - p[i]))
            .sum::<f64>()
            .sqrt();
        if dt >= dx {
            (dt * dt - dx * dx).sqrt()
        } else {
            0.0
        }
    };
    Oracles {
        chron: Some(Arc::new(move |p, q| {
            let dt = q[0] - p[0];
            let dx: f64 = (1..n)
                .map(|i| (q[i] - p[i]) * (q[i] - p[i]))
                .sum::<f64>()
                .sqrt();
            if dt > dx {
                Membership::In
            } else {
                Membership::Out
            }
        })),
        causal: Some(Arc::new(move |p, q| {
            let dt = q[0] - p[0];
            let dx: f64 = (1..n)
                .map(|i| (q[i] - p[i]) * (q[i] - p[i]))
                .sum::<f64>()
                .sqrt();
            if dt >= dx {
                Membership::In
            } else {
                Membership::Out
            }
        })),
        tsep: Some(Arc::new(sep)),
        cone_value: None,
    }
}

/// Coordinates of `q` translated so that `p` goes to the origin, using
/// the Heisenberg group multiplication.
pub fn heisenberg_translate(p: &[f64], q: &[f64]) -> [f64; 3] {
    [
        q[0] - p[0],
        q[1] - p[1],
        q[2] - p[2] + 0.5 * (q[1] * p[0] - q[0] * p[1]),
    ]
}

/// The closed-form cone value of the Heisenberg chronological future:
/// `q in I+(p)` iff the returned value is negative and the returned first
/// component is positive.
pub fn heisenberg_cone(p: &[f64], q: &[f64]) -> (f64, f64) {
    let t = heisenberg_translate(p, q);
    (-t[0] * t[0] + t[1] * t[1] + 4.0 * t[2].abs(), t[0])
}

fn heisenberg_oracles() -> Oracles {
    Oracles {
        chron: Some(Arc::new(|p, q| {
            let (f, x) = heisenberg_cone(p, q);
            if f < 0.0 && x > 0.0 {
                Membership::In
            } else {
                Membership::Out
            }
        })),
        causal: Some(Arc::new(|p, q| {
            let (f, x) = heisenberg_cone(p, q);
            if f < 0.0 && x > 0.0 {
                Membership::In
            } else if f > 1e-12 || x < -1e-12 {
                Membership::Out
            } else {
                Membership::Unknown
            }
        })),
        tsep: None,
        cone_value: Some(Arc::new(|p, q| heisenberg_cone(p, q))),
    }
}

const LINE_TOL: f64 = 1e-9;

/// Martinet/varmetric rigid-configuration test: is `(p, q)` the unique
/// abnormal connection along `{x = 0, z = const}`?
fn rigid_line(p: &[f64], q: &[f64]) -> bool {
    p[0].abs() <= LINE_TOL
        && q[0].abs() <= LINE_TOL
        && (q[2] - p[2]).abs() <= LINE_TOL
        && q[1] > p[1]
}

/// Chronological oracle for the Martinet structure. `z` is non-decreasing
/// along causal curves and stationary only along the rigid line, which is
/// timelike throughout, so membership is decidable except for `z_q > z_p`.
fn martinet_chron(p: &[f64], q: &[f64]) -> Membership {
    let dz = q[2] - p[2];
    if dz < -LINE_TOL {
        Membership::Out
    } else if dz.abs() <= LINE_TOL {
        if rigid_line(p, q) {
            Membership::In
        } else {
            Membership::Out
        }
    } else {
        Membership::Unknown
    }
}

/// Same for `varmetric`: the rigid line is timelike only while the bump
/// `psi` is positive, i.e. strictly below `y = 2/3` when starting at
/// `y >= 0`.
fn varmetric_chron(p: &[f64], q: &[f64]) -> Membership {
    let dz = q[2] - p[2];
    if dz < -LINE_TOL {
        Membership::Out
    } else if dz.abs() <= LINE_TOL {
        // The rigid connection acquires a null tail once the bump
        // vanishes, so it is chronological only below y = 2/3.
        if rigid_line(p, q) && q[1] < 2.0 / 3.0 {
            Membership::In
        } else {
            Membership::Out
        }
    } else {
        Membership::Unknown
    }
}

fn martinet_causal(p: &[f64], q: &[f64]) -> Membership {
    let dz = q[2] - p[2];
    if dz < -LINE_TOL {
        Membership::Out
    } else if dz.abs() <= LINE_TOL {
        if rigid_line(p, q) {
            Membership::In
        } else {
            Membership::Out
        }
    } else {
        Membership::Unknown
    }
}

/// Quotient of a pair predicate by a shift action along the rigid line:
/// `[q] in I+([p])` iff some translate of `q` is. For the `z`-graded
/// structures an `In` lift exists exactly when the rigid configuration
/// holds for some shift, and the `z`/`x` obstructions are shift-invariant.
fn shift_quotient_pred(base: PairPred, action: GroupAction) -> PairPred {
    Arc::new(move |p: &[f64], q: &[f64]| {
        let range = action.copies as i64 + 2;
        let mut unknown = false;
        for nn in -range..=range {
            let qn = action.apply_n(q, nn);
            match base(p, &qn) {
                Membership::In => return Membership::In,
                Membership::Unknown => unknown = true,
                Membership::Out => {}
            }
        }
        if unknown {
            Membership::Unknown
        } else {
            Membership::Out
        }
    })
}

// ---------------------------------------------------------------------
// Entries
// ---------------------------------------------------------------------

fn minkowski_entry(n: usize) -> RegistryEntry {
    let name = format!("minkowski{n}");
    let st = SubSpaceTime::new(name, Arc::new(MinkowskiGeom { n }), AxisBox::cube(n, 2.0));
    RegistryEntry {
        structure: st,
        action: None,
        oracles: minkowski_oracles(n),
        expected: Expected {
            chronologically_open: Some(true),
            strongly_causal: Some(true),
            chronological: Some(true),
            causal: Some(true),
            tau_vs_alex: Some(TopologyRelation::Equal),
            notes: vec!["flat cone |x| <= t; exact time separation available"],
        },
        lead_laws: vec![],
        closed_curves: vec![],
        base_point: vec![0.0; n],
        special_points: vec![],
        special_pairs: vec![],
        description: "flat space-time with the full tangent bundle as distribution",
    }
}

fn heisenberg_structure() -> SubSpaceTime {
    SubSpaceTime::new("heisenberg", Arc::new(HeisenbergGeom), AxisBox::cube(3, 2.0))
}

fn heisenberg_entry() -> RegistryEntry {
    RegistryEntry {
        structure: heisenberg_structure(),
        action: None,
        oracles: heisenberg_oracles(),
        expected: Expected {
            chronologically_open: Some(true),
            strongly_causal: Some(true),
            chronological: Some(true),
            causal: Some(true),
            tau_vs_alex: Some(TopologyRelation::Equal),
            notes: vec![
                "closed-form chronological future of the origin",
                "group translations act by isometries",
            ],
        },
        lead_laws: vec![],
        closed_curves: vec![],
        base_point: vec![0.0, 0.0, 0.0],
        special_points: vec![vec![1.0, 0.5, 0.0], vec![0.5, 0.2, 0.01]],
        special_pairs: vec![],
        description: "Lorentzian Heisenberg group; open futures, strongly causal",
    }
}

fn martinet_structure() -> SubSpaceTime {
    SubSpaceTime::new("martinet", Arc::new(MartinetGeom), AxisBox::cube(3, 2.0))
}

fn martinet_entry() -> RegistryEntry {
    RegistryEntry {
        structure: martinet_structure(),
        action: None,
        oracles: Oracles {
            chron: Some(Arc::new(martinet_chron)),
            causal: Some(Arc::new(martinet_causal)),
            tsep: None,
            cone_value: None,
        },
        expected: Expected {
            chronologically_open: Some(false),
            strongly_causal: Some(true),
            chronological: Some(true),
            causal: Some(true),
            tau_vs_alex: Some(TopologyRelation::AlexStrictlyFiner),
            notes: vec![
                "rigid abnormal line {x=0, z=const}: futures are not open",
                "z is non-decreasing along causal curves",
            ],
        },
        lead_laws: vec![],
        closed_curves: vec![],
        base_point: vec![0.0, 0.0, 0.0],
        special_points: vec![vec![0.0, 0.5, 0.0], vec![0.0, 0.5, -0.01]],
        special_pairs: vec![(vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0])],
        description: "Martinet-type structure with a rigid boundary curve",
    }
}

fn martinet_mod_action(period: f64, copies: usize) -> GroupAction {
    GroupAction {
        name: format!("mod{period}"),
        generator: shift_y(period),
        kind: CanonKind::ShiftAxis {
            axis: 1,
            period,
        },
        fundamental_box: AxisBox {
            lo: vec![-2.0, 0.0, -2.0],
            hi: vec![2.0, period, 2.0],
        },
        copies,
    }
}

fn martinet_mod2_entry() -> RegistryEntry {
    let st = SubSpaceTime::new(
        "martinet_mod2",
        martinet_structure().geometry().clone(),
        AxisBox::cube(3, 2.0),
    )
    .with_exclusion(Arc::new(PeriodicLineExclusion {
        x_axis: 0,
        y_axis: 1,
        y_period: 2.0,
        half_width: 1e-6,
    }));
    let action = martinet_mod_action(2.0, 3);
    let chron = shift_quotient_pred(Arc::new(martinet_chron), action.clone());
    let causal = shift_quotient_pred(Arc::new(martinet_causal), action.clone());
    RegistryEntry {
        structure: st,
        action: Some(action),
        oracles: Oracles {
            chron: Some(chron),
            causal: Some(causal),
            tsep: None,
            cone_value: None,
        },
        expected: Expected {
            chronologically_open: Some(false),
            strongly_causal: Some(false),
            chronological: Some(true),
            causal: Some(true),
            tau_vs_alex: Some(TopologyRelation::AlexStrictlyFiner),
            notes: vec![
                "period-2 shift of the Martinet structure minus the orbit lines {x=0, y in 2Z}",
                "nearly-rigid curves leave small boxes and wind back",
            ],
        },
        lead_laws: vec![],
        closed_curves: vec![],
        base_point: vec![0.0, 1.0, 0.0],
        special_points: vec![vec![0.0, 1.0, 0.0]],
        special_pairs: vec![(vec![0.0, 0.5, 0.0], vec![0.0, 1.5, 0.0])],
        description: "Martinet structure modulo y -> y+2 with deleted orbit lines",
    }
}

fn martinet_mod1_entry() -> RegistryEntry {
    let st = SubSpaceTime::new(
        "martinet_mod1",
        martinet_structure().geometry().clone(),
        AxisBox::cube(3, 2.0),
    );
    let action = martinet_mod_action(1.0, 5);
    let chron = shift_quotient_pred(Arc::new(martinet_chron), action.clone());
    let causal = shift_quotient_pred(Arc::new(martinet_causal), action.clone());
    let central = ControlLaw::central_ray(2);
    RegistryEntry {
        structure: st,
        action: Some(action),
        oracles: Oracles {
            chron: Some(chron),
            causal: Some(causal),
            tsep: None,
            cone_value: None,
        },
        expected: Expected {
            chronologically_open: Some(false),
            strongly_causal: Some(false),
            chronological: Some(false),
            causal: Some(false),
            tau_vs_alex: Some(TopologyRelation::Incomparable),
            notes: vec!["the rigid line closes up into a closed timelike curve"],
        },
        lead_laws: vec![],
        closed_curves: vec![ClosedCurveHint {
            start: vec![0.0, 0.0, 0.0],
            law: central,
            duration: 1.0,
            steps: 256,
        }],
        base_point: vec![0.0, 0.25, 0.0],
        special_points: vec![vec![0.0, 0.25, 0.0], vec![0.0, 0.25, -0.1]],
        special_pairs: vec![(vec![0.0, 0.0, 0.0], vec![0.0, 0.75, 0.0])],
        description: "Martinet structure modulo y -> y+1; fails to be chronological",
    }
}

/// Boost-translation quotient of the Heisenberg structure.
pub fn heisenberg_boost(phi: f64) -> RegistryEntry {
    let (c, s) = (phi.cosh(), phi.sinh());
    let st = SubSpaceTime::new(
        "heisenberg_boost",
        heisenberg_structure().geometry().clone(),
        AxisBox::cube(3, 2.0),
    );
    let action = GroupAction {
        name: format!("boost({phi})"),
        generator: heisenberg_translation(c, s, 0.0),
        kind: CanonKind::Boost { phi },
        fundamental_box: AxisBox::cube(3, 2.0),
        copies: 6,
    };
    let base_chron = heisenberg_oracles().chron.unwrap();
    let action_for_pred = action.clone();
    let chron: PairPred = Arc::new(move |p: &[f64], q: &[f64]| {
        // Enough lifts always produce an `In`: winding the lift backwards
        // makes the cone value arbitrarily negative.
        let range = action_for_pred.copies as i64 + 6;
        for nn in -range..=range {
            let qn = action_for_pred.apply_n(q, nn);
            if base_chron(p, &qn) == Membership::In {
                return Membership::In;
            }
        }
        Membership::Unknown
    });
    let loop_law = ControlLaw::new("boost_loop", move |_t, _p, u: &mut [f64]| {
        u[0] = c;
        u[1] = s;
    });
    RegistryEntry {
        structure: st,
        action: Some(action),
        oracles: Oracles {
            chron: Some(chron),
            causal: None,
            tsep: None,
            cone_value: None,
        },
        expected: Expected {
            chronologically_open: Some(true),
            strongly_causal: Some(false),
            chronological: Some(false),
            causal: Some(false),
            tau_vs_alex: Some(TopologyRelation::TauStrictlyFiner),
            notes: vec![
                "contains a closed timelike curve along the boost direction",
                "futures stay open but separate no points",
            ],
        },
        lead_laws: vec![loop_law.clone()],
        closed_curves: vec![ClosedCurveHint {
            start: vec![0.0, 0.0, 0.0],
            law: loop_law,
            duration: 1.0,
            steps: 256,
        }],
        base_point: vec![0.0, 0.0, 0.0],
        special_points: vec![
            vec![0.25 * c, 0.25 * s, 0.0],
            vec![0.6 * c, 0.6 * s, 0.0],
        ],
        special_pairs: vec![],
        description: "Heisenberg structure modulo a boost translation; closed timelike curve",
    }
}

fn varmetric_entry() -> RegistryEntry {
    let st = SubSpaceTime::new("varmetric", Arc::new(VarMetricGeom), AxisBox::cube(3, 2.0));
    let rigid_law = ControlLaw::new("rigid_axis", |_t, p: &[f64], u: &mut [f64]| {
        u[0] = (1.0 + varmetric_psi(p[1])).sqrt();
        u[1] = 1.0;
    });
    RegistryEntry {
        structure: st,
        action: None,
        oracles: Oracles {
            chron: Some(Arc::new(varmetric_chron)),
            causal: Some(Arc::new(martinet_causal)),
            tsep: None,
            cone_value: None,
        },
        expected: Expected {
            chronologically_open: Some(false),
            strongly_causal: Some(true),
            chronological: Some(true),
            causal: Some(true),
            tau_vs_alex: None,
            notes: vec![
                "metric degenerates along the rigid line for y >= 2/3",
                "positive time separation to points outside the chronological future",
            ],
        },
        lead_laws: vec![rigid_law],
        closed_curves: vec![],
        base_point: vec![0.0, 0.0, 0.0],
        special_points: vec![vec![0.0, 1.0, 0.0], vec![0.0, 1.0 / 3.0, 0.0]],
        special_pairs: vec![(vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0])],
        description: "variable-coefficient structure separating the time-separation topology",
    }
}

/// Names of all built-in structures.
pub fn names() -> Vec<&'static str> {
    vec![
        "minkowski2",
        "minkowski3",
        "heisenberg",
        "martinet",
        "martinet_mod2",
        "martinet_mod1",
        "heisenberg_boost",
        "varmetric",
    ]
}

/// Looks up a built-in structure by name. `heisenberg_boost` defaults to
/// `phi = 0.5`; a different value can be requested as
/// `heisenberg_boost:0.8`.
pub fn get_structure(name: &str) -> Result<RegistryEntry> {
    match name {
        "minkowski2" => Ok(minkowski_entry(2)),
        "minkowski3" => Ok(minkowski_entry(3)),
        "heisenberg" => Ok(heisenberg_entry()),
        "martinet" => Ok(martinet_entry()),
        "martinet_mod2" => Ok(martinet_mod2_entry()),
        "martinet_mod1" => Ok(martinet_mod1_entry()),
        "heisenberg_boost" => Ok(heisenberg_boost(0.5)),
        "varmetric" => Ok(varmetric_entry()),
        other => {
            if let Some(rest) = other.strip_prefix("heisenberg_boost:") {
                let phi: f64 = rest.parse().map_err(|_| Error::InvalidConfig(
                    format!("bad boost parameter `{rest}`"),
                ))?;
                return Ok(heisenberg_boost(phi));
            }
            Err(Error::UnknownManifold {
                name: other.to_string(),
                available: names().join(", "),
            })
        }
    }
}
