//! Monte-Carlo under-approximation of chronological and causal futures
//! and pasts on occupancy grids.
//!
//! Every verdict derived from these grids is an "at resolution r, samples
//! N" statement, never an exact claim: marked cells certainly meet the
//! reachable set, unmarked cells are unknown. Certification of
//! non-reachability comes from analytic invariants of the registry
//! structures, not from sampling.

mod grid;
mod sampler;

pub use grid::{
    read_grid, write_grid, Direction, GridHeader, GridMeta, GridSemantics, ReachGrid,
};
pub use sampler::TrajectorySink;

pub(crate) use sampler::draw_rows as sampler_draw_rows;
pub(crate) use sampler::sample_into as sampler_run;

use sha2::Digest;

use crate::curves::ControlLaw;
pub use crate::curves::Strictness;
use crate::error::{Error, Result};
use crate::geometry::{AxisBox, SubSpaceTime};

/// Configuration for trajectory sampling and the grids built from it.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ReachConfig {
    /// Total integration time per trajectory.
    pub horizon: f64,
    /// Number of sampled trajectories.
    pub samples: usize,
    /// Piecewise-constant control intervals per trajectory.
    pub steps: usize,
    /// RK4 substeps per control interval.
    pub substeps: usize,
    pub seed: u64,
    pub strictness: Strictness,
    /// Cone shrink factor delta in [0, 1); sampled spatial controls are
    /// scaled by (1 - delta).
    pub cone_margin: f64,
    /// Cells per axis.
    pub resolution: usize,
    /// Grid box; defaults to the structure's domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_box: Option<AxisBox>,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self {
            horizon: 2.5,
            samples: 20_000,
            steps: 6,
            substeps: 42,
            seed: 0,
            strictness: Strictness::Nonspacelike,
            cone_margin: 0.0,
            resolution: 64,
            grid_box: None,
        }
    }
}

impl ReachConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::InvalidConfig("samples must be >= 1".into()));
        }
        if self.resolution < 8 {
            return Err(Error::InvalidConfig("resolution must be >= 8".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        if self.steps == 0 || self.substeps == 0 {
            return Err(Error::InvalidConfig("steps and substeps must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.cone_margin) {
            return Err(Error::InvalidConfig("cone_margin must lie in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn timelike(mut self) -> Self {
        self.strictness = Strictness::Timelike;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn grid_box_for(&self, st: &SubSpaceTime) -> AxisBox {
        self.grid_box.clone().unwrap_or_else(|| st.domain().clone())
    }

    /// Hex digest of the full run configuration, for report provenance.
    pub fn digest(&self, manifold: &str, source: &[f64], direction: Direction) -> String {
        #[derive(serde::Serialize)]
        struct DigestInput<'a> {
            manifold: &'a str,
            source: &'a [f64],
            direction: Direction,
            cfg: &'a ReachConfig,
        }
        let json = serde_json::to_string(&DigestInput {
            manifold,
            source,
            direction,
            cfg: self,
        })
        .expect("config serialization");
        let mut hasher = sha2::Sha256::new();
        hasher.update(json.as_bytes());
        hex_string(&hasher.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn semantics_for(strictness: Strictness) -> GridSemantics {
    match strictness {
        Strictness::Nonspacelike => GridSemantics::UnderJ,
        Strictness::Timelike => GridSemantics::UnderI,
    }
}

/// Samples causal trajectories from `p` and marks every visited cell.
///
/// The result under-approximates the causal future (`Nonspacelike`) or the
/// chronological future (`Timelike`) of `p` up to integrator error; `Past`
/// integrates the reversed cone. Identical configurations produce
/// bit-identical grids regardless of worker count.
pub fn sample_reach(
    st: &SubSpaceTime,
    p: &[f64],
    direction: Direction,
    cfg: &ReachConfig,
) -> Result<ReachGrid> {
    sample_reach_with_leads(st, p, direction, cfg, &[])
}

/// [`sample_reach`] with deterministic lead trajectories prepended to the
/// random batch. Lead index 0 is always the central time-orientation ray;
/// registry structures contribute documented control laws. Leads are
/// clipped to strictly timelike rows when the grid is timelike.
pub fn sample_reach_with_leads(
    st: &SubSpaceTime,
    p: &[f64],
    direction: Direction,
    cfg: &ReachConfig,
    leads: &[ControlLaw],
) -> Result<ReachGrid> {
    cfg.validate()?;
    let bounds = cfg.grid_box_for(st);
    if !bounds.contains(p) {
        return Err(Error::OutsideDomain {
            manifold: format!("{} reach grid box", st.name()),
            point: p.to_vec(),
        });
    }
    st.check_contains(p)?;
    let meta = GridMeta {
        manifold: st.name().to_string(),
        kind: "reach".into(),
        source: p.to_vec(),
        target: None,
        direction,
        samples: cfg.samples,
        seed: cfg.seed,
        digest: cfg.digest(st.name(), p, direction),
    };
    let template = GridSink(ReachGrid::uniform(
        bounds,
        cfg.resolution,
        semantics_for(cfg.strictness),
        meta,
    ));
    let GridSink(grid) = sampler::sample_into(st, p, direction, cfg, leads, &template)?;
    Ok(grid)
}

struct GridSink(ReachGrid);

impl TrajectorySink for GridSink {
    fn fresh(&self) -> Self {
        let mut g = self.0.clone();
        g = ReachGrid::empty(
            g.bounds().clone(),
            g.dims().to_vec(),
            g.semantics(),
            g.meta().clone(),
        );
        GridSink(g)
    }

    fn node(&mut self, _traj: u64, _t: f64, p: &[f64], _cumlen: f64) {
        self.0.mark_point(p);
    }

    fn merge(&mut self, other: Self) {
        self.0.or_assign(&other.0);
    }
}

/// Verdict of [`chron_open_at`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum OpenVerdict {
    Interior,
    Boundary,
    Outside,
    Unknown,
}

#[derive(PartialEq, Clone, Copy)]
enum CellStatus {
    Int,
    Bnd,
    Out,
}

fn cell_status(grid: &ReachGrid, q: &[f64]) -> Result<CellStatus> {
    let idx = grid
        .cell_of(q)
        .ok_or_else(|| Error::OutsideDomain {
            manifold: "reach grid box".into(),
            point: q.to_vec(),
        })?;
    if !grid.is_marked(&idx) {
        return Ok(CellStatus::Out);
    }
    if grid.interior().is_marked(&idx) {
        Ok(CellStatus::Int)
    } else {
        Ok(CellStatus::Bnd)
    }
}

/// Classifies `q` against the timelike reach grid from `p`, requiring
/// agreement at resolutions `r` and `2r`:
/// `Interior` if the cell survives erosion, `Boundary` if marked but
/// eroded away, `Outside` if never marked, `Unknown` when the two
/// resolutions disagree.
pub fn chron_open_at(
    st: &SubSpaceTime,
    p: &[f64],
    q: &[f64],
    cfg: &ReachConfig,
    leads: &[ControlLaw],
) -> Result<OpenVerdict> {
    let mut cfg_t = cfg.clone().timelike();
    let coarse = sample_reach_with_leads(st, p, Direction::Future, &cfg_t, leads)?;
    cfg_t.resolution = cfg.resolution * 2;
    let fine = sample_reach_with_leads(st, p, Direction::Future, &cfg_t, leads)?;
    let a = cell_status(&coarse, q)?;
    let b = cell_status(&fine, q)?;
    Ok(match (a, b) {
        (CellStatus::Int, CellStatus::Int) => OpenVerdict::Interior,
        (CellStatus::Bnd, CellStatus::Bnd) => OpenVerdict::Boundary,
        (CellStatus::Out, CellStatus::Out) => OpenVerdict::Outside,
        _ => OpenVerdict::Unknown,
    })
}

/// The opened chronological relation `p <<_o q`: true iff `q` sits in the
/// grid interior of the sampled chronological future of `p`.
pub fn open_chron(
    st: &SubSpaceTime,
    p: &[f64],
    q: &[f64],
    cfg: &ReachConfig,
    leads: &[ControlLaw],
) -> Result<bool> {
    Ok(chron_open_at(st, p, q, cfg, leads)? == OpenVerdict::Interior)
}

/// Cellwise intersection of the future grid from `p` with the past grid
/// from `q`; with `opened` both grids are eroded first.
pub fn alexandrov_interval(
    st: &SubSpaceTime,
    p: &[f64],
    q: &[f64],
    cfg: &ReachConfig,
    opened: bool,
    leads: &[ControlLaw],
) -> Result<ReachGrid> {
    let fut = sample_reach_with_leads(st, p, Direction::Future, cfg, leads)?;
    let past = sample_reach_with_leads(st, q, Direction::Past, cfg, leads)?;
    let (fut, past) = if opened {
        (fut.interior(), past.interior())
    } else {
        (fut, past)
    };
    let semantics = if opened {
        GridSemantics::DerivedInterior
    } else {
        fut.semantics()
    };
    let mut out = fut.intersect(&past, semantics)?;
    out.meta_mut().kind = if opened {
        "alexandrov_interval_open".into()
    } else {
        "alexandrov_interval".into()
    };
    out.meta_mut().target = Some(q.to_vec());
    Ok(out)
}

#[cfg(test)]
mod tests;
