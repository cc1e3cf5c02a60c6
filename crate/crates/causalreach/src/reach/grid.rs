//! Rectangular occupancy grids with under-approximation semantics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AxisBox;

/// What the marked cells of a grid mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridSemantics {
    /// Cells visited by sampled nonspacelike trajectories (subset of J).
    UnderJ,
    /// Cells visited by sampled timelike trajectories (subset of I).
    UnderI,
    DerivedInterior,
    DerivedClosure,
    DerivedBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Future,
    Past,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Future => 1.0,
            Direction::Past => -1.0,
        }
    }
}

/// Provenance carried by every grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridMeta {
    pub manifold: String,
    pub kind: String,
    pub source: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    pub direction: Direction,
    pub samples: usize,
    pub seed: u64,
    pub digest: String,
}

/// Bit grid over an axis-aligned box.
#[derive(Debug, Clone)]
pub struct ReachGrid {
    bounds: AxisBox,
    dims: Vec<usize>,
    words: Vec<u64>,
    semantics: GridSemantics,
    meta: GridMeta,
}

impl ReachGrid {
    pub fn empty(bounds: AxisBox, dims: Vec<usize>, semantics: GridSemantics, meta: GridMeta) -> Self {
        assert_eq!(bounds.dim(), dims.len());
        let cells: usize = dims.iter().product();
        Self {
            bounds,
            dims,
            words: vec![0; cells.div_ceil(64)],
            semantics,
            meta,
        }
    }

    /// Uniform resolution per axis.
    pub fn uniform(bounds: AxisBox, resolution: usize, semantics: GridSemantics, meta: GridMeta) -> Self {
        let dims = vec![resolution; bounds.dim()];
        Self::empty(bounds, dims, semantics, meta)
    }

    pub fn bounds(&self) -> &AxisBox {
        &self.bounds
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn semantics(&self) -> GridSemantics {
        self.semantics
    }
    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }
    pub fn meta_mut(&mut self) -> &mut GridMeta {
        &mut self.meta
    }
    pub fn with_semantics(mut self, semantics: GridSemantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn cell_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn cell_sizes(&self) -> Vec<f64> {
        self.bounds
            .widths()
            .iter()
            .zip(&self.dims)
            .map(|(w, d)| w / *d as f64)
            .collect()
    }

    /// Euclidean diagonal of one cell.
    pub fn cell_diagonal(&self) -> f64 {
        self.cell_sizes().iter().map(|s| s * s).sum::<f64>().sqrt()
    }

    /// Multi-index of the cell containing `p`, if inside the grid box.
    pub fn cell_of(&self, p: &[f64]) -> Option<Vec<usize>> {
        if !self.bounds.contains(p) {
            return None;
        }
        Some(
            p.iter()
                .zip(self.bounds.lo.iter().zip(&self.bounds.hi))
                .zip(&self.dims)
                .map(|((x, (lo, hi)), d)| {
                    let f = (x - lo) / (hi - lo) * *d as f64;
                    (f as usize).min(d - 1)
                })
                .collect(),
        )
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for (i, d) in idx.iter().zip(&self.dims) {
            f = f * d + i;
        }
        f
    }

    pub fn unflat(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for ax in (0..self.dims.len()).rev() {
            idx[ax] = flat % self.dims[ax];
            flat /= self.dims[ax];
        }
        idx
    }

    /// Center point of the cell with multi-index `idx`.
    pub fn center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(self.bounds.lo.iter().zip(&self.bounds.hi))
            .zip(&self.dims)
            .map(|((i, (lo, hi)), d)| lo + (hi - lo) * (*i as f64 + 0.5) / *d as f64)
            .collect()
    }

    pub fn mark_flat(&mut self, flat: usize) {
        self.words[flat / 64] |= 1 << (flat % 64);
    }

    /// Marks the cell containing `p`; returns false when `p` is outside.
    pub fn mark_point(&mut self, p: &[f64]) -> bool {
        match self.cell_of(p) {
            Some(idx) => {
                let f = self.flat(&idx);
                self.mark_flat(f);
                true
            }
            None => false,
        }
    }

    pub fn is_marked_flat(&self, flat: usize) -> bool {
        self.words[flat / 64] & (1 << (flat % 64)) != 0
    }

    pub fn is_marked(&self, idx: &[usize]) -> bool {
        self.is_marked_flat(self.flat(idx))
    }

    /// Marked status of the cell containing `p`; `None` outside the box.
    pub fn point_marked(&self, p: &[f64]) -> Option<bool> {
        self.cell_of(p).map(|idx| self.is_marked(&idx))
    }

    pub fn marked_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_marked(&self) -> impl Iterator<Item = usize> + '_ {
        let cells = self.cell_count();
        (0..cells).filter(move |f| self.is_marked_flat(*f))
    }

    pub fn same_geometry(&self, other: &ReachGrid) -> bool {
        self.dims == other.dims && self.bounds == other.bounds
    }

    /// Bitwise OR merge; panics on geometry mismatch.
    pub fn or_assign(&mut self, other: &ReachGrid) {
        assert!(self.same_geometry(other), "grid geometry mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Cellwise intersection.
    pub fn intersect(&self, other: &ReachGrid, semantics: GridSemantics) -> Result<ReachGrid> {
        if !self.same_geometry(other) {
            return Err(Error::InvalidConfig("grid geometry mismatch".into()));
        }
        let mut out = self.clone().with_semantics(semantics);
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        Ok(out)
    }

    /// True when every marked cell of `self` is marked in `other`.
    pub fn subset_of(&self, other: &ReachGrid) -> bool {
        self.same_geometry(other)
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    fn neighbor_offsets(&self) -> Vec<Vec<isize>> {
        let n = self.dims.len();
        let mut offs = vec![vec![0isize; n]];
        for _ in 0..n {
            // odometer over {-1, 0, 1}^n
            let mut next = Vec::new();
            for base in &offs {
                for d in [-1isize, 0, 1] {
                    let mut o = base.clone();
                    o.remove(0);
                    o.push(d);
                    next.push(o);
                }
            }
            offs = next;
        }
        offs
    }

    fn morph(&self, erode: bool) -> ReachGrid {
        let n = self.dims.len();
        let offsets = self.neighbor_offsets();
        let mut out = self.clone();
        let cells = self.cell_count();
        let mut idx = vec![0usize; n];
        let mut nidx = vec![0usize; n];
        for flat in 0..cells {
            let mut all = true;
            let mut any = false;
            'offs: for off in &offsets {
                let mut ok = true;
                for ax in 0..n {
                    let v = idx[ax] as isize + off[ax];
                    if v < 0 || v >= self.dims[ax] as isize {
                        ok = false;
                        break;
                    }
                    nidx[ax] = v as usize;
                }
                let marked = ok && self.is_marked(&nidx);
                all &= marked;
                any |= marked;
                if erode && !all {
                    break 'offs;
                }
                if !erode && any {
                    break 'offs;
                }
            }
            let set = if erode { all } else { any };
            let w = flat / 64;
            let b = 1u64 << (flat % 64);
            if set {
                out.words[w] |= b;
            } else {
                out.words[w] &= !b;
            }
            for ax in (0..n).rev() {
                idx[ax] += 1;
                if idx[ax] < self.dims[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        out
    }

    /// Morphological erosion with the full one-cell neighborhood;
    /// out-of-box neighbors count as unmarked.
    pub fn interior(&self) -> ReachGrid {
        self.morph(true).with_semantics(GridSemantics::DerivedInterior)
    }

    /// Morphological dilation with the full one-cell neighborhood.
    pub fn closure(&self) -> ReachGrid {
        self.morph(false).with_semantics(GridSemantics::DerivedClosure)
    }

    /// Closure minus interior.
    pub fn boundary(&self) -> ReachGrid {
        let interior = self.morph(true);
        let mut out = self.morph(false).with_semantics(GridSemantics::DerivedBoundary);
        for (a, b) in out.words.iter_mut().zip(&interior.words) {
            *a &= !b;
        }
        out
    }

    /// True when the cell of `p` or any neighbor within Chebyshev distance
    /// `tol_cells` is marked.
    pub fn marked_near(&self, p: &[f64], tol_cells: usize) -> Option<bool> {
        let idx = self.cell_of(p)?;
        let t = tol_cells as isize;
        let mut stack = vec![Vec::<usize>::new()];
        for (ax, d) in self.dims.iter().enumerate() {
            let mut next = Vec::new();
            for partial in &stack {
                let base = idx[ax] as isize;
                for o in -t..=t {
                    let v = base + o;
                    if v >= 0 && v < *d as isize {
                        let mut q = partial.clone();
                        q.push(v as usize);
                        next.push(q);
                    }
                }
            }
            stack = next;
        }
        Some(stack.iter().any(|q| self.is_marked(q)))
    }
}

/// Header written next to the cell list and PGM slices.
#[derive(Debug, Serialize, Deserialize)]
pub struct GridHeader {
    pub bounds: AxisBox,
    pub dims: Vec<usize>,
    pub semantics: GridSemantics,
    pub meta: GridMeta,
    pub marked_cells: usize,
}

/// Writes `{prefix}.json`, `{prefix}_cells.csv` and per-slice ASCII PGM
/// files (`P2`, maxval 1, row-major cells).
pub fn write_grid(dir: &std::path::Path, prefix: &str, grid: &ReachGrid) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let header = GridHeader {
        bounds: grid.bounds.clone(),
        dims: grid.dims.clone(),
        semantics: grid.semantics,
        meta: grid.meta.clone(),
        marked_cells: grid.marked_count(),
    };
    let hpath = dir.join(format!("{prefix}.json"));
    std::fs::write(&hpath, serde_json::to_string_pretty(&header)?)?;
    written.push(hpath);

    let mut csv = String::new();
    for flat in grid.iter_marked() {
        let idx = grid.unflat(flat);
        let line: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    let cpath = dir.join(format!("{prefix}_cells.csv"));
    std::fs::write(&cpath, csv)?;
    written.push(cpath);

    // PGM slices over the trailing axes; a 2-d grid is a single slice.
    let n = grid.dims.len();
    if n >= 2 {
        let w = grid.dims[n - 1];
        let h = grid.dims[n - 2];
        let lead: usize = grid.dims[..n - 2].iter().product();
        for slice in 0..lead {
            let mut pgm = format!("P2\n{w} {h}\n1\n");
            let lead_idx = if n > 2 {
                let mut idx = vec![0; n - 2];
                let mut f = slice;
                for ax in (0..n - 2).rev() {
                    idx[ax] = f % grid.dims[ax];
                    f /= grid.dims[ax];
                }
                idx
            } else {
                vec![]
            };
            for row in 0..h {
                let cells: Vec<&str> = (0..w)
                    .map(|col| {
                        let mut idx = lead_idx.clone();
                        idx.push(row);
                        idx.push(col);
                        if grid.is_marked(&idx) {
                            "1"
                        } else {
                            "0"
                        }
                    })
                    .collect();
                pgm.push_str(&cells.join(" "));
                pgm.push('\n');
            }
            let ppath = if n > 2 {
                dir.join(format!("{prefix}_slice{slice:03}.pgm"))
            } else {
                dir.join(format!("{prefix}.pgm"))
            };
            std::fs::write(&ppath, pgm)?;
            written.push(ppath);
        }
    }
    Ok(written)
}

/// Reads a grid back from its `{prefix}.json` header and cell list.
pub fn read_grid(header_path: &std::path::Path) -> Result<ReachGrid> {
    let text = std::fs::read_to_string(header_path)?;
    let header: GridHeader = serde_json::from_str(&text)?;
    let mut grid = ReachGrid::empty(header.bounds, header.dims, header.semantics, header.meta);
    let stem = header_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::InvalidConfig("bad grid header path".into()))?;
    let cells_path = header_path.with_file_name(format!("{stem}_cells.csv"));
    let csv = std::fs::read_to_string(&cells_path)?;
    for line in csv.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let idx: Vec<usize> = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidConfig(format!("bad cell index `{t}`: {e}")))
            })
            .collect::<Result<_>>()?;
        let f = grid.flat(&idx);
        grid.mark_flat(f);
    }
    Ok(grid)
}
