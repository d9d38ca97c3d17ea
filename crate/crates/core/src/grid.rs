//! Deterministic truncated-grid supremum/infimum engine.
//!
//! Every `sup`/`inf` over `ℝⁿ` in the crate is realised here: a regular grid
//! over a bounding box, a few rounds of local refinement around the
//! incumbent, and a box-doubling probe that classifies runaway incumbents as
//! divergent (`±∞`).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::scalar::Scalar;

/// Points evaluated in one batch before the work is handed to rayon.
const PARALLEL_THRESHOLD: usize = 2048;

/// Axis-aligned box `∏ [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox<T> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::InvalidGrid("box dimension must be at least 1".into()));
        }
        if lo.len() != hi.len() {
            return Err(Error::Dimension { expected: lo.len(), got: hi.len() });
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l.is_finite() && h.is_finite()) || l > h {
                return Err(Error::InvalidGrid(format!("bad interval [{l}, {h}]")));
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[-radius, radius]^dim`.
    pub fn centered(dim: usize, radius: T) -> Result<Self> {
        Self::new(vec![-radius; dim], vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| l <= v && v <= h)
    }

    /// Radius of the largest origin-centred ball inside the box (0 when the
    /// origin is outside).
    pub fn inradius(&self) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (-l).min(h))
            .fold(T::infinity(), T::min)
            .max(T::zero())
    }

    /// Smallest box containing both `self` and `2·self`.
    pub fn doubled(&self) -> Self {
        let two = T::lit(2.0);
        Self {
            lo: self.lo.iter().map(|&l| l.min(two * l)).collect(),
            hi: self.hi.iter().map(|&h| h.max(two * h)).collect(),
        }
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.iter().chain(&other.lo).copied().collect(),
            hi: self.hi.iter().chain(&other.hi).copied().collect(),
        }
    }

    fn on_boundary(&self, x: &[T]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .any(|(&v, (&l, &h))| l < h && (v == l || v == h))
    }
}

/// Numeric caps shared by every grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits<T> {
    /// Maximum number of grid points in one search.
    pub point_cap: usize,
    /// Bound past which a boundary incumbent that keeps improving under box
    /// doubling is classified divergent (in the direction of the search).
    pub divergence_cap: T,
}

impl<T: Scalar> Default for Limits<T> {
    fn default() -> Self {
        Self { point_cap: 1_000_000, divergence_cap: T::lit(1e12) }
    }
}

/// Regular grid over a box plus the refinement and widening schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    pub bbox: BoundingBox<T>,
    pub points_per_dim: usize,
    pub refinement_rounds: usize,
    /// Maximum number of box doublings used by the divergence probe;
    /// `0` disables widening.
    pub doublings: usize,
    pub limits: Limits<T>,
}

pub const DEFAULT_POINTS: usize = 201;
pub const DEFAULT_ROUNDS: usize = 3;
pub const DEFAULT_DOUBLINGS: usize = 64;

impl<T: Scalar> GridSpec<T> {
    pub fn new(bbox: BoundingBox<T>, points_per_dim: usize) -> Result<Self> {
        if points_per_dim < 2 {
            return Err(Error::InvalidGrid("points_per_dim must be at least 2".into()));
        }
        Ok(Self {
            bbox,
            points_per_dim,
            refinement_rounds: DEFAULT_ROUNDS,
            doublings: DEFAULT_DOUBLINGS,
            limits: Limits::default(),
        })
    }

    /// `[-radius, radius]^dim` with `points` per axis.
    pub fn centered(dim: usize, radius: T, points: usize) -> Result<Self> {
        Self::new(BoundingBox::centered(dim, radius)?, points)
    }

    pub fn interval(lo: T, hi: T, points: usize) -> Result<Self> {
        Self::new(BoundingBox::new(vec![lo], vec![hi])?, points)
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.refinement_rounds = rounds;
        self
    }

    pub fn with_doublings(mut self, doublings: usize) -> Self {
        self.doublings = doublings;
        self
    }

    pub fn with_limits(mut self, limits: Limits<T>) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_box(mut self, bbox: BoundingBox<T>) -> Self {
        self.bbox = bbox;
        self
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    /// Number of points on the base grid (degenerate axes count once).
    pub fn point_count(&self) -> usize {
        axis_counts(&self.bbox, self.points_per_dim).iter().product()
    }

    pub fn check_cap(&self) -> Result<()> {
        let points = self.point_count();
        if points > self.limits.point_cap {
            Err(Error::GridCap { points, cap: self.limits.point_cap })
        } else {
            Ok(())
        }
    }

    /// Base grid points in lexicographic index order (first axis slowest).
    pub fn points(&self) -> Vec<Vec<T>> {
        lattice(&self.bbox, self.points_per_dim)
    }

    /// Product grid `self × other` sharing this grid's schedule.
    pub fn product(&self, other: &Self) -> Self {
        Self {
            bbox: self.bbox.product(&other.bbox),
            points_per_dim: self.points_per_dim.max(other.points_per_dim),
            ..self.clone()
        }
    }
}

fn axis_counts<T: Scalar>(bbox: &BoundingBox<T>, per_dim: usize) -> Vec<usize> {
    bbox.lo
        .iter()
        .zip(&bbox.hi)
        .map(|(l, h)| if l == h { 1 } else { per_dim })
        .collect()
}

/// Coordinate `i` of `count` evenly spaced points on `[lo, hi]`; endpoints and
/// "nice" interior points are exact.
fn axis_coord<T: Scalar>(lo: T, hi: T, i: usize, count: usize) -> T {
    if count == 1 {
        return lo;
    }
    if i + 1 == count {
        return hi;
    }
    lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(count - 1)
}

/// All lattice points in lexicographic index order.
pub(crate) fn lattice<T: Scalar>(bbox: &BoundingBox<T>, per_dim: usize) -> Vec<Vec<T>> {
    let counts = axis_counts(bbox, per_dim);
    let axes: Vec<Vec<T>> = counts
        .iter()
        .enumerate()
        .map(|(d, &c)| (0..c).map(|i| axis_coord(bbox.lo[d], bbox.hi[d], i, c)).collect())
        .collect();
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; counts.len()];
    for _ in 0..total {
        out.push(idx.iter().enumerate().map(|(d, &i)| axes[d][i]).collect());
        for d in (0..counts.len()).rev() {
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    out
}

/// Direction of the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sup,
    Inf,
}

impl Mode {
    fn better<T: Scalar>(self, a: ExtReal<T>, b: ExtReal<T>) -> bool {
        match self {
            Mode::Sup => a > b,
            Mode::Inf => a < b,
        }
    }

    /// The value that means "no admissible point" for this mode.
    pub fn worst<T: Scalar>(self) -> ExtReal<T> {
        match self {
            Mode::Sup => ExtReal::NegInf,
            Mode::Inf => ExtReal::PosInf,
        }
    }

    fn runaway<T: Scalar>(self) -> ExtReal<T> {
        -self.worst::<T>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Attained,
    Divergent,
    EmptyDomain,
}

/// Outcome of a grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub value: ExtReal<T>,
    pub arg: Option<Vec<T>>,
    pub status: Status,
    /// Box doublings that strictly improved the incumbent. Non-zero on an
    /// attained result means the extremum is approached at infinity and the
    /// reported value is only the best one seen.
    pub widenings: usize,
}

impl<T: Scalar> OptResult<T> {
    pub fn improves_under_widening(&self) -> bool {
        self.widenings > 0
    }

    fn empty(mode: Mode) -> Self {
        Self { value: mode.worst(), arg: None, status: Status::EmptyDomain, widenings: 0 }
    }
}

fn evaluate_all<T, F>(phi: &F, points: &[Vec<T>]) -> Result<Vec<ExtReal<T>>>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<ExtReal<T>> + Sync,
{
    if points.len() >= PARALLEL_THRESHOLD {
        points.par_iter().map(|p| phi(p)).collect()
    } else {
        points.iter().map(|p| phi(p)).collect()
    }
}

// First strictly-best point in index order.
fn pick<T: Scalar>(mode: Mode, points: Vec<Vec<T>>, values: &[ExtReal<T>]) -> Option<(ExtReal<T>, Vec<T>)> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if mode.better(v, values[b]) => best = Some(i),
            _ => {}
        }
    }
    best.map(|i| (values[i], points.into_iter().nth(i).expect("index in range")))
}

/// Base-lattice scan of one box.
fn scan_box<T, F>(
    phi: &F,
    bbox: &BoundingBox<T>,
    spec: &GridSpec<T>,
    mode: Mode,
) -> Result<Option<(ExtReal<T>, Vec<T>)>>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<ExtReal<T>> + Sync,
{
    let points = lattice(bbox, spec.points_per_dim);
    if points.len() > spec.limits.point_cap {
        return Err(Error::GridCap { points: points.len(), cap: spec.limits.point_cap });
    }
    let values = evaluate_all(phi, &points)?;
    Ok(pick(mode, points, &values).filter(|(v, _)| *v != mode.worst()))
}

/// Local grids around the incumbent, each one base step wide.
fn refine<T, F>(
    phi: &F,
    bbox: &BoundingBox<T>,
    spec: &GridSpec<T>,
    mode: Mode,
    mut best_v: ExtReal<T>,
    mut best_x: Vec<T>,
) -> Result<(ExtReal<T>, Vec<T>)>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<ExtReal<T>> + Sync,
{
    let per_dim = spec.points_per_dim;
    let local = per_dim.max(5) | 1;
    let mut step: Vec<T> = bbox
        .lo
        .iter()
        .zip(&bbox.hi)
        .map(|(&l, &h)| (h - l) / T::from_usize_lossy(per_dim - 1))
        .collect();
    for _ in 0..spec.refinement_rounds {
        if best_v == mode.runaway() {
            break;
        }
        let lo: Vec<T> = best_x.iter().zip(&step).zip(&bbox.lo).map(|((&c, &s), &l)| (c - s).max(l)).collect();
        let hi: Vec<T> = best_x.iter().zip(&step).zip(&bbox.hi).map(|((&c, &s), &h)| (c + s).min(h)).collect();
        let sub = BoundingBox { lo, hi };
        let pts = lattice(&sub, local);
        let vals = evaluate_all(phi, &pts)?;
        if let Some((v, x)) = pick(mode, pts, &vals) {
            if mode.better(v, best_v) {
                best_v = v;
                best_x = x;
            }
        }
        step = sub
            .lo
            .iter()
            .zip(&sub.hi)
            .map(|(&l, &h)| (h - l) / T::from_usize_lossy(local - 1))
            .collect();
    }
    Ok((best_v, best_x))
}

/// Supremum or infimum of `phi` over `grid`.
///
/// The base lattice is scanned in lexicographic index order and ties keep the
/// earliest point. While the base incumbent sits on the box boundary, the box
/// is doubled (up to `grid.doublings` times) as long as the base incumbent of
/// the wider box is strictly better; if it passes `divergence_cap` in the
/// search direction (above it for `Sup`, below its negative for `Inf`) the
/// search reports [`Status::Divergent`] with the matching infinity. Otherwise
/// `refinement_rounds` local grids around the incumbent of the final box
/// follow; a point replaces the incumbent only when strictly better, so
/// refinement never worsens the result.
///
/// Results do not depend on thread scheduling: evaluation may run on rayon
/// but reductions happen sequentially in index order.
pub fn optimize_over_grid<T, F>(phi: F, grid: &GridSpec<T>, mode: Mode) -> Result<OptResult<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<ExtReal<T>> + Sync,
{
    grid.check_cap()?;
    let Some((mut value, mut arg)) = scan_box(&phi, &grid.bbox, grid, mode)? else {
        return Ok(OptResult::empty(mode));
    };
    let mut bbox = grid.bbox.clone();
    let mut widenings = 0;
    let cap = grid.limits.divergence_cap;
    while widenings < grid.doublings && value.is_finite() && bbox.on_boundary(&arg) {
        let wider = bbox.doubled();
        if wider == bbox {
            break;
        }
        match scan_box(&phi, &wider, grid, mode)? {
            Some((v, x)) if mode.better(v, value) => {
                value = v;
                arg = x;
                bbox = wider;
                widenings += 1;
                let runaway = match (value, mode) {
                    (ExtReal::Finite(v), Mode::Sup) => v > cap,
                    (ExtReal::Finite(v), Mode::Inf) => v < -cap,
                    _ => true,
                };
                if runaway {
                    return Ok(OptResult {
                        value: mode.runaway(),
                        arg: None,
                        status: Status::Divergent,
                        widenings,
                    });
                }
            }
            _ => break,
        }
    }
    let (value, arg) = refine(&phi, &bbox, grid, mode, value, arg)?;
    Ok(OptResult { value, arg: Some(arg), status: Status::Attained, widenings })
}

/// Extremum over an explicit finite sample; ties keep the earliest index.
pub fn optimize_over_points<T, F>(phi: F, points: &[Vec<T>], mode: Mode) -> Result<OptResult<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<ExtReal<T>> + Sync,
{
    let values = evaluate_all(&phi, points)?;
    match pick(mode, points.to_vec(), &values) {
        Some((v, x)) if v != mode.worst() => {
            Ok(OptResult { value: v, arg: Some(x), status: Status::Attained, widenings: 0 })
        }
        _ => Ok(OptResult::empty(mode)),
    }
}
