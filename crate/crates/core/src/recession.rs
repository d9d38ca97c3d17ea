//! Level sets and zero set of `γ`, sampled recession cones, the cone
//! `R(γ)` and the compactness equivalence `R(γ) = {0} ⟺ m(γ)` non-empty
//! and compact.
//!
//! Recession cones of point clouds are approximated on a direction grid: a
//! direction `d` belongs to `A^∞` when, for every rung `r` of a radius
//! ladder, some point `a ∈ A` has `‖a‖ ≥ r` and `∠(a − a₀, d) ≤ tol`,
//! where `a₀` is the least-norm point of the cloud. Measuring angles from
//! `a₀` instead of the origin keeps the test invariant under translation,
//! as `A^∞` itself is. Analytic sets bypass the approximation.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::conjugate::GammaFn;
use crate::coupling::split_box;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{lattice, BoundingBox};
use crate::scalar::{dot, norm, Scalar};
use crate::sets::SetSpec;

/// Finite sample of a set inside a sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    pub dim: usize,
    pub points: Vec<Vec<T>>,
    pub bbox: BoundingBox<T>,
    /// Human-readable generating predicate.
    pub predicate: String,
}

impl<T: Scalar> PointCloud<T> {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// First point of least Euclidean norm.
    pub fn anchor(&self) -> Option<&[T]> {
        let mut best: Option<(T, usize)> = None;
        for (i, p) in self.points.iter().enumerate() {
            let r = norm(p);
            if best.is_none_or(|(b, _)| r < b) {
                best = Some((r, i));
            }
        }
        best.map(|(_, i)| self.points[i].as_slice())
    }

    pub fn max_norm(&self) -> T {
        self.points.iter().map(|p| norm(p)).fold(T::zero(), T::max)
    }
}

/// Unit directions covering the sphere in `ℝᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid<T> {
    pub dim: usize,
    pub resolution_deg: f64,
    pub dirs: Vec<Vec<T>>,
}

impl<T: Scalar> DirectionGrid<T> {
    /// `±1` in 1-D; `360 / resolution` equally spaced angles in 2-D starting
    /// at angle 0; normalized cube-face lattices in higher dimensions.
    pub fn new(dim: usize, resolution_deg: f64) -> Result<Self> {
        if dim == 0 || resolution_deg <= 0.0 || resolution_deg > 90.0 {
            return Err(Error::InvalidGrid(format!("direction grid dim {dim}, resolution {resolution_deg}")));
        }
        let dirs: Vec<Vec<T>> = match dim {
            1 => vec![vec![T::one()], vec![-T::one()]],
            2 => {
                let count = (360.0 / resolution_deg).round() as usize;
                (0..count)
                    .map(|k| {
                        let a = (k as f64) * std::f64::consts::TAU / count as f64;
                        vec![T::lit(a.cos()), T::lit(a.sin())]
                    })
                    .collect()
            }
            _ => {
                let s = (90.0 / resolution_deg).ceil() as usize;
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for axis in 0..dim {
                    for sign in [1.0, -1.0] {
                        let face_box = BoundingBox::centered(dim - 1, 1.0f64).expect("dim ≥ 2");
                        for rest in lattice(&face_box, s + 1) {
                            let mut v: Vec<f64> = rest.clone();
                            v.insert(axis, sign);
                            let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                            let unit: Vec<f64> = v.iter().map(|c| c / r).collect();
                            let key: Vec<i64> = unit.iter().map(|c| (c * 1e9).round() as i64).collect();
                            if seen.insert(key) {
                                out.push(unit.into_iter().map(T::lit).collect());
                            }
                        }
                    }
                }
                out
            }
        };
        Ok(Self { dim, resolution_deg, dirs })
    }
}

/// A sampled cone: the grid directions it contains. No members means `{0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet<T> {
    pub grid: Arc<DirectionGrid<T>>,
    pub members: BTreeSet<usize>,
    /// True when computed in closed form rather than from samples.
    pub exact: bool,
}

impl<T: Scalar> DirectionSet<T> {
    pub fn zero(grid: Arc<DirectionGrid<T>>) -> Self {
        Self { grid, members: BTreeSet::new(), exact: true }
    }

    pub fn is_zero(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn directions(&self) -> Vec<Vec<T>> {
        self.members.iter().map(|&i| self.grid.dirs[i].clone()).collect()
    }

    pub fn contains_direction(&self, d: &[T]) -> bool {
        self.grid.dirs.iter().position(|g| g.as_slice() == d).is_some_and(|i| self.members.contains(&i))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            grid: self.grid.clone(),
            members: self.members.intersection(&other.members).copied().collect(),
            exact: self.exact && other.exact,
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Every member lies within `tol_deg` of some member of `other`.
    pub fn approx_subset(&self, other: &Self, tol_deg: f64) -> bool {
        let cos_tol = T::lit(tol_deg.to_radians().cos() - 1e-12);
        self.members.iter().all(|&i| {
            let d = &self.grid.dirs[i];
            other.members.iter().any(|&j| dot(d, &other.grid.dirs[j]) >= cos_tol)
        })
    }

    /// Angular Hausdorff distance at most `tol_deg`; `{0}` only matches `{0}`.
    pub fn approx_eq(&self, other: &Self, tol_deg: f64) -> bool {
        self.is_zero() == other.is_zero() && self.approx_subset(other, tol_deg) && other.approx_subset(self, tol_deg)
    }
}

/// Rung fractions of the box inradius used by default.
pub const DEFAULT_RUNGS: [f64; 4] = [0.1125, 0.225, 0.45, 0.9];
pub const DEFAULT_ANGULAR_TOL_DEG: f64 = 5.0;
pub const DEFAULT_RESOLUTION_DEG: f64 = 1.0;

/// The default ladder `inradius × DEFAULT_RUNGS`.
pub fn default_ladder<T: Scalar>(bbox: &BoundingBox<T>) -> Vec<T> {
    let r = bbox.inradius();
    DEFAULT_RUNGS.iter().map(|&f| r * T::lit(f)).collect()
}

/// Sampled recession cone of a point cloud.
pub fn recession_directions<T: Scalar>(
    cloud: &PointCloud<T>,
    ladder: &[T],
    angular_tol_deg: f64,
    grid: Arc<DirectionGrid<T>>,
) -> Result<DirectionSet<T>> {
    if ladder.windows(2).any(|w| w[1] <= w[0]) || ladder.is_empty() {
        return Err(Error::Precondition("radius ladder must be non-empty and increasing".into()));
    }
    let top = *ladder.last().expect("non-empty");
    let inradius = cloud.bbox.inradius();
    if top > inradius {
        return Err(Error::BoxTooSmall { inradius: inradius.to_f64_lossy(), rung: top.to_f64_lossy() });
    }
    if grid.dim != cloud.dim {
        return Err(Error::Dimension { expected: cloud.dim, got: grid.dim });
    }
    let Some(anchor) = cloud.anchor() else {
        return Ok(DirectionSet { grid, members: BTreeSet::new(), exact: false });
    };
    let cos_tol = T::lit(angular_tol_deg.to_radians().cos());
    let rel: Vec<(Vec<T>, T, T)> = cloud
        .points
        .iter()
        .map(|p| {
            let v: Vec<T> = p.iter().zip(anchor).map(|(&a, &b)| a - b).collect();
            let len = norm(&v);
            (v, len, norm(p))
        })
        .collect();
    // Descending rungs: a direction failing a larger rung is dropped, and
    // points far enough for a larger rung also serve the smaller ones.
    let mut rungs: Vec<T> = ladder.to_vec();
    rungs.reverse();
    let members: BTreeSet<usize> = (0..grid.dirs.len())
        .into_par_iter()
        .filter(|&i| {
            let d = &grid.dirs[i];
            rungs.iter().all(|&r| rel.iter().any(|(v, len, n)| *n >= r && *len > T::zero() && dot(v, d) >= cos_tol * *len))
        })
        .collect();
    Ok(DirectionSet { grid, members, exact: false })
}

/// Exact recession cone of an analytic set, restricted to the grid.
pub fn recession_directions_analytic<T: Scalar>(set: &SetSpec<T>, grid: Arc<DirectionGrid<T>>) -> Result<DirectionSet<T>> {
    if grid.dim != set.dim() {
        return Err(Error::Dimension { expected: set.dim(), got: grid.dim });
    }
    let tol = T::lit(1e-12);
    let members = (0..grid.dirs.len()).filter(|&i| set.recession_contains(&grid.dirs[i], tol)).collect();
    Ok(DirectionSet { grid, members, exact: true })
}

/// `γ` tabulated on the lattice of a joint box `(x, x*)`.
#[derive(Debug, Clone)]
pub struct GammaTable<T> {
    pub bbox: BoundingBox<T>,
    pub per_dim: usize,
    pub n: usize,
    pub xs: Vec<Vec<T>>,
    pub ss: Vec<Vec<T>>,
    pub f_vals: Vec<ExtReal<T>>,
    pub fg_vals: Vec<ExtReal<T>>,
}

impl<T: Scalar> GammaTable<T> {
    pub fn new(gamma: &GammaFn<T>, bbox: &BoundingBox<T>, per_dim: usize) -> Result<Self> {
        let n = gamma.n();
        if bbox.dim() != n + gamma.m() {
            return Err(Error::Dimension { expected: n + gamma.m(), got: bbox.dim() });
        }
        let cap = gamma.xgrid.limits.point_cap;
        let count = per_dim.checked_pow(bbox.dim() as u32).unwrap_or(usize::MAX);
        if count > cap {
            return Err(Error::GridCap { points: count, cap });
        }
        let (xbox, sbox) = split_box(bbox, n);
        let xs = lattice(&xbox, per_dim);
        let ss = lattice(&sbox, per_dim);
        let f_vals = xs.par_iter().map(|x| gamma.f.eval(x)).collect::<Result<_>>()?;
        let fg_vals = ss.par_iter().map(|s| gamma.fg_at(s)).collect::<Result<_>>()?;
        Ok(Self { bbox: bbox.clone(), per_dim, n, xs, ss, f_vals, fg_vals })
    }

    fn value(&self, i: usize, j: usize) -> ExtReal<T> {
        self.f_vals[i].add_upper(self.fg_vals[j])
    }

    /// Smallest tabulated value.
    pub fn min(&self) -> ExtReal<T> {
        let fmin = self.f_vals.iter().copied().min().unwrap_or(ExtReal::PosInf);
        let gmin = self.fg_vals.iter().copied().min().unwrap_or(ExtReal::PosInf);
        fmin.add_upper(gmin)
    }

    /// Lattice points with `γ ≤ bound` (lexicographic order, `x` first).
    pub fn filter(&self, bound: ExtReal<T>, predicate: String) -> PointCloud<T> {
        let mut points = Vec::new();
        for (i, x) in self.xs.iter().enumerate() {
            if self.f_vals[i] > bound {
                continue;
            }
            for (j, s) in self.ss.iter().enumerate() {
                if self.value(i, j) <= bound {
                    points.push(x.iter().chain(s).copied().collect());
                }
            }
        }
        PointCloud { dim: self.bbox.dim(), points, bbox: self.bbox.clone(), predicate }
    }

    /// `S_λ` with slack `tol`.
    pub fn level_set(&self, lambda: ExtReal<T>, tol: T) -> PointCloud<T> {
        self.filter(lambda.add_upper(ExtReal::finite(tol)), format!("gamma <= {lambda} + {tol}"))
    }
}

/// Default slack for level-set membership.
pub const DEFAULT_LEVEL_TOL: f64 = 1e-6;

/// Lattice points `(x, x*)` of `bbox` with `γ ≤ λ + 10⁻⁶`.
pub fn level_set_sample<T: Scalar>(gamma: &GammaFn<T>, lambda: ExtReal<T>, bbox: &BoundingBox<T>, per_dim: usize) -> Result<PointCloud<T>> {
    Ok(GammaTable::new(gamma, bbox, per_dim)?.level_set(lambda, T::lit(DEFAULT_LEVEL_TOL)))
}

/// Sampled zero set of `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet<T> {
    pub cloud: PointCloud<T>,
    pub min_gamma: ExtReal<T>,
    pub min_gamma_doubled: ExtReal<T>,
    /// The minimum keeps halving under box doubling: the infimum is only
    /// approached at infinity and the near-zero points are discarded.
    pub approached_at_infinity: bool,
}

/// Box with twice the extent on the superset lattice (same spacing).
fn doubled_lattice<T: Scalar>(bbox: &BoundingBox<T>, per_dim: usize) -> (BoundingBox<T>, usize) {
    let wide = bbox.doubled();
    // Same spacing when the box is centered.
    (wide, 2 * (per_dim - 1) + 1)
}

fn zero_set_from<T: Scalar>(table: &GammaTable<T>, wide: &GammaTable<T>, tol: T) -> ZeroSet<T> {
    let min_gamma = table.min();
    let min_gamma_doubled = wide.min();
    let approached = match (min_gamma, min_gamma_doubled) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => a > T::zero() && b <= a * T::lit(0.5),
        _ => false,
    };
    let cloud = if approached {
        PointCloud { dim: table.bbox.dim(), points: Vec::new(), bbox: table.bbox.clone(), predicate: "gamma = 0 (not attained)".into() }
    } else {
        table.filter(ExtReal::finite(tol), format!("gamma <= {tol}"))
    };
    ZeroSet { cloud, min_gamma, min_gamma_doubled, approached_at_infinity: approached }
}

/// `m(γ)` on the lattice: points with `γ ≤ tol`, unless the infimum of `γ`
/// is only approached under box doubling.
pub fn zero_set<T: Scalar>(gamma: &GammaFn<T>, bbox: &BoundingBox<T>, per_dim: usize, tol: T) -> Result<ZeroSet<T>> {
    let table = GammaTable::new(gamma, bbox, per_dim)?;
    let (wb, wp) = doubled_lattice(bbox, per_dim);
    let wide = GammaTable::new(gamma, &wb, wp)?;
    Ok(zero_set_from(&table, &wide, tol))
}

/// Knobs for [`r_gamma`] and [`compactness_verdict`].
#[derive(Debug, Clone, PartialEq)]
pub struct RecessionOptions {
    pub rung_fractions: Vec<f64>,
    pub angular_tol_deg: f64,
    pub resolution_deg: f64,
    /// Ladder `λ_k = 2^{-k}` for `k = 0..=lc_levels`.
    pub lc_levels: u32,
    /// Definitional route: sample `(x, x*)` on a lattice of this many points
    /// per dimension over the box scaled by `inner_fraction`.
    pub inner_points: usize,
    pub inner_fraction: f64,
    pub tol: f64,
}

impl Default for RecessionOptions {
    fn default() -> Self {
        Self {
            rung_fractions: DEFAULT_RUNGS.to_vec(),
            angular_tol_deg: DEFAULT_ANGULAR_TOL_DEG,
            resolution_deg: DEFAULT_RESOLUTION_DEG,
            lc_levels: 10,
            inner_points: 5,
            inner_fraction: 0.05,
            tol: 1e-6,
        }
    }
}

impl RecessionOptions {
    fn ladder<T: Scalar>(&self, bbox: &BoundingBox<T>) -> Vec<T> {
        let r = bbox.inradius();
        self.rung_fractions.iter().map(|&f| r * T::lit(f)).collect()
    }
}

/// Both routes to `R(γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RGamma<T> {
    /// Intersection of `S_{γ(x,x*)}^∞` over sampled `(x, x*) ∈ ℝⁿ × C`.
    pub definitional: DirectionSet<T>,
    pub levels_sampled: Vec<ExtReal<T>>,
    /// Intersection of `S_{2^{-k}}^∞`.
    pub ladder: DirectionSet<T>,
    pub zero_set_nonempty: bool,
    /// Definitional route when `m(γ) ≠ ∅`, ladder route otherwise.
    pub value: DirectionSet<T>,
    /// The routes coincide up to the angular tolerance.
    pub routes_agree: bool,
}

fn r_gamma_on<T: Scalar>(
    gamma: &GammaFn<T>,
    table: &GammaTable<T>,
    zero_nonempty: bool,
    opts: &RecessionOptions,
    grid: Arc<DirectionGrid<T>>,
) -> Result<RGamma<T>> {
    let tol = T::lit(opts.tol);
    let ladder = opts.ladder(&table.bbox);
    let rec = |lambda: ExtReal<T>| recession_directions(&table.level_set(lambda, tol), &ladder, opts.angular_tol_deg, grid.clone());

    let scaled = BoundingBox::new(
        table.bbox.lo().iter().map(|&v| v * T::lit(opts.inner_fraction)).collect(),
        table.bbox.hi().iter().map(|&v| v * T::lit(opts.inner_fraction)).collect(),
    )?;
    let n = gamma.n();
    let mut levels: Vec<ExtReal<T>> = Vec::new();
    for p in lattice(&scaled, opts.inner_points) {
        let (x, s) = p.split_at(n);
        if !gamma.g.c.contains(s) {
            continue;
        }
        let v = gamma.eval(x, s)?;
        if v.is_finite() && !levels.contains(&v) {
            levels.push(v);
        }
    }
    levels.sort();
    let full = DirectionSet { grid: grid.clone(), members: (0..grid.dirs.len()).collect(), exact: false };
    let mut definitional = full.clone();
    for &lambda in &levels {
        definitional = definitional.intersect(&rec(lambda)?);
    }
    let mut lc = full;
    for k in 0..=opts.lc_levels {
        lc = lc.intersect(&rec(ExtReal::finite(T::lit(0.5f64.powi(k as i32))))?);
    }
    let value = if zero_nonempty { definitional.clone() } else { lc.clone() };
    Ok(RGamma {
        routes_agree: definitional.approx_eq(&lc, opts.angular_tol_deg),
        definitional,
        levels_sampled: levels,
        ladder: lc,
        zero_set_nonempty: zero_nonempty,
        value,
    })
}

/// `R(γ)` by the definitional intersection and by the `2^{-k}` ladder.
pub fn r_gamma<T: Scalar>(gamma: &GammaFn<T>, bbox: &BoundingBox<T>, per_dim: usize, opts: &RecessionOptions) -> Result<RGamma<T>> {
    let table = GammaTable::new(gamma, bbox, per_dim)?;
    let (wb, wp) = doubled_lattice(bbox, per_dim);
    let wide = GammaTable::new(gamma, &wb, wp)?;
    let zs = zero_set_from(&table, &wide, T::lit(opts.tol));
    let grid = Arc::new(DirectionGrid::new(bbox.dim(), opts.resolution_deg)?);
    r_gamma_on(gamma, &table, !zs.cloud.is_empty(), opts, grid)
}

/// Outcome of [`compactness_verdict`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessReport<T> {
    pub r: RGamma<T>,
    pub r_is_zero: bool,
    pub zero_set: ZeroSet<T>,
    pub m_nonempty: bool,
    /// No zero of norm beyond the current maximum appears after doubling.
    pub m_bounded: bool,
    pub m_compact: bool,
    /// `R(γ) = {0} ⟺ m(γ)` non-empty and compact.
    pub theorem_holds: bool,
    /// `(m(γ))^∞ ⊆ R(γ)`.
    pub lemma_l1: bool,
    /// `m(γ) = ∅ ⟺ (m(γ))^∞ ≠ R(γ)`.
    pub lemma_lpt: bool,
    /// `S_1` bounded and `γ` l.s.c. (declared) implies `m(γ) ≠ ∅`.
    pub s1_bounded: bool,
    pub prop_level_bounded: bool,
}

impl<T> CompactnessReport<T> {
    pub fn passed(&self) -> bool {
        self.theorem_holds && self.lemma_l1 && self.lemma_lpt && self.prop_level_bounded && self.r.routes_agree
    }
}

fn bounded_under_doubling<T: Scalar>(small: &PointCloud<T>, wide: &PointCloud<T>, spacing: T) -> bool {
    wide.max_norm() <= small.max_norm() + spacing * T::lit(1e-6)
}

/// Evaluates both sides of the compactness theorem together with the
/// supporting lemmas on the same sampled data.
pub fn compactness_verdict<T: Scalar>(
    gamma: &GammaFn<T>,
    bbox: &BoundingBox<T>,
    per_dim: usize,
    opts: &RecessionOptions,
) -> Result<CompactnessReport<T>> {
    let tol = T::lit(opts.tol);
    let table = GammaTable::new(gamma, bbox, per_dim)?;
    let (wb, wp) = doubled_lattice(bbox, per_dim);
    let wide = GammaTable::new(gamma, &wb, wp)?;
    let zero_set = zero_set_from(&table, &wide, tol);
    let zero_wide = zero_set_from(&wide, &wide, tol);
    let grid = Arc::new(DirectionGrid::new(bbox.dim(), opts.resolution_deg)?);
    let r = r_gamma_on(gamma, &table, !zero_set.cloud.is_empty(), opts, grid.clone())?;

    let spacing = bbox.hi().iter().zip(bbox.lo()).map(|(&h, &l)| h - l).fold(T::zero(), T::max)
        / T::from_usize_lossy(per_dim.max(2) - 1);
    let m_nonempty = !zero_set.cloud.is_empty();
    let m_bounded = bounded_under_doubling(&zero_set.cloud, &zero_wide.cloud, spacing);
    let m_compact = m_nonempty && m_bounded;
    let r_is_zero = r.value.is_zero();

    let m_rec = recession_directions(&zero_set.cloud, &opts.ladder(bbox), opts.angular_tol_deg, grid)?;
    let lemma_l1 = m_rec.approx_subset(&r.value, opts.angular_tol_deg);
    let lemma_lpt = (!m_nonempty) == !m_rec.approx_eq(&r.value, opts.angular_tol_deg);

    let one = ExtReal::finite(T::one());
    let s1 = table.level_set(one, tol);
    let s1_wide = wide.level_set(one, tol);
    let s1_bounded = bounded_under_doubling(&s1, &s1_wide, spacing);

    Ok(CompactnessReport {
        r_is_zero,
        theorem_holds: r_is_zero == m_compact,
        m_nonempty,
        m_bounded,
        m_compact,
        lemma_l1,
        lemma_lpt,
        s1_bounded,
        prop_level_bounded: !s1_bounded || m_nonempty,
        zero_set,
        r,
    })
}

/// `⋂_{ε>0} S_g(ε)` on a grid over `ℝⁿ × C`, with `ε` running over
/// `2^{-k}`, `k = 0..=levels`: whether every sampled `ε`-level set is
/// non-empty and the smallest one is, i.e. the intersection is non-empty.
pub fn level_intersection_nonempty<T: Scalar, F>(g: F, points: &[Vec<T>], levels: u32, tol: T) -> Result<bool>
where
    F: Fn(&[T]) -> Result<ExtReal<T>> + Sync,
{
    let vals: Vec<ExtReal<T>> = points.par_iter().map(|p| g(p)).collect::<Result<_>>()?;
    let min = vals.iter().copied().min().unwrap_or(ExtReal::PosInf);
    let smallest = T::lit(0.5f64.powi(levels as i32)).min(tol);
    Ok(min <= ExtReal::finite(smallest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2() -> Arc<DirectionGrid<f64>> {
        Arc::new(DirectionGrid::new(2, 1.0).unwrap())
    }

    fn angle_of(d: &[f64]) -> f64 {
        d[1].atan2(d[0]).to_degrees().rem_euclid(360.0)
    }

    #[test]
    fn direction_grids_are_unit() {
        for dim in 1..=4 {
            let g = DirectionGrid::<f64>::new(dim, 10.0).unwrap();
            assert!(!g.dirs.is_empty());
            for d in &g.dirs {
                assert!((norm(d) - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(DirectionGrid::<f64>::new(2, 1.0).unwrap().dirs.len(), 360);
    }

    #[test]
    fn analytic_cones() {
        let g = grid2();
        let bounded = SetSpec::Box(BoundingBox::centered(2, 3.0).unwrap());
        assert!(recession_directions_analytic(&bounded, g.clone()).unwrap().is_zero());
        let quad = SetSpec::halfspaces(2, vec![(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)]).unwrap();
        let rec = recession_directions_analytic(&quad, g.clone()).unwrap();
        assert_eq!(rec.len(), 91);
        assert!(rec.directions().iter().all(|d| d[0] <= 1e-12 && d[1] <= 1e-12));
    }

    #[test]
    fn sampled_quadrant_cloud() {
        let bbox = BoundingBox::centered(2, 20.0).unwrap();
        let points: Vec<Vec<f64>> = lattice(&bbox, 81).into_iter().filter(|p| p[0] <= -1.0 && p[1] <= 0.0).collect();
        let cloud = PointCloud { dim: 2, points, bbox: bbox.clone(), predicate: "quadrant".into() };
        let rec = recession_directions(&cloud, &default_ladder(&bbox), 5.0, grid2()).unwrap();
        for d in rec.directions() {
            let a = angle_of(&d);
            assert!((174.999..=275.001).contains(&a), "{a}");
        }
        for a in [180usize, 200, 225, 250, 270] {
            assert!(rec.members.contains(&a), "{a}");
        }
    }

    #[test]
    fn bounded_cloud_and_empty_cloud_give_zero() {
        let bbox = BoundingBox::centered(2, 20.0).unwrap();
        let small: Vec<Vec<f64>> = lattice(&bbox, 81).into_iter().filter(|p| norm(p) <= 1.5).collect();
        let cloud = PointCloud { dim: 2, points: small, bbox: bbox.clone(), predicate: "disc".into() };
        assert!(recession_directions(&cloud, &default_ladder(&bbox), 5.0, grid2()).unwrap().is_zero());
        let empty = PointCloud { dim: 2, points: vec![], bbox: bbox.clone(), predicate: "none".into() };
        assert!(recession_directions(&empty, &default_ladder(&bbox), 5.0, grid2()).unwrap().is_zero());
    }

    #[test]
    fn ladder_too_big_for_box() {
        let bbox = BoundingBox::centered(2, 1.0).unwrap();
        let cloud = PointCloud { dim: 2, points: vec![vec![0.0, 0.0]], bbox, predicate: String::new() };
        assert!(matches!(
            recession_directions(&cloud, &[0.5, 2.0], 5.0, grid2()),
            Err(Error::BoxTooSmall { .. })
        ));
    }

    #[test]
    fn translation_invariance() {
        let bbox = BoundingBox::centered(2, 20.0).unwrap();
        let pts = |shift: f64| -> Vec<Vec<f64>> {
            lattice(&bbox, 81).into_iter().filter(|p| p[0] <= shift && p[1] <= 0.0).collect()
        };
        let a = PointCloud { dim: 2, points: pts(0.0), bbox: bbox.clone(), predicate: String::new() };
        let b = PointCloud { dim: 2, points: pts(-3.0), bbox: bbox.clone(), predicate: String::new() };
        let ra = recession_directions(&a, &default_ladder(&bbox), 5.0, grid2()).unwrap();
        let rb = recession_directions(&b, &default_ladder(&bbox), 5.0, grid2()).unwrap();
        assert_eq!(ra.members, rb.members);
    }
}
