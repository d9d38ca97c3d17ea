//! Structured closed convex sets: boxes, orthants, the whole space,
//! polyhedra given by halfspaces, and dual cones of any of these.
//!
//! Membership, the support infimum `i_K(x*) = inf_{x∈K} ⟨x*, x⟩`, dual cones
//! and recession cones are computed in closed form wherever the geometry
//! allows it.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::BoundingBox;
use crate::linalg::{least_norm, solve, subsets_by_size};
use crate::scalar::{dot, norm, Scalar};

/// `⟨normal, x⟩ ≥ offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec<T> {
    Box(BoundingBox<T>),
    /// `ℝⁿ₊`.
    Orthant(usize),
    /// `ℝⁿ`.
    Full(usize),
    /// Intersection of halfspaces in `ℝ^dim`.
    Halfspaces { dim: usize, constraints: Vec<Halfspace<T>> },
    /// `K⁺ = {x* : ⟨x*, x⟩ ≥ 0 for all x ∈ K}`.
    DualCone(Box<SetSpec<T>>),
}

fn default_tol<T: Scalar>() -> T {
    T::lit(1e-12)
}

impl<T: Scalar> SetSpec<T> {
    pub fn halfspaces(dim: usize, constraints: Vec<(Vec<T>, T)>) -> Result<Self> {
        let set = SetSpec::Halfspaces {
            dim,
            constraints: constraints.into_iter().map(|(normal, offset)| Halfspace { normal, offset }).collect(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn dual_cone_of(inner: SetSpec<T>) -> Self {
        SetSpec::DualCone(Box::new(inner))
    }

    /// The singleton `{0}` in `ℝⁿ`.
    pub fn origin(dim: usize) -> Self {
        SetSpec::Box(BoundingBox::centered(dim, T::zero()).expect("dimension ≥ 1"))
    }

    pub fn dim(&self) -> usize {
        match self {
            SetSpec::Box(b) => b.dim(),
            SetSpec::Orthant(n) | SetSpec::Full(n) => *n,
            SetSpec::Halfspaces { dim, .. } => *dim,
            SetSpec::DualCone(k) => k.dim(),
        }
    }

    /// Checks dimensions and non-emptiness.
    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::InvalidSet("dimension must be at least 1".into()));
        }
        match self {
            SetSpec::Halfspaces { dim, constraints } => {
                for h in constraints {
                    if h.normal.len() != *dim {
                        return Err(Error::Dimension { expected: *dim, got: h.normal.len() });
                    }
                }
                if self.feasible_point().is_none() {
                    return Err(Error::InvalidSet("halfspace system is empty".into()));
                }
                Ok(())
            }
            SetSpec::DualCone(k) => k.validate(),
            _ => Ok(()),
        }
    }

    /// Minimum-norm point of a halfspace system, found by enumerating the
    /// active sets that can carry the projection of the origin.
    fn feasible_point(&self) -> Option<Vec<T>> {
        let SetSpec::Halfspaces { dim, constraints } = self else {
            return Some(vec![T::zero(); self.dim()]);
        };
        let tol = T::lit(1e-9);
        let zero = vec![T::zero(); *dim];
        if self.contains_tol(&zero, tol) {
            return Some(zero);
        }
        for subset in subsets_by_size(constraints.len(), *dim).into_iter().skip(1) {
            let rows: Vec<Vec<f64>> = subset
                .iter()
                .map(|&j| constraints[j].normal.iter().map(|v| v.to_f64_lossy()).collect())
                .collect();
            let rhs: Vec<f64> = subset.iter().map(|&j| constraints[j].offset.to_f64_lossy()).collect();
            if let Some(x) = least_norm(&rows, &rhs) {
                let x: Vec<T> = x.into_iter().map(T::lit).collect();
                if self.contains_tol(&x, tol) {
                    return Some(x);
                }
            }
        }
        None
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.contains_tol(x, T::zero())
    }

    /// Membership with slack `tol` on every defining inequality.
    pub fn contains_tol(&self, x: &[T], tol: T) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            SetSpec::Box(b) => x
                .iter()
                .zip(b.lo().iter().zip(b.hi()))
                .all(|(&v, (&l, &h))| l - tol <= v && v <= h + tol),
            SetSpec::Orthant(_) => x.iter().all(|&v| v >= -tol),
            SetSpec::Full(_) => true,
            SetSpec::Halfspaces { constraints, .. } => {
                constraints.iter().all(|h| dot(&h.normal, x) >= h.offset - tol)
            }
            SetSpec::DualCone(k) => match k.support_inf(x) {
                Some(ExtReal::Finite(v)) => v >= -tol,
                Some(ExtReal::PosInf) => true,
                Some(ExtReal::NegInf) => false,
                None => false,
            },
        }
    }

    /// True for closed convex cones.
    pub fn is_cone(&self) -> bool {
        match self {
            SetSpec::Box(b) => b.lo().iter().chain(b.hi()).all(|v| v.is_zero()),
            SetSpec::Orthant(_) | SetSpec::Full(_) | SetSpec::DualCone(_) => true,
            SetSpec::Halfspaces { constraints, .. } => constraints.iter().all(|h| h.offset.is_zero()),
        }
    }

    /// `i_K(x*) = inf_{x∈K} ⟨x*, x⟩` in closed form; `None` when no closed
    /// form is available for this kind.
    pub fn support_inf(&self, xstar: &[T]) -> Option<ExtReal<T>> {
        let tol = default_tol::<T>();
        match self {
            SetSpec::Box(b) => Some(ExtReal::finite(
                xstar
                    .iter()
                    .zip(b.lo().iter().zip(b.hi()))
                    .fold(T::zero(), |s, (&c, (&l, &h))| s + (c * l).min(c * h)),
            )),
            SetSpec::Orthant(_) => Some(if xstar.iter().all(|&c| c >= T::zero()) {
                ExtReal::zero()
            } else {
                ExtReal::NegInf
            }),
            SetSpec::Full(_) => Some(if xstar.iter().all(|c| c.is_zero()) {
                ExtReal::zero()
            } else {
                ExtReal::NegInf
            }),
            SetSpec::Halfspaces { dim, constraints } => {
                let normals: Vec<Vec<T>> = constraints.iter().map(|h| h.normal.clone()).collect();
                if !in_conic_hull(&normals, xstar, tol) {
                    return Some(ExtReal::NegInf);
                }
                if self.is_cone() {
                    return Some(ExtReal::zero());
                }
                let vertices = polyhedron_vertices(*dim, constraints);
                vertices
                    .iter()
                    .map(|v| dot(xstar, v))
                    .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))))
                    .map(ExtReal::finite)
            }
            SetSpec::DualCone(k) => {
                // K⁺ is a cone, so its support infimum is 0 on K⁺⁺ and −∞ off it.
                if k.is_cone() {
                    Some(if k.contains_tol(xstar, tol) { ExtReal::zero() } else { ExtReal::NegInf })
                } else {
                    None
                }
            }
        }
    }

    /// Closed-form simplification of `K⁺` where one exists.
    pub fn dual_cone(&self) -> SetSpec<T> {
        match self {
            SetSpec::Orthant(n) => SetSpec::Orthant(*n),
            SetSpec::Full(n) => SetSpec::origin(*n),
            SetSpec::Box(b) if b.lo().iter().chain(b.hi()).all(|v| v.is_zero()) => SetSpec::Full(b.dim()),
            SetSpec::Box(b) if b.lo().iter().all(|&l| l >= T::zero()) && b.hi().iter().all(|&h| h > T::zero()) => {
                SetSpec::Orthant(b.dim())
            }
            SetSpec::DualCone(k) if k.is_cone() => (**k).clone(),
            other => SetSpec::DualCone(Box::new(other.clone())),
        }
    }

    /// `K* = {x* : i_K(x*) > −∞}`, the effective domain of the support infimum.
    pub fn support_domain(&self) -> SetSpec<T> {
        match self {
            SetSpec::Box(_) => SetSpec::Full(self.dim()),
            SetSpec::Halfspaces { dim, constraints } if !self.is_cone() => SetSpec::Halfspaces {
                dim: *dim,
                constraints: constraints
                    .iter()
                    .map(|h| Halfspace { normal: h.normal.clone(), offset: T::zero() })
                    .collect(),
            }
            .dual_cone(),
            cone => cone.dual_cone(),
        }
    }

    /// Closed-form recession cone membership `d ∈ K^∞`.
    pub fn recession_contains(&self, d: &[T], tol: T) -> bool {
        match self {
            SetSpec::Box(_) => d.iter().all(|v| v.abs() <= tol),
            SetSpec::Orthant(_) => d.iter().all(|&v| v >= -tol),
            SetSpec::Full(_) => true,
            SetSpec::Halfspaces { constraints, .. } => constraints.iter().all(|h| dot(&h.normal, d) >= -tol),
            SetSpec::DualCone(_) => self.contains_tol(d, tol),
        }
    }

    /// Box used to lay sampling grids over `K ∩ [-radius, radius]ⁿ`.
    pub fn grid_box(&self, radius: T) -> BoundingBox<T> {
        let n = self.dim();
        match self {
            SetSpec::Box(b) => b.clone(),
            SetSpec::Orthant(_) => BoundingBox::new(vec![T::zero(); n], vec![radius; n]).expect("radius ≥ 0"),
            SetSpec::DualCone(_) => match self.dual_cone_simplified() {
                Some(s) => s.grid_box(radius),
                None => BoundingBox::centered(n, radius).expect("radius ≥ 0"),
            },
            _ => BoundingBox::centered(n, radius).expect("radius ≥ 0"),
        }
    }

    fn dual_cone_simplified(&self) -> Option<SetSpec<T>> {
        match self {
            SetSpec::DualCone(k) => match k.dual_cone() {
                SetSpec::DualCone(_) => None,
                s => Some(s),
            },
            _ => None,
        }
    }
}

/// Whether `x ∈ cone(generators)`, by Carathéodory enumeration of generator
/// subsets of size at most the dimension.
pub fn in_conic_hull<T: Scalar>(generators: &[Vec<T>], x: &[T], tol: T) -> bool {
    let scale = norm(x).max(T::one());
    if norm(x) <= tol {
        return true;
    }
    let dim = x.len();
    for subset in subsets_by_size(generators.len(), dim).into_iter().skip(1) {
        let rows: Vec<Vec<f64>> = subset
            .iter()
            .map(|&j| generators[j].iter().map(|v| v.to_f64_lossy()).collect())
            .collect();
        let k = rows.len();
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let rhs: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b.to_f64_lossy()).sum())
            .collect();
        let Some(coef) = solve(gram, rhs) else { continue };
        if coef.iter().any(|&c| c < -tol.to_f64_lossy()) {
            continue;
        }
        let residual: f64 = (0..dim)
            .map(|t| {
                let r = (0..k).map(|i| coef[i] * rows[i][t]).sum::<f64>() - x[t].to_f64_lossy();
                r * r
            })
            .sum::<f64>()
            .sqrt();
        if residual <= (tol * scale).to_f64_lossy().max(1e-12) {
            return true;
        }
    }
    false
}

/// Vertices of a pointed polyhedron `{x : ⟨a_j, x⟩ ≥ b_j}`.
fn polyhedron_vertices<T: Scalar>(dim: usize, constraints: &[Halfspace<T>]) -> Vec<Vec<T>> {
    let tol = T::lit(1e-9);
    let mut out: Vec<Vec<T>> = Vec::new();
    for subset in subsets_by_size(constraints.len(), dim) {
        if subset.len() != dim {
            continue;
        }
        let a: Vec<Vec<f64>> = subset
            .iter()
            .map(|&j| constraints[j].normal.iter().map(|v| v.to_f64_lossy()).collect())
            .collect();
        let b: Vec<f64> = subset.iter().map(|&j| constraints[j].offset.to_f64_lossy()).collect();
        if let Some(v) = solve(a, b) {
            let v: Vec<T> = v.into_iter().map(T::lit).collect();
            if constraints.iter().all(|h| dot(&h.normal, &v) >= h.offset - tol) {
                out.push(v);
            }
        }
    }
    out
}
