//! Resolved numeric settings: defaults, then the problem file, then command
//! line flags; the caps also read `GCOUPLING_POINT_CAP` and
//! `GCOUPLING_DIVERGENCE_CAP`.

use gcoupling::grid::{DEFAULT_DOUBLINGS, DEFAULT_POINTS, DEFAULT_ROUNDS};
use gcoupling::{BoundingBox, GridSpec, Limits, SetSpec};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::report::Value;

pub const POINT_CAP_VAR: &str = "GCOUPLING_POINT_CAP";
pub const DIVERGENCE_CAP_VAR: &str = "GCOUPLING_DIVERGENCE_CAP";
/// Half-width of grids a problem file leaves unsized.
pub const DEFAULT_RADIUS: f64 = 20.0;

/// `numeric` section of a problem file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericBlock {
    pub tol: Option<f64>,
    pub radius: Option<f64>,
    pub points_per_dim: Option<usize>,
    pub refinement_rounds: Option<usize>,
    pub seed: Option<u64>,
    pub doublings: Option<usize>,
    pub point_cap: Option<usize>,
    pub divergence_cap: Option<f64>,
}

/// Command line and environment overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub radius: Option<f64>,
    pub points: Option<usize>,
    pub point_cap: Option<usize>,
    pub divergence_cap: Option<f64>,
}

impl Overrides {
    /// Reads the cap variables; unparsable values are reported with the
    /// variable name.
    pub fn with_env(mut self) -> Result<Self> {
        if let Ok(v) = std::env::var(POINT_CAP_VAR) {
            self.point_cap = Some(v.trim().parse().map_err(|e| CliError::schema(POINT_CAP_VAR, e))?);
        }
        if let Ok(v) = std::env::var(DIVERGENCE_CAP_VAR) {
            self.divergence_cap = Some(v.trim().parse().map_err(|e| CliError::schema(DIVERGENCE_CAP_VAR, e))?);
        }
        Ok(self)
    }
}

/// A grid section: either `lo`/`hi` or a centered `radius`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub points: Option<usize>,
    pub rounds: Option<usize>,
    pub doublings: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numeric {
    pub tol: f64,
    pub radius: f64,
    pub points_per_dim: usize,
    pub refinement_rounds: usize,
    pub seed: u64,
    pub doublings: usize,
    pub point_cap: usize,
    pub divergence_cap: f64,
}

impl Default for Numeric {
    fn default() -> Self {
        let limits = Limits::<f64>::default();
        Self {
            tol: 1e-6,
            radius: DEFAULT_RADIUS,
            points_per_dim: DEFAULT_POINTS,
            refinement_rounds: DEFAULT_ROUNDS,
            seed: 0,
            doublings: DEFAULT_DOUBLINGS,
            point_cap: limits.point_cap,
            divergence_cap: limits.divergence_cap,
        }
    }
}

impl Numeric {
    pub fn resolve(file: &NumericBlock, o: &Overrides) -> Result<Self> {
        let d = Numeric::default();
        let n = Numeric {
            tol: o.tol.or(file.tol).unwrap_or(d.tol),
            radius: o.radius.or(file.radius).unwrap_or(d.radius),
            points_per_dim: o.points.or(file.points_per_dim).unwrap_or(d.points_per_dim),
            refinement_rounds: file.refinement_rounds.unwrap_or(d.refinement_rounds),
            seed: file.seed.unwrap_or(d.seed),
            doublings: file.doublings.unwrap_or(d.doublings),
            point_cap: o.point_cap.or(file.point_cap).unwrap_or(d.point_cap),
            divergence_cap: o.divergence_cap.or(file.divergence_cap).unwrap_or(d.divergence_cap),
        };
        if !(n.tol.is_finite() && n.tol > 0.0) {
            return Err(CliError::schema("numeric.tol", "must be positive and finite"));
        }
        if !(n.radius.is_finite() && n.radius > 0.0) {
            return Err(CliError::schema("numeric.radius", "must be positive and finite"));
        }
        if n.points_per_dim < 2 {
            return Err(CliError::schema("numeric.points_per_dim", "must be at least 2"));
        }
        if !(n.divergence_cap.is_finite() && n.divergence_cap > 0.0) {
            return Err(CliError::schema("numeric.divergence_cap", "must be positive and finite"));
        }
        Ok(n)
    }

    pub fn limits(&self) -> Limits<f64> {
        Limits { point_cap: self.point_cap, divergence_cap: self.divergence_cap }
    }

    /// Applies the resolved schedule and caps to a lattice over `bbox`.
    pub fn grid(&self, bbox: BoundingBox<f64>, points: usize) -> Result<GridSpec<f64>> {
        Ok(GridSpec::new(bbox, points)?
            .with_rounds(self.refinement_rounds)
            .with_doublings(self.doublings)
            .with_limits(self.limits()))
    }

    /// Grid from an optional block. Without `lo`/`hi` the box is the grid box
    /// of `within` (or the centered cube) at the block's or the default
    /// radius.
    pub fn grid_from(
        &self,
        block: Option<&GridBlock>,
        dim: usize,
        within: Option<&SetSpec<f64>>,
        default_points: Option<usize>,
        path: &str,
    ) -> Result<GridSpec<f64>> {
        let empty = GridBlock::default();
        let b = block.unwrap_or(&empty);
        let points = b.points.or(default_points).unwrap_or(self.points_per_dim);
        let bbox = match (&b.lo, &b.hi) {
            (Some(lo), Some(hi)) => {
                if b.radius.is_some() {
                    return Err(CliError::schema(path, "give either lo/hi or radius, not both"));
                }
                for (key, v) in [("lo", lo), ("hi", hi)] {
                    if v.len() != dim {
                        return Err(CliError::schema(
                            format!("{path}.{key}"),
                            format!("expected {dim} coordinates, got {}", v.len()),
                        ));
                    }
                }
                BoundingBox::new(lo.clone(), hi.clone()).map_err(|e| CliError::schema(path, e))?
            }
            (None, None) => {
                let r = b.radius.unwrap_or(self.radius);
                if !(r.is_finite() && r > 0.0) {
                    return Err(CliError::schema(format!("{path}.radius"), "must be positive and finite"));
                }
                match within {
                    Some(set) => set.grid_box(r),
                    None => BoundingBox::centered(dim, r).map_err(|e| CliError::schema(path, e))?,
                }
            }
            _ => return Err(CliError::schema(path, "lo and hi must be given together")),
        };
        let mut g = self.grid(bbox, points).map_err(|e| match e {
            CliError::Core(inner) => CliError::schema(format!("{path}.points"), inner),
            other => other,
        })?;
        if let Some(r) = b.rounds {
            g = g.with_rounds(r);
        }
        if let Some(d) = b.doublings {
            g = g.with_doublings(d);
        }
        Ok(g)
    }

    pub fn to_value(&self) -> Value {
        Value::map()
            .with("tol", self.tol)
            .with("radius", self.radius)
            .with("points_per_dim", self.points_per_dim)
            .with("refinement_rounds", self.refinement_rounds)
            .with("seed", self.seed)
            .with("doublings", self.doublings)
            .with("point_cap", self.point_cap)
            .with("divergence_cap", self.divergence_cap)
    }
}

pub fn grid_value(g: &GridSpec<f64>) -> Value {
    Value::map()
        .with("lo", Value::point(g.bbox.lo()))
        .with("hi", Value::point(g.bbox.hi()))
        .with("points_per_dim", g.points_per_dim)
        .with("refinement_rounds", g.refinement_rounds)
        .with("doublings", g.doublings)
}
