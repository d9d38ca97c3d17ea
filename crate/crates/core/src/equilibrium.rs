//! Equilibrium problems: find `x ∈ K` with `f(x, y) ≥ 0` for all `y ∈ K`.
//!
//! Gap functions for equilibrium, variational inequality and mixed
//! variational problems, the zero-duality-gap couplings `cone_inner` and
//! `ik_shifted`, and the dual certificate for solutions.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::conjugate::{g_conjugate, SampledFn};
use crate::coupling::{builtin_coupling, BuiltinParams, ProperFn};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::funcdsl::ExprFn;
use crate::grid::{optimize_over_grid, optimize_over_points, GridSpec, Mode, Status};
use crate::scalar::{dot, Scalar};
use crate::sets::SetSpec;

type Bifunction<T> = Arc<dyn Fn(&[T], &[T]) -> Result<ExtReal<T>> + Send + Sync>;
type VecMap<T> = Arc<dyn Fn(&[T]) -> Result<Vec<T>> + Send + Sync>;
type VecMap2<T> = Arc<dyn Fn(&[T], &[T]) -> Result<Vec<T>> + Send + Sync>;

/// Tolerance on `f(x, x) = 0`.
pub const DIAGONAL_TOL: f64 = 1e-10;

fn coords<T: Scalar>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64_lossy()).collect()
}

/// Equilibrium problem on `K` with bifunction `f(x, y)`.
#[derive(Clone)]
pub struct EPInstance<T> {
    pub k: SetSpec<T>,
    pub name: String,
    f: Bifunction<T>,
}

impl<T: fmt::Debug> fmt::Debug for EPInstance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EPInstance").field("k", &self.k).field("name", &self.name).finish()
    }
}

impl<T: Scalar> EPInstance<T> {
    pub fn new<F>(k: SetSpec<T>, name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&[T], &[T]) -> Result<ExtReal<T>> + Send + Sync + 'static,
    {
        k.validate()?;
        Ok(Self { k, name: name.into(), f: Arc::new(f) })
    }

    /// `expr` over `x1..xn, y1..yn`.
    pub fn from_expr(k: SetSpec<T>, expr: ExprFn) -> Result<Self> {
        let n = k.dim();
        if expr.arity() != 2 * n {
            return Err(Error::Arity { name: "f".into(), expected: 2 * n, got: expr.arity() });
        }
        let name = expr.to_canonical();
        Self::new(k, name, move |x, y| {
            let xy: Vec<T> = x.iter().chain(y).copied().collect();
            expr.eval(&xy)
        })
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> Result<ExtReal<T>> {
        let n = self.dim();
        for v in [x, y] {
            if v.len() != n {
                return Err(Error::Dimension { expected: n, got: v.len() });
            }
        }
        (self.f)(x, y)
    }

    /// `f(x, x) = 0` at every sampled `x ∈ K`.
    pub fn check_diagonal(&self, samples: &[Vec<T>]) -> Result<()> {
        let tol = T::lit(DIAGONAL_TOL);
        for x in samples.iter().filter(|x| self.k.contains(x)) {
            let v = self.eval(x, x)?;
            if v.distance(ExtReal::zero()) > tol {
                return Err(Error::Precondition(format!("f(x, x) = {v} at {:?}", coords(x))));
            }
        }
        Ok(())
    }

    /// Midpoint convexity of `f(x, ·)` on consecutive sample pairs in `K`.
    pub fn convexity_advisory(&self, samples: &[Vec<T>], tol: T) -> Result<bool> {
        let inside: Vec<&Vec<T>> = samples.iter().filter(|x| self.k.contains(x)).collect();
        let half = T::lit(0.5);
        for x in &inside {
            for w in inside.windows(2) {
                let (a, b) = (w[0], w[1]);
                let mid: Vec<T> = a.iter().zip(b).map(|(&p, &q)| half * (p + q)).collect();
                let (fa, fb, fm) = (self.eval(x, a)?, self.eval(x, b)?, self.eval(x, &mid)?);
                if let (Some(fa), Some(fb), Some(fm)) = (fa.as_finite(), fb.as_finite(), fm.as_finite()) {
                    if fm > half * (fa + fb) + tol {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `f̄_x = f(x, ·) + i_K` as a function of `y`.
    pub fn fbar(&self, x: &[T]) -> ProperFn<T> {
        let inst = self.clone();
        let x = x.to_vec();
        ProperFn::new(self.dim(), format!("{} on K", self.name), self.k.clone(), move |y| {
            if inst.k.contains(y) {
                inst.eval(&x, y)
            } else {
                Ok(ExtReal::PosInf)
            }
        })
    }

    /// Default search grid: `K` itself when it is a box, else `K`'s grid box.
    pub fn grid(&self, radius: T, points: usize) -> Result<GridSpec<T>> {
        GridSpec::new(self.k.grid_box(radius), points)
    }
}

/// `inf_{y ∈ K} f(x, y)` on `ygrid`; `−∞` when it diverges (`x ∉ F`).
pub fn ep_residual<T: Scalar>(inst: &EPInstance<T>, x: &[T], ygrid: &GridSpec<T>) -> Result<ExtReal<T>> {
    if !inst.k.contains(x) {
        return Err(Error::Infeasible(coords(x)));
    }
    let fx = inst.fbar(x);
    Ok(optimize_over_grid(|y| fx.eval(y), ygrid, Mode::Inf)?.value)
}

/// `g_f(y) = sup_{x ∈ K} f(x, y)` for `y ∈ K`, `+∞` otherwise.
pub fn ep_gap<T: Scalar>(inst: &EPInstance<T>, y: &[T], xgrid: &GridSpec<T>) -> Result<ExtReal<T>> {
    if !inst.k.contains(y) {
        return Ok(ExtReal::PosInf);
    }
    let r = optimize_over_grid(
        |x| if inst.k.contains(x) { inst.eval(x, y) } else { Ok(ExtReal::NegInf) },
        xgrid,
        Mode::Sup,
    )?;
    Ok(r.value)
}

/// `K`, its dual cone `K⁺` and the effective domain `K*` of `i_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeData<T> {
    pub k: SetSpec<T>,
    pub k_plus: SetSpec<T>,
    pub k_star: SetSpec<T>,
}

impl<T: Scalar> ConeData<T> {
    pub fn new(k: SetSpec<T>) -> Result<Self> {
        k.validate()?;
        Ok(Self { k_plus: k.dual_cone(), k_star: k.support_domain(), k })
    }

    /// `i_K(x*) = inf_{x ∈ K} ⟨x*, x⟩`, in closed form when available and
    /// otherwise over `grid ∩ K`.
    pub fn i_k(&self, xstar: &[T], grid: &GridSpec<T>) -> Result<ExtReal<T>> {
        if let Some(v) = self.k.support_inf(xstar) {
            return Ok(v);
        }
        let r = optimize_over_grid(
            |x| Ok(if self.k.contains(x) { ExtReal::finite(dot(xstar, x)) } else { ExtReal::PosInf }),
            grid,
            Mode::Inf,
        )?;
        if r.status == Status::EmptyDomain {
            return Err(Error::EmptyDomain);
        }
        Ok(r.value)
    }

    /// Grid over `K*`: a centered box when `K* = ℝⁿ`, the orthant box for
    /// orthants, the grid box of `K*` otherwise.
    pub fn k_star_grid(&self, radius: T, points: usize) -> Result<GridSpec<T>> {
        GridSpec::new(self.k_star.grid_box(radius), points)
    }
}

/// `(i_K(x*), x* ∈ K*)`.
pub fn ik_and_kstar<T: Scalar>(k: &SetSpec<T>, xstar: &[T], grid: &GridSpec<T>) -> Result<(ExtReal<T>, bool)> {
    let v = ConeData::new(k.clone())?.i_k(xstar, grid)?;
    Ok((v, !v.is_neg_inf()))
}

/// The two couplings with the zero-duality-gap property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZdgpCoupling {
    ConeInner,
    IkShifted,
}

impl ZdgpCoupling {
    pub fn name(self) -> &'static str {
        match self {
            Self::ConeInner => "cone_inner",
            Self::IkShifted => "ik_shifted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZdgpRow<T> {
    pub x: Vec<T>,
    /// `inf_y f̄(x, y)`.
    pub primal_inf: ExtReal<T>,
    /// `inf_{x* ∈ C} f̄_x^g(x*)`.
    pub dual_inf: ExtReal<T>,
    pub sum: ExtReal<T>,
    pub within_tol: bool,
    /// `ik_shifted` only: largest `|f̄_x^g − (f̄_x^* − i_K)|` on the C-grid.
    pub identity_distance: Option<T>,
    /// `ik_shifted` only: smallest `f̄_x^* − i_K`.
    pub fenchel_min: Option<ExtReal<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZdgpReport<T> {
    pub coupling: ZdgpCoupling,
    pub rows: Vec<ZdgpRow<T>>,
    pub max_abs_sum: ExtReal<T>,
}

impl<T: Scalar> ZdgpReport<T> {
    pub fn passed(&self, tol: T) -> bool {
        self.rows.iter().all(|r| {
            r.within_tol
                && r.identity_distance.is_none_or(|d| d <= tol)
                && r.fenchel_min.is_none_or(|m| m >= ExtReal::finite(-tol))
        })
    }
}

/// Classical conjugate `f̄_x^*(x*) = sup_{y ∈ K} ⟨x*, y⟩ − f(x, y)`.
pub fn fbar_star<T: Scalar>(inst: &EPInstance<T>, x: &[T], xstar: &[T], ygrid: &GridSpec<T>) -> Result<ExtReal<T>> {
    let fx = inst.fbar(x);
    let r = optimize_over_grid(|y| Ok(ExtReal::finite(dot(xstar, y)).sub_lower(fx.eval(y)?)), ygrid, Mode::Sup)?;
    if r.status == Status::EmptyDomain {
        return Err(Error::EmptyDomain);
    }
    Ok(r.value)
}

/// For every `x` in `f_sample`: `inf_y f̄(x, y) + inf_{x*} f̄_x^g(x*) ∈ [−tol, tol]`.
pub fn zdgp_check<T: Scalar>(
    inst: &EPInstance<T>,
    coupling: ZdgpCoupling,
    f_sample: &[Vec<T>],
    ygrid: &GridSpec<T>,
    cgrid: &GridSpec<T>,
    tol: T,
) -> Result<ZdgpReport<T>> {
    let g = builtin_coupling(coupling.name(), &BuiltinParams::dim(inst.dim()).with_k(inst.k.clone()))?;
    let cone = ConeData::new(inst.k.clone())?;
    let mut rows = Vec::with_capacity(f_sample.len());
    for x in f_sample {
        let primal_inf = ep_residual(inst, x, ygrid)?;
        if primal_inf.is_neg_inf() {
            return Err(Error::Infeasible(coords(x)));
        }
        let fx = inst.fbar(x);
        let fg: SampledFn<T> = g_conjugate(&fx, &g, cgrid, ygrid)?;
        let dual_inf = fg.min().map_or(ExtReal::PosInf, |(v, _)| v);
        let sum = primal_inf.add_upper(dual_inf);
        let (identity_distance, fenchel_min) = if coupling == ZdgpCoupling::IkShifted {
            let pairs: Vec<(T, ExtReal<T>)> = fg
                .points
                .par_iter()
                .zip(&fg.values)
                .map(|(s, v)| {
                    let shifted = fbar_star(inst, x, s, ygrid)?.sub_lower(cone.i_k(s, cgrid)?);
                    Ok((v.distance(shifted), shifted))
                })
                .collect::<Result<_>>()?;
            let dist = pairs.iter().map(|p| p.0).fold(T::zero(), T::max);
            let min = pairs.iter().map(|p| p.1).min().unwrap_or(ExtReal::PosInf);
            (Some(dist), Some(min))
        } else {
            (None, None)
        };
        rows.push(ZdgpRow {
            x: x.clone(),
            primal_inf,
            dual_inf,
            within_tol: sum.as_finite().is_some_and(|v| v.abs() <= tol),
            sum,
            identity_distance,
            fenchel_min,
        });
    }
    let max_abs_sum = rows
        .iter()
        .map(|r| match r.sum {
            ExtReal::Finite(v) => ExtReal::finite(v.abs()),
            _ => ExtReal::PosInf,
        })
        .max()
        .unwrap_or(ExtReal::zero());
    Ok(ZdgpReport { coupling, rows, max_abs_sum })
}

/// Outcome of [`jemlws_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T> {
    /// `x* ∈ K*` with `f̄_x̄^*(x*) = i_K(x*)` within tolerance.
    Certified { xstar: Vec<T>, fbar_star: ExtReal<T>, i_k: ExtReal<T> },
    /// No such `x*` on the grid; `min_excess` is the smallest `f̄_x̄^* − i_K`.
    None { min_excess: ExtReal<T> },
}

impl<T> Certificate<T> {
    pub fn is_certified(&self) -> bool {
        matches!(self, Self::Certified { .. })
    }
}

/// First `x*` of the `K*`-grid (lattice order) with `|f̄_x̄^*(x*) − i_K(x*)| ≤ tol`.
pub fn jemlws_certificate<T: Scalar>(
    inst: &EPInstance<T>,
    xbar: &[T],
    kstar_grid: &GridSpec<T>,
    ygrid: &GridSpec<T>,
    tol: T,
) -> Result<Certificate<T>> {
    if !inst.k.contains(xbar) {
        return Err(Error::Infeasible(coords(xbar)));
    }
    let cone = ConeData::new(inst.k.clone())?;
    let candidates: Vec<Vec<T>> = kstar_grid.points().into_iter().filter(|s| cone.k_star.contains(s)).collect();
    let values: Vec<(ExtReal<T>, ExtReal<T>)> = candidates
        .par_iter()
        .map(|s| Ok((fbar_star(inst, xbar, s, ygrid)?, cone.i_k(s, kstar_grid)?)))
        .collect::<Result<_>>()?;
    for (s, &(fs, ik)) in candidates.iter().zip(&values) {
        if fs.is_finite() && ik.is_finite() && fs.distance(ik) <= tol {
            return Ok(Certificate::Certified { xstar: s.clone(), fbar_star: fs, i_k: ik });
        }
    }
    let min_excess = values.iter().map(|&(fs, ik)| fs.sub_lower(ik)).min().unwrap_or(ExtReal::PosInf);
    Ok(Certificate::None { min_excess })
}

/// One point of a certificate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub xbar: Vec<T>,
    pub residual: ExtReal<T>,
    pub solves: bool,
    pub certified: bool,
}

/// Certificate against residual at each `x̄`; both implications must hold.
pub fn certificate_sweep<T: Scalar>(
    inst: &EPInstance<T>,
    xbars: &[Vec<T>],
    kstar_grid: &GridSpec<T>,
    ygrid: &GridSpec<T>,
    tol: T,
) -> Result<Vec<SweepRow<T>>> {
    xbars
        .iter()
        .map(|xb| {
            let residual = ep_residual(inst, xb, ygrid)?;
            let certified = jemlws_certificate(inst, xb, kstar_grid, ygrid, tol)?.is_certified();
            Ok(SweepRow { xbar: xb.clone(), solves: residual >= ExtReal::finite(-tol), residual, certified })
        })
        .collect()
}

/// Variational inequality with affine `T(y) = My + q` on `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct VIPInstance<T> {
    pub c: SetSpec<T>,
    pub m: Vec<Vec<T>>,
    pub q: Vec<T>,
    /// Sampled graph `{(T(y), y)}` over `y ∈ C`.
    pub graph: Vec<(Vec<T>, Vec<T>)>,
}

impl<T: Scalar> VIPInstance<T> {
    pub fn new(c: SetSpec<T>, m: Vec<Vec<T>>, q: Vec<T>, sample: &[Vec<T>]) -> Result<Self> {
        let n = c.dim();
        if m.len() != n || q.len() != n {
            return Err(Error::Dimension { expected: n, got: m.len() });
        }
        if let Some(row) = m.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension { expected: n, got: row.len() });
        }
        let mut inst = Self { c, m, q, graph: Vec::new() };
        inst.graph = sample.iter().filter(|y| inst.c.contains(y)).map(|y| (inst.apply(y), y.clone())).collect();
        Ok(inst)
    }

    pub fn apply(&self, y: &[T]) -> Vec<T> {
        self.m.iter().zip(&self.q).map(|(row, &qi)| dot(row, y) + qi).collect()
    }

    /// `⟨T(x) − T(y), x − y⟩ ≥ −tol` over all graph pairs.
    pub fn monotone_on_sample(&self, tol: T) -> bool {
        self.graph.iter().all(|(vx, x)| {
            self.graph.iter().all(|(vy, y)| {
                let dv: Vec<T> = vx.iter().zip(vy).map(|(&a, &b)| a - b).collect();
                let dx: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
                dot(&dv, &dx) >= -tol
            })
        })
    }
}

/// `h(x) = max over the sampled graph of ⟨v, x − y⟩`.
pub fn vip_gap<T: Scalar>(inst: &VIPInstance<T>, x: &[T]) -> Result<ExtReal<T>> {
    if inst.graph.is_empty() {
        return Err(Error::Precondition("sampled graph is empty".into()));
    }
    let best = inst
        .graph
        .iter()
        .map(|(v, y)| {
            let d: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
            dot(v, &d)
        })
        .fold(T::neg_infinity(), T::max);
    Ok(ExtReal::finite(best))
}

/// Mixed problem with operator `F`, map `η(y, x)` and function `f`.
#[derive(Clone)]
pub struct EPVIPInstance<T> {
    pub n: usize,
    pub f: ProperFn<T>,
    op: VecMap<T>,
    eta: VecMap2<T>,
}

impl<T: fmt::Debug> fmt::Debug for EPVIPInstance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EPVIPInstance").field("n", &self.n).field("f", &self.f).finish()
    }
}

fn eval_all<T: Scalar>(exprs: &[ExprFn], args: &[T]) -> Result<Vec<T>> {
    exprs
        .iter()
        .map(|e| e.eval(args)?.as_finite().ok_or_else(|| Error::Domain(format!("`{e}` is not finite"))))
        .collect()
}

impl<T: Scalar> EPVIPInstance<T> {
    pub fn new<A, B>(n: usize, f: ProperFn<T>, op: A, eta: B) -> Result<Self>
    where
        A: Fn(&[T]) -> Result<Vec<T>> + Send + Sync + 'static,
        B: Fn(&[T], &[T]) -> Result<Vec<T>> + Send + Sync + 'static,
    {
        if f.dim() != n {
            return Err(Error::Dimension { expected: n, got: f.dim() });
        }
        Ok(Self { n, f, op: Arc::new(op), eta: Arc::new(eta) })
    }

    /// `F` components over `x1..xn`; `η` components over `y1..yn, x1..xn`.
    pub fn from_exprs(f: ProperFn<T>, op: Vec<ExprFn>, eta: Vec<ExprFn>) -> Result<Self> {
        let n = f.dim();
        for (name, list, arity) in [("F", &op, n), ("eta", &eta, 2 * n)] {
            if list.len() != n {
                return Err(Error::Arity { name: name.into(), expected: n, got: list.len() });
            }
            if let Some(e) = list.iter().find(|e| e.arity() != arity) {
                return Err(Error::Arity { name: name.into(), expected: arity, got: e.arity() });
            }
        }
        Self::new(
            n,
            f,
            move |x| eval_all(&op, x),
            move |y, x| {
                let yx: Vec<T> = y.iter().chain(x).copied().collect();
                eval_all(&eta, &yx)
            },
        )
    }

    pub fn op(&self, x: &[T]) -> Result<Vec<T>> {
        (self.op)(x)
    }

    pub fn eta(&self, y: &[T], x: &[T]) -> Result<Vec<T>> {
        (self.eta)(y, x)
    }

    /// `‖η(x, x)‖∞ ≤ tol` at every sample.
    pub fn eta_vanishes_on_diagonal(&self, samples: &[Vec<T>], tol: T) -> Result<bool> {
        for x in samples {
            if self.eta(x, x)?.iter().any(|v| v.abs() > tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `min_y ⟨F(x), η(y, x)⟩ − f(x) + f(y)` on `ygrid`; `−∞` on divergence.
pub fn epvip_gap<T: Scalar>(inst: &EPVIPInstance<T>, x: &[T], ygrid: &GridSpec<T>) -> Result<ExtReal<T>> {
    let fx = inst.f.eval(x)?;
    let fx_vec = inst.op(x)?;
    let r = optimize_over_grid(
        |y| {
            let lin = dot(&fx_vec, &inst.eta(y, x)?);
            Ok(ExtReal::finite(lin).add_upper(inst.f.eval(y)?).sub_lower(fx))
        },
        ygrid,
        Mode::Inf,
    )?;
    Ok(r.value)
}

/// `ep_gap` zeros are solutions: for each sampled `y`, `g_f(y) ≤ gap_tol`
/// implies `ep_residual(y) ≥ −tol`.
///
/// Near a solution the gap typically grows quadratically while the residual
/// grows linearly, so `gap_tol` should be of order `tol²`.
pub fn gap_zero_implies_solution<T: Scalar>(
    inst: &EPInstance<T>,
    samples: &[Vec<T>],
    grid: &GridSpec<T>,
    gap_tol: T,
    tol: T,
) -> Result<bool> {
    for y in samples.iter().filter(|y| inst.k.contains(y)) {
        let gap = ep_gap(inst, y, grid)?;
        if gap <= ExtReal::finite(gap_tol) && ep_residual(inst, y, grid)? < ExtReal::finite(-tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least `vip_gap` over an explicit set of points.
pub fn vip_min_over<T: Scalar>(inst: &VIPInstance<T>, points: &[Vec<T>]) -> Result<ExtReal<T>> {
    Ok(optimize_over_points(|x| vip_gap(inst, x), points, Mode::Inf)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::parse;
    use crate::grid::BoundingBox;

    fn unit() -> SetSpec<f64> {
        SetSpec::Box(BoundingBox::new(vec![0.0], vec![1.0]).unwrap())
    }

    fn inst() -> EPInstance<f64> {
        EPInstance::from_expr(unit(), parse("(x1 - 0.5)*(y1 - x1)", &["x1", "y1"]).unwrap()).unwrap()
    }

    fn ygrid() -> GridSpec<f64> {
        GridSpec::interval(0.0, 1.0, 101).unwrap()
    }

    fn cgrid() -> GridSpec<f64> {
        GridSpec::interval(-4.0, 4.0, 161).unwrap()
    }

    #[test]
    fn residual_and_gap() {
        let i = inst();
        assert_eq!(ep_residual(&i, &[0.5], &ygrid()).unwrap(), ExtReal::zero());
        assert_eq!(ep_residual(&i, &[0.0], &ygrid()).unwrap(), ExtReal::finite(-0.5));
        assert!(matches!(ep_residual(&i, &[2.0], &ygrid()), Err(Error::Infeasible(_))));
        assert_eq!(ep_gap(&i, &[0.5], &ygrid()).unwrap(), ExtReal::zero());
        assert_eq!(ep_gap(&i, &[2.0], &ygrid()).unwrap(), ExtReal::PosInf);
        assert!(gap_zero_implies_solution(&i, &ygrid().points(), &ygrid(), 1e-14, 1e-6).unwrap());
    }

    #[test]
    fn diagonal_check() {
        let bad = EPInstance::from_expr(unit(), parse("y1 - x1 + 1", &["x1", "y1"]).unwrap()).unwrap();
        assert!(bad.check_diagonal(&ygrid().points()).is_err());
        inst().check_diagonal(&ygrid().points()).unwrap();
        assert!(inst().convexity_advisory(&ygrid().points(), 1e-12).unwrap());
    }

    #[test]
    fn support_values() {
        let g = cgrid();
        assert_eq!(ik_and_kstar(&unit(), &[-2.0], &g).unwrap(), (ExtReal::finite(-2.0), true));
        assert_eq!(ik_and_kstar(&SetSpec::Orthant(2), &[1.0, 1.0], &g).unwrap(), (ExtReal::zero(), true));
        assert_eq!(ik_and_kstar(&SetSpec::Orthant(2), &[-1.0, 0.0], &g).unwrap(), (ExtReal::NegInf, false));
        let cube = SetSpec::Box(BoundingBox::centered(3, 1.0).unwrap());
        assert_eq!(ik_and_kstar(&cube, &[1.0, -2.0, 0.5], &g).unwrap().0, ExtReal::finite(-3.5));
    }

    #[test]
    fn zdgp_both_couplings() {
        let i = inst();
        let sample = vec![vec![0.0], vec![0.25], vec![0.5], vec![1.0]];
        for c in [ZdgpCoupling::ConeInner, ZdgpCoupling::IkShifted] {
            let rep = zdgp_check(&i, c, &sample, &ygrid(), &cgrid(), 1e-6).unwrap();
            assert!(rep.passed(1e-6), "{rep:#?}");
        }
        let rep = zdgp_check(&i, ZdgpCoupling::IkShifted, &[vec![0.0]], &ygrid(), &cgrid(), 1e-6).unwrap();
        assert_eq!(rep.rows[0].primal_inf, ExtReal::finite(-0.5));
        assert!((rep.rows[0].dual_inf.to_f64() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn certificate_matches_solutions() {
        let i = inst();
        let ks = ConeData::new(unit()).unwrap().k_star_grid(4.0, 161).unwrap();
        match jemlws_certificate(&i, &[0.5], &ks, &ygrid(), 1e-9).unwrap() {
            Certificate::Certified { xstar, .. } => assert_eq!(xstar, vec![0.0]),
            other => panic!("{other:?}"),
        }
        assert!(!jemlws_certificate(&i, &[0.0], &ks, &ygrid(), 1e-9).unwrap().is_certified());
        let xbars: Vec<Vec<f64>> = GridSpec::interval(0.0, 1.0, 21).unwrap().points();
        for row in certificate_sweep(&i, &xbars, &ks, &ygrid(), 1e-6).unwrap() {
            assert_eq!(row.solves, row.certified, "{row:?}");
        }
    }

    #[test]
    fn vip_identity_operator() {
        let c = SetSpec::Box(BoundingBox::centered(1, 1.0).unwrap());
        let sample = GridSpec::interval(-1.0, 1.0, 21).unwrap().points();
        let v = VIPInstance::new(c, vec![vec![1.0]], vec![0.0], &sample).unwrap();
        assert!(v.monotone_on_sample(0.0));
        assert_eq!(vip_gap(&v, &[0.0]).unwrap(), ExtReal::zero());
        assert_eq!(vip_gap(&v, &[1.0]).unwrap(), ExtReal::finite(0.25));
        for y in &sample {
            assert!(vip_gap(&v, y).unwrap() >= ExtReal::zero());
        }
    }

    #[test]
    fn epvip_linear() {
        let zero = ProperFn::new(1, "0", SetSpec::Full(1), |_: &[f64]| Ok(ExtReal::zero()));
        let e = EPVIPInstance::from_exprs(
            zero,
            vec![parse("x1", &["x1"]).unwrap()],
            vec![parse("y1 - x1", &["y1", "x1"]).unwrap()],
        )
        .unwrap();
        let yg = GridSpec::interval(-2.0, 2.0, 41).unwrap();
        assert_eq!(epvip_gap(&e, &[0.0], &yg).unwrap(), ExtReal::zero());
        assert_eq!(epvip_gap(&e, &[1.0], &yg).unwrap(), ExtReal::NegInf);
        assert!(e.eta_vanishes_on_diagonal(&yg.points(), 0.0).unwrap());
    }
}
