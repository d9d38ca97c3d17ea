//! Perturbation functions, marginal functions and the Lagrangian coupling.
//!
//! A perturbation `φ(x, u)` of `f` gives the marginal function
//! `h(u) = inf_x φ(x, u)`, the primal value `α = h(0)` and the dual value
//! `−β` with `β = inf h*`. Here `h*` is computed twice: through `h` and
//! directly as `φ*(0, ·)` over the joint `(x, u)` grid.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::conjugate::{g_conjugate, g_conjugate_on, key, membership_ff, Membership, SampledFn};
use crate::coupling::{builtin_coupling, validate_coupling, BuiltinParams, CouplingFn, ProperFn, ValidationReport};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::funcdsl::ExprFn;
use crate::grid::{optimize_over_grid, BoundingBox, GridSpec, Mode, OptResult, Status};
use crate::scalar::{dot, Scalar};
use crate::sets::SetSpec;

type Eval2<T> = Arc<dyn Fn(&[T], &[T]) -> Result<ExtReal<T>> + Send + Sync>;

/// Points per axis of the default scheme grids.
pub const DEFAULT_SCHEME_POINTS: usize = 41;

/// `φ : ℝⁿ × ℝᵖ → ℝ ∪ {+∞}` with `φ(x, 0) = f(x)`.
#[derive(Clone)]
pub struct PerturbationScheme<T> {
    pub n: usize,
    pub p: usize,
    pub name: String,
    pub f: ProperFn<T>,
    phi: Eval2<T>,
}

impl<T: fmt::Debug> fmt::Debug for PerturbationScheme<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationScheme")
            .field("n", &self.n)
            .field("p", &self.p)
            .field("name", &self.name)
            .field("f", &self.f)
            .finish()
    }
}

/// Grids for a perturbation scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeGrids<T> {
    pub x: GridSpec<T>,
    pub u: GridSpec<T>,
    /// Dual points `u*` where `h*` is reported.
    pub ustar: Vec<Vec<T>>,
}

impl<T: Scalar> SchemeGrids<T> {
    pub fn joint(&self) -> GridSpec<T> {
        self.x.product(&self.u)
    }
}

impl<T: Scalar> PerturbationScheme<T> {
    pub fn new<F>(n: usize, p: usize, name: impl Into<String>, f: ProperFn<T>, phi: F) -> Result<Self>
    where
        F: Fn(&[T], &[T]) -> Result<ExtReal<T>> + Send + Sync + 'static,
    {
        if f.dim() != n {
            return Err(Error::Dimension { expected: n, got: f.dim() });
        }
        Ok(Self { n, p, name: name.into(), f, phi: Arc::new(phi) })
    }

    /// `expr` over `x1..xn, u1..up`.
    pub fn from_expr(expr: ExprFn, n: usize, p: usize, f: ProperFn<T>) -> Result<Self> {
        if expr.arity() != n + p {
            return Err(Error::Arity { name: "phi".into(), expected: n + p, got: expr.arity() });
        }
        let name = expr.to_canonical();
        Self::new(n, p, name, f, move |x, u| {
            let xu: Vec<T> = x.iter().chain(u).copied().collect();
            expr.eval(&xu)
        })
    }

    pub fn phi(&self, x: &[T], u: &[T]) -> Result<ExtReal<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        if u.len() != self.p {
            return Err(Error::Dimension { expected: self.p, got: u.len() });
        }
        match (self.phi)(x, u)? {
            ExtReal::NegInf => Err(Error::Improper),
            v => Ok(v),
        }
    }

    /// `φ(x, 0) = f(x)` on the lattice of `xgrid`.
    pub fn check_consistency(&self, xgrid: &GridSpec<T>, tol: T) -> Result<()> {
        let zero = vec![T::zero(); self.p];
        for x in xgrid.points() {
            let (a, b) = (self.phi(&x, &zero)?, self.f.eval(&x)?);
            if a.distance(b) > tol {
                return Err(Error::Precondition(format!(
                    "perturbation inconsistent with f at {:?}: phi(x, 0) = {a}, f(x) = {b}",
                    x.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>()
                )));
            }
        }
        Ok(())
    }

    /// `h(u) = inf_x φ(x, u)`.
    pub fn marginal(&self, u: &[T], xgrid: &GridSpec<T>) -> Result<OptResult<T>> {
        optimize_over_grid(|x| self.phi(x, u), xgrid, Mode::Inf)
    }

    /// `h*(u*) = sup_u ⟨u*, u⟩ − h(u)`, computed through `h`.
    pub fn h_star_nested(&self, ustar: &[T], grids: &SchemeGrids<T>) -> Result<OptResult<T>> {
        self.h_star_memo(ustar, grids, &Mutex::new(HashMap::new()))
    }

    fn h_star_memo(&self, ustar: &[T], grids: &SchemeGrids<T>, memo: &Mutex<HashMap<Vec<u64>, ExtReal<T>>>) -> Result<OptResult<T>> {
        optimize_over_grid(
            |u| {
                let k = key(u);
                let cached = memo.lock().expect("memo lock").get(&k).copied();
                let h = match cached {
                    Some(h) => h,
                    None => {
                        let h = self.marginal(u, &grids.x)?.value;
                        memo.lock().expect("memo lock").insert(k, h);
                        h
                    }
                };
                Ok(ExtReal::finite(dot(ustar, u)).sub_lower(h))
            },
            &grids.u,
            Mode::Sup,
        )
    }

    /// `φ*(x*, u*) = sup_{x,u} ⟨x*, x⟩ + ⟨u*, u⟩ − φ(x, u)`.
    pub fn phi_star(&self, xstar: &[T], ustar: &[T], joint: &GridSpec<T>) -> Result<OptResult<T>> {
        let n = self.n;
        optimize_over_grid(
            |xu| {
                let (x, u) = xu.split_at(n);
                let lin = dot(xstar, x) + dot(ustar, u);
                Ok(ExtReal::finite(lin).sub_lower(self.phi(x, u)?))
            },
            joint,
            Mode::Sup,
        )
    }

    /// `h*(u*) = φ*(0, u*)`.
    pub fn h_star_joint(&self, ustar: &[T], grids: &SchemeGrids<T>) -> Result<OptResult<T>> {
        self.phi_star(&vec![T::zero(); self.n], ustar, &grids.joint())
    }

    /// `k(x*) = inf_{u*} φ*(x*, u*)` over the sampled `u*`.
    pub fn k(&self, xstar: &[T], grids: &SchemeGrids<T>) -> Result<ExtReal<T>> {
        let joint = grids.joint();
        let vals: Vec<ExtReal<T>> =
            grids.ustar.par_iter().map(|s| Ok(self.phi_star(xstar, s, &joint)?.value)).collect::<Result<_>>()?;
        Ok(vals.into_iter().min().unwrap_or(ExtReal::PosInf))
    }
}

/// `h*` at one dual point by both routes.
#[derive(Debug, Clone, PartialEq)]
pub struct HStarSample<T> {
    pub ustar: Vec<T>,
    pub nested: ExtReal<T>,
    pub nested_status: Status,
    pub joint: ExtReal<T>,
    pub joint_status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport<T> {
    /// `α = h(0)`.
    pub alpha: OptResult<T>,
    pub h_star: Vec<HStarSample<T>>,
    pub max_route_distance: T,
    pub routes_agree: bool,
    /// `β = inf h*` over the sampled `u*` (nested route).
    pub beta: ExtReal<T>,
    /// `−β ≤ α + tol`.
    pub weak_duality: bool,
    /// `α ⊕ β`.
    pub gap: ExtReal<T>,
    pub no_gap: bool,
    /// Minimum of `f(x) + h*(u*)` over sampled pairs, when `no_gap`.
    pub gap_fn_min: Option<ExtReal<T>>,
    pub gap_fn_nonnegative: Option<bool>,
}

impl<T> PerturbationReport<T> {
    pub fn passed(&self) -> bool {
        self.routes_agree && self.weak_duality && self.gap_fn_nonnegative != Some(false)
    }
}

fn nested_h_star<T: Scalar>(s: &PerturbationScheme<T>, grids: &SchemeGrids<T>) -> Result<Vec<OptResult<T>>> {
    let memo = Mutex::new(HashMap::new());
    grids.ustar.par_iter().map(|u| s.h_star_memo(u, grids, &memo)).collect()
}

pub fn perturbation_report<T: Scalar>(s: &PerturbationScheme<T>, grids: &SchemeGrids<T>, tol: T) -> Result<PerturbationReport<T>> {
    s.check_consistency(&grids.x, tol)?;
    let alpha = s.marginal(&vec![T::zero(); s.p], &grids.x)?;
    let nested = nested_h_star(s, grids)?;
    let joint: Vec<OptResult<T>> = grids.ustar.par_iter().map(|u| s.h_star_joint(u, grids)).collect::<Result<_>>()?;
    let h_star: Vec<HStarSample<T>> = grids
        .ustar
        .iter()
        .zip(nested.iter().zip(&joint))
        .map(|(u, (a, b))| HStarSample {
            ustar: u.clone(),
            nested: a.value,
            nested_status: a.status,
            joint: b.value,
            joint_status: b.status,
        })
        .collect();
    let max_route_distance = h_star.iter().map(|h| h.nested.distance(h.joint)).fold(T::zero(), T::max);
    let beta = h_star.iter().map(|h| h.nested).min().unwrap_or(ExtReal::PosInf);
    let weak_duality = -beta <= alpha.value.add_upper(ExtReal::finite(tol));
    let gap = alpha.value.add_upper(beta);
    let no_gap = gap.as_finite().is_some_and(|g| g.abs() <= tol);
    let (gap_fn_min, gap_fn_nonnegative) = if no_gap {
        let fx: Vec<ExtReal<T>> = grids.x.points().par_iter().map(|x| s.f.eval(x)).collect::<Result<_>>()?;
        let fmin = fx.into_iter().min().unwrap_or(ExtReal::PosInf);
        let hmin = h_star.iter().map(|h| h.nested).filter(|v| v.is_finite()).min().unwrap_or(ExtReal::PosInf);
        let m = fmin.add_upper(hmin);
        (Some(m), Some(m >= ExtReal::finite(-tol)))
    } else {
        (None, None)
    };
    Ok(PerturbationReport {
        alpha,
        h_star,
        routes_agree: max_route_distance <= tol,
        max_route_distance,
        beta,
        weak_duality,
        gap,
        no_gap,
        gap_fn_min,
        gap_fn_nonnegative,
    })
}

/// `min f(x)` subject to `hᵢ(x) ≤ 0`.
#[derive(Debug, Clone)]
pub struct ConstrainedProblem<T> {
    pub f: ProperFn<T>,
    pub h: Vec<ProperFn<T>>,
}

impl<T: Scalar> ConstrainedProblem<T> {
    pub fn new(f: ProperFn<T>, h: Vec<ProperFn<T>>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Precondition("at least one constraint is required".into()));
        }
        for hi in &h {
            if hi.dim() != f.dim() {
                return Err(Error::Dimension { expected: f.dim(), got: hi.dim() });
            }
        }
        Ok(Self { f, h })
    }

    pub fn n(&self) -> usize {
        self.f.dim()
    }

    pub fn m(&self) -> usize {
        self.h.len()
    }

    /// `−h(x)`; constraints must be finite.
    pub fn slack(&self, x: &[T]) -> Result<Vec<T>> {
        self.h
            .iter()
            .map(|hi| {
                hi.eval(x)?
                    .as_finite()
                    .map(|v| -v)
                    .ok_or_else(|| Error::Domain(format!("constraint `{}` is not finite", hi.name())))
            })
            .collect()
    }

    pub fn is_feasible(&self, x: &[T]) -> Result<bool> {
        Ok(self.slack(x)?.iter().all(|&v| v >= T::zero()))
    }

    /// `f̄ = f + i_A`.
    pub fn restricted(&self) -> ProperFn<T> {
        let p = self.clone();
        ProperFn::new(self.n(), format!("{} on A", self.f.name()), self.f.dom_hint().clone(), move |x| {
            if p.is_feasible(x)? {
                p.f.eval(x)
            } else {
                Ok(ExtReal::PosInf)
            }
        })
    }

    /// `g(x, λ*) = g₁(−h(x), λ*)`.
    pub fn lagrangian_coupling(&self) -> Result<CouplingFn<T>> {
        let g1 = builtin_coupling("lagrangian_g1", &BuiltinParams::dim(self.m()))?;
        let p = self.clone();
        Ok(g1.compose(self.n(), "lagrangian", move |x| p.slack(x)))
    }

    /// `[0, 10·(1 + maxᵢ |hᵢ(0)|)]^m`; 1001 points in one dimension, 101 in
    /// two, 21 beyond.
    pub fn default_lambda_grid(&self) -> Result<GridSpec<T>> {
        let zero = vec![T::zero(); self.n()];
        let scale = self.slack(&zero)?.into_iter().map(|v| v.abs()).fold(T::zero(), T::max);
        let hi = T::lit(10.0) * (T::one() + scale);
        let points = match self.m() {
            1 => 1001,
            2 => 101,
            _ => 21,
        };
        GridSpec::new(BoundingBox::new(vec![T::zero(); self.m()], vec![hi; self.m()])?, points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianReport<T> {
    /// `f̄^g(λ*)` from the generic conjugate engine.
    pub engine: SampledFn<T>,
    /// `sup_{x∈A} ⟨λ*, −h(x)⟩ − f(x)` computed directly.
    pub direct: Vec<ExtReal<T>>,
    pub max_distance: T,
    pub agree: bool,
    /// `α = inf_A f`.
    pub alpha: OptResult<T>,
    pub dual_inf: ExtReal<T>,
    pub dual_argmin: Option<Vec<T>>,
    /// `−inf f̄^g`.
    pub dual_value: ExtReal<T>,
    pub gap: ExtReal<T>,
    pub no_gap: bool,
}

impl<T> LagrangianReport<T> {
    pub fn passed(&self) -> bool {
        self.agree && self.no_gap
    }
}

pub fn lagrangian_dual_report<T: Scalar>(
    p: &ConstrainedProblem<T>,
    xgrid: &GridSpec<T>,
    lambda_grid: &GridSpec<T>,
    tol: T,
) -> Result<LagrangianReport<T>> {
    let xs = xgrid.points();
    let feasible = xs.par_iter().map(|x| p.is_feasible(x)).collect::<Result<Vec<bool>>>()?;
    if !feasible.into_iter().any(|b| b) {
        return Err(Error::NoFeasiblePoint);
    }
    let fbar = p.restricted();
    let g = p.lagrangian_coupling()?;
    let engine = g_conjugate(&fbar, &g, lambda_grid, xgrid)?;
    let direct: Vec<ExtReal<T>> = engine
        .points
        .par_iter()
        .map(|lam| {
            let r = optimize_over_grid(
                |x| {
                    let s = p.slack(x)?;
                    if s.iter().any(|&v| v < T::zero()) {
                        return Ok(ExtReal::NegInf);
                    }
                    Ok(ExtReal::finite(dot(lam, &s)).sub_lower(p.f.eval(x)?))
                },
                xgrid,
                Mode::Sup,
            )?;
            Ok(r.value)
        })
        .collect::<Result<_>>()?;
    let max_distance = engine.values.iter().zip(&direct).map(|(a, b)| a.distance(*b)).fold(T::zero(), T::max);
    let alpha = optimize_over_grid(|x| fbar.eval(x), xgrid, Mode::Inf)?;
    let (dual_inf, dual_argmin) = match engine.min() {
        Some((v, i)) => (v, Some(engine.points[i].clone())),
        None => (ExtReal::PosInf, None),
    };
    let gap = alpha.value.add_upper(dual_inf);
    Ok(LagrangianReport {
        engine,
        direct,
        agree: max_distance <= tol,
        max_distance,
        alpha,
        dual_inf,
        dual_argmin,
        dual_value: -dual_inf,
        no_gap: gap.as_finite().is_some_and(|v| v.abs() <= tol),
        gap,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicRecoveryReport<T> {
    pub h_star: SampledFn<T>,
    /// Sampled `u*` with `h*` finite.
    pub dom_points: Vec<Vec<T>>,
    /// Box hull of `dom_points`, used as `C`.
    pub c: SetSpec<T>,
    pub fg: SampledFn<T>,
    pub max_distance: T,
    /// `f^g = h*` on `dom_points` within tolerance.
    pub identity_holds: bool,
    pub membership: Membership<T>,
    pub alpha: ExtReal<T>,
    pub beta: ExtReal<T>,
    pub no_gap: bool,
    /// `inf f = −β`.
    pub expected_member: bool,
    pub membership_consistent: bool,
    /// D1–D3 of the coupling; only run when `no_gap`.
    pub validation: Option<ValidationReport<T>>,
}

impl<T> ClassicRecoveryReport<T> {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.membership_consistent && self.validation.as_ref().is_none_or(|v| v.d1 && v.d2)
    }
}

/// The coupling `g(x, x*) = f(x) + h*(x*)`: `0` off `dom f`, `+∞` off
/// `dom h*`. Sampled values of `h*` are looked up, others are computed once
/// and kept.
pub fn classic_coupling<T: Scalar>(
    s: &PerturbationScheme<T>,
    grids: &SchemeGrids<T>,
    h_star: &SampledFn<T>,
    c: SetSpec<T>,
) -> CouplingFn<T> {
    let table: HashMap<Vec<u64>, ExtReal<T>> =
        h_star.points.iter().zip(&h_star.values).map(|(p, v)| (key(p), *v)).collect();
    let table = Arc::new(Mutex::new(table));
    let scheme = s.clone();
    let grids = grids.clone();
    let set = c.clone();
    CouplingFn::new(s.n, s.p, c, "f(x) + h*(x*)", move |x: &[T], xs: &[T]| {
        if !set.contains(xs) {
            return Ok(ExtReal::PosInf);
        }
        let k = key(xs);
        let cached = table.lock().expect("h* table lock").get(&k).copied();
        let h = match cached {
            Some(v) => v,
            None => {
                let v = scheme.h_star_nested(xs, &grids)?.value;
                table.lock().expect("h* table lock").insert(k, v);
                v
            }
        };
        if !h.is_finite() {
            return Ok(ExtReal::PosInf);
        }
        match scheme.f.eval(x)? {
            ExtReal::PosInf => Ok(ExtReal::zero()),
            fx => Ok(fx.add_upper(h)),
        }
    })
}

pub fn classic_recovery_check<T: Scalar>(
    f: &ProperFn<T>,
    s: &PerturbationScheme<T>,
    grids: &SchemeGrids<T>,
    tol: T,
) -> Result<ClassicRecoveryReport<T>> {
    s.check_consistency(&grids.x, tol)?;
    let nested = nested_h_star(s, grids)?;
    let h_star = SampledFn::from_results(grids.ustar.clone(), nested);
    let dom_points: Vec<Vec<T>> = h_star
        .points
        .iter()
        .zip(&h_star.values)
        .filter(|(_, v)| v.is_finite())
        .map(|(p, _)| p.clone())
        .collect();
    if dom_points.is_empty() {
        return Err(Error::Precondition("h* is nowhere finite on the dual grid".into()));
    }
    let lo = (0..s.p).map(|i| dom_points.iter().map(|p| p[i]).fold(T::infinity(), T::min)).collect();
    let hi = (0..s.p).map(|i| dom_points.iter().map(|p| p[i]).fold(T::neg_infinity(), T::max)).collect();
    let hull = BoundingBox::new(lo, hi)?;
    let c = SetSpec::Box(hull.clone());
    let g = classic_coupling(s, grids, &h_star, c.clone());
    let fg = g_conjugate_on(f, &g, dom_points.clone(), &grids.x)?;
    let max_distance = dom_points
        .iter()
        .zip(&fg.values)
        .map(|(p, v)| v.distance(h_star.get(p).unwrap_or(ExtReal::PosInf)))
        .fold(T::zero(), T::max);
    let membership = membership_ff(f, &fg, &grids.x, tol)?;
    let alpha = s.marginal(&vec![T::zero(); s.p], &grids.x)?.value;
    let beta = dom_points.iter().filter_map(|p| h_star.get(p)).min().unwrap_or(ExtReal::PosInf);
    let no_gap = alpha.add_upper(beta).as_finite().is_some_and(|v| v.abs() <= tol);
    let expected_member = membership.inf_f.value.add_upper(beta).as_finite().is_some_and(|v| v.abs() <= tol);
    let validation = if no_gap {
        let per_dim = grids.x.points_per_dim.min(DEFAULT_SCHEME_POINTS);
        let joint = GridSpec::new(grids.x.bbox.product(&hull), per_dim)?.with_limits(grids.x.limits);
        Some(validate_coupling(&g, &joint, tol, 0)?)
    } else {
        None
    };
    Ok(ClassicRecoveryReport {
        identity_holds: max_distance <= tol,
        max_distance,
        membership_consistent: membership.member == expected_member,
        h_star,
        dom_points,
        c,
        fg,
        membership,
        alpha,
        beta,
        no_gap,
        expected_member,
        validation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::parse;

    fn square() -> ProperFn<f64> {
        ProperFn::from_expr(parse("x1^2", &["x1"]).unwrap(), SetSpec::Full(1))
    }

    fn scheme(text: &str) -> PerturbationScheme<f64> {
        PerturbationScheme::from_expr(parse(text, &["x1", "u1"]).unwrap(), 1, 1, square()).unwrap()
    }

    fn grids() -> SchemeGrids<f64> {
        SchemeGrids {
            x: GridSpec::interval(-2.0, 2.0, 41).unwrap(),
            u: GridSpec::interval(-2.0, 2.0, 41).unwrap(),
            ustar: vec![vec![-1.0], vec![-0.5], vec![0.0], vec![0.5], vec![1.0]],
        }
    }

    #[test]
    fn shifted_square_scheme() {
        let rep = perturbation_report(&scheme("(x1 - u1)^2"), &grids(), 1e-6).unwrap();
        assert!(rep.passed(), "{rep:#?}");
        assert_eq!(rep.alpha.value, ExtReal::zero());
        assert_eq!(rep.beta, ExtReal::zero());
        assert!(rep.no_gap);
        for h in &rep.h_star {
            if h.ustar[0] == 0.0 {
                assert_eq!(h.nested, ExtReal::zero());
            } else {
                assert_eq!((h.nested, h.nested_status), (ExtReal::PosInf, Status::Divergent));
                assert_eq!(h.joint, ExtReal::PosInf);
            }
        }
        assert_eq!(rep.gap_fn_nonnegative, Some(true));
    }

    #[test]
    fn linear_perturbation_weak_duality() {
        let s = scheme("x1^2 + u1*x1");
        let rep = perturbation_report(&s, &grids(), 1e-6).unwrap();
        assert!(rep.weak_duality && rep.routes_agree, "{rep:#?}");
        assert_eq!(rep.alpha.value, ExtReal::zero());
        // h(u) = −u²/4
        let h = s.marginal(&[1.0], &grids().x).unwrap();
        assert!((h.value.to_f64() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_scheme_rejected() {
        let s = scheme("(x1 - u1)^2 + 1");
        assert!(matches!(perturbation_report(&s, &grids(), 1e-6), Err(Error::Precondition(_))));
    }

    fn half_line() -> ConstrainedProblem<f64> {
        let h = ProperFn::from_expr(parse("1 - x1", &["x1"]).unwrap(), SetSpec::Full(1));
        ConstrainedProblem::new(square(), vec![h]).unwrap()
    }

    #[test]
    fn lagrangian_half_line() {
        let p = half_line();
        let xg = GridSpec::interval(-20.0, 20.0, 401).unwrap();
        let lg = GridSpec::interval(0.0, 20.0, 101).unwrap();
        let rep = lagrangian_dual_report(&p, &xg, &lg, 1e-4).unwrap();
        assert!(rep.passed(), "{:?}", (rep.max_distance, rep.gap));
        assert!(rep.max_distance <= 1e-10);
        assert_eq!(rep.alpha.value, ExtReal::finite(1.0));
        for (lam, v) in rep.engine.points.iter().zip(&rep.engine.values) {
            let l = lam[0];
            let want = if l <= 2.0 { -1.0 } else { l * l / 4.0 - l };
            assert!((v.to_f64() - want).abs() < 1e-9, "{l}: {v}");
        }
        assert!((rep.dual_value.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lagrangian_vacuous_constraint() {
        let h = ProperFn::from_expr(parse("-1", &["x1"]).unwrap(), SetSpec::Full(1));
        let p = ConstrainedProblem::new(square(), vec![h]).unwrap();
        let xg = GridSpec::interval(-20.0, 20.0, 401).unwrap();
        let rep = lagrangian_dual_report(&p, &xg, &p.default_lambda_grid().unwrap(), 1e-6).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.dual_argmin, Some(vec![0.0]));
        assert_eq!(rep.dual_value, ExtReal::zero());
        assert_eq!(rep.engine.points.len(), 1001);
    }

    #[test]
    fn infeasible_problem() {
        let h = ProperFn::from_expr(parse("1", &["x1"]).unwrap(), SetSpec::Full(1));
        let p = ConstrainedProblem::new(square(), vec![h]).unwrap();
        let xg = GridSpec::interval(-2.0, 2.0, 5).unwrap();
        let lg = GridSpec::interval(0.0, 1.0, 3).unwrap();
        assert!(matches!(lagrangian_dual_report(&p, &xg, &lg, 1e-6), Err(Error::NoFeasiblePoint)));
    }

    #[test]
    fn default_lambda_box() {
        let g = half_line().default_lambda_grid().unwrap();
        assert_eq!(g.bbox.hi(), &[20.0]);
        assert_eq!(g.points_per_dim, 1001);
    }

    #[test]
    fn classic_recovery_shifted_square() {
        let rep = classic_recovery_check(&square(), &scheme("(x1 - u1)^2"), &grids(), 1e-6).unwrap();
        assert!(rep.passed(), "{rep:#?}");
        assert_eq!(rep.dom_points, vec![vec![0.0]]);
        assert!(rep.membership.member && rep.expected_member);
        let v = rep.validation.unwrap();
        assert!(v.d1 && v.d2);
    }
}
