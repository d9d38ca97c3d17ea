//! g-conjugates, biconjugates, the gap functional `γ`, membership in the
//! zero-gap family and the duality experiments built on them.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::coupling::{CouplingFn, ProperFn};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{optimize_over_grid, optimize_over_points, GridSpec, Mode, OptResult, Status};
use crate::scalar::{norm, Scalar};

/// A function materialized on explicit points, with per-point attainment
/// metadata from the inner optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn<T> {
    pub points: Vec<Vec<T>>,
    pub values: Vec<ExtReal<T>>,
    pub status: Vec<Status>,
    pub args: Vec<Option<Vec<T>>>,
    pub widenings: Vec<usize>,
}

pub(crate) fn key<T: Scalar>(p: &[T]) -> Vec<u64> {
    p.iter().map(|v| (v.to_f64_lossy() + 0.0).to_bits()).collect()
}

impl<T: Scalar> SampledFn<T> {
    pub(crate) fn from_results(points: Vec<Vec<T>>, results: Vec<OptResult<T>>) -> Self {
        let mut out = SampledFn {
            values: Vec::with_capacity(points.len()),
            status: Vec::with_capacity(points.len()),
            args: Vec::with_capacity(points.len()),
            widenings: Vec::with_capacity(points.len()),
            points,
        };
        for r in results {
            out.values.push(r.value);
            out.status.push(r.status);
            out.args.push(r.arg);
            out.widenings.push(r.widenings);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Value at a point of the sample, matched by exact coordinates.
    pub fn get(&self, p: &[T]) -> Option<ExtReal<T>> {
        let k = key(p);
        self.points.iter().position(|q| key(q) == k).map(|i| self.values[i])
    }

    /// Smallest value and the first index attaining it.
    pub fn min(&self) -> Option<(ExtReal<T>, usize)> {
        let mut best: Option<(ExtReal<T>, usize)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, i));
            }
        }
        best
    }

    pub fn finite_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Largest `|self − other|` over shared points (same point order).
    pub fn sup_distance(&self, other: &SampledFn<T>) -> T {
        self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max(a.distance(*b)))
    }
}

/// Points of `grid` that lie in `g`'s set `C`.
pub fn c_points<T: Scalar>(g: &CouplingFn<T>, cgrid: &GridSpec<T>) -> Result<Vec<Vec<T>>> {
    if cgrid.dim() != g.m {
        return Err(Error::Dimension { expected: g.m, got: cgrid.dim() });
    }
    cgrid.check_cap()?;
    let pts: Vec<Vec<T>> = cgrid.points().into_iter().filter(|p| g.c.contains(p)).collect();
    if pts.is_empty() {
        return Err(Error::InvalidGrid("no grid point lies in C".into()));
    }
    Ok(pts)
}

/// `f^g(x*) = sup_x g(x, x*) − f(x)` at one dual point.
pub fn conjugate_at<T: Scalar>(f: &ProperFn<T>, g: &CouplingFn<T>, xstar: &[T], xgrid: &GridSpec<T>) -> Result<OptResult<T>> {
    if xgrid.dim() != f.dim() || f.dim() != g.n {
        return Err(Error::Dimension { expected: g.n, got: xgrid.dim() });
    }
    let r = optimize_over_grid(|x: &[T]| Ok(g.eval(x, xstar)?.sub_lower(f.eval(x)?)), xgrid, Mode::Sup)?;
    if r.status == Status::EmptyDomain {
        return Err(Error::EmptyDomain);
    }
    Ok(r)
}

/// `f^g` on the points of `cgrid ∩ C`. Divergent inner suprema are `+∞`
/// with status [`Status::Divergent`].
pub fn g_conjugate<T: Scalar>(
    f: &ProperFn<T>,
    g: &CouplingFn<T>,
    cgrid: &GridSpec<T>,
    xgrid: &GridSpec<T>,
) -> Result<SampledFn<T>> {
    let points = c_points(g, cgrid)?;
    g_conjugate_on(f, g, points, xgrid)
}

/// `f^g` on explicit dual points (all assumed in `C`).
pub fn g_conjugate_on<T: Scalar>(
    f: &ProperFn<T>,
    g: &CouplingFn<T>,
    points: Vec<Vec<T>>,
    xgrid: &GridSpec<T>,
) -> Result<SampledFn<T>> {
    xgrid.check_cap()?;
    let results: Vec<OptResult<T>> = points.par_iter().map(|s| conjugate_at(f, g, s, xgrid)).collect::<Result<_>>()?;
    Ok(SampledFn::from_results(points, results))
}

/// `f^gg(x) = sup_{x* ∈ C-sample} g(x, x*) − f^g(x*)`.
pub fn biconjugate_at<T: Scalar>(g: &CouplingFn<T>, fg: &SampledFn<T>, x: &[T]) -> Result<OptResult<T>> {
    let index: Vec<Vec<T>> = (0..fg.len()).map(|i| vec![T::from_usize_lossy(i)]).collect();
    let r = optimize_over_points(
        |i: &[T]| {
            let i = i[0].to_usize().expect("index");
            Ok(g.eval(x, &fg.points[i])?.sub_lower(fg.values[i]))
        },
        &index,
        Mode::Sup,
    )?;
    let arg = r.arg.as_ref().map(|i| fg.points[i[0].to_usize().expect("index")].clone());
    Ok(OptResult { arg, ..r })
}

/// `f^gg` on the lattice points of `xgrid`.
pub fn g_biconjugate<T: Scalar>(g: &CouplingFn<T>, fg: &SampledFn<T>, xgrid: &GridSpec<T>) -> Result<SampledFn<T>> {
    xgrid.check_cap()?;
    let points = xgrid.points();
    let results: Vec<OptResult<T>> = points.par_iter().map(|x| biconjugate_at(g, fg, x)).collect::<Result<_>>()?;
    Ok(SampledFn::from_results(points, results))
}

/// `γ(x, x*) = f(x) + f^g(x*)` with `+∞` dominating, and `+∞` off `C`.
#[derive(Debug, Clone)]
pub struct GammaFn<T> {
    pub f: ProperFn<T>,
    pub g: CouplingFn<T>,
    pub fg: SampledFn<T>,
    pub xgrid: GridSpec<T>,
    index: HashMap<Vec<u64>, usize>,
}

impl<T: Scalar> GammaFn<T> {
    pub fn new(f: ProperFn<T>, g: CouplingFn<T>, fg: SampledFn<T>, xgrid: GridSpec<T>) -> Self {
        let index = fg.points.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
        Self { f, g, fg, xgrid, index }
    }

    /// Computes `f^g` on `cgrid` and wraps it.
    pub fn build(f: ProperFn<T>, g: CouplingFn<T>, cgrid: &GridSpec<T>, xgrid: GridSpec<T>) -> Result<Self> {
        let fg = g_conjugate(&f, &g, cgrid, &xgrid)?;
        Ok(Self::new(f, g, fg, xgrid))
    }

    pub fn n(&self) -> usize {
        self.g.n
    }

    pub fn m(&self) -> usize {
        self.g.m
    }

    /// `f^g(x*)`: the stored value on sampled points, computed otherwise.
    pub fn fg_at(&self, xstar: &[T]) -> Result<ExtReal<T>> {
        if !self.g.c.contains(xstar) {
            return Ok(ExtReal::PosInf);
        }
        match self.index.get(&key(xstar)) {
            Some(&i) => Ok(self.fg.values[i]),
            None => Ok(conjugate_at(&self.f, &self.g, xstar, &self.xgrid)?.value),
        }
    }

    pub fn eval(&self, x: &[T], xstar: &[T]) -> Result<ExtReal<T>> {
        if !self.g.c.contains(xstar) {
            return Ok(ExtReal::PosInf);
        }
        Ok(self.f.eval(x)?.add_upper(self.fg_at(xstar)?))
    }
}

pub fn gamma_eval<T: Scalar>(gamma: &GammaFn<T>, x: &[T], xstar: &[T]) -> Result<ExtReal<T>> {
    gamma.eval(x, xstar)
}

/// Outcome of [`membership_ff`].
#[derive(Debug, Clone, PartialEq)]
pub struct Membership<T> {
    pub member: bool,
    pub reason: Option<String>,
    pub fg_proper: bool,
    pub inf_f: OptResult<T>,
    pub inf_fg: ExtReal<T>,
    pub inf_gamma: ExtReal<T>,
}

/// `g ∈ 𝓕_f`: `f^g` is finite somewhere on the C-grid and `inf γ` is zero
/// within `tol`. Since `γ` is a sum, `inf γ = inf f ⊕ inf f^g`.
pub fn membership_ff<T: Scalar>(f: &ProperFn<T>, fg: &SampledFn<T>, xgrid: &GridSpec<T>, tol: T) -> Result<Membership<T>> {
    let inf_f = optimize_over_grid(|x: &[T]| f.eval(x), xgrid, Mode::Inf)?;
    if inf_f.status == Status::EmptyDomain {
        return Err(Error::EmptyDomain);
    }
    let inf_fg = fg.min().map_or(ExtReal::PosInf, |(v, _)| v);
    let fg_proper = fg.finite_count() > 0;
    let inf_gamma = inf_f.value.add_upper(inf_fg);
    let tol_e = ExtReal::finite(tol);
    let reason = if !fg_proper {
        Some("f^g is +inf at every grid point".to_string())
    } else if inf_gamma < -tol_e {
        Some(format!("inf gamma = {inf_gamma} is negative"))
    } else if inf_gamma > tol_e {
        Some(format!("inf gamma = {inf_gamma}"))
    } else {
        None
    };
    Ok(Membership { member: reason.is_none(), reason, fg_proper, inf_f, inf_fg, inf_gamma })
}

/// Convenience form computing `f^g` first.
pub fn membership_ff_grids<T: Scalar>(
    f: &ProperFn<T>,
    g: &CouplingFn<T>,
    cgrid: &GridSpec<T>,
    xgrid: &GridSpec<T>,
    tol: T,
) -> Result<Membership<T>> {
    let fg = g_conjugate(f, g, cgrid, xgrid)?;
    membership_ff(f, &fg, xgrid, tol)
}

/// Outcome of [`duality_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport<T> {
    pub membership: Membership<T>,
    pub inf_f: ExtReal<T>,
    /// `false` when the infimum of `f` is only approached under widening.
    pub inf_f_attained: bool,
    pub argmin_f: Option<Vec<T>>,
    pub inf_fg: ExtReal<T>,
    pub inf_fgg: ExtReal<T>,
    /// `|inf f + inf f^g| ≤ tol`.
    pub no_gap: bool,
    /// `|inf f − inf f^gg| ≤ tol`.
    pub biconjugate_inf: bool,
    /// `Some(ok)` when `f` attains its minimum: `f^gg(x₀) ≤ inf f^gg + tol`.
    pub minimizer_transfer: Option<bool>,
}

impl<T: Scalar> DualityReport<T> {
    pub fn passed(&self) -> bool {
        self.membership.member && self.no_gap && self.biconjugate_inf && self.minimizer_transfer != Some(false)
    }
}

/// Zero-gap identities `inf f = −inf f^g = inf f^gg` and minimizer transfer.
pub fn duality_report<T: Scalar>(
    f: &ProperFn<T>,
    g: &CouplingFn<T>,
    cgrid: &GridSpec<T>,
    xgrid: &GridSpec<T>,
    tol: T,
) -> Result<DualityReport<T>> {
    let fg = g_conjugate(f, g, cgrid, xgrid)?;
    let membership = membership_ff(f, &fg, xgrid, tol)?;
    let inf_f = membership.inf_f.clone();
    let inf_fg = membership.inf_fg;
    let fgg = optimize_over_grid(|x: &[T]| Ok(biconjugate_at(g, &fg, x)?.value), xgrid, Mode::Inf)?;
    let attained = inf_f.status == Status::Attained && !inf_f.improves_under_widening();
    let (no_gap, biconjugate_inf, minimizer_transfer) = if membership.member {
        let no_gap = inf_f.value.add_upper(inf_fg).distance(ExtReal::zero()) <= tol;
        let bi = inf_f.value.distance(fgg.value) <= tol;
        let transfer = if attained {
            let x0 = inf_f.arg.as_ref().expect("attained has arg");
            let at = biconjugate_at(g, &fg, x0)?.value;
            Some(at <= fgg.value.add_upper(ExtReal::finite(tol)))
        } else {
            None
        };
        (no_gap, bi, transfer)
    } else {
        (false, false, None)
    };
    Ok(DualityReport {
        inf_f: inf_f.value,
        inf_f_attained: attained,
        argmin_f: if attained { inf_f.arg.clone() } else { None },
        inf_fg,
        inf_fgg: fgg.value,
        no_gap,
        biconjugate_inf,
        minimizer_transfer,
        membership,
    })
}

/// Outcome of [`dual_attainment`].
#[derive(Debug, Clone, PartialEq)]
pub enum DualAttainment<T> {
    /// `x̄*` minimizes `f^g` on the C-grid; `l_star_zero = −inf f^g` and
    /// `l(x̄*) + l*(0) ≤ tol`.
    Solved { xstar: Vec<T>, value: ExtReal<T>, l_star_zero: ExtReal<T>, ri_hypothesis: &'static str },
    Unattained { inf_fg: ExtReal<T>, widened_inf: ExtReal<T> },
}

/// Searches the C-grid for a solution of the dual `min f^g`. Among
/// `tol`-optimal points the one of least norm wins, then the smallest grid
/// index. Unattained when doubling the C-box lowers the minimum by more than
/// `tol`.
pub fn dual_attainment<T: Scalar>(
    f: &ProperFn<T>,
    g: &CouplingFn<T>,
    cgrid: &GridSpec<T>,
    xgrid: &GridSpec<T>,
    tol: T,
) -> Result<DualAttainment<T>> {
    let fg = g_conjugate(f, g, cgrid, xgrid)?;
    let (inf_fg, _) = fg.min().ok_or(Error::EmptyDomain)?;
    let wider = cgrid.clone().with_box(cgrid.bbox.doubled());
    let fg_wide = g_conjugate(f, g, &wider, xgrid)?;
    let (widened_inf, _) = fg_wide.min().ok_or(Error::EmptyDomain)?;
    if inf_fg.is_pos_inf() || widened_inf.add_upper(ExtReal::finite(tol)) < inf_fg {
        return Ok(DualAttainment::Unattained { inf_fg, widened_inf });
    }
    let threshold = inf_fg.add_upper(ExtReal::finite(tol));
    let mut best: Option<usize> = None;
    for (i, &v) in fg.values.iter().enumerate() {
        if v <= threshold && best.is_none_or(|b| norm(&fg.points[i]) < norm(&fg.points[b])) {
            best = Some(i);
        }
    }
    let i = best.expect("the minimizer itself qualifies");
    Ok(DualAttainment::Solved {
        xstar: fg.points[i].clone(),
        value: fg.values[i],
        l_star_zero: -inf_fg,
        ri_hypothesis: "assumed",
    })
}

/// Per-`k` row of [`closure_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureStep<T> {
    pub k: usize,
    pub member: bool,
    pub sup_f_dist: T,
    pub sup_g_dist: T,
    pub sup_conj_dist: T,
    /// `sup|f_k^{g_k} − f^g| ≤ sup|g_k − g| + sup|f_k − f| + tol`.
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureReport<T> {
    pub steps: Vec<ClosureStep<T>>,
    pub hypotheses_hold: bool,
    pub failed_hypothesis: Option<String>,
    pub limit_member: bool,
    pub conjugates_converge: bool,
}

impl<T> ClosureReport<T> {
    pub fn passed(&self) -> bool {
        self.hypotheses_hold && self.limit_member && self.conjugates_converge
    }
}

fn nonincreasing<T: Scalar>(v: &[T], tol: T) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + tol)
}

/// Runs the closure theorem on families `f_k → f`, `g_k → g`: checks the
/// hypotheses (membership for each `k`, sup-distances shrinking), the
/// conclusion `g ∈ 𝓕_f`, and uniform convergence of the conjugates.
#[allow(clippy::too_many_arguments)]
pub fn closure_experiment<T, FF, GF>(
    f_family: FF,
    g_family: GF,
    f: &ProperFn<T>,
    g: &CouplingFn<T>,
    k_max: usize,
    cgrid: &GridSpec<T>,
    xgrid: &GridSpec<T>,
    tol: T,
) -> Result<ClosureReport<T>>
where
    T: Scalar,
    FF: Fn(usize) -> ProperFn<T>,
    GF: Fn(usize) -> CouplingFn<T>,
{
    let xs = xgrid.points();
    let cs = c_points(g, cgrid)?;
    let fg = g_conjugate_on(f, g, cs.clone(), xgrid)?;
    let mut steps = Vec::with_capacity(k_max);
    let mut failed = None;
    for k in 1..=k_max {
        let (fk, gk) = (f_family(k), g_family(k));
        let fkg = g_conjugate_on(&fk, &gk, cs.clone(), xgrid)?;
        let member = membership_ff(&fk, &fkg, xgrid, tol)?.member;
        if !member && failed.is_none() {
            failed = Some(format!("g_{k} is not a member for f_{k}"));
        }
        let sup_f_dist = xs
            .par_iter()
            .map(|x| Ok(fk.eval(x)?.distance(f.eval(x)?)))
            .collect::<Result<Vec<T>>>()?
            .into_iter()
            .fold(T::zero(), T::max);
        let sup_g_dist = xs
            .par_iter()
            .map(|x| cs.iter().map(|s| Ok(gk.eval(x, s)?.distance(g.eval(x, s)?))).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .fold(T::zero(), T::max);
        let sup_conj_dist = fkg.sup_distance(&fg);
        steps.push(ClosureStep {
            k,
            member,
            sup_f_dist,
            sup_g_dist,
            sup_conj_dist,
            within_bound: sup_conj_dist <= sup_g_dist + sup_f_dist + tol,
        });
    }
    let fd: Vec<T> = steps.iter().map(|s| s.sup_f_dist).collect();
    let gd: Vec<T> = steps.iter().map(|s| s.sup_g_dist).collect();
    let cd: Vec<T> = steps.iter().map(|s| s.sup_conj_dist).collect();
    if failed.is_none() && !(nonincreasing(&fd, tol) && nonincreasing(&gd, tol)) {
        failed = Some("sup-distances do not decrease".into());
    }
    let limit_member = membership_ff(f, &fg, xgrid, tol)?.member;
    let conjugates_converge = nonincreasing(&cd, tol) && steps.iter().all(|s| s.within_bound);
    Ok(ClosureReport { hypotheses_hold: failed.is_none(), failed_hypothesis: failed, steps, limit_member, conjugates_converge })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{builtin_coupling, BuiltinParams};
    use crate::sets::SetSpec;

    fn sq() -> ProperFn<f64> {
        ProperFn::new(1, "x^2", SetSpec::Full(1), |x: &[f64]| Ok(ExtReal::finite(x[0] * x[0])))
    }

    fn grids() -> (GridSpec<f64>, GridSpec<f64>) {
        (GridSpec::interval(-2.0, 2.0, 41).unwrap(), GridSpec::interval(-20.0, 20.0, 81).unwrap())
    }

    #[test]
    fn square_product_conjugate() {
        let g = builtin_coupling("square_product", &BuiltinParams::dim(1)).unwrap();
        let (cg, xg) = grids();
        let fg = g_conjugate(&sq(), &g, &cg, &xg).unwrap();
        for (p, (v, st)) in fg.points.iter().zip(fg.values.iter().zip(&fg.status)) {
            if p[0].abs() <= 1.0 {
                assert_eq!(*v, ExtReal::zero(), "{p:?}");
            } else {
                assert_eq!((*v, *st), (ExtReal::PosInf, Status::Divergent), "{p:?}");
            }
        }
        let gamma = GammaFn::new(sq(), g, fg, xg);
        assert_eq!(gamma.eval(&[3.0], &[0.5]).unwrap(), ExtReal::finite(9.0));
        assert_eq!(gamma.eval(&[3.0], &[2.0]).unwrap(), ExtReal::PosInf);
        // Off-sample dual point computed on demand.
        assert_eq!(gamma.eval(&[3.0], &[0.33]).unwrap(), ExtReal::finite(9.0));
    }

    #[test]
    fn empty_c_grid_is_an_error() {
        let g = builtin_coupling("reciprocal", &BuiltinParams::dim(1)).unwrap();
        let cg = GridSpec::interval(-2.0, -1.0, 5).unwrap();
        assert!(matches!(g_conjugate(&sq(), &g, &cg, &grids().1), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn grid_missing_domain_is_an_error() {
        let g = builtin_coupling("square_product", &BuiltinParams::dim(1)).unwrap();
        let f = ProperFn::new(1, "ind", SetSpec::Full(1), |x: &[f64]| {
            Ok(if x[0] > 100.0 { ExtReal::zero() } else { ExtReal::PosInf })
        });
        let (cg, _) = grids();
        let xg = GridSpec::interval(-1.0, 1.0, 5).unwrap().with_doublings(0);
        assert!(matches!(g_conjugate(&f, &g, &cg, &xg), Err(Error::EmptyDomain)));
    }

    #[test]
    fn improper_f_is_rejected() {
        let f = ProperFn::new(1, "neg", SetSpec::Full(1), |_: &[f64]| Ok(ExtReal::NegInf));
        assert!(matches!(f.eval(&[0.0]), Err(Error::Improper)));
    }

    #[test]
    fn duality_and_attainment_square_product() {
        let g = builtin_coupling("square_product", &BuiltinParams::dim(1)).unwrap();
        let (cg, xg) = grids();
        let rep = duality_report(&sq(), &g, &cg, &xg, 1e-6).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.minimizer_transfer, Some(true));
        match dual_attainment(&sq(), &g, &cg, &xg, 1e-6).unwrap() {
            DualAttainment::Solved { xstar, .. } => assert_eq!(xstar, vec![0.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closure_family() {
        let g = builtin_coupling("square_product", &BuiltinParams::dim(1)).unwrap();
        let (cg, xg) = grids();
        let rep = closure_experiment(
            |k| {
                let e = 1.0 / k as f64;
                ProperFn::new(1, "x^2+1/k", SetSpec::Full(1), move |x: &[f64]| Ok(ExtReal::finite(x[0] * x[0] + e)))
            },
            |_| builtin_coupling("square_product", &BuiltinParams::dim(1)).unwrap(),
            &sq(),
            &g,
            4,
            &cg,
            &xg,
            1e-6,
        )
        .unwrap();
        assert!(rep.passed(), "{rep:?}");
        for s in &rep.steps {
            assert!((s.sup_conj_dist - 1.0 / s.k as f64).abs() < 1e-12);
        }
    }
}
