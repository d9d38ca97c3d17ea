//! Complementarity problems: find `x ∈ K` with `T(x) ∈ K⁺` and
//! `⟨T(x), x⟩ = 0`, posed as the equilibrium problem
//! `f(x, y) = ⟨T(x), y − x⟩` on a closed convex cone `K`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::conjugate::g_conjugate;
use crate::coupling::{builtin_coupling, BuiltinParams};
use crate::equilibrium::{ep_residual, EPInstance};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::funcdsl::ExprFn;
use crate::grid::GridSpec;
use crate::linalg::{solve, subsets_by_size, LinearField};
use crate::sampling::{rng, uniform_in_set};
use crate::scalar::{dot, Scalar};
use crate::sets::SetSpec;

type Map<T> = Arc<dyn Fn(&[T]) -> Result<Vec<T>> + Send + Sync>;

/// Largest dimension accepted by [`lcp_enumerate`].
pub const LCP_MAX_DIM: usize = 20;

/// `T : K → ℝⁿ` on a cone `K`.
#[derive(Clone)]
pub struct CPInstance<T> {
    pub k: SetSpec<T>,
    pub k_plus: SetSpec<T>,
    /// `(M, q)` when `T(x) = Mx + q`.
    pub affine: Option<(Vec<Vec<T>>, Vec<T>)>,
    map: Map<T>,
}

impl<T: fmt::Debug> fmt::Debug for CPInstance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CPInstance").field("k", &self.k).field("affine", &self.affine).finish()
    }
}

impl<T: Scalar> CPInstance<T> {
    pub fn new<F>(k: SetSpec<T>, map: F) -> Result<Self>
    where
        F: Fn(&[T]) -> Result<Vec<T>> + Send + Sync + 'static,
    {
        k.validate()?;
        if !k.is_cone() {
            return Err(Error::InvalidSet(format!("complementarity needs a cone, got {k:?}")));
        }
        Ok(Self { k_plus: k.dual_cone(), k, affine: None, map: Arc::new(map) })
    }

    pub fn affine(k: SetSpec<T>, m: Vec<Vec<T>>, q: Vec<T>) -> Result<Self> {
        let n = k.dim();
        if m.len() != n || q.len() != n {
            return Err(Error::Dimension { expected: n, got: m.len().min(q.len()) });
        }
        if let Some(r) = m.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension { expected: n, got: r.len() });
        }
        let (mm, qq) = (m.clone(), q.clone());
        let mut inst = Self::new(k, move |x| Ok(mm.iter().zip(&qq).map(|(r, &qi)| dot(r, x) + qi).collect()))?;
        inst.affine = Some((m, q));
        Ok(inst)
    }

    /// Linear complementarity on `ℝⁿ₊`.
    pub fn lcp(m: Vec<Vec<T>>, q: Vec<T>) -> Result<Self> {
        Self::affine(SetSpec::Orthant(q.len()), m, q)
    }

    /// Components of `T` as expressions over `x1..xn`.
    pub fn from_exprs(k: SetSpec<T>, exprs: Vec<ExprFn>) -> Result<Self> {
        let n = k.dim();
        if exprs.len() != n {
            return Err(Error::Arity { name: "T".into(), expected: n, got: exprs.len() });
        }
        Self::new(k, move |x| {
            exprs
                .iter()
                .map(|e| e.eval(x)?.as_finite().ok_or_else(|| Error::Domain(format!("`{e}` is not finite"))))
                .collect()
        })
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.len() });
        }
        (self.map)(x)
    }

    /// The equilibrium form `f(x, y) = ⟨T(x), y − x⟩`.
    pub fn as_ep(&self) -> Result<EPInstance<T>> {
        let inst = self.clone();
        EPInstance::new(self.k.clone(), "<T(x), y - x>", move |x, y| {
            let t = inst.apply(x)?;
            let d: Vec<T> = y.iter().zip(x).map(|(&a, &b)| a - b).collect();
            Ok(ExtReal::finite(dot(&t, &d)))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpVerdict<T> {
    pub in_k: bool,
    pub image_in_k_plus: bool,
    pub complementarity: T,
    pub solves: bool,
}

/// `x ∈ K`, `T(x) ∈ K⁺` and `|⟨T(x), x⟩| ≤ tol`.
pub fn cp_check<T: Scalar>(inst: &CPInstance<T>, x: &[T], tol: T) -> Result<CpVerdict<T>> {
    let t = inst.apply(x)?;
    let in_k = inst.k.contains_tol(x, tol);
    let image_in_k_plus = inst.k_plus.contains_tol(&t, tol);
    let complementarity = dot(&t, x);
    Ok(CpVerdict { in_k, image_in_k_plus, complementarity, solves: in_k && image_in_k_plus && complementarity.abs() <= tol })
}

/// Brute-force LCP oracle over active sets `B`, by cardinality then
/// lexicographically: `x_i = 0` off `B`, `(Mx + q)_i = 0` on `B`. Singular
/// subsystems are skipped; the lowest-order hit wins.
pub fn lcp_enumerate<F>(m: &[Vec<F>], q: &[F], tol: &F) -> Result<Option<Vec<F>>>
where
    F: LinearField + Send + Sync,
{
    let n = q.len();
    if n > LCP_MAX_DIM {
        return Err(Error::Precondition(format!("enumeration is limited to n <= {LCP_MAX_DIM}, got {n}")));
    }
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension { expected: n, got: m.len() });
    }
    let neg_tol = -tol.clone();
    let subsets = subsets_by_size(n, n);
    Ok(subsets.par_iter().find_map_first(|b| {
        let a: Vec<Vec<F>> = b.iter().map(|&i| b.iter().map(|&j| m[i][j].clone()).collect()).collect();
        let rhs: Vec<F> = b.iter().map(|&i| -q[i].clone()).collect();
        let xb = solve(a, rhs)?;
        let mut x = vec![F::zero(); n];
        for (&i, v) in b.iter().zip(xb) {
            x[i] = v;
        }
        let w: Vec<F> = (0..n)
            .map(|i| (0..n).fold(q[i].clone(), |s, j| s + m[i][j].clone() * x[j].clone()))
            .collect();
        let comp = (0..n).fold(F::zero(), |s, i| s + w[i].clone() * x[i].clone());
        let ok = x.iter().chain(&w).all(|v| *v >= neg_tol) && comp.abs_val() <= *tol;
        ok.then_some(x)
    }))
}

/// `⟨T(x), x⟩` if `T(x) − x* ∈ K⁺`, else `+∞`.
pub fn cp_dual_closed_form<T: Scalar>(inst: &CPInstance<T>, x: &[T], xstar: &[T]) -> Result<ExtReal<T>> {
    if !inst.k.contains(x) {
        return Err(Error::Infeasible(x.iter().map(|v| v.to_f64_lossy()).collect()));
    }
    if !inst.k_plus.contains(xstar) {
        return Err(Error::Infeasible(xstar.iter().map(|v| v.to_f64_lossy()).collect()));
    }
    let t = inst.apply(x)?;
    let shifted: Vec<T> = t.iter().zip(xstar).map(|(&a, &b)| a - b).collect();
    Ok(if inst.k_plus.contains(&shifted) { ExtReal::finite(dot(&t, x)) } else { ExtReal::PosInf })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCrossCheck<T> {
    pub pairs: Vec<(Vec<T>, Vec<T>)>,
    pub closed_form: Vec<ExtReal<T>>,
    pub engine: Vec<ExtReal<T>>,
    pub max_distance: T,
    pub agree: bool,
}

/// Closed-form dual against the `cone_inner` conjugate of `f̄(x, ·)` at
/// `count` seeded pairs `x ∈ K`, `x* ∈ K⁺` within `radius`.
pub fn cp_dual_cross_check<T: Scalar>(
    inst: &CPInstance<T>,
    count: usize,
    radius: T,
    seed: u64,
    ygrid: &GridSpec<T>,
    tol: T,
) -> Result<DualCrossCheck<T>> {
    let mut r = rng(seed);
    let (kbox, pbox) = (inst.k.grid_box(radius), inst.k_plus.grid_box(radius));
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let x = uniform_in_set(&mut r, &inst.k, &kbox, 10_000).ok_or(Error::EmptyDomain)?;
        let s = uniform_in_set(&mut r, &inst.k_plus, &pbox, 10_000).ok_or(Error::EmptyDomain)?;
        pairs.push((x, s));
    }
    let ep = inst.as_ep()?;
    let g = builtin_coupling("cone_inner", &BuiltinParams::dim(inst.dim()).with_k(inst.k.clone()))?;
    let closed_form: Vec<ExtReal<T>> = pairs.iter().map(|(x, s)| cp_dual_closed_form(inst, x, s)).collect::<Result<_>>()?;
    let engine: Vec<ExtReal<T>> = pairs
        .par_iter()
        .map(|(x, s)| Ok(crate::conjugate::conjugate_at(&ep.fbar(x), &g, s, ygrid)?.value))
        .collect::<Result<_>>()?;
    let max_distance = closed_form.iter().zip(&engine).map(|(a, b)| a.distance(*b)).fold(T::zero(), T::max);
    Ok(DualCrossCheck { pairs, closed_form, engine, agree: max_distance <= tol, max_distance })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpEquivalenceRow<T> {
    pub x: Vec<T>,
    /// `ep_residual(x) > −∞`.
    pub in_f_by_divergence: bool,
    /// `T(x) ∈ K⁺`.
    pub in_f_analytic: bool,
    pub solves: bool,
    /// `inf_{x* ∈ C} f̄_x^g(x*)` under `cone_inner`, for `x ∈ F`.
    pub dual_inf: Option<ExtReal<T>>,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpEquivalenceReport<T> {
    pub rows: Vec<CpEquivalenceRow<T>>,
    /// (a): divergence test agrees with `T⁻¹(K⁺)` everywhere.
    pub f_agrees: bool,
    /// (b): dual infimum `≤ tol` exactly at solutions.
    pub dual_agrees: bool,
}

impl<T> CpEquivalenceReport<T> {
    pub fn passed(&self) -> bool {
        self.f_agrees && self.dual_agrees
    }
}

/// Checks `F = T⁻¹(K⁺)` and that the dual infimum vanishes exactly at
/// solutions, over the points of `points` lying in `K`.
pub fn cp_zdgp_equivalence<T: Scalar>(
    inst: &CPInstance<T>,
    points: &[Vec<T>],
    ygrid: &GridSpec<T>,
    cgrid: &GridSpec<T>,
    tol: T,
) -> Result<CpEquivalenceReport<T>> {
    if inst.affine.is_none() {
        return Err(Error::Precondition("equivalence check needs an affine T".into()));
    }
    let ep = inst.as_ep()?;
    let g = builtin_coupling("cone_inner", &BuiltinParams::dim(inst.dim()).with_k(inst.k.clone()))?;
    let rows: Vec<CpEquivalenceRow<T>> = points
        .iter()
        .filter(|x| inst.k.contains(x))
        .map(|x| {
            let in_f_by_divergence = !ep_residual(&ep, x, ygrid)?.is_neg_inf();
            let verdict = cp_check(inst, x, tol)?;
            let in_f_analytic = verdict.image_in_k_plus;
            let dual_inf = if in_f_analytic {
                let fg = g_conjugate(&ep.fbar(x), &g, cgrid, ygrid)?;
                Some(fg.min().map_or(ExtReal::PosInf, |(v, _)| v))
            } else {
                None
            };
            let dual_ok = match dual_inf {
                Some(v) if verdict.solves => v <= ExtReal::finite(tol),
                Some(v) => v > ExtReal::finite(tol),
                None => true,
            };
            Ok(CpEquivalenceRow {
                x: x.clone(),
                consistent: in_f_by_divergence == in_f_analytic && dual_ok,
                in_f_by_divergence,
                in_f_analytic,
                solves: verdict.solves,
                dual_inf,
            })
        })
        .collect::<Result<_>>()?;
    let f_agrees = rows.iter().all(|r| r.in_f_by_divergence == r.in_f_analytic);
    let dual_agrees = rows.iter().all(|r| r.consistent || r.in_f_by_divergence != r.in_f_analytic);
    Ok(CpEquivalenceReport { rows, f_agrees, dual_agrees })
}
