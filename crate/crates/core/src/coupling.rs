//! Proper functions, candidate G-couplings with an explicit `C`, validators
//! for the defining conditions, and the catalog of named couplings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::funcdsl::ExprFn;
use crate::grid::{optimize_over_grid, BoundingBox, GridSpec, Mode};
use crate::sampling::{rng, uniform_in_box, uniform_in_set};
use crate::scalar::{dot, norm, Scalar};
use crate::sets::SetSpec;

type Eval1<T> = Arc<dyn Fn(&[T]) -> Result<ExtReal<T>> + Send + Sync>;
type Eval2<T> = Arc<dyn Fn(&[T], &[T]) -> Result<ExtReal<T>> + Send + Sync>;

/// A function `ℝⁿ → ℝ ∪ {+∞}` with a declared effective-domain hint.
#[derive(Clone)]
pub struct ProperFn<T> {
    n: usize,
    name: String,
    dom_hint: SetSpec<T>,
    f: Eval1<T>,
}

impl<T: fmt::Debug> fmt::Debug for ProperFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProperFn").field("n", &self.n).field("name", &self.name).field("dom_hint", &self.dom_hint).finish()
    }
}

impl<T: Scalar> ProperFn<T> {
    pub fn new<F>(n: usize, name: impl Into<String>, dom_hint: SetSpec<T>, f: F) -> Self
    where
        F: Fn(&[T]) -> Result<ExtReal<T>> + Send + Sync + 'static,
    {
        Self { n, name: name.into(), dom_hint, f: Arc::new(f) }
    }

    /// Wraps a parsed expression whose variables are `x1..xn`.
    pub fn from_expr(expr: ExprFn, dom_hint: SetSpec<T>) -> Self {
        let n = expr.arity();
        let name = expr.to_canonical();
        Self::new(n, name, dom_hint, move |x| expr.eval(x))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dom_hint(&self) -> &SetSpec<T> {
        &self.dom_hint
    }

    /// Evaluates `f`; a `−∞` value is rejected as improper.
    pub fn eval(&self, x: &[T]) -> Result<ExtReal<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        match (self.f)(x)? {
            ExtReal::NegInf => Err(Error::Improper),
            v => Ok(v),
        }
    }

    /// Properness on a grid: finite somewhere on `grid ∩ dom_hint`, never `−∞`.
    pub fn check_proper(&self, grid: &GridSpec<T>) -> Result<()> {
        grid.check_cap()?;
        let points: Vec<Vec<T>> = grid.points().into_iter().filter(|p| self.dom_hint.contains(p)).collect();
        let values: Vec<ExtReal<T>> = points.par_iter().map(|p| self.eval(p)).collect::<Result<_>>()?;
        if values.iter().any(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::EmptyDomain)
        }
    }
}

/// A candidate G-coupling `g: ℝⁿ × ℝᵐ → [0, +∞]` together with its set `C`.
#[derive(Clone)]
pub struct CouplingFn<T> {
    pub n: usize,
    pub m: usize,
    pub c: SetSpec<T>,
    pub name: String,
    pub params: BTreeMap<String, String>,
    g: Eval2<T>,
}

impl<T: fmt::Debug> fmt::Debug for CouplingFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CouplingFn")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("c", &self.c)
            .field("params", &self.params)
            .finish()
    }
}

impl<T: Scalar> CouplingFn<T> {
    pub fn new<F>(n: usize, m: usize, c: SetSpec<T>, name: impl Into<String>, g: F) -> Self
    where
        F: Fn(&[T], &[T]) -> Result<ExtReal<T>> + Send + Sync + 'static,
    {
        Self { n, m, c, name: name.into(), params: BTreeMap::new(), g: Arc::new(g) }
    }

    /// Coupling from an expression over `x1..xn, s1..sm` (the `s` block is
    /// the dual variable). Points with `x* ∉ C` evaluate to `+∞`.
    pub fn from_expr(expr: ExprFn, n: usize, m: usize, c: SetSpec<T>) -> Result<Self> {
        if expr.arity() != n + m {
            return Err(Error::Dimension { expected: n + m, got: expr.arity() });
        }
        let name = expr.to_canonical();
        let cc = c.clone();
        Ok(Self::new(n, m, c, name, move |x, s| {
            if !cc.contains(s) {
                return Ok(ExtReal::PosInf);
            }
            let env: Vec<T> = x.iter().chain(s).copied().collect();
            expr.eval(&env)
        }))
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn eval(&self, x: &[T], xstar: &[T]) -> Result<ExtReal<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        if xstar.len() != self.m {
            return Err(Error::Dimension { expected: self.m, got: xstar.len() });
        }
        (self.g)(x, xstar)
    }

    /// Pulls the primal argument back through `map`: `(x, x*) ↦ g(map(x), x*)`.
    pub fn compose<F>(self, n: usize, name: impl Into<String>, map: F) -> Self
    where
        F: Fn(&[T]) -> Result<Vec<T>> + Send + Sync + 'static,
    {
        let inner = self.g.clone();
        Self {
            n,
            m: self.m,
            c: self.c,
            name: name.into(),
            params: self.params,
            g: Arc::new(move |x, s| inner(&map(x)?, s)),
        }
    }
}

/// Parameters for [`builtin_coupling`].
#[derive(Debug, Clone)]
pub struct BuiltinParams<T> {
    /// Primal dimension.
    pub n: usize,
    /// Dual dimension, where the coupling allows `m ≠ n`.
    pub m: Option<usize>,
    /// The set `K` for `cone_inner` and `ik_shifted`.
    pub k: Option<SetSpec<T>>,
    /// Effective domain of `f` for `norm_on_dom`.
    pub dom: Option<SetSpec<T>>,
}

impl<T: Scalar> BuiltinParams<T> {
    pub fn dim(n: usize) -> Self {
        Self { n, m: None, k: None, dom: None }
    }

    pub fn with_k(mut self, k: SetSpec<T>) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_dom(mut self, dom: SetSpec<T>) -> Self {
        self.dom = Some(dom);
        self
    }
}

/// One catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub formula: &'static str,
    pub set: &'static str,
    pub anchor: &'static str,
}

pub const BUILTINS: [BuiltinInfo; 9] = [
    BuiltinInfo {
        name: "exp",
        formula: "exp(sum x + sum x*)",
        set: "C = R^m",
        anchor: "coupling without zeros whose infimum is approached at infinity",
    },
    BuiltinInfo {
        name: "square_product",
        formula: "<x, x*>^2",
        set: "C = R^n",
        anchor: "worked example f = x^2, member coupling",
    },
    BuiltinInfo {
        name: "reciprocal",
        formula: "1/(<x, x*> + 1) if x >= 0; 0 if x not >= 0; +inf if x* not >= 0",
        set: "C = R^n_+",
        anchor: "worked example with a duality gap, not a member",
    },
    BuiltinInfo {
        name: "norm_on_dom",
        formula: "||x*|| if x in dom f; 0 otherwise",
        set: "C = R^m",
        anchor: "non-emptiness of the member family, f^g = ||x*|| - inf f",
    },
    BuiltinInfo {
        name: "max_dot",
        formula: "max_i x*_i x_i on R^n_+ x R^n_+; 0 if x not >= 0; +inf if x* not >= 0",
        set: "C = R^n_+",
        anchor: "increasing positively homogeneous coupling <x*, x>+",
    },
    BuiltinInfo {
        name: "min_dot",
        formula: "min over {i : x*_i > 0} of x*_i x_i (0 if empty); 0 if x not >= 0; +inf if x* not >= 0",
        set: "C = R^n_+",
        anchor: "increasing positively homogeneous coupling <x*, x>-",
    },
    BuiltinInfo {
        name: "lagrangian_g1",
        formula: "<l*, y> if y >= 0; 0 if y not >= 0; +inf if l* not >= 0",
        set: "C = R^m_+",
        anchor: "classical Lagrangian duality via g(x, l*) = g1(-h(x), l*)",
    },
    BuiltinInfo {
        name: "cone_inner",
        formula: "<x*, y> if y in K; 0 if y not in K; +inf if x* not in K+",
        set: "C = K+",
        anchor: "equilibrium dual with zero duality gap (dual cone coupling)",
    },
    BuiltinInfo {
        name: "ik_shifted",
        formula: "<x*, y> - i_K(x*) if y in K; 0 if y not in K; +inf if x* not in K*",
        set: "C = K*",
        anchor: "equilibrium dual with zero duality gap and solution certificate",
    },
];

fn nonneg<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|&c| c >= T::zero())
}

fn require_square(p: &BuiltinParams<impl Scalar>) -> Result<usize> {
    match p.m {
        Some(m) if m != p.n => Err(Error::Dimension { expected: p.n, got: m }),
        _ => Ok(p.n),
    }
}

/// Minimum of `x*_i x_i` over `I₊(x*) = {i : x*_i > 0}`; zero when empty.
pub fn min_dot_value<T: Scalar>(x: &[T], xstar: &[T]) -> T {
    x.iter()
        .zip(xstar)
        .filter(|(_, &s)| s > T::zero())
        .map(|(&a, &s)| a * s)
        .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))))
        .unwrap_or_else(T::zero)
}

pub fn max_dot_value<T: Scalar>(x: &[T], xstar: &[T]) -> T {
    x.iter().zip(xstar).map(|(&a, &s)| a * s).fold(T::neg_infinity(), T::max)
}

/// The named coupling `name` with its exact piecewise definition.
pub fn builtin_coupling<T: Scalar>(name: &str, p: &BuiltinParams<T>) -> Result<CouplingFn<T>> {
    let n = p.n;
    if n == 0 {
        return Err(Error::Dimension { expected: 1, got: 0 });
    }
    let g = match name {
        "exp" => {
            let m = p.m.unwrap_or(n);
            CouplingFn::new(n, m, SetSpec::Full(m), name, move |x: &[T], s: &[T]| {
                let t = x.iter().chain(s).fold(T::zero(), |a, &b| a + b);
                ExtReal::checked(t.exp(), "exp")
            })
        }
        "square_product" => {
            let n = require_square(p)?;
            CouplingFn::new(n, n, SetSpec::Full(n), name, move |x: &[T], s: &[T]| {
                let d = dot(x, s);
                ExtReal::checked(d * d, "square_product")
            })
        }
        "reciprocal" => {
            let n = require_square(p)?;
            CouplingFn::new(n, n, SetSpec::Orthant(n), name, move |x: &[T], s: &[T]| {
                if !nonneg(s) {
                    Ok(ExtReal::PosInf)
                } else if nonneg(x) {
                    ExtReal::checked(T::one() / (dot(x, s) + T::one()), "reciprocal")
                } else {
                    Ok(ExtReal::zero())
                }
            })
        }
        "norm_on_dom" => {
            let dom = p
                .dom
                .clone()
                .ok_or_else(|| Error::MissingParameter { name: name.into(), param: "dom".into() })?;
            if dom.dim() != n {
                return Err(Error::Dimension { expected: n, got: dom.dim() });
            }
            let m = p.m.unwrap_or(n);
            CouplingFn::new(n, m, SetSpec::Full(m), name, move |x: &[T], s: &[T]| {
                Ok(if dom.contains(x) { ExtReal::finite(norm(s)) } else { ExtReal::zero() })
            })
        }
        "max_dot" | "min_dot" | "lagrangian_g1" => {
            let n = require_square(p)?;
            let which = name.to_string();
            CouplingFn::new(n, n, SetSpec::Orthant(n), name, move |x: &[T], s: &[T]| {
                if !nonneg(s) {
                    return Ok(ExtReal::PosInf);
                }
                if !nonneg(x) {
                    return Ok(ExtReal::zero());
                }
                Ok(ExtReal::finite(match which.as_str() {
                    "max_dot" => max_dot_value(x, s),
                    "min_dot" => min_dot_value(x, s),
                    _ => dot(s, x),
                }))
            })
        }
        "cone_inner" | "ik_shifted" => {
            let k = p.k.clone().ok_or_else(|| Error::MissingParameter { name: name.into(), param: "K".into() })?;
            k.validate()?;
            let n = k.dim();
            if n != p.n {
                return Err(Error::Dimension { expected: p.n, got: n });
            }
            if name == "cone_inner" {
                let c = k.dual_cone();
                let cc = c.clone();
                CouplingFn::new(n, n, c, name, move |y: &[T], s: &[T]| {
                    if !cc.contains(s) {
                        Ok(ExtReal::PosInf)
                    } else if k.contains(y) {
                        Ok(ExtReal::finite(dot(s, y)))
                    } else {
                        Ok(ExtReal::zero())
                    }
                })
            } else {
                if k.support_inf(&vec![T::zero(); n]).is_none() {
                    return Err(Error::Precondition(format!("no closed-form support function for {k:?}")));
                }
                let c = k.support_domain();
                CouplingFn::new(n, n, c, name, move |y: &[T], s: &[T]| {
                    let ik = k.support_inf(s).unwrap_or(ExtReal::NegInf);
                    match ik {
                        ExtReal::NegInf => Ok(ExtReal::PosInf),
                        ExtReal::Finite(ik) if k.contains(y) => ExtReal::checked(dot(s, y) - ik, "ik_shifted"),
                        _ => Ok(ExtReal::zero()),
                    }
                })
            }
        }
        other => return Err(Error::UnknownCoupling(other.to_string())),
    };
    let mut g = g.with_param("n", n);
    if let Some(m) = p.m {
        g = g.with_param("m", m);
    }
    Ok(g)
}

/// Outcome of [`validate_coupling`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    pub pairs_checked: usize,
    /// `g = +∞ ⟺ x* ∉ C` on every sampled pair.
    pub d1: bool,
    pub d1_violation: Option<(Vec<T>, Vec<T>)>,
    /// `g ≥ −tol` on every sampled pair with `x* ∈ C`.
    pub nonnegative: bool,
    pub min_on_c: ExtReal<T>,
    /// Infimum of `g` over the (widened) grid is at most `tol`.
    pub d2: bool,
    pub d2_inf: ExtReal<T>,
    pub d2_widenings: usize,
    pub c_convex: bool,
    pub segments_checked: usize,
    pub midpoint_convex: bool,
    pub d3_violation: Option<(Vec<T>, Vec<T>, Vec<T>)>,
    /// Convexity of `C` and midpoint convexity of `g(x, ·)`; lower
    /// semicontinuity is not part of this verdict.
    pub d3: bool,
    pub lsc: &'static str,
}

impl<T> ValidationReport<T> {
    pub fn is_g_coupling(&self) -> bool {
        self.d1 && self.d2 && self.nonnegative
    }
}

pub const DEFAULT_SEGMENTS: usize = 200;

/// Checks D1, D2, nonnegativity and the convexity part of D3 on a joint
/// grid over `ℝⁿ × ℝᵐ` (`grid.dim() == n + m`).
pub fn validate_coupling<T: Scalar>(
    g: &CouplingFn<T>,
    grid: &GridSpec<T>,
    tol: T,
    seed: u64,
) -> Result<ValidationReport<T>> {
    g.c.validate()?;
    if grid.dim() != g.n + g.m {
        return Err(Error::Dimension { expected: g.n + g.m, got: grid.dim() });
    }
    grid.check_cap()?;
    let n = g.n;
    let points = grid.points();
    let evals: Vec<(bool, ExtReal<T>)> = points
        .par_iter()
        .map(|p| {
            let (x, s) = p.split_at(n);
            Ok((g.c.contains(s), g.eval(x, s)?))
        })
        .collect::<Result<_>>()?;

    let mut d1_violation = None;
    let mut min_on_c = ExtReal::PosInf;
    for (p, &(in_c, v)) in points.iter().zip(&evals) {
        if v.is_pos_inf() == in_c && d1_violation.is_none() {
            let (x, s) = p.split_at(n);
            d1_violation = Some((x.to_vec(), s.to_vec()));
        }
        if in_c {
            min_on_c = min_on_c.min(v);
        }
    }
    let nonnegative = min_on_c >= ExtReal::finite(-tol);

    let inf = optimize_over_grid(
        |p: &[T]| {
            let (x, s) = p.split_at(n);
            g.eval(x, s)
        },
        grid,
        Mode::Inf,
    )?;
    let d2 = inf.value <= ExtReal::finite(tol);

    // Midpoint convexity of g(x, ·) along random segments of C.
    let (xbox, sbox) = split_box(&grid.bbox, n);
    let mut r = rng(seed);
    let mut segments = Vec::with_capacity(DEFAULT_SEGMENTS);
    for _ in 0..DEFAULT_SEGMENTS {
        let x = uniform_in_box(&mut r, &xbox);
        let a = uniform_in_set(&mut r, &g.c, &sbox, 1000);
        let b = uniform_in_set(&mut r, &g.c, &sbox, 1000);
        if let (Some(a), Some(b)) = (a, b) {
            segments.push((x, a, b));
        }
    }
    let half = T::lit(0.5);
    let mut d3_violation = None;
    for (x, a, b) in &segments {
        let mid: Vec<T> = a.iter().zip(b).map(|(&u, &v)| (u + v) * half).collect();
        let (ga, gb, gm) = (g.eval(x, a)?, g.eval(x, b)?, g.eval(x, &mid)?);
        let ok = match (ga, gb, gm) {
            (ExtReal::Finite(ga), ExtReal::Finite(gb), ExtReal::Finite(gm)) => {
                let rhs = (ga + gb) * half;
                gm <= rhs + tol * (T::one() + rhs.abs())
            }
            (_, _, gm) => gm <= ga.max(gb),
        };
        if !ok {
            d3_violation = Some((x.clone(), a.clone(), b.clone()));
            break;
        }
    }
    let midpoint_convex = d3_violation.is_none();
    // Every SetSpec kind is convex.
    let c_convex = true;

    Ok(ValidationReport {
        pairs_checked: points.len(),
        d1: d1_violation.is_none(),
        d1_violation,
        nonnegative,
        min_on_c,
        d2,
        d2_inf: inf.value,
        d2_widenings: inf.widenings,
        c_convex,
        segments_checked: segments.len(),
        midpoint_convex,
        d3_violation,
        d3: c_convex && midpoint_convex,
        lsc: "untested",
    })
}

pub(crate) fn split_box<T: Scalar>(bbox: &BoundingBox<T>, n: usize) -> (BoundingBox<T>, BoundingBox<T>) {
    let a = BoundingBox::new(bbox.lo()[..n].to_vec(), bbox.hi()[..n].to_vec()).expect("valid sub-box");
    let b = BoundingBox::new(bbox.lo()[n..].to_vec(), bbox.hi()[n..].to_vec()).expect("valid sub-box");
    (a, b)
}

/// Outcome of [`check_star_properties`].
#[derive(Debug, Clone, PartialEq)]
pub struct StarReport<T> {
    pub samples: usize,
    pub homogeneous_x: bool,
    pub homogeneous_xstar: bool,
    pub increasing_x: bool,
    pub increasing_xstar: bool,
    /// First failure as `(property, x, x*, t)`.
    pub first_failure: Option<(String, Vec<T>, Vec<T>, T)>,
}

impl<T> StarReport<T> {
    pub fn homogeneous(&self) -> bool {
        self.homogeneous_x && self.homogeneous_xstar
    }

    pub fn increasing(&self) -> bool {
        self.increasing_x && self.increasing_xstar
    }
}

/// Sample triples `(x, x*, t)` in `ℝⁿ₊ × ℝⁿ₊ × (0, 4]`. The first triple is
/// `(1, 0, 2)`.
pub fn star_samples<T: Scalar>(n: usize, count: usize, radius: T, seed: u64) -> Vec<(Vec<T>, Vec<T>, T)> {
    let bbox = BoundingBox::new(vec![T::zero(); n], vec![radius; n]).expect("radius ≥ 0");
    let mut r = rng(seed);
    let mut out = vec![(vec![T::one(); n], vec![T::zero(); n], T::lit(2.0))];
    while out.len() < count {
        let x = uniform_in_box(&mut r, &bbox);
        let s = uniform_in_box(&mut r, &bbox);
        let t: f64 = rand::Rng::gen_range(&mut r, 0.05..4.0);
        out.push((x, s, T::lit(t)));
    }
    out
}

/// Positive homogeneity and monotonicity in both slots on `ℝⁿ₊ × ℝⁿ₊`.
/// Monotonicity compares each sample with its componentwise increase by
/// `t`.
pub fn check_star_properties<T: Scalar>(g: &CouplingFn<T>, samples: &[(Vec<T>, Vec<T>, T)], tol: T) -> Result<StarReport<T>> {
    let close = |a: ExtReal<T>, b: ExtReal<T>| match (a, b) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= tol * (T::one() + a.abs().max(b.abs())),
        (a, b) => a == b,
    };
    let le = |a: ExtReal<T>, b: ExtReal<T>| match (a, b) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b + tol * (T::one() + b.abs()),
        (a, b) => a <= b,
    };
    let scale = |v: &[T], t: T| v.iter().map(|&c| c * t).collect::<Vec<T>>();
    let shift = |v: &[T], t: T| v.iter().map(|&c| c + t).collect::<Vec<T>>();
    let mut rep = StarReport {
        samples: samples.len(),
        homogeneous_x: true,
        homogeneous_xstar: true,
        increasing_x: true,
        increasing_xstar: true,
        first_failure: None,
    };
    for (x, s, t) in samples {
        let base = g.eval(x, s)?;
        let checks = [
            ("homogeneous_x", close(g.eval(&scale(x, *t), s)?, mul_ext(base, *t))),
            ("homogeneous_xstar", close(g.eval(x, &scale(s, *t))?, mul_ext(base, *t))),
            ("increasing_x", le(base, g.eval(&shift(x, *t), s)?)),
            ("increasing_xstar", le(base, g.eval(x, &shift(s, *t))?)),
        ];
        for (prop, ok) in checks {
            if ok {
                continue;
            }
            match prop {
                "homogeneous_x" => rep.homogeneous_x = false,
                "homogeneous_xstar" => rep.homogeneous_xstar = false,
                "increasing_x" => rep.increasing_x = false,
                _ => rep.increasing_xstar = false,
            }
            if rep.first_failure.is_none() {
                rep.first_failure = Some((prop.to_string(), x.clone(), s.clone(), *t));
            }
        }
    }
    Ok(rep)
}

fn mul_ext<T: Scalar>(v: ExtReal<T>, t: T) -> ExtReal<T> {
    match v {
        ExtReal::Finite(v) => ExtReal::finite(v * t),
        other => other,
    }
}

/// Verdict of [`pseudo_monotone_scan`].
#[derive(Debug, Clone, PartialEq)]
pub enum PseudoMonotone<T> {
    /// No violating pair; `max_g` is the largest sampled value on `C × C`
    /// and `null_on_samples` records whether it is at most `tol`.
    PseudoMonotone { max_g: ExtReal<T>, null_on_samples: bool },
    /// `g(x, y) ≥ 0` but `g(y, x) > tol`.
    Violation { x: Vec<T>, y: Vec<T>, g_xy: ExtReal<T>, g_yx: ExtReal<T> },
}

/// Pairs in `C × C`: the origin pair and the all-ones pair first (when in
/// `C`), then seeded uniform samples from `C ∩ [-radius, radius]ⁿ`.
pub fn cc_samples<T: Scalar>(c: &SetSpec<T>, count: usize, radius: T, seed: u64) -> Vec<(Vec<T>, Vec<T>)> {
    let n = c.dim();
    let mut out = Vec::with_capacity(count);
    for p in [vec![T::zero(); n], vec![T::one(); n]] {
        if c.contains(&p) && out.len() < count {
            out.push((p.clone(), p));
        }
    }
    let bbox = c.grid_box(radius);
    let mut r = rng(seed);
    let mut misses = 0;
    while out.len() < count && misses < 100 * count.max(1) {
        match (uniform_in_set(&mut r, c, &bbox, 100), uniform_in_set(&mut r, c, &bbox, 100)) {
            (Some(a), Some(b)) => out.push((a, b)),
            _ => misses += 1,
        }
    }
    out
}

/// Scans sampled pairs of `C × C`, in both orders, for pseudo-monotonicity;
/// when it holds, also reports whether `g` vanishes there.
pub fn pseudo_monotone_scan<T: Scalar>(g: &CouplingFn<T>, samples: &[(Vec<T>, Vec<T>)], tol: T) -> Result<PseudoMonotone<T>> {
    if g.n != g.m {
        return Err(Error::Dimension { expected: g.n, got: g.m });
    }
    let mut max_g = ExtReal::NegInf;
    for (x, y) in samples {
        let gxy = g.eval(x, y)?;
        let gyx = g.eval(y, x)?;
        if gxy >= ExtReal::zero() && gyx > ExtReal::finite(tol) {
            return Ok(PseudoMonotone::Violation { x: x.clone(), y: y.clone(), g_xy: gxy, g_yx: gyx });
        }
        if gyx >= ExtReal::zero() && gxy > ExtReal::finite(tol) {
            return Ok(PseudoMonotone::Violation { x: y.clone(), y: x.clone(), g_xy: gyx, g_yx: gxy });
        }
        max_g = max_g.max(gxy).max(gyx);
    }
    Ok(PseudoMonotone::PseudoMonotone { max_g, null_on_samples: max_g <= ExtReal::finite(tol) })
}
