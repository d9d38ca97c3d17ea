//! `paper-suite`: closed-form regressions for the worked examples and the
//! stated lemmas, run on pinned grids and tolerances.

use std::sync::Arc;

use gcoupling::complementarity::{cp_dual_cross_check, cp_zdgp_equivalence};
use gcoupling::conjugate::{biconjugate_at, DualAttainment};
use gcoupling::coupling::{cc_samples, check_star_properties, pseudo_monotone_scan, star_samples, PseudoMonotone};
use gcoupling::duality_schemes::classic_recovery_check;
use gcoupling::equilibrium::{certificate_sweep, ep_gap, ConeData};
use gcoupling::recession::{recession_directions_analytic, zero_set, DirectionGrid, RecessionOptions};
use gcoupling::{
    builtin_coupling, compactness_verdict, dual_attainment, duality_report, epvip_gap, g_biconjugate, g_conjugate,
    jemlws_certificate, lagrangian_dual_report, lcp_enumerate, membership_ff, parse, perturbation_report,
    validate_coupling, vip_gap, zdgp_check, BoundingBox, BuiltinParams, CPInstance, ConstrainedProblem, CouplingFn,
    EPInstance, EPVIPInstance, ExtReal, GammaFn, GridSpec, PerturbationScheme, ProperFn, Rational, SchemeGrids,
    SetSpec, VIPInstance, ZdgpCoupling,
};
use num_traits::{ToPrimitive, Zero};

use crate::error::Result;
use crate::numeric::Numeric;
use crate::report::{Report, Table, Value};

/// Result of one regression.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    /// Headline deviation, compared against `tolerance` where one applies.
    pub metric: Option<f64>,
    pub tolerance: Option<f64>,
    pub note: String,
}

impl Outcome {
    fn within(metric: f64, tolerance: f64, note: impl Into<String>) -> Self {
        Self { passed: metric <= tolerance, metric: Some(metric), tolerance: Some(tolerance), note: note.into() }
    }

    fn flag(passed: bool, note: impl Into<String>) -> Self {
        Self { passed, metric: None, tolerance: None, note: note.into() }
    }

    fn and(self, other: Outcome) -> Self {
        let note = match (self.note.is_empty(), other.note.is_empty()) {
            (true, _) => other.note,
            (_, true) => self.note,
            _ => format!("{}; {}", self.note, other.note),
        };
        let (metric, tolerance) = match (self.metric, other.metric) {
            (Some(a), Some(b)) if self.tolerance == other.tolerance => (Some(a.max(b)), self.tolerance),
            (Some(_), _) => (self.metric, self.tolerance),
            _ => (other.metric, other.tolerance),
        };
        Self { passed: self.passed && other.passed, metric, tolerance, note }
    }
}

pub type Regression = (&'static str, fn(&Numeric) -> Result<Outcome>);

pub const REGRESSIONS: [Regression; 26] = [
    ("expression 1/(x1*x2+1) at (0, 5) is 1", reciprocal_expression),
    ("exp coupling satisfies D1, D2, D3", exp_coupling_valid),
    ("square_product coupling satisfies D1, D2, D3", square_product_valid),
    ("lagrangian_g1 vanishes when y is not >= 0", lagrangian_g1_branch),
    ("example 1: f^g closed form and f^gg = x^2", example1_conjugates),
    ("example 1: gamma(x, 0.5) = x^2, gamma(x, 2) = +inf", example1_gamma),
    ("example 1: member", example1_member),
    ("example 2: f^g = 1, not a member, inf gamma = 1", example2_gap),
    ("example 3: f^g closed form, member", example3_conjugate),
    ("example 3: dual attained at 0", example3_dual),
    ("norm_on_dom: f^g = |x*| - inf f, member", norm_on_dom),
    ("duality identities for member couplings", duality_identities),
    ("f^gg <= f and weak duality on the worked examples", biconjugate_below),
    ("recession: example 1 has R = {0} and compact zeros", recession_example1),
    ("recession: example 3 has R = quadrant and no zeros", recession_example3),
    ("exponential gamma has an empty zero set", exp_zero_set_empty),
    ("classic coupling gives f^g = h*", classic_coupling),
    ("perturbation: weak duality and h* routes agree", perturbation),
    ("Lagrangian bridge: min x^2 s.t. x >= 1", lagrangian_bridge),
    ("EP gap: +inf off K, nonnegative on K", ep_gap_branches),
    ("EP certificate at 0.5 and certificate iff solution", ep_certificate),
    ("ZDGP couplings and the Fenchel lower bound", zdgp),
    ("VIP gap convex, EPVIP gap <= 0", vip_and_epvip),
    ("LCP solution, closed-form dual, F = T^-1(K+)", lcp),
    ("pseudo-monotone couplings are null on samples", pseudo_monotone),
    ("increasing positively homogeneous <x*, x>+ and <x*, x>-", star_couplings),
];

/// Pinned settings; only the caps follow the caller.
pub fn suite_numeric(caller: &Numeric) -> Numeric {
    Numeric { point_cap: caller.point_cap, divergence_cap: caller.divergence_cap, ..Numeric::default() }
}

pub fn paper_suite(caller: &Numeric) -> Report {
    let num = suite_numeric(caller);
    let mut rep = Report::new("paper-suite", Value::map().with("regressions", REGRESSIONS.len()), num.to_value());
    let mut t = Table::new(&["check", "passed", "metric", "tolerance", "note"]);
    for (name, f) in REGRESSIONS {
        let o = f(&num).unwrap_or_else(|e| Outcome::flag(false, format!("error: {e}")));
        t.push(vec![name.into(), o.passed.into(), o.metric.into(), o.tolerance.into(), o.note.clone().into()]);
        rep.check(name, o.passed, Value::map().with("metric", o.metric).with("tolerance", o.tolerance).with("note", o.note));
    }
    rep.table("regressions", t);
    rep
}

/// Plain-text pass/fail table.
pub fn render_table(rep: &Report) -> String {
    let width = rep.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in &rep.checks {
        out.push_str(&format!("{:<width$}  {}\n", c.name, if c.passed { "PASS" } else { "FAIL" }));
    }
    let passed = rep.checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} passed\n", rep.checks.len()));
    out
}

fn iv(num: &Numeric, lo: f64, hi: f64, points: usize) -> Result<GridSpec<f64>> {
    Ok(GridSpec::interval(lo, hi, points)?.with_limits(num.limits()))
}

fn boxed(num: &Numeric, lo: Vec<f64>, hi: Vec<f64>, points: usize) -> Result<GridSpec<f64>> {
    Ok(GridSpec::new(BoundingBox::new(lo, hi)?, points)?.with_limits(num.limits()))
}

fn square() -> ProperFn<f64> {
    ProperFn::new(1, "x^2", SetSpec::Full(1), |x: &[f64]| Ok(ExtReal::finite(x[0] * x[0])))
}

fn half_square() -> ProperFn<f64> {
    ProperFn::new(1, "x^2 on x >= 0", SetSpec::Orthant(1), |x: &[f64]| {
        Ok(if x[0] >= 0.0 { ExtReal::finite(x[0] * x[0]) } else { ExtReal::PosInf })
    })
}

fn exp_f() -> ProperFn<f64> {
    ProperFn::new(1, "exp(x)", SetSpec::Full(1), |x: &[f64]| ExtReal::checked(x[0].exp(), "exp"))
}

fn coupling(name: &str) -> Result<CouplingFn<f64>> {
    Ok(builtin_coupling(name, &BuiltinParams::dim(1))?)
}

struct Example {
    f: ProperFn<f64>,
    g: CouplingFn<f64>,
    c: GridSpec<f64>,
    x: GridSpec<f64>,
}

fn example1(num: &Numeric) -> Result<Example> {
    Ok(Example { f: square(), g: coupling("square_product")?, c: iv(num, -2.0, 2.0, 201)?, x: iv(num, -2.0, 2.0, 201)? })
}

fn example2(num: &Numeric) -> Result<Example> {
    Ok(Example { f: half_square(), g: coupling("reciprocal")?, c: iv(num, 0.0, 4.0, 201)?, x: iv(num, -2.0, 2.0, 201)? })
}

fn example3(num: &Numeric) -> Result<Example> {
    Ok(Example { f: exp_f(), g: coupling("exp")?, c: iv(num, -2.0, 2.0, 201)?, x: iv(num, -20.0, 20.0, 201)? })
}

/// Largest finite-branch deviation from `want`, and whether every infinite
/// branch matched exactly.
fn closed_form(points: &[Vec<f64>], values: &[ExtReal<f64>], want: impl Fn(&[f64]) -> ExtReal<f64>) -> (f64, bool) {
    let mut max = 0.0f64;
    let mut inf_ok = true;
    for (p, &v) in points.iter().zip(values) {
        let w = want(p);
        if w.is_finite() {
            max = max.max(v.distance(w));
        } else {
            inf_ok &= v == w;
        }
    }
    (max, inf_ok)
}

fn reciprocal_expression(_: &Numeric) -> Result<Outcome> {
    let e = parse("1/(x1*x2+1)", &["x1", "x2"])?;
    let v = e.eval(&[0.0, 5.0])?;
    Ok(Outcome::within(v.distance(ExtReal::finite(1.0)), 0.0, format!("value {v}")))
}

fn validated(name: &str, num: &Numeric) -> Result<Outcome> {
    let g = coupling(name)?;
    let joint = boxed(num, vec![-2.0, -2.0], vec![2.0, 2.0], 41)?;
    let v = validate_coupling(&g, &joint, num.tol, num.seed)?;
    Ok(Outcome::flag(v.d1 && v.d2 && v.nonnegative && v.d3, format!("d1 {} d2 {} d3 {} inf {}", v.d1, v.d2, v.d3, v.d2_inf)))
}

fn exp_coupling_valid(num: &Numeric) -> Result<Outcome> {
    validated("exp", num)
}

fn square_product_valid(num: &Numeric) -> Result<Outcome> {
    validated("square_product", num)
}

fn lagrangian_g1_branch(_: &Numeric) -> Result<Outcome> {
    let g = builtin_coupling::<f64>("lagrangian_g1", &BuiltinParams::dim(2))?;
    let v = g.eval(&[1.0, -1.0], &[1.0, 1.0])?;
    Ok(Outcome::within(v.distance(ExtReal::zero()), 0.0, format!("value {v}")))
}

fn example1_conjugates(num: &Numeric) -> Result<Outcome> {
    let e = example1(num)?;
    let fg = g_conjugate(&e.f, &e.g, &e.c, &e.x)?;
    let (d, inf_ok) = closed_form(&fg.points, &fg.values, |s| if s[0].abs() <= 1.0 { ExtReal::zero() } else { ExtReal::PosInf });
    let fgg = g_biconjugate(&e.g, &fg, &e.x)?;
    let (dd, _) = closed_form(&fgg.points, &fgg.values, |x| ExtReal::finite(x[0] * x[0]));
    Ok(Outcome::within(d, 1e-6, "f^g finite branch")
        .and(Outcome::flag(inf_ok, if inf_ok { "" } else { "divergent branch mismatch" }))
        .and(Outcome::within(dd, 1e-4, format!("f^gg deviation {dd:.3e}"))))
}

fn example1_gamma(num: &Numeric) -> Result<Outcome> {
    let e = example1(num)?;
    let gamma = GammaFn::build(e.f, e.g, &e.c, e.x)?;
    let mut max = 0.0f64;
    let mut inf_ok = true;
    for i in 0..=8 {
        let x = -2.0 + 0.5 * i as f64;
        max = max.max(gamma.eval(&[x], &[0.5])?.distance(ExtReal::finite(x * x)));
        inf_ok &= gamma.eval(&[x], &[2.0])? == ExtReal::PosInf;
    }
    Ok(Outcome::within(max, 1e-6, "").and(Outcome::flag(inf_ok, if inf_ok { "" } else { "gamma(x, 2) finite" })))
}

fn example1_member(num: &Numeric) -> Result<Outcome> {
    let e = example1(num)?;
    let fg = g_conjugate(&e.f, &e.g, &e.c, &e.x)?;
    let m = membership_ff(&e.f, &fg, &e.x, num.tol)?;
    Ok(Outcome::flag(m.member, format!("inf gamma {}", m.inf_gamma)))
}

fn example2_gap(num: &Numeric) -> Result<Outcome> {
    let e = example2(num)?;
    let fg = g_conjugate(&e.f, &e.g, &e.c, &e.x)?;
    let (d, _) = closed_form(&fg.points, &fg.values, |_| ExtReal::finite(1.0));
    let m = membership_ff(&e.f, &fg, &e.x, num.tol)?;
    let dg = m.inf_gamma.distance(ExtReal::finite(1.0));
    Ok(Outcome::within(d.max(dg), 1e-3, format!("inf gamma {}", m.inf_gamma))
        .and(Outcome::flag(!m.member, if m.member { "reported member" } else { "not member" })))
}

fn example3_conjugate(num: &Numeric) -> Result<Outcome> {
    let e = example3(num)?;
    let fg = g_conjugate(&e.f, &e.g, &e.c, &e.x)?;
    let (d, inf_ok) = closed_form(&fg.points, &fg.values, |s| if s[0] <= 0.0 { ExtReal::zero() } else { ExtReal::PosInf });
    let m = membership_ff(&e.f, &fg, &e.x, num.tol)?;
    Ok(Outcome::within(d, 1e-6, "")
        .and(Outcome::flag(inf_ok, if inf_ok { "" } else { "divergent branch mismatch" }))
        .and(Outcome::flag(m.member, if m.member { "member" } else { "not member" })))
}

fn example3_dual(num: &Numeric) -> Result<Outcome> {
    let e = example3(num)?;
    Ok(match dual_attainment(&e.f, &e.g, &e.c, &e.x, num.tol)? {
        DualAttainment::Solved { xstar, .. } => Outcome::flag(xstar == [0.0], format!("x* = {:?}", xstar)),
        DualAttainment::Unattained { inf_fg, .. } => Outcome::flag(false, format!("unattained, inf f^g {inf_fg}")),
    })
}

fn norm_on_dom(num: &Numeric) -> Result<Outcome> {
    let mut out = Outcome::flag(true, "");
    for n in [1usize, 2] {
        let f = ProperFn::new(n, "|x|^2", SetSpec::Full(n), |x: &[f64]| Ok(ExtReal::finite(x.iter().map(|v| v * v).sum())));
        let g = builtin_coupling("norm_on_dom", &BuiltinParams::dim(n).with_dom(SetSpec::Full(n)))?;
        let p = if n == 1 { 201 } else { 21 };
        let grid = GridSpec::centered(n, 2.0, p)?.with_limits(num.limits());
        let fg = g_conjugate(&f, &g, &grid, &grid)?;
        let (d, _) = closed_form(&fg.points, &fg.values, |s| ExtReal::finite(s.iter().map(|v| v * v).sum::<f64>().sqrt()));
        let m = membership_ff(&f, &fg, &grid, num.tol)?;
        out = out
            .and(Outcome::within(d, 4.0 * f64::EPSILON, ""))
            .and(Outcome::flag(m.member, if m.member { "" } else { "not member" }));
    }
    Ok(out)
}

fn duality_identities(num: &Numeric) -> Result<Outcome> {
    let n1 = Example {
        f: square(),
        g: builtin_coupling("norm_on_dom", &BuiltinParams::dim(1).with_dom(SetSpec::Full(1)))?,
        c: iv(num, -2.0, 2.0, 201)?,
        x: iv(num, -2.0, 2.0, 201)?,
    };
    let mut out = Outcome::flag(true, "");
    for (name, e) in [("square_product", example1(num)?), ("exp", example3(num)?), ("norm_on_dom", n1)] {
        let r = duality_report(&e.f, &e.g, &e.c, &e.x, num.tol)?;
        let d = r.inf_f.add_upper(r.inf_fg).distance(ExtReal::zero()).max(r.inf_f.distance(r.inf_fgg));
        let transfer_ok = r.minimizer_transfer != Some(false);
        out = out
            .and(Outcome::within(d, 1e-6, ""))
            .and(Outcome::flag(r.membership.member && transfer_ok, if transfer_ok { "" } else { "transfer failed" }))
            .and(Outcome::flag(
                name == "exp" || r.minimizer_transfer == Some(true),
                if name == "exp" { "" } else { "transfer checked" },
            ));
    }
    Ok(out)
}

fn biconjugate_below(num: &Numeric) -> Result<Outcome> {
    let mut violations = 0usize;
    for e in [example1(num)?, example2(num)?, example3(num)?] {
        let fg = g_conjugate(&e.f, &e.g, &e.c, &e.x)?;
        for x in e.x.points().iter().step_by(10) {
            let fx = e.f.eval(x)?;
            if biconjugate_at(&e.g, &fg, x)?.value > fx.add_upper(ExtReal::finite(num.tol)) {
                violations += 1;
            }
            violations += fg.values.iter().filter(|v| fx.add_upper(**v) < ExtReal::finite(-num.tol)).count();
        }
    }
    Ok(Outcome::flag(violations == 0, format!("{violations} violations")))
}

fn gamma_example1(num: &Numeric) -> Result<GammaFn<f64>> {
    let e = example1(num)?;
    Ok(GammaFn::build(e.f, e.g, &e.c, e.x)?)
}

fn gamma_example3(num: &Numeric) -> Result<GammaFn<f64>> {
    Ok(GammaFn::build(exp_f(), coupling("exp")?, &iv(num, -2.0, 2.0, 5)?, iv(num, -20.0, 20.0, 201)?)?)
}

fn recession_example1(num: &Numeric) -> Result<Outcome> {
    let rep = compactness_verdict(&gamma_example1(num)?, &BoundingBox::centered(2, 2.0)?, 201, &RecessionOptions::default())?;
    Ok(Outcome::flag(
        rep.passed() && rep.r_is_zero && rep.m_nonempty && rep.m_compact,
        format!("R = {{0}}: {}, m compact: {}", rep.r_is_zero, rep.m_compact),
    ))
}

fn recession_example3(num: &Numeric) -> Result<Outcome> {
    let rep = compactness_verdict(&gamma_example3(num)?, &BoundingBox::centered(2, 200.0)?, 401, &RecessionOptions::default())?;
    let grid = Arc::new(DirectionGrid::new(2, 1.0)?);
    let quadrant = SetSpec::halfspaces(2, vec![(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)])?;
    let exact = recession_directions_analytic(&quadrant, grid)?;
    let quad = rep.r.value.approx_eq(&exact, 5.0);
    Ok(Outcome::flag(
        rep.passed() && !rep.r_is_zero && !rep.m_nonempty && quad,
        format!("R = quadrant: {quad}, m empty: {}", !rep.m_nonempty),
    ))
}

fn exp_zero_set_empty(num: &Numeric) -> Result<Outcome> {
    let zs = zero_set(&gamma_example3(num)?, &BoundingBox::centered(2, 20.0)?, 81, num.tol)?;
    Ok(Outcome::flag(
        zs.cloud.is_empty() && zs.approached_at_infinity,
        format!("min gamma {} approached at infinity: {}", zs.min_gamma, zs.approached_at_infinity),
    ))
}

fn scheme(text: &str) -> Result<PerturbationScheme<f64>> {
    let f = ProperFn::from_expr(parse("x1^2", &["x1"])?, SetSpec::Full(1));
    Ok(PerturbationScheme::from_expr(parse(text, &["x1", "u1"])?, 1, 1, f)?)
}

fn scheme_grids(num: &Numeric) -> Result<SchemeGrids<f64>> {
    Ok(SchemeGrids {
        x: iv(num, -2.0, 2.0, 41)?,
        u: iv(num, -2.0, 2.0, 41)?,
        ustar: [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&v| vec![v]).collect(),
    })
}

fn classic_coupling(num: &Numeric) -> Result<Outcome> {
    let r = classic_recovery_check(&square(), &scheme("(x1 - u1)^2")?, &scheme_grids(num)?, num.tol)?;
    Ok(Outcome::within(r.max_distance, num.tol, "").and(Outcome::flag(r.passed(), format!("member {}", r.membership.member))))
}

fn perturbation(num: &Numeric) -> Result<Outcome> {
    let mut out = Outcome::flag(true, "");
    for text in ["(x1 - u1)^2", "x1^2 + u1*x1"] {
        let r = perturbation_report(&scheme(text)?, &scheme_grids(num)?, num.tol)?;
        out = out
            .and(Outcome::within(r.max_route_distance, 1e-6, ""))
            .and(Outcome::flag(r.weak_duality && r.gap_fn_nonnegative != Some(false), format!("{text}: -beta {} alpha {}", -r.beta, r.alpha.value)));
    }
    Ok(out)
}

fn lagrangian_bridge(num: &Numeric) -> Result<Outcome> {
    let h = ProperFn::from_expr(parse("1 - x1", &["x1"])?, SetSpec::Full(1));
    let p = ConstrainedProblem::new(square(), vec![h])?;
    let r = lagrangian_dual_report(&p, &iv(num, -20.0, 20.0, 401)?, &iv(num, 0.0, 20.0, 101)?, 1e-4)?;
    let primal = r.alpha.value.distance(ExtReal::finite(1.0));
    let dual = r.dual_value.distance(ExtReal::finite(1.0));
    let gap = r.gap.distance(ExtReal::zero());
    Ok(Outcome::within(r.max_distance, 1e-10, format!("engine vs direct at {} multipliers", r.engine.len()))
        .and(Outcome::flag(primal.max(dual).max(gap) <= 1e-4, format!("primal {} dual {} gap {}", r.alpha.value, r.dual_value, r.gap))))
}

fn unit() -> Result<SetSpec<f64>> {
    Ok(SetSpec::Box(BoundingBox::new(vec![0.0], vec![1.0])?))
}

fn ep_instance() -> Result<EPInstance<f64>> {
    Ok(EPInstance::new(unit()?, "(x - 0.5)(y - x)", |x: &[f64], y: &[f64]| Ok(ExtReal::finite((x[0] - 0.5) * (y[0] - x[0]))))?)
}

fn ep_gap_branches(num: &Numeric) -> Result<Outcome> {
    let inst = ep_instance()?;
    let yg = iv(num, 0.0, 1.0, 101)?;
    let off = ep_gap(&inst, &[2.0], &yg)?;
    let mut min = ExtReal::PosInf;
    for y in yg.points() {
        min = min.min(ep_gap(&inst, &y, &yg)?);
    }
    Ok(Outcome::flag(off == ExtReal::PosInf && min >= ExtReal::zero(), format!("g(2) = {off}, min on K {min}")))
}

fn ep_certificate(num: &Numeric) -> Result<Outcome> {
    let inst = ep_instance()?;
    let yg = iv(num, 0.0, 1.0, 101)?;
    let ks = ConeData::new(unit()?)?.k_star_grid(4.0, 161)?.with_limits(num.limits());
    let cert = jemlws_certificate(&inst, &[0.5], &ks, &yg, 1e-6)?;
    let at_zero = matches!(&cert, gcoupling::equilibrium::Certificate::Certified { xstar, .. } if xstar.as_slice() == [0.0]);
    let xbars = iv(num, 0.0, 1.0, 21)?.points();
    let rows = certificate_sweep(&inst, &xbars, &ks, &yg, 1e-6)?;
    let bad = rows.iter().filter(|r| r.solves != r.certified).count();
    Ok(Outcome::flag(at_zero, if at_zero { "x* = 0" } else { "no certificate at 0.5 with x* = 0" })
        .and(Outcome::flag(bad == 0, format!("{bad}/{} sweep disagreements", rows.len()))))
}

fn zdgp(num: &Numeric) -> Result<Outcome> {
    let inst = ep_instance()?;
    let yg = iv(num, 0.0, 1.0, 101)?;
    let cg = iv(num, -4.0, 4.0, 161)?;
    let sample: Vec<Vec<f64>> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&v| vec![v]).collect();
    let mut out = Outcome::flag(true, "");
    for c in [ZdgpCoupling::ConeInner, ZdgpCoupling::IkShifted] {
        let r = zdgp_check(&inst, c, &sample, &yg, &cg, 1e-4)?;
        let fenchel = r.rows.iter().filter_map(|row| row.fenchel_min).all(|v| v >= ExtReal::finite(-num.tol));
        out = out
            .and(Outcome::within(r.max_abs_sum.to_f64(), 1e-4, ""))
            .and(Outcome::flag(fenchel, if fenchel { "" } else { "Fenchel bound violated" }));
    }
    Ok(out)
}

fn vip_and_epvip(num: &Numeric) -> Result<Outcome> {
    let sample = boxed(num, vec![0.0, 0.0], vec![2.0, 2.0], 11)?.points();
    let inst = VIPInstance::new(SetSpec::Orthant(2), vec![vec![2.0, 1.0], vec![-1.0, 1.0]], vec![-1.0, 0.5], &sample)?;
    let gaps: Vec<f64> = sample.iter().map(|x| vip_gap(&inst, x).map(|v| v.to_f64())).collect::<gcoupling::Result<_>>()?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..sample.len() {
        for j in (i + 1..sample.len()).step_by(7) {
            let mid: Vec<f64> = sample[i].iter().zip(&sample[j]).map(|(a, b)| 0.5 * (a + b)).collect();
            worst = worst.max(vip_gap(&inst, &mid)?.to_f64() - 0.5 * (gaps[i] + gaps[j]));
        }
    }
    let ep = EPVIPInstance::new(1, square(), |x: &[f64]| Ok(vec![x[0] - 1.0]), |y: &[f64], x: &[f64]| Ok(vec![y[0] - x[0]]))?;
    let yg = iv(num, -4.0, 4.0, 81)?;
    let mut max = ExtReal::NegInf;
    for x in iv(num, -3.0, 3.0, 13)?.points() {
        max = max.max(epvip_gap(&ep, &x, &yg)?);
    }
    Ok(Outcome::within(worst.max(0.0), 1e-9, "VIP midpoint excess")
        .and(Outcome::flag(max <= ExtReal::finite(num.tol), format!("max EPVIP gap {max}"))))
}

fn lcp(num: &Numeric) -> Result<Outcome> {
    let r = |v: i64| Rational::from_integer(v.into());
    let m = vec![vec![r(2), r(1)], vec![r(1), r(2)]];
    let x = lcp_enumerate(&m, &[r(-1), r(-1)], &Rational::zero())?;
    let third = Rational::new(1.into(), 3.into());
    let exact = x.as_deref() == Some(&[third.clone(), third][..]);
    let xf: Vec<f64> = x.unwrap_or_default().iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let err = xf.iter().map(|v| (v - 1.0 / 3.0).abs()).fold(0.0, f64::max);

    let inst = CPInstance::lcp(vec![vec![2.0, 1.0], vec![1.0, 2.0]], vec![-1.0, -1.0])?;
    let yg = boxed(num, vec![0.0; 2], vec![4.0; 2], 21)?;
    let cross = cp_dual_cross_check(&inst, 100, 2.0, num.seed, &yg, 1e-6)?;
    let pts = boxed(num, vec![0.0; 2], vec![1.0; 2], 5)?.points();
    let cg = boxed(num, vec![0.0; 2], vec![2.0; 2], 5)?;
    let eq = cp_zdgp_equivalence(&inst, &pts, &boxed(num, vec![0.0; 2], vec![2.0; 2], 11)?, &cg, 1e-9)?;

    let infeasible = lcp_enumerate(&[vec![r(-1)]], &[r(-1)], &Rational::zero())?.is_none();
    Ok(Outcome::flag(exact && err <= 1e-12, format!("x = {xf:?}"))
        .and(Outcome::within(cross.max_distance, 1e-6, format!("{} dual pairs", cross.pairs.len())))
        .and(Outcome::flag(eq.f_agrees && eq.dual_agrees, if eq.f_agrees { "" } else { "F mismatch" }))
        .and(Outcome::flag(infeasible, if infeasible { "" } else { "infeasible LCP solved" })))
}

fn pseudo_monotone(num: &Numeric) -> Result<Outcome> {
    let wedge = SetSpec::halfspaces(2, vec![(vec![1.0, 1.0], 0.0)])?;
    let p = BuiltinParams::dim(2);
    let mut gs = Vec::new();
    for name in ["exp", "square_product", "reciprocal", "max_dot", "min_dot", "lagrangian_g1"] {
        gs.push(builtin_coupling(name, &p)?);
    }
    for k in [SetSpec::Orthant(2), wedge] {
        gs.push(builtin_coupling("cone_inner", &p.clone().with_k(k.clone()))?);
        gs.push(builtin_coupling("ik_shifted", &p.clone().with_k(k))?);
    }
    gs.push(CouplingFn::new(2, 2, SetSpec::Full(2), "zero", |_: &[f64], _: &[f64]| Ok(ExtReal::zero())));
    let (mut pm, mut bad) = (0usize, Vec::new());
    for g in &gs {
        let samples = cc_samples(&g.c, 200, 5.0, num.seed);
        if let PseudoMonotone::PseudoMonotone { null_on_samples, .. } = pseudo_monotone_scan(g, &samples, 1e-9)? {
            pm += 1;
            if !null_on_samples {
                bad.push(g.name.clone());
            }
        }
    }
    Ok(Outcome::flag(bad.is_empty() && pm > 0, format!("{pm} pseudo-monotone, not null: {bad:?}")))
}

fn star_couplings(num: &Numeric) -> Result<Outcome> {
    let samples = star_samples(2, 500, 4.0, num.seed);
    let mut out = Outcome::flag(true, "");
    for name in ["max_dot", "min_dot"] {
        let g = builtin_coupling(name, &BuiltinParams::dim(2))?;
        let r = check_star_properties(&g, &samples, 1e-9)?;
        out = out.and(Outcome::flag(r.homogeneous() && r.increasing(), if r.homogeneous() && r.increasing() { String::new() } else { format!("{name}: {:?}", r.first_failure) }));
    }
    Ok(out)
}
