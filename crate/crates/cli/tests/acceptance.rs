//! Acceptance criteria, one line each. Tolerances are pinned here; oracles are
//! closed forms or independent computations written out below.

#[path = "../../core/tests/suites/properties.rs"]
mod suites;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;

use gcoupling::conjugate::DualAttainment;
use gcoupling::equilibrium::{certificate_sweep, Certificate, ConeData};
use gcoupling::recession::{recession_directions_analytic, DirectionGrid, RecessionOptions};
use gcoupling::{
    builtin_coupling, compactness_verdict, dual_attainment, duality_report, g_biconjugate, g_conjugate,
    jemlws_certificate, lagrangian_dual_report, lcp_enumerate, membership_ff, parse, perturbation_report, zdgp_check,
    BoundingBox, BuiltinParams, CPInstance, ConstrainedProblem, CouplingFn, EPInstance, ExtReal, GammaFn, GridSpec,
    PerturbationScheme, ProperFn, Rational, SchemeGrids, SetSpec, ZdgpCoupling,
};
use num_traits::{ToPrimitive, Zero};

const FINITE_TOL: f64 = 1e-6;
const FGG_TOL: f64 = 1e-4;
const EXAMPLE2_TOL: f64 = 1e-3;
const IDENTITY_TOL: f64 = 1e-6;
const LAGRANGIAN_GAP_TOL: f64 = 1e-4;
const ENGINE_TOL: f64 = 1e-10;
const ROUTE_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-6;
const ZDGP_TOL: f64 = 1e-4;
const LCP_TOL: f64 = 1e-12;
const DUAL_PAIR_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn core<T>(r: gcoupling::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn iv(lo: f64, hi: f64, p: usize) -> GridSpec<f64> {
    GridSpec::interval(lo, hi, p).unwrap()
}

fn square() -> ProperFn<f64> {
    ProperFn::new(1, "x^2", SetSpec::Full(1), |x: &[f64]| Ok(ExtReal::finite(x[0] * x[0])))
}

fn exp_f() -> ProperFn<f64> {
    ProperFn::new(1, "exp", SetSpec::Full(1), |x: &[f64]| Ok(ExtReal::finite(x[0].exp())))
}

fn g1(name: &str) -> CouplingFn<f64> {
    builtin_coupling(name, &BuiltinParams::dim(1)).unwrap()
}

/// Largest finite-branch deviation and count of infinite-branch mismatches.
fn against(points: &[Vec<f64>], values: &[ExtReal<f64>], want: impl Fn(f64) -> Option<f64>) -> (f64, usize) {
    let (mut d, mut bad) = (0.0f64, 0);
    for (p, v) in points.iter().zip(values) {
        match want(p[0]) {
            Some(w) => d = d.max(v.distance(ExtReal::finite(w))),
            None => bad += usize::from(*v != ExtReal::PosInf),
        }
    }
    (d, bad)
}

fn c1() -> Outcome {
    let (f, g, grid) = (square(), g1("square_product"), iv(-2.0, 2.0, 201));
    let fg = core(g_conjugate(&f, &g, &grid, &grid))?;
    ensure(fg.points.len() == 201, "expected 201 dual points")?;
    let (d, bad) = against(&fg.points, &fg.values, |s| (s.abs() <= 1.0).then_some(0.0));
    ensure(d <= FINITE_TOL && bad == 0, format!("f^g finite diff {d:.3e}, {bad} divergent mismatches"))?;
    let fgg = core(g_biconjugate(&g, &fg, &grid))?;
    let (dd, _) = against(&fgg.points, &fgg.values, |x| Some(x * x));
    ensure(dd <= FGG_TOL, format!("f^gg diff {dd:.3e}"))?;
    Ok(format!("f^g diff {d:.1e}, f^gg diff {dd:.1e}"))
}

fn c2() -> Outcome {
    let f = ProperFn::new(1, "x^2 on x >= 0", SetSpec::Orthant(1), |x: &[f64]| {
        Ok(if x[0] >= 0.0 { ExtReal::finite(x[0] * x[0]) } else { ExtReal::PosInf })
    });
    let xg = iv(-2.0, 2.0, 201);
    let fg = core(g_conjugate(&f, &g1("reciprocal"), &iv(0.0, 4.0, 201), &xg))?;
    let (d, _) = against(&fg.points, &fg.values, |_| Some(1.0));
    let m = core(membership_ff(&f, &fg, &xg, FINITE_TOL))?;
    let dg = m.inf_gamma.distance(ExtReal::finite(1.0));
    ensure(d <= EXAMPLE2_TOL, format!("f^g diff {d:.3e}"))?;
    ensure(!m.member && dg <= EXAMPLE2_TOL, format!("member {} inf gamma {}", m.member, m.inf_gamma))?;
    Ok(format!("f^g diff {d:.1e}, not member, inf gamma {}", m.inf_gamma))
}

fn c3() -> Outcome {
    let (f, g) = (exp_f(), g1("exp"));
    let (cg, xg) = (iv(-2.0, 2.0, 201), iv(-20.0, 20.0, 201));
    let fg = core(g_conjugate(&f, &g, &cg, &xg))?;
    let (d, bad) = against(&fg.points, &fg.values, |s| (s <= 0.0).then_some(0.0));
    ensure(d <= FINITE_TOL && bad == 0, format!("f^g diff {d:.3e}, {bad} divergent mismatches"))?;
    let m = core(membership_ff(&f, &fg, &xg, FINITE_TOL))?;
    ensure(m.member, format!("not member: {:?}", m.reason))?;
    match core(dual_attainment(&f, &g, &cg, &xg, FINITE_TOL))? {
        DualAttainment::Solved { xstar, .. } if xstar == [0.0] => Ok(format!("f^g diff {d:.1e}, member, dual at 0")),
        other => Err(format!("dual attainment {other:?}")),
    }
}

fn c4() -> Outcome {
    let mut worst = 0.0f64;
    for n in [1usize, 2] {
        let f = ProperFn::new(n, "|x|^2", SetSpec::Full(n), |x: &[f64]| Ok(ExtReal::finite(x.iter().map(|v| v * v).sum())));
        let g = core(builtin_coupling("norm_on_dom", &BuiltinParams::dim(n).with_dom(SetSpec::Full(n))))?;
        let grid = GridSpec::centered(n, 2.0, if n == 1 { 201 } else { 21 }).unwrap();
        let fg = core(g_conjugate(&f, &g, &grid, &grid))?;
        for (s, v) in fg.points.iter().zip(&fg.values) {
            let norm = s.iter().map(|c| c * c).sum::<f64>().sqrt();
            worst = worst.max(v.distance(ExtReal::finite(norm)));
        }
        ensure(core(membership_ff(&f, &fg, &grid, FINITE_TOL))?.member, format!("n = {n}: not member"))?;
    }
    ensure(worst <= 4.0 * f64::EPSILON, format!("max diff {worst:.3e}"))?;
    Ok(format!("max diff {worst:.1e}, member for n = 1, 2"))
}

fn c5() -> Outcome {
    type Case = (&'static str, ProperFn<f64>, CouplingFn<f64>, GridSpec<f64>, GridSpec<f64>);
    let cases: [Case; 3] = [
        ("square_product", square(), g1("square_product"), iv(-2.0, 2.0, 201), iv(-2.0, 2.0, 201)),
        ("exp", exp_f(), g1("exp"), iv(-2.0, 2.0, 201), iv(-20.0, 20.0, 201)),
        (
            "norm_on_dom",
            square(),
            core(builtin_coupling("norm_on_dom", &BuiltinParams::dim(1).with_dom(SetSpec::Full(1))))?,
            iv(-2.0, 2.0, 201),
            iv(-2.0, 2.0, 201),
        ),
    ];
    let (mut worst, mut transfers) = (0.0f64, 0);
    for (name, f, g, cg, xg) in cases {
        let r = core(duality_report(&f, &g, &cg, &xg, FINITE_TOL))?;
        ensure(r.membership.member, format!("{name}: not member"))?;
        let a = r.inf_f.add_upper(r.inf_fg).distance(ExtReal::zero());
        let b = r.inf_f.distance(r.inf_fgg);
        ensure(a.max(b) <= IDENTITY_TOL, format!("{name}: |inf f + inf f^g| {a:.3e}, |inf f - inf f^gg| {b:.3e}"))?;
        worst = worst.max(a).max(b);
        if r.inf_f_attained {
            ensure(r.minimizer_transfer == Some(true), format!("{name}: minimizer transfer {:?}", r.minimizer_transfer))?;
            transfers += 1;
        }
    }
    Ok(format!("max identity deviation {worst:.1e}, {transfers} minimizer transfers"))
}

fn c6() -> Outcome {
    let opts = RecessionOptions::default();
    let g1_ = core(GammaFn::build(square(), g1("square_product"), &iv(-2.0, 2.0, 201), iv(-2.0, 2.0, 201)))?;
    let a = core(compactness_verdict(&g1_, &BoundingBox::centered(2, 2.0).unwrap(), 201, &opts))?;
    ensure(a.passed(), "example 1: a theorem or lemma check failed")?;
    ensure(a.r_is_zero && a.m_nonempty && a.m_compact, "example 1: expected R = {0} and compact zeros")?;

    let g3 = core(GammaFn::build(exp_f(), g1("exp"), &iv(-2.0, 2.0, 5), iv(-20.0, 20.0, 201)))?;
    let b = core(compactness_verdict(&g3, &BoundingBox::centered(2, 200.0).unwrap(), 401, &opts))?;
    ensure(b.passed(), "example 3: a theorem or lemma check failed")?;
    let quadrant = SetSpec::halfspaces(2, vec![(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)]).unwrap();
    let exact = core(recession_directions_analytic(&quadrant, Arc::new(DirectionGrid::new(2, 1.0).unwrap())))?;
    ensure(!b.r_is_zero && !b.m_nonempty, "example 3: expected R != {0} and no zeros")?;
    ensure(b.r.value.approx_eq(&exact, 5.0), "example 3: R is not the quadrant")?;
    ensure(a.r.routes_agree && b.r.routes_agree, "ladder and definitional routes disagree")?;
    Ok("example 1 R = {0} compact; example 3 R = quadrant, m empty; routes agree".into())
}

fn c7() -> Outcome {
    let h = ProperFn::from_expr(parse("1 - x1", &["x1"]).unwrap(), SetSpec::Full(1));
    let p = core(ConstrainedProblem::new(square(), vec![h]))?;
    let r = core(lagrangian_dual_report(&p, &iv(-20.0, 20.0, 401), &iv(0.0, 20.0, 101), LAGRANGIAN_GAP_TOL))?;
    ensure(r.engine.len() == 101, "expected 101 multipliers")?;
    ensure(r.max_distance <= ENGINE_TOL, format!("engine vs direct {:.3e}", r.max_distance))?;
    // sup over x >= 1 of l(x - 1) - x^2
    let mut oracle = 0.0f64;
    for (lam, v) in r.engine.points.iter().zip(&r.engine.values) {
        let l = lam[0];
        let want = if l <= 2.0 { -1.0 } else { l * l / 4.0 - l };
        oracle = oracle.max(v.distance(ExtReal::finite(want)));
    }
    ensure(oracle <= 1e-9, format!("dual function vs closed form {oracle:.3e}"))?;
    let primal = r.alpha.value.distance(ExtReal::finite(1.0));
    let dual = r.dual_value.distance(ExtReal::finite(1.0));
    let gap = r.gap.distance(ExtReal::zero());
    ensure(primal.max(dual).max(gap) <= LAGRANGIAN_GAP_TOL, format!("primal {} dual {} gap {}", r.alpha.value, r.dual_value, r.gap))?;
    Ok(format!("primal 1, dual 1, gap {gap:.1e}, engine vs direct {:.1e}", r.max_distance))
}

fn c8() -> Outcome {
    let f = ProperFn::from_expr(parse("x1^2", &["x1"]).unwrap(), SetSpec::Full(1));
    let grids = SchemeGrids {
        x: iv(-2.0, 2.0, 41),
        u: iv(-2.0, 2.0, 41),
        ustar: [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&v| vec![v]).collect(),
    };
    let mut worst = 0.0f64;
    for text in ["(x1 - u1)^2", "x1^2 + u1*x1"] {
        let s = core(PerturbationScheme::from_expr(parse(text, &["x1", "u1"]).unwrap(), 1, 1, f.clone()))?;
        let r = core(perturbation_report(&s, &grids, ROUTE_TOL))?;
        ensure(-r.beta <= r.alpha.value, format!("{text}: -beta {} > alpha {}", -r.beta, r.alpha.value))?;
        ensure(r.max_route_distance <= ROUTE_TOL, format!("{text}: route distance {:.3e}", r.max_route_distance))?;
        worst = worst.max(r.max_route_distance);
    }
    Ok(format!("weak duality on both schemes, route distance {worst:.1e}"))
}

fn c9() -> Outcome {
    let k = SetSpec::Box(BoundingBox::new(vec![0.0], vec![1.0]).unwrap());
    let inst = core(EPInstance::new(k.clone(), "(x - 0.5)(y - x)", |x: &[f64], y: &[f64]| {
        Ok(ExtReal::finite((x[0] - 0.5) * (y[0] - x[0])))
    }))?;
    let yg = iv(0.0, 1.0, 101);
    let ks = core(core(ConeData::new(k))?.k_star_grid(4.0, 161))?;
    match core(jemlws_certificate(&inst, &[0.5], &ks, &yg, RESIDUAL_TOL))? {
        Certificate::Certified { xstar, .. } if xstar == [0.0] => {}
        other => return Err(format!("certificate at 0.5: {other:?}")),
    }
    let xbars = iv(0.0, 1.0, 21).points();
    let rows = core(certificate_sweep(&inst, &xbars, &ks, &yg, RESIDUAL_TOL))?;
    ensure(rows.len() == 21, "expected 21 sweep points")?;
    for r in &rows {
        let solves = r.residual >= ExtReal::finite(-RESIDUAL_TOL);
        ensure(r.certified == solves, format!("sweep mismatch at {:?}: residual {}", r.xbar, r.residual))?;
    }
    let sample: Vec<Vec<f64>> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&v| vec![v]).collect();
    let mut worst = 0.0f64;
    for c in [ZdgpCoupling::ConeInner, ZdgpCoupling::IkShifted] {
        let r = core(zdgp_check(&inst, c, &sample, &yg, &iv(-4.0, 4.0, 161), ZDGP_TOL))?;
        ensure(r.rows.iter().all(|row| row.within_tol), format!("{}: sums outside {ZDGP_TOL:e}", c.name()))?;
        worst = worst.max(r.max_abs_sum.to_f64());
    }
    Ok(format!("certified x* = 0, sweep consistent at 21 points, max ZDGP sum {worst:.1e}"))
}

fn c10() -> Outcome {
    let r = |v: i64| Rational::from_integer(v.into());
    let m = vec![vec![r(2), r(1)], vec![r(1), r(2)]];
    let q = vec![r(-1), r(-1)];
    let x = core(lcp_enumerate(&m, &q, &Rational::zero()))?.ok_or("no solution")?;
    // Cramer on the all-active system Mx = -q
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    let oracle = [(-&q[0] * &m[1][1] + &q[1] * &m[0][1]) / &det, (-&q[1] * &m[0][0] + &q[0] * &m[1][0]) / &det];
    let diff = x.iter().zip(&oracle).map(|(a, b)| (a - b).to_f64().unwrap().abs()).fold(0.0, f64::max);
    ensure(diff <= LCP_TOL && oracle.iter().all(|v| *v == Rational::new(1.into(), 3.into())), format!("x = {x:?}"))?;

    let inst = core(CPInstance::lcp(vec![vec![2.0, 1.0], vec![1.0, 2.0]], vec![-1.0, -1.0]))?;
    let boxed = |hi: f64, p: usize| GridSpec::new(BoundingBox::new(vec![0.0; 2], vec![hi; 2]).unwrap(), p).unwrap();
    let cross = core(gcoupling::complementarity::cp_dual_cross_check(&inst, 100, 2.0, 0, &boxed(4.0, 21), DUAL_PAIR_TOL))?;
    ensure(cross.pairs.len() == 100, "expected 100 pairs")?;
    ensure(cross.max_distance <= DUAL_PAIR_TOL, format!("closed form vs engine {:.3e}", cross.max_distance))?;
    let pts = boxed(1.0, 5).points();
    let eq = core(gcoupling::cp_zdgp_equivalence(&inst, &pts, &boxed(2.0, 11), &boxed(2.0, 5), 1e-9))?;
    ensure(eq.f_agrees && eq.rows.len() == pts.len(), "F = T^-1(K+) disagrees")?;
    let none = core(lcp_enumerate(&[vec![r(-1)]], &[r(-1)], &Rational::zero()))?;
    ensure(none.is_none(), "infeasible instance returned a solution")?;
    Ok(format!("x = (1/3, 1/3), dual pairs {:.1e}, F agrees at {} points, infeasible -> none", cross.max_distance, pts.len()))
}

fn c11() -> Outcome {
    let mut failed = Vec::new();
    for (name, run) in suites::SUITES {
        if let Err(e) = run() {
            failed.push(format!("{name}: {e}"));
        }
    }
    ensure(failed.is_empty(), failed.join("; "))?;
    Ok(format!("{} suites x {} cases", suites::SUITES.len(), suites::CASES))
}

fn c12() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gcoupling"))
            .arg("paper-suite")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), format!("paper-suite exit {:?}", a.status.code()))?;
    ensure(a.stdout == b.stdout, "paper-suite reports differ")?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 12] = [
    ("C1", "example 1 conjugate and biconjugate", c1),
    ("C2", "example 2 conjugate and non-membership", c2),
    ("C3", "example 3 conjugate, membership, dual attainment", c3),
    ("C4", "norm_on_dom conjugate is the norm", c4),
    ("C5", "duality identities for member couplings", c5),
    ("C6", "recession equivalence on examples 1 and 3", c6),
    ("C7", "Lagrangian bridge", c7),
    ("C8", "perturbation schemes", c8),
    ("C9", "EP certificate, sweep, ZDGP", c9),
    ("C10", "LCP enumeration and dual", c10),
    ("C11", "property suites", c11),
    ("C12", "paper-suite determinism", c12),
];

fn main() -> ExitCode {
    let mut failures = 0;
    for (id, name, f) in CRITERIA {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("{id:<4} PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("{id:<4} FAIL  {name}: {detail}");
            }
        }
    }
    println!("{}/{} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
