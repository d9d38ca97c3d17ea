//! Seeded property suites over the coupling and conjugation invariants.
//!
//! Each suite runs [`CASES`] proptest cases from a fixed seed and returns
//! `Err` with the shrunk counterexample on failure.
#![allow(dead_code)]

use std::sync::OnceLock;

use gcoupling::conjugate::{biconjugate_at, conjugate_at};
use gcoupling::coupling::{cc_samples, pseudo_monotone_scan, PseudoMonotone};
use gcoupling::equilibrium::{epvip_gap, vip_gap, EPVIPInstance, VIPInstance};
use gcoupling::{
    builtin_coupling, g_conjugate, BuiltinParams, CouplingFn, ExtReal, GammaFn,
    GridSpec, ProperFn, SampledFn, SetSpec,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const CASES: u32 = 1000;
pub const TOL: f64 = 1e-6;

pub fn runner(seed: u64, cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

fn run<S: Strategy>(seed: u64, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(seed, CASES).run(&strategy, test).map_err(|e| e.to_string())
}

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![3 => -5.0..5.0f64, 1 => (-2i32..=2).prop_map(f64::from)]
}

fn pair2() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(coord(), 2), prop::collection::vec(coord(), 2))
}

/// Every builtin in dimension 2, with `K = ℝ²₊` or the cone `x1 + x2 ≥ 0`.
pub fn catalog() -> Vec<CouplingFn<f64>> {
    let wedge = SetSpec::halfspaces(2, vec![(vec![1.0, 1.0], 0.0)]).unwrap();
    let p = BuiltinParams::dim(2);
    vec![
        builtin_coupling("exp", &p).unwrap(),
        builtin_coupling("square_product", &p).unwrap(),
        builtin_coupling("reciprocal", &p).unwrap(),
        builtin_coupling("norm_on_dom", &p.clone().with_dom(SetSpec::Orthant(2))).unwrap(),
        builtin_coupling("max_dot", &p).unwrap(),
        builtin_coupling("min_dot", &p).unwrap(),
        builtin_coupling("lagrangian_g1", &p).unwrap(),
        builtin_coupling("cone_inner", &p.clone().with_k(SetSpec::Orthant(2))).unwrap(),
        builtin_coupling("cone_inner", &p.clone().with_k(wedge.clone())).unwrap(),
        builtin_coupling("ik_shifted", &p.clone().with_k(SetSpec::Orthant(2))).unwrap(),
        builtin_coupling("ik_shifted", &p.with_k(wedge)).unwrap(),
    ]
}

/// Couplings that vanish on `C × C`, plus the catalog.
fn scan_targets() -> Vec<CouplingFn<f64>> {
    let mut out = catalog();
    out.push(CouplingFn::new(2, 2, SetSpec::Orthant(2), "neg_part", |x: &[f64], s: &[f64]| {
        Ok(ExtReal::finite((-x[0]).max(0.0) * s[0] + (-x[1]).max(0.0) * s[1]))
    }));
    out.push(CouplingFn::new(2, 2, SetSpec::Full(2), "zero", |_: &[f64], _: &[f64]| Ok(ExtReal::zero())));
    out
}

struct Member {
    f: ProperFn<f64>,
    g: CouplingFn<f64>,
    xgrid: GridSpec<f64>,
    fg: SampledFn<f64>,
}

fn square() -> ProperFn<f64> {
    ProperFn::new(1, "x^2", SetSpec::Full(1), |x: &[f64]| Ok(ExtReal::finite(x[0] * x[0])))
}

fn build(f: ProperFn<f64>, g: CouplingFn<f64>, cgrid: GridSpec<f64>, xgrid: GridSpec<f64>) -> Member {
    let fg = g_conjugate(&f, &g, &cgrid, &xgrid).unwrap();
    Member { f, g, xgrid, fg }
}

fn p1() -> BuiltinParams<f64> {
    BuiltinParams::dim(1)
}

/// The worked examples on `[-2, 2]`; the second entry has a duality gap.
fn examples() -> &'static [Member] {
    static CELL: OnceLock<Vec<Member>> = OnceLock::new();
    CELL.get_or_init(|| {
        let i = |a, b, p| GridSpec::interval(a, b, p).unwrap();
        let half = ProperFn::new(1, "x^2 on x >= 0", SetSpec::Orthant(1), |x: &[f64]| {
            Ok(if x[0] >= 0.0 { ExtReal::finite(x[0] * x[0]) } else { ExtReal::PosInf })
        });
        let exp = ProperFn::new(1, "exp(x)", SetSpec::Full(1), |x: &[f64]| ExtReal::checked(x[0].exp(), "exp"));
        vec![
            build(square(), builtin_coupling("square_product", &p1()).unwrap(), i(-2.0, 2.0, 201), i(-2.0, 2.0, 201)),
            build(half, builtin_coupling("reciprocal", &p1()).unwrap(), i(0.0, 4.0, 201), i(-2.0, 2.0, 201)),
            build(exp, builtin_coupling("exp", &p1()).unwrap(), i(-2.0, 2.0, 201), i(-20.0, 20.0, 201)),
            build(
                square(),
                builtin_coupling("norm_on_dom", &p1().with_dom(SetSpec::Full(1))).unwrap(),
                i(-2.0, 2.0, 201),
                i(-2.0, 2.0, 201),
            ),
        ]
    })
}

fn gammas() -> &'static [GammaFn<f64>] {
    static CELL: OnceLock<Vec<GammaFn<f64>>> = OnceLock::new();
    CELL.get_or_init(|| {
        examples()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 1)
            .map(|(_, m)| GammaFn::new(m.f.clone(), m.g.clone(), m.fg.clone(), m.xgrid.clone()))
            .collect()
    })
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

pub fn coupling_nonnegativity() -> Result<(), String> {
    let gs = catalog();
    run(1, (0..gs.len(), pair2()), |(i, (x, s))| {
        let v = gs[i].eval(&x, &s).map_err(|e| fail(e.to_string()))?;
        prop_assert!(v >= ExtReal::zero(), "{}: g({x:?}, {s:?}) = {v}", gs[i].name);
        Ok(())
    })
}

pub fn d1_branch_consistency() -> Result<(), String> {
    let gs = catalog();
    run(2, (0..gs.len(), pair2()), |(i, (x, s))| {
        let v = gs[i].eval(&x, &s).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(v.is_finite(), gs[i].c.contains(&s), "{}: g({:?}, {:?}) = {}", gs[i].name, x, s, v);
        Ok(())
    })
}

pub fn gamma_nonnegative_for_members() -> Result<(), String> {
    let gs = gammas();
    run(3, (0..gs.len(), -3.0..3.0f64, -3.0..3.0f64), |(i, x, s)| {
        let v = gs[i].eval(&[x], &[s]).map_err(|e| fail(e.to_string()))?;
        prop_assert!(v >= ExtReal::finite(-TOL), "{}: gamma({x}, {s}) = {v}", gs[i].g.name);
        Ok(())
    })
}

pub fn biconjugate_below_f() -> Result<(), String> {
    let ms = examples();
    run(4, (0..ms.len(), -2.0..2.0f64), |(i, x)| {
        let fx = ms[i].f.eval(&[x]).map_err(|e| fail(e.to_string()))?;
        let bi = biconjugate_at(&ms[i].g, &ms[i].fg, &[x]).map_err(|e| fail(e.to_string()))?.value;
        prop_assert!(bi <= fx.add_upper(ExtReal::finite(TOL)), "{}: f^gg({x}) = {bi} > f = {fx}", ms[i].g.name);
        Ok(())
    })
}

pub fn weak_duality() -> Result<(), String> {
    let ms = examples();
    run(5, (0..ms.len(), -3.0..3.0f64, -3.0..3.0f64), |(i, x, s)| {
        let m = &ms[i];
        let fx = m.f.eval(&[x]).map_err(|e| fail(e.to_string()))?;
        let fg = if m.g.c.contains(&[s]) {
            conjugate_at(&m.f, &m.g, &[s], &m.xgrid).map_err(|e| fail(e.to_string()))?.value
        } else {
            ExtReal::PosInf
        };
        prop_assert!(!fg.is_neg_inf());
        prop_assert!(fx.add_upper(fg) >= ExtReal::finite(-TOL), "{}: f({x}) = {fx}, f^g({s}) = {fg}", m.g.name);
        Ok(())
    })
}

fn vip_sample() -> Vec<Vec<f64>> {
    let grid = GridSpec::new(gcoupling::BoundingBox::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap(), 11).unwrap();
    grid.points()
}

pub fn vip_gap_midpoint_convex() -> Result<(), String> {
    let sample = vip_sample();
    let entry = || -3.0..3.0f64;
    let pt = || prop::collection::vec(0.0..2.0f64, 2);
    let strategy = ((entry(), entry(), entry(), entry()), (entry(), entry()), pt(), pt());
    run(6, strategy, |((a, b, c, d), (q1, q2), x, y)| {
        let inst = VIPInstance::new(SetSpec::Orthant(2), vec![vec![a, b], vec![c, d]], vec![q1, q2], &sample)
            .map_err(|e| fail(e.to_string()))?;
        let mid: Vec<f64> = x.iter().zip(&y).map(|(u, v)| 0.5 * (u + v)).collect();
        let g = |p: &[f64]| vip_gap(&inst, p).map(|v| v.to_f64()).map_err(|e| fail(e.to_string()));
        let (gm, gx, gy) = (g(&mid)?, g(&x)?, g(&y)?);
        prop_assert!(gm <= 0.5 * (gx + gy) + 1e-9, "h(mid) = {gm}, h(x) = {gx}, h(y) = {gy}");
        Ok(())
    })
}

fn epvip_instances() -> Vec<(EPVIPInstance<f64>, GridSpec<f64>)> {
    let a = EPVIPInstance::new(1, square(), |x: &[f64]| Ok(vec![x[0] - 1.0]), |y: &[f64], x: &[f64]| Ok(vec![y[0] - x[0]]))
        .unwrap();
    let norm2 = ProperFn::new(2, "|x|", SetSpec::Full(2), |x: &[f64]| Ok(ExtReal::finite(x[0].hypot(x[1]))));
    let b = EPVIPInstance::new(
        2,
        norm2,
        |x: &[f64]| Ok(vec![x[1], -x[0] + 0.5]),
        |y: &[f64], x: &[f64]| Ok(vec![(y[0] - x[0]).sin(), (y[1] - x[1]) * (1.0 + y[0] * y[0])]),
    )
    .unwrap();
    vec![
        (a, GridSpec::interval(-4.0, 4.0, 81).unwrap()),
        (b, GridSpec::centered(2, 4.0, 41).unwrap()),
    ]
}

pub fn epvip_gap_nonpositive() -> Result<(), String> {
    let insts = epvip_instances();
    run(7, (0..insts.len(), prop::collection::vec(-3.0..3.0f64, 2)), |(i, p)| {
        let (inst, grid) = &insts[i];
        let x = &p[..inst.n];
        let v = epvip_gap(inst, x, grid).map_err(|e| fail(e.to_string()))?;
        prop_assert!(v <= ExtReal::finite(TOL), "instance {i}: gap({x:?}) = {v}");
        Ok(())
    })
}

pub fn pseudo_monotone_implies_null() -> Result<(), String> {
    let gs = scan_targets();
    run(8, (0..gs.len(), any::<u64>()), |(i, seed)| {
        let g = &gs[i];
        let samples = cc_samples(&g.c, 20, 5.0, seed);
        match pseudo_monotone_scan(g, &samples, 1e-9).map_err(|e| fail(e.to_string()))? {
            PseudoMonotone::PseudoMonotone { max_g, null_on_samples } => {
                prop_assert!(null_on_samples, "{}: pseudo-monotone but max g = {}", g.name, max_g)
            }
            PseudoMonotone::Violation { .. } => {}
        }
        Ok(())
    })
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: [Suite; 8] = [
    ("coupling nonnegativity", coupling_nonnegativity),
    ("D1 branch consistency", d1_branch_consistency),
    ("gamma >= 0 for members", gamma_nonnegative_for_members),
    ("f^gg <= f", biconjugate_below_f),
    ("weak duality f >= -f^g", weak_duality),
    ("VIP gap midpoint convexity", vip_gap_midpoint_convex),
    ("EPVIP gap <= 0", epvip_gap_nonpositive),
    ("pseudo-monotone implies null", pseudo_monotone_implies_null),
];
