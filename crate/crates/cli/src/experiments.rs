//! Runners behind the file-driven subcommands.

use gcoupling::complementarity::{cp_dual_closed_form, cp_dual_cross_check};
use gcoupling::conjugate::{DualAttainment, Membership};
use gcoupling::duality_schemes::classic_recovery_check;
use gcoupling::equilibrium::{certificate_sweep, ep_gap, ep_residual, Certificate, ConeData};
use gcoupling::recession::RecessionOptions;
use gcoupling::{
    compactness_verdict, cp_check, cp_zdgp_equivalence, dual_attainment, duality_report, epvip_gap, g_biconjugate,
    g_conjugate, jemlws_certificate, lagrangian_dual_report, lcp_enumerate, membership_ff, perturbation_report,
    validate_coupling, vip_gap, zdgp_check, CPInstance, ConstrainedProblem, CouplingFn, EPInstance, EPVIPInstance,
    ExtReal, GammaFn, GridSpec, OptResult, PerturbationScheme, ProperFn, Rational, SchemeGrids, SetSpec, VIPInstance,
    ZdgpCoupling,
};
use num_traits::{ToPrimitive, Zero};

use crate::error::{CliError, Result};
use crate::numeric::{grid_value, GridBlock, Numeric};
use crate::problem::{vars, vars2, ProblemFile};
use crate::report::{Report, Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Validate,
    Conjugate,
    Duality,
    Recession,
    Lagrangian,
    Perturb,
    Ep,
    Cp,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Validate => "validate",
            Experiment::Conjugate => "conjugate",
            Experiment::Duality => "duality",
            Experiment::Recession => "recession",
            Experiment::Lagrangian => "lagrangian",
            Experiment::Perturb => "perturb",
            Experiment::Ep => "ep",
            Experiment::Cp => "cp",
        }
    }
}

pub fn run(exp: Experiment, pf: &ProblemFile, num: &Numeric) -> Result<Report> {
    let mut rep = Report::new(exp.name(), pf.inputs(), num.to_value());
    match exp {
        Experiment::Validate => validate(pf, num, &mut rep)?,
        Experiment::Conjugate => conjugate(pf, num, &mut rep)?,
        Experiment::Duality => duality(pf, num, &mut rep)?,
        Experiment::Recession => recession(pf, num, &mut rep)?,
        Experiment::Lagrangian => lagrangian(pf, num, &mut rep)?,
        Experiment::Perturb => perturb(pf, num, &mut rep)?,
        Experiment::Ep => equilibrium(pf, num, &mut rep)?,
        Experiment::Cp => complementarity(pf, num, &mut rep)?,
    }
    Ok(rep)
}

fn coords(p: &[f64]) -> Vec<Value> {
    p.iter().map(|&v| Value::Num(v)).collect()
}

fn row(p: &[f64], rest: Vec<Value>) -> Vec<Value> {
    let mut r = coords(p);
    r.extend(rest);
    r
}

fn opt_value(r: &OptResult<f64>) -> Value {
    Value::map()
        .with("value", r.value)
        .with("arg", r.arg.as_deref().map(Value::point))
        .with("status", r.status)
        .with("widenings", r.widenings)
}

fn membership_value(m: &Membership<f64>) -> Value {
    Value::map()
        .with("member", m.member)
        .with("reason", m.reason.clone())
        .with("fg_proper", m.fg_proper)
        .with("inf_f", opt_value(&m.inf_f))
        .with("inf_fg", m.inf_fg)
        .with("inf_gamma", m.inf_gamma)
}

fn x_grid(pf: &ProblemFile, num: &Numeric) -> Result<GridSpec<f64>> {
    num.grid_from(pf.grids.x.as_ref(), pf.n(), None, None, "grids.x")
}

fn c_grid(pf: &ProblemFile, num: &Numeric, g: &CouplingFn<f64>) -> Result<GridSpec<f64>> {
    num.grid_from(pf.grids.c.as_ref(), g.m, Some(&g.c), None, "grids.c")
}

fn block<'a, T>(b: &'a Option<T>, name: &str) -> Result<&'a T> {
    b.as_ref().ok_or_else(|| CliError::schema(name, "this experiment needs the block"))
}

/// `f`, `g`, the x grid and the C grid.
type Setup = (ProperFn<f64>, CouplingFn<f64>, GridSpec<f64>, GridSpec<f64>);

fn f_and_g(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<Setup> {
    let (f, g) = (pf.proper_fn()?, pf.coupling()?);
    let (xg, cg) = (x_grid(pf, num)?, c_grid(pf, num, &g)?);
    rep.result("grids", Value::map().with("x", grid_value(&xg)).with("c", grid_value(&cg)));
    Ok((f, g, xg, cg))
}

/// Compares sampled values with an expected closed form: finite branches
/// within `tol`, infinite branches exactly.
fn compare_closed_form(points: &[Vec<f64>], values: &[ExtReal<f64>], want: &gcoupling::ExprFn, tol: f64) -> Result<(bool, Value)> {
    let (mut max_diff, mut finite, mut infinite, mut mismatches) = (0.0f64, 0usize, 0usize, 0usize);
    for (p, &v) in points.iter().zip(values) {
        let w = want.eval(p)?;
        if w.is_finite() {
            finite += 1;
            let d = v.distance(w);
            max_diff = max_diff.max(d);
            if d > tol {
                mismatches += 1;
            }
        } else {
            infinite += 1;
            if v != w {
                mismatches += 1;
            }
        }
    }
    let detail = Value::map()
        .with("max_finite_diff", max_diff)
        .with("finite_points", finite)
        .with("infinite_points", infinite)
        .with("mismatches", mismatches)
        .with("tol", tol);
    Ok((mismatches == 0, detail))
}

fn validate(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let g = pf.coupling()?;
    let (xg, cg) = (x_grid(pf, num)?, c_grid(pf, num, &g)?);
    let joint = xg.product(&cg);
    let v = validate_coupling(&g, &joint, num.tol, num.seed)?;
    rep.result("grid", grid_value(&joint));
    rep.check("D1: finite exactly on R^n x C", v.d1, Value::map().with("violation", v.d1_violation.as_ref().map(pair_value)));
    rep.check("nonnegative on R^n x C", v.nonnegative, Value::map().with("min_on_c", v.min_on_c));
    rep.check(
        "D2: infimum zero",
        v.d2,
        Value::map().with("inf", v.d2_inf).with("widenings", v.d2_widenings),
    );
    rep.result("coupling", Value::map().with("name", g.name.as_str()).with("n", g.n).with("m", g.m));
    rep.result(
        "d3",
        Value::map()
            .with("holds", v.d3)
            .with("c_convex", v.c_convex)
            .with("midpoint_convex", v.midpoint_convex)
            .with("lsc", v.lsc)
            .with("segments_checked", v.segments_checked)
            .with(
                "violation",
                v.d3_violation
                    .as_ref()
                    .map(|(x, a, b)| Value::map().with("x", Value::point(x)).with("s_a", Value::point(a)).with("s_b", Value::point(b))),
            ),
    );
    rep.result("pairs_checked", v.pairs_checked);
    rep.result("is_g_coupling", v.is_g_coupling());
    Ok(())
}

fn pair_value(p: &(Vec<f64>, Vec<f64>)) -> Value {
    Value::map().with("x", Value::point(&p.0)).with("s", Value::point(&p.1))
}

fn conjugate(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let (f, g, xg, cg) = f_and_g(pf, num, rep)?;
    let fg = g_conjugate(&f, &g, &cg, &xg)?;
    let fgg = g_biconjugate(&g, &fg, &xg)?;
    let m = membership_ff(&f, &fg, &xg, num.tol)?;
    let neg = fg.values.iter().filter(|v| v.is_neg_inf()).count();
    rep.check("f^g never -inf (f bounded below)", neg == 0, Value::map().with("neg_inf_points", neg));

    let mut fgg_table = Table::with_coords("x", g.n, &["fgg", "f"]);
    let (mut above, mut worst) = (0usize, f64::NEG_INFINITY);
    for (p, &v) in fgg.points.iter().zip(&fgg.values) {
        let fx = f.eval(p)?;
        if v > fx.add_upper(ExtReal::finite(num.tol)) {
            above += 1;
        }
        if let (Some(a), Some(b)) = (v.as_finite(), fx.as_finite()) {
            worst = worst.max(a - b);
        }
        fgg_table.push(row(p, vec![v.into(), fx.into()]));
    }
    rep.check("f^gg <= f", above == 0, Value::map().with("violations", above).with("max_excess", worst));

    let etol = pf.expect.tol.unwrap_or(num.tol);
    if let Some(want) = pf.expect_expr("fg")? {
        let (ok, detail) = compare_closed_form(&fg.points, &fg.values, &want, etol)?;
        rep.check("f^g matches expected closed form", ok, detail);
    }
    if let Some(want) = pf.expect_expr("fgg")? {
        let (ok, detail) = compare_closed_form(&fgg.points, &fgg.values, &want, etol)?;
        rep.check("f^gg matches expected closed form", ok, detail);
    }
    if let Some(member) = pf.expect.member {
        rep.check("membership matches expectation", m.member == member, Value::map().with("expected", member));
    }
    rep.result("membership", membership_value(&m));

    let mut fg_table = Table::with_coords("s", g.m, &["fg", "status", "widenings"]);
    for i in 0..fg.len() {
        fg_table.push(row(&fg.points[i], vec![fg.values[i].into(), fg.status[i].into(), fg.widenings[i].into()]));
    }
    rep.table("fg", fg_table);
    rep.table("fgg", fgg_table);
    Ok(())
}

fn duality(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let (f, g, xg, cg) = f_and_g(pf, num, rep)?;
    let d = duality_report(&f, &g, &cg, &xg, num.tol)?;
    let sum = d.inf_f.add_upper(d.inf_fg);
    rep.check(
        "weak duality: inf f + inf f^g >= 0",
        sum >= ExtReal::finite(-num.tol),
        Value::map().with("inf_f_plus_inf_fg", sum),
    );
    if d.membership.member {
        rep.check("no duality gap: inf f = -inf f^g", d.no_gap, Value::map().with("inf_f_plus_inf_fg", sum));
        rep.check("inf f = inf f^gg", d.biconjugate_inf, Value::map().with("inf_fgg", d.inf_fgg));
        if let Some(t) = d.minimizer_transfer {
            rep.check("minimizers of f minimize f^gg", t, Value::map().with("argmin_f", d.argmin_f.as_deref().map(Value::point)));
        }
    }
    if let Some(member) = pf.expect.member {
        rep.check("membership matches expectation", d.membership.member == member, Value::map().with("expected", member));
    }
    if let Some(no_gap) = pf.expect.no_gap {
        rep.check("zero gap matches expectation", d.no_gap == no_gap, Value::map().with("expected", no_gap));
    }
    rep.result("membership", membership_value(&d.membership));
    rep.result(
        "identities",
        Value::map()
            .with("inf_f", d.inf_f)
            .with("inf_f_attained", d.inf_f_attained)
            .with("argmin_f", d.argmin_f.as_deref().map(Value::point))
            .with("inf_fg", d.inf_fg)
            .with("inf_fgg", d.inf_fgg)
            .with("no_gap", d.no_gap)
            .with("biconjugate_inf", d.biconjugate_inf)
            .with("minimizer_transfer", d.minimizer_transfer),
    );
    let dual = match dual_attainment(&f, &g, &cg, &xg, num.tol)? {
        DualAttainment::Solved { xstar, value, l_star_zero, ri_hypothesis } => Value::map()
            .with("attained", true)
            .with("xstar", Value::point(&xstar))
            .with("value", value)
            .with("l_star_zero", l_star_zero)
            .with("interior_hypothesis", ri_hypothesis),
        DualAttainment::Unattained { inf_fg, widened_inf } => Value::map()
            .with("attained", false)
            .with("inf_fg", inf_fg)
            .with("widened_inf", widened_inf),
    };
    rep.result("dual", dual);
    Ok(())
}

fn recession(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let (f, g, xg, cg) = f_and_g(pf, num, rep)?;
    let (n, m) = (g.n, g.m);
    let gamma = GammaFn::build(f, g, &cg, xg)?;
    let rb = pf.recession.as_ref();
    let lattice = num.grid_from(rb.and_then(|r| r.lattice.as_ref()), n + m, None, None, "recession.lattice")?;
    let mut opts = RecessionOptions { tol: num.tol, ..RecessionOptions::default() };
    if let Some(a) = rb.and_then(|r| r.angular_tol_deg) {
        opts.angular_tol_deg = a;
    }
    let c = compactness_verdict(&gamma, &lattice.bbox, lattice.points_per_dim, &opts)?;
    rep.result("lattice", grid_value(&lattice));
    rep.result("angular_tol_deg", opts.angular_tol_deg);
    rep.check(
        "R(gamma) = {0} iff m(gamma) non-empty and compact",
        c.theorem_holds,
        Value::map().with("r_is_zero", c.r_is_zero).with("m_compact", c.m_compact),
    );
    rep.check("recession cone of m(gamma) inside R(gamma)", c.lemma_l1, Value::Null);
    rep.check("m(gamma) empty iff its recession cone differs from R(gamma)", c.lemma_lpt, Value::Null);
    rep.check("bounded S_1 implies m(gamma) non-empty", c.prop_level_bounded, Value::map().with("s1_bounded", c.s1_bounded));
    rep.check(
        "ladder and definitional routes to R(gamma) agree",
        c.r.routes_agree,
        Value::map().with("ladder_directions", c.r.ladder.len()).with("definitional_directions", c.r.definitional.len()),
    );
    rep.result(
        "verdict",
        Value::map()
            .with("r_is_zero", c.r_is_zero)
            .with("m_nonempty", c.m_nonempty)
            .with("m_bounded", c.m_bounded)
            .with("m_compact", c.m_compact)
            .with("s1_bounded", c.s1_bounded),
    );
    rep.result(
        "zero_set",
        Value::map()
            .with("points", c.zero_set.cloud.len())
            .with("min_gamma", c.zero_set.min_gamma)
            .with("min_gamma_doubled", c.zero_set.min_gamma_doubled)
            .with("approached_at_infinity", c.zero_set.approached_at_infinity),
    );
    rep.result("levels_sampled", c.r.levels_sampled.clone());
    let mut dirs = Table::with_coords("d", n + m, &[]);
    for d in c.r.value.directions() {
        dirs.push(coords(&d));
    }
    let mut zs = Table::new(&[vars("x", n), vars("s", m)].concat());
    for p in &c.zero_set.cloud.points {
        zs.push(coords(p));
    }
    rep.table("recession_directions", dirs);
    rep.table("zero_set", zs);
    Ok(())
}

fn lagrangian(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let l = block(&pf.lagrangian, "lagrangian")?;
    let p = ConstrainedProblem::new(pf.proper_fn()?, pf.constraints(l)?)?;
    let xg = x_grid(pf, num)?;
    let mc = p.m();
    let lg = match &l.lambda {
        Some(b) => num.grid_from(Some(b), mc, Some(&SetSpec::Orthant(mc)), None, "lagrangian.lambda")?,
        None => p.default_lambda_grid()?.with_limits(num.limits()),
    };
    let r = lagrangian_dual_report(&p, &xg, &lg, num.tol)?;
    rep.result("grids", Value::map().with("x", grid_value(&xg)).with("lambda", grid_value(&lg)));
    rep.check(
        "engine conjugate matches direct supremum",
        r.agree,
        Value::map().with("max_distance", r.max_distance).with("multipliers", r.engine.len()),
    );
    rep.check("weak duality: primal >= dual", r.gap >= ExtReal::finite(-num.tol), Value::map().with("gap", r.gap));
    if let Some(no_gap) = pf.expect.no_gap {
        rep.check("zero gap matches expectation", r.no_gap == no_gap, Value::map().with("expected", no_gap));
    }
    rep.result(
        "values",
        Value::map()
            .with("primal", opt_value(&r.alpha))
            .with("dual_value", r.dual_value)
            .with("dual_argmin", r.dual_argmin.as_deref().map(Value::point))
            .with("gap", r.gap)
            .with("no_gap", r.no_gap),
    );
    let mut t = Table::with_coords("lambda", mc, &["engine", "direct"]);
    for ((lam, &e), &d) in r.engine.points.iter().zip(&r.engine.values).zip(&r.direct) {
        t.push(row(lam, vec![e.into(), d.into()]));
    }
    rep.table("dual_function", t);
    Ok(())
}

fn perturb(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let pb = block(&pf.perturbation, "perturbation")?;
    let (n, p) = (pf.n(), pb.p);
    let f = pf.proper_fn()?;
    let phi = ProblemFile::parse_expr(&pb.phi, &vars2("x", "u", n, p), "perturbation.phi")?;
    let s = PerturbationScheme::from_expr(phi, n, p, f.clone())?;
    let grids = SchemeGrids {
        x: x_grid(pf, num)?,
        u: num.grid_from(pb.u.as_ref(), p, None, None, "perturbation.u")?,
        ustar: pb.ustar.clone(),
    };
    let r = perturbation_report(&s, &grids, num.tol)?;
    rep.result("grids", Value::map().with("x", grid_value(&grids.x)).with("u", grid_value(&grids.u)));
    rep.check(
        "weak duality: -beta <= alpha",
        r.weak_duality,
        Value::map().with("alpha", r.alpha.value).with("beta", r.beta),
    );
    rep.check(
        "h* through h agrees with phi*(0, .)",
        r.routes_agree,
        Value::map().with("max_distance", r.max_route_distance).with("tol", num.tol),
    );
    if let Some(nonneg) = r.gap_fn_nonnegative {
        rep.check("gap function nonnegative at zero gap", nonneg, Value::map().with("min", r.gap_fn_min));
    }
    if let Some(no_gap) = pf.expect.no_gap {
        rep.check("zero gap matches expectation", r.no_gap == no_gap, Value::map().with("expected", no_gap));
    }
    rep.result(
        "values",
        Value::map()
            .with("alpha", opt_value(&r.alpha))
            .with("beta", r.beta)
            .with("gap", r.gap)
            .with("no_gap", r.no_gap),
    );
    let mut t = Table::with_coords("ustar", p, &["nested", "nested_status", "joint", "joint_status"]);
    for h in &r.h_star {
        t.push(row(&h.ustar, vec![h.nested.into(), h.nested_status.into(), h.joint.into(), h.joint_status.into()]));
    }
    rep.table("h_star", t);
    if pb.classic {
        let c = classic_recovery_check(&f, &s, &grids, num.tol)?;
        rep.check(
            "classic coupling gives f^g = h*",
            c.passed(),
            Value::map()
                .with("identity_holds", c.identity_holds)
                .with("max_distance", c.max_distance)
                .with("membership_consistent", c.membership_consistent),
        );
        rep.result(
            "classic",
            Value::map()
                .with("dom_h_star", Value::points(&c.dom_points))
                .with("member", c.membership.member)
                .with("expected_member", c.expected_member)
                .with("alpha", c.alpha)
                .with("beta", c.beta)
                .with("no_gap", c.no_gap),
        );
    }
    Ok(())
}

fn equilibrium(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    if pf.ep.is_none() && pf.vip.is_none() && pf.epvip.is_none() {
        return Err(CliError::schema("<root>", "the ep experiment needs an ep, vip or epvip block"));
    }
    if pf.ep.is_some() {
        ep_block(pf, num, rep)?;
    }
    if pf.vip.is_some() {
        vip_block(pf, num, rep)?;
    }
    if pf.epvip.is_some() {
        epvip_block(pf, num, rep)?;
    }
    Ok(())
}

fn ep_block(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let ep = block(&pf.ep, "ep")?;
    let n = pf.n();
    let k = ep.k.to_set(n, "ep.K")?;
    let body = ProblemFile::parse_expr(&ep.f, &vars2("x", "y", n, n), "ep.f")?;
    let inst = EPInstance::from_expr(k.clone(), body)?;
    let yg = num.grid_from(ep.y.as_ref(), n, Some(&k), None, "ep.y")?;
    let cone = ConeData::new(k.clone())?;
    let ksg = num.grid_from(ep.kstar.as_ref(), n, Some(&cone.k_star), None, "ep.kstar")?;
    rep.result("ep_grids", Value::map().with("y", grid_value(&yg)).with("kstar", grid_value(&ksg)));
    let diag = inst.check_diagonal(&yg.points());
    rep.check("f(x, x) = 0 on K", diag.is_ok(), Value::map().with("error", diag.err().map(|e| e.to_string())));

    if !ep.xbar.is_empty() {
        let mut t = Table::with_coords("x", n, &["residual", "gap", "solves", "certified"]);
        let mut certs = Vec::new();
        for (i, x) in ep.xbar.iter().enumerate() {
            if !k.contains(x) {
                return Err(CliError::schema(format!("ep.xbar[{i}]"), "point is not in K"));
            }
            let residual = ep_residual(&inst, x, &yg)?;
            let gap = ep_gap(&inst, x, &yg)?;
            let cert = jemlws_certificate(&inst, x, &ksg, &yg, num.tol)?;
            certs.push(match &cert {
                Certificate::Certified { xstar, fbar_star, i_k } => Value::map()
                    .with("xbar", Value::point(x))
                    .with("certified", true)
                    .with("xstar", Value::point(xstar))
                    .with("fbar_star", *fbar_star)
                    .with("i_k", *i_k),
                Certificate::None { min_excess } => {
                    Value::map().with("xbar", Value::point(x)).with("certified", false).with("min_excess", *min_excess)
                }
            });
            let solves = residual >= ExtReal::finite(-num.tol);
            t.push(row(x, vec![residual.into(), gap.into(), solves.into(), cert.is_certified().into()]));
        }
        rep.result("certificates", certs);
        rep.table("ep_points", t);
    }

    if let Some(sb) = &ep.sweep {
        let xs: Vec<Vec<f64>> = num.grid_from(Some(sb), n, Some(&k), None, "ep.sweep")?.points().into_iter().filter(|x| k.contains(x)).collect();
        let rows = certificate_sweep(&inst, &xs, &ksg, &yg, num.tol)?;
        let bad = rows.iter().filter(|r| r.solves != r.certified).count();
        rep.check(
            "certificate iff solution on the sweep",
            bad == 0,
            Value::map().with("points", rows.len()).with("disagreements", bad),
        );
        let mut t = Table::with_coords("x", n, &["residual", "solves", "certified"]);
        for r in &rows {
            t.push(row(&r.xbar, vec![r.residual.into(), r.solves.into(), r.certified.into()]));
        }
        rep.table("ep_sweep", t);
    }

    if let Some(z) = &ep.zdgp {
        let ztol = z.tol.unwrap_or(1e-4);
        let cg = num.grid_from(z.c.as_ref(), n, None, None, "ep.zdgp.c")?;
        rep.result("zdgp_tol", ztol);
        for coupling in [ZdgpCoupling::ConeInner, ZdgpCoupling::IkShifted] {
            let r = zdgp_check(&inst, coupling, &z.sample, &yg, &cg, ztol)?;
            rep.check(
                &format!("{}: zero duality gap on the sample", coupling.name()),
                r.passed(ztol),
                Value::map().with("max_abs_sum", r.max_abs_sum).with("tol", ztol),
            );
            let fenchel: Vec<ExtReal<f64>> = r.rows.iter().filter_map(|row| row.fenchel_min).collect();
            if !fenchel.is_empty() {
                let min = fenchel.iter().copied().fold(ExtReal::PosInf, ExtReal::min);
                rep.check(
                    &format!("{}: Fenchel lower bound", coupling.name()),
                    min >= ExtReal::finite(-num.tol),
                    Value::map().with("min", min),
                );
            }
            let mut t = Table::with_coords("x", n, &["primal_inf", "dual_inf", "sum"]);
            for row_ in &r.rows {
                t.push(row(&row_.x, vec![row_.primal_inf.into(), row_.dual_inf.into(), row_.sum.into()]));
            }
            rep.table(&format!("zdgp_{}", coupling.name()), t);
        }
    }
    Ok(())
}

fn vip_block(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let v = block(&pf.vip, "vip")?;
    let n = pf.n();
    let c = v.c.to_set(n, "vip.C")?;
    let pts: Vec<Vec<f64>> =
        num.grid_from(v.sample.as_ref(), n, Some(&c), Some(11), "vip.sample")?.points().into_iter().filter(|x| c.contains(x)).collect();
    let inst = VIPInstance::new(c, v.m.clone(), v.q.clone(), &pts)?;
    let gaps: Vec<ExtReal<f64>> = pts.iter().map(|x| vip_gap(&inst, x)).collect::<gcoupling::Result<_>>()?;
    let min = gaps.iter().copied().fold(ExtReal::PosInf, ExtReal::min);
    rep.check("VIP gap >= 0 on C", min >= ExtReal::finite(-num.tol), Value::map().with("min", min));
    let mut worst = f64::NEG_INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let mid: Vec<f64> = pts[i].iter().zip(&pts[j]).map(|(a, b)| 0.5 * (a + b)).collect();
            let lhs = vip_gap(&inst, &mid)?.to_f64();
            let rhs = 0.5 * (gaps[i].to_f64() + gaps[j].to_f64());
            worst = worst.max(lhs - rhs);
        }
    }
    rep.check(
        "VIP gap midpoint convex",
        worst <= num.tol,
        Value::map().with("max_excess", worst).with("pairs", pts.len() * pts.len().saturating_sub(1) / 2),
    );
    rep.result("vip_monotone_on_sample", inst.monotone_on_sample(num.tol));
    let mut t = Table::with_coords("x", n, &["gap"]);
    for (x, g) in pts.iter().zip(&gaps) {
        t.push(row(x, vec![(*g).into()]));
    }
    rep.table("vip_gap", t);
    Ok(())
}

fn epvip_block(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let e = block(&pf.epvip, "epvip")?;
    let n = pf.n();
    let f = pf.proper_fn()?;
    let op = e
        .op
        .iter()
        .enumerate()
        .map(|(i, t)| ProblemFile::parse_expr(t, &vars("x", n), &format!("epvip.op[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let eta = e
        .eta
        .iter()
        .enumerate()
        .map(|(i, t)| ProblemFile::parse_expr(t, &vars2("y", "x", n, n), &format!("epvip.eta[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let dom = f.dom_hint().clone();
    let inst = EPVIPInstance::from_exprs(f, op, eta)?;
    let pts: Vec<Vec<f64>> =
        num.grid_from(e.sample.as_ref(), n, Some(&dom), Some(11), "epvip.sample")?.points().into_iter().filter(|x| dom.contains(x)).collect();
    let yg = num.grid_from(e.y.as_ref(), n, Some(&dom), None, "epvip.y")?;
    let diag = inst.eta_vanishes_on_diagonal(&pts, num.tol)?;
    rep.check("eta(x, x) = 0 on the sample", diag, Value::Null);
    let gaps: Vec<ExtReal<f64>> = pts.iter().map(|x| epvip_gap(&inst, x, &yg)).collect::<gcoupling::Result<_>>()?;
    let max = gaps.iter().copied().fold(ExtReal::NegInf, ExtReal::max);
    rep.check("EPVIP gap <= 0", max <= ExtReal::finite(num.tol), Value::map().with("max", max));
    let mut t = Table::with_coords("x", n, &["gap"]);
    for (x, g) in pts.iter().zip(&gaps) {
        t.push(row(x, vec![(*g).into()]));
    }
    rep.table("epvip_gap", t);
    Ok(())
}

fn to_rational(v: f64, path: &str) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| CliError::schema(path, "entries must be finite"))
}

fn complementarity(pf: &ProblemFile, num: &Numeric, rep: &mut Report) -> Result<()> {
    let c = block(&pf.cp, "cp")?;
    let n = pf.n();
    let k = match &c.k {
        Some(s) => s.to_set(n, "cp.K")?,
        None => SetSpec::Orthant(n),
    };
    let inst = CPInstance::affine(k.clone(), c.m.clone(), c.q.clone())?;

    if k == SetSpec::Orthant(n) {
        let mr = c
            .m
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, &v)| to_rational(v, &format!("cp.M[{i}][{j}]"))).collect())
            .collect::<Result<Vec<Vec<Rational>>>>()?;
        let qr = c.q.iter().enumerate().map(|(i, &v)| to_rational(v, &format!("cp.q[{i}]"))).collect::<Result<Vec<_>>>()?;
        match lcp_enumerate(&mr, &qr, &Rational::zero())? {
            Some(x) => {
                let xf: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
                let verdict = cp_check(&inst, &xf, num.tol)?;
                rep.check(
                    "enumerated solution solves the CP",
                    verdict.solves,
                    Value::map().with("complementarity", verdict.complementarity),
                );
                let dual = cp_dual_closed_form(&inst, &xf, &inst.apply(&xf)?)?;
                rep.check(
                    "dual infimum vanishes at the solution",
                    dual.distance(ExtReal::zero()) <= num.tol,
                    Value::map().with("dual_inf", dual),
                );
                rep.result(
                    "solution",
                    Value::map()
                        .with("exact", x.iter().map(|v| Value::Str(v.to_string())).collect::<Vec<_>>())
                        .with("x", Value::point(&xf))
                        .with("dual_inf", dual),
                );
            }
            None => rep.result("solution", Value::Null),
        }
    } else {
        rep.result("solution", "enumeration needs K = orthant");
    }

    let radius = c.pair_radius.unwrap_or(2.0);
    let ydefault = GridBlock { radius: Some(2.0 * radius), points: Some(21), ..GridBlock::default() };
    let yg = num.grid_from(Some(c.y.as_ref().unwrap_or(&ydefault)), n, Some(&k), None, "cp.y")?;
    let pairs = c.pairs.unwrap_or(100);
    let dual_tol = c.dual_tol.unwrap_or(num.tol);
    let cross = cp_dual_cross_check(&inst, pairs, radius, num.seed, &yg, dual_tol)?;
    rep.check(
        "closed-form dual matches engine conjugate",
        cross.agree,
        Value::map().with("pairs", cross.pairs.len()).with("max_distance", cross.max_distance).with("tol", dual_tol),
    );

    let pdefault = GridBlock { radius: Some(1.0), points: Some(5), ..GridBlock::default() };
    let pts = num.grid_from(Some(c.points.as_ref().unwrap_or(&pdefault)), n, Some(&k), None, "cp.points")?.points();
    let cdefault = GridBlock { radius: Some(2.0), points: Some(5), ..GridBlock::default() };
    let cg = num.grid_from(Some(c.c.as_ref().unwrap_or(&cdefault)), n, Some(&inst.k_plus), None, "cp.c")?;
    let eq = cp_zdgp_equivalence(&inst, &pts, &yg, &cg, num.tol)?;
    rep.check("F = T^-1(K+) matches the divergence test", eq.f_agrees, Value::map().with("points", eq.rows.len()));
    rep.check("dual infimum vanishes exactly at solutions", eq.dual_agrees, Value::Null);
    rep.result("grids", Value::map().with("y", grid_value(&yg)).with("c", grid_value(&cg)));
    let mut t = Table::with_coords("x", n, &["in_f_by_divergence", "in_f_analytic", "solves", "dual_inf"]);
    for r in &eq.rows {
        t.push(row(&r.x, vec![r.in_f_by_divergence.into(), r.in_f_analytic.into(), r.solves.into(), r.dual_inf.into()]));
    }
    rep.table("equivalence", t);
    let mut t = Table::with_coords("x", n, &[]);
    t.columns.extend((1..=n).map(|i| format!("s{i}")));
    t.columns.extend(["closed_form".to_string(), "engine".to_string()]);
    for (((x, s), a), b) in cross.pairs.iter().zip(&cross.closed_form).zip(&cross.engine) {
        let mut r = coords(x);
        r.extend(coords(s));
        r.extend([(*a).into(), (*b).into()]);
        t.push(r);
    }
    rep.table("dual_pairs", t);
    Ok(())
}
