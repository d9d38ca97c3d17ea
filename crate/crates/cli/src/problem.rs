//! Problem files: JSON documents describing `f`, `g`, grids, tolerances and
//! one or more experiment blocks. See `docs/problem-files.md`.

use gcoupling::{
    builtin_coupling, parse, var_names, BoundingBox, BuiltinParams, CouplingFn, ExprFn, ExtReal, ProperFn, SetSpec,
};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::numeric::{GridBlock, NumericBlock};
use crate::report::Value;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: Option<String>,
    pub dims: Dims,
    pub f: Option<FunctionBlock>,
    pub g: Option<CouplingBlock>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub expect: Expect,
    pub lagrangian: Option<LagrangianBlock>,
    pub perturbation: Option<PerturbationBlock>,
    pub recession: Option<RecessionBlock>,
    pub ep: Option<EpBlock>,
    pub vip: Option<VipBlock>,
    pub epvip: Option<EpvipBlock>,
    pub cp: Option<CpBlock>,
    #[serde(default)]
    pub numeric: NumericBlock,
    /// The document as read, echoed into reports.
    #[serde(skip)]
    pub raw: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub n: usize,
    /// Dual dimension; defaults to `n`.
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionBlock {
    pub expr: Option<String>,
    pub builtin: Option<String>,
    pub dom: Option<SetJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingBlock {
    pub builtin: Option<String>,
    #[serde(default)]
    pub params: CouplingParams,
    pub expr: Option<String>,
    #[serde(rename = "C")]
    pub c: Option<SetJson>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    #[serde(rename = "K")]
    pub k: Option<SetJson>,
    pub dom: Option<SetJson>,
}

/// A set: `"full"`, `"orthant"`, `"origin"`, or an object tagged by `kind`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SetJson {
    Named(String),
    Spec(SetKind),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    Full,
    Orthant,
    Origin,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Intersection of `⟨normal, x⟩ ≥ offset`.
    Halfspaces { constraints: Vec<HalfspaceJson> },
    DualCone { of: Box<SetJson> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceJson {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub x: Option<GridBlock>,
    pub c: Option<GridBlock>,
}

/// Closed forms and verdicts a run is checked against.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    /// Expression over `s1..sm`; `inf` marks the divergent branch.
    pub fg: Option<String>,
    /// Expression over `x1..xn`.
    pub fgg: Option<String>,
    pub member: Option<bool>,
    pub no_gap: Option<bool>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianBlock {
    /// Constraints `h_i(x) ≤ 0` over `x1..xn`.
    pub constraints: Vec<String>,
    pub lambda: Option<GridBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationBlock {
    /// `φ(x, u)` over `x1..xn, u1..up`.
    pub phi: String,
    pub p: usize,
    pub u: Option<GridBlock>,
    pub ustar: Vec<Vec<f64>>,
    #[serde(default)]
    pub classic: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecessionBlock {
    /// Sampling lattice over `(x, x*)`.
    pub lattice: Option<GridBlock>,
    pub angular_tol_deg: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpBlock {
    #[serde(rename = "K")]
    pub k: SetJson,
    /// Bifunction over `x1..xn, y1..yn`.
    pub f: String,
    pub y: Option<GridBlock>,
    #[serde(default)]
    pub xbar: Vec<Vec<f64>>,
    pub sweep: Option<GridBlock>,
    pub kstar: Option<GridBlock>,
    pub zdgp: Option<ZdgpBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZdgpBlock {
    pub sample: Vec<Vec<f64>>,
    pub c: Option<GridBlock>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VipBlock {
    #[serde(rename = "C")]
    pub c: SetJson,
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    pub sample: Option<GridBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpvipBlock {
    /// Components of `F` over `x1..xn`.
    pub op: Vec<String>,
    /// Components of `η` over `y1..yn, x1..xn`.
    pub eta: Vec<String>,
    pub sample: Option<GridBlock>,
    pub y: Option<GridBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpBlock {
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Option<SetJson>,
    /// Lattice for the `F = T⁻¹(K⁺)` comparison.
    pub points: Option<GridBlock>,
    pub y: Option<GridBlock>,
    pub c: Option<GridBlock>,
    pub pairs: Option<usize>,
    pub pair_radius: Option<f64>,
    pub dual_tol: Option<f64>,
}

fn expr(text: &str, vars: &[String], path: &str) -> Result<ExprFn> {
    parse(text, vars).map_err(|e| CliError::schema(path, e))
}

pub fn vars(prefix: &str, n: usize) -> Vec<String> {
    var_names(prefix, n)
}

pub fn vars2(a: &str, b: &str, n: usize, m: usize) -> Vec<String> {
    let mut v = var_names(a, n);
    v.extend(var_names(b, m));
    v
}

fn check_len(path: &str, want: usize, got: usize) -> Result<()> {
    if want != got {
        return Err(CliError::schema(path, format!("expected {want} entries, got {got}")));
    }
    Ok(())
}

pub fn check_matrix(m: &[Vec<f64>], q: &[f64], n: usize, path: &str) -> Result<()> {
    check_len(&format!("{path}.q"), n, q.len())?;
    check_len(&format!("{path}.M"), n, m.len())?;
    for (i, row) in m.iter().enumerate() {
        check_len(&format!("{path}.M[{i}]"), n, row.len())?;
    }
    Ok(())
}

impl SetJson {
    pub fn to_set(&self, dim: usize, path: &str) -> Result<SetSpec<f64>> {
        let set = match self {
            SetJson::Named(name) => match name.as_str() {
                "full" => SetSpec::Full(dim),
                "orthant" => SetSpec::Orthant(dim),
                "origin" => SetSpec::origin(dim),
                other => {
                    return Err(CliError::schema(
                        path,
                        format!("unknown set `{other}` (expected full, orthant, origin or an object with `kind`)"),
                    ))
                }
            },
            SetJson::Spec(SetKind::Full) => SetSpec::Full(dim),
            SetJson::Spec(SetKind::Orthant) => SetSpec::Orthant(dim),
            SetJson::Spec(SetKind::Origin) => SetSpec::origin(dim),
            SetJson::Spec(SetKind::Box { lo, hi }) => {
                check_len(&format!("{path}.lo"), dim, lo.len())?;
                check_len(&format!("{path}.hi"), dim, hi.len())?;
                SetSpec::Box(BoundingBox::new(lo.clone(), hi.clone()).map_err(|e| CliError::schema(path, e))?)
            }
            SetJson::Spec(SetKind::Halfspaces { constraints }) => {
                for (i, h) in constraints.iter().enumerate() {
                    check_len(&format!("{path}.constraints[{i}].normal"), dim, h.normal.len())?;
                }
                SetSpec::halfspaces(dim, constraints.iter().map(|h| (h.normal.clone(), h.offset)).collect())
                    .map_err(|e| CliError::schema(path, e))?
            }
            SetJson::Spec(SetKind::DualCone { of }) => SetSpec::dual_cone_of(of.to_set(dim, &format!("{path}.of"))?),
        };
        set.validate().map_err(|e| CliError::schema(path, e))?;
        Ok(set)
    }
}

impl ProblemFile {
    /// Parses and validates a document. Errors carry the offending path.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::schema("<document>", e))?;
        let mut pf: ProblemFile = serde_path_to_error::deserialize(&raw).map_err(|e| {
            let path = e.path().to_string();
            CliError::schema(if path == "." { "<root>".to_string() } else { path }, e.into_inner())
        })?;
        pf.raw = Some(raw);
        pf.validate()?;
        Ok(pf)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn n(&self) -> usize {
        self.dims.n
    }

    pub fn m(&self) -> usize {
        self.dims.m.unwrap_or(self.dims.n)
    }

    pub fn inputs(&self) -> Value {
        self.raw.as_ref().map_or(Value::Null, Value::from_json)
    }

    /// Builds every declared component once so that errors surface at load.
    fn validate(&self) -> Result<()> {
        if self.dims.n == 0 {
            return Err(CliError::schema("dims.n", "must be positive"));
        }
        if self.dims.m == Some(0) {
            return Err(CliError::schema("dims.m", "must be positive"));
        }
        if self.f.is_some() {
            self.proper_fn()?;
        }
        if self.g.is_some() {
            self.coupling()?;
        }
        let (n, m) = (self.n(), self.m());
        if let Some(e) = &self.expect.fg {
            expr(e, &vars("s", m), "expect.fg")?;
        }
        if let Some(e) = &self.expect.fgg {
            expr(e, &vars("x", n), "expect.fgg")?;
        }
        if let Some(l) = &self.lagrangian {
            self.constraints(l)?;
            if self.f.is_none() {
                return Err(CliError::schema("f", "required by the lagrangian block"));
            }
        }
        if let Some(p) = &self.perturbation {
            expr(&p.phi, &vars2("x", "u", n, p.p), "perturbation.phi")?;
            for (i, u) in p.ustar.iter().enumerate() {
                check_len(&format!("perturbation.ustar[{i}]"), p.p, u.len())?;
            }
            if self.f.is_none() {
                return Err(CliError::schema("f", "required by the perturbation block"));
            }
        }
        if let Some(ep) = &self.ep {
            ep.k.to_set(n, "ep.K")?;
            expr(&ep.f, &vars2("x", "y", n, n), "ep.f")?;
            for (i, x) in ep.xbar.iter().enumerate() {
                check_len(&format!("ep.xbar[{i}]"), n, x.len())?;
            }
            if let Some(z) = &ep.zdgp {
                for (i, x) in z.sample.iter().enumerate() {
                    check_len(&format!("ep.zdgp.sample[{i}]"), n, x.len())?;
                }
            }
        }
        if let Some(v) = &self.vip {
            v.c.to_set(n, "vip.C")?;
            check_matrix(&v.m, &v.q, n, "vip")?;
        }
        if let Some(e) = &self.epvip {
            if self.f.is_none() {
                return Err(CliError::schema("f", "required by the epvip block"));
            }
            check_len("epvip.op", n, e.op.len())?;
            check_len("epvip.eta", n, e.eta.len())?;
            for (i, t) in e.op.iter().enumerate() {
                expr(t, &vars("x", n), &format!("epvip.op[{i}]"))?;
            }
            for (i, t) in e.eta.iter().enumerate() {
                expr(t, &vars2("y", "x", n, n), &format!("epvip.eta[{i}]"))?;
            }
        }
        if let Some(c) = &self.cp {
            check_matrix(&c.m, &c.q, n, "cp")?;
            if let Some(k) = &c.k {
                k.to_set(n, "cp.K")?;
            }
        }
        Ok(())
    }

    pub fn proper_fn(&self) -> Result<ProperFn<f64>> {
        let fb = self.f.as_ref().ok_or_else(|| CliError::schema("f", "missing"))?;
        let n = self.n();
        let dom = match &fb.dom {
            Some(s) => s.to_set(n, "f.dom")?,
            None => SetSpec::Full(n),
        };
        match (&fb.expr, &fb.builtin) {
            (Some(e), None) => {
                let body = expr(e, &vars("x", n), "f.expr")?;
                if fb.dom.is_none() {
                    return Ok(ProperFn::from_expr(body, dom));
                }
                let d = dom.clone();
                Ok(ProperFn::new(n, body.to_canonical(), dom, move |x: &[f64]| {
                    if d.contains(x) {
                        body.eval(x)
                    } else {
                        Ok(ExtReal::PosInf)
                    }
                }))
            }
            (None, Some(b)) => builtin_f(b, n, dom),
            _ => Err(CliError::schema("f", "give exactly one of expr or builtin")),
        }
    }

    pub fn coupling(&self) -> Result<CouplingFn<f64>> {
        let gb = self.g.as_ref().ok_or_else(|| CliError::schema("g", "missing"))?;
        let (n, m) = (self.n(), self.m());
        match (&gb.builtin, &gb.expr) {
            (Some(name), None) => {
                if gb.c.is_some() {
                    return Err(CliError::schema("g.C", "builtins fix their own C"));
                }
                let mut p = BuiltinParams::dim(n);
                p.m = self.dims.m;
                if let Some(k) = &gb.params.k {
                    p.k = Some(k.to_set(n, "g.params.K")?);
                }
                if let Some(d) = &gb.params.dom {
                    p.dom = Some(d.to_set(n, "g.params.dom")?);
                }
                builtin_coupling(name, &p).map_err(|e| CliError::schema("g.builtin", e))
            }
            (None, Some(e)) => {
                let c = gb.c.as_ref().ok_or_else(|| CliError::schema("g.C", "required with g.expr"))?;
                let c = c.to_set(m, "g.C")?;
                let body = expr(e, &vars2("x", "s", n, m), "g.expr")?;
                CouplingFn::from_expr(body, n, m, c).map_err(|e| CliError::schema("g.expr", e))
            }
            _ => Err(CliError::schema("g", "give exactly one of builtin or expr")),
        }
    }

    pub fn constraints(&self, l: &LagrangianBlock) -> Result<Vec<ProperFn<f64>>> {
        if l.constraints.is_empty() {
            return Err(CliError::schema("lagrangian.constraints", "at least one constraint is required"));
        }
        let n = self.n();
        l.constraints
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Ok(ProperFn::from_expr(expr(t, &vars("x", n), &format!("lagrangian.constraints[{i}]"))?, SetSpec::Full(n)))
            })
            .collect()
    }

    pub fn expect_expr(&self, which: &str) -> Result<Option<ExprFn>> {
        let (text, prefix, d) = match which {
            "fg" => (&self.expect.fg, "s", self.m()),
            _ => (&self.expect.fgg, "x", self.n()),
        };
        text.as_ref().map(|t| expr(t, &vars(prefix, d), &format!("expect.{which}"))).transpose()
    }

    pub fn parse_expr(text: &str, vars: &[String], path: &str) -> Result<ExprFn> {
        expr(text, vars, path)
    }
}

/// `square`: `Σ xᵢ²`; `exp`: `exp(Σ xᵢ)`; `norm`: `‖x‖`.
pub const F_BUILTINS: [&str; 3] = ["square", "exp", "norm"];

fn builtin_f(name: &str, n: usize, dom: SetSpec<f64>) -> Result<ProperFn<f64>> {
    let d = dom.clone();
    let restrict = move |x: &[f64], v: f64| {
        if d.contains(x) {
            ExtReal::checked(v, "builtin f")
        } else {
            Ok(ExtReal::PosInf)
        }
    };
    match name {
        "square" => Ok(ProperFn::new(n, "square", dom, move |x: &[f64]| restrict(x, x.iter().map(|v| v * v).sum()))),
        "exp" => Ok(ProperFn::new(n, "exp", dom, move |x: &[f64]| restrict(x, x.iter().sum::<f64>().exp()))),
        "norm" => Ok(ProperFn::new(n, "norm", dom, move |x: &[f64]| {
            restrict(x, x.iter().map(|v| v * v).sum::<f64>().sqrt())
        })),
        other => Err(CliError::schema("f.builtin", format!("unknown builtin `{other}` (expected one of {F_BUILTINS:?})"))),
    }
}
