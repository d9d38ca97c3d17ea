#![allow(dead_code)]

use gcoupling::{builtin_coupling, BuiltinParams, CouplingFn, ExtReal, GridSpec, ProperFn, SetSpec};

pub struct Example {
    pub f: ProperFn<f64>,
    pub g: CouplingFn<f64>,
    pub cgrid: GridSpec<f64>,
    pub xgrid: GridSpec<f64>,
}

pub fn square() -> ProperFn<f64> {
    ProperFn::new(1, "x^2", SetSpec::Full(1), |x: &[f64]| Ok(ExtReal::finite(x[0] * x[0])))
}

pub fn square_product() -> Example {
    Example {
        f: square(),
        g: builtin_coupling("square_product", &BuiltinParams::dim(1)).unwrap(),
        cgrid: GridSpec::interval(-2.0, 2.0, 201).unwrap(),
        xgrid: GridSpec::interval(-2.0, 2.0, 201).unwrap(),
    }
}

pub fn reciprocal() -> Example {
    let f = ProperFn::new(1, "x^2 on x >= 0", SetSpec::Orthant(1), |x: &[f64]| {
        Ok(if x[0] >= 0.0 { ExtReal::finite(x[0] * x[0]) } else { ExtReal::PosInf })
    });
    Example {
        f,
        g: builtin_coupling("reciprocal", &BuiltinParams::dim(1)).unwrap(),
        cgrid: GridSpec::interval(0.0, 4.0, 201).unwrap(),
        xgrid: GridSpec::interval(-2.0, 2.0, 201).unwrap(),
    }
}

pub fn exponential() -> Example {
    Example {
        f: ProperFn::new(1, "exp(x)", SetSpec::Full(1), |x: &[f64]| ExtReal::checked(x[0].exp(), "exp")),
        g: builtin_coupling("exp", &BuiltinParams::dim(1)).unwrap(),
        cgrid: GridSpec::interval(-2.0, 2.0, 201).unwrap(),
        xgrid: GridSpec::interval(-20.0, 20.0, 201).unwrap(),
    }
}

pub fn norm_on_dom(n: usize) -> Example {
    let f = ProperFn::new(n, "|x|^2", SetSpec::Full(n), |x: &[f64]| Ok(ExtReal::finite(x.iter().map(|v| v * v).sum())));
    Example {
        f,
        g: builtin_coupling("norm_on_dom", &BuiltinParams::dim(n).with_dom(SetSpec::Full(n))).unwrap(),
        cgrid: GridSpec::centered(n, 2.0, if n == 1 { 201 } else { 21 }).unwrap(),
        xgrid: GridSpec::centered(n, 2.0, if n == 1 { 201 } else { 21 }).unwrap(),
    }
}

/// Closed forms of the conjugates, frozen from hand derivations.
pub fn square_product_fg(s: f64) -> ExtReal<f64> {
    if s.abs() <= 1.0 {
        ExtReal::zero()
    } else {
        ExtReal::PosInf
    }
}

pub fn reciprocal_fg(_s: f64) -> ExtReal<f64> {
    ExtReal::finite(1.0)
}

pub fn exponential_fg(s: f64) -> ExtReal<f64> {
    if s <= 0.0 {
        ExtReal::zero()
    } else {
        ExtReal::PosInf
    }
}

pub fn norm_fg(s: &[f64]) -> ExtReal<f64> {
    ExtReal::finite(s.iter().map(|v| v * v).sum::<f64>().sqrt())
}
