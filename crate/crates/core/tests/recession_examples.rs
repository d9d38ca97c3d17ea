use std::sync::Arc;

use gcoupling::conjugate::GammaFn;
use gcoupling::coupling::{builtin_coupling, BuiltinParams, ProperFn};
use gcoupling::recession::{
    compactness_verdict, recession_directions_analytic, zero_set, DirectionGrid, RecessionOptions,
};
use gcoupling::{BoundingBox, ExtReal, GridSpec, SetSpec};

fn square_gamma() -> GammaFn<f64> {
    let f = ProperFn::new(1, "x^2", SetSpec::Full(1), |x: &[f64]| Ok(ExtReal::finite(x[0] * x[0])));
    let g = builtin_coupling("square_product", &BuiltinParams::dim(1)).unwrap();
    let cg = GridSpec::interval(-2.0, 2.0, 201).unwrap();
    let xg = GridSpec::interval(-2.0, 2.0, 201).unwrap();
    GammaFn::build(f, g, &cg, xg).unwrap()
}

fn exp_gamma() -> GammaFn<f64> {
    let f = ProperFn::new(1, "exp(x)", SetSpec::Full(1), |x: &[f64]| ExtReal::checked(x[0].exp(), "exp"));
    let g = builtin_coupling("exp", &BuiltinParams::dim(1)).unwrap();
    let cg = GridSpec::interval(-2.0, 2.0, 5).unwrap();
    let xg = GridSpec::interval(-20.0, 20.0, 201).unwrap();
    GammaFn::build(f, g, &cg, xg).unwrap()
}

#[test]
fn square_product_zero_set_is_compact_and_cone_trivial() {
    let gamma = square_gamma();
    let bbox = BoundingBox::centered(2, 2.0).unwrap();
    let rep = compactness_verdict(&gamma, &bbox, 201, &RecessionOptions::default()).unwrap();
    assert!(rep.passed(), "{rep:#?}");
    assert!(rep.r_is_zero);
    assert!(rep.m_nonempty && rep.m_bounded);
    assert!(rep.s1_bounded);
    // m(γ) = {0} × [−1, 1]
    for p in &rep.zero_set.cloud.points {
        assert!(p[0].abs() < 1e-3 && p[1].abs() <= 1.0 + 1e-12, "{p:?}");
    }
    assert_eq!(rep.zero_set.cloud.len(), 101);
}

#[test]
fn exponential_zero_set_is_empty_and_cone_is_quadrant() {
    let gamma = exp_gamma();
    let bbox = BoundingBox::centered(2, 200.0).unwrap();
    let rep = compactness_verdict(&gamma, &bbox, 401, &RecessionOptions::default()).unwrap();
    assert!(rep.passed(), "{rep:#?}");
    assert!(!rep.m_nonempty);
    assert!(rep.zero_set.approached_at_infinity);
    assert!(!rep.r_is_zero);
    let grid = Arc::new(DirectionGrid::new(2, 1.0).unwrap());
    let quadrant = SetSpec::halfspaces(2, vec![(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)]).unwrap();
    let exact = recession_directions_analytic(&quadrant, grid).unwrap();
    assert!(rep.r.value.approx_eq(&exact, 5.0), "{:?}", rep.r.value.members);
}

#[test]
fn exponential_near_zeros_are_not_attained() {
    let gamma = exp_gamma();
    let zs = zero_set(&gamma, &BoundingBox::centered(2, 20.0).unwrap(), 81, 1e-6).unwrap();
    assert!(zs.approached_at_infinity);
    assert!(zs.cloud.is_empty());
    assert!(zs.min_gamma > ExtReal::zero());
}
