use gcoupling::complementarity::{cp_check, cp_dual_cross_check, cp_zdgp_equivalence, lcp_enumerate};
use gcoupling::linalg::rational;
use gcoupling::{BoundingBox, CPInstance, GridSpec, Rational};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(seed: u64, cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        max_shrink_iters: 64,
        ..ProptestConfig::default()
    }
}

/// Strictly diagonally dominant with positive diagonal, hence a P-matrix.
fn p_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (prop::collection::vec(prop::collection::vec(-3i64..=3, n), n), prop::collection::vec(1i64..=4, n)).prop_map(|(mut m, pad)| {
        for (i, row) in m.iter_mut().enumerate() {
            let off: i64 = row.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.abs()).sum();
            row[i] = off + pad[i];
        }
        m
    })
}

fn lcp_case() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>)> {
    (2usize..=4).prop_flat_map(|n| (p_matrix(n), prop::collection::vec(-5i64..=5, n)))
}

fn to_f64(m: &[Vec<i64>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect()
}

proptest! {
    #![proptest_config(config(41, 256))]

    #[test]
    fn enumeration_and_check_agree((m, q) in lcp_case(), probes in prop::collection::vec(prop::collection::vec(0u8..=4, 4), 8)) {
        let n = q.len();
        let mr: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&v| rational(v, 1)).collect()).collect();
        let qr: Vec<Rational> = q.iter().map(|&v| rational(v, 1)).collect();
        let x = lcp_enumerate(&mr, &qr, &Rational::zero()).unwrap().expect("P-matrix LCPs are solvable");
        let w: Vec<Rational> = (0..n).map(|i| (0..n).fold(qr[i].clone(), |s, j| s + &mr[i][j] * &x[j])).collect();
        prop_assert!(x.iter().chain(&w).all(|v| *v >= Rational::zero()));
        prop_assert!(x.iter().zip(&w).all(|(a, b)| (a * b).is_zero()));

        let xf: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap()).collect();
        let inst = CPInstance::lcp(to_f64(&m), q.iter().map(|&v| v as f64).collect()).unwrap();
        prop_assert!(cp_check(&inst, &xf, 1e-12).unwrap().solves);
        let float = lcp_enumerate(&to_f64(&m), &q.iter().map(|&v| v as f64).collect::<Vec<_>>(), &1e-12).unwrap().unwrap();
        prop_assert!(float.iter().zip(&xf).all(|(a, b)| (a - b).abs() <= 1e-12));

        for p in probes {
            let y: Vec<f64> = p[..n].iter().map(|&k| f64::from(k) * 0.5).collect();
            let same = y.iter().zip(&xf).all(|(a, b)| (a - b).abs() <= 1e-12);
            prop_assert_eq!(cp_check(&inst, &y, 1e-12).unwrap().solves, same, "{:?} vs {:?}", y, xf);
        }
    }
}

proptest! {
    #![proptest_config(config(42, 8))]

    #[test]
    fn closed_form_dual_matches_engine(m in p_matrix(2), q in prop::collection::vec(-3i64..=3, 2), seed in any::<u64>()) {
        let inst = CPInstance::lcp(to_f64(&m), q.iter().map(|&v| v as f64).collect()).unwrap();
        let yg = GridSpec::new(BoundingBox::new(vec![0.0; 2], vec![4.0; 2]).unwrap(), 21).unwrap();
        let rep = cp_dual_cross_check(&inst, 12, 2.0, seed, &yg, 1e-6).unwrap();
        prop_assert!(rep.agree, "{}", rep.max_distance);
    }

    #[test]
    fn divergence_membership_matches_preimage(m in p_matrix(2), q in prop::collection::vec(-3i64..=3, 2)) {
        let inst = CPInstance::lcp(to_f64(&m), q.iter().map(|&v| v as f64).collect()).unwrap();
        let pts = GridSpec::new(BoundingBox::new(vec![0.0; 2], vec![1.0; 2]).unwrap(), 5).unwrap().points();
        let yg = GridSpec::new(BoundingBox::new(vec![0.0; 2], vec![2.0; 2]).unwrap(), 11).unwrap();
        let cg = GridSpec::new(BoundingBox::new(vec![0.0; 2], vec![2.0; 2]).unwrap(), 5).unwrap();
        let rep = cp_zdgp_equivalence(&inst, &pts, &yg, &cg, 1e-9).unwrap();
        prop_assert!(rep.f_agrees, "{:?}", rep.rows.iter().find(|r| r.in_f_by_divergence != r.in_f_analytic));
    }
}
