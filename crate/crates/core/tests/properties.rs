use bmdist::bounds::{chain_bound, exact_distance};
use bmdist::certify::{certified_objective, ExactExponent, ExactMatrix};
use bmdist::gauge::{decompose, gamma1, gamma2, objective};
use bmdist::{dual_norm, p_norm, Exponent, SquareMatrix};
use proptest::prelude::*;

fn finite_exponent() -> impl Strategy<Value = Exponent> {
    (1.0f64..8.0).prop_map(|v| Exponent::new(v).unwrap())
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::ONE),
        Just(Exponent::TWO),
        Just(Exponent::INFINITY),
        finite_exponent(),
    ]
}

fn vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 3)
}

fn well_conditioned() -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-1.0f64..1.0, 9)
        .prop_map(|v| SquareMatrix::from_flat(&v).unwrap())
        .prop_filter("nonsingular", |a| decompose(a).det.abs() > 1e-2)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn norm_is_homogeneous(v in vector(), c in -50.0f64..50.0, p in exponent()) {
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert!(close(p_norm(&scaled, p), c.abs() * p_norm(&v, p), 1e-12));
    }

    #[test]
    fn triangle_inequality(x in vector(), y in vector(), z in vector(),
                           p in prop::sample::select(vec![1.0, 1.3, 2.0, 3.0, f64::INFINITY])) {
        let p = Exponent::new(p).unwrap();
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(s, t)| s - t).collect::<Vec<_>>();
        let lhs = p_norm(&sub(&x, &z), p);
        let rhs = p_norm(&sub(&x, &y), p) + p_norm(&sub(&y, &z), p);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn norm_non_increasing_in_p(v in vector(), a in 1.0f64..6.0, d in 0.0f64..6.0) {
        let lo = p_norm(&v, Exponent::new(a).unwrap());
        let hi = p_norm(&v, Exponent::new(a + d).unwrap());
        prop_assert!(hi <= lo * (1.0 + 1e-12));
        prop_assert!(p_norm(&v, Exponent::INFINITY) <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn holder(x in vector(), y in vector(), p in exponent()) {
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert!(dot.abs() <= dual_norm(&y, p) * p_norm(&x, p) * (1.0 + 1e-12) + 1e-9);
    }

    #[test]
    fn conjugation_round_trips(p in exponent()) {
        let back = p.conjugate().conjugate();
        prop_assert!(back == p || close(back.value(), p.value(), 4.0 * f64::EPSILON));
        if !p.is_infinite() && !p.conjugate().is_infinite() {
            prop_assert!((p.recip() + p.conjugate().recip() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn objective_is_a_gauge_ratio(a in well_conditioned(), p in exponent()) {
        let g = decompose(&a);
        let ratio = gamma1(&g, p) / gamma2(&g, p).unwrap();
        prop_assert!(close(objective(&a, p).unwrap(), ratio, 1e-12));
    }

    #[test]
    fn objective_bounded_below_by_exact_distance(a in well_conditioned(), p in exponent()) {
        let d = if p >= Exponent::TWO {
            exact_distance(p, Exponent::INFINITY, 3).unwrap()
        } else {
            1.0
        };
        prop_assert!(objective(&a, p).unwrap() >= d * (1.0 - 1e-12));
    }

    #[test]
    fn facet_distance_matches_hyperplane_formula(a in well_conditioned(), p in finite_exponent()) {
        // the point of the facet {y_jᵀx = det} nearest the origin in ℓ_p
        // satisfies Hölder with equality, so its norm is |det|/‖y_j‖_q
        let g = decompose(&a);
        let q = p.conjugate();
        for y in &g.cofactor_columns {
            let qn = dual_norm(y, p);
            let x: Vec<f64> = if q.is_infinite() {
                let k = (0..3).max_by(|&i, &j| y[i].abs().total_cmp(&y[j].abs())).unwrap();
                (0..3).map(|i| if i == k { y[i].signum() } else { 0.0 }).collect()
            } else {
                y.iter().map(|v| v.signum() * (v.abs() / qn).powf(q.value() - 1.0)).collect()
            };
            let dot: f64 = x.iter().zip(y).map(|(s, t)| s * t).sum();
            let t = g.det / dot;
            let point: Vec<f64> = x.iter().map(|v| v * t).collect();
            prop_assert!(close(p_norm(&point, p), g.det.abs() / qn, 1e-9));
        }
    }

    #[test]
    fn chain_with_own_anchor_is_identity(p in 1.0f64..2.0, b in 1.0f64..2.0) {
        let p = Exponent::new(p).unwrap();
        prop_assert_eq!(chain_bound(p, &[(p, b)]).unwrap().value, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certified_refinement_is_monotone(m in prop::array::uniform3(prop::array::uniform3(-9i64..=9)),
                                        p in prop::sample::select(vec!["1.3", "1.5", "1.7", "2.5"])) {
        let a = ExactMatrix::from_integers(m);
        let p: ExactExponent = p.parse().unwrap();
        let Ok(c64) = certified_objective(&a, &p, 64) else { return Ok(()); };
        let c128 = certified_objective(&a, &p, 128).unwrap();
        let c256 = certified_objective(&a, &p, 256).unwrap();
        prop_assert!(c128.hi <= c64.hi && c256.hi <= c128.hi);
        prop_assert!(c128.lo >= c64.lo && c256.lo >= c128.lo);
    }
}

#[test]
fn low_precision_never_passes_falsely() {
    let a1 = bmdist::certify::witness_a1();
    let p: ExactExponent = "1.7".parse().unwrap();
    let reference = certified_objective(&a1, &p, 256).unwrap();
    match certified_objective(&a1, &p, 32) {
        Ok(c) => assert!(c.hi >= reference.lo && c.lo <= reference.hi),
        Err(e) => assert!(matches!(e, bmdist::Error::PrecisionExhausted { .. })),
    }
    let rep = bmdist::certify::certify_theorem_with(&a1, &bmdist::certify::witness_a2(), 32);
    for link in &rep.links {
        assert_eq!(link.pass, link.recheck());
    }
}
