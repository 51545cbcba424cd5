use chevalley::algebra::{PolyMatrix, Scalar, ScalarMatrix, SparsePoly};
use proptest::prelude::*;

const NVARS: usize = 3;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -3i64..=3).prop_map(|(a, d, b)| {
        &Scalar::from_frac(a, d) + &(&Scalar::from_int(b) * &Scalar::sqrt5())
    })
}

fn poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((prop::collection::vec(0u32..=3, NVARS), scalar()), 0..6)
        .prop_map(|terms| SparsePoly::from_terms(NVARS, terms).expect("right arity"))
}

fn rational_point() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-9i64..=9, 1i64..=5).prop_map(|(a, d)| Scalar::from_frac(a, d)), NVARS)
}

fn float_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, NVARS)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_evaluates_to_product_of_values(p in poly(), q in poly(), x in rational_point()) {
        let pq = &p * &q;
        let lhs = pq.eval_exact(&x).unwrap();
        let rhs = &p.eval_exact(&x).unwrap() * &q.eval_exact(&x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_rule(p in poly(), q in poly(), i in 0..NVARS) {
        let lhs = (&p * &q).diff(i).unwrap();
        let rhs = &(&p.diff(i).unwrap() * &q) + &(&p * &q.diff(i).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    /// `∇(p∘M)(x) = Mᵀ ∇p(Mx)`.
    #[test]
    fn chain_rule_for_linear_substitution(
        p in poly(),
        entries in prop::collection::vec(scalar(), NVARS * NVARS),
        x in rational_point(),
    ) {
        let rows = entries.chunks(NVARS).map(<[Scalar]>::to_vec).collect();
        let m = ScalarMatrix::from_rows(rows).unwrap();
        let q = p.linear_substitute(&m).unwrap();
        let mx = m.apply(&x);
        let grad_p: Vec<Scalar> = p.gradient().iter().map(|g| g.eval_exact(&mx).unwrap()).collect();
        for i in 0..NVARS {
            let lhs = q.diff(i).unwrap().eval_exact(&x).unwrap();
            let mut rhs = Scalar::zero();
            for (j, g) in grad_p.iter().enumerate() {
                rhs += &(m.get(j, i) * g);
            }
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn symbolic_determinant_matches_numeric(
        entries in prop::collection::vec(poly(), 9),
        x in float_point(),
    ) {
        let rows = entries.chunks(3).map(<[SparsePoly]>::to_vec).collect();
        let m = PolyMatrix::from_rows(rows).unwrap();
        let sym = m.det().unwrap().eval_f64(&x).unwrap();
        let num = m.eval_f64(&x).unwrap().determinant();
        let scale: f64 = entries.iter().map(|p| p.to_float().abs().eval(&x.iter().map(|v| v.abs()).collect::<Vec<_>>())).fold(1.0, f64::max);
        prop_assert!(close(sym, num, 1e-10 * scale.powi(3)), "{} vs {}", sym, num);
    }

    #[test]
    fn polynomial_json_round_trip(p in poly()) {
        let s = serde_json::to_string(&p).unwrap();
        let back: SparsePoly = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn exact_and_float_evaluation_agree(p in poly(), x in rational_point()) {
        let exact = p.eval_exact(&x).unwrap().to_f64();
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        let float = p.eval_f64(&xf).unwrap();
        prop_assert!(close(exact, float, 1e-9), "{} vs {}", exact, float);
    }

    #[test]
    fn division_inverts_multiplication(a in scalar(), b in scalar()) {
        prop_assume!(!b.is_zero());
        let q = (&a * &b).checked_div(&b).unwrap();
        prop_assert_eq!(q, a);
    }
}
