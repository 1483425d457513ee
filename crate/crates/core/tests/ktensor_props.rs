use gradedq_core::connection::build_qe;
use gradedq_core::ktensors::*;
use gradedq_core::parse::parse_scalar;
use gradedq_core::random::Sampler;
use gradedq_core::*;
use proptest::prelude::*;

fn rf(s: &str) -> RationalFunction {
    parse_scalar(s, None).unwrap()
}

fn random_k(s: &mut Sampler, n: usize) -> KConnection {
    let mut k = KConnection::zero(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                k.set(a, b, c, s.poly()).unwrap();
            }
        }
    }
    k
}

/// `x'2 = x2 + x1²` (and `x'3 = x3 + x1 x2` when `n = 3`).
fn triangular(n: usize) -> ChartChange {
    let (f, i) = match n {
        2 => (vec!["x1", "x2 + x1^2"], vec!["x1", "x2 - x1^2"]),
        _ => (vec!["x1", "x2 + x1^2", "x3 + x1*x2"], vec!["x1", "x2 - x1^2", "x3 - x1*x2 + x1^3"]),
    };
    ChartChange::new(f.into_iter().map(rf).collect(), i.into_iter().map(rf).collect()).unwrap()
}

/// `V'^{μα}_β` read off from `Q'(s_β)`.
fn v_from(q: &Derivation, bundle: &BundleChart, n: usize) -> GenConnection {
    let chart = bundle.chart();
    let mut c = GenConnection::zero(n, bundle.rank());
    for beta in 0..bundle.rank() {
        let coeffs = bundle.fibre_coefficients(q.image(Var::Gen(bundle.s(beta)))).unwrap();
        for (alpha, f) in coeffs.iter().enumerate() {
            for mu in 0..n {
                c.set_v(mu, alpha, beta, f.partial(Var::Gen(chart.b(mu))).scalar_part());
            }
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn k_curvature_split(seed in any::<u64>(), n in 2usize..=3, rank in 1usize..=2) {
        let mut s = Sampler::new(seed, n);
        s.max_degree = 1;
        let m = s.courant_model();
        let c = s.connection(rank, true);
        let k = random_k(&mut s, n);
        let kc = k_curvature(&m, &c, &k, &BundleChart::general(n, rank, 0)).unwrap();
        prop_assert!(kc.mismatch().is_none());
    }

    #[test]
    fn k_torsion_split(seed in any::<u64>(), n in 2usize..=3) {
        let mut s = Sampler::new(seed, n);
        s.max_degree = 1;
        let m = s.courant_model();
        let c = s.connection(2 * n, true);
        let k = random_k(&mut s, n);
        let kt = k_torsion(&m, &c, &k, &BundleChart::generalized_tangent(n, -1)).unwrap();
        prop_assert_eq!(kt.graded, kt.closed_form);
    }

    #[test]
    fn naive_comparison_residuals_are_exactly_predicted(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 3);
        s.max_degree = 1;
        let m = s.courant_model();
        let c = s.connection(6, true);
        let k = random_k(&mut s, 3);
        let (a, b) = (s.section(), s.section());
        let cmp = compare_naive(&m, &c, &k, &a, &b).unwrap();
        let (pc, pt) = predicted_residuals(&m, &c, &a, &b);
        prop_assert!(cmp.explained_by(&pc, &pt));
    }

    #[test]
    fn curvature_comparison_holds_without_flux(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 3);
        s.max_degree = 1;
        let m = CourantModel::new(3);
        let c = s.connection(6, true);
        let k = random_k(&mut s, 3);
        let cmp = compare_naive(&m, &c, &k, &s.section(), &s.section()).unwrap();
        prop_assert!(cmp.curvature_holds());
    }

    #[test]
    fn ptilde_is_covariant(seed in any::<u64>(), n in 2usize..=3) {
        let mut s = Sampler::new(seed, n);
        let k = random_k(&mut s, n);
        let change = triangular(n);
        let chart = Chart::courant(n);
        let primed = tilde_p(&k.transform(&change).unwrap(), &chart);
        let old = tilde_p(&k, &chart);
        let ji = change.jacobian_inverse();
        for mu in 0..n {
            let mut expected = GradedPoly::zero(&chart);
            for nu in 0..n {
                expected = &expected + &old[nu].scale(&ji[nu][mu]);
            }
            prop_assert_eq!(change.substitute(&primed[mu]).unwrap(), expected);
        }
    }

    #[test]
    fn k_curvature_is_tensorial(seed in any::<u64>()) {
        let n = 2;
        let mut s = Sampler::new(seed, n);
        s.max_degree = 1;
        let m = CourantModel::new(n);
        let c = s.connection(2, true);
        let k = random_k(&mut s, n);
        let bundle = BundleChart::general(n, 2, 0);
        let change = triangular(n);
        let q = build_qe(&m, &c, &bundle).unwrap();
        let q2 = change.pushforward(&q).unwrap();
        let c2 = v_from(&q2, &bundle, n);
        let r2 = q2.square().unwrap();
        let pt2 = tilde_p(&k.transform(&change).unwrap(), bundle.chart());
        let rk = k_curvature(&m, &c, &k, &bundle).unwrap().graded;
        for beta in 0..2 {
            let coeffs = bundle.fibre_coefficients(r2.image(Var::Gen(bundle.s(beta)))).unwrap();
            for alpha in 0..2 {
                let mut f = coeffs[alpha].clone();
                for mu in 0..n {
                    f = &f - &pt2[mu].scale(c2.v(mu, alpha, beta));
                }
                prop_assert_eq!(change.substitute(&f).unwrap(), rk[alpha][beta].clone());
            }
        }
    }

    #[test]
    fn k_torsion_is_tensorial(seed in any::<u64>()) {
        let n = 2;
        let mut s = Sampler::new(seed, n);
        s.max_degree = 1;
        let m = CourantModel::new(n);
        let c = s.connection(2 * n, true);
        let k = random_k(&mut s, n);
        let bundle = BundleChart::generalized_tangent(n, -1);
        let change = triangular(n);
        let tau = bundle.tautological();
        prop_assert_eq!(change.substitute(&tau).unwrap(), tau.clone());
        let q2 = change.pushforward(&build_qe(&m, &c, &bundle).unwrap()).unwrap();
        let pt2 = tilde_p(&k.transform(&change).unwrap(), bundle.chart());
        let mut t2 = q2.apply(&tau).unwrap();
        for mu in 0..n {
            t2 = &t2 - &(&pt2[mu] * &bundle.s_poly(n + mu));
        }
        let tk = k_torsion(&m, &c, &k, &bundle).unwrap().graded;
        prop_assert_eq!(change.substitute(&t2).unwrap(), tk);
    }
}

#[test]
fn literal_torsion_comparison_fails_off_isotropy() {
    let m = CourantModel::new(2);
    let c = GenConnection::zero_generalized(2);
    let k = KConnection::zero(2);
    let a = GenSection::coordinate_vector(2, 0);
    let b = GenSection { vector: vec![rf("0"), rf("0")], form: vec![rf("x1"), rf("0")] };
    let cmp = compare_naive(&m, &c, &k, &a, &b).unwrap();
    assert!(!cmp.torsion_holds());
    // ½ d⟨∂1, x1 dx1⟩ = ½ dx1
    assert_eq!(cmp.torsion_residual.form, vec![rf("1/2"), rf("0")]);
}
