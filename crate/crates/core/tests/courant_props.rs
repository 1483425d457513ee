use gradedq_core::courant::{dorfman, dorfman_skew, hamiltonian_vf, pairing, poisson_bracket};
use gradedq_core::random::Sampler;
use gradedq_core::{CourantModel, GenSection, GradedPoly, RationalFunction};
use proptest::prelude::*;

fn random_model(s: &mut Sampler, n: usize) -> CourantModel {
    let mut m = CourantModel::new(n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                m.set_h(i, j, k, s.poly()).unwrap();
            }
        }
    }
    m
}

fn random_section(s: &mut Sampler, n: usize) -> GenSection {
    GenSection { vector: (0..n).map(|_| s.poly()).collect(), form: (0..n).map(|_| s.poly()).collect() }
}

/// A random homogeneous element built from a few random monomials.
fn random_graded(s: &mut Sampler, m: &CourantModel, degree: i32) -> GradedPoly {
    let c = m.chart();
    let mut acc = GradedPoly::zero(c);
    for _ in 0..3 {
        let mut t = GradedPoly::scalar(c, s.poly());
        let mut d = 0;
        while d < degree {
            let i = s.index(c.len());
            let gd = c.generator(i).degree;
            if d + gd <= degree {
                t = &t * &GradedPoly::gen(c, i);
                d += gd;
            }
        }
        acc = &acc + &t;
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hamiltonian_of_theta_is_dm(seed in any::<u64>(), n in 1usize..=4) {
        let mut s = Sampler::new(seed, n);
        let m = random_model(&mut s, n);
        let x = hamiltonian_vf(&m.theta()).unwrap();
        prop_assert_eq!(x.len(), 1);
        prop_assert_eq!(m.dm().first_difference(&x[0]), None);
    }

    #[test]
    fn master_equation_iff_closed(seed in any::<u64>(), n in 3usize..=4) {
        let mut s = Sampler::new(seed, n);
        let m = random_model(&mut s, n);
        let r = m.check_master();
        prop_assert!(r.consistent);
        prop_assert_eq!(m.dm().square().unwrap().is_zero(), r.dh.is_empty());
    }

    #[test]
    fn bracket_graded_antisymmetry(seed in any::<u64>(), df in 0i32..=4, dg in 0i32..=4) {
        let mut s = Sampler::new(seed, 2);
        let m = random_model(&mut s, 2);
        let f = random_graded(&mut s, &m, df);
        let g = random_graded(&mut s, &m, dg);
        let fg = poisson_bracket(&f, &g).unwrap();
        let gf = poisson_bracket(&g, &f).unwrap();
        // {f,g} = −(−1)^{(|f|−2)(|g|−2)} {g,f}
        let expected = if (df * dg) % 2 == 0 { -&gf } else { gf };
        prop_assert_eq!(fg, expected);
    }

    #[test]
    fn bracket_jacobi(seed in any::<u64>(), df in 1i32..=3, dg in 1i32..=3, dh in 0i32..=2) {
        let mut s = Sampler::new(seed, 2);
        let m = random_model(&mut s, 2);
        let (f, g, h) = (random_graded(&mut s, &m, df), random_graded(&mut s, &m, dg), random_graded(&mut s, &m, dh));
        let pb = |a: &GradedPoly, b: &GradedPoly| poisson_bracket(a, b).unwrap();
        // {f,{g,h}} = {{f,g},h} + (−1)^{(|f|−2)(|g|−2)} {g,{f,h}}
        let lhs = pb(&f, &pb(&g, &h));
        let last = pb(&g, &pb(&f, &h));
        let rhs = &pb(&pb(&f, &g), &h) + &(if (df * dg) % 2 == 0 { last } else { -&last });
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dorfman_skew_of_self_vanishes(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 3);
        let m = random_model(&mut s, 3);
        let a = random_section(&mut s, 3);
        prop_assert!(dorfman_skew(&a, &a, &m).is_zero());
        // [[a,a]] = ½ d⟨a,a⟩
        let half = RationalFunction::from_q(gradedq_core::rational::Q::new(1.into(), 2.into()));
        prop_assert_eq!(dorfman(&a, &a, &m), GenSection::differential(3, &pairing(&a, &a)).scale(&half));
    }

    #[test]
    fn dorfman_leibniz_over_anchor(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 3);
        let m = random_model(&mut s, 3);
        let (a, b) = (random_section(&mut s, 3), random_section(&mut s, 3));
        let f = s.poly();
        let lhs = dorfman(&a, &b.scale(&f), &m);
        let rhs = dorfman(&a, &b, &m).scale(&f).add(&b.scale(&a.act(&f)));
        prop_assert_eq!(lhs, rhs);
    }
}
