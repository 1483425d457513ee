use gradedq_core::algebroid::*;
use gradedq_core::linalg;
use gradedq_core::random::Sampler;
use gradedq_core::RationalFunction;
use proptest::prelude::*;

type Section = Vec<RationalFunction>;

fn random_section(s: &mut Sampler, r: usize) -> Section {
    (0..r).map(|_| s.poly()).collect()
}

fn random_connection(s: &mut Sampler, r: usize) -> AlgebroidConnection {
    let mut c = AlgebroidConnection::zero(r);
    for a in 0..r {
        for b in 0..r {
            for g in 0..r {
                c.set(a, b, g, s.poly()).unwrap();
            }
        }
    }
    c
}

fn random_unconstrained(s: &mut Sampler, n: usize, r: usize) -> AlgebroidModel {
    let mut m = AlgebroidModel::new(n, r);
    for mu in 0..n {
        for a in 0..r {
            m.set_rho(mu, a, s.poly()).unwrap();
        }
    }
    for g in 0..r {
        for a in 0..r {
            for b in a + 1..r {
                m.set_f(g, a, b, s.poly()).unwrap();
            }
        }
    }
    m
}

/// `TM` in the frame `e_α = A^μ_α ∂_μ` with `A` unipotent upper triangular.
/// The structure functions follow from the vector field commutator with the
/// convention `[e_α, e_β] = −f^γ_{αβ} e_γ`.
fn random_tangent_frame(s: &mut Sampler, n: usize) -> AlgebroidModel {
    let mut a = linalg::identity(n);
    for (i, row) in a.iter_mut().enumerate() {
        for entry in row.iter_mut().skip(i + 1) {
            *entry = s.poly();
        }
    }
    let ainv = linalg::inverse(&a).unwrap();
    let mut m = AlgebroidModel::new(n, n);
    for mu in 0..n {
        for al in 0..n {
            m.set_rho(mu, al, a[mu][al].clone()).unwrap();
        }
    }
    let col = |al: usize| -> Vec<RationalFunction> { (0..n).map(|mu| a[mu][al].clone()).collect() };
    for al in 0..n {
        for be in al + 1..n {
            let (x, y) = (col(al), col(be));
            let comm: Vec<RationalFunction> = (0..n)
                .map(|mu| {
                    let mut acc = RationalFunction::zero();
                    for nu in 0..n {
                        acc = &acc + &(&(&x[nu] * &y[mu].derivative(nu)) - &(&y[nu] * &x[mu].derivative(nu)));
                    }
                    acc
                })
                .collect();
            for g in 0..n {
                let mut acc = RationalFunction::zero();
                for mu in 0..n {
                    acc = &acc + &(&ainv[g][mu] * &comm[mu]);
                }
                m.set_f(g, al, be, -&acc).unwrap();
            }
        }
    }
    m
}

/// Independent oracle: the anchor preserves brackets and the Jacobiator
/// vanishes on the frame.
fn algebroid_oracle(m: &AlgebroidModel) -> bool {
    let r = m.rank();
    let e = |i: usize| -> Section {
        (0..r).map(|j| if i == j { RationalFunction::one() } else { RationalFunction::zero() }).collect()
    };
    let lie = |x: &[RationalFunction], y: &[RationalFunction]| -> Vec<RationalFunction> {
        (0..x.len())
            .map(|mu| {
                let mut acc = RationalFunction::zero();
                for nu in 0..x.len() {
                    acc = &acc + &(&(&x[nu] * &y[mu].derivative(nu)) - &(&y[nu] * &x[mu].derivative(nu)));
                }
                acc
            })
            .collect()
    };
    for a in 0..r {
        for b in 0..r {
            let br = m.bracket(&e(a), &e(b));
            if m.anchor(&br) != lie(&m.anchor(&e(a)), &m.anchor(&e(b))) {
                return false;
            }
            for c in 0..r {
                let j1 = m.bracket(&e(a), &m.bracket(&e(b), &e(c)));
                let j2 = m.bracket(&e(b), &m.bracket(&e(c), &e(a)));
                let j3 = m.bracket(&e(c), &m.bracket(&e(a), &e(b)));
                if (0..r).any(|g| !(&(&j1[g] + &j2[g]) + &j3[g]).is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn graded_torsion_matches_bracket_formula(seed in any::<u64>(), n in 1usize..=3, r in 1usize..=3) {
        let mut s = Sampler::new(seed, n);
        let m = random_unconstrained(&mut s, n, r);
        let c = random_connection(&mut s, r);
        let t = algebroid_torsion(&m, &c).unwrap();
        let (a, b) = (random_section(&mut s, r), random_section(&mut s, r));
        prop_assert_eq!(graded_torsion_on(&m, &t.graded, &a, &b).unwrap(), torsion_on(&m, &c, &a, &b));
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    prop_assert_eq!(&t.components[x][y][z], &(-&t.components[x][z][y]));
                }
            }
        }
    }

    #[test]
    fn square_zero_detection_matches_oracle(seed in any::<u64>(), n in 1usize..=3, valid in any::<bool>()) {
        let mut s = Sampler::new(seed, n);
        let m = if valid { random_tangent_frame(&mut s, n) } else { random_unconstrained(&mut s, n, n) };
        prop_assert_eq!(m.check_algebroid(), algebroid_oracle(&m));
        if valid {
            prop_assert!(m.check_algebroid());
        }
    }

    #[test]
    fn curvature_is_tensorial_and_graded(seed in any::<u64>(), n in 1usize..=3) {
        let mut s = Sampler::new(seed, n);
        s.max_degree = 1;
        let m = random_tangent_frame(&mut s, n);
        let c = random_connection(&mut s, n);
        let (a, b) = (random_section(&mut s, n), random_section(&mut s, n));
        let f = s.poly();
        let fa: Section = a.iter().map(|x| &f * x).collect();
        let lhs = algebroid_curvature(&m, &c, &fa, &b);
        let base = algebroid_curvature(&m, &c, &a, &b);
        for (l, r) in lhs.iter().flatten().zip(base.iter().flatten()) {
            prop_assert_eq!(l, &(&f * r));
        }
        prop_assert_eq!(graded_curvature_on(&m, &c, &a, &b).unwrap(), base);
    }
}
