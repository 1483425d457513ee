//! Acceptance criteria 1–12, one line per criterion.
//!
//! Run with `cargo test --test acceptance`. The process exits nonzero when a
//! criterion deviates from its expected outcome.

use std::time::Instant;

use gradedq_core::algebroid::{algebroid_torsion, graded_torsion_on, AlgebroidConnection, AlgebroidModel};
use gradedq_core::connection::{build_qe, curvature, is_q_bundle, torsion};
use gradedq_core::courant::{hamiltonian_vf, pairing};
use gradedq_core::dirac::check_obstruction;
use gradedq_core::ktensors::*;
use gradedq_core::linalg::{self, Matrix};
use gradedq_core::parse::parse_scalar;
use gradedq_core::random::Sampler;
use gradedq_core::rational::Q;
use gradedq_core::ricci::*;
use gradedq_core::suite::{self, Command, Options};
use gradedq_core::*;

type Outcome = std::result::Result<String, String>;
type Tensor3 = Vec<Vec<Vec<RationalFunction>>>;
type Criterion = (u8, &'static str, fn() -> Outcome);

fn rf(s: &str) -> RationalFunction {
    parse_scalar(s, None).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sampler(seed: u64, n: usize) -> Sampler {
    let mut s = Sampler::new(seed, n);
    s.max_degree = 1;
    s
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

fn random_antisym(s: &mut Sampler, n: usize) -> Matrix {
    let mut b = linalg::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = s.poly();
            b[j][i] = -&v;
            b[i][j] = v;
        }
    }
    b
}

/// `(dH)_{ijkl}` straight from the alternating sum.
fn dh_oracle(m: &CourantModel) -> bool {
    let n = m.n();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let v = &(&(&m.h(j, k, l).derivative(i) - &m.h(i, k, l).derivative(j)) + &m.h(i, j, l).derivative(k))
                        - &m.h(i, j, k).derivative(l);
                    if !v.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn criterion_1() -> Outcome {
    let mut s = sampler(101, 3);
    for _ in 0..5 {
        let m = s.courant_model();
        let r = m.check_master();
        ensure(r.bracket.is_zero() && dh_oracle(&m), || format!("n = 3: {{Θ,Θ}} = {}", r.bracket))?;
    }
    let mut s = sampler(102, 4);
    for _ in 0..5 {
        let b = random_antisym(&mut s, 4);
        let mut m = CourantModel::new(4);
        for i in 0..4 {
            for j in i + 1..4 {
                for k in j + 1..4 {
                    let h = &(&b[j][k].derivative(i) + &b[k][i].derivative(j)) + &b[i][j].derivative(k);
                    m.set_h(i, j, k, h).unwrap();
                }
            }
        }
        ensure(dh_oracle(&m), || "oracle: d(dB) ≠ 0".into())?;
        let r = m.check_master();
        ensure(r.bracket.is_zero(), || format!("H = dB: {{Θ,Θ}} = {}", r.bracket))?;
    }
    let m = CourantModel::new(4).with_h(0, 1, 2, rf("x4")).unwrap();
    let r = m.check_master();
    let sq = m.dm().square().unwrap();
    ensure(!dh_oracle(&m), || "oracle: dH = 0".into())?;
    ensure(!r.bracket.is_zero() && !sq.is_zero() && r.consistent, || "x4 dx1dx2dx3 not detected".into())?;
    Ok(format!("{{Θ,Θ}} = {} for H = x4 dx1dx2dx3", r.bracket))
}

fn criterion_2() -> Outcome {
    for i in 0..8u64 {
        let n = 1 + (i as usize % 4);
        let m = Sampler::new(200 + i, n).courant_model();
        let x = hamiltonian_vf(&m.theta()).map_err(|e| e.to_string())?;
        ensure(x.len() == 1, || "Θ not homogeneous".into())?;
        if let Some((v, d)) = m.dm().first_difference(&x[0]) {
            return Err(format!("n = {n}, {v}: {d}"));
        }
    }
    Ok("8 random H, n = 1..4".into())
}

fn criterion_3() -> Outcome {
    let mut s = sampler(301, 2);
    for _ in 0..6 {
        let m = s.courant_model();
        let c = s.connection(2, true);
        if let Some((v, d)) = curvature(&m, &c, &BundleChart::general(2, 2, 0)).unwrap().mismatch() {
            return Err(format!("{v}: {d}"));
        }
    }
    Ok("6 random (Γ, V, H), n = 2, rank 2".into())
}

fn criterion_4() -> Outcome {
    for n in [2usize, 3] {
        let mut s = sampler(400 + n as u64, n);
        for _ in 0..5 {
            let m = s.courant_model();
            let c = s.connection(2 * n, true);
            let t = torsion(&m, &c, &BundleChart::generalized_tangent(n, -1)).unwrap();
            ensure(t.graded == t.closed_form, || format!("n = {n}: {}", &t.graded - &t.closed_form))?;
        }
    }
    Ok("5 instances each for n = 2, 3".into())
}

fn criterion_5() -> Outcome {
    let mut s = sampler(501, 2);
    for _ in 0..5 {
        let m = s.courant_model();
        let c = s.connection(2, true);
        let k = random_k(&mut s, 2);
        let kc = k_curvature(&m, &c, &k, &BundleChart::general(2, 2, 0)).map_err(|e| e.to_string())?;
        ensure(kc.mismatch().is_none(), || "R^K split".into())?;
        let c = s.connection(4, true);
        let kt = k_torsion(&m, &c, &k, &BundleChart::generalized_tangent(2, -1)).unwrap();
        ensure(kt.graded == kt.closed_form, || format!("T^K split: {}", &kt.graded - &kt.closed_form))?;
    }
    Ok("5 random (Γ, V, H, K)".into())
}

/// Criterion 6 as stated fails; the residuals are checked against an oracle
/// built from components: `V` along `H(X,Y,·)` for curvature and
/// `½ d⟨a,b⟩ + H(X,Y,·)` for torsion.
fn criterion_6() -> (Outcome, bool) {
    let n = 3;
    let mut s = sampler(601, n);
    let m = s.courant_model();
    let c = s.connection(2 * n, true);
    let k = random_k(&mut s, n);
    let (mut curv, mut tors, mut explained) = (0, 0, 0);
    let pairs = 20;
    for _ in 0..pairs {
        let (a, b) = (s.section(), s.section());
        let cmp = compare_naive(&m, &c, &k, &a, &b).unwrap();
        curv += usize::from(cmp.curvature_holds());
        tors += usize::from(cmp.torsion_holds());
        let hxy: Vec<RationalFunction> = (0..n)
            .map(|rho| {
                let mut acc = RationalFunction::zero();
                for mu in 0..n {
                    for nu in 0..n {
                        acc = &acc + &(&(&m.h(mu, nu, rho) * &a.vector[mu]) * &b.vector[nu]);
                    }
                }
                acc
            })
            .collect();
        let mut ok = true;
        for alpha in 0..2 * n {
            for beta in 0..2 * n {
                let mut v = RationalFunction::zero();
                for rho in 0..n {
                    v = &v + &(&hxy[rho] * c.v(rho, alpha, beta));
                }
                ok &= cmp.curvature_residual[alpha][beta] == v;
            }
        }
        let ab = pairing(&a, &b);
        let half = RationalFunction::from_q(Q::new(1.into(), 2.into()));
        for rho in 0..n {
            ok &= cmp.torsion_residual.vector[rho].is_zero();
            ok &= cmp.torsion_residual.form[rho] == &(&half * &ab.derivative(rho)) + &hxy[rho];
        }
        explained += usize::from(ok);
    }
    let literal = curv == pairs && tors == pairs;
    let summary = format!(
        "literal curvature identity {curv}/{pairs}, literal torsion identity {tors}/{pairs}; residuals equal V_(H(X,Y,·)) and ½ρ*d⟨a,b⟩ + H(X,Y,·) on {explained}/{pairs}"
    );
    let as_documented = !literal && explained == pairs;
    (if literal { Ok(summary) } else { Err(summary) }, as_documented)
}

fn triangular(n: usize) -> ChartChange {
    let (f, i) = match n {
        2 => (vec!["x1", "x2 + x1^2"], vec!["x1", "x2 - x1^2"]),
        _ => (vec!["x1", "x2 + x1^2", "x3 + x1*x2"], vec!["x1", "x2 - x1^2", "x3 - x1*x2 + x1^3"]),
    };
    ChartChange::new(f.into_iter().map(rf).collect(), i.into_iter().map(rf).collect()).unwrap()
}

fn criterion_7() -> Outcome {
    let mut s = sampler(701, 2);
    let n = 2;
    let change = triangular(n);
    // p̃ is covariant: p̃'_μ = p̃_ν (J⁻¹)^ν_μ
    for n3 in [2usize, 3] {
        let k = random_k(&mut sampler(702 + n3 as u64, n3), n3);
        let ch = triangular(n3);
        let chart = Chart::courant(n3);
        let primed = tilde_p(&k.transform(&ch).unwrap(), &chart);
        let old = tilde_p(&k, &chart);
        let ji = ch.jacobian_inverse();
        for mu in 0..n3 {
            let mut expected = GradedPoly::zero(&chart);
            for nu in 0..n3 {
                expected = &expected + &old[nu].scale(&ji[nu][mu]);
            }
            ensure(ch.substitute(&primed[mu]).unwrap() == expected, || format!("p̃{} not covariant", mu + 1))?;
        }
    }
    // R^K and T^K: recompute in the new chart from the pushed-forward Q_E
    let m = CourantModel::new(n);
    let c = s.connection(2, true);
    let k = random_k(&mut s, n);
    let bundle = BundleChart::general(n, 2, 0);
    let q2 = change.pushforward(&build_qe(&m, &c, &bundle).unwrap()).unwrap();
    let r2 = q2.square().unwrap();
    let pt2 = tilde_p(&k.transform(&change).unwrap(), bundle.chart());
    let rk = k_curvature(&m, &c, &k, &bundle).unwrap().graded;
    for beta in 0..2 {
        let coeffs = bundle.fibre_coefficients(r2.image(Var::Gen(bundle.s(beta)))).unwrap();
        let img = q2.image(Var::Gen(bundle.s(beta)));
        let qc = bundle.fibre_coefficients(img).unwrap();
        for alpha in 0..2 {
            let mut f = coeffs[alpha].clone();
            for mu in 0..n {
                let v2 = qc[alpha].partial(Var::Gen(bundle.chart().b(mu))).scalar_part();
                f = &f - &pt2[mu].scale(&v2);
            }
            ensure(change.substitute(&f).unwrap() == rk[alpha][beta], || format!("R^K[{alpha}][{beta}] picks up ∂J"))?;
        }
    }
    let c = s.connection(2 * n, true);
    let tb = BundleChart::generalized_tangent(n, -1);
    let tq = change.pushforward(&build_qe(&m, &c, &tb).unwrap()).unwrap();
    let ptt = tilde_p(&k.transform(&change).unwrap(), tb.chart());
    let mut t2 = tq.apply(&tb.tautological()).unwrap();
    for (mu, p) in ptt.iter().enumerate() {
        t2 = &t2 - &(p * &tb.s_poly(n + mu));
    }
    ensure(change.substitute(&t2).unwrap() == k_torsion(&m, &c, &k, &tb).unwrap().graded, || "T^K picks up ∂J".into())?;

    // naive curvature anomaly, with D_(df) σ = ∂_μ f V^{μα}_β σ^β from components
    let mut s = sampler(703, 3);
    let m = s.courant_model();
    let c = s.connection(6, true);
    let (a, b) = (s.section(), s.section());
    let sigma = s.fibre_section(6);
    let f = s.poly();
    let lhs = c.naive_curvature(&m, &a.scale(&f), &b, &sigma);
    let base = c.naive_curvature(&m, &a, &b, &sigma);
    let ab = pairing(&a, &b);
    for alpha in 0..6 {
        let mut ddf = RationalFunction::zero();
        for mu in 0..3 {
            for (beta, sb) in sigma.iter().enumerate() {
                ddf = &ddf + &(&(&f.derivative(mu) * c.v(mu, alpha, beta)) * sb);
            }
        }
        let anomaly = &lhs[alpha] - &(&f * &base[alpha]);
        let expected = &(&ab * &ddf) * &RationalFunction::from_q(Q::new((-1).into(), 2.into()));
        ensure(anomaly == expected, || format!("anomaly component {alpha}"))?;
    }

    // Gualtieri torsion is C^∞-linear in each slot
    let mut s = sampler(704, 2);
    let m = s.courant_model();
    let c = s.connection(4, true);
    let v = [s.section(), s.section(), s.section()];
    let f = s.poly();
    let base = c.gualtieri_torsion(&m, &v[0], &v[1], &v[2]).unwrap();
    for slot in 0..3 {
        let mut w = v.clone();
        w[slot] = w[slot].scale(&f);
        ensure(c.gualtieri_torsion(&m, &w[0], &w[1], &w[2]).unwrap() == &f * &base, || format!("slot {slot}"))?;
    }
    Ok("p̃, R^K, T^K tensorial under x'2 = x2 + x1²; R_D(fa,b) − f R_D(a,b) = −½⟨a,b⟩ D_(df); 𝔗_D linear".into())
}

/// `π^{il}∂_l π^{jk} + cyclic = 0`.
fn jacobi_oracle(pi: &Matrix) -> bool {
    let n = pi.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = RationalFunction::zero();
                for l in 0..n {
                    acc = &acc + &(&pi[i][l] * &pi[j][k].derivative(l));
                    acc = &acc + &(&pi[j][l] * &pi[k][i].derivative(l));
                    acc = &acc + &(&pi[k][l] * &pi[i][j].derivative(l));
                }
                if !acc.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

fn criterion_8() -> Outcome {
    let m = CourantModel::new(3);
    let tangent = DiracStructure::tangent(3);
    ensure(tangent.check_invariance(&m).unwrap(), || "TM not invariant".into())?;
    let mut s = sampler(801, 3);
    for _ in 0..4 {
        let k = random_k(&mut s, 3);
        let c = s.connection(6, true);
        let r = check_obstruction(&tangent, &m, &c, &k).unwrap();
        ensure(r.phi_kl_vanishes, || "TM: φ^KL ≠ 0".into())?;
        ensure(r.curvature_restricts && r.torsion_restricts == Some(true), || "TM: K-tensors do not restrict".into())?;
    }
    let so3 = vec![
        vec![rf("0"), rf("x3"), rf("-x2")],
        vec![rf("-x3"), rf("0"), rf("x1")],
        vec![rf("x2"), rf("-x1"), rf("0")],
    ];
    let bad = vec![vec![rf("0"), rf("x3"), rf("0")], vec![rf("-x3"), rf("0"), rf("x2")], vec![rf("0"), rf("-x2"), rf("0")]];
    ensure(jacobi_oracle(&so3) && !jacobi_oracle(&bad), || "oracle".into())?;
    ensure(DiracStructure::poisson(&so3).unwrap().check_invariance(&m).unwrap(), || "so(3) graph not invariant".into())?;
    ensure(!DiracStructure::poisson(&bad).unwrap().check_invariance(&m).unwrap(), || "non-Poisson graph invariant".into())?;
    let pi = random_antisym(&mut s, 3);
    let phi = DiracStructure::poisson(&pi).unwrap().phi_kl(&KConnection::zero(3));
    for mu in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                ensure(phi[mu][a][b] == -&pi[a][b].derivative(mu), || format!("φ[{mu}][{a}][{b}] ≠ −∂π"))?;
            }
        }
    }
    // π = x1 ∂1∧∂2 is obstructed at K = 0 and unobstructed for K_1^1_1 = 1/x1
    let pi = vec![vec![rf("0"), rf("x1")], vec![rf("-x1"), rf("0")]];
    let l = DiracStructure::poisson(&pi).unwrap();
    let m2 = CourantModel::new(2);
    let mut c = GenConnection::zero_generalized(2);
    c.set_v(0, 0, 0, rf("1"));
    let r = check_obstruction(&l, &m2, &c, &KConnection::zero(2)).unwrap();
    ensure(!r.curvature_unobstructed && !r.curvature_restricts, || "obstructed case restricts".into())?;
    let mut k = KConnection::zero(2);
    k.set(0, 0, 0, rf("1/x1")).unwrap();
    let r = check_obstruction(&l, &m2, &c, &k).unwrap();
    ensure(r.curvature_unobstructed && r.curvature_restricts && r.torsion_restricts == Some(true), || {
        "unobstructed case does not restrict".into()
    })?;
    Ok("TM, so(3) graph, non-Poisson graph, φ = −∂π, obstructed and unobstructed x1 ∂1∧∂2".into())
}

/// `TM` in the frame `e_α = A^μ_α ∂_μ` with `A` unipotent upper triangular.
fn tangent_frame(s: &mut Sampler, n: usize) -> (AlgebroidModel, Matrix) {
    let mut a = linalg::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            a[i][j] = s.poly();
        }
    }
    let ainv = linalg::inverse(&a).unwrap();
    let mut m = AlgebroidModel::new(n, n);
    for mu in 0..n {
        for al in 0..n {
            m.set_rho(mu, al, a[mu][al].clone()).unwrap();
        }
    }
    for al in 0..n {
        for be in al + 1..n {
            let comm = vf_bracket(&column(&a, al), &column(&a, be));
            for g in 0..n {
                let mut acc = RationalFunction::zero();
                for mu in 0..n {
                    acc = &acc + &(&ainv[g][mu] * &comm[mu]);
                }
                m.set_f(g, al, be, -&acc).unwrap();
            }
        }
    }
    (m, a)
}

fn column(a: &Matrix, al: usize) -> Vec<RationalFunction> {
    a.iter().map(|row| row[al].clone()).collect()
}

fn vf_bracket(x: &[RationalFunction], y: &[RationalFunction]) -> Vec<RationalFunction> {
    let n = x.len();
    (0..n)
        .map(|mu| {
            let mut acc = RationalFunction::zero();
            for nu in 0..n {
                acc = &acc + &(&(&x[nu] * &y[mu].derivative(nu)) - &(&y[nu] * &x[mu].derivative(nu)));
            }
            acc
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let n = 3;
    let mut s = sampler(901, n);
    for _ in 0..4 {
        let (m, a) = tangent_frame(&mut s, n);
        let ainv = linalg::inverse(&a).unwrap();
        let mut c = AlgebroidConnection::zero(n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    c.set(x, y, z, s.poly()).unwrap();
                }
            }
        }
        let t = algebroid_torsion(&m, &c).map_err(|e| e.to_string())?.graded;
        let (u, w) = (s.fibre_section(n), s.fibre_section(n));
        // oracle: ∇_u w = ρ(u)w^γ − u^α Γ_α_β^γ w^β, bracket via vector fields
        let nabla = |p: &[RationalFunction], q: &[RationalFunction]| -> Vec<RationalFunction> {
            let anchor: Vec<RationalFunction> = (0..n)
                .map(|mu| (0..n).fold(RationalFunction::zero(), |acc, al| &acc + &(&a[mu][al] * &p[al])))
                .collect();
            (0..n)
                .map(|g| {
                    let mut acc = (0..n).fold(RationalFunction::zero(), |acc, mu| &acc + &(&anchor[mu] * &q[g].derivative(mu)));
                    for al in 0..n {
                        for be in 0..n {
                            acc = &acc - &(&(&p[al] * c.get(al, be, g)) * &q[be]);
                        }
                    }
                    acc
                })
                .collect()
        };
        let push = |p: &[RationalFunction]| -> Vec<RationalFunction> {
            (0..n).map(|mu| (0..n).fold(RationalFunction::zero(), |acc, al| &acc + &(&a[mu][al] * &p[al]))).collect()
        };
        let br = vf_bracket(&push(&u), &push(&w));
        let br_frame: Vec<RationalFunction> =
            (0..n).map(|g| (0..n).fold(RationalFunction::zero(), |acc, mu| &acc + &(&ainv[g][mu] * &br[mu]))).collect();
        let (uw, wu) = (nabla(&u, &w), nabla(&w, &u));
        let oracle: Vec<RationalFunction> = (0..n).map(|g| &(&uw[g] - &wu[g]) - &br_frame[g]).collect();
        ensure(graded_torsion_on(&m, &t, &u, &w).unwrap() == oracle, || "∇(τ_A) differs from the bracket torsion".into())?;
        ensure(m.check_algebroid(), || "valid algebroid reported d_A² ≠ 0".into())?;
    }
    let mut bad = AlgebroidModel::new(2, 2);
    bad.set_rho(0, 0, rf("1")).unwrap();
    bad.set_f(0, 0, 1, rf("x1")).unwrap();
    ensure(!bad.check_algebroid() && !bad.build_da().square().unwrap().is_zero(), || "d_A² ≠ 0 not detected".into())?;
    Ok("4 random frames of TM with random connections; anchor-breaking structure detected".into())
}

/// Classical scalar curvature from Christoffel symbols and the Riemann tensor.
fn classical_scalar(g: &Matrix) -> (RationalFunction, Tensor3) {
    let n = g.len();
    let gi = linalg::inverse(g).unwrap();
    let half = RationalFunction::from_q(Q::new(1.into(), 2.into()));
    // chr[k][i][j] = Γ^k_{ij}
    let mut chr = vec![vec![vec![RationalFunction::zero(); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = RationalFunction::zero();
                for l in 0..n {
                    let t = &(&g[j][l].derivative(i) + &g[i][l].derivative(j)) - &g[i][j].derivative(l);
                    acc = &acc + &(&gi[k][l] * &t);
                }
                chr[k][i][j] = &half * &acc;
            }
        }
    }
    // R^r_{s m v} = ∂_m Γ^r_{vs} − ∂_v Γ^r_{ms} + Γ^r_{ml} Γ^l_{vs} − Γ^r_{vl} Γ^l_{ms}
    let riemann = |r: usize, s_: usize, m: usize, v: usize| {
        let mut acc = &chr[r][v][s_].derivative(m) - &chr[r][m][s_].derivative(v);
        for l in 0..n {
            acc = &acc + &(&(&chr[r][m][l] * &chr[l][v][s_]) - &(&chr[r][v][l] * &chr[l][m][s_]));
        }
        acc
    };
    let mut scal = RationalFunction::zero();
    for s_ in 0..n {
        for v in 0..n {
            let ric = (0..n).fold(RationalFunction::zero(), |acc, r| &acc + &riemann(r, s_, r, v));
            scal = &scal + &(&gi[s_][v] * &ric);
        }
    }
    // as Γ_μ^ν_ρ
    let mut gamma = vec![vec![vec![RationalFunction::zero(); n]; n]; n];
    for mu in 0..n {
        for nu in 0..n {
            for rho in 0..n {
                gamma[mu][nu][rho] = chr[nu][mu][rho].clone();
            }
        }
    }
    (scal, gamma)
}

fn criterion_10() -> Outcome {
    let g = vec![vec![rf("1 + x2^2"), rf("x1")], vec![rf("x1"), rf("2")]];
    let (classical, gamma) = classical_scalar(&g);
    let m = CourantModel::new(2);
    let zero = vec![vec![vec![RationalFunction::zero(); 2]; 2]; 2];
    let d = CanonicalD::new(&m, &gamma, &zero).map_err(|e| e.to_string())?;
    let metric = GeneralizedMetric::new(g, linalg::zeros(2, 2)).unwrap();
    let k = fix_k_checked(&m, d.connection()).map_err(|e| e.to_string())?;
    let got = scalar_k(&ricci_k(&m, d.connection(), &k).unwrap(), &metric).total();
    ensure(got == classical, || format!("(a) Scal^K = {got}, classical = {classical}"))?;

    for n in [2usize, 3] {
        let mut s = sampler(1000 + n as u64, n);
        for _ in 0..3 {
            let m = s.courant_model();
            let mut gamma = vec![vec![vec![RationalFunction::zero(); n]; n]; n];
            let mut v = gamma.clone();
            for mu in 0..n {
                for nu in 0..n {
                    for rho in mu..n {
                        let x = s.poly();
                        gamma[rho][nu][mu] = x.clone();
                        gamma[mu][nu][rho] = x;
                    }
                    for rho in nu + 1..n {
                        let w = s.poly();
                        v[mu][rho][nu] = -&w;
                        v[mu][nu][rho] = w;
                    }
                }
            }
            let mut a = linalg::identity(n);
            for i in 0..n {
                for j in i + 1..n {
                    a[i][j] = s.poly();
                }
            }
            let metric = GeneralizedMetric::new(linalg::matmul(&linalg::transpose(&a), &a), random_antisym(&mut s, n)).unwrap();
            let d = CanonicalD::new(&m, &gamma, &v).unwrap();
            let k = fix_k_checked(&m, d.connection()).map_err(|e| e.to_string())?;
            let parts = scalar_k(&ricci_k(&m, d.connection(), &k).unwrap(), &metric);
            let f = scalar_formula(&metric, d.connection()).unwrap();
            ensure(parts.total() == f.total(), || {
                format!(
                    "(b) n = {n}: Scal^K parts {} | {} | {} | {}; closed form {} | {} | {}",
                    parts.upper_upper, parts.upper_lower, parts.lower_upper, parts.lower_lower, f.scal_g, f.v_upper, f.v_lower
                )
            })?;
        }
    }
    Ok(format!("(a) Scal = {classical}; (b) closed form on 3 random members each for n = 2, 3"))
}

fn criterion_11() -> Outcome {
    // oracle for R_∇ from components, D = ∂ + Γ on fibre components
    let flat_oracle = |c: &GenConnection| -> bool {
        let (n, r) = (c.n(), c.rank());
        for mu in 0..n {
            for nu in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let mut acc = &c.gamma(nu, a, b).derivative(mu) - &c.gamma(mu, a, b).derivative(nu);
                        for g in 0..r {
                            acc = &acc + &(&(c.gamma(mu, a, g) * c.gamma(nu, g, b)) - &(c.gamma(nu, a, g) * c.gamma(mu, g, b)));
                        }
                        if !acc.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    };
    let bundle = BundleChart::general(2, 2, 0);
    let mut s = sampler(1101, 2);
    s.sparsity = 0.8;
    let (mut flat_seen, mut curved_seen) = (0, 0);
    for i in 0..10 {
        let m = s.courant_model();
        let c = s.connection(2, i % 2 == 0);
        let r = is_q_bundle(&m, &c, &bundle).unwrap();
        let expected = c.v_is_zero() && flat_oracle(&c);
        ensure(r.curvature_vanishes == expected, || format!("sample {i}: curvature vanishes {}", r.curvature_vanishes))?;
        if expected {
            flat_seen += 1;
        } else {
            curved_seen += 1;
        }
    }
    // pure gauge Γ_μ = A⁻¹ ∂_μ A is flat
    let a = vec![vec![rf("1"), rf("x1*x2 + x2^2")], vec![rf("0"), rf("1")]];
    let ai = linalg::inverse(&a).unwrap();
    let mut c = GenConnection::zero(2, 2);
    for mu in 0..2 {
        let da: Matrix = a.iter().map(|row| row.iter().map(|x| x.derivative(mu)).collect()).collect();
        let g = linalg::matmul(&ai, &da);
        for al in 0..2 {
            for be in 0..2 {
                c.set_gamma(mu, al, be, g[al][be].clone());
            }
        }
    }
    let m = CourantModel::new(2);
    let r = is_q_bundle(&m, &c, &bundle).unwrap();
    ensure(flat_oracle(&c) && r.curvature_vanishes && r.criterion, || "pure gauge not flat".into())?;
    c.set_v(1, 0, 1, rf("x1"));
    let r = is_q_bundle(&m, &c, &bundle).unwrap();
    ensure(!r.curvature_vanishes, || "V ≠ 0 reported flat".into())?;
    Ok(format!("{flat_seen} flat and {curved_seen} curved samples, pure gauge, V ≠ 0"))
}

fn criterion_12() -> Outcome {
    let model = ModelFile::from_json(
        r#"{"n": 2, "H": [], "Gamma_TT": [{"indices": [1, 2, 2], "value": "x1"}],
            "V_TsT": [{"indices": [2, 1, 2], "value": "3"}, {"indices": [2, 2, 1], "value": "-3"}],
            "dirac": {"type": "tangent"}, "metric": {"g": [["1", "0"], ["0", "1 + x1^2"]]}}"#,
    )
    .map_err(|e| e.to_string())?;
    let opts = Options { seed: 12, samples: 2 };
    let first = suite::run(Command::VerifyAll, &model, opts).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let second = single.install(|| suite::run(Command::VerifyAll, &model, opts).unwrap());
    ensure(first.render_text() == second.render_text(), || "text reports differ".into())?;
    ensure(first.render_json() == second.render_json(), || "JSON reports differ".into())?;
    Ok(format!("{} sections identical across runs and thread counts", first.sections.len()))
}

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 11] = [
        (1, "master equation", criterion_1),
        (2, "convention pinning X_Θ = d_M", criterion_2),
        (3, "curvature components", criterion_3),
        (4, "torsion components", criterion_4),
        (5, "K-splits", criterion_5),
        (7, "tensoriality", criterion_7),
        (8, "Dirac structures", criterion_8),
        (9, "Lie algebroid cross-check", criterion_9),
        (10, "scalar curvature", criterion_10),
        (11, "Q-bundle criterion", criterion_11),
        (12, "determinism", criterion_12),
    ];
    let mut lines = Vec::new();
    let mut unexpected = 0;
    for (num, name, f) in criteria {
        let t = Instant::now();
        let out = f();
        unexpected += usize::from(out.is_err());
        lines.push((num, name, out, t.elapsed()));
    }
    let t = Instant::now();
    let (out6, documented) = criterion_6();
    if !documented {
        unexpected += 1;
    }
    lines.push((6, "naive vs K-tensor comparison", out6, t.elapsed()));
    lines.sort_by_key(|l| l.0);
    for (num, name, out, dt) in &lines {
        match out {
            Ok(d) => println!("criterion {num:>2} PASS  {name}: {d} ({:.1}s)", dt.as_secs_f64()),
            Err(d) => println!("criterion {num:>2} FAIL  {name}: {d} ({:.1}s)", dt.as_secs_f64()),
        }
    }
    let passed = lines.iter().filter(|l| l.2.is_ok()).count();
    println!("{passed}/12 criteria pass in {:.1}s", start.elapsed().as_secs_f64());
    if documented {
        println!("criterion 6 fails as stated; its residuals match the corrected identities (see README)");
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria deviate from their expected outcome");
        std::process::exit(1);
    }
}
