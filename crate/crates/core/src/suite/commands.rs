use crate::algebroid::{algebroid_torsion, graded_torsion_on, torsion_on};
use crate::connection::{curvature, is_q_bundle, torsion, BundleChart, GenConnection};
use crate::courant::hamiltonian_vf;
use crate::dirac::check_obstruction;
use crate::error::{Error, Result};
use crate::graded::{GradedPoly, Var};
use crate::ktensors::{compare_naive, k_curvature, k_torsion, predicted_residuals, KConnection};
use crate::model::{AlgebroidData, ModelFile};
use crate::random::Sampler;
use crate::ricci::{fix_k, levi_civita, ricci_k, scalar_formula, scalar_k, CanonicalD};

use super::{Check, Command, Options, Section};

/// Whether the blocks `command` needs are present in the model.
pub(super) fn applicable(command: Command, model: &ModelFile) -> bool {
    match command {
        Command::VerifyMaster => true,
        Command::Curvature | Command::Torsion | Command::KCurvature | Command::KTorsion | Command::CompareNaive => {
            model.connection.is_some()
        }
        Command::DiracCheck => model.dirac.is_some(),
        Command::Ricci | Command::Scalar => model.metric.is_some(),
        Command::VerifyAll => false,
    }
}

pub(super) fn section(command: Command, model: &ModelFile, opts: Options) -> Result<Section> {
    match command {
        Command::VerifyMaster => verify_master(model),
        Command::Curvature => curvature_section(model),
        Command::Torsion => torsion_section(model),
        Command::KCurvature => k_curvature_section(model),
        Command::KTorsion => k_torsion_section(model),
        Command::CompareNaive => compare_naive_section(model, opts),
        Command::DiracCheck => dirac_section(model),
        Command::Ricci => ricci_section(model),
        Command::Scalar => scalar_section(model),
        Command::VerifyAll => Err(Error::Invalid("verify-all is not a single section".into())),
    }
}

/// `∂1 … ∂n` then `dx1 … dxn`.
pub(super) fn frame_label(n: usize, alpha: usize) -> String {
    if alpha < n {
        format!("∂{}", alpha + 1)
    } else {
        format!("dx{}", alpha - n + 1)
    }
}

pub(super) fn first_term(p: &GradedPoly) -> String {
    match p.terms().next() {
        Some((m, c)) => GradedPoly::term(p.chart(), c.clone(), m.clone()).to_string(),
        None => "0".into(),
    }
}

/// Turns an identity failure reported as an error into a failed check.
fn asserted(name: &str, r: Result<Check>) -> Result<Check> {
    match r {
        Err(Error::Mismatch(d)) => Ok(Check { name: name.into(), status: super::Status::Fail, detail: Some(d) }),
        other => other,
    }
}

fn verify_master(model: &ModelFile) -> Result<Section> {
    let m = &model.courant;
    let mut s = Section::new("verify-master");
    let r = m.check_master();
    s.component("{Θ,Θ}", &r.bracket);
    for (idx, v) in &r.dh {
        s.component(format!("dH[{},{},{},{}]", idx[0] + 1, idx[1] + 1, idx[2] + 1, idx[3] + 1), v);
    }
    s.check(Check::new("{Θ,Θ} = 0", r.bracket.is_zero(), || first_term(&r.bracket)));
    s.check(Check::new("{Θ,Θ} = 0 exactly when dH = 0", r.consistent, || "flags disagree".into()));
    let x = hamiltonian_vf(&m.theta())?;
    let dm = m.dm();
    let diff = match x.as_slice() {
        [only] => dm.first_difference(only).map(|(v, d)| format!("{v}: {}", first_term(&d))),
        _ => Some("Θ is not homogeneous".into()),
    };
    s.check(Check::new("X_Θ = d_M", diff.is_none(), || diff.clone().unwrap_or_default()));
    let sq = dm.square()?;
    s.check(Check::new("d_M² = 0 exactly when dH = 0", sq.is_zero() == r.dh.is_empty(), || {
        "d_M² disagrees with dH".into()
    }));
    Ok(s)
}

fn curvature_section(model: &ModelFile) -> Result<Section> {
    let (m, c) = (&model.courant, model.require_connection()?);
    let n = model.n;
    let bundle = BundleChart::generalized_tangent(n, 0);
    let curv = curvature(m, c, &bundle)?;
    let mut s = Section::new("curvature");
    for beta in 0..c.rank() {
        let img = curv.vf.image(Var::Gen(bundle.s(beta)));
        if !img.is_zero() {
            s.component(format!("Q_E²(s[{}])", frame_label(n, beta)), img);
        }
    }
    let mismatch = curv.mismatch();
    s.check(Check::new("Q_E² equals the closed-form curvature", mismatch.is_none(), || {
        let (v, d) = mismatch.clone().expect("mismatch");
        format!("{v}: {}", first_term(&d))
    }));
    let q = is_q_bundle(m, c, &bundle)?;
    s.check(Check::new("Q-bundle exactly when V = 0 and R_∇ = 0", q.curvature_vanishes == q.criterion, || {
        format!("curvature vanishes: {}, criterion: {}", q.curvature_vanishes, q.criterion)
    }));
    s.check(Check::info("Q-bundle", if q.curvature_vanishes { "yes" } else { "no" }));
    Ok(s)
}

fn torsion_section(model: &ModelFile) -> Result<Section> {
    let (m, c) = (&model.courant, model.require_connection()?);
    let t = torsion(m, c, &BundleChart::generalized_tangent(model.n, -1))?;
    let mut s = Section::new("torsion");
    s.component("Q_E(τ)", &t.graded);
    let d = &t.graded - &t.closed_form;
    s.check(Check::new("Q_E(τ) equals T(Γ) + T(V) + T^(1,1)", d.is_zero(), || first_term(&d)));
    Ok(s)
}

fn k_curvature_section(model: &ModelFile) -> Result<Section> {
    let (m, c, k) = (&model.courant, model.require_connection()?, model.k_or_zero());
    let n = model.n;
    let mut s = Section::new("k-curvature");
    let name = "R_{Q_E} = R^K_D + V^μ p̃_μ with R^K_D in closed form";
    let check = asserted(name, (|| {
        let kc = k_curvature(m, c, &k, &BundleChart::generalized_tangent(n, 0))?;
        for (alpha, row) in kc.graded.iter().enumerate() {
            for (beta, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    s.component(format!("R^K[{},{}]", frame_label(n, alpha), frame_label(n, beta)), w);
                }
            }
        }
        let mm = kc.mismatch();
        Ok(Check::new(name, mm.is_none(), || {
            let (a, b, d) = mm.clone().expect("mismatch");
            format!("[{},{}]: {}", frame_label(n, a), frame_label(n, b), first_term(&d))
        }))
    })())?;
    s.check(check);
    Ok(s)
}

fn k_torsion_section(model: &ModelFile) -> Result<Section> {
    let (m, c, k) = (&model.courant, model.require_connection()?, model.k_or_zero());
    let mut s = Section::new("k-torsion");
    let name = "T_{Q_E} = T^K_D + p̃_μ s^μ with T^K_D in closed form";
    let check = asserted(name, (|| {
        let kt = k_torsion(m, c, &k, &BundleChart::generalized_tangent(model.n, -1))?;
        s.component("T^K", &kt.graded);
        let d = &kt.graded - &kt.closed_form;
        Ok(Check::new(name, d.is_zero(), || first_term(&d)))
    })())?;
    s.check(check);
    Ok(s)
}

fn compare_naive_section(model: &ModelFile, opts: Options) -> Result<Section> {
    let (m, c, k) = (&model.courant, model.require_connection()?, model.k_or_zero());
    let n = model.n;
    let mut sampler = Sampler::new(opts.seed, n);
    sampler.max_degree = 1;
    let mut s = Section::new("compare-naive");
    let (mut curv_literal, mut tors_literal) = (0, 0);
    let mut failure = None;
    for i in 0..opts.samples {
        let (a, b) = (sampler.section(), sampler.section());
        let cmp = compare_naive(m, c, &k, &a, &b)?;
        if i == 0 {
            for (alpha, v) in cmp.k_tilde.components().iter().enumerate() {
                if !v.is_zero() {
                    s.component(format!("K̃(a1,b1)[{}]", frame_label(n, alpha)), v);
                }
            }
        }
        curv_literal += usize::from(cmp.curvature_holds());
        tors_literal += usize::from(cmp.torsion_holds());
        let (pc, pt) = predicted_residuals(m, c, &a, &b);
        if failure.is_none() && !cmp.explained_by(&pc, &pt) {
            failure = Some(format!("pair {}: residual differs from V_(H(X,Y,·)) / ½ρ*d⟨a,b⟩ + H(X,Y,·)", i + 1));
        }
    }
    s.check(Check::new(
        "R^K − R_D − V_K̃ = V_(H(X,Y,·)) and T^K − T_D − K̃ = ½ρ*d⟨a,b⟩ + H(X,Y,·)",
        failure.is_none(),
        || failure.clone().unwrap_or_default(),
    ));
    let m_ = opts.samples;
    s.check(Check::info("R^K = R_D + V_K̃ literally", format!("{curv_literal}/{m_} pairs")));
    s.check(Check::info("T^K = T_D + K̃ literally", format!("{tors_literal}/{m_} pairs")));
    Ok(s)
}

fn dirac_section(model: &ModelFile) -> Result<Section> {
    let (m, l) = (&model.courant, model.require_dirac()?);
    let n = model.n;
    let mut s = Section::new("dirac-check");
    for mu in 0..n {
        for a in 0..n {
            for b in 0..n {
                let v = l.phi(mu, a, b);
                if !v.is_zero() {
                    s.component(format!("φ[{},{},{}]", mu + 1, a + 1, b + 1), v);
                }
            }
        }
    }
    s.check(Check::pass("lagrangian (isotropic of rank n)"));
    let invariant = l.check_invariance(m)?;
    s.check(Check::new("d_M-invariant (involutive)", invariant, || "the restriction of d_M does not close on L".into()));
    if let (true, Some(c)) = (invariant, model.connection.as_ref()) {
        let k = model.k_or_zero();
        let report = check_obstruction(l, m, c, &k)?;
        let phikl = l.phi_kl(&k);
        for (mu, plane) in phikl.iter().enumerate() {
            for (a, row) in plane.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        s.component(format!("φ^KL[{},{},{}]", mu + 1, a + 1, b + 1), v);
                    }
                }
            }
        }
        s.check(Check::info("φ^KL = 0", yes_no(report.phi_kl_vanishes)));
        s.check(Check::info("⟨V, φ^KL⟩ = 0", yes_no(report.curvature_unobstructed)));
        s.check(Check::new(
            "unobstructed K-curvature restricts to the curvature of D|_L",
            !report.curvature_unobstructed || report.curvature_restricts,
            || "restricted R^K differs from restricted Q_E²".into(),
        ));
        s.check(Check::new(
            "K-torsion restricts when φ^KL = 0",
            !report.phi_kl_vanishes || report.torsion_restricts.unwrap_or(true),
            || "restricted T^K differs from restricted Q_E(τ)".into(),
        ));
    }
    Ok(s)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// The model connection, or the Levi-Civita member of the torsion-free
/// family when the model gives only a metric.
fn metric_connection(model: &ModelFile) -> Result<GenConnection> {
    if let Some(c) = &model.connection {
        return Ok(c.clone());
    }
    let g = model.require_metric()?.g().clone();
    let n = model.n;
    let zero = vec![vec![vec![crate::RationalFunction::zero(); n]; n]; n];
    Ok(CanonicalD::new(&model.courant, &levi_civita(&g)?, &zero)?.connection().clone())
}

/// `K` from the model, or the torsion-fixing choice.
fn ricci_k_connection(model: &ModelFile, c: &GenConnection, s: &mut Section) -> Result<KConnection> {
    if let Some(k) = &model.k {
        return Ok(k.clone());
    }
    let k = fix_k(c)?;
    let in_family = CanonicalD::from_connection(&model.courant, c).is_ok();
    let t = k_torsion(&model.courant, c, &k, &BundleChart::generalized_tangent(model.n, -1))?.graded;
    if in_family {
        s.check(Check::new("T^K_D = 0 for the fixed K", t.is_zero(), || first_term(&t)));
    } else {
        s.check(Check::info("T^K_D = 0 for the fixed K", yes_no(t.is_zero())));
    }
    Ok(k)
}

fn ricci_section(model: &ModelFile) -> Result<Section> {
    let c = metric_connection(model)?;
    let n = model.n;
    let mut s = Section::new("ricci");
    let k = ricci_k_connection(model, &c, &mut s)?;
    let ric = ricci_k(&model.courant, &c, &k)?;
    for (a, row) in ric.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if !v.is_zero() {
                s.component(format!("Ric^K[{},{}]", frame_label(n, a), frame_label(n, b)), v);
            }
        }
    }
    Ok(s)
}

fn scalar_section(model: &ModelFile) -> Result<Section> {
    let c = metric_connection(model)?;
    let metric = model.require_metric()?;
    let mut s = Section::new("scalar");
    let k = ricci_k_connection(model, &c, &mut s)?;
    let ric = ricci_k(&model.courant, &c, &k)?;
    let parts = scalar_k(&ric, metric);
    let total = parts.total();
    s.component("Scal^K", &total);
    s.component("Ric^{μν} G_{μν}", &parts.upper_upper);
    s.component("Ric^μ_ν G^ν_μ", &parts.upper_lower);
    s.component("Ric_μ^ν G_ν^μ", &parts.lower_upper);
    s.component("Ric_{μν} G^{μν}", &parts.lower_lower);
    let in_family = CanonicalD::from_connection(&model.courant, &c).is_ok();
    if in_family && model.k.is_none() {
        let f = scalar_formula(metric, &c)?;
        s.component("Scal(g,∇)", &f.scal_g);
        s.component("G_{μν}(∇_ρV^{μρν} + V^σ_σ_ρ V^{μρν})", &f.v_upper);
        s.component("−G^{μν}(∇_μV^σ_σ_ν + V^σ_ρ_μ V^ρ_σ_ν)", &f.v_lower);
        let diff = &total - &f.total();
        s.check(Check::new("Scal^K equals the closed form", diff.is_zero(), || {
            format!(
                "Scal^K − closed form = {diff}; closed form terms: Scal(g,∇) = {}, G_(μν) term = {}, G^(μν) term = {}",
                f.scal_g, f.v_upper, f.v_lower
            )
        }));
    } else {
        s.check(Check::info("closed form", "not compared: connection or K outside the torsion-free family"));
    }
    Ok(s)
}

/// Algebroid checks for `verify-all`.
pub(super) fn algebroid_section(data: &AlgebroidData) -> Result<Section> {
    let m = &data.model;
    let r = m.rank();
    let mut s = Section::new("algebroid");
    let sq = m.build_da().square()?;
    s.check(Check::new("d_A² = 0", sq.is_zero(), || {
        sq.first_difference(&crate::Derivation::zero(m.chart(), 2))
            .map(|(v, d)| format!("{v}: {}", first_term(&d)))
            .unwrap_or_default()
    }));
    if let Some(c) = &data.connection {
        let check = asserted("Q(τ_A) equals the closed-form torsion", (|| {
            let t = algebroid_torsion(m, c)?;
            s.component("Q(τ_A)", &t.graded);
            Ok(Check::pass("Q(τ_A) equals the closed-form torsion"))
        })())?;
        let ok = check.status == super::Status::Pass;
        s.check(check);
        if ok {
            let t = algebroid_torsion(m, c)?.graded;
            let mut bad = None;
            for a in 0..r {
                for b in 0..r {
                    let (ea, eb) = (unit(r, a), unit(r, b));
                    if bad.is_none() && graded_torsion_on(m, &t, &ea, &eb)? != torsion_on(m, c, &ea, &eb) {
                        bad = Some(format!("T(e{}, e{})", a + 1, b + 1));
                    }
                }
            }
            s.check(Check::new("ι_b ι_a Q(τ_A) = ∇_a b − ∇_b a − [a,b]", bad.is_none(), || bad.clone().unwrap_or_default()));
        }
    }
    Ok(s)
}

fn unit(r: usize, a: usize) -> Vec<crate::RationalFunction> {
    let mut v = vec![crate::RationalFunction::zero(); r];
    v[a] = crate::RationalFunction::one();
    v
}
