//! The auxiliary affine connection `K`, the covariant momenta `p̃`, and the
//! K-curvature and K-torsion tensors of a generalized connection.

use crate::chart_change::ChartChange;
use crate::linalg;
use crate::connection::{build_qe, curvature_closed_form_entry, torsion_closed_form, BundleChart, GenConnection};
use crate::courant::{dorfman_skew, lie_bracket, pairing, CourantModel, GenSection};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::graded::{Chart, GradedPoly, Var};
use crate::rational::RationalFunction;
use std::sync::Arc;

/// Coefficients `K_ν^ρ_μ` of an affine connection, acting on one-forms by
/// `(∇^K_X ξ)_μ = X^ν(∂_ν ξ_μ + K_ν^ρ_μ ξ_ρ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KConnection {
    n: usize,
    k: Vec<Vec<Vec<RationalFunction>>>,
}

impl KConnection {
    pub fn zero(n: usize) -> Self {
        KConnection { n, k: vec![vec![vec![RationalFunction::zero(); n]; n]; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `K_ν^ρ_μ`.
    pub fn get(&self, nu: usize, rho: usize, mu: usize) -> &RationalFunction {
        &self.k[nu][rho][mu]
    }

    pub fn set(&mut self, nu: usize, rho: usize, mu: usize, value: RationalFunction) -> Result<()> {
        if nu.max(rho).max(mu) >= self.n {
            return Err(Error::Invalid(format!("K index out of range for n = {}", self.n)));
        }
        self.k[nu][rho][mu] = value;
        Ok(())
    }

    /// Components in the primed chart of `φ`, from the matrix law
    /// `K' = J K J⁻¹ − J dJ⁻¹` with `K^ρ_μ = K_ν^ρ_μ dx^ν`, expressed in `x'`.
    pub fn transform(&self, change: &ChartChange) -> Result<KConnection> {
        let n = self.n;
        let j = change.jacobian();
        let ji = change.jacobian_inverse();
        let inv = change.inverse_map();
        // M_ν = J K_ν J⁻¹ − J ∂_ν J⁻¹, one matrix per old direction ν
        let per_dir: Vec<linalg::Matrix> = (0..n)
            .map(|nu| {
                let kn: linalg::Matrix = (0..n).map(|r| (0..n).map(|m| self.k[nu][r][m].clone()).collect()).collect();
                let dji: linalg::Matrix = ji.iter().map(|row| row.iter().map(|e| e.derivative(nu)).collect()).collect();
                let a = linalg::matmul(&linalg::matmul(j, &kn), ji);
                linalg::add(&a, &linalg::neg(&linalg::matmul(j, &dji)))
            })
            .collect();
        let mut out = KConnection::zero(n);
        for a in 0..n {
            for r in 0..n {
                for m in 0..n {
                    let mut acc = RationalFunction::zero();
                    for nu in 0..n {
                        acc = &acc + &(&ji[nu][a] * &per_dir[nu][r][m]);
                    }
                    out.k[a][r][m] = acc.compose(inv).ok_or(Error::DivisionByZero)?;
                }
            }
        }
        Ok(out)
    }

    /// `∇^K_X ξ` for a vector field `X` and a one-form `ξ`.
    pub fn covariant_form(&self, x: &[RationalFunction], xi: &[RationalFunction]) -> Vec<RationalFunction> {
        let n = self.n;
        (0..n)
            .map(|mu| {
                let mut acc = RationalFunction::zero();
                for nu in 0..n {
                    if x[nu].is_zero() {
                        continue;
                    }
                    let mut inner = xi[mu].derivative(nu);
                    for rho in 0..n {
                        inner = &inner + &(&self.k[nu][rho][mu] * &xi[rho]);
                    }
                    acc = &acc + &(&x[nu] * &inner);
                }
                acc
            })
            .collect()
    }
}

/// `p̃_μ = p_μ + K_ν^ρ_μ ψ^ν b_ρ` on a chart containing the Courant generators.
pub fn tilde_p(k: &KConnection, chart: &Arc<Chart>) -> Vec<GradedPoly> {
    let n = k.n();
    (0..n)
        .map(|mu| {
            let mut acc = GradedPoly::gen(chart, chart.p(mu));
            for nu in 0..n {
                for rho in 0..n {
                    let c = k.get(nu, rho, mu);
                    if !c.is_zero() {
                        let t = &GradedPoly::gen(chart, chart.psi(nu)) * &GradedPoly::gen(chart, chart.b(rho));
                        acc = &acc + &t.scale(c);
                    }
                }
            }
            acc
        })
        .collect()
}

/// The K-dependent contraction field
/// `ι^K_a = a^μ(∂_{ψ^μ} − K_μ^ρ_ν b_ρ ∂_{p_ν}) + a_μ(∂_{b_μ} + K_ρ^μ_ν ψ^ρ ∂_{p_ν})`
/// (left derivatives; it annihilates every `p̃_ν`).
pub fn contraction_vf(a: &GenSection, k: &KConnection, chart: &Arc<Chart>) -> Result<Derivation> {
    let n = k.n();
    let mut d = Derivation::zero(chart, -1);
    let psi = |m: usize| GradedPoly::gen(chart, chart.psi(m));
    let b = |m: usize| GradedPoly::gen(chart, chart.b(m));
    for mu in 0..n {
        d.set(Var::Gen(chart.psi(mu)), GradedPoly::scalar(chart, a.vector[mu].clone()))?;
        d.set(Var::Gen(chart.b(mu)), GradedPoly::scalar(chart, a.form[mu].clone()))?;
    }
    for nu in 0..n {
        let mut img = GradedPoly::zero(chart);
        for mu in 0..n {
            for rho in 0..n {
                let c1 = &a.vector[mu] * k.get(mu, rho, nu);
                if !c1.is_zero() {
                    img = &img - &b(rho).scale(&c1);
                }
                let c2 = &a.form[mu] * k.get(rho, mu, nu);
                if !c2.is_zero() {
                    img = &img + &psi(rho).scale(&c2);
                }
            }
        }
        d.set(Var::Gen(chart.p(nu)), img)?;
    }
    Ok(d)
}

/// Matrix `[α][β]` of graded two-forms in `ψ, b`, read as
/// `R(s_β) = Σ_α R^α_β s_α`.
pub type FormMatrix = Vec<Vec<GradedPoly>>;

/// K-curvature computed from `Q_E² − V^μ p̃_μ` and from its closed form.
#[derive(Debug, Clone)]
pub struct KCurvature {
    pub graded: FormMatrix,
    pub closed_form: FormMatrix,
}

impl KCurvature {
    pub fn mismatch(&self) -> Option<(usize, usize, GradedPoly)> {
        first_matrix_difference(&self.graded, &self.closed_form)
    }
}

fn first_matrix_difference(a: &FormMatrix, b: &FormMatrix) -> Option<(usize, usize, GradedPoly)> {
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
            let d = x - y;
            if !d.is_zero() {
                return Some((i, j, d));
            }
        }
    }
    None
}

fn has_p(f: &GradedPoly) -> bool {
    let chart = f.chart();
    let ps: Vec<usize> = (0..chart.n()).map(|m| chart.p(m)).collect();
    f.terms().any(|(m, _)| ps.iter().any(|&i| m[i] > 0))
}

/// `V^{μα}_β p̃_μ`.
fn v_ptilde(c: &GenConnection, pt: &[GradedPoly], alpha: usize, beta: usize) -> GradedPoly {
    let mut acc = GradedPoly::zero(pt[0].chart());
    for (mu, p) in pt.iter().enumerate() {
        acc = &acc + &p.scale(c.v(mu, alpha, beta));
    }
    acc
}

/// Closed form of the K-curvature: `R_∇ + V∧V + ∇^{ΓK}(V)` together with the
/// flux term `½H_{ρμν}V^ρ ψ^μψ^ν`.
pub fn k_curvature_closed_form(
    m: &CourantModel,
    c: &GenConnection,
    k: &KConnection,
    bundle: &BundleChart,
    alpha: usize,
    beta: usize,
) -> GradedPoly {
    let chart = bundle.chart();
    let n = c.n();
    let full = curvature_closed_form_entry(m, c, bundle, alpha, beta);
    // drop V^μ p_μ and add −V^ρ K_μ^ν_ρ ψ^μ b_ν
    let mut acc = full.filter(|mono| (0..n).all(|mu| mono[chart.p(mu)] == 0));
    for mu in 0..n {
        for nu in 0..n {
            let mut coeff = RationalFunction::zero();
            for rho in 0..n {
                coeff = &coeff + &(c.v(rho, alpha, beta) * k.get(mu, nu, rho));
            }
            if !coeff.is_zero() {
                let t = &GradedPoly::gen(chart, chart.psi(mu)) * &GradedPoly::gen(chart, chart.b(nu));
                acc = &acc - &t.scale(&coeff);
            }
        }
    }
    acc
}

/// K-curvature, checking that `R_{Q_E} − V^μ p̃_μ` is free of `p`.
pub fn k_curvature(m: &CourantModel, c: &GenConnection, k: &KConnection, bundle: &BundleChart) -> Result<KCurvature> {
    let qe = build_qe(m, c, bundle)?;
    let sq = qe.square()?;
    let pt = tilde_p(k, bundle.chart());
    let r = c.rank();
    let mut graded = vec![Vec::with_capacity(r); r];
    let mut closed = vec![Vec::with_capacity(r); r];
    for beta in 0..r {
        let coeffs = bundle.fibre_coefficients(sq.image(Var::Gen(bundle.s(beta))))?;
        for alpha in 0..r {
            let rk = &coeffs[alpha] - &v_ptilde(c, &pt, alpha, beta);
            if has_p(&rk) {
                return Err(Error::Mismatch(format!("K-curvature split leaves p-dependence at ({alpha},{beta}): {rk}")));
            }
            graded[alpha].push(rk);
            closed[alpha].push(k_curvature_closed_form(m, c, k, bundle, alpha, beta));
        }
    }
    Ok(KCurvature { graded, closed_form: closed })
}

/// K-torsion computed from `Q_E(τ_M) − p̃_μ s^μ` and from its closed form.
#[derive(Debug, Clone)]
pub struct KTorsion {
    pub graded: GradedPoly,
    pub closed_form: GradedPoly,
}

pub fn k_torsion(m: &CourantModel, c: &GenConnection, k: &KConnection, bundle: &BundleChart) -> Result<KTorsion> {
    let n = c.n();
    let chart = bundle.chart();
    let qe = build_qe(m, c, bundle)?;
    let full = qe.apply(&bundle.tautological())?;
    let pt = tilde_p(k, chart);
    let mut graded = full;
    for (mu, p) in pt.iter().enumerate() {
        graded = &graded - &(p * &bundle.s_poly(n + mu));
    }
    if has_p(&graded) {
        return Err(Error::Mismatch(format!("K-torsion split leaves p-dependence: {graded}")));
    }
    // T_∇ + T_V + T^{(1,1)K}: closed form with p_μ s^μ removed and the
    // mixed s^ρ coefficient shifted by K_ν^μ_ρ
    let mut closed = torsion_closed_form(m, c, bundle)?;
    for mu in 0..n {
        closed = &closed - &(&GradedPoly::gen(chart, chart.p(mu)) * &bundle.s_poly(n + mu));
        for nu in 0..n {
            for rho in 0..n {
                let kv = k.get(nu, mu, rho);
                if !kv.is_zero() {
                    let t = &(&GradedPoly::gen(chart, chart.b(mu)) * &GradedPoly::gen(chart, chart.psi(nu)))
                        * &bundle.s_poly(n + rho);
                    closed = &closed + &t.scale(kv);
                }
            }
        }
    }
    Ok(KTorsion { graded, closed_form: closed })
}

/// Scalar value of a function with no positive-degree generators left.
fn scalar_of(f: &GradedPoly) -> Result<RationalFunction> {
    if f.terms().any(|(m, _)| m.iter().any(|&e| e > 0)) {
        return Err(Error::Mismatch(format!("contraction did not produce a scalar: {f}")));
    }
    Ok(f.scalar_part())
}

/// `ω(a,b) = ι_b ι_a ω` for a two-form `ω` in `ψ, b` (with K corrections).
pub fn evaluate_two_form(
    omega: &GradedPoly,
    a: &GenSection,
    b: &GenSection,
    k: &KConnection,
) -> Result<RationalFunction> {
    let chart = omega.chart();
    let ia = contraction_vf(a, k, chart)?;
    let ib = contraction_vf(b, k, chart)?;
    scalar_of(&ib.apply(&ia.apply(omega)?)?)
}

/// `R^K_D(a,b) = [ι^K_b, [ι^K_a, R_{Q_E}]]` read on the fibre, as an
/// endomorphism matrix `[α][β]`.
pub fn k_curvature_on(
    m: &CourantModel,
    c: &GenConnection,
    k: &KConnection,
    bundle: &BundleChart,
    a: &GenSection,
    b: &GenSection,
) -> Result<Vec<Vec<RationalFunction>>> {
    let chart = bundle.chart();
    let r = build_qe(m, c, bundle)?.square()?;
    let ia = contraction_vf(a, k, chart)?;
    let ib = contraction_vf(b, k, chart)?;
    let inner = ia.commutator(&r)?;
    let outer = ib.commutator(&inner)?;
    let rank = c.rank();
    let mut out = vec![vec![RationalFunction::zero(); rank]; rank];
    for beta in 0..rank {
        let coeffs = bundle.fibre_coefficients(outer.image(Var::Gen(bundle.s(beta))))?;
        for alpha in 0..rank {
            out[alpha][beta] = scalar_of(&coeffs[alpha])?;
        }
    }
    Ok(out)
}

/// `T^K_D(a,b) = ι^K_b ι^K_a T_{Q_E}` as a section of `TM ⊕ T*M`.
pub fn k_torsion_on(
    m: &CourantModel,
    c: &GenConnection,
    k: &KConnection,
    bundle: &BundleChart,
    a: &GenSection,
    b: &GenSection,
) -> Result<GenSection> {
    let chart = bundle.chart();
    let t = build_qe(m, c, bundle)?.apply(&bundle.tautological())?;
    let ia = contraction_vf(a, k, chart)?;
    let ib = contraction_vf(b, k, chart)?;
    let v = ib.apply(&ia.apply(&t)?)?;
    let coeffs = bundle.fibre_coefficients(&v)?;
    let comps = coeffs.iter().map(scalar_of).collect::<Result<Vec<_>>>()?;
    Ok(GenSection::from_components(&comps))
}

/// `K̃(X+ξ, Y+η) = [[X+ξ, Y+η]]^H_sk − [X,Y] + ∇^K_Y ξ − ∇^K_X η`.
pub fn k_tilde(a: &GenSection, b: &GenSection, m: &CourantModel, k: &KConnection) -> GenSection {
    let sk = dorfman_skew(a, b, m);
    let lb = lie_bracket(&a.vector, &b.vector);
    let y_xi = k.covariant_form(&b.vector, &a.form);
    let x_eta = k.covariant_form(&a.vector, &b.form);
    GenSection {
        vector: sk.vector.iter().zip(&lb).map(|(s, l)| s - l).collect(),
        form: (0..a.n()).map(|mu| &(&sk.form[mu] + &y_xi[mu]) - &x_eta[mu]).collect(),
    }
}

/// `V_ξ` for a one-form `ξ`: the endomorphism `ξ_μ V^{μα}_β`.
pub fn v_along(c: &GenConnection, xi: &[RationalFunction]) -> Vec<Vec<RationalFunction>> {
    let r = c.rank();
    (0..r)
        .map(|alpha| {
            (0..r)
                .map(|beta| {
                    let mut acc = RationalFunction::zero();
                    for (mu, x) in xi.iter().enumerate() {
                        acc = &acc + &(x * c.v(mu, alpha, beta));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `R_D(a,b)` as an endomorphism matrix, evaluated on the constant frame.
pub fn naive_curvature_matrix(
    m: &CourantModel,
    c: &GenConnection,
    a: &GenSection,
    b: &GenSection,
) -> Vec<Vec<RationalFunction>> {
    let r = c.rank();
    let cols: Vec<Vec<RationalFunction>> = (0..r)
        .map(|beta| {
            let e: Vec<RationalFunction> =
                (0..r).map(|i| if i == beta { RationalFunction::one() } else { RationalFunction::zero() }).collect();
            c.naive_curvature(m, a, b, &e)
        })
        .collect();
    (0..r).map(|alpha| (0..r).map(|beta| cols[beta][alpha].clone()).collect()).collect()
}

/// Exact comparison of the K-tensors with the naive operators on one pair.
#[derive(Debug, Clone)]
pub struct NaiveComparison {
    pub k_tilde: GenSection,
    /// `R^K_D(a,b) − R_D(a,b) − V_{K̃(a,b)}`.
    pub curvature_residual: Vec<Vec<RationalFunction>>,
    /// `T^K_D(a,b) − T_D(a,b) − K̃(a,b)`.
    pub torsion_residual: GenSection,
}

impl NaiveComparison {
    pub fn curvature_holds(&self) -> bool {
        self.curvature_residual.iter().flatten().all(RationalFunction::is_zero)
    }

    pub fn torsion_holds(&self) -> bool {
        self.torsion_residual.is_zero()
    }

    /// Whether both residuals equal the flux and symmetric-bracket terms
    /// returned by [`predicted_residuals`].
    pub fn explained_by(&self, curvature: &[Vec<RationalFunction>], torsion: &GenSection) -> bool {
        self.curvature_residual.iter().flatten().eq(curvature.iter().flatten()) && &self.torsion_residual == torsion
    }
}

/// `ι_Y ι_X H = H(X,Y,·)` for the vector parts of `a` and `b`.
pub fn flux_contraction(m: &CourantModel, a: &GenSection, b: &GenSection) -> Vec<RationalFunction> {
    let n = m.n();
    (0..n)
        .map(|rho| {
            let mut acc = RationalFunction::zero();
            for (mu, x) in a.vector.iter().enumerate() {
                for (nu, y) in b.vector.iter().enumerate() {
                    if !x.is_zero() && !y.is_zero() {
                        acc = &acc + &(&(&m.h(mu, nu, rho) * x) * y);
                    }
                }
            }
            acc
        })
        .collect()
}

/// The exact residuals of the naive comparison.  The graded tensors carry the
/// flux `H(X,Y,·)` that cancels between the naive operators and `K̃`, and
/// `T_D` uses the non-skew bracket whose symmetric part is `½ρ*d⟨a,b⟩`:
/// `R^K_D(a,b) = R_D(a,b) + V_{K̃(a,b)} + V_{H(X,Y,·)}` and
/// `T^K_D(a,b) = T_D(a,b) + K̃(a,b) + ½ρ*d⟨a,b⟩ + H(X,Y,·)`.
pub fn predicted_residuals(
    m: &CourantModel,
    c: &GenConnection,
    a: &GenSection,
    b: &GenSection,
) -> (Vec<Vec<RationalFunction>>, GenSection) {
    let n = m.n();
    let hxy = flux_contraction(m, a, b);
    let curvature = v_along(c, &hxy);
    let half = RationalFunction::from_q(crate::rational::Q::new(1.into(), 2.into()));
    let sym = GenSection::differential(n, &pairing(a, b)).scale(&half);
    let torsion = sym.add(&GenSection { vector: vec![RationalFunction::zero(); n], form: hxy });
    (curvature, torsion)
}

/// Compares `R^K_D(a,b)` with `R_D(a,b) + V_{K̃(a,b)}` and `T^K_D(a,b)` with
/// `T_D(a,b) + K̃(a,b)`, returning the exact residuals.
pub fn compare_naive(
    m: &CourantModel,
    c: &GenConnection,
    k: &KConnection,
    a: &GenSection,
    b: &GenSection,
) -> Result<NaiveComparison> {
    let n = c.n();
    let kt = k_tilde(a, b, m, k);
    let curv_bundle = BundleChart::generalized_tangent(n, 0);
    let rk = k_curvature_on(m, c, k, &curv_bundle, a, b)?;
    let rd = naive_curvature_matrix(m, c, a, b);
    let vk = v_along(c, &kt.form);
    let curvature_residual = rk
        .iter()
        .zip(&rd)
        .zip(&vk)
        .map(|((x, y), z)| x.iter().zip(y).zip(z).map(|((p, q), r)| &(p - q) - r).collect())
        .collect();
    let tor_bundle = BundleChart::generalized_tangent(n, -1);
    let tk = k_torsion_on(m, c, k, &tor_bundle, a, b)?;
    let td = c.naive_torsion(m, a, b)?;
    let torsion_residual = tk.sub(&td).sub(&kt);
    Ok(NaiveComparison { k_tilde: kt, curvature_residual, torsion_residual })
}
