//! Generalized connections `D = ∇ + V` and the associated Q-connections on
//! pullback bundles over `T*[2]T[1]M`.

use std::sync::Arc;

use crate::courant::{dorfman, dorfman_skew, pairing, CourantModel, GenSection};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::graded::{Chart, Generator, GradedPoly, Role, Var};
use crate::rational::{RationalFunction, Q};

type Tensor3 = Vec<Vec<Vec<RationalFunction>>>;

fn zeros3(a: usize, b: usize, c: usize) -> Tensor3 {
    vec![vec![vec![RationalFunction::zero(); c]; b]; a]
}

/// The eight coefficient blocks of a generalized connection on `TM ⊕ T*M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    /// `Γ_μ^ν_ρ` of `∇^{TT}`.
    GammaTT,
    /// `Γ̃_μ_ν^ρ` of `∇^{T*T*}`.
    GammaTsTs,
    /// `Γ_μ^{νρ}` of `∇^{TT*}`.
    GammaTTs,
    /// `Γ_{μνρ}` of `∇^{T*T}`.
    GammaTsT,
    /// `Ṽ^{μν}_ρ` of `V^{TT}`.
    VTT,
    /// `V^{μνρ}` of `V^{TT*}`.
    VTTs,
    /// `V^μ_{νρ}` of `V^{T*T}`.
    VTsT,
    /// `V^μ_ν^ρ` of `V^{T*T*}`.
    VTsTs,
}

impl Block {
    pub const ALL: [Block; 8] = [
        Block::GammaTT,
        Block::GammaTsTs,
        Block::GammaTTs,
        Block::GammaTsT,
        Block::VTT,
        Block::VTTs,
        Block::VTsT,
        Block::VTsTs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Block::GammaTT => "Gamma_TT",
            Block::GammaTsTs => "Gamma_TsTs",
            Block::GammaTTs => "Gamma_TTs",
            Block::GammaTsT => "Gamma_TsT",
            Block::VTT => "V_TT",
            Block::VTTs => "V_TTs",
            Block::VTsT => "V_TsT",
            Block::VTsTs => "V_TsTs",
        }
    }

    pub fn from_name(s: &str) -> Option<Block> {
        Block::ALL.into_iter().find(|b| b.name() == s)
    }

    /// Whether the block belongs to `V` rather than `∇`, and the fibre
    /// offsets of its upper and lower `End E` indices.
    fn layout(self, n: usize) -> (bool, usize, usize) {
        match self {
            Block::GammaTT => (false, 0, 0),
            Block::GammaTsTs => (false, n, n),
            Block::GammaTTs => (false, 0, n),
            Block::GammaTsT => (false, n, 0),
            Block::VTT => (true, 0, 0),
            Block::VTTs => (true, 0, n),
            Block::VTsT => (true, n, 0),
            Block::VTsTs => (true, n, n),
        }
    }
}

/// Coefficients `Γ_μ^α_β` and `V^{μα}_β` of `D = ∇ + V` on a rank-`r` bundle:
/// `(D_a σ)^α = a^μ(∂_μσ^α + Γ_μ^α_β σ^β) + a_μ V^{μα}_β σ^β`.
///
/// For `E = TM ⊕ T*M` (rank `2n`), fibre indices `α < n` are the vector
/// components and `α ≥ n` the one-form components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConnection {
    n: usize,
    rank: usize,
    gamma: Tensor3,
    v: Tensor3,
}

impl GenConnection {
    pub fn zero(n: usize, rank: usize) -> Self {
        GenConnection { n, rank, gamma: zeros3(n, rank, rank), v: zeros3(n, rank, rank) }
    }

    /// The zero connection on `TM ⊕ T*M`.
    pub fn zero_generalized(n: usize) -> Self {
        Self::zero(n, 2 * n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_generalized_tangent(&self) -> bool {
        self.rank == 2 * self.n
    }

    pub fn gamma(&self, mu: usize, alpha: usize, beta: usize) -> &RationalFunction {
        &self.gamma[mu][alpha][beta]
    }

    pub fn v(&self, mu: usize, alpha: usize, beta: usize) -> &RationalFunction {
        &self.v[mu][alpha][beta]
    }

    pub fn set_gamma(&mut self, mu: usize, alpha: usize, beta: usize, value: RationalFunction) {
        self.gamma[mu][alpha][beta] = value;
    }

    pub fn set_v(&mut self, mu: usize, alpha: usize, beta: usize, value: RationalFunction) {
        self.v[mu][alpha][beta] = value;
    }

    /// True iff every `V` component vanishes.
    pub fn v_is_zero(&self) -> bool {
        self.v.iter().flatten().flatten().all(RationalFunction::is_zero)
    }

    pub fn check_tangent(&self) -> Result<()> {
        if self.is_generalized_tangent() {
            Ok(())
        } else {
            Err(Error::Invalid("operation requires a connection on TM ⊕ T*M".into()))
        }
    }

    /// Component of a named block, indices as written in the block symbol.
    pub fn block(&self, b: Block, mu: usize, nu: usize, rho: usize) -> &RationalFunction {
        let (is_v, up, lo) = b.layout(self.n);
        if is_v {
            &self.v[mu][up + nu][lo + rho]
        } else {
            &self.gamma[mu][up + nu][lo + rho]
        }
    }

    pub fn set_block(&mut self, b: Block, mu: usize, nu: usize, rho: usize, value: RationalFunction) -> Result<()> {
        self.check_tangent()?;
        if mu.max(nu).max(rho) >= self.n {
            return Err(Error::Invalid(format!("{} index out of range for n = {}", b.name(), self.n)));
        }
        let (is_v, up, lo) = b.layout(self.n);
        if is_v {
            self.v[mu][up + nu][lo + rho] = value;
        } else {
            self.gamma[mu][up + nu][lo + rho] = value;
        }
        Ok(())
    }

    /// `D_a σ` for a section `a` of `TM ⊕ T*M` and a section `σ` of `E`.
    pub fn covariant_derivative(&self, a: &GenSection, sigma: &[RationalFunction]) -> Vec<RationalFunction> {
        (0..self.rank)
            .map(|alpha| {
                let mut acc = RationalFunction::zero();
                for mu in 0..self.n {
                    let (x, xi) = (&a.vector[mu], &a.form[mu]);
                    if !x.is_zero() {
                        let mut inner = sigma[alpha].derivative(mu);
                        for (beta, s) in sigma.iter().enumerate() {
                            inner = &inner + &(&self.gamma[mu][alpha][beta] * s);
                        }
                        acc = &acc + &(x * &inner);
                    }
                    if !xi.is_zero() {
                        for (beta, s) in sigma.iter().enumerate() {
                            acc = &acc + &(&(xi * &self.v[mu][alpha][beta]) * s);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// `D_a b` for `E = TM ⊕ T*M`.
    pub fn d_section(&self, a: &GenSection, b: &GenSection) -> GenSection {
        GenSection::from_components(&self.covariant_derivative(a, &b.components()))
    }

    /// The naive curvature operator `R_D(a,b)σ = [D_a, D_b]σ − D_{[[a,b]]_sk}σ`.
    pub fn naive_curvature(
        &self,
        m: &CourantModel,
        a: &GenSection,
        b: &GenSection,
        sigma: &[RationalFunction],
    ) -> Vec<RationalFunction> {
        let ab = self.covariant_derivative(a, &self.covariant_derivative(b, sigma));
        let ba = self.covariant_derivative(b, &self.covariant_derivative(a, sigma));
        let br = self.covariant_derivative(&dorfman_skew(a, b, m), sigma);
        ab.iter().zip(&ba).zip(&br).map(|((x, y), z)| &(x - y) - z).collect()
    }

    /// The naive torsion `D_a b − D_b a − [[a,b]]`.
    pub fn naive_torsion(&self, m: &CourantModel, a: &GenSection, b: &GenSection) -> Result<GenSection> {
        self.check_tangent()?;
        Ok(self.d_section(a, b).sub(&self.d_section(b, a)).sub(&dorfman(a, b, m)))
    }

    /// `𝔗_D(a,b,c) = ⟨D_a b − D_b a − [[a,b]]_sk, c⟩ + ½(⟨D_c a, b⟩ − ⟨D_c b, a⟩)`.
    pub fn gualtieri_torsion(
        &self,
        m: &CourantModel,
        a: &GenSection,
        b: &GenSection,
        c: &GenSection,
    ) -> Result<RationalFunction> {
        self.check_tangent()?;
        let t = self.d_section(a, b).sub(&self.d_section(b, a)).sub(&dorfman_skew(a, b, m));
        let half = RationalFunction::from_q(Q::new(1.into(), 2.into()));
        let corr = &pairing(&self.d_section(c, a), b) - &pairing(&self.d_section(c, b), a);
        Ok(&pairing(&t, c) + &(&half * &corr))
    }

    /// First frame triple `(direction, β, γ)` violating pairing compatibility
    /// `ρ(a)⟨b,c⟩ = ⟨D_a b, c⟩ + ⟨b, D_a c⟩`, or `None` if compatible.
    pub fn pairing_violation(&self) -> Result<Option<(usize, usize, usize, RationalFunction)>> {
        self.check_tangent()?;
        let n = self.n;
        let dual = |i: usize| if i < n { i + n } else { i - n };
        for dir in 0..2 * n {
            let mat = |alpha: usize, beta: usize| {
                if dir < n {
                    &self.gamma[dir][alpha][beta]
                } else {
                    &self.v[dir - n][alpha][beta]
                }
            };
            for beta in 0..2 * n {
                for gamma in 0..2 * n {
                    // ⟨D E_β, E_γ⟩ + ⟨E_β, D E_γ⟩ with frame sections
                    let val = mat(dual(gamma), beta) + mat(dual(beta), gamma);
                    if !val.is_zero() {
                        return Ok(Some((dir, beta, gamma, val)));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_pairing_compatible(&self) -> Result<bool> {
        Ok(self.pairing_violation()?.is_none())
    }

    /// Components of the curvature of `∇`:
    /// `R_{μν}{}^α{}_β = ∂_μΓ_ν^α_β − ∂_νΓ_μ^α_β + Γ_μ^α_γΓ_ν^γ_β − Γ_ν^α_γΓ_μ^γ_β`.
    pub fn nabla_curvature(&self, mu: usize, nu: usize, alpha: usize, beta: usize) -> RationalFunction {
        let g = &self.gamma;
        let mut acc = &g[nu][alpha][beta].derivative(mu) - &g[mu][alpha][beta].derivative(nu);
        for gm in 0..self.rank {
            acc = &acc + &(&(&g[mu][alpha][gm] * &g[nu][gm][beta]) - &(&g[nu][alpha][gm] * &g[mu][gm][beta]));
        }
        acc
    }

    pub fn nabla_is_flat(&self) -> bool {
        (0..self.n).all(|mu| {
            (mu + 1..self.n)
                .all(|nu| (0..self.rank).all(|a| (0..self.rank).all(|b| self.nabla_curvature(mu, nu, a, b).is_zero())))
        })
    }
}

/// Graded chart of `E*` over `T*[2]T[1]M`: the Courant generators followed
/// by the fibre coordinates `s_α`.
#[derive(Debug, Clone)]
pub struct BundleChart {
    chart: Arc<Chart>,
    fibre_start: usize,
    rank: usize,
}

impl BundleChart {
    /// Fibre coordinates `s1..sr` of the given degree, untouched by chart changes.
    pub fn general(n: usize, rank: usize, fibre_degree: i32) -> Self {
        let fibre = (0..rank).map(|a| Generator::new(format!("s{}", a + 1), fibre_degree, Role::Plain)).collect();
        Self::with_fibre(n, fibre)
    }

    /// Fibre coordinates of `TM ⊕ T*M`: `sd_ν` (paired with vector components,
    /// transforming like `b`) then `su^ν` (paired with form components,
    /// transforming like `ψ`).
    pub fn generalized_tangent(n: usize, fibre_degree: i32) -> Self {
        let mut fibre: Vec<Generator> =
            (0..n).map(|m| Generator::new(format!("sd{}", m + 1), fibre_degree, Role::FibreCovec(m))).collect();
        fibre.extend((0..n).map(|m| Generator::new(format!("su{}", m + 1), fibre_degree, Role::FibreVec(m))));
        Self::with_fibre(n, fibre)
    }

    fn with_fibre(n: usize, fibre: Vec<Generator>) -> Self {
        let rank = fibre.len();
        let chart = Chart::courant_with_fibre(n, fibre).expect("distinct names");
        BundleChart { chart, fibre_start: 3 * n, rank }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Chart index of `s_α`.
    pub fn s(&self, alpha: usize) -> usize {
        self.fibre_start + alpha
    }

    pub fn s_poly(&self, alpha: usize) -> GradedPoly {
        GradedPoly::gen(&self.chart, self.s(alpha))
    }

    pub fn fibre_degree(&self) -> i32 {
        self.chart.generator(self.fibre_start).degree
    }

    /// Chart indices of the Courant generators `ψ, b, p`.
    pub fn base_generators(&self) -> Vec<usize> {
        (0..self.fibre_start).collect()
    }

    /// Decomposes a function linear in the fibre coordinates as
    /// `Σ_α c_α s_α`; fails if some term is not linear in `s`.
    pub fn fibre_coefficients(&self, f: &GradedPoly) -> Result<Vec<GradedPoly>> {
        let mut out = vec![GradedPoly::zero(&self.chart); self.rank];
        for (m, c) in f.terms() {
            let fib: Vec<usize> = (0..self.rank).filter(|&a| m[self.s(a)] > 0).collect();
            if fib.len() != 1 || m[self.s(fib[0])] != 1 {
                return Err(Error::Invalid("function is not linear in the fibre coordinates".into()));
            }
            let alpha = fib[0];
            let mut base = m.clone();
            base[self.s(alpha)] = 0;
            // s_α is the last factor in canonical order, so no sign arises
            out[alpha] = &out[alpha] + &GradedPoly::term(&self.chart, c.clone(), base);
        }
        Ok(out)
    }

    /// `Σ_α c_α s_α`.
    pub fn from_fibre_coefficients(&self, coeffs: &[GradedPoly]) -> GradedPoly {
        let mut acc = GradedPoly::zero(&self.chart);
        for (alpha, c) in coeffs.iter().enumerate() {
            acc = &acc + &(c * &self.s_poly(alpha));
        }
        acc
    }

    fn psi(&self, mu: usize) -> GradedPoly {
        GradedPoly::gen(&self.chart, self.chart.psi(mu))
    }

    fn b(&self, mu: usize) -> GradedPoly {
        GradedPoly::gen(&self.chart, self.chart.b(mu))
    }

    fn p(&self, mu: usize) -> GradedPoly {
        GradedPoly::gen(&self.chart, self.chart.p(mu))
    }

    /// `τ_M = ψ^μ sd_μ + b_μ su^μ` on the generalized tangent chart.
    pub fn tautological(&self) -> GradedPoly {
        let n = self.chart.n();
        let mut acc = GradedPoly::zero(&self.chart);
        for mu in 0..n {
            acc = &acc + &(&self.psi(mu) * &self.s_poly(mu));
            acc = &acc + &(&self.b(mu) * &self.s_poly(n + mu));
        }
        acc
    }
}

/// `Q_E = d_M + 𝚪^α_β s_α ∂/∂s_β` with `𝚪^α_β = Γ_μ^α_β ψ^μ + V^{μα}_β b_μ`.
pub fn build_qe(m: &CourantModel, c: &GenConnection, bundle: &BundleChart) -> Result<Derivation> {
    if c.n() != m.n() || c.rank() != bundle.rank() {
        return Err(Error::Invalid("model, connection and bundle dimensions disagree".into()));
    }
    let chart = bundle.chart();
    let mut q = m.dm_on(chart)?;
    for beta in 0..c.rank() {
        let coeffs = connection_form(c, bundle, beta);
        q.set(Var::Gen(bundle.s(beta)), bundle.from_fibre_coefficients(&coeffs))?;
    }
    Ok(q)
}

/// `𝚪^α_β` for fixed `β`, as a list over `α`.
pub fn connection_form(c: &GenConnection, bundle: &BundleChart, beta: usize) -> Vec<GradedPoly> {
    (0..c.rank())
        .map(|alpha| {
            let mut acc = GradedPoly::zero(bundle.chart());
            for mu in 0..c.n() {
                acc = &acc + &bundle.psi(mu).scale(c.gamma(mu, alpha, beta));
                acc = &acc + &bundle.b(mu).scale(c.v(mu, alpha, beta));
            }
            acc
        })
        .collect()
}

/// Graded curvature of a Q-connection together with its closed form.
#[derive(Debug, Clone)]
pub struct Curvature {
    /// `Q_E ∘ Q_E`.
    pub vf: Derivation,
    /// The derivation built from the closed-form component expressions.
    pub closed_form: Derivation,
}

impl Curvature {
    /// First generator where the two computations disagree.
    pub fn mismatch(&self) -> Option<(String, GradedPoly)> {
        self.vf.first_difference(&self.closed_form)
    }
}

/// Closed-form coefficient of `s_α` in `R(s_β)`:
/// `(∂_μΓ_ν + Γ_μΓ_ν + ½H_{ρμν}V^ρ)ψ^μψ^ν + (∂_μV^ν + Γ_μV^ν − V^νΓ_μ)ψ^μ b_ν
///  + V^μV^ν b_μ b_ν + V^μ p_μ`.
pub fn curvature_closed_form_entry(
    m: &CourantModel,
    c: &GenConnection,
    bundle: &BundleChart,
    alpha: usize,
    beta: usize,
) -> GradedPoly {
    let n = c.n();
    let r = c.rank();
    let (g, v) = (&c.gamma, &c.v);
    let mut acc = GradedPoly::zero(bundle.chart());
    for mu in 0..n {
        for nu in 0..n {
            let mut pp = g[nu][alpha][beta].derivative(mu);
            let mut pb = v[nu][alpha][beta].derivative(mu);
            let mut bb = RationalFunction::zero();
            for gm in 0..r {
                pp = &pp + &(&g[mu][alpha][gm] * &g[nu][gm][beta]);
                pb = &pb + &(&(&g[mu][alpha][gm] * &v[nu][gm][beta]) - &(&v[nu][alpha][gm] * &g[mu][gm][beta]));
                bb = &bb + &(&v[mu][alpha][gm] * &v[nu][gm][beta]);
            }
            for rho in 0..n {
                let h = m.h(rho, mu, nu);
                if !h.is_zero() {
                    pp = &pp + &(&h * &v[rho][alpha][beta]).scale(&Q::new(1.into(), 2.into()));
                }
            }
            acc = &acc + &(&bundle.psi(mu) * &bundle.psi(nu)).scale(&pp);
            acc = &acc + &(&bundle.psi(mu) * &bundle.b(nu)).scale(&pb);
            acc = &acc + &(&bundle.b(mu) * &bundle.b(nu)).scale(&bb);
        }
        acc = &acc + &bundle.p(mu).scale(&v[mu][alpha][beta]);
    }
    acc
}

/// Curvature `R_{Q_E} = Q_E²`, computed by composing derivations and by the
/// closed-form component expressions.
pub fn curvature(m: &CourantModel, c: &GenConnection, bundle: &BundleChart) -> Result<Curvature> {
    let qe = build_qe(m, c, bundle)?;
    let vf = qe.square()?;
    let mut closed = m.dm_on(bundle.chart())?.square()?;
    for beta in 0..c.rank() {
        let coeffs: Vec<GradedPoly> =
            (0..c.rank()).map(|alpha| curvature_closed_form_entry(m, c, bundle, alpha, beta)).collect();
        closed.set(Var::Gen(bundle.s(beta)), bundle.from_fibre_coefficients(&coeffs))?;
    }
    Ok(Curvature { vf, closed_form: closed })
}

/// Whether the Q-connection squares to zero on the fibre, cross-checked
/// against the criterion `V = 0` and `∇` flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBundleReport {
    pub curvature_vanishes: bool,
    pub criterion: bool,
}

pub fn is_q_bundle(m: &CourantModel, c: &GenConnection, bundle: &BundleChart) -> Result<QBundleReport> {
    let qe = build_qe(m, c, bundle)?;
    let sq = qe.square()?;
    let curvature_vanishes = (0..c.rank()).all(|b| sq.image(Var::Gen(bundle.s(b))).is_zero());
    let criterion = c.v_is_zero() && c.nabla_is_flat();
    Ok(QBundleReport { curvature_vanishes, criterion })
}

/// Torsion `Q_E(τ_M)` together with the closed-form component expression.
#[derive(Debug, Clone)]
pub struct Torsion {
    pub graded: GradedPoly,
    pub closed_form: GradedPoly,
}

/// Closed form `T(Γ) + T(V) + T^{(1,1)}(Γ,V)` in the block notation.
pub fn torsion_closed_form(m: &CourantModel, c: &GenConnection, bundle: &BundleChart) -> Result<GradedPoly> {
    c.check_tangent()?;
    let n = c.n();
    let half = Q::new(1.into(), 2.into());
    let mut acc = GradedPoly::zero(bundle.chart());
    let sd = |r: usize| bundle.s_poly(r);
    let su = |r: usize| bundle.s_poly(n + r);
    for mu in 0..n {
        for nu in 0..n {
            let psipsi = &bundle.psi(mu) * &bundle.psi(nu);
            let bb = &bundle.b(mu) * &bundle.b(nu);
            let bpsi = &bundle.b(mu) * &bundle.psi(nu);
            for rho in 0..n {
                // T(Γ)
                let t1 = c.block(Block::GammaTT, mu, rho, nu);
                let t2 = &m.h(rho, mu, nu).scale(&half) + c.block(Block::GammaTsT, mu, rho, nu);
                acc = &acc + &(&psipsi * &sd(rho)).scale(t1);
                acc = &acc + &(&psipsi * &su(rho)).scale(&t2);
                // T(V)
                acc = &acc + &(&bb * &sd(rho)).scale(c.block(Block::VTTs, mu, rho, nu));
                acc = &acc + &(&bb * &su(rho)).scale(c.block(Block::VTsTs, mu, rho, nu));
                // T^{(1,1)}
                let m1 = c.block(Block::VTT, mu, rho, nu) - c.block(Block::GammaTTs, nu, rho, mu);
                let m2 = c.block(Block::VTsT, mu, rho, nu) - c.block(Block::GammaTsTs, nu, rho, mu);
                acc = &acc + &(&bpsi * &sd(rho)).scale(&m1);
                acc = &acc + &(&bpsi * &su(rho)).scale(&m2);
            }
        }
        acc = &acc + &(&bundle.p(mu) * &su(mu));
    }
    Ok(acc)
}

pub fn torsion(m: &CourantModel, c: &GenConnection, bundle: &BundleChart) -> Result<Torsion> {
    c.check_tangent()?;
    let qe = build_qe(m, c, bundle)?;
    let graded = qe.apply(&bundle.tautological())?;
    let closed_form = torsion_closed_form(m, c, bundle)?;
    Ok(Torsion { graded, closed_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_scalar;

    fn rf(s: &str) -> RationalFunction {
        parse_scalar(s, None).unwrap()
    }

    #[test]
    fn flat_zero_connection_is_dm() {
        let m = CourantModel::new(2);
        let c = GenConnection::zero(2, 2);
        let bundle = BundleChart::general(2, 2, 0);
        let q = build_qe(&m, &c, &bundle).unwrap();
        assert_eq!(q.first_difference(&m.dm_on(bundle.chart()).unwrap()), None);
        let curv = curvature(&m, &c, &bundle).unwrap();
        assert!(curv.vf.is_zero());
        assert!(is_q_bundle(&m, &c, &bundle).unwrap().curvature_vanishes);
    }

    #[test]
    fn qe_image_of_fibre_coordinate() {
        let m = CourantModel::new(1);
        let mut c = GenConnection::zero(1, 2);
        c.set_gamma(0, 1, 0, rf("x1"));
        c.set_v(0, 0, 0, rf("3"));
        let bundle = BundleChart::general(1, 2, 0);
        let q = build_qe(&m, &c, &bundle).unwrap();
        let expect = GradedPoly::parse(bundle.chart(), "3*b1*s1 + x1*psi1*s2").unwrap();
        assert_eq!(q.image(Var::Gen(bundle.s(0))), &expect);
        assert!(q.is_projectable(&bundle.base_generators()));
    }

    #[test]
    fn torsion_without_connection_is_p_term() {
        let m = CourantModel::new(2);
        let c = GenConnection::zero_generalized(2);
        let bundle = BundleChart::generalized_tangent(2, -1);
        let t = torsion(&m, &c, &bundle).unwrap();
        let expect = GradedPoly::parse(bundle.chart(), "p1*su1 + p2*su2").unwrap();
        assert_eq!(t.graded, expect);
        assert_eq!(t.closed_form, expect);
    }

    #[test]
    fn torsion_with_flux_only() {
        let m = CourantModel::new(3).with_h(0, 1, 2, rf("x1")).unwrap();
        let c = GenConnection::zero_generalized(3);
        let bundle = BundleChart::generalized_tangent(3, -1);
        let t = torsion(&m, &c, &bundle).unwrap();
        let expect = GradedPoly::parse(
            bundle.chart(),
            "x1*psi2*psi3*su1 - x1*psi1*psi3*su2 + x1*psi1*psi2*su3 + p1*su1 + p2*su2 + p3*su3",
        )
        .unwrap();
        assert_eq!(t.graded, expect);
        assert_eq!(t.closed_form, expect);
    }

    #[test]
    fn covariant_derivative_leibniz() {
        let mut c = GenConnection::zero(2, 2);
        c.set_gamma(0, 0, 1, rf("x2"));
        c.set_v(0, 1, 1, rf("x1"));
        let sigma = vec![rf("x1"), rf("1")];
        let f = rf("x1^2 + x2");
        let a = GenSection::coordinate_vector(2, 0);
        let fs: Vec<_> = sigma.iter().map(|s| s * &f).collect();
        let lhs = c.covariant_derivative(&a, &fs);
        let rhs: Vec<_> = c.covariant_derivative(&a, &sigma).iter().zip(&sigma).map(|(d, s)| &(d * &f) + &(&f.derivative(0) * s)).collect();
        assert_eq!(lhs, rhs);
        let form = GenSection::coordinate_form(2, 0);
        assert_eq!(c.covariant_derivative(&form, &sigma), vec![rf("0"), rf("x1")]);
    }

    #[test]
    fn zero_connection_is_pairing_compatible() {
        assert!(GenConnection::zero_generalized(2).is_pairing_compatible().unwrap());
        let mut c = GenConnection::zero_generalized(2);
        c.set_block(Block::GammaTT, 0, 0, 1, rf("1")).unwrap();
        assert!(!c.is_pairing_compatible().unwrap());
        c.set_block(Block::GammaTsTs, 0, 1, 0, rf("-1")).unwrap();
        assert!(c.is_pairing_compatible().unwrap());
    }
}
