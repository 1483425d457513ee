//! Lie algebroids as degree-1 NQ-manifolds, their connections, torsion and
//! curvature.

use std::sync::Arc;

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::graded::{Chart, Generator, GradedPoly, Role, Var};
use crate::rational::{RationalFunction, Q};

/// Anchor `ρ^μ_α` and structure functions `f^γ_{αβ}` in a local frame `e_α`.
#[derive(Debug, Clone)]
pub struct AlgebroidModel {
    n: usize,
    rank: usize,
    rho: Vec<Vec<RationalFunction>>,
    f: Vec<Vec<Vec<RationalFunction>>>,
    chart: Arc<Chart>,
}

/// The chart `(x^μ, ξ^α, s_α)` with `ξ` of degree 1 and the fibre coordinates
/// `s_α` of `p^*A[1]` of degree −1.
fn algebroid_chart(n: usize, rank: usize) -> Arc<Chart> {
    let mut gens: Vec<Generator> = (0..rank).map(|a| Generator::new(format!("xi{}", a + 1), 1, Role::Plain)).collect();
    gens.extend((0..rank).map(|a| Generator::new(format!("s{}", a + 1), -1, Role::Plain)));
    Chart::new(n, gens).expect("generator names are distinct")
}

impl AlgebroidModel {
    /// The zero anchor and bracket on a rank-`rank` bundle.
    pub fn new(n: usize, rank: usize) -> Self {
        AlgebroidModel {
            n,
            rank,
            rho: vec![vec![RationalFunction::zero(); rank]; n],
            f: vec![vec![vec![RationalFunction::zero(); rank]; rank]; rank],
            chart: algebroid_chart(n, rank),
        }
    }

    /// The tangent algebroid: `ρ = id`, `f = 0`.
    pub fn tangent(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for mu in 0..n {
            m.rho[mu][mu] = RationalFunction::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// `ρ^μ_α`.
    pub fn rho(&self, mu: usize, alpha: usize) -> &RationalFunction {
        &self.rho[mu][alpha]
    }

    /// `f^γ_{αβ}`.
    pub fn f(&self, gamma: usize, alpha: usize, beta: usize) -> &RationalFunction {
        &self.f[gamma][alpha][beta]
    }

    pub fn set_rho(&mut self, mu: usize, alpha: usize, value: RationalFunction) -> Result<()> {
        if mu >= self.n || alpha >= self.rank {
            return Err(Error::Invalid(format!("anchor index ({mu},{alpha}) out of range")));
        }
        self.rho[mu][alpha] = value;
        Ok(())
    }

    /// Sets `f^γ_{αβ}` and `f^γ_{βα} = −f^γ_{αβ}`.
    pub fn set_f(&mut self, gamma: usize, alpha: usize, beta: usize, value: RationalFunction) -> Result<()> {
        if gamma.max(alpha).max(beta) >= self.rank {
            return Err(Error::Invalid(format!("structure function index ({gamma},{alpha},{beta}) out of range")));
        }
        if alpha == beta {
            if !value.is_zero() {
                return Err(Error::Invalid("structure functions must be antisymmetric in the lower indices".into()));
            }
            return Ok(());
        }
        self.f[gamma][beta][alpha] = -&value;
        self.f[gamma][alpha][beta] = value;
        Ok(())
    }

    pub fn xi(&self, alpha: usize) -> GradedPoly {
        GradedPoly::gen(&self.chart, alpha)
    }

    pub fn s(&self, alpha: usize) -> GradedPoly {
        GradedPoly::gen(&self.chart, self.rank + alpha)
    }

    /// `d_A = ρ^μ_α ξ^α ∂_{x^μ} + ½ f^α_{βγ} ξ^β ξ^γ ∂_{ξ^α}`.
    pub fn build_da(&self) -> Derivation {
        let half = Q::new(1.into(), 2.into());
        let mut d = Derivation::zero(&self.chart, 1);
        for mu in 0..self.n {
            let mut img = GradedPoly::zero(&self.chart);
            for alpha in 0..self.rank {
                img = &img + &self.xi(alpha).scale(&self.rho[mu][alpha]);
            }
            d.set(Var::Base(mu), img).expect("degree 1");
        }
        for alpha in 0..self.rank {
            let mut img = GradedPoly::zero(&self.chart);
            for beta in 0..self.rank {
                for gamma in 0..self.rank {
                    let c = &self.f[alpha][beta][gamma];
                    if !c.is_zero() {
                        img = &img + &(&self.xi(beta) * &self.xi(gamma)).scale(c).scale_q(&half);
                    }
                }
            }
            d.set(Var::Gen(alpha), img).expect("degree 2");
        }
        d
    }

    /// Whether `d_A² = 0`.
    pub fn check_algebroid(&self) -> bool {
        self.build_da().square().expect("d_A is odd").is_zero()
    }

    /// `ρ(a)` as a vector field.
    pub fn anchor(&self, a: &[RationalFunction]) -> Vec<RationalFunction> {
        (0..self.n)
            .map(|mu| {
                let mut acc = RationalFunction::zero();
                for (alpha, x) in a.iter().enumerate() {
                    acc = &acc + &(&self.rho[mu][alpha] * x);
                }
                acc
            })
            .collect()
    }

    /// `ρ(a) g`.
    pub fn act(&self, a: &[RationalFunction], g: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for (mu, v) in self.anchor(a).iter().enumerate() {
            if !v.is_zero() {
                acc = &acc + &(v * &g.derivative(mu));
            }
        }
        acc
    }

    /// The bracket derived from `d_A`, `ι_{[a,b]} = [[ι_a, d_A], ι_b]`:
    /// `[a,b]^γ = ρ(a)b^γ − ρ(b)a^γ − f^γ_{αβ} a^α b^β`.
    pub fn bracket(&self, a: &[RationalFunction], b: &[RationalFunction]) -> Vec<RationalFunction> {
        (0..self.rank)
            .map(|gamma| {
                let mut acc = &self.act(a, &b[gamma]) - &self.act(b, &a[gamma]);
                for alpha in 0..self.rank {
                    for beta in 0..self.rank {
                        let c = &self.f[gamma][alpha][beta];
                        if !c.is_zero() {
                            acc = &acc - &(&(c * &a[alpha]) * &b[beta]);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// The contraction `ι_a = a^α ∂_{ξ^α}`.
    pub fn contraction(&self, a: &[RationalFunction]) -> Derivation {
        let mut d = Derivation::zero(&self.chart, -1);
        for (alpha, x) in a.iter().enumerate() {
            d.set(Var::Gen(alpha), GradedPoly::scalar(&self.chart, x.clone())).expect("degree 0");
        }
        d
    }
}

/// Coefficients of a connection on `A`, with `∇_η e^γ = Γ_α_β^γ η^α e^β`,
/// equivalently `∇_η e_β = −Γ_α_β^γ η^α e_γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebroidConnection {
    rank: usize,
    gamma: Vec<Vec<Vec<RationalFunction>>>,
}

impl AlgebroidConnection {
    pub fn zero(rank: usize) -> Self {
        AlgebroidConnection { rank, gamma: vec![vec![vec![RationalFunction::zero(); rank]; rank]; rank] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `Γ_α_β^γ`.
    pub fn get(&self, alpha: usize, beta: usize, gamma: usize) -> &RationalFunction {
        &self.gamma[alpha][beta][gamma]
    }

    pub fn set(&mut self, alpha: usize, beta: usize, gamma: usize, value: RationalFunction) -> Result<()> {
        if alpha.max(beta).max(gamma) >= self.rank {
            return Err(Error::Invalid(format!("connection index ({alpha},{beta},{gamma}) out of range")));
        }
        self.gamma[alpha][beta][gamma] = value;
        Ok(())
    }

    fn check(&self, m: &AlgebroidModel) -> Result<()> {
        if self.rank != m.rank() {
            return Err(Error::Invalid("connection rank differs from algebroid rank".into()));
        }
        Ok(())
    }

    /// `(∇_a σ)^γ = ρ(a)σ^γ − a^α Γ_α_β^γ σ^β`.
    pub fn covariant(&self, m: &AlgebroidModel, a: &[RationalFunction], sigma: &[RationalFunction]) -> Vec<RationalFunction> {
        (0..self.rank)
            .map(|gamma| {
                let mut acc = m.act(a, &sigma[gamma]);
                for alpha in 0..self.rank {
                    if a[alpha].is_zero() {
                        continue;
                    }
                    for beta in 0..self.rank {
                        let c = &self.gamma[alpha][beta][gamma];
                        if !c.is_zero() {
                            acc = &acc - &(&(c * &a[alpha]) * &sigma[beta]);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// `Q = d_A − Γ_γ_β^α ξ^γ s_α ∂/∂s_β` on `p^*A[1]`.
    pub fn build_q(&self, m: &AlgebroidModel) -> Result<Derivation> {
        self.check(m)?;
        let mut q = m.build_da();
        for beta in 0..self.rank {
            let mut img = GradedPoly::zero(m.chart());
            for gamma in 0..self.rank {
                for alpha in 0..self.rank {
                    let c = &self.gamma[gamma][beta][alpha];
                    if !c.is_zero() {
                        img = &img - &(&m.xi(gamma) * &m.s(alpha)).scale(c);
                    }
                }
            }
            q.set(Var::Gen(m.rank() + beta), img)?;
        }
        Ok(q)
    }
}

/// Torsion computed as `Q(τ_A)` with `τ_A = ξ^α s_α`, its closed form, and
/// the components `T^α_{βγ} = T(e_β, e_γ)^α`.
#[derive(Debug, Clone)]
pub struct AlgebroidTorsion {
    pub graded: GradedPoly,
    pub closed_form: GradedPoly,
    pub components: Vec<Vec<Vec<RationalFunction>>>,
}

/// `T = (½f^α_{βγ} + Γ_γ_β^α) ξ^β ξ^γ s_α`, checked against `Q(τ_A)`.
pub fn algebroid_torsion(m: &AlgebroidModel, c: &AlgebroidConnection) -> Result<AlgebroidTorsion> {
    let r = m.rank();
    let q = c.build_q(m)?;
    let mut tau = GradedPoly::zero(m.chart());
    for alpha in 0..r {
        tau = &tau + &(&m.xi(alpha) * &m.s(alpha));
    }
    let graded = q.apply(&tau)?;
    let half = Q::new(1.into(), 2.into());
    let mut closed = GradedPoly::zero(m.chart());
    let mut components = vec![vec![vec![RationalFunction::zero(); r]; r]; r];
    for alpha in 0..r {
        for beta in 0..r {
            for gamma in 0..r {
                let coeff = &m.f(alpha, beta, gamma).scale(&half) + c.get(gamma, beta, alpha);
                if !coeff.is_zero() {
                    let t = &(&m.xi(beta) * &m.xi(gamma)) * &m.s(alpha);
                    closed = &closed + &t.scale(&coeff);
                }
                components[alpha][beta][gamma] =
                    &(m.f(alpha, beta, gamma) + c.get(gamma, beta, alpha)) - c.get(beta, gamma, alpha);
            }
        }
    }
    if graded != closed {
        return Err(Error::Mismatch(format!("algebroid torsion: Q(τ) − closed form = {}", &graded - &closed)));
    }
    Ok(AlgebroidTorsion { graded, closed_form: closed, components })
}

/// `T(a,b) = ∇_a b − ∇_b a − [a,b]`.
pub fn torsion_on(
    m: &AlgebroidModel,
    c: &AlgebroidConnection,
    a: &[RationalFunction],
    b: &[RationalFunction],
) -> Vec<RationalFunction> {
    let ab = c.covariant(m, a, b);
    let ba = c.covariant(m, b, a);
    let br = m.bracket(a, b);
    (0..m.rank()).map(|g| &(&ab[g] - &ba[g]) - &br[g]).collect()
}

/// `ι_b ι_a T` with `T = Q(τ_A)`, as a section of `A`.
pub fn graded_torsion_on(
    m: &AlgebroidModel,
    t: &GradedPoly,
    a: &[RationalFunction],
    b: &[RationalFunction],
) -> Result<Vec<RationalFunction>> {
    let v = m.contraction(b).apply(&m.contraction(a).apply(t)?)?;
    (0..m.rank())
        .map(|alpha| {
            let c = v.partial(Var::Gen(m.rank() + alpha));
            scalar(&c)
        })
        .collect()
}

fn scalar(f: &GradedPoly) -> Result<RationalFunction> {
    if f.terms().any(|(mono, _)| mono.iter().any(|&e| e > 0)) {
        return Err(Error::Mismatch(format!("expected a function on the base, got {f}")));
    }
    Ok(f.scalar_part())
}

/// `F(a,b) = [∇_a, ∇_b] − ∇_{[a,b]}` as a matrix `[γ][β]` acting on frame
/// components.
pub fn algebroid_curvature(
    m: &AlgebroidModel,
    c: &AlgebroidConnection,
    a: &[RationalFunction],
    b: &[RationalFunction],
) -> Vec<Vec<RationalFunction>> {
    let r = m.rank();
    let br = m.bracket(a, b);
    let cols: Vec<Vec<RationalFunction>> = (0..r)
        .map(|beta| {
            let e: Vec<RationalFunction> =
                (0..r).map(|i| if i == beta { RationalFunction::one() } else { RationalFunction::zero() }).collect();
            let ab = c.covariant(m, a, &c.covariant(m, b, &e));
            let ba = c.covariant(m, b, &c.covariant(m, a, &e));
            let z = c.covariant(m, &br, &e);
            (0..r).map(|g| &(&ab[g] - &ba[g]) - &z[g]).collect()
        })
        .collect();
    (0..r).map(|g| (0..r).map(|beta| cols[beta][g].clone()).collect()).collect()
}

/// `F(a,b) e_β = ι_b ι_a Q²(s_β)`, read from the graded curvature.
pub fn graded_curvature_on(
    m: &AlgebroidModel,
    c: &AlgebroidConnection,
    a: &[RationalFunction],
    b: &[RationalFunction],
) -> Result<Vec<Vec<RationalFunction>>> {
    let r = m.rank();
    let q2 = c.build_q(m)?.square()?;
    let (ia, ib) = (m.contraction(a), m.contraction(b));
    let mut out = vec![vec![RationalFunction::zero(); r]; r];
    for beta in 0..r {
        let v = ib.apply(&ia.apply(q2.image(Var::Gen(r + beta)))?)?;
        for (g, row) in out.iter_mut().enumerate() {
            row[beta] = scalar(&v.partial(Var::Gen(r + g)))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_scalar;

    fn rf(s: &str) -> RationalFunction {
        parse_scalar(s, None).unwrap()
    }

    #[test]
    fn tangent_algebroid_is_de_rham() {
        let m = AlgebroidModel::tangent(2);
        let d = m.build_da();
        assert_eq!(d.image(Var::Base(1)), &m.xi(1));
        assert!(d.image(Var::Gen(0)).is_zero());
        assert!(m.check_algebroid());
    }

    #[test]
    fn abelian_bundle_has_zero_differential() {
        assert!(AlgebroidModel::new(2, 3).build_da().is_zero());
    }

    fn so3() -> AlgebroidModel {
        let mut m = AlgebroidModel::new(0, 3);
        m.set_f(2, 0, 1, rf("1")).unwrap();
        m.set_f(0, 1, 2, rf("1")).unwrap();
        m.set_f(1, 2, 0, rf("1")).unwrap();
        m
    }

    #[test]
    fn so3_chevalley_eilenberg() {
        let m = so3();
        // d ξ^3 = ½ε_{αβ3} ξ^α ξ^β = ξ^1 ξ^2
        assert_eq!(m.build_da().image(Var::Gen(2)), &(&m.xi(0) * &m.xi(1)));
        assert!(m.check_algebroid());
    }

    #[test]
    fn nonconstant_structure_functions() {
        // ρ = 0, f^1_{23} = x1: d_A ξ^1 = x1 ξ^2 ξ^3 is closed
        let mut m = AlgebroidModel::new(1, 3);
        m.set_f(0, 1, 2, rf("x1")).unwrap();
        assert!(m.check_algebroid());
        // ρ(e_1) = ∂_1 with f^1_{12} = x1: the anchor does not preserve brackets
        let mut m = AlgebroidModel::new(1, 2);
        m.set_rho(0, 0, rf("1")).unwrap();
        m.set_f(0, 0, 1, rf("x1")).unwrap();
        assert!(!m.check_algebroid());
    }

    #[test]
    fn torsion_with_zero_connection_is_half_f() {
        let m = so3();
        let t = algebroid_torsion(&m, &AlgebroidConnection::zero(3)).unwrap();
        assert_eq!(t.components[2][0][1], rf("1"));
        assert_eq!(t.components[2][1][0], rf("-1"));
    }

    #[test]
    fn symmetric_affine_connection_on_tm_is_torsion_free() {
        let m = AlgebroidModel::tangent(2);
        let mut c = AlgebroidConnection::zero(2);
        c.set(0, 1, 0, rf("x2")).unwrap();
        c.set(1, 0, 0, rf("x2")).unwrap();
        c.set(1, 1, 1, rf("x1^2")).unwrap();
        let t = algebroid_torsion(&m, &c).unwrap();
        assert!(t.components.iter().flatten().flatten().all(RationalFunction::is_zero));
    }

    #[test]
    fn rank_one_curvature_against_direct_expansion() {
        // n = 1, A = TM, Γ = x1: ∇_a σ = a σ' − x1 a σ, flat since rank one and n = 1
        let m = AlgebroidModel::tangent(1);
        let mut c = AlgebroidConnection::zero(1);
        c.set(0, 0, 0, rf("x1")).unwrap();
        let a = vec![rf("x1^2")];
        let b = vec![rf("x1 + 1")];
        let f = algebroid_curvature(&m, &c, &a, &b);
        assert!(f[0][0].is_zero());
        assert_eq!(c.covariant(&m, &a, &[rf("x1")]), vec![rf("x1^2 - x1^4")]);
    }
}
