//! Generalized metrics, the K-Ricci tensor and K-scalar curvature, and the
//! torsion-free pairing-compatible family of generalized connections.

use crate::connection::{BundleChart, GenConnection};
use crate::connection::Block;
use crate::courant::{CourantModel, GenSection};
use crate::error::{Error, Result};
use crate::ktensors::{evaluate_two_form, k_curvature, k_torsion, KConnection};
use crate::linalg::{self, Matrix};
use crate::rational::{RationalFunction, Q};

/// `G = [[g − B g⁻¹ B, B g⁻¹], [−g⁻¹ B, g⁻¹]]` built from a metric `g` and a
/// two-form `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedMetric {
    n: usize,
    g: Matrix,
    b: Matrix,
    g_inv: Matrix,
    big: Matrix,
}

impl GeneralizedMetric {
    pub fn new(g: Matrix, b: Matrix) -> Result<Self> {
        let n = g.len();
        let square = |m: &Matrix| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&g) || !square(&b) {
            return Err(Error::Invalid(format!("metric blocks must be {n}×{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if g[i][j] != g[j][i] {
                    return Err(Error::Invalid(format!("g is not symmetric at ({}, {})", i + 1, j + 1)));
                }
                if b[i][j] != -&b[j][i] {
                    return Err(Error::Invalid(format!("B is not antisymmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let g_inv = linalg::inverse(&g).map_err(|_| Error::Invalid("g is singular".into()))?;
        let bgi = linalg::matmul(&b, &g_inv);
        let tl = linalg::add(&g, &linalg::neg(&linalg::matmul(&bgi, &b)));
        let bl = linalg::neg(&linalg::matmul(&g_inv, &b));
        let mut big = linalg::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                big[i][j] = tl[i][j].clone();
                big[i][n + j] = bgi[i][j].clone();
                big[n + i][j] = bl[i][j].clone();
                big[n + i][n + j] = g_inv[i][j].clone();
            }
        }
        Ok(GeneralizedMetric { n, g, b, g_inv, big })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn g_inv(&self) -> &Matrix {
        &self.g_inv
    }

    /// The `2n × 2n` matrix `G`.
    pub fn matrix(&self) -> &Matrix {
        &self.big
    }

    /// The pairing matrix `[[0, 1], [1, 0]]`.
    pub fn pairing_matrix(n: usize) -> Matrix {
        let mut p = linalg::zeros(2 * n, 2 * n);
        for i in 0..n {
            p[i][n + i] = RationalFunction::one();
            p[n + i][i] = RationalFunction::one();
        }
        p
    }

    /// `𝔥 = ⟨,⟩⁻¹ G`.
    pub fn h(&self) -> Matrix {
        linalg::matmul(&Self::pairing_matrix(self.n), &self.big)
    }
}

/// The torsion-free, pairing-compatible family: a symmetric `∇^TT` with its
/// dual on `T*M`, lower-left block `½H`, and `V^{T*T}` antisymmetric in its
/// two form indices. All other blocks vanish.
#[derive(Debug, Clone)]
pub struct CanonicalD {
    n: usize,
    connection: GenConnection,
}

impl CanonicalD {
    /// Builds the connection from `Γ_μ^ν_ρ` (symmetric in `μ, ρ`) and
    /// `V^μ_ν_ρ` (antisymmetric in `ν, ρ`), indexed `[μ][ν][ρ]`.
    pub fn new(
        m: &CourantModel,
        gamma: &[Vec<Vec<RationalFunction>>],
        v_tst: &[Vec<Vec<RationalFunction>>],
    ) -> Result<Self> {
        let n = m.n();
        let mut c = GenConnection::zero_generalized(n);
        let half = Q::new(1.into(), 2.into());
        for mu in 0..n {
            for nu in 0..n {
                for rho in 0..n {
                    c.set_block(Block::GammaTT, mu, nu, rho, gamma[mu][nu][rho].clone())?;
                    c.set_block(Block::GammaTsTs, mu, rho, nu, -&gamma[mu][nu][rho])?;
                    c.set_block(Block::GammaTsT, mu, nu, rho, m.h(mu, nu, rho).scale(&half))?;
                    c.set_block(Block::VTsT, mu, nu, rho, v_tst[mu][nu][rho].clone())?;
                }
            }
        }
        Self::from_connection(m, &c)
    }

    /// Validates that `c` has exactly the block pattern of the family.
    pub fn from_connection(m: &CourantModel, c: &GenConnection) -> Result<Self> {
        c.check_tangent()?;
        let n = c.n();
        if m.n() != n {
            return Err(Error::Invalid("model and connection dimensions differ".into()));
        }
        let half = Q::new(1.into(), 2.into());
        let fail = |what: &str, i: usize, j: usize, k: usize| {
            Err(Error::Invalid(format!("not in the torsion-free family: {what} at ({}, {}, {})", i + 1, j + 1, k + 1)))
        };
        for mu in 0..n {
            for nu in 0..n {
                for rho in 0..n {
                    let g = c.block(Block::GammaTT, mu, nu, rho);
                    if g != c.block(Block::GammaTT, rho, nu, mu) {
                        return fail("Gamma_TT is not symmetric", mu, nu, rho);
                    }
                    if *c.block(Block::GammaTsTs, mu, rho, nu) != -g {
                        return fail("Gamma_TsTs is not the dual of Gamma_TT", mu, rho, nu);
                    }
                    if *c.block(Block::GammaTsT, mu, nu, rho) != m.h(mu, nu, rho).scale(&half) {
                        return fail("Gamma_TsT differs from H/2", mu, nu, rho);
                    }
                    if *c.block(Block::VTsT, mu, nu, rho) != -c.block(Block::VTsT, mu, rho, nu) {
                        return fail("V_TsT is not antisymmetric in its form indices", mu, nu, rho);
                    }
                    for b in [Block::GammaTTs, Block::VTT, Block::VTTs, Block::VTsTs] {
                        if !c.block(b, mu, nu, rho).is_zero() {
                            return fail(&format!("{} is nonzero", b.name()), mu, nu, rho);
                        }
                    }
                }
            }
        }
        Ok(CanonicalD { n, connection: c.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn connection(&self) -> &GenConnection {
        &self.connection
    }

    /// `Γ_μ^ν_ρ`.
    pub fn gamma(&self, mu: usize, nu: usize, rho: usize) -> &RationalFunction {
        self.connection.block(Block::GammaTT, mu, nu, rho)
    }

    /// `V^μ_ν_ρ` of `V^{T*T}`.
    pub fn v(&self, mu: usize, nu: usize, rho: usize) -> &RationalFunction {
        self.connection.block(Block::VTsT, mu, nu, rho)
    }
}

/// `K_μ^ν_ρ = Γ̃_μ_ρ^ν − V^ν_ρ_μ`.
pub fn fix_k(c: &GenConnection) -> Result<KConnection> {
    c.check_tangent()?;
    let n = c.n();
    let mut k = KConnection::zero(n);
    for mu in 0..n {
        for nu in 0..n {
            for rho in 0..n {
                let v = c.block(Block::GammaTsTs, mu, rho, nu) - c.block(Block::VTsT, nu, rho, mu);
                k.set(mu, nu, rho, v)?;
            }
        }
    }
    Ok(k)
}

/// [`fix_k`] followed by the check that the K-torsion vanishes identically.
pub fn fix_k_checked(m: &CourantModel, c: &GenConnection) -> Result<KConnection> {
    let k = fix_k(c)?;
    let t = k_torsion(m, c, &k, &BundleChart::generalized_tangent(c.n(), -1))?;
    if !t.graded.is_zero() {
        return Err(Error::Mismatch(format!("K-torsion does not vanish for the fixed K: {}", t.graded)));
    }
    Ok(k)
}

/// `Ric^K_{αβ} = ⟨E^γ, R^K_D(E_γ, E_α) E_β⟩` in the frame `E = (∂_μ, dx^μ)`.
pub fn ricci_k(m: &CourantModel, c: &GenConnection, k: &KConnection) -> Result<Matrix> {
    c.check_tangent()?;
    let n = c.n();
    let r = 2 * n;
    let kc = k_curvature(m, c, k, &BundleChart::generalized_tangent(n, 0))?;
    let frames: Vec<GenSection> = (0..r).map(|a| GenSection::frame(n, a)).collect();
    let mut ric = linalg::zeros(r, r);
    for (alpha, row) in ric.iter_mut().enumerate() {
        for (beta, entry) in row.iter_mut().enumerate() {
            let mut acc = RationalFunction::zero();
            for gamma in 0..r {
                let w = &kc.graded[gamma][beta];
                if !w.is_zero() {
                    acc = &acc + &evaluate_two_form(w, &frames[gamma], &frames[alpha], k)?;
                }
            }
            *entry = acc;
        }
    }
    Ok(ric)
}

/// The four contractions of the K-scalar curvature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarParts {
    /// `Ric^{μν} G_{μν}`.
    pub upper_upper: RationalFunction,
    /// `Ric^μ_ν G^ν_μ`.
    pub upper_lower: RationalFunction,
    /// `Ric_μ^ν G_ν^μ`.
    pub lower_upper: RationalFunction,
    /// `Ric_{μν} G^{μν}`.
    pub lower_lower: RationalFunction,
}

impl ScalarParts {
    pub fn total(&self) -> RationalFunction {
        &(&(&self.upper_upper + &self.upper_lower) + &self.lower_upper) + &self.lower_lower
    }
}

/// `Scal^K = G^{αβ} Ric^K_{αβ}`, with the index `α` of `E^α = (dx^μ, ∂_μ)`
/// matched positionally to the blocks of `G`.
pub fn scalar_k(ric: &Matrix, metric: &GeneralizedMetric) -> ScalarParts {
    let n = metric.n();
    let g = metric.matrix();
    let block = |ro: usize, co: usize, go_r: usize, go_c: usize| {
        let mut acc = RationalFunction::zero();
        for mu in 0..n {
            for nu in 0..n {
                acc = &acc + &(&ric[ro + mu][co + nu] * &g[go_r + mu][go_c + nu]);
            }
        }
        acc
    };
    ScalarParts {
        upper_upper: block(n, n, 0, 0),
        upper_lower: block(n, 0, 0, n),
        lower_upper: block(0, n, n, 0),
        lower_lower: block(0, 0, n, n),
    }
}

/// The closed form of the scalar curvature on the torsion-free family, term
/// by term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarFormula {
    /// `Scal(g, ∇^TT)`.
    pub scal_g: RationalFunction,
    /// `G_{μν}(∇_ρ V^{μρν} + V^σ_σ_ρ V^{μρν})`.
    pub v_upper: RationalFunction,
    /// `−G^{μν}(∇_μ V^σ_σ_ν + V^σ_ρ_μ V^ρ_σ_ν)`.
    pub v_lower: RationalFunction,
}

impl ScalarFormula {
    pub fn total(&self) -> RationalFunction {
        &(&self.scal_g + &self.v_upper) + &self.v_lower
    }
}

/// Evaluates the closed form with `Γ = ∇^TT`, `V^{μρν}` the `V_TTs` block and
/// `V^σ_ρ_μ` the `V_TsT` block of `c`.
pub fn scalar_formula(metric: &GeneralizedMetric, c: &GenConnection) -> Result<ScalarFormula> {
    c.check_tangent()?;
    let n = c.n();
    let gam = |mu: usize, nu: usize, rho: usize| c.block(Block::GammaTT, mu, nu, rho);
    let vu = |mu: usize, rho: usize, nu: usize| c.block(Block::VTTs, mu, rho, nu);
    let vl = |s: usize, r: usize, m: usize| c.block(Block::VTsT, s, r, m);
    let big = metric.matrix();
    let gi = metric.g_inv();

    let mut scal_g = RationalFunction::zero();
    for mu in 0..n {
        for nu in 0..n {
            if gi[mu][nu].is_zero() {
                continue;
            }
            let mut ric = RationalFunction::zero();
            for rho in 0..n {
                ric = &ric + &(&gam(mu, rho, nu).derivative(rho) - &gam(rho, rho, nu).derivative(mu));
                for s in 0..n {
                    ric = &ric + &(&(gam(rho, rho, s) * gam(mu, s, nu)) - &(gam(mu, rho, s) * gam(rho, s, nu)));
                }
            }
            scal_g = &scal_g + &(&gi[mu][nu] * &ric);
        }
    }

    // trace W_ρ = V^σ_σ_ρ
    let w: Vec<RationalFunction> = (0..n)
        .map(|rho| (0..n).fold(RationalFunction::zero(), |acc, s| &acc + vl(s, s, rho)))
        .collect();

    let mut v_upper = RationalFunction::zero();
    for mu in 0..n {
        for nu in 0..n {
            let gmn = &big[mu][nu];
            if gmn.is_zero() {
                continue;
            }
            let mut t = RationalFunction::zero();
            for rho in 0..n {
                t = &t + &vu(mu, rho, nu).derivative(rho);
                for l in 0..n {
                    t = &t + &(gam(rho, mu, l) * vu(l, rho, nu));
                    t = &t + &(gam(rho, rho, l) * vu(mu, l, nu));
                    t = &t + &(gam(rho, nu, l) * vu(mu, rho, l));
                }
                t = &t + &(&w[rho] * vu(mu, rho, nu));
            }
            v_upper = &v_upper + &(gmn * &t);
        }
    }

    let mut v_lower = RationalFunction::zero();
    for mu in 0..n {
        for nu in 0..n {
            if gi[mu][nu].is_zero() {
                continue;
            }
            let mut t = w[nu].derivative(mu);
            for l in 0..n {
                t = &t - &(gam(mu, l, nu) * &w[l]);
            }
            for s in 0..n {
                for rho in 0..n {
                    t = &t + &(vl(s, rho, mu) * vl(rho, s, nu));
                }
            }
            v_lower = &v_lower - &(&gi[mu][nu] * &t);
        }
    }
    Ok(ScalarFormula { scal_g, v_upper, v_lower })
}

/// Levi-Civita coefficients `Γ_μ^ν_ρ` of `g`.
pub fn levi_civita(g: &Matrix) -> Result<Vec<Vec<Vec<RationalFunction>>>> {
    let n = g.len();
    let gi = linalg::inverse(g)?;
    let half = Q::new(1.into(), 2.into());
    let mut out = vec![vec![vec![RationalFunction::zero(); n]; n]; n];
    for mu in 0..n {
        for nu in 0..n {
            for rho in 0..n {
                let mut acc = RationalFunction::zero();
                for l in 0..n {
                    let t = &(&g[l][mu].derivative(rho) + &g[l][rho].derivative(mu)) - &g[mu][rho].derivative(l);
                    acc = &acc + &(&gi[nu][l] * &t);
                }
                out[mu][nu][rho] = acc.scale(&half);
            }
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
    fn euclidean_metric_is_block_identity() {
        let m = GeneralizedMetric::new(linalg::identity(2), linalg::zeros(2, 2)).unwrap();
        assert_eq!(m.matrix(), &linalg::identity(4));
    }

    #[test]
    fn b_field_blocks_in_two_dimensions() {
        let b = vec![vec![rf("0"), rf("x1")], vec![rf("-x1"), rf("0")]];
        let m = GeneralizedMetric::new(linalg::identity(2), b).unwrap();
        let g = m.matrix();
        // g − B B = (1 + x1²) δ, B g⁻¹ = B, −g⁻¹B = −B
        assert_eq!(g[0][0], rf("1 + x1^2"));
        assert_eq!(g[0][1], rf("0"));
        assert_eq!(g[0][3], rf("x1"));
        assert_eq!(g[2][1], rf("-x1"));
        let h = m.h();
        assert_eq!(linalg::matmul(&h, &h), linalg::identity(4));
    }

    #[test]
    fn singular_metric_is_rejected() {
        let g = vec![vec![rf("x1"), rf("x1")], vec![rf("x1"), rf("x1")]];
        assert!(GeneralizedMetric::new(g, linalg::zeros(2, 2)).is_err());
    }

    #[test]
    fn flat_trivial_data() {
        let m = CourantModel::new(2);
        let c = GenConnection::zero_generalized(2);
        let k = fix_k_checked(&m, &c).unwrap();
        assert_eq!(k, KConnection::zero(2));
        let ric = ricci_k(&m, &c, &k).unwrap();
        assert!(ric.iter().flatten().all(RationalFunction::is_zero));
    }
}
