//! Dirac structures as `d_M`-invariant lagrangian submanifolds, the
//! obstruction tensor `φ^{KL}`, and restriction of connections.

use std::sync::Arc;

use crate::connection::{build_qe, BundleChart, GenConnection};
use crate::courant::{dorfman, CourantModel, GenSection};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::graded::{Chart, Generator, GradedPoly, Role, Var};
use crate::ktensors::{tilde_p, KConnection};
use crate::linalg::{self, Matrix};
use crate::rational::{RationalFunction, Q};

/// A rank-`n` subbundle `L ⊂ TM ⊕ T*M` in the split frame
/// `e_A = ρ^μ_A ∂_μ + ρ_{μA} dx^μ`.
#[derive(Debug, Clone)]
pub struct DiracStructure {
    n: usize,
    rho_t: Matrix,
    rho_ts: Matrix,
    phi: Vec<Vec<Vec<RationalFunction>>>,
}

impl DiracStructure {
    /// Validates isotropy `ρ^μ_A ρ_{μB} + ρ^μ_B ρ_{μA} = 0` and full rank, and
    /// fixes `φ_{μAB} = ρ^κ_A ∂_μ ρ_{κB} + ∂_μ ρ^κ_B ρ_{κA}` from the lagrangian
    /// condition.
    pub fn new(rho_t: Matrix, rho_ts: Matrix) -> Result<Self> {
        let n = rho_t.len();
        let square = |m: &Matrix| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&rho_t) || !square(&rho_ts) {
            return Err(Error::Invalid(format!("Dirac data must be two {n}×{n} matrices")));
        }
        for a in 0..n {
            for b in a..n {
                let mut s = RationalFunction::zero();
                for mu in 0..n {
                    s = &s + &(&(&rho_t[mu][a] * &rho_ts[mu][b]) + &(&rho_t[mu][b] * &rho_ts[mu][a]));
                }
                if !s.is_zero() {
                    return Err(Error::Invalid(format!(
                        "isotropy violated: ⟨e{}, e{}⟩ = {s}",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        let r = Self::stacked(&rho_t, &rho_ts);
        if linalg::det(&linalg::matmul(&linalg::transpose(&r), &r)).is_zero() {
            return Err(Error::Invalid("Dirac data does not have full rank".into()));
        }
        let mut phi = vec![vec![vec![RationalFunction::zero(); n]; n]; n];
        for (mu, plane) in phi.iter_mut().enumerate() {
            for (a, row) in plane.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    let mut s = RationalFunction::zero();
                    for k in 0..n {
                        s = &s + &(&rho_t[k][a] * &rho_ts[k][b].derivative(mu));
                        s = &s + &(&rho_t[k][b].derivative(mu) * &rho_ts[k][a]);
                    }
                    *entry = s;
                }
            }
        }
        Ok(DiracStructure { n, rho_t, rho_ts, phi })
    }

    /// `L = TM`.
    pub fn tangent(n: usize) -> Self {
        Self::new(linalg::identity(n), linalg::zeros(n, n)).expect("TM is lagrangian")
    }

    /// The graph of a bivector, `e_A = dx^A + π^{Aμ} ∂_μ`, so that
    /// `ψ^μ = π^{νμ} b_ν` on the lagrangian submanifold.
    pub fn poisson(pi: &Matrix) -> Result<Self> {
        let n = pi.len();
        for a in 0..n {
            for b in a..n {
                if pi[a][b] != -&pi[b][a] {
                    return Err(Error::Invalid("π must be antisymmetric".into()));
                }
            }
        }
        Self::new(linalg::transpose(pi), linalg::identity(n))
    }

    fn stacked(rho_t: &Matrix, rho_ts: &Matrix) -> Matrix {
        rho_t.iter().chain(rho_ts.iter()).cloned().collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ρ^μ_A`.
    pub fn rho_t(&self, mu: usize, a: usize) -> &RationalFunction {
        &self.rho_t[mu][a]
    }

    /// `ρ_{μA}`.
    pub fn rho_ts(&self, mu: usize, a: usize) -> &RationalFunction {
        &self.rho_ts[mu][a]
    }

    /// `φ_{μAB}`.
    pub fn phi(&self, mu: usize, a: usize, b: usize) -> &RationalFunction {
        &self.phi[mu][a][b]
    }

    /// The frame section `e_A`.
    pub fn frame(&self, a: usize) -> GenSection {
        GenSection {
            vector: (0..self.n).map(|mu| self.rho_t[mu][a].clone()).collect(),
            form: (0..self.n).map(|mu| self.rho_ts[mu][a].clone()).collect(),
        }
    }

    /// The chart of `L[1]` (`λ^A`, degree 1) extended by every generator of
    /// `ambient` that is not one of `ψ, b, p`, together with the images of
    /// all generators of `ambient` under the embedding.
    pub fn embedding(&self, ambient: &Arc<Chart>) -> Result<Embedding> {
        let n = self.n;
        if ambient.n() != n {
            return Err(Error::ChartMismatch);
        }
        let mut gens: Vec<Generator> = (0..n).map(|a| Generator::new(format!("lam{}", a + 1), 1, Role::Plain)).collect();
        let mut extra = Vec::new();
        for (i, g) in ambient.generators().iter().enumerate() {
            if !matches!(g.role, Role::Psi(_) | Role::B(_) | Role::P(_)) {
                extra.push((i, gens.len()));
                gens.push(g.clone());
            }
        }
        let chart = Chart::new(n, gens)?;
        let lam = |a: usize| GradedPoly::gen(&chart, a);
        let half = Q::new(1.into(), 2.into());
        let mut images = vec![GradedPoly::zero(&chart); ambient.len()];
        for mu in 0..n {
            let mut psi = GradedPoly::zero(&chart);
            let mut b = GradedPoly::zero(&chart);
            let mut p = GradedPoly::zero(&chart);
            for a in 0..n {
                psi = &psi + &lam(a).scale(&self.rho_t[mu][a]);
                b = &b + &lam(a).scale(&self.rho_ts[mu][a]);
                for bb in 0..n {
                    let c = &self.phi[mu][a][bb];
                    if !c.is_zero() {
                        p = &p + &(&lam(a) * &lam(bb)).scale(c).scale_q(&half);
                    }
                }
            }
            images[ambient.psi(mu)] = psi;
            images[ambient.b(mu)] = b;
            images[ambient.p(mu)] = p;
        }
        for (i, j) in extra {
            images[i] = GradedPoly::gen(&chart, j);
        }
        Ok(Embedding { chart, images })
    }

    /// The differential `d_L` on the chart of `emb`, obtained by requiring
    /// `φ^*(d_M F) = d_L(φ^*F)` for `F = x, ψ, b`; `Ok(None)` when no such
    /// field exists or the `p`-relations fail, i.e. `L` is not involutive.
    pub fn d_l(&self, m: &CourantModel, ambient: &Arc<Chart>, emb: &Embedding) -> Result<Option<Derivation>> {
        let n = self.n;
        let dm = m.dm_on(ambient)?;
        let chart = &emb.chart;
        let mut d = Derivation::zero(chart, 1);
        for mu in 0..n {
            d.set(Var::Base(mu), emb.images[ambient.psi(mu)].clone())?;
        }
        // ρ u = w with w = φ^*(d_M y) − (d_L ρ) λ for y = ψ^μ, b_μ
        let base_part = |coef: &RationalFunction| -> GradedPoly {
            let mut acc = GradedPoly::zero(chart);
            for nu in 0..n {
                let dc = coef.derivative(nu);
                if !dc.is_zero() {
                    acc = &acc + &emb.images[ambient.psi(nu)].scale(&dc);
                }
            }
            acc
        };
        let mut w = Vec::with_capacity(2 * n);
        for (rows, role) in [(&self.rho_t, 0usize), (&self.rho_ts, 1)] {
            for mu in 0..n {
                let g = if role == 0 { ambient.psi(mu) } else { ambient.b(mu) };
                let mut wi = emb.pullback(dm.image(Var::Gen(g)))?;
                for a in 0..n {
                    wi = &wi - &(&base_part(&rows[mu][a]) * &GradedPoly::gen(chart, a));
                }
                w.push(wi);
            }
        }
        let r = Self::stacked(&self.rho_t, &self.rho_ts);
        let rt = linalg::transpose(&r);
        let left = linalg::matmul(&linalg::inverse(&linalg::matmul(&rt, &r))?, &rt);
        for a in 0..n {
            let mut u = GradedPoly::zero(chart);
            for (i, wi) in w.iter().enumerate() {
                u = &u + &wi.scale(&left[a][i]);
            }
            d.set(Var::Gen(a), u)?;
        }
        // every relation must hold, including the ones for p
        for (i, img) in emb.images.iter().enumerate().take(ambient.len()) {
            if !matches!(ambient.generator(i).role, Role::Psi(_) | Role::B(_) | Role::P(_)) {
                continue;
            }
            if emb.pullback(dm.image(Var::Gen(i)))? != d.apply(img)? {
                return Ok(None);
            }
        }
        Ok(Some(d))
    }

    /// Whether `d_M` restricts to the lagrangian submanifold.
    pub fn check_invariance(&self, m: &CourantModel) -> Result<bool> {
        let emb = self.embedding(m.chart())?;
        Ok(self.d_l(m, m.chart(), &emb)?.is_some())
    }

    /// `φ^{KL}_{μAB} = φ_{μAB} + K_ν^κ_μ ρ^ν_A ρ_{κB} − K_ν^κ_μ ρ^ν_B ρ_{κA}`.
    pub fn phi_kl(&self, k: &KConnection) -> Vec<Vec<Vec<RationalFunction>>> {
        let n = self.n;
        let mut out = self.phi.clone();
        for (mu, plane) in out.iter_mut().enumerate() {
            for (a, row) in plane.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    for nu in 0..n {
                        for kappa in 0..n {
                            let c = k.get(nu, kappa, mu);
                            if c.is_zero() {
                                continue;
                            }
                            let t = &(&self.rho_t[nu][a] * &self.rho_ts[kappa][b])
                                - &(&self.rho_t[nu][b] * &self.rho_ts[kappa][a]);
                            *entry = &*entry + &(c * &t);
                        }
                    }
                }
            }
        }
        out
    }

    /// `ρ_{T*}([[e_A,e_B]]) + ∇^K_{ρ(e_B)} ρ_{T*}(e_A) − ∇^K_{ρ(e_A)} ρ_{T*}(e_B)`.
    pub fn phi_kl_intrinsic(&self, m: &CourantModel, k: &KConnection, a: usize, b: usize) -> Vec<RationalFunction> {
        let (ea, eb) = (self.frame(a), self.frame(b));
        let br = dorfman(&ea, &eb, m);
        let x = k.covariant_form(&eb.vector, &ea.form);
        let y = k.covariant_form(&ea.vector, &eb.form);
        (0..self.n).map(|mu| &(&br.form[mu] + &x[mu]) - &y[mu]).collect()
    }
}

/// A lagrangian embedding `L[1] → M`, extended to fibre generators.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub chart: Arc<Chart>,
    /// Image of each ambient generator.
    pub images: Vec<GradedPoly>,
}

impl Embedding {
    pub fn pullback(&self, f: &GradedPoly) -> Result<GradedPoly> {
        f.substitute(&self.chart, None, &self.images)
    }
}

/// Result of [`check_obstruction`].
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    /// `⟨V, φ^{KL}⟩^α_{βAB} = V^{μα}_β φ^{KL}_{μAB}`, indexed `[α][β][A][B]`.
    pub pairing: Vec<Vec<Vec<Vec<RationalFunction>>>>,
    pub phi_kl_vanishes: bool,
    pub curvature_unobstructed: bool,
    /// Cross-check: the restricted K-curvature equals the restricted `Q_E²`.
    pub curvature_restricts: bool,
    /// Cross-check for `E = TM ⊕ T*M`: restricted K-torsion equals the
    /// restricted `Q_E(τ_M)`; `None` for other bundles.
    pub torsion_restricts: Option<bool>,
}

pub fn check_obstruction(
    l: &DiracStructure,
    m: &CourantModel,
    c: &GenConnection,
    k: &KConnection,
) -> Result<ObstructionReport> {
    let n = l.n();
    let r = c.rank();
    let phikl = l.phi_kl(k);
    let mut pairing = vec![vec![vec![vec![RationalFunction::zero(); n]; n]; r]; r];
    for (alpha, by_beta) in pairing.iter_mut().enumerate() {
        for (beta, by_a) in by_beta.iter_mut().enumerate() {
            for (a, row) in by_a.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    for (mu, plane) in phikl.iter().enumerate() {
                        *entry = &*entry + &(c.v(mu, alpha, beta) * &plane[a][b]);
                    }
                }
            }
        }
    }
    let phi_kl_vanishes = phikl.iter().flatten().flatten().all(RationalFunction::is_zero);
    let curvature_unobstructed = pairing.iter().flatten().flatten().flatten().all(RationalFunction::is_zero);

    let bundle = BundleChart::general(n, r, 0);
    let emb = l.embedding(bundle.chart())?;
    let sq = build_qe(m, c, &bundle)?.square()?;
    let pt = tilde_p(k, bundle.chart());
    let mut curvature_restricts = true;
    for beta in 0..r {
        let full = sq.image(Var::Gen(bundle.s(beta)));
        let coeffs = bundle.fibre_coefficients(full)?;
        let mut kpart = GradedPoly::zero(bundle.chart());
        for (alpha, f) in coeffs.iter().enumerate() {
            let mut g = f.clone();
            for (mu, p) in pt.iter().enumerate() {
                g = &g - &p.scale(c.v(mu, alpha, beta));
            }
            kpart = &kpart + &(&g * &bundle.s_poly(alpha));
        }
        if emb.pullback(&kpart)? != emb.pullback(full)? {
            curvature_restricts = false;
        }
    }

    let torsion_restricts = if c.is_generalized_tangent() {
        let tb = BundleChart::generalized_tangent(n, -1);
        let emb = l.embedding(tb.chart())?;
        let full = build_qe(m, c, &tb)?.apply(&tb.tautological())?;
        let pt = tilde_p(k, tb.chart());
        let mut kt = full.clone();
        for (mu, p) in pt.iter().enumerate() {
            kt = &kt - &(p * &tb.s_poly(n + mu));
        }
        Some(emb.pullback(&kt)? == emb.pullback(&full)?)
    } else {
        None
    };
    Ok(ObstructionReport { pairing, phi_kl_vanishes, curvature_unobstructed, curvature_restricts, torsion_restricts })
}

/// The restriction of `Q_E` to `E|_L` over `(L[1], d_L)`.
#[derive(Debug, Clone)]
pub struct RestrictedConnection {
    pub embedding: Embedding,
    pub d_l: Derivation,
    pub q: Derivation,
}

/// Restricts `Q_E` along the embedding of `L`; fails when `d_M` does not
/// restrict or `Q_E` does not map fibre coordinates into the restricted
/// fibre-linear functions.
pub fn restrict_connection(
    l: &DiracStructure,
    m: &CourantModel,
    c: &GenConnection,
    bundle: &BundleChart,
) -> Result<RestrictedConnection> {
    let emb = l.embedding(bundle.chart())?;
    let d_l = l
        .d_l(m, bundle.chart(), &emb)?
        .ok_or_else(|| Error::Mismatch("d_M does not restrict: L is not involutive".into()))?;
    let qe = build_qe(m, c, bundle)?;
    let mut q = Derivation::zero(&emb.chart, 1);
    for mu in 0..l.n() {
        q.set(Var::Base(mu), emb.pullback(qe.image(Var::Base(mu)))?)?;
    }
    for a in 0..l.n() {
        q.set(Var::Gen(a), d_l.image(Var::Gen(a)).clone())?;
    }
    for alpha in 0..bundle.rank() {
        let idx = bundle.s(alpha);
        let target = emb.images[idx].clone();
        let j = (0..emb.chart.len())
            .find(|&j| GradedPoly::gen(&emb.chart, j) == target)
            .ok_or_else(|| Error::Mismatch("fibre generator is not carried to the restriction".into()))?;
        q.set(Var::Gen(j), emb.pullback(qe.image(Var::Gen(idx)))?)?;
    }
    Ok(RestrictedConnection { embedding: emb, d_l, q })
}
