//! The symplectic NQ-manifold `T*[2]T[1]M` and the exact Courant algebroid
//! `TM ⊕ T*M` twisted by a three-form `H`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::graded::{Chart, GradedPoly, Var};
use crate::rational::RationalFunction;

/// Sign of the permutation sorting three distinct indices, with the sorted triple.
pub fn sort3(i: usize, j: usize, k: usize) -> Option<([usize; 3], bool)> {
    if i == j || j == k || i == k {
        return None;
    }
    let mut v = [i, j, k];
    let mut neg = false;
    for a in 0..2 {
        for b in 0..2 - a {
            if v[b] > v[b + 1] {
                v.swap(b, b + 1);
                neg = !neg;
            }
        }
    }
    Some((v, neg))
}

/// Dimension plus the components `H_{μνρ}` stored for `μ < ν < ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourantModel {
    n: usize,
    h: BTreeMap<[usize; 3], RationalFunction>,
    chart: Arc<Chart>,
}

impl CourantModel {
    pub fn new(n: usize) -> Self {
        CourantModel { n, h: BTreeMap::new(), chart: Chart::courant(n) }
    }

    /// Sets `H_{ijk}` (zero-based indices, any order; antisymmetry applied).
    pub fn set_h(&mut self, i: usize, j: usize, k: usize, value: RationalFunction) -> Result<()> {
        if i.max(j).max(k) >= self.n {
            return Err(Error::Invalid(format!("H index out of range for n = {}", self.n)));
        }
        let (key, neg) =
            sort3(i, j, k).ok_or_else(|| Error::Invalid("H needs three distinct indices".into()))?;
        let value = if neg { -value } else { value };
        if value.is_zero() {
            self.h.remove(&key);
        } else {
            self.h.insert(key, value);
        }
        Ok(())
    }

    pub fn with_h(mut self, i: usize, j: usize, k: usize, value: RationalFunction) -> Result<Self> {
        self.set_h(i, j, k, value)?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// Stored components, strictly increasing index triples.
    pub fn h_components(&self) -> &BTreeMap<[usize; 3], RationalFunction> {
        &self.h
    }

    pub fn h_is_zero(&self) -> bool {
        self.h.is_empty()
    }

    /// `H_{ijk}` for arbitrary indices.
    pub fn h(&self, i: usize, j: usize, k: usize) -> RationalFunction {
        match sort3(i, j, k) {
            Some((key, neg)) => {
                let v = self.h.get(&key).cloned().unwrap_or_default();
                if neg {
                    -v
                } else {
                    v
                }
            }
            None => RationalFunction::zero(),
        }
    }

    /// Components of `dH` for strictly increasing quadruples.
    pub fn dh(&self) -> BTreeMap<[usize; 4], RationalFunction> {
        let n = self.n;
        let mut out = BTreeMap::new();
        for k in 0..n {
            for m in k + 1..n {
                for v in m + 1..n {
                    for r in v + 1..n {
                        let val = &(&(&self.h(m, v, r).derivative(k) - &self.h(k, v, r).derivative(m))
                            + &self.h(k, m, r).derivative(v))
                            - &self.h(k, m, v).derivative(r);
                        if !val.is_zero() {
                            out.insert([k, m, v, r], val);
                        }
                    }
                }
            }
        }
        out
    }

    /// `ψ^{i}ψ^{j}ψ^{k}` on a chart containing the Courant generators.
    fn psi3(chart: &Arc<Chart>, i: usize, j: usize, k: usize) -> GradedPoly {
        &(&GradedPoly::gen(chart, chart.psi(i)) * &GradedPoly::gen(chart, chart.psi(j)))
            * &GradedPoly::gen(chart, chart.psi(k))
    }

    /// `Θ = ψ^μ p_μ + (1/3!) H_{μνρ} ψ^μψ^νψ^ρ`.
    pub fn theta(&self) -> GradedPoly {
        let c = &self.chart;
        let mut theta = GradedPoly::zero(c);
        for mu in 0..self.n {
            theta = &theta + &(&GradedPoly::gen(c, c.psi(mu)) * &GradedPoly::gen(c, c.p(mu)));
        }
        for (&[i, j, k], v) in &self.h {
            theta = &theta + &Self::psi3(c, i, j, k).scale(v);
        }
        theta
    }

    /// `d_M` on the Courant chart.
    pub fn dm(&self) -> Derivation {
        self.dm_on(&self.chart).expect("own chart")
    }

    /// `d_M` on a chart extending the Courant chart; other generators are sent to zero.
    pub fn dm_on(&self, chart: &Arc<Chart>) -> Result<Derivation> {
        if chart.n() != self.n {
            return Err(Error::ChartMismatch);
        }
        let n = self.n;
        let mut d = Derivation::zero(chart, 1);
        for mu in 0..n {
            d.set(Var::Base(mu), GradedPoly::gen(chart, chart.psi(mu)))?;
            // b_μ ↦ p_μ + ½ H_{μνρ} ψ^ν ψ^ρ
            let mut img = GradedPoly::gen(chart, chart.p(mu));
            for nu in 0..n {
                for rho in nu + 1..n {
                    let h = self.h(mu, nu, rho);
                    if !h.is_zero() {
                        let pp = &GradedPoly::gen(chart, chart.psi(nu)) * &GradedPoly::gen(chart, chart.psi(rho));
                        img = &img + &pp.scale(&h);
                    }
                }
            }
            d.set(Var::Gen(chart.b(mu)), img)?;
            // p_κ ↦ −(1/3!) ∂_κ H_{μνρ} ψ^μψ^νψ^ρ
            let mut img = GradedPoly::zero(chart);
            for (&[i, j, k], h) in &self.h {
                let dh = h.derivative(mu);
                if !dh.is_zero() {
                    img = &img - &Self::psi3(chart, i, j, k).scale(&dh);
                }
            }
            d.set(Var::Gen(chart.p(mu)), img)?;
        }
        Ok(d)
    }

    /// Checks the master equation against `dH`, computing both independently.
    pub fn check_master(&self) -> MasterReport {
        let theta = self.theta();
        let bracket = poisson_bracket(&theta, &theta).expect("Courant chart");
        let dh = self.dh();
        let consistent = bracket.is_zero() == dh.is_empty();
        MasterReport { bracket, dh, consistent }
    }
}

#[derive(Debug, Clone)]
pub struct MasterReport {
    /// `{Θ, Θ}`.
    pub bracket: GradedPoly,
    /// Nonzero components of `dH`.
    pub dh: BTreeMap<[usize; 4], RationalFunction>,
    /// Whether `{Θ,Θ} = 0` exactly when `dH = 0`.
    pub consistent: bool,
}

/// Hamiltonian vector field of `f` for `ω = dx^μ dp_μ + dψ^μ db_μ`, with
/// left derivatives. For homogeneous `f`:
/// `X_f = ∂_{p_μ}f ∂_{x^μ} − ∂_{x^μ}f ∂_{p_μ} + (−1)^{|f|+1}(∂_{b_μ}f ∂_{ψ^μ} + ∂_{ψ^μ}f ∂_{b_μ})`.
/// Inhomogeneous `f` is handled component by component.
pub fn hamiltonian_vf(f: &GradedPoly) -> Result<Vec<Derivation>> {
    let chart = f.chart();
    let n = chart.n();
    let mut out = Vec::new();
    for d in f.degrees() {
        let fd = f.homogeneous(d);
        let sign_odd = d.rem_euclid(2) == 0; // (−1)^{d+1} = −1 when d even
        let mut x = Derivation::zero(chart, d - 2);
        for mu in 0..n {
            let (psi, b, p) = (Var::Gen(chart.psi(mu)), Var::Gen(chart.b(mu)), Var::Gen(chart.p(mu)));
            x.set(Var::Base(mu), fd.partial(p))?;
            x.set(p, -&fd.partial(Var::Base(mu)))?;
            let (db, dpsi) = (fd.partial(b), fd.partial(psi));
            if sign_odd {
                x.set(psi, -&db)?;
                x.set(b, -&dpsi)?;
            } else {
                x.set(psi, db)?;
                x.set(b, dpsi)?;
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// The Poisson bracket `{f, g} = X_f(g)`, of degree −2.
pub fn poisson_bracket(f: &GradedPoly, g: &GradedPoly) -> Result<GradedPoly> {
    let mut acc = GradedPoly::zero(g.chart());
    for x in hamiltonian_vf(f)? {
        acc = acc.checked_add(&x.apply(g)?)?;
    }
    Ok(acc)
}

/// Section `a^μ ∂_μ + a_μ dx^μ` of `TM ⊕ T*M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSection {
    pub vector: Vec<RationalFunction>,
    pub form: Vec<RationalFunction>,
}

impl GenSection {
    pub fn zero(n: usize) -> Self {
        GenSection { vector: vec![RationalFunction::zero(); n], form: vec![RationalFunction::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.vector.len()
    }

    /// `∂_μ`.
    pub fn coordinate_vector(n: usize, mu: usize) -> Self {
        let mut s = Self::zero(n);
        s.vector[mu] = RationalFunction::one();
        s
    }

    /// `dx^μ`.
    pub fn coordinate_form(n: usize, mu: usize) -> Self {
        let mut s = Self::zero(n);
        s.form[mu] = RationalFunction::one();
        s
    }

    /// Frame element `E_α`: `∂_α` for `α < n`, `dx^{α−n}` otherwise.
    pub fn frame(n: usize, alpha: usize) -> Self {
        if alpha < n {
            Self::coordinate_vector(n, alpha)
        } else {
            Self::coordinate_form(n, alpha - n)
        }
    }

    /// Components as one vector of length `2n` (vector part first).
    pub fn components(&self) -> Vec<RationalFunction> {
        self.vector.iter().chain(&self.form).cloned().collect()
    }

    pub fn from_components(c: &[RationalFunction]) -> Self {
        let n = c.len() / 2;
        GenSection { vector: c[..n].to_vec(), form: c[n..].to_vec() }
    }

    pub fn scale(&self, f: &RationalFunction) -> Self {
        GenSection {
            vector: self.vector.iter().map(|v| v * f).collect(),
            form: self.form.iter().map(|v| v * f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        GenSection {
            vector: self.vector.iter().zip(&o.vector).map(|(a, b)| a + b).collect(),
            form: self.form.iter().zip(&o.form).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&RationalFunction::from_int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        self.vector.iter().chain(&self.form).all(RationalFunction::is_zero)
    }

    /// The anchor: the vector part.
    pub fn anchor(&self) -> Vec<RationalFunction> {
        self.vector.clone()
    }

    /// `ρ(a) f = a^μ ∂_μ f`.
    pub fn act(&self, f: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for (mu, a) in self.vector.iter().enumerate() {
            if !a.is_zero() {
                acc = &acc + &(a * &f.derivative(mu));
            }
        }
        acc
    }

    /// The pure one-form `df`.
    pub fn differential(n: usize, f: &RationalFunction) -> Self {
        GenSection { vector: vec![RationalFunction::zero(); n], form: (0..n).map(|mu| f.derivative(mu)).collect() }
    }
}

/// `⟨X+ξ, Y+ν⟩ = ν(X) + ξ(Y)`.
pub fn pairing(a: &GenSection, b: &GenSection) -> RationalFunction {
    let mut acc = RationalFunction::zero();
    for mu in 0..a.n() {
        acc = &acc + &(&(&a.vector[mu] * &b.form[mu]) + &(&a.form[mu] * &b.vector[mu]));
    }
    acc
}

/// Lie bracket of vector fields.
pub fn lie_bracket(x: &[RationalFunction], y: &[RationalFunction]) -> Vec<RationalFunction> {
    let n = x.len();
    (0..n)
        .map(|nu| {
            let mut acc = RationalFunction::zero();
            for mu in 0..n {
                acc = &acc + &(&(&x[mu] * &y[nu].derivative(mu)) - &(&y[mu] * &x[nu].derivative(mu)));
            }
            acc
        })
        .collect()
}

/// The twisted Dorfman bracket `[[X+ξ, Y+ν]]^H = L_X(Y+ν) − ι_Y dξ + ι_Y ι_X H`.
pub fn dorfman(a: &GenSection, b: &GenSection, m: &CourantModel) -> GenSection {
    let n = a.n();
    let (x, xi) = (&a.vector, &a.form);
    let (y, nu) = (&b.vector, &b.form);
    let vector = lie_bracket(x, y);
    let form = (0..n)
        .map(|mu| {
            let mut acc = RationalFunction::zero();
            for l in 0..n {
                // (L_X ν)_μ
                acc = &acc + &(&x[l] * &nu[mu].derivative(l));
                acc = &acc + &(&nu[l] * &x[l].derivative(mu));
                // −(ι_Y dξ)_μ
                acc = &acc - &(&y[l] * &(&xi[mu].derivative(l) - &xi[l].derivative(mu)));
                // H(X, Y, ∂_μ)
                for r in 0..n {
                    let h = m.h(r, l, mu);
                    if !h.is_zero() {
                        acc = &acc + &(&(&x[r] * &y[l]) * &h);
                    }
                }
            }
            acc
        })
        .collect();
    GenSection { vector, form }
}

/// `[[a,b]]_sk = ½([[a,b]] − [[b,a]])`.
pub fn dorfman_skew(a: &GenSection, b: &GenSection, m: &CourantModel) -> GenSection {
    dorfman(a, b, m).sub(&dorfman(b, a, m)).scale(&RationalFunction::from_q(crate::rational::Q::new(1.into(), 2.into())))
}
