//! Changes of base coordinates and their induced action on graded charts.

use std::sync::Arc;

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::graded::{Chart, GradedPoly, Role};
use crate::linalg::{self, Matrix};
use crate::rational::RationalFunction;

/// A base map `x' = φ(x)` with a declared inverse `x = φ⁻¹(x')`.
#[derive(Debug, Clone)]
pub struct ChartChange {
    forward: Vec<RationalFunction>,
    inverse: Vec<RationalFunction>,
    jac: Matrix,
    jac_inv: Matrix,
}

impl ChartChange {
    /// Checks `φ∘φ⁻¹ = id = φ⁻¹∘φ` exactly and precomputes `J` and `J⁻¹`.
    pub fn new(forward: Vec<RationalFunction>, inverse: Vec<RationalFunction>) -> Result<Self> {
        let n = forward.len();
        if inverse.len() != n {
            return Err(Error::Invalid("map and inverse have different dimensions".into()));
        }
        for mu in 0..n {
            let id = RationalFunction::var(mu);
            let a = forward[mu].compose(&inverse).ok_or(Error::DivisionByZero)?;
            let b = inverse[mu].compose(&forward).ok_or(Error::DivisionByZero)?;
            if a != id || b != id {
                return Err(Error::Invalid("declared inverse does not invert the map".into()));
            }
        }
        let jac: Matrix = forward.iter().map(|f| (0..n).map(|nu| f.derivative(nu)).collect()).collect();
        let jac_inv = linalg::inverse(&jac)?;
        Ok(ChartChange { forward, inverse, jac, jac_inv })
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<_> = (0..n).map(RationalFunction::var).collect();
        Self::new(id.clone(), id).expect("identity is invertible")
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[RationalFunction] {
        &self.forward
    }

    pub fn inverse_map(&self) -> &[RationalFunction] {
        &self.inverse
    }

    /// `J^μ_ν = ∂x'^μ/∂x^ν` as functions of the old coordinates.
    pub fn jacobian(&self) -> &Matrix {
        &self.jac
    }

    pub fn jacobian_inverse(&self) -> &Matrix {
        &self.jac_inv
    }

    /// The change in the opposite direction.
    pub fn inverted(&self) -> Self {
        Self::new(self.inverse.clone(), self.forward.clone()).expect("checked on construction")
    }

    /// The vector field `φ_* d`, written in the primed coordinates of the same
    /// chart: `(φ_* d)(y') = (d(φ^* y'))∘φ⁻¹`.
    pub fn pushforward(&self, d: &Derivation) -> Result<Derivation> {
        let chart = d.chart();
        let back = self.inverted();
        let mut out = Derivation::zero(chart, d.degree());
        for v in Derivation::vars(chart) {
            let pulled = self.substitute(&GradedPoly::var(chart, v))?;
            out.set(v, back.substitute(&d.apply(&pulled)?)?)?;
        }
        Ok(out)
    }

    /// Expressions of the primed generators in terms of the unprimed ones.
    pub fn generator_images(&self, chart: &Arc<Chart>) -> Result<Vec<GradedPoly>> {
        let n = self.n();
        if chart.n() != n {
            return Err(Error::ChartMismatch);
        }
        let gen = |role: Role| -> Result<GradedPoly> {
            chart
                .find_role(role)
                .map(|i| GradedPoly::gen(chart, i))
                .ok_or_else(|| Error::Invalid(format!("chart lacks generator with role {role:?}")))
        };
        // J ψ, J^{-T} b
        let vec_like = |mu: usize, make: &dyn Fn(usize) -> Role| -> Result<GradedPoly> {
            let mut acc = GradedPoly::zero(chart);
            for nu in 0..n {
                if !self.jac[mu][nu].is_zero() {
                    acc = &acc + &gen(make(nu))?.scale(&self.jac[mu][nu]);
                }
            }
            Ok(acc)
        };
        let covec_like = |mu: usize, make: &dyn Fn(usize) -> Role| -> Result<GradedPoly> {
            let mut acc = GradedPoly::zero(chart);
            for nu in 0..n {
                if !self.jac_inv[nu][mu].is_zero() {
                    acc = &acc + &gen(make(nu))?.scale(&self.jac_inv[nu][mu]);
                }
            }
            Ok(acc)
        };
        let mut out = Vec::with_capacity(chart.len());
        for (i, g) in chart.generators().iter().enumerate() {
            out.push(match g.role {
                Role::Psi(mu) => vec_like(mu, &Role::Psi)?,
                Role::FibreVec(mu) => vec_like(mu, &Role::FibreVec)?,
                Role::B(mu) => covec_like(mu, &Role::B)?,
                Role::FibreCovec(mu) => covec_like(mu, &Role::FibreCovec)?,
                Role::P(mu) => {
                    let mut acc = covec_like(mu, &Role::P)?;
                    // − (J^{-1})^α_μ ∂_λ J^β_α ψ^λ (J^{-1})^γ_β b_γ
                    for alpha in 0..n {
                        let a = &self.jac_inv[alpha][mu];
                        if a.is_zero() {
                            continue;
                        }
                        for beta in 0..n {
                            for lambda in 0..n {
                                let dj = self.jac[beta][alpha].derivative(lambda);
                                if dj.is_zero() {
                                    continue;
                                }
                                let coeff = a * &dj;
                                for gamma in 0..n {
                                    let c = &coeff * &self.jac_inv[gamma][beta];
                                    if c.is_zero() {
                                        continue;
                                    }
                                    let t = &gen(Role::Psi(lambda))? * &gen(Role::B(gamma))?;
                                    acc = &acc - &t.scale(&c);
                                }
                            }
                        }
                    }
                    acc
                }
                Role::Plain => GradedPoly::gen(chart, i),
            });
        }
        Ok(out)
    }

    /// Pulls back a function written in primed coordinates to the unprimed
    /// chart; an algebra morphism preserving degrees.
    pub fn substitute(&self, f: &GradedPoly) -> Result<GradedPoly> {
        let chart = f.chart();
        let images = self.generator_images(chart)?;
        f.substitute(chart, Some(&self.forward), &images)
    }
}
