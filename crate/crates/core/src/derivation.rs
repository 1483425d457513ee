//! Graded vector fields stored by their images on the chart variables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{Chart, GradedPoly, Var};

#[derive(Clone, PartialEq, Eq)]
pub struct Derivation {
    chart: Arc<Chart>,
    degree: i32,
    base: Vec<GradedPoly>,
    gens: Vec<GradedPoly>,
}

impl Derivation {
    pub fn zero(chart: &Arc<Chart>, degree: i32) -> Self {
        Derivation {
            chart: chart.clone(),
            degree,
            base: vec![GradedPoly::zero(chart); chart.n()],
            gens: vec![GradedPoly::zero(chart); chart.len()],
        }
    }

    /// Builds `Σ f_v ∂/∂v`; every `f_v` must be zero or homogeneous of
    /// degree `deg(v) + degree`.
    pub fn new(chart: &Arc<Chart>, degree: i32, images: Vec<(Var, GradedPoly)>) -> Result<Self> {
        let mut d = Self::zero(chart, degree);
        for (v, f) in images {
            d.set(v, f)?;
        }
        Ok(d)
    }

    /// Overwrites the image of `v`, checking its degree.
    pub fn set(&mut self, v: Var, f: GradedPoly) -> Result<()> {
        if f.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let want = self.chart.var_degree(v) + self.degree;
        if !f.is_zero() && f.degree() != Some(want) {
            return Err(Error::Invalid(format!(
                "image of {} must be homogeneous of degree {want}, got {f}",
                self.chart.var_name(v)
            )));
        }
        match v {
            Var::Base(m) => self.base[m] = f,
            Var::Gen(i) => self.gens[i] = f,
        }
        Ok(())
    }

    /// The left partial derivative `∂/∂v` as a derivation.
    pub fn basis(chart: &Arc<Chart>, v: Var) -> Self {
        let mut d = Self::zero(chart, -chart.var_degree(v));
        let one = GradedPoly::one(chart);
        match v {
            Var::Base(m) => d.base[m] = one,
            Var::Gen(i) => d.gens[i] = one,
        }
        d
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }

    pub fn image(&self, v: Var) -> &GradedPoly {
        match v {
            Var::Base(m) => &self.base[m],
            Var::Gen(i) => &self.gens[i],
        }
    }

    /// All chart variables, base coordinates first.
    pub fn vars(chart: &Chart) -> impl Iterator<Item = Var> {
        (0..chart.n()).map(Var::Base).chain((0..chart.len()).map(Var::Gen))
    }

    pub fn is_zero(&self) -> bool {
        self.base.iter().chain(&self.gens).all(GradedPoly::is_zero)
    }

    /// Applies the derivation with the graded Leibniz rule.
    pub fn apply(&self, f: &GradedPoly) -> Result<GradedPoly> {
        if f.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let chart = &self.chart;
        let odd_self = self.is_odd();
        let mut out = GradedPoly::zero(chart);
        for (m, c) in f.terms() {
            let mono = GradedPoly::term(chart, crate::RationalFunction::one(), m.clone());
            // coefficient part: Σ_μ ∂_μ c · X(x^μ) · m
            for (mu, img) in self.base.iter().enumerate() {
                if img.is_zero() {
                    continue;
                }
                let dc = c.derivative(mu);
                if dc.is_zero() {
                    continue;
                }
                out = &out + &(&img.scale(&dc) * &mono);
            }
            // generator part, walking the canonical word left to right
            let mut prefix_deg = 0i32;
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let gi = chart.generator(i);
                let img = &self.gens[i];
                if !img.is_zero() {
                    let mut pre = vec![0u16; m.len()];
                    pre[..i].copy_from_slice(&m[..i]);
                    pre[i] = e - 1;
                    let mut post = vec![0u16; m.len()];
                    post[i + 1..].copy_from_slice(&m[i + 1..]);
                    let pre = GradedPoly::term(chart, c.clone(), pre);
                    let post = GradedPoly::term(chart, crate::RationalFunction::one(), post);
                    let mut t = &(&pre * img) * &post;
                    if !gi.is_odd() && e > 1 {
                        t = t.scale(&crate::RationalFunction::from_int(e as i64));
                    }
                    if odd_self && prefix_deg.rem_euclid(2) == 1 {
                        t = -t;
                    }
                    out = &out + &t;
                }
                prefix_deg += gi.degree * e as i32;
            }
        }
        Ok(out)
    }

    /// Graded commutator `[X, Y] = X∘Y − (−1)^{|X||Y|} Y∘X`.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation> {
        if other.chart != self.chart {
            return Err(Error::ChartMismatch);
        }
        let sign_neg = !(self.is_odd() && other.is_odd());
        let mut out = Derivation::zero(&self.chart, self.degree + other.degree);
        for v in Self::vars(&self.chart) {
            let xy = self.apply(other.image(v))?;
            let yx = other.apply(self.image(v))?;
            let img = if sign_neg { &xy - &yx } else { &xy + &yx };
            out.set(v, img)?;
        }
        Ok(out)
    }

    /// `X∘X = ½[X, X]` for odd `X`.
    pub fn square(&self) -> Result<Derivation> {
        if !self.is_odd() {
            return Err(Error::Invalid("square requires an odd derivation".into()));
        }
        let mut out = Derivation::zero(&self.chart, 2 * self.degree);
        for v in Self::vars(&self.chart) {
            out.set(v, self.apply(self.image(v))?)?;
        }
        Ok(out)
    }

    /// Left multiplication `(f X)(g) = f · X(g)` by a homogeneous function.
    pub fn left_mul(&self, f: &GradedPoly) -> Result<Derivation> {
        let df = match f.degree() {
            Some(d) => d,
            None if f.is_zero() => 0,
            None => return Err(Error::Invalid("left_mul requires a homogeneous function".into())),
        };
        let mut out = Derivation::zero(&self.chart, self.degree + df);
        for v in Self::vars(&self.chart) {
            out.set(v, f.checked_mul(self.image(v))?)?;
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Derivation) -> Result<Derivation> {
        if other.chart != self.chart {
            return Err(Error::ChartMismatch);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(Error::Invalid("sum of derivations of different degrees".into()));
        }
        let mut out = self.clone();
        for v in Self::vars(&self.chart) {
            out.set(v, self.image(v) + other.image(v))?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Derivation {
        let mut out = self.clone();
        for f in out.base.iter_mut().chain(out.gens.iter_mut()) {
            *f = -&*f;
        }
        out
    }

    /// True iff every variable in `vars` is sent to zero.
    pub fn is_vertical(&self, vars: &[Var]) -> bool {
        vars.iter().all(|&v| self.image(v).is_zero())
    }

    /// True iff the images of the `kept` generators involve only `kept`
    /// generators.
    pub fn is_projectable(&self, kept: &[usize]) -> bool {
        let mut keep = vec![false; self.chart.len()];
        for &i in kept {
            keep[i] = true;
        }
        kept.iter().all(|&i| {
            self.gens[i]
                .terms()
                .all(|(m, _)| m.iter().enumerate().all(|(j, &e)| e == 0 || keep[j]))
        })
    }

    /// First variable (in chart order) on which two derivations differ.
    pub fn first_difference(&self, other: &Derivation) -> Option<(String, GradedPoly)> {
        Self::vars(&self.chart).find_map(|v| {
            let d = self.image(v) - other.image(v);
            (!d.is_zero()).then(|| (self.chart.var_name(v), d))
        })
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in Self::vars(&self.chart) {
            let img = self.image(v);
            if img.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({img})*d/d{}", self.chart.var_name(v))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation[deg {}]({self})", self.degree)
    }
}
