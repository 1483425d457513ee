//! Graded-commutative polynomial algebras over the field of rational
//! functions in the base coordinates.
//!
//! A [`Chart`] lists the positive- and negative-degree generators in their
//! canonical order; the base coordinates `x1..xn` (degree 0) are the
//! variables of the [`RationalFunction`] coefficients. A monomial is stored
//! as an exponent vector over the chart generators and is read as the
//! ordered product `g_1^{e_1} g_2^{e_2} ...`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::parse::{parse_expr, split_ident, Expr};
use crate::rational::{Poly, RationalFunction, Q};

/// How a generator transforms under a change of base coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// `ψ^μ`, transforms as `ψ' = J ψ`.
    Psi(usize),
    /// `b_μ`, transforms as `b' = J^{-T} b`.
    B(usize),
    /// `p_μ`, transforms with the inhomogeneous rule.
    P(usize),
    /// Fibre coordinate paired with a vector index, transforms like `ψ`.
    FibreVec(usize),
    /// Fibre coordinate paired with a covector index, transforms like `b`.
    FibreCovec(usize),
    /// Any other generator, left untouched by chart changes.
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
    pub role: Role,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32, role: Role) -> Self {
        Generator { name: name.into(), degree, role }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// Base dimension plus the ordered list of graded generators.
#[derive(Debug, Clone)]
pub struct Chart {
    n: usize,
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.gens == other.gens
    }
}

impl Eq for Chart {}

impl Chart {
    pub fn new(n: usize, gens: Vec<Generator>) -> Result<Arc<Chart>> {
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            let clash = split_ident(&g.name).is_some_and(|(h, _)| h == "x");
            if clash || index.insert(g.name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate or reserved generator name `{}`", g.name)));
            }
        }
        Ok(Arc::new(Chart { n, gens, index }))
    }

    /// The generators `ψ^μ, b_μ, p_μ` of the Courant chart, in canonical order.
    pub fn courant_generators(n: usize) -> Vec<Generator> {
        let mut gens = Vec::with_capacity(3 * n);
        gens.extend((0..n).map(|m| Generator::new(format!("psi{}", m + 1), 1, Role::Psi(m))));
        gens.extend((0..n).map(|m| Generator::new(format!("b{}", m + 1), 1, Role::B(m))));
        gens.extend((0..n).map(|m| Generator::new(format!("p{}", m + 1), 2, Role::P(m))));
        gens
    }

    /// The chart of `T*[2]T[1]M` with coordinates `x, ψ, b, p`.
    pub fn courant(n: usize) -> Arc<Chart> {
        Chart::new(n, Self::courant_generators(n)).expect("distinct names")
    }

    /// The Courant chart extended by fibre coordinates, appended last.
    pub fn courant_with_fibre(n: usize, fibre: Vec<Generator>) -> Result<Arc<Chart>> {
        let mut gens = Self::courant_generators(n);
        gens.extend(fibre);
        Chart::new(n, gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn find_role(&self, role: Role) -> Option<usize> {
        self.gens.iter().position(|g| g.role == role)
    }

    pub fn psi(&self, mu: usize) -> usize {
        self.find_role(Role::Psi(mu)).expect("chart has ψ")
    }

    pub fn b(&self, mu: usize) -> usize {
        self.find_role(Role::B(mu)).expect("chart has b")
    }

    pub fn p(&self, mu: usize) -> usize {
        self.find_role(Role::P(mu)).expect("chart has p")
    }

    /// Resolves a variable name: `x<i>` or a generator name.
    pub fn var(&self, name: &str) -> Result<Var> {
        if let Some(i) = self.find(name) {
            return Ok(Var::Gen(i));
        }
        match split_ident(name) {
            Some(("x", i)) if i <= self.n => Ok(Var::Base(i - 1)),
            _ => Err(Error::UnknownGenerator(name.to_string())),
        }
    }

    pub fn var_name(&self, v: Var) -> String {
        match v {
            Var::Base(m) => format!("x{}", m + 1),
            Var::Gen(i) => self.gens[i].name.clone(),
        }
    }

    pub fn var_degree(&self, v: Var) -> i32 {
        match v {
            Var::Base(_) => 0,
            Var::Gen(i) => self.gens[i].degree,
        }
    }
}

/// A coordinate of a chart: base coordinate or graded generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Base(usize),
    Gen(usize),
}

/// Exponent vector over the chart generators.
pub type Mono = Vec<u16>;

/// Sign of `a·b` brought to canonical order, or `None` if an odd generator repeats.
fn product(chart: &Chart, a: &[u16], b: &[u16]) -> Option<(Mono, bool)> {
    let mut out = Vec::with_capacity(a.len());
    let mut odd_in_a_after = 0usize;
    let mut negative = false;
    // walk from the right so that `odd_in_a_after` counts odd a-factors beyond j
    for j in (0..a.len()).rev() {
        let odd = chart.gens[j].is_odd();
        if odd && b[j] > 0 {
            if a[j] > 0 {
                return None;
            }
            if odd_in_a_after % 2 == 1 {
                negative = !negative;
            }
        }
        if odd && a[j] > 0 {
            odd_in_a_after += 1;
        }
    }
    for j in 0..a.len() {
        out.push(a[j] + b[j]);
    }
    Some((out, negative))
}

/// Element of the graded-commutative algebra of a chart.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedPoly {
    chart: Arc<Chart>,
    terms: BTreeMap<Mono, RationalFunction>,
}

impl GradedPoly {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        GradedPoly { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(chart: &Arc<Chart>, c: RationalFunction) -> Self {
        Self::term(chart, c, vec![0; chart.len()])
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::scalar(chart, RationalFunction::one())
    }

    pub fn from_int(chart: &Arc<Chart>, c: i64) -> Self {
        Self::scalar(chart, RationalFunction::from_int(c))
    }

    /// A single term `c · m`; `m` must already be a valid exponent vector.
    pub fn term(chart: &Arc<Chart>, c: RationalFunction, m: Mono) -> Self {
        debug_assert_eq!(m.len(), chart.len());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedPoly { chart: chart.clone(), terms }
    }

    /// The generator with chart index `i`.
    pub fn gen(chart: &Arc<Chart>, i: usize) -> Self {
        let mut m = vec![0; chart.len()];
        m[i] = 1;
        Self::term(chart, RationalFunction::one(), m)
    }

    pub fn var(chart: &Arc<Chart>, v: Var) -> Self {
        match v {
            Var::Base(mu) => Self::scalar(chart, RationalFunction::var(mu)),
            Var::Gen(i) => Self::gen(chart, i),
        }
    }

    /// Looks up a variable by name.
    pub fn named(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        Ok(Self::var(chart, chart.var(name)?))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Mono) -> RationalFunction {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The degree-0 scalar part.
    pub fn scalar_part(&self) -> RationalFunction {
        self.coefficient(&vec![0; self.chart.len()])
    }

    pub fn mono_degree(&self, m: &[u16]) -> i32 {
        m.iter().zip(&self.chart.gens).map(|(&e, g)| e as i32 * g.degree).sum()
    }

    /// The common degree of all terms, `None` if inhomogeneous or zero.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|m| self.mono_degree(m));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Parity of a homogeneous element (zero counts as even).
    pub fn is_odd(&self) -> bool {
        self.degree().is_some_and(|d| d.rem_euclid(2) == 1)
    }

    /// The component of degree `d`.
    pub fn homogeneous(&self, d: i32) -> Self {
        GradedPoly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.mono_degree(m) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Distinct degrees present, ascending.
    pub fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> = self.terms.keys().map(|m| self.mono_degree(m)).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        GradedPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    fn add_term(&mut self, m: Mono, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn same_chart(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.chart, &other.chart) || self.chart == other.chart
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !self.same_chart(other) {
            return Err(Error::ChartMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if !self.same_chart(other) {
            return Err(Error::ChartMismatch);
        }
        let mut out = GradedPoly::zero(&self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = product(&self.chart, ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        if c.is_zero() {
            return GradedPoly::zero(&self.chart);
        }
        GradedPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        self.scale(&RationalFunction::from_q(c.clone()))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = GradedPoly::one(&self.chart);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&RationalFunction) -> RationalFunction) -> Self {
        let mut out = GradedPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Left partial derivative with respect to a chart variable.
    pub fn partial(&self, v: Var) -> Self {
        match v {
            Var::Base(mu) => self.map_coefficients(|c| c.derivative(mu)),
            Var::Gen(i) => {
                let odd = self.chart.gens[i].is_odd();
                let mut out = GradedPoly::zero(&self.chart);
                for (m, c) in &self.terms {
                    let e = m[i];
                    if e == 0 {
                        continue;
                    }
                    let mut nm = m.clone();
                    nm[i] -= 1;
                    let c = if odd {
                        let before = (0..i).filter(|&j| m[j] > 0 && self.chart.gens[j].is_odd()).count();
                        if before % 2 == 1 {
                            -c
                        } else {
                            c.clone()
                        }
                    } else {
                        c.scale(&Q::from_integer(e.into()))
                    };
                    out.add_term(nm, c);
                }
                out
            }
        }
    }

    /// Left partial derivative by generator name.
    pub fn partial_named(&self, name: &str) -> Result<Self> {
        Ok(self.partial(self.chart.var(name)?))
    }

    /// Algebra morphism into `target`: base coordinates go to `base` (if
    /// given) and generator `i` goes to `gens[i]`. Fails only if a
    /// coefficient denominator vanishes under the base substitution.
    pub fn substitute(
        &self,
        target: &Arc<Chart>,
        base: Option<&[RationalFunction]>,
        gens: &[GradedPoly],
    ) -> Result<Self> {
        assert_eq!(gens.len(), self.chart.len(), "one image per generator");
        let mut out = GradedPoly::zero(target);
        let mut powers: HashMap<(usize, u16), GradedPoly> = HashMap::new();
        for (m, c) in &self.terms {
            let c = match base {
                Some(b) => c.compose(b).ok_or(Error::DivisionByZero)?,
                None => c.clone(),
            };
            let mut t = GradedPoly::scalar(target, c);
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| gens[i].pow(e as u32));
                t = t.checked_mul(p)?;
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    /// Re-embeds into a chart whose generator list extends this one's by
    /// appending (or equals it).
    pub fn embed(&self, target: &Arc<Chart>) -> Result<Self> {
        let k = self.chart.len();
        if target.n != self.chart.n || target.gens.len() < k || target.gens[..k] != self.chart.gens[..] {
            return Err(Error::ChartMismatch);
        }
        let mut out = GradedPoly::zero(target);
        for (m, c) in &self.terms {
            let mut nm = m.clone();
            nm.resize(target.len(), 0);
            out.terms.insert(nm, c.clone());
        }
        Ok(out)
    }

    /// Parses a graded expression over this chart. Division is allowed only
    /// by degree-0 scalar subexpressions.
    pub fn parse(chart: &Arc<Chart>, text: &str) -> Result<Self> {
        eval_graded(chart, &parse_expr(text)?)
    }
}

fn eval_graded(chart: &Arc<Chart>, e: &Expr) -> Result<GradedPoly> {
    Ok(match e {
        Expr::Int(v) => GradedPoly::scalar(chart, RationalFunction::from_poly(Poly::constant(v.clone().into()))),
        Expr::Ident { name, pos } => GradedPoly::named(chart, name)
            .map_err(|_| Error::Syntax { pos: *pos, msg: format!("unknown identifier `{name}`") })?,
        Expr::Neg(a) => -&eval_graded(chart, a)?,
        Expr::Add(a, b) => &eval_graded(chart, a)? + &eval_graded(chart, b)?,
        Expr::Sub(a, b) => &eval_graded(chart, a)? - &eval_graded(chart, b)?,
        Expr::Mul(a, b) => &eval_graded(chart, a)? * &eval_graded(chart, b)?,
        Expr::Div(a, b, pos) => {
            let num = eval_graded(chart, a)?;
            let den = eval_graded(chart, b)?;
            if den.terms.keys().any(|m| m.iter().any(|&x| x > 0)) {
                return Err(Error::Syntax { pos: *pos, msg: "division by a non-scalar".into() });
            }
            let inv = den.scalar_part().inv().ok_or(Error::DivisionByZero)?;
            num.scale(&inv)
        }
        Expr::Pow(a, k) => eval_graded(chart, a)?.pow(*k),
    })
}

impl Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        self.checked_add(rhs).expect("chart mismatch")
    }
}

impl Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        self.checked_add(&-rhs).expect("chart mismatch")
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        GradedPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &GradedPoly) -> GradedPoly {
        self.checked_mul(rhs).expect("chart mismatch")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GradedPoly {
            type Output = GradedPoly;
            fn $m(self, rhs: GradedPoly) -> GradedPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&GradedPoly> for GradedPoly {
            type Output = GradedPoly;
            fn $m(self, rhs: &GradedPoly) -> GradedPoly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        -&self
    }
}

impl GradedPoly {
    /// Renders a monomial as `g1*g2^2*...` (empty string for 1).
    pub fn mono_string(&self, m: &[u16]) -> String {
        m.iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = &self.chart.gens[i].name;
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mono = self.mono_string(m);
            let coeff = c.to_string();
            let simple = c.numerator().num_terms() == 1 && c.is_polynomial();
            let (neg, body) = match coeff.strip_prefix('-') {
                Some(rest) if simple => (true, rest.to_string()),
                _ => (false, coeff.clone()),
            };
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if mono.is_empty() {
                if simple || k == 0 && self.terms.len() == 1 {
                    write!(f, "{body}")?;
                } else {
                    write!(f, "({body})")?;
                }
            } else if body == "1" {
                write!(f, "{mono}")?;
            } else if simple && !body.contains('/') {
                write!(f, "{body}*{mono}")?;
            } else {
                write!(f, "({body})*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
