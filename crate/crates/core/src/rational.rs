//! Exact multivariate polynomials over Q and rational functions in the base
//! coordinates `x1..xn`.
//!
//! Variables are indexed from zero (`x1` is variable 0). Exponent vectors are
//! stored with trailing zeros trimmed, so the derived lexicographic ordering
//! on `Vec<u16>` is the lex monomial order with `x1` most significant.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Exponent vector, trailing zeros trimmed.
pub type Exps = Vec<u16>;

fn trim(mut e: Exps) -> Exps {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn exps_mul(a: &[u16], b: &[u16]) -> Exps {
    let n = a.len().max(b.len());
    let mut out = vec![0u16; n];
    for (i, o) in out.iter_mut().enumerate() {
        *o = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
    }
    out
}

fn exps_div(a: &[u16], b: &[u16]) -> Option<Exps> {
    if b.len() > a.len() {
        // b has a nonzero exponent beyond a's support (trimmed)
        return None;
    }
    let mut out = a.to_vec();
    for (i, &e) in b.iter().enumerate() {
        if out[i] < e {
            return None;
        }
        out[i] -= e;
    }
    Some(trim(out))
}

/// A multivariate polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exps, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Q::from_integer(BigInt::from(c)))
    }

    /// The coordinate `x_{var+1}`.
    pub fn var(var: usize) -> Self {
        Self::monomial(Q::one(), {
            let mut e = vec![0u16; var + 1];
            e[var] = 1;
            e
        })
    }

    pub fn monomial(c: Q, e: Exps) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(trim(e), c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_empty())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Vec::new()).is_some_and(|c| c.is_one())
    }

    /// The constant coefficient (zero if absent).
    pub fn constant_term(&self) -> Q {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, e: Exps, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, c: &Q, e: &[u16]) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (exps_mul(k, e), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Number of variables with a nonzero exponent somewhere (1 + highest index).
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms
            .keys()
            .map(|e| e.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Leading term in lex order.
    pub fn leading(&self) -> Option<(&Exps, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let d = e.get(var).copied().unwrap_or(0);
            if d == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(trim(ne), c * Q::from_integer(BigInt::from(d)));
        }
        out
    }

    /// Substitutes `x_i -> images[i]` (variables beyond `images` are kept).
    pub fn compose(&self, images: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            let mut kept = Vec::new();
            for (i, &d) in e.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                if let Some(img) = images.get(i) {
                    term = &term * &img.pow(d as u32);
                } else {
                    kept.resize(i + 1, 0);
                    kept[i] = d;
                }
            }
            if !kept.is_empty() {
                term = term.mul_monomial(&Q::one(), &kept);
            }
            out = &out + &term;
        }
        out
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `var`;
    /// entry `k` multiplies `x_var^k` and does not contain `var`.
    fn univariate(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (e, c) in &self.terms {
            let d = e.get(var).copied().unwrap_or(0) as usize;
            let mut ne = e.clone();
            if d > 0 {
                ne[var] = 0;
            }
            out[d].add_term(trim(ne), c.clone());
        }
        out
    }

    fn from_univariate(coeffs: &[Poly], var: usize) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut e = vec![0u16; var + 1];
            e[var] = k as u16;
            out = &out + &c.mul_monomial(&Q::one(), &trim(e));
        }
        out
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if d.is_constant() {
            let c = d.constant_term();
            return Some(self.scale(&c.recip()));
        }
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            let qe = exps_div(&re, &de)?;
            let qc = rc / &dc;
            rem = &rem - &d.mul_monomial(&qc, &qe);
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => Poly::zero(),
        }
    }

    /// Greatest common divisor, normalized to be monic (lex order).
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self.num_terms() == 1 || other.num_terms() == 1 {
            return monomial_gcd(self, other);
        }
        let var = self.num_vars().max(other.num_vars()) - 1;
        let (da, db) = (self.degree_in(var), other.degree_in(var));
        if da == 0 {
            return self.gcd(&other.content(var));
        }
        if db == 0 {
            return other.gcd(&self.content(var));
        }
        let ca = self.content(var);
        let cb = other.content(var);
        let c = ca.gcd(&cb);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = other.div_exact(&cb).expect("content divides");
        let (mut f, mut g) = if da >= db { (pa, pb) } else { (pb, pa) };
        let g = loop {
            let r = f.pseudo_rem(&g, var);
            if r.is_zero() {
                break g;
            }
            if r.degree_in(var) == 0 {
                break Poly::one();
            }
            f = g;
            g = r.primitive_part(var).monic();
        };
        (&c * &g.primitive_part(var)).monic()
    }

    /// Gcd of the coefficients with respect to `var`.
    fn content(&self, var: usize) -> Poly {
        let coeffs = self.univariate(var);
        let mut g = Poly::zero();
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_part(&self, var: usize) -> Poly {
        let c = self.content(var);
        self.div_exact(&c).expect("content divides")
    }

    fn pseudo_rem(&self, g: &Poly, var: usize) -> Poly {
        let gc = g.univariate(var);
        let dg = gc.len() - 1;
        let lc = gc[dg].clone();
        let mut r = self.clone();
        loop {
            let rc = r.univariate(var);
            let dr = rc.len() - 1;
            if r.is_zero() || dr < dg {
                return r;
            }
            let mut shift = vec![0u16; var + 1];
            shift[var] = (dr - dg) as u16;
            let sub = (&rc[dr] * g).mul_monomial(&Q::one(), &trim(shift));
            r = &(&lc * &r) - &sub;
            // reassemble to drop any cancelled top coefficient
            r = Poly::from_univariate(&r.univariate(var), var);
        }
    }

    /// Evaluates at rational points (missing coordinates treated as zero).
    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &d) in e.iter().enumerate() {
                let x = point.get(i).cloned().unwrap_or_else(Q::zero);
                for _ in 0..d {
                    t *= &x;
                }
            }
            acc += t;
        }
        acc
    }
}

fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut common: Option<Exps> = None;
    for e in a.terms.keys().chain(b.terms.keys()) {
        common = Some(match common {
            None => e.clone(),
            Some(c) => {
                let n = c.len().min(e.len());
                trim((0..n).map(|i| c[i].min(e[i])).collect())
            }
        });
    }
    // one operand is a single term, so every common divisor is a monomial
    Poly::monomial(Q::one(), common.unwrap_or_default())
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(exps_mul(ea, eb), ca * cb);
            }
        }
        out
    }
}

fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest lex term first
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(v, &d)| {
                    if d == 1 {
                        format!("x{}", v + 1)
                    } else {
                        format!("x{}^{}", v + 1, d)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", fmt_q(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else if abs.is_integer() {
                write!(f, "{}*{}", fmt_q(&abs), vars.join("*"))?;
            } else {
                write!(f, "({})*{}", fmt_q(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A quotient of polynomials in canonical form: coprime numerator and
/// denominator, denominator monic in lex order. Equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Poly::from_int(c))
    }

    pub fn from_q(c: Q) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn var(v: usize) -> Self {
        Self::from_poly(Poly::var(v))
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    /// Builds `num/den` in canonical form; `None` if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            let c = den.constant_term();
            return RationalFunction { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero");
        let inv = lc.recip();
        RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Option<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Division; `None` when dividing by zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        Some(self * &other.inv().expect("nonzero"))
    }

    pub fn pow(&self, k: u32) -> Self {
        RationalFunction { num: self.num.pow(k), den: self.den.pow(k) }
    }

    pub fn derivative(&self, var: usize) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative(var));
        }
        // (n'd - nd') / d^2
        let n1 = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        Self::normalize(n1, &self.den * &self.den)
    }

    /// Substitutes `x_i -> images[i]`. Fails if the denominator vanishes.
    pub fn compose(&self, images: &[RationalFunction]) -> Option<Self> {
        let sub = |p: &Poly| -> RationalFunction {
            let mut acc = RationalFunction::zero();
            for (e, c) in p.terms() {
                let mut t = RationalFunction::from_q(c.clone());
                for (i, &d) in e.iter().enumerate() {
                    if d == 0 {
                        continue;
                    }
                    let base = images.get(i).cloned().unwrap_or_else(|| RationalFunction::var(i));
                    t = &t * &base.pow(d as u32);
                }
                acc = &acc + &t;
            }
            acc
        };
        sub(&self.num).checked_div(&sub(&self.den))
    }

    pub fn num_vars(&self) -> usize {
        self.num.num_vars().max(self.den.num_vars())
    }

    /// Evaluates at a rational point; `None` at a pole.
    pub fn eval(&self, point: &[Q]) -> Option<Q> {
        let d = self.den.eval(point);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(point) / d)
        }
    }
}

impl From<i64> for RationalFunction {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RationalFunction { num, den: Poly::one() };
            }
            return RationalFunction::normalize(num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::normalize(num, &self.den * &rhs.den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction { num: &self.num * &rhs.num, den: Poly::one() };
        }
        RationalFunction::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add, Poly);
forward_owned!(Sub, sub, Poly);
forward_owned!(Mul, mul, Poly);
forward_owned!(Add, add, RationalFunction);
forward_owned!(Sub, sub, RationalFunction);
forward_owned!(Mul, mul, RationalFunction);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            let s = p.to_string();
            if p.num_terms() > 1 || s.contains('*') || s.contains('/') || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn gcd_of_products_recovers_common_factor() {
        let a = &(&x(0) + &Poly::one()) * &(&x(1) - &x(0));
        let b = &(&x(0) + &Poly::one()) * &(&x(1) + &Poly::from_int(3));
        let g = a.gcd(&b);
        assert_eq!(g, &x(0) + &Poly::one());
    }

    #[test]
    fn gcd_multivariate_square() {
        let f = &(&x(0) * &x(1)) + &x(2);
        let a = &f * &f;
        let b = &f * &(&x(0) - &x(2));
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn cancellation_by_gcd() {
        let n = &x(0) * &x(0) - Poly::one();
        let d = &x(0) - &Poly::one();
        let r = RationalFunction::new(n, d).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r, RationalFunction::from_poly(&x(0) + &Poly::one()));
    }

    #[test]
    fn canonical_sign_of_denominator() {
        let r1 = RationalFunction::new(Poly::one(), -&x(0)).unwrap();
        let r2 = RationalFunction::new(Poly::from_int(-1), x(0)).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn quotient_rule() {
        let r = RationalFunction::new(x(0), &x(0) + &Poly::one()).unwrap();
        let d = r.derivative(0);
        let expected = RationalFunction::new(Poly::one(), (&x(0) + &Poly::one()).pow(2)).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RationalFunction::new(Poly::one(), Poly::zero()).is_none());
    }

    #[test]
    fn compose_with_triangular_map() {
        // x2 -> x2 + x1^2
        let p = RationalFunction::var(1);
        let img = [RationalFunction::var(0), RationalFunction::from_poly(&x(1) + &(&x(0) * &x(0)))];
        assert_eq!(p.compose(&img).unwrap(), img[1]);
    }
}
