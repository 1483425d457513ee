//! Seeded generation of random component data for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{Poly, RationalFunction, Q};

/// Deterministic generator of small random polynomials.
pub struct Sampler {
    rng: ChaCha8Rng,
    n: usize,
    /// Maximal total degree of generated polynomials.
    pub max_degree: u32,
    /// Maximal number of terms of generated polynomials.
    pub max_terms: usize,
    /// Probability that a sampled component is zero.
    pub sparsity: f64,
}

impl Sampler {
    pub fn new(seed: u64, n: usize) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), n, max_degree: 2, max_terms: 2, sparsity: 0.3 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn nonzero_coeff(&mut self) -> i64 {
        let c = self.int(1, 3);
        if self.coin(0.5) {
            -c
        } else {
            c
        }
    }

    fn monomial(&mut self, max_degree: u32) -> Vec<u16> {
        let deg = self.rng.gen_range(0..=max_degree);
        let mut e = vec![0u16; self.n];
        for _ in 0..deg {
            if self.n > 0 {
                let v = self.index(self.n);
                e[v] += 1;
            }
        }
        e
    }

    /// A random polynomial, never zero.
    pub fn nonzero_poly(&mut self) -> Poly {
        loop {
            let k = self.rng.gen_range(1..=self.max_terms.max(1));
            let mut p = Poly::zero();
            for _ in 0..k {
                let c = Q::from_integer(self.nonzero_coeff().into());
                let e = self.monomial(self.max_degree);
                p = &p + &Poly::monomial(c, e);
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A random polynomial, zero with probability `sparsity`.
    pub fn poly(&mut self) -> RationalFunction {
        if self.coin(self.sparsity) {
            return RationalFunction::zero();
        }
        RationalFunction::from_poly(self.nonzero_poly())
    }

    /// A random scalar that is a genuine quotient `p / (1 + q²)` style, so the
    /// denominator never vanishes at real points.
    pub fn quotient(&mut self) -> RationalFunction {
        let num = self.nonzero_poly();
        let q = self.nonzero_poly();
        let den = &Poly::one() + &(&q * &q);
        RationalFunction::new(num, den).expect("positive denominator")
    }

    /// Affine function `c + Σ a_μ x^μ` with small integer coefficients.
    pub fn affine(&mut self) -> RationalFunction {
        let mut p = Poly::from_int(self.int(-2, 2));
        for mu in 0..self.n {
            let a = self.int(-2, 2);
            p = &p + &Poly::var(mu).scale(&Q::from_integer(a.into()));
        }
        RationalFunction::from_poly(p)
    }
}

impl Sampler {
    /// Random three-form components on all strictly increasing triples.
    pub fn courant_model(&mut self) -> crate::CourantModel {
        let n = self.n;
        let mut m = crate::CourantModel::new(n);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = self.poly();
                    m.set_h(i, j, k, v).expect("valid indices");
                }
            }
        }
        m
    }

    /// Random `Γ` and `V` on a bundle of the given rank; `with_v = false`
    /// leaves `V` zero.
    pub fn connection(&mut self, rank: usize, with_v: bool) -> crate::GenConnection {
        let n = self.n;
        let mut c = crate::GenConnection::zero(n, rank);
        for mu in 0..n {
            for a in 0..rank {
                for b in 0..rank {
                    let g = self.poly();
                    c.set_gamma(mu, a, b, g);
                    if with_v {
                        let v = self.poly();
                        c.set_v(mu, a, b, v);
                    }
                }
            }
        }
        c
    }

    /// A random section of `TM ⊕ T*M`.
    pub fn section(&mut self) -> crate::GenSection {
        let n = self.n;
        crate::GenSection {
            vector: (0..n).map(|_| self.poly()).collect(),
            form: (0..n).map(|_| self.poly()).collect(),
        }
    }

    /// A random section of a rank-`r` bundle.
    pub fn fibre_section(&mut self, rank: usize) -> Vec<RationalFunction> {
        (0..rank).map(|_| self.poly()).collect()
    }
}
