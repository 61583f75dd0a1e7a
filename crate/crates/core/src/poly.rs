//! Polynomials in three variables with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Field, Rational};

pub type Exponent = [u32; 3];

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Exponent, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial([0, 0, 0], c)
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// The coordinate `x^{i+1}`.
    pub fn var(i: usize) -> Self {
        let mut exp = [0; 3];
        exp[i] = 1;
        Poly::monomial(exp, Rational::one())
    }

    pub fn monomial(exp: Exponent, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: Exponent, c: Rational) {
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(e, k)| (*e, k * c)))
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// `∂/∂x^{i+1}`.
    pub fn partial(&self, i: usize) -> Poly {
        Poly::from_terms(self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut d = *e;
            d[i] -= 1;
            (d, c * Rational::from_integer(e[i].into()))
        }))
    }

    pub fn gradient(&self) -> [Poly; 3] {
        [self.partial(0), self.partial(1), self.partial(2)]
    }

    /// Evaluates with coefficients mapped into `T`.
    pub fn eval<T: Field>(&self, x: &[T; 3]) -> T {
        let mut total = T::zero();
        for (e, c) in &self.terms {
            let mut term = T::from_rational(c);
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    term = term * xi.clone();
                }
            }
            total = total + term;
        }
        total
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("({c})*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub type PolyVec = [Poly; 3];

pub fn cross(a: &PolyVec, b: &PolyVec) -> PolyVec {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

pub fn dot(a: &PolyVec, b: &PolyVec) -> Poly {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

pub fn curl(a: &PolyVec) -> PolyVec {
    [
        &a[2].partial(1) - &a[1].partial(2),
        &a[0].partial(2) - &a[2].partial(0),
        &a[1].partial(0) - &a[0].partial(1),
    ]
}

pub fn eval_vec<T: Field>(v: &PolyVec, x: &[T; 3]) -> [T; 3] {
    [v[0].eval(x), v[1].eval(x), v[2].eval(x)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn arithmetic_and_derivatives() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = &(&x * &x) + &(&y.scale(&int(3)) * &x); // x² + 3xy
        assert_eq!(p.partial(0), &x.scale(&int(2)) + &y.scale(&int(3)));
        assert_eq!(p.partial(1), x.scale(&int(3)));
        assert!(p.partial(2).is_zero());
        assert_eq!(p.eval(&[int(2), rat(1, 3), int(7)]), int(6));
        assert_eq!(p.total_degree(), Some(2));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let z = Poly::var(2);
        let f = &(&(&x * &y) * &z) + &(&x.pow(3) * &z);
        assert!(curl(&f.gradient()).iter().all(Poly::is_zero));
    }

    #[test]
    fn power_expands() {
        let s = &Poly::var(0) + &Poly::one();
        let cube = s.pow(3);
        assert_eq!(cube.eval(&[int(2), int(0), int(0)]), int(27));
        assert_eq!(cube.terms().count(), 4);
    }
}
