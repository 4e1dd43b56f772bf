//! Bivariate polynomials in the monomial basis `x^i y^j`.

use std::ops::{Add, Mul, Neg, Sub};

/// Dense bivariate polynomial; `coef[i][j]` multiplies `x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coef: Vec<Vec<f64>>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coef: vec![vec![0.0]] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coef: vec![vec![c]] }
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, 1.0)
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, 1.0)
    }

    pub fn monomial(i: usize, j: usize, c: f64) -> Self {
        let mut coef = vec![vec![0.0; j + 1]; i + 1];
        coef[i][j] = c;
        Self { coef }
    }

    /// Total degree of the nonzero terms (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        let mut d = 0;
        for (i, row) in self.coef.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if *c != 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        self.coef.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    /// Iterator over `(i, j, c)` nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.coef
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, c)| (i, j, *c)))
            .filter(|t| t.2 != 0.0)
    }

    fn dims(&self) -> (usize, usize) {
        (self.coef.len(), self.coef.iter().map(Vec::len).max().unwrap_or(1))
    }

    fn from_terms(terms: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut p = Poly::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    fn add_term(&mut self, i: usize, j: usize, c: f64) {
        if self.coef.len() <= i {
            self.coef.resize(i + 1, vec![0.0]);
        }
        if self.coef[i].len() <= j {
            self.coef[i].resize(j + 1, 0.0);
        }
        self.coef[i][j] += c;
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        // Horner in x over Horner in y
        let mut acc = 0.0;
        for row in self.coef.iter().rev() {
            let mut ry = 0.0;
            for c in row.iter().rev() {
                ry = ry * p[1] + c;
            }
            acc = acc * p[0] + ry;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(self.terms().filter(|t| t.0 > 0).map(|(i, j, c)| (i - 1, j, c * i as f64)))
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(self.terms().filter(|t| t.1 > 0).map(|(i, j, c)| (i, j - 1, c * j as f64)))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(i, j, c)| (i, j, c * s)))
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }

    /// Exact integral over the reference triangle `{x, y >= 0, x + y <= 1}`.
    pub fn integrate_ref(&self) -> f64 {
        self.terms().map(|(i, j, c)| c * monomial_integral(i, j)).sum()
    }

    /// Restriction to the segment `a + s (b - a)`, as a univariate
    /// polynomial in `s` (coefficients by ascending power).
    pub fn restrict(&self, a: [f64; 2], b: [f64; 2]) -> Vec<f64> {
        let xs = [a[0], b[0] - a[0]];
        let ys = [a[1], b[1] - a[1]];
        let mut out = vec![0.0; self.degree() + 1];
        for (i, j, c) in self.terms() {
            let px = upoly_pow(&xs, i);
            let py = upoly_pow(&ys, j);
            let prod = upoly_mul(&px, &py);
            for (k, v) in prod.iter().enumerate() {
                out[k] += c * v;
            }
        }
        out
    }
}

/// `∫_T x^i y^j = i! j! / (i + j + 2)!` on the reference triangle.
pub fn monomial_integral(i: usize, j: usize) -> f64 {
    let f = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    f(i) * f(j) / f(i + j + 2)
}

fn upoly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn upoly_pow(a: &[f64], n: usize) -> Vec<f64> {
    (0..n).fold(vec![1.0], |acc, _| upoly_mul(&acc, a))
}

/// Evaluate a univariate polynomial with ascending coefficients.
pub fn upoly_eval(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * s + v)
}

/// `∫_0^1 p(s) ds`
pub fn upoly_integral01(c: &[f64]) -> f64 {
    c.iter().enumerate().map(|(k, v)| v / (k + 1) as f64).sum()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::from_terms(self.terms().chain(rhs.terms().map(|(i, j, c)| (i, j, -c))))
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let (a0, a1) = self.dims();
        let (b0, b1) = rhs.dims();
        let mut out = Poly { coef: vec![vec![0.0; a1 + b1]; a0 + b0] };
        for (i, j, c) in self.terms() {
            for (k, l, d) in rhs.terms() {
                out.coef[i + k][j + l] += c * d;
            }
        }
        out
    }
}

/// A vector-valued polynomial field.
#[derive(Debug, Clone, PartialEq)]
pub struct VecPoly(pub [Poly; 2]);

impl VecPoly {
    pub fn zero() -> Self {
        VecPoly([Poly::zero(), Poly::zero()])
    }

    /// 2D scalar curl `(∂_y f, -∂_x f)`; always divergence-free.
    pub fn curl(f: &Poly) -> Self {
        VecPoly([f.dy(), -&f.dx()])
    }

    pub fn div(&self) -> Poly {
        &self.0[0].dx() + &self.0[1].dy()
    }

    pub fn scale(&self, s: f64) -> Self {
        VecPoly([self.0[0].scale(s), self.0[1].scale(s)])
    }

    pub fn mul_scalar(&self, f: &Poly) -> Self {
        VecPoly([&self.0[0] * f, &self.0[1] * f])
    }

    pub fn add(&self, o: &VecPoly) -> Self {
        VecPoly([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1]])
    }

    pub fn sub(&self, o: &VecPoly) -> Self {
        VecPoly([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1]])
    }

    pub fn dot(&self, o: &VecPoly) -> Poly {
        &(&self.0[0] * &o.0[0]) + &(&self.0[1] * &o.0[1])
    }

    pub fn dot_const(&self, n: [f64; 2]) -> Poly {
        &self.0[0].scale(n[0]) + &self.0[1].scale(n[1])
    }

    pub fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        [self.0[0].eval(p), self.0[1].eval(p)]
    }

    /// `[[∂x v0, ∂y v0], [∂x v1, ∂y v1]]`
    pub fn gradient(&self) -> [[Poly; 2]; 2] {
        [[self.0[0].dx(), self.0[0].dy()], [self.0[1].dx(), self.0[1].dy()]]
    }

    pub fn degree(&self) -> usize {
        self.0[0].degree().max(self.0[1].degree())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let p = &(&Poly::x() * &Poly::y()) + &Poly::constant(2.0);
        assert_eq!(p.eval([3.0, 4.0]), 14.0);
        assert_eq!(p.dx().eval([3.0, 4.0]), 4.0);
        assert_eq!(p.dy().eval([3.0, 4.0]), 3.0);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn triangle_integrals() {
        assert!((Poly::constant(1.0).integrate_ref() - 0.5).abs() < 1e-16);
        assert!((Poly::x().integrate_ref() - 1.0 / 6.0).abs() < 1e-16);
        let xy = &Poly::x() * &Poly::y();
        assert!((xy.integrate_ref() - 1.0 / 24.0).abs() < 1e-16);
    }

    #[test]
    fn curl_is_divergence_free() {
        let f = &(&Poly::x().pow(3) * &Poly::y().pow(2)) - &Poly::x();
        let c = VecPoly::curl(&f);
        assert!(c.div().terms().all(|t| t.2.abs() < 1e-14));
    }

    #[test]
    fn restriction_to_segment() {
        // x*y on the hypotenuse from (1,0) to (0,1): (1-s) s
        let xy = &Poly::x() * &Poly::y();
        let r = xy.restrict([1.0, 0.0], [0.0, 1.0]);
        assert!((upoly_eval(&r, 0.3) - 0.21).abs() < 1e-15);
        assert!((upoly_integral01(&r) - 1.0 / 6.0).abs() < 1e-15);
    }
}
