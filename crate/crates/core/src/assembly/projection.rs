use crate::fespace::FacetBasis;
use crate::quadrature::LineRule;

/// L2 projection onto the tangential facet space `P^{k-1}(F)`, acting on
/// samples at the points of a line rule on the edge parameter `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct FacetProjection {
    basis: FacetBasis,
    points: Vec<f64>,
    weights: Vec<f64>,
    /// `table[j][q] = ℓ_j(s_q)`
    table: Vec<Vec<f64>>,
}

impl FacetProjection {
    pub fn new(k: usize, rule: &LineRule) -> Self {
        let basis = FacetBasis::new(k);
        let table = (0..k).map(|j| rule.points.iter().map(|&s| basis.eval(j, s)).collect()).collect();
        Self { basis, points: rule.points.clone(), weights: rule.weights.clone(), table }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `ℓ_j(s_q)`
    pub fn mode(&self, j: usize, q: usize) -> f64 {
        self.table[j][q]
    }

    /// Legendre coefficients of the projection of the sampled function.
    pub fn coefficients(&self, samples: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                let s: f64 = samples.iter().zip(&self.weights).zip(&self.table[j]).map(|((f, w), l)| f * w * l).sum();
                s / self.basis.norm_sq(j)
            })
            .collect()
    }

    /// Samples of the projection at the rule points.
    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        let c = self.coefficients(samples);
        (0..self.points.len()).map(|q| c.iter().enumerate().map(|(j, cj)| cj * self.table[j][q]).sum()).collect()
    }

    /// `∫_0^1 (P a)(P b) ds` from coefficient vectors.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).enumerate().map(|(j, (x, y))| x * y * self.basis.norm_sq(j)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::legendre_with_derivative;

    fn setup(k: usize) -> (FacetProjection, Vec<f64>) {
        let rule = LineRule::with_degree(2 * k + 2);
        let p = FacetProjection::new(k, &rule);
        let s = rule.points.clone();
        (p, s)
    }

    #[test]
    fn idempotent_and_exact_on_range() {
        for k in 1..=4 {
            let (p, s) = setup(k);
            let f: Vec<f64> = s.iter().map(|x| (3.0 * x).sin() + x.powi(k as i32 + 1)).collect();
            let pf = p.apply(&f);
            let ppf = p.apply(&pf);
            assert!(pf.iter().zip(&ppf).all(|(a, b)| (a - b).abs() < 1e-13));
            // degree k - 1, inside the range
            let poly: Vec<f64> = s.iter().map(|x| (0..k).map(|j| (j + 1) as f64 * x.powi(j as i32)).sum()).collect();
            assert!(p.apply(&poly).iter().zip(&poly).all(|(a, b)| (a - b).abs() < 1e-13));
        }
    }

    #[test]
    fn kills_degree_k_legendre_mode() {
        for k in 1..=4 {
            let (p, s) = setup(k);
            let f: Vec<f64> = s.iter().map(|x| legendre_with_derivative(k, 2.0 * x - 1.0).0).collect();
            assert!(p.coefficients(&f).iter().all(|c| c.abs() < 1e-13));
        }
    }

    #[test]
    fn galerkin_identity() {
        let k = 3;
        let (p, s) = setup(k);
        let rule = LineRule::with_degree(2 * k + 2);
        let f: Vec<f64> = s.iter().map(|x| x.exp()).collect();
        let pf = p.apply(&f);
        for j in 0..k {
            let lhs: f64 = (0..s.len()).map(|q| rule.weights[q] * pf[q] * p.mode(j, q)).sum();
            let rhs: f64 = (0..s.len()).map(|q| rule.weights[q] * f[q] * p.mode(j, q)).sum();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }
}
