//! Gauss rules on the unit interval and the reference triangle.

/// Gauss-Legendre points and weights on `[0, 1]`, exact to degree `2n - 1`.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Legendre polynomial `P_n(z)` on `[-1, 1]` and its derivative.
pub fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = if (1.0 - z * z).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * z.powi(n as i32 + 1)
    } else {
        n as f64 * (p0 - z * p1) / (1.0 - z * z)
    };
    (p1, d)
}

/// Quadrature rule on the unit interval `[0, 1]`.
#[derive(Debug, Clone)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    /// Exact for polynomials up to `degree`.
    pub fn with_degree(degree: usize) -> Self {
        let (points, weights) = gauss_legendre_01(degree / 2 + 1);
        Self { points, weights }
    }
}

/// Quadrature rule on the reference triangle `{x, y >= 0, x + y <= 1}`
/// (area 1/2), built as a collapsed Gauss product rule.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Exact for polynomials up to `degree`.
    pub fn with_degree(degree: usize) -> Self {
        let m = (degree + 2) / 2 + 1;
        let (g, w) = gauss_legendre_01(m);
        let mut points = Vec::with_capacity(m * m);
        let mut weights = Vec::with_capacity(m * m);
        for (u, wu) in g.iter().zip(&w) {
            for (v, wv) in g.iter().zip(&w) {
                points.push([*u, v * (1.0 - u)]);
                weights.push(wu * wv * (1.0 - u));
            }
        }
        Self { points, weights }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn line_rule_exactness() {
        for deg in 0..12 {
            let r = LineRule::with_degree(deg);
            for p in 0..=deg {
                let q: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((q - 1.0 / (p + 1) as f64).abs() < 1e-14, "deg {deg} p {p}");
            }
        }
    }

    #[test]
    fn triangle_rule_exactness() {
        for deg in 0..12 {
            let r = TriangleRule::with_degree(deg);
            for i in 0..=deg as u32 {
                for j in 0..=(deg as u32 - i) {
                    let q: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[0].powi(i as i32) * p[1].powi(j as i32))
                        .sum();
                    let exact = factorial(i) * factorial(j) / factorial(i + j + 2);
                    assert!((q - exact).abs() < 1e-14, "deg {deg} ({i},{j})");
                }
            }
        }
    }
}
