//! Gauss-Jacobi rules on [-1, 1] built with the Golub-Welsch eigenvalue method.
//!
//! The weight function is (1 − t)^a (1 + t)^b. Gauss-Legendre is the case
//! a = b = 0. Weights are normalized to sum to one, so a rule doubles as a
//! discrete probability measure for the matching beta law.

use nalgebra::DMatrix;

/// Nodes in ascending order with weights normalized to total mass 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss-Jacobi rule for (1 − t)^a (1 + t)^b with a, b > −1.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> UnitRule {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let ab = a + b;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jm[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let beta = if k == 0 {
                // (1 + a + b) cancels between numerator and denominator.
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = beta.sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let eig = jm.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    UnitRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    }
}

/// `n`-point Gauss-Legendre rule on [-1, 1], weights summing to one.
pub fn gauss_legendre(n: usize) -> UnitRule {
    gauss_jacobi(n, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_three_point_closed_form() {
        let r = gauss_legendre(3);
        let x = (3.0f64 / 5.0).sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-14);
        assert!(r.nodes[1].abs() < 1e-14);
        assert!((r.nodes[2] - x).abs() < 1e-14);
        assert!((r.weights[0] - 5.0 / 18.0).abs() < 1e-14);
        assert!((r.weights[1] - 8.0 / 18.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(10);
        // mean of t^k under U[-1,1]: 1/(k+1) for even k
        for k in 0..20 {
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.powi(k)).sum();
            let want = if k % 2 == 0 { 1.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((q - want).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn jacobi_moments_match_beta_law() {
        // (1 − t)^a (1 + t)^b on [-1,1] is Beta(b+1, a+1) for u=(1+t)/2.
        let (a1, a2) = (1.5f64, 0.5f64);
        let r = gauss_jacobi(16, a2 - 1.0, a1 - 1.0);
        let mean: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * 0.5 * (1.0 + t)).sum();
        assert!((mean - a1 / (a1 + a2)).abs() < 1e-13);
        let m2: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(t, w)| w * (0.5 * (1.0 + t)).powi(2))
            .sum();
        let var = a1 * a2 / ((a1 + a2).powi(2) * (a1 + a2 + 1.0));
        assert!((m2 - mean * mean - var).abs() < 1e-13);
    }

    #[test]
    fn weights_sum_to_one() {
        for n in [1usize, 2, 7, 64, 128] {
            for (a, b) in [(0.0, 0.0), (-0.5, 0.5), (0.3, -0.7)] {
                let r = gauss_jacobi(n, a, b);
                let s: f64 = r.weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(r.weights.iter().all(|w| *w > 0.0));
            }
        }
    }
}
