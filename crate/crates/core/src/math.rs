//! Shared numeric kernels: log-domain accumulation, binomial coefficients,
//! Gaussian tail functions and Gauss–Hermite quadrature.
//!
//! Everything downstream (weight enumerators, ML bounds, density evolution,
//! RS channel analysis) works in the log domain; these helpers are the only
//! place where the underflow/overflow handling lives.

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

/// ln(e^a + e^b), tolerating `-inf` on either side.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// ln Σ e^{x_i} over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// ln C(n, k) via the log-gamma function; exact to f64 rounding.
#[inline]
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Gaussian tail Q(x) = ∫_x^∞ N(0,1).
#[inline]
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// ln Q(x). The erfc route loses relative accuracy deep in the tail, so
/// beyond x = 8 the continued asymptotic series takes over (truncation
/// error ~945/x^10 < 1e-9 relative there).
pub fn ln_q(x: f64) -> f64 {
    if x < 8.0 {
        q_func(x).ln()
    } else {
        let x2 = x * x;
        let series = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2)
            + 105.0 / (x2 * x2 * x2 * x2);
        -0.5 * x2 - x.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + series.ln_1p()
    }
}

/// ln(1 + e^t) without overflow.
#[inline]
pub fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Nodes and weights of the n-point Gauss–Hermite rule (weight e^{-x^2}),
/// so that ∫ f(x) e^{-x^2} dx ≈ Σ w_i f(x_i).
///
/// Golub–Welsch: eigendecomposition of the symmetric tridiagonal Jacobi
/// matrix (off-diagonal `sqrt(j/2)`); node i is an eigenvalue and its
/// weight is `sqrt(pi)` times the squared first eigenvector component.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for j in 1..n {
        let b = (j as f64 / 2.0).sqrt();
        jacobi[(j - 1, j)] = b;
        jacobi[(j, j - 1)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_handles_neg_infinity() {
        assert_eq!(log_add(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert_eq!(log_add(f64::NEG_INFINITY, 3.0), 3.0);
        assert_eq!(log_add(3.0, f64::NEG_INFINITY), 3.0);
    }

    #[test]
    fn log_add_large_arguments() {
        // log(exp(1234) + exp(1232)) = 1234 + log(1 + exp(-2))
        let expected = 1234.0 + (1.0 + (-2.0f64).exp()).ln();
        assert!((log_add(1234.0, 1232.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let xs: [f64; 4] = [0.1, -2.0, 1.5, 0.0];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-13);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_binomial_small_values() {
        assert!((ln_binomial(7, 3) - 35.0f64.ln()).abs() < 1e-12);
        assert!((ln_binomial(10, 0)).abs() < 1e-12);
        assert_eq!(ln_binomial(3, 5), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_q_branches_agree_at_switchover() {
        // the asymptotic branch takes over at x = 8; both formulas must
        // agree there to the series truncation error
        let erfc_based = q_func(8.0).ln();
        let asymptotic = ln_q(8.0);
        assert!(
            (erfc_based - asymptotic).abs() < 1e-6,
            "branch disagreement at x=8: {erfc_based} vs {asymptotic}"
        );
        // sanity at moderate x (statrs erfc is a ~1e-10-relative rational fit)
        assert!((ln_q(1.0).exp() - 0.15865525393145707).abs() < 1e-9);
        // deep-tail value against the exact leading form
        let x: f64 = 40.0;
        let lead = -0.5 * x * x - x.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((ln_q(x) - lead).abs() < 1e-3);
    }

    #[test]
    fn softplus_limits() {
        assert!((softplus(0.0) - 2.0f64.ln()).abs() < 1e-15);
        assert!((softplus(100.0) - 100.0).abs() < 1e-12);
        assert!(softplus(-100.0) < 1e-40);
    }

    #[test]
    fn gauss_hermite_polynomial_moments() {
        // ∫ e^{-x^2} dx = sqrt(pi); ∫ x^2 e^{-x^2} = sqrt(pi)/2; ∫ x^4 = 3 sqrt(pi)/4
        let (x, w) = gauss_hermite(64);
        let s0: f64 = w.iter().sum();
        let s2: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi * xi).sum();
        let s4: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(4)).sum();
        let sp = std::f64::consts::PI.sqrt();
        assert!((s0 - sp).abs() < 1e-12);
        assert!((s2 - sp / 2.0).abs() < 1e-12);
        assert!((s4 - 3.0 * sp / 4.0).abs() < 1e-11);
    }

    #[test]
    fn gauss_hermite_256_is_finite() {
        let (x, w) = gauss_hermite(256);
        assert!(x.iter().all(|v| v.is_finite()));
        assert!(w.iter().all(|v| v.is_finite() && *v > 0.0));
        let s0: f64 = w.iter().sum();
        assert!((s0 - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }
}

