//! Legendre polynomials and Gauss-Legendre rules on `[-1, 1]`.

use std::f64::consts::PI;

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence. For `n = 0` the
/// second value is 0.
pub fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

pub fn legendre_p(n: usize, x: f64) -> f64 {
    legendre_pair(n, x).0
}

/// `Σ_k coeffs[k] · P_{2k+1}(x)`, evaluated in a single recurrence pass.
pub fn odd_legendre_series(coeffs: &[f64], x: f64) -> f64 {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let mut sum = 0.0;
    for n in 0..2 * coeffs.len() {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * x * p - nf * p_prev) / (nf + 1.0);
        p_prev = p;
        p = next;
        // p now holds P_{n+1}.
        if n % 2 == 0 {
            sum += coeffs[n / 2] * p;
        }
    }
    sum
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton.
        let mut x = ((PI * (i as f64 + 0.75)) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, p1) = legendre_pair(n, x);
            dp = nf * (x * p - p1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, p1) = legendre_pair(n, x);
        dp = if (x * x - 1.0).abs() > 0.0 {
            nf * (x * p - p1) / (x * x - 1.0)
        } else {
            dp
        };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
