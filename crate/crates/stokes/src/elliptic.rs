//! Complete elliptic integrals by the arithmetic-geometric mean.

use std::f64::consts::FRAC_PI_2;

/// `(K, E)` from the complementary parameter `m1 = 1 - m`.
///
/// Taking `m1` directly keeps full relative accuracy as `m → 1`, where `K`
/// carries the logarithmic singularity. `m1` must lie in `(0, 1]`.
pub fn elliptic_ke_complementary(m1: f64) -> (f64, f64) {
    debug_assert!(m1 > 0.0 && m1 <= 1.0, "m1 = {m1}");
    let mut a = 1.0;
    let mut b = m1.sqrt();
    let mut sum = 0.5 * (1.0 - m1);
    let mut pow = 0.5;
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let k = FRAC_PI_2 / a;
    (k, k * (1.0 - sum))
}

/// `K(m)` for `m ∈ [0, 1)`; `None` for `m ≥ 1` or NaN.
pub fn complete_elliptic_k(m: f64) -> Option<f64> {
    if !(0.0..1.0).contains(&m) {
        return None;
    }
    Some(elliptic_ke_complementary(1.0 - m).0)
}

/// `E(m)` for `m ∈ [0, 1]`.
pub fn complete_elliptic_e(m: f64) -> Option<f64> {
    if !(0.0..=1.0).contains(&m) {
        return None;
    }
    if m == 1.0 {
        return Some(1.0);
    }
    Some(elliptic_ke_complementary(1.0 - m).1)
}
