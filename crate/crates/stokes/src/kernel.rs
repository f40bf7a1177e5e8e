//! Free-space Stokeslet integrated around a ring, in meridian coordinates.
//!
//! For a field point `(r, z)` and a ring of radius `r0` at height `z0`
//! carrying an axisymmetric force density `(f_r, f_z)` per unit area, the
//! induced velocity is `u = (1/8π) · r0 · B · f` per unit meridian length,
//! with `B` the 2×2 block returned by [`ring_stokeslet`]. `B` carries no
//! source-radius factor, so `B(x, x0) = B(x0, x)ᵀ`.

use std::f64::consts::PI;

use crate::elliptic::elliptic_ke_complementary;

/// Below this modulus the closed forms lose digits to cancellation and the
/// integrals are summed directly instead.
const SMALL_MODULUS: f64 = 0.05;
const TRAPEZOID_NODES: usize = 16;

/// `I_mn = ∫₀^{2π} cosⁿω / (dz² + r² + r0² − 2 r r0 cos ω)^{m/2} dω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingIntegrals {
    pub i10: f64,
    pub i11: f64,
    pub i30: f64,
    pub i31: f64,
    pub i32: f64,
}

/// Sums the integrals with the periodic trapezoid rule on `nodes` points;
/// spectrally accurate whenever the points are not close.
pub fn ring_integrals_direct(dz: f64, r: f64, r0: f64, nodes: usize) -> RingIntegrals {
    let a2 = dz * dz + (r + r0) * (r + r0);
    let a = a2.sqrt();
    let m = 4.0 * r * r0 / a2;
    let h = PI / nodes as f64;
    let mut s = [0.0; 5];
    for j in 0..nodes {
        let c = ((j as f64 + 0.5) * h).cos();
        let cw = 2.0 * c * c - 1.0;
        let inv1 = 1.0 / (1.0 - m * c * c).sqrt();
        let inv3 = inv1 * inv1 * inv1;
        s[0] += inv1;
        s[1] += cw * inv1;
        s[2] += inv3;
        s[3] += cw * inv3;
        s[4] += cw * cw * inv3;
    }
    let f1 = 2.0 * h / a;
    let f3 = 2.0 * h / (a * a2);
    RingIntegrals {
        i10: f1 * s[0],
        i11: f1 * s[1],
        i30: f3 * s[2],
        i31: f3 * s[3],
        i32: f3 * s[4],
    }
}

pub fn ring_integrals(dz: f64, r: f64, r0: f64) -> RingIntegrals {
    let a2 = dz * dz + (r + r0) * (r + r0);
    let m = 4.0 * r * r0 / a2;
    if m < SMALL_MODULUS {
        return ring_integrals_direct(dz, r, r0, TRAPEZOID_NODES);
    }
    let a = a2.sqrt();
    // 1 - m computed from the separation itself, not by subtraction.
    let m1 = (dz * dz + (r - r0) * (r - r0)) / a2;
    let (k, e) = elliptic_ke_complementary(m1);
    let a3 = a * a2;
    let e_m1 = e / m1;
    RingIntegrals {
        i10: 4.0 * k / a,
        i11: 4.0 / (a * m) * ((2.0 - m) * k - 2.0 * e),
        i30: 4.0 * e_m1 / a3,
        i31: 4.0 / (a3 * m) * ((2.0 - m) * e_m1 - 2.0 * k),
        i32: 4.0 / (a3 * m * m) * ((8.0 - 8.0 * m + m * m) * e_m1 - 4.0 * (2.0 - m) * k),
    }
}

/// Kernel block `[[B_rr, B_rz], [B_zr, B_zz]]`: row is the velocity
/// component at `field`, column the force component on the ring through
/// `source`. Both points are `(r, z)`. `None` when the points coincide.
pub fn ring_stokeslet(field: (f64, f64), source: (f64, f64)) -> Option<[[f64; 2]; 2]> {
    let (r, z) = field;
    let (r0, z0) = source;
    let dz = z - z0;
    if dz == 0.0 && r == r0 {
        return None;
    }
    let i = ring_integrals(dz, r, r0);
    Some([
        [
            i.i11 + (r * r + r0 * r0) * i.i31 - r * r0 * (i.i30 + i.i32),
            dz * (r * i.i30 - r0 * i.i31),
        ],
        [dz * (r * i.i31 - r0 * i.i30), i.i10 + dz * dz * i.i30],
    ])
}
