//! Axisymmetric bodies described by the tangent angle of their meridian,
//! `φ(s) = Σ A_k P_{2k-1}(s)` on a normalized arclength `s ∈ [-1, 1]`.
//!
//! The meridian is `r(s) = λ∫ sin φ`, `z(s) = λ∫ cos φ` from `s = -1`, so the
//! curve has unit speed times `λ` and total length `2λ`. Odd parity of `φ`
//! makes `r(1) = 0`, i.e. the curve always returns to the axis. With
//! `A = [-π/2]` the meridian is a half circle of radius `2λ/π`.

use std::f64::consts::PI;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legendre::{gauss_legendre, odd_legendre_series};

pub const DEFAULT_SAMPLES: usize = 801;
pub const MIN_SAMPLES: usize = 201;
/// Interior samples with `r` below `-RADIUS_TOLERANCE` make a body invalid.
pub const RADIUS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum AxisymError {
    #[error("sample count {0} must be odd and at least {MIN_SAMPLES}")]
    BadSampleCount(usize),
    #[error("at least one Legendre coefficient is required")]
    NoCoefficients,
    #[error("body has non-positive {kind} {value}")]
    DegenerateMeasure { kind: &'static str, value: f64 },
    #[error("constraint target must be positive, got {0}")]
    BadTarget(f64),
    #[error("meridian crosses the axis (min r = {0})")]
    NegativeRadius(f64),
    #[error("meridian intersects itself")]
    SelfIntersecting,
}

/// Coefficients `A_1..A_K` of the odd Legendre modes of `φ`, in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LegendreCoefficients(pub Vec<f64>);

impl LegendreCoefficients {
    pub fn new(a: Vec<f64>) -> Result<Self, AxisymError> {
        if a.is_empty() {
            return Err(AxisymError::NoCoefficients);
        }
        Ok(Self(a))
    }

    /// The sphere: `φ(s) = -πs/2`.
    pub fn sphere() -> Self {
        Self(vec![-PI / 2.0])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }
}

pub fn eval_phi(a: &LegendreCoefficients, s: f64) -> f64 {
    odd_legendre_series(&a.0, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    FixedVolume,
    FixedArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricConstraint {
    pub kind: ConstraintKind,
    pub target: f64,
}

impl GeometricConstraint {
    /// Volume of the unit sphere, the nondimensional target when lengths are
    /// scaled by the equal-volume sphere radius.
    pub fn fixed_volume() -> Self {
        Self {
            kind: ConstraintKind::FixedVolume,
            target: 4.0 * PI / 3.0,
        }
    }

    pub fn fixed_area() -> Self {
        Self {
            kind: ConstraintKind::FixedArea,
            target: 4.0 * PI,
        }
    }
}

/// Sampled meridian. Values at `λ = 1` are kept so rescaling is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyProfile {
    coeffs: LegendreCoefficients,
    s: Vec<f64>,
    phi: Vec<f64>,
    r_unit: Vec<f64>,
    z_unit: Vec<f64>,
    lambda: f64,
}

/// Composite Simpson weights (without the `h/3` factor) for an odd count.
fn simpson_sum(f: &[f64]) -> f64 {
    let n = f.len();
    let inner: f64 = (1..n - 1)
        .map(|i| if i % 2 == 1 { 4.0 * f[i] } else { 2.0 * f[i] })
        .sum();
    f[0] + f[n - 1] + inner
}

/// Cumulative integral from the first sample. Even indices use composite
/// Simpson; odd ones add the first half of the next Simpson panel.
fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i + 2 < n {
        out[i + 1] = out[i] + h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
        out[i + 2] = out[i] + h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
        i += 2;
    }
    out
}

/// Integrates the meridian at `λ = 1` on `n_s` uniform samples.
pub fn integrate_profile(a: &LegendreCoefficients, n_s: usize) -> Result<BodyProfile, AxisymError> {
    if n_s < MIN_SAMPLES || n_s.is_multiple_of(2) {
        return Err(AxisymError::BadSampleCount(n_s));
    }
    if a.0.is_empty() {
        return Err(AxisymError::NoCoefficients);
    }
    let m = (n_s - 1) as f64;
    // Integer numerators keep the grid exactly symmetric about s = 0.
    let s: Vec<f64> = (0..n_s).map(|i| (2.0 * i as f64 - m) / m).collect();
    let h = 2.0 / m;
    let phi: Vec<f64> = s.iter().map(|&si| eval_phi(a, si)).collect();
    let sin: Vec<f64> = phi.iter().map(|p| p.sin()).collect();
    let cos: Vec<f64> = phi.iter().map(|p| p.cos()).collect();
    Ok(BodyProfile {
        coeffs: a.clone(),
        r_unit: cumulative_simpson(&sin, h),
        z_unit: cumulative_simpson(&cos, h),
        s,
        phi,
        lambda: 1.0,
    })
}

impl BodyProfile {
    pub fn coefficients(&self) -> &LegendreCoefficients {
        &self.coeffs
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn r(&self) -> Vec<f64> {
        self.r_unit.iter().map(|v| self.lambda * v).collect()
    }

    pub fn z(&self) -> Vec<f64> {
        self.z_unit.iter().map(|v| self.lambda * v).collect()
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Meridian length `2λ`.
    pub fn arclength(&self) -> f64 {
        2.0 * self.lambda
    }

    /// `|r(1)|`, which odd parity drives to zero.
    pub fn closure_residual(&self) -> f64 {
        (self.lambda * self.r_unit[self.len() - 1]).abs()
    }

    fn step(&self) -> f64 {
        2.0 / (self.len() - 1) as f64
    }

    pub fn with_lambda(&self, lambda: f64) -> BodyProfile {
        BodyProfile {
            lambda,
            ..self.clone()
        }
    }

    /// `(r, z)` at any `s ∈ [-1, 1]`, integrating `φ` with an 8-point Gauss
    /// rule from the nearest sample.
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let s = s.clamp(-1.0, 1.0);
        let i = (((s + 1.0) / self.step()).round() as usize).min(self.len() - 1);
        let (s0, mut r, mut z) = (self.s[i], self.r_unit[i], self.z_unit[i]);
        if s != s0 {
            let (x, w) = gauss_rule_8();
            let half = 0.5 * (s - s0);
            let mid = 0.5 * (s + s0);
            for (xi, wi) in x.iter().zip(w) {
                let p = eval_phi(&self.coeffs, mid + half * xi);
                r += half * wi * p.sin();
                z += half * wi * p.cos();
            }
        }
        (self.lambda * r, self.lambda * z)
    }

    /// Unit tangent `(dr, dz)/|·|` at `s`.
    pub fn tangent_at(&self, s: f64) -> (f64, f64) {
        let p = eval_phi(&self.coeffs, s);
        (p.sin(), p.cos())
    }

    /// Smallest interior radius, scaled by `λ`.
    pub fn min_interior_radius(&self) -> f64 {
        self.r_unit[1..self.len() - 1]
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
            * self.lambda
    }

    /// Whether the meridian stays off the negative-r side and does not
    /// cross itself.
    pub fn validate(&self) -> Result<(), AxisymError> {
        let min_r = self.min_interior_radius();
        if min_r < -RADIUS_TOLERANCE {
            return Err(AxisymError::NegativeRadius(min_r));
        }
        if self.self_intersects() {
            return Err(AxisymError::SelfIntersecting);
        }
        Ok(())
    }

    /// Brute-force crossing test on a thinned copy of the sampled curve.
    fn self_intersects(&self) -> bool {
        let stride = ((self.len() - 1) / 200).max(1);
        let pts: Vec<(f64, f64)> = (0..self.len())
            .step_by(stride)
            .map(|i| (self.r_unit[i], self.z_unit[i]))
            .collect();
        let n = pts.len();
        for i in 0..n - 1 {
            for j in i + 2..n - 1 {
                if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                    return true;
                }
            }
        }
        false
    }

    /// Write `s,r,z,phi` rows.
    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["s", "r", "z", "phi"])?;
        for i in 0..self.len() {
            w.write_record(&[
                self.s[i].to_string(),
                (self.lambda * self.r_unit[i]).to_string(),
                (self.lambda * self.z_unit[i]).to_string(),
                self.phi[i].to_string(),
            ])?;
        }
        w.flush()
    }
}

fn gauss_rule_8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

/// Proper crossing of two segments (shared endpoints do not count).
fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    };
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// `V = π|∫ r² dz|` over the sampled meridian.
pub fn compute_volume(profile: &BodyProfile) -> f64 {
    let f: Vec<f64> = profile
        .r_unit
        .iter()
        .zip(&profile.phi)
        .map(|(r, p)| r * r * p.cos())
        .collect();
    let unit = PI * (profile.step() / 3.0 * simpson_sum(&f)).abs();
    unit * profile.lambda.powi(3)
}

/// `S = 2πλ ∫ r ds`.
pub fn compute_area(profile: &BodyProfile) -> f64 {
    let unit = 2.0 * PI * profile.step() / 3.0 * simpson_sum(&profile.r_unit);
    unit * profile.lambda.powi(2)
}

/// Chooses `λ` so the body meets the constraint. `profile` may be at any scale.
pub fn rescale_to_constraint(
    profile: &BodyProfile,
    c: &GeometricConstraint,
) -> Result<BodyProfile, AxisymError> {
    if !(c.target > 0.0) {
        return Err(AxisymError::BadTarget(c.target));
    }
    let unit = profile.with_lambda(1.0);
    let (kind, measure, power) = match c.kind {
        ConstraintKind::FixedVolume => ("volume", compute_volume(&unit), 3.0),
        ConstraintKind::FixedArea => ("area", compute_area(&unit), 2.0),
    };
    if !(measure > 1e-14) || !measure.is_finite() {
        return Err(AxisymError::DegenerateMeasure { kind, value: measure });
    }
    Ok(profile.with_lambda((c.target / measure).powf(1.0 / power)))
}
