//! Meridian curves and their split into boundary elements of equal arclength.

use std::sync::Arc;

use shapeopt_geom::axisym::{AxisymError, BodyProfile};
use shapeopt_geom::legendre::gauss_legendre;
use thiserror::Error;

/// A parametrized meridian `p ↦ (r, z)`, running from one pole to the other.
pub trait Meridian: Send + Sync {
    fn param_range(&self) -> (f64, f64);
    fn point(&self, p: f64) -> (f64, f64);
    /// `d(r, z)/dp`.
    fn velocity(&self, p: f64) -> (f64, f64);
}

impl Meridian for BodyProfile {
    fn param_range(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn point(&self, p: f64) -> (f64, f64) {
        self.point_at(p)
    }

    fn velocity(&self, p: f64) -> (f64, f64) {
        let (tr, tz) = self.tangent_at(p);
        (self.lambda() * tr, self.lambda() * tz)
    }
}

/// Spheroid with `r = a sin θ`, `z = −c cos θ`, `θ ∈ [0, π]`. Prolate when
/// `c > a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spheroid {
    pub equatorial: f64,
    pub polar: f64,
}

impl Meridian for Spheroid {
    fn param_range(&self) -> (f64, f64) {
        (0.0, std::f64::consts::PI)
    }

    fn point(&self, t: f64) -> (f64, f64) {
        (self.equatorial * t.sin(), -self.polar * t.cos())
    }

    fn velocity(&self, t: f64) -> (f64, f64) {
        (self.equatorial * t.cos(), self.polar * t.sin())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("a mesh needs at least one element")]
    NoElements,
    #[error("invalid body: {0}")]
    InvalidBody(#[from] AxisymError),
    #[error("collocation point {index} has non-positive radius {r}")]
    OffAxis { index: usize, r: f64 },
    #[error("meridian has zero length")]
    ZeroLength,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    /// Parameter interval on the meridian.
    pub p0: f64,
    pub p1: f64,
    /// Collocation point at the parameter midpoint.
    pub r: f64,
    pub z: f64,
    pub length: f64,
}

impl Element {
    pub fn p_mid(&self) -> f64 {
        0.5 * (self.p0 + self.p1)
    }
}

#[derive(Clone)]
pub struct BoundaryMesh {
    curve: Arc<dyn Meridian>,
    elements: Vec<Element>,
}

impl std::fmt::Debug for BoundaryMesh {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryMesh")
            .field("elements", &self.elements)
            .finish_non_exhaustive()
    }
}

impl BoundaryMesh {
    pub fn curve(&self) -> &dyn Meridian {
        self.curve.as_ref()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.elements.iter().map(|e| e.length).sum()
    }

    pub fn max_element_length(&self) -> f64 {
        self.elements.iter().fold(0.0, |m, e| m.max(e.length))
    }

    /// Endpoints `(r, z)` of element `j`.
    pub fn endpoints(&self, j: usize) -> ((f64, f64), (f64, f64)) {
        let e = &self.elements[j];
        (self.curve.point(e.p0), self.curve.point(e.p1))
    }
}

const ARC_PANELS: usize = 512;

fn speed(curve: &dyn Meridian, p: f64) -> f64 {
    let (vr, vz) = curve.velocity(p);
    vr.hypot(vz)
}

fn arc(curve: &dyn Meridian, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * speed(curve, mid + half * x))
        .sum::<f64>()
        * half
}

/// Splits any meridian into `n_e` elements of equal arclength.
pub fn mesh_meridian(curve: Arc<dyn Meridian>, n_e: usize) -> Result<BoundaryMesh, MeshError> {
    if n_e == 0 {
        return Err(MeshError::NoElements);
    }
    let c = curve.as_ref();
    let rule = gauss_legendre(16);
    let (start, end) = c.param_range();
    let dp = (end - start) / ARC_PANELS as f64;
    let mut cumulative = vec![0.0; ARC_PANELS + 1];
    for k in 0..ARC_PANELS {
        let a = start + k as f64 * dp;
        cumulative[k + 1] = cumulative[k] + arc(c, a, a + dp, &rule);
    }
    let total = cumulative[ARC_PANELS];
    if !(total > 0.0) {
        return Err(MeshError::ZeroLength);
    }

    // Parameter at which the arclength reaches `target`, by bisection inside
    // the tabulated panel.
    let invert = |target: f64| -> f64 {
        let k = cumulative
            .partition_point(|&l| l <= target)
            .clamp(1, ARC_PANELS)
            - 1;
        let (mut lo, mut hi) = (start + k as f64 * dp, start + (k + 1) as f64 * dp);
        let base = cumulative[k];
        let pk = lo;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if base + arc(c, pk, mid, &rule) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let mut breaks = Vec::with_capacity(n_e + 1);
    breaks.push(start);
    for j in 1..n_e {
        breaks.push(invert(total * j as f64 / n_e as f64));
    }
    breaks.push(end);

    let mut elements = Vec::with_capacity(n_e);
    for (index, w) in breaks.windows(2).enumerate() {
        let (p0, p1) = (w[0], w[1]);
        let (r, z) = c.point(0.5 * (p0 + p1));
        if !(r > 0.0) {
            return Err(MeshError::OffAxis { index, r });
        }
        elements.push(Element {
            p0,
            p1,
            r,
            z,
            length: arc(c, p0, p1, &rule),
        });
    }
    Ok(BoundaryMesh { curve, elements })
}

/// Meshes a body profile; bodies whose meridian leaves `r ≥ 0` or crosses
/// itself are rejected.
pub fn profile_to_mesh(profile: &BodyProfile, n_e: usize) -> Result<BoundaryMesh, MeshError> {
    profile.validate()?;
    mesh_meridian(Arc::new(profile.clone()), n_e)
}
