//! Single-layer boundary element solve for a body translating along its
//! axis at unit speed in unbounded fluid of unit viscosity.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use shapeopt_geom::legendre::gauss_legendre;
use thiserror::Error;

use crate::kernel::ring_stokeslet;
use crate::mesh::{BoundaryMesh, Element, Meridian};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BemConfig {
    /// Gauss-Legendre order per panel.
    pub quad_order: usize,
    /// Elements whose midpoint lies within this many element lengths of the
    /// collocation point are integrated on subdivided panels.
    pub near_factor: f64,
    pub parallel: bool,
}

impl Default for BemConfig {
    fn default() -> Self {
        Self {
            quad_order: 8,
            near_factor: 2.0,
            parallel: true,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BemError {
    #[error("quadrature order must be at least 1")]
    BadOrder,
    #[error("boundary element system is singular")]
    Singular,
    #[error("boundary element solution is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DragResult {
    /// Axial force on the body, viscosity and speed both 1.
    pub drag: f64,
    /// `drag / 6π`, the drag relative to a unit sphere.
    pub d_r: f64,
    pub elements: usize,
    /// `(f_r, f_z)` per element.
    pub traction: Vec<(f64, f64)>,
}

/// Panel breakpoints in the local coordinate `t ∈ [-1, 1]`.
const SELF_PANELS: [f64; 7] = [-1.0, -0.5, -0.125, 0.0, 0.125, 0.5, 1.0];
const NEAR_PANELS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

/// Quadrature nodes of one element on a single panel: points and
/// `weight · r0 · |dy/dt|`.
struct FarNodes {
    points: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

fn far_nodes(curve: &dyn Meridian, e: &Element, rule: &Rule) -> FarNodes {
    let (pm, hp) = (e.p_mid(), 0.5 * (e.p1 - e.p0));
    let mut points = Vec::with_capacity(rule.x.len());
    let mut weights = Vec::with_capacity(rule.x.len());
    for (xi, wi) in rule.x.iter().zip(&rule.w) {
        let p = pm + hp * xi;
        let y = curve.point(p);
        let (vr, vz) = curve.velocity(p);
        points.push(y);
        weights.push(wi * y.0.max(0.0) * vr.hypot(vz) * hp);
    }
    FarNodes { points, weights }
}

fn far_block(x: (f64, f64), nodes: &FarNodes) -> [[f64; 2]; 2] {
    let mut acc = [[0.0; 2]; 2];
    for (y, w) in nodes.points.iter().zip(&nodes.weights) {
        if let Some(b) = ring_stokeslet(x, *y) {
            for p in 0..2 {
                for q in 0..2 {
                    acc[p][q] += w * b[p][q];
                }
            }
        }
    }
    acc
}

/// `∫ r0 B dl` over one source element on subdivided panels. On the self
/// element the `-2 ln|t|` part of the diagonal is integrated analytically.
fn panel_block(
    curve: &dyn Meridian,
    x: (f64, f64),
    e: &Element,
    is_self: bool,
    rule: &Rule,
) -> [[f64; 2]; 2] {
    let pm = e.p_mid();
    let hp = 0.5 * (e.p1 - e.p0);
    let speed_at = |p: f64| {
        let (vr, vz) = curve.velocity(p);
        vr.hypot(vz) * hp
    };
    let speed_mid = speed_at(pm);
    let panels: &[f64] = if is_self { &SELF_PANELS } else { &NEAR_PANELS };
    let mut acc = [[0.0; 2]; 2];
    for w in panels.windows(2) {
        let (half, mid) = (0.5 * (w[1] - w[0]), 0.5 * (w[0] + w[1]));
        for (xi, wi) in rule.x.iter().zip(&rule.w) {
            let t = mid + half * xi;
            let p = pm + hp * t;
            let y = curve.point(p);
            let Some(b) = ring_stokeslet(x, y) else {
                continue;
            };
            let scale = wi * half * y.0.max(0.0) * speed_at(p);
            let log = if is_self {
                2.0 * speed_mid * t.abs().ln()
            } else {
                0.0
            };
            acc[0][0] += scale * b[0][0] + wi * half * log;
            acc[0][1] += scale * b[0][1];
            acc[1][0] += scale * b[1][0];
            acc[1][1] += scale * b[1][1] + wi * half * log;
        }
    }
    if is_self {
        // ∫_{-1}^{1} -2 ln|t| dt = 4
        acc[0][0] += 4.0 * speed_mid;
        acc[1][1] += 4.0 * speed_mid;
    }
    acc
}

fn rule(order: usize) -> Result<Rule, BemError> {
    if order == 0 {
        return Err(BemError::BadOrder);
    }
    let (x, w) = gauss_legendre(order);
    Ok(Rule { x, w })
}

/// Dense `2N_e × 2N_e` single-layer matrix. Unknowns and equations are
/// interleaved per element as `(r, z)`; entry `(2i + a, 2j + b)` maps force
/// component `b` on element `j` to velocity component `a` at midpoint `i`,
/// including the `1/8π` factor.
pub fn assemble_single_layer(mesh: &BoundaryMesh, cfg: &BemConfig) -> Result<DMatrix<f64>, BemError> {
    let rule = rule(cfg.quad_order)?;
    let n = mesh.len();
    let curve = mesh.curve();
    let els = mesh.elements();
    let far: Vec<FarNodes> = els.iter().map(|e| far_nodes(curve, e, &rule)).collect();
    let row = |i: usize| -> Vec<[[f64; 2]; 2]> {
        let x = (els[i].r, els[i].z);
        els.iter()
            .enumerate()
            .map(|(j, e)| {
                let dist = (e.r - x.0).hypot(e.z - x.1);
                if i == j || dist < cfg.near_factor * e.length {
                    panel_block(curve, x, e, i == j, &rule)
                } else {
                    far_block(x, &far[j])
                }
            })
            .collect()
    };
    let rows: Vec<Vec<[[f64; 2]; 2]>> = if cfg.parallel {
        (0..n).into_par_iter().map(row).collect()
    } else {
        (0..n).map(row).collect()
    };
    let c = 1.0 / (8.0 * PI);
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for (i, blocks) in rows.iter().enumerate() {
        for (j, b) in blocks.iter().enumerate() {
            for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                a[(2 * i + p, 2 * j + q)] = c * b[p][q];
            }
        }
    }
    Ok(a)
}

/// `2π ∫ r dl` per element.
fn ring_areas(mesh: &BoundaryMesh, rule: &Rule) -> Vec<f64> {
    let curve = mesh.curve();
    mesh.elements()
        .iter()
        .map(|e| {
            let (pm, hp) = (e.p_mid(), 0.5 * (e.p1 - e.p0));
            let s: f64 = rule
                .x
                .iter()
                .zip(&rule.w)
                .map(|(x, w)| {
                    let p = pm + hp * x;
                    let (vr, vz) = curve.velocity(p);
                    w * curve.point(p).0 * vr.hypot(vz)
                })
                .sum();
            2.0 * PI * s * hp
        })
        .collect()
}

/// Solves for the traction with `u = e_z` at every collocation point and
/// integrates its axial component.
///
/// The single-layer operator of a closed surface annihilates the normal
/// vector field, so the system is bordered with that field and the constraint
/// that the traction carries no net normal flux.
pub fn solve_drag(mesh: &BoundaryMesh, cfg: &BemConfig) -> Result<DragResult, BemError> {
    let a = assemble_single_layer(mesh, cfg)?;
    let n = mesh.len();
    let areas = ring_areas(mesh, &rule(cfg.quad_order.max(8))?);
    let mut m = a.resize(2 * n + 1, 2 * n + 1, 0.0);
    let mut rhs = DVector::zeros(2 * n + 1);
    for (j, e) in mesh.elements().iter().enumerate() {
        let (vr, vz) = mesh.curve().velocity(e.p_mid());
        let s = vr.hypot(vz);
        let normal = (vz / s, -vr / s);
        m[(2 * j, 2 * n)] = normal.0;
        m[(2 * j + 1, 2 * n)] = normal.1;
        m[(2 * n, 2 * j)] = normal.0 * areas[j];
        m[(2 * n, 2 * j + 1)] = normal.1 * areas[j];
        rhs[2 * j + 1] = 1.0;
    }
    let sol = m.lu().solve(&rhs).ok_or(BemError::Singular)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(BemError::NonFinite);
    }
    let traction: Vec<(f64, f64)> = (0..n).map(|j| (sol[2 * j], sol[2 * j + 1])).collect();
    let drag: f64 = traction.iter().zip(&areas).map(|(f, w)| f.1 * w).sum();
    Ok(DragResult {
        drag,
        d_r: drag / (6.0 * PI),
        elements: n,
        traction,
    })
}

/// Writes `s,f_r,f_z` with `s` the arclength at each element midpoint.
pub fn write_traction_csv(mesh: &BoundaryMesh, result: &DragResult, path: &Path) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["s", "f_r", "f_z"])?;
    let mut s = 0.0;
    for (e, f) in mesh.elements().iter().zip(&result.traction) {
        let mid = s + 0.5 * e.length;
        s += e.length;
        w.write_record([mid.to_string(), f.0.to_string(), f.1.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
