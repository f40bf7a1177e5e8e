//! Airfoil profiles built from four control points, each confined to its own
//! angular sector, joined by cubic Bezier segments whose end tangents are
//! set by per-point sharpness factors.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RHO_MIN: f64 = 0.6;
pub const RHO_MAX: f64 = 3.0;
pub const NUM_POINTS: usize = 4;
/// Objective value for a design whose flow evaluation failed.
pub const FAILURE_REWARD: f64 = -5.0;
pub const DEFAULT_HANDLE_FACTOR: f64 = 0.3;

#[derive(Debug, Error, PartialEq)]
pub enum AirfoilError {
    #[error("parameter {name} = {value} outside [-1, 1]")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("control point index {0} outside 0..4")]
    BadIndex(usize),
    #[error("control points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("samples_per_segment must be at least 1")]
    NoSamples,
}

/// Normalized coordinates of one control point, each in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPointParams {
    pub p: f64,
    pub q: f64,
    pub m: f64,
}

impl ControlPointParams {
    pub const CENTERED: Self = Self {
        p: 0.0,
        q: 0.0,
        m: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarControlPoint {
    pub rho: f64,
    pub theta: f64,
    /// Sharpness factor in `[0, 1]`.
    pub e: f64,
}

impl PolarControlPoint {
    pub fn xy(&self) -> (f64, f64) {
        (self.rho * self.theta.cos(), self.rho * self.theta.sin())
    }
}

/// Angular sector `[-π/8 + iπ/4, π/8 + iπ/4]` of point `i`.
pub fn sector(i: usize) -> (f64, f64) {
    let c = FRAC_PI_4 * i as f64;
    (c - FRAC_PI_8, c + FRAC_PI_8)
}

pub fn params_to_polar(
    params: ControlPointParams,
    i: usize,
) -> Result<PolarControlPoint, AirfoilError> {
    if i >= NUM_POINTS {
        return Err(AirfoilError::BadIndex(i));
    }
    for (name, value) in [("p", params.p), ("q", params.q), ("m", params.m)] {
        if !(-1.0..=1.0).contains(&value) {
            return Err(AirfoilError::ParamOutOfRange { name, value });
        }
    }
    Ok(PolarControlPoint {
        rho: RHO_MIN + (params.p + 1.0) * (RHO_MAX - RHO_MIN) / 2.0,
        theta: FRAC_PI_4 * (params.q / 2.0 + i as f64),
        e: (params.m + 1.0) / 2.0,
    })
}

/// Forward normalization, the inverse of [`params_to_polar`].
pub fn polar_to_params(pt: PolarControlPoint, i: usize) -> ControlPointParams {
    ControlPointParams {
        p: 2.0 * ((pt.rho - RHO_MIN) / (RHO_MAX - RHO_MIN)) - 1.0,
        q: 2.0 * (4.0 / PI * pt.theta - i as f64),
        m: 2.0 * pt.e - 1.0,
    }
}

/// Direction of travel from `from` to `to`.
pub fn segment_angle(from: (f64, f64), to: (f64, f64)) -> Option<f64> {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    if dx == 0.0 && dy == 0.0 {
        None
    } else {
        Some(dy.atan2(dx))
    }
}

fn wrap_pi(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// `e·θ_in + (1 - e)·θ_out`, interpolating along the shorter arc between
/// the incoming and outgoing directions. Exact at `e = 0` and `e = 1`.
pub fn tangent_angle_at_point(e: f64, theta_in: f64, theta_out: f64) -> f64 {
    let diff = wrap_pi(theta_out - theta_in);
    if e >= 0.5 {
        theta_in + (1.0 - e) * diff
    } else {
        theta_out - e * diff
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveConfig {
    pub samples_per_segment: usize,
    /// Bezier handle length as a fraction of the segment chord.
    pub handle_factor: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            samples_per_segment: 50,
            handle_factor: DEFAULT_HANDLE_FACTOR,
        }
    }
}

/// Closed polyline; the last point repeats the first.
#[derive(Debug, Clone, PartialEq)]
pub struct AirfoilCurve {
    pub points: Vec<(f64, f64)>,
    pub samples_per_segment: usize,
}

fn cubic(p: [(f64, f64); 4], t: f64) -> (f64, f64) {
    let u = 1.0 - t;
    let (b0, b1, b2, b3) = (u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t);
    (
        b0 * p[0].0 + b1 * p[1].0 + b2 * p[2].0 + b3 * p[3].0,
        b0 * p[0].1 + b1 * p[1].1 + b2 * p[2].1 + b3 * p[3].1,
    )
}

/// Composite cubic Bezier through the four points in index order, closed
/// back to point 0.
pub fn build_airfoil_curve(
    points: &[PolarControlPoint; NUM_POINTS],
    cfg: &CurveConfig,
) -> Result<AirfoilCurve, AirfoilError> {
    if cfg.samples_per_segment == 0 {
        return Err(AirfoilError::NoSamples);
    }
    let xy: Vec<(f64, f64)> = points.iter().map(PolarControlPoint::xy).collect();
    let n = NUM_POINTS;
    let dir = |a: usize, b: usize| {
        segment_angle(xy[a], xy[b]).ok_or(AirfoilError::CoincidentPoints(a, b))
    };
    let tangents = (0..n)
        .map(|i| {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            Ok(tangent_angle_at_point(points[i].e, dir(prev, i)?, dir(i, next)?))
        })
        .collect::<Result<Vec<f64>, AirfoilError>>()?;

    let mut out = Vec::with_capacity(n * cfg.samples_per_segment + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (xy[i], xy[j]);
        let handle = cfg.handle_factor * ((b.0 - a.0).hypot(b.1 - a.1));
        let ctrl = [
            a,
            (a.0 + handle * tangents[i].cos(), a.1 + handle * tangents[i].sin()),
            (b.0 - handle * tangents[j].cos(), b.1 - handle * tangents[j].sin()),
            b,
        ];
        out.push(a);
        for k in 1..cfg.samples_per_segment {
            out.push(cubic(ctrl, k as f64 / cfg.samples_per_segment as f64));
        }
    }
    out.push(xy[0]);
    Ok(AirfoilCurve {
        points: out,
        samples_per_segment: cfg.samples_per_segment,
    })
}

fn orient(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
    (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
}

fn on_segment(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> bool {
    r.0 >= p.0.min(q.0) && r.0 <= p.0.max(q.0) && r.1 >= p.1.min(q.1) && r.1 <= p.1.max(q.1)
}

/// Closed-segment intersection, touching and collinear overlap included.
fn segments_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a, b, c))
        || (d2 == 0.0 && on_segment(a, b, d))
        || (d3 == 0.0 && on_segment(c, d, a))
        || (d4 == 0.0 && on_segment(c, d, b))
}

/// True iff no two non-adjacent edges of the closed polyline intersect.
pub fn is_simple(curve: &AirfoilCurve) -> bool {
    let p = &curve.points;
    if p.len() < 4 {
        return false;
    }
    let edges = p.len() - 1;
    for i in 0..edges {
        for j in i + 2..edges {
            if i == 0 && j == edges - 1 {
                continue;
            }
            if segments_intersect(p[i], p[i + 1], p[j], p[j + 1]) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowPerformance {
    pub lift: f64,
    /// Signed mean drag.
    pub drag: f64,
    /// Time-averaged `f_L / |f_D|`.
    pub ratio: f64,
    pub status: FlowStatus,
    /// Any additional fields the evaluator reported.
    pub extras: BTreeMap<String, serde_json::Value>,
}

impl FlowPerformance {
    pub fn failed() -> Self {
        Self {
            lift: f64::NAN,
            drag: f64::NAN,
            ratio: f64::NAN,
            status: FlowStatus::Failed,
            extras: BTreeMap::new(),
        }
    }
}

/// Ratio relative to the baseline cylinder, `None` for a failed evaluation.
pub fn relative_ratio(perf: &FlowPerformance, baseline_cylinder_ratio: f64) -> Option<f64> {
    match perf.status {
        FlowStatus::Ok => Some(perf.ratio - baseline_cylinder_ratio),
        FlowStatus::Failed => None,
    }
}

/// Doubles gains, passes losses through, and maps failures to −5.
pub fn shaped_reward(relative: Option<f64>) -> f64 {
    match relative {
        None => FAILURE_REWARD,
        Some(r) if r > 0.0 => 2.0 * r,
        Some(r) => r,
    }
}

/// Formats like C's `%.6g`.
fn six_significant(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = trim(format!("{v:.decimals$}"));
        // Rounding can carry into a new digit (9.999995 -> 10.0000); that is still 6 digits.
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{v:.5e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        let e: i32 = e.parse().unwrap_or(0);
        let sign = if e < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mant.to_string()), sign, e.abs())
    }
}

/// Geometry file body: one `x y` line per polyline vertex.
pub fn geometry_file_contents(curve: &AirfoilCurve) -> String {
    let mut s = String::new();
    for &(x, y) in &curve.points {
        let _ = writeln!(s, "{} {}", six_significant(x), six_significant(y));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluatorConfig {
    /// Program followed by any fixed leading arguments.
    pub command: Vec<String>,
    #[serde(default = "default_re")]
    pub reynolds: f64,
    #[serde(default = "default_eval_timeout")]
    pub timeout_secs: f64,
    /// Keep geometry and result files here instead of a temporary directory.
    #[serde(default)]
    pub work_dir: Option<PathBuf>,
}

fn default_re() -> f64 {
    100.0
}

fn default_eval_timeout() -> f64 {
    3600.0
}

#[derive(Debug, Error)]
pub enum EvaluatorError {
    #[error("evaluator command is empty")]
    EmptyCommand,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
struct ResultFile {
    lift: f64,
    drag: f64,
    ratio: f64,
    #[serde(flatten)]
    extras: BTreeMap<String, serde_json::Value>,
}

/// Runs `<command> <geometry> --re <Re> --out <result>` per design.
/// Safe to call from several threads; each call uses its own files.
#[derive(Debug)]
pub struct ExternalEvaluator {
    cfg: EvaluatorConfig,
    counter: AtomicU64,
}

impl ExternalEvaluator {
    pub fn new(cfg: EvaluatorConfig) -> Result<Self, EvaluatorError> {
        if cfg.command.is_empty() {
            return Err(EvaluatorError::EmptyCommand);
        }
        if let Some(dir) = &cfg.work_dir {
            fs::create_dir_all(dir)?;
        }
        Ok(Self {
            cfg,
            counter: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &EvaluatorConfig {
        &self.cfg
    }

    /// Never errors: spawn failures, timeouts, nonzero exits, and malformed
    /// results all come back as [`FlowStatus::Failed`].
    pub fn evaluate(&self, curve: &AirfoilCurve) -> FlowPerformance {
        let id = self.counter.fetch_add(1, Ordering::Relaxed);
        let tmp;
        let dir: &Path = match &self.cfg.work_dir {
            Some(d) => d,
            None => match tempfile_dir() {
                Ok(d) => {
                    tmp = d;
                    tmp.path()
                }
                Err(e) => {
                    log::warn!("cannot create scratch directory: {e}");
                    return FlowPerformance::failed();
                }
            },
        };
        let geometry = dir.join(format!("geometry_{id}.dat"));
        let result = dir.join(format!("result_{id}.json"));
        match self.run(curve, &geometry, &result) {
            Ok(perf) => perf,
            Err(msg) => {
                log::warn!("external evaluation {id} failed: {msg}");
                FlowPerformance::failed()
            }
        }
    }

    fn run(&self, curve: &AirfoilCurve, geometry: &Path, result: &Path) -> Result<FlowPerformance, String> {
        fs::write(geometry, geometry_file_contents(curve)).map_err(|e| e.to_string())?;
        let _ = fs::remove_file(result);
        let mut child = Command::new(&self.cfg.command[0])
            .args(&self.cfg.command[1..])
            .arg(geometry)
            .arg("--re")
            .arg(self.cfg.reynolds.to_string())
            .arg("--out")
            .arg(result)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("spawn {}: {e}", self.cfg.command[0]))?;
        let deadline = Instant::now() + Duration::from_secs_f64(self.cfg.timeout_secs);
        let status = loop {
            if let Some(status) = child.try_wait().map_err(|e| e.to_string())? {
                break status;
            }
            if Instant::now() >= deadline {
                let _ = child.kill();
                let _ = child.wait();
                return Err(format!("timed out after {} s", self.cfg.timeout_secs));
            }
            std::thread::sleep(Duration::from_millis(10));
        };
        if !status.success() {
            return Err(format!("exited with {status}"));
        }
        let text = fs::read_to_string(result).map_err(|e| format!("result file: {e}"))?;
        let parsed: ResultFile =
            serde_json::from_str(&text).map_err(|e| format!("result file: {e}"))?;
        Ok(FlowPerformance {
            lift: parsed.lift,
            drag: parsed.drag,
            ratio: parsed.ratio,
            status: FlowStatus::Ok,
            extras: parsed.extras,
        })
    }
}

struct ScratchDir(PathBuf);

impl ScratchDir {
    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for ScratchDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn tempfile_dir() -> std::io::Result<ScratchDir> {
    static SEQ: AtomicU64 = AtomicU64::new(0);
    let path = std::env::temp_dir().join(format!(
        "shapeopt-eval-{}-{}",
        std::process::id(),
        SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    fs::create_dir_all(&path)?;
    Ok(ScratchDir(path))
}

/// Control points of a design in which only `free` points move; the rest
/// sit at the sector centres (`p = q = m = 0`).
pub fn control_points_from_design(
    design: &[f64],
    free: &[usize],
) -> Result<[PolarControlPoint; NUM_POINTS], AirfoilError> {
    let mut params = [ControlPointParams::CENTERED; NUM_POINTS];
    for (k, &i) in free.iter().enumerate() {
        if i >= NUM_POINTS {
            return Err(AirfoilError::BadIndex(i));
        }
        params[i] = ControlPointParams {
            p: design[3 * k],
            q: design[3 * k + 1],
            m: design[3 * k + 2],
        };
    }
    let mut out = [PolarControlPoint {
        rho: 0.0,
        theta: 0.0,
        e: 0.0,
    }; NUM_POINTS];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = params_to_polar(params[i], i)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ring(rho: f64) -> [PolarControlPoint; 4] {
        let mut pts = [PolarControlPoint {
            rho,
            theta: 0.0,
            e: 0.5,
        }; 4];
        for (i, p) in pts.iter_mut().enumerate() {
            p.theta = FRAC_PI_4 * i as f64;
        }
        pts
    }

    #[test]
    fn polar_examples() {
        let p = params_to_polar(ControlPointParams { p: -1.0, q: 0.0, m: 0.0 }, 2).unwrap();
        assert_eq!(p.rho, 0.6);
        assert_eq!(p.theta, FRAC_PI_4 * 2.0);
        assert_eq!(p.e, 0.5);
        let p = params_to_polar(ControlPointParams { p: 1.0, q: 1.0, m: 1.0 }, 1).unwrap();
        assert_relative_eq!(p.rho, 3.0);
        assert_relative_eq!(p.theta, FRAC_PI_8 + FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(p.e, 1.0);
    }

    #[test]
    fn polar_errors() {
        assert!(matches!(
            params_to_polar(ControlPointParams { p: 1.5, q: 0.0, m: 0.0 }, 0),
            Err(AirfoilError::ParamOutOfRange { name: "p", .. })
        ));
        assert!(matches!(
            params_to_polar(ControlPointParams::CENTERED, 4),
            Err(AirfoilError::BadIndex(4))
        ));
    }

    #[test]
    fn tangent_blend_examples() {
        assert_eq!(tangent_angle_at_point(1.0, 0.3, 1.2), 0.3);
        assert_eq!(tangent_angle_at_point(0.0, 0.3, 1.2), 1.2);
        assert_relative_eq!(tangent_angle_at_point(0.5, 0.0, PI / 2.0), PI / 4.0);
        // Shorter arc across the ±π seam.
        let t = tangent_angle_at_point(0.5, 3.0, -3.0);
        assert_relative_eq!(wrap_pi(t), PI, epsilon = 1e-12);
    }

    #[test]
    fn ring_curve_passes_through_points_and_closes() {
        let pts = ring(1.0);
        let curve = build_airfoil_curve(&pts, &CurveConfig::default()).unwrap();
        assert_eq!(curve.points.first(), curve.points.last());
        assert_eq!(curve.points.len(), 4 * 50 + 1);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(curve.points[i * 50], p.xy());
        }
        assert!(is_simple(&curve));
        // Convex: all turns have the same sign.
        let ps = &curve.points;
        let n = ps.len() - 1;
        let turns: Vec<f64> = (0..n)
            .map(|i| orient(ps[i], ps[(i + 1) % n], ps[(i + 2) % n]))
            .collect();
        assert!(turns.iter().all(|&t| t >= -1e-12) || turns.iter().all(|&t| t <= 1e-12));
    }

    #[test]
    fn coincident_points_rejected() {
        let mut pts = ring(1.0);
        pts[1] = pts[0];
        assert!(matches!(
            build_airfoil_curve(&pts, &CurveConfig::default()),
            Err(AirfoilError::CoincidentPoints(0, 1))
        ));
    }

    #[test]
    fn figure_eight_is_not_simple() {
        let curve = AirfoilCurve {
            points: vec![(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)],
            samples_per_segment: 1,
        };
        assert!(!is_simple(&curve));
        let square = AirfoilCurve {
            points: vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)],
            samples_per_segment: 1,
        };
        assert!(is_simple(&square));
    }

    #[test]
    fn reward_table() {
        assert_eq!(shaped_reward(Some(0.5)), 1.0);
        assert_eq!(shaped_reward(Some(-0.3)), -0.3);
        assert_eq!(shaped_reward(None), -5.0);
        assert_eq!(shaped_reward(Some(0.0)), 0.0);
    }

    #[test]
    fn relative_ratio_examples() {
        let mut perf = FlowPerformance {
            lift: 1.0,
            drag: -1.25,
            ratio: 0.8,
            status: FlowStatus::Ok,
            extras: BTreeMap::new(),
        };
        assert_eq!(relative_ratio(&perf, 0.0), Some(0.8));
        assert_eq!(relative_ratio(&perf, 0.8), Some(0.0));
        perf.ratio = 0.3;
        assert_relative_eq!(relative_ratio(&perf, 0.1).unwrap(), 0.2);
        assert_eq!(relative_ratio(&FlowPerformance::failed(), 0.0), None);
    }

    #[test]
    fn six_digit_formatting() {
        assert_eq!(six_significant(1.0), "1");
        assert_eq!(six_significant(-0.123456789), "-0.123457");
        assert_eq!(six_significant(2.5e-7), "2.5e-07");
        assert_eq!(six_significant(1234567.0), "1.23457e+06");
        assert_eq!(six_significant(0.0), "0");
    }

    #[test]
    fn free_point_layout() {
        let pts = control_points_from_design(&[1.0, 0.0, -1.0], &[2]).unwrap();
        assert_relative_eq!(pts[2].rho, 3.0);
        assert_eq!(pts[2].e, 0.0);
        for i in [0, 1, 3] {
            assert_relative_eq!(pts[i].rho, 1.8);
            assert_eq!(pts[i].e, 0.5);
        }
    }

    proptest! {
        #[test]
        fn polar_round_trip_and_sector(
            p in -1.0f64..=1.0, q in -1.0f64..=1.0, m in -1.0f64..=1.0, i in 0usize..4
        ) {
            let pt = params_to_polar(ControlPointParams { p, q, m }, i).unwrap();
            let (lo, hi) = sector(i);
            prop_assert!(pt.theta >= lo - 1e-15 && pt.theta <= hi + 1e-15);
            prop_assert!(pt.rho >= RHO_MIN && pt.rho <= RHO_MAX);
            let back = polar_to_params(pt, i);
            prop_assert!((back.p - p).abs() <= 1e-12);
            prop_assert!((back.q - q).abs() <= 1e-12);
            prop_assert!((back.m - m).abs() <= 1e-12);
        }

        #[test]
        fn reward_is_monotone(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(shaped_reward(Some(lo)) <= shaped_reward(Some(hi)));
        }

        #[test]
        fn curves_are_closed(design in proptest::collection::vec(-1.0f64..=1.0, 12)) {
            let pts = control_points_from_design(&design, &[0, 1, 2, 3]).unwrap();
            let c = build_airfoil_curve(&pts, &CurveConfig::default()).unwrap();
            prop_assert_eq!(c.points.first(), c.points.last());
        }
    }
}
