//! The objectives a run can optimize, built from a [`RunConfig`].

use shapeopt_core::{Bounds, DesignVector, EvalError, Objective, QuadraticObjective};
use shapeopt_geom::airfoil::{
    build_airfoil_curve, control_points_from_design, is_simple, relative_ratio, shaped_reward,
    AirfoilCurve, CurveConfig, ExternalEvaluator, FlowPerformance, FlowStatus, FAILURE_REWARD,
};
use shapeopt_geom::axisym::{
    compute_area, compute_volume, integrate_profile, rescale_to_constraint, BodyProfile,
    GeometricConstraint, LegendreCoefficients,
};
use shapeopt_stokes::{profile_to_mesh, solve_drag, BemConfig, BoundaryMesh, DragResult};
use thiserror::Error;

use crate::config::{ConfigError, ProblemKind, RunConfig};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// The evaluator itself cannot run, as opposed to one design failing.
    #[error("evaluator unavailable: {0}")]
    Evaluator(String),
}

/// Drag minimization at fixed volume or area; the score is `-D_r`.
#[derive(Debug, Clone)]
pub struct AxisymProblem {
    pub constraint: GeometricConstraint,
    pub bounds: Bounds,
    pub samples: usize,
    pub elements: usize,
    pub bem: BemConfig,
    pub penalty: f64,
}

/// Everything computed for one axisymmetric design.
#[derive(Debug, Clone)]
pub struct AxisymEvaluation {
    pub profile: BodyProfile,
    pub mesh: BoundaryMesh,
    pub drag: DragResult,
}

impl AxisymProblem {
    pub fn analyze(&self, x: &DesignVector) -> Result<AxisymEvaluation, EvalError> {
        let err = |e: &dyn std::fmt::Display| EvalError(e.to_string());
        let coeffs = LegendreCoefficients::new(x.0.clone()).map_err(|e| err(&e))?;
        let unit = integrate_profile(&coeffs, self.samples).map_err(|e| err(&e))?;
        let profile = rescale_to_constraint(&unit, &self.constraint).map_err(|e| err(&e))?;
        let mesh = profile_to_mesh(&profile, self.elements).map_err(|e| err(&e))?;
        let drag = solve_drag(&mesh, &self.bem).map_err(|e| err(&e))?;
        if !(drag.d_r > 0.0 && drag.d_r.is_finite()) {
            return Err(EvalError(format!("unphysical drag {}", drag.d_r)));
        }
        Ok(AxisymEvaluation {
            profile,
            mesh,
            drag,
        })
    }
}

impl Objective for AxisymProblem {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &DesignVector) -> Result<f64, EvalError> {
        Ok(-self.analyze(x)?.drag.d_r)
    }

    fn penalty(&self) -> f64 {
        self.penalty
    }

    fn description(&self) -> String {
        let what = if self.constraint.kind == shapeopt_geom::axisym::ConstraintKind::FixedVolume {
            "volume"
        } else {
            "surface area"
        };
        format!(
            "Each design holds the {} coefficients of odd Legendre polynomials describing the \
             tangent angle along the meridian of an axisymmetric body with fixed {what}. The \
             score is the negative drag of the body in Stokes flow relative to the sphere of \
             equal {what}; higher is better, and invalid shapes score {}.",
            self.bounds.dim(),
            self.penalty
        )
    }
}

/// Lift-to-drag maximization through an external flow solver.
#[derive(Debug)]
pub struct AirfoilProblem {
    pub bounds: Bounds,
    pub free: Vec<usize>,
    pub curve: CurveConfig,
    pub baseline_ratio: f64,
    pub evaluator: ExternalEvaluator,
}

impl AirfoilProblem {
    pub fn curve_for(&self, x: &DesignVector) -> Result<AirfoilCurve, EvalError> {
        let pts = control_points_from_design(&x.0, &self.free).map_err(|e| EvalError(e.to_string()))?;
        let curve = build_airfoil_curve(&pts, &self.curve).map_err(|e| EvalError(e.to_string()))?;
        if !is_simple(&curve) {
            return Err(EvalError("airfoil outline intersects itself".into()));
        }
        Ok(curve)
    }

    pub fn performance(&self, x: &DesignVector) -> Result<FlowPerformance, EvalError> {
        let perf = self.evaluator.evaluate(&self.curve_for(x)?);
        match perf.status {
            FlowStatus::Ok => Ok(perf),
            FlowStatus::Failed => Err(EvalError("flow evaluation failed".into())),
        }
    }
}

impl Objective for AirfoilProblem {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &DesignVector) -> Result<f64, EvalError> {
        let perf = self.performance(x)?;
        Ok(shaped_reward(relative_ratio(&perf, self.baseline_ratio)))
    }

    fn penalty(&self) -> f64 {
        FAILURE_REWARD
    }

    fn description(&self) -> String {
        format!(
            "Each design holds normalized radius, angle, and sharpness values for {} movable \
             control points of a closed airfoil outline. The score rewards a higher lift-to-drag \
             ratio than a circular cylinder at Reynolds number {}; higher is better.",
            self.free.len(),
            self.evaluator.config().reynolds
        )
    }
}

/// Any of the configured problems behind one type.
#[derive(Debug)]
pub enum Problem {
    Axisym(AxisymProblem),
    Airfoil(AirfoilProblem),
    Analytic(QuadraticObjective),
}

impl Problem {
    pub fn from_config(cfg: &RunConfig) -> Result<Self, ProblemError> {
        let invalid = |m: String| ProblemError::Config(ConfigError::Invalid(m));
        match cfg.problem {
            ProblemKind::AxisymVolume | ProblemKind::AxisymArea => {
                let k = cfg.modes.ok_or_else(|| invalid("modes missing".into()))?;
                let a = &cfg.axisym;
                let bound = a.coefficient_bound;
                Ok(Problem::Axisym(AxisymProblem {
                    constraint: if cfg.problem == ProblemKind::AxisymVolume {
                        GeometricConstraint::fixed_volume()
                    } else {
                        GeometricConstraint::fixed_area()
                    },
                    bounds: Bounds::uniform(k, -bound, bound).map_err(|e| invalid(e.to_string()))?,
                    samples: a.samples,
                    elements: a.elements,
                    bem: BemConfig {
                        quad_order: a.quad_order,
                        ..BemConfig::default()
                    },
                    penalty: a.penalty,
                }))
            }
            ProblemKind::Airfoil => {
                let n = cfg.free_points.ok_or_else(|| invalid("free_points missing".into()))?;
                let settings = cfg
                    .airfoil
                    .as_ref()
                    .ok_or_else(|| invalid("airfoil section missing".into()))?;
                let free = settings.free_indices.clone().unwrap_or_else(|| (0..n).collect());
                let evaluator = ExternalEvaluator::new(settings.evaluator.clone())
                    .map_err(|e| ProblemError::Evaluator(e.to_string()))?;
                Ok(Problem::Airfoil(AirfoilProblem {
                    bounds: Bounds::uniform(3 * n, -1.0, 1.0).map_err(|e| invalid(e.to_string()))?,
                    free,
                    curve: settings.curve,
                    baseline_ratio: settings.baseline_ratio,
                    evaluator,
                }))
            }
            ProblemKind::AnalyticTest => {
                let d = cfg.analytic.dimension;
                Ok(Problem::Analytic(QuadraticObjective {
                    center: cfg.analytic.center.clone().unwrap_or_else(|| vec![0.3; d]),
                    bounds: Bounds::uniform(d, -1.0, 1.0).map_err(|e| invalid(e.to_string()))?,
                }))
            }
        }
    }

    pub fn objective(&self) -> &dyn Objective {
        match self {
            Problem::Axisym(p) => p,
            Problem::Airfoil(p) => p,
            Problem::Analytic(p) => p,
        }
    }
}

/// Summary numbers for an axisymmetric evaluation.
pub fn axisym_summary(eval: &AxisymEvaluation) -> serde_json::Value {
    serde_json::json!({
        "d_r": eval.drag.d_r,
        "drag": eval.drag.drag,
        "lambda": eval.profile.lambda(),
        "volume": compute_volume(&eval.profile),
        "area": compute_area(&eval.profile),
        "elements": eval.drag.elements,
        "closure_residual": eval.profile.closure_residual(),
    })
}
