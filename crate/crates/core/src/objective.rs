use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{Bounds, DesignVector};
use crate::records::{EvalStatus, ScoredRecord};

/// Why a single design could not be scored. The loop records the
/// objective's penalty instead of aborting.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("evaluation failed: {0}")]
pub struct EvalError(pub String);

/// A maximization problem over a bounded design space.
///
/// Implementations are called concurrently from several threads within one
/// generation and must not share mutable state between calls.
pub trait Objective: Sync {
    fn bounds(&self) -> &Bounds;

    fn evaluate(&self, x: &DesignVector) -> Result<f64, EvalError>;

    /// Score assigned to designs whose evaluation failed.
    fn penalty(&self) -> f64;

    /// One-line statement of what is being optimized, used in prompts.
    fn description(&self) -> String;
}

/// Scores `designs` in order. Evaluations run on the rayon pool when
/// `parallel` is set; output order always matches input order.
pub fn evaluate_designs<O: Objective + ?Sized>(
    objective: &O,
    designs: Vec<DesignVector>,
    generation: usize,
    parallel: bool,
) -> Vec<ScoredRecord> {
    let score = |design: DesignVector| {
        let (score, status) = match objective.evaluate(&design) {
            Ok(s) if s.is_finite() => (s, EvalStatus::Ok),
            Ok(s) => {
                log::warn!("non-finite score {s} for {:?}; using penalty", design.0);
                (objective.penalty(), EvalStatus::Failed)
            }
            Err(e) => {
                log::debug!("{e} for {:?}", design.0);
                (objective.penalty(), EvalStatus::Failed)
            }
        };
        ScoredRecord {
            design,
            score,
            generation,
            status,
        }
    };
    if parallel {
        designs.into_par_iter().map(score).collect()
    } else {
        designs.into_iter().map(score).collect()
    }
}

/// `F(x) = -‖x - c‖²`, handy for exercising the loop without a solver.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    pub center: Vec<f64>,
    pub bounds: Bounds,
}

impl Objective for QuadraticObjective {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &DesignVector) -> Result<f64, EvalError> {
        Ok(-x
            .0
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>())
    }

    fn penalty(&self) -> f64 {
        -1e3
    }

    fn description(&self) -> String {
        "maximize the negative squared distance to an unknown target point".into()
    }
}
