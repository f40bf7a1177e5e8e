//! Parametric shape representations used by the optimizers.
//!
//! * [`airfoil`]: closed Bezier profiles through four sector-constrained
//!   control points, reward shaping, and the external flow-evaluator protocol.
//! * [`axisym`]: meridians of axisymmetric bodies from a Legendre series of
//!   the tangent angle, with volume/area rescaling.

pub mod airfoil;
pub mod axisym;
pub mod legendre;
