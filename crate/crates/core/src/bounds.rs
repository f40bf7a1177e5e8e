//! Box bounds, design vectors, and the integer encoding used when design
//! vectors are shown to a language model.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Upper end of the integer range design components are quantized to.
pub const ENCODED_MAX: i64 = 1000;

/// Per-dimension box bounds `lower[j] < upper[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds", into = "RawBounds")]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawBounds> for Bounds {
    type Error = CoreError;

    fn try_from(raw: RawBounds) -> Result<Self, Self::Error> {
        Bounds::new(raw.lower, raw.upper)
    }
}

impl From<Bounds> for RawBounds {
    fn from(b: Bounds) -> Self {
        RawBounds {
            lower: b.lower,
            upper: b.upper,
        }
    }
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, CoreError> {
        if lower.is_empty() {
            return Err(CoreError::EmptyBounds);
        }
        if lower.len() != upper.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            // Also rejects NaN.
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(CoreError::InvalidBounds {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lower, upper]` repeated in every dimension.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self, CoreError> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn half_width(&self, j: usize) -> f64 {
        0.5 * self.width(j)
    }

    pub fn center(&self, j: usize) -> f64 {
        0.5 * (self.lower[j] + self.upper[j])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .enumerate()
                .all(|(j, &v)| v >= self.lower[j] && v <= self.upper[j])
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[j], self.upper[j]);
        }
    }

    /// The centred sub-box covering `fraction` of each interval.
    pub fn central(&self, fraction: f64) -> Result<Bounds, CoreError> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(CoreError::InvalidConfig(format!(
                "central fraction {fraction} must lie in (0, 1]"
            )));
        }
        let (lower, upper) = (0..self.dim())
            .map(|j| {
                let half = 0.5 * fraction * self.width(j);
                (self.center(j) - half, self.center(j) + half)
            })
            .unzip();
        Bounds::new(lower, upper)
    }

    fn check_dim(&self, actual: usize) -> Result<(), CoreError> {
        if actual != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                actual,
            });
        }
        Ok(())
    }
}

/// A point in design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignVector(pub Vec<f64>);

impl DesignVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for DesignVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Maps each component affinely from `[lower, upper]` onto `0..=1000`,
/// rounding half away from zero. Components outside the box saturate.
pub fn encode_design(x: &DesignVector, b: &Bounds) -> Result<Vec<i64>, CoreError> {
    b.check_dim(x.dim())?;
    Ok(x.0
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let t = (v - b.lower[j]) / b.width(j) * ENCODED_MAX as f64;
            (t.round() as i64).clamp(0, ENCODED_MAX)
        })
        .collect())
}

/// Inverse of [`encode_design`] up to quantization.
pub fn decode_design(k: &[i64], b: &Bounds) -> Result<DesignVector, CoreError> {
    b.check_dim(k.len())?;
    let mut out = Vec::with_capacity(k.len());
    for (j, &v) in k.iter().enumerate() {
        if !(0..=ENCODED_MAX).contains(&v) {
            return Err(CoreError::EncodedOutOfRange {
                index: j,
                value: v,
                max: ENCODED_MAX,
            });
        }
        let value = if v == ENCODED_MAX {
            b.upper[j]
        } else {
            b.lower[j] + b.width(j) * (v as f64 / ENCODED_MAX as f64)
        };
        out.push(value);
    }
    Ok(DesignVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym() -> Bounds {
        Bounds::uniform(1, -1.0, 1.0).unwrap()
    }

    #[test]
    fn encode_examples() {
        let b = Bounds::new(vec![-1.0, 2.0], vec![1.0, 5.0]).unwrap();
        assert_eq!(encode_design(&vec![-1.0, 2.0].into(), &b).unwrap(), vec![0, 0]);
        assert_eq!(encode_design(&vec![1.0, 5.0].into(), &b).unwrap(), vec![1000, 1000]);
        assert_eq!(encode_design(&vec![0.0].into(), &sym()).unwrap(), vec![500]);
        assert_eq!(encode_design(&vec![0.1234].into(), &sym()).unwrap(), vec![562]);
    }

    #[test]
    fn decode_examples() {
        let b = Bounds::new(vec![-1.0, 2.0], vec![1.0, 5.0]).unwrap();
        assert_eq!(decode_design(&[0, 0], &b).unwrap().0, vec![-1.0, 2.0]);
        assert_eq!(decode_design(&[1000, 1000], &b).unwrap().0, vec![1.0, 5.0]);
        assert_eq!(decode_design(&[500], &sym()).unwrap().0, vec![0.0]);
    }

    #[test]
    fn encode_decode_errors() {
        assert_eq!(
            encode_design(&vec![0.0, 0.0].into(), &sym()),
            Err(CoreError::DimensionMismatch { expected: 1, actual: 2 })
        );
        assert!(matches!(
            decode_design(&[1001], &sym()),
            Err(CoreError::EncodedOutOfRange { value: 1001, .. })
        ));
        assert!(matches!(
            decode_design(&[-1], &sym()),
            Err(CoreError::EncodedOutOfRange { .. })
        ));
        assert!(decode_design(&[1, 2], &sym()).is_err());
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(vec![], vec![]).is_err());
        assert!(Bounds::new(vec![1.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![f64::NAN], vec![1.0]).is_err());
        let json = r#"{"lower":[2.0],"upper":[1.0]}"#;
        assert!(serde_json::from_str::<Bounds>(json).is_err());
    }

    #[test]
    fn central_box() {
        let b = Bounds::uniform(2, -2.0, 2.0).unwrap();
        let c = b.central(0.5).unwrap();
        assert_eq!(c.lower(), &[-1.0, -1.0]);
        assert_eq!(c.upper(), &[1.0, 1.0]);
    }

    proptest! {
        #[test]
        fn round_trip_within_half_step(
            lo in -100.0f64..100.0,
            width in 1e-3f64..200.0,
            t in 0.0f64..=1.0,
        ) {
            let b = Bounds::uniform(1, lo, lo + width).unwrap();
            let x = (lo + t * width).min(lo + width);
            let k = encode_design(&vec![x].into(), &b).unwrap();
            prop_assert!((0..=ENCODED_MAX).contains(&k[0]));
            let back = decode_design(&k, &b).unwrap();
            prop_assert!((back.0[0] - x).abs() <= b.width(0) / 2000.0);
        }
    }
}
