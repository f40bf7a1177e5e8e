use std::fmt::Write;

use crate::bounds::{encode_design, Bounds, ENCODED_MAX};
use crate::error::CoreError;
use crate::records::ScoredRecord;

use super::parse::format_integer_list;

/// A rendered prompt plus what a valid answer must look like.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptBundle {
    pub text: String,
    pub dimension: usize,
    pub encoded_lower: Vec<i64>,
    pub encoded_upper: Vec<i64>,
}

pub(crate) const SYSTEM_MESSAGE: &str =
    "You are an optimization assistant. Follow the output format exactly.";

/// Scores are printed with six decimals and trailing zeros removed.
fn format_score(score: f64) -> String {
    let s = format!("{score:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Builds the five-part prompt: task, dimensions and objective, parameter
/// range, records with the request for a new mean, output format.
pub fn build_prompt(
    records: &[ScoredRecord],
    b: &Bounds,
    d: usize,
    objective: &str,
) -> Result<PromptBundle, CoreError> {
    if records.is_empty() {
        return Err(CoreError::EmptyBuffer);
    }
    if d != b.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: b.dim(),
            actual: d,
        });
    }
    let mut text = String::new();

    text.push_str(
        "You are guiding an evolutionary optimization. In every generation a population of \
         designs is sampled from a Gaussian distribution centred on a mean vector, and each \
         design is scored. Your task is to choose the mean of the next generation so that \
         the scores keep improving.\n\n",
    );

    let _ = write!(
        text,
        "Each design is a vector of {d} integers. The objective is to {objective}. \
         Higher scores are better.\n\n"
    );

    let _ = write!(
        text,
        "Every component of a design must be an integer from 0 to {ENCODED_MAX} inclusive.\n\n"
    );

    text.push_str(
        "Here are selected designs from previous generations with their scores, \
         ordered from weaker to stronger:\n",
    );
    for r in records {
        let encoded = encode_design(&r.design, b)?;
        let _ = writeln!(
            text,
            "design: {} score: {}",
            format_integer_list(&encoded),
            format_score(r.score)
        );
    }
    text.push_str(
        "\nBased on these records, propose the most promising mean for the next generation.\n\n",
    );

    let _ = write!(
        text,
        "Answer with exactly one list of {d} comma-separated integers enclosed in square \
         brackets and nothing else."
    );

    Ok(PromptBundle {
        text,
        dimension: d,
        encoded_lower: vec![0; d],
        encoded_upper: vec![ENCODED_MAX; d],
    })
}
