use crate::bounds::ENCODED_MAX;
use crate::proposer::{ProposedMean, ResponseParseError};

/// Renders integers the way prompts show them and responses must return them.
pub fn format_integer_list(v: &[i64]) -> String {
    let body: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", body.join(", "))
}

fn parse_list_body(body: &str) -> Option<Vec<i64>> {
    if body.trim().is_empty() {
        return None;
    }
    body.split(',').map(|t| t.trim().parse::<i64>().ok()).collect()
}

/// The last `[...]` group in `text` whose contents are comma-separated
/// integers. Brackets holding anything else are skipped.
pub(crate) fn last_integer_list(text: &str) -> Option<Vec<i64>> {
    let mut found = None;
    let mut open: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match c {
            '[' => open = Some(i),
            ']' => {
                if let Some(start) = open.take() {
                    if let Some(list) = parse_list_body(&text[start + 1..i]) {
                        found = Some(list);
                    }
                }
            }
            _ => {}
        }
    }
    found
}

/// Extracts a `d`-component mean from free-form model output.
pub fn parse_mean_response(text: &str, d: usize) -> Result<ProposedMean, ResponseParseError> {
    let list = last_integer_list(text).ok_or(ResponseParseError::NoList)?;
    if list.len() != d {
        return Err(ResponseParseError::Arity {
            expected: d,
            found: list.len(),
        });
    }
    if let Some((index, &value)) = list
        .iter()
        .enumerate()
        .find(|(_, v)| !(0..=ENCODED_MAX).contains(*v))
    {
        return Err(ResponseParseError::OutOfRange { index, value });
    }
    Ok(ProposedMean {
        encoded: list,
        raw_response: text.to_string(),
    })
}
