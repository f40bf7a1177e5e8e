use crate::bounds::{encode_design, Bounds};
use crate::proposer::{MeanProposer, ProposalRequest, ProposedMean, ProposerError};
use crate::records::ScoredRecord;

const MOCK_PARENTS: usize = 4;

/// Offline stand-in for the model: a log-rank-weighted average of the
/// encoded vectors of the (up to) four best records.
pub fn mock_propose(records: &[ScoredRecord], b: &Bounds) -> Result<ProposedMean, ProposerError> {
    if records.is_empty() {
        return Err(ProposerError::EmptyRecords);
    }
    let encoded = records
        .iter()
        .map(|r| encode_design(&r.design, b))
        .collect::<Result<Vec<_>, _>>()?;

    // Best first; among equal scores the later record ranks higher.
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &c| {
        records[c]
            .score
            .total_cmp(&records[a].score)
            .then(c.cmp(&a))
    });
    let parents = records.len().min(MOCK_PARENTS);
    let top = ((parents + 1) as f64).ln();
    let weights: Vec<f64> = (1..=parents).map(|j| top - (j as f64).ln()).collect();
    let total: f64 = weights.iter().sum();

    let mean = (0..b.dim())
        .map(|k| {
            let avg: f64 = order[..parents]
                .iter()
                .zip(&weights)
                .map(|(&i, w)| w * encoded[i][k] as f64)
                .sum::<f64>()
                / total;
            avg.round() as i64
        })
        .collect();
    Ok(ProposedMean {
        encoded: mean,
        raw_response: String::new(),
    })
}

/// [`MeanProposer`] backed by [`mock_propose`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MockProposer;

impl MeanProposer for MockProposer {
    fn propose(&mut self, request: &ProposalRequest<'_>) -> Result<ProposedMean, ProposerError> {
        mock_propose(request.records, request.bounds)
    }
}
