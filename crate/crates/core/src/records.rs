//! Scored design records grouped by generation, and the rule that picks
//! which of them are shown to the mean proposer.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bounds::DesignVector;
use crate::error::CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub design: DesignVector,
    pub score: f64,
    pub generation: usize,
    pub status: EvalStatus,
}

/// Records in evaluation order, one inner vector per generation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordBuffer {
    generations: Vec<Vec<ScoredRecord>>,
}

impl RecordBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the next generation. Each record's generation field is
    /// overwritten with the new index.
    pub fn push_generation(&mut self, mut records: Vec<ScoredRecord>) -> usize {
        let index = self.generations.len();
        for r in &mut records {
            r.generation = index;
        }
        self.generations.push(records);
        index
    }

    /// Rebuilds a buffer from a flat record list such as a records.jsonl file.
    pub fn from_records(records: Vec<ScoredRecord>) -> Result<Self, CoreError> {
        let mut generations: Vec<Vec<ScoredRecord>> = Vec::new();
        for r in records {
            match r.generation.cmp(&generations.len()) {
                Ordering::Less => generations[r.generation].push(r),
                Ordering::Equal => generations.push(vec![r]),
                Ordering::Greater => {
                    return Err(CoreError::InvalidConfig(format!(
                        "record generation {} skips past {}",
                        r.generation,
                        generations.len()
                    )))
                }
            }
        }
        Ok(Self { generations })
    }

    pub fn len(&self) -> usize {
        self.generations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generations.is_empty()
    }

    pub fn generation(&self, g: usize) -> &[ScoredRecord] {
        &self.generations[g]
    }

    pub fn generations(&self) -> &[Vec<ScoredRecord>] {
        &self.generations
    }

    pub fn truncate(&mut self, len: usize) {
        self.generations.truncate(len);
    }

    pub fn total_records(&self) -> usize {
        self.generations.iter().map(Vec::len).sum()
    }

    pub fn records(&self) -> impl Iterator<Item = &ScoredRecord> {
        self.generations.iter().flatten()
    }

    /// Highest score in generation `g`, or `None` if it is empty.
    pub fn best_in_generation(&self, g: usize) -> Option<f64> {
        self.generations[g]
            .iter()
            .map(|r| r.score)
            .max_by(f64::total_cmp)
    }

    /// The overall best record; ties go to the later evaluation.
    pub fn best_record(&self) -> Option<&ScoredRecord> {
        self.records()
            .fold(None, |best: Option<&ScoredRecord>, r| match best {
                Some(b) if b.score.total_cmp(&r.score) == Ordering::Greater => Some(b),
                _ => Some(r),
            })
    }

    /// Per generation: (best in generation, best so far).
    pub fn trajectory(&self) -> Vec<(f64, f64)> {
        let mut so_far = f64::NEG_INFINITY;
        (0..self.len())
            .map(|g| {
                let best = self.best_in_generation(g).unwrap_or(f64::NEG_INFINITY);
                so_far = so_far.max(best);
                (best, so_far)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Number of best-ranked generations to include.
    pub top_generations: usize,
    /// Number of most recent generations to include.
    pub recent_generations: usize,
    /// Designs taken from each included generation.
    pub designs_per_generation: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            top_generations: 3,
            recent_generations: 2,
            designs_per_generation: 3,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.top_generations + self.recent_generations == 0 {
            return Err(CoreError::InvalidConfig(
                "top_generations + recent_generations must be at least 1".into(),
            ));
        }
        if self.designs_per_generation == 0 {
            return Err(CoreError::InvalidConfig(
                "designs_per_generation must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Indices of `records` sorted ascending by score; equal scores keep
/// evaluation order, so the strongest record is last.
fn ascending_by_score(records: &[ScoredRecord]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..records.len()).collect();
    idx.sort_by(|&a, &b| records[a].score.total_cmp(&records[b].score));
    idx
}

/// Generation indices in ascending order of their best score. Equal best
/// scores are ordered by generation index.
pub fn rank_generations(buffer: &RecordBuffer) -> Result<Vec<usize>, CoreError> {
    if buffer.is_empty() {
        return Err(CoreError::EmptyBuffer);
    }
    let bests = (0..buffer.len())
        .map(|g| buffer.best_in_generation(g).ok_or(CoreError::EmptyGeneration(g)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<usize> = (0..buffer.len()).collect();
    order.sort_by(|&a, &b| bests[a].total_cmp(&bests[b]));
    Ok(order)
}

/// Picks the top-T ranked and the R most recent generations (each at most
/// once) and returns the M best records of each, weakest generation first
/// and ascending by score within a generation.
pub fn select_records(
    buffer: &RecordBuffer,
    cfg: &SelectionConfig,
) -> Result<Vec<ScoredRecord>, CoreError> {
    cfg.validate()?;
    let ranked = rank_generations(buffer)?;
    let n = ranked.len();

    let mut chosen: BTreeSet<usize> = ranked[n.saturating_sub(cfg.top_generations)..]
        .iter()
        .copied()
        .collect();
    chosen.extend(n.saturating_sub(cfg.recent_generations)..n);

    let mut out = Vec::new();
    for &g in ranked.iter().filter(|g| chosen.contains(g)) {
        let records = buffer.generation(g);
        let order = ascending_by_score(records);
        let keep = order.len().min(cfg.designs_per_generation);
        out.extend(order[order.len() - keep..].iter().map(|&i| records[i].clone()));
    }
    Ok(out)
}
