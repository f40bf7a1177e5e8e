//! The generation loop: seed a few random Gaussian generations, then let a
//! [`MeanProposer`] move the mean while the step size stays fixed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{decode_design, Bounds, DesignVector};
use crate::error::CoreError;
use crate::objective::{evaluate_designs, Objective};
use crate::proposer::{MeanProposer, ProposalRequest, ProposerError};
use crate::records::{select_records, EvalStatus, RecordBuffer, ScoredRecord, SelectionConfig};

/// Where the mean of a generation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanSource {
    Seeded,
    Proposed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub mean: DesignVector,
    /// Step size as a fraction of each dimension's half-width.
    pub sigma: f64,
    pub generation: usize,
    pub population_size: usize,
    pub source: MeanSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsConfig {
    pub population_size: usize,
    pub sigma: f64,
    pub n_ini: usize,
    /// Total number of generations, seeded ones included.
    pub generations: usize,
    pub selection: SelectionConfig,
    pub seed: u64,
    /// Fraction of each bound interval, centred, that initial means are drawn from.
    pub init_fraction: f64,
    pub parallel: bool,
    /// Keep drawing seeded generations past `n_ini` while every evaluation
    /// so far has failed; a proposer has nothing to learn from such records.
    pub reseed_until_valid: bool,
}

impl Default for EsConfig {
    fn default() -> Self {
        Self {
            population_size: 8,
            sigma: 0.1,
            n_ini: 2,
            generations: 30,
            selection: SelectionConfig::default(),
            seed: 0,
            init_fraction: 0.5,
            parallel: true,
            reseed_until_valid: true,
        }
    }
}

impl EsConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.population_size == 0 {
            return Err(CoreError::InvalidConfig("population_size must be >= 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(CoreError::InvalidConfig("sigma must be positive".into()));
        }
        if self.n_ini == 0 {
            return Err(CoreError::InvalidConfig("n_ini must be >= 1".into()));
        }
        if !(self.init_fraction > 0.0 && self.init_fraction <= 1.0) {
            return Err(CoreError::InvalidConfig("init_fraction must lie in (0, 1]".into()));
        }
        self.selection.validate()
    }
}

/// Independent random stream for one generation, so a resumed run draws
/// exactly what an uninterrupted one would.
pub fn generation_rng(seed: u64, generation: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation as u64);
    rng
}

/// Draws `population_size` designs from `N(mean, (sigma·halfwidth)²)` per
/// component and clamps each to `b`.
pub fn sample_generation<R: Rng + ?Sized>(
    state: &SearchState,
    b: &Bounds,
    rng: &mut R,
) -> Vec<DesignVector> {
    (0..state.population_size)
        .map(|_| {
            let mut x: Vec<f64> = state
                .mean
                .0
                .iter()
                .enumerate()
                .map(|(j, &m)| {
                    let z: f64 = rng.sample(StandardNormal);
                    m + state.sigma * b.half_width(j) * z
                })
                .collect();
            b.clamp(&mut x);
            DesignVector(x)
        })
        .collect()
}

pub(crate) fn uniform_in<R: Rng + ?Sized>(b: &Bounds, rng: &mut R) -> DesignVector {
    DesignVector(
        (0..b.dim())
            .map(|j| rng.random_range(b.lower()[j]..=b.upper()[j]))
            .collect(),
    )
}

/// Receives each completed generation before the next one starts.
/// `state` is `None` for optimizers without a search distribution (the GA).
pub trait RunObserver {
    fn on_generation(
        &mut self,
        records: &[ScoredRecord],
        state: Option<&SearchState>,
    ) -> std::io::Result<()>;
}

impl RunObserver for () {
    fn on_generation(&mut self, _: &[ScoredRecord], _: Option<&SearchState>) -> std::io::Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub buffer: RecordBuffer,
    /// States of the generations run in this call (not those resumed from).
    pub history: Vec<SearchState>,
}

#[derive(Debug, Error)]
pub enum RunErrorKind {
    #[error("proposer failed at generation {generation}: {source}")]
    Proposer {
        generation: usize,
        source: ProposerError,
    },
    #[error("persisting generation {generation}: {source}")]
    Observer {
        generation: usize,
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] CoreError),
}

/// An aborted run together with everything evaluated before the abort.
#[derive(Debug, Error)]
#[error("{kind}")]
pub struct RunError {
    pub kind: RunErrorKind,
    pub partial: Box<RunOutcome>,
}

/// Runs the loop until `cfg.generations` generations exist in the buffer.
///
/// `resume` continues from a previously persisted buffer; generations
/// already present are neither re-evaluated nor re-reported.
pub fn run_optimization<O, P, S>(
    objective: &O,
    proposer: &mut P,
    cfg: &EsConfig,
    observer: &mut S,
    resume: Option<RecordBuffer>,
) -> Result<RunOutcome, RunError>
where
    O: Objective + ?Sized,
    P: MeanProposer + ?Sized,
    S: RunObserver + ?Sized,
{
    let mut outcome = RunOutcome {
        buffer: resume.unwrap_or_default(),
        history: Vec::new(),
    };
    let fail = |kind: RunErrorKind, outcome: RunOutcome| RunError {
        kind,
        partial: Box::new(outcome),
    };
    if let Err(e) = cfg.validate() {
        return Err(fail(e.into(), outcome));
    }
    let bounds = objective.bounds();
    let init_box = match bounds.central(cfg.init_fraction) {
        Ok(b) => b,
        Err(e) => return Err(fail(e.into(), outcome)),
    };
    let description = objective.description();

    while outcome.buffer.len() < cfg.generations {
        let generation = outcome.buffer.len();
        let mut rng = generation_rng(cfg.seed, generation);

        let seeding = generation < cfg.n_ini
            || (cfg.reseed_until_valid
                && !outcome.buffer.records().any(|r| r.status == EvalStatus::Ok));
        let (mean, source) = if seeding {
            (uniform_in(&init_box, &mut rng), MeanSource::Seeded)
        } else {
            let selected = match select_records(&outcome.buffer, &cfg.selection) {
                Ok(s) => s,
                Err(e) => return Err(fail(e.into(), outcome)),
            };
            let request = ProposalRequest {
                records: &selected,
                bounds,
                description: &description,
                generation,
            };
            let proposed = proposer
                .propose(&request)
                .and_then(|p| Ok(decode_design(&p.encoded, bounds)?));
            match proposed {
                Ok(mean) => (mean, MeanSource::Proposed),
                Err(source) => {
                    return Err(fail(RunErrorKind::Proposer { generation, source }, outcome))
                }
            }
        };

        let state = SearchState {
            mean,
            sigma: cfg.sigma,
            generation,
            population_size: cfg.population_size,
            source,
        };
        let designs = sample_generation(&state, bounds, &mut rng);
        let records = evaluate_designs(objective, designs, generation, cfg.parallel);
        if let Err(source) = observer.on_generation(&records, Some(&state)) {
            return Err(fail(RunErrorKind::Observer { generation, source }, outcome));
        }
        outcome.buffer.push_generation(records);
        outcome.history.push(state);
    }
    Ok(outcome)
}
