//! Real-coded genetic algorithm baseline sharing the objective, bounds,
//! record, and persistence interfaces of the ES loop.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{Bounds, DesignVector};
use crate::error::CoreError;
use crate::es::{generation_rng, uniform_in, RunError, RunErrorKind, RunObserver, RunOutcome};
use crate::objective::{evaluate_designs, Objective};
use crate::records::{RecordBuffer, ScoredRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// BLX-α extension of the parent interval on each side.
    pub blend_alpha: f64,
    /// Per-component mutation probability.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the half-width.
    pub mutation_sigma: f64,
    pub elite_count: usize,
    pub seed: u64,
    /// Total generations including the initial population (at least one is run).
    pub generations: usize,
    pub init_fraction: f64,
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 8,
            tournament_size: 2,
            crossover_rate: 0.9,
            blend_alpha: 0.5,
            mutation_rate: 0.2,
            mutation_sigma: 0.1,
            elite_count: 1,
            seed: 0,
            generations: 30,
            init_fraction: 0.5,
            parallel: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        let bad = |m: &str| Err(CoreError::InvalidConfig(m.into()));
        if self.population_size == 0 {
            return bad("population_size must be >= 1");
        }
        if self.tournament_size < 2 {
            return bad("tournament_size must be >= 2");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate)
        {
            return bad("crossover_rate and mutation_rate must lie in [0, 1]");
        }
        if !(self.blend_alpha > 0.0) || !(self.mutation_sigma > 0.0) {
            return bad("blend_alpha and mutation_sigma must be positive");
        }
        if self.elite_count > self.population_size {
            return bad("elite_count must not exceed population_size");
        }
        if !(self.init_fraction > 0.0 && self.init_fraction <= 1.0) {
            return bad("init_fraction must lie in (0, 1]");
        }
        Ok(())
    }
}

fn tournament<'a, R: Rng + ?Sized>(
    pop: &'a [ScoredRecord],
    size: usize,
    rng: &mut R,
) -> &'a ScoredRecord {
    let mut best = &pop[rng.random_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[rng.random_range(0..pop.len())];
        if c.score > best.score {
            best = c;
        }
    }
    best
}

fn blend<R: Rng + ?Sized>(a: &[f64], b: &[f64], alpha: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let (lo, hi) = (x.min(y), x.max(y));
            let ext = alpha * (hi - lo);
            if ext == 0.0 {
                (lo, lo)
            } else {
                (
                    rng.random_range(lo - ext..=hi + ext),
                    rng.random_range(lo - ext..=hi + ext),
                )
            }
        })
        .unzip()
}

/// Produces the next population of `cfg.population_size` designs from a
/// scored one: elitism, tournament selection, BLX-α crossover, Gaussian
/// mutation, and clamping.
pub fn ga_step<R: Rng + ?Sized>(
    population: &[ScoredRecord],
    cfg: &GaConfig,
    b: &Bounds,
    rng: &mut R,
) -> Vec<DesignVector> {
    let n = cfg.population_size;
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&i, &j| population[j].score.total_cmp(&population[i].score));

    let mut next: Vec<DesignVector> = order
        .iter()
        .take(cfg.elite_count)
        .map(|&i| population[i].design.clone())
        .collect();

    while next.len() < n {
        let p1 = tournament(population, cfg.tournament_size, rng);
        let p2 = tournament(population, cfg.tournament_size, rng);
        let (c1, c2) = if rng.random::<f64>() < cfg.crossover_rate {
            blend(&p1.design.0, &p2.design.0, cfg.blend_alpha, rng)
        } else {
            (p1.design.0.clone(), p2.design.0.clone())
        };
        for mut child in [c1, c2] {
            if next.len() == n {
                break;
            }
            for (j, v) in child.iter_mut().enumerate() {
                if rng.random::<f64>() < cfg.mutation_rate {
                    let z: f64 = rng.sample(StandardNormal);
                    *v += cfg.mutation_sigma * b.half_width(j) * z;
                }
            }
            b.clamp(&mut child);
            next.push(DesignVector(child));
        }
    }
    next
}

/// Runs the GA; generation 0 is drawn uniformly from the central
/// `init_fraction` box. Resuming continues from the last persisted generation.
pub fn run_ga<O, S>(
    objective: &O,
    cfg: &GaConfig,
    observer: &mut S,
    resume: Option<RecordBuffer>,
) -> Result<RunOutcome, RunError>
where
    O: Objective + ?Sized,
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
    let bounds = objective.bounds();
    let init_box = match cfg.validate().and_then(|_| bounds.central(cfg.init_fraction)) {
        Ok(b) => b,
        Err(e) => return Err(fail(e.into(), outcome)),
    };

    while outcome.buffer.len() < cfg.generations.max(1) {
        let generation = outcome.buffer.len();
        let mut rng = generation_rng(cfg.seed, generation);
        let designs = if generation == 0 {
            (0..cfg.population_size)
                .map(|_| uniform_in(&init_box, &mut rng))
                .collect()
        } else {
            ga_step(outcome.buffer.generation(generation - 1), cfg, bounds, &mut rng)
        };
        let records = evaluate_designs(objective, designs, generation, cfg.parallel);
        if let Err(source) = observer.on_generation(&records, None) {
            return Err(fail(RunErrorKind::Observer { generation, source }, outcome));
        }
        outcome.buffer.push_generation(records);
    }
    Ok(outcome)
}
