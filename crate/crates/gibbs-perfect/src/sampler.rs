//! The main loop: pick an incorrect box, flip the filter coin, then either
//! resample its neighbourhood or grow the incorrect set.
//!
//! Each step consumes the run's single stream in a fixed order: box choice,
//! then the filter coin, then the conditional resampling.

use std::time::Instant;

use thiserror::Error;

use crate::bayes_filter::{filter_coin, validate_params, FilterError, FilterParams};
use crate::geometry::{boundary, update_set, BoxIndex, BoxSet, BoxedConfiguration, PointConfiguration};
use crate::model::{is_feasible, GibbsModel};
use crate::poisson_gibbs::{ConditionalGibbs, GibbsError, Region};
use crate::rng::RngStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("step called with no incorrect boxes left")]
    NothingToFix,
    #[error("update radius must be at least 2, got {0}")]
    RadiusTooSmall(usize),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Gibbs(#[from] GibbsError),
    #[error("iteration cap {cap} reached with {left} incorrect boxes left")]
    IterationCap { cap: u64, left: usize, diagnostics: Box<RunDiagnostics> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub model: GibbsModel,
    pub filter: FilterParams,
    /// Defaults to `10^7 |V|`.
    pub iteration_cap: Option<u64>,
    /// Keep the wall time of every step in the diagnostics.
    pub record_step_times: bool,
}

impl SamplerConfig {
    pub fn new(model: GibbsModel, filter: FilterParams) -> Self {
        SamplerConfig { model, filter, iteration_cap: None, record_step_times: false }
    }

    pub fn cap(&self) -> u64 {
        self.iteration_cap.unwrap_or(10_000_000 * self.model.lattice.num_boxes() as u64)
    }
}

#[derive(Debug, Clone)]
pub struct SamplerState {
    pub t: u64,
    pub x: BoxedConfiguration,
    pub incorrect: BoxSet,
    pub rng: RngStream,
}

impl SamplerState {
    /// Empty configuration, every box incorrect.
    pub fn start(model: &GibbsModel, seed: u64) -> Self {
        SamplerState {
            t: 0,
            x: BoxedConfiguration::new(&model.lattice),
            incorrect: model.lattice.all_boxes(),
            rng: RngStream::new(seed),
        }
    }

    pub fn is_done(&self) -> bool {
        self.incorrect.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted { chosen: BoxIndex, resampled: usize },
    Rejected { chosen: BoxIndex, added: usize },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunDiagnostics {
    pub iterations: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub coin_draws: u64,
    /// Boxes that entered the incorrect set on rejects.
    pub boxes_added: u64,
    pub max_points_per_box: usize,
    /// Per-step wall time in seconds, when requested.
    pub step_seconds: Vec<f64>,
    pub wall_seconds: f64,
}

/// One step of the loop. `I` must be non-empty.
pub fn step(state: &mut SamplerState, config: &SamplerConfig) -> Result<(StepOutcome, u64), SamplerError> {
    let model = &config.model;
    let lattice = &model.lattice;
    if state.incorrect.is_empty() {
        return Err(SamplerError::NothingToFix);
    }
    let k = state.rng.index(state.incorrect.len());
    let v = state.incorrect.iter().nth(k).cloned().expect("index within the set");
    let draw = filter_coin(model, &config.filter, &state.incorrect, &v, &state.x, &mut state.rng)?;
    let q = update_set(lattice, &state.incorrect, &v, config.filter.radius).map_err(FilterError::from)?;
    let dq = boundary(lattice, &q);
    state.t += 1;
    if draw.accept {
        let mut bnd = Vec::new();
        state.x.collect_into(lattice, &dq, &mut bnd);
        let mut gibbs = ConditionalGibbs::from_parts(&model.potential, model.lambda, Region::new(lattice, &q), bnd);
        let mut y = Vec::new();
        gibbs.draw_into(&mut state.rng, &mut y)?;
        for w in &q {
            state.x.clear_box(lattice.linear(w));
        }
        for p in y.chunks_exact(lattice.dim()) {
            state.x.push(lattice.linear_of_point(p), p);
        }
        debug_assert!(is_feasible(&model.potential, &state.x.to_configuration()), "infeasible state after a resample");
        state.incorrect.remove(&v);
        Ok((StepOutcome::Accepted { chosen: v, resampled: q.len() }, draw.coin_draws))
    } else {
        let before = state.incorrect.len();
        state.incorrect.extend(dq);
        let added = state.incorrect.len() - before;
        Ok((StepOutcome::Rejected { chosen: v, added }, draw.coin_draws))
    }
}

/// Runs to completion from the empty configuration.
pub fn run(config: &SamplerConfig, seed: u64) -> Result<(PointConfiguration, RunDiagnostics), SamplerError> {
    if config.filter.radius < 2 {
        return Err(SamplerError::RadiusTooSmall(config.filter.radius));
    }
    validate_params(&config.model, &config.filter)?;
    let start = Instant::now();
    let mut state = SamplerState::start(&config.model, seed);
    let mut diag = RunDiagnostics::default();
    let cap = config.cap();
    let num_boxes = config.model.lattice.num_boxes();
    while !state.is_done() {
        if diag.iterations >= cap {
            diag.wall_seconds = start.elapsed().as_secs_f64();
            return Err(SamplerError::IterationCap { cap, left: state.incorrect.len(), diagnostics: Box::new(diag) });
        }
        let t0 = config.record_step_times.then(Instant::now);
        let (outcome, draws) = step(&mut state, config)?;
        if let Some(t0) = t0 {
            diag.step_seconds.push(t0.elapsed().as_secs_f64());
        }
        diag.iterations += 1;
        diag.coin_draws += draws;
        match outcome {
            StepOutcome::Accepted { .. } => {
                diag.accepts += 1;
                for id in 0..num_boxes {
                    diag.max_points_per_box = diag.max_points_per_box.max(state.x.count_in_box(id));
                }
            }
            StepOutcome::Rejected { added, .. } => {
                diag.rejects += 1;
                diag.boxes_added += added as u64;
            }
        }
    }
    assert_eq!(diag.iterations, diag.accepts + diag.rejects);
    assert_eq!(diag.accepts, num_boxes as u64 + diag.boxes_added, "box bookkeeping broken");
    diag.wall_seconds = start.elapsed().as_secs_f64();
    Ok((state.x.to_configuration(), diag))
}
