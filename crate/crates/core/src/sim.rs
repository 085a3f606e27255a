//! Lockstep trial loop and the Monte Carlo harness.
//!
//! One step: every robot exchanges wall vectors with its neighbors and runs a
//! signal round, then up to `attachments_per_step` distinct signaled openings
//! are drawn uniformly without replacement and filled in draw order.

use std::fs::File;
use std::io::BufWriter;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{write_event_log, AssemblyState, AttachRecord, Checker, Event, SignalRecord, Violation};
use crate::hexgrid::Wall;
use crate::protocol::SignalOptions;
use crate::shape::{generate_random_shape, ShapeSpec};

pub const MAX_ATTACHMENTS_PER_STEP: u8 = 4;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("attachments per step must be in 1..=4, got {0}")]
    InvalidAttachments(u8),
    #[error("max steps {max_steps} is below the shape size {cells}")]
    InvalidStepLimit { max_steps: u64, cells: usize },
    #[error("writing event log: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct TrialConfig<'s> {
    pub shape: &'s ShapeSpec,
    pub attachments_per_step: u8,
    pub rng_seed: u64,
    pub max_steps: u64,
    pub check_every_step: bool,
    pub ablate_special_condition: bool,
    pub event_log_path: Option<PathBuf>,
}

impl<'s> TrialConfig<'s> {
    /// Checked every step, step limit equal to the shape size.
    pub fn new(shape: &'s ShapeSpec, attachments_per_step: u8, rng_seed: u64) -> Self {
        Self {
            shape,
            attachments_per_step,
            rng_seed,
            max_steps: shape.len() as u64,
            check_every_step: true,
            ablate_special_condition: false,
            event_log_path: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(1..=MAX_ATTACHMENTS_PER_STEP).contains(&self.attachments_per_step) {
            return Err(SimError::InvalidAttachments(self.attachments_per_step));
        }
        if self.max_steps < self.shape.len() as u64 {
            return Err(SimError::InvalidStepLimit {
                max_steps: self.max_steps,
                cells: self.shape.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub completed: bool,
    pub steps_used: u64,
    pub robots_placed: usize,
    pub invariant_failures: Vec<Violation>,
    pub step_limit_exceeded: bool,
    pub event_log_path: Option<PathBuf>,
}

/// Run one trial, writing the event log if a path is configured.
pub fn run_trial(config: &TrialConfig) -> Result<TrialReport, SimError> {
    let (report, events) = run_trial_logged(config)?;
    if let Some(path) = &config.event_log_path {
        let f = BufWriter::new(File::create(path)?);
        write_event_log(&events, f)?;
    }
    Ok(report)
}

/// Run one trial and return its event log alongside the report.
pub fn run_trial_logged(config: &TrialConfig) -> Result<(TrialReport, Vec<Event>), SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let opts = SignalOptions {
        special_condition: !config.ablate_special_condition,
    };
    let mut state = AssemblyState::new(config.shape).expect("origin is a target cell");
    let mut events = Vec::new();
    let mut failures = Vec::new();
    let mut step_limit_exceeded = false;

    if config.check_every_step {
        failures.extend(state.check_all().err());
    }
    while failures.is_empty() && !state.check_complete() {
        if state.step() >= config.max_steps {
            step_limit_exceeded = true;
            break;
        }
        let t = state.step();
        let signals = match state.compute_signals(opts) {
            Ok(s) => s,
            Err(e) => {
                failures.push(Violation {
                    step: t,
                    checker: Checker::Signals,
                    detail: e.to_string(),
                    positions: Vec::new(),
                });
                break;
            }
        };
        events.push(Event::Signals(SignalRecord::from_sets(t, &signals)));
        state.set_signals(signals);
        let openings: Vec<_> = state.openings().into_iter().collect();
        if openings.is_empty() {
            failures.push(Violation {
                step: t,
                checker: Checker::Deadlock,
                detail: "no robot signals while the shape is incomplete".into(),
                positions: Vec::new(),
            });
            break;
        }
        let k = openings.len().min(config.attachments_per_step as usize);
        for i in index::sample(&mut rng, openings.len(), k) {
            let (pos, admitting) = openings[i];
            let local_wall = Wall::ALL[rng.gen_range(0..6)];
            let count = state.occupied_neighbor_count(pos);
            match state.attach_oriented(pos, admitting, local_wall) {
                Ok(id) => events.push(Event::Attach(AttachRecord {
                    step: t + 1,
                    id: id.0,
                    p: pos.p,
                    q: pos.q,
                    admitting_id: admitting.0,
                    occupied_neighbor_count: count as u8,
                })),
                Err(e) => {
                    failures.push(Violation {
                        step: t + 1,
                        checker: e.checker(),
                        detail: e.to_string(),
                        positions: vec![pos],
                    });
                    break;
                }
            }
        }
        state.advance_step();
        if failures.is_empty() && config.check_every_step {
            failures.extend(state.check_all().err());
        }
    }
    if failures.is_empty() && !config.check_every_step {
        failures.extend(state.check_all().err());
    }
    let report = TrialReport {
        completed: state.check_complete() && failures.is_empty(),
        steps_used: state.step(),
        robots_placed: state.len(),
        invariant_failures: failures,
        step_limit_exceeded,
        event_log_path: config.event_log_path.clone(),
    };
    Ok((report, events))
}

#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub n_shapes: usize,
    pub sizes: RangeInclusive<usize>,
    pub attachments: RangeInclusive<u8>,
    pub base_seed: u64,
    pub check_every_step: bool,
    pub ablate_special_condition: bool,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            n_shapes: 1000,
            sizes: 2..=256,
            attachments: 1..=4,
            base_seed: 0,
            check_every_step: true,
            ablate_special_condition: false,
        }
    }
}

/// A trial that did not complete cleanly, with what is needed to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub shape_seed: u64,
    pub n_cells: usize,
    pub attachments_per_step: u8,
    pub rng_seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub completed: usize,
    pub failures: Vec<TrialFailure>,
    pub wall_time_seconds: f64,
}

/// Shapes and trial seeds all derive from `base_seed`; trials run on the
/// current rayon pool.
pub fn run_monte_carlo(config: &MonteCarloConfig) -> Result<MonteCarloReport, SimError> {
    for k in config.attachments.clone() {
        if !(1..=MAX_ATTACHMENTS_PER_STEP).contains(&k) {
            return Err(SimError::InvalidAttachments(k));
        }
    }
    let start = Instant::now();
    let mut master = ChaCha8Rng::seed_from_u64(config.base_seed);
    // (shape seed, size, [(k, trial seed)])
    type Plan = (u64, usize, Vec<(u8, u64)>);
    let plans: Vec<Plan> = (0..config.n_shapes)
        .map(|_| {
            let shape_seed: u64 = master.gen();
            let n = master.gen_range(config.sizes.clone());
            let trials = config.attachments.clone().map(|k| (k, master.gen())).collect();
            (shape_seed, n, trials)
        })
        .collect();
    let results: Vec<(usize, Vec<TrialFailure>)> = plans
        .par_iter()
        .map(|(shape_seed, n, trials)| {
            let shape = generate_random_shape(*shape_seed, *n);
            let mut done = 0;
            let mut failures = Vec::new();
            for &(k, rng_seed) in trials {
                let mut cfg = TrialConfig::new(&shape, k, rng_seed);
                cfg.check_every_step = config.check_every_step;
                cfg.ablate_special_condition = config.ablate_special_condition;
                let reason = match run_trial_logged(&cfg) {
                    Ok((r, _)) if r.completed => {
                        done += 1;
                        continue;
                    }
                    Ok((r, _)) => match r.invariant_failures.first() {
                        Some(v) => v.to_string(),
                        None => format!("step limit reached with {} robots", r.robots_placed),
                    },
                    Err(e) => e.to_string(),
                };
                failures.push(TrialFailure {
                    shape_seed: *shape_seed,
                    n_cells: *n,
                    attachments_per_step: k,
                    rng_seed,
                    reason,
                });
            }
            (done, failures)
        })
        .collect();
    let trials = plans.iter().map(|p| p.2.len()).sum();
    let mut report = MonteCarloReport {
        trials,
        completed: 0,
        failures: Vec::new(),
        wall_time_seconds: 0.0,
    };
    for (done, failures) in results {
        report.completed += done;
        report.failures.extend(failures);
    }
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexgrid::HexCoord;

    #[test]
    fn single_cell_completes_at_step_zero() {
        let shape = ShapeSpec::from_cells([HexCoord::ORIGIN]).unwrap();
        let (r, events) = run_trial_logged(&TrialConfig::new(&shape, 1, 0)).unwrap();
        assert!(r.completed);
        assert_eq!(r.steps_used, 0);
        assert_eq!(r.robots_placed, 1);
        assert!(events.is_empty());
    }

    #[test]
    fn config_validation() {
        let shape = ShapeSpec::from_cells([HexCoord::ORIGIN, HexCoord::new(0, 1)]).unwrap();
        assert!(matches!(
            run_trial(&TrialConfig::new(&shape, 0, 0)),
            Err(SimError::InvalidAttachments(0))
        ));
        assert!(matches!(
            run_trial(&TrialConfig::new(&shape, 5, 0)),
            Err(SimError::InvalidAttachments(5))
        ));
        let mut cfg = TrialConfig::new(&shape, 1, 0);
        cfg.max_steps = 1;
        assert!(matches!(run_trial(&cfg), Err(SimError::InvalidStepLimit { .. })));
    }

    #[test]
    fn deterministic_event_log() {
        let shape = generate_random_shape(7, 90);
        for k in 1..=4 {
            let a = run_trial_logged(&TrialConfig::new(&shape, k, 99)).unwrap();
            let b = run_trial_logged(&TrialConfig::new(&shape, k, 99)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn one_attachment_per_step_takes_size_minus_one_steps() {
        let shape = generate_random_shape(3, 64);
        let r = run_trial(&TrialConfig::new(&shape, 1, 5)).unwrap();
        assert!(r.completed, "{:?}", r.invariant_failures);
        assert_eq!(r.steps_used, 63);
    }

    #[test]
    fn empty_sweep() {
        let cfg = MonteCarloConfig {
            n_shapes: 0,
            ..Default::default()
        };
        let r = run_monte_carlo(&cfg).unwrap();
        assert_eq!((r.trials, r.completed, r.failures.len()), (0, 0, 0));
    }
}
