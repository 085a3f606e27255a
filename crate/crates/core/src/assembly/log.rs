//! JSON-lines event log and offline replay.
//!
//! Signals broadcast on step `t` are logged with step `t`; robots docking in
//! response exist from step `t + 1` and are logged with that step. The root
//! is implicit: robot 0 at the origin on step 0.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AssemblyState, Checker, Violation};
use crate::hexgrid::{HexCoord, Wall};
use crate::protocol::{RobotId, SignalOptions, WallSet};
use crate::shape::ShapeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachRecord {
    pub step: u64,
    pub id: u32,
    pub p: i32,
    pub q: i32,
    pub admitting_id: u32,
    pub occupied_neighbor_count: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalEntry {
    pub id: u32,
    pub wall: Wall,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalRecord {
    pub step: u64,
    pub signals: Vec<SignalEntry>,
}

impl SignalRecord {
    pub fn from_sets(step: u64, sets: &[(RobotId, WallSet)]) -> Self {
        let signals = sets
            .iter()
            .flat_map(|&(id, ws)| ws.iter().map(move |wall| SignalEntry { id: id.0, wall }))
            .collect();
        Self { step, signals }
    }

    pub fn to_sets(&self) -> Vec<(RobotId, WallSet)> {
        let mut out: Vec<(RobotId, WallSet)> = Vec::new();
        for e in &self.signals {
            match out.iter_mut().find(|(id, _)| id.0 == e.id) {
                Some((_, ws)) => ws.insert(e.wall),
                None => out.push((RobotId(e.id), WallSet::from([e.wall]))),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Event {
    Attach(AttachRecord),
    Signals(SignalRecord),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("bad log at record {record}: {msg}")]
    BadLog { record: usize, msg: String },
    #[error("step {requested} is past the final step {last}")]
    StepOutOfRange { requested: u64, last: u64 },
    #[error("{0}")]
    Violation(Violation),
}

impl LogError {
    fn bad(record: usize, msg: impl Into<String>) -> Self {
        LogError::BadLog {
            record,
            msg: msg.into(),
        }
    }
}

/// Parse JSON lines; blank lines are skipped.
pub fn read_event_log(text: &str) -> Result<Vec<Event>, LogError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ev = serde_json::from_str(line).map_err(|e| LogError::bad(i + 1, e.to_string()))?;
        out.push(ev);
    }
    Ok(out)
}

pub fn write_event_log(events: &[Event], mut out: impl Write) -> io::Result<()> {
    for ev in events {
        serde_json::to_writer(&mut out, ev)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayOptions {
    /// Recompute every signal round and require it to match the log.
    pub strict: bool,
    pub signal_options: SignalOptions,
    /// Run all checkers after every step.
    pub check_every_step: bool,
    /// Stop once the assembly reaches this step.
    pub until_step: Option<u64>,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            strict: false,
            signal_options: SignalOptions::default(),
            check_every_step: true,
            until_step: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplaySummary<'s> {
    pub state: AssemblyState<'s>,
    /// Signals broadcast on the state's step, if logged.
    pub signals: Vec<(RobotId, WallSet)>,
    pub completed: bool,
}

/// Rebuild the assembly from its log, checking every attachment against the
/// logged signals and running the checkers step by step.
pub fn replay<'s>(shape: &'s ShapeSpec, events: &[Event], opts: ReplayOptions) -> Result<ReplaySummary<'s>, LogError> {
    let mut state = AssemblyState::new(shape).map_err(|e| LogError::bad(0, e.to_string()))?;
    let check = |state: &AssemblyState| -> Result<(), LogError> {
        if opts.check_every_step {
            state.check_all().map_err(LogError::Violation)?;
        }
        Ok(())
    };
    check(&state)?;
    // signals of the current step have been seen
    let mut signaled = false;
    let mut last_signals: Vec<(RobotId, WallSet)> = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        let record = i + 1;
        match ev {
            Event::Signals(rec) => {
                if signaled {
                    if rec.step != state.step() + 1 {
                        return Err(LogError::bad(record, format!("expected step {}", state.step() + 1)));
                    }
                    state.advance_step();
                    check(&state)?;
                } else if rec.step != state.step() {
                    return Err(LogError::bad(record, format!("expected step {}", state.step())));
                }
                let sets = rec.to_sets();
                for (id, _) in &sets {
                    if state.robot(*id).is_none() {
                        return Err(LogError::bad(record, format!("unknown robot {id}")));
                    }
                }
                if opts.strict {
                    let expected = state
                        .compute_signals(opts.signal_options)
                        .map_err(|e| LogError::bad(record, e.to_string()))?;
                    if SignalRecord::from_sets(rec.step, &expected) != SignalRecord::from_sets(rec.step, &sets) {
                        return Err(LogError::Violation(Violation {
                            step: rec.step,
                            checker: Checker::Signals,
                            detail: "logged signals differ from the protocol's".into(),
                            positions: Vec::new(),
                        }));
                    }
                }
                state.set_signals(sets.iter().copied());
                last_signals = sets;
                signaled = true;
                if opts.until_step == Some(state.step()) {
                    return Ok(finish(state, last_signals));
                }
            }
            Event::Attach(rec) => {
                if !signaled || rec.step != state.step() + 1 {
                    return Err(LogError::bad(record, "attachment without a preceding signal round"));
                }
                if rec.id as usize != state.len() {
                    return Err(LogError::bad(record, format!("expected robot id {}", state.len())));
                }
                let pos = HexCoord::new(rec.p, rec.q);
                if state.occupied_neighbor_count(pos) != rec.occupied_neighbor_count as usize {
                    return Err(LogError::bad(record, format!("neighbor count mismatch at {pos}")));
                }
                state.attach(pos, RobotId(rec.admitting_id)).map_err(|e| {
                    LogError::Violation(Violation {
                        step: rec.step,
                        checker: e.checker(),
                        detail: e.to_string(),
                        positions: vec![pos],
                    })
                })?;
            }
        }
    }
    if signaled {
        if last_signals.is_empty() && !state.check_complete() {
            return Err(LogError::Violation(Violation {
                step: state.step(),
                checker: Checker::Deadlock,
                detail: "no robot signals while the shape is incomplete".into(),
                positions: Vec::new(),
            }));
        }
        state.advance_step();
        check(&state)?;
        last_signals.clear();
    }
    if let Some(t) = opts.until_step {
        if t != state.step() {
            return Err(LogError::StepOutOfRange {
                requested: t,
                last: state.step(),
            });
        }
    } else if !state.check_complete() {
        return Err(LogError::bad(events.len(), "log ends before the shape is complete"));
    }
    Ok(finish(state, last_signals))
}

fn finish(state: AssemblyState<'_>, signals: Vec<(RobotId, WallSet)>) -> ReplaySummary<'_> {
    let completed = state.check_complete();
    ReplaySummary {
        state,
        signals,
        completed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_serialize_flat() {
        let a = Event::Attach(AttachRecord {
            step: 1,
            id: 1,
            p: 0,
            q: 1,
            admitting_id: 0,
            occupied_neighbor_count: 1,
        });
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"step":1,"id":1,"p":0,"q":1,"admitting_id":0,"occupied_neighbor_count":1}"#
        );
        let s = Event::Signals(SignalRecord {
            step: 0,
            signals: vec![SignalEntry { id: 0, wall: Wall::F }],
        });
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"step":0,"signals":[{"id":0,"wall":"F"}]}"#);
        assert_eq!(read_event_log(&text).unwrap(), vec![s]);
    }

    #[test]
    fn two_cell_log_replays() {
        let shape = ShapeSpec::from_cells([HexCoord::ORIGIN, HexCoord::new(0, 1)]).unwrap();
        let text = "{\"step\":0,\"signals\":[{\"id\":0,\"wall\":\"F\"}]}\n\
                    {\"step\":1,\"id\":1,\"p\":0,\"q\":1,\"admitting_id\":0,\"occupied_neighbor_count\":1}\n";
        let events = read_event_log(text).unwrap();
        let opts = ReplayOptions {
            strict: true,
            ..Default::default()
        };
        let r = replay(&shape, &events, opts).unwrap();
        assert!(r.completed);
        assert_eq!(r.state.step(), 1);
        // truncated
        let err = replay(&shape, &events[..1], opts).unwrap_err();
        assert!(matches!(err, LogError::BadLog { .. }));
        // attachment with no signal
        let err = replay(&shape, &events[1..], opts).unwrap_err();
        assert!(matches!(err, LogError::BadLog { record: 1, .. }));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(matches!(
            read_event_log("{\"step\":0}\n"),
            Err(LogError::BadLog { record: 1, .. })
        ));
        assert!(matches!(
            read_event_log("\n{oops"),
            Err(LogError::BadLog { record: 2, .. })
        ));
    }
}
