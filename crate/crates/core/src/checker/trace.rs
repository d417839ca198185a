use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::StateGraph;
use crate::ta::{Snapshot, State, Step, System};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TraceAction {
    Delay { duration: u32 },
    Discrete { label: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(flatten)]
    pub action: TraceAction,
    /// State reached by the step.
    pub state: Snapshot,
}

/// A run from the initial state. Consecutive unit delays are merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub initial: Snapshot,
    pub steps: Vec<TraceStep>,
    /// Index into `steps` after which the run repeats: the state reached by
    /// the last step equals the state before step `loop_start`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loop_start: Option<usize>,
}

impl Trace {
    pub fn empty(sys: &System, s: &State) -> Trace {
        Trace {
            initial: sys.snapshot(s),
            steps: Vec::new(),
            loop_start: None,
        }
    }

    /// Number of discrete steps.
    pub fn discrete_len(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.action, TraceAction::Discrete { .. }))
            .count()
    }

    pub fn elapsed(&self) -> u32 {
        self.steps
            .iter()
            .map(|s| match s.action {
                TraceAction::Delay { duration } => duration,
                _ => 0,
            })
            .sum()
    }

    pub fn last(&self) -> &Snapshot {
        self.steps.last().map_or(&self.initial, |s| &s.state)
    }

    /// Appends a step, merging it into a preceding delay when both are delays.
    pub fn push(&mut self, sys: &System, step: &Step, to: &State) {
        let state = sys.snapshot(to);
        if let Step::Delay(d) = *step {
            let boundary = self.loop_start == Some(self.steps.len());
            if let Some(TraceStep {
                action: TraceAction::Delay { duration },
                state: last,
            }) = self.steps.last_mut()
            {
                if !boundary {
                    *duration += d;
                    *last = state;
                    return;
                }
            }
            self.steps.push(TraceStep {
                action: TraceAction::Delay { duration: d },
                state,
            });
        } else {
            self.steps.push(TraceStep {
                action: TraceAction::Discrete {
                    label: sys.step_label(step),
                },
                state,
            });
        }
    }

    /// Trace along graph transitions starting in state `from`.
    pub fn from_path(sys: &System, g: &StateGraph, from: u32, path: &[(Step, u32)]) -> Trace {
        let mut t = Trace::empty(sys, &g.states[from as usize]);
        for (step, to) in path {
            t.push(sys, step, &g.states[*to as usize]);
        }
        t
    }

    /// Human-readable timeline.
    pub fn timeline(&self) -> String {
        let mut out = String::new();
        let mut now = 0u32;
        let _ = fmt::Write::write_fmt(
            &mut out,
            format_args!("t={now:>4}  start  {}\n", brief(&self.initial)),
        );
        for (i, s) in self.steps.iter().enumerate() {
            if self.loop_start == Some(i) {
                out.push_str("        -- loop --\n");
            }
            let what = match &s.action {
                TraceAction::Delay { duration } => {
                    now += duration;
                    format!("delay {duration}")
                }
                TraceAction::Discrete { label } => label.clone(),
            };
            let _ = fmt::Write::write_fmt(
                &mut out,
                format_args!("t={now:>4}  {what}  {}\n", brief(&s.state)),
            );
        }
        out
    }
}

fn brief(s: &Snapshot) -> String {
    let locs: Vec<String> = s
        .locations
        .iter()
        .map(|(a, l)| format!("{a}.{l}"))
        .collect();
    let clocks: Vec<String> = s.clocks.iter().map(|(c, v)| format!("{c}={v}")).collect();
    format!("[{}] {}", locs.join(" "), clocks.join(" "))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("initial snapshot does not match the network's initial state")]
    Initial,
    #[error("step {index}: `{label}` is not enabled")]
    Disabled { index: usize, label: String },
    #[error("step {index}: reached state differs from the recorded snapshot")]
    Mismatch { index: usize },
    #[error("loop does not close")]
    OpenLoop,
}

/// Re-executes a trace and compares every snapshot.
pub fn replay(sys: &System, trace: &Trace) -> Result<(), ReplayError> {
    let mut s = sys.initial_state();
    if sys.snapshot(&s) != trace.initial {
        return Err(ReplayError::Initial);
    }
    let mut before = vec![s.clone()];
    for (index, step) in trace.steps.iter().enumerate() {
        let next = match &step.action {
            TraceAction::Delay { duration } => {
                (0..*duration).try_fold(s.clone(), |cur, _| sys.delay_successor(&cur, 1))
            }
            TraceAction::Discrete { label } => sys
                .discrete_successors(&s)
                .into_iter()
                .find(|(m, n)| sys.move_label(m) == *label && sys.snapshot(n) == step.state)
                .map(|(_, n)| n),
        };
        let next = next.ok_or_else(|| ReplayError::Disabled {
            index,
            label: match &step.action {
                TraceAction::Delay { duration } => format!("delay {duration}"),
                TraceAction::Discrete { label } => label.clone(),
            },
        })?;
        if sys.snapshot(&next) != step.state {
            return Err(ReplayError::Mismatch { index });
        }
        s = next;
        before.push(s.clone());
    }
    if let Some(l) = trace.loop_start {
        if before.get(l) != Some(&s) {
            return Err(ReplayError::OpenLoop);
        }
    }
    Ok(())
}
