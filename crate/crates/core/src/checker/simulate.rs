use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::trace::Trace;
use crate::ta::{Move, Step, System};

/// One scheduled resolution of nondeterminism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Choice {
    Delay(u32),
    /// A discrete move named by an edge (`door.unlocking->opening`), by a
    /// channel, or by either edge of a synchronization.
    Take(String),
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choice::Delay(d) => write!(f, "delay {d}"),
            Choice::Take(p) => f.write_str(p),
        }
    }
}

impl FromStr for Choice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(d) = s.strip_prefix("delay") {
            return d
                .trim()
                .parse()
                .map(Choice::Delay)
                .map_err(|_| format!("bad delay `{s}`"));
        }
        if s.is_empty() {
            return Err("empty choice".into());
        }
        Ok(Choice::Take(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("schedule step {index} (`{choice}`) is not enabled")]
    Disabled { index: usize, choice: String },
}

pub fn move_matches(sys: &System, mv: &Move, pattern: &str) -> bool {
    match *mv {
        Move::Internal { automaton, edge } => sys.edge_text(automaton, edge) == pattern,
        Move::Sync {
            channel,
            sender,
            receiver,
        } => {
            sys.channel_names()[channel] == pattern
                || sys.edge_text(sender.0, sender.1) == pattern
                || sys.edge_text(receiver.0, receiver.1) == pattern
        }
    }
}

/// Runs the schedule, then `steps - schedule.len()` uniformly random steps
/// (fewer if a state without successors is reached).
pub fn simulate(
    sys: &System,
    steps: usize,
    seed: u64,
    schedule: &[Choice],
) -> Result<Trace, SimError> {
    let mut s = sys.initial_state();
    let mut trace = Trace::empty(sys, &s);
    for (index, choice) in schedule.iter().enumerate() {
        let disabled = || SimError::Disabled {
            index,
            choice: choice.to_string(),
        };
        match choice {
            Choice::Delay(d) => {
                for _ in 0..*d {
                    s = sys.delay_successor(&s, 1).ok_or_else(disabled)?;
                    trace.push(sys, &Step::Delay(1), &s);
                }
            }
            Choice::Take(pattern) => {
                let (mv, next) = sys
                    .discrete_successors(&s)
                    .into_iter()
                    .find(|(m, _)| move_matches(sys, m, pattern))
                    .ok_or_else(disabled)?;
                trace.push(sys, &Step::Discrete(mv), &next);
                s = next;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in schedule.len()..steps {
        let mut succ = sys.successors(&s);
        if succ.is_empty() {
            break;
        }
        let (step, next) = succ.swap_remove(rng.gen_range(0..succ.len()));
        trace.push(sys, &step, &next);
        s = next;
    }
    Ok(trace)
}
