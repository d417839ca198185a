use std::collections::VecDeque;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::graph::{explore, ExploreOptions, StateGraph};
use super::trace::Trace;
use crate::contracts::Facet;
use crate::props::{CheckableQuery, Pred, QueryKind};
use crate::ta::{Step, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Violated,
    WitnessFound,
    WitnessAbsent,
    /// An implication that holds only because its antecedent is unreachable.
    Vacuous,
    /// The graph was truncated and the answer depends on the missing part.
    Inconclusive,
}

impl Outcome {
    pub fn is_success(self) -> bool {
        matches!(
            self,
            Outcome::Holds | Outcome::WitnessFound | Outcome::Vacuous
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Violated => "violated",
            Outcome::WitnessFound => "witness-found",
            Outcome::WitnessAbsent => "witness-absent",
            Outcome::Vacuous => "vacuous",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facet: Option<Facet>,
    pub query: String,
    pub result: Outcome,
    pub states: usize,
    pub transitions: usize,
    pub time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
}

/// First state (in BFS order) satisfying `p`.
fn first(g: &StateGraph, p: &Pred) -> Option<u32> {
    g.states.iter().position(|s| p.eval(s)).map(|i| i as u32)
}

/// Shortest path from `from` to some state satisfying `target`.
fn shortest_to(g: &StateGraph, from: u32, target: &[bool]) -> Option<Vec<(Step, u32)>> {
    let mut prev: Vec<Option<(u32, Step)>> = vec![None; g.len()];
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::from([from]);
    seen[from as usize] = true;
    while let Some(s) = queue.pop_front() {
        if target[s as usize] {
            let mut path = Vec::new();
            let mut cur = s;
            while let Some((p, step)) = prev[cur as usize] {
                path.push((step, cur));
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &(step, t) in &g.succ[s as usize] {
            if !seen[t as usize] {
                seen[t as usize] = true;
                prev[t as usize] = Some((s, step));
                queue.push_back(t);
            }
        }
    }
    None
}

/// States from which some state in `target` is reachable.
pub fn backward_reach(g: &StateGraph, target: &[bool]) -> Vec<bool> {
    let pred = g.predecessors();
    let mut mark = target.to_vec();
    let mut stack: Vec<u32> = (0..g.len() as u32)
        .filter(|&i| target[i as usize])
        .collect();
    while let Some(s) = stack.pop() {
        for &p in &pred[s as usize] {
            if !mark[p as usize] {
                mark[p as usize] = true;
                stack.push(p);
            }
        }
    }
    mark
}

/// Least fixpoint of `AF q`: every path from the state meets `q`. States
/// without successors only qualify if they satisfy `q` themselves.
pub fn inevitable(g: &StateGraph, q: &[bool]) -> Vec<bool> {
    let pred = g.predecessors();
    let mut pending: Vec<usize> = g.succ.iter().map(Vec::len).collect();
    let mut mark = q.to_vec();
    let mut stack: Vec<u32> = (0..g.len() as u32).filter(|&i| q[i as usize]).collect();
    while let Some(s) = stack.pop() {
        for &p in &pred[s as usize] {
            let p = p as usize;
            if mark[p] {
                continue;
            }
            // One decrement per edge, so parallel edges are counted correctly.
            pending[p] -= 1;
            if pending[p] == 0 {
                mark[p] = true;
                stack.push(p as u32);
            }
        }
    }
    mark
}

fn eval_all(g: &StateGraph, p: &Pred) -> Vec<bool> {
    g.states.iter().map(|s| p.eval(s)).collect()
}

/// Path from `start` avoiding `good` states until it gets stuck or closes a
/// cycle. Returns the path and, for a cycle, the index where it starts.
fn escape(g: &StateGraph, start: u32, good: &[bool]) -> (Vec<(Step, u32)>, Option<usize>) {
    let mut path = Vec::new();
    let mut pos = vec![usize::MAX; g.len()];
    let mut cur = start;
    pos[cur as usize] = 0;
    loop {
        let Some(&(step, next)) = g.succ[cur as usize]
            .iter()
            .find(|(_, t)| !good[*t as usize])
        else {
            return (path, None);
        };
        path.push((step, next));
        if pos[next as usize] != usize::MAX {
            return (path, Some(pos[next as usize]));
        }
        pos[next as usize] = path.len();
        cur = next;
    }
}

/// Outcome and evidence of one query on an explored graph.
pub fn evaluate(sys: &System, g: &StateGraph, query: &CheckableQuery) -> (Outcome, Option<Trace>) {
    let trace_to = |id: u32| Trace::from_path(sys, g, 0, &g.path_to(id));
    match &query.kind {
        QueryKind::Invariant(p) => {
            if let Some(bad) = g.states.iter().position(|s| !p.eval(s)) {
                return (Outcome::Violated, Some(trace_to(bad as u32)));
            }
            if g.truncated {
                return (Outcome::Inconclusive, None);
            }
            match &query.vacuity {
                Some(v) if first(g, v).is_none() => (Outcome::Vacuous, None),
                _ => (Outcome::Holds, None),
            }
        }
        QueryKind::Reachable(p) => match first(g, p) {
            Some(id) => (Outcome::WitnessFound, Some(trace_to(id))),
            None if g.truncated => (Outcome::Inconclusive, None),
            None => (Outcome::WitnessAbsent, None),
        },
        QueryKind::BoundedWitness { trigger, response } => {
            let q = eval_all(g, response);
            let can = backward_reach(g, &q);
            let hit = (0..g.len()).find(|&i| can[i] && trigger.eval(&g.states[i]));
            match hit {
                Some(id) => {
                    let mut path = g.path_to(id as u32);
                    path.extend(shortest_to(g, id as u32, &q).expect("response reachable"));
                    (
                        Outcome::WitnessFound,
                        Some(Trace::from_path(sys, g, 0, &path)),
                    )
                }
                None if g.truncated => (Outcome::Inconclusive, None),
                None => (Outcome::WitnessAbsent, None),
            }
        }
        QueryKind::LeadsTo { trigger, response } => {
            let q = eval_all(g, response);
            let af = inevitable(g, &q);
            let bad = (0..g.len()).find(|&i| !af[i] && trigger.eval(&g.states[i]));
            match bad {
                Some(id) if !g.truncated => {
                    let mut path = g.path_to(id as u32);
                    let prefix = path.len();
                    let (tail, cycle) = escape(g, id as u32, &af);
                    path.extend(tail);
                    let mut t = Trace::empty(sys, &g.states[0]);
                    let loop_at = cycle.map(|c| prefix + c);
                    for (i, (step, to)) in path.iter().enumerate() {
                        if loop_at == Some(i) {
                            t.loop_start = Some(t.steps.len());
                        }
                        t.push(sys, step, &g.states[*to as usize]);
                    }
                    (Outcome::Violated, Some(t))
                }
                _ if g.truncated => (Outcome::Inconclusive, None),
                _ => (Outcome::Holds, None),
            }
        }
    }
}

pub fn check(sys: &System, g: &StateGraph, query: &CheckableQuery) -> Verdict {
    let start = Instant::now();
    let (result, trace) = evaluate(sys, g, query);
    Verdict {
        property: query.name.clone(),
        facet: query.facet,
        query: query.kind.label().to_string(),
        result,
        states: g.len(),
        transitions: g.transitions(),
        time_ms: start.elapsed().as_millis() as u64,
        note: None,
        trace,
    }
}

/// Raises clock ceilings for every constant the queries use, so that the
/// normalized graph can distinguish them.
pub fn prepare(sys: &mut System, queries: &[CheckableQuery]) {
    for q in queries {
        for (clock, k) in q.clock_constants() {
            sys.raise_ceiling(clock, k);
        }
    }
}

/// Explores once and checks every query.
pub fn check_all(
    sys: &mut System,
    queries: &[CheckableQuery],
    opts: ExploreOptions,
) -> (StateGraph, Vec<Verdict>) {
    prepare(sys, queries);
    let g = explore(sys, opts);
    let verdicts = queries.iter().map(|q| check(sys, &g, q)).collect();
    (g, verdicts)
}
