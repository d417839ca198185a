use std::collections::{BTreeMap, BTreeSet};

use crate::ta::{Edge, Sync, TimedAutomaton};

/// Observable label of an edge; `None` for silent edges.
pub fn edge_label(e: &Edge) -> Option<String> {
    let mut parts = Vec::new();
    if e.sync != Sync::Internal {
        parts.push(e.sync.to_string());
    }
    if !e.guard.is_true() {
        parts.push(format!("[{}]", e.guard));
    }
    let mut ups: Vec<String> = e.updates.iter().map(ToString::to_string).collect();
    ups.extend(e.resets.iter().map(|r| format!("{r}=0")));
    ups.sort();
    if !ups.is_empty() {
        parts.push(format!("{{{}}}", ups.join(",")));
    }
    (!parts.is_empty()).then(|| parts.join(" "))
}

struct Lts {
    states: Vec<String>,
    initial: usize,
    /// Silent closure of every state.
    tau: Vec<BTreeSet<usize>>,
    /// `(label, target)` for observable edges.
    moves: Vec<Vec<(String, usize)>>,
}

impl Lts {
    fn new(a: &TimedAutomaton) -> Lts {
        let states: Vec<String> = a.locations.iter().map(|l| l.id.clone()).collect();
        let idx: BTreeMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let n = states.len();
        let mut silent = vec![Vec::new(); n];
        let mut moves = vec![Vec::new(); n];
        for e in &a.edges {
            let (s, t) = (idx[e.source.as_str()], idx[e.target.as_str()]);
            match edge_label(e) {
                Some(l) => moves[s].push((l, t)),
                None => silent[s].push(t),
            }
        }
        let tau = (0..n)
            .map(|s| {
                let mut seen = BTreeSet::from([s]);
                let mut stack = vec![s];
                while let Some(x) = stack.pop() {
                    for &y in &silent[x] {
                        if seen.insert(y) {
                            stack.push(y);
                        }
                    }
                }
                seen
            })
            .collect();
        Lts {
            initial: idx[a.initial.as_str()],
            states,
            tau,
            moves,
        }
    }

    /// States reachable by `τ* a τ*`, or `τ*` for `None`.
    fn weak(&self, s: usize, label: Option<&str>) -> BTreeSet<usize> {
        let Some(l) = label else {
            return self.tau[s].clone();
        };
        let mut out = BTreeSet::new();
        for &x in &self.tau[s] {
            for (m, y) in &self.moves[x] {
                if m == l {
                    out.extend(self.tau[*y].iter().copied());
                }
            }
        }
        out
    }

    /// Single steps: observable moves and silent edges.
    fn steps(&self, s: usize) -> Vec<(Option<String>, usize)> {
        let mut out: Vec<(Option<String>, usize)> = self.moves[s]
            .iter()
            .map(|(l, t)| (Some(l.clone()), *t))
            .collect();
        for &t in &self.tau[s] {
            if t != s {
                out.push((None, t));
            }
        }
        out
    }
}

fn simulates(
    a: &Lts,
    b: &Lts,
    rel: &BTreeSet<(usize, usize)>,
    p: usize,
    q: usize,
    flip: bool,
) -> bool {
    a.steps(p).into_iter().all(|(l, p2)| {
        b.weak(q, l.as_deref()).into_iter().any(|q2| {
            let pair = if flip { (q2, p2) } else { (p2, q2) };
            rel.contains(&pair)
        })
    })
}

/// Greatest weak bisimulation between the location graphs of two automata
/// (edge labels: sync, guard and updates). Returns the related pairs of
/// location names, or `None` when the initial locations are not related.
pub fn weak_bisimulation(a: &TimedAutomaton, b: &TimedAutomaton) -> Option<Vec<(String, String)>> {
    let (la, lb) = (Lts::new(a), Lts::new(b));
    let mut rel: BTreeSet<(usize, usize)> = (0..la.states.len())
        .flat_map(|p| (0..lb.states.len()).map(move |q| (p, q)))
        .collect();
    loop {
        let drop: Vec<(usize, usize)> = rel
            .iter()
            .copied()
            .filter(|&(p, q)| {
                !simulates(&la, &lb, &rel, p, q, false) || !simulates(&lb, &la, &rel, q, p, true)
            })
            .collect();
        if drop.is_empty() {
            break;
        }
        for d in drop {
            rel.remove(&d);
        }
    }
    rel.contains(&(la.initial, lb.initial)).then(|| {
        rel.into_iter()
            .map(|(p, q)| (la.states[p].clone(), lb.states[q].clone()))
            .collect()
    })
}

pub fn weakly_bisimilar(a: &TimedAutomaton, b: &TimedAutomaton) -> bool {
    weak_bisimulation(a, b).is_some()
}
