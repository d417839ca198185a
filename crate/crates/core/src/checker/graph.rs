use std::collections::HashMap;

use crate::ta::{State, Step, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreOptions {
    /// Maximum number of stored states.
    pub bound: usize,
    /// Threads used to expand a BFS level. 1 keeps everything on the
    /// calling thread.
    pub workers: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            bound: 5_000_000,
            workers: 1,
        }
    }
}

/// Reachable state graph in BFS discovery order. State 0 is the initial one.
#[derive(Debug, Clone)]
pub struct StateGraph {
    pub states: Vec<State>,
    /// Outgoing transitions of each state, in successor order.
    pub succ: Vec<Vec<(Step, u32)>>,
    /// BFS tree: the transition that discovered each state.
    pub parent: Vec<Option<(u32, Step)>>,
    /// Some successor was dropped because the bound was reached.
    pub truncated: bool,
    pub depth: usize,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut pred = vec![Vec::new(); self.states.len()];
        for (s, out) in self.succ.iter().enumerate() {
            for &(_, t) in out {
                pred[t as usize].push(s as u32);
            }
        }
        pred
    }

    /// Transitions from the initial state to `id` along the BFS tree.
    pub fn path_to(&self, id: u32) -> Vec<(Step, u32)> {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some((p, step)) = self.parent[cur as usize] {
            path.push((step, cur));
            cur = p;
        }
        path.reverse();
        path
    }
}

type Expansion = Vec<(Step, State)>;

/// Successor computation for a BFS level, on the calling thread or on a
/// private pool.
enum Expander {
    Sequential,
    #[cfg(feature = "parallel")]
    Pool(rayon::ThreadPool),
}

impl Expander {
    fn new(workers: usize) -> Expander {
        #[cfg(feature = "parallel")]
        if workers > 1 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                return Expander::Pool(pool);
            }
        }
        let _ = workers;
        Expander::Sequential
    }

    fn expand(&self, sys: &System, states: &[State], frontier: &[u32]) -> Vec<Expansion> {
        match self {
            Expander::Sequential => frontier
                .iter()
                .map(|&id| sys.successors(&states[id as usize]))
                .collect(),
            #[cfg(feature = "parallel")]
            Expander::Pool(pool) => {
                use rayon::prelude::*;
                pool.install(|| {
                    frontier
                        .par_iter()
                        .map(|&id| sys.successors(&states[id as usize]))
                        .collect()
                })
            }
        }
    }
}

/// Level-synchronous breadth-first exploration. Successors of a level may be
/// computed concurrently; they are merged in frontier order so the numbering
/// of states does not depend on the number of workers.
pub fn explore(sys: &System, opts: ExploreOptions) -> StateGraph {
    let bound = opts.bound.max(1);
    let init = sys.initial_state();
    let mut index: HashMap<State, u32> = HashMap::new();
    index.insert(init.clone(), 0);
    let mut g = StateGraph {
        states: vec![init],
        succ: vec![Vec::new()],
        parent: vec![None],
        truncated: false,
        depth: 0,
    };
    let expander = Expander::new(opts.workers);
    let mut frontier = vec![0u32];
    while !frontier.is_empty() {
        let expansions = expander.expand(sys, &g.states, &frontier);
        let mut next = Vec::new();
        for (&src, succs) in frontier.iter().zip(expansions) {
            let mut out = Vec::with_capacity(succs.len());
            for (step, s) in succs {
                let id = match index.get(&s) {
                    Some(&id) => id,
                    None if g.states.len() < bound => {
                        let id = g.states.len() as u32;
                        index.insert(s.clone(), id);
                        g.states.push(s);
                        g.succ.push(Vec::new());
                        g.parent.push(Some((src, step)));
                        next.push(id);
                        id
                    }
                    None => {
                        g.truncated = true;
                        continue;
                    }
                };
                out.push((step, id));
            }
            g.succ[src as usize] = out;
        }
        if !next.is_empty() {
            g.depth += 1;
        }
        frontier = next;
    }
    g
}
