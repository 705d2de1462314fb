use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

/// Limits on a search. Unlimited by default.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Maximum number of expanded search nodes.
    pub node_cap: Option<u64>,
    pub time_cap: Option<Duration>,
    /// Number of worker threads for top-level branches; `<= 1` runs inline.
    pub workers: usize,
    /// When false, parallel searches may return any witness instead of the
    /// canonical-first one.
    pub deterministic: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { node_cap: None, time_cap: None, workers: 1, deterministic: true }
    }
}

impl SearchBudget {
    pub fn nodes(cap: u64) -> Self {
        SearchBudget { node_cap: Some(cap), ..Default::default() }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Result of a search: found, provably absent, or given up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    /// The whole search space was explored.
    Exhausted,
    BudgetExhausted { nodes: u64 },
}

impl<T> Outcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Outcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Found(t) => Outcome::Found(f(t)),
            Outcome::Exhausted => Outcome::Exhausted,
            Outcome::BudgetExhausted { nodes } => Outcome::BudgetExhausted { nodes },
        }
    }
}

/// Budget ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Stop;

/// Shared node counter and deadline.
#[derive(Debug)]
pub(crate) struct Meter {
    nodes: AtomicU64,
    cap: Option<u64>,
    deadline: Option<Instant>,
}

impl Meter {
    pub fn new(budget: &SearchBudget) -> Self {
        Meter {
            nodes: AtomicU64::new(0),
            cap: budget.node_cap,
            deadline: budget.time_cap.map(|d| Instant::now() + d),
        }
    }

    pub fn tick(&self) -> Result<(), Stop> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.cap.is_some_and(|c| n > c) {
            return Err(Stop);
        }
        if n.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(Stop);
        }
        Ok(())
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn outcome<T>(&self, r: Result<Option<T>, Stop>) -> Outcome<T> {
        match r {
            Ok(Some(t)) => Outcome::Found(t),
            Ok(None) => Outcome::Exhausted,
            Err(Stop) => Outcome::BudgetExhausted { nodes: self.nodes() },
        }
    }
}

/// Runs `f` over `candidates` in order and returns the first success. With
/// several workers the candidates are split across a thread pool, each
/// worker carrying its own scratch state from `init`; in deterministic mode
/// the leftmost success still wins.
pub(crate) fn first_success<C, T, M>(
    candidates: &[C],
    budget: &SearchBudget,
    init: impl Fn() -> M + Sync + Send,
    f: impl Fn(&mut M, &C) -> Result<Option<T>, Stop> + Sync + Send,
) -> Result<Option<T>, Stop>
where
    C: Sync,
    T: Send,
{
    if budget.workers <= 1 || candidates.len() <= 1 {
        let mut scratch = init();
        for c in candidates {
            if let Some(t) = f(&mut scratch, c)? {
                return Ok(Some(t));
            }
        }
        return Ok(None);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(budget.workers)
        .build()
        .expect("thread pool");
    let hit = |r: &Result<Option<T>, Stop>| !matches!(r, Ok(None));
    let found = pool.install(|| {
        let it = candidates.par_iter().map_init(&init, |m, c| f(m, c));
        if budget.deterministic {
            it.find_first(hit)
        } else {
            it.find_any(hit)
        }
    });
    found.unwrap_or(Ok(None))
}
