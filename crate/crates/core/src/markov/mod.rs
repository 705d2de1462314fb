//! Finite-state Markov systems over an alphabet: the Markov operator,
//! structural validators, path reachability, the recurrence functions
//! `φ_r`, root search for product trees, and the labelled-tree system.

mod labelled;

use std::collections::BTreeSet;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::semigroup::{Alphabet, Level};

pub use labelled::{labelled_tree_system, mu_n_exact, mu_n_monte_carlo, LabelledTreeFrame, LabelledTreeSystem};

/// A set of states.
pub type StateSet = BTreeSet<usize>;

/// `(M, T, p)` on `M = {0, .., m-1}`: `T_λ` and `p_λ` for each letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMarkovSystem {
    alphabet: Alphabet,
    states: usize,
    transitions: Vec<Vec<usize>>,
    probabilities: Vec<Vec<BigRational>>,
}

impl FiniteMarkovSystem {
    /// `transitions[λ][x] = T_λ x`, `probabilities[λ][x] = p_λ(x)`.
    pub fn new(alphabet: Alphabet, transitions: Vec<Vec<usize>>, probabilities: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = alphabet.size();
        if transitions.len() != k || probabilities.len() != k {
            return Err(Error::InvalidSystem(format!("expected {k} transition maps and probability functions")));
        }
        let m = transitions[0].len();
        if m == 0 {
            return Err(Error::InvalidSystem("state space is empty".into()));
        }
        for (l, (t, p)) in transitions.iter().zip(&probabilities).enumerate() {
            if t.len() != m || p.len() != m {
                return Err(Error::InvalidSystem(format!("letter {l}: expected {m} entries")));
            }
            if let Some(x) = t.iter().find(|&&x| x >= m) {
                return Err(Error::InvalidSystem(format!("letter {l}: target {x} out of range")));
            }
            if p.iter().any(|q| q.is_negative() || q > &BigRational::one()) {
                return Err(Error::InvalidSystem(format!("letter {l}: probability outside [0,1]")));
            }
        }
        for x in 0..m {
            let total: BigRational = probabilities.iter().map(|p| &p[x]).sum();
            if !total.is_one() {
                return Err(Error::InvalidSystem(format!("probabilities at state {x} sum to {total}")));
            }
        }
        Ok(FiniteMarkovSystem { alphabet, states: m, transitions, probabilities })
    }

    /// Constant probabilities `p` for every state.
    pub fn with_constant_probabilities(alphabet: Alphabet, transitions: Vec<Vec<usize>>, p: &[BigRational]) -> Result<Self> {
        let m = transitions.first().map_or(0, Vec::len);
        let probabilities = p.iter().map(|q| vec![q.clone(); m]).collect();
        FiniteMarkovSystem::new(alphabet, transitions, probabilities)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn target(&self, letter: u8, x: usize) -> usize {
        self.transitions[letter as usize][x]
    }

    pub fn probability(&self, letter: u8, x: usize) -> &BigRational {
        &self.probabilities[letter as usize][x]
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.transitions
    }

    pub fn probabilities(&self) -> &[Vec<BigRational>] {
        &self.probabilities
    }

    /// `T_λ(M)`.
    pub fn image(&self, letter: u8) -> StateSet {
        self.transitions[letter as usize].iter().copied().collect()
    }

    /// Every `p_λ` is somewhere positive.
    pub fn is_non_degenerate(&self) -> bool {
        self.probabilities.iter().all(|p| p.iter().any(|q| q.is_positive()))
    }

    /// The images `T_λ(M)` are pairwise disjoint.
    pub fn has_disjoint_images(&self) -> bool {
        let mut seen = vec![false; self.states];
        for l in self.alphabet.letters() {
            for x in self.image(l) {
                if seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        true
    }

    pub fn has_constant_probabilities(&self) -> bool {
        self.probabilities.iter().all(|p| p.iter().all(|q| q == &p[0]))
    }

    /// Whether `S(T_λ x) = x` whenever `p_λ(x) > 0`.
    pub fn is_endomorphic(&self, s: &[usize]) -> Result<bool> {
        if s.len() != self.states {
            return Err(Error::DimensionMismatch { expected: self.states, got: s.len() });
        }
        Ok(self.alphabet.letters().all(|l| {
            (0..self.states).all(|x| !self.probability(l, x).is_positive() || s.get(self.target(l, x)) == Some(&x))
        }))
    }
}

/// A rational-valued function on states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateFunction(pub Vec<BigRational>);

impl StateFunction {
    pub fn constant(states: usize, c: BigRational) -> Self {
        StateFunction(vec![c; states])
    }

    pub fn indicator(states: usize, set: &StateSet) -> Self {
        StateFunction((0..states).map(|x| if set.contains(&x) { BigRational::one() } else { BigRational::zero() }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sup_norm(&self) -> BigRational {
        self.0.iter().map(|v| v.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// `{x : f(x) > 0}`.
    pub fn support(&self) -> StateSet {
        self.0.iter().enumerate().filter(|(_, v)| v.is_positive()).map(|(x, _)| x).collect()
    }

    /// Mean over states.
    pub fn mean(&self) -> BigRational {
        let total: BigRational = self.0.iter().sum();
        total / BigRational::from_integer(self.0.len().into())
    }

    /// Pointwise product.
    pub fn times(&self, other: &StateFunction) -> StateFunction {
        StateFunction(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
}

/// `(Pf)(x) = Σ_λ p_λ(x) f(T_λ x)`, exactly.
pub fn markov_apply(sys: &FiniteMarkovSystem, f: &StateFunction) -> Result<StateFunction> {
    if f.len() != sys.states {
        return Err(Error::DimensionMismatch { expected: sys.states, got: f.len() });
    }
    Ok(StateFunction(
        (0..sys.states)
            .map(|x| {
                sys.alphabet
                    .letters()
                    .filter(|&l| !sys.probability(l, x).is_zero())
                    .map(|l| sys.probability(l, x) * &f.0[sys.target(l, x)])
                    .sum()
            })
            .collect(),
    ))
}

fn apply_power(sys: &FiniteMarkovSystem, f: &StateFunction, times: usize) -> Result<StateFunction> {
    let mut out = f.clone();
    for _ in 0..times {
        out = markov_apply(sys, &out)?;
    }
    Ok(out)
}

/// Two systems on one state set whose transition maps commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingPair {
    first: FiniteMarkovSystem,
    second: FiniteMarkovSystem,
}

fn maps_commute(a: &FiniteMarkovSystem, b: &FiniteMarkovSystem) -> bool {
    a.alphabet.letters().all(|l| {
        b.alphabet.letters().all(|l2| (0..a.states).all(|x| a.target(l, b.target(l2, x)) == b.target(l2, a.target(l, x))))
    })
}

impl CommutingPair {
    pub fn new(first: FiniteMarkovSystem, second: FiniteMarkovSystem) -> Result<Self> {
        if first.states != second.states {
            return Err(Error::InvalidPair(format!("state counts {} and {} differ", first.states, second.states)));
        }
        if first.alphabet != second.alphabet {
            return Err(Error::InvalidPair("alphabets differ".into()));
        }
        if !maps_commute(&first, &second) {
            return Err(Error::InvalidPair("transition maps do not commute".into()));
        }
        Ok(CommutingPair { first, second })
    }

    pub fn first(&self) -> &FiniteMarkovSystem {
        &self.first
    }

    pub fn second(&self) -> &FiniteMarkovSystem {
        &self.second
    }

    pub fn states(&self) -> usize {
        self.first.states
    }
}

/// Structural properties of a pair; per-system entries are `[first, second]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub commuting: bool,
    pub non_degenerate: [bool; 2],
    pub disjoint_images: [bool; 2],
    pub constant_probabilities: [bool; 2],
}

impl PairReport {
    /// All four properties hold for both systems.
    pub fn is_valid(&self) -> bool {
        self.commuting
            && self.non_degenerate.iter().all(|&b| b)
            && self.disjoint_images.iter().all(|&b| b)
            && self.constant_probabilities.iter().all(|&b| b)
    }
}

/// Validates two systems of equal size, commuting or not.
pub fn validate_systems(first: &FiniteMarkovSystem, second: &FiniteMarkovSystem) -> Result<PairReport> {
    if first.states != second.states {
        return Err(Error::DimensionMismatch { expected: first.states, got: second.states });
    }
    Ok(PairReport {
        commuting: first.alphabet == second.alphabet && maps_commute(first, second),
        non_degenerate: [first.is_non_degenerate(), second.is_non_degenerate()],
        disjoint_images: [first.has_disjoint_images(), second.has_disjoint_images()],
        constant_probabilities: [first.has_constant_probabilities(), second.has_constant_probabilities()],
    })
}

pub fn validate_pair(pair: &CommutingPair) -> PairReport {
    validate_systems(&pair.first, &pair.second).expect("pair has equal sizes")
}

/// One positive-probability step from any state of `from`.
fn step(sys: &FiniteMarkovSystem, from: &StateSet) -> StateSet {
    from.iter()
        .flat_map(|&x| sys.alphabet.letters().filter(move |&l| sys.probability(l, x).is_positive()).map(move |l| sys.target(l, x)))
        .collect()
}

fn reach(sys: &FiniteMarkovSystem, from: StateSet, len: usize) -> StateSet {
    (0..len).fold(from, |acc, _| step(sys, &acc))
}

/// Endpoints of positive-probability paths of length `len` from `x` whose
/// first step is labelled `first`; `{x}` when `len = 0`.
pub fn reachable_endpoints(sys: &FiniteMarkovSystem, x: usize, len: usize, first: u8) -> StateSet {
    if len == 0 {
        return StateSet::from([x]);
    }
    if !sys.probability(first, x).is_positive() {
        return StateSet::new();
    }
    reach(sys, StateSet::from([sys.target(first, x)]), len - 1)
}

fn check_recurrence_args(pair: &CommutingPair, target: &StateSet, u: Level, v: Level, n: usize) -> Result<()> {
    let report = validate_pair(pair);
    if !report.non_degenerate.iter().all(|&b| b) {
        return Err(Error::InvalidPair("a system is degenerate".into()));
    }
    if !report.disjoint_images.iter().all(|&b| b) {
        return Err(Error::InvalidPair("a system does not have disjoint images".into()));
    }
    if u.0 == 0 || u.1 == 0 || v.0 == 0 || v.1 == 0 {
        return Err(Error::Precondition("increments must be positive in both coordinates".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if let Some(x) = target.iter().find(|&&x| x >= pair.states()) {
        return Err(Error::DimensionMismatch { expected: pair.states(), got: *x + 1 });
    }
    Ok(())
}

/// The recurrence function `φ_r`:
/// `φ₁ = 𝟙_A Π_λ (P₁𝟙_{B_λ})(P₂𝟙_{C_λ})` and
/// `φ_r = 𝟙_A Π_λ P₁(𝟙_{B_λ}·P₁^{u₁n−1}P₂^{u₂n}φ_{r−1}) · P₂(𝟙_{C_λ}·P₁^{v₁n}P₂^{v₂n−1}φ_{r−1})`
/// with `B_λ = T₁_λ(M)`, `C_λ = T₂_λ(M)`.
pub fn compute_phi_r(pair: &CommutingPair, target: &StateSet, u: Level, v: Level, n: usize, r: usize) -> Result<StateFunction> {
    check_recurrence_args(pair, target, u, v, n)?;
    if r == 0 {
        return Err(Error::Precondition("r must be at least 1".into()));
    }
    let m = pair.states();
    let (p1, p2) = (&pair.first, &pair.second);
    let ind_a = StateFunction::indicator(m, target);
    let b: Vec<StateFunction> = p1.alphabet.letters().map(|l| StateFunction::indicator(m, &p1.image(l))).collect();
    let c: Vec<StateFunction> = p2.alphabet.letters().map(|l| StateFunction::indicator(m, &p2.image(l))).collect();
    let factors = |inner_b: Option<&StateFunction>, inner_c: Option<&StateFunction>| -> Result<StateFunction> {
        let mut acc = ind_a.clone();
        for (bl, cl) in b.iter().zip(&c) {
            let hb = inner_b.map_or_else(|| bl.clone(), |h| bl.times(h));
            let hc = inner_c.map_or_else(|| cl.clone(), |h| cl.times(h));
            acc = acc.times(&markov_apply(p1, &hb)?).times(&markov_apply(p2, &hc)?);
        }
        Ok(acc)
    };
    let mut phi = factors(None, None)?;
    for _ in 1..r {
        let hb = apply_power(p1, &apply_power(p2, &phi, u.1 * n)?, u.0 * n - 1)?;
        let hc = apply_power(p1, &apply_power(p2, &phi, v.1 * n - 1)?, v.0 * n)?;
        phi = factors(Some(&hb), Some(&hc))?;
    }
    Ok(phi)
}

/// Roots of `(nu, nv)`-arithmetic product trees of order `r` in `target`:
/// each X-edge is a length-`nu₁` path in the first system with the edge's
/// initial direction followed by a length-`nu₂` path in the second, and
/// each Y-edge a length-`nv₂` path in the second system with that initial
/// direction followed by a length-`nv₁` path in the first.
pub fn roots_by_search(pair: &CommutingPair, target: &StateSet, u: Level, v: Level, n: usize, r: usize) -> Result<StateSet> {
    check_recurrence_args(pair, target, u, v, n)?;
    let m = pair.states();
    let (p1, p2) = (&pair.first, &pair.second);
    let letters: Vec<u8> = p1.alphabet.letters().collect();
    let x_ends: Vec<Vec<StateSet>> = (0..m)
        .map(|x| letters.iter().map(|&l| reach(p2, reachable_endpoints(p1, x, n * u.0, l), n * u.1)).collect())
        .collect();
    let y_ends: Vec<Vec<StateSet>> = (0..m)
        .map(|x| letters.iter().map(|&l| reach(p1, reachable_endpoints(p2, x, n * v.1, l), n * v.0)).collect())
        .collect();
    let mut roots = target.clone();
    for _ in 0..r {
        let prev = roots;
        roots = prev
            .iter()
            .copied()
            .filter(|&x| {
                (0..letters.len()).all(|i| {
                    x_ends[x][i].iter().any(|y| prev.contains(y)) && y_ends[x][i].iter().any(|y| prev.contains(y))
                })
            })
            .collect();
    }
    Ok(roots)
}
