use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CommutingPair, FiniteMarkovSystem, StateSet};
use crate::error::{Error, Result};
use crate::semigroup::{ball_size, check_cap, enumeration_cap, Alphabet, PairWord, Word};
use crate::sets::GridTreeSet;

/// The labelled tree `τ = 𝟙_A X_{α₁} Y_{α₂}` with labels `(λ₁, λ₂)`,
/// stored as the offset `α` over a fixed base set `A`.
#[derive(Clone, Debug)]
pub struct LabelledTreeFrame {
    base: Arc<GridTreeSet>,
    offset: PairWord,
    labels: (u8, u8),
    horizon: usize,
}

impl PartialEq for LabelledTreeFrame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.base, &other.base) && self.offset == other.offset && self.labels == other.labels
    }
}

impl Eq for LabelledTreeFrame {}

impl LabelledTreeFrame {
    /// `π_A` with labels `(0, 0)`; offsets may grow to `horizon` letters per
    /// coordinate.
    pub fn new(base: Arc<GridTreeSet>, horizon: usize) -> Self {
        let offset = PairWord::identity(base.alphabet());
        LabelledTreeFrame { base, offset, labels: (0, 0), horizon }
    }

    pub fn offset(&self) -> &PairWord {
        &self.offset
    }

    pub fn labels(&self) -> (u8, u8) {
        self.labels
    }

    /// `τ(w) = 𝟙_A(α·w)`.
    pub fn value(&self, w: &PairWord) -> Result<bool> {
        Ok(self.base.contains(&self.offset.concat(w)?))
    }

    /// Membership in `E = {τ(∅,∅) = 1}`.
    pub fn in_e(&self) -> bool {
        self.base.contains(&self.offset)
    }

    fn extend(&self, word: &Word, horizontal: bool) -> Result<Self> {
        let Some(last) = word.last() else {
            return Ok(self.clone());
        };
        let mut out = self.clone();
        let (target, label) = if horizontal {
            (&mut out.offset.first, &mut out.labels.0)
        } else {
            (&mut out.offset.second, &mut out.labels.1)
        };
        if target.len() + word.len() > self.horizon {
            return Err(Error::BeyondHorizon { horizon: self.horizon });
        }
        *target = crate::semigroup::concat_words(target, word)?;
        *label = last;
        Ok(out)
    }

    /// `π X_w`: the tree shifted by `w` horizontally, first label `t(w)`.
    pub fn act_x(&self, w: &Word) -> Result<Self> {
        self.extend(w, true)
    }

    /// `π Y_w`.
    pub fn act_y(&self, w: &Word) -> Result<Self> {
        self.extend(w, false)
    }
}

fn letter_word(alphabet: Alphabet, l: u8) -> Word {
    Word::new(alphabet, vec![l]).expect("letter in range")
}

/// `μ_N(E)` for `μ_N = (1/N²) Σ_{i,j<N} (P₁*)^i (P₂*)^j δ_{π_A}`, pushing
/// point masses through the frame actions.
pub fn mu_n_exact(set: &GridTreeSet, n: usize) -> Result<BigRational> {
    if n == 0 {
        return Ok(BigRational::zero());
    }
    let alphabet = set.alphabet();
    let side = ball_size(alphabet, n - 1);
    check_cap(side.saturating_mul(side), enumeration_cap())?;
    let k = BigRational::from_integer(BigInt::from(alphabet.size()));
    let base = Arc::new(set.clone());
    let letters: Vec<Word> = alphabet.letters().map(|l| letter_word(alphabet, l)).collect();
    let push = |measure: &[(LabelledTreeFrame, BigRational)], horizontal: bool| -> Result<Vec<(LabelledTreeFrame, BigRational)>> {
        let mut out = Vec::with_capacity(measure.len() * letters.len());
        for (frame, w) in measure {
            let share = w / &k;
            for l in &letters {
                let next = if horizontal { frame.act_x(l)? } else { frame.act_y(l)? };
                out.push((next, share.clone()));
            }
        }
        Ok(out)
    };
    let mut total = BigRational::zero();
    let mut column = vec![(LabelledTreeFrame::new(base, 2 * n), num::One::one())];
    for j in 0..n {
        if j > 0 {
            column = push(&column, false)?;
        }
        let mut measure = column.clone();
        for i in 0..n {
            if i > 0 {
                measure = push(&measure, true)?;
            }
            for (frame, w) in &measure {
                if frame.in_e() {
                    total += w;
                }
            }
        }
    }
    Ok(total / BigRational::from_integer(BigInt::from(n * n)))
}

/// Monte Carlo estimate of `μ_N(E)`: sample `(i,j)` uniformly, walk `i`
/// uniform X-steps and `j` uniform Y-steps from `π_A`. Sample `s` draws from
/// its own stream of the seeded generator, so the result does not depend on
/// the number of threads. Returns the hit fraction and its binomial
/// standard error.
pub fn mu_n_monte_carlo(set: &GridTreeSet, n: usize, samples: u64, seed: u64) -> Result<(BigRational, f64)> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    if n == 0 {
        return Ok((BigRational::zero(), 0.0));
    }
    let alphabet = set.alphabet();
    let base = Arc::new(set.clone());
    let start = LabelledTreeFrame::new(base, 2 * n);
    let letters: Vec<Word> = alphabet.letters().map(|l| letter_word(alphabet, l)).collect();
    let hits = (0..samples)
        .into_par_iter()
        .map(|s| -> Result<u64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            let mut frame = start.clone();
            for _ in 0..j {
                frame = frame.act_y(&letters[rng.random_range(0..letters.len())])?;
            }
            for _ in 0..i {
                frame = frame.act_x(&letters[rng.random_range(0..letters.len())])?;
            }
            Ok(frame.in_e() as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = hits as f64 / samples as f64;
    let stderr = (p * (1.0 - p) / samples as f64).sqrt();
    Ok((BigRational::new(hits.into(), samples.into()), stderr))
}

/// A finite piece of the labelled-tree system: all labelled trees
/// `(τ, λ₁, λ₂)` with `τ` in the orbit of `𝟙_A` under the shifts, with
/// `T₁_λ = X_λ`, `T₂_λ = Y_λ` and uniform probabilities.
#[derive(Clone, Debug)]
pub struct LabelledTreeSystem {
    pub pair: CommutingPair,
    /// States with `τ(∅,∅) = 1`.
    pub target: StateSet,
    alphabet: Alphabet,
    members: Vec<PairWord>,
    trees: HashMap<Vec<PairWord>, usize>,
}

impl LabelledTreeSystem {
    fn index(&self, tree: usize, labels: (u8, u8)) -> usize {
        let k = self.alphabet.size();
        (tree * k + labels.0 as usize) * k + labels.1 as usize
    }

    /// The state `π_A W_α` carrying the given labels.
    pub fn state_of(&self, alpha: &PairWord, labels: (u8, u8)) -> Option<usize> {
        let tree = shifted(&self.members, alpha);
        self.trees.get(&tree).map(|&t| self.index(t, labels))
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }
}

/// `{w : α·w ∈ members}`, sorted.
fn shifted(members: &[PairWord], alpha: &PairWord) -> Vec<PairWord> {
    let mut out: Vec<PairWord> = members.iter().filter_map(|p| crate::semigroup::is_pair_descendent(p, alpha)).collect();
    out.sort();
    out
}

/// Builds the finite labelled-tree system over `A`. The orbit is finite
/// because every shift by at least the depth gives the empty tree.
pub fn labelled_tree_system(set: &GridTreeSet) -> Result<LabelledTreeSystem> {
    let alphabet = set.alphabet();
    let members = set.members()?;
    let root = members.clone();
    let mut trees: HashMap<Vec<PairWord>, usize> = HashMap::new();
    let mut order: Vec<Vec<PairWord>> = Vec::new();
    let mut moves: Vec<[Vec<usize>; 2]> = Vec::new();
    trees.insert(root.clone(), 0);
    order.push(root);
    let mut next = 0;
    while next < order.len() {
        let tree = order[next].clone();
        let mut row: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for l in alphabet.letters() {
            let step = letter_word(alphabet, l);
            for (side, alpha) in [
                PairWord { first: step.clone(), second: Word::empty(alphabet) },
                PairWord { first: Word::empty(alphabet), second: step.clone() },
            ]
            .into_iter()
            .enumerate()
            {
                let child = shifted(&tree, &alpha);
                let id = match trees.get(&child) {
                    Some(&id) => id,
                    None => {
                        let id = order.len();
                        trees.insert(child.clone(), id);
                        order.push(child);
                        id
                    }
                };
                row[side].push(id);
            }
        }
        moves.push(row);
        next += 1;
    }
    let k = alphabet.size();
    let t = order.len();
    let m = t * k * k;
    check_cap(m as u128, enumeration_cap())?;
    let idx = |tree: usize, l1: usize, l2: usize| (tree * k + l1) * k + l2;
    let mut t1 = vec![vec![0; m]; k];
    let mut t2 = vec![vec![0; m]; k];
    let mut target = BTreeSet::new();
    let origin = PairWord::identity(alphabet);
    for (tree, tau) in order.iter().enumerate() {
        let in_e = tau.binary_search(&origin).is_ok();
        for l1 in 0..k {
            for l2 in 0..k {
                let x = idx(tree, l1, l2);
                if in_e {
                    target.insert(x);
                }
                for l in 0..k {
                    t1[l][x] = idx(moves[tree][0][l], l, l2);
                    t2[l][x] = idx(moves[tree][1][l], l1, l);
                }
            }
        }
    }
    let uniform = vec![BigRational::new(1.into(), BigInt::from(k)); k];
    let first = FiniteMarkovSystem::with_constant_probabilities(alphabet, t1, &uniform)?;
    let second = FiniteMarkovSystem::with_constant_probabilities(alphabet, t2, &uniform)?;
    let pair = CommutingPair::new(first, second)?;
    Ok(LabelledTreeSystem { pair, target, alphabet, members, trees })
}
