//! Finite subsets of the truncated tree `T_N` and of `T_N × T_N`, with exact
//! level densities.
//!
//! A depth-`N` set lives on levels `0..N` in every coordinate. Membership is
//! stored per level (or per level cell in two dimensions) as a bitmap indexed
//! by [`Word::rank`], so lookups cost one rank computation.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{Bits, Cell};
use crate::error::{Error, Result};
use crate::semigroup::{
    ball_size, check_cap, enumeration_cap, pow_sat, Alphabet, Level, PairWord, SphereIter, Word,
};

fn big_pow(k: usize, e: usize) -> BigUint {
    num::pow(BigUint::from(k), e)
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_word(alphabet: Alphabet, depth: usize, w: &Word) -> Result<()> {
    if w.alphabet() != alphabet {
        return Err(Error::AlphabetMismatch { left: alphabet.size() as u8, right: w.alphabet().size() as u8 });
    }
    if w.len() >= depth {
        return Err(Error::Precondition(format!("word {w} has length >= depth {depth}")));
    }
    Ok(())
}

/// How a [`TreeSet`] was described; this only affects serialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeRepr {
    Explicit,
    LevelMask,
}

/// A subset of `B_{N-1}(Λ*)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSet {
    alphabet: Alphabet,
    depth: usize,
    levels: Vec<Cell>,
    repr: TreeRepr,
}

impl TreeSet {
    pub fn explicit(alphabet: Alphabet, depth: usize, members: impl IntoIterator<Item = Word>) -> Result<Self> {
        check_cap(ball_size(alphabet, depth.saturating_sub(1)), enumeration_cap())?;
        let mut levels: Vec<Option<Bits>> = vec![None; depth];
        for w in members {
            check_word(alphabet, depth, &w)?;
            let bits = levels[w.len()].get_or_insert_with(|| Bits::new(pow_sat(alphabet.raw(), w.len()) as u64));
            bits.set(w.rank().expect("rank fits under cap"));
        }
        let levels = levels.into_iter().map(|b| b.map_or(Cell::Empty, Cell::Some)).collect();
        Ok(TreeSet { alphabet, depth, levels, repr: TreeRepr::Explicit })
    }

    /// The union of the full levels listed in `levels`.
    pub fn level_mask(alphabet: Alphabet, depth: usize, levels: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut cells = vec![Cell::Empty; depth];
        for i in levels {
            if i >= depth {
                return Err(Error::Precondition(format!("level {i} >= depth {depth}")));
            }
            cells[i] = Cell::Full;
        }
        Ok(TreeSet { alphabet, depth, levels: cells, repr: TreeRepr::LevelMask })
    }

    pub fn full(alphabet: Alphabet, depth: usize) -> Self {
        TreeSet { alphabet, depth, levels: vec![Cell::Full; depth], repr: TreeRepr::LevelMask }
    }

    pub fn empty(alphabet: Alphabet, depth: usize) -> Self {
        TreeSet { alphabet, depth, levels: vec![Cell::Empty; depth], repr: TreeRepr::LevelMask }
    }

    /// Each word of `B_{N-1}` is kept independently with probability `delta`.
    pub fn random(alphabet: Alphabet, depth: usize, delta: &BigRational, seed: u64) -> Result<Self> {
        check_cap(ball_size(alphabet, depth.saturating_sub(1)), enumeration_cap())?;
        let (p, q) = probability_parts(delta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut members = Vec::new();
        for i in 0..depth {
            for w in SphereIter::new(alphabet, i) {
                if rng.random_range(0..q) < p {
                    members.push(w);
                }
            }
        }
        TreeSet::explicit(alphabet, depth, members)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn repr(&self) -> TreeRepr {
        self.repr
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.alphabet() == self.alphabet
            && w.len() < self.depth
            && match &self.levels[w.len()] {
                Cell::Empty => false,
                Cell::Full => true,
                Cell::Some(b) => w.rank().is_some_and(|r| b.get(r)),
            }
    }

    /// `|S ∩ L_i|`.
    pub fn level_count(&self, i: usize) -> u128 {
        self.levels.get(i).map_or(0, |c| c.count(pow_sat(self.alphabet.raw(), i)))
    }

    pub fn level_is_empty(&self, i: usize) -> bool {
        self.level_count(i) == 0
    }

    /// Levels holding at least one member.
    pub fn occupied_levels(&self) -> Vec<usize> {
        (0..self.depth).filter(|&i| !self.level_is_empty(i)).collect()
    }

    /// Levels listed in a level mask; `None` for explicit sets.
    pub fn mask_levels(&self) -> Option<Vec<usize>> {
        match self.repr {
            TreeRepr::LevelMask => Some((0..self.depth).filter(|&i| self.levels[i] == Cell::Full).collect()),
            TreeRepr::Explicit => None,
        }
    }

    /// Members of one level in lexicographic order.
    pub fn level_members(&self, i: usize) -> Box<dyn Iterator<Item = Word> + '_> {
        let alphabet = self.alphabet;
        match self.levels.get(i) {
            None | Some(Cell::Empty) => Box::new(std::iter::empty()),
            Some(Cell::Full) => Box::new(SphereIter::new(alphabet, i)),
            Some(Cell::Some(b)) => Box::new(b.ones().map(move |r| Word::from_rank(alphabet, i, r))),
        }
    }

    /// Members at `level` that descend from `prefix`, lexicographically.
    pub fn descendants_in(&self, prefix: &Word, level: usize) -> Box<dyn Iterator<Item = Word> + '_> {
        if level >= self.depth || level < prefix.len() || prefix.alphabet() != self.alphabet {
            return Box::new(std::iter::empty());
        }
        let alphabet = self.alphabet;
        let (lo, hi) = rank_interval(prefix, level);
        match &self.levels[level] {
            Cell::Empty => Box::new(std::iter::empty()),
            Cell::Full => Box::new((lo..hi).map(move |r| Word::from_rank(alphabet, level, r))),
            Cell::Some(b) => Box::new(b.ones_in(lo, hi).map(move |r| Word::from_rank(alphabet, level, r))),
        }
    }

    /// Whether some member at `level` descends from `prefix`.
    pub fn has_descendant_in(&self, prefix: &Word, level: usize) -> bool {
        if level >= self.depth || level < prefix.len() || prefix.alphabet() != self.alphabet {
            return false;
        }
        let (lo, hi) = rank_interval(prefix, level);
        match &self.levels[level] {
            Cell::Empty => false,
            Cell::Full => true,
            Cell::Some(b) => b.any_in(lo, hi),
        }
    }

    /// All members in shortlex order.
    pub fn members(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.depth).flat_map(move |i| self.level_members(i))
    }

    /// Same membership, explicit representation.
    pub fn to_explicit(&self) -> Result<TreeSet> {
        TreeSet::explicit(self.alphabet, self.depth, self.members())
    }
}

/// `d_N(S) = (1/N) Σ_{x∈S} k^{-|x|}`, exactly.
pub fn density_1d(set: &TreeSet) -> BigRational {
    let n = set.depth;
    if n == 0 {
        return BigRational::zero();
    }
    let k = set.alphabet.size();
    let top = n - 1;
    let mut num = BigUint::zero();
    for i in 0..n {
        let c = set.level_count(i);
        if c > 0 {
            num += BigUint::from(c) * big_pow(k, top - i);
        }
    }
    ratio(num, BigUint::from(n) * big_pow(k, top))
}

/// The sequence `d_1(S), .., d_N(S)` of truncated densities.
pub fn density_sequence_1d(set: &TreeSet) -> Vec<BigRational> {
    let k = BigInt::from(set.alphabet.size());
    let mut sum = BigRational::zero();
    (0..set.depth)
        .map(|i| {
            sum += BigRational::new(BigInt::from(set.level_count(i)), num::pow(k.clone(), i));
            &sum / BigRational::from_integer(BigInt::from(i + 1))
        })
        .collect()
}

/// A finite subset of the grid `[0,N)²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSet {
    depth: usize,
    members: BTreeSet<(usize, usize)>,
}

impl GridSet {
    pub fn new(depth: usize, members: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let members: BTreeSet<_> = members.into_iter().collect();
        if let Some(&(i, j)) = members.iter().find(|&&(i, j)| i >= depth || j >= depth) {
            return Err(Error::Precondition(format!("grid point ({i},{j}) outside [0,{depth})²")));
        }
        Ok(GridSet { depth, members })
    }

    pub fn full(depth: usize) -> Self {
        GridSet { depth, members: (0..depth).flat_map(|i| (0..depth).map(move |j| (i, j))).collect() }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.members.contains(&(i, j))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.members.iter().copied()
    }
}

type Membership = dyn Fn(&PairWord) -> bool + Send + Sync;

/// An implicitly described set: a pure membership function with a name and
/// a declared per-query cost bound.
#[derive(Clone)]
pub struct PredicateSet {
    pub name: String,
    pub cost_bound: u64,
    member: Arc<Membership>,
}

impl PredicateSet {
    pub fn new(name: impl Into<String>, cost_bound: u64, member: impl Fn(&PairWord) -> bool + Send + Sync + 'static) -> Self {
        PredicateSet { name: name.into(), cost_bound, member: Arc::new(member) }
    }
}

impl fmt::Debug for PredicateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateSet").field("name", &self.name).field("cost_bound", &self.cost_bound).finish()
    }
}

#[derive(Clone, Debug)]
enum GridRepr {
    // row-major cells (i, j); bit index rank(w1)·k^j + rank(w2)
    Explicit(Vec<Cell>),
    LevelLift(GridSet),
    Predicate(PredicateSet),
}

/// Which representation a [`GridTreeSet`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridReprKind {
    Explicit,
    LevelLift,
    Predicate,
}

/// A subset of `T_N × T_N` (levels `0..N` in both coordinates).
#[derive(Clone, Debug)]
pub struct GridTreeSet {
    alphabet: Alphabet,
    depth: usize,
    repr: GridRepr,
}

impl GridTreeSet {
    pub fn explicit(alphabet: Alphabet, depth: usize, members: impl IntoIterator<Item = PairWord>) -> Result<Self> {
        let side = ball_size(alphabet, depth.saturating_sub(1));
        check_cap(side.saturating_mul(side), enumeration_cap())?;
        let k = alphabet.raw();
        let mut cells: Vec<Option<Bits>> = vec![None; depth * depth];
        for p in members {
            check_word(alphabet, depth, &p.first)?;
            check_word(alphabet, depth, &p.second)?;
            let Level(i, j) = p.level();
            let bits = cells[i * depth + j].get_or_insert_with(|| Bits::new(pow_sat(k, i + j) as u64));
            bits.set(pair_index(&p));
        }
        let cells = cells.into_iter().map(|b| b.map_or(Cell::Empty, Cell::Some)).collect();
        Ok(GridTreeSet { alphabet, depth, repr: GridRepr::Explicit(cells) })
    }

    pub fn predicate(alphabet: Alphabet, depth: usize, predicate: PredicateSet) -> Self {
        GridTreeSet { alphabet, depth, repr: GridRepr::Predicate(predicate) }
    }

    pub fn full(alphabet: Alphabet, depth: usize) -> Self {
        level_lift(&GridSet::full(depth), alphabet)
    }

    pub fn empty(alphabet: Alphabet, depth: usize) -> Self {
        GridTreeSet { alphabet, depth, repr: GridRepr::Explicit(vec![Cell::Empty; depth * depth]) }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn kind(&self) -> GridReprKind {
        match self.repr {
            GridRepr::Explicit(_) => GridReprKind::Explicit,
            GridRepr::LevelLift(_) => GridReprKind::LevelLift,
            GridRepr::Predicate(_) => GridReprKind::Predicate,
        }
    }

    /// The level set `B` of a level-lift set.
    pub fn lifted_levels(&self) -> Option<&GridSet> {
        match &self.repr {
            GridRepr::LevelLift(b) => Some(b),
            _ => None,
        }
    }

    pub fn contains(&self, p: &PairWord) -> bool {
        if p.first.alphabet() != self.alphabet || p.second.alphabet() != self.alphabet {
            return false;
        }
        let Level(i, j) = p.level();
        if i >= self.depth || j >= self.depth {
            return false;
        }
        match &self.repr {
            GridRepr::Explicit(cells) => match &cells[i * self.depth + j] {
                Cell::Empty => false,
                Cell::Full => true,
                Cell::Some(b) => b.get(pair_index(p)),
            },
            GridRepr::LevelLift(b) => b.contains(i, j),
            GridRepr::Predicate(pred) => (pred.member)(p),
        }
    }

    /// `|A ∩ L_{i,j}|`. Predicate sets enumerate the cell.
    pub fn cell_count(&self, i: usize, j: usize) -> Result<u128> {
        if i >= self.depth || j >= self.depth {
            return Ok(0);
        }
        let size = pow_sat(self.alphabet.raw(), i + j);
        Ok(match &self.repr {
            GridRepr::Explicit(cells) => cells[i * self.depth + j].count(size),
            GridRepr::LevelLift(b) => {
                if b.contains(i, j) {
                    size
                } else {
                    0
                }
            }
            GridRepr::Predicate(_) => {
                check_cap(size, enumeration_cap())?;
                self.cell_members_unchecked(i, j).count() as u128
            }
        })
    }

    fn cell_members_unchecked(&self, i: usize, j: usize) -> impl Iterator<Item = PairWord> + '_ {
        let alphabet = self.alphabet;
        SphereIter::new(alphabet, i)
            .flat_map(move |a| SphereIter::new(alphabet, j).map(move |b| PairWord { first: a.clone(), second: b }))
            .filter(move |p| self.contains(p))
    }

    /// Members of `L_{i,j}` in the order of [`PairWord`].
    pub fn cell_members(&self, i: usize, j: usize) -> Result<Vec<PairWord>> {
        if i >= self.depth || j >= self.depth {
            return Ok(Vec::new());
        }
        let alphabet = self.alphabet;
        match &self.repr {
            GridRepr::Explicit(cells) => {
                let kj = pow_sat(alphabet.raw(), j) as u64;
                Ok(match &cells[i * self.depth + j] {
                    Cell::Empty => Vec::new(),
                    Cell::Full => self.cell_members_unchecked(i, j).collect(),
                    Cell::Some(b) => b
                        .ones()
                        .map(|idx| PairWord {
                            first: Word::from_rank(alphabet, i, idx / kj),
                            second: Word::from_rank(alphabet, j, idx % kj),
                        })
                        .collect(),
                })
            }
            _ => {
                check_cap(pow_sat(alphabet.raw(), i + j), enumeration_cap())?;
                Ok(self.cell_members_unchecked(i, j).collect())
            }
        }
    }

    /// Members at `level` descending componentwise from `prefix`, in the
    /// order of [`PairWord`].
    pub fn descendants_in(&self, prefix: &PairWord, level: Level) -> Box<dyn Iterator<Item = PairWord> + '_> {
        let Level(i, j) = level;
        if i >= self.depth
            || j >= self.depth
            || i < prefix.first.len()
            || j < prefix.second.len()
            || prefix.alphabet() != self.alphabet
        {
            return Box::new(std::iter::empty());
        }
        let alphabet = self.alphabet;
        let (lo1, hi1) = rank_interval(&prefix.first, i);
        let (lo2, hi2) = rank_interval(&prefix.second, j);
        let all = move || {
            (lo1..hi1).flat_map(move |r1| {
                (lo2..hi2).map(move |r2| PairWord {
                    first: Word::from_rank(alphabet, i, r1),
                    second: Word::from_rank(alphabet, j, r2),
                })
            })
        };
        match &self.repr {
            GridRepr::Explicit(cells) => match &cells[i * self.depth + j] {
                Cell::Empty => Box::new(std::iter::empty()),
                Cell::Full => Box::new(all()),
                Cell::Some(bits) => {
                    let kj = pow_sat(alphabet.raw(), j) as u64;
                    Box::new((lo1..hi1).flat_map(move |r1| {
                        bits.ones_in(r1 * kj + lo2, r1 * kj + hi2).map(move |idx| PairWord {
                            first: Word::from_rank(alphabet, i, idx / kj),
                            second: Word::from_rank(alphabet, j, idx % kj),
                        })
                    }))
                }
            },
            GridRepr::LevelLift(b) => {
                if b.contains(i, j) {
                    Box::new(all())
                } else {
                    Box::new(std::iter::empty())
                }
            }
            GridRepr::Predicate(_) => Box::new(all().filter(move |p| self.contains(p))),
        }
    }

    /// All members, sorted by [`PairWord`]'s order.
    pub fn members(&self) -> Result<Vec<PairWord>> {
        let mut out = Vec::new();
        for i in 0..self.depth {
            for j in 0..self.depth {
                out.extend(self.cell_members(i, j)?);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Same membership, explicit representation.
    pub fn to_explicit(&self) -> Result<GridTreeSet> {
        GridTreeSet::explicit(self.alphabet, self.depth, self.members()?)
    }

    /// Restriction to levels below `depth` (which must not exceed the current
    /// depth); the representation is kept.
    pub fn truncate(&self, depth: usize) -> Result<GridTreeSet> {
        if depth > self.depth {
            return Err(Error::Precondition(format!("cannot truncate depth {} to {depth}", self.depth)));
        }
        let repr = match &self.repr {
            GridRepr::Explicit(cells) => GridRepr::Explicit(
                (0..depth).flat_map(|i| (0..depth).map(move |j| (i, j))).map(|(i, j)| cells[i * self.depth + j].clone()).collect(),
            ),
            GridRepr::LevelLift(b) => GridRepr::LevelLift(GridSet::new(depth, b.iter().filter(|&(i, j)| i < depth && j < depth))?),
            GridRepr::Predicate(p) => GridRepr::Predicate(p.clone()),
        };
        Ok(GridTreeSet { alphabet: self.alphabet, depth, repr })
    }

    /// Each element of `⋃_{i,j<N} L_{i,j}` kept independently with
    /// probability `delta`; deterministic in `seed`.
    pub fn random(alphabet: Alphabet, depth: usize, delta: &BigRational, seed: u64) -> Result<Self> {
        random_grid_set(depth, alphabet, delta, seed)
    }
}

/// Ranks at `level` of the words extending `prefix`: a half-open interval.
fn rank_interval(prefix: &Word, level: usize) -> (u64, u64) {
    let span = pow_sat(prefix.alphabet().raw(), level - prefix.len()) as u64;
    let lo = prefix.rank().expect("rank fits") * span;
    (lo, lo + span)
}

fn pair_index(p: &PairWord) -> u64 {
    let kj = pow_sat(p.second.alphabet().raw(), p.second.len()) as u64;
    p.first.rank().expect("rank fits") * kj + p.second.rank().expect("rank fits")
}

fn probability_parts(delta: &BigRational) -> Result<(u64, u64)> {
    if delta < &BigRational::zero() || delta > &BigRational::one() {
        return Err(Error::Precondition(format!("probability {delta} outside [0,1]")));
    }
    match (delta.numer().to_u64(), delta.denom().to_u64()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Error::Precondition(format!("probability {delta} needs a 64-bit numerator and denominator"))),
    }
}

/// `d_N(A) = (1/N²) Σ_{(x,y)∈A} k^{-|x|-|y|}`, exactly.
pub fn density_2d(set: &GridTreeSet) -> Result<BigRational> {
    let n = set.depth;
    if n == 0 {
        return Ok(BigRational::zero());
    }
    if let GridRepr::Predicate(_) = set.repr {
        let side = ball_size(set.alphabet, n - 1);
        check_cap(side.saturating_mul(side), enumeration_cap())?;
    }
    let k = set.alphabet.size();
    let top = 2 * (n - 1);
    let mut num = BigUint::zero();
    for i in 0..n {
        for j in 0..n {
            let c = set.cell_count(i, j)?;
            if c > 0 {
                num += BigUint::from(c) * big_pow(k, top - i - j);
            }
        }
    }
    Ok(ratio(num, BigUint::from(n * n) * big_pow(k, top)))
}

/// The horizontal slice `A_y = {x | (x,y) ∈ A}` as a set of the same depth.
pub fn slice_at(set: &GridTreeSet, y: &Word) -> Result<TreeSet> {
    let n = set.depth;
    if y.alphabet() != set.alphabet {
        return Err(Error::AlphabetMismatch { left: set.alphabet.size() as u8, right: y.alphabet().size() as u8 });
    }
    if y.len() >= n {
        return Err(Error::Precondition(format!("slice word {y} has length >= depth {n}")));
    }
    let j = y.len();
    let alphabet = set.alphabet;
    match &set.repr {
        GridRepr::LevelLift(b) => TreeSet::level_mask(alphabet, n, (0..n).filter(|&i| b.contains(i, j))),
        GridRepr::Explicit(cells) => {
            let kj = pow_sat(alphabet.raw(), j) as u64;
            let ry = y.rank().expect("rank fits");
            let mut levels = Vec::with_capacity(n);
            for i in 0..n {
                levels.push(match &cells[i * n + j] {
                    Cell::Empty => Cell::Empty,
                    Cell::Full => Cell::Full,
                    Cell::Some(bits) => {
                        let mut row = Bits::new(pow_sat(alphabet.raw(), i) as u64);
                        for rx in 0..row.len() {
                            if bits.get(rx * kj + ry) {
                                row.set(rx);
                            }
                        }
                        if row.count_ones() == 0 {
                            Cell::Empty
                        } else {
                            Cell::Some(row)
                        }
                    }
                });
            }
            Ok(TreeSet { alphabet, depth: n, levels, repr: TreeRepr::Explicit })
        }
        GridRepr::Predicate(_) => {
            check_cap(ball_size(alphabet, n - 1), enumeration_cap())?;
            let members = (0..n).flat_map(|i| SphereIter::new(alphabet, i)).filter(|x| {
                set.contains(&PairWord { first: x.clone(), second: y.clone() })
            });
            TreeSet::explicit(alphabet, n, members)
        }
    }
}

/// `A_B = ⋃_{(i,j)∈B} L_{i,j}` at the depth of `B`.
pub fn level_lift(levels: &GridSet, alphabet: Alphabet) -> GridTreeSet {
    GridTreeSet { alphabet, depth: levels.depth, repr: GridRepr::LevelLift(levels.clone()) }
}

/// See [`GridTreeSet::random`].
pub fn random_grid_set(depth: usize, alphabet: Alphabet, delta: &BigRational, seed: u64) -> Result<GridTreeSet> {
    let side = ball_size(alphabet, depth.saturating_sub(1));
    check_cap(side.saturating_mul(side), enumeration_cap())?;
    let (p, q) = probability_parts(delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::new();
    for i in 0..depth {
        for j in 0..depth {
            for a in SphereIter::new(alphabet, i) {
                for b in SphereIter::new(alphabet, j) {
                    if rng.random_range(0..q) < p {
                        members.push(PairWord { first: a.clone(), second: b });
                    }
                }
            }
        }
    }
    GridTreeSet::explicit(alphabet, depth, members)
}

/// The left translate `α·A`, explicit, deep enough to hold every member.
pub fn translate(set: &GridTreeSet, alpha: &PairWord) -> Result<GridTreeSet> {
    let depth = set.depth + alpha.first.len().max(alpha.second.len());
    let members = set.members()?.into_iter().map(|p| alpha.concat(&p)).collect::<Result<Vec<_>>>()?;
    GridTreeSet::explicit(set.alphabet, depth, members)
}

/// The sequence `d_1(A), .., d_N(A)` of truncated densities.
pub fn density_sequence(set: &GridTreeSet) -> Result<Vec<BigRational>> {
    (1..=set.depth).map(|n| density_2d(&set.truncate(n)?)).collect()
}
