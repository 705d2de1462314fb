//! Certificates for the four tree structures and their verifiers.
//!
//! Verifiers re-derive everything from the explicit maps. The gap, the row
//! constants and the level increments stored in a witness are checked
//! against the images, never trusted. Violations name the shortlex-first
//! offending address; for an edge `(w, λ)` the descent condition is checked
//! before the level condition, then membership of the child.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::semigroup::{
    act_token, enumerate_ball, enumerate_free_ball, is_descendent, is_pair_descendent, Alphabet, FreeToken,
    FreeWord, Level, PairWord, Word,
};
use crate::sets::{slice_at, GridTreeSet, TreeSet};

/// The condition a witness failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// An image lies outside the set.
    NotInSet,
    /// `|φ(wλ)| ≠ |φ(w)| + q`.
    Gap,
    /// The child image does not descend from the parent image extended by
    /// the edge letter (or generator).
    Descent,
    /// Two addresses share an image.
    Injectivity,
    /// One level of the domain is spread over several image levels.
    LevelUniform,
    /// Image levels are not strictly increasing.
    LevelIncreasing,
    /// `|y_j| ≠ q·j + c₂`.
    RowLevel,
    /// `|φ_j(u)| ≠ q·|u| + c₁`.
    ColumnLevel,
    /// `Level(φ(γt)) ≠ Level(φ(γ)) + u` (or `+ v`).
    LevelIncrement,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::NotInSet => "image not in set",
            Condition::Gap => "gap",
            Condition::Descent => "descent",
            Condition::Injectivity => "injectivity",
            Condition::LevelUniform => "level uniformity",
            Condition::LevelIncreasing => "increasing levels",
            Condition::RowLevel => "row level",
            Condition::ColumnLevel => "column level",
            Condition::LevelIncrement => "level increment",
        })
    }
}

/// Where and how a witness failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// The offending address, or the parent for edge conditions.
    pub address: String,
    /// The edge letter or generator for edge conditions.
    pub step: Option<String>,
    /// The row of a tree array.
    pub row: Option<usize>,
}

impl Violation {
    fn at(condition: Condition, address: impl fmt::Display) -> Self {
        Violation { condition, address: address.to_string(), step: None, row: None }
    }

    fn edge(condition: Condition, parent: impl fmt::Display, step: impl fmt::Display) -> Self {
        Violation { condition, address: parent.to_string(), step: Some(step.to_string()), row: None }
    }

    fn in_row(mut self, row: usize) -> Self {
        self.row = Some(row);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let addr = if self.address.is_empty() { "∅" } else { &self.address };
        write!(f, "{} violated at ", self.condition)?;
        match &self.step {
            Some(s) => write!(f, "({addr}, {s})")?,
            None => write!(f, "{addr}")?,
        }
        if let Some(r) = self.row {
            write!(f, " in row {r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Violation),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(v) => Some(v),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail(v) => write!(f, "FAIL: {v}"),
        }
    }
}

macro_rules! fail {
    ($v:expr) => {
        return Ok(Verdict::Fail($v))
    };
}

fn require_alphabet(a: Alphabet, b: Alphabet) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch { left: a.size() as u8, right: b.size() as u8 })
    }
}

fn total<'a, K: Ord + fmt::Display, V>(map: &'a BTreeMap<K, V>, domain: &[K]) -> Result<Vec<&'a V>> {
    domain
        .iter()
        .map(|a| map.get(a).ok_or_else(|| Error::NotTotal(format!("{a:?}", a = a.to_string()))))
        .collect()
}

/// An arithmetic subtree of order `r` and gap `q`: a map on `B_r(Λ*)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeWitness {
    pub alphabet: Alphabet,
    pub order: usize,
    pub gap: usize,
    pub map: BTreeMap<Word, Word>,
}

impl TreeWitness {
    /// The same map read as a regular embedding of depth `r`.
    pub fn to_regular(&self) -> RegularEmbeddingWitness {
        RegularEmbeddingWitness { alphabet: self.alphabet, depth: self.order, map: self.map.clone() }
    }
}

/// A regular embedding `T_d → T_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularEmbeddingWitness {
    pub alphabet: Alphabet,
    pub depth: usize,
    pub map: BTreeMap<Word, Word>,
}

impl RegularEmbeddingWitness {
    /// `n_0, .., n_d`: the image level of each domain level, if images
    /// exist and each domain level maps into a single level.
    pub fn level_schedule(&self) -> Option<Vec<usize>> {
        let mut schedule: Vec<Option<usize>> = vec![None; self.depth + 1];
        for (a, img) in &self.map {
            let slot = schedule.get_mut(a.len())?;
            match slot {
                None => *slot = Some(img.len()),
                Some(l) if *l == img.len() => {}
                Some(_) => return None,
            }
        }
        schedule.into_iter().collect()
    }
}

/// One row `(y_j, φ_j)` of a tree array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayRow {
    pub y: Word,
    pub map: BTreeMap<Word, Word>,
}

/// `r+1` horizontal arithmetic subtrees `u ↦ (φ_j(u), y_j)` sharing the
/// gap `q`, with `Level(φ_j(u), y_j) = (q|u| + c₁, qj + c₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeArrayWitness {
    pub alphabet: Alphabet,
    pub order: usize,
    pub gap: usize,
    pub c1: usize,
    pub c2: usize,
    pub rows: Vec<ArrayRow>,
}

/// A `(u,v)`-arithmetic product tree: a map on `B_r` of the free product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTreeWitness {
    pub alphabet: Alphabet,
    pub order: usize,
    pub u: Level,
    pub v: Level,
    pub map: BTreeMap<FreeWord, PairWord>,
}

impl ProductTreeWitness {
    pub fn root(&self) -> Option<&PairWord> {
        self.map.get(&FreeWord::empty(self.alphabet))
    }

    /// `γ ↦ α·φ(γ)`.
    pub fn translate(&self, alpha: &PairWord) -> Result<ProductTreeWitness> {
        let map = self
            .map
            .iter()
            .map(|(g, img)| Ok((g.clone(), alpha.concat(img)?)))
            .collect::<Result<_>>()?;
        Ok(ProductTreeWitness { map, ..self.clone() })
    }
}

/// Checks both conditions of an arithmetic subtree of gap `w.gap` and that
/// all images lie in `set`.
pub fn verify_arithmetic_subtree(w: &TreeWitness, set: &TreeSet) -> Result<Verdict> {
    require_alphabet(w.alphabet, set.alphabet())?;
    let domain = enumerate_ball(w.alphabet, w.order)?;
    total(&w.map, &domain)?;
    for a in &domain {
        let img = &w.map[a];
        if let Some(parent) = a.parent() {
            let letter = a.last().expect("non-empty");
            let pimg = &w.map[&parent];
            if is_descendent(img, &pimg.child(letter)).is_none() {
                fail!(Violation::edge(Condition::Descent, &parent, letter));
            }
            if img.len() != pimg.len() + w.gap {
                fail!(Violation::edge(Condition::Gap, &parent, letter));
            }
        }
        if !set.contains(img) {
            fail!(Violation::at(Condition::NotInSet, a));
        }
    }
    Ok(Verdict::Pass)
}

/// Checks injectivity, membership, single-level images with strictly
/// increasing levels, and the descent condition.
pub fn verify_regular_embedding(w: &RegularEmbeddingWitness, set: &TreeSet) -> Result<Verdict> {
    require_alphabet(w.alphabet, set.alphabet())?;
    let domain = enumerate_ball(w.alphabet, w.depth)?;
    total(&w.map, &domain)?;
    let mut seen: HashMap<&Word, &Word> = HashMap::new();
    for a in &domain {
        if seen.insert(&w.map[a], a).is_some() {
            fail!(Violation::at(Condition::Injectivity, a));
        }
    }
    let mut schedule: Vec<usize> = Vec::with_capacity(w.depth + 1);
    for a in &domain {
        let img = &w.map[a];
        if !set.contains(img) {
            fail!(Violation::at(Condition::NotInSet, a));
        }
        match schedule.get(a.len()) {
            Some(&l) if l != img.len() => fail!(Violation::at(Condition::LevelUniform, a)),
            Some(_) => {}
            None => {
                if schedule.last().is_some_and(|&prev| prev >= img.len()) {
                    fail!(Violation::at(Condition::LevelIncreasing, a));
                }
                schedule.push(img.len());
            }
        }
        if let Some(parent) = a.parent() {
            let letter = a.last().expect("non-empty");
            if is_descendent(img, &w.map[&parent].child(letter)).is_none() {
                fail!(Violation::edge(Condition::Descent, &parent, letter));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Checks row and column levels, each row as an arithmetic subtree of the
/// shared gap inside its slice, and injectivity of `(u,j) ↦ (φ_j(u), y_j)`.
pub fn verify_tree_array(w: &TreeArrayWitness, set: &GridTreeSet) -> Result<Verdict> {
    require_alphabet(w.alphabet, set.alphabet())?;
    if w.rows.len() != w.order + 1 {
        return Err(Error::DimensionMismatch { expected: w.order + 1, got: w.rows.len() });
    }
    let domain = enumerate_ball(w.alphabet, w.order)?;
    for row in &w.rows {
        require_alphabet(w.alphabet, row.y.alphabet())?;
        total(&row.map, &domain)?;
    }
    for (j, row) in w.rows.iter().enumerate() {
        if row.y.len() != w.gap * j + w.c2 {
            fail!(Violation::at(Condition::RowLevel, &row.y).in_row(j));
        }
    }
    for (j, row) in w.rows.iter().enumerate() {
        for a in &domain {
            if row.map[a].len() != w.gap * a.len() + w.c1 {
                fail!(Violation::at(Condition::ColumnLevel, a).in_row(j));
            }
        }
    }
    for (j, row) in w.rows.iter().enumerate() {
        if row.y.len() >= set.depth() {
            fail!(Violation::at(Condition::NotInSet, "").in_row(j));
        }
        let slice = slice_at(set, &row.y)?;
        let tree = TreeWitness { alphabet: w.alphabet, order: w.order, gap: w.gap, map: row.map.clone() };
        if let Verdict::Fail(v) = verify_arithmetic_subtree(&tree, &slice)? {
            fail!(v.in_row(j));
        }
    }
    let mut seen: HashMap<(&Word, &Word), ()> = HashMap::new();
    for (j, row) in w.rows.iter().enumerate() {
        for a in &domain {
            if seen.insert((&row.map[a], &row.y), ()).is_some() {
                fail!(Violation::at(Condition::Injectivity, a).in_row(j));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Checks membership, the level increments `u` (X-children) and `v`
/// (Y-children), and componentwise descent from `φ(γ)·X_λ` / `φ(γ)·Y_λ`.
pub fn verify_product_tree(w: &ProductTreeWitness, set: &GridTreeSet) -> Result<Verdict> {
    require_alphabet(w.alphabet, set.alphabet())?;
    let domain = enumerate_free_ball(w.alphabet, w.order)?;
    total(&w.map, &domain)?;
    for g in &domain {
        let img = &w.map[g];
        if let Some((parent, token)) = g.parent() {
            let pimg = &w.map[&parent];
            if is_pair_descendent(img, &act_token(pimg, token)).is_none() {
                fail!(Violation::edge(Condition::Descent, &parent, token));
            }
            let inc = match token {
                FreeToken::X(_) => w.u,
                FreeToken::Y(_) => w.v,
            };
            if img.level() != pimg.level() + inc {
                fail!(Violation::edge(Condition::LevelIncrement, &parent, token));
            }
        }
        if !set.contains(img) {
            fail!(Violation::at(Condition::NotInSet, g));
        }
    }
    Ok(Verdict::Pass)
}

/// Recovers the gap from `φ(∅)` and `φ(0)`; `None` at order 0 or when the
/// map is too short.
pub fn infer_gap(map: &BTreeMap<Word, Word>) -> Option<usize> {
    let root = map.iter().next().filter(|(a, _)| a.is_empty())?.1;
    let (_, child) = map.iter().find(|(a, _)| a.len() == 1)?;
    child.len().checked_sub(root.len())
}

/// Recovers `(u, v)` from the root and its first X- and Y-children.
pub fn infer_increments(map: &BTreeMap<FreeWord, PairWord>) -> Option<(Level, Level)> {
    let (rg, root) = map.iter().next()?;
    if !rg.is_empty() {
        return None;
    }
    let child = |pick: fn(&FreeToken) -> bool| {
        map.iter().find(|(g, _)| g.len() == 1 && pick(&g.tokens()[0])).map(|(_, img)| img.level())
    };
    let diff = |l: Level| Some(Level(l.0.checked_sub(root.level().0)?, l.1.checked_sub(root.level().1)?));
    let u = diff(child(|t| matches!(t, FreeToken::X(_)))?)?;
    let v = diff(child(|t| matches!(t, FreeToken::Y(_)))?)?;
    Some((u, v))
}

/// Recovers `(q, c₁, c₂)` from the rows of a tree array.
pub fn infer_array_constants(rows: &[ArrayRow]) -> Option<(usize, usize, usize)> {
    let first = rows.first()?;
    let c2 = first.y.len();
    let c1 = first.map.iter().next().filter(|(a, _)| a.is_empty())?.1.len();
    let q = match rows.get(1) {
        Some(r) => r.y.len().checked_sub(c2)?,
        None => infer_gap(&first.map).unwrap_or(1),
    };
    Some((q, c1, c2))
}
