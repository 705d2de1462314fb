//! Words over a finite alphabet, pairs of words, and words in the free
//! product of two copies of the free semigroup.
//!
//! Every ordering in this module is shortlex: shorter words first, equal
//! lengths compared letter by letter. Enumeration routines emit words in
//! that order so that searches built on top of them are deterministic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported alphabet; letters print as base-36 digits.
pub const MAX_ALPHABET: usize = 36;

/// Default upper bound on the number of items any enumeration may produce.
pub const DEFAULT_CAP: u64 = 1 << 26;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "TREE_RAMSEY_CAP";

/// The process-wide enumeration cap, read once from `TREE_RAMSEY_CAP`.
pub fn enumeration_cap() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&c| c > 0)
            .unwrap_or(DEFAULT_CAP)
    })
}

/// Fails with [`Error::CapExceeded`] when `requested` items exceed `cap`.
pub fn check_cap(requested: u128, cap: u64) -> Result<()> {
    if requested > cap as u128 {
        Err(Error::CapExceeded { requested, cap })
    } else {
        Ok(())
    }
}

/// `k^r` as a saturating `u128`.
pub fn pow_sat(k: u8, r: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..r {
        acc = acc.saturating_mul(k as u128);
    }
    acc
}

/// A finite alphabet `{0, .., k-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(u8);

impl Alphabet {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ALPHABET {
            return Err(Error::InvalidAlphabet { got: k, max: MAX_ALPHABET });
        }
        Ok(Alphabet(k as u8))
    }

    pub fn size(self) -> usize {
        self.0 as usize
    }

    pub fn letters(self) -> impl Iterator<Item = u8> + Clone {
        0..self.0
    }

    pub(crate) fn raw(self) -> u8 {
        self.0
    }
}

/// One letter as a base-36 digit.
pub fn letter_char(letter: u8) -> char {
    std::char::from_digit(letter as u32, 36).expect("letter below 36")
}

fn char_letter(c: char) -> Option<u8> {
    c.to_digit(36).map(|d| d as u8)
}

/// An element of the free semigroup on `k` letters.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    k: u8,
    letters: Vec<u8>,
}

impl Word {
    /// The empty word.
    pub fn empty(alphabet: Alphabet) -> Self {
        Word { k: alphabet.raw(), letters: Vec::new() }
    }

    pub fn new(alphabet: Alphabet, letters: Vec<u8>) -> Result<Self> {
        let k = alphabet.raw();
        if let Some(&letter) = letters.iter().find(|&&l| l >= k) {
            return Err(Error::LetterOutOfRange { letter, k });
        }
        Ok(Word { k, letters })
    }

    /// Parses a digit string; `""` is the empty word.
    pub fn parse(alphabet: Alphabet, s: &str) -> Result<Self> {
        let k = alphabet.raw();
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            match char_letter(c) {
                Some(l) if l < k => letters.push(l),
                Some(letter) => return Err(Error::LetterOutOfRange { letter, k }),
                None => {
                    return Err(Error::Parse { line: 0, reason: format!("bad letter {c:?} in word {s:?}") })
                }
            }
        }
        Ok(Word { k, letters })
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.k)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn last(&self) -> Option<u8> {
        self.letters.last().copied()
    }

    /// `self · λ`.
    pub fn child(&self, letter: u8) -> Word {
        debug_assert!(letter < self.k);
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.extend_from_slice(&self.letters);
        letters.push(letter);
        Word { k: self.k, letters }
    }

    /// The word with its last letter removed, if any.
    pub fn parent(&self) -> Option<Word> {
        if self.letters.is_empty() {
            return None;
        }
        Some(Word { k: self.k, letters: self.letters[..self.letters.len() - 1].to_vec() })
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.k == other.k && other.letters.starts_with(&self.letters)
    }

    /// Lexicographic index of this word among words of the same length.
    /// `None` when it does not fit in 64 bits.
    pub fn rank(&self) -> Option<u64> {
        let k = self.k as u64;
        self.letters
            .iter()
            .try_fold(0u64, |acc, &l| acc.checked_mul(k)?.checked_add(l as u64))
    }

    /// Inverse of [`Word::rank`].
    pub fn from_rank(alphabet: Alphabet, len: usize, mut rank: u64) -> Word {
        let k = alphabet.raw() as u64;
        let mut letters = vec![0u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (rank % k) as u8;
            rank /= k;
        }
        Word { k: alphabet.raw(), letters }
    }

    pub(crate) fn extend_from(&mut self, other: &Word) {
        self.letters.extend_from_slice(&other.letters);
    }

    pub(crate) fn push(&mut self, letter: u8) {
        self.letters.push(letter);
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.k.cmp(&other.k))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

fn same_alphabet(a: u8, b: u8) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch { left: a, right: b })
    }
}

/// The semigroup product `w · u`.
pub fn concat_words(w: &Word, u: &Word) -> Result<Word> {
    same_alphabet(w.k, u.k)?;
    let mut out = w.clone();
    out.extend_from(u);
    Ok(out)
}

/// Returns `t` with `descendant = ancestor · t`, or `None` if `ancestor` is
/// not a prefix of `descendant`.
pub fn is_descendent(descendant: &Word, ancestor: &Word) -> Option<Word> {
    if !ancestor.is_prefix_of(descendant) {
        return None;
    }
    Some(Word { k: descendant.k, letters: descendant.letters[ancestor.len()..].to_vec() })
}

/// A pair of word lengths. Addition is componentwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(pub usize, pub usize);

impl Add for Level {
    type Output = Level;

    fn add(self, rhs: Level) -> Level {
        Level(self.0 + rhs.0, self.1 + rhs.1)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// An element of the direct sum of two copies of the free semigroup.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairWord {
    pub first: Word,
    pub second: Word,
}

impl PairWord {
    pub fn new(first: Word, second: Word) -> Result<Self> {
        same_alphabet(first.k, second.k)?;
        Ok(PairWord { first, second })
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        PairWord { first: Word::empty(alphabet), second: Word::empty(alphabet) }
    }

    /// Parses `<w1>,<w2>`.
    pub fn parse(alphabet: Alphabet, s: &str) -> Result<Self> {
        let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse {
            line: 0,
            reason: format!("pair {s:?} lacks a comma"),
        })?;
        Ok(PairWord { first: Word::parse(alphabet, a)?, second: Word::parse(alphabet, b)? })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.first.alphabet()
    }

    pub fn level(&self) -> Level {
        Level(self.first.len(), self.second.len())
    }

    /// Componentwise product `self · other`.
    pub fn concat(&self, other: &PairWord) -> Result<PairWord> {
        Ok(PairWord {
            first: concat_words(&self.first, &other.first)?,
            second: concat_words(&self.second, &other.second)?,
        })
    }
}

impl fmt::Display for PairWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.first, self.second)
    }
}

/// Componentwise version of [`is_descendent`].
pub fn is_pair_descendent(descendant: &PairWord, ancestor: &PairWord) -> Option<PairWord> {
    Some(PairWord {
        first: is_descendent(&descendant.first, &ancestor.first)?,
        second: is_descendent(&descendant.second, &ancestor.second)?,
    })
}

/// A generator of the free product: `X_λ` moves horizontally, `Y_λ`
/// vertically. The derived order puts every `X` before every `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FreeToken {
    X(u8),
    Y(u8),
}

impl FreeToken {
    pub fn letter(self) -> u8 {
        match self {
            FreeToken::X(l) | FreeToken::Y(l) => l,
        }
    }

    /// All `2k` generators in order.
    pub fn all(alphabet: Alphabet) -> impl Iterator<Item = FreeToken> + Clone {
        alphabet.letters().map(FreeToken::X).chain(alphabet.letters().map(FreeToken::Y))
    }
}

impl fmt::Display for FreeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeToken::X(l) => write!(f, "x{}", letter_char(*l)),
            FreeToken::Y(l) => write!(f, "y{}", letter_char(*l)),
        }
    }
}

/// An element of the free product, i.e. a word in the generators
/// `X_λ`, `Y_λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeWord {
    k: u8,
    tokens: Vec<FreeToken>,
}

impl FreeWord {
    pub fn empty(alphabet: Alphabet) -> Self {
        FreeWord { k: alphabet.raw(), tokens: Vec::new() }
    }

    pub fn new(alphabet: Alphabet, tokens: Vec<FreeToken>) -> Result<Self> {
        let k = alphabet.raw();
        if let Some(t) = tokens.iter().find(|t| t.letter() >= k) {
            return Err(Error::LetterOutOfRange { letter: t.letter(), k });
        }
        Ok(FreeWord { k, tokens })
    }

    /// Parses dot-joined tokens such as `x0.y1`; `""` is the identity.
    pub fn parse(alphabet: Alphabet, s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(FreeWord::empty(alphabet));
        }
        let bad = || Error::Parse { line: 0, reason: format!("bad free-product address {s:?}") };
        let mut tokens = Vec::new();
        for part in s.split('.') {
            let mut chars = part.chars();
            let kind = chars.next().ok_or_else(bad)?;
            let rest: String = chars.collect();
            let mut rc = rest.chars();
            let letter = match (rc.next(), rc.next()) {
                (Some(c), None) => char_letter(c).ok_or_else(bad)?,
                _ => return Err(bad()),
            };
            tokens.push(match kind {
                'x' => FreeToken::X(letter),
                'y' => FreeToken::Y(letter),
                _ => return Err(bad()),
            });
        }
        FreeWord::new(alphabet, tokens)
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.k)
    }

    pub fn tokens(&self) -> &[FreeToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// `(number of X tokens, number of Y tokens)`.
    pub fn level(&self) -> Level {
        let xs = self.tokens.iter().filter(|t| matches!(t, FreeToken::X(_))).count();
        Level(xs, self.tokens.len() - xs)
    }

    pub fn child(&self, token: FreeToken) -> FreeWord {
        let mut tokens = self.tokens.clone();
        tokens.push(token);
        FreeWord { k: self.k, tokens }
    }

    pub fn parent(&self) -> Option<(FreeWord, FreeToken)> {
        let (&last, init) = self.tokens.split_last()?;
        Some((FreeWord { k: self.k, tokens: init.to_vec() }, last))
    }

    pub fn concat(&self, other: &FreeWord) -> Result<FreeWord> {
        same_alphabet(self.k, other.k)?;
        let mut tokens = self.tokens.clone();
        tokens.extend_from_slice(&other.tokens);
        Ok(FreeWord { k: self.k, tokens })
    }
}

impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tokens
            .len()
            .cmp(&other.tokens.len())
            .then_with(|| self.tokens.cmp(&other.tokens))
            .then_with(|| self.k.cmp(&other.k))
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Right action of a single generator on a pair.
pub fn act_token(g: &PairWord, token: FreeToken) -> PairWord {
    let mut out = g.clone();
    match token {
        FreeToken::X(l) => out.first.push(l),
        FreeToken::Y(l) => out.second.push(l),
    }
    out
}

/// Right action of the free product on pairs: tokens are applied left to
/// right, `X_λ` appending to the first word and `Y_λ` to the second.
pub fn act_free(g: &PairWord, t: &FreeWord) -> Result<PairWord> {
    same_alphabet(g.first.k, t.k)?;
    same_alphabet(g.second.k, t.k)?;
    let mut out = g.clone();
    for &token in &t.tokens {
        match token {
            FreeToken::X(l) => out.first.push(l),
            FreeToken::Y(l) => out.second.push(l),
        }
    }
    Ok(out)
}

/// Odometer over all words of one length, in lexicographic order.
#[derive(Clone, Debug)]
pub struct SphereIter {
    k: u8,
    current: Option<Vec<u8>>,
}

impl SphereIter {
    pub fn new(alphabet: Alphabet, len: usize) -> Self {
        SphereIter { k: alphabet.raw(), current: Some(vec![0; len]) }
    }
}

impl Iterator for SphereIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.current.as_mut()?;
        let out = Word { k: self.k, letters: cur.clone() };
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.k {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// All words of length exactly `r`, lexicographically, using the process cap.
pub fn enumerate_sphere(alphabet: Alphabet, r: usize) -> Result<Vec<Word>> {
    enumerate_sphere_capped(alphabet, r, enumeration_cap())
}

pub fn enumerate_sphere_capped(alphabet: Alphabet, r: usize, cap: u64) -> Result<Vec<Word>> {
    check_cap(pow_sat(alphabet.raw(), r), cap)?;
    Ok(SphereIter::new(alphabet, r).collect())
}

/// Number of words of length at most `r`, saturating.
pub fn ball_size(alphabet: Alphabet, r: usize) -> u128 {
    (0..=r).fold(0u128, |acc, i| acc.saturating_add(pow_sat(alphabet.raw(), i)))
}

/// All words of length at most `r` in shortlex order.
pub fn enumerate_ball(alphabet: Alphabet, r: usize) -> Result<Vec<Word>> {
    check_cap(ball_size(alphabet, r), enumeration_cap())?;
    Ok((0..=r).flat_map(|i| SphereIter::new(alphabet, i)).collect())
}

/// All free-product words of length at most `r`, shortlex with `X < Y`.
pub fn enumerate_free_ball(alphabet: Alphabet, r: usize) -> Result<Vec<FreeWord>> {
    enumerate_free_ball_capped(alphabet, r, enumeration_cap())
}

pub fn enumerate_free_ball_capped(alphabet: Alphabet, r: usize, cap: u64) -> Result<Vec<FreeWord>> {
    let gens = 2 * alphabet.raw() as u128;
    let mut total: u128 = 0;
    let mut layer: u128 = 1;
    for _ in 0..=r {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(gens);
    }
    check_cap(total, cap)?;
    let tokens: Vec<FreeToken> = FreeToken::all(alphabet).collect();
    let mut out = vec![FreeWord::empty(alphabet)];
    let mut start = 0;
    for _ in 0..r {
        let end = out.len();
        for i in start..end {
            for &t in &tokens {
                let w = out[i].child(t);
                out.push(w);
            }
        }
        start = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(k: usize, s: &str) -> Word {
        Word::parse(Alphabet::new(k).unwrap(), s).unwrap()
    }

    #[test]
    fn concat_identity_and_definition() {
        let k2 = Alphabet::new(2).unwrap();
        let e = Word::empty(k2);
        assert_eq!(concat_words(&e, &w(2, "0110")).unwrap(), w(2, "0110"));
        assert_eq!(concat_words(&w(2, "01"), &w(2, "1")).unwrap(), w(2, "011"));
        assert!(matches!(
            concat_words(&w(2, "0"), &w(3, "2")),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn concat_lengths_add() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let k = Alphabet::new(3).unwrap();
        for _ in 0..100 {
            let a: Vec<u8> = (0..rng.random_range(0..10)).map(|_| rng.random_range(0..3)).collect();
            let b: Vec<u8> = (0..rng.random_range(0..10)).map(|_| rng.random_range(0..3)).collect();
            let (la, lb) = (a.len(), b.len());
            let c = concat_words(&Word::new(k, a).unwrap(), &Word::new(k, b).unwrap()).unwrap();
            assert_eq!(c.len(), la + lb);
        }
    }

    #[test]
    fn descendants() {
        assert_eq!(is_descendent(&w(2, "011"), &w(2, "01")), Some(w(2, "1")));
        assert_eq!(is_descendent(&w(2, "011"), &w(2, "011")), Some(w(2, "")));
        assert_eq!(is_descendent(&w(2, "01"), &w(2, "1")), None);
        assert_eq!(is_descendent(&w(2, "0"), &w(2, "01")), None);
    }

    #[test]
    fn descendent_roundtrip_on_ball() {
        let k = Alphabet::new(2).unwrap();
        let ball = enumerate_ball(k, 4).unwrap();
        for a in &ball {
            for t in &ball {
                let c = concat_words(a, t).unwrap();
                assert_eq!(is_descendent(&c, a).as_ref(), Some(t));
            }
        }
    }

    #[test]
    fn spheres() {
        let k2 = Alphabet::new(2).unwrap();
        assert_eq!(enumerate_sphere(k2, 0).unwrap(), vec![w(2, "")]);
        assert_eq!(
            enumerate_sphere(k2, 2).unwrap(),
            vec![w(2, "00"), w(2, "01"), w(2, "10"), w(2, "11")]
        );
        assert_eq!(enumerate_sphere(Alphabet::new(3).unwrap(), 4).unwrap().len(), 81);
        for k in 1..=4usize {
            for r in 0..=8usize {
                let s = enumerate_sphere(Alphabet::new(k).unwrap(), r).unwrap();
                assert_eq!(s.len(), k.pow(r as u32));
                assert!(s.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }

    #[test]
    fn sphere_cap_is_an_error() {
        let k = Alphabet::new(2).unwrap();
        assert!(matches!(enumerate_sphere_capped(k, 10, 1000), Err(Error::CapExceeded { .. })));
        assert!(matches!(enumerate_free_ball_capped(k, 5, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn free_ball() {
        let k1 = Alphabet::new(1).unwrap();
        let b = enumerate_free_ball(k1, 1).unwrap();
        assert_eq!(
            b,
            vec![
                FreeWord::empty(k1),
                FreeWord::new(k1, vec![FreeToken::X(0)]).unwrap(),
                FreeWord::new(k1, vec![FreeToken::Y(0)]).unwrap(),
            ]
        );
        let k2 = Alphabet::new(2).unwrap();
        let b2 = enumerate_free_ball(k2, 2).unwrap();
        assert_eq!(b2.len(), 1 + 4 + 16);
        assert!(b2.windows(2).all(|p| p[0] < p[1]));
        let t = FreeWord::parse(k2, "x0.y1.x0").unwrap();
        assert_eq!(t.level(), Level(2, 1));
        assert_eq!(t.to_string(), "x0.y1.x0");
    }

    #[test]
    fn free_action() {
        let k2 = Alphabet::new(2).unwrap();
        let id = PairWord::identity(k2);
        let t = FreeWord::parse(k2, "x0.y1").unwrap();
        assert_eq!(act_free(&id, &t).unwrap(), PairWord::parse(k2, "0,1").unwrap());
        assert_eq!(act_free(&id, &FreeWord::empty(k2)).unwrap(), id);
    }

    #[test]
    fn free_action_law_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let k = Alphabet::new(2).unwrap();
        let gens: Vec<FreeToken> = FreeToken::all(k).collect();
        let rand_free = |rng: &mut rand_chacha::ChaCha8Rng| {
            let n = rng.random_range(0..6);
            FreeWord::new(k, (0..n).map(|_| gens[rng.random_range(0..gens.len())]).collect()).unwrap()
        };
        for _ in 0..100 {
            let g = PairWord::new(
                Word::from_rank(k, 3, rng.random_range(0..8)),
                Word::from_rank(k, 2, rng.random_range(0..4)),
            )
            .unwrap();
            let s = rand_free(&mut rng);
            let t = rand_free(&mut rng);
            // expand s·t token by token
            let mut expected = g.clone();
            for &tok in s.tokens().iter().chain(t.tokens()) {
                expected = act_token(&expected, tok);
            }
            let lhs = act_free(&act_free(&g, &s).unwrap(), &t).unwrap();
            assert_eq!(lhs, expected);
            assert_eq!(act_free(&g, &s.concat(&t).unwrap()).unwrap(), expected);
        }
    }

    #[test]
    fn homomorphism_preserves_levels() {
        let k = Alphabet::new(2).unwrap();
        let id = PairWord::identity(k);
        let b3 = enumerate_free_ball(k, 3).unwrap();
        assert_eq!(b3.len(), 1 + 4 + 16 + 64);
        for t in enumerate_free_ball(k, 4).unwrap() {
            assert_eq!(act_free(&id, &t).unwrap().level(), t.level());
        }
    }

    #[test]
    fn action_composition_exhaustive() {
        let k = Alphabet::new(1).unwrap();
        let ball = enumerate_free_ball(k, 3).unwrap();
        let g = PairWord::parse(k, "0,").unwrap();
        for s in &ball {
            for t in &ball {
                let lhs = act_free(&act_free(&g, s).unwrap(), t).unwrap();
                assert_eq!(lhs, act_free(&g, &s.concat(t).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn rank_roundtrip() {
        let k = Alphabet::new(3).unwrap();
        for (i, word) in SphereIter::new(k, 4).enumerate() {
            assert_eq!(word.rank(), Some(i as u64));
            assert_eq!(Word::from_rank(k, 4, i as u64), word);
        }
    }
}
