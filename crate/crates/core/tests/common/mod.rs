#![allow(dead_code)]

use num::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tree_ramsey::markov::{CommutingPair, FiniteMarkovSystem, StateSet};
use tree_ramsey::semigroup::{Alphabet, Level, PairWord, Word};
use tree_ramsey::search::{self, IncrementMode, SearchBudget};
use tree_ramsey::sets::{density_2d, level_lift, GridSet, GridTreeSet, TreeSet};
use tree_ramsey::structures::{ProductTreeWitness, RegularEmbeddingWitness, TreeArrayWitness, TreeWitness};

/// Letter maps `maps[l][x]`.
pub type Maps = Vec<Vec<usize>>;

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn k(n: usize) -> Alphabet {
    Alphabet::new(n).unwrap()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

fn images_disjoint(maps: &[Vec<usize>]) -> bool {
    let mut seen = vec![usize::MAX; maps[0].len()];
    for (l, m) in maps.iter().enumerate() {
        for &y in m {
            if seen[y] != usize::MAX && seen[y] != l {
                return false;
            }
            seen[y] = l;
        }
    }
    true
}

fn all_maps(a: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..a {
        out = out.into_iter().flat_map(|m: Vec<usize>| (0..a).map(move |y| [m.clone(), vec![y]].concat())).collect();
    }
    out
}

/// All tuples of `letters` maps on `[a]` with pairwise disjoint images.
pub fn disjoint_image_systems(a: usize, letters: usize) -> Vec<Vec<Vec<usize>>> {
    let maps = all_maps(a);
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for _ in 0..letters {
        out = out
            .into_iter()
            .flat_map(|t| maps.iter().map(move |m| [t.clone(), vec![m.clone()]].concat()))
            .filter(|t| images_disjoint(t))
            .collect();
    }
    out
}

fn conjugate_maps(maps: &[Vec<usize>], perm: &[usize]) -> Vec<Vec<usize>> {
    maps.iter()
        .map(|m| {
            let mut c = vec![0; m.len()];
            for (x, &y) in m.iter().enumerate() {
                c[perm[x]] = perm[y];
            }
            c
        })
        .collect()
}

/// One representative per relabelling class of [`disjoint_image_systems`].
pub fn disjoint_image_classes(a: usize, letters: usize) -> Vec<Vec<Vec<usize>>> {
    let perms = permutations(a);
    let mut reps: Vec<Vec<Vec<usize>>> = disjoint_image_systems(a, letters)
        .into_iter()
        .filter(|t| perms.iter().all(|p| conjugate_maps(t, p) >= *t))
        .collect();
    reps.dedup();
    reps
}

pub fn uniform(letters: usize) -> Vec<BigRational> {
    vec![q(1, letters as i64); letters]
}

pub fn pair_from_maps(t1: Vec<Vec<usize>>, t2: Vec<Vec<usize>>, p1: &[BigRational], p2: &[BigRational]) -> CommutingPair {
    let a = k(t1.len());
    CommutingPair::new(
        FiniteMarkovSystem::with_constant_probabilities(a, t1, p1).unwrap(),
        FiniteMarkovSystem::with_constant_probabilities(a, t2, p2).unwrap(),
    )
    .unwrap()
}

/// `f` acting on the first coordinate of `[a]×[b]`, `g` on the second.
pub fn product_maps(f: &[Vec<usize>], g: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let (a, b) = (f[0].len(), g[0].len());
    let t1 = f.iter().map(|fl| (0..a * b).map(|s| fl[s / b] * b + s % b).collect()).collect();
    let t2 = g.iter().map(|gl| (0..a * b).map(|s| s / b * b + gl[s % b]).collect()).collect();
    (t1, t2)
}

fn commute(s: &[Vec<usize>], t: &[Vec<usize>]) -> bool {
    s.iter().all(|f| t.iter().all(|g| (0..f.len()).all(|x| f[g[x]] == g[f[x]])))
}

/// Every commuting pair of disjoint-image systems on `m` states, two letters.
pub fn all_commuting_pairs(m: usize) -> Vec<(Maps, Maps)> {
    let systems = disjoint_image_systems(m, 2);
    let mut out = Vec::new();
    for s in &systems {
        for t in &systems {
            if commute(s, t) {
                out.push((s.clone(), t.clone()));
            }
        }
    }
    out
}

fn random_disjoint_maps(rng: &mut ChaCha8Rng, a: usize, letters: usize) -> Vec<Vec<usize>> {
    let mut pts: Vec<usize> = (0..a).collect();
    pts.shuffle(rng);
    // cut points give `letters` non-empty blocks, the remainder unused
    let used = rng.random_range(letters..=a);
    let mut cuts: Vec<usize> = (1..used).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..letters - 1].to_vec();
    cuts.sort();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(used);
    (0..letters)
        .map(|l| {
            let block = &pts[bounds[l]..bounds[l + 1]];
            (0..a).map(|_| block[rng.random_range(0..block.len())]).collect()
        })
        .collect()
}

fn random_probabilities(rng: &mut ChaCha8Rng, letters: usize) -> Vec<BigRational> {
    let w: Vec<i64> = (0..letters).map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| q(x, total)).collect()
}

/// A product pair on `[a]×[b]` with `a·b ≤ max_states`, relabelled by a
/// random permutation of the states.
pub fn random_valid_pair(rng: &mut ChaCha8Rng, max_states: usize, letters: usize) -> CommutingPair {
    let a = rng.random_range(letters..=max_states / letters);
    let b = rng.random_range(letters..=max_states / a);
    let f = random_disjoint_maps(rng, a, letters);
    let g = random_disjoint_maps(rng, b, letters);
    let (t1, t2) = product_maps(&f, &g);
    let mut perm: Vec<usize> = (0..a * b).collect();
    perm.shuffle(rng);
    let (t1, t2) = (conjugate_maps(&t1, &perm), conjugate_maps(&t2, &perm));
    let (p1, p2) = (random_probabilities(rng, letters), random_probabilities(rng, letters));
    pair_from_maps(t1, t2, &p1, &p2)
}

pub fn random_target(rng: &mut ChaCha8Rng, m: usize) -> StateSet {
    (0..m).filter(|_| rng.random_bool(0.5)).collect()
}

pub fn random_pair_word(rng: &mut ChaCha8Rng, a: Alphabet, max_len: usize) -> PairWord {
    let word = |rng: &mut ChaCha8Rng| {
        let len = rng.random_range(0..=max_len);
        Word::new(a, (0..len).map(|_| rng.random_range(0..a.size() as u8)).collect()).unwrap()
    };
    let first = word(rng);
    PairWord::new(first, word(rng)).unwrap()
}

pub fn random_grid(rng: &mut ChaCha8Rng, n: usize, p: f64) -> GridSet {
    GridSet::new(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|_| rng.random_bool(p)).collect::<Vec<_>>()).unwrap()
}

fn random_tree_set(rng: &mut ChaCha8Rng) -> TreeSet {
    let a = k(rng.random_range(2..=3));
    let n = rng.random_range(2..=if a.size() == 2 { 6 } else { 5 });
    if rng.random_bool(0.5) {
        let levels: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
        TreeSet::level_mask(a, n, levels).unwrap()
    } else {
        let delta = [q(3, 4), q(7, 8), q(1, 1)][rng.random_range(0..3)].clone();
        TreeSet::random(a, n, &delta, rng.random()).unwrap()
    }
}

fn random_grid_tree_set(rng: &mut ChaCha8Rng, max_explicit: usize, max_lift: usize) -> GridTreeSet {
    let a = k(2);
    if rng.random_bool(0.5) {
        let n = rng.random_range(2..=max_lift);
        level_lift(&random_grid(rng, n, 0.75), a)
    } else {
        let n = rng.random_range(2..=max_explicit);
        let delta = [q(3, 4), q(7, 8), q(1, 1)][rng.random_range(0..3)].clone();
        GridTreeSet::random(a, n, &delta, rng.random()).unwrap()
    }
}

fn budget() -> SearchBudget {
    SearchBudget::nodes(200_000)
}

pub fn fuzz_tree(rng: &mut ChaCha8Rng) -> Option<(TreeSet, TreeWitness)> {
    let set = random_tree_set(rng);
    let r = rng.random_range(1..=2.min(set.depth() - 1));
    let w = search::find_arithmetic_subtree(&set, r, None, &budget()).unwrap().found()?;
    Some((set, w))
}

pub fn fuzz_regular(rng: &mut ChaCha8Rng) -> Option<(TreeSet, RegularEmbeddingWitness)> {
    let set = random_tree_set(rng);
    let d = rng.random_range(1..=3.min(set.depth() - 1));
    let w = search::find_regular_embedding(&set, d, &budget()).unwrap().found()?;
    Some((set, w))
}

pub fn fuzz_array(rng: &mut ChaCha8Rng) -> Option<(GridTreeSet, TreeArrayWitness)> {
    let set = random_grid_tree_set(rng, 4, 6);
    let delta = density_2d(&set).unwrap();
    if delta == q(0, 1) {
        return None;
    }
    let r = rng.random_range(1..=2);
    let w = search::construct_tree_array(&set, r, &delta, &budget()).unwrap().found()?;
    Some((set, w))
}

pub fn fuzz_product(rng: &mut ChaCha8Rng) -> Option<(GridTreeSet, ProductTreeWitness)> {
    let set = random_grid_tree_set(rng, 4, 6);
    let r = rng.random_range(1..=2);
    let steps = [Level(1, 1), Level(1, 2), Level(2, 1)];
    let u = steps[rng.random_range(0..3)];
    let v = steps[rng.random_range(0..3)];
    let (_, w) = search::find_product_tree(&set, r, u, v, 1..=2, IncrementMode::Strict, &budget()).unwrap().found()?;
    Some((set, w))
}

/// Runs `gen` on successive seeds until `count` successes.
pub fn collect<T>(count: usize, salt: u64, mut gen: impl FnMut(&mut ChaCha8Rng) -> Option<T>) -> Vec<T> {
    use rand::SeedableRng;
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        assert!(seed < 100 * count as u64, "generator rarely succeeds");
        let mut rng = ChaCha8Rng::seed_from_u64(salt.wrapping_mul(1_000_003).wrapping_add(seed));
        seed += 1;
        if let Some(t) = gen(&mut rng) {
            out.push(t);
        }
    }
    out
}
