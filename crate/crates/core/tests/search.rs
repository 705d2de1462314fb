mod common;

use common::*;
use num::{BigInt, BigRational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tree_ramsey::search::{self, IncrementMode, Outcome, SearchBudget};
use tree_ramsey::semigroup::{enumerate_ball, Level, Word};
use tree_ramsey::sets::TreeSet;
use tree_ramsey::structures::{verify_arithmetic_subtree, verify_product_tree, verify_regular_embedding};

/// Does `w` root an arithmetic subtree of order `d` and gap `q` in `members`?
fn roots_tree(members: &[Word], w: &Word, d: usize, q: usize) -> bool {
    d == 0
        || w.alphabet().letters().all(|l| {
            let prefix = w.child(l);
            members.iter().any(|c| c.len() == w.len() + q && prefix.is_prefix_of(c) && roots_tree(members, c, d - 1, q))
        })
}

fn oracle(members: &[Word], depth: usize, r: usize) -> bool {
    members.iter().any(|a| (1..depth).any(|q| roots_tree(members, a, r, q)))
}

fn check_against_oracle(set: &TreeSet, r: usize) {
    let members: Vec<Word> = set.members().collect();
    let got = search::find_arithmetic_subtree(set, r, None, &SearchBudget::default()).unwrap();
    let expected = oracle(&members, set.depth(), r);
    assert_eq!(got.is_found(), expected, "{members:?} r={r}");
    if let Outcome::Found(w) = got {
        assert!(verify_arithmetic_subtree(&w, set).unwrap().is_pass());
        assert!(roots_tree(&members, &w.map[&Word::empty(set.alphabet())], r, w.gap));
    }
}

#[test]
fn tree_search_matches_brute_force_on_every_depth_three_set() {
    let a = k(2);
    let ball = enumerate_ball(a, 2).unwrap();
    for mask in 0u32..1 << ball.len() {
        let members: Vec<Word> = ball.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone()).collect();
        let set = TreeSet::explicit(a, 3, members).unwrap();
        for r in 1..=2 {
            check_against_oracle(&set, r);
        }
    }
}

#[test]
fn tree_search_matches_brute_force_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..300 {
        let a = k(2 + i % 2);
        let n = if a.size() == 2 { 4 } else { 3 };
        let set = TreeSet::random(a, n, &q(rng.random_range(2..=4), 4), rng.random()).unwrap();
        check_against_oracle(&set, 1 + i % 2);
    }
}

#[test]
fn search_is_monotone_in_the_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = k(2);
    for _ in 0..100 {
        let small = TreeSet::random(a, 5, &q(1, 2), rng.random()).unwrap();
        let extra = TreeSet::random(a, 5, &q(1, 2), rng.random()).unwrap();
        let big = TreeSet::explicit(a, 5, small.members().chain(extra.members()).collect::<Vec<_>>()).unwrap();
        for r in 1..=2 {
            if let Outcome::Found(w) = search::find_arithmetic_subtree(&small, r, None, &SearchBudget::default()).unwrap() {
                assert!(verify_arithmetic_subtree(&w, &big).unwrap().is_pass());
                assert!(search::find_arithmetic_subtree(&big, r, None, &SearchBudget::default()).unwrap().is_found());
            }
        }
    }
}

#[test]
fn level_mask_witnesses_follow_progressions_of_levels() {
    let a = k(2);
    for n in 1..=8 {
        for mask in 0u32..1 << n {
            let levels: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let set = TreeSet::level_mask(a, n, levels.clone()).unwrap();
            for r in 1..=2 {
                let has_ap = levels.iter().any(|&l| (1..n).any(|q| (0..=r).all(|i| levels.contains(&(l + i * q)))));
                match search::find_arithmetic_subtree(&set, r, None, &SearchBudget::default()).unwrap() {
                    Outcome::Found(w) => {
                        assert!(has_ap);
                        let l0 = w.map[&Word::empty(a)].len();
                        for (u, img) in &w.map {
                            assert_eq!(img.len(), l0 + u.len() * w.gap);
                            assert!(levels.contains(&img.len()));
                        }
                    }
                    Outcome::Exhausted => assert!(!has_ap, "{levels:?} r={r}"),
                    Outcome::BudgetExhausted { .. } => unreachable!(),
                }
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let one = SearchBudget::default();
    let many = SearchBudget::default().with_workers(4);
    for _ in 0..20 {
        let set = TreeSet::random(k(2), 6, &q(3, 4), rng.random()).unwrap();
        assert_eq!(search::find_arithmetic_subtree(&set, 2, None, &one).unwrap(), search::find_arithmetic_subtree(&set, 2, None, &many).unwrap());
        assert_eq!(search::find_regular_embedding(&set, 3, &one).unwrap(), search::find_regular_embedding(&set, 3, &many).unwrap());
        let grid = tree_ramsey::sets::GridTreeSet::random(k(2), 4, &q(3, 4), rng.random()).unwrap();
        let u = Level(1, 1);
        let a = search::find_product_tree(&grid, 1, u, u, 1..=2, IncrementMode::Strict, &one).unwrap();
        let b = search::find_product_tree(&grid, 1, u, u, 1..=2, IncrementMode::Strict, &many).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn fuzzed_witnesses_verify() {
    for (set, w) in collect(30, 1, fuzz_regular) {
        assert!(verify_regular_embedding(&w, &set).unwrap().is_pass());
    }
    for (set, w) in collect(30, 2, fuzz_product) {
        assert!(verify_product_tree(&w, &set).unwrap().is_pass());
    }
}

#[test]
fn tiny_budget_is_reported() {
    let set = TreeSet::level_mask(k(2), 6, [0, 2, 4]).unwrap();
    match search::find_arithmetic_subtree(&set, 3, None, &SearchBudget::nodes(1)).unwrap() {
        Outcome::BudgetExhausted { nodes } => assert!(nodes >= 1),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #[test]
    fn dense_indices_are_numerous(nums in prop::collection::vec(0i64..=12, 1..40), frac in 1i64..=12) {
        let values: Vec<BigRational> = nums.iter().map(|&x| q(x, 12)).collect();
        let mean: BigRational = values.iter().sum::<BigRational>() / BigRational::from_integer(BigInt::from(values.len()));
        prop_assume!(mean > q(0, 1));
        let delta = mean * q(frac, 12);
        let j = search::select_dense_indices(&values, &delta).unwrap();
        // |J| ≥ δN/2
        prop_assert!(BigRational::from_integer(BigInt::from(2 * j.len())) >= &delta * BigRational::from_integer(BigInt::from(values.len())));
        for (i, v) in values.iter().enumerate() {
            prop_assert_eq!(j.contains(&i), v * q(2, 1) >= delta);
        }
    }
}
