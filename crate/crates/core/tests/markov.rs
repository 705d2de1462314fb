mod common;

use common::*;
use num::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tree_ramsey::markov::{self, FiniteMarkovSystem, StateFunction, StateSet};
use tree_ramsey::semigroup::Level;

fn random_function(rng: &mut ChaCha8Rng, m: usize) -> StateFunction {
    StateFunction((0..m).map(|_| q(rng.random_range(-6..=6), rng.random_range(1..=4))).collect())
}

/// Arbitrary maps and per-state probability rows, some entries zero.
fn random_system(rng: &mut ChaCha8Rng, m: usize, letters: usize) -> FiniteMarkovSystem {
    let transitions = (0..letters).map(|_| (0..m).map(|_| rng.random_range(0..m)).collect()).collect();
    let mut probabilities = vec![vec![q(0, 1); m]; letters];
    for x in 0..m {
        let w: Vec<i64> = (0..letters).map(|_| rng.random_range(0..=2)).collect();
        let w = if w.iter().all(|&v| v == 0) { vec![1; letters] } else { w };
        let total: i64 = w.iter().sum();
        for (row, &wl) in probabilities.iter_mut().zip(&w) {
            row[x] = q(wl, total);
        }
    }
    FiniteMarkovSystem::new(k(letters), transitions, probabilities).unwrap()
}

/// Endpoints of every letter sequence of length `len` starting with `first`
/// whose steps all have positive probability.
fn path_oracle(sys: &FiniteMarkovSystem, x: usize, len: usize, first: u8) -> StateSet {
    if len == 0 {
        return StateSet::from([x]);
    }
    let letters = sys.alphabet().size();
    let mut out = StateSet::new();
    for code in 0..letters.pow(len as u32 - 1) {
        let mut seq = vec![first];
        let mut c = code;
        for _ in 1..len {
            seq.push((c % letters) as u8);
            c /= letters;
        }
        let mut s = x;
        let mut ok = true;
        for &l in &seq {
            if *sys.probability(l, s) == q(0, 1) {
                ok = false;
                break;
            }
            s = sys.target(l, s);
        }
        if ok {
            out.insert(s);
        }
    }
    out
}

#[test]
fn reachability_matches_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let m = rng.random_range(1..=6);
        let letters = rng.random_range(1..=3);
        let sys = random_system(&mut rng, m, letters);
        for x in 0..m {
            for len in 0..=4 {
                for first in 0..letters as u8 {
                    assert_eq!(markov::reachable_endpoints(&sys, x, len, first), path_oracle(&sys, x, len, first));
                }
            }
        }
    }
}

#[test]
fn roots_shrink_as_order_grows() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let one = Level(1, 1);
    for _ in 0..60 {
        let pair = random_valid_pair(&mut rng, 12, 2);
        let target = random_target(&mut rng, pair.states());
        for n in 1..=2 {
            let mut prev = target.clone();
            for r in 0..=4 {
                let roots = markov::roots_by_search(&pair, &target, one, one, n, r).unwrap();
                assert!(roots.is_subset(&prev), "r={r}");
                prev = roots;
            }
        }
    }
}

#[test]
fn phi_is_supported_on_roots_for_small_products() {
    let one = Level(1, 1);
    for (a, b) in [(2, 2), (2, 3), (3, 2)] {
        for f in disjoint_image_classes(a, 2) {
            for g in disjoint_image_classes(b, 2) {
                let (t1, t2) = product_maps(&f, &g);
                let pair = pair_from_maps(t1, t2, &[q(1, 3), q(2, 3)], &uniform(2));
                for mask in 0u32..1 << (a * b) {
                    let target: StateSet = (0..a * b).filter(|x| mask >> x & 1 == 1).collect();
                    for r in 1..=2 {
                        let phi = markov::compute_phi_r(&pair, &target, one, one, 1, r).unwrap();
                        assert!(phi.0.iter().all(|v| *v >= q(0, 1) && *v <= q(1, 1)));
                        let roots = markov::roots_by_search(&pair, &target, one, one, 1, r - 1).unwrap();
                        assert!(phi.support().is_subset(&roots));
                    }
                }
            }
        }
    }
}

#[test]
fn recurrence_rejects_invalid_pairs() {
    // the identity-and-swap pair commutes but its images overlap
    let s = FiniteMarkovSystem::with_constant_probabilities(k(2), vec![vec![0, 1], vec![1, 0]], &uniform(2)).unwrap();
    let pair = markov::CommutingPair::new(s.clone(), s).unwrap();
    let target = StateSet::from([0]);
    assert!(markov::compute_phi_r(&pair, &target, Level(1, 1), Level(1, 1), 1, 1).is_err());
    assert!(markov::roots_by_search(&pair, &target, Level(1, 1), Level(1, 1), 1, 1).is_err());
}

proptest! {
    #[test]
    fn operators_preserve_constants_and_contract(seed in any::<u64>(), c in -5i64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=6);
        let letters = rng.random_range(1..=3);
        let sys = random_system(&mut rng, m, letters);
        let constant = StateFunction::constant(m, BigRational::from_integer(c.into()));
        prop_assert_eq!(markov::markov_apply(&sys, &constant).unwrap(), constant);
        let f = random_function(&mut rng, m);
        prop_assert!(markov::markov_apply(&sys, &f).unwrap().sup_norm() <= f.sup_norm());
    }

    #[test]
    fn commuting_pairs_have_commuting_operators(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_valid_pair(&mut rng, 12, 2);
        prop_assert!(markov::validate_pair(&pair).is_valid());
        let f = random_function(&mut rng, pair.states());
        let p12 = markov::markov_apply(pair.first(), &markov::markov_apply(pair.second(), &f).unwrap()).unwrap();
        let p21 = markov::markov_apply(pair.second(), &markov::markov_apply(pair.first(), &f).unwrap()).unwrap();
        prop_assert_eq!(p12, p21);
    }
}
