use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use super::budget::{first_success, Meter, Outcome, SearchBudget, Stop};
use crate::error::{Error, Result};
use crate::semigroup::{enumerate_ball, Word};
use crate::sets::TreeSet;
use crate::structures::{RegularEmbeddingWitness, TreeWitness};

type Memo = HashMap<(Word, usize), bool>;

/// Image levels as a function of the domain level: an arithmetic
/// progression for arithmetic subtrees, an arbitrary increasing schedule for
/// regular embeddings.
trait Schedule: Sync {
    fn level(&self, depth: usize) -> usize;
    fn max_depth(&self) -> usize;
}

struct Arithmetic {
    start: usize,
    gap: usize,
    order: usize,
}

impl Schedule for Arithmetic {
    fn level(&self, depth: usize) -> usize {
        self.start + self.gap * depth
    }

    fn max_depth(&self) -> usize {
        self.order
    }
}

struct Listed(Vec<usize>);

impl Schedule for Listed {
    fn level(&self, depth: usize) -> usize {
        self.0[depth]
    }

    fn max_depth(&self) -> usize {
        self.0.len() - 1
    }
}

struct Embedder<'a, S> {
    set: &'a TreeSet,
    schedule: S,
    meter: &'a Meter,
}

impl<S: Schedule> Embedder<'_, S> {
    /// Whether the subtree of the domain vertex at `depth` can be embedded
    /// with `x` as its image.
    fn feasible(&self, memo: &mut Memo, x: &Word, depth: usize) -> std::result::Result<bool, Stop> {
        if !self.set.contains(x) {
            return Ok(false);
        }
        if depth == self.schedule.max_depth() {
            return Ok(true);
        }
        if let Some(&hit) = memo.get(&(x.clone(), depth)) {
            return Ok(hit);
        }
        self.meter.tick()?;
        let next = self.schedule.level(depth + 1);
        let alphabet = self.set.alphabet();
        let mut ok = alphabet.letters().all(|l| self.set.has_descendant_in(&x.child(l), next));
        if ok {
            for l in alphabet.letters() {
                let mut any = false;
                for c in self.set.descendants_in(&x.child(l), next) {
                    if self.feasible(memo, &c, depth + 1)? {
                        any = true;
                        break;
                    }
                }
                if !any {
                    ok = false;
                    break;
                }
            }
        }
        memo.insert((x.clone(), depth), ok);
        Ok(ok)
    }

    /// The canonical map below a feasible root. Only consults memoized
    /// answers.
    fn build(&self, memo: &mut Memo, root: Word) -> std::result::Result<BTreeMap<Word, Word>, Stop> {
        let alphabet = self.set.alphabet();
        let mut map = BTreeMap::new();
        map.insert(Word::empty(alphabet), root);
        let domain = enumerate_ball(alphabet, self.schedule.max_depth()).expect("domain fits");
        for a in domain.into_iter().skip(1) {
            let parent = a.parent().expect("non-root");
            let pimg = map[&parent].child(a.last().expect("non-root"));
            let level = self.schedule.level(a.len());
            let mut chosen = None;
            for c in self.set.descendants_in(&pimg, level) {
                if self.feasible(memo, &c, a.len())? {
                    chosen = Some(c);
                    break;
                }
            }
            map.insert(a, chosen.expect("feasible parent has a feasible child"));
        }
        Ok(map)
    }
}

/// Searches arithmetic subtrees of order `order` in `set`, trying gaps in
/// increasing order (all admissible gaps when `gaps` is `None`).
pub fn find_arithmetic_subtree(
    set: &TreeSet,
    order: usize,
    gaps: Option<RangeInclusive<usize>>,
    budget: &SearchBudget,
) -> Result<Outcome<TreeWitness>> {
    let n = set.depth();
    let top = n.saturating_sub(1);
    let gaps = match gaps {
        Some(g) => {
            if order > 0 && *g.start() == 0 {
                return Err(Error::Precondition("gap must be at least 1".into()));
            }
            g
        }
        None if order == 0 => 1..=1,
        None => 1..=(top / order).max(1),
    };
    let meter = Meter::new(budget);
    let alphabet = set.alphabet();
    let result = (|| {
        for gap in gaps {
            let span = gap * order;
            if span > top && n > 0 {
                break;
            }
            let roots: Vec<Word> = set.members().take_while(|x| x.len() + span <= top).collect();
            let found = first_success(&roots, budget, Memo::new, |memo, root| {
                let e = Embedder { set, schedule: Arithmetic { start: root.len(), gap, order }, meter: &meter };
                if e.feasible(memo, root, 0)? {
                    Ok(Some(TreeWitness { alphabet, order, gap, map: e.build(memo, root.clone())? }))
                } else {
                    Ok(None)
                }
            })?;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    })();
    Ok(meter.outcome(result))
}

/// Increasing `size`-subsets of `items` in lexicographic order.
fn combinations(items: &[usize], size: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let mut idx: Option<Vec<usize>> = (size <= items.len()).then(|| (0..size).collect());
    std::iter::from_fn(move || {
        let cur = idx.as_mut()?;
        let out: Vec<usize> = cur.iter().map(|&i| items[i]).collect();
        let n = items.len();
        let mut i = size;
        loop {
            if i == 0 {
                idx = None;
                break;
            }
            i -= 1;
            if cur[i] < n - size + i {
                cur[i] += 1;
                for t in i + 1..size {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Searches regular embeddings of `T_depth` into `set`: level schedules
/// outer (lexicographic), images inner.
pub fn find_regular_embedding(set: &TreeSet, depth: usize, budget: &SearchBudget) -> Result<Outcome<RegularEmbeddingWitness>> {
    let meter = Meter::new(budget);
    let alphabet = set.alphabet();
    let occupied = set.occupied_levels();
    let result = (|| {
        for schedule in combinations(&occupied, depth + 1) {
            meter.tick()?;
            let roots: Vec<Word> = set.level_members(schedule[0]).collect();
            let found = first_success(&roots, budget, Memo::new, |memo, root| {
                let e = Embedder { set, schedule: Listed(schedule.clone()), meter: &meter };
                if e.feasible(memo, root, 0)? {
                    Ok(Some(RegularEmbeddingWitness { alphabet, depth, map: e.build(memo, root.clone())? }))
                } else {
                    Ok(None)
                }
            })?;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    })();
    Ok(meter.outcome(result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::Alphabet;
    use crate::structures::{verify_arithmetic_subtree, verify_regular_embedding};

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn combinations_in_order() {
        let all: Vec<Vec<usize>> = combinations(&[1, 3, 4, 7], 2).collect();
        assert_eq!(all, vec![vec![1, 3], vec![1, 4], vec![1, 7], vec![3, 4], vec![3, 7], vec![4, 7]]);
        assert_eq!(combinations(&[1, 2], 3).count(), 0);
        assert_eq!(combinations(&[1, 2], 0).count(), 1);
    }

    #[test]
    fn full_tree_gives_identity() {
        let set = TreeSet::full(k2(), 4);
        for r in 0..=3 {
            let w = find_arithmetic_subtree(&set, r, None, &SearchBudget::default()).unwrap().found().unwrap();
            assert_eq!(w.gap, 1);
            assert!(w.map.iter().all(|(a, b)| a == b));
        }
    }

    #[test]
    fn even_levels_need_gap_two() {
        let set = TreeSet::level_mask(k2(), 7, [0, 2, 4, 6]).unwrap();
        let w = find_arithmetic_subtree(&set, 2, None, &SearchBudget::default()).unwrap().found().unwrap();
        assert_eq!(w.gap, 2);
        assert!(verify_arithmetic_subtree(&w, &set).unwrap().is_pass());
        // the canonical child of ∅ under 1 is "10"
        assert_eq!(w.map[&Word::parse(k2(), "1").unwrap()], Word::parse(k2(), "10").unwrap());
        assert_eq!(
            find_arithmetic_subtree(&set, 2, Some(1..=1), &SearchBudget::default()).unwrap(),
            Outcome::Exhausted
        );
    }

    #[test]
    fn empty_set_has_nothing() {
        let set = TreeSet::empty(k2(), 5);
        assert_eq!(find_arithmetic_subtree(&set, 1, None, &SearchBudget::default()).unwrap(), Outcome::Exhausted);
        assert_eq!(find_regular_embedding(&set, 0, &SearchBudget::default()).unwrap(), Outcome::Exhausted);
    }

    #[test]
    fn budget_is_reported() {
        let set = TreeSet::level_mask(k2(), 9, [0, 3, 5, 8]).unwrap();
        let out = find_arithmetic_subtree(&set, 2, None, &SearchBudget::nodes(1)).unwrap();
        assert!(matches!(out, Outcome::BudgetExhausted { .. }));
    }

    #[test]
    fn regular_embedding_cases() {
        let full = TreeSet::full(k2(), 4);
        for d in 0..4 {
            let w = find_regular_embedding(&full, d, &SearchBudget::default()).unwrap().found().unwrap();
            assert!(w.map.iter().all(|(a, b)| a == b));
        }
        let one_level = TreeSet::level_mask(k2(), 5, [3]).unwrap();
        assert_eq!(find_regular_embedding(&one_level, 1, &SearchBudget::default()).unwrap(), Outcome::Exhausted);
        let uneven = TreeSet::level_mask(k2(), 6, [1, 2, 5]).unwrap();
        let w = find_regular_embedding(&uneven, 2, &SearchBudget::default()).unwrap().found().unwrap();
        assert_eq!(w.level_schedule(), Some(vec![1, 2, 5]));
        assert!(verify_regular_embedding(&w, &uneven).unwrap().is_pass());
    }

    #[test]
    fn workers_do_not_change_the_answer() {
        let delta = num::BigRational::new(3.into(), 5.into());
        for seed in 0..10 {
            let set = TreeSet::random(k2(), 6, &delta, seed).unwrap();
            let one = find_arithmetic_subtree(&set, 2, None, &SearchBudget::default()).unwrap();
            let four = find_arithmetic_subtree(&set, 2, None, &SearchBudget::default().with_workers(4)).unwrap();
            assert_eq!(one, four);
        }
    }
}
