use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use super::budget::{first_success, Meter, Outcome, SearchBudget, Stop};
use super::tree::find_arithmetic_subtree;
use crate::error::{Error, Result};
use crate::semigroup::{act_token, enumerate_ball, enumerate_free_ball, FreeToken, FreeWord, Level, PairWord, Word};
use crate::sets::{GridTreeSet, TreeSet};
use crate::structures::ProductTreeWitness;

/// Which increments are accepted by [`find_product_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IncrementMode {
    /// Both coordinates of `u` and `v` positive.
    #[default]
    Strict,
    /// Nonnegative increments with at least one positive coordinate each.
    Relaxed,
}

fn scale(l: Level, n: usize) -> Level {
    Level(l.0 * n, l.1 * n)
}

type Memo = HashMap<(PairWord, usize), bool>;

struct ProductSearch<'a> {
    set: &'a GridTreeSet,
    order: usize,
    x_step: Level,
    y_step: Level,
    meter: &'a Meter,
}

impl ProductSearch<'_> {
    fn step(&self, token: FreeToken) -> Level {
        match token {
            FreeToken::X(_) => self.x_step,
            FreeToken::Y(_) => self.y_step,
        }
    }

    /// Members at `p·token`'s level plus the increment, descending from it.
    fn children<'s>(&'s self, p: &PairWord, token: FreeToken) -> Box<dyn Iterator<Item = PairWord> + 's> {
        self.set.descendants_in(&act_token(p, token), p.level() + self.step(token))
    }

    fn feasible(&self, memo: &mut Memo, p: &PairWord, depth: usize) -> std::result::Result<bool, Stop> {
        if !self.set.contains(p) {
            return Ok(false);
        }
        if depth == self.order {
            return Ok(true);
        }
        if let Some(&hit) = memo.get(&(p.clone(), depth)) {
            return Ok(hit);
        }
        self.meter.tick()?;
        let mut ok = true;
        for token in FreeToken::all(self.set.alphabet()) {
            let mut any = false;
            for c in self.children(p, token) {
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
        memo.insert((p.clone(), depth), ok);
        Ok(ok)
    }

    fn build(&self, memo: &mut Memo, root: PairWord) -> std::result::Result<BTreeMap<FreeWord, PairWord>, Stop> {
        let alphabet = self.set.alphabet();
        let mut map = BTreeMap::new();
        map.insert(FreeWord::empty(alphabet), root);
        let domain = enumerate_free_ball(alphabet, self.order).expect("domain fits");
        for g in domain.into_iter().skip(1) {
            let (parent, token) = g.parent().expect("non-root");
            let mut chosen = None;
            for c in self.children(&map[&parent], token) {
                if self.feasible(memo, &c, g.len())? {
                    chosen = Some(c);
                    break;
                }
            }
            map.insert(g, chosen.expect("feasible parent has a feasible child"));
        }
        Ok(map)
    }

    /// Roots whose level leaves room for `order` steps of either kind.
    fn roots(&self) -> Result<Vec<PairWord>> {
        let top = self.set.depth().saturating_sub(1);
        let reach = Level(self.x_step.0.max(self.y_step.0) * self.order, self.x_step.1.max(self.y_step.1) * self.order);
        if self.set.depth() == 0 || reach.0 > top || reach.1 > top {
            return Ok(Vec::new());
        }
        let mut roots = Vec::new();
        for i in 0..=top - reach.0 {
            for j in 0..=top - reach.1 {
                roots.extend(self.set.cell_members(i, j)?);
            }
        }
        roots.sort();
        Ok(roots)
    }

    fn run(&self, budget: &SearchBudget, roots: &[PairWord]) -> std::result::Result<Option<ProductTreeWitness>, Stop> {
        first_success(roots, budget, Memo::new, |memo, root| {
            if self.feasible(memo, root, 0)? {
                Ok(Some(ProductTreeWitness {
                    alphabet: self.set.alphabet(),
                    order: self.order,
                    u: self.x_step,
                    v: self.y_step,
                    map: self.build(memo, root.clone())?,
                }))
            } else {
                Ok(None)
            }
        })
    }
}

fn check_increment(l: Level, mode: IncrementMode) -> Result<()> {
    let ok = match mode {
        IncrementMode::Strict => l.0 > 0 && l.1 > 0,
        IncrementMode::Relaxed => l.0 > 0 || l.1 > 0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("increment {l} not allowed in {mode:?} mode")))
    }
}

/// Smallest `n` in `n_range` admitting an `(nu, nv)`-arithmetic product tree
/// of order `r` in `set`, with the canonical-first witness.
pub fn find_product_tree(
    set: &GridTreeSet,
    order: usize,
    u: Level,
    v: Level,
    n_range: RangeInclusive<usize>,
    mode: IncrementMode,
    budget: &SearchBudget,
) -> Result<Outcome<(usize, ProductTreeWitness)>> {
    check_increment(u, mode)?;
    check_increment(v, mode)?;
    if *n_range.start() == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let meter = Meter::new(budget);
    let mut result = Ok(None);
    for n in n_range {
        let search = ProductSearch { set, order, x_step: scale(u, n), y_step: scale(v, n), meter: &meter };
        let roots = search.roots()?;
        match search.run(budget, &roots) {
            Ok(None) => continue,
            Ok(Some(w)) => {
                result = Ok(Some((n, w)));
                break;
            }
            Err(stop) => {
                result = Err(stop);
                break;
            }
        }
    }
    Ok(meter.outcome(result))
}

/// Canonical-first product tree of order `r` with the given root and level
/// increments.
pub fn product_tree_rooted_at(
    set: &GridTreeSet,
    root: &PairWord,
    order: usize,
    u: Level,
    v: Level,
    budget: &SearchBudget,
) -> Result<Outcome<ProductTreeWitness>> {
    let meter = Meter::new(budget);
    let search = ProductSearch { set, order, x_step: u, y_step: v, meter: &meter };
    let result = search.run(&SearchBudget { workers: 1, ..budget.clone() }, std::slice::from_ref(root));
    Ok(meter.outcome(result))
}

/// Two arithmetic subtrees of a common gap whose image product lies in a
/// set: `φ₁(B_r) × φ₂(B_r) ⊆ A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianProduct {
    pub order: usize,
    pub gap: usize,
    pub first: crate::structures::TreeWitness,
    pub second: crate::structures::TreeWitness,
}

impl CartesianProduct {
    /// The product tree `γ ↦ (φ₁(π_X γ), φ₂(π_Y γ))`, with increments
    /// `(q,0)` and `(0,q)`.
    pub fn to_product_witness(&self) -> ProductTreeWitness {
        let alphabet = self.first.alphabet;
        let domain = enumerate_free_ball(alphabet, self.order).expect("domain fits");
        let map = domain
            .into_iter()
            .map(|g| {
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for t in g.tokens() {
                    match t {
                        FreeToken::X(l) => xs.push(*l),
                        FreeToken::Y(l) => ys.push(*l),
                    }
                }
                let a = &self.first.map[&Word::new(alphabet, xs).expect("letters in range")];
                let b = &self.second.map[&Word::new(alphabet, ys).expect("letters in range")];
                (g, PairWord { first: a.clone(), second: b.clone() })
            })
            .collect();
        ProductTreeWitness { alphabet, order: self.order, u: Level(self.gap, 0), v: Level(0, self.gap), map }
    }

    pub fn holds_in(&self, set: &GridTreeSet) -> Result<bool> {
        let full = TreeSet::full(set.alphabet(), set.depth());
        for t in [&self.first, &self.second] {
            if t.gap != self.gap || !crate::structures::verify_arithmetic_subtree(t, &full)?.is_pass() {
                return Ok(false);
            }
        }
        Ok(self.first.map.values().all(|a| {
            self.second.map.values().all(|b| set.contains(&PairWord { first: a.clone(), second: b.clone() }))
        }))
    }
}

/// Exploration of cartesian products of arithmetic subtrees with equal gap:
/// enumerates first factors canonically and, for each, searches a second
/// factor among the columns containing the whole first image.
pub fn find_cartesian_product(
    set: &GridTreeSet,
    order: usize,
    gaps: Option<RangeInclusive<usize>>,
    budget: &SearchBudget,
) -> Result<Outcome<CartesianProduct>> {
    let alphabet = set.alphabet();
    let n = set.depth();
    let top = n.saturating_sub(1);
    let members = set.members()?;
    let projection = TreeSet::explicit(alphabet, n, members.iter().map(|p| p.first.clone()))?;
    let gaps = gaps.unwrap_or(1..=top.checked_div(order).map_or(1, |g| g.max(1)));
    let meter = Meter::new(budget);
    let domain = enumerate_ball(alphabet, order)?;
    let inner = SearchBudget { workers: 1, ..budget.clone() };

    let result = (|| -> std::result::Result<Option<CartesianProduct>, Stop> {
        for gap in gaps {
            if gap == 0 && order > 0 {
                continue;
            }
            let mut stack: Vec<Word> = Vec::new();
            let mut found = None;
            extend_first(&projection, &domain, gap, &mut stack, &meter, &mut |images| {
                let first_map: BTreeMap<Word, Word> = domain.iter().cloned().zip(images.iter().cloned()).collect();
                let columns = members
                    .iter()
                    .filter(|p| p.first == images[0])
                    .map(|p| p.second.clone())
                    .filter(|y| images.iter().all(|x| set.contains(&PairWord { first: x.clone(), second: y.clone() })));
                let columns = TreeSet::explicit(alphabet, n, columns).expect("columns fit");
                match find_arithmetic_subtree(&columns, order, Some(gap..=gap), &inner).expect("valid gap") {
                    Outcome::Found(second) => {
                        let first = crate::structures::TreeWitness { alphabet, order, gap, map: first_map };
                        found = Some(CartesianProduct { order, gap, first, second });
                        Ok(true)
                    }
                    Outcome::Exhausted => Ok(false),
                    Outcome::BudgetExhausted { .. } => Err(Stop),
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

/// Depth-first enumeration of arithmetic subtrees of gap `gap` in `set`,
/// assigning images along `domain` (shortlex); `visit` returns true to stop.
fn extend_first(
    set: &TreeSet,
    domain: &[Word],
    gap: usize,
    stack: &mut Vec<Word>,
    meter: &Meter,
    visit: &mut dyn FnMut(&[Word]) -> std::result::Result<bool, Stop>,
) -> std::result::Result<bool, Stop> {
    meter.tick()?;
    if stack.len() == domain.len() {
        return visit(stack);
    }
    let a = &domain[stack.len()];
    let candidates: Vec<Word> = match a.parent() {
        None => set.members().collect(),
        Some(parent) => {
            let pidx = domain.iter().position(|d| *d == parent).expect("parent precedes child");
            let pimg = stack[pidx].child(a.last().expect("non-root"));
            set.descendants_in(&pimg, stack[pidx].len() + gap).collect()
        }
    };
    let span = gap * (domain.last().map_or(0, |d| d.len()));
    for c in candidates {
        if a.is_empty() && c.len() + span >= set.depth().max(1) {
            break;
        }
        stack.push(c);
        let stop = extend_first(set, domain, gap, stack, meter, visit)?;
        stack.pop();
        if stop {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::Alphabet;
    use crate::sets::{level_lift, GridSet};
    use crate::structures::verify_product_tree;

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn full_set_unit_increments() {
        let set = GridTreeSet::full(k2(), 4);
        let (n, w) = find_product_tree(&set, 1, Level(1, 1), Level(1, 1), 1..=1, IncrementMode::Strict, &SearchBudget::default())
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(n, 1);
        assert!(w.map.iter().filter(|(g, _)| g.len() == 1).all(|(_, img)| img.level() == Level(1, 1)));
        assert!(verify_product_tree(&w, &set).unwrap().is_pass());
    }

    #[test]
    fn parity_sets() {
        let even = GridSet::new(8, (0..8).flat_map(|i| (0..8).map(move |j| (i, j))).filter(|(i, j)| (i + j) % 2 == 0)).unwrap();
        let set = level_lift(&even, k2());
        let b = SearchBudget::default();
        let (n, _) = find_product_tree(&set, 1, Level(1, 1), Level(1, 1), 1..=3, IncrementMode::Strict, &b).unwrap().found().unwrap();
        assert_eq!(n, 1);
        let (n, w) = find_product_tree(&set, 1, Level(1, 0), Level(0, 1), 1..=3, IncrementMode::Relaxed, &b).unwrap().found().unwrap();
        assert_eq!(n, 2);
        assert!(verify_product_tree(&w, &set).unwrap().is_pass());
        assert!(find_product_tree(&set, 1, Level(1, 0), Level(0, 1), 1..=3, IncrementMode::Strict, &b).is_err());
    }

    #[test]
    fn empty_has_none() {
        let set = GridTreeSet::empty(k2(), 4);
        let out = find_product_tree(&set, 1, Level(1, 1), Level(1, 1), 1..=2, IncrementMode::Strict, &SearchBudget::default()).unwrap();
        assert_eq!(out, Outcome::Exhausted);
    }

    #[test]
    fn rooted_search_matches_global_root() {
        let set = GridTreeSet::full(k2(), 5);
        let root = PairWord::parse(k2(), "1,0").unwrap();
        let w = product_tree_rooted_at(&set, &root, 1, Level(1, 1), Level(1, 1), &SearchBudget::default()).unwrap().found().unwrap();
        assert_eq!(w.root(), Some(&root));
        assert!(verify_product_tree(&w, &set).unwrap().is_pass());
    }

    #[test]
    fn cartesian_in_full_and_product_sets() {
        let set = GridTreeSet::full(k2(), 3);
        let c = find_cartesian_product(&set, 1, None, &SearchBudget::default()).unwrap().found().unwrap();
        assert_eq!(c.gap, 1);
        assert!(c.holds_in(&set).unwrap());
        assert!(verify_product_tree(&c.to_product_witness(), &set).unwrap().is_pass());
        // levels {0,2} × {0,2} force gap 2
        let b = GridSet::new(3, [(0, 0), (0, 2), (2, 0), (2, 2)]).unwrap();
        let set = level_lift(&b, k2());
        let c = find_cartesian_product(&set, 1, None, &SearchBudget::default()).unwrap().found().unwrap();
        assert_eq!(c.gap, 2);
        assert!(c.holds_in(&set).unwrap());
        let diag = level_lift(&GridSet::new(3, [(0, 0), (1, 1), (2, 2)]).unwrap(), k2());
        assert_eq!(find_cartesian_product(&diag, 1, None, &SearchBudget::default()).unwrap(), Outcome::Exhausted);
    }
}
