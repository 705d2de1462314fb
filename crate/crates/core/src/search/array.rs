use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use super::budget::{Outcome, SearchBudget};
use super::grid::find_ap_grid;
use super::tree::find_regular_embedding;
use crate::error::{Error, Result};
use crate::semigroup::{enumerate_ball, SphereIter, Word};
use crate::sets::{density_1d, density_2d, slice_at, GridSet, GridTreeSet};
use crate::structures::{verify_tree_array, ArrayRow, RegularEmbeddingWitness, TreeArrayWitness, Verdict};

/// `J = {j : values_j ≥ δ/2}`, after checking the mean is at least `δ`.
pub fn select_dense_indices(values: &[BigRational], delta: &BigRational) -> Result<Vec<usize>> {
    if values.iter().any(|v| v < &BigRational::zero() || v > &BigRational::one()) {
        return Err(Error::Precondition("values must lie in [0,1]".into()));
    }
    let sum: BigRational = values.iter().sum();
    if values.is_empty() || sum < delta * BigRational::from_integer(BigInt::from(values.len())) {
        return Err(Error::Precondition(format!("mean of values is below {delta}")));
    }
    let half = delta / BigRational::from_integer(2.into());
    Ok(values.iter().enumerate().filter(|(_, v)| **v >= half).map(|(j, _)| j).collect())
}

/// The steps of [`construct_tree_array`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PipelineStage {
    DenseRows,
    SliceSelection,
    RegularEmbedding,
    ApGrid,
    Assembly,
    Verification,
}

impl fmt::Display for PipelineStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PipelineStage::DenseRows => "dense-rows",
            PipelineStage::SliceSelection => "slice-selection",
            PipelineStage::RegularEmbedding => "regular-embedding",
            PipelineStage::ApGrid => "ap-grid",
            PipelineStage::Assembly => "assembly",
            PipelineStage::Verification => "verification",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: PipelineStage,
    pub reason: String,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineOutcome {
    Found(TreeArrayWitness),
    Failed(StageFailure),
    BudgetExhausted { stage: PipelineStage, nodes: u64 },
}

impl PipelineOutcome {
    pub fn found(self) -> Option<TreeArrayWitness> {
        match self {
            PipelineOutcome::Found(w) => Some(w),
            _ => None,
        }
    }
}

fn fail(stage: PipelineStage, reason: impl Into<String>) -> PipelineOutcome {
    PipelineOutcome::Failed(StageFailure { stage, reason: reason.into() })
}

/// `k^{-j} Σ_{|y|=j} d_N(A_y)` for each row `j`, read off the cell counts.
fn row_averages(set: &GridTreeSet) -> Result<Vec<BigRational>> {
    let n = set.depth();
    let k = BigInt::from(set.alphabet().size());
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = BigRational::zero();
        for i in 0..n {
            let c = set.cell_count(i, j)?;
            if c > 0 {
                acc += BigRational::new(BigInt::from(c), num::pow(k.clone(), i + j));
            }
        }
        out.push(acc / BigRational::from_integer(BigInt::from(n)));
    }
    Ok(out)
}

/// The deepest regular embedding into the slice, trying depths downward.
fn deepest_embedding(slice: &crate::sets::TreeSet, budget: &SearchBudget) -> Result<Outcome<RegularEmbeddingWitness>> {
    let occupied = slice.occupied_levels().len();
    for d in (0..occupied).rev() {
        match find_regular_embedding(slice, d, budget)? {
            Outcome::Exhausted => continue,
            other => return Ok(other),
        }
    }
    Ok(Outcome::Exhausted)
}

/// Builds a tree array of order `r` in `set` following the density
/// argument: dense rows, one dense slice per row, a deep regular embedding
/// in each slice, then a square progression in the occupied levels, whose
/// restriction gives the array.
pub fn construct_tree_array(
    set: &GridTreeSet,
    order: usize,
    delta: &BigRational,
    budget: &SearchBudget,
) -> Result<PipelineOutcome> {
    use PipelineStage::*;
    if delta <= &BigRational::zero() {
        return Err(Error::Precondition("δ must be positive".into()));
    }
    let density = density_2d(set)?;
    if &density < delta {
        return Err(Error::Precondition(format!("density {density} is below {delta}")));
    }
    let alphabet = set.alphabet();
    let n = set.depth();
    let half = delta / BigRational::from_integer(2.into());

    let rows = select_dense_indices(&row_averages(set)?, delta)?;
    if rows.is_empty() {
        return Ok(fail(DenseRows, "no row reaches δ/2"));
    }

    let mut chosen: BTreeMap<usize, (Word, RegularEmbeddingWitness)> = BTreeMap::new();
    for &j in &rows {
        let mut picked = None;
        for y in SphereIter::new(alphabet, j) {
            let slice = slice_at(set, &y)?;
            if density_1d(&slice) >= half {
                picked = Some((y, slice));
                break;
            }
        }
        let Some((y, slice)) = picked else {
            return Ok(fail(SliceSelection, format!("no slice in row {j} reaches δ/2")));
        };
        match deepest_embedding(&slice, budget)? {
            Outcome::Found(e) => {
                chosen.insert(j, (y, e));
            }
            Outcome::Exhausted => return Ok(fail(RegularEmbedding, format!("slice {y} is empty"))),
            Outcome::BudgetExhausted { nodes } => return Ok(PipelineOutcome::BudgetExhausted { stage: RegularEmbedding, nodes }),
        }
    }

    let mut cells = Vec::new();
    for (&j, (_, e)) in &chosen {
        for i in e.level_schedule().expect("embedding is level-uniform") {
            cells.push((i, j));
        }
    }
    let grid = GridSet::new(n, cells)?;
    let Some(square) = find_ap_grid(&grid, order + 1)? else {
        return Ok(fail(ApGrid, format!("no square progression of length {} in the occupied levels", order + 1)));
    };
    let (a1, a2) = square.start;
    let q = square.gap;

    let domain = enumerate_ball(alphabet, order)?;
    let mut array_rows = Vec::with_capacity(order + 1);
    for t in 0..=order {
        let j = a2 + t * q;
        let Some((y, e)) = chosen.get(&j) else {
            return Ok(fail(Assembly, format!("row {j} has no embedding")));
        };
        let schedule = e.level_schedule().expect("embedding is level-uniform");
        let index: Vec<usize> = (0..=order)
            .map(|s| schedule.iter().position(|&l| l == a1 + s * q).expect("progression lies in the schedule"))
            .collect();
        // v(∅) = 0^{i₀}, v(uλ) = v(u)·λ·0^{i_{|u|+1} − i_{|u|} − 1}
        let mut vertex: BTreeMap<Word, Word> = BTreeMap::new();
        let zero = Word::new(alphabet, vec![0; index[0]])?;
        vertex.insert(Word::empty(alphabet), zero);
        for a in domain.iter().skip(1) {
            let parent = a.parent().expect("non-root");
            let pad = index[a.len()] - index[a.len() - 1] - 1;
            let mut letters = vertex[&parent].letters().to_vec();
            letters.push(a.last().expect("non-root"));
            letters.extend(std::iter::repeat_n(0, pad));
            vertex.insert(a.clone(), Word::new(alphabet, letters)?);
        }
        let map = domain.iter().map(|a| (a.clone(), e.map[&vertex[a]].clone())).collect();
        array_rows.push(ArrayRow { y: y.clone(), map });
    }
    let witness = TreeArrayWitness { alphabet, order, gap: q, c1: a1, c2: a2, rows: array_rows };
    match verify_tree_array(&witness, set)? {
        Verdict::Pass => Ok(PipelineOutcome::Found(witness)),
        Verdict::Fail(v) => Ok(fail(Verification, v.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::Alphabet;
    use crate::sets::level_lift;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn dense_indices() {
        let d = q(1, 3);
        assert_eq!(select_dense_indices(&vec![d.clone(); 4], &d).unwrap(), vec![0, 1, 2, 3]);
        let mut v = vec![q(0, 1); 5];
        v[0] = q(1, 1);
        assert_eq!(select_dense_indices(&v, &q(1, 5)).unwrap(), vec![0]);
        assert!(select_dense_indices(&v, &q(1, 2)).is_err());
        assert!(select_dense_indices(&[q(3, 2)], &q(1, 2)).is_err());
    }

    #[test]
    fn row_averages_sum_to_density() {
        let a = Alphabet::new(2).unwrap();
        let set = GridTreeSet::random(a, 4, &q(1, 2), 3).unwrap();
        let rows = row_averages(&set).unwrap();
        let mean: BigRational = rows.iter().sum::<BigRational>() / BigRational::from_integer(4.into());
        assert_eq!(mean, density_2d(&set).unwrap());
        // against direct slice densities
        for (j, avg) in rows.iter().enumerate() {
            let direct: BigRational = SphereIter::new(a, j).map(|y| density_1d(&slice_at(&set, &y).unwrap())).sum();
            assert_eq!(direct / BigRational::from_integer(BigInt::from(1u64 << j)), *avg);
        }
    }

    #[test]
    fn full_set_gives_unit_gap() {
        let a = Alphabet::new(2).unwrap();
        for r in 0..=3 {
            let set = GridTreeSet::full(a, r + 2);
            let w = construct_tree_array(&set, r, &q(1, 1), &SearchBudget::default()).unwrap().found().unwrap();
            assert_eq!((w.gap, w.c1, w.c2), (1, 0, 0));
        }
    }

    #[test]
    fn even_lift_gives_gap_two() {
        let a = Alphabet::new(2).unwrap();
        let b = GridSet::new(9, (0..5).flat_map(|i| (0..5).map(move |j| (2 * i, 2 * j)))).unwrap();
        let set = level_lift(&b, a);
        let delta = density_2d(&set).unwrap();
        let w = construct_tree_array(&set, 2, &delta, &SearchBudget::default()).unwrap().found().unwrap();
        assert_eq!(w.gap, 2);
    }

    #[test]
    fn failure_names_the_stage() {
        let a = Alphabet::new(2).unwrap();
        // a single occupied column cannot hold two levels per row
        let b = GridSet::new(4, (0..4).map(|j| (0, j))).unwrap();
        let set = level_lift(&b, a);
        let delta = density_2d(&set).unwrap();
        match construct_tree_array(&set, 1, &delta, &SearchBudget::default()).unwrap() {
            PipelineOutcome::Failed(f) => assert_eq!(f.stage, PipelineStage::ApGrid),
            other => panic!("unexpected {other:?}"),
        }
        assert!(construct_tree_array(&GridTreeSet::empty(a, 3), 1, &q(1, 2), &SearchBudget::default()).is_err());
    }
}
