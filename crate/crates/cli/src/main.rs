//! Command-line front end for the tree-ramsey library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use num::{BigInt, BigRational, ToPrimitive};
use tree_ramsey::formats::{self, SetFile, Witness};
use tree_ramsey::markov::{self, CommutingPair, StateSet};
use tree_ramsey::search::{self, IncrementMode, Outcome, PipelineOutcome, SearchBudget};
use tree_ramsey::semigroup::Level;
use tree_ramsey::sets::{self, GridSet, GridTreeSet, TreeSet};
use tree_ramsey::structures;
use tree_ramsey::Error;

const FOUND: u8 = 0;
const NONE: u8 = 1;
const BUDGET: u8 = 2;
const INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tree-ramsey", version, about = "Search and verify arithmetic trees in finite sets of words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Input file (set, witness target, or Markov systems); repeatable.
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    /// Write the witness here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Order (or embedding depth / progression length).
    #[arg(long = "r", global = true)]
    r: Option<usize>,
    /// Fix the gap.
    #[arg(long = "q", global = true)]
    q: Option<usize>,
    #[arg(long = "u", global = true, value_parser = parse_level)]
    u: Option<Level>,
    #[arg(long = "v", global = true, value_parser = parse_level)]
    v: Option<Level>,
    /// Inclusive range `lo..hi` of scale factors n.
    #[arg(long = "n-range", global = true, value_parser = parse_range)]
    n_range: Option<(usize, usize)>,
    /// A single scale factor n, or the depth for `markov mu`.
    #[arg(long = "n", global = true)]
    n: Option<usize>,
    #[arg(long, global = true, value_parser = parse_rational)]
    delta: Option<BigRational>,
    /// Node budget for searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set)]
    deterministic: bool,
    /// Target state set for Markov commands, e.g. `0,2,3`.
    #[arg(long, global = true)]
    states: Option<String>,
    /// Allow increments with a zero coordinate.
    #[arg(long, global = true)]
    relaxed: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the truncated densities d_1, .., d_N.
    Density,
    /// Search for a witness structure; prints its JSON.
    #[command(subcommand)]
    Search(SearchKind),
    /// Check a witness file against the input set.
    Verify { witness: PathBuf },
    /// Find a square progression in the occupied levels of a 2D set.
    ApGrid,
    /// Commuting Markov systems and the labelled-tree measure.
    #[command(subcommand)]
    Markov(MarkovAction),
}

#[derive(Subcommand, Debug)]
enum SearchKind {
    /// Arithmetic subtree of order r.
    Tree,
    /// Regular embedding of depth r.
    Regular,
    /// Tree array of order r in a 2D set of density at least delta.
    Array,
    /// Product tree of order r with increments u, v.
    Product,
    /// Cartesian products of two arithmetic trees with one gap.
    Cartesian,
}

#[derive(Subcommand, Debug)]
enum MarkovAction {
    /// Check commutation, non-degeneracy, disjoint images and constant probabilities.
    Validate,
    /// Print the integral and support of phi_r for each n.
    Phi,
    /// States from which the product-tree search succeeds.
    Roots,
    /// Exact and sampled mass of E under mu_N.
    Mu,
}

fn parse_level(s: &str) -> Result<Level, String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    Ok(Level(a.trim().parse().map_err(|_| "bad integer")?, b.trim().parse().map_err(|_| "bad integer")?))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once("..").unwrap_or((s, s));
    let lo: usize = lo.parse().map_err(|_| "bad lower bound")?;
    let hi: usize = hi.trim_start_matches('=').parse().map_err(|_| "bad upper bound")?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.parse().map_err(|_| "bad numerator")?;
    let d: BigInt = d.parse().map_err(|_| "bad denominator")?;
    if d == BigInt::from(0) {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(n, d))
}

/// Errors that end the run with the input-error status.
#[derive(Debug)]
struct Fatal(String);

impl From<Error> for Fatal {
    fn from(e: Error) -> Self {
        Fatal(e.to_string())
    }
}

type Run = Result<u8, Fatal>;

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Fatal> {
    v.ok_or_else(|| Fatal(format!("missing --{flag}")))
}

impl Opts {
    fn single_input(&self) -> Result<&Path, Fatal> {
        match self.input.as_slice() {
            [p] => Ok(p),
            [] => Err(Fatal("missing --input".into())),
            _ => Err(Fatal("expected one --input".into())),
        }
    }

    fn set(&self) -> Result<SetFile, Fatal> {
        Ok(formats::read_set_file(self.single_input()?)?)
    }

    fn tree_set(&self) -> Result<TreeSet, Fatal> {
        match self.set()? {
            SetFile::Tree(t) => Ok(t),
            SetFile::Grid(_) => Err(Fatal("expected a dim=1 set".into())),
        }
    }

    fn grid_set(&self) -> Result<GridTreeSet, Fatal> {
        match self.set()? {
            SetFile::Grid(g) => Ok(g),
            SetFile::Tree(_) => Err(Fatal("expected a dim=2 set".into())),
        }
    }

    fn search_budget(&self) -> SearchBudget {
        SearchBudget { node_cap: self.budget, time_cap: None, workers: self.workers, deterministic: self.deterministic }
    }

    fn pair(&self) -> Result<CommutingPair, Fatal> {
        if self.input.is_empty() {
            return Err(Fatal("missing --input".into()));
        }
        let mut systems = Vec::new();
        for p in &self.input {
            systems.extend(formats::read_markov_file(p)?);
        }
        let [a, b]: [_; 2] = systems.try_into().map_err(|v: Vec<_>| Fatal(format!("expected two systems, got {}", v.len())))?;
        Ok(CommutingPair::new(a, b)?)
    }

    fn target(&self, states: usize) -> Result<StateSet, Fatal> {
        let list = need(self.states.as_deref(), "states")?;
        let mut out = StateSet::new();
        for s in list.split(',').filter(|s| !s.is_empty()) {
            let x: usize = s.trim().parse().map_err(|_| Fatal(format!("bad state `{s}`")))?;
            if x >= states {
                return Err(Fatal(format!("state {x} out of range")));
            }
            out.insert(x);
        }
        Ok(out)
    }

    fn emit(&self, w: &Witness) -> Result<(), Fatal> {
        match &self.out {
            Some(path) => formats::write_witness(w, path)?,
            None => println!("{}", formats::witness_to_json(w)),
        }
        Ok(())
    }
}

fn report<T>(opts: &Opts, outcome: Outcome<T>, wrap: impl FnOnce(T) -> Witness) -> Run {
    match outcome {
        Outcome::Found(t) => {
            opts.emit(&wrap(t))?;
            Ok(FOUND)
        }
        Outcome::Exhausted => {
            println!("none: search space exhausted");
            Ok(NONE)
        }
        Outcome::BudgetExhausted { nodes } => {
            println!("none: budget exhausted after {nodes} nodes");
            Ok(BUDGET)
        }
    }
}

fn density(opts: &Opts) -> Run {
    let seq = match opts.set()? {
        SetFile::Tree(t) => sets::density_sequence_1d(&t),
        SetFile::Grid(g) => sets::density_sequence(&g)?,
    };
    for (i, d) in seq.iter().enumerate() {
        println!("{} {d}", i + 1);
    }
    Ok(FOUND)
}

fn search_cmd(kind: &SearchKind, opts: &Opts) -> Run {
    let budget = opts.search_budget();
    let r = need(opts.r, "r")?;
    match kind {
        SearchKind::Tree => {
            let set = opts.tree_set()?;
            let out = search::find_arithmetic_subtree(&set, r, opts.q.map(|q| q..=q), &budget)?;
            report(opts, out, Witness::Tree)
        }
        SearchKind::Regular => {
            let set = opts.tree_set()?;
            report(opts, search::find_regular_embedding(&set, r, &budget)?, Witness::Regular)
        }
        SearchKind::Array => {
            let set = opts.grid_set()?;
            let delta = need(opts.delta.clone(), "delta")?;
            match search::construct_tree_array(&set, r, &delta, &budget)? {
                PipelineOutcome::Found(w) => {
                    opts.emit(&Witness::Array(w))?;
                    Ok(FOUND)
                }
                PipelineOutcome::Failed(f) => {
                    println!("none: stage {f}");
                    Ok(NONE)
                }
                PipelineOutcome::BudgetExhausted { stage, nodes } => {
                    println!("none: budget exhausted in stage {stage} after {nodes} nodes");
                    Ok(BUDGET)
                }
            }
        }
        SearchKind::Product => {
            let set = opts.grid_set()?;
            let (lo, hi) = opts.n_range.or(opts.n.map(|n| (n, n))).unwrap_or((1, 1));
            let mode = if opts.relaxed { IncrementMode::Relaxed } else { IncrementMode::Strict };
            let u = opts.u.unwrap_or(Level(1, 1));
            let v = opts.v.unwrap_or(Level(1, 1));
            let out = search::find_product_tree(&set, r, u, v, lo..=hi, mode, &budget)?;
            report(opts, out, |(n, w)| {
                eprintln!("n={n}");
                Witness::Product(w)
            })
        }
        SearchKind::Cartesian => {
            let set = opts.grid_set()?;
            let out = search::find_cartesian_product(&set, r, opts.q.map(|q| q..=q), &budget)?;
            report(opts, out, |c| {
                eprintln!("q={}", c.gap);
                Witness::Product(c.to_product_witness())
            })
        }
    }
}

fn verify(witness: &Path, opts: &Opts) -> Run {
    let w = formats::read_witness(witness)?;
    let verdict = match &w {
        Witness::Tree(t) => structures::verify_arithmetic_subtree(t, &opts.tree_set()?)?,
        Witness::Regular(t) => structures::verify_regular_embedding(t, &opts.tree_set()?)?,
        Witness::Array(t) => structures::verify_tree_array(t, &opts.grid_set()?)?,
        Witness::Product(t) => structures::verify_product_tree(t, &opts.grid_set()?)?,
    };
    println!("{verdict}");
    Ok(if verdict.is_pass() { FOUND } else { NONE })
}

fn ap_grid(opts: &Opts) -> Run {
    let set = opts.grid_set()?;
    let grid = match set.lifted_levels() {
        Some(g) => g.clone(),
        None => {
            let n = set.depth();
            let mut cells = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if set.cell_count(i, j)? > 0 {
                        cells.push((i, j));
                    }
                }
            }
            GridSet::new(n, cells)?
        }
    };
    match search::find_ap_grid(&grid, need(opts.r, "r")?)? {
        Some(w) => {
            println!("start=({},{}) q={} r={}", w.start.0, w.start.1, w.gap, w.len);
            Ok(FOUND)
        }
        None => {
            println!("none: search space exhausted");
            Ok(NONE)
        }
    }
}

fn bools(b: [bool; 2]) -> String {
    format!("{} {}", b[0], b[1])
}

fn markov_cmd(action: &MarkovAction, opts: &Opts) -> Run {
    match action {
        MarkovAction::Validate => {
            let mut systems = Vec::new();
            for p in &opts.input {
                systems.extend(formats::read_markov_file(p)?);
            }
            let [a, b]: [_; 2] = systems.try_into().map_err(|v: Vec<_>| Fatal(format!("expected two systems, got {}", v.len())))?;
            let r = markov::validate_systems(&a, &b)?;
            println!("commuting {}", r.commuting);
            println!("non-degenerate {}", bools(r.non_degenerate));
            println!("disjoint-images {}", bools(r.disjoint_images));
            println!("constant-probabilities {}", bools(r.constant_probabilities));
            Ok(if r.is_valid() { FOUND } else { NONE })
        }
        MarkovAction::Phi => {
            let pair = opts.pair()?;
            let target = opts.target(pair.states())?;
            let (lo, hi) = opts.n_range.or(opts.n.map(|n| (n, n))).unwrap_or((1, 1));
            let r = opts.r.unwrap_or(1);
            let (u, v) = (opts.u.unwrap_or(Level(1, 1)), opts.v.unwrap_or(Level(1, 1)));
            for n in lo..=hi {
                let phi = markov::compute_phi_r(&pair, &target, u, v, n, r)?;
                let support: Vec<String> = phi.support().iter().map(|x| x.to_string()).collect();
                println!("n={n} integral={} support={}", phi.mean(), support.join(","));
            }
            Ok(FOUND)
        }
        MarkovAction::Roots => {
            let pair = opts.pair()?;
            let target = opts.target(pair.states())?;
            let (u, v) = (opts.u.unwrap_or(Level(1, 1)), opts.v.unwrap_or(Level(1, 1)));
            let roots = markov::roots_by_search(&pair, &target, u, v, opts.n.unwrap_or(1), opts.r.unwrap_or(1))?;
            let list: Vec<String> = roots.iter().map(|x| x.to_string()).collect();
            println!("roots={}", list.join(","));
            Ok(if roots.is_empty() { NONE } else { FOUND })
        }
        MarkovAction::Mu => {
            let set = opts.grid_set()?;
            let n = opts.n.unwrap_or(set.depth());
            let exact = markov::mu_n_exact(&set, n)?;
            let density = sets::density_2d(&set.truncate(n.min(set.depth()))?)?;
            let (mc, stderr) = markov::mu_n_monte_carlo(&set, n, opts.samples, opts.seed)?;
            println!("exact {exact}");
            println!("density {density}");
            println!(
                "monte-carlo {:.6} stderr {stderr:.6} samples {} seed {}",
                mc.to_f64().unwrap_or(f64::NAN),
                opts.samples,
                opts.seed
            );
            Ok(if exact == density { FOUND } else { NONE })
        }
    }
}

fn run(cli: &Cli) -> Run {
    let opts = &cli.opts;
    match &cli.command {
        Command::Density => density(opts),
        Command::Search(kind) => search_cmd(kind, opts),
        Command::Verify { witness } => verify(witness, opts),
        Command::ApGrid => ap_grid(opts),
        Command::Markov(action) => markov_cmd(action, opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { FOUND };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT)
        }
    }
}
