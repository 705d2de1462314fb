//! Text formats: set files, Markov system files and witness JSON.
//!
//! Set file:
//!
//! ```text
//! treeset v1 k=2 n=3 dim=2 repr=explicit
//! -,-
//! 0,1
//! ```
//!
//! Records are words (`-` for the empty word), pairs `<w1>,<w2>`, levels
//! `<i>` or level pairs `<i> <j>`, strictly increasing in shortlex (words) or
//! numeric (levels) order, each terminated by a newline.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num::{BigInt, BigRational};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::markov::FiniteMarkovSystem;
use crate::semigroup::{Alphabet, FreeWord, Level, PairWord, Word};
use crate::sets::{level_lift, GridReprKind, GridSet, GridTreeSet, TreeRepr, TreeSet};
use crate::structures::{
    infer_array_constants, infer_gap, infer_increments, ArrayRow, ProductTreeWitness, RegularEmbeddingWitness, TreeArrayWitness,
    TreeWitness,
};

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

/// Attaches a line number to errors from word parsing.
fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { reason, .. } => Error::Parse { line, reason },
        other => parse_err(line, other.to_string()),
    })
}

/// Header fields `key=value` after the magic and version.
fn header_fields<'a>(line: &'a str, magic: &str, version: &str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let mut parts = line.split(' ');
    if parts.next() != Some(magic) {
        return Err(parse_err(1, format!("expected `{magic}` header")));
    }
    match parts.next() {
        Some(v) if v == version => {}
        Some(v) => return Err(Error::VersionMismatch(v.to_string())),
        None => return Err(parse_err(1, "missing version")),
    }
    let mut out = Vec::new();
    for key in keys {
        let field = parts.next().ok_or_else(|| parse_err(1, format!("missing `{key}=`")))?;
        let value = field.strip_prefix(key).and_then(|f| f.strip_prefix('=')).ok_or_else(|| parse_err(1, format!("expected `{key}=`, got `{field}`")))?;
        out.push(value);
    }
    if let Some(extra) = parts.next() {
        return Err(parse_err(1, format!("unexpected header field `{extra}`")));
    }
    Ok(out)
}

fn number<T: FromStr>(line: usize, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| parse_err(line, format!("bad {what} `{s}`")))
}

/// Lines of a file that must end with a newline; numbering starts at 1.
fn lines_of(text: &str) -> Result<Vec<(usize, &str)>> {
    if text.is_empty() {
        return Err(parse_err(1, "empty file"));
    }
    let body = text.strip_suffix('\n').ok_or_else(|| parse_err(text.lines().count(), "missing trailing newline"))?;
    Ok(body.split('\n').enumerate().map(|(i, l)| (i + 1, l)).collect())
}

/// A parsed set file.
#[derive(Clone, Debug)]
pub enum SetFile {
    Tree(TreeSet),
    Grid(GridTreeSet),
}

fn parse_word(alphabet: Alphabet, line: usize, s: &str) -> Result<Word> {
    match s {
        "-" => Ok(Word::empty(alphabet)),
        "" => Err(parse_err(line, "empty word must be written `-`")),
        _ => at_line(line, Word::parse(alphabet, s)),
    }
}

fn word_token(w: &Word) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        w.to_string()
    }
}

fn strictly_sorted<T: Ord>(records: &[(usize, T)]) -> Result<()> {
    for pair in records.windows(2) {
        if pair[0].1 >= pair[1].1 {
            return Err(parse_err(pair[1].0, "records must be strictly increasing"));
        }
    }
    Ok(())
}

pub fn parse_set(text: &str) -> Result<SetFile> {
    let lines = lines_of(text)?;
    let (_, header) = lines[0];
    let fields = header_fields(header, "treeset", "v1", &["k", "n", "dim", "repr"])?;
    let k: usize = number(1, fields[0], "alphabet size")?;
    let alphabet = at_line(1, Alphabet::new(k))?;
    let n: usize = number(1, fields[1], "depth")?;
    let body = &lines[1..];
    match (fields[2], fields[3]) {
        ("1", "explicit") => {
            let words = body.iter().map(|&(l, s)| Ok((l, parse_word(alphabet, l, s)?))).collect::<Result<Vec<_>>>()?;
            strictly_sorted(&words)?;
            check_depths(n, words.iter().map(|(l, w)| (*l, w.len())))?;
            Ok(SetFile::Tree(TreeSet::explicit(alphabet, n, words.into_iter().map(|(_, w)| w))?))
        }
        ("1", "levellift") => {
            let levels = body.iter().map(|&(l, s)| Ok((l, number::<usize>(l, s, "level")?))).collect::<Result<Vec<_>>>()?;
            strictly_sorted(&levels)?;
            check_depths(n, levels.iter().copied())?;
            Ok(SetFile::Tree(TreeSet::level_mask(alphabet, n, levels.into_iter().map(|(_, i)| i))?))
        }
        ("2", "explicit") => {
            let pairs = body
                .iter()
                .map(|&(l, s)| {
                    let (a, b) = s.split_once(',').ok_or_else(|| parse_err(l, "expected `<w1>,<w2>`"))?;
                    Ok((l, PairWord { first: parse_word(alphabet, l, a)?, second: parse_word(alphabet, l, b)? }))
                })
                .collect::<Result<Vec<_>>>()?;
            strictly_sorted(&pairs)?;
            check_depths(n, pairs.iter().map(|(l, p)| (*l, p.first.len().max(p.second.len()))))?;
            Ok(SetFile::Grid(GridTreeSet::explicit(alphabet, n, pairs.into_iter().map(|(_, p)| p))?))
        }
        ("2", "levellift") => {
            let cells = body
                .iter()
                .map(|&(l, s)| {
                    let (a, b) = s.split_once(' ').ok_or_else(|| parse_err(l, "expected `<i> <j>`"))?;
                    Ok((l, (number::<usize>(l, a, "level")?, number::<usize>(l, b, "level")?)))
                })
                .collect::<Result<Vec<_>>>()?;
            strictly_sorted(&cells)?;
            check_depths(n, cells.iter().map(|(l, (i, j))| (*l, *i.max(j))))?;
            let grid = GridSet::new(n, cells.into_iter().map(|(_, c)| c))?;
            Ok(SetFile::Grid(level_lift(&grid, alphabet)))
        }
        (d, r) => Err(parse_err(1, format!("unsupported dim={d} repr={r}"))),
    }
}

fn check_depths(n: usize, levels: impl IntoIterator<Item = (usize, usize)>) -> Result<()> {
    for (line, level) in levels {
        if level >= n {
            return Err(parse_err(line, format!("level {level} outside depth {n}")));
        }
    }
    Ok(())
}

pub fn write_tree_set(set: &TreeSet) -> String {
    let repr = match set.repr() {
        TreeRepr::Explicit => "explicit",
        TreeRepr::LevelMask => "levellift",
    };
    let mut out = format!("treeset v1 k={} n={} dim=1 repr={repr}\n", set.alphabet().size(), set.depth());
    match set.mask_levels() {
        Some(levels) => levels.iter().for_each(|i| writeln!(out, "{i}").expect("string write")),
        None => set.members().for_each(|w| writeln!(out, "{}", word_token(&w)).expect("string write")),
    }
    out
}

pub fn write_grid_set(set: &GridTreeSet) -> Result<String> {
    let header = |repr: &str| format!("treeset v1 k={} n={} dim=2 repr={repr}\n", set.alphabet().size(), set.depth());
    if let (GridReprKind::LevelLift, Some(grid)) = (set.kind(), set.lifted_levels()) {
        let mut out = header("levellift");
        grid.iter().for_each(|(i, j)| writeln!(out, "{i} {j}").expect("string write"));
        return Ok(out);
    }
    let mut out = header("explicit");
    for p in set.members()? {
        writeln!(out, "{},{}", word_token(&p.first), word_token(&p.second)).expect("string write");
    }
    Ok(out)
}

pub fn write_set(set: &SetFile) -> Result<String> {
    match set {
        SetFile::Tree(t) => Ok(write_tree_set(t)),
        SetFile::Grid(g) => write_grid_set(g),
    }
}

pub fn read_set_file(path: impl AsRef<Path>) -> Result<SetFile> {
    parse_set(&std::fs::read_to_string(path)?)
}

fn parse_rational(line: usize, s: &str) -> Result<BigRational> {
    let bad = || parse_err(line, format!("bad rational `{s}`"));
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Parses one or more Markov system blocks.
pub fn parse_markov(text: &str) -> Result<Vec<FiniteMarkovSystem>> {
    let lines = lines_of(text)?;
    let mut systems = Vec::new();
    let mut pos = 0;
    while pos < lines.len() {
        let (hl, header) = lines[pos];
        let fields = header_fields(header, "markov", "v1", &["k", "m"]).map_err(|e| match e {
            Error::Parse { reason, .. } => parse_err(hl, reason),
            other => other,
        })?;
        let k: usize = number(hl, fields[0], "alphabet size")?;
        let alphabet = at_line(hl, Alphabet::new(k))?;
        let m: usize = number(hl, fields[1], "state count")?;
        pos += 1;
        let mut transitions = Vec::with_capacity(k);
        let mut probabilities = Vec::with_capacity(k);
        for l in 0..k {
            for kind in ["T", "p"] {
                let &(line, text) = lines.get(pos).ok_or_else(|| parse_err(lines.len() + 1, format!("missing `{kind}{l}:` line")))?;
                let prefix = format!("{kind}{l}:");
                let rest = text.strip_prefix(&prefix).ok_or_else(|| parse_err(line, format!("expected `{prefix}`")))?;
                let entries: Vec<&str> = rest.split_whitespace().collect();
                if entries.len() != m {
                    return Err(parse_err(line, format!("expected {m} entries, got {}", entries.len())));
                }
                if kind == "T" {
                    transitions.push(entries.iter().map(|s| number::<usize>(line, s, "state")).collect::<Result<Vec<_>>>()?);
                } else {
                    probabilities.push(entries.iter().map(|s| parse_rational(line, s)).collect::<Result<Vec<_>>>()?);
                }
                pos += 1;
            }
        }
        let sys = FiniteMarkovSystem::new(alphabet, transitions, probabilities).map_err(|e| parse_err(hl, e.to_string()))?;
        systems.push(sys);
    }
    Ok(systems)
}

pub fn write_markov(sys: &FiniteMarkovSystem) -> String {
    let mut out = format!("markov v1 k={} m={}\n", sys.alphabet().size(), sys.states());
    for l in sys.alphabet().letters() {
        let t: Vec<String> = sys.transitions()[l as usize].iter().map(|x| x.to_string()).collect();
        let p: Vec<String> = sys.probabilities()[l as usize].iter().map(|q| format!("{}/{}", q.numer(), q.denom())).collect();
        writeln!(out, "T{l}: {}", t.join(" ")).expect("string write");
        writeln!(out, "p{l}: {}", p.join(" ")).expect("string write");
    }
    out
}

pub fn read_markov_file(path: impl AsRef<Path>) -> Result<Vec<FiniteMarkovSystem>> {
    parse_markov(&std::fs::read_to_string(path)?)
}

/// Any of the four witness kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Tree(TreeWitness),
    Regular(RegularEmbeddingWitness),
    Array(TreeArrayWitness),
    Product(ProductTreeWitness),
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Tree(_) => "tree",
            Witness::Regular(_) => "regular",
            Witness::Array(_) => "array",
            Witness::Product(_) => "product",
        }
    }
}

fn json_str(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

fn json_map<'a>(entries: impl IntoIterator<Item = (String, String)> + 'a) -> String {
    let body: Vec<String> = entries.into_iter().map(|(k, v)| format!("{}:{}", json_str(&k), json_str(&v))).collect();
    format!("{{{}}}", body.join(","))
}

/// Canonical JSON: fixed field order, no whitespace, map keys in shortlex
/// address order (array keys `<row>/<address>` by row first).
pub fn witness_to_json(w: &Witness) -> String {
    match w {
        Witness::Tree(t) => format!(
            "{{\"kind\":\"tree\",\"k\":{},\"r\":{},\"q\":{},\"map\":{}}}",
            t.alphabet.size(),
            t.order,
            t.gap,
            json_map(t.map.iter().map(|(a, b)| (a.to_string(), b.to_string())))
        ),
        Witness::Regular(t) => format!(
            "{{\"kind\":\"regular\",\"k\":{},\"r\":{},\"map\":{}}}",
            t.alphabet.size(),
            t.depth,
            json_map(t.map.iter().map(|(a, b)| (a.to_string(), b.to_string())))
        ),
        Witness::Array(t) => format!(
            "{{\"kind\":\"array\",\"k\":{},\"r\":{},\"q\":{},\"c1\":{},\"c2\":{},\"map\":{}}}",
            t.alphabet.size(),
            t.order,
            t.gap,
            t.c1,
            t.c2,
            json_map(t.rows.iter().enumerate().flat_map(|(j, row)| {
                row.map.iter().map(move |(a, b)| (format!("{j}/{a}"), format!("{b},{}", row.y)))
            }))
        ),
        Witness::Product(t) => format!(
            "{{\"kind\":\"product\",\"k\":{},\"r\":{},\"u\":[{},{}],\"v\":[{},{}],\"map\":{}}}",
            t.alphabet.size(),
            t.order,
            t.u.0,
            t.u.1,
            t.v.0,
            t.v.1,
            json_map(t.map.iter().map(|(a, b)| (a.to_string(), b.to_string())))
        ),
    }
}

fn field_usize(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<usize>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v.as_u64().map(|n| Some(n as usize)).ok_or_else(|| parse_err(1, format!("`{key}` must be a nonnegative integer"))),
    }
}

fn required(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize> {
    field_usize(obj, key)?.ok_or_else(|| parse_err(1, format!("missing `{key}`")))
}

fn field_level(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<Level>> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Array(a)) if a.len() == 2 => match (a[0].as_u64(), a[1].as_u64()) {
            (Some(x), Some(y)) => Ok(Some(Level(x as usize, y as usize))),
            _ => Err(parse_err(1, format!("`{key}` must hold two nonnegative integers"))),
        },
        Some(_) => Err(parse_err(1, format!("`{key}` must be a two-element array"))),
    }
}

fn string_map(obj: &serde_json::Map<String, Value>) -> Result<Vec<(&str, &str)>> {
    let map = obj.get("map").and_then(Value::as_object).ok_or_else(|| parse_err(1, "missing `map` object"))?;
    map.iter()
        .map(|(k, v)| Ok((k.as_str(), v.as_str().ok_or_else(|| parse_err(1, format!("image of `{k}` must be a string")))?)))
        .collect()
}

/// Parses witness JSON; a missing gap or increment is inferred from the map.
pub fn parse_witness(text: &str) -> Result<Witness> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| parse_err(1, "witness must be a JSON object"))?;
    let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| parse_err(1, "missing `kind`"))?;
    let alphabet = Alphabet::new(required(obj, "k")?)?;
    let order = required(obj, "r")?;
    let entries = string_map(obj)?;
    let word = |s: &str| at_line(1, Word::parse(alphabet, s));
    let tree_map = || -> Result<BTreeMap<Word, Word>> { entries.iter().map(|(a, b)| Ok((word(a)?, word(b)?))).collect() };
    match kind {
        "tree" => {
            let map = tree_map()?;
            let gap = match field_usize(obj, "q")? {
                Some(q) => q,
                None => infer_gap(&map).unwrap_or(1),
            };
            Ok(Witness::Tree(TreeWitness { alphabet, order, gap, map }))
        }
        "regular" => Ok(Witness::Regular(RegularEmbeddingWitness { alphabet, depth: order, map: tree_map()? })),
        "array" => {
            let mut rows: BTreeMap<usize, (Option<Word>, BTreeMap<Word, Word>)> = BTreeMap::new();
            for (key, img) in &entries {
                let (j, addr) = key.split_once('/').ok_or_else(|| parse_err(1, format!("array key `{key}` must be `<row>/<address>`")))?;
                let j: usize = number(1, j, "row")?;
                let p = at_line(1, PairWord::parse(alphabet, img))?;
                let row = rows.entry(j).or_default();
                match &row.0 {
                    Some(y) if *y != p.second => return Err(parse_err(1, format!("row {j} has two vertical coordinates"))),
                    _ => row.0 = Some(p.second.clone()),
                }
                row.1.insert(word(addr)?, p.first);
            }
            if rows.keys().copied().ne(0..rows.len()) {
                return Err(parse_err(1, "array rows must be numbered 0, 1, .."));
            }
            let rows: Vec<ArrayRow> = rows.into_values().map(|(y, map)| ArrayRow { y: y.expect("row has an entry"), map }).collect();
            let (q0, c10, c20) = infer_array_constants(&rows).unwrap_or((1, 0, 0));
            Ok(Witness::Array(TreeArrayWitness {
                alphabet,
                order,
                gap: field_usize(obj, "q")?.unwrap_or(q0),
                c1: field_usize(obj, "c1")?.unwrap_or(c10),
                c2: field_usize(obj, "c2")?.unwrap_or(c20),
                rows,
            }))
        }
        "product" => {
            let map: BTreeMap<FreeWord, PairWord> = entries
                .iter()
                .map(|(a, b)| Ok((at_line(1, FreeWord::parse(alphabet, a))?, at_line(1, PairWord::parse(alphabet, b))?)))
                .collect::<Result<_>>()?;
            let inferred = infer_increments(&map);
            let u = field_level(obj, "u")?.or(inferred.map(|p| p.0)).ok_or_else(|| parse_err(1, "cannot infer `u`"))?;
            let v = field_level(obj, "v")?.or(inferred.map(|p| p.1)).ok_or_else(|| parse_err(1, "cannot infer `v`"))?;
            Ok(Witness::Product(ProductTreeWitness { alphabet, order, u, v, map }))
        }
        other => Err(parse_err(1, format!("unknown witness kind `{other}`"))),
    }
}

/// Writes canonical JSON followed by a newline.
pub fn write_witness(w: &Witness, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, witness_to_json(w) + "\n")?;
    Ok(())
}

pub fn read_witness(path: impl AsRef<Path>) -> Result<Witness> {
    parse_witness(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::density_2d;

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn level_lift_example() {
        let SetFile::Grid(g) = parse_set("treeset v1 k=2 n=2 dim=2 repr=levellift\n0 0\n1 1\n").unwrap() else {
            panic!("expected a grid set")
        };
        assert_eq!(density_2d(&g).unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn empty_and_malformed() {
        let SetFile::Grid(g) = parse_set("treeset v1 k=2 n=3 dim=2 repr=explicit\n").unwrap() else { panic!() };
        assert!(g.members().unwrap().is_empty());
        let unsorted = parse_set("treeset v1 k=2 n=3 dim=2 repr=explicit\n1,-\n0,-\n");
        assert!(matches!(unsorted, Err(Error::Parse { line: 3, .. })));
        // shortlex: "1" before "00"
        assert!(parse_set("treeset v1 k=2 n=3 dim=1 repr=explicit\n1\n00\n").is_ok());
        assert!(matches!(parse_set("treeset v1 k=2 n=3 dim=1 repr=explicit\n00\n1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_set("treeset v2 k=2 n=3 dim=1 repr=explicit\n"), Err(Error::VersionMismatch(_))));
        assert!(matches!(parse_set("treeset v1 k=2 n=3 dim=1 repr=explicit\n0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_set("treeset v1 k=2 n=3 dim=1 repr=explicit\n0\n2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_set("treeset v1 k=2 n=2 dim=1 repr=levellift\n0\n2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_set("treeset v1 k=2 n=2 dim=1 repr=explicit\n\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn set_roundtrips() {
        let g = GridTreeSet::random(k2(), 3, &BigRational::new(1.into(), 2.into()), 7).unwrap();
        let text = write_grid_set(&g).unwrap();
        let SetFile::Grid(back) = parse_set(&text).unwrap() else { panic!() };
        assert_eq!(back.members().unwrap(), g.members().unwrap());
        assert_eq!(write_grid_set(&back).unwrap(), text);
        let t = TreeSet::level_mask(k2(), 5, [0, 2, 4]).unwrap();
        assert_eq!(write_tree_set(&t), "treeset v1 k=2 n=5 dim=1 repr=levellift\n0\n2\n4\n");
        let e = TreeSet::explicit(k2(), 3, ["", "1", "01"].map(|s| Word::parse(k2(), s).unwrap())).unwrap();
        assert_eq!(write_tree_set(&e), "treeset v1 k=2 n=3 dim=1 repr=explicit\n-\n1\n01\n");
    }

    #[test]
    fn markov_roundtrip() {
        let text = "markov v1 k=2 m=2\nT0: 0 1\np0: 1/2 1/3\nT1: 1 0\np1: 1/2 2/3\nmarkov v1 k=1 m=2\nT0: 1 0\np0: 1/1 1/1\n";
        let systems = parse_markov(text).unwrap();
        assert_eq!(systems.len(), 2);
        assert_eq!(systems.iter().map(write_markov).collect::<String>(), text);
        assert!(matches!(parse_markov("markov v1 k=2 m=2\nT0: 0 1\np0: 1/2 1/2\nT1: 1 0\np1: 1/2\n"), Err(Error::Parse { line: 5, .. })));
        assert!(parse_markov("markov v1 k=1 m=1\nT0: 0\np0: 1/2\n").is_err());
    }

    #[test]
    fn witness_json_shapes() {
        let map: BTreeMap<Word, Word> =
            [("", ""), ("0", "00"), ("1", "10"), ("00", "0000"), ("01", "0010"), ("10", "1000"), ("11", "1010")]
                .iter()
                .map(|(a, b)| (Word::parse(k2(), a).unwrap(), Word::parse(k2(), b).unwrap()))
                .collect();
        let w = Witness::Tree(TreeWitness { alphabet: k2(), order: 2, gap: 2, map });
        let json = witness_to_json(&w);
        assert_eq!(
            json,
            r#"{"kind":"tree","k":2,"r":2,"q":2,"map":{"":"","0":"00","1":"10","00":"0000","01":"0010","10":"1000","11":"1010"}}"#
        );
        assert_eq!(parse_witness(&json).unwrap(), w);
        let stripped = json.replace(r#""q":2,"#, "");
        assert_eq!(parse_witness(&stripped).unwrap(), w);
        assert!(parse_witness(r#"{"kind":"tree","k":2,"r":1,"map":{"":"2"}}"#).is_err());
        assert!(parse_witness(r#"{"kind":"cube","k":2,"r":1,"map":{}}"#).is_err());
    }
}
