//! Finitely generated groups with solvable normal forms.
//!
//! Three families are supported: free products of finite cyclic groups
//! (`Z/q1 * ... * Z/qm`), free groups, and free abelian groups. Elements are
//! always stored reduced, so equality of [`Word`]s is equality in the group.
//!
//! Words are totally ordered by word length first and then lexicographically
//! on their letters (or exponent vectors). Every set of elements handed out by
//! this module is sorted in that order, which is what makes matrix layouts and
//! serialized artifacts reproducible.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupFamily {
    FreeProductOfCyclics(Vec<u64>),
    FreeGroup(usize),
    FreeAbelian(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupCtx {
    family: GroupFamily,
}

/// One syllable `x_gen^exp` of a free-family word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u32,
    pub exp: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Body {
    Letters(Vec<Letter>),
    Vector(Vec<i64>),
}

/// A group element in normal form. The derived order compares the word
/// length first, which is the canonical order used everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: u64,
    body: Body,
}

impl Word {
    pub fn length(&self) -> u64 {
        self.len
    }

    pub fn is_identity(&self) -> bool {
        self.len == 0
    }

    /// Syllables of a free-family word; empty for abelian words.
    pub fn letters(&self) -> &[Letter] {
        match &self.body {
            Body::Letters(l) => l,
            Body::Vector(_) => &[],
        }
    }

    /// Exponent vector of an abelian word.
    pub fn vector(&self) -> Option<&[i64]> {
        match &self.body {
            Body::Vector(v) => Some(v),
            Body::Letters(_) => None,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Letters(letters) if letters.is_empty() => write!(f, "1"),
            Body::Letters(letters) => {
                for (i, l) in letters.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "x{}", l.gen + 1)?;
                    if l.exp != 1 {
                        write!(f, "^{}", l.exp)?;
                    }
                }
                Ok(())
            }
            Body::Vector(v) => {
                write!(f, "[")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CtxRepr {
    family: String,
    params: Vec<u64>,
}

impl Serialize for GroupCtx {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (family, params) = match &self.family {
            GroupFamily::FreeProductOfCyclics(orders) => ("FreeProductOfCyclics", orders.clone()),
            GroupFamily::FreeGroup(r) => ("FreeGroup", vec![*r as u64]),
            GroupFamily::FreeAbelian(r) => ("FreeAbelian", vec![*r as u64]),
        };
        CtxRepr { family: family.to_string(), params }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupCtx {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CtxRepr::deserialize(deserializer)?;
        let one = |params: &[u64]| -> std::result::Result<usize, D::Error> {
            match params {
                [r] => Ok(*r as usize),
                _ => Err(D::Error::custom("expected exactly one parameter (the rank)")),
            }
        };
        let ctx = match repr.family.as_str() {
            "FreeProductOfCyclics" => GroupCtx::free_product(&repr.params),
            "FreeGroup" => GroupCtx::free_group(one(&repr.params)?),
            "FreeAbelian" => GroupCtx::free_abelian(one(&repr.params)?),
            other => return Err(D::Error::custom(format!("unknown group family {other:?}"))),
        };
        ctx.map_err(D::Error::custom)
    }
}

impl GroupCtx {
    pub fn free_product(orders: &[u64]) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroup("free product needs at least one factor".into()));
        }
        if let Some(q) = orders.iter().find(|&&q| q < 2) {
            return Err(Error::InvalidGroup(format!("cyclic order {q} < 2")));
        }
        Ok(Self { family: GroupFamily::FreeProductOfCyclics(orders.to_vec()) })
    }

    pub fn free_group(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidGroup("free group rank must be at least 1".into()));
        }
        Ok(Self { family: GroupFamily::FreeGroup(rank) })
    }

    pub fn free_abelian(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidGroup("free abelian rank must be at least 1".into()));
        }
        Ok(Self { family: GroupFamily::FreeAbelian(rank) })
    }

    /// `<x,y,z | x^2, y^2, z^2>`.
    pub fn w3() -> Self {
        Self { family: GroupFamily::FreeProductOfCyclics(vec![2; 3]) }
    }

    /// Free product of five copies of `Z/2`; its Cayley graph is the 5-regular tree.
    pub fn w5() -> Self {
        Self { family: GroupFamily::FreeProductOfCyclics(vec![2; 5]) }
    }

    /// Short names: `z`/`zN` (free abelian), `wN` (free product of `N`
    /// involutions), `fN` (free group); anything starting with `{` is read
    /// as the JSON form.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if name.starts_with('{') {
            return serde_json::from_str(name).map_err(|e| Error::InvalidGroup(e.to_string()));
        }
        let bad = || Error::InvalidGroup(format!("unknown group name {name:?} (expected z, zN, wN, fN or JSON)"));
        let lower = name.to_ascii_lowercase();
        let (head, tail) = lower.split_at(1.min(lower.len()));
        let count = |t: &str| -> Result<usize> {
            if t.is_empty() && head == "z" {
                return Ok(1);
            }
            t.parse::<usize>().map_err(|_| bad())
        };
        match head {
            "z" => Self::free_abelian(count(tail)?),
            "w" => Self::free_product(&vec![2; count(tail)?]),
            "f" => Self::free_group(count(tail)?),
            _ => Err(bad()),
        }
    }

    pub fn family(&self) -> &GroupFamily {
        &self.family
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.family, GroupFamily::FreeAbelian(_))
    }

    pub fn num_generators(&self) -> usize {
        match &self.family {
            GroupFamily::FreeProductOfCyclics(o) => o.len(),
            GroupFamily::FreeGroup(r) | GroupFamily::FreeAbelian(r) => *r,
        }
    }

    pub fn identity(&self) -> Word {
        match &self.family {
            GroupFamily::FreeAbelian(r) => Word { len: 0, body: Body::Vector(vec![0; *r]) },
            _ => Word { len: 0, body: Body::Letters(Vec::new()) },
        }
    }

    /// The `i`-th generator (0-based) as a word.
    pub fn generator(&self, i: usize) -> Result<Word> {
        if i >= self.num_generators() {
            return Err(Error::OutOfRange(format!("generator index {i}")));
        }
        match &self.family {
            GroupFamily::FreeAbelian(r) => {
                let mut v = vec![0; *r];
                v[i] = 1;
                Ok(self.vector_word(v))
            }
            _ => Ok(self.reduce([Letter { gen: i as u32, exp: 1 }])),
        }
    }

    /// The generators, as a canonically ordered set.
    pub fn generators(&self) -> ElementSet {
        (0..self.num_generators()).map(|i| self.generator(i).expect("index in range")).collect()
    }

    /// Generators together with their inverses: the steps of the word metric.
    pub fn symmetric_generators(&self) -> ElementSet {
        let gens = self.generators();
        gens.iter().cloned().chain(gens.iter().map(|g| self.inv(g))).collect()
    }

    fn letter_len(&self, gen: u32, exp: i64) -> u64 {
        match &self.family {
            GroupFamily::FreeProductOfCyclics(orders) => {
                let q = orders[gen as usize] as i64;
                let e = exp.rem_euclid(q);
                e.min(q - e) as u64
            }
            _ => exp.unsigned_abs(),
        }
    }

    fn normalize_exp(&self, gen: u32, exp: i64) -> i64 {
        match &self.family {
            GroupFamily::FreeProductOfCyclics(orders) => exp.rem_euclid(orders[gen as usize] as i64),
            _ => exp,
        }
    }

    /// Free reduction of a letter sequence. Generator indices must be in range.
    fn reduce(&self, letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            let exp = self.normalize_exp(l.gen, l.exp);
            if exp == 0 {
                continue;
            }
            match stack.last_mut() {
                Some(top) if top.gen == l.gen => {
                    let merged = self.normalize_exp(l.gen, top.exp + exp);
                    if merged == 0 {
                        stack.pop();
                    } else {
                        top.exp = merged;
                    }
                }
                _ => stack.push(Letter { gen: l.gen, exp }),
            }
        }
        let len = stack.iter().map(|l| self.letter_len(l.gen, l.exp)).sum();
        Word { len, body: Body::Letters(stack) }
    }

    fn vector_word(&self, v: Vec<i64>) -> Word {
        let len = v.iter().map(|e| e.unsigned_abs()).sum();
        Word { len, body: Body::Vector(v) }
    }

    /// Builds a word from an arbitrary (unreduced) letter string.
    pub fn word_from_letters(&self, letters: &[(u32, i64)]) -> Result<Word> {
        if self.is_abelian() {
            let mut v = vec![0i64; self.num_generators()];
            for &(g, e) in letters {
                *v.get_mut(g as usize).ok_or_else(|| Error::OutOfRange(format!("generator {g}")))? += e;
            }
            return Ok(self.vector_word(v));
        }
        if let Some(&(g, _)) = letters.iter().find(|(g, _)| *g as usize >= self.num_generators()) {
            return Err(Error::OutOfRange(format!("generator {g}")));
        }
        Ok(self.reduce(letters.iter().map(|&(gen, exp)| Letter { gen, exp })))
    }

    pub fn word_from_vector(&self, v: &[i64]) -> Result<Word> {
        match &self.family {
            GroupFamily::FreeAbelian(r) if *r == v.len() => Ok(self.vector_word(v.to_vec())),
            GroupFamily::FreeAbelian(r) => Err(Error::Dimension(format!("expected {r} exponents, got {}", v.len()))),
            _ => Err(Error::Mismatch("exponent vectors only describe abelian words".into())),
        }
    }

    pub fn mul(&self, a: &Word, b: &Word) -> Word {
        match (&a.body, &b.body) {
            (Body::Vector(x), Body::Vector(y)) => {
                self.vector_word(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Body::Letters(x), Body::Letters(y)) => self.reduce(x.iter().chain(y).copied()),
            _ => panic!("mul: words from different group families"),
        }
    }

    pub fn inv(&self, a: &Word) -> Word {
        match &a.body {
            Body::Vector(x) => self.vector_word(x.iter().map(|e| -e).collect()),
            Body::Letters(x) => self.reduce(x.iter().rev().map(|l| Letter { gen: l.gen, exp: -l.exp })),
        }
    }

    /// All elements of word length at most `r`.
    pub fn ball(&self, r: usize) -> ElementSet {
        let steps = self.symmetric_generators();
        let mut seen: BTreeSet<Word> = BTreeSet::new();
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        for _ in 0..r {
            let mut next = Vec::new();
            for w in &frontier {
                for g in steps.iter() {
                    let h = self.mul(w, g);
                    if seen.insert(h.clone()) {
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        ElementSet(seen.into_iter().collect())
    }

    /// `{s f : s in S, f in F}`.
    pub fn set_product(&self, s: &ElementSet, f: &ElementSet) -> ElementSet {
        s.iter().flat_map(|a| f.iter().map(move |b| self.mul(a, b))).collect()
    }

    /// `S0^k`, all products of `k` elements of `S0`.
    pub fn power_set_product(&self, s0: &ElementSet, k: usize) -> Result<ElementSet> {
        if s0.is_empty() {
            return Err(Error::EmptySet("S0"));
        }
        if k == 0 {
            return Err(Error::OutOfRange("power k must be at least 1".into()));
        }
        let mut acc = s0.clone();
        for _ in 1..k {
            acc = self.set_product(&acc, s0);
        }
        Ok(acc)
    }

    pub fn inverse_set(&self, s: &ElementSet) -> ElementSet {
        s.iter().map(|w| self.inv(w)).collect()
    }

    /// Parses `"x1 x3^2 x1"` (free families, `"1"` for the identity; single
    /// letters `x y z w` are accepted as aliases for the first four
    /// generators) or `"[3,-1]"` (abelian).
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let bad = |reason: &str| Error::InvalidWord { word: text.to_string(), reason: reason.to_string() };
        let t = text.trim();
        if self.is_abelian() {
            let inner = t
                .strip_prefix('[')
                .and_then(|x| x.strip_suffix(']'))
                .ok_or_else(|| bad("abelian words are written [e1,...,er]"))?;
            let v = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<i64>().map_err(|_| bad("non-integer exponent")))
                .collect::<Result<Vec<_>>>()?;
            return self.word_from_vector(&v).map_err(|_| bad("wrong number of exponents"));
        }
        if t.is_empty() || t == "1" || t == "e" {
            return Ok(self.identity());
        }
        let mut letters = Vec::new();
        for tok in t.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad("bad exponent"))?),
                None => (tok, 1),
            };
            let gen = match name {
                "x" => 0,
                "y" => 1,
                "z" => 2,
                "w" => 3,
                _ => {
                    let idx = name
                        .strip_prefix('x')
                        .and_then(|d| d.parse::<u32>().ok())
                        .filter(|&d| d >= 1)
                        .ok_or_else(|| bad("generators are named x1, x2, ..."))?;
                    idx - 1
                }
            };
            letters.push((gen, exp));
        }
        self.word_from_letters(&letters).map_err(|_| bad("generator out of range"))
    }

    /// Human-oriented rendering: `x y z` style names for free families with at
    /// most three generators, `u v w` monomials for abelian words.
    pub fn pretty(&self, w: &Word) -> String {
        const FREE: [&str; 3] = ["x", "y", "z"];
        const ABEL: [&str; 4] = ["u", "v", "w", "t"];
        match &w.body {
            Body::Letters(l) if l.is_empty() => "1".into(),
            Body::Letters(l) if self.num_generators() <= 3 => l
                .iter()
                .map(|x| {
                    let name = FREE[x.gen as usize];
                    if x.exp == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{}", x.exp)
                    }
                })
                .collect::<Vec<_>>()
                .join(""),
            Body::Letters(_) => w.to_string(),
            Body::Vector(v) if v.iter().all(|&e| e == 0) => "1".into(),
            Body::Vector(v) if v.len() <= 4 => v
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| if e == 1 { ABEL[i].to_string() } else { format!("{}^{e}", ABEL[i]) })
                .collect::<Vec<_>>()
                .join(""),
            Body::Vector(_) => w.to_string(),
        }
    }
}

/// A deduplicated, canonically ordered finite set of words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(Vec<Word>);

impl ElementSet {
    pub fn new(words: impl IntoIterator<Item = Word>) -> Self {
        words.into_iter().collect()
    }

    pub fn singleton(w: Word) -> Self {
        Self(vec![w])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Word> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Word] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<&Word> {
        self.0.get(i)
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.0.binary_search(w).ok()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.index_of(w).is_some()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.iter().all(|w| other.contains(w))
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        self.iter().chain(other.iter()).cloned().collect()
    }
}

impl FromIterator<Word> for ElementSet {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        let mut v: Vec<Word> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        Self(v)
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = &'a Word;
    type IntoIter = std::slice::Iter<'a, Word>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The family of finite sets `F` an expansion report searches over.
#[derive(Clone, Debug)]
pub enum SearchSpace {
    /// Every nonempty subset of `ball(radius)`.
    Exhaustive { radius: usize },
    /// Every nonempty subset of `ball(radius)` with at most `max_size` elements.
    BoundedSize { radius: usize, max_size: usize },
    /// An explicit list of sets.
    Explicit(Vec<ElementSet>),
}

impl SearchSpace {
    pub fn describe(&self) -> String {
        match self {
            SearchSpace::Exhaustive { radius } => format!("all nonempty F in ball({radius})"),
            SearchSpace::BoundedSize { radius, max_size } => {
                format!("all nonempty F in ball({radius}) with #F <= {max_size}")
            }
            SearchSpace::Explicit(sets) => format!("{} explicit sets", sets.len()),
        }
    }
}

/// Default cap on `#ball(r)` for exhaustive subset enumeration.
pub const EXHAUSTIVE_CAP: usize = 26;

/// Result of checking an affine expansion claim `#(SF) >= c #F + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub s: ElementSet,
    pub search: String,
    pub claim_c: BigRational,
    pub claim_b: BigRational,
    pub sets_checked: u64,
    /// `min over F of #(SF) - c #F - b`; nonnegative means no counterexample
    /// in the searched family, not a proof for all `F`.
    pub min_slack: BigRational,
    pub witness: ElementSet,
}

/// Integer-scaled slack: `slack * denom = sf * a - f * cn - bn`.
struct ScaledClaim {
    denom: i128,
    a: i128,
    cn: i128,
    bn: i128,
}

impl ScaledClaim {
    fn new(c: &BigRational, b: &BigRational) -> Result<Self> {
        let denom = c.denom().lcm(b.denom());
        let to = |x: BigInt| x.to_i128().ok_or_else(|| Error::OutOfRange("claim constants too large".into()));
        Ok(Self {
            denom: to(denom.clone())?,
            a: to(denom.clone())?,
            cn: to(c.numer() * (&denom / c.denom()))?,
            bn: to(b.numer() * (&denom / b.denom()))?,
        })
    }

    fn slack(&self, sf: usize, f: usize) -> i128 {
        sf as i128 * self.a - f as i128 * self.cn - self.bn
    }

    fn to_rational(&self, scaled: i128) -> BigRational {
        BigRational::new(BigInt::from(scaled), BigInt::from(self.denom))
    }
}

/// Exact minimum of `#(SF) - c #F - b` over a family of finite sets.
pub fn expansion_report(
    ctx: &GroupCtx,
    s: &ElementSet,
    c: &BigRational,
    b: &BigRational,
    space: &SearchSpace,
    cap: usize,
) -> Result<ExpansionReport> {
    if s.is_empty() {
        return Err(Error::EmptySet("S"));
    }
    let claim = ScaledClaim::new(c, b)?;
    let (best, witness, checked) = match space {
        SearchSpace::Explicit(sets) => {
            let mut best: Option<(i128, ElementSet)> = None;
            for f in sets.iter().filter(|f| !f.is_empty()) {
                let slack = claim.slack(ctx.set_product(s, f).len(), f.len());
                if best.as_ref().is_none_or(|(b, _)| slack < *b) {
                    best = Some((slack, f.clone()));
                }
            }
            let (slack, w) = best.ok_or(Error::EmptySet("search family"))?;
            (slack, w, sets.len() as u64)
        }
        SearchSpace::Exhaustive { radius } => {
            let universe = ctx.ball(*radius);
            if universe.len() > cap {
                return Err(Error::CapExceeded(format!(
                    "#ball({radius}) = {} exceeds the exhaustive cap {cap}",
                    universe.len()
                )));
            }
            exhaustive_min(ctx, s, &universe, &claim)
        }
        SearchSpace::BoundedSize { radius, max_size } => {
            let universe = ctx.ball(*radius);
            bounded_min(ctx, s, &universe, *max_size, &claim, cap)?
        }
    };
    Ok(ExpansionReport {
        s: s.clone(),
        search: space.describe(),
        claim_c: c.clone(),
        claim_b: b.clone(),
        sets_checked: checked,
        min_slack: claim.to_rational(best),
        witness,
    })
}

/// For each universe element, the indices of its left translates by `S`.
fn translate_table(ctx: &GroupCtx, s: &ElementSet, universe: &ElementSet) -> (Vec<Vec<usize>>, usize) {
    let image = ctx.set_product(s, universe);
    let table = universe
        .iter()
        .map(|u| s.iter().map(|a| image.index_of(&ctx.mul(a, u)).expect("product is in image")).collect())
        .collect();
    (table, image.len())
}

fn exhaustive_min(
    ctx: &GroupCtx,
    s: &ElementSet,
    universe: &ElementSet,
    claim: &ScaledClaim,
) -> (i128, ElementSet, u64) {
    let (table, image_len) = translate_table(ctx, s, universe);
    let n = universe.len();
    // Gray-code walk over all subsets, maintaining coverage multiplicities of SF.
    let mut cover = vec![0u32; image_len];
    let mut covered = 0usize;
    let mut mask: u64 = 0;
    let mut best: Option<(i128, u64)> = None;
    let total: u64 = 1u64 << n;
    for step in 1..total {
        let bit = step.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if mask & (1 << bit) != 0 {
            for &j in &table[bit] {
                cover[j] += 1;
                if cover[j] == 1 {
                    covered += 1;
                }
            }
        } else {
            for &j in &table[bit] {
                cover[j] -= 1;
                if cover[j] == 0 {
                    covered -= 1;
                }
            }
        }
        let slack = claim.slack(covered, mask.count_ones() as usize);
        if best.is_none_or(|(b, _)| slack < b) {
            best = Some((slack, mask));
        }
    }
    let (slack, m) = best.expect("universe contains the identity");
    let witness = (0..n).filter(|i| m & (1 << i) != 0).map(|i| universe.as_slice()[i].clone()).collect();
    (slack, witness, total - 1)
}

fn bounded_min(
    ctx: &GroupCtx,
    s: &ElementSet,
    universe: &ElementSet,
    max_size: usize,
    claim: &ScaledClaim,
    cap: usize,
) -> Result<(i128, ElementSet, u64)> {
    let (table, image_len) = translate_table(ctx, s, universe);
    let n = universe.len();
    let max_size = max_size.min(n);
    let count: f64 = (1..=max_size).map(|k| binomial_f64(n, k)).sum();
    // The cap bounds the number of sets, scaled so that the exhaustive cap and
    // this one agree on the size of the search.
    let limit = 2f64.powi(cap as i32);
    if count > limit {
        return Err(Error::CapExceeded(format!("{count:.0} subsets exceed the limit 2^{cap}")));
    }
    let mut best: Option<(i128, Vec<usize>)> = None;
    let mut checked = 0u64;
    let mut seen = vec![false; image_len];
    for k in 1..=max_size {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            seen.iter_mut().for_each(|x| *x = false);
            let mut covered = 0;
            for &i in &idx {
                for &j in &table[i] {
                    if !seen[j] {
                        seen[j] = true;
                        covered += 1;
                    }
                }
            }
            checked += 1;
            let slack = claim.slack(covered, k);
            if best.as_ref().is_none_or(|(b, _)| slack < *b) {
                best = Some((slack, idx.clone()));
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    let (slack, idx) = best.ok_or(Error::EmptySet("search family"))?;
    Ok((slack, idx.iter().map(|&i| universe.as_slice()[i].clone()).collect(), checked))
}

pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Affine expansion claims shipped as presets; trusted after desk checks.
pub fn preset_expansion(name: &str) -> Result<(GroupCtx, ElementSet, BigRational, BigRational)> {
    let int = |x: i64| BigRational::from_integer(BigInt::from(x));
    match name {
        "tree5" => {
            let ctx = GroupCtx::w5();
            let s = ctx.generators();
            Ok((ctx, s, int(3), int(2)))
        }
        "w3" => {
            let ctx = GroupCtx::w3();
            let s = ctx.generators().union(&ElementSet::singleton(ctx.identity()));
            Ok((ctx, s, BigRational::new(BigInt::from(4), BigInt::from(3)), int(0)))
        }
        other => Err(Error::Unsupported(format!("unknown expansion preset {other:?}"))),
    }
}

/// `#(SF)` minus the claimed bound at one set, as an exact rational.
pub fn slack_at(ctx: &GroupCtx, s: &ElementSet, f: &ElementSet, c: &BigRational, b: &BigRational) -> BigRational {
    let sf = BigRational::from_integer(BigInt::from(ctx.set_product(s, f).len()));
    let nf = BigRational::from_integer(BigInt::from(f.len()));
    sf - c * nf - b
}
