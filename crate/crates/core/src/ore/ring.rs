//! Group rings `K G` over `GF(p^d)` and matrices over them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::ext::{ExtField, ExtScalar};
use crate::group::{ElementSet, GroupCtx, Word};

/// A finitely supported function `G -> K`, stored without zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GRElem {
    ctx: GroupCtx,
    field: ExtField,
    terms: BTreeMap<Word, ExtScalar>,
}

impl GRElem {
    pub fn zero(ctx: &GroupCtx, field: &ExtField) -> Self {
        Self { ctx: ctx.clone(), field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &GroupCtx, field: &ExtField) -> Self {
        Self::monomial(ctx, field, ctx.identity(), field.one())
    }

    pub fn monomial(ctx: &GroupCtx, field: &ExtField, g: Word, c: ExtScalar) -> Self {
        Self::from_terms(ctx, field, [(g, c)])
    }

    /// Sums the given terms; repeated words are added together.
    pub fn from_terms(ctx: &GroupCtx, field: &ExtField, terms: impl IntoIterator<Item = (Word, ExtScalar)>) -> Self {
        let mut out = Self::zero(ctx, field);
        for (g, c) in terms {
            out.add_term(g, &c);
        }
        out
    }

    /// Prime-field convenience: coefficients given as residues mod `p`.
    pub fn from_prime_terms(ctx: &GroupCtx, field: &ExtField, terms: impl IntoIterator<Item = (Word, u64)>) -> Self {
        Self::from_terms(ctx, field, terms.into_iter().map(|(g, c)| (g, field.from_base(c))))
    }

    fn add_term(&mut self, g: Word, c: &ExtScalar) {
        if self.field.is_zero(c) {
            return;
        }
        let entry = self.terms.entry(g).or_insert_with(|| self.field.zero());
        *entry = self.field.add(entry, c);
        if self.field.is_zero(entry) {
            let key = self.terms.iter().find(|(_, v)| self.field.is_zero(v)).map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ExtScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &Word) -> ExtScalar {
        self.terms.get(g).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn support(&self) -> ElementSet {
        self.terms.keys().cloned().collect()
    }

    fn check_compatible(&self, other: &GRElem) -> Result<()> {
        if self.ctx != other.ctx || self.field != other.field {
            return Err(Error::Mismatch("group-ring elements over different groups or fields".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &GRElem) -> Result<GRElem> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> GRElem {
        let terms = self.terms.iter().map(|(g, c)| (g.clone(), self.field.neg(c))).collect();
        GRElem { ctx: self.ctx.clone(), field: self.field.clone(), terms }
    }

    pub fn sub(&self, other: &GRElem) -> Result<GRElem> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ExtScalar) -> GRElem {
        GRElem::from_terms(&self.ctx, &self.field, self.terms.iter().map(|(g, x)| (g.clone(), self.field.mul(x, c))))
    }

    /// Renders terms as `c*g`, with `g` in the group's pretty notation.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let d = self.field.degree();
        self.terms
            .iter()
            .map(|(g, c)| {
                let coef = if d == 1 {
                    c.0[0].to_string()
                } else {
                    format!("({})", c.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                };
                let word = self.ctx.pretty(g);
                match (coef.as_str(), word.as_str()) {
                    (_, "1") => coef,
                    ("1", _) => word,
                    _ => format!("{coef}*{word}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for GRElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

/// Convolution `(ab)(g) = sum_h a(h) b(h^-1 g)`.
pub fn gr_mul(a: &GRElem, b: &GRElem) -> Result<GRElem> {
    a.check_compatible(b)?;
    let f = &a.field;
    let mut acc: BTreeMap<Word, ExtScalar> = BTreeMap::new();
    for (h, x) in &a.terms {
        for (k, y) in &b.terms {
            let g = a.ctx.mul(h, k);
            let prod = f.mul(x, y);
            let e = acc.entry(g).or_insert_with(|| f.zero());
            *e = f.add(e, &prod);
        }
    }
    acc.retain(|_, c| !f.is_zero(c));
    Ok(GRElem { ctx: a.ctx.clone(), field: f.clone(), terms: acc })
}

/// A rectangular matrix over `K G`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GRMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GRElem>,
}

impl GRMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<GRElem>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if let Some(first) = entries.first() {
            for e in &entries {
                first.check_compatible(e)?;
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(ctx: &GroupCtx, field: &ExtField, rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![GRElem::zero(ctx, field); rows * cols] }
    }

    pub fn identity(ctx: &GroupCtx, field: &ExtField, n: usize) -> Self {
        let mut m = Self::zeros(ctx, field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = GRElem::one(ctx, field);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GRElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: GRElem) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn field(&self) -> Option<&ExtField> {
        self.entries.first().map(|e| e.field())
    }

    pub fn ctx(&self) -> Option<&GroupCtx> {
        self.entries.first().map(|e| e.ctx())
    }

    /// Indices of rows whose every entry is zero.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows).filter(|&i| (0..self.cols).all(|j| self.get(i, j).is_zero())).collect()
    }

    /// `[[x, y + z], [0, 0]]` style rendering.
    pub fn pretty(&self) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| format!("[{}]", (0..self.cols).map(|j| self.get(i, j).pretty()).collect::<Vec<_>>().join(", ")))
            .collect();
        format!("[{}]", rows.join(","))
    }
}

/// `(M v)_i = sum_j M_ij v_j`.
pub fn gr_mat_apply(m: &GRMatrix, v: &[GRElem]) -> Result<Vec<GRElem>> {
    apply_with(m, v, gr_mul)
}

/// `(v * M)_i = sum_j v_j M_ij`: matrix entries multiply from the right.
/// This is the side on which the matrix of an automaton acts on encoded
/// configurations (see `ca::to_groupring_column`).
pub fn gr_mat_apply_right(m: &GRMatrix, v: &[GRElem]) -> Result<Vec<GRElem>> {
    apply_with(m, v, |mij, vj| gr_mul(vj, mij))
}

fn apply_with(
    m: &GRMatrix,
    v: &[GRElem],
    prod: impl Fn(&GRElem, &GRElem) -> Result<GRElem>,
) -> Result<Vec<GRElem>> {
    if v.len() != m.cols {
        return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), m.cols)));
    }
    let Some(first) = v.first() else {
        return Ok(Vec::new());
    };
    (0..m.rows)
        .map(|i| {
            let mut acc = GRElem::zero(first.ctx(), first.field());
            for (j, vj) in v.iter().enumerate() {
                acc = acc.add(&prod(m.get(i, j), vj)?)?;
            }
            Ok(acc)
        })
        .collect()
}

/// File form: `{"ctx":, "p":, "d":, "terms": [[word, coeffs], ...]}`, terms in
/// canonical word order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GRElemFile {
    pub ctx: GroupCtx,
    pub p: u64,
    pub d: usize,
    pub terms: Vec<(String, Vec<u64>)>,
}

impl From<&GRElem> for GRElemFile {
    fn from(e: &GRElem) -> Self {
        Self {
            ctx: e.ctx.clone(),
            p: e.field.p(),
            d: e.field.degree(),
            terms: e.terms.iter().map(|(g, c)| (g.to_string(), c.0.clone())).collect(),
        }
    }
}

impl GRElemFile {
    pub fn to_elem(&self) -> Result<GRElem> {
        let field = ExtField::new(self.p, self.d)?;
        let mut out = GRElem::zero(&self.ctx, &field);
        let mut prev: Option<Word> = None;
        for (w, c) in &self.terms {
            let g = self.ctx.parse_word(w)?;
            let c = ExtScalar(c.clone());
            if !field.is_valid(&c) || field.is_zero(&c) {
                return Err(Error::Decode(format!("term {w:?}: coefficients must be {} nonzero residues mod {}", self.d, self.p)));
            }
            if prev.as_ref().is_some_and(|p| *p >= g) {
                return Err(Error::Decode(format!("term {w:?} out of canonical order")));
            }
            prev = Some(g.clone());
            out.terms.insert(g, c);
        }
        Ok(out)
    }
}

/// Parses a Laurent-polynomial style element such as `"1 + 2*u - u^-1 v"`.
///
/// Words may be written in the group's own syntax (`x1 x2^-1`, `[1,0]`) or,
/// for abelian groups, as monomials in `u v w t` for the first four
/// generators. Coefficients are integers reduced into the prime field.
pub fn parse_elem(ctx: &GroupCtx, field: &ExtField, text: &str) -> Result<GRElem> {
    let bad = |why: &str| Error::Decode(format!("cannot parse group-ring element {text:?}: {why}"));
    let mut out = GRElem::zero(ctx, field);
    let normalized = text.replace('-', "+-").replace("^+-", "^-").replace("[+-", "[-").replace(",+-", ",-");
    for raw in normalized.split('+') {
        let term = raw.trim();
        if term.is_empty() {
            continue;
        }
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest.trim()),
            None => (1, term),
        };
        let (coef, word_text) = match body.split_once('*') {
            Some((c, w)) => (c.trim().parse::<i64>().map_err(|_| bad("bad coefficient"))?, w.trim()),
            None => match body.parse::<i64>() {
                Ok(c) => (c, "1"),
                Err(_) => (1, body),
            },
        };
        let g = if ctx.is_abelian() && !word_text.starts_with('[') {
            parse_monomial(ctx, word_text).ok_or_else(|| bad("bad monomial"))?
        } else {
            ctx.parse_word(word_text)?
        };
        let c = field.base().from_i64(sign * coef);
        out.add_term(g, &field.from_base(c));
    }
    Ok(out)
}

fn parse_monomial(ctx: &GroupCtx, text: &str) -> Option<Word> {
    let mut v = vec![0i64; ctx.num_generators()];
    if text != "1" {
        let mut chars = text.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(name) = chars.next() {
            let idx = "uvwt".find(name)?;
            let mut exp = 1i64;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '-' || c.is_ascii_digit() {
                        digits.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                exp = digits.parse().ok()?;
            }
            *v.get_mut(idx)? += exp;
        }
    }
    ctx.word_from_vector(&v).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64) -> ExtField {
        ExtField::new(p, 1).unwrap()
    }

    #[test]
    fn relator_and_identity() {
        let w3 = GroupCtx::w3();
        let k = gf(2);
        let x = parse_elem(&w3, &k, "x").unwrap();
        assert_eq!(gr_mul(&x, &x).unwrap(), GRElem::one(&w3, &k));
        let a = parse_elem(&w3, &k, "x + y z").unwrap();
        assert_eq!(gr_mul(&a, &GRElem::one(&w3, &k)).unwrap(), a);
    }

    #[test]
    fn laurent_product() {
        let z = GroupCtx::free_abelian(1).unwrap();
        let k = gf(3);
        let a = parse_elem(&z, &k, "1 + u").unwrap();
        let b = parse_elem(&z, &k, "1 - u").unwrap();
        assert_eq!(gr_mul(&a, &b).unwrap(), parse_elem(&z, &k, "1 - u^2").unwrap());
        assert_eq!(parse_elem(&z, &k, "1 - u^2").unwrap().pretty(), "1 + 2*u^2");
    }

    #[test]
    fn muller_matrix_apply() {
        let w3 = GroupCtx::w3();
        let k = gf(2);
        let e = |t: &str| parse_elem(&w3, &k, t).unwrap();
        let m = GRMatrix::new(2, 2, vec![e("x"), e("y + z"), e("0"), e("0")]).unwrap();
        let out = gr_mat_apply(&m, &[e("0"), e("1")]).unwrap();
        assert_eq!(out, vec![e("y + z"), e("0")]);
        assert_eq!(m.zero_rows(), vec![1]);
        assert_eq!(m.pretty(), "[[x, y + z],[0, 0]]");
        let v = vec![e("x y"), e("z")];
        assert_eq!(gr_mat_apply(&GRMatrix::identity(&w3, &k, 2), &v).unwrap(), v);
        assert_eq!(gr_mat_apply(&m, &[e("0"), e("0")]).unwrap(), vec![e("0"), e("0")]);
    }

    #[test]
    fn file_roundtrip_and_validation() {
        let z2 = GroupCtx::free_abelian(2).unwrap();
        let k = gf(5);
        let a = parse_elem(&z2, &k, "3 + u v^-1 - 2*[0,4]").unwrap();
        let file = GRElemFile::from(&a);
        assert_eq!(file.to_elem().unwrap(), a);
        let mut bad = file.clone();
        bad.terms.reverse();
        assert!(bad.to_elem().is_err());
    }

    #[test]
    fn mismatched_rings() {
        let z = GroupCtx::free_abelian(1).unwrap();
        let a = GRElem::one(&z, &gf(2));
        let b = GRElem::one(&z, &gf(3));
        assert!(matches!(gr_mul(&a, &b), Err(Error::Mismatch(_))));
    }

    fn elem(ctx: GroupCtx, p: u64) -> impl Strategy<Value = GRElem> {
        prop::collection::vec((prop::collection::vec((0u32..2, -2i64..=2), 0..4), 0u64..p), 0..5).prop_map(move |terms| {
            let k = gf(p);
            GRElem::from_prime_terms(&ctx, &k, terms.iter().map(|(w, c)| (ctx.word_from_letters(w).unwrap(), *c)))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms_free_product(a in elem(GroupCtx::w3(), 3), b in elem(GroupCtx::w3(), 3), c in elem(GroupCtx::w3(), 3)) {
            let ab_c = gr_mul(&gr_mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = gr_mul(&a, &gr_mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let left = gr_mul(&a, &b.add(&c).unwrap()).unwrap();
            let right = gr_mul(&a, &b).unwrap().add(&gr_mul(&a, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let one = GRElem::one(a.ctx(), a.field());
            prop_assert_eq!(gr_mul(&one, &a).unwrap(), a.clone());
            prop_assert!(a.sub(&a).unwrap().is_zero());
        }

        #[test]
        fn abelian_group_ring_is_commutative(a in elem(GroupCtx::free_abelian(2).unwrap(), 5), b in elem(GroupCtx::free_abelian(2).unwrap(), 5)) {
            prop_assert_eq!(gr_mul(&a, &b).unwrap(), gr_mul(&b, &a).unwrap());
        }
    }
}
