//! Group rings, Ore solutions on free abelian groups, the Ore failure witness
//! of an automaton and restriction of scalars.

mod ring;

pub use ring::{gr_mat_apply, gr_mat_apply_right, gr_mul, parse_elem, GRElem, GRElemFile, GRMatrix};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::ca::LinearCA;
use crate::eden::{mep_search, MepPair};
use crate::error::{Error, Result};
use crate::ff::ext::{ExtField, ExtScalar};
use crate::ff::FFMatrix;
use crate::group::{ElementSet, GroupCtx};

/// Largest box `folner_set` will try, in elements.
pub const MAX_BOX: usize = 1 << 18;

/// The smallest box `{0..N-1}^rank` with `#(S' F) < ratio #F`, and its side `N`.
pub fn folner_set(ctx: &GroupCtx, s_prime: &ElementSet, ratio: &BigRational) -> Result<(ElementSet, usize)> {
    if !ctx.is_abelian() {
        return Err(Error::Precondition("Folner boxes are provided for free abelian groups only".into()));
    }
    if *ratio <= BigRational::one() {
        return Err(Error::OutOfRange(format!("ratio {ratio} must exceed 1")));
    }
    if s_prime.is_empty() {
        return Err(Error::EmptySet("S'"));
    }
    let rank = ctx.num_generators();
    for side in 1usize.. {
        let size = side.checked_pow(rank as u32).filter(|&s| s <= MAX_BOX);
        let Some(size) = size else {
            return Err(Error::CapExceeded(format!("Folner box exceeds {MAX_BOX} elements")));
        };
        let f = box_set(ctx, side)?;
        debug_assert_eq!(f.len(), size);
        let sf = ctx.set_product(s_prime, &f).len();
        if BigRational::from_integer(BigInt::from(sf)) < ratio * BigRational::from_integer(BigInt::from(size)) {
            return Ok((f, side));
        }
    }
    unreachable!()
}

fn box_set(ctx: &GroupCtx, side: usize) -> Result<ElementSet> {
    let rank = ctx.num_generators();
    let mut out = Vec::with_capacity(side.pow(rank as u32));
    let mut v = vec![0i64; rank];
    loop {
        out.push(ctx.word_from_vector(&v)?);
        let mut i = 0;
        loop {
            if i == rank {
                return Ok(out.into_iter().collect());
            }
            v[i] += 1;
            if (v[i] as usize) < side {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OreSolution {
    pub b: GRElem,
    pub t: GRElem,
    /// Side of the box the unknowns lived on; 0 for the closed-form cases.
    pub box_side: usize,
}

/// Finds `b`, `t != 0` with `a t = b s`, re-verified by convolution.
pub fn ore_solve(a: &GRElem, s: &GRElem) -> Result<OreSolution> {
    if a.ctx() != s.ctx() || a.field() != s.field() {
        return Err(Error::Mismatch("a and s live in different group rings".into()));
    }
    let ctx = a.ctx();
    let k = a.field();
    if !ctx.is_abelian() {
        return Err(Error::Precondition("ore_solve needs a free abelian group".into()));
    }
    if s.is_zero() {
        return Err(Error::Precondition("s must be nonzero".into()));
    }
    let one = GRElem::one(ctx, k);
    if a.is_zero() {
        return Ok(OreSolution { b: GRElem::zero(ctx, k), t: one, box_side: 0 });
    }
    if a == s {
        return Ok(OreSolution { b: one.clone(), t: one, box_side: 0 });
    }
    let s_prime = a.support().union(&s.support());
    let (_, mut side) = folner_set(ctx, &s_prime, &BigRational::from_integer(BigInt::from(2)))?;
    // A kernel vector with t = 0 would give b s = 0, impossible for b != 0 in
    // this domain; the retry only guards against that reasoning being wrong.
    for _ in 0..4 {
        let f = box_set(ctx, side)?;
        if let Some((b, t)) = solve_on_box(a, s, &f)? {
            if t.is_zero() || gr_mul(a, &t)? != gr_mul(&b, s)? {
                return Err(Error::Precondition("solver output failed re-verification".into()));
            }
            return Ok(OreSolution { b, t, box_side: side });
        }
        side += 1;
    }
    Err(Error::CapExceeded("no solution with t != 0 on the tried boxes".into()))
}

fn solve_on_box(a: &GRElem, s: &GRElem, f: &ElementSet) -> Result<Option<(GRElem, GRElem)>> {
    let ctx = a.ctx();
    let k = a.field();
    let d = k.degree();
    let base = k.base();
    let rows = ctx.set_product(&a.support().union(&s.support()), f);
    let nf = f.len();
    let mut m = FFMatrix::zeros(base, rows.len() * d, 2 * nf * d);
    let mut put = |g: &crate::group::Word, col_cell: usize, c: &ExtScalar, negate: bool| -> Result<()> {
        let gi = rows.index_of(g).ok_or_else(|| Error::Dimension("product outside S'F".into()))?;
        let block = k.regular_representation(c);
        for i in 0..d {
            for j in 0..d {
                let x = block.get(i, j);
                let x = if negate { base.neg(x) } else { x };
                m.add_at(gi * d + i, col_cell * d + j, x);
            }
        }
        Ok(())
    };
    // (a t)(h f) += a(h) t(f);  (b s)(f h) += b(f) s(h).
    for (fi, fw) in f.iter().enumerate() {
        for (h, c) in a.terms() {
            put(&ctx.mul(h, fw), fi, c, false)?;
        }
        for (h, c) in s.terms() {
            put(&ctx.mul(fw, h), nf + fi, c, true)?;
        }
    }
    let Some(v) = m.kernel_basis().into_iter().find(|v| v[..nf * d].iter().any(|&x| x != 0)) else {
        return Ok(None);
    };
    let elem = |offset: usize| {
        GRElem::from_terms(
            ctx,
            k,
            f.iter().enumerate().map(|(i, g)| (g.clone(), ExtScalar(v[offset + i * d..offset + (i + 1) * d].to_vec()))),
        )
    };
    Ok(Some((elem(nf * d), elem(0))))
}

/// The group-ring matrix of an automaton together with its zero rows and a
/// bounded injectivity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureWitness {
    pub matrix: GRMatrix,
    /// Zero-based indices of the identically zero rows.
    pub zero_rows: Vec<usize>,
    pub radius: usize,
    /// A kernel element supported in the ball of `radius`, if one exists.
    pub kernel: Option<MepPair>,
}

impl FailureWitness {
    /// A zero row together with no kernel in the searched ball.
    pub fn is_witness(&self) -> bool {
        !self.zero_rows.is_empty() && self.kernel.is_none()
    }
}

pub fn failure_witness(ca: &LinearCA, radius: usize) -> Result<FailureWitness> {
    let matrix = ca.to_groupring_matrix();
    let zero_rows = matrix.zero_rows();
    let kernel = mep_search(ca, radius)?;
    Ok(FailureWitness { matrix, zero_rows, radius, kernel })
}

/// Replaces every coefficient in `GF(p^d)` by its `d x d` regular
/// representation over `GF(p)`, entry by entry.
pub fn restrict_scalars(m: &GRMatrix) -> Result<GRMatrix> {
    let (Some(ctx), Some(k)) = (m.ctx(), m.field()) else {
        return Ok(m.clone());
    };
    let d = k.degree();
    if d == 1 {
        return Ok(m.clone());
    }
    let base = ExtField::new(k.p(), 1)?;
    let (rows, cols) = (m.rows() * d, m.cols() * d);
    let mut out = GRMatrix::zeros(ctx, &base, rows, cols);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let reps: Vec<_> = m.get(i, j).terms().map(|(g, c)| (g.clone(), k.regular_representation(c))).collect();
            for a in 0..d {
                for b in 0..d {
                    let terms = reps.iter().map(|(g, r)| (g.clone(), r.get(a, b)));
                    out.set(i * d + a, j * d + b, GRElem::from_prime_terms(ctx, &base, terms));
                }
            }
        }
    }
    Ok(out)
}

/// Splits each `GF(p^d) G` entry of a column into its `d` coordinate entries over `GF(p) G`.
pub fn expand_column(v: &[GRElem]) -> Result<Vec<GRElem>> {
    let mut out = Vec::new();
    for e in v {
        let k = e.field();
        let base = ExtField::new(k.p(), 1)?;
        for a in 0..k.degree() {
            out.push(GRElem::from_prime_terms(e.ctx(), &base, e.terms().map(|(g, c)| (g.clone(), c.0[a]))));
        }
    }
    Ok(out)
}
