//! Exact linear algebra over prime fields `GF(p)`.
//!
//! Matrices are dense and row-major with entries stored reduced in `[0, p)`.
//! Elimination uses first-nonzero pivoting. When `p = 2`, rank and kernel
//! computations are routed to the bit-packed implementation in [`gf2`].

pub mod ext;
pub mod gf2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for &a in &BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 61;

const SMALL: u64 = 1 << 16;
const MEDIUM: u64 = 1 << 32;

/// The prime field `GF(p)`; elements are plain `u64` values in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
    // floor(2^32 / p), used for the small-modulus Barrett reduction.
    barrett: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::OutOfRange(format!("modulus {p} exceeds 2^61")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p, barrett: (1u64 << 32) / p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p < MEDIUM {
            (a * b) % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero in GF({})", self.p);
        self.pow(a, self.p - 2)
    }

    // x < 2^32, p < 2^16: q = floor(x * floor(2^32/p) / 2^32) is off by at most one.
    #[inline(always)]
    fn reduce_small(&self, x: u64) -> u64 {
        let q = (x * self.barrett) >> 32;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    /// `dst -= c * src`, elementwise.
    pub fn sub_mul_row(&self, dst: &mut [u64], src: &[u64], c: u64) {
        if c == 0 {
            return;
        }
        let nc = self.p - c;
        if self.p < SMALL {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = self.reduce_small(*d + nc * s);
            }
        } else if self.p < MEDIUM {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = (*d + nc * s) % self.p;
            }
        } else {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = ((*d as u128 + nc as u128 * s as u128) % self.p as u128) as u64;
            }
        }
    }

    pub fn scale_row(&self, row: &mut [u64], c: u64) {
        for x in row.iter_mut() {
            *x = self.mul(*x, c);
        }
    }

    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        if self.p < SMALL {
            // Each product is below 2^32, so 2^31 of them fit in a u64.
            let mut acc = 0u64;
            for chunk in a.chunks(1 << 30).zip(b.chunks(1 << 30)) {
                let s: u64 = chunk.0.iter().zip(chunk.1).map(|(x, y)| x * y).sum();
                acc = (acc + s % self.p) % self.p;
            }
            acc
        } else {
            let p = self.p as u128;
            let mut acc = 0u128;
            for (x, y) in a.iter().zip(b) {
                acc = (acc + *x as u128 * *y as u128) % p;
            }
            acc as u64
        }
    }
}

/// Dense row-major matrix over `GF(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FFMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FFMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry mod `p`.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| field.from_i64(x)).collect();
        Ok(Self { field, rows: rows.len(), cols, data })
    }

    /// Takes ownership of already-reduced row-major data.
    pub fn from_data(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|&x| x >= field.p) {
            return Err(Error::OutOfRange(format!("entry not reduced mod {}", field.p)));
        }
        Ok(Self { field, rows, cols, data })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = self.field.reduce(v);
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: u64) {
        let idx = i * self.cols + j;
        self.data[idx] = self.field.add(self.data[idx], self.field.reduce(v));
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Submatrix made of the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    pub fn vstack(blocks: &[FFMatrix]) -> Result<Self> {
        let first = blocks.first().ok_or(Error::EmptySet("blocks"))?;
        let mut data = Vec::new();
        for b in blocks {
            if b.cols != first.cols || b.field != first.field {
                return Err(Error::Dimension("vstack needs equal column counts and fields".into()));
            }
            data.extend_from_slice(&b.data);
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        Ok(Self { field: first.field, rows, cols: first.cols, data })
    }

    pub fn mul(&self, other: &FFMatrix) -> Result<FFMatrix> {
        if self.cols != other.rows || self.field != other.field {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_transposed(&other.transpose()))
    }

    /// `self * other^T`, where both operands share their column count.
    pub fn mul_transposed(&self, other: &FFMatrix) -> FFMatrix {
        assert_eq!(self.cols, other.cols);
        let mut out = Self::zeros(self.field, self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = self.field.dot(a, other.row(j));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect())
    }

    /// Gauss-Jordan elimination restricted to the first `pivot_cols` columns.
    /// Returns the pivot columns; the pivot rows are the leading rows.
    fn rref(&mut self, pivot_cols: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    self.data.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            f.scale_row(&mut self.data[r * cols + c..(r + 1) * cols], inv);
            let (head, tail) = self.data.split_at_mut(r * cols);
            let (prow, rest) = tail.split_at_mut(cols);
            let src = &prow[c..];
            for row in head.chunks_exact_mut(cols).chain(rest.chunks_exact_mut(cols)) {
                let coef = row[c];
                f.sub_mul_row(&mut row[c..], src, coef);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Forward elimination only; enough to read off the rank.
    fn echelon_rank(&mut self) -> usize {
        let f = self.field;
        let cols = self.cols;
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if piv != r {
                for j in c..cols {
                    self.data.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            f.scale_row(&mut self.data[r * cols + c..(r + 1) * cols], inv);
            let (head, tail) = self.data.split_at_mut((r + 1) * cols);
            let src = &head[r * cols + c..];
            for row in tail.chunks_exact_mut(cols) {
                let coef = row[c];
                f.sub_mul_row(&mut row[c..], src, coef);
            }
            r += 1;
        }
        r
    }

    pub fn rank(&self) -> usize {
        if self.field.p == 2 {
            return gf2::BitMatrix::from_ff(self).rank();
        }
        self.rank_dense()
    }

    /// Rank through the generic dense path, whatever the modulus.
    pub fn rank_dense(&self) -> usize {
        self.clone().echelon_rank()
    }

    /// Basis of `{v : M v = 0}`: one vector per free column, with a 1 in
    /// that column, ordered by free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        if self.field.p == 2 {
            return gf2::BitMatrix::from_ff(self).kernel_basis();
        }
        self.kernel_basis_dense()
    }

    pub fn kernel_basis_dense(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref(self.cols);
        kernel_from_rref(&m, &pivots)
    }

    /// Same result as [`FFMatrix::kernel_basis`], tuned for tall sparse
    /// systems: rows enter an incremental echelon form sparsest first and the
    /// sweep stops once the rank reaches the column count.
    pub fn kernel_basis_tall(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let n = self.cols;
        let mut order: Vec<(usize, usize)> =
            (0..self.rows).map(|i| (self.row(i).iter().filter(|&&x| x != 0).count(), i)).collect();
        order.sort_unstable();
        // Basis rows have a leading 1 at their pivot column; `end` bounds their support.
        let mut pivot_of: Vec<Option<usize>> = vec![None; n];
        let mut basis: Vec<(Vec<u64>, usize)> = Vec::new();
        let mut v = vec![0u64; n];
        for &(nnz, i) in &order {
            if nnz == 0 {
                continue;
            }
            if basis.len() == n {
                return Vec::new();
            }
            v.copy_from_slice(self.row(i));
            let mut lead = None;
            for c in 0..n {
                if v[c] == 0 {
                    continue;
                }
                match pivot_of[c] {
                    Some(b) => {
                        let (row, end) = &basis[b];
                        let coef = v[c];
                        f.sub_mul_row(&mut v[c..*end], &row[c..*end], coef);
                    }
                    None => {
                        if lead.is_none() {
                            lead = Some(c);
                        }
                    }
                }
            }
            if let Some(c) = lead {
                let inv = f.inv(v[c]);
                f.scale_row(&mut v[c..], inv);
                let end = v.iter().rposition(|&x| x != 0).map_or(0, |e| e + 1);
                pivot_of[c] = Some(basis.len());
                basis.push((v.clone(), end));
            }
        }
        if basis.len() == n {
            return Vec::new();
        }
        let rows: Vec<Vec<u64>> = basis.into_iter().map(|(r, _)| r).collect();
        FFMatrix::from_vectors(f, n, &rows).kernel_basis()
    }

    /// Basis of `{y : y^T M = 0}`.
    pub fn left_kernel_basis(&self) -> Vec<Vec<u64>> {
        self.transpose().kernel_basis()
    }

    /// Some `v` with `M v = rhs`, or `None` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, rhs: &[u64]) -> Result<Option<Vec<u64>>> {
        if rhs.len() != self.rows {
            return Err(Error::Dimension(format!("rhs of length {} for {} rows", rhs.len(), self.rows)));
        }
        let mut aug = Self::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
            aug.row_mut(i)[self.cols] = self.field.reduce(rhs[i]);
        }
        let pivots = aug.rref(self.cols);
        if (pivots.len()..self.rows).any(|i| aug.get(i, self.cols) != 0) {
            return Ok(None);
        }
        let mut v = vec![0; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = aug.get(i, self.cols);
        }
        Ok(Some(v))
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_vectors(field: PrimeField, cols: usize, vecs: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(vecs.len() * cols);
        for v in vecs {
            debug_assert_eq!(v.len(), cols);
            data.extend_from_slice(v);
        }
        Self { field, rows: vecs.len(), cols, data }
    }
}

fn kernel_from_rref(m: &FFMatrix, pivots: &[usize]) -> Vec<Vec<u64>> {
    let f = m.field;
    let mut is_pivot = vec![false; m.cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; m.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(i, free));
            }
            v
        })
        .collect()
}

pub fn rank(m: &FFMatrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &FFMatrix) -> Vec<Vec<u64>> {
    m.kernel_basis()
}

pub fn solve(m: &FFMatrix, rhs: &[u64]) -> Result<Option<Vec<u64>>> {
    m.solve(rhs)
}

/// Restricts a kernel basis (rows of `basis`) by one more block: returns a
/// basis of `{v in span(basis) : B v = 0}`.
pub fn restrict_kernel(basis: &FFMatrix, block: &FFMatrix) -> FFMatrix {
    let field = basis.field;
    if basis.rows == 0 {
        return basis.clone();
    }
    // Coordinates y with B (K^T y) = 0, then map back through K.
    let image = block.mul_transposed(basis);
    let coords = image.kernel_basis();
    let mut out = FFMatrix::zeros(field, coords.len(), basis.cols);
    for (r, y) in coords.iter().enumerate() {
        let row = out.row_mut(r);
        for (k, &yk) in y.iter().enumerate() {
            if yk != 0 {
                let neg = field.neg(yk);
                field.sub_mul_row(row, basis.row(k), neg);
            }
        }
    }
    out
}

/// Basis of the intersection of the kernels of `blocks`, processed in order
/// of increasing kernel dimension and stopping as soon as it reaches zero.
/// Spans the same space as the kernel of the vertically stacked blocks.
pub fn intersect_kernels(blocks: &[FFMatrix]) -> Result<Vec<Vec<u64>>> {
    let first = blocks.first().ok_or(Error::EmptySet("blocks"))?;
    if blocks.iter().any(|b| b.cols != first.cols || b.field != first.field) {
        return Err(Error::Dimension("kernel blocks need equal column counts and fields".into()));
    }
    let mut order: Vec<(usize, usize)> = blocks.iter().enumerate().map(|(i, b)| (b.cols - b.rank(), i)).collect();
    order.sort();
    let (_, start) = order[0];
    let mut basis = FFMatrix::from_vectors(first.field, first.cols, &blocks[start].kernel_basis());
    for &(_, i) in &order[1..] {
        if basis.rows == 0 {
            break;
        }
        basis = restrict_kernel(&basis, &blocks[i]);
    }
    Ok((0..basis.rows).map(|i| basis.row(i).to_vec()).collect())
}

/// Sparse-triplet interchange form of a matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, u64)>,
}

impl From<&FFMatrix> for MatrixFile {
    fn from(m: &FFMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.rows {
            for j in 0..m.cols {
                let v = m.get(i, j);
                if v != 0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self { p: m.p(), rows: m.rows, cols: m.cols, triplets }
    }
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<FFMatrix> {
        let field = PrimeField::new(self.p)?;
        let mut m = FFMatrix::zeros(field, self.rows, self.cols);
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &self.triplets {
            if i >= self.rows || j >= self.cols {
                return Err(Error::Decode(format!("triplet ({i},{j}) outside a {}x{} matrix", self.rows, self.cols)));
            }
            if v == 0 || v >= self.p {
                return Err(Error::Decode(format!("triplet ({i},{j}) value {v} is not a nonzero residue mod {}", self.p)));
            }
            if last.is_some_and(|l| l >= (i, j)) {
                return Err(Error::Decode(format!("triplet ({i},{j}) out of row-major order")));
            }
            last = Some((i, j));
            m.data[i * self.cols + j] = v;
        }
        Ok(m)
    }
}
