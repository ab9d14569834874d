//! Small extension fields `GF(p^d)`, `d <= 4`, as `GF(p)[x] / (f)`.
//!
//! The modulus `f` for a given `(p, d)` is the first monic irreducible
//! polynomial of degree `d` when polynomials are ordered by their coefficient
//! vectors read from the top down (for `GF(4)` that is `x^2 + x + 1`, for
//! `GF(9)` it is `x^2 + 1`). Irreducibility is checked by trial division by
//! every monic polynomial of degree at most `d / 2`.

use super::{FFMatrix, PrimeField};
use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 4;

// Bound on the number of trial divisors examined when checking irreducibility.
const TRIAL_LIMIT: u64 = 1 << 22;

/// An element of `GF(p^d)`: `d` coefficients in the basis `1, w, ..., w^(d-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtScalar(pub Vec<u64>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtField {
    base: PrimeField,
    degree: usize,
    // Monic modulus, lowest coefficient first, length degree + 1.
    modulus: Vec<u64>,
}

impl ExtField {
    pub fn new(p: u64, degree: usize) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::Unsupported(format!("extension degree {degree} (supported: 1..={MAX_DEGREE})")));
        }
        if degree == 1 {
            return Ok(Self { base, degree, modulus: vec![0, 1] });
        }
        let space = p.checked_pow(degree as u32).ok_or_else(|| Error::Unsupported("field too large".into()))?;
        for code in 0..space {
            // Interpret `code` with its most significant digit as the x^(d-1) coefficient.
            let mut low = vec![0u64; degree];
            let mut c = code;
            for i in 0..degree {
                low[i] = c % p;
                c /= p;
            }
            let mut poly = low;
            poly.push(1);
            if is_irreducible(&base, &poly)? {
                return Ok(Self { base, degree, modulus: poly });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// Uses a caller-supplied monic modulus (lowest coefficient first).
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let degree = modulus.len().saturating_sub(1);
        if degree == 0 || degree > MAX_DEGREE || modulus[degree] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::Unsupported("modulus must be monic of degree 1..=4 with reduced coefficients".into()));
        }
        if !is_irreducible(&base, modulus)? {
            return Err(Error::Precondition("modulus is reducible".into()));
        }
        Ok(Self { base, degree, modulus: modulus.to_vec() })
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> ExtScalar {
        ExtScalar(vec![0; self.degree])
    }

    pub fn one(&self) -> ExtScalar {
        let mut v = vec![0; self.degree];
        v[0] = 1;
        ExtScalar(v)
    }

    /// The class of `x`, a generator of the extension over `GF(p)` (for `d > 1`).
    pub fn gen(&self) -> ExtScalar {
        let mut v = vec![0; self.degree];
        if self.degree > 1 {
            v[1] = 1;
        } else {
            v[0] = self.base.neg(self.modulus[0]);
        }
        ExtScalar(v)
    }

    pub fn from_base(&self, c: u64) -> ExtScalar {
        let mut v = vec![0; self.degree];
        v[0] = self.base.reduce(c);
        ExtScalar(v)
    }

    pub fn is_valid(&self, a: &ExtScalar) -> bool {
        a.0.len() == self.degree && a.0.iter().all(|&c| c < self.p())
    }

    pub fn is_zero(&self, a: &ExtScalar) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &ExtScalar, b: &ExtScalar) -> ExtScalar {
        ExtScalar(a.0.iter().zip(&b.0).map(|(&x, &y)| self.base.add(x, y)).collect())
    }

    pub fn sub(&self, a: &ExtScalar, b: &ExtScalar) -> ExtScalar {
        ExtScalar(a.0.iter().zip(&b.0).map(|(&x, &y)| self.base.sub(x, y)).collect())
    }

    pub fn neg(&self, a: &ExtScalar) -> ExtScalar {
        ExtScalar(a.0.iter().map(|&x| self.base.neg(x)).collect())
    }

    pub fn mul(&self, a: &ExtScalar, b: &ExtScalar) -> ExtScalar {
        let f = &self.base;
        let d = self.degree;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        // Reduce using x^d = -(m_0 + ... + m_{d-1} x^{d-1}).
        for k in (d..prod.len()).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                prod[k - d + i] = f.sub(prod[k - d + i], f.mul(top, self.modulus[i]));
            }
        }
        prod.truncate(d);
        ExtScalar(prod)
    }

    /// Matrix of `v -> a v` on `GF(p)^d` in the basis `1, w, ..., w^(d-1)`:
    /// column `j` holds the coordinates of `a w^j`.
    pub fn regular_representation(&self, a: &ExtScalar) -> FFMatrix {
        let d = self.degree;
        let mut m = FFMatrix::zeros(self.base, d, d);
        let mut basis = self.one();
        let w = if d > 1 { self.gen() } else { self.one() };
        for j in 0..d {
            let col = self.mul(a, &basis);
            for i in 0..d {
                m.set(i, j, col.0[i]);
            }
            basis = self.mul(&basis, &w);
        }
        m
    }
}

fn poly_rem(f: &PrimeField, num: &[u64], den: &[u64]) -> Vec<u64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let lead_inv = f.inv(den[dd]);
    while r.len() > dd {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if top != 0 {
            let c = f.mul(top, lead_inv);
            for (i, &x) in den.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, x));
            }
        }
        r.pop();
    }
    r
}

/// Exhaustive check: no monic divisor of degree `1..=deg/2`.
fn is_irreducible(f: &PrimeField, poly: &[u64]) -> Result<bool> {
    let deg = poly.len() - 1;
    let p = f.p();
    for k in 1..=deg / 2 {
        let count = p.checked_pow(k as u32).filter(|&c| c <= TRIAL_LIMIT).ok_or_else(|| {
            Error::Unsupported(format!("irreducibility check for p = {p}, degree {deg} is too large"))
        })?;
        for code in 0..count {
            let mut div = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                div.push(c % p);
                c /= p;
            }
            div.push(1);
            if poly_rem(f, poly, &div).iter().all(|&x| x == 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_moduli() {
        assert_eq!(ExtField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(ExtField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(ExtField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(ExtField::new(2, 4).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert!(ExtField::new(2, 5).is_err());
        assert!(ExtField::with_modulus(2, &[1, 0, 1]).is_err());
    }

    #[test]
    fn gf4_regular_representation_of_generator() {
        let k = ExtField::new(2, 2).unwrap();
        let w = k.gen();
        let m = k.regular_representation(&w);
        assert_eq!(m, FFMatrix::from_rows(PrimeField::new(2).unwrap(), &[vec![0, 1], vec![1, 1]]).unwrap());
        // w^2 = w + 1, w^3 = 1
        let w2 = k.mul(&w, &w);
        assert_eq!(w2, ExtScalar(vec![1, 1]));
        assert_eq!(k.mul(&w2, &w), k.one());
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_right_order() {
        for (p, d) in [(2u64, 3usize), (3, 2), (5, 2), (2, 4), (3, 3)] {
            let k = ExtField::new(p, d).unwrap();
            let q = p.pow(d as u32);
            // The generator's powers must not return to one before q - 1 steps
            // unless its order divides q - 1; in any case the order divides q - 1.
            let w = k.gen();
            let mut acc = k.one();
            for _ in 0..q - 1 {
                acc = k.mul(&acc, &w);
            }
            assert_eq!(acc, k.one(), "p={p} d={d}");
        }
    }

    #[test]
    fn regular_representation_is_multiplicative() {
        let k = ExtField::new(3, 2).unwrap();
        let elems: Vec<ExtScalar> = (0..9).map(|c| ExtScalar(vec![c % 3, c / 3])).collect();
        for a in &elems {
            for b in &elems {
                let lhs = k.regular_representation(&k.mul(a, b));
                let rhs = k.regular_representation(a).mul(&k.regular_representation(b)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
