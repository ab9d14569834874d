//! Bit-packed matrices over GF(2), 64 columns per word.

use super::FFMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn from_ff(m: &FFMatrix) -> Self {
        assert_eq!(m.p(), 2, "bit-packed matrices are over GF(2)");
        let mut b = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0 {
                    b.set(i, j);
                }
            }
        }
        b
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.data.swap(a * self.words + w, b * self.words + w);
            }
        }
    }

    fn xor_into(&mut self, dst: usize, src: usize, from_word: usize) {
        for w in from_word..self.words {
            let s = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= s;
        }
    }

    /// Gauss-Jordan elimination; returns pivot columns (pivot rows lead).
    fn rref(&mut self, full: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(piv, r);
            let start = if full { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_into(i, r, c / 64);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref(false).len()
    }

    /// Same layout as [`FFMatrix::kernel_basis`]: one 0/1 vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref(true);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u64; self.cols];
                v[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(i, free) as u64;
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::PrimeField;
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn agrees_with_dense_path(r in 1usize..80, c in 1usize..150, seed in any::<u64>()) {
            let f = PrimeField::new(2).unwrap();
            let mut state = seed | 1;
            let data: Vec<u64> = (0..r * c).map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state & 1
            }).collect();
            let m = FFMatrix::from_data(f, r, c, data).unwrap();
            prop_assert_eq!(BitMatrix::from_ff(&m).rank(), m.rank_dense());
            prop_assert_eq!(BitMatrix::from_ff(&m).kernel_basis(), m.kernel_basis_dense());
        }
    }
}
