//! Dense linear algebra over GF(2): rank, left null spaces, particular
//! solutions and a greedy support reduction for null-space bases.

use std::fmt;

/// Fixed-length bit vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the bitwise product, i.e. the GF(2) dot product.
    pub fn dot(&self, other: &BitVec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank(rows: &[BitVec]) -> usize {
    let mut m: Vec<BitVec> = rows.to_vec();
    let cols = m.first().map_or(0, BitVec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i].get(c)) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        r += 1;
    }
    r
}

/// Basis of `{ y : yᵀ M = 0 }` where `M` has the given rows. Each returned
/// vector has one bit per row of `M`.
pub fn left_null_space(rows: &[BitVec]) -> Vec<BitVec> {
    let m = rows.len();
    let cols = rows.first().map_or(0, BitVec::len);
    let mut aug: Vec<(BitVec, BitVec)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), BitVec::from_indices(m, [i])))
        .collect();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m).find(|&i| aug[i].0.get(c)) else {
            continue;
        };
        aug.swap(r, p);
        let (pivot_row, pivot_tag) = aug[r].clone();
        for (i, (row, tag)) in aug.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot_row);
                tag.xor_assign(&pivot_tag);
            }
        }
        r += 1;
    }
    aug.into_iter()
        .skip(r)
        .map(|(row, tag)| {
            debug_assert!(row.is_zero());
            tag
        })
        .collect()
}

/// Some `x` with `A x = b`, where `A` is given by its rows; `None` if inconsistent.
pub fn solve(rows: &[BitVec], b: &BitVec) -> Option<BitVec> {
    assert_eq!(rows.len(), b.len(), "right-hand side length must match row count");
    let cols = rows.first().map_or(0, BitVec::len);
    let mut aug: Vec<(BitVec, bool)> = rows
        .iter()
        .cloned()
        .zip(b.to_bools())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..aug.len()).find(|&i| aug[i].0.get(c)) else {
            continue;
        };
        aug.swap(r, p);
        let (pivot_row, pivot_rhs) = aug[r].clone();
        for (i, (row, rhs)) in aug.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot_row);
                *rhs ^= pivot_rhs;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|(_, rhs)| *rhs) {
        return None;
    }
    let mut x = BitVec::zeros(cols);
    for (i, &c) in pivots.iter().enumerate() {
        if aug[i].1 {
            x.set(c, true);
        }
    }
    Some(x)
}

/// Basis of the right null space `{ x : A x = 0 }`.
pub fn null_space(rows: &[BitVec]) -> Vec<BitVec> {
    let cols = rows.first().map_or(0, BitVec::len);
    left_null_space(&transpose(rows, cols))
}

/// Transpose of a matrix given by rows with `cols` columns.
pub fn transpose(rows: &[BitVec], cols: usize) -> Vec<BitVec> {
    (0..cols)
        .map(|c| BitVec::from_bools(&rows.iter().map(|r| r.get(c)).collect::<Vec<_>>()))
        .collect()
}

/// Repeatedly replaces basis vectors by their XOR with another basis vector
/// whenever that lowers the support size. The span is unchanged. The result
/// is sorted by (weight, bits) for determinism.
pub fn reduce_support(mut basis: Vec<BitVec>) -> Vec<BitVec> {
    loop {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let candidate = basis[i].xor(&basis[j]);
                if candidate.count_ones() < basis[i].count_ones() {
                    basis[i] = candidate;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| {
        a.count_ones()
            .cmp(&b.count_ones())
            .then_with(|| a.ones().cmp(&b.ones()))
    });
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bits: &str) -> BitVec {
        BitVec::from_bools(&bits.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    #[test]
    fn rank_of_identity_and_dependent_rows() {
        assert_eq!(rank(&[row("100"), row("010"), row("001")]), 3);
        assert_eq!(rank(&[row("110"), row("011"), row("101")]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn triangle_terms_cancel() {
        // s0s1 · s1s2 · s0s2 = 1
        let rows = [row("110"), row("011"), row("101")];
        let null = left_null_space(&rows);
        assert_eq!(null.len(), 1);
        assert_eq!(null[0].ones(), vec![0, 1, 2]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let rows = [row("110"), row("011")];
        let b = row("10");
        let x = solve(&rows, &b).unwrap();
        assert_eq!(rows.iter().map(|r| r.dot(&x)).collect::<Vec<_>>(), vec![true, false]);
        let rows = [row("11"), row("11")];
        assert!(solve(&rows, &row("10")).is_none());
    }

    #[test]
    fn null_space_is_annihilated() {
        let rows = [row("1110000"), row("0111100"), row("1011010")];
        let ns = null_space(&rows);
        assert_eq!(ns.len(), 7 - rank(&rows));
        for v in &ns {
            assert!(rows.iter().all(|r| !r.dot(v)));
        }
    }

    #[test]
    fn reduction_keeps_span_and_lowers_weight() {
        let basis = vec![row("111100"), row("111111")];
        let reduced = reduce_support(basis.clone());
        assert_eq!(rank(&reduced), 2);
        let mut all = basis;
        all.extend(reduced.iter().cloned());
        assert_eq!(rank(&all), 2);
        assert_eq!(reduced[0].count_ones(), 2);
    }
}
