//! Bit-packed vectors and matrices over GF(2).

use std::fmt;

const WORD_BITS: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Fixed-length bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
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

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn or_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Weight of `self ^ other` without allocating.
    pub fn xor_weight(&self, other: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut out = BitVec::zeros(end - start);
        for i in self.iter_ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { cols, rows: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(k: usize) -> Self {
        Self { cols: k, rows: (0..k).map(|i| BitVec::unit(k, i)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        Self { cols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                out.rows[c].set(r, true);
            }
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.nrows(), "inner dimension mismatch");
        let rows = self.rows.iter().map(|r| other.left_mul(r)).collect();
        Gf2Matrix { cols: other.cols, rows }
    }

    /// Row vector product `v · self`.
    pub fn left_mul(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows.len(), "vector length mismatch");
        let mut out = BitVec::zeros(self.cols);
        for i in v.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    pub fn hstack(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.rows.len(), other.rows.len(), "row count mismatch");
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.concat(b)).collect();
        Gf2Matrix { cols: self.cols + other.cols, rows }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Gf2Matrix {
        Gf2Matrix { cols: self.cols, rows: idx.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Gf2Matrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        (Gf2Matrix { cols: self.cols, rows }, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut basis: Vec<(usize, BitVec)> = Vec::new();
        for row in &self.rows {
            let mut v = row.clone();
            for (p, b) in &basis {
                if v.get(*p) {
                    v.xor_assign(b);
                }
            }
            if let Some(p) = v.first_one() {
                basis.push((p, v));
            }
        }
        basis.len()
    }

    /// Basis (as rows) of the right nullspace `{v : self · vᵀ = 0}`.
    pub fn nullspace(&self) -> Gf2Matrix {
        let (rref, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.cols, f);
            for (r, &p) in pivots.iter().enumerate() {
                if rref.rows[r].get(f) {
                    v.set(p, true);
                }
            }
            out.push(v);
        }
        Gf2Matrix { cols: self.cols, rows: out }
    }

    /// Basis (as rows) of the left nullspace `{v : v · self = 0}`.
    pub fn left_nullspace(&self) -> Gf2Matrix {
        self.transpose().nullspace()
    }

    /// Some `x` with `x · self = target`, if one exists.
    pub fn solve_left(&self, target: &BitVec) -> Option<BitVec> {
        assert_eq!(target.len(), self.cols, "target length mismatch");
        let n = self.rows.len();
        let mut basis: Vec<(usize, BitVec, BitVec)> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut v = row.clone();
            let mut combo = BitVec::unit(n, i);
            for (p, b, c) in &basis {
                if v.get(*p) {
                    v.xor_assign(b);
                    combo.xor_assign(c);
                }
            }
            if let Some(p) = v.first_one() {
                basis.push((p, v, combo));
            }
        }
        let mut t = target.clone();
        let mut x = BitVec::zeros(n);
        for (p, b, c) in &basis {
            if t.get(*p) {
                t.xor_assign(b);
                x.xor_assign(c);
            }
        }
        t.is_zero().then_some(x)
    }

    /// Reduced column echelon form: rows are scanned in order and each new pivot
    /// row becomes a unit vector. Every column operation is replayed on `companion`.
    pub fn col_echelon(&self, companion: &BitVec) -> (Gf2Matrix, BitVec) {
        assert_eq!(companion.len(), self.cols, "companion length mismatch");
        let mut cols = self.transpose().rows;
        let mut q = companion.clone();
        let mut used = vec![false; self.cols];
        for r in 0..self.rows.len() {
            let Some(p) = (0..self.cols).find(|&c| !used[c] && cols[c].get(r)) else {
                continue;
            };
            used[p] = true;
            let pivot = cols[p].clone();
            let qp = q.get(p);
            for c in 0..self.cols {
                if c != p && cols[c].get(r) {
                    cols[c].xor_assign(&pivot);
                    if qp {
                        q.flip(c);
                    }
                }
            }
        }
        let m = Gf2Matrix { cols: self.rows.len(), rows: cols }.transpose();
        (m, q)
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Gf2Matrix {
        let rows = (0..r)
            .map(|_| BitVec::from_bools(&(0..c).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>()))
            .collect();
        Gf2Matrix::from_rows(c, rows)
    }

    fn naive_rank(m: &Gf2Matrix) -> usize {
        let mut a: Vec<Vec<bool>> = m.rows().iter().map(|r| r.to_bools()).collect();
        let (nr, nc) = (m.nrows(), m.ncols());
        let mut rank = 0;
        for c in 0..nc {
            if let Some(p) = (rank..nr).find(|&i| a[i][c]) {
                a.swap(rank, p);
                for i in 0..nr {
                    if i != rank && a[i][c] {
                        for j in 0..nc {
                            let v = a[rank][j];
                            a[i][j] ^= v;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn identity_and_zero() {
        let id = Gf2Matrix::identity(5);
        assert_eq!(id.rank(), 5);
        assert_eq!(id.nullspace().nrows(), 0);
        let z = Gf2Matrix::zeros(3, 7);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.nullspace().nrows(), 7);
    }

    #[test]
    fn rank_matches_naive_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 20, 30);
            assert_eq!(m.rank(), naive_rank(&m));
            assert_eq!(m.transpose().rank(), m.rank());
        }
    }

    #[test]
    fn nullspaces_are_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let m = random_matrix(&mut rng, 9, 14);
            let ns = m.nullspace();
            assert_eq!(ns.nrows() + m.rank(), 14);
            for v in ns.rows() {
                assert!(m.rows().iter().all(|r| !r.dot(v)));
            }
            let lns = m.left_nullspace();
            assert_eq!(lns.nrows() + m.rank(), 9);
            for v in lns.rows() {
                assert!(m.left_mul(v).is_zero());
            }
        }
    }

    #[test]
    fn solve_left_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let m = random_matrix(&mut rng, 6, 12);
            let x = BitVec::from_bools(&(0..6).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
            let t = m.left_mul(&x);
            let sol = m.solve_left(&t).expect("target is in the row space");
            assert_eq!(m.left_mul(&sol), t);
        }
        let m = Gf2Matrix::from_rows(2, vec![BitVec::from_bools(&[true, false])]);
        assert!(m.solve_left(&BitVec::from_bools(&[false, true])).is_none());
    }

    #[test]
    fn col_echelon_preserves_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..30 {
            let m = random_matrix(&mut rng, 10, 7);
            let x = BitVec::from_bools(&(0..10).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
            let q = m.left_mul(&x);
            let (e, qe) = m.col_echelon(&q);
            assert_eq!(e.left_mul(&x), qe);
            assert_eq!(e.rank(), m.rank());
            let pivots = e.rows().iter().filter(|r| r.weight() == 1).count();
            assert!(pivots >= e.rank());
        }
    }

    #[test]
    fn iter_ones_crosses_words() {
        let v = BitVec::from_indices(130, [0, 63, 64, 129]);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.weight(), 4);
        assert_eq!(v.slice(60, 70), BitVec::from_indices(10, [3, 4]));
    }
}
