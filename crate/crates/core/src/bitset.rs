//! Fixed-width bit sets used for incidence rows, columns and concept extents.

use std::fmt;

const WORD: usize = 64;

/// A set of indices in `0..len`, packed into 64-bit words.
///
/// Bits above `len` in the last word are always zero, so word-wise
/// equality and hashing agree with set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut set = BitSet {
            len,
            words: vec![!0; len.div_ceil(WORD)],
        };
        set.trim();
        set
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = BitSet::new(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Width of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &BitSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn union_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Compare as sorted index sequences (lexicographic on element lists).
    pub fn cmp_lex(&self, other: &BitSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }

    /// Whether `self` and `other` agree on every index below `i`.
    pub fn agrees_below(&self, other: &BitSet, i: usize) -> bool {
        let full = i / WORD;
        if self.words[..full] != other.words[..full] {
            return false;
        }
        let rem = i % WORD;
        if rem == 0 {
            return true;
        }
        let mask = (1u64 << rem) - 1;
        (self.words[full] ^ other.words[full]) & mask == 0
    }

    /// Restrict to the given indices, renumbered in the order provided.
    pub fn project(&self, keep: &[usize]) -> BitSet {
        BitSet::from_indices(
            keep.len(),
            keep.iter()
                .enumerate()
                .filter(|(_, &old)| self.contains(old))
                .map(|(new, _)| new),
        )
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// Row-major boolean matrix with one [`BitSet`] per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitSet>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitSet::new(cols); rows],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitSet>) -> Self {
        debug_assert!(rows.iter().all(|r| r.universe() == cols));
        BitMatrix { cols, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].contains(c)
    }

    pub fn set(&mut self, r: usize, c: usize) {
        self.rows[r].insert(c);
    }

    pub fn row(&self, r: usize) -> &BitSet {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut BitSet {
        &mut self.rows[r]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::new(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter() {
                out.set(c, r);
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }

    /// Boolean product `self ∘ other`.
    pub fn compose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.n_rows());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitSet::new(other.cols);
                for k in row.iter() {
                    acc.union_with(other.row(k));
                }
                acc
            })
            .collect();
        BitMatrix::from_rows(other.cols, rows)
    }

    /// Reflexive-transitive closure of a square relation.
    pub fn reflexive_transitive_closure(&self) -> BitMatrix {
        assert_eq!(self.cols, self.rows.len());
        let mut out = self.clone();
        for i in 0..self.cols {
            out.set(i, i);
        }
        // Warshall, row-wise
        for k in 0..self.cols {
            let pivot = out.rows[k].clone();
            for r in 0..self.cols {
                if out.rows[r].contains(k) {
                    out.rows[r].union_with(&pivot);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_set_trims_tail() {
        let s = BitSet::full(70);
        assert_eq!(s.count(), 70);
        assert!(s.is_full());
        assert_eq!(s, BitSet::from_indices(70, 0..70));
    }

    #[test]
    fn iteration_crosses_words() {
        let s = BitSet::from_indices(200, [0, 63, 64, 127, 199]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 127, 199]);
    }

    #[test]
    fn agrees_below_respects_boundary() {
        let a = BitSet::from_indices(130, [1, 64, 129]);
        let b = BitSet::from_indices(130, [1, 64, 128]);
        assert!(a.agrees_below(&b, 128));
        assert!(!a.agrees_below(&b, 129));
    }

    #[test]
    fn closure_of_chain() {
        let mut m = BitMatrix::new(3, 3);
        m.set(0, 1);
        m.set(1, 2);
        let c = m.reflexive_transitive_closure();
        assert!(c.get(0, 2) && c.get(0, 0) && !c.get(2, 0));
    }

    #[test]
    fn empty_universe() {
        let s = BitSet::full(0);
        assert!(s.is_empty() && s.is_full());
        assert_eq!(s.iter().count(), 0);
    }
}
