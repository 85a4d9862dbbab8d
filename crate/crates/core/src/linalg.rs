//! Linear algebra over F2.
//!
//! Matrices travel as sets of nonzero positions and are packed into `u64`
//! words for elimination. Pivots are always taken on the lowest free column,
//! so every basis produced here is a function of the input alone.
//!
//! [`SparseEchelon`] and [`sparse_kernel`] cover the large, very sparse
//! systems met in tensor products and cotensor kernels, where a dense
//! matrix would not fit comfortably.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

const WORD: usize = 64;

fn words(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over F2, stored as its sorted support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct F2Vector {
    len: usize,
    support: Vec<usize>,
}

impl F2Vector {
    pub fn zero(len: usize) -> Self {
        F2Vector { len, support: Vec::new() }
    }

    /// Builds a vector from a set of positions. Repeated positions are kept once.
    pub fn from_support(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut support: Vec<usize> = positions.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        assert!(
            support.last().map_or(true, |&p| p < len),
            "position out of range for vector of length {len}"
        );
        F2Vector { len, support }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_support(len, [i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn get(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len);
        match self.support.binary_search(&i) {
            Ok(p) => {
                self.support.remove(p);
            }
            Err(p) => self.support.insert(p, i),
        }
    }

    pub fn add(&self, other: &F2Vector) -> F2Vector {
        assert_eq!(self.len, other.len);
        F2Vector { len: self.len, support: xor_sorted(&self.support, &other.support) }
    }

    fn to_bits(&self, width: usize) -> Vec<u64> {
        let mut bits = vec![0u64; words(width)];
        for &p in &self.support {
            bits[p / WORD] ^= 1 << (p % WORD);
        }
        bits
    }

    fn from_bits(len: usize, bits: &[u64]) -> Self {
        F2Vector { len, support: bit_positions(bits, len) }
    }
}

fn bit_positions(bits: &[u64], limit: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            let p = w * WORD + x.trailing_zeros() as usize;
            if p >= limit {
                return out;
            }
            out.push(p);
            x &= x - 1;
        }
    }
    out
}

/// Symmetric difference of two sorted, duplicate-free slices.
pub fn xor_sorted<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A matrix over F2 with bit-packed rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<u64>>,
}

impl F2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        F2Matrix { rows, cols, data: vec![vec![0; words(cols)]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from the set of positions holding 1. Repeats are kept once.
    pub fn from_entries(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::zero(rows, cols);
        for (r, c) in entries {
            m.set(r, c, true);
        }
        m
    }

    /// Builds a matrix whose `j`th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[F2Vector]) -> Self {
        let mut m = Self::zero(rows, columns.len());
        for (c, v) in columns.iter().enumerate() {
            assert_eq!(v.len(), rows);
            for &r in v.support() {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.data[r][c / WORD] >> (c % WORD) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "entry ({r}, {c}) outside {}x{}", self.rows, self.cols);
        let mask = 1u64 << (c % WORD);
        if value {
            self.data[r][c / WORD] |= mask;
        } else {
            self.data[r][c / WORD] &= !mask;
        }
    }

    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            out.extend(bit_positions(row, self.cols).into_iter().map(|c| (r, c)));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|row| row.iter().all(|&w| w == 0))
    }

    pub fn row(&self, r: usize) -> F2Vector {
        F2Vector::from_bits(self.cols, &self.data[r])
    }

    pub fn column(&self, c: usize) -> F2Vector {
        F2Vector::from_support(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn mul_vec(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.cols);
        let bits = v.to_bits(self.cols);
        let support = (0..self.rows).filter(|&r| {
            self.data[r].iter().zip(&bits).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
        });
        F2Vector::from_support(self.rows, support)
    }

    /// The product `self * other`.
    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = F2Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in bit_positions(&self.data[r], self.cols) {
                for (o, x) in out.data[r].iter_mut().zip(&other.data[k]) {
                    *o ^= x;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> F2Matrix {
        F2Matrix::from_entries(self.cols, self.rows, self.entries().into_iter().map(|(r, c)| (c, r)))
    }
}

/// Reduced row echelon form: pivot rows and their pivot columns, in increasing column order.
struct Echelon {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

fn reduce_rows(mut data: Vec<Vec<u64>>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let (w, mask) = (c / WORD, 1u64 << (c % WORD));
        let Some(found) = (rank..data.len()).find(|&r| data[r][w] & mask != 0) else {
            continue;
        };
        data.swap(rank, found);
        let pivot_row = data[rank].clone();
        for (r, row) in data.iter_mut().enumerate() {
            if r != rank && row[w] & mask != 0 {
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(w) {
                    *x ^= p;
                }
            }
        }
        pivots.push(c);
        rank += 1;
        if rank == data.len() {
            break;
        }
    }
    data.truncate(rank);
    Echelon { rows: data, pivots }
}

/// Rank over F2.
pub fn f2_rank(m: &F2Matrix) -> usize {
    reduce_rows(m.data.clone(), m.cols).pivots.len()
}

/// A basis of the null space, one vector per free column in increasing order.
/// Each vector has a 1 in its free column and zeros in the other free columns.
pub fn f2_kernel_basis(m: &F2Matrix) -> Vec<F2Vector> {
    let ech = reduce_rows(m.data.clone(), m.cols);
    let mut is_pivot = vec![false; m.cols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let (w, mask) = (f / WORD, 1u64 << (f % WORD));
            let mut support = vec![f];
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if row[w] & mask != 0 {
                    support.push(p);
                }
            }
            F2Vector::from_support(m.cols, support)
        })
        .collect()
}

/// Some `x` with `m x = b`, free variables set to zero; `None` when inconsistent.
pub fn f2_solve(m: &F2Matrix, b: &F2Vector) -> Option<F2Vector> {
    assert_eq!(b.len(), m.rows, "right-hand side has the wrong length");
    let width = m.cols + 1;
    let data = (0..m.rows)
        .map(|r| {
            let mut row = vec![0u64; words(width)];
            row[..m.data[r].len()].copy_from_slice(&m.data[r]);
            if b.get(r) {
                row[m.cols / WORD] |= 1 << (m.cols % WORD);
            }
            row
        })
        .collect();
    let ech = reduce_rows(data, width);
    if ech.pivots.last() == Some(&m.cols) {
        return None;
    }
    let (w, mask) = (m.cols / WORD, 1u64 << (m.cols % WORD));
    let support = ech.rows.iter().zip(&ech.pivots).filter(|(row, _)| row[w] & mask != 0).map(|(_, &p)| p);
    Some(F2Vector::from_support(m.cols, support))
}

/// Row-reduces a list of vectors of a common length, returning a basis of
/// their span in reduced echelon form (ordered by pivot).
pub fn f2_row_basis(len: usize, vectors: &[F2Vector]) -> Vec<F2Vector> {
    let data = vectors.iter().map(|v| v.to_bits(len)).collect();
    reduce_rows(data, len).rows.iter().map(|r| F2Vector::from_bits(len, r)).collect()
}

/// Incremental echelon basis of sparse vectors, keyed by lowest index.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    rows: HashMap<u32, Vec<u32>>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, i: u32) -> bool {
        self.rows.contains_key(&i)
    }

    /// Adds a sorted vector to the span. Returns its new pivot, or `None` if it was dependent.
    pub fn insert(&mut self, mut v: Vec<u32>) -> Option<u32> {
        while let Some(&low) = v.first() {
            match self.rows.get(&low) {
                Some(row) => v = xor_sorted(&v, row),
                None => {
                    self.rows.insert(low, v);
                    return Some(low);
                }
            }
        }
        None
    }

    /// The unique representative of `v` modulo the span with no pivot entries.
    pub fn reduce(&self, mut v: Vec<u32>) -> Vec<u32> {
        let mut i = 0;
        while i < v.len() {
            match self.rows.get(&v[i]) {
                Some(row) => v = xor_sorted(&v, row),
                None => i += 1,
            }
        }
        v
    }
}

/// Column elimination over sparse vectors, remembering which input
/// columns each stored row is the sum of.
#[derive(Clone, Debug, Default)]
struct TrackedEchelon {
    pivots: HashMap<u32, (Vec<u32>, Vec<u32>)>,
}

impl TrackedEchelon {
    /// Reduces `v` (with combination `combo`) by the stored rows. Stores it
    /// and returns `None` if a new pivot appears; otherwise returns the
    /// combination of columns summing to zero.
    fn insert(&mut self, mut v: Vec<u32>, mut combo: Vec<u32>) -> Option<Vec<u32>> {
        while let Some(&low) = v.first() {
            match self.pivots.get(&low) {
                Some((row, c)) => {
                    v = xor_sorted(&v, row);
                    combo = xor_sorted(&combo, c);
                }
                None => {
                    self.pivots.insert(low, (v, combo));
                    return None;
                }
            }
        }
        Some(combo)
    }

    fn build(columns: &[Vec<u32>]) -> (Self, Vec<Vec<u32>>) {
        let mut e = TrackedEchelon::default();
        let mut dependencies = Vec::new();
        for (j, col) in columns.iter().enumerate() {
            if let Some(c) = e.insert(col.clone(), vec![j as u32]) {
                dependencies.push(c);
            }
        }
        (e, dependencies)
    }
}

/// Null space of the matrix whose columns are the given sorted sparse vectors.
/// Found by column elimination with tracked combinations; the result is then
/// put in reduced echelon form so it does not depend on the elimination path.
pub fn sparse_kernel(columns: &[Vec<u32>]) -> Vec<F2Vector> {
    let n = columns.len();
    let (_, deps) = TrackedEchelon::build(columns);
    let kernel: Vec<F2Vector> = deps.into_iter().map(|c| F2Vector::from_support(n, c.into_iter().map(|x| x as usize))).collect();
    f2_row_basis(n, &kernel)
}

/// Rank of the matrix whose columns are the given sorted sparse vectors.
pub fn sparse_rank(columns: &[Vec<u32>]) -> usize {
    let mut e = SparseEchelon::new();
    columns.iter().filter(|c| e.insert((*c).clone()).is_some()).count()
}

/// Some set of columns summing to `target`, or `None` if `target` is not in
/// their span. Deterministic for identical input.
pub fn sparse_solve(columns: &[Vec<u32>], target: &[u32]) -> Option<Vec<u32>> {
    let (e, _) = TrackedEchelon::build(columns);
    let mut v = target.to_vec();
    let mut combo = Vec::new();
    while let Some(&low) = v.first() {
        let (row, c) = e.pivots.get(&low)?;
        v = xor_sorted(&v, row);
        combo = xor_sorted(&combo, c);
    }
    Some(combo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(r: usize, c: usize) -> F2Matrix {
        F2Matrix::from_entries(r, c, (0..r).flat_map(|i| (0..c).map(move |j| (i, j))))
    }

    #[test]
    fn rank_examples() {
        assert_eq!(f2_rank(&F2Matrix::identity(3)), 3);
        assert_eq!(f2_rank(&ones(2, 2)), 1);
        assert_eq!(f2_rank(&F2Matrix::zero(0, 5)), 0);
    }

    #[test]
    fn kernel_examples() {
        assert!(f2_kernel_basis(&F2Matrix::identity(4)).is_empty());
        assert_eq!(
            f2_kernel_basis(&F2Matrix::zero(2, 2)),
            vec![F2Vector::unit(2, 0), F2Vector::unit(2, 1)]
        );
        assert_eq!(f2_kernel_basis(&ones(1, 2)), vec![F2Vector::from_support(2, [0, 1])]);
    }

    #[test]
    fn solve_examples() {
        let b = F2Vector::from_support(3, [0, 2]);
        assert_eq!(f2_solve(&F2Matrix::identity(3), &b), Some(b.clone()));
        assert_eq!(f2_solve(&F2Matrix::zero(3, 3), &b), None);
        assert_eq!(f2_solve(&ones(1, 2), &F2Vector::unit(1, 0)), Some(F2Vector::unit(2, 0)));
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let mut m = F2Matrix::zero(3, 130);
        m.set(0, 0, true);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(2, 64, true);
        assert_eq!(f2_rank(&m), 2);
        let k = f2_kernel_basis(&m);
        assert_eq!(k.len(), 128);
        assert!(k.iter().all(|v| m.mul_vec(v).is_zero()));
    }

    #[test]
    fn sparse_echelon_reduces_to_canonical_remainder() {
        let mut e = SparseEchelon::new();
        assert_eq!(e.insert(vec![0, 2]), Some(0));
        assert_eq!(e.insert(vec![2, 3]), Some(2));
        assert_eq!(e.insert(vec![0, 3]), None);
        assert_eq!(e.reduce(vec![0, 1]), vec![1, 3]);
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn sparse_kernel_agrees_with_dense() {
        let cols = vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![], vec![3]];
        let m = F2Matrix::from_columns(
            4,
            &cols.iter().map(|c| F2Vector::from_support(4, c.iter().map(|&x| x as usize))).collect::<Vec<_>>(),
        );
        assert_eq!(sparse_kernel(&cols), f2_row_basis(5, &f2_kernel_basis(&m)));
        assert_eq!(sparse_rank(&cols), 3);
    }

    #[test]
    fn sparse_solve_examples() {
        let cols = vec![vec![0, 1], vec![1, 2], vec![3]];
        assert_eq!(sparse_solve(&cols, &[0, 2, 3]), Some(vec![0, 1, 2]));
        assert_eq!(sparse_solve(&cols, &[]), Some(vec![]));
        assert_eq!(sparse_solve(&cols, &[0]), None);
        assert_eq!(sparse_solve(&[], &[4]), None);
    }
}
