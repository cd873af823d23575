//! Exact row reduction over the rationals.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::poly::Rational;

/// Sparse vector: column index to nonzero value.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Incremental echelon form. Each stored row has its pivot at its smallest
/// column with value 1, so a new row is reduced by sweeping its columns in
/// increasing order.
#[derive(Debug, Default, Clone)]
pub struct RowReducer {
    pivots: HashMap<usize, SparseVec>,
}

impl RowReducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots and returns the remainder.
    pub fn reduce(&self, mut row: SparseVec) -> SparseVec {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0usize;
        loop {
            let Some((c, v)) = row.range(cursor..).find(|(c, _)| self.pivots.contains_key(c)) else {
                return row;
            };
            let (c, f) = (*c, v.clone());
            for (k, pv) in &self.pivots[&c] {
                let e = row.entry(*k).or_insert_with(Rational::zero);
                *e -= &f * pv;
                if e.is_zero() {
                    row.remove(k);
                }
            }
            cursor = c + 1;
        }
    }

    /// Adds `row` if it is independent of the stored rows; returns whether it was.
    pub fn add_row(&mut self, row: SparseVec) -> bool {
        let row = self.reduce(row);
        self.insert_reduced(row)
    }

    fn insert_reduced(&mut self, mut row: SparseVec) -> bool {
        let Some((&c, v)) = row.iter().next() else {
            return false;
        };
        let inv = Rational::one() / v;
        for x in row.values_mut() {
            *x *= &inv;
        }
        self.pivots.insert(c, row);
        true
    }
}

/// Rank of a list of sparse rows.
pub fn rank(rows: &[SparseVec]) -> usize {
    let mut r = RowReducer::new();
    rows.iter().filter(|row| r.add_row((*row).clone())).count()
}

/// Basis of `{λ : Σ λ_j columns[j] = 0}`, in reduced row-echelon form.
pub fn kernel(columns: &[SparseVec]) -> Vec<Vec<Rational>> {
    const OFFSET: usize = usize::MAX / 2;
    let k = columns.len();
    let mut reducer = RowReducer::new();
    let mut null = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        debug_assert!(col.keys().all(|&c| c < OFFSET));
        let mut row = col.clone();
        row.insert(OFFSET + j, Rational::one());
        let row = reducer.reduce(row);
        if row.keys().next().is_some_and(|&c| c >= OFFSET) {
            let mut v = vec![Rational::zero(); k];
            for (c, x) in row {
                v[c - OFFSET] = x;
            }
            null.push(v);
        } else {
            reducer.insert_reduced(row);
        }
    }
    rref(null)
}

/// Reduced row-echelon form with zero rows removed; pivots are 1.
pub fn rref(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// Maps arbitrary hashable keys to dense column indices in first-seen order.
#[derive(Debug, Clone)]
pub struct Indexer<K> {
    map: HashMap<K, usize>,
}

impl<K> Default for Indexer<K> {
    fn default() -> Self {
        Indexer { map: HashMap::new() }
    }
}

impl<K: std::hash::Hash + Eq> Indexer<K> {
    pub fn index(&mut self, k: K) -> usize {
        let next = self.map.len();
        *self.map.entry(k).or_insert(next)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
