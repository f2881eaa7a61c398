//! Linear algebra over GF(2): rank of sparse parity-check matrices and a
//! systematic encoder for codes with few checks.

use alloc::vec;
use alloc::vec::Vec;

/// Dense bit matrix, one `u64` word per 64 columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: Vec<Vec<u64>>,
    cols: usize,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        DenseMatrix {
            rows: vec![vec![0; words]; rows],
            cols,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / 64] >> (c % 64) & 1 == 1
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] ^= 1 << (c % 64);
    }

    /// Reduces to reduced row-echelon form in place and returns the pivot
    /// column of each nonzero row, in row order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows.len() {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(found) = (next..self.rows.len()).find(|&r| self.rows[r][w] & bit != 0) else {
                continue;
            };
            self.rows.swap(next, found);
            let pivot_row = core::mem::take(&mut self.rows[next]);
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != next && row[w] & bit != 0 {
                    // Words below w are zero in the pivot row.
                    for (x, y) in row[w..].iter_mut().zip(&pivot_row[w..]) {
                        *x ^= y;
                    }
                }
            }
            self.rows[next] = pivot_row;
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    /// Rank by forward elimination only.
    pub fn rank(mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows.len() {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(found) = (rank..self.rows.len()).find(|&r| self.rows[r][w] & bit != 0) else {
                continue;
            };
            self.rows.swap(rank, found);
            let (head, tail) = self.rows.split_at_mut(rank + 1);
            let pivot = &head[rank];
            for row in tail.iter_mut() {
                if row[w] & bit != 0 {
                    for (x, y) in row[w..].iter_mut().zip(&pivot[w..]) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of a sparse `m x n` matrix given as row supports.
///
/// Rows owning a column that no other remaining row touches are peeled off
/// first (each adds exactly one to the rank); the remaining core is
/// eliminated densely.
pub fn sparse_rank(n: usize, rows: &[&[u32]]) -> usize {
    let m = rows.len();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &c in row.iter() {
            col_rows[c as usize].push(r as u32);
        }
    }
    let mut weight: Vec<u32> = col_rows.iter().map(|v| v.len() as u32).collect();
    let mut alive = vec![true; m];
    let mut queue: Vec<u32> = (0..n as u32).filter(|&c| weight[c as usize] == 1).collect();
    let mut peeled = 0;
    while let Some(c) = queue.pop() {
        if weight[c as usize] != 1 {
            continue;
        }
        let Some(&r) = col_rows[c as usize].iter().find(|&&r| alive[r as usize]) else {
            continue;
        };
        alive[r as usize] = false;
        peeled += 1;
        for &c2 in rows[r as usize] {
            weight[c2 as usize] -= 1;
            if weight[c2 as usize] == 1 {
                queue.push(c2);
            }
        }
    }

    let core_rows: Vec<usize> = (0..m).filter(|&r| alive[r]).collect();
    if core_rows.is_empty() {
        return peeled;
    }
    let mut remap = vec![u32::MAX; n];
    let mut cols = 0;
    for &r in &core_rows {
        for &c in rows[r] {
            if remap[c as usize] == u32::MAX {
                remap[c as usize] = cols;
                cols += 1;
            }
        }
    }
    let mut dense = DenseMatrix::zeros(core_rows.len(), cols as usize);
    for (i, &r) in core_rows.iter().enumerate() {
        for &c in rows[r] {
            dense.flip(i, remap[c as usize] as usize);
        }
    }
    peeled + dense.rank()
}

/// Systematic encoder built from the reduced row-echelon form of `H`.
///
/// Message bits fill the first non-pivot columns; unused free columns are
/// zero and pivot columns are solved from the parity checks. Memory is
/// `m * n / 8` bytes, so this is meant for codes with few checks.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    rref: DenseMatrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl SystematicEncoder {
    pub fn new(n: usize, rows: &[&[u32]]) -> Self {
        let mut h = DenseMatrix::zeros(rows.len(), n);
        for (r, row) in rows.iter().enumerate() {
            for &c in row.iter() {
                h.flip(r, c as usize);
            }
        }
        let pivots = h.rref();
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free = (0..n).filter(|&c| !is_pivot[c]).collect();
        SystematicEncoder {
            rref: h,
            pivots,
            free,
        }
    }

    /// Largest message the code can carry, `n - rank(H)`.
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    /// Codeword positions holding message bit `i`.
    pub fn message_positions(&self) -> &[usize] {
        &self.free
    }

    /// Encodes `message` (at most [`dimension`](Self::dimension) bits).
    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        assert!(message.len() <= self.free.len(), "message too long");
        let n = self.rref.n_cols();
        let mut word = vec![0u8; n];
        for (&pos, &bit) in self.free.iter().zip(message) {
            word[pos] = bit & 1;
        }
        for (r, &p) in self.pivots.iter().enumerate() {
            let mut acc = 0u8;
            for (&pos, &bit) in self.free.iter().zip(message) {
                if bit & 1 == 1 && self.rref.get(r, pos) {
                    acc ^= 1;
                }
            }
            word[p] = acc;
        }
        word
    }

    /// Extracts the message bits from a codeword.
    pub fn extract(&self, word: &[u8], k: usize) -> Vec<u8> {
        self.free[..k].iter().map(|&p| word[p]).collect()
    }
}
