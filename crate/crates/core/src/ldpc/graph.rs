use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf2;

/// Sparse parity-check matrix of a binary linear code, stored as a
/// bipartite graph in both check-major and variable-major order.
///
/// Edge `e` is the `e`-th entry of the check-major list, so per-edge
/// message buffers indexed by `e` are contiguous per check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseParityCheck {
    n: usize,
    check_start: Vec<u32>,
    check_vars: Vec<u32>,
    var_start: Vec<u32>,
    var_edges: Vec<u32>,
}

impl SparseParityCheck {
    /// Builds the graph from `(variable, check)` pairs. Duplicate edges and
    /// isolated nodes are rejected.
    pub fn from_edges(n: usize, m: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Graph(format!("empty code: n = {n}, m = {m}")));
        }
        let mut sorted = edges.to_vec();
        for &(v, c) in &sorted {
            if v as usize >= n || c as usize >= m {
                return Err(Error::Graph(format!("edge ({v}, {c}) outside a {m} x {n} matrix")));
            }
        }
        sorted.sort_unstable_by_key(|&(v, c)| (c, v));
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Graph(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }

        let mut check_start = vec![0u32; m + 1];
        for &(_, c) in &sorted {
            check_start[c as usize + 1] += 1;
        }
        for c in 0..m {
            if check_start[c + 1] == 0 {
                return Err(Error::Graph(format!("check {c} has no edges")));
            }
            check_start[c + 1] += check_start[c];
        }
        let check_vars: Vec<u32> = sorted.iter().map(|&(v, _)| v).collect();

        let mut var_start = vec![0u32; n + 1];
        for &v in &check_vars {
            var_start[v as usize + 1] += 1;
        }
        for v in 0..n {
            if var_start[v + 1] == 0 {
                return Err(Error::Graph(format!("variable {v} has no edges")));
            }
            var_start[v + 1] += var_start[v];
        }
        let mut fill = var_start.clone();
        let mut var_edges = vec![0u32; check_vars.len()];
        for (e, &v) in check_vars.iter().enumerate() {
            var_edges[fill[v as usize] as usize] = e as u32;
            fill[v as usize] += 1;
        }
        Ok(SparseParityCheck {
            n,
            check_start,
            check_vars,
            var_start,
            var_edges,
        })
    }

    /// Builds the graph from dense 0/1 rows.
    pub fn from_dense(rows: &[&[u8]]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        let mut edges = Vec::new();
        for (c, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Length {
                    expected: n,
                    found: row.len(),
                });
            }
            for (v, &bit) in row.iter().enumerate() {
                if bit != 0 {
                    edges.push((v as u32, c as u32));
                }
            }
        }
        Self::from_edges(n, rows.len(), &edges)
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity checks (rows).
    pub fn m(&self) -> usize {
        self.check_start.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.check_vars.len()
    }

    /// Variables in check `c`.
    pub fn check(&self, c: usize) -> &[u32] {
        &self.check_vars[self.check_start[c] as usize..self.check_start[c + 1] as usize]
    }

    /// Edge index range of check `c`.
    pub fn check_edges(&self, c: usize) -> core::ops::Range<usize> {
        self.check_start[c] as usize..self.check_start[c + 1] as usize
    }

    /// Edge indices incident to variable `v`.
    pub fn var_edges(&self, v: usize) -> &[u32] {
        &self.var_edges[self.var_start[v] as usize..self.var_start[v + 1] as usize]
    }

    /// Variable at the end of edge `e`.
    pub fn edge_var(&self, e: usize) -> u32 {
        self.check_vars[e]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        (self.var_start[v + 1] - self.var_start[v]) as usize
    }

    pub fn check_degree(&self, c: usize) -> usize {
        (self.check_start[c + 1] - self.check_start[c]) as usize
    }

    /// All edges as `(variable, check)` pairs in check-major order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        (0..self.m())
            .flat_map(|c| self.check(c).iter().map(move |&v| (v, c as u32)))
            .collect()
    }

    /// `H x` over GF(2).
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        self.check_len(bits.len())?;
        Ok((0..self.m())
            .map(|c| self.check(c).iter().fold(0, |acc, &v| acc ^ (bits[v as usize] & 1)))
            .collect())
    }

    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        bits.len() == self.n
            && (0..self.m()).all(|c| self.check(c).iter().fold(0, |acc, &v| acc ^ (bits[v as usize] & 1)) == 0)
    }

    /// Nominal rate `1 - m/n`, a lower bound on the true rate.
    pub fn rate(&self) -> f64 {
        1.0 - self.m() as f64 / self.n as f64
    }

    /// Rank of `H` over GF(2). Cost depends on how much of the graph the
    /// peeling step removes; codes with many degree-1 variables are cheap.
    pub fn rank(&self) -> usize {
        let rows: Vec<&[u32]> = (0..self.m()).map(|c| self.check(c)).collect();
        gf2::sparse_rank(self.n, &rows)
    }

    /// True rate `(n - rank H) / n`.
    pub fn realized_rate(&self) -> f64 {
        (self.n - self.rank()) as f64 / self.n as f64
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::Length {
                expected: self.n,
                found,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_structure() {
        let rows: [&[u8]; 3] = [&[1, 0, 0, 1, 1, 0, 1], &[0, 1, 0, 1, 0, 1, 1], &[0, 0, 1, 0, 1, 1, 1]];
        let h = SparseParityCheck::from_dense(&rows).unwrap();
        assert_eq!((h.n(), h.m(), h.n_edges()), (7, 3, 12));
        assert_eq!(h.var_degree(6), 3);
        assert_eq!(h.check(0), &[0, 3, 4, 6]);
        assert_eq!(h.rank(), 3);
        assert!((h.realized_rate() - 4.0 / 7.0).abs() < 1e-15);
        assert!(h.is_codeword(&[0; 7]));
        assert!(h.is_codeword(&[1; 7]));
        assert_eq!(h.syndrome(&[1, 0, 0, 0, 0, 0, 0]).unwrap(), vec![1, 0, 0]);
        for v in 0..7 {
            for &e in h.var_edges(v) {
                assert_eq!(h.edge_var(e as usize) as usize, v);
            }
        }
        let round = SparseParityCheck::from_edges(7, 3, &h.edges()).unwrap();
        assert_eq!(round, h);
    }

    #[test]
    fn malformed_graphs_are_rejected() {
        assert!(SparseParityCheck::from_edges(2, 1, &[(0, 0), (0, 0), (1, 0)]).is_err());
        assert!(SparseParityCheck::from_edges(3, 1, &[(0, 0), (1, 0)]).is_err());
        assert!(SparseParityCheck::from_edges(2, 2, &[(0, 0), (1, 0)]).is_err());
        assert!(SparseParityCheck::from_edges(2, 1, &[(0, 0), (2, 0)]).is_err());
    }
}
