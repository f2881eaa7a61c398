use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const FRACTION_TOL: f64 = 1e-9;

/// A class of nodes: the fraction of its side they make up and how many
/// sockets of each edge type every such node has.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeType {
    pub fraction: f64,
    pub sockets: Vec<u32>,
}

impl NodeType {
    pub fn degree(&self) -> u32 {
        self.sockets.iter().sum()
    }
}

/// Node-perspective degree distribution of a (multi-edge type) LDPC
/// ensemble.
///
/// Variable fractions are relative to the code length `n`, check fractions
/// to the number of checks `m = n (1 - design_rate)`. A plain irregular
/// ensemble is the single-edge-type case.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegreeDistribution {
    design_rate: f64,
    edge_types: usize,
    variable: Vec<NodeType>,
    check: Vec<NodeType>,
}

impl DegreeDistribution {
    /// Irregular ensemble from `(degree, node fraction)` pairs.
    ///
    /// `design_rate` must agree with `1 - avg_dv / avg_dc` to 1e-3 (the
    /// tolerance absorbs fractions published to four digits).
    pub fn irregular(design_rate: f64, variable: &[(u32, f64)], check: &[(u32, f64)]) -> Result<Self> {
        let to_types = |side: &[(u32, f64)]| {
            side.iter()
                .map(|&(d, f)| NodeType {
                    fraction: f,
                    sockets: vec![d],
                })
                .collect::<Vec<_>>()
        };
        let dist = Self::multi_edge(design_rate, to_types(variable), to_types(check))?;
        let implied = 1.0 - dist.mean_degree(&dist.variable) / dist.mean_degree(&dist.check);
        if libm::fabs(implied - design_rate) > 1e-3 {
            return Err(Error::Distribution(format!(
                "design rate {design_rate} disagrees with degrees (implied {implied:.6})"
            )));
        }
        Ok(dist)
    }

    /// Regular `(dv, dc)` ensemble.
    pub fn regular(dv: u32, dc: u32) -> Result<Self> {
        if dc <= dv {
            return Err(Error::Distribution(format!("regular ({dv}, {dc}) has no positive rate")));
        }
        Self::irregular(1.0 - dv as f64 / dc as f64, &[(dv, 1.0)], &[(dc, 1.0)])
    }

    /// Multi-edge type ensemble. Per edge type, the socket counts implied
    /// by both sides must match to 1e-3 relative.
    pub fn multi_edge(design_rate: f64, variable: Vec<NodeType>, check: Vec<NodeType>) -> Result<Self> {
        if !(design_rate > 0.0 && design_rate < 1.0) {
            return Err(Error::Distribution(format!("design rate {design_rate} not in (0, 1)")));
        }
        let edge_types = variable.first().map_or(0, |t| t.sockets.len());
        if edge_types == 0 {
            return Err(Error::Empty("variable node types"));
        }
        for (side, types) in [("variable", &variable), ("check", &check)] {
            if types.is_empty() {
                return Err(Error::Empty("node types"));
            }
            let mut total = 0.0;
            for t in types.iter() {
                if t.sockets.len() != edge_types {
                    return Err(Error::Distribution(format!(
                        "{side} node type has {} edge types, expected {edge_types}",
                        t.sockets.len()
                    )));
                }
                if !(t.fraction > 0.0 && t.fraction <= 1.0) {
                    return Err(Error::Distribution(format!("{side} fraction {} not in (0, 1]", t.fraction)));
                }
                if t.degree() == 0 {
                    return Err(Error::Distribution(format!("{side} node type of degree zero")));
                }
                total += t.fraction;
            }
            if libm::fabs(total - 1.0) > FRACTION_TOL {
                return Err(Error::Distribution(format!("{side} fractions sum to {total}")));
            }
        }
        let dist = DegreeDistribution {
            design_rate,
            edge_types,
            variable,
            check,
        };
        for t in 0..edge_types {
            let v = dist.sockets_per_variable(t);
            let c = dist.sockets_per_check(t) * (1.0 - design_rate);
            if libm::fabs(v - c) > 1e-3 * v.max(c) {
                return Err(Error::Distribution(format!(
                    "edge type {t}: {v:.6} variable sockets vs {c:.6} check sockets per code bit"
                )));
            }
        }
        Ok(dist)
    }

    pub fn design_rate(&self) -> f64 {
        self.design_rate
    }

    pub fn edge_types(&self) -> usize {
        self.edge_types
    }

    pub fn variable_types(&self) -> &[NodeType] {
        &self.variable
    }

    pub fn check_types(&self) -> &[NodeType] {
        &self.check
    }

    /// `true` when the ensemble has a single edge type.
    pub fn is_irregular(&self) -> bool {
        self.edge_types == 1
    }

    /// Collapses edge types: `(degree, fraction)` per side, merged and
    /// sorted by degree.
    pub fn projected(&self) -> (Vec<(u32, f64)>, Vec<(u32, f64)>) {
        fn collapse(types: &[NodeType]) -> Vec<(u32, f64)> {
            let mut out: Vec<(u32, f64)> = Vec::new();
            for t in types {
                let d = t.degree();
                match out.iter_mut().find(|(dd, _)| *dd == d) {
                    Some(entry) => entry.1 += t.fraction,
                    None => out.push((d, t.fraction)),
                }
            }
            out.sort_by_key(|&(d, _)| d);
            out
        }
        (collapse(&self.variable), collapse(&self.check))
    }

    fn mean_degree(&self, types: &[NodeType]) -> f64 {
        types.iter().map(|t| t.fraction * t.degree() as f64).sum()
    }

    fn sockets_per_variable(&self, edge_type: usize) -> f64 {
        self.variable
            .iter()
            .map(|t| t.fraction * t.sockets[edge_type] as f64)
            .sum()
    }

    fn sockets_per_check(&self, edge_type: usize) -> f64 {
        self.check
            .iter()
            .map(|t| t.fraction * t.sockets[edge_type] as f64)
            .sum()
    }
}

/// Splits `total` items over `fractions` by the largest-remainder method,
/// so the counts sum exactly to `total`.
pub(crate) fn apportion(total: usize, fractions: &[f64]) -> Vec<usize> {
    let exact: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|&x| libm::floor(x) as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    // Stable sort keeps ties in input order, so the result is deterministic.
    order.sort_by(|&a, &b| {
        let ra = exact[a] - counts[a] as f64;
        let rb = exact[b] - counts[b] as f64;
        rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal)
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_and_irregular() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        assert_eq!(d.design_rate(), 0.5);
        assert!(d.is_irregular());
        assert!(DegreeDistribution::irregular(0.5, &[(3, 0.5), (2, 0.4)], &[(6, 1.0)]).is_err());
        assert!(DegreeDistribution::irregular(0.4, &[(3, 1.0)], &[(6, 1.0)]).is_err());
        assert!(DegreeDistribution::regular(3, 3).is_err());
    }

    #[test]
    fn multi_edge_balance() {
        let var = vec![
            NodeType { fraction: 0.0775, sockets: vec![2, 21, 0] },
            NodeType { fraction: 0.0475, sockets: vec![3, 21, 0] },
            NodeType { fraction: 0.875, sockets: vec![0, 0, 1] },
        ];
        let chk = vec![
            NodeType { fraction: 0.0025 / 0.9, sockets: vec![11, 0, 0] },
            NodeType { fraction: 0.0225 / 0.9, sockets: vec![12, 0, 0] },
            NodeType { fraction: 0.875 / 0.9, sockets: vec![0, 3, 1] },
        ];
        let d = DegreeDistribution::multi_edge(0.1, var.clone(), chk).unwrap();
        assert_eq!(d.edge_types(), 3);
        let (v, _) = d.projected();
        assert_eq!(v[0], (1, 0.875));
        let bad = vec![NodeType { fraction: 1.0, sockets: vec![12, 0, 0] }];
        assert!(DegreeDistribution::multi_edge(0.1, var, bad).is_err());
    }

    #[test]
    fn apportion_sums_exactly() {
        let c = apportion(10, &[0.25, 0.25, 0.5]);
        assert_eq!(c.iter().sum::<usize>(), 10);
        assert_eq!(c, vec![3, 2, 5]);
        assert_eq!(apportion(7, &[1.0]), vec![7]);
    }
}
