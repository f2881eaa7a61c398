use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::degree::{apportion, DegreeDistribution};
use super::graph::SparseParityCheck;
use crate::error::{Error, Result};
use crate::rng;

const REDRAW_ATTEMPTS: usize = 10_000;

/// Random parity-check matrix of length `n` from `dist`.
///
/// Node counts are realized by largest-remainder rounding; per edge type
/// the check sockets are randomly permuted against the variable sockets.
/// A socket surplus left by rounding is absorbed by the checks with the
/// fewest (or most) sockets of that type. Double edges are removed by
/// swapping check endpoints with random edges of the same type.
pub fn build_code(dist: &DegreeDistribution, n: usize, seed: u64) -> Result<SparseParityCheck> {
    let var_types = dist.variable_types();
    let check_types = dist.check_types();
    let m = libm::round(n as f64 * (1.0 - dist.design_rate())) as usize;
    let var_counts = apportion(n, &var_types.iter().map(|t| t.fraction).collect::<Vec<_>>());
    let check_counts = apportion(m, &check_types.iter().map(|t| t.fraction).collect::<Vec<_>>());
    if var_counts.iter().chain(&check_counts).any(|&c| c == 0) {
        return Err(Error::Distribution(format!(
            "n = {n} is too small to realize every node type"
        )));
    }

    let expand = |types: &[super::degree::NodeType], counts: &[usize]| -> Vec<Vec<u32>> {
        types
            .iter()
            .zip(counts)
            .flat_map(|(t, &count)| core::iter::repeat_n(t.sockets.clone(), count))
            .collect()
    };
    let var_sockets = expand(var_types, &var_counts);
    let mut check_sockets = expand(check_types, &check_counts);

    let mut rng = rng::stream(seed, 0);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut type_ranges = Vec::with_capacity(dist.edge_types());
    for t in 0..dist.edge_types() {
        // Rounding node counts can move each side by up to one node's worth
        // of sockets per node type.
        let tolerance: usize = var_types
            .iter()
            .chain(check_types)
            .map(|nt| nt.sockets[t] as usize)
            .sum();
        let var_total: usize = var_sockets.iter().map(|s| s[t] as usize).sum();
        let check_total: usize = check_sockets.iter().map(|s| s[t] as usize).sum();
        let allowed = tolerance + (var_total.max(check_total) as f64 * 1e-3) as usize;
        if var_total.abs_diff(check_total) > allowed {
            return Err(Error::Distribution(format!(
                "edge type {t}: {var_total} variable sockets vs {check_total} check sockets"
            )));
        }
        balance_sockets(&mut check_sockets, t, var_total as i64 - check_total as i64)?;

        let mut check_side: Vec<u32> = check_sockets
            .iter()
            .enumerate()
            .flat_map(|(c, s)| core::iter::repeat_n(c as u32, s[t] as usize))
            .collect();
        check_side.shuffle(&mut rng);
        let start = edges.len();
        let var_side = var_sockets
            .iter()
            .enumerate()
            .flat_map(|(v, s)| core::iter::repeat_n(v as u32, s[t] as usize));
        edges.extend(var_side.zip(check_side));
        type_ranges.push(start..edges.len());
    }

    remove_double_edges(&mut edges, &type_ranges, n, &mut rng)?;
    SparseParityCheck::from_edges(n, m, &edges)
}

/// Adds (`delta > 0`) or removes sockets of `edge_type` one at a time on
/// the checks with the fewest (or most) such sockets. A check never loses
/// its last socket.
fn balance_sockets(check_sockets: &mut [Vec<u32>], edge_type: usize, delta: i64) -> Result<()> {
    let eligible: Vec<usize> = (0..check_sockets.len())
        .filter(|&c| check_sockets[c][edge_type] > 0)
        .collect();
    for _ in 0..delta.unsigned_abs() {
        let pick = if delta > 0 {
            eligible.iter().copied().min_by_key(|&c| check_sockets[c][edge_type])
        } else {
            eligible
                .iter()
                .copied()
                .filter(|&c| check_sockets[c][edge_type] > 0 && check_sockets[c].iter().sum::<u32>() > 1)
                .max_by_key(|&c| check_sockets[c][edge_type])
        };
        let Some(c) = pick else {
            return Err(Error::Distribution(format!(
                "cannot balance sockets of edge type {edge_type}"
            )));
        };
        if delta > 0 {
            check_sockets[c][edge_type] += 1;
        } else {
            check_sockets[c][edge_type] -= 1;
        }
    }
    Ok(())
}

fn remove_double_edges<R: Rng>(
    edges: &mut [(u32, u32)],
    type_ranges: &[core::ops::Range<usize>],
    n: usize,
    rng: &mut R,
) -> Result<()> {
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut doubles = Vec::new();
    for (i, &(v, c)) in edges.iter().enumerate() {
        let adj = &mut adjacency[v as usize];
        if adj.contains(&c) {
            doubles.push(i);
        }
        adj.push(c);
    }
    for i in doubles {
        let range = type_ranges
            .iter()
            .find(|r| r.contains(&i))
            .cloned()
            .unwrap_or(0..0);
        let mut fixed = false;
        for _ in 0..REDRAW_ATTEMPTS {
            let j = rng.random_range(range.clone());
            let (vi, ci) = edges[i];
            let (vj, cj) = edges[j];
            if ci == cj
                || vi == vj
                || adjacency[vi as usize].contains(&cj)
                || adjacency[vj as usize].contains(&ci)
            {
                continue;
            }
            replace_one(&mut adjacency[vi as usize], ci, cj);
            replace_one(&mut adjacency[vj as usize], cj, ci);
            edges[i].1 = cj;
            edges[j].1 = ci;
            fixed = true;
            break;
        }
        if !fixed {
            return Err(Error::Distribution(format!(
                "could not remove a double edge after {REDRAW_ATTEMPTS} attempts"
            )));
        }
    }
    Ok(())
}

fn replace_one(list: &mut [u32], from: u32, to: u32) {
    if let Some(x) = list.iter_mut().find(|x| **x == from) {
        *x = to;
    }
}
