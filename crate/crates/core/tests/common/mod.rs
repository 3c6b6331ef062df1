// SPDX-License-Identifier: Apache-2.0

//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use qalloc::LabeledGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `G(n, p)` on `n` vertices.
pub fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> LabeledGraph {
    let mut g = LabeledGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every simple path from any vertex of `from` to any vertex of `to`, as a
/// bitmask of all its vertices.
fn simple_paths(g: &LabeledGraph, from: &[usize], to: &[usize]) -> Vec<u32> {
    fn walk(g: &LabeledGraph, v: usize, seen: u32, to: u32, out: &mut Vec<u32>) {
        if to & (1 << v) != 0 {
            out.push(seen);
        }
        for w in g.neighbors(v) {
            if seen & (1 << w) == 0 {
                walk(g, w, seen | (1 << w), to, out);
            }
        }
    }
    let to_mask = to.iter().fold(0u32, |m, &v| m | (1 << v));
    let mut out = Vec::new();
    for &s in from {
        walk(g, s, 1 << s, to_mask, &mut out);
    }
    out
}

/// Largest number of pairwise disjoint sets among `masks` (no mask empty),
/// by exhaustive DP over the set of still-available vertices.
fn max_packing(masks: &[u32], universe: u32) -> usize {
    let mut masks = masks.to_vec();
    masks.sort_unstable();
    masks.dedup();
    let mut memo = std::collections::HashMap::new();
    fn best(avail: u32, masks: &[u32], memo: &mut std::collections::HashMap<u32, usize>) -> usize {
        if avail == 0 {
            return 0;
        }
        if let Some(&b) = memo.get(&avail) {
            return b;
        }
        let low = avail & avail.wrapping_neg();
        // either the lowest available vertex stays unused...
        let mut b = best(avail & !low, masks, memo);
        // ...or some set covers it
        for &m in masks {
            if m & low != 0 && m & !avail == 0 {
                b = b.max(1 + best(avail & !m, masks, memo));
            }
        }
        memo.insert(avail, b);
        b
    }
    best(universe, &masks, &mut memo)
}

/// κ(s,t) by enumerating all s–t paths and searching for the largest family
/// with pairwise disjoint interiors.
pub fn brute_force_kappa(g: &LabeledGraph, s: usize, t: usize) -> usize {
    let ends = (1u32 << s) | (1u32 << t);
    let interiors: Vec<u32> = simple_paths(g, &[s], &[t])
        .into_iter()
        .map(|m| m & !ends)
        .collect();
    let direct = usize::from(interiors.contains(&0));
    let nonempty: Vec<u32> = interiors.into_iter().filter(|&m| m != 0).collect();
    let universe = ((1u64 << g.vertex_count()) - 1) as u32 & !ends;
    direct + max_packing(&nonempty, universe)
}

/// Largest family of fully vertex-disjoint paths each running from a vertex
/// of `a` to a vertex of `b`.
pub fn brute_force_set_kappa(g: &LabeledGraph, a: &[usize], b: &[usize]) -> usize {
    let paths = simple_paths(g, a, b);
    max_packing(&paths, ((1u64 << g.vertex_count()) - 1) as u32)
}

/// All-pairs hop distances by Floyd–Warshall over live vertices.
pub fn floyd_warshall(g: &LabeledGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.vertex_count();
    let mut d = vec![vec![None; n]; n];
    for v in g.live_vertices() {
        d[v][v] = Some(0);
        for w in g.neighbors(v) {
            d[v][w] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}
