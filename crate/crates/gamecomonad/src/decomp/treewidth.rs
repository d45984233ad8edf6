//! Exact treewidth by dynamic programming over vertex subsets.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::structures::RelStructure;

/// Largest universe `treewidth_oracle` accepts.
pub const TREEWIDTH_BOUND: usize = 18;

/// Elements adjacent when they occur together in some tuple.
pub fn gaifman_graph(a: &RelStructure) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); a.size()];
    for rel in a.relations() {
        for t in rel {
            for &x in t {
                for &y in t {
                    if x != y {
                        adj[x].insert(y);
                    }
                }
            }
        }
    }
    adj
}

/// Vertices outside `s ∪ {v}` reachable from `v` through `s`.
fn q_size(adj: &[u32], s: u32, v: usize) -> u32 {
    let inside = s | (1 << v);
    let mut seen = 1u32 << v;
    let mut frontier = seen;
    let mut boundary = 0u32;
    while frontier != 0 {
        let mut next = 0u32;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[u];
        }
        boundary |= next & !inside;
        next &= s & !seen;
        seen |= next;
        frontier = next;
    }
    boundary.count_ones()
}

/// Treewidth of the Gaifman graph; an edgeless structure has 0.
pub fn treewidth_oracle(a: &RelStructure) -> Result<usize> {
    let n = a.size();
    if n > TREEWIDTH_BOUND {
        return Err(Error::Resource(format!("treewidth oracle limited to {TREEWIDTH_BOUND} elements, got {n}")));
    }
    let adj: Vec<u32> = gaifman_graph(a).iter().map(|ns| ns.iter().fold(0u32, |m, &y| m | (1 << y))).collect();
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut tw = vec![u32::MAX; 1usize << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u32::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let cand = tw[without as usize].max(q_size(&adj, without, v));
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize] as usize)
}
