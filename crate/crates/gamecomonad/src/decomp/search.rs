//! Exhaustive search for `H_{n,k}`-coalgebras.
//!
//! The comultiplication law forces every element of the `i`-th block of
//! `s_a` to sit at the history made of the first `i - 1` blocks, so the
//! assignment is a tree of histories in which each block only uses elements
//! placed at its parent. The search grows that tree top-down.

use std::collections::BTreeSet;

use crate::comonad::{classes_related, Class, ClassId};
use crate::error::{Error, Result};
use crate::history::{Block, NKHistory};
use crate::structures::RelStructure;

use super::coalgebra::{check_coalgebra_laws, Coalgebra};

/// Default largest universe for `coalgebra_search`.
pub const SEARCH_BOUND: usize = 8;

const STEP_LIMIT: u64 = 200_000_000;

struct Node {
    history: NKHistory,
    hosts: Vec<usize>,
    blocks: BTreeSet<Block>,
}

struct Search<'a> {
    a: &'a RelStructure,
    n: usize,
    k: usize,
    nodes: Vec<Node>,
    at: Vec<Option<usize>>,
    /// Tuples indexed by their largest element position in `at`.
    tuples: Vec<Vec<(usize, Vec<usize>)>>,
    unassigned: usize,
    steps: u64,
}

impl Search<'_> {
    fn class(&self, x: usize) -> ClassId {
        Class { history: self.nodes[self.at[x].expect("assigned")].history.clone(), element: x }
    }

    /// Tuples that became fully assigned when `hosts` were placed.
    fn tuples_ok(&self, hosts: &[usize]) -> bool {
        hosts.iter().all(|&x| {
            self.tuples[x].iter().all(|(r, t)| {
                if t.iter().any(|&y| self.at[y].is_none()) {
                    return true;
                }
                // checked once, at its least newly placed element
                if t.iter().any(|y| hosts.contains(y) && *y < x) {
                    return true;
                }
                let classes: Vec<ClassId> = t.iter().map(|&y| self.class(y)).collect();
                classes_related(self.a, *r, &classes, self.n, self.k)
            })
        })
    }

    fn blocks(&self, parent: usize) -> Vec<Block> {
        let node = &self.nodes[parent];
        let mut used: BTreeSet<usize> = node.history.iter().flatten().map(|m| m.1).collect();
        let forced: Option<Vec<usize>> = match node.history.last() {
            Some(b) if b.len() < self.n => Some(b.iter().map(|m| m.1).collect()),
            _ => None,
        };
        let mut out = Vec::new();
        let mut cur: Block = Vec::new();
        self.extend(&node.hosts, &mut used, forced.as_deref(), &mut cur, &mut out);
        out
    }

    fn extend(&self, hosts: &[usize], used: &mut BTreeSet<usize>, forced: Option<&[usize]>, cur: &mut Block, out: &mut Vec<Block>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == self.n {
            return;
        }
        let fresh = (1..=self.k).find(|p| !used.contains(p));
        let pebbles: Vec<usize> = match (cur.is_empty(), forced) {
            (true, Some(f)) => f.to_vec(),
            _ => used.iter().copied().chain(fresh).filter(|p| cur.iter().all(|m| m.1 != *p)).collect(),
        };
        for p in pebbles {
            let is_fresh = Some(p) == fresh;
            if is_fresh {
                used.insert(p);
            }
            for &x in hosts {
                cur.push((x, p));
                self.extend(hosts, used, forced, cur, out);
                cur.pop();
            }
            if is_fresh {
                used.remove(&p);
            }
        }
    }

    fn place(&mut self, node: usize, hosts: &[usize]) {
        for &x in hosts {
            self.at[x] = Some(node);
        }
        self.unassigned -= hosts.len();
    }

    fn unplace(&mut self, hosts: &[usize]) {
        for &x in hosts {
            self.at[x] = None;
        }
        self.unassigned += hosts.len();
    }

    fn free_subsets(&self, above: Option<usize>) -> Vec<Vec<usize>> {
        let free: Vec<usize> = (0..self.a.size()).filter(|&x| self.at[x].is_none()).collect();
        let mut out: Vec<Vec<usize>> = (1u32..1 << free.len())
            .map(|m| (0..free.len()).filter(|i| m >> i & 1 == 1).map(|i| free[i]).collect::<Vec<_>>())
            .filter(|s: &Vec<usize>| above.is_none_or(|b| s[0] > b))
            .collect();
        out.sort_by_key(|s| std::cmp::Reverse(s.len()));
        out
    }

    fn dfs(&mut self, cur: usize, last_min: Option<usize>) -> Result<bool> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return Err(Error::Resource(format!("coalgebra search exceeded {STEP_LIMIT} steps")));
        }
        if self.unassigned == 0 {
            return Ok(true);
        }
        if cur == self.nodes.len() {
            return Ok(false);
        }
        if self.nodes[cur].history.len() < self.a.size() {
            let blocks = self.blocks(cur);
            for hosts in self.free_subsets(last_min) {
                for b in &blocks {
                    if self.nodes[cur].blocks.contains(b) {
                        continue;
                    }
                    let mut history = self.nodes[cur].history.clone();
                    history.push(b.clone());
                    let id = self.nodes.len();
                    self.nodes.push(Node { history, hosts: hosts.clone(), blocks: BTreeSet::new() });
                    self.place(id, &hosts);
                    if self.tuples_ok(&hosts) {
                        self.nodes[cur].blocks.insert(b.clone());
                        if self.dfs(cur, Some(hosts[0]))? {
                            return Ok(true);
                        }
                        self.nodes[cur].blocks.remove(b);
                    }
                    self.unplace(&hosts);
                    self.nodes.pop();
                }
            }
        }
        self.dfs(cur + 1, None)
    }
}

/// A coalgebra `A → H_{n,k} A` with block depth at most `|A|`, or `None`
/// when none exists.
pub fn coalgebra_search(a: &RelStructure, n: usize, k: usize, bound: usize) -> Result<Option<Coalgebra>> {
    if n == 0 || k == 0 || n > k {
        return Err(Error::Precondition(format!("need 1 ≤ n ≤ k, got n={n}, k={k}")));
    }
    if a.size() > bound {
        return Err(Error::Resource(format!("coalgebra search limited to {bound} elements, got {}", a.size())));
    }
    if a.size() == 0 {
        return Ok(Some(Coalgebra { n, k, assignment: Vec::new() }));
    }
    // related classes end prefixes whose pebbles are never moved again
    if a.relations().iter().flatten().any(|t| t.iter().collect::<BTreeSet<_>>().len() > k) {
        return Ok(None);
    }
    let mut tuples = vec![Vec::new(); a.size()];
    for (r, rel) in a.relations().iter().enumerate() {
        for t in rel {
            for &x in t.iter().collect::<BTreeSet<_>>() {
                tuples[x].push((r, t.clone()));
            }
        }
    }
    let mut s = Search { a, n, k, nodes: Vec::new(), at: vec![None; a.size()], tuples, unassigned: a.size(), steps: 0 };
    let candidates = s.free_subsets(None);
    for hosts in candidates {
        s.nodes.push(Node { history: Vec::new(), hosts: hosts.clone(), blocks: BTreeSet::new() });
        s.place(0, &hosts);
        if s.tuples_ok(&hosts) && s.dfs(0, None)? {
            let assignment = (0..a.size()).map(|x| s.nodes[s.at[x].unwrap()].history.clone()).collect();
            let alpha = Coalgebra { n, k, assignment };
            let report = check_coalgebra_laws(a, &alpha);
            if !report.passed() {
                return Err(Error::Invariant(format!("search produced a law-breaking coalgebra: {}", report.to_json_value())));
            }
            return Ok(Some(alpha));
        }
        s.unplace(&hosts);
        s.nodes.clear();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let one = RelStructure::undirected_graph(1, &[]);
        assert!(coalgebra_search(&one, 1, 1, SEARCH_BOUND).unwrap().is_some());
        let k3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2), (0, 2)]);
        // the last pebble is forgotten at n = 1, so a width 2 chain suffices
        let chain = coalgebra_search(&k3, 1, 2, SEARCH_BOUND).unwrap().unwrap();
        assert_eq!(chain.depth(), 2);
        assert!(coalgebra_search(&k3, 1, 1, SEARCH_BOUND).unwrap().is_none());
        let found = coalgebra_search(&k3, 2, 2, SEARCH_BOUND).unwrap().unwrap();
        assert!(found.assignment.iter().all(|s| s.is_empty()));
        let p3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2)]);
        assert!(coalgebra_search(&p3, 1, 2, SEARCH_BOUND).unwrap().is_some());
        // one pebble never relates two distinct elements
        assert!(coalgebra_search(&p3, 1, 1, SEARCH_BOUND).unwrap().is_none());
        assert!(matches!(coalgebra_search(&p3, 1, 2, 2), Err(Error::Resource(_))));
    }
}
