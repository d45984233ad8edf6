//! Conversions between tree decompositions and arity 1 extended tree
//! decompositions.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::structures::RelStructure;

use super::validate::{validate_etd, validate_td};
use super::{Bag, EtdNode, ExtendedTreeDecomposition, TdNode, TreeDecomposition};

struct Undirected {
    bags: Vec<Bag>,
    ids: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    root: usize,
}

impl Undirected {
    fn contract(&mut self, keep: usize, gone: usize) {
        let nbrs: Vec<usize> = self.adj[gone].iter().copied().filter(|&v| v != keep).collect();
        for v in nbrs {
            self.adj[v].remove(&gone);
            self.adj[v].insert(keep);
            self.adj[keep].insert(v);
        }
        self.adj[keep].remove(&gone);
        self.adj[gone].clear();
        self.alive[gone] = false;
        if self.root == gone {
            self.root = keep;
        }
    }

    fn subset_edge(&self) -> Option<(usize, usize)> {
        (0..self.bags.len())
            .filter(|&t| self.alive[t])
            .find_map(|t| self.adj[t].iter().find(|&&u| self.bags[u].is_subset(&self.bags[t])).map(|&u| (t, u)))
    }

    fn add(&mut self, id: String, bag: Bag) -> usize {
        self.bags.push(bag);
        self.ids.push(id);
        self.adj.push(BTreeSet::new());
        self.alive.push(true);
        self.bags.len() - 1
    }

    fn link(&mut self, t: usize, u: usize) {
        self.adj[t].insert(u);
        self.adj[u].insert(t);
    }

    fn unlink(&mut self, t: usize, u: usize) {
        self.adj[t].remove(&u);
        self.adj[u].remove(&t);
    }
}

/// A decomposition of the same width `w = min(k, |A| - 1)` in which every bag
/// has `w + 1` elements and adjacent bags share exactly `w`.
pub fn normalize_td(a: &RelStructure, td: &TreeDecomposition, k: usize) -> Result<TreeDecomposition> {
    let report = validate_td(a, td)?;
    if !report.valid {
        return Err(Error::Precondition(format!("invalid tree decomposition: {}", report.problems.join("; "))));
    }
    if report.width > k {
        return Err(Error::Precondition(format!("tree decomposition has width {} > {k}", report.width)));
    }
    let w = k.min(a.size() - 1);
    let shape = td.shape()?;
    let mut g = Undirected {
        bags: td.nodes.iter().map(|n| n.bag.clone()).collect(),
        ids: td.nodes.iter().map(|n| n.id.clone()).collect(),
        adj: vec![BTreeSet::new(); td.nodes.len()],
        alive: vec![true; td.nodes.len()],
        root: shape.root,
    };
    for (t, n) in td.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            g.link(p, t);
        }
    }
    loop {
        if let Some((t, u)) = g.subset_edge() {
            g.contract(t, u);
            continue;
        }
        let small = (0..g.bags.len()).find(|&t| g.alive[t] && g.bags[t].len() < w + 1);
        let Some(t) = small else { break };
        let (u, x) = g.adj[t]
            .iter()
            .find_map(|&u| g.bags[u].difference(&g.bags[t]).next().map(|&x| (u, x)))
            .ok_or_else(|| Error::Invariant("small bag without a neighbour to borrow from".into()))?;
        debug_assert!(g.alive[u]);
        g.bags[t].insert(x);
    }
    let edges: Vec<(usize, usize)> = (0..g.bags.len())
        .filter(|&t| g.alive[t])
        .flat_map(|t| g.adj[t].iter().filter(move |&&u| u > t).map(move |&u| (t, u)))
        .collect();
    for (t, u) in edges {
        let shared = g.bags[t].intersection(&g.bags[u]).count();
        if shared >= w {
            continue;
        }
        let out: Vec<usize> = g.bags[t].difference(&g.bags[u]).copied().collect();
        let inc: Vec<usize> = g.bags[u].difference(&g.bags[t]).copied().collect();
        g.unlink(t, u);
        let mut prev = t;
        for i in 1..out.len() {
            let mut bag = g.bags[t].clone();
            for x in &out[..i] {
                bag.remove(x);
            }
            bag.extend(inc[..i].iter().copied());
            let id = format!("{}~{}#{i}", g.ids[t], g.ids[u]);
            let v = g.add(id, bag);
            g.link(prev, v);
            prev = v;
        }
        g.link(prev, u);
    }
    let mut seen = vec![false; g.bags.len()];
    seen[g.root] = true;
    let mut nodes = Vec::new();
    let mut queue = std::collections::VecDeque::from([(g.root, None)]);
    while let Some((t, parent)) = queue.pop_front() {
        let me = nodes.len();
        nodes.push(TdNode { id: g.ids[t].clone(), parent, bag: g.bags[t].clone() });
        for &u in &g.adj[t] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back((u, Some(me)));
            }
        }
    }
    Ok(TreeDecomposition { nodes })
}

/// Width `k`, arity 1 extended decomposition from a tree decomposition of width at most `k`.
pub fn td_to_etd(a: &RelStructure, td: &TreeDecomposition, k: usize) -> Result<ExtendedTreeDecomposition> {
    let t = normalize_td(a, td, k)?;
    let shape = t.shape()?;
    let r = shape.root;
    let mut beta = t.nodes[r].bag.clone();
    let c_r = *beta.iter().next().expect("normalized bags are nonempty");
    beta.remove(&c_r);
    let mut nodes = vec![EtdNode { id: t.nodes[r].id.clone(), parent: None, beta, gamma: Bag::from([c_r]) }];
    let mut classes: Vec<Vec<usize>> = vec![vec![r]];
    let mut head = 0;
    while head < classes.len() {
        let members = classes[head].clone();
        for &m in &members {
            let mut groups: BTreeMap<Bag, Vec<usize>> = BTreeMap::new();
            for &c in &shape.children[m] {
                let shared: Bag = t.nodes[c].bag.intersection(&t.nodes[m].bag).copied().collect();
                groups.entry(shared).or_default().push(c);
            }
            for (shared, group) in groups {
                let gamma: Bag = group.iter().flat_map(|&c| t.nodes[c].bag.difference(&t.nodes[m].bag).copied()).collect();
                let id = group.iter().map(|&c| t.nodes[c].id.as_str()).collect::<Vec<_>>().join("+");
                nodes.push(EtdNode { id, parent: Some(head), beta: shared, gamma });
                classes.push(group);
            }
        }
        head += 1;
    }
    Ok(ExtendedTreeDecomposition { nodes })
}

/// Spider expansion of an arity 1 extended decomposition.
pub fn etd_to_td(a: &RelStructure, d: &ExtendedTreeDecomposition) -> Result<TreeDecomposition> {
    let report = validate_etd(a, d, None)?;
    if !report.valid {
        return Err(Error::Precondition(format!("invalid extended decomposition: {}", report.problems.join("; "))));
    }
    if report.arity.unwrap_or(0) > 1 {
        return Err(Error::Precondition(format!("arity {} > 1", report.arity.unwrap_or(0))));
    }
    let shape = d.shape()?;
    let mut nodes: Vec<TdNode> = Vec::new();
    let mut attach: Vec<Option<usize>> = vec![None; d.nodes.len()];
    for &t in &shape.order {
        let node = &d.nodes[t];
        let hub = nodes.len();
        nodes.push(TdNode { id: node.id.clone(), parent: attach[t], bag: node.beta.clone() });
        let mut leaf = BTreeMap::new();
        for &g in &node.gamma {
            let mut bag = node.beta.clone();
            bag.insert(g);
            leaf.insert(g, nodes.len());
            nodes.push(TdNode { id: format!("{}/{}", node.id, a.id(g)), parent: Some(hub), bag });
        }
        for &c in &shape.children[t] {
            let shared: Vec<usize> = d.nodes[c].beta.intersection(&node.gamma).copied().collect();
            attach[c] = Some(match shared.as_slice() {
                [] => hub,
                [g] => leaf[g],
                _ => return Err(Error::Invariant("arity 1 bound exceeded at a child".into())),
            });
        }
    }
    Ok(TreeDecomposition { nodes })
}

/// Adds a root with empty fixed bag floating the old root's fixed elements.
pub fn with_empty_root(d: &ExtendedTreeDecomposition) -> Result<ExtendedTreeDecomposition> {
    let shape = d.shape()?;
    let r = shape.root;
    let lifted: Bag = d.nodes[r].beta.difference(&d.nodes[r].gamma).copied().collect();
    if lifted.is_empty() {
        return Ok(d.clone());
    }
    let mut nodes = vec![EtdNode { id: format!("{}^", d.nodes[r].id), parent: None, beta: Bag::new(), gamma: lifted }];
    nodes.extend(d.nodes.iter().map(|n| EtdNode { parent: Some(n.parent.map_or(0, |p| p + 1)), ..n.clone() }));
    Ok(ExtendedTreeDecomposition { nodes })
}
