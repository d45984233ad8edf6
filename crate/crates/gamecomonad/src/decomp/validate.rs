//! Validation of tree decompositions and extended tree decompositions.

use std::collections::BTreeSet;

use serde_json::json;

use crate::error::{Error, Result};
use crate::structures::RelStructure;

use super::{Bag, ExtendedTreeDecomposition, Shape, TreeDecomposition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdReport {
    pub valid: bool,
    pub width: usize,
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtdReport {
    pub valid: bool,
    pub width: usize,
    /// Least arity bound; only computed for valid decompositions.
    pub arity: Option<usize>,
    pub structured: bool,
    /// The `(n, k)` the structured flag was evaluated at.
    pub structured_at: Option<(usize, usize)>,
    pub problems: Vec<String>,
}

impl TdReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({"valid": self.valid, "width": self.width, "problems": self.problems})
    }
}

impl EtdReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "valid": self.valid,
            "width": self.width,
            "arity": self.arity,
            "structured": self.structured,
            "structured_at": self.structured_at.map(|(n, k)| json!({"n": n, "k": k})),
            "problems": self.problems,
        })
    }

    /// Valid, and within the given width and arity bounds.
    pub fn within(&self, width: usize, arity: usize) -> bool {
        self.valid && self.width <= width && self.arity.is_some_and(|n| n <= arity)
    }
}

fn check_ids(size: usize, sets: &[&Bag]) -> Result<()> {
    for (i, s) in sets.iter().enumerate() {
        if let Some(&x) = s.iter().find(|&&x| x >= size) {
            return Err(Error::validation(format!("nodes[{i}]"), format!("element index {x} out of range")));
        }
    }
    Ok(())
}

fn tuple_sets(a: &RelStructure) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for rel in a.relations() {
        for t in rel {
            let mut s = t.clone();
            s.sort_unstable();
            s.dedup();
            out.insert(s);
        }
    }
    out
}

/// Element cover, tuple cover and connectedness of `bags` over `shape`.
/// Returns the tuple sets together with, per element, the nodes holding it.
fn tree_decomposition_problems(a: &RelStructure, shape: &Shape, bags: &[Bag], problems: &mut Vec<String>) -> (BTreeSet<Vec<usize>>, Vec<Vec<usize>>) {
    let mut holders = vec![Vec::new(); a.size()];
    for &t in &shape.order {
        for &x in &bags[t] {
            holders[x].push(t);
        }
    }
    for (x, hs) in holders.iter().enumerate() {
        if hs.is_empty() {
            problems.push(format!("element {} is in no bag", a.id(x)));
            continue;
        }
        let tops = hs.iter().filter(|&&t| shape.parent[t].is_none_or(|p| !bags[p].contains(&x))).count();
        if tops != 1 {
            problems.push(format!("bags holding {} are not connected", a.id(x)));
        }
    }
    let tuples = tuple_sets(a);
    for s in &tuples {
        let Some(first) = s.iter().min_by_key(|&&x| holders[x].len()) else { continue };
        if !holders[*first].iter().any(|&t| s.iter().all(|x| bags[t].contains(x))) {
            let names: Vec<&str> = s.iter().map(|&x| a.id(x)).collect();
            problems.push(format!("tuple {{{}}} is in no bag", names.join(",")));
        }
    }
    (tuples, holders)
}

pub fn validate_td(a: &RelStructure, d: &TreeDecomposition) -> Result<TdReport> {
    let shape = d.shape()?;
    let bags: Vec<Bag> = d.nodes.iter().map(|n| n.bag.clone()).collect();
    check_ids(a.size(), &bags.iter().collect::<Vec<_>>())?;
    let mut problems = Vec::new();
    tree_decomposition_problems(a, &shape, &bags, &mut problems);
    Ok(TdReport { valid: problems.is_empty(), width: d.width(), problems })
}

/// The structured conditions at `(n, k)`.
pub fn is_structured_etd(a: &RelStructure, d: &ExtendedTreeDecomposition, shape: &Shape, n: usize, k: usize) -> bool {
    let covered: BTreeSet<usize> = d.nodes.iter().flat_map(|x| x.gamma.iter().copied()).collect();
    if covered.len() != a.size() || d.nodes.iter().any(|x| x.gamma.is_empty()) {
        return false;
    }
    for &t in &shape.order {
        for &t1 in &shape.children[t] {
            let new: Bag = d.nodes[t1].beta.intersection(&d.nodes[t].gamma).copied().collect();
            if new.is_empty() {
                return false;
            }
            for &t2 in &shape.children[t1] {
                let ok = new.len() == n || d.nodes[t1].beta.len() < k || new.iter().any(|x| !d.nodes[t2].beta.contains(x));
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// Validity, width, least arity and the structured flag. The flag is taken
/// at `grade` when given and at the computed `(arity, width)` otherwise.
pub fn validate_etd(a: &RelStructure, d: &ExtendedTreeDecomposition, grade: Option<(usize, usize)>) -> Result<EtdReport> {
    let shape = d.shape()?;
    let sets: Vec<&Bag> = d.nodes.iter().flat_map(|n| [&n.beta, &n.gamma]).collect();
    check_ids(a.size(), &sets)?;
    let bags: Vec<Bag> = (0..d.nodes.len()).map(|t| d.bag(t)).collect();
    let mut problems = Vec::new();
    let (tuples, holders) = tree_decomposition_problems(a, &shape, &bags, &mut problems);

    let mut floating_at = vec![None; a.size()];
    for &t in &shape.order {
        for &x in &d.nodes[t].gamma {
            match floating_at[x] {
                None => floating_at[x] = Some(t),
                Some(_) => problems.push(format!("{} floats at two nodes", a.id(x))),
            }
            if let Some(&t1) = holders[x].iter().find(|&&t1| !shape.is_ancestor(t, t1)) {
                problems.push(format!("{} floats at {} but appears at {}", a.id(x), d.nodes[t].id, d.nodes[t1].id));
            }
        }
    }
    let valid = problems.is_empty();
    let width = d.width();
    let arity = valid.then(|| {
        let mut bound = 0;
        for t1 in 0..d.nodes.len() {
            let mut per_node = std::collections::HashMap::new();
            for x in &d.nodes[t1].beta {
                if let Some(t) = floating_at[*x].filter(|&t| t != t1) {
                    *per_node.entry(t).or_insert(0usize) += 1;
                }
            }
            bound = bound.max(per_node.values().copied().max().unwrap_or(0));
        }
        for s in &tuples {
            let first = s.iter().min_by_key(|&&x| holders[x].len()).expect("nonempty tuple");
            let best = holders[*first]
                .iter()
                .filter(|&&t| s.iter().all(|x| bags[t].contains(x)))
                .map(|&t| s.iter().filter(|x| d.nodes[t].gamma.contains(x)).count())
                .min()
                .expect("valid decompositions cover every tuple");
            bound = bound.max(best);
        }
        bound
    });
    let structured_at = grade.or(arity.map(|n| (n, width)));
    let structured = valid && structured_at.is_some_and(|(n, k)| is_structured_etd(a, d, &shape, n, k));
    Ok(EtdReport { valid, width, arity, structured, structured_at, problems })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{EtdNode, TdNode};

    fn node(id: &str, parent: Option<usize>, beta: &[usize], gamma: &[usize]) -> EtdNode {
        EtdNode { id: id.into(), parent, beta: beta.iter().copied().collect(), gamma: gamma.iter().copied().collect() }
    }

    #[test]
    fn trivial_graph_decomposition() {
        let c5 = RelStructure::undirected_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let r = validate_etd(&c5, &ExtendedTreeDecomposition::trivial(&c5), None).unwrap();
        assert!(r.valid && r.structured);
        assert_eq!((r.width, r.arity), (0, Some(2)));
    }

    #[test]
    fn floating_must_be_first_appearance() {
        let k2 = RelStructure::undirected_graph(2, &[(0, 1)]);
        let d = ExtendedTreeDecomposition { nodes: vec![node("r", None, &[0], &[1]), node("c", Some(0), &[1], &[0])] };
        let r = validate_etd(&k2, &d, None).unwrap();
        assert!(!r.valid);
        assert_eq!(r.arity, None);
    }

    #[test]
    fn td_checks() {
        let p3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2)]);
        let bag = |v: &[usize]| v.iter().copied().collect();
        let good = TreeDecomposition {
            nodes: vec![
                TdNode { id: "a".into(), parent: None, bag: bag(&[0, 1]) },
                TdNode { id: "b".into(), parent: Some(0), bag: bag(&[1, 2]) },
            ],
        };
        assert_eq!(validate_td(&p3, &good).unwrap(), TdReport { valid: true, width: 1, problems: vec![] });
        let broken = TreeDecomposition {
            nodes: vec![
                TdNode { id: "a".into(), parent: None, bag: bag(&[0, 1]) },
                TdNode { id: "b".into(), parent: Some(0), bag: bag(&[2]) },
                TdNode { id: "c".into(), parent: Some(1), bag: bag(&[0]) },
            ],
        };
        let r = validate_td(&p3, &broken).unwrap();
        assert!(!r.valid);
        assert_eq!(r.problems.len(), 2);
    }
}
