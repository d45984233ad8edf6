//! Tree decompositions, extended tree decompositions and their correspondence
//! with `H_{n,k}`-coalgebras.

mod coalgebra;
mod convert;
mod dot;
mod search;
mod treewidth;
mod validate;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::structures::RelStructure;

pub use coalgebra::{
    check_coalgebra_laws, coalgebra_to_etd, etd_of_hnk, etd_to_coalgebra, fixed_classes, Coalgebra, CoalgebraReport,
    HnkDecomposition,
};
pub use convert::{etd_to_td, normalize_td, td_to_etd, with_empty_root};
pub use dot::{etd_to_dot, td_to_dot};
pub use search::{coalgebra_search, SEARCH_BOUND};
pub use treewidth::{gaifman_graph, treewidth_oracle, TREEWIDTH_BOUND};
pub use validate::{is_structured_etd, validate_etd, validate_td, EtdReport, TdReport};

pub type Bag = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdNode {
    pub id: String,
    pub parent: Option<usize>,
    pub bag: Bag,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    pub nodes: Vec<TdNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtdNode {
    pub id: String,
    pub parent: Option<usize>,
    pub beta: Bag,
    pub gamma: Bag,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExtendedTreeDecomposition {
    pub nodes: Vec<EtdNode>,
}

/// Rooted tree shape checked once: one root, parents in range, no cycles.
#[derive(Clone, Debug)]
pub struct Shape {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Top-down order.
    pub order: Vec<usize>,
    pub depth: Vec<usize>,
}

impl Shape {
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::validation("nodes", "decomposition has no nodes"));
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::validation("nodes", format!("expected one root, found {}", roots.len())));
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::validation(format!("nodes[{i}].parent"), "parent out of range"));
                }
                children[p].push(i);
            }
        }
        let root = roots[0];
        let mut order = vec![root];
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut head = 0;
        while head < order.len() {
            let t = order[head];
            head += 1;
            for &c in &children[t] {
                depth[c] = depth[t] + 1;
                order.push(c);
            }
        }
        if order.len() != n {
            return Err(Error::validation("nodes", "parent links contain a cycle"));
        }
        Ok(Shape { root, parent, children, order, depth })
    }

    /// `a ≤ b` in the tree order.
    pub fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has a parent");
        }
        a == b
    }

    /// Strict ancestors of `t`, nearest first.
    pub fn ancestors(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.parent[t], move |&p| self.parent[p])
    }
}

#[derive(Serialize, Deserialize)]
struct TdNodeDoc {
    id: serde_json::Value,
    #[serde(default)]
    parent: Option<serde_json::Value>,
    bag: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TdDoc {
    nodes: Vec<TdNodeDoc>,
}

#[derive(Serialize, Deserialize)]
struct EtdNodeDoc {
    id: serde_json::Value,
    #[serde(default)]
    parent: Option<serde_json::Value>,
    #[serde(default)]
    beta: Vec<String>,
    #[serde(default)]
    gamma: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EtdDoc {
    nodes: Vec<EtdNodeDoc>,
}

fn id_string(v: &serde_json::Value, path: &str) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::validation(path, "node id must be a string or a number")),
    }
}

fn node_index(ids: &[String]) -> Result<HashMap<&str, usize>> {
    let mut index = HashMap::new();
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            return Err(Error::validation(format!("nodes[{i}].id"), format!("duplicate node id {id:?}")));
        }
    }
    Ok(index)
}

fn parent_index(parent: &Option<serde_json::Value>, index: &HashMap<&str, usize>, path: &str) -> Result<Option<usize>> {
    match parent {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(v) => {
            let p = id_string(v, path)?;
            index.get(p.as_str()).copied().map(Some).ok_or_else(|| Error::validation(path, format!("unknown parent {p:?}")))
        }
    }
}

fn element_set(a: &RelStructure, names: &[String], path: &str) -> Result<Bag> {
    names
        .iter()
        .enumerate()
        .map(|(j, x)| a.index_of(x).ok_or_else(|| Error::validation(format!("{path}[{j}]"), format!("unknown element {x:?}"))))
        .collect()
}

fn names(a: &RelStructure, set: &Bag) -> Vec<String> {
    set.iter().map(|&x| a.id(x).to_string()).collect()
}

impl TreeDecomposition {
    pub fn shape(&self) -> Result<Shape> {
        Shape::new(self.nodes.iter().map(|n| n.parent).collect())
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn from_json(a: &RelStructure, text: &str) -> Result<Self> {
        let doc: TdDoc = serde_json::from_str(text)?;
        let ids = doc.nodes.iter().enumerate().map(|(i, n)| id_string(&n.id, &format!("nodes[{i}].id"))).collect::<Result<Vec<_>>>()?;
        let index = node_index(&ids)?;
        let mut nodes = Vec::with_capacity(ids.len());
        for (i, n) in doc.nodes.iter().enumerate() {
            nodes.push(TdNode {
                id: ids[i].clone(),
                parent: parent_index(&n.parent, &index, &format!("nodes[{i}].parent"))?,
                bag: element_set(a, &n.bag, &format!("nodes[{i}].bag"))?,
            });
        }
        let td = TreeDecomposition { nodes };
        td.shape()?;
        Ok(td)
    }

    pub fn to_json_value(&self, a: &RelStructure) -> serde_json::Value {
        json!({"nodes": self.nodes.iter().map(|n| json!({
            "id": n.id,
            "parent": n.parent.map(|p| self.nodes[p].id.clone()),
            "bag": names(a, &n.bag),
        })).collect::<Vec<_>>()})
    }
}

impl ExtendedTreeDecomposition {
    pub fn shape(&self) -> Result<Shape> {
        Shape::new(self.nodes.iter().map(|n| n.parent).collect())
    }

    pub fn bag(&self, t: usize) -> Bag {
        self.nodes[t].beta.union(&self.nodes[t].gamma).copied().collect()
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.beta.len()).max().unwrap_or(0)
    }

    pub fn from_json(a: &RelStructure, text: &str) -> Result<Self> {
        let doc: EtdDoc = serde_json::from_str(text)?;
        let ids = doc.nodes.iter().enumerate().map(|(i, n)| id_string(&n.id, &format!("nodes[{i}].id"))).collect::<Result<Vec<_>>>()?;
        let index = node_index(&ids)?;
        let mut nodes = Vec::with_capacity(ids.len());
        for (i, n) in doc.nodes.iter().enumerate() {
            nodes.push(EtdNode {
                id: ids[i].clone(),
                parent: parent_index(&n.parent, &index, &format!("nodes[{i}].parent"))?,
                beta: element_set(a, &n.beta, &format!("nodes[{i}].beta"))?,
                gamma: element_set(a, &n.gamma, &format!("nodes[{i}].gamma"))?,
            });
        }
        let etd = ExtendedTreeDecomposition { nodes };
        etd.shape()?;
        Ok(etd)
    }

    pub fn to_json_value(&self, a: &RelStructure) -> serde_json::Value {
        json!({"nodes": self.nodes.iter().map(|n| json!({
            "id": n.id,
            "parent": n.parent.map(|p| self.nodes[p].id.clone()),
            "beta": names(a, &n.beta),
            "gamma": names(a, &n.gamma),
        })).collect::<Vec<_>>()})
    }

    /// Single node with empty fixed bag and everything floating.
    pub fn trivial(a: &RelStructure) -> Self {
        ExtendedTreeDecomposition {
            nodes: vec![EtdNode { id: "root".into(), parent: None, beta: Bag::new(), gamma: (0..a.size()).collect() }],
        }
    }
}
