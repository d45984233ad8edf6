//! `H_{n,k}`-coalgebras `A → H_{n,k} A` and structured extended tree
//! decompositions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Deserialize;
use serde_json::json;

use crate::comonad::{build_hnk, classes_related, Class, ClassId, HellaStructure};
use crate::error::{Error, Result};
use crate::history::{flatten, is_structured, nk_history_to_json, Block, NKHistory};
use crate::structures::RelStructure;

use super::validate::validate_etd;
use super::{Bag, EtdNode, ExtendedTreeDecomposition};

/// `α(a) = [s_a | a]`; the counit law holds by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    pub n: usize,
    pub k: usize,
    pub assignment: Vec<NKHistory>,
}

impl Coalgebra {
    pub fn class(&self, a: usize) -> ClassId {
        Class { history: self.assignment[a].clone(), element: a }
    }

    pub fn depth(&self) -> usize {
        self.assignment.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// Every element at the empty history.
    pub fn embedding(a: &RelStructure, n: usize, k: usize) -> Self {
        Coalgebra { n, k, assignment: vec![Vec::new(); a.size()] }
    }

    pub fn to_json_value(&self, a: &RelStructure) -> serde_json::Value {
        json!({
            "grade": {"n": self.n, "k": self.k},
            "assignment": self.assignment.iter().enumerate().map(|(x, s)| json!({
                "element": a.id(x),
                "history": nk_history_to_json(s, a.universe()),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(a: &RelStructure, text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Grade {
            n: usize,
            k: usize,
        }
        #[derive(Deserialize)]
        struct Entry {
            element: String,
            history: Vec<Vec<(String, usize)>>,
        }
        #[derive(Deserialize)]
        struct Doc {
            grade: Grade,
            assignment: Vec<Entry>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let mut assignment: Vec<Option<NKHistory>> = vec![None; a.size()];
        for (i, e) in doc.assignment.into_iter().enumerate() {
            let path = format!("assignment[{i}]");
            let x = a.index_of(&e.element).ok_or_else(|| Error::validation(&path, format!("unknown element {:?}", e.element)))?;
            let mut s = Vec::with_capacity(e.history.len());
            for b in e.history {
                let mut block = Vec::with_capacity(b.len());
                for (name, p) in b {
                    let y = a.index_of(&name).ok_or_else(|| Error::validation(&path, format!("unknown element {name:?}")))?;
                    block.push((y, p));
                }
                s.push(block);
            }
            if assignment[x].replace(s).is_some() {
                return Err(Error::validation(path, format!("element {:?} assigned twice", e.element)));
            }
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(x, s)| s.ok_or_else(|| Error::validation("assignment", format!("element {:?} unassigned", a.id(x)))))
            .collect::<Result<_>>()?;
        Ok(Coalgebra { n: doc.grade.n, k: doc.grade.k, assignment })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoalgebraReport {
    pub depth: usize,
    /// Elements whose history is not a structured `n,k`-history.
    pub malformed: Vec<String>,
    /// Elements where `H α ∘ α` and `δ ∘ α` differ.
    pub comultiplication: Vec<String>,
    /// A related tuple whose image is unrelated.
    pub homomorphism: Option<String>,
}

impl CoalgebraReport {
    pub fn passed(&self) -> bool {
        self.malformed.is_empty() && self.comultiplication.is_empty() && self.homomorphism.is_none()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "passed": self.passed(),
            "depth": self.depth,
            "counit": true,
            "malformed": self.malformed,
            "comultiplication": self.comultiplication,
            "homomorphism": self.homomorphism,
        })
    }
}

pub fn check_coalgebra_laws(a: &RelStructure, alpha: &Coalgebra) -> CoalgebraReport {
    let (n, k) = (alpha.n, alpha.k);
    let mut rep = CoalgebraReport { depth: alpha.depth(), ..Default::default() };
    if alpha.assignment.len() != a.size() {
        rep.malformed.push(format!("{} assignments for {} elements", alpha.assignment.len(), a.size()));
        return rep;
    }
    for x in 0..a.size() {
        let s = &alpha.assignment[x];
        if !is_structured(s, n, k) || s.iter().flatten().any(|m| m.0 >= a.size()) {
            rep.malformed.push(a.id(x).to_string());
        }
    }
    if !rep.malformed.is_empty() {
        return rep;
    }
    for x in 0..a.size() {
        let c = alpha.class(x);
        if c.map(&|&b: &usize| alpha.class(b)) != c.comult(n) {
            rep.comultiplication.push(a.id(x).to_string());
        }
    }
    'outer: for (r, rel) in a.relations().iter().enumerate() {
        for t in rel {
            let img: Vec<ClassId> = t.iter().map(|&x| alpha.class(x)).collect();
            if !classes_related(a, r, &img, n, k) {
                let names: Vec<&str> = t.iter().map(|&x| a.id(x)).collect();
                rep.homomorphism = Some(format!("{}({})", a.signature().symbols()[r].name, names.join(",")));
                break 'outer;
            }
        }
    }
    rep
}

/// Classes of the latest placement of each pebble after playing `s`.
pub fn fixed_classes(s: &[Block], n: usize) -> Vec<ClassId> {
    let flat = flatten(s);
    let mut last: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, m) in flat.iter().enumerate() {
        last.insert(m.1, j);
    }
    let mut out: Vec<ClassId> = last.values().map(|&j| Class::of_history(&flat[..=j], n).expect("nonempty prefix")).collect();
    out.sort();
    out.dedup();
    out
}

fn history_label(s: &[Block], a: &RelStructure) -> String {
    let blocks: Vec<String> =
        s.iter().map(|b| b.iter().map(|&(x, p)| format!("{}:{p}", a.id(x))).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", blocks.join("|"))
}

/// Decomposition read off a coalgebra: one node per history `s_a`.
pub fn coalgebra_to_etd(a: &RelStructure, alpha: &Coalgebra) -> Result<ExtendedTreeDecomposition> {
    let rep = check_coalgebra_laws(a, alpha);
    if !rep.passed() {
        return Err(Error::Precondition(format!("coalgebra laws fail: {}", rep.to_json_value())));
    }
    let mut histories: BTreeSet<NKHistory> = BTreeSet::new();
    for s in &alpha.assignment {
        for l in 0..=s.len() {
            histories.insert(s[..l].to_vec());
        }
    }
    let by_class: HashMap<ClassId, usize> = (0..a.size()).map(|x| (alpha.class(x), x)).collect();
    let order: Vec<NKHistory> = {
        let mut v: Vec<NKHistory> = histories.into_iter().collect();
        v.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        v
    };
    let index: HashMap<&NKHistory, usize> = order.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let nodes = order
        .iter()
        .map(|s| EtdNode {
            id: history_label(s, a),
            parent: (!s.is_empty()).then(|| index[&s[..s.len() - 1].to_vec()]),
            beta: fixed_classes(s, alpha.n).iter().filter_map(|c| by_class.get(c).copied()).collect(),
            gamma: (0..a.size()).filter(|&x| alpha.assignment[x] == *s).collect(),
        })
        .collect();
    Ok(ExtendedTreeDecomposition { nodes })
}

/// A truncation of `H_{n,k} A` as a plain structure, with the decomposition
/// whose nodes are its histories.
pub struct HnkDecomposition {
    pub structure: RelStructure,
    pub etd: ExtendedTreeDecomposition,
    pub hella: HellaStructure,
}

pub fn etd_of_hnk(a: &RelStructure, n: usize, k: usize, m: usize) -> Result<HnkDecomposition> {
    let h = build_hnk(a, n, k, m)?;
    let skel = &h.skeleton;
    let label = |i: u32| {
        let c = skel.class(i);
        format!("{}{}", history_label(&c.history, a), a.id(c.element))
    };
    let universe: Vec<String> = (0..h.len() as u32).map(label).collect();
    let relations: Vec<Vec<Vec<usize>>> = (0..a.signature().len())
        .map(|r| {
            let mut v: Vec<Vec<usize>> = h.relation(r).into_iter().map(|t| t.into_iter().map(|x| x as usize).collect()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let structure = RelStructure::new(a.signature().clone(), universe, relations)?;
    let nodes = skel
        .histories
        .iter()
        .map(|s| EtdNode {
            id: history_label(s, a),
            parent: (!s.is_empty()).then(|| skel.hist_index[&s[..s.len() - 1].to_vec()] as usize),
            beta: fixed_classes(s, n).iter().map(|c| skel.id_of(c).expect("prefix classes are in the truncation") as usize).collect(),
            gamma: (0..a.size()).map(|x| skel.id_of(&Class { history: s.clone(), element: x }).unwrap() as usize).collect(),
        })
        .collect();
    Ok(HnkDecomposition { structure, etd: ExtendedTreeDecomposition { nodes }, hella: h })
}

struct Plan {
    history: NKHistory,
    iota: BTreeMap<usize, usize>,
    /// Fixed bag with the floating part removed.
    beta: Bag,
    new: Vec<usize>,
    /// Spare pebble duplicating the last new element, when one exists.
    spare: Option<usize>,
}

/// Coalgebra from a structured decomposition, following the pebble
/// bookkeeping along each root path.
pub fn etd_to_coalgebra(a: &RelStructure, d: &ExtendedTreeDecomposition, n: usize, k: usize) -> Result<Coalgebra> {
    let report = validate_etd(a, d, Some((n, k)))?;
    if !report.valid {
        return Err(Error::Precondition(format!("invalid extended decomposition: {}", report.problems.join("; "))));
    }
    if !report.structured {
        return Err(Error::Precondition(format!("decomposition is not structured at n={n}, k={k}")));
    }
    if report.width > k || report.arity.unwrap_or(0) > n {
        return Err(Error::Precondition(format!(
            "width {} and arity {} exceed k={k}, n={n}",
            report.width,
            report.arity.unwrap_or(0)
        )));
    }
    let shape = d.shape()?;
    let mut plans: Vec<Option<Plan>> = (0..d.nodes.len()).map(|_| None).collect();
    for &c in &shape.order {
        let beta: Bag = d.nodes[c].beta.difference(&d.nodes[c].gamma).copied().collect();
        let Some(c1) = shape.parent[c] else {
            plans[c] = Some(Plan { history: Vec::new(), iota: BTreeMap::new(), beta, new: Vec::new(), spare: None });
            continue;
        };
        let parent = plans[c1].as_ref().expect("parents are planned first");
        let new: Vec<usize> = d.nodes[c1].gamma.intersection(&beta).copied().collect();
        let retained: Bag = beta.intersection(&parent.beta).copied().collect();
        if new.len() + retained.len() != beta.len() {
            return Err(Error::Invariant(format!("fixed bag at {} is not new plus retained", d.nodes[c].id)));
        }
        let mut iota: BTreeMap<usize, usize> = retained.iter().map(|x| (*x, parent.iota[x])).collect();
        let forced = if shape.parent[c1].is_none() || parent.history.last().is_some_and(|b| b.len() == n) {
            None
        } else if let Some(p) = parent.spare {
            Some(p)
        } else if let Some(b) = parent.new.iter().find(|b| !retained.contains(b)) {
            Some(parent.iota[b])
        } else {
            return Err(Error::Invariant(format!("no pebble can open the block at {}", d.nodes[c].id)));
        };
        let mut block = Vec::with_capacity(new.len() + 1);
        let mut used: BTreeSet<usize> = iota.values().copied().collect();
        for (i, &b) in new.iter().enumerate() {
            let p = match forced {
                Some(p) if i == 0 => p,
                _ => (1..=k).find(|p| !used.contains(p) && Some(*p) != forced).ok_or_else(|| Error::Invariant("pebbles exhausted".into()))?,
            };
            used.insert(p);
            iota.insert(b, p);
            block.push((b, p));
        }
        let spare = (new.len() < n && beta.len() < k).then(|| (1..=k).find(|p| !used.contains(p))).flatten();
        if let Some(p) = spare {
            block.push((*new.last().expect("structured blocks are nonempty"), p));
        }
        let mut history = parent.history.clone();
        history.push(block);
        plans[c] = Some(Plan { history, iota, beta, new, spare });
    }
    let mut assignment = vec![Vec::new(); a.size()];
    for (t, node) in d.nodes.iter().enumerate() {
        for &x in &node.gamma {
            assignment[x] = plans[t].as_ref().unwrap().history.clone();
        }
    }
    Ok(Coalgebra { n, k, assignment })
}
