//! Signatures, finite relational structures and partial maps between them.
//!
//! Elements are addressed by their position in the universe list. That
//! position order is the canonical iteration order for every search in the
//! crate, so all witnesses are reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Tuple = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelSymbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<RelSymbol>,
}

impl Signature {
    pub fn new(symbols: Vec<RelSymbol>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (i, s) in symbols.iter().enumerate() {
            if s.name.is_empty() {
                return Err(Error::validation(format!("signature[{i}].name"), "empty name"));
            }
            if s.arity == 0 {
                return Err(Error::validation(format!("signature[{i}].arity"), "arity must be positive"));
            }
            if !seen.insert(s.name.clone()) {
                return Err(Error::validation(
                    format!("signature[{i}].name"),
                    format!("duplicate relation name {:?}", s.name),
                ));
            }
        }
        Ok(Signature { symbols })
    }

    /// Convenience constructor from `(name, arity)` pairs; panics on invalid input.
    pub fn of(pairs: &[(&str, usize)]) -> Self {
        Signature::new(
            pairs
                .iter()
                .map(|(n, a)| RelSymbol { name: n.to_string(), arity: *a })
                .collect(),
        )
        .expect("valid signature")
    }

    pub fn symbols(&self) -> &[RelSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, r: usize) -> usize {
        self.symbols[r].arity
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }
}

/// Dense membership table, used when `|A|^arity` is small.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Dense {
    bits: Vec<u64>,
}

impl Dense {
    fn get(&self, i: usize) -> bool {
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }
}

const DENSE_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelStructure {
    signature: Signature,
    universe: Vec<String>,
    relations: Vec<BTreeSet<Tuple>>,
    dense: Vec<Option<Dense>>,
}

impl RelStructure {
    pub fn new(signature: Signature, universe: Vec<String>, relations: Vec<Vec<Tuple>>) -> Result<Self> {
        if universe.is_empty() {
            return Err(Error::validation("universe", "universe must be nonempty"));
        }
        let mut seen = BTreeSet::new();
        for (i, id) in universe.iter().enumerate() {
            if !seen.insert(id.as_str()) {
                return Err(Error::validation(format!("universe[{i}]"), format!("duplicate id {id:?}")));
            }
        }
        if relations.len() != signature.len() {
            return Err(Error::validation("relations", "one tuple list per relation symbol expected"));
        }
        let mut rels = Vec::with_capacity(relations.len());
        for (r, tuples) in relations.into_iter().enumerate() {
            let sym = &signature.symbols()[r];
            let mut set = BTreeSet::new();
            for (ti, t) in tuples.into_iter().enumerate() {
                if t.len() != sym.arity {
                    return Err(Error::validation(
                        format!("relations.{}[{ti}]", sym.name),
                        format!("arity mismatch: expected {}, got {}", sym.arity, t.len()),
                    ));
                }
                if let Some(bad) = t.iter().find(|&&x| x >= universe.len()) {
                    return Err(Error::validation(
                        format!("relations.{}[{ti}]", sym.name),
                        format!("element index {bad} outside universe"),
                    ));
                }
                set.insert(t);
            }
            rels.push(set);
        }
        let mut s = RelStructure { signature, universe, relations: rels, dense: Vec::new() };
        s.rebuild_dense();
        Ok(s)
    }

    fn rebuild_dense(&mut self) {
        let n = self.universe.len();
        self.dense = self
            .relations
            .iter()
            .enumerate()
            .map(|(r, set)| {
                let ar = self.signature.arity(r) as u32;
                let size = n.checked_pow(ar).filter(|&s| s <= DENSE_LIMIT)?;
                let mut bits = vec![0u64; size.div_ceil(64).max(1)];
                for t in set {
                    let i = encode_tuple(t, n);
                    bits[i >> 6] |= 1 << (i & 63);
                }
                Some(Dense { bits })
            })
            .collect();
    }

    /// Structure with elements named `0..n` from tuple lists given in signature order.
    pub fn from_indices(signature: Signature, n: usize, relations: Vec<Vec<Tuple>>) -> Result<Self> {
        RelStructure::new(signature, (0..n).map(|i| i.to_string()).collect(), relations)
    }

    /// Graph over the single binary relation `E`, with both orientations of every edge.
    pub fn undirected_graph(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut tuples = Vec::new();
        for &(a, b) in edges {
            tuples.push(vec![a, b]);
            tuples.push(vec![b, a]);
        }
        RelStructure::from_indices(Signature::of(&[("E", 2)]), n, vec![tuples]).expect("valid graph")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn id(&self, i: usize) -> &str {
        &self.universe[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.universe.iter().position(|u| u == id)
    }

    pub fn relation(&self, r: usize) -> &BTreeSet<Tuple> {
        &self.relations[r]
    }

    pub fn relations(&self) -> &[BTreeSet<Tuple>] {
        &self.relations
    }

    pub fn holds(&self, r: usize, t: &[usize]) -> bool {
        match &self.dense[r] {
            Some(d) => d.get(encode_tuple(t, self.universe.len())),
            None => self.relations[r].contains(t),
        }
    }

    /// Total number of related tuples over all relations.
    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(|r| r.len()).sum()
    }

    /// Binary signature with relations symmetric and irreflexive.
    pub fn is_simple_graph(&self) -> bool {
        self.signature.len() == 1
            && self.signature.arity(0) == 2
            && self.relations[0].iter().all(|t| t[0] != t[1] && self.holds(0, &[t[1], t[0]]))
    }

    pub fn with_identity(&self) -> Result<Self> {
        if self.signature.index_of("I").is_some() {
            return Err(Error::Precondition("relation name \"I\" already in signature".into()));
        }
        let mut symbols = self.signature.symbols().to_vec();
        symbols.push(RelSymbol { name: "I".into(), arity: 2 });
        let mut rels: Vec<Vec<Tuple>> = self.relations.iter().map(|s| s.iter().cloned().collect()).collect();
        rels.push((0..self.size()).map(|a| vec![a, a]).collect());
        RelStructure::new(Signature::new(symbols)?, self.universe.clone(), rels)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StructureDoc = serde_json::from_str(text)?;
        doc.into_structure()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(StructureDoc::from(self)).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StructureDoc::from(self)).expect("serializable")
    }

    /// Relabel: element `i` of the result is element `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let rels = self
            .relations
            .iter()
            .map(|set| set.iter().map(|t| t.iter().map(|&x| inv[x]).collect()).collect())
            .collect();
        let universe = perm.iter().map(|&p| self.universe[p].clone()).collect();
        RelStructure::new(self.signature.clone(), universe, rels).expect("permutation preserves validity")
    }
}

fn encode_tuple(t: &[usize], n: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * n + x)
}

#[derive(Serialize, Deserialize)]
struct StructureDoc {
    signature: Vec<RelSymbol>,
    universe: Vec<String>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<String>>>,
}

impl StructureDoc {
    fn into_structure(self) -> Result<RelStructure> {
        let signature = Signature::new(self.signature)?;
        if self.universe.is_empty() {
            return Err(Error::validation("universe", "universe must be nonempty"));
        }
        let mut index = HashMap::new();
        for (i, id) in self.universe.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::validation(format!("universe[{i}]"), format!("duplicate id {id:?}")));
            }
        }
        let mut rels = vec![Vec::new(); signature.len()];
        for (name, tuples) in self.relations {
            let r = signature
                .index_of(&name)
                .ok_or_else(|| Error::validation(format!("relations.{name}"), "unknown relation"))?;
            for (ti, t) in tuples.into_iter().enumerate() {
                let path = format!("relations.{name}[{ti}]");
                if t.len() != signature.arity(r) {
                    return Err(Error::validation(
                        path,
                        format!("arity mismatch: expected {}, got {}", signature.arity(r), t.len()),
                    ));
                }
                let mut idx = Vec::with_capacity(t.len());
                for (j, id) in t.iter().enumerate() {
                    match index.get(id) {
                        Some(&i) => idx.push(i),
                        None => return Err(Error::validation(format!("{path}[{j}]"), format!("unknown element {id:?}"))),
                    }
                }
                rels[r].push(idx);
            }
        }
        RelStructure::new(signature, self.universe, rels)
    }
}

impl From<&RelStructure> for StructureDoc {
    fn from(s: &RelStructure) -> Self {
        let relations = s
            .signature
            .symbols()
            .iter()
            .zip(&s.relations)
            .map(|(sym, set)| {
                let tuples = set.iter().map(|t| t.iter().map(|&x| s.universe[x].clone()).collect()).collect();
                (sym.name.clone(), tuples)
            })
            .collect();
        StructureDoc { signature: s.signature.symbols().to_vec(), universe: s.universe.clone(), relations }
    }
}

pub fn load_structure(text: &str) -> Result<RelStructure> {
    RelStructure::from_json(text)
}

/// A partial map from the universe of a source structure into a target,
/// stored as one optional image per source element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialHom {
    img: Vec<Option<usize>>,
}

impl PartialHom {
    pub fn empty(source_size: usize) -> Self {
        PartialHom { img: vec![None; source_size] }
    }

    pub fn from_pairs(source_size: usize, pairs: &[(usize, usize)]) -> Self {
        let mut m = PartialHom::empty(source_size);
        for &(a, b) in pairs {
            m.img[a] = Some(b);
        }
        m
    }

    pub fn from_images(img: Vec<Option<usize>>) -> Self {
        PartialHom { img }
    }

    pub fn total(f: &[usize]) -> Self {
        PartialHom { img: f.iter().map(|&b| Some(b)).collect() }
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.img
    }

    pub fn get(&self, a: usize) -> Option<usize> {
        self.img[a]
    }

    pub fn set(&mut self, a: usize, b: Option<usize>) {
        self.img[a] = b;
    }

    pub fn len(&self) -> usize {
        self.img.iter().filter(|x| x.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.img.iter().all(|x| x.is_none())
    }

    pub fn source_size(&self) -> usize {
        self.img.len()
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.img.len()).filter(|&a| self.img[a].is_some()).collect()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.img.iter().enumerate().filter_map(|(a, b)| b.map(|b| (a, b))).collect()
    }

    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut m = PartialHom::empty(self.img.len());
        for &a in keep {
            m.img[a] = self.img[a];
        }
        m
    }

    /// `self ⊆ other` as sets of pairs.
    pub fn is_restriction_of(&self, other: &PartialHom) -> bool {
        self.img.iter().zip(&other.img).all(|(x, y)| x.is_none() || x == y)
    }

    pub fn to_json_value(&self, a: &RelStructure, b: &RelStructure) -> serde_json::Value {
        let m: serde_json::Map<String, serde_json::Value> = self
            .pairs()
            .into_iter()
            .map(|(x, y)| (a.id(x).to_string(), serde_json::Value::String(b.id(y).to_string())))
            .collect();
        serde_json::Value::Object(m)
    }
}

/// Atom preservation (and reflection when `preserve_negations`) on tuples
/// lying entirely inside the domain of `m`.
pub fn is_partial_hom(a: &RelStructure, b: &RelStructure, m: &PartialHom, preserve_negations: bool) -> Result<bool> {
    if m.source_size() != a.size() {
        return Err(Error::Precondition("partial map source size differs from source universe".into()));
    }
    if let Some(bad) = m.img.iter().flatten().find(|&&y| y >= b.size()) {
        return Err(Error::Precondition(format!("image {bad} outside target universe")));
    }
    Ok(partial_hom_unchecked(a, b, m.images(), preserve_negations))
}

pub(crate) fn partial_hom_unchecked(a: &RelStructure, b: &RelStructure, img: &[Option<usize>], neg: bool) -> bool {
    let dom: Vec<usize> = (0..img.len()).filter(|&x| img[x].is_some()).collect();
    if dom.is_empty() {
        return true;
    }
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for r in 0..a.signature().len() {
        let ar = a.signature().arity(r);
        let count = dom.len().pow(ar as u32);
        for mut c in 0..count {
            src.clear();
            dst.clear();
            for _ in 0..ar {
                let x = dom[c % dom.len()];
                c /= dom.len();
                src.push(x);
                dst.push(img[x].unwrap());
            }
            let in_a = a.holds(r, &src);
            let in_b = b.holds(r, &dst);
            if in_a && !in_b {
                return false;
            }
            if neg && in_b && !in_a {
                return false;
            }
        }
    }
    true
}

/// All partial homomorphisms with at most `k` domain elements, ordered by
/// domain size and then lexicographically.
pub fn enumerate_partial_maps(a: &RelStructure, b: &RelStructure, k: usize, x_n: bool) -> Vec<PartialHom> {
    let mut out = Vec::new();
    let n = a.size();
    let mut img = vec![None; n];
    fn rec(
        a: &RelStructure,
        b: &RelStructure,
        x_n: bool,
        pos: usize,
        left: usize,
        img: &mut Vec<Option<usize>>,
        out: &mut Vec<PartialHom>,
    ) {
        if pos == img.len() {
            if partial_hom_unchecked(a, b, img, x_n) {
                out.push(PartialHom { img: img.clone() });
            }
            return;
        }
        rec(a, b, x_n, pos + 1, left, img, out);
        if left > 0 {
            for y in 0..b.size() {
                img[pos] = Some(y);
                if partial_hom_unchecked(a, b, img, x_n) {
                    rec(a, b, x_n, pos + 1, left - 1, img, out);
                }
            }
            img[pos] = None;
        }
    }
    rec(a, b, x_n, 0, k.min(n), &mut img, &mut out);
    out.sort_by(|p, q| p.len().cmp(&q.len()).then_with(|| p.cmp(q)));
    out
}

/// Lexicographically least total homomorphism, if any.
pub fn hom_exists(a: &RelStructure, b: &RelStructure) -> Option<Vec<usize>> {
    search_total(a, b, false, false)
}

/// Lexicographically least isomorphism, if any.
pub fn iso_exists(a: &RelStructure, b: &RelStructure) -> Option<Vec<usize>> {
    if a.size() != b.size() || a.signature() != b.signature() {
        return None;
    }
    if a.relations().iter().zip(b.relations()).any(|(x, y)| x.len() != y.len()) {
        return None;
    }
    search_total(a, b, true, true)
}

/// Backtracking over total maps in lexicographic order, checking each
/// tuple as soon as all its entries are assigned.
pub(crate) fn search_total(a: &RelStructure, b: &RelStructure, injective: bool, reflect: bool) -> Option<Vec<usize>> {
    let n = a.size();
    // tuples of A whose largest element is i get checked once i is assigned
    let mut due: Vec<Vec<(usize, &Tuple)>> = vec![Vec::new(); n];
    for r in 0..a.signature().len() {
        for t in a.relation(r) {
            due[*t.iter().max().unwrap()].push((r, t));
        }
    }
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; b.size()];
    let mut buf = Vec::new();
    fn ok_at(
        a: &RelStructure,
        b: &RelStructure,
        i: usize,
        img: &[usize],
        due: &[Vec<(usize, &Tuple)>],
        reflect: bool,
        buf: &mut Vec<usize>,
    ) -> bool {
        for &(r, t) in &due[i] {
            buf.clear();
            buf.extend(t.iter().map(|&x| img[x]));
            if !b.holds(r, buf) {
                return false;
            }
        }
        if reflect {
            // images of assigned elements; a B-tuple among them must come from an A-tuple
            for r in 0..a.signature().len() {
                let ar = a.signature().arity(r);
                let count = (i + 1).pow(ar as u32);
                let mut src = vec![0; ar];
                for mut c in 0..count {
                    let mut has_i = false;
                    for s in src.iter_mut() {
                        *s = c % (i + 1);
                        c /= i + 1;
                        has_i |= *s == i;
                    }
                    if !has_i {
                        continue;
                    }
                    buf.clear();
                    buf.extend(src.iter().map(|&x| img[x]));
                    if b.holds(r, buf) && !a.holds(r, &src) {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn rec(
        a: &RelStructure,
        b: &RelStructure,
        i: usize,
        img: &mut Vec<usize>,
        used: &mut Vec<bool>,
        due: &[Vec<(usize, &Tuple)>],
        injective: bool,
        reflect: bool,
        buf: &mut Vec<usize>,
    ) -> bool {
        if i == img.len() {
            return true;
        }
        for y in 0..b.size() {
            if injective && used[y] {
                continue;
            }
            img[i] = y;
            if ok_at(a, b, i, img, due, reflect, buf) {
                used[y] = true;
                if rec(a, b, i + 1, img, used, due, injective, reflect, buf) {
                    return true;
                }
                used[y] = false;
            }
        }
        img[i] = usize::MAX;
        false
    }
    if rec(a, b, 0, &mut img, &mut used, &due, injective, reflect, &mut buf) {
        Some(img)
    } else {
        None
    }
}

/// Checks that a total map is a homomorphism.
pub fn is_hom(a: &RelStructure, b: &RelStructure, f: &[usize]) -> bool {
    let mut buf = Vec::new();
    (0..a.signature().len()).all(|r| {
        a.relation(r).iter().all(|t| {
            buf.clear();
            buf.extend(t.iter().map(|&x| f[x]));
            b.holds(r, &buf)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> RelStructure {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        RelStructure::undirected_graph(n, &e)
    }

    const K2_DOC: &str = r#"{"signature":[{"name":"E","arity":2}], "universe":["a","b"], "relations":{"E":[["a","b"],["b","a"]]}}"#;

    #[test]
    fn loads_k2() {
        let s = load_structure(K2_DOC).unwrap();
        assert_eq!(s.size(), 2);
        assert!(s.holds(0, &[0, 1]));
        assert!(!s.holds(0, &[0, 0]));
        let again = load_structure(&s.to_json()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn load_errors_name_paths() {
        let bad = r#"{"signature":[{"name":"E","arity":2}], "universe":["a","b"], "relations":{"E":[["a","b","a"]]}}"#;
        match load_structure(bad) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "relations.E[0]"),
            other => panic!("{other:?}"),
        }
        let empty = r#"{"signature":[], "universe":[], "relations":{}}"#;
        assert!(matches!(load_structure(empty), Err(Error::Validation { .. })));
        let dup = r#"{"signature":[], "universe":["a","a"]}"#;
        assert!(matches!(load_structure(dup), Err(Error::Validation { .. })));
        let unknown = r#"{"signature":[], "universe":["a"], "relations":{"F":[]}}"#;
        assert!(matches!(load_structure(unknown), Err(Error::Validation { .. })));
        assert!(matches!(load_structure("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn identity_extension() {
        let s = k(2).with_identity().unwrap();
        let i = s.signature().index_of("I").unwrap();
        assert_eq!(s.relation(i).len(), 2);
        assert!(s.holds(i, &[1, 1]));
        assert!(s.with_identity().is_err());
        let one = RelStructure::from_indices(Signature::default(), 1, vec![]).unwrap();
        assert_eq!(one.with_identity().unwrap().tuple_count(), 1);
    }

    #[test]
    fn partial_hom_checks() {
        let (k3, k2) = (k(3), k(2));
        assert!(is_partial_hom(&k3, &k2, &PartialHom::empty(3), true).unwrap());
        let edge = PartialHom::from_pairs(3, &[(0, 0), (1, 1)]);
        assert!(is_partial_hom(&k3, &k2, &edge, false).unwrap());
        assert!(is_partial_hom(&k3, &k2, &edge, true).unwrap());
        let collapse = PartialHom::from_pairs(2, &[(0, 0), (1, 0)]);
        assert!(!is_partial_hom(&k2, &k2, &collapse, false).unwrap());
        let out_of_range = PartialHom::from_pairs(2, &[(0, 5)]);
        assert!(is_partial_hom(&k2, &k2, &out_of_range, false).is_err());
    }

    #[test]
    fn partial_map_counts() {
        let one = RelStructure::from_indices(Signature::default(), 1, vec![]).unwrap();
        assert_eq!(enumerate_partial_maps(&one, &one, 1, false).len(), 2);
        // 1 empty + 6 singletons + 3 domains x 2 edge-to-edge maps
        assert_eq!(enumerate_partial_maps(&k(3), &k(2), 2, false).len(), 13);
        assert_eq!(enumerate_partial_maps(&k(3), &k(2), 2, true).len(), 13);
    }

    #[test]
    fn hom_and_iso() {
        assert_eq!(hom_exists(&k(2), &k(3)), Some(vec![0, 1]));
        assert_eq!(hom_exists(&k(3), &k(2)), None);
        assert!(hom_exists(&k(3), &k(3)).is_some());
        let c6 = RelStructure::undirected_graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let two_c3 = RelStructure::undirected_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert!(iso_exists(&c6, &two_c3).is_none());
        assert!(iso_exists(&c6, &c6.permuted(&[3, 1, 4, 0, 5, 2])).is_some());
        assert!(iso_exists(&k(2), &k(3)).is_none());
    }
}
