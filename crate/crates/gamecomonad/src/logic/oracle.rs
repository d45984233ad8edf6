//! Lindström quantifiers as bounded membership oracles.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::enumerate::structures_up_to_iso;
use crate::error::{Error, Result};
use crate::structures::{is_hom, iso_exists, search_total, RelStructure, RelSymbol, Signature, Tuple};

/// Morphism classes a quantifier's class may be closed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Closure {
    Hom,
    Inj,
    Surj,
    Bij,
    Iso,
}

impl Closure {
    pub fn name(self) -> &'static str {
        match self {
            Closure::Hom => "hom",
            Closure::Inj => "inj",
            Closure::Surj => "surj",
            Closure::Bij => "bij",
            Closure::Iso => "iso",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "hom" => Closure::Hom,
            "inj" => Closure::Inj,
            "surj" => Closure::Surj,
            "bij" => Closure::Bij,
            "iso" => Closure::Iso,
            _ => return Err(Error::Parse(format!("unknown closure class {s:?}"))),
        })
    }
}

impl fmt::Display for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type Membership = Arc<dyn Fn(&RelStructure) -> bool + Send + Sync>;
type MemoKey = (usize, Vec<BTreeSet<Tuple>>);

#[derive(Clone)]
pub struct QuantifierOracle {
    pub name: String,
    pub signature: Signature,
    /// Largest universe the oracle answers for.
    pub bound: usize,
    pub closure: Closure,
    membership: Membership,
    memo: Option<Arc<Mutex<HashMap<MemoKey, bool>>>>,
}

impl fmt::Debug for QuantifierOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantifierOracle")
            .field("name", &self.name)
            .field("signature", &self.signature)
            .field("bound", &self.bound)
            .field("closure", &self.closure)
            .finish()
    }
}

impl QuantifierOracle {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        bound: usize,
        closure: Closure,
        membership: impl Fn(&RelStructure) -> bool + Send + Sync + 'static,
    ) -> Self {
        QuantifierOracle {
            name: name.into(),
            signature,
            bound,
            closure,
            membership: Arc::new(membership),
            memo: Some(Arc::default()),
        }
    }

    /// Drops the membership cache; for oracles cheaper than a lookup.
    pub fn uncached(mut self) -> Self {
        self.memo = None;
        self
    }

    /// Largest relation arity; zero over the empty signature.
    pub fn arity(&self) -> usize {
        self.signature.max_arity()
    }

    pub fn contains(&self, s: &RelStructure) -> Result<bool> {
        if s.signature() != &self.signature {
            return Err(Error::Precondition(format!("{} expects a structure over its own signature", self.name)));
        }
        if s.size() > self.bound {
            return Err(Error::Resource(format!("oracle {} is bounded by {} elements, got {}", self.name, self.bound, s.size())));
        }
        let Some(memo) = &self.memo else {
            return Ok((self.membership)(s));
        };
        let key = (s.size(), s.relations().to_vec());
        if let Some(&v) = memo.lock().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let v = (self.membership)(s);
        memo.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "signature": self.signature.symbols(),
            "arity": self.arity(),
            "bound": self.bound,
            "closure": self.closure.name(),
        })
    }

    /// Compares membership on random relabellings of every structure up to `bound`.
    pub fn spot_check_invariance(&self, bound: usize, seed: u64) -> Result<Option<RelStructure>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for a in members_domain(&self.signature, bound.min(self.bound))? {
            let mut perm: Vec<usize> = (0..a.size()).collect();
            for _ in 0..3 {
                perm.shuffle(&mut rng);
                if self.contains(&a)? != self.contains(&a.permuted(&perm))? {
                    return Ok(Some(a));
                }
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, Default)]
pub struct OracleRegistry {
    /// Size bound handed to built-in oracles.
    pub bound: usize,
    custom: BTreeMap<String, QuantifierOracle>,
}

fn unary(names: &[&str]) -> Signature {
    Signature::of(&names.iter().map(|n| (*n, 1)).collect::<Vec<_>>())
}

fn nonempty(s: &RelStructure, r: usize) -> bool {
    !s.relation(r).is_empty()
}

impl OracleRegistry {
    pub fn builtin(bound: usize) -> Self {
        OracleRegistry { bound, custom: BTreeMap::new() }
    }

    pub fn register(&mut self, q: QuantifierOracle) {
        self.custom.insert(q.name.clone(), q);
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = ["exists", "forall", "exists_and", "exists_both", "exists_either"].map(String::from).to_vec();
        v.extend(["geq_m", "card_eq_m", "card_geq_m", "card_leq_m"].map(String::from));
        v.extend(self.custom.keys().cloned());
        v
    }

    /// Registered oracles first, then the built-ins: `exists`, `forall`,
    /// `geq_<m>`, `card_eq_<m>`, `card_geq_<m>`, `card_leq_<m>` and the
    /// two-predicate `exists_and`, `exists_both`, `exists_either`.
    pub fn get(&self, name: &str) -> Result<QuantifierOracle> {
        if let Some(q) = self.custom.get(name) {
            return Ok(q.clone());
        }
        let b = self.bound;
        let param = |prefix: &str| name.strip_prefix(prefix).and_then(|m| m.parse::<usize>().ok());
        let q = match name {
            "exists" => QuantifierOracle::new(name, unary(&["U"]), b, Closure::Hom, |s| nonempty(s, 0)),
            "forall" => QuantifierOracle::new(name, unary(&["U"]), b, Closure::Surj, |s| s.relation(0).len() == s.size()),
            "exists_and" => QuantifierOracle::new(name, unary(&["U1", "U2"]), b, Closure::Hom, |s| {
                s.relation(0).intersection(s.relation(1)).next().is_some()
            }),
            "exists_both" => QuantifierOracle::new(name, unary(&["U1", "U2"]), b, Closure::Hom, |s| nonempty(s, 0) && nonempty(s, 1)),
            "exists_either" => QuantifierOracle::new(name, unary(&["U1", "U2"]), b, Closure::Hom, |s| nonempty(s, 0) || nonempty(s, 1)),
            _ => {
                if let Some(m) = param("geq_") {
                    QuantifierOracle::new(name, unary(&["U"]), b, Closure::Inj, move |s| s.relation(0).len() >= m)
                } else if let Some(m) = param("card_eq_") {
                    cardinality_quantifiers(m, b)[0].clone()
                } else if let Some(m) = param("card_geq_") {
                    cardinality_quantifiers(m, b)[1].clone()
                } else if let Some(m) = param("card_leq_") {
                    cardinality_quantifiers(m, b)[2].clone()
                } else {
                    return Err(Error::Precondition(format!("no quantifier oracle named {name:?}")));
                }
            }
        };
        Ok(q.uncached())
    }
}

/// `B_m`, `I_m`, `S_m` over the empty signature: `|A| = m`, `|A| ≥ m`, `|A| ≤ m`.
pub fn cardinality_quantifiers(m: usize, bound: usize) -> [QuantifierOracle; 3] {
    let empty = Signature::default();
    [
        QuantifierOracle::new(format!("card_eq_{m}"), empty.clone(), bound, Closure::Bij, move |s| s.size() == m),
        QuantifierOracle::new(format!("card_geq_{m}"), empty.clone(), bound, Closure::Inj, move |s| s.size() >= m),
        QuantifierOracle::new(format!("card_leq_{m}"), empty, bound, Closure::Surj, move |s| s.size() <= m),
    ]
}

/// `τ`-structures `A` on the universe of `s` with `R^A ⊆ R^s` and the
/// complement of `R^A` inside `R_bar^s`, for the first `t` symbols of `s`.
fn complemented_reducts(base: &Signature, s: &RelStructure, t: usize) -> Vec<RelStructure> {
    let mut forced = Vec::new();
    let mut free = Vec::new();
    for r in 0..t {
        let mut must = Vec::new();
        let mut may = Vec::new();
        for x in crate::enumerate::all_tuples(s.size(), base.arity(r)) {
            match (s.holds(r, &x), s.holds(t + r, &x)) {
                (false, false) => return Vec::new(),
                (true, false) => must.push(x),
                (true, true) => may.push(x),
                (false, true) => {}
            }
        }
        forced.push(must);
        free.push(may);
    }
    let total: usize = free.iter().map(Vec::len).sum();
    let mut out = Vec::new();
    for mask in 0u64..1 << total {
        let mut bit = 0;
        let rels = (0..t)
            .map(|r| {
                let mut rel = forced[r].clone();
                for x in &free[r] {
                    if mask >> bit & 1 == 1 {
                        rel.push(x.clone());
                    }
                    bit += 1;
                }
                rel
            })
            .collect();
        out.push(RelStructure::from_indices(base.clone(), s.size(), rels).expect("reduct of a valid structure"));
    }
    out
}

/// `K′` over `τ ∪ {R_bar}`. On structures where every `R_bar` is the
/// complement of `R` this is membership of the `τ`-reduct in `K`; in
/// general it is the closure of that class under bijective homomorphisms,
/// so `s ∈ K′` when some `A ∈ K` on the same universe has `R^A ⊆ R^s` and
/// `A^r ∖ R^A ⊆ R_bar^s`.
pub fn negation_closure_lift(k: &QuantifierOracle) -> Result<QuantifierOracle> {
    let base = k.signature.clone();
    let mut symbols = base.symbols().to_vec();
    for s in base.symbols() {
        symbols.push(RelSymbol { name: format!("{}_bar", s.name), arity: s.arity });
    }
    let lifted = Signature::new(symbols)?;
    let inner = k.clone();
    let t = base.len();
    Ok(QuantifierOracle::new(format!("{}_lift", k.name), lifted, k.bound, Closure::Bij, move |s| {
        complemented_reducts(&base, s, t).iter().any(|a| inner.contains(a).unwrap_or(false))
    }))
}

/// Every `R_bar` is exactly the complement of `R`.
pub fn is_complemented(s: &RelStructure, t: usize) -> bool {
    (0..t).all(|r| {
        crate::enumerate::all_tuples(s.size(), s.signature().arity(r)).iter().all(|x| s.holds(r, x) != s.holds(t + r, x))
    })
}

/// Pointwise complement `K^c`; only isomorphism closure survives in general.
pub fn complement_query(k: &QuantifierOracle) -> QuantifierOracle {
    let inner = k.clone();
    QuantifierOracle::new(format!("not_{}", k.name), k.signature.clone(), k.bound, Closure::Iso, move |s| {
        !inner.contains(s).unwrap_or(true)
    })
}

/// Upper limit on (pair, candidate map) steps in one closure check.
pub const CLOSURE_STEP_BOUND: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub struct ClosureCounterexample {
    pub a: RelStructure,
    pub b: RelStructure,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub class: Closure,
    pub bound: usize,
    pub checked: usize,
    pub counterexample: Option<ClosureCounterexample>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "class": self.class.name(),
            "bound": self.bound,
            "checked": self.checked,
            "passed": self.passed(),
            "counterexample": self.counterexample.as_ref().map(|c| json!({
                "a": c.a.to_json_value(),
                "b": c.b.to_json_value(),
                "map": c.map,
            })),
        })
    }
}

fn members_domain(sig: &Signature, bound: usize) -> Result<Vec<RelStructure>> {
    let mut out = Vec::new();
    for n in 1..=bound {
        let slots: usize = sig.symbols().iter().map(|s| n.pow(s.arity as u32)).sum();
        if slots >= 24 {
            return Err(Error::Resource(format!("{slots} candidate tuples at size {n} is too many to enumerate")));
        }
        out.extend(structures_up_to_iso(sig, n));
    }
    Ok(out)
}

/// Every structure over `sig` with at most `bound` elements, up to isomorphism.
pub fn bounded_domain(sig: &Signature, bound: usize) -> Result<Vec<RelStructure>> {
    members_domain(sig, bound)
}

/// A surjective homomorphism `A → B`, by exhaustive search.
fn surjective_hom(a: &RelStructure, b: &RelStructure, steps: &mut u64) -> Result<Option<Vec<usize>>> {
    if b.size() > a.size() {
        return Ok(None);
    }
    let mut f = vec![0usize; a.size()];
    loop {
        *steps += 1;
        if *steps > CLOSURE_STEP_BOUND {
            return Err(Error::Resource("closure check exceeded its step bound".into()));
        }
        let mut hit = vec![false; b.size()];
        f.iter().for_each(|&y| hit[y] = true);
        if hit.iter().all(|&h| h) && is_hom(a, b, &f) {
            return Ok(Some(f));
        }
        let mut i = 0;
        while i < f.len() && f[i] + 1 == b.size() {
            f[i] = 0;
            i += 1;
        }
        if i == f.len() {
            return Ok(None);
        }
        f[i] += 1;
    }
}

fn morphism(a: &RelStructure, b: &RelStructure, class: Closure, steps: &mut u64) -> Result<Option<Vec<usize>>> {
    *steps += (a.size() * b.size()) as u64;
    if *steps > CLOSURE_STEP_BOUND {
        return Err(Error::Resource("closure check exceeded its step bound".into()));
    }
    Ok(match class {
        Closure::Hom => search_total(a, b, false, false),
        Closure::Inj => (a.size() <= b.size()).then(|| search_total(a, b, true, false)).flatten(),
        Closure::Bij => (a.size() == b.size()).then(|| search_total(a, b, true, false)).flatten(),
        Closure::Iso => iso_exists(a, b),
        Closure::Surj => return surjective_hom(a, b, steps),
    })
}

fn guard(steps: &mut u64) -> Result<()> {
    *steps += 1;
    if *steps > CLOSURE_STEP_BOUND {
        return Err(Error::Resource("closure check exceeded its step bound".into()));
    }
    Ok(())
}

/// One-step morphisms out of `a` that generate `class` under composition
/// with relabellings: adding a tuple, adding an isolated element, merging
/// two elements.
fn elementary_steps(a: &RelStructure, class: Closure, bound: usize) -> Vec<(RelStructure, Vec<usize>)> {
    let sig = a.signature().clone();
    let n = a.size();
    let rels = |s: &RelStructure| -> Vec<Vec<Tuple>> { s.relations().iter().map(|r| r.iter().cloned().collect()).collect() };
    let mut out = Vec::new();
    if class != Closure::Iso {
        for r in 0..sig.len() {
            for t in crate::enumerate::all_tuples(n, sig.arity(r)) {
                if !a.holds(r, &t) {
                    let mut rs = rels(a);
                    rs[r].push(t);
                    out.push((RelStructure::from_indices(sig.clone(), n, rs).expect("valid"), (0..n).collect()));
                }
            }
        }
    }
    if matches!(class, Closure::Hom | Closure::Inj) && n < bound {
        out.push((RelStructure::from_indices(sig.clone(), n + 1, rels(a)).expect("valid"), (0..n).collect()));
    }
    if matches!(class, Closure::Hom | Closure::Surj) {
        for i in 0..n {
            for j in i + 1..n {
                let f: Vec<usize> = (0..n).map(|x| if x == j { i } else if x > j { x - 1 } else { x }).collect();
                let rs = rels(a).into_iter().map(|r| r.into_iter().map(|t| t.iter().map(|&x| f[x]).collect()).collect()).collect();
                out.push((RelStructure::from_indices(sig.clone(), n - 1, rs).expect("valid"), f));
            }
        }
    }
    out
}

/// Exact check that `K ∋ A --f--> B` forces `B ∈ K` for every morphism `f`
/// of `class` between structures of at most `bound` elements. Every such
/// morphism factors through relabellings and elementary steps that stay
/// within the bound, so it suffices that membership is invariant under
/// relabelling and preserved by each step out of each member. Relabelling
/// is checked on every permutation for `iso` and spot-checked otherwise.
pub fn check_closure(oracle: &QuantifierOracle, class: Closure, bound: usize) -> Result<ClosureReport> {
    if bound > oracle.bound {
        return Err(Error::Resource(format!("bound {bound} exceeds the oracle's own bound {}", oracle.bound)));
    }
    if let Some(a) = oracle.spot_check_invariance(bound, 0)? {
        return Err(Error::Invariant(format!("{} is not invariant under relabelling on {}", oracle.name, a.to_json())));
    }
    let domain = members_domain(&oracle.signature, bound)?;
    let mut steps = 0u64;
    let mut checked = 0;
    for a in &domain {
        if !oracle.contains(a)? {
            continue;
        }
        let moves: Vec<(RelStructure, Vec<usize>)> = if class == Closure::Iso {
            crate::enumerate::permutations(a.size())
                .into_iter()
                .map(|p| {
                    let mut inv = vec![0; p.len()];
                    p.iter().enumerate().for_each(|(i, &x)| inv[x] = i);
                    (a.permuted(&p), inv)
                })
                .collect()
        } else {
            elementary_steps(a, class, bound)
        };
        for (b, map) in moves {
            guard(&mut steps)?;
            checked += 1;
            if !oracle.contains(&b)? {
                let counterexample = Some(ClosureCounterexample { a: a.clone(), b, map });
                return Ok(ClosureReport { class, bound, checked, counterexample });
            }
        }
    }
    Ok(ClosureReport { class, bound, checked, counterexample: None })
}

/// The same verdict as [`check_closure`] by trying every member against
/// every non-member. Only practical for small domains.
pub fn check_closure_exhaustive(oracle: &QuantifierOracle, class: Closure, bound: usize) -> Result<ClosureReport> {
    if bound > oracle.bound {
        return Err(Error::Resource(format!("bound {bound} exceeds the oracle's own bound {}", oracle.bound)));
    }
    if let Some(a) = oracle.spot_check_invariance(bound, 0)? {
        return Err(Error::Invariant(format!("{} is not invariant under relabelling on {}", oracle.name, a.to_json())));
    }
    let domain = members_domain(&oracle.signature, bound)?;
    let mut member = Vec::with_capacity(domain.len());
    for s in &domain {
        member.push(oracle.contains(s)?);
    }
    let mut steps = 0u64;
    let mut checked = 0;
    for (a, _) in domain.iter().zip(&member).filter(|(_, m)| **m) {
        for (b, _) in domain.iter().zip(&member).filter(|(_, m)| !**m) {
            checked += 1;
            if let Some(map) = morphism(a, b, class, &mut steps)? {
                let counterexample = Some(ClosureCounterexample { a: a.clone(), b: b.clone(), map });
                return Ok(ClosureReport { class, bound, checked, counterexample });
            }
        }
    }
    Ok(ClosureReport { class, bound, checked, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_oracles() {
        let [b, i, s] = cardinality_quantifiers(3, 4);
        let two = RelStructure::from_indices(Signature::default(), 2, vec![]).unwrap();
        assert!(!i.contains(&two).unwrap());
        assert!(s.contains(&two).unwrap() && !b.contains(&two).unwrap());
        assert!(check_closure(&i, Closure::Inj, 4).unwrap().passed());
        let r = check_closure(&s, Closure::Inj, 4).unwrap();
        let c = r.counterexample.unwrap();
        assert!(c.a.size() <= 3 && c.b.size() == 4);
        assert!(check_closure(&s, Closure::Surj, 4).unwrap().passed());
        for m in 1..=3 {
            let [b, _, _] = cardinality_quantifiers(m, 4);
            assert!(check_closure(&b, Closure::Bij, 4).unwrap().passed());
            assert!(!check_closure(&b, Closure::Inj, 4).unwrap().passed());
            // one element only maps onto one element
            assert_eq!(check_closure(&b, Closure::Surj, 4).unwrap().passed(), m == 1);
        }
    }

    #[test]
    fn builtin_closures() {
        let reg = OracleRegistry::builtin(4);
        let exists = reg.get("exists").unwrap();
        assert!(check_closure(&exists, Closure::Hom, 4).unwrap().passed());
        let forall = reg.get("forall").unwrap();
        assert!(check_closure(&forall, Closure::Surj, 4).unwrap().passed());
        let c = check_closure(&forall, Closure::Hom, 4).unwrap().counterexample.unwrap();
        assert!(c.b.relation(0).len() < c.b.size());
        assert!(check_closure(&reg.get("geq_2").unwrap(), Closure::Inj, 4).unwrap().passed());
        assert!(!check_closure(&reg.get("geq_2").unwrap(), Closure::Hom, 4).unwrap().passed());
        for name in ["exists_and", "exists_both", "exists_either"] {
            assert!(check_closure(&reg.get(name).unwrap(), Closure::Hom, 4).unwrap().passed(), "{name}");
        }
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn negation_lift_and_complement() {
        let has_edge = QuantifierOracle::new("has_edge", Signature::of(&[("E", 2)]), 3, Closure::Hom, |s| !s.relation(0).is_empty());
        let lifted = negation_closure_lift(&has_edge).unwrap();
        assert_eq!(lifted.signature.symbols()[1].name, "E_bar");
        assert!(check_closure(&lifted, Closure::Bij, 3).unwrap().passed());
        let sig = lifted.signature.clone();
        let good = RelStructure::from_indices(sig.clone(), 2, vec![vec![vec![0, 1]], vec![vec![0, 0], vec![1, 0], vec![1, 1]]]).unwrap();
        assert!(lifted.contains(&good).unwrap());
        let bad = RelStructure::from_indices(sig.clone(), 2, vec![vec![vec![0, 1]], vec![vec![0, 0]]]).unwrap();
        assert!(!lifted.contains(&bad).unwrap());
        // agrees with the base class wherever the bars are complements
        for s in bounded_domain(&sig, 2).unwrap().iter().filter(|s| is_complemented(s, 1)) {
            let reduct = RelStructure::from_indices(has_edge.signature.clone(), s.size(), vec![s.relation(0).iter().cloned().collect()]).unwrap();
            assert_eq!(lifted.contains(s).unwrap(), has_edge.contains(&reduct).unwrap());
        }
        let not = complement_query(&has_edge);
        for s in bounded_domain(&has_edge.signature, 2).unwrap() {
            assert_ne!(not.contains(&s).unwrap(), has_edge.contains(&s).unwrap());
        }
        assert_eq!(not.closure, Closure::Iso);
    }

    #[test]
    fn elementary_steps_agree_with_pairwise_search() {
        let reg = OracleRegistry::builtin(4);
        let edge = QuantifierOracle::new("edge", Signature::of(&[("E", 2)]), 4, Closure::Hom, |s| !s.relation(0).is_empty());
        let loopy = QuantifierOracle::new("loop", Signature::of(&[("E", 2)]), 4, Closure::Hom, |s| s.relation(0).iter().any(|t| t[0] == t[1]));
        let sym = QuantifierOracle::new("sym", Signature::of(&[("E", 2)]), 4, Closure::Iso, |s| s.relation(0).iter().all(|t| s.holds(0, &[t[1], t[0]])));
        let mut cases: Vec<(QuantifierOracle, usize)> = ["exists", "forall", "geq_2", "exists_and", "exists_both", "exists_either"]
            .iter()
            .map(|n| (reg.get(n).unwrap(), 3))
            .collect();
        cases.extend(cardinality_quantifiers(2, 4).map(|q| (q, 4)));
        cases.extend([(edge, 2), (loopy, 2), (sym, 2)]);
        for (q, bound) in cases {
            for class in [Closure::Hom, Closure::Inj, Closure::Surj, Closure::Bij, Closure::Iso] {
                let fast = check_closure(&q, class, bound).unwrap();
                let slow = check_closure_exhaustive(&q, class, bound).unwrap();
                assert_eq!(fast.passed(), slow.passed(), "{} {class}", q.name);
                if let Some(c) = fast.counterexample {
                    let hom = is_hom(&c.a, &c.b, &c.map);
                    assert!(hom && q.contains(&c.a).unwrap() && !q.contains(&c.b).unwrap(), "{} {class}", q.name);
                }
            }
        }
    }

    #[test]
    fn bounds_are_loud() {
        let reg = OracleRegistry::builtin(2);
        let three = RelStructure::from_indices(unary(&["U"]), 3, vec![vec![]]).unwrap();
        assert!(matches!(reg.get("exists").unwrap().contains(&three), Err(Error::Resource(_))));
        assert!(matches!(check_closure(&reg.get("exists").unwrap(), Closure::Hom, 3), Err(Error::Resource(_))));
        let wide = QuantifierOracle::new("t", Signature::of(&[("R", 3)]), 5, Closure::Hom, |_| true);
        assert!(matches!(check_closure(&wide, Closure::Hom, 3), Err(Error::Resource(_))));
    }
}
