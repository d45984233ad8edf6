//! Types of unary structures and the elimination of hom-closed unary
//! quantifiers in favour of `∃`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::error::{Error, Result};
use crate::structures::{hom_exists, RelStructure};

use super::formula::{Formula, Interpretation};
use super::oracle::{bounded_domain, check_closure, Closure, OracleRegistry, QuantifierOracle};

/// A set of unary symbol indices, sorted.
pub type AtomicType = Vec<usize>;
/// A `⊂`-antichain of atomic types, sorted.
pub type UType = Vec<AtomicType>;

/// The predicates holding at `a`.
pub fn atomic_type(c: &RelStructure, a: usize) -> AtomicType {
    (0..c.signature().len()).filter(|&r| c.holds(r, &[a])).collect()
}

fn is_subset(s: &[usize], t: &[usize]) -> bool {
    s.iter().all(|x| t.contains(x))
}

/// The `⊂`-maximal atomic types realised in `c`.
pub fn u_type(c: &RelStructure) -> UType {
    let types: BTreeSet<AtomicType> = (0..c.size()).map(|a| atomic_type(c, a)).collect();
    types.iter().filter(|t| !types.iter().any(|s| s != *t && is_subset(t, s))).cloned().collect()
}

/// Every type of `u` sits under some type realised in `c`.
fn dominated_by(u: &UType, c: &RelStructure) -> bool {
    let realised: Vec<AtomicType> = (0..c.size()).map(|a| atomic_type(c, a)).collect();
    u.iter().all(|t| realised.iter().any(|s| is_subset(t, s)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryTypeData {
    pub symbols: Vec<String>,
    pub qtype: Vec<UType>,
}

impl UnaryTypeData {
    /// Membership as predicted by the q-type.
    pub fn predicts(&self, c: &RelStructure) -> bool {
        self.qtype.iter().any(|u| dominated_by(u, c))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let name = |t: &AtomicType| t.iter().map(|&i| self.symbols[i].clone()).collect::<Vec<_>>();
        json!({
            "symbols": self.symbols,
            "qtype": self.qtype.iter().map(|u| u.iter().map(name).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// The q-type of a hom-closed class over unary symbols, read off its
/// `→`-minimal members of size at most `bound`. The result is checked
/// against the oracle on the whole bounded domain.
pub fn qtype_unary(oracle: &QuantifierOracle, bound: usize) -> Result<UnaryTypeData> {
    if oracle.signature.symbols().iter().any(|s| s.arity != 1) {
        return Err(Error::Precondition(format!("{} is not over unary symbols", oracle.name)));
    }
    if oracle.closure != Closure::Hom {
        return Err(Error::Precondition(format!("{} is declared {}-closed, not hom-closed", oracle.name, oracle.closure)));
    }
    let closure = check_closure(oracle, Closure::Hom, bound)?;
    if !closure.passed() {
        return Err(Error::Precondition(format!("{} fails hom closure up to {bound} elements", oracle.name)));
    }
    let domain = bounded_domain(&oracle.signature, bound)?;
    let mut members = Vec::new();
    for c in &domain {
        if oracle.contains(c)? {
            members.push(c);
        }
    }
    let minimal = members.iter().filter(|b| {
        !members.iter().any(|c| hom_exists(c, b).is_some() && hom_exists(b, c).is_none())
    });
    let qtype: BTreeSet<UType> = minimal.map(|b| u_type(b)).collect();
    let data = UnaryTypeData {
        symbols: oracle.signature.symbols().iter().map(|s| s.name.clone()).collect(),
        qtype: qtype.into_iter().collect(),
    };
    for c in &domain {
        if data.predicts(c) != oracle.contains(c)? {
            return Err(Error::Invariant(format!("q-type of {} mispredicts {}", oracle.name, c.to_json())));
        }
    }
    Ok(data)
}

fn conj(children: Vec<Formula>) -> Formula {
    let mut flat = Vec::new();
    for c in children {
        match c {
            Formula::And { children } => flat.extend(children),
            other => flat.push(other),
        }
    }
    if flat.len() == 1 {
        flat.pop().expect("one child")
    } else {
        Formula::And { children: flat }
    }
}

fn disj(mut children: Vec<Formula>) -> Formula {
    if children.len() == 1 {
        children.pop().expect("one child")
    } else {
        Formula::Or { children }
    }
}

struct Translator<'a> {
    reg: &'a OracleRegistry,
    bound: usize,
    cache: BTreeMap<String, UnaryTypeData>,
}

impl Translator<'_> {
    fn go(&mut self, phi: &Formula) -> Result<Formula> {
        Ok(match phi {
            Formula::Atom { .. } | Formula::Natom { .. } => phi.clone(),
            Formula::And { children } => Formula::And { children: children.iter().map(|c| self.go(c)).collect::<Result<_>>()? },
            Formula::Or { children } => Formula::Or { children: children.iter().map(|c| self.go(c)).collect::<Result<_>>()? },
            Formula::Quant { oracle, bound, interp } => {
                let interp: Vec<Interpretation> = interp
                    .iter()
                    .map(|i| Ok(Interpretation { body: self.go(&i.body)?, ..i.clone() }))
                    .collect::<Result<_>>()?;
                if oracle == "exists" {
                    return Ok(Formula::Quant { oracle: oracle.clone(), bound: bound.clone(), interp });
                }
                let q = self.reg.get(oracle)?;
                let [x] = bound.as_slice() else {
                    return Err(Error::Precondition(format!("{oracle} does not bind exactly one variable")));
                };
                if !self.cache.contains_key(oracle) {
                    let data = qtype_unary(&q, self.bound)?;
                    self.cache.insert(oracle.clone(), data);
                }
                let data = &self.cache[oracle];
                let body = |u: usize| {
                    let name = &q.signature.symbols()[u].name;
                    interp.iter().find(|i| &i.symbol == name).map(|i| i.body.clone()).ok_or_else(|| Error::Precondition(format!("{oracle} lacks {name}")))
                };
                let mut alternatives = Vec::new();
                for u in &data.qtype {
                    let mut parts = Vec::new();
                    for t in u {
                        if t.is_empty() {
                            // universes are nonempty
                            continue;
                        }
                        parts.push(Formula::exists(x, conj(t.iter().map(|&s| body(s)).collect::<Result<_>>()?)));
                    }
                    alternatives.push(conj(parts));
                }
                disj(alternatives)
            }
        })
    }
}

/// `⋁_{u ∈ q-type} ⋀_{t ∈ u} ∃x ⋀_{U ∈ t} ψ_U` for every quantifier node
/// other than `exists`, innermost first. Types up to `bound` elements decide
/// the q-types; `2^m` suffices over `m` symbols.
pub fn unary_to_existential(phi: &Formula, reg: &OracleRegistry, bound: usize) -> Result<Formula> {
    Translator { reg, bound, cache: BTreeMap::new() }.go(phi)
}
