//! Quantifier-free infinitary formulas over finite lists, extended by
//! generalised quantifier nodes.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameVariant;
use crate::structures::{PartialHom, RelStructure, Signature};

use super::oracle::{Closure, OracleRegistry, QuantifierOracle};

/// `ψ_T(x̄_T, ȳ_T)`: the bound variables `vars` range over the tuple of `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub symbol: String,
    pub vars: Vec<String>,
    pub body: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Formula {
    Atom { rel: String, args: Vec<String> },
    Natom { rel: String, args: Vec<String> },
    And { children: Vec<Formula> },
    Or { children: Vec<Formula> },
    Quant { oracle: String, bound: Vec<String>, interp: Vec<Interpretation> },
}

impl Formula {
    pub fn atom(rel: &str, args: &[&str]) -> Self {
        Formula::Atom { rel: rel.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn natom(rel: &str, args: &[&str]) -> Self {
        Formula::Natom { rel: rel.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn and(children: Vec<Formula>) -> Self {
        Formula::And { children }
    }

    pub fn or(children: Vec<Formula>) -> Self {
        Formula::Or { children }
    }

    pub fn truth() -> Self {
        Formula::And { children: Vec::new() }
    }

    /// `Q x. (ψ_{U_1}(x), ..., ψ_{U_m}(x))` for a unary oracle in signature order.
    pub fn unary(oracle: &QuantifierOracle, x: &str, bodies: Vec<Formula>) -> Self {
        Formula::Quant {
            oracle: oracle.name.clone(),
            bound: vec![x.into()],
            interp: oracle
                .signature
                .symbols()
                .iter()
                .zip(bodies)
                .map(|(s, body)| Interpretation { symbol: s.name.clone(), vars: vec![x.into()], body })
                .collect(),
        }
    }

    pub fn exists(x: &str, body: Formula) -> Self {
        Formula::Quant {
            oracle: "exists".into(),
            bound: vec![x.into()],
            interp: vec![Interpretation { symbol: "U".into(), vars: vec![x.into()], body }],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Atom { args, .. } | Formula::Natom { args, .. } => args.iter().cloned().collect(),
            Formula::And { children } | Formula::Or { children } => children.iter().flat_map(|c| c.free_vars()).collect(),
            Formula::Quant { bound, interp, .. } => {
                interp.iter().flat_map(|i| i.body.free_vars()).filter(|v| !bound.contains(v)).collect()
            }
        }
    }

    /// Every variable name occurring, bound or free.
    pub fn variables(&self) -> BTreeSet<String> {
        match self {
            Formula::Atom { args, .. } | Formula::Natom { args, .. } => args.iter().cloned().collect(),
            Formula::And { children } | Formula::Or { children } => children.iter().flat_map(|c| c.variables()).collect(),
            Formula::Quant { bound, interp, .. } => {
                let mut v: BTreeSet<String> = bound.iter().cloned().collect();
                for i in interp {
                    v.extend(i.body.variables());
                }
                v
            }
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Natom { .. } => 0,
            Formula::And { children } | Formula::Or { children } => children.iter().map(|c| c.quantifier_depth()).max().unwrap_or(0),
            Formula::Quant { interp, .. } => 1 + interp.iter().map(|i| i.body.quantifier_depth()).max().unwrap_or(0),
        }
    }

    pub fn has_negation(&self) -> bool {
        match self {
            Formula::Atom { .. } => false,
            Formula::Natom { .. } => true,
            Formula::And { children } | Formula::Or { children } => children.iter().any(|c| c.has_negation()),
            Formula::Quant { interp, .. } => interp.iter().any(|i| i.body.has_negation()),
        }
    }

    pub fn oracles(&self) -> BTreeSet<String> {
        match self {
            Formula::Atom { .. } | Formula::Natom { .. } => BTreeSet::new(),
            Formula::And { children } | Formula::Or { children } => children.iter().flat_map(|c| c.oracles()).collect(),
            Formula::Quant { oracle, interp, .. } => {
                let mut s: BTreeSet<String> = interp.iter().flat_map(|i| i.body.oracles()).collect();
                s.insert(oracle.clone());
                s
            }
        }
    }

    /// Membership in the `k`-variable logic matched to the game variant `v`:
    /// negated atoms only when `v` reflects non-relations, quantifiers of
    /// arity at most `n` whose declared closure the variant's morphisms respect.
    pub fn fits(&self, v: GameVariant, reg: &OracleRegistry) -> Result<bool> {
        if self.variables().len() > v.k || (self.has_negation() && !v.xn) {
            return Ok(false);
        }
        for name in self.oracles() {
            let q = reg.get(&name)?;
            let closure_ok = match q.closure {
                Closure::Hom => true,
                Closure::Inj => v.xi,
                Closure::Surj => v.xs,
                Closure::Bij => v.xi && v.xs,
                Closure::Iso => false,
            };
            if q.arity() > v.n || !closure_ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[String]) -> fmt::Result {
    write!(f, "({})", args.join(","))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { rel, args } => {
                write!(f, "{rel}")?;
                write_args(f, args)
            }
            Formula::Natom { rel, args } => {
                write!(f, "¬{rel}")?;
                write_args(f, args)
            }
            Formula::And { children } if children.is_empty() => write!(f, "⊤"),
            Formula::Or { children } if children.is_empty() => write!(f, "⊥"),
            Formula::And { children } | Formula::Or { children } => {
                let op = if matches!(self, Formula::And { .. }) { " ∧ " } else { " ∨ " };
                write!(f, "(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{op}")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Formula::Quant { oracle, bound, interp } => {
                write!(f, "{oracle} {}. [", bound.join(","))?;
                for (i, t) in interp.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{}", t.symbol)?;
                    write_args(f, &t.vars)?;
                    write!(f, ": {}", t.body)?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Formula with variables and relation names resolved against one structure.
enum Compiled {
    Atom { r: usize, neg: bool, args: Vec<usize> },
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Quant { oracle: QuantifierOracle, bound: Vec<usize>, interp: Vec<(Vec<usize>, Compiled)> },
}

struct Compiler<'a> {
    sig: &'a Signature,
    reg: &'a OracleRegistry,
    vars: Vec<String>,
}

impl Compiler<'_> {
    fn var(&self, v: &str) -> usize {
        self.vars.iter().position(|x| x == v).expect("variables collected up front")
    }

    fn compile(&self, phi: &Formula) -> Result<Compiled> {
        Ok(match phi {
            Formula::Atom { rel, args } | Formula::Natom { rel, args } => {
                let sig = self.sig;
                let r = sig.index_of(rel).ok_or_else(|| Error::Precondition(format!("relation {rel} is not in the signature")))?;
                if sig.arity(r) != args.len() {
                    return Err(Error::Precondition(format!("{rel} has arity {}, used with {} arguments", sig.arity(r), args.len())));
                }
                Compiled::Atom { r, neg: matches!(phi, Formula::Natom { .. }), args: args.iter().map(|v| self.var(v)).collect() }
            }
            Formula::And { children } => Compiled::And(children.iter().map(|c| self.compile(c)).collect::<Result<_>>()?),
            Formula::Or { children } => Compiled::Or(children.iter().map(|c| self.compile(c)).collect::<Result<_>>()?),
            Formula::Quant { oracle, bound, interp } => {
                let q = self.reg.get(oracle)?;
                if bound.len() != q.arity() || bound.iter().collect::<BTreeSet<_>>().len() != bound.len() {
                    return Err(Error::Precondition(format!("{oracle} binds {} distinct variables, got {:?}", q.arity(), bound)));
                }
                let mut parts = Vec::with_capacity(q.signature.len());
                for s in q.signature.symbols() {
                    let mut found = interp.iter().filter(|i| i.symbol == s.name);
                    let (Some(i), None) = (found.next(), found.next()) else {
                        return Err(Error::Precondition(format!("{oracle} needs exactly one interpretation of {}", s.name)));
                    };
                    let distinct = i.vars.iter().collect::<BTreeSet<_>>().len() == i.vars.len();
                    if i.vars.len() != s.arity || !distinct || i.vars.iter().any(|v| !bound.contains(v)) {
                        return Err(Error::Precondition(format!("interpretation of {} needs {} distinct bound variables", s.name, s.arity)));
                    }
                    parts.push((i.vars.iter().map(|v| self.var(v)).collect(), self.compile(&i.body)?));
                }
                if let Some(i) = interp.iter().find(|i| q.signature.index_of(&i.symbol).is_none()) {
                    return Err(Error::Precondition(format!("{oracle} has no symbol {}", i.symbol)));
                }
                Compiled::Quant { oracle: q, bound: bound.iter().map(|v| self.var(v)).collect(), interp: parts }
            }
        })
    }
}

fn eval(a: &RelStructure, c: &Compiled, asg: &mut Vec<Option<usize>>, buf: &mut Vec<usize>) -> Result<bool> {
    match c {
        Compiled::Atom { r, neg, args } => {
            buf.clear();
            for &v in args {
                buf.push(asg[v].ok_or_else(|| Error::Precondition("unassigned variable".into()))?);
            }
            Ok(a.holds(*r, buf) != *neg)
        }
        Compiled::And(cs) => {
            for x in cs {
                if !eval(a, x, asg, buf)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Compiled::Or(cs) => {
            for x in cs {
                if eval(a, x, asg, buf)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Compiled::Quant { oracle, bound, interp } => {
            if a.size() > oracle.bound {
                return Err(Error::Resource(format!("oracle {} is bounded by {} elements, got {}", oracle.name, oracle.bound, a.size())));
            }
            let saved: Vec<Option<usize>> = bound.iter().map(|&v| asg[v].take()).collect();
            let mut rels = Vec::with_capacity(interp.len());
            for (vars, body) in interp {
                let mut rel = Vec::new();
                let mut t = vec![0usize; vars.len()];
                loop {
                    for (v, &x) in vars.iter().zip(&t) {
                        asg[*v] = Some(x);
                    }
                    if eval(a, body, asg, buf)? {
                        rel.push(t.clone());
                    }
                    // odometer over A^arity
                    let mut i = 0;
                    while i < t.len() && t[i] + 1 == a.size() {
                        t[i] = 0;
                        i += 1;
                    }
                    if i == t.len() {
                        break;
                    }
                    t[i] += 1;
                }
                for v in vars {
                    asg[*v] = None;
                }
                rels.push(rel);
            }
            for (&v, old) in bound.iter().zip(saved) {
                asg[v] = old;
            }
            let interpreted = RelStructure::from_indices(oracle.signature.clone(), a.size(), rels)?;
            oracle.contains(&interpreted)
        }
    }
}

/// A formula resolved once against a signature and a registry, for
/// repeated evaluation. Assignments list the free variables in sorted order.
pub struct CompiledFormula {
    signature: Signature,
    vars: Vec<String>,
    free: Vec<usize>,
    root: Compiled,
}

impl CompiledFormula {
    pub fn new(phi: &Formula, signature: &Signature, reg: &OracleRegistry) -> Result<Self> {
        let vars: Vec<String> = phi.variables().into_iter().collect();
        let c = Compiler { sig: signature, reg, vars };
        let root = c.compile(phi)?;
        let free = phi.free_vars().iter().map(|v| c.var(v)).collect();
        Ok(CompiledFormula { signature: signature.clone(), vars: c.vars, free, root })
    }

    pub fn free_vars(&self) -> Vec<&str> {
        self.free.iter().map(|&i| self.vars[i].as_str()).collect()
    }

    pub fn eval(&self, a: &RelStructure, asg: &[usize]) -> Result<bool> {
        if a.signature() != &self.signature {
            return Err(Error::Precondition("structure signature differs from the compiled one".into()));
        }
        if asg.len() != self.free.len() {
            return Err(Error::Precondition(format!("{} free variables, {} values", self.free.len(), asg.len())));
        }
        let mut slots = vec![None; self.vars.len()];
        for (&v, &x) in self.free.iter().zip(asg) {
            if x >= a.size() {
                return Err(Error::Precondition(format!("element {x} out of range for {}", self.vars[v])));
            }
            slots[v] = Some(x);
        }
        eval(a, &self.root, &mut slots, &mut Vec::new())
    }

    /// Evaluation under a named assignment; extra names are ignored.
    pub fn eval_named(&self, a: &RelStructure, asg: &[(&str, usize)]) -> Result<bool> {
        let values = self
            .free_vars()
            .iter()
            .map(|v| asg.iter().find(|(w, _)| w == v).map(|&(_, x)| x).ok_or_else(|| Error::Precondition(format!("free variable {v} is unassigned"))))
            .collect::<Result<Vec<_>>>()?;
        self.eval(a, &values)
    }
}

/// `A, asg ⊨ φ`; quantifier nodes build `⟨A, (ψ_T^A)⟩` and ask the oracle.
pub fn eval_formula(a: &RelStructure, phi: &Formula, asg: &[(&str, usize)], reg: &OracleRegistry) -> Result<bool> {
    CompiledFormula::new(phi, a.signature(), reg)?.eval_named(a, asg)
}

/// For every assignment `ā` of the free variables into `dom(ρ)`,
/// `A ⊨ φ(ā)` implies `B ⊨ φ(ρ ā)`.
pub fn preserves_validity(a: &RelStructure, b: &RelStructure, rho: &PartialHom, phi: &Formula, reg: &OracleRegistry) -> Result<bool> {
    let left_phi = CompiledFormula::new(phi, a.signature(), reg)?;
    let right_phi = CompiledFormula::new(phi, b.signature(), reg)?;
    let free = left_phi.free_vars().len();
    let dom = rho.domain();
    if dom.is_empty() && free > 0 {
        return Ok(true);
    }
    let mut idx = vec![0usize; free];
    loop {
        let left: Vec<usize> = idx.iter().map(|&i| dom[i]).collect();
        let right: Vec<usize> = left.iter().map(|&x| rho.get(x).expect("in domain")).collect();
        if left_phi.eval(a, &left)? && !right_phi.eval(b, &right)? {
            return Ok(false);
        }
        let mut i = 0;
        while i < idx.len() && idx[i] + 1 == dom.len() {
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            return Ok(true);
        }
        idx[i] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::oracle::cardinality_quantifiers;

    fn k(n: usize) -> RelStructure {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        RelStructure::undirected_graph(n, &edges)
    }

    #[test]
    fn exists_as_a_quantifier() {
        let reg = OracleRegistry::builtin(8);
        let loop_free = Formula::exists("x", Formula::atom("E", &["x", "x"]));
        assert!(!eval_formula(&k(2), &loop_free, &[], &reg).unwrap());
        let edge = Formula::exists("x", Formula::exists("y", Formula::atom("E", &["x", "y"])));
        assert!(eval_formula(&k(2), &edge, &[], &reg).unwrap());
        assert!(!eval_formula(&RelStructure::undirected_graph(2, &[]), &edge, &[], &reg).unwrap());
    }

    #[test]
    fn atoms_match_relations() {
        let reg = OracleRegistry::builtin(8);
        let p3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2)]);
        for x in 0..3 {
            for y in 0..3 {
                let asg = [("x", x), ("y", y)];
                assert_eq!(eval_formula(&p3, &Formula::atom("E", &["x", "y"]), &asg, &reg).unwrap(), p3.holds(0, &[x, y]));
                assert_eq!(eval_formula(&p3, &Formula::natom("E", &["x", "y"]), &asg, &reg).unwrap(), !p3.holds(0, &[x, y]));
            }
        }
        assert!(eval_formula(&p3, &Formula::atom("E", &["x", "y"]), &[("x", 0)], &reg).is_err());
    }

    #[test]
    fn size_sentences() {
        let mut reg = OracleRegistry::builtin(8);
        let [b2, _, _] = cardinality_quantifiers(2, 8);
        reg.register(b2.clone());
        let sentence = Formula::Quant { oracle: b2.name.clone(), bound: vec![], interp: vec![] };
        assert!(eval_formula(&k(2), &sentence, &[], &reg).unwrap());
        assert!(!eval_formula(&k(3), &sentence, &[], &reg).unwrap());
    }

    #[test]
    fn forall_and_counting() {
        let reg = OracleRegistry::builtin(8);
        let p3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2)]);
        let forall_x = |body| Formula::Quant {
            oracle: "forall".into(),
            bound: vec!["x".into()],
            interp: vec![Interpretation { symbol: "U".into(), vars: vec!["x".into()], body }],
        };
        // every vertex has a neighbour
        assert!(eval_formula(&p3, &forall_x(Formula::exists("y", Formula::atom("E", &["x", "y"]))), &[], &reg).unwrap());
        let two_neighbours = Formula::Quant {
            oracle: "geq_2".into(),
            bound: vec!["y".into()],
            interp: vec![Interpretation { symbol: "U".into(), vars: vec!["y".into()], body: Formula::atom("E", &["x", "y"]) }],
        };
        assert!(eval_formula(&p3, &two_neighbours, &[("x", 1)], &reg).unwrap());
        assert!(!eval_formula(&p3, &two_neighbours, &[("x", 0)], &reg).unwrap());
        assert!(!eval_formula(&p3, &forall_x(two_neighbours), &[], &reg).unwrap());
    }

    #[test]
    fn oracle_bound_is_enforced() {
        let reg = OracleRegistry::builtin(2);
        let phi = Formula::exists("x", Formula::atom("E", &["x", "x"]));
        assert!(matches!(eval_formula(&k(3), &phi, &[], &reg), Err(Error::Resource(_))));
    }

    #[test]
    fn json_and_fragments() {
        let reg = OracleRegistry::builtin(8);
        let phi = Formula::exists("x", Formula::and(vec![Formula::atom("E", &["x", "y"]), Formula::natom("E", &["y", "y"])]));
        let text = phi.to_json_value().to_string();
        assert!(text.contains("\"node\":\"quant\""));
        assert_eq!(Formula::from_json(&text).unwrap(), phi);
        assert_eq!(phi.free_vars(), BTreeSet::from(["y".to_string()]));
        assert_eq!(phi.to_string(), "exists x. [U(x): (E(x,y) ∧ ¬E(y,y))]");
        assert!(!phi.fits(GameVariant::of(1, 2, 0, 0, 0), &reg).unwrap());
        assert!(phi.fits(GameVariant::of(1, 2, 0, 0, 1), &reg).unwrap());
        assert!(!phi.fits(GameVariant::of(1, 1, 0, 0, 1), &reg).unwrap());
    }

    #[test]
    fn validity_preservation() {
        let reg = OracleRegistry::builtin(8);
        let p3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2)]);
        let k2 = k(2);
        let phi = Formula::exists("y", Formula::atom("E", &["x", "y"]));
        let rho = PartialHom::from_pairs(3, &[(0, 0), (1, 1)]);
        assert!(preserves_validity(&p3, &k2, &rho, &phi, &reg).unwrap());
        let sentence = Formula::exists("x", phi.clone());
        let empty = PartialHom::empty(2);
        let edgeless = RelStructure::undirected_graph(2, &[]);
        assert!(!preserves_validity(&k2, &edgeless, &empty, &sentence, &reg).unwrap());
        assert!(preserves_validity(&edgeless, &k2, &empty, &sentence, &reg).unwrap());
    }
}
