//! Elementwise checks of the counit and coassociativity laws on truncations.

use serde_json::json;

use crate::error::{Error, Result};
use crate::history::k_histories;
use crate::structures::RelStructure;

use super::hella::HellaSkeleton;
use super::symbolic::{comult_history, counit_history, map_history, Class, ClassId, Hist};
use super::tk::{build_tk, TK_BOUND};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// Drops the history of the outer class produced by `δ`.
    CorruptComult,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawViolation {
    pub law: &'static str,
    pub element: String,
}

#[derive(Clone, Debug, Default)]
pub struct LawReport {
    pub comonad: String,
    pub depth: usize,
    pub checked: usize,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "comonad": self.comonad,
            "depth": self.depth,
            "checked": self.checked,
            "passed": self.passed(),
            "violations": self.violations.iter().map(|v| json!({"law": v.law, "element": v.element})).collect::<Vec<_>>(),
        })
    }

    fn record(&mut self, law: &'static str, element: impl std::fmt::Debug) {
        if self.violations.len() < 32 {
            self.violations.push(LawViolation { law, element: format!("{element:?}") });
        }
    }
}

fn comult_tk<E: Clone>(s: &[(E, usize)], mutation: Mutation) -> Hist<Hist<E>> {
    let mut d = comult_history(s);
    if mutation == Mutation::CorruptComult {
        if let Some(last) = d.last_mut() {
            last.0.truncate(1);
        }
    }
    d
}

fn comult_h<E: Clone + PartialEq>(c: &Class<E>, n: usize, mutation: Mutation) -> Class<Class<E>> {
    let mut d = c.comult(n);
    if mutation == Mutation::CorruptComult {
        d.element.history.clear();
    }
    d
}

/// Laws of `T_k` on all histories over `0..na` of length at most `m`.
pub fn check_tk_laws(na: usize, k: usize, m: usize, mutation: Mutation) -> Result<LawReport> {
    let size: usize = (1..=m).map(|l| (na * k).saturating_pow(l as u32)).fold(0, usize::saturating_add);
    if size > TK_BOUND {
        return Err(Error::Resource(format!("T_k universe of {size} histories exceeds {TK_BOUND}")));
    }
    let mut rep = LawReport { comonad: format!("T_{k}"), depth: m, ..Default::default() };
    for s in k_histories(na, k, m).into_iter().skip(1) {
        rep.checked += 1;
        let d = comult_tk(&s, mutation);
        if counit_history(&d).ok().as_ref() != Some(&s) {
            rep.record("counit after comultiplication", &s);
        }
        if map_history(&d, &|x: &Hist<usize>| counit_history(x).unwrap_or(usize::MAX)) != s {
            rep.record("mapped counit after comultiplication", &s);
        }
        let left = comult_tk(&d, mutation);
        let right = map_history(&d, &|x: &Hist<usize>| comult_tk(x, mutation));
        if left != right {
            rep.record("coassociativity", &s);
        }
        if d.len() != s.len() {
            rep.record("length preservation", &s);
        }
    }
    Ok(rep)
}

/// Laws of `H_{n,k}` on every class of the skeleton.
pub fn check_hnk_laws(skel: &HellaSkeleton, mutation: Mutation) -> LawReport {
    let n = skel.n;
    let mut rep = LawReport { comonad: format!("H_{{{},{}}}", skel.n, skel.k), depth: skel.depth, ..Default::default() };
    for id in 0..skel.len() as u32 {
        let c = skel.class(id);
        rep.checked += 1;
        let d = comult_h(&c, n, mutation);
        if d.counit() != c {
            rep.record("counit after comultiplication", &c);
        }
        if d.map(&|x: &ClassId| x.counit()) != c {
            rep.record("mapped counit after comultiplication", &c);
        }
        let left = comult_h(&d, n, mutation);
        let right = d.map(&|x: &ClassId| comult_h(x, n, mutation));
        if left != right {
            rep.record("coassociativity", &c);
        }
        if d.blocks() != c.blocks() || d.history.iter().flatten().any(|(x, _)| skel.id_of(x).is_none()) {
            rep.record("truncation preservation", &c);
        }
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grade {
    Pebbling { k: usize, m: usize },
    Hella { n: usize, k: usize, m: usize },
}

/// Law report for one structure, including the counit homomorphism and,
/// for `H_{n,k}`, the quotient homomorphism from `T_k`.
pub fn check_comonad_laws(a: &RelStructure, grade: Grade, mutation: Mutation) -> Result<LawReport> {
    match grade {
        Grade::Pebbling { k, m } => {
            let mut rep = check_tk_laws(a.size(), k, m, mutation)?;
            if let Some(bad) = build_tk(a, k, m)?.counit_violation(a) {
                rep.record("counit homomorphism", bad);
            }
            Ok(rep)
        }
        Grade::Hella { n, k, m } => {
            let h = super::hella::build_hnk(a, n, k, m)?;
            let mut rep = check_hnk_laws(&h.skeleton, mutation);
            if let Some(bad) = h.counit_violation() {
                rep.record("counit homomorphism", bad);
            }
            if let Err(e) = h.skeleton.verify_witnesses() {
                rep.record("quotient witness", e);
            }
            if let Err(e) = h.skeleton.verify_quotient(n * m + n) {
                rep.record("quotient homomorphism", e);
            }
            Ok(rep)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold_and_mutation_is_caught() {
        let p3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2)]);
        for grade in [Grade::Pebbling { k: 2, m: 3 }, Grade::Hella { n: 2, k: 2, m: 2 }, Grade::Hella { n: 1, k: 3, m: 2 }] {
            let rep = check_comonad_laws(&p3, grade, Mutation::None).unwrap();
            assert!(rep.passed(), "{grade:?}: {:?}", rep.violations);
            assert!(rep.checked > 0);
            let bad = check_comonad_laws(&p3, grade, Mutation::CorruptComult).unwrap();
            assert!(!bad.passed());
        }
    }
}
