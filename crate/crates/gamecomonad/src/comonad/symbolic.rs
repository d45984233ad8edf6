//! Counit, comultiplication and functor action on histories and on
//! `≈_n`-classes, generic in the element type so that iterated
//! constructions (`H H A`, `H H H A`) can be compared directly.

use crate::error::{Error, Result};
use crate::history::{alpha_n, flatten, is_structured};
use crate::structures::RelStructure;

pub type Hist<E> = Vec<(E, usize)>;

/// The class `[t | a]`: a structured history and the element of the final move.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Class<E> {
    pub history: Vec<Vec<(E, usize)>>,
    pub element: E,
}

pub type ClassId = Class<usize>;

pub fn counit_history<E: Clone>(s: &[(E, usize)]) -> Result<E> {
    s.last().map(|m| m.0.clone()).ok_or_else(|| Error::Precondition("counit of the empty history".into()))
}

/// Replaces every move by the prefix ending there.
pub fn comult_history<E: Clone>(s: &[(E, usize)]) -> Hist<Hist<E>> {
    (1..=s.len()).map(|j| (s[..j].to_vec(), s[j - 1].1)).collect()
}

pub fn map_history<E, F>(s: &[(E, usize)], f: &impl Fn(&E) -> F) -> Hist<F> {
    s.iter().map(|(e, p)| (f(e), *p)).collect()
}

impl<E: Clone + PartialEq> Class<E> {
    pub fn of_history(s: &[(E, usize)], n: usize) -> Option<Self> {
        let (element, p) = s.last()?.clone();
        Some(Class { history: alpha_n(&s[..s.len() - 1], p, n), element })
    }

    pub fn blocks(&self) -> usize {
        self.history.len()
    }

    pub fn is_valid(&self, n: usize, k: usize) -> bool {
        is_structured(&self.history, n, k)
    }

    /// Pebble for the canonical representative `F(t)·(a, p)`.
    pub fn representative_pebble(&self, n: usize) -> usize {
        match self.history.last() {
            Some(last) if last.len() < n => last[0].1,
            _ => 1,
        }
    }

    pub fn representative(&self, n: usize) -> Hist<E> {
        let mut s = flatten(&self.history);
        s.push((self.element.clone(), self.representative_pebble(n)));
        s
    }

    /// Every representative, given the elements available for the
    /// continuation block.
    pub fn representatives(&self, n: usize, k: usize, elements: &[E]) -> Vec<Hist<E>> {
        let base = flatten(&self.history);
        let mut out = Vec::new();
        let mut conts: Vec<Hist<E>> = vec![Vec::new()];
        let mut frontier: Vec<Hist<E>> = vec![Vec::new()];
        for _ in 1..n {
            let mut next = Vec::new();
            for u in &frontier {
                for e in elements {
                    for p in 1..=k {
                        if u.iter().any(|m| m.1 == p) {
                            continue;
                        }
                        let mut v = u.clone();
                        v.push((e.clone(), p));
                        next.push(v);
                    }
                }
            }
            conts.extend(next.iter().cloned());
            frontier = next;
        }
        for u in conts {
            let mut prefix = base.clone();
            prefix.extend(u.iter().cloned());
            for p in 1..=k {
                let mut s = prefix.clone();
                s.push((self.element.clone(), p));
                if Class::of_history(&s, n).as_ref() == Some(self) {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn counit(&self) -> E {
        self.element.clone()
    }

    /// `δ` through the canonical representative.
    pub fn comult(&self, n: usize) -> Class<Class<E>> {
        self.comult_via(&self.representative(n), n)
    }

    /// `δ` through a chosen representative `s` of this class.
    pub fn comult_via(&self, s: &[(E, usize)], n: usize) -> Class<Class<E>> {
        let lifted: Hist<Class<E>> =
            (1..=s.len()).map(|j| (Class::of_history(&s[..j], n).expect("nonempty prefix"), s[j - 1].1)).collect();
        Class::of_history(&lifted, n).expect("nonempty history")
    }

    pub fn map<F: Clone + PartialEq>(&self, f: &impl Fn(&E) -> F) -> Class<F> {
        Class {
            history: self.history.iter().map(|b| map_history(b, f)).collect(),
            element: f(&self.element),
        }
    }
}

/// `R(c_1, ..., c_l)` in `H_{n,k} A`: some related tuple of `T_k A` has these
/// classes. The longest representative fixes the chain; every other class
/// must end some prefix whose pebble is not moved again.
pub fn classes_related(base: &RelStructure, r: usize, classes: &[ClassId], n: usize, k: usize) -> bool {
    let elems: Vec<usize> = classes.iter().map(|c| c.element).collect();
    if classes.is_empty() || !base.holds(r, &elems) || classes.iter().any(|c| !c.is_valid(n, k)) {
        return false;
    }
    let all: Vec<usize> = (0..base.size()).collect();
    classes.iter().any(|top| {
        top.representatives(n, k, &all).iter().any(|u| {
            classes.iter().all(|c| {
                (1..=u.len()).any(|l| {
                    let p = u[l - 1].1;
                    !u[l..].iter().any(|m| m.1 == p) && Class::of_history(&u[..l], n).as_ref() == Some(c)
                })
            })
        })
    })
}

/// Structured histories with at most `m` blocks over `0..na`, in breadth-first
/// order; `limit` bounds the output size.
pub fn structured_histories(na: usize, n: usize, k: usize, m: usize, limit: usize) -> Result<Vec<Vec<Vec<(usize, usize)>>>> {
    let blocks = crate::history::basic_blocks(na, n, k);
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<Vec<(usize, usize)>>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for t in &frontier {
            for b in &blocks {
                if let Some(last) = t.last() {
                    if last.len() < n && !last.iter().any(|x: &(usize, usize)| x.1 == b[0].1) {
                        continue;
                    }
                }
                let mut e = t.clone();
                e.push(b.clone());
                next.push(e);
                if out.len() + next.len() > limit {
                    return Err(Error::Resource(format!("more than {limit} structured histories")));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}
