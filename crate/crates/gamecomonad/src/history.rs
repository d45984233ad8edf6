//! k-histories, n,k-histories and the translations between pebble strategies
//! and block strategies.
//!
//! A move is `(element, pebble)` with pebbles numbered from 1.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};

pub type Move = (usize, usize);
pub type KHistory = Vec<Move>;
pub type Block = Vec<Move>;
pub type NKHistory = Vec<Block>;

pub fn flatten<E: Clone>(t: &[Vec<(E, usize)>]) -> Vec<(E, usize)> {
    t.iter().flatten().cloned().collect()
}

/// At most `n` moves with pairwise distinct pebbles.
pub fn is_basic<E>(s: &[(E, usize)], n: usize) -> bool {
    s.len() <= n && s.iter().enumerate().all(|(i, m)| s[..i].iter().all(|x| x.1 != m.1))
}

/// Greedy split into maximal basic blocks. The empty history has no blocks.
pub fn structure_n<E: Clone>(s: &[(E, usize)], n: usize) -> Vec<Vec<(E, usize)>> {
    let mut out = Vec::new();
    let mut cur: Vec<(E, usize)> = Vec::new();
    for m in s.iter().cloned() {
        if cur.len() == n || cur.iter().any(|x| x.1 == m.1) {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(m);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Blocks nonempty and basic; each short block is followed by a block
/// opening with one of its pebbles.
pub fn is_structured<E>(t: &[Vec<(E, usize)>], n: usize, k: usize) -> bool {
    let valid = t
        .iter()
        .all(|b| !b.is_empty() && is_basic(b, n) && b.iter().all(|m| m.1 >= 1 && m.1 <= k));
    valid && t.windows(2).all(|w| w[0].len() == n || w[0].iter().any(|m| m.1 == w[1][0].1))
}

/// The n-structuring of a Duplicator position `(s, p)`.
pub fn alpha_n<E: Clone>(s: &[(E, usize)], p: usize, n: usize) -> Vec<Vec<(E, usize)>> {
    let mut t = structure_n(s, n);
    if let Some(last) = t.last() {
        if last.len() != n && !last.iter().any(|m| m.1 == p) {
            t.pop();
        }
    }
    t
}

/// `≈_n` on nonempty k-histories.
pub fn approx_eq<E: Clone + PartialEq>(u: &[(E, usize)], v: &[(E, usize)], n: usize) -> Result<bool> {
    let (Some((a, i)), Some((b, j))) = (u.last(), v.last()) else {
        return Err(Error::Precondition("empty history has no class".into()));
    };
    Ok(a == b && alpha_n(&u[..u.len() - 1], *i, n) == alpha_n(&v[..v.len() - 1], *j, n))
}

/// Class key `(t, a)` of a nonempty k-history under `≈_n`.
pub fn class_of<E: Clone>(s: &[(E, usize)], n: usize) -> Option<(Vec<Vec<(E, usize)>>, E)> {
    let (a, i) = s.last()?.clone();
    Some((alpha_n(&s[..s.len() - 1], i, n), a))
}

fn bad_pair(t: &[Block], n: usize) -> Option<usize> {
    t.windows(2).position(|w| w[0].len() < n && !w[1].is_empty() && !w[0].iter().any(|m| m.1 == w[1][0].1))
}

pub fn count_bad_pairs(t: &[Block], n: usize) -> usize {
    t.windows(2).filter(|w| w[0].len() < n && !w[1].is_empty() && !w[0].iter().any(|m| m.1 == w[1][0].1)).count()
}

/// Inserts link blocks, leftmost bad pair first, until the history is structured.
/// Empty blocks are passes and are dropped first.
pub fn structured_companion(t: &[Block], n: usize) -> NKHistory {
    let mut t: NKHistory = t.iter().filter(|b| !b.is_empty()).cloned().collect();
    if n == 1 {
        return t;
    }
    while let Some(i) = bad_pair(&t, n) {
        let (a, p) = *t[i].last().unwrap();
        let p2 = t[i + 1][0].1;
        assert_ne!(p, p2, "a bad pair never repeats the linking pebble");
        let prefix = flatten(&t[..=i]);
        let kappa = prefix.iter().rev().find(|m| m.1 == p2).map_or(a, |m| m.0);
        t.insert(i + 1, vec![(a, p), (kappa, p2)]);
    }
    t
}

/// Pebbled position after a k-history: pebble index to element.
pub fn pebbled_elements(s: &[Move], k: usize) -> Vec<Option<usize>> {
    let mut pos = vec![None; k + 1];
    for &(a, p) in s {
        pos[p] = Some(a);
    }
    pos
}

pub type KResponse = Rc<dyn Fn(&[Move], usize) -> Vec<usize>>;
pub type NKResponse = Rc<dyn Fn(&[Block]) -> Vec<usize>>;

/// A Duplicator strategy in the one-pebble-at-a-time game: history and the
/// pebble about to move determine a total map `A → B`.
#[derive(Clone)]
pub struct KStrategy {
    pub k: usize,
    pub depth: usize,
    pub respond: KResponse,
}

/// A Duplicator strategy in the block game: the history of blocks
/// determines the total map played for the next block.
#[derive(Clone)]
pub struct NKStrategy {
    pub n: usize,
    pub k: usize,
    pub depth: usize,
    pub respond: NKResponse,
}

#[derive(Clone)]
pub enum PebbleStrategy {
    OverK(KStrategy),
    OverNK(NKStrategy),
}

/// Every k-history over `0..na` up to length `len`, in breadth-first lexicographic order.
pub fn k_histories(na: usize, k: usize, len: usize) -> Vec<KHistory> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for s in &frontier {
            for a in 0..na {
                for p in 1..=k {
                    let mut e: KHistory = s.clone();
                    e.push((a, p));
                    next.push(e);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// All nonempty basic blocks over `0..na`.
pub fn basic_blocks(na: usize, n: usize, k: usize) -> Vec<Block> {
    let mut out = Vec::new();
    let mut frontier: Vec<Block> = vec![Vec::new()];
    for _ in 0..n.min(k) {
        let mut next = Vec::new();
        for b in &frontier {
            for a in 0..na {
                for p in 1..=k {
                    if b.iter().all(|m| m.1 != p) {
                        let mut e = b.clone();
                        e.push((a, p));
                        next.push(e);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every n,k-history (nonempty blocks) with at most `depth` blocks.
pub fn nk_histories(na: usize, n: usize, k: usize, depth: usize) -> Vec<NKHistory> {
    let blocks = basic_blocks(na, n, k);
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<NKHistory> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &frontier {
            for b in &blocks {
                let mut e = t.clone();
                e.push(b.clone());
                next.push(e);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// The first pair of positions `(s, p)`, `(s', p')` up to length `len` with
/// equal n-structurings but different responses.
pub fn n_consistency_violation(
    psi: &KStrategy,
    n: usize,
    na: usize,
    len: usize,
) -> Option<((KHistory, usize), (KHistory, usize))> {
    let mut seen: HashMap<NKHistory, (KHistory, usize, Vec<usize>)> = HashMap::new();
    for s in k_histories(na, psi.k, len) {
        for p in 1..=psi.k {
            let key = alpha_n(&s, p, n);
            let r = (psi.respond)(&s, p);
            match seen.get(&key) {
                Some((s0, p0, r0)) => {
                    if *r0 != r {
                        return Some(((s0.clone(), *p0), (s, p)));
                    }
                }
                None => {
                    seen.insert(key, (s.clone(), p, r));
                }
            }
        }
    }
    None
}

/// `Ψ'(s, p) = Ψ(α_n(s, p))`.
pub fn project_strategy(psi: &NKStrategy) -> KStrategy {
    let inner = psi.respond.clone();
    let n = psi.n;
    KStrategy { k: psi.k, depth: psi.depth, respond: Rc::new(move |s: &[Move], p| inner(&alpha_n(s, p, n))) }
}

/// `Ψ'(t) = Ψ(F(t̃), p)` with `t̃` the structured companion and `p` the last
/// pebble of `t`. The input is checked for n-consistency on histories up to
/// `check_len` moves over `0..na`.
pub fn lift_strategy(psi: &KStrategy, n: usize, na: usize, check_len: usize) -> Result<NKStrategy> {
    if let Some((x, y)) = n_consistency_violation(psi, n, na, check_len) {
        return Err(Error::Precondition(format!("strategy is not {n}-consistent: {x:?} vs {y:?}")));
    }
    let inner = psi.respond.clone();
    Ok(NKStrategy {
        n,
        k: psi.k,
        depth: psi.depth,
        respond: Rc::new(move |t: &[Block]| {
            let p = t.iter().flatten().last().map_or(1, |m| m.1);
            inner(&flatten(&structured_companion(t, n)), p)
        }),
    })
}

/// Serialises as nested arrays of `[element, pebble]` pairs with element names.
pub fn nk_history_to_json(t: &[Block], names: &[String]) -> serde_json::Value {
    serde_json::Value::Array(
        t.iter()
            .map(|b| serde_json::Value::Array(b.iter().map(|&(a, p)| serde_json::json!([names[a], p])).collect()))
            .collect(),
    )
}

pub fn k_history_to_json(s: &[Move], names: &[String]) -> serde_json::Value {
    serde_json::Value::Array(s.iter().map(|&(a, p)| serde_json::json!([names[a], p])).collect())
}
