//! Exhaustive generation of small structures, one representative per isomorphism class.

use std::collections::BTreeMap;

use crate::structures::{RelStructure, Signature, Tuple};

/// All tuples of the given arity over `0..n`, in lexicographic order.
pub fn all_tuples(n: usize, arity: usize) -> Vec<Tuple> {
    let count = n.pow(arity as u32);
    (0..count)
        .map(|mut c| {
            let mut t = vec![0; arity];
            for slot in t.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            t
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Isomorphism-invariant key: least relabelled incidence vector over all permutations.
pub fn canonical_key(s: &RelStructure, perms: &[Vec<usize>]) -> Vec<u64> {
    let n = s.size();
    let mut best: Option<Vec<u64>> = None;
    let tuples: Vec<Vec<Tuple>> = (0..s.signature().len()).map(|r| s.relation(r).iter().cloned().collect()).collect();
    let offsets: Vec<usize> = {
        let mut acc = 0;
        (0..s.signature().len())
            .map(|r| {
                let o = acc;
                acc += n.pow(s.signature().arity(r) as u32);
                o
            })
            .collect()
    };
    let total: usize = (0..s.signature().len()).map(|r| n.pow(s.signature().arity(r) as u32)).sum();
    let mut key = vec![0u64; total.div_ceil(64).max(1)];
    for p in perms {
        key.iter_mut().for_each(|w| *w = 0);
        for (r, ts) in tuples.iter().enumerate() {
            for t in ts {
                let idx = offsets[r] + t.iter().fold(0, |acc, &x| acc * n + p[x]);
                // most significant bit first so that word order is lexicographic
                let w = idx / 64;
                key[w] |= 1 << (63 - idx % 64);
            }
        }
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key.clone());
        }
    }
    best.unwrap_or_default()
}

/// Keeps the first structure of every isomorphism class, in input order.
pub fn dedup_iso(structures: Vec<RelStructure>) -> Vec<RelStructure> {
    let mut by_size: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for s in structures {
        let perms = by_size.entry(s.size()).or_insert_with(|| permutations(s.size()));
        let key = (s.size(), canonical_key(&s, perms));
        if seen.insert(key) {
            out.push(s);
        }
    }
    out
}

/// Every structure on `0..n` whose relations are chosen freely, up to isomorphism.
pub fn structures_up_to_iso(sig: &Signature, n: usize) -> Vec<RelStructure> {
    let slots: Vec<(usize, Tuple)> = (0..sig.len())
        .flat_map(|r| all_tuples(n, sig.arity(r)).into_iter().map(move |t| (r, t)))
        .collect();
    assert!(slots.len() < 24, "too many candidate tuples for exhaustive generation");
    let all = (0u64..1 << slots.len()).map(|mask| {
        let mut rels = vec![Vec::new(); sig.len()];
        for (i, (r, t)) in slots.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rels[*r].push(t.clone());
            }
        }
        RelStructure::from_indices(sig.clone(), n, rels).expect("valid by construction")
    });
    dedup_iso(all.collect())
}

/// Simple undirected graphs on `n` vertices up to isomorphism, sorted by edge count.
pub fn graphs_up_to_iso(n: usize) -> Vec<RelStructure> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut all: Vec<(u32, RelStructure)> = (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            (mask.count_ones(), RelStructure::undirected_graph(n, &edges))
        })
        .collect();
    all.sort_by_key(|(c, _)| *c);
    dedup_iso(all.into_iter().map(|(_, g)| g).collect())
}

/// Loopless undirected graphs carrying an extra unary predicate `U`, up to isomorphism.
pub fn coloured_graphs_up_to_iso(n: usize) -> Vec<RelStructure> {
    let sig = Signature::of(&[("E", 2), ("U", 1)]);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut all = Vec::new();
    for emask in 0u64..1 << pairs.len() {
        for umask in 0u64..1 << n {
            let mut e = Vec::new();
            for (i, &(x, y)) in pairs.iter().enumerate() {
                if emask >> i & 1 == 1 {
                    e.push(vec![x, y]);
                    e.push(vec![y, x]);
                }
            }
            let u = (0..n).filter(|&x| umask >> x & 1 == 1).map(|x| vec![x]).collect();
            all.push(RelStructure::from_indices(sig.clone(), n, vec![e, u]).expect("valid by construction"));
        }
    }
    dedup_iso(all)
}
