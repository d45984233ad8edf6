//! The pebbling structure `T_k A` truncated at history length `m`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::history::{k_histories, KHistory};
use crate::structures::RelStructure;

pub const TK_BOUND: usize = 1 << 21;

#[derive(Clone, Debug)]
pub struct PebbleStructure {
    pub k: usize,
    pub depth: usize,
    pub universe: Vec<KHistory>,
    pub index: HashMap<KHistory, u32>,
    /// Per relation of the base signature, tuples of universe indices.
    pub relations: Vec<HashSet<Vec<u32>>>,
    pub base_size: usize,
}

/// Three conditions of the pebbling relation, checked literally.
pub fn tk_related(base: &RelStructure, r: usize, tuple: &[&[(usize, usize)]]) -> bool {
    if tuple.iter().any(|s| s.is_empty()) {
        return false;
    }
    for (i, s) in tuple.iter().enumerate() {
        for t in &tuple[i + 1..] {
            let (short, long) = if s.len() <= t.len() { (s, t) } else { (t, s) };
            if long[..short.len()] != short[..] {
                return false;
            }
        }
    }
    let elems: Vec<usize> = tuple.iter().map(|s| s.last().unwrap().0).collect();
    if !base.holds(r, &elems) {
        return false;
    }
    no_overwrite(tuple)
}

/// For `s_i` a proper prefix of `s_j`, no later move of `s_j` reuses the last pebble of `s_i`.
pub fn no_overwrite(tuple: &[&[(usize, usize)]]) -> bool {
    for si in tuple {
        let p = si.last().map(|m| m.1);
        for sj in tuple {
            if sj.len() > si.len() && sj[si.len()..].iter().any(|m| Some(m.1) == p) {
                return false;
            }
        }
    }
    true
}

pub fn build_tk(a: &RelStructure, k: usize, m: usize) -> Result<PebbleStructure> {
    if m == 0 || k == 0 {
        return Err(Error::Precondition("pebbling structure needs k >= 1 and depth >= 1".into()));
    }
    let mut size = 0usize;
    for l in 1..=m {
        size = size.saturating_add((a.size() * k).saturating_pow(l as u32));
    }
    if size > TK_BOUND {
        return Err(Error::Resource(format!("T_k universe of {size} histories exceeds {TK_BOUND}")));
    }
    let universe: Vec<KHistory> = k_histories(a.size(), k, m).into_iter().skip(1).collect();
    let index: HashMap<KHistory, u32> = universe.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
    let sig = a.signature();
    let mut relations = vec![HashSet::new(); sig.len()];
    for (wi, w) in universe.iter().enumerate() {
        let prefix_ids: Vec<u32> = (1..w.len()).map(|l| index[&w[..l]]).chain([wi as u32]).collect();
        for (r, rel) in relations.iter_mut().enumerate() {
            let ar = sig.arity(r);
            let len = w.len();
            for mut c in 0..len.pow(ar as u32) {
                let mut lens = Vec::with_capacity(ar);
                for _ in 0..ar {
                    lens.push(c % len + 1);
                    c /= len;
                }
                if !lens.contains(&len) {
                    continue;
                }
                let tuple: Vec<&[(usize, usize)]> = lens.iter().map(|&l| &w[..l]).collect();
                if tk_related(a, r, &tuple) {
                    rel.insert(lens.iter().map(|&l| prefix_ids[l - 1]).collect());
                }
            }
        }
    }
    Ok(PebbleStructure { k, depth: m, universe, index, relations, base_size: a.size() })
}

impl PebbleStructure {
    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn holds(&self, r: usize, tuple: &[u32]) -> bool {
        self.relations[r].contains(tuple)
    }

    /// First related tuple whose counit image is unrelated in `a`.
    pub fn counit_violation(&self, a: &RelStructure) -> Option<(usize, Vec<u32>)> {
        for (r, rel) in self.relations.iter().enumerate() {
            for t in rel {
                let img: Vec<usize> = t.iter().map(|&i| self.universe[i as usize].last().unwrap().0).collect();
                if !a.holds(r, &img) {
                    return Some((r, t.clone()));
                }
            }
        }
        None
    }
}
