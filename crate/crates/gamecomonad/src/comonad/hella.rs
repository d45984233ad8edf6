//! Truncations of `H_{n,k} A = T_k A / ≈_n`.
//!
//! The universe at block depth `m` is every class `[t | a]` with `t`
//! structured and at most `m` blocks long. A tuple of classes is related when
//! some representatives form a related tuple of `T_k A`. Representatives of
//! such classes have length at most `n·m + n`, so the relations are exact.
//!
//! Which class tuples have prefix-comparable representatives without an
//! overwritten pebble does not depend on the relations of `A`: these are the
//! subsets of the classes held by the pebbles after some history. The
//! skeleton records those sets once per `(|A|, n, k, m)`.

use std::cell::{OnceCell, RefCell};
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::history::{Block, KHistory, NKHistory};
use crate::structures::RelStructure;

use super::symbolic::{structured_histories, ClassId};
use super::tk::no_overwrite;

pub const CLASS_BOUND: usize = 1 << 20;
pub const NODE_BOUND: usize = 1 << 25;
pub const MAX_PEBBLES: usize = 4;

/// Up to four class ids, ascending, stored `id + 1` in 32-bit lanes.
pub type LiveSet = u128;

pub fn pack(ids: &[u32]) -> LiveSet {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    debug_assert!(v.len() <= MAX_PEBBLES);
    v.iter().enumerate().fold(0u128, |acc, (i, &x)| acc | ((x as u128 + 1) << (32 * i)))
}

pub fn unpack(s: LiveSet) -> Vec<u32> {
    (0..MAX_PEBBLES).map(|i| (s >> (32 * i)) as u32).take_while(|&x| x != 0).map(|x| x - 1).collect()
}

fn subsets_of(ids: &[u32]) -> Vec<LiveSet> {
    (1u32..1 << ids.len())
        .map(|mask| pack(&ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect::<Vec<_>>()))
        .collect()
}

#[derive(Debug)]
pub struct HellaSkeleton {
    pub na: usize,
    pub n: usize,
    pub k: usize,
    pub depth: usize,
    pub histories: Vec<NKHistory>,
    pub hist_index: HashMap<NKHistory, u32>,
    /// Distinct pebbled class sets with a witnessing k-history.
    pub live: Vec<(LiveSet, KHistory)>,
    pub nodes: usize,
    cover: OnceCell<HashSet<LiveSet>>,
    maximal: OnceCell<Vec<LiveSet>>,
    /// Distinct jointly pebbled class tuples by arity, flattened.
    tuples: RefCell<HashMap<usize, Rc<[u32]>>>,
}

struct Trie {
    blocks: HashMap<Block, u32>,
    child: HashMap<(u32, u32), u32>,
}

struct Dfs<'s> {
    skel: &'s HellaSkeleton,
    trie: &'s Trie,
    w: KHistory,
    blocks: Vec<Block>,
    live: HashMap<LiveSet, KHistory>,
    nodes: usize,
}

impl Dfs<'_> {
    fn lookup(&self, parent: Option<u32>, block: &Block) -> Option<u32> {
        let b = *self.trie.blocks.get(block)?;
        self.trie.child.get(&(parent?, b)).copied()
    }

    /// `full`: id of the structuring of `w`; `init`: id with the last block dropped.
    fn visit(&mut self, full: Option<u32>, init: Option<u32>, pebbles: &mut Vec<Option<u32>>) -> Result<()> {
        let (n, k, na) = (self.skel.n, self.skel.k, self.skel.na);
        for a in 0..na {
            for p in 1..=k {
                self.nodes += 1;
                if self.nodes > NODE_BOUND {
                    return Err(Error::Resource(format!("more than {NODE_BOUND} histories visited")));
                }
                let fresh = self.blocks.last().is_none_or(|b| b.len() == n || b.iter().any(|m| m.1 == p));
                let t = if fresh { full } else { init };
                let class = t.map(|h| h * na as u32 + a as u32);
                self.w.push((a, p));
                let (nfull, ninit) = if fresh {
                    self.blocks.push(vec![(a, p)]);
                    (self.lookup(full, self.blocks.last().unwrap()), full)
                } else {
                    self.blocks.last_mut().unwrap().push((a, p));
                    (self.lookup(init, self.blocks.last().unwrap()), init)
                };
                if let Some(c) = class {
                    let mut ids: Vec<u32> = pebbles.iter().enumerate().filter(|&(q, _)| q != p).filter_map(|(_, x)| *x).collect();
                    ids.push(c);
                    self.live.entry(pack(&ids)).or_insert_with(|| self.w.clone());
                }
                let saved = pebbles[p];
                pebbles[p] = class;
                if self.blocks.len() <= self.skel.depth + 1 {
                    self.visit(nfull, ninit, pebbles)?;
                }
                pebbles[p] = saved;
                self.w.pop();
                if fresh {
                    self.blocks.pop();
                } else {
                    self.blocks.last_mut().unwrap().pop();
                }
            }
        }
        Ok(())
    }
}

impl HellaSkeleton {
    pub fn new(na: usize, n: usize, k: usize, m: usize) -> Result<Self> {
        if n == 0 || n > k {
            return Err(Error::Precondition(format!("grade needs 1 <= n <= k, got n={n}, k={k}")));
        }
        if k > MAX_PEBBLES {
            return Err(Error::Resource(format!("class sets are packed for at most {MAX_PEBBLES} pebbles")));
        }
        let histories = structured_histories(na, n, k, m, CLASS_BOUND / na.max(1))?;
        let hist_index: HashMap<NKHistory, u32> =
            histories.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        let mut trie = Trie { blocks: HashMap::new(), child: HashMap::new() };
        for b in crate::history::basic_blocks(na, n, k) {
            let id = trie.blocks.len() as u32;
            trie.blocks.insert(b, id);
        }
        for (i, t) in histories.iter().enumerate() {
            if let Some((last, init)) = t.split_last() {
                trie.child.insert((hist_index[init], trie.blocks[last]), i as u32);
            }
        }
        let mut skel = HellaSkeleton {
            na,
            n,
            k,
            depth: m,
            histories,
            hist_index,
            live: Vec::new(),
            nodes: 0,
            cover: OnceCell::new(),
            maximal: OnceCell::new(),
            tuples: RefCell::new(HashMap::new()),
        };
        let mut dfs = Dfs { skel: &skel, trie: &trie, w: Vec::new(), blocks: Vec::new(), live: HashMap::new(), nodes: 0 };
        dfs.visit(Some(0), None, &mut vec![None; k + 1])?;
        let (mut live, nodes): (Vec<(LiveSet, KHistory)>, usize) = (dfs.live.into_iter().collect(), dfs.nodes);
        live.sort_unstable();
        skel.live = live;
        skel.nodes = nodes;
        Ok(skel)
    }

    pub fn len(&self) -> usize {
        self.histories.len() * self.na
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn class(&self, id: u32) -> ClassId {
        let (h, a) = (id as usize / self.na, id as usize % self.na);
        ClassId { history: self.histories[h].clone(), element: a }
    }

    pub fn id_of(&self, c: &ClassId) -> Option<u32> {
        if c.element >= self.na {
            return None;
        }
        self.hist_index.get(&c.history).map(|&h| h * self.na as u32 + c.element as u32)
    }

    pub fn counit(&self, id: u32) -> usize {
        id as usize % self.na
    }

    /// `q_n` on a nonempty k-history; `None` outside the truncation.
    pub fn quotient(&self, s: &[(usize, usize)]) -> Option<u32> {
        ClassId::of_history(s, self.n).and_then(|c| self.id_of(&c))
    }

    /// Every nonempty subset of a recorded class set.
    pub fn cover(&self) -> &HashSet<LiveSet> {
        self.cover.get_or_init(|| self.live.iter().flat_map(|(s, _)| subsets_of(&unpack(*s))).collect())
    }

    /// Recorded class sets not strictly inside another one, in recording order.
    pub fn maximal(&self) -> &[LiveSet] {
        self.maximal.get_or_init(|| {
            let mut inner = HashSet::new();
            for (s, _) in &self.live {
                inner.extend(subsets_of(&unpack(*s)).into_iter().filter(|t| t != s));
            }
            self.live.iter().map(|(s, _)| *s).filter(|s| !inner.contains(s)).collect()
        })
    }

    /// Every tuple of length `arity` drawn from one recorded class set, once each.
    pub fn tuples(&self, arity: usize) -> Rc<[u32]> {
        if let Some(t) = self.tuples.borrow().get(&arity) {
            return t.clone();
        }
        let mut seen = HashSet::new();
        let mut flat = Vec::new();
        let mut tuple = Vec::with_capacity(arity);
        for set in self.maximal() {
            let ids = unpack(*set);
            for mut c in 0..ids.len().pow(arity as u32) {
                tuple.clear();
                for _ in 0..arity {
                    tuple.push(ids[c % ids.len()]);
                    c /= ids.len();
                }
                if seen.insert(tuple.clone()) {
                    flat.extend_from_slice(&tuple);
                }
            }
        }
        let t: Rc<[u32]> = flat.into();
        self.tuples.borrow_mut().insert(arity, t.clone());
        t
    }

    /// Whether the classes have jointly pebbled representatives.
    pub fn compatible(&self, ids: &[u32]) -> bool {
        let mut v = ids.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len() <= self.k && self.cover().contains(&pack(&v))
    }

    /// Replays every stored witness and checks it realises its class set
    /// under the literal prefix conditions.
    pub fn verify_witnesses(&self) -> std::result::Result<(), String> {
        for (set, w) in &self.live {
            let mut ids: Vec<u32> = (1..=w.len())
                .filter(|&l| no_overwrite(&[&w[..l], &w[..]]))
                .filter_map(|l| self.quotient(&w[..l]))
                .collect();
            ids.sort_unstable();
            ids.dedup();
            if pack(&ids) != *set {
                return Err(format!("witness {w:?} pebbles {ids:?}, recorded {:?}", unpack(*set)));
            }
        }
        Ok(())
    }

    /// Independent check that `q_n` is a homomorphism for every structure
    /// of this size: walks all k-histories whose final class lies in the
    /// truncation and tests that the classes of all prefixes compatible with
    /// the history under the literal definition are jointly pebbled.
    pub fn verify_quotient(&self, length: usize) -> std::result::Result<usize, String> {
        let mut checked = 0;
        let mut w: KHistory = Vec::new();
        self.walk(&mut w, length, &mut checked)?;
        Ok(checked)
    }

    fn walk(&self, w: &mut KHistory, length: usize, checked: &mut usize) -> std::result::Result<(), String> {
        if w.len() == length {
            return Ok(());
        }
        for a in 0..self.na {
            for p in 1..=self.k {
                w.push((a, p));
                if self.quotient(w).is_some() {
                    *checked += 1;
                    let ids: Vec<u32> = (1..=w.len())
                        .filter(|&l| no_overwrite(&[&w[..l], &w[..]]))
                        .filter_map(|l| self.quotient(&w[..l]))
                        .collect();
                    if !self.compatible(&ids) {
                        return Err(format!("history {w:?} relates classes {ids:?} missing from the quotient"));
                    }
                }
                if crate::history::structure_n(w, self.n).len() <= self.depth + 1 {
                    self.walk(w, length, checked)?;
                }
                w.pop();
            }
        }
        Ok(())
    }
}

/// A truncation of `H_{n,k} A` sharing its skeleton with every structure of the same size.
#[derive(Clone, Debug)]
pub struct HellaStructure {
    pub skeleton: Rc<HellaSkeleton>,
    pub base: RelStructure,
}

pub fn build_hnk(a: &RelStructure, n: usize, k: usize, m: usize) -> Result<HellaStructure> {
    Ok(HellaStructure { skeleton: Rc::new(HellaSkeleton::new(a.size(), n, k, m)?), base: a.clone() })
}

impl HellaStructure {
    pub fn with_skeleton(skeleton: Rc<HellaSkeleton>, a: &RelStructure) -> Result<Self> {
        if skeleton.na != a.size() {
            return Err(Error::Precondition("skeleton built for a different universe size".into()));
        }
        Ok(HellaStructure { skeleton, base: a.clone() })
    }

    pub fn len(&self) -> usize {
        self.skeleton.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skeleton.is_empty()
    }

    pub fn grade(&self) -> (usize, usize, usize) {
        (self.skeleton.n, self.skeleton.k, self.skeleton.depth)
    }

    pub fn holds(&self, r: usize, tuple: &[u32]) -> bool {
        let elems: Vec<usize> = tuple.iter().map(|&c| self.skeleton.counit(c)).collect();
        self.base.holds(r, &elems) && self.skeleton.compatible(tuple)
    }

    /// Calls `f` on every related tuple once.
    pub fn for_each_tuple(&self, mut f: impl FnMut(usize, &[u32]) -> bool) -> bool {
        let sig = self.base.signature();
        let mut elems = Vec::new();
        for r in 0..sig.len() {
            let ar = sig.arity(r);
            for tuple in self.skeleton.tuples(ar).chunks(ar) {
                elems.clear();
                elems.extend(tuple.iter().map(|&id| self.skeleton.counit(id)));
                if self.base.holds(r, &elems) && !f(r, tuple) {
                    return false;
                }
            }
        }
        true
    }

    pub fn relation(&self, r: usize) -> HashSet<Vec<u32>> {
        let mut out = HashSet::new();
        self.for_each_tuple(|rr, t| {
            if rr == r {
                out.insert(t.to_vec());
            }
            true
        });
        out
    }

    /// First related tuple whose counit image is unrelated.
    pub fn counit_violation(&self) -> Option<(usize, Vec<u32>)> {
        let mut bad = None;
        self.for_each_tuple(|r, t| {
            let elems: Vec<usize> = t.iter().map(|&c| self.skeleton.counit(c)).collect();
            if !self.base.holds(r, &elems) {
                bad = Some((r, t.to_vec()));
                return false;
            }
            true
        });
        bad
    }
}
