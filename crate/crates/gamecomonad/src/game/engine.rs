use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matching;
use crate::structures::{enumerate_partial_maps, PartialHom, RelStructure};

use super::system::{BackAndForthSystem, Codec, CodeSet};
use super::variant::GameVariant;

/// A total map extending `base` that witnesses the forth condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForthWitness {
    pub base: PartialHom,
    pub extension: Vec<usize>,
}

/// Why a candidate total map fails the forth condition for a given base map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongLength,
    Disagrees { element: usize },
    NotInjective,
    NotSurjective,
    /// `(base ↾ c) ∪ (φ ↾ d)` is not in the system.
    Missing { c: Vec<usize>, d: Vec<usize> },
}

/// Per-map data reused by every search on the same base map.
struct Local {
    dom: Vec<usize>,
    free: Vec<usize>,
    /// `(|C|, code of base ↾ C)` for every `C ⊆ dom`.
    restrictions: Vec<(usize, u64, u32)>,
    /// Scopes `D ⊆ free` with `2 ≤ |D| ≤ n`, grouped by their two largest positions `(i, j)`.
    fwd: Vec<Vec<Vec<Vec<usize>>>>,
    used: u64,
    injective_base: bool,
}

/// The comparison of two structures under one game variant.
pub struct Game<'s> {
    pub a: &'s RelStructure,
    pub b: &'s RelStructure,
    pub v: GameVariant,
    pub(crate) codec: Codec,
}

pub(crate) struct RunOutcome {
    pub system: BackAndForthSystem,
    pub eliminated: Vec<(usize, u64, Reason)>,
}

#[derive(Clone, Debug)]
pub(crate) enum Reason {
    Restriction(u64),
    NoWitness,
}

impl<'s> Game<'s> {
    pub fn new(a: &'s RelStructure, b: &'s RelStructure, v: GameVariant) -> Result<Self> {
        if a.signature() != b.signature() {
            return Err(Error::Precondition("structures have different signatures".into()));
        }
        if a.size() > 64 || b.size() > 64 {
            return Err(Error::Resource("structures larger than 64 elements".into()));
        }
        let codec = Codec::new(a.size(), b.size())?;
        Ok(Game { a, b, v, codec })
    }

    fn all_b(&self) -> u64 {
        if self.codec.nb == 64 {
            u64::MAX
        } else {
            (1u64 << self.codec.nb) - 1
        }
    }

    pub fn initial_system(&self) -> BackAndForthSystem {
        let codes = enumerate_partial_maps(self.a, self.b, self.v.k, self.v.xn)
            .iter()
            .map(|m| self.codec.encode(m.images()))
            .collect();
        BackAndForthSystem::from_codes(self.v, self.codec.clone(), codes, 0)
    }

    fn local(&self, code: u64) -> Local {
        let c = &self.codec;
        let dom: Vec<usize> = (0..c.na).filter(|&a| c.digit(code, a).is_some()).collect();
        let free: Vec<usize> = (0..c.na).filter(|&a| c.digit(code, a).is_none()).collect();
        let mut restrictions = Vec::with_capacity(1 << dom.len());
        for mask in 0u32..(1 << dom.len()) {
            let mut rc = 0;
            for (i, &a) in dom.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    rc += (c.digit(code, a).unwrap() as u64 + 1) * c.w[a];
                }
            }
            restrictions.push((mask.count_ones() as usize, rc, mask));
        }
        restrictions.sort_by_key(|&(s, _, m)| (s, m));
        let r = free.len();
        let mut fwd = vec![vec![Vec::new(); r]; r];
        let n = self.v.n.min(self.v.k);
        if n >= 2 {
            for j in 0..r {
                for i in 0..j {
                    // subsets of positions below i, of size at most n - 2
                    let below: Vec<usize> = (0..i).collect();
                    for sub in subsets_up_to(&below, n - 2) {
                        let mut scope = sub;
                        scope.push(i);
                        scope.push(j);
                        fwd[i][j].push(scope);
                    }
                }
            }
        }
        let mut used = 0u64;
        let mut injective_base = true;
        for &a in &dom {
            let b = c.digit(code, a).unwrap();
            if used >> b & 1 == 1 {
                injective_base = false;
            }
            used |= 1 << b;
        }
        Local { dom, free, restrictions, fwd, used, injective_base }
    }

    /// Every `(base ↾ C) ∪ (φ ↾ D)` with `D` the free positions `scope`
    /// mapped to `vals` lies in `set`.
    #[inline]
    fn scope_ok(&self, loc: &Local, set: &CodeSet, scope: &[usize], vals: &[usize]) -> bool {
        let mut dcode = 0;
        for (&p, &b) in scope.iter().zip(vals) {
            dcode += (b as u64 + 1) * self.codec.w[loc.free[p]];
        }
        let room = self.v.k - scope.len();
        loc.restrictions.iter().take_while(|r| r.0 <= room).all(|&(_, rc, _)| set.contains(rc + dcode))
    }

    fn base_ok(&self, loc: &Local, set: &CodeSet) -> bool {
        loc.restrictions.iter().all(|&(s, rc, _)| s > self.v.k || set.contains(rc))
    }

    /// Lexicographically least forth witness for the map with `code`, searched against `set`.
    pub(crate) fn search(&self, code: u64, set: &CodeSet) -> Option<Vec<usize>> {
        let loc = self.local(code);
        self.search_local(code, &loc, set)
    }

    fn search_local(&self, code: u64, loc: &Local, set: &CodeSet) -> Option<Vec<usize>> {
        let v = self.v;
        if v.xi && !loc.injective_base {
            return None;
        }
        if !self.base_ok(loc, set) {
            return None;
        }
        let r = loc.free.len();
        let nb = self.codec.nb;
        let mut doms = vec![0u64; r];
        for (p, d) in doms.iter_mut().enumerate() {
            for b in 0..nb {
                if self.scope_ok(loc, set, &[p], &[b]) {
                    *d |= 1 << b;
                }
            }
            if v.xi {
                *d &= !loc.used;
            }
            if *d == 0 {
                return None;
            }
        }
        let mut vals = vec![0usize; r];
        let mut scratch = Vec::new();
        if !self.feasible(&doms, 0, loc.used) {
            return None;
        }
        if self.assign(loc, set, 0, &mut doms, &mut vals, loc.used, &mut scratch) {
            let mut phi = vec![0; self.codec.na];
            for &a in &loc.dom {
                phi[a] = self.codec.digit(code, a).unwrap();
            }
            for (p, &a) in loc.free.iter().enumerate() {
                phi[a] = vals[p];
            }
            Some(phi)
        } else {
            None
        }
    }

    /// Matching-based check that the remaining positions `from..` can still
    /// be completed injectively / surjectively.
    fn feasible(&self, doms: &[u64], from: usize, used: u64) -> bool {
        let rest = &doms[from..];
        let nb = self.codec.nb;
        let all = self.all_b();
        match (self.v.xi, self.v.xs) {
            (false, false) => rest.iter().all(|&d| d != 0),
            (true, false) => {
                let adj: Vec<u64> = rest.iter().map(|&d| d & !used).collect();
                matching::saturates_left(&adj, nb)
            }
            (true, true) => {
                let free_targets = (all & !used).count_ones() as usize;
                if free_targets != rest.len() {
                    return false;
                }
                let adj: Vec<u64> = rest.iter().map(|&d| d & !used).collect();
                matching::saturates_left(&adj, nb)
            }
            (false, true) => {
                if rest.contains(&0) {
                    return false;
                }
                let uncovered = all & !used;
                if (uncovered.count_ones() as usize) > rest.len() {
                    return false;
                }
                if uncovered == 0 {
                    return true;
                }
                let t = matching::transpose(rest, nb);
                let adj: Vec<u64> = (0..nb).filter(|&b| uncovered >> b & 1 == 1).map(|b| t[b]).collect();
                matching::saturates_left(&adj, rest.len())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        loc: &Local,
        set: &CodeSet,
        i: usize,
        doms: &mut Vec<u64>,
        vals: &mut Vec<usize>,
        used: u64,
        scratch: &mut Vec<usize>,
    ) -> bool {
        let r = loc.free.len();
        if i == r {
            return !self.v.xs || used == self.all_b();
        }
        let mut cand = doms[i];
        if self.v.xi {
            cand &= !used;
        }
        let saved: Vec<u64> = doms[i + 1..].to_vec();
        while cand != 0 {
            let b = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            vals[i] = b;
            let nused = used | 1 << b;
            let mut ok = true;
            for j in i + 1..r {
                let mut d = saved[j - i - 1];
                if self.v.xi {
                    d &= !nused;
                }
                if !loc.fwd[i][j].is_empty() {
                    let mut m = d;
                    while m != 0 {
                        let c = m.trailing_zeros() as usize;
                        m &= m - 1;
                        vals[j] = c;
                        for scope in &loc.fwd[i][j] {
                            scratch.clear();
                            scratch.extend(scope.iter().map(|&p| vals[p]));
                            if !self.scope_ok(loc, set, scope, scratch) {
                                d &= !(1 << c);
                                break;
                            }
                        }
                    }
                }
                if d == 0 {
                    ok = false;
                    break;
                }
                doms[j] = d;
            }
            if ok && self.feasible(doms, i + 1, nused) && self.assign(loc, set, i + 1, doms, vals, nused, scratch) {
                return true;
            }
        }
        doms[i + 1..].copy_from_slice(&saved);
        false
    }

    /// First violated clause of the forth condition for `phi` over the base map `code`.
    pub(crate) fn violation(&self, code: u64, phi: &[usize], set: &CodeSet) -> Option<Violation> {
        let c = &self.codec;
        if phi.len() != c.na || phi.iter().any(|&b| b >= c.nb) {
            return Some(Violation::WrongLength);
        }
        for a in 0..c.na {
            if let Some(b) = c.digit(code, a) {
                if phi[a] != b {
                    return Some(Violation::Disagrees { element: a });
                }
            }
        }
        let mut seen = 0u64;
        for &b in phi {
            if self.v.xi && seen >> b & 1 == 1 {
                return Some(Violation::NotInjective);
            }
            seen |= 1 << b;
        }
        if self.v.xs && seen != self.all_b() {
            return Some(Violation::NotSurjective);
        }
        let loc = self.local(code);
        for (s, rc, mask) in &loc.restrictions {
            if *s <= self.v.k && !set.contains(*rc) {
                return Some(Violation::Missing { c: mask_elems(&loc.dom, *mask), d: vec![] });
            }
        }
        let positions: Vec<usize> = (0..loc.free.len()).collect();
        for size in 1..=self.v.n.min(loc.free.len()) {
            for scope in subsets_exact(&positions, size) {
                let vals: Vec<usize> = scope.iter().map(|&p| phi[loc.free[p]]).collect();
                let mut dcode = 0;
                for (&p, &b) in scope.iter().zip(&vals) {
                    dcode += (b as u64 + 1) * c.w[loc.free[p]];
                }
                for &(s, rc, mask) in &loc.restrictions {
                    if s + size <= self.v.k && !set.contains(rc + dcode) {
                        return Some(Violation::Missing {
                            c: mask_elems(&loc.dom, mask),
                            d: scope.iter().map(|&p| loc.free[p]).collect(),
                        });
                    }
                }
            }
        }
        None
    }

    /// Lexicographically least forth witness for `f` relative to `s`.
    pub fn forth_check(&self, f: &PartialHom, s: &BackAndForthSystem) -> Result<Option<ForthWitness>> {
        self.check_map(f)?;
        if f.len() >= self.v.k {
            return Err(Error::Precondition(format!("forth condition asked for a map of size {} = k", f.len())));
        }
        let code = self.codec.encode(f.images());
        Ok(self.search(code, &s.set).map(|extension| ForthWitness { base: f.clone(), extension }))
    }

    pub(crate) fn check_map(&self, f: &PartialHom) -> Result<()> {
        if f.source_size() != self.codec.na || f.images().iter().flatten().any(|&b| b >= self.codec.nb) {
            return Err(Error::Precondition("partial map does not fit the compared structures".into()));
        }
        Ok(())
    }

    /// One refinement round.
    pub fn refine(&self, s: &BackAndForthSystem) -> BackAndForthSystem {
        self.round(s, None, None)
    }

    fn round(
        &self,
        s: &BackAndForthSystem,
        mut hints: Option<&mut HashMap<u64, Vec<usize>>>,
        mut log: Option<&mut Vec<(usize, u64, Reason)>>,
    ) -> BackAndForthSystem {
        let c = &self.codec;
        let mut next = Vec::with_capacity(s.members.len());
        let mut set = CodeSet::new(c);
        let stage = s.stage + 1;
        for &code in &s.members {
            let size = c.size(code);
            let mut dropped_sub = None;
            for a in 0..c.na {
                if let Some(b) = c.digit(code, a) {
                    let sub = code - (b as u64 + 1) * c.w[a];
                    if !set.contains(sub) {
                        dropped_sub = Some(sub);
                        break;
                    }
                }
            }
            if let Some(sub) = dropped_sub {
                if let Some(l) = log.as_deref_mut() {
                    l.push((stage, code, Reason::Restriction(sub)));
                }
                continue;
            }
            let pass = size >= self.v.k || {
                let loc = self.local(code);
                let hinted = hints
                    .as_deref()
                    .and_then(|h| h.get(&code))
                    .is_some_and(|phi| self.violation(code, phi, &s.set).is_none());
                hinted
                    || match self.search_local(code, &loc, &s.set) {
                        Some(phi) => {
                            if let Some(h) = hints.as_deref_mut() {
                                h.insert(code, phi);
                            }
                            true
                        }
                        None => false,
                    }
            };
            if pass {
                next.push(code);
                set.insert(code);
            } else if let Some(l) = log.as_deref_mut() {
                l.push((stage, code, Reason::NoWitness));
            }
        }
        BackAndForthSystem { variant: self.v, codec: c.clone(), members: next, set, stage }
    }

    pub(crate) fn run(&self, stop_when_empty_lost: bool, record: bool) -> RunOutcome {
        let mut s = self.initial_system();
        let mut hints = HashMap::new();
        let mut log = Vec::new();
        loop {
            let next = self.round(&s, Some(&mut hints), record.then_some(&mut log));
            let done = next.len() == s.len();
            let lost = !next.contains_empty();
            s = next;
            if done || (stop_when_empty_lost && lost) {
                return RunOutcome { system: s, eliminated: log };
            }
        }
    }

    /// Greatest fixpoint of the refinement operator.
    pub fn canonical_system(&self) -> BackAndForthSystem {
        self.run(false, false).system
    }

    pub fn duplicator_wins(&self) -> bool {
        self.run(true, false).system.contains_empty()
    }

    pub fn verdict(&self) -> Verdict {
        let s = self.canonical_system();
        Verdict { variant: self.v, duplicator_wins: s.contains_empty(), stages: s.stage, system_size: s.len() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub variant: GameVariant,
    pub duplicator_wins: bool,
    pub stages: usize,
    pub system_size: usize,
}

impl Verdict {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "variant": self.variant.to_json_value(),
            "duplicator_wins": self.duplicator_wins,
            "stages": self.stages,
            "system_size": self.system_size,
        })
    }
}

fn mask_elems(dom: &[usize], mask: u32) -> Vec<usize> {
    dom.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a).collect()
}

pub(crate) fn subsets_exact(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, size, 0, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    (0..=max.min(items.len())).flat_map(|s| subsets_exact(items, s)).collect()
}

pub fn initial_system(a: &RelStructure, b: &RelStructure, v: GameVariant) -> Result<BackAndForthSystem> {
    Ok(Game::new(a, b, v)?.initial_system())
}

pub fn canonical_system(a: &RelStructure, b: &RelStructure, v: GameVariant) -> Result<BackAndForthSystem> {
    Ok(Game::new(a, b, v)?.canonical_system())
}

pub fn duplicator_wins(a: &RelStructure, b: &RelStructure, v: GameVariant) -> Result<bool> {
    Ok(Game::new(a, b, v)?.duplicator_wins())
}

/// All eight verdicts at grade `(n, k)`, in [`GameVariant::cube`] order.
pub fn verdict_cube(a: &RelStructure, b: &RelStructure, n: usize, k: usize) -> Result<Vec<(GameVariant, bool)>> {
    GameVariant::cube(n, k)?.into_iter().map(|v| Ok((v, duplicator_wins(a, b, v)?))).collect()
}

/// Covering edges `(stronger, weaker)` where the stronger game is won but the weaker is not.
pub fn monotonicity_violations(cube: &[(GameVariant, bool)]) -> Vec<(GameVariant, GameVariant)> {
    let mut out = Vec::new();
    for (s, ws) in cube {
        for (w, ww) in cube {
            let diff = (s.xi != w.xi) as u8 + (s.xs != w.xs) as u8 + (s.xn != w.xn) as u8;
            if diff == 1 && s.dominates(w) && *ws && !*ww {
                out.push((*s, *w));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> RelStructure {
        RelStructure::undirected_graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn two_triangles() -> RelStructure {
        RelStructure::undirected_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    }

    fn k(n: usize) -> RelStructure {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        RelStructure::undirected_graph(n, &e)
    }

    #[test]
    fn initial_matches_partial_maps() {
        let (k3, k2) = (k(3), k(2));
        let g = Game::new(&k3, &k2, GameVariant::of(2, 2, 0, 0, 0)).unwrap();
        let s = g.initial_system();
        assert_eq!(s.len(), 13);
        assert_eq!(s.stage(), 0);
        assert!(s.is_restriction_closed());
    }

    #[test]
    fn loop_excluded_under_negations() {
        let sig = crate::structures::Signature::of(&[("E", 2)]);
        let looped = RelStructure::from_indices(sig.clone(), 1, vec![vec![vec![0, 0]]]).unwrap();
        let plain = RelStructure::from_indices(sig, 1, vec![vec![]]).unwrap();
        let s = initial_system(&plain, &looped, GameVariant::of(1, 1, 0, 0, 1)).unwrap();
        assert_eq!(s.len(), 1);
        let s = initial_system(&plain, &looped, GameVariant::of(1, 1, 0, 0, 0)).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn forth_examples() {
        let k2 = k(2);
        let g = Game::new(&k2, &k2, GameVariant::of(1, 2, 0, 0, 0)).unwrap();
        let w = g.forth_check(&PartialHom::empty(2), &g.initial_system()).unwrap().unwrap();
        // one pebble per round: single points are all that is checked from the empty map
        assert_eq!(w.extension, vec![0, 0]);
        let g2 = Game::new(&k2, &k2, GameVariant::of(2, 2, 0, 0, 0)).unwrap();
        let w = g2.forth_check(&PartialHom::empty(2), &g2.initial_system()).unwrap().unwrap();
        assert_eq!(w.extension, vec![0, 1]);
        let one = RelStructure::undirected_graph(1, &[]);
        let g = Game::new(&k2, &one, GameVariant::of(1, 2, 1, 0, 0)).unwrap();
        assert!(g.forth_check(&PartialHom::empty(2), &g.initial_system()).unwrap().is_none());
        let full = PartialHom::from_pairs(2, &[(0, 0), (1, 1)]);
        let g = Game::new(&k2, &k2, GameVariant::of(1, 2, 0, 0, 0)).unwrap();
        assert!(g.forth_check(&full, &g.initial_system()).is_err());
    }

    #[test]
    fn cycles_versus_triangles() {
        let (c6, t) = (cycle(6), two_triangles());
        assert!(duplicator_wins(&c6, &t, GameVariant::of(1, 2, 1, 1, 1)).unwrap());
        assert!(!duplicator_wins(&c6, &t, GameVariant::of(2, 2, 1, 1, 1)).unwrap());
        assert!(!duplicator_wins(&c6, &t, GameVariant::of(2, 2, 1, 1, 0)).unwrap());
        assert!(!duplicator_wins(&c6, &t, GameVariant::of(1, 3, 1, 1, 1)).unwrap());
        let cube = verdict_cube(&c6, &t, 1, 2).unwrap();
        assert!(cube.iter().all(|(_, w)| *w));
    }

    #[test]
    fn size_and_hom_cases() {
        assert!(duplicator_wins(&k(2), &k(3), GameVariant::of(1, 2, 0, 0, 0)).unwrap());
        for v in GameVariant::cube(1, 2).unwrap().into_iter().filter(|v| v.xi) {
            assert!(!duplicator_wins(&k(3), &k(2), v).unwrap());
        }
        let c5 = cycle(5);
        for v in GameVariant::cube(2, 3).unwrap() {
            assert!(duplicator_wins(&c5, &c5, v).unwrap());
        }
    }

    #[test]
    fn refine_is_antitone_and_stable() {
        let (k3, k2) = (k(3), k(2));
        let g = Game::new(&k3, &k2, GameVariant::of(1, 2, 0, 0, 1)).unwrap();
        let s0 = g.initial_system();
        let s1 = g.refine(&s0);
        assert!(s1.members().iter().all(|m| s0.contains(m)));
        let fix = g.canonical_system();
        assert!(g.refine(&fix).same_members(&fix));
        assert!(fix.is_restriction_closed());
    }
}
