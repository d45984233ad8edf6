//! The block game read off the Kleisli maps of `H_{n,k}`: before each block
//! Duplicator commits to a total map, then Spoiler places up to `n` pebbles
//! along it. The position is checked after every single move.
//!
//! A block that stops short of `n` moves must be followed by a block opening
//! with one of its pebbles (otherwise the two would form one block).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::GameVariant;
use crate::history::{Block, Move};
use crate::structures::{partial_hom_unchecked, RelStructure};

/// Pebble `p` (1-based) to its `(element, image)`.
pub type Pebbles = Vec<Option<(usize, usize)>>;

/// Partial homomorphism (partial isomorphism under `neg`) of the pebbled pairs.
pub fn position_ok(a: &RelStructure, b: &RelStructure, pebbles: &[Option<(usize, usize)>], neg: bool) -> bool {
    let mut img = vec![None; a.size()];
    let mut hit = vec![None; b.size()];
    for &(x, y) in pebbles.iter().flatten() {
        match img[x] {
            Some(z) if z != y => return false,
            _ => img[x] = Some(y),
        }
        if neg {
            match hit[y] {
                Some(z) if z != x => return false,
                _ => hit[y] = Some(x),
            }
        }
    }
    partial_hom_unchecked(a, b, &img, neg)
}

/// Total maps `A → B` allowed by the injectivity and surjectivity flags, lexicographic.
pub fn admissible_maps(na: usize, nb: usize, v: GameVariant) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let count = nb.checked_pow(na as u32).unwrap_or(usize::MAX);
    for mut c in 0..count {
        let mut h = vec![0; na];
        for slot in h.iter_mut().rev() {
            *slot = c % nb;
            c /= nb;
        }
        let mut seen = vec![false; nb];
        let mut inj = true;
        for &y in &h {
            inj &= !seen[y];
            seen[y] = true;
        }
        if (v.xi && !inj) || (v.xs && seen.iter().any(|s| !s)) {
            continue;
        }
        out.push(h);
    }
    out
}

pub fn is_admissible(h: &[usize], nb: usize, v: GameVariant) -> bool {
    let mut seen = vec![false; nb];
    let mut inj = true;
    for &y in h {
        if y >= nb {
            return false;
        }
        inj &= !seen[y];
        seen[y] = true;
    }
    !(v.xi && !inj) && !(v.xs && seen.iter().any(|s| !s))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct State {
    pebbles: Pebbles,
    /// Pebbles of the last block when it was short.
    open: Option<u32>,
}

pub struct BlockGame<'s> {
    pub a: &'s RelStructure,
    pub b: &'s RelStructure,
    pub v: GameVariant,
    maps: Vec<Vec<usize>>,
    memo: HashMap<(State, usize), Option<u32>>,
}

pub const MAP_BOUND: usize = 1 << 16;

impl<'s> BlockGame<'s> {
    pub fn new(a: &'s RelStructure, b: &'s RelStructure, v: GameVariant) -> Result<Self> {
        if a.signature() != b.signature() {
            return Err(Error::Precondition("structures have different signatures".into()));
        }
        if b.size().checked_pow(a.size() as u32).is_none_or(|c| c > MAP_BOUND) {
            return Err(Error::Resource(format!("more than {MAP_BOUND} total maps")));
        }
        let maps = admissible_maps(a.size(), b.size(), v);
        Ok(BlockGame { a, b, v, maps, memo: HashMap::new() })
    }

    fn start() -> State {
        State { pebbles: Vec::new(), open: None }
    }

    fn pebbles_for(&self, p: &Pebbles) -> Pebbles {
        let mut q = p.clone();
        q.resize(self.v.k + 1, None);
        q
    }

    /// Whether Duplicator survives `rounds` blocks from the start.
    pub fn duplicator_wins(&mut self, rounds: usize) -> bool {
        let s = State { pebbles: self.pebbles_for(&Vec::new()), ..Self::start() };
        self.solve(&s, rounds).is_some()
    }

    fn solve(&mut self, s: &State, rounds: usize) -> Option<u32> {
        if rounds == 0 {
            return Some(0);
        }
        if let Some(r) = self.memo.get(&(s.clone(), rounds)) {
            return *r;
        }
        let mut found = None;
        for i in 0..self.maps.len() {
            let h = self.maps[i].clone();
            let mut peb = s.pebbles.clone();
            if self.block_survives(s.open, &h, &mut peb, 0, 0, rounds) {
                found = Some(i as u32);
                break;
            }
        }
        self.memo.insert((s.clone(), rounds), found);
        found
    }

    /// Every continuation of the current block along `h` keeps the position
    /// valid, and every way of ending it leaves a won state.
    fn block_survives(&mut self, open: Option<u32>, h: &[usize], peb: &mut Pebbles, used: u32, len: usize, rounds: usize) -> bool {
        let (n, k, neg) = (self.v.n, self.v.k, self.v.xn);
        if len == n {
            return true;
        }
        for a in 0..self.a.size() {
            for p in 1..=k {
                if used >> p & 1 == 1 {
                    continue;
                }
                if len == 0 {
                    if let Some(mask) = open {
                        if mask >> p & 1 == 0 {
                            continue;
                        }
                    }
                }
                let saved = peb[p];
                peb[p] = Some((a, h[a]));
                let ok = position_ok(self.a, self.b, peb, neg) && {
                    let used2 = used | 1 << p;
                    let next = State { pebbles: peb.clone(), open: if len + 1 < n { Some(used2) } else { None } };
                    self.solve(&next, rounds - 1).is_some() && self.block_survives(open, h, peb, used2, len + 1, rounds)
                };
                peb[p] = saved;
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Duplicator's map after the structured history `t`, when `rounds`
    /// blocks remain from there and the position so far is still won.
    pub fn response(&mut self, t: &[Block], rounds: usize) -> Option<Vec<usize>> {
        let (s, ok) = self.state_after(t, rounds);
        if !ok {
            return None;
        }
        self.solve(&s, rounds).map(|i| self.maps[i as usize].clone())
    }

    fn state_after(&mut self, t: &[Block], rounds: usize) -> (State, bool) {
        let mut s = State { pebbles: self.pebbles_for(&Vec::new()), ..Self::start() };
        for (j, block) in t.iter().enumerate() {
            let Some(i) = self.solve(&s, rounds + t.len() - j) else { return (s, false) };
            let h = self.maps[i as usize].clone();
            let mut used = 0u32;
            for &(a, p) in block {
                s.pebbles[p] = Some((a, h[a]));
                used |= 1 << p;
            }
            s.open = if block.len() < self.v.n { Some(used) } else { None };
        }
        (s, true)
    }
}

/// First play of at most `depth` blocks (blocks nonempty with distinct
/// pebbles, in any order) on which the block strategy loses.
pub fn losing_block_play(
    a: &RelStructure,
    b: &RelStructure,
    v: GameVariant,
    depth: usize,
    strategy: &dyn Fn(&[Block]) -> Vec<usize>,
) -> Option<Vec<Block>> {
    let mut t: Vec<Block> = Vec::new();
    let mut peb: Pebbles = vec![None; v.k + 1];
    fn rounds(
        a: &RelStructure,
        b: &RelStructure,
        v: GameVariant,
        depth: usize,
        strategy: &dyn Fn(&[Block]) -> Vec<usize>,
        t: &mut Vec<Block>,
        peb: &mut Pebbles,
    ) -> bool {
        if t.len() == depth {
            return true;
        }
        let h = strategy(t);
        if h.len() != a.size() || !is_admissible(&h, b.size(), v) {
            t.push(Vec::new());
            return false;
        }
        t.push(Vec::new());
        let ok = moves(a, b, v, depth, strategy, t, peb, &h, 0);
        if ok {
            t.pop();
        }
        ok
    }
    #[allow(clippy::too_many_arguments)]
    fn moves(
        a: &RelStructure,
        b: &RelStructure,
        v: GameVariant,
        depth: usize,
        strategy: &dyn Fn(&[Block]) -> Vec<usize>,
        t: &mut Vec<Block>,
        peb: &mut Pebbles,
        h: &[usize],
        used: u32,
    ) -> bool {
        let len = t.last().unwrap().len();
        if len == v.n {
            return true;
        }
        for x in 0..a.size() {
            for p in 1..=v.k {
                if used >> p & 1 == 1 {
                    continue;
                }
                let saved = peb[p];
                peb[p] = Some((x, h[x]));
                t.last_mut().unwrap().push((x, p));
                let ok = position_ok(a, b, peb, v.xn)
                    && rounds(a, b, v, depth, strategy, t, peb)
                    && moves(a, b, v, depth, strategy, t, peb, h, used | 1 << p);
                if !ok {
                    return false;
                }
                t.last_mut().unwrap().pop();
                peb[p] = saved;
            }
        }
        true
    }
    if rounds(a, b, v, depth, strategy, &mut t, &mut peb) {
        None
    } else {
        Some(t)
    }
}

/// First play of at most `len` single moves on which the pebble strategy loses.
pub fn losing_pebble_play(
    a: &RelStructure,
    b: &RelStructure,
    k: usize,
    len: usize,
    neg: bool,
    strategy: &dyn Fn(&[Move], usize) -> Vec<usize>,
) -> Option<Vec<Move>> {
    fn go(
        a: &RelStructure,
        b: &RelStructure,
        k: usize,
        len: usize,
        neg: bool,
        strategy: &dyn Fn(&[Move], usize) -> Vec<usize>,
        s: &mut Vec<Move>,
        peb: &mut Pebbles,
    ) -> bool {
        if s.len() == len {
            return true;
        }
        for p in 1..=k {
            let h = strategy(s, p);
            for x in 0..a.size() {
                let saved = peb[p];
                peb[p] = h.get(x).map(|&y| (x, y));
                s.push((x, p));
                let ok = h.len() == a.size() && position_ok(a, b, peb, neg) && go(a, b, k, len, neg, strategy, s, peb);
                if !ok {
                    return false;
                }
                s.pop();
                peb[p] = saved;
            }
        }
        true
    }
    let mut s = Vec::new();
    if go(a, b, k, len, neg, strategy, &mut s, &mut vec![None; k + 1]) {
        None
    } else {
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> RelStructure {
        let e: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        RelStructure::undirected_graph(n, &e)
    }

    #[test]
    fn triangle_to_edge_needs_three_blocks() {
        let (k3, k2) = (k(3), k(2));
        let mut g = BlockGame::new(&k3, &k2, GameVariant::of(1, 2, 0, 0, 0)).unwrap();
        assert!(g.duplicator_wins(2));
        assert!(!g.duplicator_wins(3));
        let mut g = BlockGame::new(&k3, &k2, GameVariant::of(1, 1, 0, 0, 0)).unwrap();
        assert!(g.duplicator_wins(5));
    }

    #[test]
    fn edge_into_triangle_always_survives() {
        let (k2, k3) = (k(2), k(3));
        for (n, kk) in [(1, 2), (2, 2), (1, 3), (2, 3)] {
            let mut g = BlockGame::new(&k2, &k3, GameVariant::of(n, kk, 0, 0, 0)).unwrap();
            assert!(g.duplicator_wins(3));
            let t: Vec<Block> = vec![vec![(0, 1)]];
            let h = g.response(&t, 2).unwrap();
            assert_eq!(h.len(), 2);
        }
    }

    #[test]
    fn simulations_find_losses() {
        let (k3, k2) = (k(3), k(2));
        let v = GameVariant::of(1, 2, 0, 0, 0);
        let constant = |_: &[Block]| vec![0, 0, 0];
        assert!(losing_block_play(&k3, &k2, v, 1, &constant).is_none());
        let lost = losing_block_play(&k3, &k2, v, 2, &constant).unwrap();
        assert_eq!(lost.len(), 2);
        let alternate = |_: &[Move], _p: usize| vec![0, 1, 0];
        assert!(losing_pebble_play(&k3, &k2, 2, 2, false, &alternate).is_some());
        let k2k3 = |_: &[Move], _p: usize| vec![0, 1];
        assert!(losing_pebble_play(&k2, &k3, 2, 4, false, &k2k3).is_none());
    }

    #[test]
    fn positions() {
        let k2 = k(2);
        assert!(position_ok(&k2, &k2, &[None, Some((0, 0)), Some((1, 1))], true));
        assert!(!position_ok(&k2, &k2, &[None, Some((0, 0)), Some((0, 1))], false));
        assert!(!position_ok(&k2, &k2, &[None, Some((0, 0)), Some((1, 0))], true));
        assert_eq!(admissible_maps(2, 2, GameVariant::of(1, 1, 1, 0, 0)).len(), 2);
    }
}
