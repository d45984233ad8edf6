//! Direct solver for the pebble game on its position graph.
//!
//! A position records the pebbled pairs as a partial map of size at most `k`.
//! Two pebbles on the same element behave like one pebble plus a free one,
//! since Spoiler is free to lift either. A round runs:
//!
//! 1. Spoiler picks up at most `n` pebbles, leaving `ρ'`.
//! 2. Duplicator answers with an admissible total map `h ⊇ ρ'`.
//! 3. Spoiler places the picked pebbles (at most `min(n, k - |ρ'|)` of them)
//!    on elements `D`, reaching `ρ' ∪ h↾D`.
//!
//! Spoiler wins on reaching a position that is not a partial homomorphism
//! (partial isomorphism when negations are preserved). Duplicator wins iff
//! the empty position lies in the greatest safe set.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::structures::{partial_hom_unchecked, RelStructure};

use super::engine::subsets_up_to;
use super::system::Codec;
use super::variant::GameVariant;

pub const DEFAULT_FUNCTION_BOUND: u64 = 1 << 16;

const INJ: u8 = 1;
const SURJ: u8 = 2;

/// The game graph for a fixed shape `(|A|, |B|, n, k)`; independent of the relations.
pub struct PositionGraph {
    pub na: usize,
    pub nb: usize,
    pub n: usize,
    pub k: usize,
    codec: Codec,
    positions: Vec<u64>,
    words: usize,
    /// Spoiler's lifting choices: indices of the remaining positions `ρ'`.
    lifts: Vec<Vec<u32>>,
    /// Duplicator's answers from `ρ'`: class flags and the mask of reachable positions.
    answers: Vec<Vec<(u8, Vec<u64>)>>,
}

impl PositionGraph {
    pub fn new(na: usize, nb: usize, n: usize, k: usize, bound: u64) -> Result<Self> {
        let functions = (nb as u64).checked_pow(na as u32).unwrap_or(u64::MAX);
        if functions > bound {
            return Err(Error::Resource(format!("{nb}^{na} total maps exceed the bound {bound}")));
        }
        if nb > 64 {
            return Err(Error::Resource("targets larger than 64 elements".into()));
        }
        let codec = Codec::new(na, nb)?;
        let mut positions = Vec::new();
        enumerate_positions(&codec, 0, 0, k, &mut positions);
        positions.sort_by_key(|&c| (codec.size(c), c));
        let index: HashMap<u64, u32> = positions.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        let words = positions.len().div_ceil(64);
        let all_b: u64 = if nb == 64 { u64::MAX } else { (1 << nb) - 1 };
        let elems: Vec<usize> = (0..na).collect();

        let mut lifts = Vec::with_capacity(positions.len());
        for &code in &positions {
            let dom: Vec<usize> = (0..na).filter(|&a| codec.digit(code, a).is_some()).collect();
            let mut succ = Vec::new();
            for lifted in subsets_up_to(&dom, n) {
                let mut c = code;
                for &a in &lifted {
                    c -= (codec.digit(code, a).unwrap() as u64 + 1) * codec.w[a];
                }
                succ.push(index[&c]);
            }
            succ.sort_unstable();
            succ.dedup();
            lifts.push(succ);
        }

        let mut answers = Vec::with_capacity(positions.len());
        let mut h = vec![0usize; na];
        for &code in &positions {
            let p = n.min(k - codec.size(code));
            let free: Vec<usize> = elems.iter().copied().filter(|&a| codec.digit(code, a).is_none()).collect();
            let placements = subsets_up_to(&free, p);
            let mut opts = Vec::new();
            for a in 0..na {
                h[a] = codec.digit(code, a).unwrap_or(0);
            }
            // odometer over the free coordinates
            loop {
                let mut image = 0u64;
                let mut injective = true;
                for &b in &h {
                    if image >> b & 1 == 1 {
                        injective = false;
                    }
                    image |= 1 << b;
                }
                let flags = (injective as u8 * INJ) | ((image == all_b) as u8 * SURJ);
                let mut mask = vec![0u64; words];
                for d in &placements {
                    let c = code + d.iter().map(|&a| (h[a] as u64 + 1) * codec.w[a]).sum::<u64>();
                    let i = index[&c] as usize;
                    mask[i >> 6] |= 1 << (i & 63);
                }
                opts.push((flags, mask));
                let mut carry = true;
                for &a in free.iter().rev() {
                    if !carry {
                        break;
                    }
                    h[a] += 1;
                    if h[a] == nb {
                        h[a] = 0;
                    } else {
                        carry = false;
                    }
                }
                if carry || nb == 0 {
                    break;
                }
            }
            answers.push(opts);
        }
        Ok(PositionGraph { na, nb, n, k, codec, positions, words, lifts, answers })
    }

    pub fn position_count(&self) -> usize {
        self.positions.len()
    }

    /// Solves the game for a concrete pair of structures with this shape.
    pub fn solve(&self, a: &RelStructure, b: &RelStructure, v: GameVariant) -> Result<bool> {
        if a.size() != self.na || b.size() != self.nb || v.n != self.n || v.k != self.k {
            return Err(Error::Precondition("position graph shape does not match the instance".into()));
        }
        if a.signature() != b.signature() {
            return Err(Error::Precondition("structures have different signatures".into()));
        }
        let mut safe = vec![0u64; self.words];
        for (i, &code) in self.positions.iter().enumerate() {
            if partial_hom_unchecked(a, b, &self.codec.decode(code), v.xn) {
                safe[i >> 6] |= 1 << (i & 63);
            }
        }
        let need = (v.xi as u8 * INJ) | (v.xs as u8 * SURJ);
        let mut holds = vec![false; self.positions.len()];
        loop {
            for (i, opts) in self.answers.iter().enumerate() {
                holds[i] = opts
                    .iter()
                    .any(|(f, m)| f & need == need && m.iter().zip(&safe).all(|(x, s)| x & !s == 0));
            }
            let mut changed = false;
            for i in 0..self.positions.len() {
                if safe[i >> 6] >> (i & 63) & 1 == 1 && !self.lifts[i].iter().all(|&y| holds[y as usize]) {
                    safe[i >> 6] &= !(1 << (i & 63));
                    changed = true;
                }
            }
            if !changed {
                return Ok(safe[0] & 1 == 1);
            }
        }
    }
}

fn enumerate_positions(codec: &Codec, a: usize, code: u64, left: usize, out: &mut Vec<u64>) {
    if a == codec.na {
        out.push(code);
        return;
    }
    enumerate_positions(codec, a + 1, code, left, out);
    if left > 0 {
        for b in 0..codec.nb {
            enumerate_positions(codec, a + 1, code + (b as u64 + 1) * codec.w[a], left - 1, out);
        }
    }
}

pub fn solve_by_position_graph(a: &RelStructure, b: &RelStructure, v: GameVariant, bound: u64) -> Result<bool> {
    PositionGraph::new(a.size(), b.size(), v.n, v.k, bound)?.solve(a, b, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let k2 = RelStructure::undirected_graph(2, &[(0, 1)]);
        let k3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let b = DEFAULT_FUNCTION_BOUND;
        assert!(solve_by_position_graph(&k2, &k2, GameVariant::of(1, 2, 1, 1, 1), b).unwrap());
        assert!(solve_by_position_graph(&k2, &k3, GameVariant::of(1, 2, 0, 0, 0), b).unwrap());
        assert!(!solve_by_position_graph(&k3, &k2, GameVariant::of(1, 2, 1, 0, 0), b).unwrap());
        assert!(!solve_by_position_graph(&k3, &k2, GameVariant::of(1, 3, 0, 0, 0), b).unwrap());
        let big = RelStructure::undirected_graph(9, &[]);
        assert!(matches!(solve_by_position_graph(&big, &big, GameVariant::of(1, 1, 0, 0, 0), b), Err(Error::Resource(_))));
    }
}
