use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::structures::PartialHom;

use super::variant::GameVariant;

const DENSE_CODES: u64 = 1 << 27;

/// Positional encoding of partial maps `A ⇀ B` as integers. Digit `0`
/// means undefined, digit `b + 1` means image `b`. The first element is the
/// most significant digit, so numeric order is lexicographic order on images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Codec {
    pub na: usize,
    pub nb: usize,
    pub base: u64,
    pub w: Vec<u64>,
    pub total: u64,
}

impl Codec {
    pub fn new(na: usize, nb: usize) -> Result<Self> {
        let base = nb as u64 + 1;
        let mut w = vec![0u64; na];
        let mut acc: u64 = 1;
        for a in (0..na).rev() {
            w[a] = acc;
            acc = acc
                .checked_mul(base)
                .filter(|&t| t < 1 << 62)
                .ok_or_else(|| Error::Resource(format!("partial maps {na} -> {nb} exceed the code space")))?;
        }
        Ok(Codec { na, nb, base, w, total: acc })
    }

    pub fn encode(&self, img: &[Option<usize>]) -> u64 {
        img.iter().zip(&self.w).map(|(x, w)| x.map_or(0, |b| (b as u64 + 1) * w)).sum()
    }

    pub fn digit(&self, code: u64, a: usize) -> Option<usize> {
        let d = (code / self.w[a]) % self.base;
        (d > 0).then(|| d as usize - 1)
    }

    pub fn decode(&self, code: u64) -> Vec<Option<usize>> {
        (0..self.na).map(|a| self.digit(code, a)).collect()
    }

    pub fn size(&self, code: u64) -> usize {
        (0..self.na).filter(|&a| self.digit(code, a).is_some()).count()
    }

    pub fn hom(&self, code: u64) -> PartialHom {
        PartialHom::from_images(self.decode(code))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum CodeSet {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl CodeSet {
    pub fn new(codec: &Codec) -> Self {
        if codec.total <= DENSE_CODES {
            CodeSet::Dense(vec![0; (codec.total as usize).div_ceil(64)])
        } else {
            CodeSet::Sparse(HashSet::new())
        }
    }

    #[inline]
    pub fn contains(&self, c: u64) -> bool {
        match self {
            CodeSet::Dense(bits) => bits[(c >> 6) as usize] >> (c & 63) & 1 == 1,
            CodeSet::Sparse(s) => s.contains(&c),
        }
    }

    pub fn insert(&mut self, c: u64) {
        match self {
            CodeSet::Dense(bits) => bits[(c >> 6) as usize] |= 1 << (c & 63),
            CodeSet::Sparse(s) => {
                s.insert(c);
            }
        }
    }
}

/// A set of partial maps of bounded size, kept restriction-closed, together
/// with the refinement round that produced it.
#[derive(Clone, Debug)]
pub struct BackAndForthSystem {
    pub(crate) variant: GameVariant,
    pub(crate) codec: Codec,
    /// Ordered by domain size, then lexicographically.
    pub(crate) members: Vec<u64>,
    pub(crate) set: CodeSet,
    pub(crate) stage: usize,
}

impl BackAndForthSystem {
    pub(crate) fn from_codes(variant: GameVariant, codec: Codec, mut members: Vec<u64>, stage: usize) -> Self {
        members.sort_by_key(|&c| (codec.size(c), c));
        let mut set = CodeSet::new(&codec);
        for &c in &members {
            set.insert(c);
        }
        BackAndForthSystem { variant, codec, members, set, stage }
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: &PartialHom) -> bool {
        f.source_size() == self.codec.na
            && f.images().iter().flatten().all(|&b| b < self.codec.nb)
            && self.set.contains(self.codec.encode(f.images()))
    }

    pub fn contains_empty(&self) -> bool {
        self.set.contains(0)
    }

    pub fn members(&self) -> Vec<PartialHom> {
        self.members.iter().map(|&c| self.codec.hom(c)).collect()
    }

    /// Same member set, ignoring the stage counter.
    pub fn same_members(&self, other: &BackAndForthSystem) -> bool {
        self.members == other.members
    }

    pub fn source_size(&self) -> usize {
        self.codec.na
    }

    pub fn target_size(&self) -> usize {
        self.codec.nb
    }

    /// Every one-point restriction of every member is a member.
    pub fn is_restriction_closed(&self) -> bool {
        self.members.iter().all(|&c| {
            (0..self.codec.na).all(|a| match self.codec.digit(c, a) {
                Some(b) => self.set.contains(c - (b as u64 + 1) * self.codec.w[a]),
                None => true,
            })
        })
    }
}
