use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grade `(n, k)` and the three flags selecting one corner of the game cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GameVariant {
    pub n: usize,
    pub k: usize,
    pub xi: bool,
    pub xs: bool,
    pub xn: bool,
}

impl GameVariant {
    pub fn new(n: usize, k: usize, xi: bool, xs: bool, xn: bool) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Precondition("n and k must be positive".into()));
        }
        if n > k {
            return Err(Error::Precondition(format!("n = {n} exceeds k = {k}")));
        }
        Ok(GameVariant { n, k, xi, xs, xn })
    }

    /// Panicking shorthand for tests and fixtures.
    pub fn of(n: usize, k: usize, xi: u8, xs: u8, xn: u8) -> Self {
        GameVariant::new(n, k, xi == 1, xs == 1, xn == 1).expect("valid variant")
    }

    pub fn flags(&self) -> (bool, bool, bool) {
        (self.xi, self.xs, self.xn)
    }

    pub fn with_flags(&self, xi: bool, xs: bool, xn: bool) -> Self {
        GameVariant { xi, xs, xn, ..*self }
    }

    /// All eight corners at this grade, ordered by `(xi, xs, xn)` as binary digits.
    pub fn cube(n: usize, k: usize) -> Result<Vec<Self>> {
        let base = GameVariant::new(n, k, false, false, false)?;
        Ok((0..8).map(|c| base.with_flags(c & 4 != 0, c & 2 != 0, c & 1 != 0)).collect())
    }

    /// `self` is at least as hard for Duplicator as `other` (same grade, flags pointwise above).
    pub fn dominates(&self, other: &GameVariant) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.xi >= other.xi
            && self.xs >= other.xs
            && self.xn >= other.xn
    }

    /// Covering edges of the cube at this grade: `(stronger, weaker)` differing in one flag.
    pub fn hasse_edges(n: usize, k: usize) -> Result<Vec<(Self, Self)>> {
        let cube = GameVariant::cube(n, k)?;
        let mut out = Vec::new();
        for s in &cube {
            for w in &cube {
                let diff = (s.xi != w.xi) as u8 + (s.xs != w.xs) as u8 + (s.xn != w.xn) as u8;
                if diff == 1 && s.dominates(w) {
                    out.push((*s, *w));
                }
            }
        }
        Ok(out)
    }

    pub fn game_name(&self) -> &'static str {
        match (self.xi, self.xs) {
            (false, false) => "fun",
            (true, false) => "inj",
            (false, true) => "surj",
            (true, true) => "bij",
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "xi": self.xi as u8,
            "xs": self.xs as u8,
            "xn": self.xn as u8,
        })
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.xn { "neg" } else { "pos" };
        write!(f, "{}-{}({},{})", sign, self.game_name(), self.n, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_shape() {
        assert_eq!(GameVariant::cube(1, 2).unwrap().len(), 8);
        assert_eq!(GameVariant::hasse_edges(1, 2).unwrap().len(), 12);
        assert!(GameVariant::new(3, 2, false, false, false).is_err());
        assert!(GameVariant::of(1, 2, 1, 1, 1).dominates(&GameVariant::of(1, 2, 0, 1, 0)));
        assert!(!GameVariant::of(1, 2, 1, 0, 0).dominates(&GameVariant::of(1, 2, 0, 1, 0)));
        assert_eq!(GameVariant::of(2, 3, 1, 1, 0).to_string(), "pos-bij(2,3)");
    }
}
