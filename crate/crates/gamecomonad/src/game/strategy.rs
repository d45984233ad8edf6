use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::structures::PartialHom;

use super::engine::{Game, Violation};
use super::system::BackAndForthSystem;

/// Duplicator's answer for every member of a system below full size.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositionalStrategy {
    pub choice: BTreeMap<PartialHom, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyDefect {
    MissingChoice(PartialHom),
    BadChoice { key: PartialHom, violation: Violation },
    ForeignKey(PartialHom),
}

impl PositionalStrategy {
    pub fn get(&self, f: &PartialHom) -> Option<&Vec<usize>> {
        self.choice.get(f)
    }
}

impl Game<'_> {
    pub fn synthesize_strategy(&self, s: &BackAndForthSystem) -> Result<PositionalStrategy> {
        if !s.contains_empty() {
            return Err(Error::Precondition("the empty map is not in the system; Spoiler wins".into()));
        }
        if !self.refine(s).same_members(s) {
            return Err(Error::Precondition("system is not a fixpoint of refinement".into()));
        }
        let mut choice = BTreeMap::new();
        for &code in &s.members {
            if self.codec.size(code) < self.v.k {
                let phi = self
                    .search(code, &s.set)
                    .ok_or_else(|| Error::Invariant("fixpoint member without forth witness".into()))?;
                choice.insert(self.codec.hom(code), phi);
            }
        }
        Ok(PositionalStrategy { choice })
    }

    /// First defect of `strat` relative to `s`, or `None` if every member
    /// below full size has a valid forth witness.
    pub fn verify_strategy(&self, s: &BackAndForthSystem, strat: &PositionalStrategy) -> Option<StrategyDefect> {
        for key in strat.choice.keys() {
            if self.check_map(key).is_err() || !s.contains(key) {
                return Some(StrategyDefect::ForeignKey(key.clone()));
            }
        }
        for &code in &s.members {
            if self.codec.size(code) >= self.v.k {
                continue;
            }
            let key = self.codec.hom(code);
            match strat.choice.get(&key) {
                None => return Some(StrategyDefect::MissingChoice(key)),
                Some(phi) => {
                    if let Some(violation) = self.violation(code, phi, &s.set) {
                        return Some(StrategyDefect::BadChoice { key, violation });
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameVariant;
    use crate::structures::RelStructure;

    #[test]
    fn k2_bijection_choice() {
        let k2 = RelStructure::undirected_graph(2, &[(0, 1)]);
        let g = Game::new(&k2, &k2, GameVariant::of(1, 2, 1, 1, 1)).unwrap();
        let s = g.canonical_system();
        let strat = g.synthesize_strategy(&s).unwrap();
        assert_eq!(strat.get(&PartialHom::empty(2)), Some(&vec![0, 1]));
        assert_eq!(g.verify_strategy(&s, &strat), None);
        let mut bad = strat.clone();
        bad.choice.insert(PartialHom::from_pairs(2, &[(0, 0)]), vec![0, 0]);
        assert!(matches!(g.verify_strategy(&s, &bad), Some(StrategyDefect::BadChoice { .. })));
    }

    #[test]
    fn hom_choice_and_losing_instance() {
        let k2 = RelStructure::undirected_graph(2, &[(0, 1)]);
        let k3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let g = Game::new(&k2, &k3, GameVariant::of(1, 2, 0, 0, 0)).unwrap();
        let s = g.canonical_system();
        let strat = g.synthesize_strategy(&s).unwrap();
        assert_eq!(strat.get(&PartialHom::empty(2)), Some(&vec![0, 0]));
        assert_eq!(strat.get(&PartialHom::from_pairs(2, &[(0, 0)])), Some(&vec![0, 1]));
        let g = Game::new(&k2, &k3, GameVariant::of(2, 2, 0, 0, 0)).unwrap();
        let strat = g.synthesize_strategy(&g.canonical_system()).unwrap();
        assert_eq!(strat.get(&PartialHom::empty(2)), Some(&vec![0, 1]));
        let g = Game::new(&k3, &k2, GameVariant::of(1, 3, 0, 0, 0)).unwrap();
        assert!(g.synthesize_strategy(&g.canonical_system()).is_err());
    }

    #[test]
    fn empty_strategy_rejected() {
        let one = RelStructure::undirected_graph(1, &[]);
        let g = Game::new(&one, &one, GameVariant::of(1, 1, 0, 0, 0)).unwrap();
        let s = g.canonical_system();
        assert!(matches!(g.verify_strategy(&s, &PositionalStrategy::default()), Some(StrategyDefect::MissingChoice(_))));
    }
}
