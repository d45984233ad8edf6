//! Kleisli morphisms `H_{n,k} A → B` on truncations, and their reading as
//! Duplicator strategies.

use std::rc::Rc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::game::{duplicator_wins, BackAndForthSystem, Game, GameVariant};
use crate::history::{Block, NKStrategy};
use crate::structures::{is_hom, PartialHom, RelStructure};

use super::hella::{unpack, HellaSkeleton, HellaStructure};
use super::literal::BlockGame;
use super::symbolic::ClassId;

#[derive(Clone, Debug)]
pub struct KleisliMorphism {
    pub n: usize,
    pub k: usize,
    pub depth: usize,
    pub source: HellaStructure,
    pub target: RelStructure,
    /// Image of every class, indexed by class id.
    pub table: Vec<usize>,
}

/// A related tuple of the source truncation whose image is unrelated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomViolation {
    pub relation: String,
    pub tuple: Vec<ClassId>,
}

impl KleisliMorphism {
    pub fn new(source: HellaStructure, target: &RelStructure, table: Vec<usize>) -> Result<Self> {
        if source.base.signature() != target.signature() {
            return Err(Error::Precondition("source and target signatures differ".into()));
        }
        if table.len() != source.len() || table.iter().any(|&b| b >= target.size()) {
            return Err(Error::Precondition("table does not cover the truncation".into()));
        }
        let (n, k, depth) = source.grade();
        Ok(KleisliMorphism { n, k, depth, source, target: target.clone(), table })
    }

    pub fn apply(&self, c: &ClassId) -> Option<usize> {
        self.source.skeleton.id_of(c).map(|i| self.table[i as usize])
    }

    pub fn hom_violation(&self) -> Option<HomViolation> {
        let mut bad = None;
        let mut img = Vec::new();
        self.source.for_each_tuple(|r, t| {
            img.clear();
            img.extend(t.iter().map(|&c| self.table[c as usize]));
            if !self.target.holds(r, &img) {
                bad = Some(HomViolation {
                    relation: self.target.signature().symbols()[r].name.clone(),
                    tuple: t.iter().map(|&c| self.source.skeleton.class(c)).collect(),
                });
                return false;
            }
            true
        });
        bad
    }

    pub fn is_hom(&self) -> bool {
        self.hom_violation().is_none()
    }

    /// Branch map `x ↦ f([t | x])`.
    pub fn branch(&self, h: usize) -> Vec<usize> {
        let na = self.source.skeleton.na;
        (0..na).map(|a| self.table[h * na + a]).collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let skel = &self.source.skeleton;
        let names = self.source.base.universe();
        json!({
            "grade": {"n": self.n, "k": self.k, "depth": self.depth},
            "table": (0..self.table.len()).map(|i| {
                let c = skel.class(i as u32);
                json!({
                    "history": crate::history::nk_history_to_json(&c.history, names),
                    "element": names[c.element],
                    "image": self.target.id(self.table[i]),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// A structure map `H A → H B` between truncations.
#[derive(Clone, Debug)]
pub struct HMap {
    pub source: HellaStructure,
    pub target: HellaStructure,
    pub table: Vec<u32>,
}

impl HMap {
    pub fn hom_violation(&self) -> Option<HomViolation> {
        let mut bad = None;
        let mut img = Vec::new();
        self.source.for_each_tuple(|r, t| {
            img.clear();
            img.extend(t.iter().map(|&c| self.table[c as usize]));
            if !self.target.holds(r, &img) {
                bad = Some(HomViolation {
                    relation: self.source.base.signature().symbols()[r].name.clone(),
                    tuple: t.iter().map(|&c| self.source.skeleton.class(c)).collect(),
                });
                return false;
            }
            true
        });
        bad
    }
}

/// `H f`: `[t | a] ↦ [f t | f a]`.
pub fn map_morphism(f: &[usize], source: &HellaStructure, target: &HellaStructure) -> Result<HMap> {
    if !is_hom(&source.base, &target.base, f) {
        return Err(Error::Precondition("map is not a homomorphism".into()));
    }
    if source.grade() != target.grade() {
        return Err(Error::Precondition("truncations of different grades".into()));
    }
    let table = (0..source.len() as u32)
        .map(|i| {
            let c = source.skeleton.class(i).map(&|&x: &usize| f[x]);
            target.skeleton.id_of(&c).ok_or_else(|| Error::Invariant(format!("image class {c:?} outside the truncation")))
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(HMap { source: source.clone(), target: target.clone(), table })
}

/// `g ∘ H f ∘ δ`.
pub fn kleisli_compose(g: &KleisliMorphism, f: &KleisliMorphism) -> Result<KleisliMorphism> {
    if (g.n, g.k, g.depth) != (f.n, f.k, f.depth) {
        return Err(Error::Precondition("grades differ".into()));
    }
    if g.source.base.size() != f.target.size() || g.source.base.signature() != f.target.signature() {
        return Err(Error::Precondition("middle structures differ".into()));
    }
    let n = f.n;
    let table = (0..f.source.len() as u32)
        .map(|i| {
            let c = f.source.skeleton.class(i);
            let d = c.comult(n);
            let pushed = d.map(&|x: &ClassId| f.apply(x).expect("prefix classes stay in the truncation"));
            g.apply(&pushed).ok_or_else(|| Error::Invariant(format!("pushed class {pushed:?} outside the truncation")))
        })
        .collect::<Result<Vec<usize>>>()?;
    KleisliMorphism::new(f.source.clone(), &g.target, table)
}

/// The counit `ε_A` as a Kleisli morphism `H A → A`.
pub fn counit_morphism(h: &HellaStructure) -> KleisliMorphism {
    let table = (0..h.len() as u32).map(|i| h.skeleton.counit(i)).collect();
    KleisliMorphism::new(h.clone(), &h.base, table).expect("counit fits")
}

/// Adds the identity relation when absent; reports whether it did.
pub fn ensure_identity(a: &RelStructure) -> Result<(RelStructure, bool)> {
    match a.signature().index_of("I") {
        None => Ok((a.with_identity()?, true)),
        Some(r) => {
            let ok = a.signature().arity(r) == 2
                && a.relation(r).len() == a.size()
                && (0..a.size()).all(|x| a.holds(r, &[x, x]));
            if ok {
                Ok((a.clone(), false))
            } else {
                Err(Error::Precondition("relation I is not the identity".into()))
            }
        }
    }
}

/// Kleisli morphism read off a positional strategy for a back-and-forth
/// system: the map after `t` extends the position left by playing `t`,
/// minus the pebble the next block is forced to lift.
pub struct StrategyMorphism {
    pub morphism: KleisliMorphism,
    pub augmented: bool,
}

pub fn morphism_from_strategy(
    game: &Game,
    system: &BackAndForthSystem,
    skeleton: Rc<HellaSkeleton>,
) -> Result<StrategyMorphism> {
    let strat = game.synthesize_strategy(system)?;
    let v = game.v;
    if (skeleton.n, skeleton.k, skeleton.na) != (v.n, v.k, game.a.size()) {
        return Err(Error::Precondition("skeleton grade does not match the game".into()));
    }
    let (ai, aug_a) = ensure_identity(game.a)?;
    let (bi, aug_b) = ensure_identity(game.b)?;
    let na = game.a.size();
    let fallback = strat.get(&PartialHom::empty(na)).cloned().expect("empty map has a choice");
    let mut positions: Vec<Vec<Option<(usize, usize)>>> = Vec::with_capacity(skeleton.histories.len());
    let mut table = vec![0usize; skeleton.len()];
    for (hid, t) in skeleton.histories.iter().enumerate() {
        let pebbles = match t.split_last() {
            None => vec![None; v.k + 1],
            Some((last, init)) => {
                let parent = skeleton.hist_index[init] as usize;
                let h = &table[parent * na..parent * na + na];
                let mut p = positions[parent].clone();
                for &(a, q) in last {
                    p[q] = Some((a, h[a]));
                }
                p
            }
        };
        let lifted: Option<usize> = match t.last() {
            Some(last) if last.len() < v.n && last.len() == 1 => Some(last[0].1),
            _ => None,
        };
        let mut img = vec![None; na];
        let mut functional = true;
        for (q, &(a, b)) in pebbles.iter().enumerate().filter_map(|(q, x)| x.as_ref().map(|x| (q, x))) {
            if Some(q) == lifted {
                continue;
            }
            match img[a] {
                Some(c) if c != b => functional = false,
                _ => img[a] = Some(b),
            }
        }
        let response = if !functional {
            None
        } else {
            let f = PartialHom::from_images(img);
            if f.len() < v.k {
                strat.get(&f).cloned()
            } else if system.contains(&f) {
                game.search(game.codec.encode(f.images()), &system.set)
            } else {
                None
            }
        };
        let h = response.unwrap_or_else(|| fallback.clone());
        table[hid * na..hid * na + na].copy_from_slice(&h);
        positions.push(pebbles);
    }
    let source = HellaStructure::with_skeleton(skeleton, &ai)?;
    Ok(StrategyMorphism { morphism: KleisliMorphism::new(source, &bi, table)?, augmented: aug_a || aug_b })
}

/// Kleisli morphism from any block strategy: `f([t | a]) = Ψ(t)(a)`.
pub fn morphism_from_nk_strategy(psi: &NKStrategy, source: HellaStructure, target: &RelStructure) -> Result<KleisliMorphism> {
    let na = source.base.size();
    let mut table = vec![0; source.len()];
    for (hid, t) in source.skeleton.histories.iter().enumerate() {
        let h = (psi.respond)(t);
        if h.len() != na {
            return Err(Error::Precondition("strategy response is not a total map".into()));
        }
        table[hid * na..hid * na + na].copy_from_slice(&h);
    }
    KleisliMorphism::new(source, target, table)
}

/// Branch maps as a block strategy. Histories past the truncation answer as
/// their longest prefix inside it.
pub fn strategy_from_morphism(f: &KleisliMorphism) -> NKStrategy {
    let table = Rc::new(f.table.clone());
    let skel = f.source.skeleton.clone();
    let na = skel.na;
    NKStrategy {
        n: f.n,
        k: f.k,
        depth: f.depth,
        respond: Rc::new(move |t: &[Block]| {
            let mut len = t.len().min(skel.depth);
            let h = loop {
                if let Some(&h) = skel.hist_index.get(&t[..len]) {
                    break h as usize;
                }
                len -= 1;
            };
            table[h * na..h * na + na].to_vec()
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub depth: usize,
    pub branches: usize,
    pub injective: bool,
    pub surjective: bool,
    pub bijective: bool,
    pub strong: bool,
    pub homomorphism: bool,
}

impl Classification {
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "depth": self.depth,
            "branches": self.branches,
            "injective": self.injective,
            "surjective": self.surjective,
            "bijective": self.bijective,
            "strong": self.strong,
            "homomorphism": self.homomorphism,
        })
    }
}

/// Branch-map flags, and whether every pebbled position reachable in the
/// truncation is a partial isomorphism.
pub fn classify_morphism(f: &KleisliMorphism) -> Classification {
    let skel = &f.source.skeleton;
    let nb = f.target.size();
    let (mut inj, mut surj) = (true, true);
    for h in 0..skel.histories.len() {
        let br = f.branch(h);
        let mut seen = vec![false; nb];
        for &y in &br {
            inj &= !seen[y];
            seen[y] = true;
        }
        surj &= seen.iter().all(|&s| s);
    }
    let mut strong = inj && surj;
    if strong {
        for (set, _) in &skel.live {
            let ids = unpack(*set);
            let mut img = vec![None; f.source.base.size()];
            for &c in &ids {
                let (a, b) = (skel.counit(c), f.table[c as usize]);
                if img[a].is_some_and(|x| x != b) {
                    strong = false;
                }
                img[a] = Some(b);
            }
            let mut hit = vec![false; nb];
            for &y in img.iter().flatten() {
                if hit[y] {
                    strong = false;
                }
                hit[y] = true;
            }
            if !strong || !crate::structures::partial_hom_unchecked(&f.source.base, &f.target, &img, true) {
                strong = false;
                break;
            }
        }
    }
    Classification {
        depth: f.depth,
        branches: skel.histories.len(),
        injective: inj,
        surjective: surj,
        bijective: inj && surj,
        strong,
        homomorphism: f.is_hom(),
    }
}

/// Witness of a block-game win as a Kleisli morphism on the truncation.
pub fn solved_morphism(source: HellaStructure, target: &RelStructure, v: GameVariant) -> Result<Option<KleisliMorphism>> {
    let rounds = source.skeleton.depth + 1;
    let mut g = BlockGame::new(&source.base, target, v)?;
    if !g.duplicator_wins(rounds) {
        return Ok(None);
    }
    let na = source.base.size();
    let mut table = vec![0; source.len()];
    for (hid, t) in source.skeleton.histories.iter().enumerate() {
        let h = g
            .response(t, rounds - t.len())
            .ok_or_else(|| Error::Invariant("won block game lost along its own strategy".into()))?;
        table[hid * na..hid * na + na].copy_from_slice(&h);
    }
    Ok(Some(KleisliMorphism::new(source, target, table)?))
}

#[derive(Clone, Debug)]
pub struct IsoCheck {
    pub duplicator_wins: bool,
    pub witness: Option<KleisliMorphism>,
    pub classification: Option<Classification>,
}

/// Bijection-game verdict, with a strongly branch-bijective witness on the
/// truncation when one exists.
pub fn kleisli_iso_check(a: &RelStructure, b: &RelStructure, n: usize, k: usize, depth: Option<usize>) -> Result<IsoCheck> {
    let wins = duplicator_wins(a, b, GameVariant::new(n, k, true, true, true)?)?;
    let mut out = IsoCheck { duplicator_wins: wins, witness: None, classification: None };
    if let (true, Some(m)) = (wins, depth) {
        let (ai, _) = ensure_identity(a)?;
        let (bi, _) = ensure_identity(b)?;
        let h = super::hella::build_hnk(&ai, n, k, m)?;
        if let Some(f) = solved_morphism(h, &bi, GameVariant::new(n, k, true, true, true)?)? {
            out.classification = Some(classify_morphism(&f));
            out.witness = Some(f);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comonad::hella::build_hnk;

    fn k(n: usize) -> RelStructure {
        let e: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        RelStructure::undirected_graph(n, &e)
    }

    fn path(n: usize) -> RelStructure {
        RelStructure::undirected_graph(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    #[test]
    fn functor_laws() {
        let (k2, k3) = (k(2), k(3));
        for (n, kk, m) in [(1, 2, 2), (2, 2, 1)] {
            let h2 = build_hnk(&k2, n, kk, m).unwrap();
            let h3 = build_hnk(&k3, n, kk, m).unwrap();
            let id = map_morphism(&[0, 1], &h2, &h2).unwrap();
            assert!(id.table.iter().enumerate().all(|(i, &j)| i as u32 == j));
            let emb = map_morphism(&[0, 1], &h2, &h3).unwrap();
            assert_eq!(emb.hom_violation(), None);
        }
        let (p3, hp) = (path(3), build_hnk(&path(3), 2, 2, 1).unwrap());
        let h2 = build_hnk(&k2, 2, 2, 1).unwrap();
        let h3 = build_hnk(&k3, 2, 2, 1).unwrap();
        let f = [0, 1, 0];
        let g = [1, 2];
        let gf: Vec<usize> = f.iter().map(|&x| g[x]).collect();
        assert!(is_hom(&p3, &k2, &f));
        let mf = map_morphism(&f, &hp, &h2).unwrap();
        let mg = map_morphism(&g, &h2, &h3).unwrap();
        let mgf = map_morphism(&gf, &hp, &h3).unwrap();
        let composed: Vec<u32> = mf.table.iter().map(|&i| mg.table[i as usize]).collect();
        assert_eq!(composed, mgf.table);
        assert!(map_morphism(&[0, 0], &h2, &h2).is_err());
    }

    #[test]
    fn counit_is_a_two_sided_unit() {
        let (p3, k2) = (path(3), k(2));
        let hp = build_hnk(&p3, 1, 2, 2).unwrap();
        let h2 = build_hnk(&k2, 1, 2, 2).unwrap();
        let f = solved_morphism(hp.clone(), &k2, GameVariant::of(1, 2, 0, 0, 0)).unwrap().unwrap();
        assert!(f.is_hom());
        let left = kleisli_compose(&counit_morphism(&h2), &f).unwrap();
        assert_eq!(left.table, f.table);
        let right = kleisli_compose(&f, &counit_morphism(&hp)).unwrap();
        assert_eq!(right.table, f.table);
    }

    #[test]
    fn associativity() {
        let (p3, k2, k3) = (path(3), k(2), k(3));
        let v = GameVariant::of(1, 2, 0, 0, 0);
        let f = solved_morphism(build_hnk(&p3, 1, 2, 2).unwrap(), &k2, v).unwrap().unwrap();
        let g = solved_morphism(build_hnk(&k2, 1, 2, 2).unwrap(), &k3, v).unwrap().unwrap();
        let h = solved_morphism(build_hnk(&k3, 1, 2, 2).unwrap(), &k3, v).unwrap().unwrap();
        let a = kleisli_compose(&h, &kleisli_compose(&g, &f).unwrap()).unwrap();
        let b = kleisli_compose(&kleisli_compose(&h, &g).unwrap(), &f).unwrap();
        assert_eq!(a.table, b.table);
        assert!(a.is_hom());
    }

    #[test]
    fn strategy_round_trip_and_k2() {
        let k2 = k(2);
        let g = Game::new(&k2, &k2, GameVariant::of(2, 2, 0, 0, 0)).unwrap();
        let s = g.canonical_system();
        let (k2i, _) = ensure_identity(&k2).unwrap();
        let skel = Rc::new(HellaSkeleton::new(2, 2, 2, 2).unwrap());
        let sm = morphism_from_strategy(&g, &s, skel.clone()).unwrap();
        assert!(sm.augmented);
        assert_eq!(sm.morphism.hom_violation(), None);
        let psi = strategy_from_morphism(&sm.morphism);
        let back = morphism_from_nk_strategy(&psi, HellaStructure::with_skeleton(skel, &k2i).unwrap(), &k2i).unwrap();
        assert_eq!(back.table, sm.morphism.table);
    }

    #[test]
    fn losing_strategy_is_not_a_homomorphism() {
        let (k2, k3) = (k(2), k(3));
        let g = Game::new(&k3, &k2, GameVariant::of(1, 2, 0, 0, 0)).unwrap();
        let s = g.canonical_system();
        let skel = Rc::new(HellaSkeleton::new(3, 1, 2, 2).unwrap());
        let sm = morphism_from_strategy(&g, &s, skel).unwrap();
        let bad = sm.morphism.hom_violation().unwrap();
        assert_eq!(bad.relation, "E");
    }

    #[test]
    fn classification() {
        let (k2, k3) = (k(2), k(3));
        let (k2i, k3i) = (k2.with_identity().unwrap(), k3.with_identity().unwrap());
        let id = solved_morphism(build_hnk(&k2i, 2, 2, 1).unwrap(), &k2i, GameVariant::of(2, 2, 1, 1, 1)).unwrap().unwrap();
        let c = classify_morphism(&id);
        assert!(c.bijective && c.strong && c.homomorphism);
        let emb = solved_morphism(build_hnk(&k2i, 1, 2, 1).unwrap(), &k3i, GameVariant::of(1, 2, 1, 0, 0)).unwrap().unwrap();
        let c = classify_morphism(&emb);
        assert!(c.injective && !c.surjective && !c.strong);
    }

    #[test]
    fn iso_checks() {
        let c6 = RelStructure::undirected_graph(6, &(0..6).map(|i| (i, (i + 1) % 6)).collect::<Vec<_>>());
        let tt = RelStructure::undirected_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert!(!kleisli_iso_check(&c6, &tt, 2, 2, None).unwrap().duplicator_wins);
        assert!(kleisli_iso_check(&c6, &tt, 1, 2, None).unwrap().duplicator_wins);
        let k2 = k(2);
        let r = kleisli_iso_check(&k2, &k2.permuted(&[1, 0]), 2, 2, Some(1)).unwrap();
        assert!(r.duplicator_wins && r.classification.unwrap().strong);
    }
}
