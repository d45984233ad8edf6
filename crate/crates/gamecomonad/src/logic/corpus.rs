//! Seeded random formulas for property tests and cross-evaluation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::structures::Signature;

use super::formula::{Formula, Interpretation};
use super::oracle::OracleRegistry;

pub struct FormulaGenerator {
    rng: ChaCha8Rng,
    pub seed: u64,
    vars: Vec<String>,
    atoms: Signature,
    /// `(oracle name, interpreted symbols with arities)`.
    palette: Vec<(String, Vec<(String, usize)>)>,
    negation: bool,
}

impl FormulaGenerator {
    /// Formulas over `atoms` in the variables `vars`, quantifying with the
    /// named oracles. Negated atoms appear only when `negation` is set.
    pub fn new(seed: u64, atoms: Signature, vars: &[&str], palette: &[&str], negation: bool, reg: &OracleRegistry) -> Result<Self> {
        let palette = palette
            .iter()
            .map(|name| {
                let q = reg.get(name)?;
                Ok((q.name.clone(), q.signature.symbols().iter().map(|s| (s.name.clone(), s.arity)).collect()))
            })
            .collect::<Result<_>>()?;
        Ok(FormulaGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            atoms,
            palette,
            negation,
        })
    }

    fn var(&mut self) -> String {
        self.vars.choose(&mut self.rng).expect("at least one variable").clone()
    }

    fn atom(&mut self) -> Formula {
        let sym = self.atoms.symbols().choose(&mut self.rng).expect("nonempty signature").clone();
        let args = (0..sym.arity).map(|_| self.var()).collect();
        if self.negation && self.rng.gen_bool(0.3) {
            Formula::Natom { rel: sym.name, args }
        } else {
            Formula::Atom { rel: sym.name, args }
        }
    }

    fn quant(&mut self, depth: usize) -> Formula {
        let (oracle, symbols) = self.palette.choose(&mut self.rng).expect("nonempty palette").clone();
        let arity = symbols.iter().map(|s| s.1).max().unwrap_or(0);
        let mut pool = self.vars.clone();
        pool.shuffle(&mut self.rng);
        let bound: Vec<String> = pool.into_iter().take(arity).collect();
        let interp = symbols
            .into_iter()
            .map(|(symbol, a)| Interpretation { symbol, vars: bound[..a].to_vec(), body: self.formula(depth - 1) })
            .collect();
        Formula::Quant { oracle, bound, interp }
    }

    /// A formula of quantifier depth at most `depth`.
    pub fn formula(&mut self, depth: usize) -> Formula {
        let roll = self.rng.gen_range(0..10);
        if depth == 0 || roll < 2 {
            return self.atom();
        }
        if roll < 4 {
            let children = (0..2).map(|_| self.formula(depth)).collect();
            return if roll < 3 { Formula::And { children } } else { Formula::Or { children } };
        }
        self.quant(depth)
    }

    /// `count` formulas of depth at most `depth`, each using some palette oracle.
    pub fn corpus(&mut self, count: usize, depth: usize) -> Vec<Formula> {
        self.corpus_where(count, depth, |_| true)
    }

    /// As [`Self::corpus`], keeping only formulas accepted by `keep`.
    pub fn corpus_where(&mut self, count: usize, depth: usize, keep: impl Fn(&Formula) -> bool) -> Vec<Formula> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let f = self.formula(depth);
            if !f.oracles().is_empty() && keep(&f) {
                out.push(f);
            }
        }
        out
    }
}
