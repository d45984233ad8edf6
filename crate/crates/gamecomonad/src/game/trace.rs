use serde_json::{json, Value};

use crate::error::Result;
use crate::matching;
use crate::structures::{PartialHom, RelStructure};

use super::engine::{Game, Reason, Violation};
use super::system::BackAndForthSystem;

const MAX_CANDIDATES: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A one-point restriction was eliminated earlier.
    Restriction { restriction: PartialHom },
    /// No admissible total map passes the forth condition. For each
    /// admissible candidate (up to a cap) the first failing `(C, D)` is listed.
    NoWitness {
        failures: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)>,
        truncated: bool,
        hall: Option<Hall>,
    },
}

/// A Hall violation among the single-point clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hall {
    /// Source elements whose joint set of allowed targets is smaller than the set.
    Sources(Vec<usize>),
    /// Uncovered targets with too few admissible preimages.
    Targets(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub stage: usize,
    pub map: PartialHom,
    pub certificate: Certificate,
}

pub fn elimination_trace(a: &RelStructure, b: &RelStructure, v: super::GameVariant) -> Result<Vec<TraceEntry>> {
    let g = Game::new(a, b, v)?;
    Ok(g.trace())
}

impl Game<'_> {
    pub fn trace(&self) -> Vec<TraceEntry> {
        let out = self.run(false, true);
        // replay to recover the system each certificate refers to
        let mut sys = self.initial_system();
        let mut entries = Vec::with_capacity(out.eliminated.len());
        let mut idx = 0;
        while idx < out.eliminated.len() {
            let stage = out.eliminated[idx].0;
            let mut end = idx;
            while end < out.eliminated.len() && out.eliminated[end].0 == stage {
                end += 1;
            }
            for (st, code, reason) in &out.eliminated[idx..end] {
                let certificate = match reason {
                    Reason::Restriction(sub) => Certificate::Restriction { restriction: self.codec.hom(*sub) },
                    Reason::NoWitness => self.no_witness_certificate(*code, &sys),
                };
                entries.push(TraceEntry { stage: *st, map: self.codec.hom(*code), certificate });
            }
            let gone: std::collections::HashSet<u64> = out.eliminated[idx..end].iter().map(|e| e.1).collect();
            let kept: Vec<u64> = sys.members.iter().copied().filter(|c| !gone.contains(c)).collect();
            sys = BackAndForthSystem::from_codes(self.v, self.codec.clone(), kept, stage);
            idx = end;
        }
        entries
    }

    fn no_witness_certificate(&self, code: u64, sys: &BackAndForthSystem) -> Certificate {
        let c = &self.codec;
        let dom_img = c.decode(code);
        let free: Vec<usize> = (0..c.na).filter(|&a| dom_img[a].is_none()).collect();
        let mut failures = Vec::new();
        let mut truncated = false;
        let mut phi: Vec<usize> = dom_img.iter().map(|x| x.unwrap_or(0)).collect();
        if c.nb > 0 || free.is_empty() {
            'outer: loop {
                if let Some(Violation::Missing { c: cc, d }) = self.violation(code, &phi, &sys.set) {
                    if failures.len() == MAX_CANDIDATES {
                        truncated = true;
                        break 'outer;
                    }
                    failures.push((phi.clone(), cc, d));
                }
                let mut carry = true;
                for &a in free.iter().rev() {
                    phi[a] += 1;
                    if phi[a] == c.nb {
                        phi[a] = 0;
                    } else {
                        carry = false;
                        break;
                    }
                }
                if carry {
                    break;
                }
            }
        }
        Certificate::NoWitness { failures, truncated, hall: self.hall_certificate(code, sys) }
    }

    fn hall_certificate(&self, code: u64, sys: &BackAndForthSystem) -> Option<Hall> {
        let c = &self.codec;
        if !(self.v.xi || self.v.xs) {
            return None;
        }
        let img = c.decode(code);
        let free: Vec<usize> = (0..c.na).filter(|&a| img[a].is_none()).collect();
        let mut used = 0u64;
        for b in img.iter().flatten() {
            used |= 1 << b;
        }
        let adj: Vec<u64> = free
            .iter()
            .map(|&a| {
                let mut m = 0u64;
                for b in 0..c.nb {
                    if self.single_ok(code, a, b, sys) {
                        m |= 1 << b;
                    }
                }
                if self.v.xi {
                    m & !used
                } else {
                    m
                }
            })
            .collect();
        if self.v.xi {
            matching::hall_violator(&adj, c.nb).map(|v| Hall::Sources(v.into_iter().map(|p| free[p]).collect()))
        } else {
            let all: u64 = if c.nb == 64 { u64::MAX } else { (1 << c.nb) - 1 };
            let uncovered = all & !used;
            let t = matching::transpose(&adj, c.nb);
            let targets: Vec<usize> = (0..c.nb).filter(|&b| uncovered >> b & 1 == 1).collect();
            let rows: Vec<u64> = targets.iter().map(|&b| t[b]).collect();
            matching::hall_violator(&rows, free.len()).map(|v| Hall::Targets(v.into_iter().map(|p| targets[p]).collect()))
        }
    }

    /// Whether mapping the free element `a` to `b` passes every single-point clause.
    fn single_ok(&self, code: u64, a: usize, b: usize, sys: &BackAndForthSystem) -> bool {
        let c = &self.codec;
        let dom: Vec<usize> = (0..c.na).filter(|&x| c.digit(code, x).is_some()).collect();
        let add = (b as u64 + 1) * c.w[a];
        (0u32..1 << dom.len()).all(|mask| {
            if mask.count_ones() as usize + 1 > self.v.k {
                return true;
            }
            let rc: u64 = dom
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| (c.digit(code, x).unwrap() as u64 + 1) * c.w[x])
                .sum();
            sys.set.contains(rc + add)
        })
    }
}

/// Rebuilds the canonical system by deleting the traced maps from the initial one.
pub fn replay_trace(
    a: &RelStructure,
    b: &RelStructure,
    v: super::GameVariant,
    trace: &[TraceEntry],
) -> Result<BackAndForthSystem> {
    let g = Game::new(a, b, v)?;
    let init = g.initial_system();
    let gone: std::collections::HashSet<u64> = trace.iter().map(|e| g.codec.encode(e.map.images())).collect();
    let kept = init.members.iter().copied().filter(|c| !gone.contains(c)).collect();
    let stage = trace.iter().map(|e| e.stage).max().unwrap_or(0);
    Ok(BackAndForthSystem::from_codes(v, g.codec.clone(), kept, stage))
}

pub fn trace_to_json(a: &RelStructure, b: &RelStructure, trace: &[TraceEntry]) -> Value {
    let names = |xs: &[usize]| xs.iter().map(|&x| a.id(x).to_string()).collect::<Vec<_>>();
    Value::Array(
        trace
            .iter()
            .map(|e| {
                let mut rec = json!({ "stage": e.stage, "map": e.map.to_json_value(a, b) });
                match &e.certificate {
                    Certificate::Restriction { restriction } => {
                        rec["reason"] = json!("restriction");
                        rec["restriction"] = restriction.to_json_value(a, b);
                    }
                    Certificate::NoWitness { failures, truncated, hall } => {
                        rec["reason"] = json!("no_witness");
                        rec["failures"] = Value::Array(
                            failures
                                .iter()
                                .map(|(phi, c, d)| {
                                    json!({
                                        "phi": phi.iter().map(|&y| b.id(y)).collect::<Vec<_>>(),
                                        "C": names(c),
                                        "D": names(d),
                                    })
                                })
                                .collect(),
                        );
                        rec["truncated"] = json!(truncated);
                        match hall {
                            Some(Hall::Sources(xs)) => rec["hall_sources"] = json!(names(xs)),
                            Some(Hall::Targets(ys)) => {
                                rec["hall_targets"] = json!(ys.iter().map(|&y| b.id(y)).collect::<Vec<_>>())
                            }
                            None => {}
                        }
                    }
                }
                rec
            })
            .collect(),
    )
}
