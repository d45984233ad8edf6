//! JSON and DOT renderings of truncated `H_{n,k}` structures.

use std::fmt::Write;

use serde_json::json;

use crate::history::nk_history_to_json;

use super::hella::HellaStructure;

pub fn hella_to_json(h: &HellaStructure) -> serde_json::Value {
    let skel = &h.skeleton;
    let names = h.base.universe();
    let universe: Vec<serde_json::Value> = (0..h.len() as u32)
        .map(|i| {
            let c = skel.class(i);
            json!({"history": nk_history_to_json(&c.history, names), "element": names[c.element]})
        })
        .collect();
    let mut relations = serde_json::Map::new();
    for (r, sym) in h.base.signature().symbols().iter().enumerate() {
        let mut tuples: Vec<Vec<u32>> = h.relation(r).into_iter().collect();
        tuples.sort_unstable();
        relations.insert(sym.name.clone(), json!(tuples));
    }
    let (n, k, depth) = h.grade();
    json!({"grade": {"n": n, "k": k, "depth": depth}, "universe": universe, "relations": relations})
}

fn block_label(b: &[(usize, usize)], names: &[String]) -> String {
    b.iter().map(|&(a, p)| format!("{}:{}", names[a], p)).collect::<Vec<_>>().join(" ")
}

/// Prefix tree of structured histories; each node lists its classes.
pub fn hella_to_dot(h: &HellaStructure) -> String {
    let skel = &h.skeleton;
    let names = h.base.universe();
    let mut out = String::from("digraph H {\n  node [shape=box];\n");
    for (i, t) in skel.histories.iter().enumerate() {
        let classes: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let label = match t.last() {
            None => "ε".to_string(),
            Some(b) => block_label(b, names),
        };
        let _ = writeln!(out, "  t{i} [label=\"{label}\\n[t | {}]\"];", classes.join(","));
        if let Some((_, init)) = t.split_last() {
            let _ = writeln!(out, "  t{} -> t{i};", skel.hist_index[init]);
        }
    }
    out.push_str("}\n");
    out
}
