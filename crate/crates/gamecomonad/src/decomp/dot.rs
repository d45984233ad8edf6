//! DOT rendering with each node drawn as a record, fixed bag over floating bag.

use std::fmt::Write;

use crate::structures::RelStructure;

use super::{Bag, ExtendedTreeDecomposition, TreeDecomposition};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if matches!(c, '"' | '\\' | '{' | '}' | '|' | '<' | '>') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn set_label(a: &RelStructure, set: &Bag) -> String {
    if set.is_empty() {
        return "∅".into();
    }
    set.iter().map(|&x| escape(a.id(x))).collect::<Vec<_>>().join(", ")
}

pub fn etd_to_dot(a: &RelStructure, d: &ExtendedTreeDecomposition) -> String {
    let mut out = String::from("digraph ETD {\n  node [shape=record];\n");
    for (t, n) in d.nodes.iter().enumerate() {
        let _ = writeln!(out, "  n{t} [label=\"{{{}|{}}}\", tooltip=\"{}\"];", set_label(a, &n.beta), set_label(a, &n.gamma), escape(&n.id));
    }
    for (t, n) in d.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            let _ = writeln!(out, "  n{p} -> n{t};");
        }
    }
    out.push_str("}\n");
    out
}

pub fn td_to_dot(a: &RelStructure, d: &TreeDecomposition) -> String {
    let mut out = String::from("digraph TD {\n  node [shape=box];\n");
    for (t, n) in d.nodes.iter().enumerate() {
        let _ = writeln!(out, "  n{t} [label=\"{}\", tooltip=\"{}\"];", set_label(a, &n.bag), escape(&n.id));
    }
    for (t, n) in d.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            let _ = writeln!(out, "  n{p} -> n{t};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_labels() {
        let p3 = RelStructure::undirected_graph(3, &[(0, 1), (1, 2)]);
        let mut d = ExtendedTreeDecomposition::trivial(&p3);
        d.nodes[0].gamma = Bag::from([1]);
        d.nodes.push(super::super::EtdNode { id: "c".into(), parent: Some(0), beta: Bag::from([1]), gamma: Bag::from([0, 2]) });
        let dot = etd_to_dot(&p3, &d);
        assert!(dot.contains("n0 [label=\"{∅|1}\""));
        assert!(dot.contains("n1 [label=\"{1|0, 2}\""));
        assert!(dot.contains("n0 -> n1;"));
    }
}
