//! Lattice output formats.

use std::fmt::Write;

use crate::lattice::ConceptLattice;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz line diagram with reduced labels: attributes above each node,
/// objects below. Edges point from a concept to its upper covers.
pub fn lattice_to_dot(lattice: &ConceptLattice) -> String {
    let labels = lattice.labels();
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=circle, width=0.2, label=\"\"];\n");
    for i in 0..lattice.len() {
        let attrs = labels.attributes[i].join(", ");
        let objs = labels.objects[i].join(", ");
        let label = format!("{attrs}\n{objs}");
        let _ = writeln!(
            out,
            "  c{i} [xlabel={}, tooltip=\"depth {}\"];",
            quote(label.trim_matches('\n')),
            lattice.depth(i)
        );
    }
    for &(lo, hi) in lattice.cover_relation() {
        let _ = writeln!(out, "  c{lo} -> c{hi};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lattice::enumerate_concepts;

    #[test]
    fn dot_has_one_edge_per_cover() {
        let lat = enumerate_concepts(&fixtures::documents_formal_context());
        let dot = lattice_to_dot(&lat);
        assert_eq!(dot.matches(" -> ").count(), 9);
        assert_eq!(dot.matches("xlabel=").count(), 7);
        assert!(dot.contains("project=plan2\\nplan2.doc"));
        assert!(dot.starts_with("digraph lattice {") && dot.ends_with("}\n"));
    }
}
