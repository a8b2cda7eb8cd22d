//! Graphviz DOT output. Vertices are labelled `<name>:<dim>`; parallel
//! arrows are drawn one edge each.

use std::fmt::Write;

use super::QuiverSetting;

pub fn to_dot(q: &QuiverSetting, graph_name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {graph_name} {{").unwrap();
    for v in q.vertices() {
        writeln!(out, "  {} [label=\"{}:{}\"];", v.id, v.id, v.dim).unwrap();
    }
    for a in q.arrows() {
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            q.vertex(a.source).id,
            q.vertex(a.target).id,
            a.id
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_arrows_are_drawn_individually() {
        let q = QuiverSetting::with_dims(&[1, 2], &[(0, 1), (0, 1), (1, 0)]).unwrap();
        let dot = to_dot(&q, "q");
        assert!(dot.starts_with("digraph q {"));
        assert!(dot.contains("v2 [label=\"v2:2\"]"));
        assert_eq!(dot.matches("v1 -> v2").count(), 2);
        assert_eq!(dot.matches("v2 -> v1").count(), 1);
    }
}
