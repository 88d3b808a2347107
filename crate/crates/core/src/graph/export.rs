//! GraphML and DOT renderings of a [`SocialGraph`].

use std::fmt::Write;

use super::SocialGraph;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// GraphML with a `role` node attribute and a `weight` edge attribute.
pub fn to_graphml(graph: &SocialGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    for (user, role) in &graph.nodes {
        writeln!(
            out,
            "    <node id=\"{}\"><data key=\"role\">{}</data></node>",
            xml_escape(user.as_str()),
            role
        )
        .unwrap();
    }
    for ((source, target), weight) in &graph.edges {
        writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
            xml_escape(source.as_str()),
            xml_escape(target.as_str()),
            weight
        )
        .unwrap();
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// DOT digraph for visualization; edge weight doubles as the label.
pub fn to_dot(graph: &SocialGraph) -> String {
    let mut out = String::from("digraph social {\n");
    for (user, role) in &graph.nodes {
        writeln!(
            out,
            "  \"{}\" [role=\"{}\"];",
            dot_escape(user.as_str()),
            role
        )
        .unwrap();
    }
    for ((source, target), weight) in &graph.edges {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [weight={weight}, label=\"{weight}\"];",
            dot_escape(source.as_str()),
            dot_escape(target.as_str()),
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Role, UserId};

    fn sample() -> SocialGraph {
        let mut g = SocialGraph::default();
        g.nodes.insert(UserId::from("u"), Role::Student);
        g.nodes.insert(UserId::from("v"), Role::Ta);
        g.edges.insert((UserId::from("u"), UserId::from("v")), 3);
        g
    }

    #[test]
    fn graphml_has_role_and_weight() {
        let xml = to_graphml(&sample());
        assert!(xml.contains("<data key=\"role\">ta</data>"));
        assert!(xml.contains("<data key=\"weight\">3</data>"));
        assert!(xml.contains("edgedefault=\"directed\""));
    }

    #[test]
    fn dot_quotes_and_directs() {
        let dot = to_dot(&sample());
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"u\" -> \"v\" [weight=3"));
    }

    #[test]
    fn xml_special_chars_escaped() {
        let mut g = SocialGraph::default();
        g.nodes.insert(UserId::from("a<b&c"), Role::Student);
        assert!(to_graphml(&g).contains("a&lt;b&amp;c"));
    }
}
