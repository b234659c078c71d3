//! DOT and node-link JSON emitters.

use std::fmt::Write as _;

use crate::graph::{NarrativeGraph, NodeKind, RelationKind};

fn style(kind: NodeKind) -> (&'static str, &'static str) {
    match kind {
        NodeKind::Panel => ("box", "lightblue"),
        NodeKind::PanelVisual => ("box", "lightcyan"),
        NodeKind::PanelTextual => ("box", "lightyellow"),
        NodeKind::CharacterMention => ("ellipse", "palegreen"),
        NodeKind::Character => ("doublecircle", "green"),
        NodeKind::Action => ("diamond", "orange"),
        NodeKind::SceneObject => ("ellipse", "lightgrey"),
        NodeKind::DialogueNode => ("note", "khaki"),
        NodeKind::DialogueContent => ("plaintext", "white"),
        NodeKind::CaptionNode => ("note", "wheat"),
        NodeKind::EventSegment => ("hexagon", "plum"),
        NodeKind::Event => ("octagon", "orchid"),
        NodeKind::MacroEvent => ("doubleoctagon", "mediumpurple"),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn display_label(g: &NarrativeGraph, id: &str, kind: NodeKind) -> String {
    let key = match kind {
        NodeKind::Panel => "panel_id",
        NodeKind::Action => "verb",
        NodeKind::DialogueContent | NodeKind::CaptionNode => "text",
        NodeKind::EventSegment => "segment_id",
        _ => "label",
    };
    g.attr(id, key).unwrap_or(id).to_owned()
}

/// DOT digraph, optionally restricted to the subgraph induced by `kinds`.
///
/// `follows` edges are left out: each is the mirror of a `precedes` edge
/// that is drawn.
pub fn to_dot(g: &NarrativeGraph, kinds: Option<&[NodeKind]>) -> String {
    let keep = |kind: NodeKind| kinds.is_none_or(|ks| ks.contains(&kind));

    let mut out = String::new();
    let _ = writeln!(out, "// {} graph", g.tier());
    let _ = writeln!(out, "// legend:");
    for &kind in NodeKind::ALL {
        let (shape, color) = style(kind);
        let _ = writeln!(out, "//   {kind}: {shape}, {color}");
    }

    let mut body = String::new();
    for (id, node) in g.nodes().filter(|(_, n)| keep(n.kind)) {
        let (shape, color) = style(node.kind);
        let _ = writeln!(
            body,
            "  {} [label={}, shape={shape}, style=filled, fillcolor={color}];",
            quote(id),
            quote(&display_label(g, id, node.kind))
        );
    }
    for e in g.edges() {
        if e.rel == RelationKind::Follows {
            continue;
        }
        let (Some(s), Some(d)) = (g.kind(&e.src), g.kind(&e.dst)) else {
            continue;
        };
        if keep(s) && keep(d) {
            let _ = writeln!(
                body,
                "  {} -> {} [label={}];",
                quote(&e.src),
                quote(&e.dst),
                quote(e.rel.as_str())
            );
        }
    }

    if body.is_empty() {
        out.push_str("digraph { }\n");
    } else {
        out.push_str("digraph {\n");
        out.push_str(&body);
        out.push_str("}\n");
    }
    out
}

/// Node-link JSON; the same document as [`NarrativeGraph::to_json`].
pub fn to_node_link(g: &NarrativeGraph) -> String {
    g.to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{attrs, Tier};

    #[test]
    fn empty_graph() {
        let dot = to_dot(&NarrativeGraph::new(Tier::Unified), None);
        assert!(dot.contains("digraph { }"));
        assert!(dot.contains("// legend:"));
    }

    #[test]
    fn labels_are_escaped() {
        let mut g = NarrativeGraph::new(Tier::PanelTier);
        g.add_node(
            "c",
            NodeKind::DialogueContent,
            attrs([("text", "He said \"hi\"\\")]),
        )
        .unwrap();
        let dot = to_dot(&g, None);
        assert!(dot.contains(r#"label="He said \"hi\"\\""#), "{dot}");
    }

    #[test]
    fn follows_is_not_drawn() {
        let mut g = NarrativeGraph::new(Tier::TemporalTier);
        g.add_node("a", NodeKind::Panel, attrs([("panel_id", "a")]))
            .unwrap();
        g.add_node("b", NodeKind::Panel, attrs([("panel_id", "b")]))
            .unwrap();
        g.add_edge("a", RelationKind::Precedes, "b").unwrap();
        let dot = to_dot(&g, None);
        assert!(dot.contains("label=\"precedes\""));
        assert!(!dot.contains("follows"));
        assert_eq!(to_dot(&g, None), dot);
    }
}
