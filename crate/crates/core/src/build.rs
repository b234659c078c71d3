//! Tier builders and their integration into one unified graph.
//!
//! Node ids are namespaced so the tiers can be unioned without collisions:
//! `panel:<id>`, `seg:<id>`, `event:<id>`, `macro:<id>`, `char:<label>`, and
//! panel-local children under `panel:<id>/...`.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::annotation::{AnnotationCorpus, PanelAnnotation};
use crate::graph::{
    attrs, Attrs, Direction, GraphError, NarrativeGraph, NodeKind, RelationKind, Tier,
};
use crate::normalize::normalize_token;

use RelationKind::*;

pub fn panel_node(panel_id: &str) -> String {
    format!("panel:{panel_id}")
}

pub fn segment_node(segment_id: &str) -> String {
    format!("seg:{segment_id}")
}

pub fn event_node(event_id: &str) -> String {
    format!("event:{event_id}")
}

pub fn macro_node(macro_id: &str) -> String {
    format!("macro:{macro_id}")
}

pub fn character_node(label: &str) -> String {
    format!("char:{}", normalize_token(label))
}

fn mention_node(panel_id: &str, label: &str) -> String {
    format!("panel:{panel_id}/char:{}", normalize_token(label))
}

fn add(g: &mut NarrativeGraph, id: &str, kind: NodeKind, a: Attrs) {
    g.add_node(id, kind, a).expect("builder ids are unique");
}

fn link(g: &mut NarrativeGraph, src: &str, rel: RelationKind, dst: &str) {
    g.add_edge(src, rel, dst).expect("builder endpoints exist");
}

/// Multimodal graph of a single panel.
pub fn build_panel_graph(panel: &PanelAnnotation) -> NarrativeGraph {
    let mut g = NarrativeGraph::new(Tier::PanelTier);
    let pid = &panel.panel_id;
    let root = panel_node(pid);
    let visual = format!("{root}/visual");
    let textual = format!("{root}/textual");

    let mut panel_attrs = attrs([
        ("panel_id", pid.clone()),
        ("reading_order", panel.reading_order.to_string()),
        ("page_index", panel.page_index.to_string()),
        ("shot_type", panel.shot_type.as_str().to_owned()),
    ]);
    if let Some(path) = &panel.image_path {
        panel_attrs.insert("image_path".into(), path.clone());
    }
    if let Some(desc) = &panel.event_description {
        panel_attrs.insert("event_description".into(), desc.clone());
    }
    add(&mut g, &root, NodeKind::Panel, panel_attrs);

    let mut visual_attrs = Attrs::new();
    if let Some(bg) = &panel.background {
        visual_attrs.insert("background".into(), bg.clone());
    }
    add(&mut g, &visual, NodeKind::PanelVisual, visual_attrs);
    add(&mut g, &textual, NodeKind::PanelTextual, Attrs::new());
    link(&mut g, &root, HasVisual, &visual);
    link(&mut g, &root, HasTextual, &textual);

    for label in &panel.characters {
        let id = mention_node(pid, label);
        if g.contains(&id) {
            continue;
        }
        add(
            &mut g,
            &id,
            NodeKind::CharacterMention,
            attrs([("label", label.clone()), ("panel_id", pid.clone())]),
        );
        link(&mut g, &visual, HasCharacter, &id);
    }

    for (j, action) in panel.actions.iter().enumerate() {
        let id = format!("{root}/action:{j}");
        let mut a = attrs([
            ("verb", action.verb.clone()),
            ("agent", action.agent.clone()),
        ]);
        if let Some(object) = &action.object {
            a.insert("object".into(), object.clone());
        }
        add(&mut g, &id, NodeKind::Action, a);
        link(&mut g, &visual, HasAction, &id);
        let agent = mention_node(pid, &action.agent);
        if g.contains(&agent) {
            link(&mut g, &id, AgentOf, &agent);
        }
    }

    for label in &panel.objects {
        let id = format!("{root}/object:{}", normalize_token(label));
        if g.contains(&id) {
            continue;
        }
        add(
            &mut g,
            &id,
            NodeKind::SceneObject,
            attrs([("label", label.clone())]),
        );
        link(&mut g, &visual, HasObject, &id);
    }

    for u in &panel.dialogues {
        let id = format!("{root}/dialogue:{}", u.id);
        let content = format!("{id}/content");
        let mut a = attrs([("utterance_id", u.id.clone())]);
        if let Some(speaker) = &u.speaker {
            a.insert("speaker".into(), speaker.clone());
        }
        add(&mut g, &id, NodeKind::DialogueNode, a);
        add(
            &mut g,
            &content,
            NodeKind::DialogueContent,
            attrs([("text", u.text.clone())]),
        );
        link(&mut g, &id, PartOf, &textual);
        link(&mut g, &content, ContentOf, &id);
    }

    for u in &panel.captions {
        let id = format!("{root}/caption:{}", u.id);
        add(
            &mut g,
            &id,
            NodeKind::CaptionNode,
            attrs([("utterance_id", u.id.clone()), ("text", u.text.clone())]),
        );
        link(&mut g, &id, PartOf, &textual);
    }

    g
}

/// Smallest reading_order of each segment's panels.
fn segment_first_panel(corpus: &AnnotationCorpus) -> HashMap<&str, u32> {
    let mut first: HashMap<&str, u32> = HashMap::new();
    for p in &corpus.panels {
        first
            .entry(p.segment_id.as_str())
            .and_modify(|o| *o = (*o).min(p.reading_order))
            .or_insert(p.reading_order);
    }
    first
}

/// Reading-order DAG over panels and segments.
pub fn build_temporal_graph(corpus: &AnnotationCorpus) -> Result<NarrativeGraph, GraphError> {
    let mut g = NarrativeGraph::new(Tier::TemporalTier);

    let panels = corpus.panels_in_reading_order();
    for p in &panels {
        add(
            &mut g,
            &panel_node(&p.panel_id),
            NodeKind::Panel,
            attrs([
                ("panel_id", p.panel_id.clone()),
                ("reading_order", p.reading_order.to_string()),
            ]),
        );
    }
    for pair in panels.windows(2) {
        link(
            &mut g,
            &panel_node(&pair[0].panel_id),
            Precedes,
            &panel_node(&pair[1].panel_id),
        );
    }

    let first = segment_first_panel(corpus);
    let mut ordered: Vec<(usize, &str, Option<u32>)> = corpus
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.id.as_str(), first.get(s.id.as_str()).copied()))
        .collect();
    ordered.sort_by_key(|&(i, _, order)| (order.is_none(), order, i));
    for &(_, id, order) in &ordered {
        let mut a = attrs([("segment_id", id)]);
        if let Some(order) = order {
            a.insert("reading_order".into(), order.to_string());
        }
        add(&mut g, &segment_node(id), NodeKind::EventSegment, a);
    }
    let chained: Vec<&str> = ordered
        .iter()
        .filter(|(_, _, order)| order.is_some())
        .map(|&(_, id, _)| id)
        .collect();
    for pair in chained.windows(2) {
        link(
            &mut g,
            &segment_node(pair[0]),
            Precedes,
            &segment_node(pair[1]),
        );
    }

    if !g.is_acyclic(&[Precedes]) {
        return Err(GraphError::Cycle("precedes".into()));
    }
    Ok(g)
}

/// Inclusive reading-order span of the panels under one unit.
type Span = (u32, u32);

fn widen(span: Option<Span>, order: u32) -> Option<Span> {
    Some(match span {
        None => (order, order),
        Some((lo, hi)) => (lo.min(order), hi.max(order)),
    })
}

/// Event hierarchy with sibling ordering and co-occurrence.
pub fn build_event_graph(corpus: &AnnotationCorpus) -> NarrativeGraph {
    let mut g = NarrativeGraph::new(Tier::EventTier);

    let segment_event: HashMap<&str, &str> = corpus
        .segments
        .iter()
        .map(|s| (s.id.as_str(), s.event_id.as_str()))
        .collect();
    let event_macro: HashMap<&str, &str> = corpus
        .events
        .iter()
        .map(|e| (e.id.as_str(), e.macro_event_id.as_str()))
        .collect();
    let mut event_span: HashMap<&str, Option<Span>> = HashMap::new();
    let mut macro_span: HashMap<&str, Option<Span>> = HashMap::new();
    for p in &corpus.panels {
        let Some(&event) = segment_event.get(p.segment_id.as_str()) else {
            continue;
        };
        let e = event_span.entry(event).or_default();
        *e = widen(*e, p.reading_order);
        if let Some(&m) = event_macro.get(event) {
            let s = macro_span.entry(m).or_default();
            *s = widen(*s, p.reading_order);
        }
    }

    for m in &corpus.macro_events {
        add(
            &mut g,
            &macro_node(&m.id),
            NodeKind::MacroEvent,
            attrs([
                ("macro_event_id", m.id.as_str()),
                ("label", m.label.as_str()),
                ("description", m.description.as_str()),
            ]),
        );
    }
    for e in &corpus.events {
        add(
            &mut g,
            &event_node(&e.id),
            NodeKind::Event,
            attrs([
                ("event_id", e.id.as_str()),
                ("label", e.label.as_str()),
                ("description", e.description.as_str()),
            ]),
        );
        link(
            &mut g,
            &event_node(&e.id),
            SubeventOf,
            &macro_node(&e.macro_event_id),
        );
    }
    for s in &corpus.segments {
        let mut a = attrs([
            ("segment_id", s.id.as_str()),
            ("description", s.description.as_str()),
        ]);
        if let Some(role) = s.narrative_role {
            a.insert("narrative_role".into(), role.as_str().into());
        }
        add(&mut g, &segment_node(&s.id), NodeKind::EventSegment, a);
        link(
            &mut g,
            &segment_node(&s.id),
            SubeventOf,
            &event_node(&s.event_id),
        );
    }

    // Sibling order: first panel, then list position; units without panels last.
    let order_key = |span: Option<Span>, i: usize| (span.is_none(), span.map(|s| s.0), i);

    let mut macros: Vec<(usize, &str)> = corpus
        .macro_events
        .iter()
        .map(|m| m.id.as_str())
        .enumerate()
        .collect();
    macros.sort_by_key(|&(i, id)| order_key(macro_span.get(id).copied().flatten(), i));
    for pair in macros.windows(2) {
        link(
            &mut g,
            &macro_node(pair[0].1),
            Precedes,
            &macro_node(pair[1].1),
        );
    }

    let mut siblings: BTreeMap<usize, Vec<(usize, &str)>> = BTreeMap::new();
    let macro_pos: HashMap<&str, usize> = corpus
        .macro_events
        .iter()
        .enumerate()
        .map(|(i, m)| (m.id.as_str(), i))
        .collect();
    for (i, e) in corpus.events.iter().enumerate() {
        if let Some(&pos) = macro_pos.get(e.macro_event_id.as_str()) {
            siblings.entry(pos).or_default().push((i, e.id.as_str()));
        }
    }
    let mut all_events: Vec<(usize, &str)> = Vec::new();
    for (_, mut events) in siblings {
        events.sort_by_key(|&(i, id)| order_key(event_span.get(id).copied().flatten(), i));
        for pair in events.windows(2) {
            link(
                &mut g,
                &event_node(pair[0].1),
                Precedes,
                &event_node(pair[1].1),
            );
        }
        all_events.extend(events);
    }

    all_events.sort_by_key(|&(i, id)| order_key(event_span.get(id).copied().flatten(), i));
    for (a, &(_, first)) in all_events.iter().enumerate() {
        let Some(Some((lo_a, hi_a))) = event_span.get(first).copied() else {
            continue;
        };
        for &(_, second) in &all_events[a + 1..] {
            let Some(Some((lo_b, hi_b))) = event_span.get(second).copied() else {
                continue;
            };
            if lo_a <= hi_b && lo_b <= hi_a {
                link(&mut g, &event_node(first), CoOccurs, &event_node(second));
            }
        }
    }

    g
}

/// The integrated graph plus a label index for query entry points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifiedGraph {
    graph: NarrativeGraph,
    index: HashMap<(NodeKind, String), Vec<String>>,
}

/// Attribute used as the lookup label for each indexed kind.
fn index_key(kind: NodeKind) -> Option<&'static str> {
    match kind {
        NodeKind::MacroEvent | NodeKind::Event => Some("label"),
        NodeKind::EventSegment => Some("segment_id"),
        NodeKind::Panel => Some("panel_id"),
        NodeKind::Character => Some("key"),
        _ => None,
    }
}

impl UnifiedGraph {
    /// Wraps a unified-tier graph (e.g. one read back from JSON) and
    /// rebuilds the label index.
    pub fn from_graph(graph: NarrativeGraph) -> Result<Self, GraphError> {
        if graph.tier() != Tier::Unified {
            return Err(GraphError::Schema(format!(
                "expected a unified graph, found tier `{}`",
                graph.tier()
            )));
        }
        let mut index: HashMap<(NodeKind, String), Vec<String>> = HashMap::new();
        for (id, node) in graph.nodes() {
            let Some(key) = index_key(node.kind) else {
                continue;
            };
            let label = node.attrs.get(key).ok_or_else(|| {
                GraphError::Schema(format!("{} node `{id}` lacks attribute `{key}`", node.kind))
            })?;
            let label = if node.kind == NodeKind::Character {
                normalize_token(label)
            } else {
                label.clone()
            };
            index
                .entry((node.kind, label))
                .or_default()
                .push(id.to_owned());
        }
        Ok(UnifiedGraph { graph, index })
    }

    pub fn graph(&self) -> &NarrativeGraph {
        &self.graph
    }

    pub fn into_graph(self) -> NarrativeGraph {
        self.graph
    }

    /// Node ids of the given kind carrying `label`, in graph order.
    /// Character labels are normalized before lookup.
    pub fn lookup(&self, kind: NodeKind, label: &str) -> &[String] {
        let key = if kind == NodeKind::Character {
            normalize_token(label)
        } else {
            label.to_owned()
        };
        self.index
            .get(&(kind, key))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Breaches of the unified-graph structure; empty for any graph
    /// produced by [`integrate`].
    pub fn structural_violations(&self) -> Vec<String> {
        let g = &self.graph;
        let mut out = Vec::new();
        let out_of = |id: &str, rel| g.neighbors(id, rel, Direction::Out).unwrap_or_default();

        let expect_one = |id: &str, rel: RelationKind, target: NodeKind, out: &mut Vec<String>| {
            let targets = out_of(id, rel);
            if targets.len() != 1 || g.kind(targets[0]) != Some(target) {
                out.push(format!(
                    "`{id}` has {} {rel} edges (expected one to a {target})",
                    targets.len()
                ));
            }
        };
        for id in g.nodes_of_kind(NodeKind::Panel) {
            expect_one(id, Instantiates, NodeKind::EventSegment, &mut out);
        }
        for id in g.nodes_of_kind(NodeKind::EventSegment) {
            expect_one(id, SubeventOf, NodeKind::Event, &mut out);
        }
        for id in g.nodes_of_kind(NodeKind::Event) {
            expect_one(id, SubeventOf, NodeKind::MacroEvent, &mut out);
        }
        for id in g.nodes_of_kind(NodeKind::CharacterMention) {
            expect_one(id, RefersTo, NodeKind::Character, &mut out);
        }
        if !g.is_acyclic(&[Precedes]) {
            out.push("precedes subgraph has a cycle".into());
        }
        out
    }
}

/// Builds all three tiers and joins them into the unified graph.
pub fn integrate(corpus: &AnnotationCorpus) -> Result<UnifiedGraph, GraphError> {
    let mut g = NarrativeGraph::new(Tier::Unified);
    g.merge(&build_event_graph(corpus))?;
    g.merge(&build_temporal_graph(corpus)?)?;

    let panels = corpus.panels_in_reading_order();
    for p in &panels {
        g.merge(&build_panel_graph(p))?;
    }

    let mut seen_characters = HashSet::new();
    for p in &panels {
        let root = panel_node(&p.panel_id);
        g.add_edge(&root, Instantiates, &segment_node(&p.segment_id))?;
        for label in &p.characters {
            let character = character_node(label);
            if seen_characters.insert(character.clone()) {
                g.add_node(
                    character.as_str(),
                    NodeKind::Character,
                    attrs([("label", label.clone()), ("key", normalize_token(label))]),
                )?;
            }
            g.add_edge(&mention_node(&p.panel_id, label), RefersTo, &character)?;
        }
    }

    UnifiedGraph::from_graph(g)
}
