//! Typed, directed, labeled multigraph used by every tier.
//!
//! Nodes are addressed by string id and carry a [`NodeKind`] plus string
//! attributes. Edges are unique per `(src, rel, dst)`. `precedes` and
//! `follows` are kept as exact inverses of each other.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("missing node `{0}`")]
    MissingNode(String),
    #[error("node `{id}` is a {existing} and cannot be merged with a {incoming}")]
    KindConflict {
        id: String,
        existing: NodeKind,
        incoming: NodeKind,
    },
    #[error("malformed graph document: {0}")]
    Schema(String),
    #[error("cycle over {0}")]
    Cycle(String),
}

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!("unknown {} `{}`", stringify!($name), s)),
                }
            }
        }
    };
}

string_enum! {
    /// `Character` is the story-wide identity; `CharacterMention` is its
    /// occurrence in one panel.
    NodeKind {
        Panel => "panel",
        PanelVisual => "panel_visual",
        PanelTextual => "panel_textual",
        CharacterMention => "character_mention",
        Character => "character",
        Action => "action",
        SceneObject => "scene_object",
        DialogueNode => "dialogue",
        DialogueContent => "dialogue_content",
        CaptionNode => "caption",
        EventSegment => "event_segment",
        Event => "event",
        MacroEvent => "macro_event",
    }
}

string_enum! {
    RelationKind {
        HasVisual => "has_visual",
        HasTextual => "has_textual",
        HasCharacter => "has_character",
        HasAction => "has_action",
        HasObject => "has_object",
        AgentOf => "agent_of",
        PartOf => "part_of",
        ContentOf => "content_of",
        Instantiates => "instantiates",
        SubeventOf => "subevent_of",
        Precedes => "precedes",
        Follows => "follows",
        CoOccurs => "co_occurs",
        RefersTo => "refers_to",
    }
}

string_enum! {
    Tier {
        PanelTier => "panel",
        TemporalTier => "temporal",
        EventTier => "event",
        Unified => "unified",
    }
}

impl RelationKind {
    /// The relation automatically maintained alongside this one, if any.
    pub fn inverse(self) -> Option<RelationKind> {
        match self {
            RelationKind::Precedes => Some(RelationKind::Follows),
            RelationKind::Follows => Some(RelationKind::Precedes),
            _ => None,
        }
    }
}

/// Which clock a `precedes`/`follows` edge orders by. Only reading order is
/// produced today; narrative time is reserved for flashback-aware builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeKind {
    #[default]
    Reading,
    Narrative,
}

impl TimeKind {
    fn is_reading(&self) -> bool {
        *self == TimeKind::Reading
    }
}

pub type Attrs = IndexMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub attrs: Attrs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    pub rel: RelationKind,
    pub dst: String,
    #[serde(default, skip_serializing_if = "TimeKind::is_reading")]
    pub time_kind: TimeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone)]
pub struct NarrativeGraph {
    tier: Tier,
    nodes: IndexMap<String, Node>,
    edges: Vec<Edge>,
    edge_index: HashMap<(usize, RelationKind, usize), usize>,
    outgoing: HashMap<(usize, RelationKind), Vec<usize>>,
    incoming: HashMap<(usize, RelationKind), Vec<usize>>,
}

impl PartialEq for NarrativeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.tier == other.tier && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for NarrativeGraph {}

impl NarrativeGraph {
    pub fn new(tier: Tier) -> Self {
        NarrativeGraph {
            tier,
            nodes: IndexMap::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            outgoing: HashMap::new(),
            incoming: HashMap::new(),
        }
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_node(
        &mut self,
        id: impl Into<String>,
        kind: NodeKind,
        attrs: Attrs,
    ) -> Result<(), GraphError> {
        let id = id.into();
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        self.nodes.insert(id, Node { kind, attrs });
        Ok(())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn kind(&self, id: &str) -> Option<NodeKind> {
        self.nodes.get(id).map(|n| n.kind)
    }

    pub fn attr(&self, id: &str, key: &str) -> Option<&str> {
        self.nodes.get(id)?.attrs.get(key).map(String::as_str)
    }

    /// Overwrites (or adds) one attribute of an existing node.
    pub fn set_attr(
        &mut self,
        id: &str,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<(), GraphError> {
        let node = self
            .nodes
            .get_mut(id)
            .ok_or_else(|| GraphError::MissingNode(id.to_owned()))?;
        node.attrs.insert(key.into(), value.into());
        Ok(())
    }

    /// Nodes in insertion order.
    pub fn nodes(&self) -> impl Iterator<Item = (&str, &Node)> {
        self.nodes.iter().map(|(id, n)| (id.as_str(), n))
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &str> {
        self.nodes
            .iter()
            .filter(move |(_, n)| n.kind == kind)
            .map(|(id, _)| id.as_str())
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, src: &str, rel: RelationKind, dst: &str) -> bool {
        match (self.nodes.get_index_of(src), self.nodes.get_index_of(dst)) {
            (Some(s), Some(d)) => self.edge_index.contains_key(&(s, rel, d)),
            _ => false,
        }
    }

    pub fn add_edge(&mut self, src: &str, rel: RelationKind, dst: &str) -> Result<(), GraphError> {
        self.add_timed_edge(src, rel, dst, TimeKind::Reading)
    }

    /// Adds an edge; `precedes`/`follows` also get their inverse. Re-adding
    /// an existing edge is a no-op.
    pub fn add_timed_edge(
        &mut self,
        src: &str,
        rel: RelationKind,
        dst: &str,
        time_kind: TimeKind,
    ) -> Result<(), GraphError> {
        let s = self
            .nodes
            .get_index_of(src)
            .ok_or_else(|| GraphError::MissingNode(src.to_owned()))?;
        let d = self
            .nodes
            .get_index_of(dst)
            .ok_or_else(|| GraphError::MissingNode(dst.to_owned()))?;
        self.insert_edge(s, rel, d, time_kind);
        if let Some(inv) = rel.inverse() {
            self.insert_edge(d, inv, s, time_kind);
        }
        Ok(())
    }

    fn insert_edge(&mut self, s: usize, rel: RelationKind, d: usize, time_kind: TimeKind) {
        if self.edge_index.contains_key(&(s, rel, d)) {
            return;
        }
        let idx = self.edges.len();
        self.edges.push(Edge {
            src: self.nodes.get_index(s).unwrap().0.clone(),
            rel,
            dst: self.nodes.get_index(d).unwrap().0.clone(),
            time_kind,
        });
        self.edge_index.insert((s, rel, d), idx);
        self.outgoing.entry((s, rel)).or_default().push(d);
        self.incoming.entry((d, rel)).or_default().push(s);
    }

    /// Neighbors over one relation, in edge insertion order.
    pub fn neighbors(
        &self,
        id: &str,
        rel: RelationKind,
        direction: Direction,
    ) -> Result<Vec<&str>, GraphError> {
        let i = self
            .nodes
            .get_index_of(id)
            .ok_or_else(|| GraphError::MissingNode(id.to_owned()))?;
        let adjacency = match direction {
            Direction::Out => &self.outgoing,
            Direction::In => &self.incoming,
        };
        Ok(adjacency
            .get(&(i, rel))
            .map(|list| {
                list.iter()
                    .map(|&j| self.nodes.get_index(j).unwrap().0.as_str())
                    .collect()
            })
            .unwrap_or_default())
    }

    /// True iff the subgraph restricted to `rels` has no directed cycle.
    pub fn is_acyclic(&self, rels: &[RelationKind]) -> bool {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(s, rel, d) in self.edge_index.keys() {
            if rels.contains(&rel) {
                indegree[d] += 1;
                succ[s].push(d);
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut visited = 0;
        while let Some(i) = queue.pop_front() {
            visited += 1;
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        visited == n
    }

    /// Copies every node and edge of `other` into `self`. Nodes already
    /// present must agree on kind; missing attributes are filled in.
    pub fn merge(&mut self, other: &NarrativeGraph) -> Result<(), GraphError> {
        for (id, node) in other.nodes() {
            match self.nodes.get_mut(id) {
                Some(existing) if existing.kind != node.kind => {
                    return Err(GraphError::KindConflict {
                        id: id.to_owned(),
                        existing: existing.kind,
                        incoming: node.kind,
                    })
                }
                Some(existing) => {
                    for (k, v) in &node.attrs {
                        existing.attrs.entry(k.clone()).or_insert_with(|| v.clone());
                    }
                }
                None => {
                    self.nodes.insert(id.to_owned(), node.clone());
                }
            }
        }
        for e in other.edges() {
            self.add_timed_edge(&e.src, e.rel, &e.dst, e.time_kind)?;
        }
        Ok(())
    }

    /// Node-link JSON (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            tier: self.tier,
            nodes: self
                .nodes
                .iter()
                .map(|(id, n)| NodeDoc {
                    id: id.clone(),
                    kind: n.kind,
                    attrs: n.attrs.clone(),
                })
                .collect(),
            edges: self.edges.clone(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("graph serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<NarrativeGraph, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Schema(e.to_string()))?;
        let mut g = NarrativeGraph::new(doc.tier);
        for n in doc.nodes {
            g.add_node(n.id, n.kind, n.attrs)
                .map_err(|e| GraphError::Schema(e.to_string()))?;
        }
        for e in doc.edges {
            g.add_timed_edge(&e.src, e.rel, &e.dst, e.time_kind)
                .map_err(|e| GraphError::Schema(format!("edge references {e}")))?;
        }
        Ok(g)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    tier: Tier,
    nodes: Vec<NodeDoc>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: String,
    kind: NodeKind,
    #[serde(default)]
    attrs: Attrs,
}

/// Shorthand for building attribute maps.
pub fn attrs<K: Into<String>, V: Into<String>>(pairs: impl IntoIterator<Item = (K, V)>) -> Attrs {
    pairs
        .into_iter()
        .map(|(k, v)| (k.into(), v.into()))
        .collect()
}
