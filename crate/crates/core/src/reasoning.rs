//! The four symbolic queries over a unified graph.
//!
//! Every query walks the hierarchy top-down (macro-event or event, then
//! segments via `subevent_of`, then panels via `instantiates`) and orders
//! panels by their `reading_order` attribute, never by id.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::build::UnifiedGraph;
use crate::graph::{Direction, NarrativeGraph, NodeKind, RelationKind};
use crate::normalize::{normalize_token, normalize_utterance};

use RelationKind::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown {kind} `{label}`")]
    UnknownUnit { kind: &'static str, label: String },
    #[error("graph inconsistency: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Actions,
    Dialogue,
    Characters,
    Timeline,
}

impl Task {
    pub const ALL: [Task; 4] = [
        Task::Actions,
        Task::Dialogue,
        Task::Characters,
        Task::Timeline,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Actions => "actions",
            Task::Dialogue => "dialogue",
            Task::Characters => "characters",
            Task::Timeline => "timeline",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Items(Vec<String>),
    /// Character label to the panels it appears in.
    Map(IndexMap<String, Vec<String>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResult {
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_unit: Option<String>,
    #[serde(flatten)]
    pub answer: Answer,
}

impl QueryResult {
    pub fn items(&self) -> &[String] {
        match &self.answer {
            Answer::Items(items) => items,
            Answer::Map(_) => &[],
        }
    }

    pub fn map(&self) -> Option<&IndexMap<String, Vec<String>>> {
        match &self.answer {
            Answer::Map(m) => Some(m),
            Answer::Items(_) => None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("query result serializes");
        out.push('\n');
        out
    }
}

/// Keeps the first surface form of every normalized key, in arrival order.
struct FirstSeen<F: Fn(&str) -> String> {
    seen: HashSet<String>,
    items: Vec<String>,
    key: F,
}

impl<F: Fn(&str) -> String> FirstSeen<F> {
    fn new(key: F) -> Self {
        FirstSeen {
            seen: HashSet::new(),
            items: Vec::new(),
            key,
        }
    }

    fn push(&mut self, item: &str) {
        if self.seen.insert((self.key)(item)) {
            self.items.push(item.to_owned());
        }
    }
}

fn neighbors<'g>(
    g: &'g NarrativeGraph,
    id: &str,
    rel: RelationKind,
    dir: Direction,
) -> Result<Vec<&'g str>, QueryError> {
    g.neighbors(id, rel, dir)
        .map_err(|e| QueryError::Malformed(e.to_string()))
}

fn reading_order(g: &NarrativeGraph, panel: &str) -> Result<u64, QueryError> {
    g.attr(panel, "reading_order")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| {
            QueryError::Malformed(format!("panel `{panel}` has no numeric reading_order"))
        })
}

fn resolve<'u>(
    g: &'u UnifiedGraph,
    kind: NodeKind,
    label: &str,
) -> Result<&'u [String], QueryError> {
    let ids = g.lookup(kind, label);
    if ids.is_empty() {
        return Err(QueryError::UnknownUnit {
            kind: match kind {
                NodeKind::MacroEvent => "macro-event",
                NodeKind::Event => "event",
                _ => "unit",
            },
            label: label.to_owned(),
        });
    }
    Ok(ids)
}

/// Panels instantiating any segment below `roots`, sorted by reading order.
/// `depth` is the number of `subevent_of` hops from a root down to segments.
fn panels_under<'g>(
    g: &'g NarrativeGraph,
    roots: &[String],
    depth: usize,
) -> Result<Vec<&'g str>, QueryError> {
    let mut frontier: Vec<&str> = roots.iter().map(String::as_str).collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for id in frontier {
            next.extend(neighbors(g, id, SubeventOf, Direction::In)?);
        }
        frontier = next;
    }
    let mut panels = Vec::new();
    for segment in frontier {
        for panel in neighbors(g, segment, Instantiates, Direction::In)? {
            if g.kind(panel) == Some(NodeKind::Panel) {
                panels.push((reading_order(g, panel)?, panel));
            }
        }
    }
    panels.sort();
    panels.dedup();
    Ok(panels.into_iter().map(|(_, p)| p).collect())
}

fn visual_of<'g>(g: &'g NarrativeGraph, panel: &str) -> Result<Vec<&'g str>, QueryError> {
    neighbors(g, panel, HasVisual, Direction::Out)
}

/// Distinct verbs under a macro-event, in order of first occurrence.
pub fn actions_by_macro_event(
    g: &UnifiedGraph,
    macro_label: &str,
) -> Result<QueryResult, QueryError> {
    let roots = resolve(g, NodeKind::MacroEvent, macro_label)?;
    let graph = g.graph();
    let mut verbs = FirstSeen::new(normalize_token);
    for panel in panels_under(graph, roots, 2)? {
        for visual in visual_of(graph, panel)? {
            for action in neighbors(graph, visual, HasAction, Direction::Out)? {
                if let Some(verb) = graph.attr(action, "verb") {
                    verbs.push(verb);
                }
            }
        }
    }
    Ok(QueryResult {
        task: Task::Actions,
        source_unit: Some(macro_label.to_owned()),
        answer: Answer::Items(verbs.items),
    })
}

/// Distinct dialogue lines under an event, in reading then balloon order.
/// Captions are not dialogue and are skipped.
pub fn dialogue_by_event(g: &UnifiedGraph, event_label: &str) -> Result<QueryResult, QueryError> {
    let roots = resolve(g, NodeKind::Event, event_label)?;
    let graph = g.graph();
    let mut lines = FirstSeen::new(normalize_utterance);
    for panel in panels_under(graph, roots, 1)? {
        for textual in neighbors(graph, panel, HasTextual, Direction::Out)? {
            for part in neighbors(graph, textual, PartOf, Direction::In)? {
                if graph.kind(part) != Some(NodeKind::DialogueNode) {
                    continue;
                }
                for content in neighbors(graph, part, ContentOf, Direction::In)? {
                    if let Some(text) = graph.attr(content, "text") {
                        lines.push(text);
                    }
                }
            }
        }
    }
    Ok(QueryResult {
        task: Task::Dialogue,
        source_unit: Some(event_label.to_owned()),
        answer: Answer::Items(lines.items),
    })
}

/// Every character mapped to the panels it appears in. Characters are
/// listed by first appearance; panels by reading order.
pub fn character_appearances(g: &UnifiedGraph) -> Result<QueryResult, QueryError> {
    let graph = g.graph();
    // (reading_order, mention position, character id, panel id)
    let mut sightings: Vec<(u64, usize, &str, &str)> = Vec::new();
    for visual in graph.nodes_of_kind(NodeKind::PanelVisual) {
        let panels = neighbors(graph, visual, HasVisual, Direction::In)?;
        let Some(&panel) = panels.first() else {
            continue;
        };
        let order = reading_order(graph, panel)?;
        for (pos, mention) in neighbors(graph, visual, HasCharacter, Direction::Out)?
            .into_iter()
            .enumerate()
        {
            for character in neighbors(graph, mention, RefersTo, Direction::Out)? {
                sightings.push((order, pos, character, panel));
            }
        }
    }
    sightings.sort();

    let mut map: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut listed: HashSet<(&str, &str)> = HashSet::new();
    for (_, _, character, panel) in sightings {
        if !listed.insert((character, panel)) {
            continue;
        }
        let label = graph
            .attr(character, "label")
            .unwrap_or(character)
            .to_owned();
        let panel_id = graph.attr(panel, "panel_id").unwrap_or(panel).to_owned();
        map.entry(label).or_default().push(panel_id);
    }
    Ok(QueryResult {
        task: Task::Characters,
        source_unit: None,
        answer: Answer::Map(map),
    })
}

/// Panel ids under a macro-event in reading order.
pub fn panel_timeline(g: &UnifiedGraph, macro_label: &str) -> Result<QueryResult, QueryError> {
    let roots = resolve(g, NodeKind::MacroEvent, macro_label)?;
    let graph = g.graph();
    let items = panels_under(graph, roots, 2)?
        .into_iter()
        .map(|p| graph.attr(p, "panel_id").unwrap_or(p).to_owned())
        .collect();
    Ok(QueryResult {
        task: Task::Timeline,
        source_unit: Some(macro_label.to_owned()),
        answer: Answer::Items(items),
    })
}

/// Dispatches by task. `unit` is required for every task except characters.
pub fn run_query(
    g: &UnifiedGraph,
    task: Task,
    unit: Option<&str>,
) -> Result<QueryResult, QueryError> {
    let need = |kind: &'static str| {
        unit.ok_or(QueryError::UnknownUnit {
            kind,
            label: String::new(),
        })
    };
    match task {
        Task::Actions => actions_by_macro_event(g, need("macro-event")?),
        Task::Dialogue => dialogue_by_event(g, need("event")?),
        Task::Characters => character_appearances(g),
        Task::Timeline => panel_timeline(g, need("macro-event")?),
    }
}
