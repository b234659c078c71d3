//! Annotation schema for story corpora and the JSON reader for it.
//!
//! A corpus is one JSON document per story. Panels carry the visual and
//! textual annotations; macro-events, events and segments form a three
//! level hierarchy that every panel hangs off via its `segment_id`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::normalize_token;

/// Errors raised while reading a corpus document.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("reference error at {path}: unknown {kind} `{id}`")]
    Reference {
        path: String,
        kind: &'static str,
        id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationCorpus {
    pub story_id: String,
    pub macro_events: Vec<MacroEvent>,
    pub events: Vec<Event>,
    pub segments: Vec<EventSegment>,
    pub panels: Vec<PanelAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroEvent {
    pub id: String,
    pub label: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub id: String,
    pub macro_event_id: String,
    pub label: String,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NarrativeRole {
    Establisher,
    Peak,
    Release,
    Other,
}

impl NarrativeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            NarrativeRole::Establisher => "establisher",
            NarrativeRole::Peak => "peak",
            NarrativeRole::Release => "release",
            NarrativeRole::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSegment {
    pub id: String,
    pub event_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub narrative_role: Option<NarrativeRole>,
    pub description: String,
}

/// Camera framing of a panel. Closed set; unknown strings are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotType {
    LongShot,
    HighAngle,
    FullShot,
    MediumLongShot,
    MediumShot,
    CloseShot,
    None,
}

impl ShotType {
    pub const ALL: [ShotType; 7] = [
        ShotType::LongShot,
        ShotType::HighAngle,
        ShotType::FullShot,
        ShotType::MediumLongShot,
        ShotType::MediumShot,
        ShotType::CloseShot,
        ShotType::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShotType::LongShot => "long_shot",
            ShotType::HighAngle => "high_angle",
            ShotType::FullShot => "full_shot",
            ShotType::MediumLongShot => "medium_long_shot",
            ShotType::MediumShot => "medium_shot",
            ShotType::CloseShot => "close_shot",
            ShotType::None => "none",
        }
    }
}

impl fmt::Display for ShotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Subject-verb-object action bound to the character performing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionTriple {
    pub agent: String,
    pub verb: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum UtteranceKind {
    #[default]
    Dialogue,
    Caption,
}

/// A dialogue line or caption. The kind is implied by which panel list the
/// utterance sits in and is not written to JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Utterance {
    pub id: String,
    #[serde(skip)]
    pub kind: UtteranceKind,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speaker: Option<String>,
}

impl Utterance {
    pub fn dialogue(id: impl Into<String>, text: impl Into<String>, speaker: Option<&str>) -> Self {
        Utterance {
            id: id.into(),
            kind: UtteranceKind::Dialogue,
            text: text.into(),
            speaker: speaker.map(str::to_owned),
        }
    }

    pub fn caption(id: impl Into<String>, text: impl Into<String>) -> Self {
        Utterance {
            id: id.into(),
            kind: UtteranceKind::Caption,
            text: text.into(),
            speaker: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelAnnotation {
    pub panel_id: String,
    pub segment_id: String,
    pub page_index: u32,
    pub reading_order: u32,
    pub shot_type: ShotType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_path: Option<String>,
    pub characters: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<String>,
    pub objects: Vec<String>,
    pub actions: Vec<ActionTriple>,
    pub dialogues: Vec<Utterance>,
    pub captions: Vec<Utterance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_description: Option<String>,
}

impl PanelAnnotation {
    /// A panel with no content, useful as a starting point for builders.
    pub fn empty(
        panel_id: impl Into<String>,
        segment_id: impl Into<String>,
        reading_order: u32,
    ) -> Self {
        PanelAnnotation {
            panel_id: panel_id.into(),
            segment_id: segment_id.into(),
            page_index: 0,
            reading_order,
            shot_type: ShotType::None,
            image_path: None,
            characters: Vec::new(),
            background: None,
            objects: Vec::new(),
            actions: Vec::new(),
            dialogues: Vec::new(),
            captions: Vec::new(),
            event_description: None,
        }
    }
}

/// Normalized verbs of a panel's actions, in annotation order. Duplicates
/// are kept.
pub fn extract_verbs(panel: &PanelAnnotation) -> Vec<String> {
    panel
        .actions
        .iter()
        .map(|a| normalize_token(&a.verb))
        .collect()
}

impl AnnotationCorpus {
    pub fn empty(story_id: impl Into<String>) -> Self {
        AnnotationCorpus {
            story_id: story_id.into(),
            macro_events: Vec::new(),
            events: Vec::new(),
            segments: Vec::new(),
            panels: Vec::new(),
        }
    }

    /// Panels sorted by `reading_order`. Ties keep list order.
    pub fn panels_in_reading_order(&self) -> Vec<&PanelAnnotation> {
        let mut panels: Vec<&PanelAnnotation> = self.panels.iter().collect();
        panels.sort_by_key(|p| p.reading_order);
        panels
    }

    pub fn macro_event(&self, id: &str) -> Option<&MacroEvent> {
        self.macro_events.iter().find(|m| m.id == id)
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn segment(&self, id: &str) -> Option<&EventSegment> {
        self.segments.iter().find(|s| s.id == id)
    }

    /// Canonical JSON form (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("corpus serializes");
        out.push('\n');
        out
    }
}

/// Reads a corpus document, resolving every hierarchy reference.
pub fn parse_corpus(source: &str) -> Result<AnnotationCorpus, ParseError> {
    let corpus = parse_corpus_unchecked(source)?;
    check_references(&corpus)?;
    Ok(corpus)
}

/// Like [`parse_corpus`] but leaves dangling references for the validator.
pub fn parse_corpus_unchecked(source: &str) -> Result<AnnotationCorpus, ParseError> {
    let value: serde_json::Value =
        serde_json::from_str(source).map_err(|e| ParseError::Syntax(e.to_string()))?;
    let mut corpus: AnnotationCorpus =
        serde_path_to_error::deserialize(value).map_err(|e| ParseError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;

    for (k, panel) in corpus.panels.iter_mut().enumerate() {
        for (j, caption) in panel.captions.iter_mut().enumerate() {
            if caption.speaker.is_some() {
                return Err(ParseError::Schema {
                    path: format!("panels[{k}].captions[{j}].speaker"),
                    message: "captions do not carry a speaker".into(),
                });
            }
            caption.kind = UtteranceKind::Caption;
        }
    }
    Ok(corpus)
}

fn check_references(corpus: &AnnotationCorpus) -> Result<(), ParseError> {
    let macros: HashSet<&str> = corpus.macro_events.iter().map(|m| m.id.as_str()).collect();
    let events: HashSet<&str> = corpus.events.iter().map(|e| e.id.as_str()).collect();
    let segments: HashSet<&str> = corpus.segments.iter().map(|s| s.id.as_str()).collect();

    for (i, e) in corpus.events.iter().enumerate() {
        if !macros.contains(e.macro_event_id.as_str()) {
            return Err(ParseError::Reference {
                path: format!("events[{i}].macro_event_id"),
                kind: "macro-event",
                id: e.macro_event_id.clone(),
            });
        }
    }
    for (i, s) in corpus.segments.iter().enumerate() {
        if !events.contains(s.event_id.as_str()) {
            return Err(ParseError::Reference {
                path: format!("segments[{i}].event_id"),
                kind: "event",
                id: s.event_id.clone(),
            });
        }
    }
    for (i, p) in corpus.panels.iter().enumerate() {
        if !segments.contains(p.segment_id.as_str()) {
            return Err(ParseError::Reference {
                path: format!("panels[{i}].segment_id"),
                kind: "segment",
                id: p.segment_id.clone(),
            });
        }
    }
    Ok(())
}
