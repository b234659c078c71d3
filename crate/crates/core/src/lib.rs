//! Hierarchical narrative knowledge graphs built from annotated comics.
//!
//! The pipeline reads an [`AnnotationCorpus`], builds the panel, temporal
//! and event tiers, joins them into a [`UnifiedGraph`], and answers four
//! queries over it: actions per macro-event, dialogue per event, character
//! appearances, and panel timelines. [`evaluate_all`] scores those answers
//! against gold sets derived directly from the annotations.

pub mod annotation;
pub mod build;
pub mod evaluation;
pub mod export;
pub mod fixtures;
pub mod graph;
pub mod ground_truth;
pub mod normalize;
pub mod reasoning;
pub mod validate;

pub use annotation::{
    extract_verbs, parse_corpus, parse_corpus_unchecked, ActionTriple, AnnotationCorpus, Event,
    EventSegment, MacroEvent, NarrativeRole, PanelAnnotation, ParseError, ShotType, Utterance,
    UtteranceKind,
};
pub use build::{
    build_event_graph, build_panel_graph, build_temporal_graph, integrate, UnifiedGraph,
};
pub use evaluation::{
    evaluate_all, evaluate_with, ordering_prf, set_prf, EvaluationReport, Metrics, SynonymMap,
    TaskReport, UnitReport,
};
pub use export::{to_dot, to_node_link};
pub use graph::{
    Direction, Edge, GraphError, NarrativeGraph, Node, NodeKind, RelationKind, Tier, TimeKind,
};
pub use ground_truth::{
    gold_actions, gold_characters, gold_dialogue, gold_timeline, GoldItems, GoldSet,
};
pub use normalize::{normalize_token, normalize_utterance};
pub use reasoning::{
    actions_by_macro_event, character_appearances, dialogue_by_event, panel_timeline, run_query,
    Answer, QueryError, QueryResult, Task,
};
pub use validate::{validate_corpus, Severity, ValidationReport, Violation};
