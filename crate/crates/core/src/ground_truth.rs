//! Gold answers computed straight from annotations. Nothing in here reads a
//! graph, so these serve as the independent oracle for the queries.

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::Serialize;

use crate::annotation::{AnnotationCorpus, PanelAnnotation};
use crate::normalize::{normalize_token, normalize_utterance};
use crate::reasoning::{Answer, QueryError, QueryResult, Task};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldItems {
    /// Normalized, deduplicated items in first-occurrence reading order
    /// (actions, dialogue) or the strict panel sequence (timeline).
    Sequence(Vec<String>),
    /// Normalized `(character, panel_id)` pairs.
    Pairs(Vec<(String, String)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "QueryResult")]
pub struct GoldSet {
    pub task: Task,
    pub unit: Option<String>,
    pub items: GoldItems,
}

impl GoldSet {
    pub fn sequence(&self) -> &[String] {
        match &self.items {
            GoldItems::Sequence(s) => s,
            GoldItems::Pairs(_) => &[],
        }
    }

    pub fn pairs(&self) -> &[(String, String)] {
        match &self.items {
            GoldItems::Pairs(p) => p,
            GoldItems::Sequence(_) => &[],
        }
    }
}

impl From<GoldSet> for QueryResult {
    fn from(gold: GoldSet) -> Self {
        let answer = match gold.items {
            GoldItems::Sequence(items) => Answer::Items(items),
            GoldItems::Pairs(pairs) => {
                let mut map: IndexMap<String, Vec<String>> = IndexMap::new();
                for (character, panel) in pairs {
                    map.entry(character).or_default().push(panel);
                }
                Answer::Map(map)
            }
        };
        QueryResult {
            task: gold.task,
            source_unit: gold.unit,
            answer,
        }
    }
}

fn unknown(kind: &'static str, label: &str) -> QueryError {
    QueryError::UnknownUnit {
        kind,
        label: label.to_owned(),
    }
}

/// Panels whose event satisfies `keep`, in reading order.
fn panels_where(corpus: &AnnotationCorpus, keep: impl Fn(&str) -> bool) -> Vec<&PanelAnnotation> {
    corpus
        .panels_in_reading_order()
        .into_iter()
        .filter(|p| {
            corpus
                .segment(&p.segment_id)
                .is_some_and(|s| keep(&s.event_id))
        })
        .collect()
}

fn macro_panels<'c>(
    corpus: &'c AnnotationCorpus,
    macro_label: &str,
) -> Result<Vec<&'c PanelAnnotation>, QueryError> {
    let macros: HashSet<&str> = corpus
        .macro_events
        .iter()
        .filter(|m| m.label == macro_label)
        .map(|m| m.id.as_str())
        .collect();
    if macros.is_empty() {
        return Err(unknown("macro-event", macro_label));
    }
    Ok(panels_where(corpus, |event_id| {
        corpus
            .event(event_id)
            .is_some_and(|e| macros.contains(e.macro_event_id.as_str()))
    }))
}

fn event_panels<'c>(
    corpus: &'c AnnotationCorpus,
    event_label: &str,
) -> Result<Vec<&'c PanelAnnotation>, QueryError> {
    let events: HashSet<&str> = corpus
        .events
        .iter()
        .filter(|e| e.label == event_label)
        .map(|e| e.id.as_str())
        .collect();
    if events.is_empty() {
        return Err(unknown("event", event_label));
    }
    Ok(panels_where(corpus, |event_id| events.contains(event_id)))
}

fn dedup(items: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    items
        .into_iter()
        .filter(|i| seen.insert(i.clone()))
        .collect()
}

pub fn gold_actions(corpus: &AnnotationCorpus, macro_label: &str) -> Result<GoldSet, QueryError> {
    let verbs = macro_panels(corpus, macro_label)?
        .into_iter()
        .flat_map(|p| p.actions.iter().map(|a| normalize_token(&a.verb)));
    Ok(GoldSet {
        task: Task::Actions,
        unit: Some(macro_label.to_owned()),
        items: GoldItems::Sequence(dedup(verbs)),
    })
}

/// Verbs of one event; the restriction used to cross-check [`gold_actions`].
pub fn gold_event_actions(
    corpus: &AnnotationCorpus,
    event_label: &str,
) -> Result<GoldSet, QueryError> {
    let verbs = event_panels(corpus, event_label)?
        .into_iter()
        .flat_map(|p| p.actions.iter().map(|a| normalize_token(&a.verb)));
    Ok(GoldSet {
        task: Task::Actions,
        unit: Some(event_label.to_owned()),
        items: GoldItems::Sequence(dedup(verbs)),
    })
}

pub fn gold_dialogue(corpus: &AnnotationCorpus, event_label: &str) -> Result<GoldSet, QueryError> {
    let lines = event_panels(corpus, event_label)?
        .into_iter()
        .flat_map(|p| p.dialogues.iter().map(|d| normalize_utterance(&d.text)));
    Ok(GoldSet {
        task: Task::Dialogue,
        unit: Some(event_label.to_owned()),
        items: GoldItems::Sequence(dedup(lines)),
    })
}

/// `(character, panel)` pairs over the whole corpus. Characters come in
/// order of first appearance, each with its panels in reading order.
pub fn gold_characters(corpus: &AnnotationCorpus) -> GoldSet {
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for p in corpus.panels_in_reading_order() {
        for c in &p.characters {
            let pair = (normalize_token(c), p.panel_id.clone());
            if seen.insert(pair.clone()) {
                pairs.push(pair);
            }
        }
    }
    // group by character in order of first appearance
    let mut grouped: IndexMap<String, Vec<(String, String)>> = IndexMap::new();
    for pair in pairs {
        grouped.entry(pair.0.clone()).or_default().push(pair);
    }
    GoldSet {
        task: Task::Characters,
        unit: None,
        items: GoldItems::Pairs(grouped.into_values().flatten().collect()),
    }
}

/// Normalized character sets per event label, for per-event reporting.
pub fn gold_characters_by_event(corpus: &AnnotationCorpus) -> IndexMap<String, Vec<String>> {
    let mut out = IndexMap::new();
    for e in &corpus.events {
        let names = panels_where(corpus, |id| id == e.id)
            .into_iter()
            .flat_map(|p| p.characters.iter().map(|c| normalize_token(c)));
        let entry: &mut Vec<String> = out.entry(e.label.clone()).or_default();
        let merged = dedup(entry.drain(..).chain(names));
        *entry = merged;
    }
    out
}

pub fn gold_timeline(corpus: &AnnotationCorpus, macro_label: &str) -> Result<GoldSet, QueryError> {
    let panels = macro_panels(corpus, macro_label)?
        .into_iter()
        .map(|p| p.panel_id.clone())
        .collect();
    Ok(GoldSet {
        task: Task::Timeline,
        unit: Some(macro_label.to_owned()),
        items: GoldItems::Sequence(panels),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::Utterance;
    use crate::fixtures::{paper_fixture, INTRO_1_LINES};

    #[test]
    fn fixture_gold_sets() {
        let c = paper_fixture();
        assert_eq!(
            gold_actions(&c, "Think of family").unwrap().sequence(),
            ["hold_hand", "look_at_letter", "cook_rice", "walk_away"]
        );
        let lines: Vec<String> = INTRO_1_LINES
            .iter()
            .map(|l| normalize_utterance(l))
            .collect();
        assert_eq!(gold_dialogue(&c, "Intro_1").unwrap().sequence(), lines);
        let chars = gold_characters(&c);
        assert!(chars.pairs().contains(&("a".into(), "0_0_0".into())));
        assert!(chars.pairs().contains(&("b".into(), "0_0_1".into())));
        assert_eq!(chars.pairs().len(), 7);
        assert_eq!(
            gold_timeline(&c, "Think of family").unwrap().sequence(),
            ["0_0_0", "0_0_1", "0_0_2", "0_1_0", "0_1_1", "0_1_2", "0_2_0", "0_2_1", "0_2_2"]
        );
    }

    #[test]
    fn empty_units_and_dedup() {
        let mut c = paper_fixture();
        for p in &mut c.panels {
            p.actions.clear();
            p.dialogues.clear();
        }
        assert!(gold_actions(&c, "Think of family")
            .unwrap()
            .sequence()
            .is_empty());
        assert!(gold_dialogue(&c, "Intro_2").unwrap().sequence().is_empty());

        c.panels[0]
            .dialogues
            .push(Utterance::dialogue("x", "Same line.", None));
        c.panels[1]
            .dialogues
            .push(Utterance::dialogue("x", "same line. ", None));
        assert_eq!(
            gold_dialogue(&c, "Intro_1").unwrap().sequence(),
            ["same line."]
        );
    }

    #[test]
    fn repeated_cook_rice_counted_once() {
        let g = gold_actions(&paper_fixture(), "Think of family").unwrap();
        assert_eq!(g.sequence().iter().filter(|v| *v == "cook_rice").count(), 1);
    }

    #[test]
    fn no_characters() {
        let mut c = paper_fixture();
        c.panels.iter_mut().for_each(|p| p.characters.clear());
        assert!(gold_characters(&c).pairs().is_empty());
        c.panels[0].characters = vec!["A".into(), "a".into()];
        assert_eq!(gold_characters(&c).pairs().len(), 1);
    }

    #[test]
    fn timeline_ignores_list_order() {
        let c = paper_fixture();
        let mut shuffled = c.clone();
        shuffled.panels.reverse();
        assert_eq!(
            gold_timeline(&shuffled, "Think of family").unwrap(),
            gold_timeline(&c, "Think of family").unwrap()
        );
        let mut single = c.clone();
        single.panels.truncate(1);
        assert_eq!(
            gold_timeline(&single, "Think of family")
                .unwrap()
                .sequence(),
            ["0_0_0"]
        );
    }

    #[test]
    fn macro_actions_are_union_of_event_actions() {
        let c = paper_fixture();
        let mut union = Vec::new();
        for e in ["Intro_1", "Intro_2"] {
            union.extend(gold_event_actions(&c, e).unwrap().sequence().to_vec());
        }
        assert_eq!(
            dedup(union),
            gold_actions(&c, "Think of family").unwrap().sequence()
        );
    }

    #[test]
    fn per_event_characters() {
        let by_event = gold_characters_by_event(&paper_fixture());
        assert_eq!(by_event["Intro_1"], ["a", "b"]);
        assert_eq!(by_event["Intro_2"], ["b", "a"]);
    }

    #[test]
    fn unknown_unit() {
        assert!(gold_actions(&paper_fixture(), "Nope").is_err());
        assert!(gold_dialogue(&paper_fixture(), "Nope").is_err());
    }

    #[test]
    fn serializes_like_query_results() {
        let v = serde_json::to_value(gold_characters(&paper_fixture())).unwrap();
        assert_eq!(v["task"], "characters");
        assert_eq!(v["map"]["a"][0], "0_0_0");
        let v = serde_json::to_value(gold_timeline(&paper_fixture(), "Think of family").unwrap())
            .unwrap();
        assert_eq!(v["items"][8], "0_2_2");
    }
}
