//! Structural checks over a parsed corpus. Violations are reported as data.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::annotation::AnnotationCorpus;
use crate::normalize::normalize_token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    /// Not an invariant breach, but makes label-addressed queries ambiguous.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.violations
            .iter()
            .any(|v| v.severity == Severity::Error)
    }

    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        });
    }

    fn warning(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            severity: Severity::Warning,
            path: path.into(),
            message: message.into(),
        });
    }
}

pub fn validate_corpus(corpus: &AnnotationCorpus) -> ValidationReport {
    let mut report = ValidationReport::default();

    let macro_ids = unique_ids(
        &mut report,
        "macro_events",
        corpus.macro_events.iter().map(|m| &m.id),
    );
    let event_ids = unique_ids(&mut report, "events", corpus.events.iter().map(|e| &e.id));
    let segment_ids = unique_ids(
        &mut report,
        "segments",
        corpus.segments.iter().map(|s| &s.id),
    );
    unique_ids(
        &mut report,
        "panels",
        corpus.panels.iter().map(|p| &p.panel_id),
    );

    for (i, m) in corpus.macro_events.iter().enumerate() {
        if m.label.trim().is_empty() {
            report.error(format!("macro_events[{i}].label"), "label is empty");
        }
    }
    duplicate_labels(
        &mut report,
        "macro_events",
        corpus.macro_events.iter().map(|m| &m.label),
    );
    duplicate_labels(
        &mut report,
        "events",
        corpus.events.iter().map(|e| &e.label),
    );

    for (i, e) in corpus.events.iter().enumerate() {
        if !macro_ids.contains(e.macro_event_id.as_str()) {
            report.error(
                format!("events[{i}].macro_event_id"),
                format!("unknown macro-event `{}`", e.macro_event_id),
            );
        }
    }
    for (i, s) in corpus.segments.iter().enumerate() {
        if !event_ids.contains(s.event_id.as_str()) {
            report.error(
                format!("segments[{i}].event_id"),
                format!("unknown event `{}`", s.event_id),
            );
        }
    }

    let mut orders: Vec<u32> = corpus.panels.iter().map(|p| p.reading_order).collect();
    orders.sort_unstable();
    if orders.iter().enumerate().any(|(i, &o)| o as usize != i) {
        report.error("panels", "reading_order not a permutation of 0..N-1");
    }

    for (k, panel) in corpus.panels.iter().enumerate() {
        let at = format!("panels[{k}]");
        if !segment_ids.contains(panel.segment_id.as_str()) {
            report.error(
                format!("{at}.segment_id"),
                format!("unknown segment `{}`", panel.segment_id),
            );
        }

        let characters: HashSet<String> = panel
            .characters
            .iter()
            .map(|c| normalize_token(c))
            .collect();
        for (j, c) in panel.characters.iter().enumerate() {
            if normalize_token(c).is_empty() {
                report.error(format!("{at}.characters[{j}]"), "character label is empty");
            }
        }
        for (j, action) in panel.actions.iter().enumerate() {
            if normalize_token(&action.verb).is_empty() {
                report.error(format!("{at}.actions[{j}].verb"), "verb is empty");
            }
            if !characters.contains(&normalize_token(&action.agent)) {
                report.error(
                    format!("{at}.actions[{j}].agent"),
                    format!(
                        "agent `{}` of panel `{}` is not among its characters",
                        action.agent, panel.panel_id
                    ),
                );
            }
        }

        let mut utterance_ids = HashSet::new();
        let lists = [
            ("dialogues", &panel.dialogues),
            ("captions", &panel.captions),
        ];
        for (list, utterances) in lists {
            for (j, u) in utterances.iter().enumerate() {
                let path = format!("{at}.{list}[{j}]");
                if !utterance_ids.insert(u.id.as_str()) {
                    report.error(
                        format!("{path}.id"),
                        format!("duplicate utterance id `{}`", u.id),
                    );
                }
                if u.text.trim().is_empty() {
                    report.error(format!("{path}.text"), "text is empty");
                }
                if let Some(speaker) = &u.speaker {
                    if !characters.contains(&normalize_token(speaker)) {
                        report.error(
                            format!("{path}.speaker"),
                            format!(
                                "speaker `{speaker}` of panel `{}` is not among its characters",
                                panel.panel_id
                            ),
                        );
                    }
                }
            }
        }
    }

    report
}

fn unique_ids<'a>(
    report: &mut ValidationReport,
    list: &str,
    ids: impl Iterator<Item = &'a String>,
) -> HashSet<&'a str> {
    let mut seen = HashSet::new();
    for (i, id) in ids.enumerate() {
        if !seen.insert(id.as_str()) {
            report.error(format!("{list}[{i}].id"), format!("duplicate id `{id}`"));
        }
    }
    seen
}

fn duplicate_labels<'a>(
    report: &mut ValidationReport,
    list: &str,
    labels: impl Iterator<Item = &'a String>,
) {
    let mut first: HashMap<&str, usize> = HashMap::new();
    for (i, label) in labels.enumerate() {
        if let Some(prev) = first.insert(label.as_str(), i) {
            first.insert(label.as_str(), prev);
            report.warning(
                format!("{list}[{i}].label"),
                format!("label `{label}` already used by {list}[{prev}]"),
            );
        }
    }
}
