//! Precision, recall and F1 of query output against gold sets.
//!
//! Items are compared as sets after normalization: verbs for actions, full
//! utterances for dialogue, `(character, panel)` pairs for appearances, and
//! adjacent ordered pairs for timelines. Scores are exact rationals; the
//! report carries them as `f64` for display.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::hash::Hash;
use std::ops::AddAssign;

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::annotation::AnnotationCorpus;
use crate::build::UnifiedGraph;
use crate::ground_truth::{gold_actions, gold_characters, gold_dialogue, gold_timeline};
use crate::normalize::{normalize_token, normalize_utterance};
use crate::reasoning::{
    actions_by_macro_event, character_appearances, dialogue_by_event, panel_timeline, QueryError,
    Task,
};

/// Confusion counts. Precision, recall and F1 derive from them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Metrics {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl Metrics {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Metrics { tp, fp, fn_ }
    }

    /// tp / (tp + fp). With nothing predicted: 1 if gold is empty too, else 0.
    pub fn precision(&self) -> Ratio<u64> {
        match self.tp + self.fp {
            0 if self.fn_ == 0 => Ratio::from_integer(1),
            0 => Ratio::from_integer(0),
            d => Ratio::new(self.tp, d),
        }
    }

    /// tp / (tp + fn). With empty gold: 1 if nothing was predicted, else 0.
    pub fn recall(&self) -> Ratio<u64> {
        match self.tp + self.fn_ {
            0 if self.fp == 0 => Ratio::from_integer(1),
            0 => Ratio::from_integer(0),
            d => Ratio::new(self.tp, d),
        }
    }

    pub fn f1(&self) -> Ratio<u64> {
        let (p, r) = (self.precision(), self.recall());
        if p + r == Ratio::from_integer(0) {
            Ratio::from_integer(0)
        } else {
            Ratio::from_integer(2) * p * r / (p + r)
        }
    }

    pub fn precision_f64(&self) -> f64 {
        to_f64(self.precision())
    }

    pub fn recall_f64(&self) -> f64 {
        to_f64(self.recall())
    }

    pub fn f1_f64(&self) -> f64 {
        to_f64(self.f1())
    }
}

fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl AddAssign for Metrics {
    fn add_assign(&mut self, rhs: Metrics) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
    }
}

impl Serialize for Metrics {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Metrics", 6)?;
        s.serialize_field("precision", &self.precision_f64())?;
        s.serialize_field("recall", &self.recall_f64())?;
        s.serialize_field("f1", &self.f1_f64())?;
        s.serialize_field("tp", &self.tp)?;
        s.serialize_field("fp", &self.fp)?;
        s.serialize_field("fn", &self.fn_)?;
        s.end()
    }
}

pub fn set_prf<T: Eq + Hash>(
    predicted: impl IntoIterator<Item = T>,
    gold: impl IntoIterator<Item = T>,
) -> Metrics {
    let predicted: HashSet<T> = predicted.into_iter().collect();
    let gold: HashSet<T> = gold.into_iter().collect();
    let tp = predicted.intersection(&gold).count() as u64;
    Metrics {
        tp,
        fp: predicted.len() as u64 - tp,
        fn_: gold.len() as u64 - tp,
    }
}

/// Set F1 over adjacent ordered pairs of each sequence.
pub fn ordering_prf<T: Eq + Hash + Clone>(predicted: &[T], gold: &[T]) -> Metrics {
    let pairs =
        |s: &[T]| -> Vec<(T, T)> { s.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect() };
    set_prf(pairs(predicted), pairs(gold))
}

/// Static verb synonym table, e.g. `insert_into -> insert`. Keys and values
/// are normalized on load.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymMap {
    map: HashMap<String, String>,
}

impl SynonymMap {
    pub fn new<K: AsRef<str>, V: AsRef<str>>(pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        SynonymMap {
            map: pairs
                .into_iter()
                .map(|(k, v)| (normalize_token(k.as_ref()), normalize_token(v.as_ref())))
                .collect(),
        }
    }

    /// Reads a flat JSON object of `variant: canonical` strings.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let raw: HashMap<String, String> = serde_json::from_str(text)?;
        Ok(SynonymMap::new(raw))
    }

    pub fn canonical(&self, verb: &str) -> String {
        let v = normalize_token(verb);
        self.map.get(&v).cloned().unwrap_or(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitReport {
    pub unit: String,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskReport {
    pub task: Task,
    pub focus: &'static str,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub units: Vec<UnitReport>,
}

impl TaskReport {
    pub fn title(&self) -> &'static str {
        task_title(self.task)
    }
}

pub fn task_title(task: Task) -> &'static str {
    match task {
        Task::Actions => "Action retrieval by macro-event",
        Task::Dialogue => "Dialogue trace by event",
        Task::Characters => "Character appearance mapping",
        Task::Timeline => "Panel timeline reconstruction",
    }
}

pub fn task_focus(task: Task) -> &'static str {
    match task {
        Task::Actions => "Action Recovery",
        Task::Dialogue => "Dialogue Recall",
        Task::Characters => "Entity Recall",
        Task::Timeline => "Sequence Ordering",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub tasks: Vec<TaskReport>,
}

impl EvaluationReport {
    pub fn task(&self, task: Task) -> &TaskReport {
        self.tasks
            .iter()
            .find(|t| t.task == task)
            .expect("report covers all four tasks")
    }

    /// Drops the per-unit breakdown.
    pub fn without_units(mut self) -> Self {
        for t in &mut self.tasks {
            t.units.clear();
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Plain-text table: task, evaluation focus, F1. Unit rows follow each
    /// task when the breakdown is present.
    pub fn to_table(&self) -> String {
        let w0 = Task::ALL
            .iter()
            .map(|t| task_title(*t).len())
            .max()
            .unwrap_or(0);
        let w1 = Task::ALL
            .iter()
            .map(|t| task_focus(*t).len())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<w0$} | {:<w1$} | F1 Score",
            "Task", "Evaluation Focus"
        );
        let _ = writeln!(
            out,
            "{}-+-{}-+-{}",
            "-".repeat(w0),
            "-".repeat(w1),
            "-".repeat(8)
        );
        for t in &self.tasks {
            let _ = writeln!(
                out,
                "{:<w0$} | {:<w1$} | {:.2}",
                t.title(),
                t.focus,
                t.metrics.f1_f64()
            );
            for u in &t.units {
                let _ = writeln!(
                    out,
                    "{:<w0$} | {:<w1$} | {:.2}",
                    format!("  {}", u.unit),
                    format!(
                        "  tp={} fp={} fn={}",
                        u.metrics.tp, u.metrics.fp, u.metrics.fn_
                    ),
                    u.metrics.f1_f64()
                );
            }
        }
        out
    }
}

fn distinct<'a>(labels: impl Iterator<Item = &'a String>) -> Vec<&'a str> {
    let mut seen = HashSet::new();
    labels
        .map(String::as_str)
        .filter(|l| seen.insert(*l))
        .collect()
}

fn micro(task: Task, units: Vec<UnitReport>) -> TaskReport {
    let mut total = Metrics::default();
    for u in &units {
        total += u.metrics;
    }
    TaskReport {
        task,
        focus: task_focus(task),
        metrics: total,
        units,
    }
}

pub fn evaluate_all(
    g: &UnifiedGraph,
    corpus: &AnnotationCorpus,
) -> Result<EvaluationReport, QueryError> {
    evaluate_with(g, corpus, &SynonymMap::default())
}

/// Scores all four tasks, micro-averaged over units: macro-events for
/// actions and timelines, events for dialogue, the whole story for
/// characters.
pub fn evaluate_with(
    g: &UnifiedGraph,
    corpus: &AnnotationCorpus,
    synonyms: &SynonymMap,
) -> Result<EvaluationReport, QueryError> {
    let macros = distinct(corpus.macro_events.iter().map(|m| &m.label));
    let events = distinct(corpus.events.iter().map(|e| &e.label));

    let mut action_units = Vec::new();
    let mut timeline_units = Vec::new();
    for &label in &macros {
        let predicted = actions_by_macro_event(g, label)?;
        let gold = gold_actions(corpus, label)?;
        action_units.push(UnitReport {
            unit: label.to_owned(),
            metrics: set_prf(
                predicted.items().iter().map(|v| synonyms.canonical(v)),
                gold.sequence().iter().map(|v| synonyms.canonical(v)),
            ),
        });

        let predicted = panel_timeline(g, label)?;
        let gold = gold_timeline(corpus, label)?;
        timeline_units.push(UnitReport {
            unit: label.to_owned(),
            metrics: ordering_prf(predicted.items(), gold.sequence()),
        });
    }

    let mut dialogue_units = Vec::new();
    for &label in &events {
        let predicted = dialogue_by_event(g, label)?;
        let gold = gold_dialogue(corpus, label)?;
        dialogue_units.push(UnitReport {
            unit: label.to_owned(),
            metrics: set_prf(
                predicted.items().iter().map(|u| normalize_utterance(u)),
                gold.sequence().iter().cloned(),
            ),
        });
    }

    let predicted = character_appearances(g)?;
    let predicted_pairs = predicted
        .map()
        .into_iter()
        .flatten()
        .flat_map(|(c, panels)| {
            let c = normalize_token(c);
            panels.iter().map(move |p| (c.clone(), p.clone()))
        });
    let gold = gold_characters(corpus);
    let character_units = vec![UnitReport {
        unit: corpus.story_id.clone(),
        metrics: set_prf(predicted_pairs, gold.pairs().iter().cloned()),
    }];

    Ok(EvaluationReport {
        tasks: vec![
            micro(Task::Actions, action_units),
            micro(Task::Dialogue, dialogue_units),
            micro(Task::Characters, character_units),
            micro(Task::Timeline, timeline_units),
        ],
    })
}

/// Every unit where a query answer differs from its gold set once both are
/// normalized, order included. Empty for any graph built from `corpus`.
pub fn disagreements(
    g: &UnifiedGraph,
    corpus: &AnnotationCorpus,
) -> Result<Vec<String>, QueryError> {
    let mut out = Vec::new();
    let mut check = |task: Task, unit: &str, predicted: Vec<String>, gold: &[String]| {
        if predicted != gold {
            out.push(format!(
                "{task} `{unit}`: predicted {predicted:?}, gold {gold:?}"
            ));
        }
    };

    for label in distinct(corpus.macro_events.iter().map(|m| &m.label)) {
        let predicted = actions_by_macro_event(g, label)?;
        let predicted = predicted
            .items()
            .iter()
            .map(|v| normalize_token(v))
            .collect();
        check(
            Task::Actions,
            label,
            predicted,
            gold_actions(corpus, label)?.sequence(),
        );

        let predicted = panel_timeline(g, label)?.items().to_vec();
        check(
            Task::Timeline,
            label,
            predicted,
            gold_timeline(corpus, label)?.sequence(),
        );
    }
    for label in distinct(corpus.events.iter().map(|e| &e.label)) {
        let predicted = dialogue_by_event(g, label)?;
        let predicted = predicted
            .items()
            .iter()
            .map(|u| normalize_utterance(u))
            .collect();
        check(
            Task::Dialogue,
            label,
            predicted,
            gold_dialogue(corpus, label)?.sequence(),
        );
    }

    let predicted: Vec<(String, String)> = character_appearances(g)?
        .map()
        .into_iter()
        .flatten()
        .flat_map(|(c, panels)| {
            let c = normalize_token(c);
            panels.iter().map(move |p| (c.clone(), p.clone()))
        })
        .collect();
    let gold = gold_characters(corpus);
    if predicted != gold.pairs() {
        out.push(format!(
            "characters: predicted {predicted:?}, gold {:?}",
            gold.pairs()
        ));
    }
    Ok(out)
}
