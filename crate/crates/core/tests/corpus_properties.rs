use std::collections::HashSet;

use nkg_core::evaluation::disagreements;
use nkg_core::fixtures::{generate, GenParams};
use nkg_core::ground_truth::gold_event_actions;
use nkg_core::{
    actions_by_macro_event, build_event_graph, build_panel_graph, build_temporal_graph,
    character_appearances, dialogue_by_event, evaluate_all, integrate, normalize_token,
    panel_timeline, parse_corpus, validate_corpus, AnnotationCorpus, NodeKind, RelationKind,
};
use proptest::prelude::*;

fn corpus_strategy() -> impl Strategy<Value = AnnotationCorpus> {
    (any::<u64>(), 1usize..=5, any::<bool>()).prop_map(|(seed, n_macro, shuffle)| {
        let mut params = GenParams::new(seed, n_macro);
        params.shuffle_panels = shuffle;
        generate(&params)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_corpora_are_valid(c in corpus_strategy()) {
        prop_assert!(validate_corpus(&c).is_empty());
        let sorted = c.panels_in_reading_order();
        prop_assert_eq!(sorted.len(), c.panels.len());
    }

    #[test]
    fn corpus_json_round_trips(c in corpus_strategy()) {
        let text = c.to_json();
        let back = parse_corpus(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn queries_match_gold(c in corpus_strategy()) {
        let g = integrate(&c).unwrap();
        let diff = disagreements(&g, &c).unwrap();
        prop_assert!(diff.is_empty(), "{:?}", diff);
    }

    #[test]
    fn unified_structure_holds(c in corpus_strategy()) {
        let g = integrate(&c).unwrap();
        prop_assert!(g.structural_violations().is_empty(), "{:?}", g.structural_violations());
        prop_assert!(build_temporal_graph(&c).unwrap().is_acyclic(&[RelationKind::Precedes]));
    }

    #[test]
    fn tier_union_node_count(c in corpus_strategy()) {
        let g = integrate(&c).unwrap();
        let panel_tier: usize = c.panels.iter().map(|p| build_panel_graph(p).node_count()).sum();
        let temporal = build_temporal_graph(&c).unwrap().node_count();
        let event = build_event_graph(&c).node_count();
        let characters: HashSet<String> = c
            .panels
            .iter()
            .flat_map(|p| p.characters.iter().map(|ch| normalize_token(ch)))
            .collect();
        // panels are shared by the panel and temporal tiers, segments by the
        // temporal and event tiers; characters only exist in the union
        let expected = panel_tier + temporal + event - c.panels.len() - c.segments.len() + characters.len();
        prop_assert_eq!(g.graph().node_count(), expected);
        for kind in [NodeKind::Panel, NodeKind::EventSegment, NodeKind::Event, NodeKind::MacroEvent] {
            let want = match kind {
                NodeKind::Panel => c.panels.len(),
                NodeKind::EventSegment => c.segments.len(),
                NodeKind::Event => c.events.len(),
                _ => c.macro_events.len(),
            };
            prop_assert_eq!(g.graph().nodes_of_kind(kind).count(), want);
        }
    }

    #[test]
    fn integrate_is_deterministic(c in corpus_strategy()) {
        let a = integrate(&c).unwrap().graph().to_json();
        let b = integrate(&c.clone()).unwrap().graph().to_json();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn macro_actions_are_union_of_event_actions(c in corpus_strategy()) {
        let g = integrate(&c).unwrap();
        for m in &c.macro_events {
            let mut union: Vec<String> = Vec::new();
            // events beneath m, ordered by their first panel
            let mut events: Vec<(u32, &str)> = c
                .events
                .iter()
                .filter(|e| e.macro_event_id == m.id)
                .filter_map(|e| {
                    c.panels
                        .iter()
                        .filter(|p| c.segment(&p.segment_id).is_some_and(|s| s.event_id == e.id))
                        .map(|p| p.reading_order)
                        .min()
                        .map(|o| (o, e.label.as_str()))
                })
                .collect();
            events.sort();
            for (_, label) in events {
                for v in gold_event_actions(&c, label).unwrap().sequence() {
                    if !union.contains(v) {
                        union.push(v.clone());
                    }
                }
            }
            let got: Vec<String> = actions_by_macro_event(&g, &m.label)
                .unwrap()
                .items()
                .iter()
                .map(|v| normalize_token(v))
                .collect();
            prop_assert_eq!(got, union);
        }
    }

    #[test]
    fn timelines_strictly_increase(c in corpus_strategy()) {
        let g = integrate(&c).unwrap();
        for m in &c.macro_events {
            let items = panel_timeline(&g, &m.label).unwrap().items().to_vec();
            let orders: Vec<u32> = items
                .iter()
                .map(|id| c.panels.iter().find(|p| &p.panel_id == id).unwrap().reading_order)
                .collect();
            prop_assert!(orders.windows(2).all(|w| w[0] < w[1]));
            let expected = c
                .panels
                .iter()
                .filter(|p| {
                    let e = c.event(&c.segment(&p.segment_id).unwrap().event_id).unwrap();
                    e.macro_event_id == m.id
                })
                .count();
            prop_assert_eq!(items.len(), expected);
        }
    }

    #[test]
    fn queries_do_not_mutate(c in corpus_strategy()) {
        let g = integrate(&c).unwrap();
        let before = g.graph().to_json();
        for m in &c.macro_events {
            let _ = actions_by_macro_event(&g, &m.label).unwrap();
            let _ = panel_timeline(&g, &m.label).unwrap();
        }
        for e in &c.events {
            let _ = dialogue_by_event(&g, &e.label).unwrap();
        }
        let _ = character_appearances(&g).unwrap();
        let _ = evaluate_all(&g, &c).unwrap();
        prop_assert_eq!(g.graph().to_json(), before);
    }
}

#[test]
fn some_seed_repeats_a_verb_across_panels() {
    let hit = (0..100u64).any(|seed| {
        let c = generate(&GenParams::new(seed, 1 + (seed as usize % 5)));
        let mut seen = HashSet::new();
        c.panels.iter().any(|p| {
            let verbs: HashSet<String> =
                p.actions.iter().map(|a| normalize_token(&a.verb)).collect();
            verbs.into_iter().any(|v| !seen.insert(v))
        })
    });
    assert!(hit);
}
