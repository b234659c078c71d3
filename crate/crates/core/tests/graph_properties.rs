use std::collections::HashSet;

use nkg_core::graph::Attrs;
use nkg_core::{Direction, NarrativeGraph, NodeKind, RelationKind, Tier};
use proptest::prelude::*;

const RELS: [RelationKind; 4] = [
    RelationKind::Precedes,
    RelationKind::Follows,
    RelationKind::HasAction,
    RelationKind::SubeventOf,
];

fn build(n: usize, edges: &[(usize, usize, usize)]) -> NarrativeGraph {
    let mut g = NarrativeGraph::new(Tier::Unified);
    for i in 0..n {
        g.add_node(format!("n{i}"), NodeKind::Panel, Attrs::new())
            .unwrap();
    }
    for &(s, r, d) in edges {
        g.add_edge(
            &format!("n{}", s % n),
            RELS[r % RELS.len()],
            &format!("n{}", d % n),
        )
        .unwrap();
    }
    g
}

/// Cycle search by explicit DFS from every node over the filtered edges.
fn has_cycle_brute_force(g: &NarrativeGraph, rels: &[RelationKind]) -> bool {
    let ids: Vec<&str> = g.nodes().map(|(id, _)| id).collect();
    let succ = |id: &str| -> Vec<String> {
        g.edges()
            .iter()
            .filter(|e| e.src == id && rels.contains(&e.rel))
            .map(|e| e.dst.clone())
            .collect()
    };
    for start in &ids {
        let mut stack: Vec<String> = succ(start);
        let mut seen: HashSet<String> = HashSet::new();
        while let Some(cur) = stack.pop() {
            if cur == *start {
                return true;
            }
            if seen.insert(cur.clone()) {
                stack.extend(succ(&cur));
            }
        }
    }
    false
}

fn edge_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, usize)>)> {
    (1usize..=12).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..RELS.len(), 0..n), 0..30),
        )
    })
}

proptest! {
    #[test]
    fn neighbor_directions_agree((n, edges) in edge_strategy()) {
        let g = build(n, &edges);
        for (a, _) in g.nodes() {
            for rel in RelationKind::ALL {
                for b in g.neighbors(a, *rel, Direction::Out).unwrap() {
                    prop_assert!(g.neighbors(b, *rel, Direction::In).unwrap().contains(&a));
                }
                for b in g.neighbors(a, *rel, Direction::In).unwrap() {
                    prop_assert!(g.neighbors(b, *rel, Direction::Out).unwrap().contains(&a));
                }
            }
        }
    }

    #[test]
    fn precedes_follows_closure((n, edges) in edge_strategy()) {
        let g = build(n, &edges);
        let mut keys = HashSet::new();
        for e in g.edges() {
            prop_assert!(keys.insert((e.src.clone(), e.rel, e.dst.clone())), "duplicate edge");
            if let Some(inv) = e.rel.inverse() {
                prop_assert!(g.has_edge(&e.dst, inv, &e.src));
            }
        }
    }

    #[test]
    fn acyclicity_matches_dfs((n, edges) in edge_strategy()) {
        let g = build(n, &edges);
        for rels in [
            vec![RelationKind::Precedes],
            vec![RelationKind::HasAction],
            vec![RelationKind::HasAction, RelationKind::SubeventOf],
            vec![],
        ] {
            prop_assert_eq!(g.is_acyclic(&rels), !has_cycle_brute_force(&g, &rels));
        }
    }

    #[test]
    fn json_round_trip((n, edges) in edge_strategy()) {
        let g = build(n, &edges);
        let text = g.to_json();
        let back = NarrativeGraph::from_json(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_json(), text);
    }
}
