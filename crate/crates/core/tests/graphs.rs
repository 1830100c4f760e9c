mod common;

use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

use scitrend::graphs::{build_from_entities, degree_centrality, filter_by_contribution, CoOccurrenceGraph, EntityKind};

fn corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(prop::collection::vec((0u8..25).prop_map(|i| format!("author{i:02}")), 0..6), 0..80)
}

fn label_set(g: &CoOccurrenceGraph) -> BTreeSet<String> {
    g.nodes.iter().map(|n| n.label.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_matches_all_pairs_oracle(docs in corpus()) {
        let g = build_from_entities(EntityKind::Author, &docs);
        let (nodes, edges) = common::pair_oracle(&docs);
        prop_assert_eq!(g.node_weights(), nodes);
        prop_assert_eq!(g.edge_weights(), edges);
        for e in &g.edges {
            prop_assert!(e.a < e.b);
            let wa = g.node(e.a).unwrap().weight;
            let wb = g.node(e.b).unwrap().weight;
            prop_assert!(e.weight <= wa.min(wb));
        }
        let degrees: usize = degree_centrality(&g).iter().map(|c| c.degree).sum();
        prop_assert_eq!(degrees, 2 * g.edges.len());
    }

    #[test]
    fn document_order_does_not_matter(docs in corpus(), shift in 0usize..80) {
        let g = build_from_entities(EntityKind::Author, &docs);
        let mut permuted = docs.clone();
        if !permuted.is_empty() {
            let n = shift % permuted.len();
            permuted.rotate_left(n);
            permuted.reverse();
        }
        for d in &mut permuted {
            d.reverse();
        }
        let h = build_from_entities(EntityKind::Author, &permuted);
        prop_assert_eq!(g.node_weights(), h.node_weights());
        prop_assert_eq!(g.edge_weights(), h.edge_weights());
    }

    #[test]
    fn filtering_keeps_exactly_the_large_contributors(docs in corpus(), t1 in 0.0..0.5f64, t2 in 0.0..0.5f64) {
        prop_assume!(!docs.is_empty());
        let g = build_from_entities(EntityKind::Author, &docs);
        let total = docs.len();
        let (nodes, edges) = common::pair_oracle(&docs);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let f_lo = filter_by_contribution(&g, lo, total).unwrap();
        let f_hi = filter_by_contribution(&g, hi, total).unwrap();
        let expected: BTreeSet<String> = nodes
            .iter()
            .filter(|(_, &w)| w as f64 / total as f64 > lo)
            .map(|(l, _)| l.clone())
            .collect();
        prop_assert_eq!(label_set(&f_lo), expected.clone());
        prop_assert!(label_set(&f_hi).is_subset(&label_set(&f_lo)));
        let kept_edges: BTreeMap<(String, String), u64> = edges
            .into_iter()
            .filter(|((a, b), _)| expected.contains(a) && expected.contains(b))
            .collect();
        prop_assert_eq!(f_lo.edge_weights(), kept_edges);
    }
}

#[test]
fn one_percent_rule_on_a_hundred_documents() {
    // a share of exactly 1% is not "more than 1%"
    let mut docs: Vec<Vec<&str>> = vec![vec!["solo"]];
    docs.extend(std::iter::repeat_n(vec!["busy", "pair"], 2));
    docs.extend(std::iter::repeat_n(vec![], 97));
    let g = build_from_entities(EntityKind::Author, &docs);
    let f = filter_by_contribution(&g, 0.01, docs.len()).unwrap();
    assert_eq!(label_set(&f), ["busy".to_string(), "pair".to_string()].into());
    assert_eq!(f.edges.len(), 1);
}
