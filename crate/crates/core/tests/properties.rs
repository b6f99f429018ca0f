use proptest::prelude::*;
use teag_core::graph::{
    assign_canonical_ports, validate_entity_attribute, validate_ports, GraphBuilder, TypeKind, TypedMultigraph,
};
use teag_core::mpnn::{forward, init_weights, EngineConfig, FeatureSpace};
use teag_core::oracles::{closed_walk, cyc, dup_r, overlap, soft_overlap, SimilarityTable};
use teag_core::refine::{compare, refine, Probe};
use teag_core::AdaptationSet;

/// (entity types, attribute types, edge list as (entity, attribute, edge type)).
#[derive(Debug, Clone)]
struct TeagSpec {
    entities: Vec<usize>,
    attributes: Vec<usize>,
    edges: Vec<(usize, usize, usize)>,
}

fn teag_spec() -> impl Strategy<Value = TeagSpec> {
    (1usize..6, 1usize..6).prop_flat_map(|(ne, na)| {
        (
            prop::collection::vec(0usize..2, ne),
            prop::collection::vec(0usize..2, na),
            prop::collection::vec((0..ne, 0..na, 0usize..2), 0..14),
        )
            .prop_map(|(entities, attributes, edges)| TeagSpec { entities, attributes, edges })
    })
}

fn build_teag(spec: &TeagSpec, simple: bool) -> TypedMultigraph {
    let mut b = GraphBuilder::new();
    let et: Vec<_> = (0..2).map(|i| b.node_type(&format!("E{i}"), TypeKind::Entity).unwrap()).collect();
    let at: Vec<_> = (0..2).map(|i| b.node_type(&format!("A{i}"), TypeKind::Attribute).unwrap()).collect();
    let tt: Vec<_> = (0..2).map(|i| b.edge_type(&format!("t{i}")).unwrap()).collect();
    for &t in &spec.entities {
        b.add_node(et[t]).unwrap();
    }
    for &t in &spec.attributes {
        b.add_node(at[t]).unwrap();
    }
    let ne = spec.entities.len();
    let mut seen = std::collections::BTreeSet::new();
    for &(u, a, t) in &spec.edges {
        if simple && !seen.insert((u, a, t)) {
            continue;
        }
        b.add_edge(u, ne + a, tt[t]).unwrap();
    }
    b.build().unwrap()
}

/// Arbitrary typed directed multigraph with loops allowed.
fn digraph() -> impl Strategy<Value = TypedMultigraph> {
    (1usize..7).prop_flat_map(|n| {
        (prop::collection::vec(0usize..2, n), prop::collection::vec((0..n, 0..n, 0usize..2), 0..16)).prop_map(
            |(types, edges)| {
                let mut b = GraphBuilder::new();
                let nt: Vec<_> = (0..2).map(|i| b.node_type(&format!("s{i}"), TypeKind::Plain).unwrap()).collect();
                let tt: Vec<_> = (0..2).map(|i| b.edge_type(&format!("t{i}")).unwrap()).collect();
                for t in types {
                    b.add_node(nt[t]).unwrap();
                }
                for (s, d, t) in edges {
                    b.add_edge(s, d, tt[t]).unwrap();
                }
                b.build().unwrap()
            },
        )
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn adaptation() -> impl Strategy<Value = AdaptationSet> {
    (0usize..16).prop_map(|i| AdaptationSet::all()[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_ports_are_valid(g in digraph()) {
        let ports = assign_canonical_ports(&g);
        prop_assert!(validate_ports(&g, &ports).unwrap().is_valid());
    }

    #[test]
    fn relabel_preserves_teag_structure((spec, perm) in teag_spec().prop_flat_map(|s| {
        let n = s.entities.len() + s.attributes.len();
        (Just(s), permutation(n))
    })) {
        let g = build_teag(&spec, false);
        let h = g.relabel(&perm).unwrap();
        let (vg, vh) = (g.view(), h.view());
        let (rg, rh) = (validate_entity_attribute(&g, &vg), validate_entity_attribute(&h, &vh));
        prop_assert_eq!(rg.is_valid(), rh.is_valid());
        prop_assert_eq!(rg.is_simple(), rh.is_simple());
        for u in vg.entities() {
            prop_assert_eq!(vg.typed_neighborhood(u).unwrap().len(), vh.typed_neighborhood(perm[u]).unwrap().len());
        }
    }

    #[test]
    fn simple_neighborhood_size_is_out_degree(spec in teag_spec()) {
        let g = build_teag(&spec, true);
        let view = g.view();
        prop_assert!(view.is_simple());
        for u in view.entities() {
            prop_assert_eq!(view.typed_neighborhood(u).unwrap().len(), g.out_degree(u));
        }
    }

    #[test]
    fn overlap_is_symmetric(spec in teag_spec()) {
        let g = build_teag(&spec, false);
        let view = g.view();
        let entities: Vec<_> = view.entities().collect();
        for &u in &entities {
            for &v in &entities {
                prop_assert_eq!(overlap(&view, u, v).unwrap(), overlap(&view, v, u).unwrap());
            }
        }
    }

    #[test]
    fn dup_is_antitone_in_r(spec in teag_spec()) {
        let g = build_teag(&spec, false);
        let view = g.view();
        for u in view.entities() {
            for r in 1..5 {
                if dup_r(&view, u, r + 1).unwrap() {
                    prop_assert!(dup_r(&view, u, r).unwrap());
                }
            }
        }
    }

    #[test]
    fn soft_identity_matches_overlap(spec in teag_spec()) {
        let g = build_teag(&spec, false);
        let view = g.view();
        let sims = SimilarityTable::identity();
        let entities: Vec<_> = view.entities().collect();
        for &u in &entities {
            for &v in &entities {
                prop_assert_eq!(soft_overlap(&view, u, v, &sims).unwrap(), overlap(&view, u, v).unwrap() as f64);
            }
        }
    }

    #[test]
    fn simple_cycle_implies_closed_walk(g in digraph(), len in 1usize..7) {
        for v in g.nodes() {
            if cyc(&g, v, len).unwrap() {
                prop_assert!(closed_walk(&g, v, len).unwrap());
            }
        }
    }

    #[test]
    fn refinement_never_coarsens(g in digraph(), config in adaptation()) {
        let ports = assign_canonical_ports(&g);
        let ego = config.ego_ids.then_some(0);
        let colors = refine(&g, Some(&ports), config, 5, ego).unwrap();
        let sizes = colors.partition_sizes();
        prop_assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn larger_adaptation_sets_distinguish_more(
        g1 in digraph(),
        g2 in digraph(),
        c1 in adaptation(),
        c2 in adaptation(),
        depth in 0usize..4,
    ) {
        let (small, large) = if c1.is_subset_of(&c2) { (c1, c2) } else if c2.is_subset_of(&c1) { (c2, c1) } else { return Ok(()) };
        let (p1, p2) = (assign_canonical_ports(&g1), assign_canonical_ports(&g2));
        let a = Probe { graph: &g1, ports: Some(&p1), node: 0 };
        let b = Probe { graph: &g2, ports: Some(&p2), node: 0 };
        let weak = compare(a, b, small, depth).unwrap();
        let strong = compare(a, b, large, depth).unwrap();
        if !weak.indistinguishable_at(depth) {
            prop_assert!(!strong.indistinguishable_at(depth));
        }
    }

    #[test]
    fn mpnn_is_permutation_equivariant(
        (g, perm) in digraph().prop_flat_map(|g| { let n = g.node_count(); (Just(g), permutation(n)) }),
        config in adaptation(),
        seed in 0u64..50,
    ) {
        let h = g.relabel(&perm).unwrap();
        let ports = assign_canonical_ports(&g);
        let features = FeatureSpace::joint(&[&g, &h]);
        let weights = init_weights(&EngineConfig::new(3, config, seed), &features).unwrap();
        let ego = config.ego_ids.then_some(0);
        let tg = forward(&g, Some(&ports), &weights, ego).unwrap();
        let th = forward(&h, Some(&ports), &weights, ego.map(|v| perm[v])).unwrap();
        for v in g.nodes() {
            prop_assert_eq!(&tg.last()[v], &th.last()[perm[v]]);
        }
    }
}
