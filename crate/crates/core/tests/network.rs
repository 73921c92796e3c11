use netdoe::fixtures::{self, NETWORK_FIXTURES};
use netdoe::{
    augment_blocks, augment_crossover, augment_row_column, parse_edge_list, parse_network_file, write_network,
    EdgeList, Network, NetworkError, NodeRole,
};
use proptest::prelude::*;

#[test]
fn every_fixture_parses() {
    let sizes: Vec<(usize, bool)> = (1..=6)
        .map(|k| {
            let net = fixtures::example(k);
            (net.design_count(), net.is_directed())
        })
        .collect();
    assert_eq!(sizes.len(), NETWORK_FIXTURES.len());
    assert!(sizes[..5].iter().all(|&(_, directed)| !directed));
    assert!(sizes[5].1, "crossover fixture is directed");
    for (name, text) in NETWORK_FIXTURES {
        let net = parse_network_file(text, None, None).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(net.design_count() > 0, "{name}");
    }
}

#[test]
fn first_example_shape() {
    let net = parse_edge_list("1-7, 2-7, 3-6, 4-5, 6-9, 9-10", 10, false).unwrap();
    assert_eq!(net.node_count(), 10);
    assert_eq!(net.edge_count(), 6);
    assert_eq!(net.in_neighbors(7).count(), 0, "node 8 is isolated");
    assert_eq!(net, fixtures::example(1));
}

#[test]
fn directed_chain_sets_later_rows() {
    let net = parse_edge_list("2->1, 3->2", 3, true).unwrap();
    assert!(net.adjacent(1, 0) && net.adjacent(2, 1));
    assert!(!net.adjacent(0, 1) && !net.adjacent(1, 2));
    assert_eq!(net.arc_count(), 2);
}

#[test]
fn empty_list_gives_isolated_nodes() {
    let net = parse_edge_list("", 4, false).unwrap();
    assert_eq!((net.node_count(), net.edge_count(), net.design_count()), (4, 0, 4));
}

#[test]
fn parse_errors_point_at_the_token() {
    let err = parse_edge_list("1-2, 3-x", 4, false).unwrap_err();
    match err {
        NetworkError::Parse {
            line, column, token, ..
        } => {
            assert_eq!((line, column), (1, 6));
            assert_eq!(token, "3-x");
        }
        other => panic!("unexpected error {other:?}"),
    }
    let err = parse_edge_list("1-2,\n2-9", 4, false).unwrap_err();
    assert!(matches!(err, NetworkError::Parse { line: 2, .. }), "{err:?}");
    assert!(parse_edge_list("1-1", 2, false).is_err());
    assert!(parse_edge_list("1-2, 2-1", 2, false).is_err());
}

#[test]
fn four_blocks_of_four() {
    let net = augment_blocks(&[4, 4, 4, 4], 2).unwrap();
    assert_eq!((net.node_count(), net.edge_count()), (20, 16));
    assert_eq!(net.fixed_treatments(), vec![3, 4, 5, 6]);
}

#[test]
fn row_column_shapes() {
    for (r, c, nodes, edges) in [(3, 3, 15, 18), (4, 4, 24, 32), (1, 1, 3, 2)] {
        let net = augment_row_column(r, c, 3).unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (nodes, edges), "{r}x{c}");
    }
}

#[test]
fn crossover_carryover_arcs() {
    let net = augment_crossover(3, 3, 3, true).unwrap();
    let design = net.design_nodes();
    let carry = design
        .iter()
        .flat_map(|&i| design.iter().map(move |&k| (i, k)))
        .filter(|&(i, k)| net.adjacent(i, k))
        .count();
    assert_eq!(carry, 6);

    let net = augment_crossover(1, 2, 2, false).unwrap();
    assert!(net.adjacent(1, 0));
    assert!(!net.adjacent(0, 1));
}

#[test]
fn block_networks_survive_a_round_trip() {
    for net in [
        augment_blocks(&[2, 3, 2], 3).unwrap(),
        augment_row_column(2, 3, 2).unwrap(),
        augment_crossover(2, 3, 2, true).unwrap(),
    ] {
        let text = write_network(&net).unwrap();
        let back = parse_network_file(&text, None, None).unwrap();
        assert_eq!(back, net, "{text}");
    }
}

fn block_classes(net: &Network) -> Vec<u32> {
    net.block_nodes()
        .iter()
        .map(|&b| match net.role(b) {
            NodeRole::Block { class_id, .. } => class_id,
            NodeRole::Design => unreachable!(),
        })
        .collect()
}

#[test]
fn square_row_column_shares_a_class() {
    assert_eq!(block_classes(&augment_row_column(3, 3, 3).unwrap()), vec![0; 6]);
    assert_eq!(
        block_classes(&augment_row_column(2, 3, 3).unwrap()),
        vec![0, 0, 1, 1, 1]
    );
}

fn arcs(max_n: usize) -> impl Strategy<Value = (usize, bool, Vec<(usize, usize)>)> {
    (1..=max_n, any::<bool>()).prop_flat_map(|(n, directed)| {
        let pairs = prop::collection::vec((0..n, 0..n), 0..3 * n);
        (Just(n), Just(directed), pairs)
    })
}

proptest! {
    #[test]
    fn edge_list_round_trip((n, directed, pairs) in arcs(12)) {
        let pairs: Vec<(usize, usize)> = pairs.into_iter().filter(|(i, k)| i != k).collect();
        let net = Network::from_arcs(n, directed, &pairs).unwrap();
        let text = EdgeList::from_network(&net).to_string();
        let back = parse_edge_list(&text, n, directed).unwrap();
        prop_assert_eq!(&back, &net);
        let written = write_network(&net).unwrap();
        prop_assert_eq!(parse_network_file(&written, None, None).unwrap(), net);
    }

    #[test]
    fn block_edge_counts(sizes in prop::collection::vec(1usize..6, 1..6), m in 2usize..5) {
        let net = augment_blocks(&sizes, m).unwrap();
        let units: usize = sizes.iter().sum();
        prop_assert_eq!(net.node_count(), units + sizes.len());
        prop_assert_eq!(net.edge_count(), units);
        prop_assert_eq!(net.fixed_treatments(), (m + 1..=m + sizes.len()).collect::<Vec<_>>());
    }

    #[test]
    fn row_column_edge_counts(r in 1usize..6, c in 1usize..6) {
        let net = augment_row_column(r, c, 2).unwrap();
        prop_assert_eq!(net.node_count(), r * c + r + c);
        prop_assert_eq!(net.edge_count(), 2 * r * c);
        for &u in net.design_nodes() {
            prop_assert_eq!(net.in_neighbors(u).count(), 2);
        }
    }

    #[test]
    fn crossover_edge_counts(s in 1usize..5, p in 2usize..5, period_blocks in any::<bool>()) {
        let net = augment_crossover(s, p, 3, period_blocks).unwrap();
        let blocks = s + if period_blocks { p } else { 0 };
        let memberships = s * p * if period_blocks { 2 } else { 1 };
        prop_assert_eq!(net.node_count(), s * p + blocks);
        prop_assert_eq!(net.arc_count(), 2 * memberships + s * (p - 1));
    }
}
