//! Classical blocked layouts rewritten as networks with block nodes.
//!
//! Every constructor places the design nodes first and the block nodes last.
//! Block node `k` (0-based, in block-node order) carries the fixed
//! pseudo-treatment `m + 1 + k`.

use std::collections::BTreeMap;

use super::{Network, NetworkError, NodeRole};

struct LayoutBuilder {
    units: usize,
    blocks: Vec<(u32, Vec<usize>)>,
    arcs: Vec<(usize, usize)>,
}

impl LayoutBuilder {
    fn new(units: usize) -> Self {
        LayoutBuilder {
            units,
            blocks: Vec::new(),
            arcs: Vec::new(),
        }
    }

    fn block(&mut self, class_id: u32, members: Vec<usize>) {
        self.blocks.push((class_id, members));
    }

    fn finish(self, m: usize, directed: bool) -> Result<Network, NetworkError> {
        if m < 2 {
            return Err(NetworkError::Layout(format!("need at least 2 treatments, got {m}")));
        }
        let n = self.units + self.blocks.len();
        let mut adjacency = vec![0u8; n * n];
        let mut roles = vec![NodeRole::Design; n];
        for (k, (class_id, members)) in self.blocks.iter().enumerate() {
            let node = self.units + k;
            roles[node] = NodeRole::Block {
                class_id: *class_id,
                fixed_treatment: m + 1 + k,
            };
            for &u in members {
                adjacency[u * n + node] = 1;
                adjacency[node * n + u] = 1;
            }
        }
        for &(i, k) in &self.arcs {
            adjacency[i * n + k] = 1;
        }
        Network::new(n, directed, adjacency, roles)
    }
}

/// One-way blocked layout: units of block `k` are numbered consecutively.
/// Blocks of equal size share a role class.
pub fn augment_blocks(units_per_block: &[usize], m: usize) -> Result<Network, NetworkError> {
    if units_per_block.is_empty() {
        return Err(NetworkError::Layout("no blocks given".into()));
    }
    if units_per_block.contains(&0) {
        return Err(NetworkError::Layout("every block needs at least one unit".into()));
    }
    let total: usize = units_per_block.iter().sum();
    let mut classes: BTreeMap<usize, u32> = BTreeMap::new();
    let mut builder = LayoutBuilder::new(total);
    let mut next_unit = 0;
    for &size in units_per_block {
        let next_class = classes.len() as u32;
        let class_id = *classes.entry(size).or_insert(next_class);
        builder.block(class_id, (next_unit..next_unit + size).collect());
        next_unit += size;
    }
    builder.finish(m, false)
}

/// Row-column layout; unit `(r, c)` is node `r * cols + c`. Row nodes come
/// before column nodes. For square layouts rows and columns share a class,
/// which admits the transpose symmetry.
pub fn augment_row_column(rows: usize, cols: usize, m: usize) -> Result<Network, NetworkError> {
    if rows < 1 || cols < 1 {
        return Err(NetworkError::Layout(format!(
            "row-column layout {rows}x{cols} is empty"
        )));
    }
    let mut builder = LayoutBuilder::new(rows * cols);
    for r in 0..rows {
        builder.block(0, (0..cols).map(|c| r * cols + c).collect());
    }
    let col_class = if rows == cols { 0 } else { 1 };
    for c in 0..cols {
        builder.block(col_class, (0..rows).map(|r| r * cols + c).collect());
    }
    builder.finish(m, false)
}

/// Crossover layout; unit `(s, p)` is node `s * periods + p`. Carryover is
/// the arc `A[(s, p)][(s, p - 1)] = 1`: the earlier period's treatment
/// reaches the later response.
pub fn augment_crossover(
    subjects: usize,
    periods: usize,
    m: usize,
    period_blocks: bool,
) -> Result<Network, NetworkError> {
    if subjects < 1 {
        return Err(NetworkError::Layout("crossover needs at least one subject".into()));
    }
    if periods < 2 {
        return Err(NetworkError::Layout("crossover needs at least two periods".into()));
    }
    let unit = |s: usize, p: usize| s * periods + p;
    let mut builder = LayoutBuilder::new(subjects * periods);
    for s in 0..subjects {
        builder.block(0, (0..periods).map(|p| unit(s, p)).collect());
    }
    if period_blocks {
        for p in 0..periods {
            builder.block(1, (0..subjects).map(|s| unit(s, p)).collect());
        }
    }
    for s in 0..subjects {
        for p in 1..periods {
            builder.arcs.push((unit(s, p), unit(s, p - 1)));
        }
    }
    builder.finish(m, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(net: &Network) -> Vec<usize> {
        net.fixed_treatments()
    }

    #[test]
    fn four_blocks_of_four() {
        let net = augment_blocks(&[4, 4, 4, 4], 2).unwrap();
        assert_eq!(net.node_count(), 20);
        assert_eq!(net.edge_count(), 16);
        assert_eq!(fixed(&net), vec![3, 4, 5, 6]);
        assert_eq!(net.design_count(), 16);
        // unit 14 sits in block 4
        assert!(net.adjacent(13, 19));
    }

    #[test]
    fn block_classes_follow_sizes() {
        let net = augment_blocks(&[2, 3, 2], 2).unwrap();
        let classes: Vec<u32> = net
            .block_nodes()
            .iter()
            .map(|&b| match net.role(b) {
                NodeRole::Block { class_id, .. } => class_id,
                NodeRole::Design => unreachable!(),
            })
            .collect();
        assert_eq!(classes, vec![0, 1, 0]);
    }

    #[test]
    fn block_edge_cases() {
        let net = augment_blocks(&[1], 2).unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (2, 1));
        assert!(augment_blocks(&[], 2).is_err());
        assert!(augment_blocks(&[3, 0], 2).is_err());
        assert!(augment_blocks(&[3], 1).is_err());
        let net = augment_blocks(&[3, 3, 3], 3).unwrap();
        assert_eq!((net.node_count(), net.edge_count()), (12, 9));
    }

    #[test]
    fn row_column_counts() {
        for (r, c, nodes, edges) in [(3, 3, 15, 18), (4, 4, 24, 32), (1, 1, 3, 2), (2, 5, 17, 20)] {
            let net = augment_row_column(r, c, 3).unwrap();
            assert_eq!((net.node_count(), net.edge_count()), (nodes, edges), "{r}x{c}");
        }
        let net = augment_row_column(3, 3, 3).unwrap();
        assert_eq!(fixed(&net), (4..=9).collect::<Vec<_>>());
        // unit 5 = (row 2, col 2): row node 11, column node 14 (1-based)
        assert!(net.adjacent(4, 10) && net.adjacent(4, 13));
        assert!(augment_row_column(0, 3, 3).is_err());
    }

    #[test]
    fn crossover_layouts() {
        let net = augment_crossover(3, 3, 3, true).unwrap();
        assert_eq!(net.node_count(), 15);
        assert_eq!(net.design_count(), 9);
        let carry = (0..9)
            .flat_map(|i| (0..9).map(move |k| (i, k)))
            .filter(|&(i, k)| net.adjacent(i, k))
            .count();
        assert_eq!(carry, 6);

        let net = augment_crossover(1, 2, 2, false).unwrap();
        assert_eq!(net.node_count(), 3);
        assert!(net.adjacent(1, 0));
        assert!(!net.adjacent(0, 1));
        assert!(augment_crossover(2, 1, 2, false).is_err());
    }

    #[test]
    fn crossover_carryover_matches_chain_convention() {
        // subject-major 5x3: later period -> earlier period, as in `2->1, 3->2`
        let net = augment_crossover(5, 3, 2, false).unwrap();
        let mut expected = Vec::new();
        for s in 0..5 {
            let base = 3 * s + 1;
            expected.push((base + 1, base));
            expected.push((base + 2, base + 1));
        }
        let mut actual = Vec::new();
        for i in 0..15 {
            for k in 0..15 {
                if net.adjacent(i, k) {
                    actual.push((i + 1, k + 1));
                }
            }
        }
        assert_eq!(actual, expected);
    }
}
