//! Experiments as networks of units.
//!
//! A [`Network`] holds the 0/1 adjacency matrix consumed by the linear network
//! effects model together with a role for every node. Ordinary experimental
//! units are [`NodeRole::Design`] nodes: they receive one free treatment and
//! yield one response. Blocking factors are encoded as extra
//! [`NodeRole::Block`] nodes which carry a fixed pseudo-treatment and are never
//! measured.
//!
//! Row `i` of the adjacency matrix lists the nodes whose treatments reach unit
//! `i`: `A[i][k] = 1` means the response of `i` picks up the network effect of
//! the treatment on `k`.

mod augment;
mod edgelist;

pub use augment::{augment_blocks, augment_crossover, augment_row_column};
pub use edgelist::{parse_edge_list, parse_network_file, write_network, Edge, EdgeList};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("line {line}, column {column}: {reason} (token `{token}`)")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        reason: String,
    },
    #[error("adjacency matrix must be {expected} entries, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("node {0} has a self-loop")]
    SelfLoop(usize),
    #[error("undirected network has an asymmetric entry at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("block node {0} fixes treatment {1}, which is already fixed by another block node")]
    DuplicateFixedTreatment(usize, usize),
    #[error("invalid layout: {0}")]
    Layout(String),
}

/// Role of a node in the experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeRole {
    /// Experimental unit: free treatment, measured.
    Design,
    /// Blocking pseudo-unit. Nodes of equal `class_id` are exchangeable.
    /// `fixed_treatment` is the 1-based pseudo-treatment index.
    Block { class_id: u32, fixed_treatment: usize },
}

impl NodeRole {
    pub fn is_design(&self) -> bool {
        matches!(self, NodeRole::Design)
    }
}

/// Immutable experiment network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    n: usize,
    directed: bool,
    adjacency: Vec<u8>,
    roles: Vec<NodeRole>,
    design_nodes: Vec<usize>,
    block_nodes: Vec<usize>,
    ordinal: Vec<Option<usize>>,
}

impl Network {
    /// Builds a network from a row-major `n x n` 0/1 adjacency matrix.
    pub fn new(n: usize, directed: bool, adjacency: Vec<u8>, roles: Vec<NodeRole>) -> Result<Self, NetworkError> {
        if adjacency.len() != n * n {
            return Err(NetworkError::Shape {
                expected: n * n,
                actual: adjacency.len(),
            });
        }
        if roles.len() != n {
            return Err(NetworkError::Shape {
                expected: n,
                actual: roles.len(),
            });
        }
        let adjacency: Vec<u8> = adjacency.into_iter().map(|a| u8::from(a != 0)).collect();
        for i in 0..n {
            if adjacency[i * n + i] != 0 {
                return Err(NetworkError::SelfLoop(i + 1));
            }
            if !directed {
                for j in (i + 1)..n {
                    if adjacency[i * n + j] != adjacency[j * n + i] {
                        return Err(NetworkError::Asymmetric(i + 1, j + 1));
                    }
                }
            }
        }
        let mut seen_fixed = Vec::new();
        for (i, role) in roles.iter().enumerate() {
            if let NodeRole::Block { fixed_treatment, .. } = role {
                if seen_fixed.contains(fixed_treatment) {
                    return Err(NetworkError::DuplicateFixedTreatment(i + 1, *fixed_treatment));
                }
                seen_fixed.push(*fixed_treatment);
            }
        }

        let mut design_nodes = Vec::new();
        let mut block_nodes = Vec::new();
        let mut ordinal = vec![None; n];
        for (i, role) in roles.iter().enumerate() {
            if role.is_design() {
                ordinal[i] = Some(design_nodes.len());
                design_nodes.push(i);
            } else {
                block_nodes.push(i);
            }
        }
        Ok(Network {
            n,
            directed,
            adjacency,
            roles,
            design_nodes,
            block_nodes,
            ordinal,
        })
    }

    /// Network on `n` design nodes built from 0-based arcs `(i, k)` meaning
    /// `A[i][k] = 1`. For undirected networks the mirror entry is set too.
    pub fn from_arcs(n: usize, directed: bool, arcs: &[(usize, usize)]) -> Result<Self, NetworkError> {
        let mut adjacency = vec![0u8; n * n];
        for &(i, k) in arcs {
            if i >= n || k >= n {
                return Err(NetworkError::Layout(format!(
                    "arc ({}, {}) outside {n} nodes",
                    i + 1,
                    k + 1
                )));
            }
            adjacency[i * n + k] = 1;
            if !directed {
                adjacency[k * n + i] = 1;
            }
        }
        Network::new(n, directed, adjacency, vec![NodeRole::Design; n])
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn adjacent(&self, i: usize, k: usize) -> bool {
        self.adjacency[i * self.n + k] != 0
    }

    pub fn adjacency(&self) -> &[u8] {
        &self.adjacency
    }

    pub fn role(&self, i: usize) -> NodeRole {
        self.roles[i]
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn is_measurable(&self, i: usize) -> bool {
        self.roles[i].is_design()
    }

    /// Design nodes in ascending node index; a design vector is indexed by
    /// position in this list.
    pub fn design_nodes(&self) -> &[usize] {
        &self.design_nodes
    }

    pub fn block_nodes(&self) -> &[usize] {
        &self.block_nodes
    }

    pub fn design_count(&self) -> usize {
        self.design_nodes.len()
    }

    /// Position of node `i` among the design nodes.
    pub fn design_ordinal(&self, i: usize) -> Option<usize> {
        self.ordinal[i]
    }

    /// Nodes `k` with `A[i][k] = 1`.
    pub fn in_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adjacency[i * self.n..(i + 1) * self.n];
        row.iter().enumerate().filter(|(_, &a)| a != 0).map(|(k, _)| k)
    }

    /// Nodes `k` with `A[k][i] = 1`.
    pub fn out_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&k| self.adjacency[k * self.n + i] != 0)
    }

    /// Number of edges: unordered pairs for undirected networks. For directed
    /// networks a reciprocal pair counts once and a one-way arc counts once.
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for k in (i + 1)..self.n {
                if self.adjacent(i, k) || self.adjacent(k, i) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Count of nonzero adjacency entries.
    pub fn arc_count(&self) -> usize {
        self.adjacency.iter().filter(|&&a| a != 0).count()
    }

    /// Pseudo-treatments fixed on block nodes, in block-node order.
    pub fn fixed_treatments(&self) -> Vec<usize> {
        self.block_nodes
            .iter()
            .filter_map(|&b| match self.roles[b] {
                NodeRole::Block { fixed_treatment, .. } => Some(fixed_treatment),
                NodeRole::Design => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loop() {
        let err = Network::new(2, false, vec![1, 0, 0, 0], vec![NodeRole::Design; 2]).unwrap_err();
        assert_eq!(err, NetworkError::SelfLoop(1));
    }

    #[test]
    fn rejects_asymmetric_undirected() {
        let err = Network::new(2, false, vec![0, 1, 0, 0], vec![NodeRole::Design; 2]).unwrap_err();
        assert_eq!(err, NetworkError::Asymmetric(1, 2));
        assert!(Network::new(2, true, vec![0, 1, 0, 0], vec![NodeRole::Design; 2]).is_ok());
    }

    #[test]
    fn rejects_repeated_fixed_treatment() {
        let block = NodeRole::Block {
            class_id: 0,
            fixed_treatment: 3,
        };
        let err = Network::new(3, false, vec![0; 9], vec![NodeRole::Design, block, block]).unwrap_err();
        assert_eq!(err, NetworkError::DuplicateFixedTreatment(3, 3));
    }

    #[test]
    fn neighbor_queries_follow_row_convention() {
        // 2 -> 1 : A[1][0] = 1 (0-based)
        let net = Network::from_arcs(3, true, &[(1, 0), (2, 1)]).unwrap();
        assert_eq!(net.in_neighbors(1).collect::<Vec<_>>(), vec![0]);
        assert_eq!(net.out_neighbors(1).collect::<Vec<_>>(), vec![2]);
        assert_eq!(net.edge_count(), 2);
        assert_eq!(net.design_ordinal(2), Some(2));
    }
}
