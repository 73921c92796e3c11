//! Edge-list text format.
//!
//! ```text
//! # comment
//! n=10 directed=0
//! 1-7, 2-7, 3-6, 4-5,
//! 6-9, 9-10
//! B1: class=0 fixed=3 units=1,2
//! ```
//!
//! Node ids are 1-based. `i-j` links both ways, `i->j` sets `A[i][j]` only.
//! Block lines describe the last `b` nodes, `B<k>` being node `n - b + k`.

use std::collections::BTreeSet;
use std::fmt;

use super::{Network, NetworkError, NodeRole};

/// One entry of an edge list, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub directed: bool,
}

impl Edge {
    fn pair(&self) -> (usize, usize) {
        (self.i.min(self.j), self.i.max(self.j))
    }

    /// Same edge with undirected endpoints ordered, for set comparisons.
    pub fn normalized(&self) -> Edge {
        if self.directed {
            *self
        } else {
            let (i, j) = self.pair();
            Edge { i, j, directed: false }
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.directed {
            write!(f, "{}->{}", self.i, self.j)
        } else {
            write!(f, "{}-{}", self.i, self.j)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub entries: Vec<Edge>,
}

impl EdgeList {
    /// Entries of `net` in ascending pair order. Reciprocal arcs become a
    /// single `i-j` entry.
    pub fn from_network(net: &Network) -> Self {
        let n = net.node_count();
        let mut entries = Vec::new();
        for i in 0..n {
            for k in (i + 1)..n {
                match (net.adjacent(i, k), net.adjacent(k, i)) {
                    (true, true) => entries.push(Edge {
                        i: i + 1,
                        j: k + 1,
                        directed: false,
                    }),
                    (true, false) => entries.push(Edge {
                        i: i + 1,
                        j: k + 1,
                        directed: true,
                    }),
                    (false, true) => entries.push(Edge {
                        i: k + 1,
                        j: i + 1,
                        directed: true,
                    }),
                    (false, false) => {}
                }
            }
        }
        EdgeList { entries }
    }

    pub fn normalized_set(&self) -> BTreeSet<Edge> {
        self.entries.iter().map(Edge::normalized).collect()
    }
}

impl fmt::Display for EdgeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, chunk) in self.entries.chunks(12).enumerate() {
            if idx > 0 {
                writeln!(f, ",")?;
            }
            let line: Vec<String> = chunk.iter().map(Edge::to_string).collect();
            write!(f, "{}", line.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, reason: impl Into<String>) -> NetworkError {
        NetworkError::Parse {
            line: self.line,
            column: self.column,
            token: self.text.to_string(),
            reason: reason.into(),
        }
    }
}

fn split_tokens(line: &str, line_no: usize) -> impl Iterator<Item = Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (pos, ch) in line.char_indices() {
        let sep = ch == ',' || ch.is_whitespace();
        match (sep, start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..pos],
                    line: line_no,
                    column: s + 1,
                });
                start = None;
            }
            (false, None) => start = Some(pos),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            line: line_no,
            column: s + 1,
        });
    }
    out.into_iter()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_edge_token(tok: &Token<'_>) -> Result<Edge, NetworkError> {
    let (lhs, rhs, directed) = if let Some((a, b)) = tok.text.split_once("->") {
        (a, b, true)
    } else if let Some((a, b)) = tok.text.split_once('-') {
        (a, b, false)
    } else {
        return Err(tok.error("expected `i-j` or `i->j`"));
    };
    let parse_id = |s: &str| -> Result<usize, NetworkError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(tok.error("node id is not a positive integer"));
        }
        let id: usize = s.parse().map_err(|_| tok.error("node id overflows"))?;
        if id == 0 {
            return Err(tok.error("node ids are 1-based"));
        }
        Ok(id)
    };
    let i = parse_id(lhs)?;
    let j = parse_id(rhs)?;
    if i == j {
        return Err(tok.error("self-loop"));
    }
    Ok(Edge { i, j, directed })
}

fn body_edges<'a>(
    tokens: impl Iterator<Item = Token<'a>>,
    n_nodes: usize,
    directed: bool,
    adjacency: &mut [u8],
) -> Result<(), NetworkError> {
    let mut pairs = BTreeSet::new();
    for tok in tokens {
        let edge = parse_edge_token(&tok)?;
        if edge.i > n_nodes || edge.j > n_nodes {
            return Err(tok.error(format!("node id exceeds n={n_nodes}")));
        }
        if edge.directed && !directed {
            return Err(tok.error("directed entry in an undirected network"));
        }
        if !pairs.insert(edge.pair()) {
            return Err(tok.error("duplicate edge (write reciprocal links as `i-j`)"));
        }
        let (i, j) = (edge.i - 1, edge.j - 1);
        adjacency[i * n_nodes + j] = 1;
        if !edge.directed {
            adjacency[j * n_nodes + i] = 1;
        }
    }
    Ok(())
}

/// Parses an edge-list body into a network whose nodes are all design nodes.
pub fn parse_edge_list(text: &str, n_nodes: usize, directed: bool) -> Result<Network, NetworkError> {
    let mut adjacency = vec![0u8; n_nodes * n_nodes];
    let tokens = text
        .lines()
        .enumerate()
        .flat_map(|(idx, line)| split_tokens(strip_comment(line), idx + 1));
    body_edges(tokens, n_nodes, directed, &mut adjacency)?;
    Network::new(n_nodes, directed, adjacency, vec![NodeRole::Design; n_nodes])
}

struct BlockLine {
    k: usize,
    class_id: u32,
    fixed: usize,
    units: BTreeSet<usize>,
    line: usize,
}

fn parse_header(line: &str, line_no: usize) -> Result<(Option<usize>, Option<bool>), NetworkError> {
    let mut n = None;
    let mut directed = None;
    for tok in split_tokens(line, line_no) {
        match tok.text.split_once('=') {
            Some(("n", v)) => n = Some(v.parse().map_err(|_| tok.error("bad node count"))?),
            Some(("directed", "0")) => directed = Some(false),
            Some(("directed", "1")) => directed = Some(true),
            _ => return Err(tok.error("expected `n=<count>` or `directed=<0|1>`")),
        }
    }
    Ok((n, directed))
}

fn parse_block_line(line: &str, line_no: usize) -> Result<BlockLine, NetworkError> {
    let err = |column: usize, token: &str, reason: &str| NetworkError::Parse {
        line: line_no,
        column,
        token: token.to_string(),
        reason: reason.to_string(),
    };
    let offset = line.len() - line.trim_start().len();
    let trimmed = line.trim();
    let (label, rest) = trimmed
        .split_once(':')
        .ok_or_else(|| err(offset + 1, trimmed, "block line needs `B<k>:`"))?;
    let k: usize = label[1..]
        .parse()
        .map_err(|_| err(offset + 1, label, "block label must be `B<k>`"))?;
    let mut class_id = None;
    let mut fixed = None;
    let mut units = None;
    let rest_col = offset + label.len() + 2;
    for field in rest.split_whitespace() {
        let column = rest_col + rest.find(field).unwrap_or(0);
        match field.split_once('=') {
            Some(("class", v)) => class_id = Some(v.parse().map_err(|_| err(column, field, "bad class id"))?),
            Some(("fixed", v)) => fixed = Some(v.parse().map_err(|_| err(column, field, "bad fixed treatment"))?),
            Some(("units", v)) => {
                let mut set = BTreeSet::new();
                for id in v.split(',').filter(|s| !s.is_empty()) {
                    set.insert(id.parse().map_err(|_| err(column, field, "bad unit id"))?);
                }
                units = Some(set);
            }
            _ => return Err(err(column, field, "expected class=, fixed= or units=")),
        }
    }
    match (class_id, fixed, units) {
        (Some(class_id), Some(fixed), Some(units)) => Ok(BlockLine {
            k,
            class_id,
            fixed,
            units,
            line: line_no,
        }),
        _ => Err(err(offset + 1, trimmed, "block line needs class=, fixed= and units=")),
    }
}

fn is_block_line(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with('B')
        && t[1..]
            .split_once(':')
            .is_some_and(|(num, _)| !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()))
}

/// Parses a full network file: optional header, edge body, block lines.
/// `n_nodes`/`directed` fill in for a missing header and must agree with it
/// when both are present.
pub fn parse_network_file(text: &str, n_nodes: Option<usize>, directed: Option<bool>) -> Result<Network, NetworkError> {
    let mut header: Option<(Option<usize>, Option<bool>)> = None;
    let mut body_lines = Vec::new();
    let mut blocks = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        if line.trim_start().starts_with("n=") {
            if seen_content {
                return Err(NetworkError::Parse {
                    line: line_no,
                    column: 1,
                    token: line.trim().to_string(),
                    reason: "header must be the first line".into(),
                });
            }
            header = Some(parse_header(line, line_no)?);
        } else if is_block_line(line) {
            blocks.push(parse_block_line(line, line_no)?);
        } else {
            body_lines.push((line_no, line));
        }
        seen_content = true;
    }

    let (header_n, header_directed) = header.unwrap_or((None, None));
    let n = match (header_n, n_nodes) {
        (Some(a), Some(b)) if a != b => {
            return Err(NetworkError::Layout(format!(
                "header says n={a} but n={b} was requested"
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(NetworkError::Layout("node count unknown: add `n=<count>`".into())),
    };
    let directed = match (header_directed, directed) {
        (Some(a), Some(b)) if a != b => {
            return Err(NetworkError::Layout(
                "header directedness disagrees with the requested one".into(),
            ))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => false,
    };

    let mut adjacency = vec![0u8; n * n];
    let tokens = body_lines
        .iter()
        .flat_map(|&(line_no, line)| split_tokens(line, line_no));
    body_edges(tokens, n, directed, &mut adjacency)?;

    let mut roles = vec![NodeRole::Design; n];
    let b = blocks.len();
    if b > n {
        return Err(NetworkError::Layout(format!("{b} block lines but only {n} nodes")));
    }
    let mut seen = vec![false; b];
    for block in &blocks {
        if block.k == 0 || block.k > b || seen[block.k - 1] {
            return Err(NetworkError::Parse {
                line: block.line,
                column: 1,
                token: format!("B{}", block.k),
                reason: format!("block labels must be B1..B{b}, each once"),
            });
        }
        seen[block.k - 1] = true;
        let node = n - b + block.k - 1;
        let linked: BTreeSet<usize> = (0..n)
            .filter(|&u| adjacency[node * n + u] != 0 || adjacency[u * n + node] != 0)
            .map(|u| u + 1)
            .collect();
        if linked != block.units {
            return Err(NetworkError::Parse {
                line: block.line,
                column: 1,
                token: format!("B{}", block.k),
                reason: format!("units list does not match the edges of node {}", node + 1),
            });
        }
        roles[node] = NodeRole::Block {
            class_id: block.class_id,
            fixed_treatment: block.fixed,
        };
    }
    Network::new(n, directed, adjacency, roles)
}

/// Serializes a network in the edge-list format, including block lines.
pub fn write_network(net: &Network) -> Result<String, NetworkError> {
    let n = net.node_count();
    let b = net.block_nodes().len();
    if net.block_nodes().iter().enumerate().any(|(k, &node)| node != n - b + k) {
        return Err(NetworkError::Layout(
            "block nodes must occupy the highest node ids to be written".into(),
        ));
    }
    let mut out = format!("n={} directed={}\n", n, u8::from(net.is_directed()));
    let edges = EdgeList::from_network(net);
    if !edges.entries.is_empty() {
        out.push_str(&edges.to_string());
        out.push('\n');
    }
    for (k, &node) in net.block_nodes().iter().enumerate() {
        if let NodeRole::Block {
            class_id,
            fixed_treatment,
        } = net.role(node)
        {
            let units: Vec<String> = (0..n)
                .filter(|&u| net.adjacent(node, u) || net.adjacent(u, node))
                .map(|u| (u + 1).to_string())
                .collect();
            out.push_str(&format!(
                "B{}: class={} fixed={} units={}\n",
                k + 1,
                class_id,
                fixed_treatment,
                units.join(",")
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_example_one() {
        let net = parse_edge_list("1-7, 2-7, 3-6, 4-5, 6-9, 9-10", 10, false).unwrap();
        assert_eq!(net.edge_count(), 6);
        assert!(net.adjacent(0, 6) && net.adjacent(6, 0));
        assert_eq!(net.in_neighbors(7).count(), 0, "node 8 is isolated");
    }

    #[test]
    fn bundled_example_six_direction() {
        let net = parse_edge_list("2->1, 3->2", 3, true).unwrap();
        let expected = [(1, 0), (2, 1)];
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(
                    net.adjacent(i, k),
                    expected.contains(&(i, k)),
                    "A[{}][{}]",
                    i + 1,
                    k + 1
                );
            }
        }
    }

    #[test]
    fn empty_body_gives_isolated_nodes() {
        let net = parse_edge_list("", 4, false).unwrap();
        assert_eq!(net.node_count(), 4);
        assert!(net.adjacency().iter().all(|&a| a == 0));
    }

    #[test]
    fn trailing_separator_is_fine() {
        let net = parse_edge_list("1-2, 2-3,\n", 3, false).unwrap();
        assert_eq!(net.edge_count(), 2);
    }

    fn parse_err(text: &str, n: usize, directed: bool) -> (usize, usize, String, String) {
        match parse_edge_list(text, n, directed).unwrap_err() {
            NetworkError::Parse {
                line,
                column,
                token,
                reason,
            } => (line, column, token, reason),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_tokens_report_position() {
        let (line, column, token, _) = parse_err("1-2,\n 3=4", 4, false);
        assert_eq!((line, column, token.as_str()), (2, 2, "3=4"));
        let (_, _, token, _) = parse_err("1-x", 4, false);
        assert_eq!(token, "1-x");
        let (_, _, _, reason) = parse_err("0-1", 4, false);
        assert!(reason.contains("1-based"));
    }

    #[test]
    fn rejects_out_of_range_self_loop_duplicates() {
        assert!(parse_err("1-5", 4, false).3.contains("exceeds"));
        assert!(parse_err("2-2", 4, false).3.contains("self-loop"));
        assert!(parse_err("1-2, 2-1", 4, false).3.contains("duplicate"));
        assert!(parse_err("1->2, 2->1", 4, true).3.contains("duplicate"));
        assert!(parse_err("1->2", 4, false).3.contains("directed"));
    }

    #[test]
    fn file_header_and_block_lines() {
        let text = "# two units in one block\nn=3 directed=0\n1-3, 2-3\nB1: class=0 fixed=3 units=1,2\n";
        let net = parse_network_file(text, None, None).unwrap();
        assert_eq!(net.design_count(), 2);
        assert_eq!(
            net.role(2),
            NodeRole::Block {
                class_id: 0,
                fixed_treatment: 3
            }
        );
        assert_eq!(
            write_network(&net).unwrap(),
            "n=3 directed=0\n1-3, 2-3\nB1: class=0 fixed=3 units=1,2\n"
        );
    }

    #[test]
    fn file_errors() {
        assert!(parse_network_file("1-2", None, None).is_err());
        assert!(parse_network_file("n=3\n1-2", Some(4), None).is_err());
        let bad_units = "n=3 directed=0\n1-3, 2-3\nB1: class=0 fixed=3 units=1\n";
        assert!(parse_network_file(bad_units, None, None).is_err());
        let late_header = "1-2\nn=3\n";
        assert!(parse_network_file(late_header, Some(3), None).is_err());
    }
}
