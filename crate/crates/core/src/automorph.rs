//! Role- and direction-preserving automorphisms of a network, and the
//! lexicographic canonicity test used to skip redundant designs.
//!
//! The group is enumerated explicitly with a backtracking partial-mapping
//! search: nodes are first split into classes by iterated color refinement on
//! (role, in-neighbor colors, out-neighbor colors), then mapped one at a time
//! in connectivity order, each extension checked against every node already
//! mapped.
//!
//! Canonicity compares designs over design nodes in ascending node index.
//! For the check the group is stored as a trie over the inverse permutations
//! restricted to design nodes, so a design is rejected as soon as one branch
//! yields a smaller image and a whole branch is dropped as soon as its image
//! compares larger.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lnem::Design;
use crate::network::{Network, NodeRole};

/// Default ceiling on the number of group elements.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomorphError {
    #[error("automorphism group has more than {cap} elements; orbit pruning is not advisable here")]
    GroupTooLarge { cap: usize },
    #[error("design has {actual} entries but the network has {expected} design nodes")]
    DesignLength { expected: usize, actual: usize },
    #[error("design space of {size} designs exceeds the brute-force limit of {limit}")]
    SpaceTooLarge { size: u128, limit: u64 },
}

/// Node permutation; `perm[i]` is the image of node `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Automorphism {
    perm: Vec<usize>,
}

impl Automorphism {
    pub fn identity(n: usize) -> Self {
        Automorphism { perm: (0..n).collect() }
    }

    pub fn from_images(perm: Vec<usize>) -> Self {
        Automorphism { perm }
    }

    pub fn images(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Automorphism {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Automorphism { perm: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    /// Disjoint cycles of length > 1, 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut out = Vec::new();
        for start in 0..self.perm.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.perm[i];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }
}

/// Cycle notation with 1-based node ids; the identity prints as `()`.
impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            let ids: Vec<String> = cycle.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", ids.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
struct TrieNode {
    /// (design ordinal `sigma(depth)`, child index)
    children: Vec<(u16, u32)>,
}

/// Complete automorphism group of a network as an explicit element list.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    elements: Vec<Automorphism>,
    design_nodes: Vec<usize>,
    /// Distinct inverse permutations restricted to design ordinals.
    design_inverses: Vec<Vec<u16>>,
    trie: Vec<TrieNode>,
}

impl AutomorphismGroup {
    fn from_elements(net: &Network, mut elements: Vec<Automorphism>) -> Self {
        elements.sort();
        elements.dedup();
        let design_nodes = net.design_nodes().to_vec();
        let restricted: BTreeSet<Vec<u16>> = elements
            .iter()
            .map(|pi| {
                let inv = pi.inverse();
                design_nodes
                    .iter()
                    .map(|&node| net.design_ordinal(inv.apply(node)).expect("roles preserved") as u16)
                    .collect()
            })
            .collect();
        let design_inverses: Vec<Vec<u16>> = restricted.into_iter().collect();
        let mut trie = vec![TrieNode::default()];
        for sigma in &design_inverses {
            let mut node = 0usize;
            for &v in sigma {
                let next = match trie[node].children.last() {
                    Some(&(last, child)) if last == v => child as usize,
                    _ => {
                        trie.push(TrieNode::default());
                        let child = trie.len() - 1;
                        trie[node].children.push((v, child as u32));
                        child
                    }
                };
                node = next;
            }
        }
        AutomorphismGroup {
            elements,
            design_nodes,
            design_inverses,
            trie,
        }
    }

    /// Group containing only the identity.
    pub fn trivial(net: &Network) -> Self {
        Self::from_elements(net, vec![Automorphism::identity(net.node_count())])
    }

    /// Elements sorted lexicographically by permutation image.
    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn design_count(&self) -> usize {
        self.design_nodes.len()
    }

    /// Distinct actions on design-node positions, as inverse maps:
    /// `sigma[j]` is the position whose treatment lands on position `j`.
    pub fn design_actions(&self) -> &[Vec<u16>] {
        &self.design_inverses
    }

    fn check_len(&self, x: &Design) -> Result<(), AutomorphError> {
        if x.len() != self.design_nodes.len() {
            return Err(AutomorphError::DesignLength {
                expected: self.design_nodes.len(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Design `pi · x` over design nodes, where `(pi·x)[pi(i)] = x[i]`.
    pub fn act(&self, pi: &Automorphism, net: &Network, x: &Design) -> Design {
        let mut out = vec![0u8; x.len()];
        for (ord, &node) in net.design_nodes().iter().enumerate() {
            let target = net.design_ordinal(pi.apply(node)).expect("roles preserved");
            out[target] = x.as_slice()[ord];
        }
        Design::new(out)
    }

    /// Whether `x` is the lexicographically smallest design in its orbit.
    pub fn is_canonical(&self, x: &Design) -> Result<bool, AutomorphError> {
        self.check_len(x)?;
        Ok(self.is_canonical_slice(x.as_slice()))
    }

    pub(crate) fn is_canonical_slice(&self, x: &[u8]) -> bool {
        if self.elements.len() == 1 || x.is_empty() {
            return true;
        }
        let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
        while let Some((node, depth)) = stack.pop() {
            let here = x[depth];
            for &(v, child) in &self.trie[node as usize].children {
                let image = x[v as usize];
                if image < here {
                    return false;
                }
                if image == here && depth + 1 < x.len() {
                    stack.push((child, depth + 1));
                }
            }
        }
        true
    }

    /// Lexicographically smallest design in the orbit of `x`.
    pub fn canonical_image(&self, x: &Design) -> Result<Design, AutomorphError> {
        self.check_len(x)?;
        Ok(Design::new(self.canonical_image_slice(x.as_slice())))
    }

    pub(crate) fn canonical_image_slice(&self, x: &[u8]) -> Vec<u8> {
        if self.elements.len() == 1 {
            return x.to_vec();
        }
        let mut out = Vec::with_capacity(x.len());
        let mut frontier: Vec<u32> = vec![0];
        let mut next = Vec::new();
        for _ in 0..x.len() {
            let best = frontier
                .iter()
                .flat_map(|&node| self.trie[node as usize].children.iter())
                .map(|&(v, _)| x[v as usize])
                .min()
                .expect("identity branch present");
            next.clear();
            for &node in &frontier {
                for &(v, child) in &self.trie[node as usize].children {
                    if x[v as usize] == best {
                        next.push(child);
                    }
                }
            }
            out.push(best);
            std::mem::swap(&mut frontier, &mut next);
        }
        out
    }
}

/// Color refinement to a stable partition. Colors are canonical: they depend
/// only on the isomorphism type of each node's surroundings.
fn refine_colors(net: &Network) -> Vec<usize> {
    let n = net.node_count();
    let initial: Vec<(u8, u32)> = (0..n)
        .map(|i| match net.role(i) {
            NodeRole::Design => (0, 0),
            NodeRole::Block { class_id, .. } => (1, class_id),
        })
        .collect();
    let ids: BTreeMap<(u8, u32), usize> = initial
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(idx, key)| (key, idx))
        .collect();
    let mut colors: Vec<usize> = initial.iter().map(|k| ids[k]).collect();
    let mut class_count = ids.len();
    loop {
        let signatures: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|i| {
                let mut ins: Vec<usize> = net.in_neighbors(i).map(|k| colors[k]).collect();
                let mut outs: Vec<usize> = net.out_neighbors(i).map(|k| colors[k]).collect();
                ins.sort_unstable();
                outs.sort_unstable();
                (colors[i], ins, outs)
            })
            .collect();
        let ids: BTreeMap<&(usize, Vec<usize>, Vec<usize>), usize> = signatures
            .iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(idx, key)| (key, idx))
            .collect();
        let refined: Vec<usize> = signatures.iter().map(|s| ids[s]).collect();
        let count = ids.len();
        colors = refined;
        if count == class_count {
            return colors;
        }
        class_count = count;
    }
}

fn search_order(net: &Network, colors: &[usize]) -> Vec<usize> {
    let n = net.node_count();
    let mut class_size = BTreeMap::new();
    for &c in colors {
        *class_size.entry(c).or_insert(0usize) += 1;
    }
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| (std::cmp::Reverse(links[i]), class_size[&colors[i]], i))
            .expect("unplaced node");
        placed[next] = true;
        order.push(next);
        for (k, link) in links.iter_mut().enumerate() {
            if net.adjacent(next, k) || net.adjacent(k, next) {
                *link += 1;
            }
        }
    }
    order
}

struct Backtrack<'a> {
    net: &'a Network,
    colors: Vec<usize>,
    order: Vec<usize>,
    image: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Automorphism>,
    cap: usize,
}

impl Backtrack<'_> {
    fn consistent(&self, depth: usize, target: usize) -> bool {
        let node = self.order[depth];
        if self.colors[node] != self.colors[target] {
            return false;
        }
        self.order[..depth].iter().all(|&prev| {
            let img = self.image[prev];
            self.net.adjacent(node, prev) == self.net.adjacent(target, img)
                && self.net.adjacent(prev, node) == self.net.adjacent(img, target)
        })
    }

    fn run(&mut self, depth: usize) -> Result<(), AutomorphError> {
        let n = self.order.len();
        if depth == n {
            if self.found.len() >= self.cap {
                return Err(AutomorphError::GroupTooLarge { cap: self.cap });
            }
            self.found.push(Automorphism::from_images(self.image.clone()));
            return Ok(());
        }
        let node = self.order[depth];
        for target in 0..n {
            if self.used[target] || !self.consistent(depth, target) {
                continue;
            }
            self.used[target] = true;
            self.image[node] = target;
            self.run(depth + 1)?;
            self.used[target] = false;
        }
        Ok(())
    }
}

/// All automorphisms of `net` preserving adjacency (with direction) and
/// node roles, with the default element cap.
pub fn find_automorphisms(net: &Network) -> Result<AutomorphismGroup, AutomorphError> {
    find_automorphisms_with_cap(net, DEFAULT_GROUP_CAP)
}

pub fn find_automorphisms_with_cap(net: &Network, cap: usize) -> Result<AutomorphismGroup, AutomorphError> {
    let n = net.node_count();
    let colors = refine_colors(net);
    let order = search_order(net, &colors);
    let mut bt = Backtrack {
        net,
        colors,
        order,
        image: vec![usize::MAX; n],
        used: vec![false; n],
        found: Vec::new(),
        cap,
    };
    bt.run(0)?;
    Ok(AutomorphismGroup::from_elements(net, bt.found))
}

/// Largest design space accepted by the brute-force orbit count.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Counts orbits of the full design space (all `m^n` assignments to design
/// nodes) by applying every group element to each unvisited design.
pub fn count_orbits_bruteforce(net: &Network, m: usize) -> Result<u64, AutomorphError> {
    let group = find_automorphisms(net)?;
    count_orbits_with_group(net, &group, m)
}

pub fn count_orbits_with_group(net: &Network, group: &AutomorphismGroup, m: usize) -> Result<u64, AutomorphError> {
    let n = net.design_count();
    let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > BRUTE_FORCE_LIMIT as u128 {
        return Err(AutomorphError::SpaceTooLarge {
            size,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let size = size as usize;
    // Position maps pi(i) over design ordinals, one per element.
    let forward: Vec<Vec<usize>> = group
        .elements()
        .iter()
        .map(|pi| {
            net.design_nodes()
                .iter()
                .map(|&node| net.design_ordinal(pi.apply(node)).expect("roles preserved"))
                .collect()
        })
        .collect();
    let mut weights = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        weights[i] = weights[i + 1] * m;
    }
    let mut visited = vec![false; size];
    let mut digits = vec![0usize; n];
    let mut orbits = 0u64;
    for index in 0..size {
        if visited[index] {
            continue;
        }
        orbits += 1;
        let mut rest = index;
        for i in 0..n {
            digits[i] = rest / weights[i];
            rest %= weights[i];
        }
        for map in &forward {
            let image: usize = (0..n).map(|i| digits[i] * weights[map[i]]).sum();
            visited[image] = true;
        }
    }
    Ok(orbits)
}
