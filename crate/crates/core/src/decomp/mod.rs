//! Tree decompositions of Tanner graphs.
//!
//! Bags hold ids in the combined namespace of [`TannerGraph`]: variables are
//! `0..n_var`, check `c` is `n_var + c`.

mod builders;
mod nice;
mod pace;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::tanner::{Node, TannerGraph};

pub use builders::{
    elimination_decomposition, heuristic_decomposition, min_fill_order, sc_path_decomposition,
};
pub use nice::{make_nice, KindCounts, NiceKind, NiceNode, NiceTreeDecomposition, NiceViolation};
pub use pace::{parse_td, serialize_td};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("a tree decomposition needs at least one bag")]
    NoBags,
    #[error("tree edge ({0}, {1}) names a bag that does not exist")]
    EdgeOutOfRange(usize, usize),
    #[error("tree edges contain a cycle through bags {0} and {1}")]
    Cycle(usize, usize),
    #[error("tree edges do not connect all bags")]
    Disconnected,
    #[error("root bag {0} does not exist")]
    RootOutOfRange(usize),
    #[error(".td line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("decomposition is not valid for the graph: {0}")]
    Invalid(ValidationReport),
    #[error("graph does not match SC-LDPC parameters: {0}")]
    ScMismatch(String),
}

/// A tree of bags over the combined node namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    root: Option<usize>,
}

impl TreeDecomposition {
    /// Creates a decomposition, checking that `edges` form a tree over the
    /// bag indices. Bag contents are sorted and deduplicated.
    pub fn new(mut bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Result<Self, TdError> {
        if bags.is_empty() {
            return Err(TdError::NoBags);
        }
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        let n = bags.len();
        let mut uf = UnionFind::new(n);
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(TdError::EdgeOutOfRange(a, b));
            }
            if !uf.union(a, b) {
                return Err(TdError::Cycle(a, b));
            }
            norm.push((a.min(b), a.max(b)));
        }
        if norm.len() != n - 1 {
            return Err(TdError::Disconnected);
        }
        norm.sort_unstable();
        Ok(TreeDecomposition {
            bags,
            edges: norm,
            root: None,
        })
    }

    pub fn with_root(mut self, root: usize) -> Result<Self, TdError> {
        if root >= self.bags.len() {
            return Err(TdError::RootOutOfRange(root));
        }
        self.root = Some(root);
        Ok(self)
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// `max |B_t| - 1`; a decomposition whose bags are all empty has width -1.
    pub fn width(&self) -> i64 {
        self.bags.iter().map(Vec::len).max().unwrap_or(0) as i64 - 1
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbouring bags of every bag, ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// True when every bag has at most two tree neighbours.
    pub fn is_path(&self) -> bool {
        self.adjacency().iter().all(|a| a.len() <= 2)
    }
}

/// A broken tree-decomposition condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NodeOutOfRange { bag: usize, node: usize },
    UncoveredNode(Node),
    UncoveredEdge { var: usize, chk: usize },
    DisconnectedOccurrence(Node),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NodeOutOfRange { bag, node } => {
                write!(f, "bag {bag} names node {node}, which is not in the graph")
            }
            Violation::UncoveredNode(n) => write!(f, "{} is in no bag", NodeName(*n)),
            Violation::UncoveredEdge { var, chk } => {
                write!(f, "edge (variable {var}, check {chk}) is in no bag")
            }
            Violation::DisconnectedOccurrence(n) => {
                write!(f, "bags containing {} are not connected", NodeName(*n))
            }
        }
    }
}

struct NodeName(Node);

impl fmt::Display for NodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Node::Var(v) => write!(f, "variable {v}"),
            Node::Chk(c) => write!(f, "check {c}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let items: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", items.join("; "))
    }
}

/// Checks the three tree-decomposition conditions: node coverage, edge
/// coverage and connectedness of each node's occurrence set.
pub fn validate(g: &TannerGraph, td: &TreeDecomposition) -> ValidationReport {
    let n = g.n_nodes();
    let mut violations = Vec::new();
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, bag) in td.bags.iter().enumerate() {
        for &x in bag {
            if x < n {
                occ[x].push(t);
            } else {
                violations.push(Violation::NodeOutOfRange { bag: t, node: x });
            }
        }
    }
    for (x, list) in occ.iter().enumerate() {
        if list.is_empty() {
            violations.push(Violation::UncoveredNode(g.node(x).expect("in range")));
        }
    }
    for (v, c) in g.edges() {
        let cid = g.combined_id(Node::Chk(c));
        let covered = occ[v]
            .iter()
            .any(|&t| td.bags[t].binary_search(&cid).is_ok());
        if !covered {
            violations.push(Violation::UncoveredEdge { var: v, chk: c });
        }
    }
    let adj = td.adjacency();
    let mut mark = vec![usize::MAX; td.bags.len()];
    let mut queue = VecDeque::new();
    for (x, list) in occ.iter().enumerate() {
        if list.len() < 2 {
            continue;
        }
        for &t in list {
            mark[t] = x;
        }
        // BFS inside the occurrence set; reuse `mark` with a visited tag.
        let visited_tag = usize::MAX - 1;
        let mut seen = 1;
        mark[list[0]] = visited_tag;
        queue.push_back(list[0]);
        while let Some(t) = queue.pop_front() {
            for &u in &adj[t] {
                if mark[u] == x {
                    mark[u] = visited_tag;
                    seen += 1;
                    queue.push_back(u);
                }
            }
        }
        if seen != list.len() {
            violations.push(Violation::DisconnectedOccurrence(
                g.node(x).expect("in range"),
            ));
        }
        for &t in list {
            mark[t] = usize::MAX;
        }
    }
    ValidationReport { violations }
}

/// Width of a decomposition, `max |B_t| - 1`.
pub fn width(td: &TreeDecomposition) -> i64 {
    td.width()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
