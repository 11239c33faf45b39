//! Rooted nice tree decompositions.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{validate, TdError, TreeDecomposition};
use crate::tanner::{Node, TannerGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    IntroduceVar(usize),
    ForgetVar(usize),
    IntroduceChk(usize),
    ForgetChk(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted variable ids of the bag.
    pub bag_v: Vec<usize>,
    /// Sorted check ids of the bag.
    pub bag_c: Vec<usize>,
    pub children: Vec<usize>,
}

impl NiceNode {
    pub fn bag_len(&self) -> usize {
        self.bag_v.len() + self.bag_c.len()
    }
}

/// Nice decomposition stored in post-order: children precede their parent
/// and the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub leaf: usize,
    pub introduce_var: usize,
    pub forget_var: usize,
    pub introduce_chk: usize,
    pub forget_chk: usize,
    pub join: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceViolation {
    pub node: usize,
    pub reason: String,
}

impl fmt::Display for NiceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nice node {}: {}", self.node, self.reason)
    }
}

impl NiceTreeDecomposition {
    /// Wraps a node list after checking every structural invariant.
    pub fn from_nodes(nodes: Vec<NiceNode>) -> Result<Self, Vec<NiceViolation>> {
        let ntd = NiceTreeDecomposition { nodes };
        let violations = ntd.structural_violations();
        if violations.is_empty() {
            Ok(ntd)
        } else {
            Err(violations)
        }
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> i64 {
        self.nodes.iter().map(NiceNode::bag_len).max().unwrap_or(0) as i64 - 1
    }

    pub fn kind_counts(&self) -> KindCounts {
        let mut k = KindCounts::default();
        for node in &self.nodes {
            match node.kind {
                NiceKind::Leaf => k.leaf += 1,
                NiceKind::IntroduceVar(_) => k.introduce_var += 1,
                NiceKind::ForgetVar(_) => k.forget_var += 1,
                NiceKind::IntroduceChk(_) => k.introduce_chk += 1,
                NiceKind::ForgetChk(_) => k.forget_chk += 1,
                NiceKind::Join => k.join += 1,
            }
        }
        k
    }

    /// Lists every broken nice-form rule; empty when the structure is sound.
    pub fn structural_violations(&self) -> Vec<NiceViolation> {
        let mut out = Vec::new();
        let mut bad = |node: usize, reason: String| out.push(NiceViolation { node, reason });
        if self.nodes.is_empty() {
            bad(0, "no nodes".into());
            return out;
        }
        let mut parent_count = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for list in [&node.bag_v, &node.bag_c] {
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    bad(i, "bag is not sorted and duplicate-free".into());
                }
            }
            for &ch in &node.children {
                if ch >= i {
                    bad(i, format!("child {ch} does not precede its parent"));
                } else {
                    parent_count[ch] += 1;
                }
            }
            let child = |k: usize| node.children.get(k).and_then(|&c| self.nodes.get(c));
            let arity = node.children.len();
            let expect_arity = match node.kind {
                NiceKind::Leaf => 0,
                NiceKind::Join => 2,
                _ => 1,
            };
            if arity != expect_arity {
                bad(i, format!("{:?} node has {arity} children", node.kind));
                continue;
            }
            let ok = match node.kind {
                NiceKind::Leaf => node.bag_len() == 0,
                NiceKind::Join => {
                    let (a, b) = (child(0), child(1));
                    [a, b]
                        .iter()
                        .all(|c| c.is_some_and(|c| c.bag_v == node.bag_v && c.bag_c == node.bag_c))
                }
                NiceKind::IntroduceVar(v) => child(0).is_some_and(|c| {
                    c.bag_c == node.bag_c
                        && !c.bag_v.contains(&v)
                        && with(&c.bag_v, v) == node.bag_v
                }),
                NiceKind::ForgetVar(v) => child(0).is_some_and(|c| {
                    c.bag_c == node.bag_c
                        && !node.bag_v.contains(&v)
                        && with(&node.bag_v, v) == c.bag_v
                }),
                NiceKind::IntroduceChk(x) => child(0).is_some_and(|c| {
                    c.bag_v == node.bag_v
                        && !c.bag_c.contains(&x)
                        && with(&c.bag_c, x) == node.bag_c
                }),
                NiceKind::ForgetChk(x) => child(0).is_some_and(|c| {
                    c.bag_v == node.bag_v
                        && !node.bag_c.contains(&x)
                        && with(&node.bag_c, x) == c.bag_c
                }),
            };
            if !ok {
                bad(i, format!("bag does not match {:?} rule", node.kind));
            }
        }
        let root = self.nodes.len() - 1;
        if self.nodes[root].bag_len() != 0 {
            bad(root, "root bag is not empty".into());
        }
        for (i, &count) in parent_count.iter().enumerate() {
            let expected = usize::from(i != root);
            if count != expected {
                bad(i, format!("has {count} parents, expected {expected}"));
            }
        }
        out
    }

    /// Forgets the node kinds: bag `i` is nice node `i`, tree edges are the
    /// parent links, rooted at the last node.
    pub fn to_tree_decomposition(&self, g: &TannerGraph) -> TreeDecomposition {
        let bags = self
            .nodes
            .iter()
            .map(|n| {
                n.bag_v
                    .iter()
                    .copied()
                    .chain(n.bag_c.iter().map(|&c| g.combined_id(Node::Chk(c))))
                    .collect()
            })
            .collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.children.iter().map(move |&c| (c, i)))
            .collect();
        TreeDecomposition::new(bags, edges)
            .and_then(|td| td.with_root(self.root()))
            .expect("nice decomposition is a rooted tree")
    }

    /// Checks separation at every join node `t` with children `t1`, `t2`:
    /// the subtree unions `U1`, `U2` satisfy `U1 ∩ U2 = B_t`, no graph edge
    /// runs between `U1 ∖ B_t` and `U2 ∖ B_t`, and `U1 ∪ U2 = U_t`.
    pub fn join_separation_violations(&self, g: &TannerGraph) -> Vec<NiceViolation> {
        let n = g.n_nodes();
        let mut unions: Vec<FixedBitSet> = Vec::with_capacity(self.nodes.len());
        let mut out = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let mut bag = FixedBitSet::with_capacity(n);
            for &v in &node.bag_v {
                bag.insert(v);
            }
            for &c in &node.bag_c {
                bag.insert(g.combined_id(Node::Chk(c)));
            }
            let mut union = bag.clone();
            for &ch in &node.children {
                union.union_with(&unions[ch]);
            }
            if node.kind == NiceKind::Join {
                let (u1, u2) = (&unions[node.children[0]], &unions[node.children[1]]);
                let mut inter = u1.clone();
                inter.intersect_with(u2);
                if inter != bag {
                    out.push(NiceViolation {
                        node: i,
                        reason: "child subtrees share nodes outside the join bag".into(),
                    });
                }
                let mut only1 = u1.clone();
                only1.difference_with(&bag);
                let mut only2 = u2.clone();
                only2.difference_with(&bag);
                let crossing = only1
                    .ones()
                    .any(|x| g.combined_neighbors(x).iter().any(|&y| only2.contains(y)));
                if crossing {
                    out.push(NiceViolation {
                        node: i,
                        reason: "an edge crosses between the child subtrees".into(),
                    });
                }
                let mut parts = only1;
                parts.union_with(&only2);
                parts.union_with(&bag);
                if parts != union {
                    out.push(NiceViolation {
                        node: i,
                        reason: "subtree parts do not cover the join subtree".into(),
                    });
                }
            }
            unions.push(union);
        }
        out
    }
}

fn with(list: &[usize], x: usize) -> Vec<usize> {
    let mut v = list.to_vec();
    if let Err(p) = v.binary_search(&x) {
        v.insert(p, x);
    }
    v
}

struct Builder<'g> {
    g: &'g TannerGraph,
    nodes: Vec<NiceNode>,
}

impl Builder<'_> {
    fn push(&mut self, kind: NiceKind, bag: &[usize], children: Vec<usize>) -> usize {
        let n_var = self.g.n_var();
        let split = bag.partition_point(|&x| x < n_var);
        self.nodes.push(NiceNode {
            kind,
            bag_v: bag[..split].to_vec(),
            bag_c: bag[split..].iter().map(|&x| x - n_var).collect(),
            children,
        });
        self.nodes.len() - 1
    }

    /// Turns node `from` (bag `cur`) into a chain ending at bag `target`:
    /// forgets first, then introduces, each in ascending id order.
    fn bridge(&mut self, mut from: usize, cur: &[usize], target: &[usize]) -> usize {
        let mut bag = cur.to_vec();
        for &x in cur {
            if target.binary_search(&x).is_err() {
                bag.retain(|&y| y != x);
                let kind = match self.g.node(x).expect("validated") {
                    Node::Var(v) => NiceKind::ForgetVar(v),
                    Node::Chk(c) => NiceKind::ForgetChk(c),
                };
                from = self.push(kind, &bag, vec![from]);
            }
        }
        for &x in target {
            if let Err(p) = bag.binary_search(&x) {
                bag.insert(p, x);
                let kind = match self.g.node(x).expect("validated") {
                    Node::Var(v) => NiceKind::IntroduceVar(v),
                    Node::Chk(c) => NiceKind::IntroduceChk(c),
                };
                from = self.push(kind, &bag, vec![from]);
            }
        }
        from
    }
}

/// Converts a valid decomposition into rooted nice form of the same width.
///
/// The root is `td.root()` when set, otherwise the lowest-index bag with at
/// most one tree neighbour (an endpoint when the tree is a path). Children
/// are visited in ascending bag index; multi-child bags become left-deep
/// join cascades.
pub fn make_nice(
    g: &TannerGraph,
    td: &TreeDecomposition,
) -> Result<NiceTreeDecomposition, TdError> {
    let report = validate(g, td);
    if !report.is_valid() {
        return Err(TdError::Invalid(report));
    }
    let adj = td.adjacency();
    let root = td
        .root()
        .unwrap_or_else(|| (0..td.len()).find(|&t| adj[t].len() <= 1).unwrap_or(0));
    let bags = td.bags();
    let mut b = Builder {
        g,
        nodes: Vec::with_capacity(2 * td.len() + 2 * g.n_nodes()),
    };
    // Iterative DFS; `top[t]` is the nice node carrying bag `t` once done.
    let mut top = vec![usize::MAX; td.len()];
    let mut parent = vec![usize::MAX; td.len()];
    let mut stack = vec![(root, 0usize)];
    parent[root] = root;
    while let Some(&mut (t, ref mut next)) = stack.last_mut() {
        let children: Vec<usize> = adj[t].iter().copied().filter(|&u| u != parent[t]).collect();
        if *next < children.len() {
            let c = children[*next];
            *next += 1;
            parent[c] = t;
            stack.push((c, 0));
            continue;
        }
        stack.pop();
        let node = if children.is_empty() {
            let leaf = b.push(NiceKind::Leaf, &[], vec![]);
            b.bridge(leaf, &[], &bags[t])
        } else {
            let mut acc: Option<usize> = None;
            for &c in &children {
                let branch = b.bridge(top[c], &bags[c], &bags[t]);
                acc = Some(match acc {
                    None => branch,
                    Some(prev) => b.push(NiceKind::Join, &bags[t], vec![prev, branch]),
                });
            }
            acc.expect("at least one child")
        };
        top[t] = node;
    }
    b.bridge(top[root], &bags[root], &[]);
    Ok(NiceTreeDecomposition { nodes: b.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_graph() -> TannerGraph {
        TannerGraph::from_check_lists(4, vec![vec![0, 1], vec![1, 2, 3], vec![0, 3]]).unwrap()
    }

    #[test]
    fn single_empty_bag_is_one_leaf() {
        let g = TannerGraph::from_check_lists(0, vec![]).unwrap();
        let td = TreeDecomposition::new(vec![vec![]], vec![]).unwrap();
        let ntd = make_nice(&g, &td).unwrap();
        assert_eq!(ntd.len(), 1);
        assert_eq!(ntd.nodes()[0].kind, NiceKind::Leaf);
    }

    #[test]
    fn single_variable_bag_is_a_chain() {
        let g = TannerGraph::from_check_lists(1, vec![]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0]], vec![]).unwrap();
        let ntd = make_nice(&g, &td).unwrap();
        let kinds: Vec<NiceKind> = ntd.nodes().iter().map(|n| n.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NiceKind::Leaf,
                NiceKind::IntroduceVar(0),
                NiceKind::ForgetVar(0)
            ]
        );
    }

    #[test]
    fn star_gets_join_cascade_and_keeps_width() {
        let g = example_graph();
        // c0=4, c1=5, c2=6
        let td = TreeDecomposition::new(
            vec![
                vec![0, 1, 3],
                vec![0, 1, 4],
                vec![1, 2, 3, 5],
                vec![0, 3, 6],
            ],
            vec![(0, 1), (0, 2), (0, 3)],
        )
        .unwrap()
        .with_root(0)
        .unwrap();
        let ntd = make_nice(&g, &td).unwrap();
        assert!(ntd.structural_violations().is_empty());
        assert_eq!(ntd.kind_counts().join, 2);
        assert_eq!(ntd.width(), td.width());
        assert!(validate(&g, &ntd.to_tree_decomposition(&g)).is_valid());
        assert!(ntd.join_separation_violations(&g).is_empty());
    }

    #[test]
    fn path_rooted_at_endpoint_has_no_joins() {
        let g = example_graph();
        let td = TreeDecomposition::new(
            vec![
                vec![0, 1, 4],
                vec![0, 1, 5],
                vec![0, 3, 5],
                vec![0, 3, 6],
                vec![2, 5],
            ],
            vec![(0, 1), (1, 2), (2, 3), (1, 4)],
        )
        .unwrap();
        // Not a path (bag 1 has three neighbours): expect a join.
        assert!(make_nice(&g, &td).unwrap().kind_counts().join >= 1);

        let path = TreeDecomposition::new(
            vec![
                vec![0, 1, 4],
                vec![0, 1, 5],
                vec![0, 3, 5],
                vec![0, 3, 6],
                vec![0, 2, 5],
            ],
            vec![(0, 1), (1, 4), (4, 2), (2, 3)],
        )
        .unwrap();
        assert!(path.is_path());
        let ntd = make_nice(&g, &path).unwrap();
        assert_eq!(ntd.kind_counts().join, 0);
        assert_eq!(ntd.width(), 2);
    }

    #[test]
    fn from_nodes_rejects_broken_structure() {
        let nodes = vec![
            NiceNode {
                kind: NiceKind::Leaf,
                bag_v: vec![],
                bag_c: vec![],
                children: vec![],
            },
            NiceNode {
                kind: NiceKind::IntroduceVar(0),
                bag_v: vec![1],
                bag_c: vec![],
                children: vec![0],
            },
        ];
        let err = NiceTreeDecomposition::from_nodes(nodes).unwrap_err();
        assert!(err.iter().any(|v| v.node == 1));
    }

    #[test]
    fn invalid_input_is_rejected() {
        let g = example_graph();
        let td = TreeDecomposition::new(vec![vec![0, 1, 2, 3]], vec![]).unwrap();
        assert!(matches!(make_nice(&g, &td), Err(TdError::Invalid(_))));
    }
}
