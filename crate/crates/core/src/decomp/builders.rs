use std::collections::{BTreeSet, HashSet};

use super::{validate, TdError, TreeDecomposition};
use crate::tanner::{Node, ScLdpcParams, TannerGraph};

/// Builds the decomposition induced by eliminating the nodes of `g` in
/// `order` (a permutation of the combined namespace). Bag `i` is
/// `order[i]` plus its not-yet-eliminated neighbours in the filled graph.
///
/// # Panics
///
/// Panics if `order` is not a permutation of `0..g.n_nodes()`.
pub fn elimination_decomposition(g: &TannerGraph, order: &[usize]) -> TreeDecomposition {
    let n = g.n_nodes();
    assert_eq!(order.len(), n, "elimination order must cover every node");
    if n == 0 {
        return TreeDecomposition::new(vec![vec![]], vec![]).expect("single bag");
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in order.iter().enumerate() {
        assert!(
            pos[x] == usize::MAX,
            "node {x} repeated in elimination order"
        );
        pos[x] = i;
    }
    let mut adj: Vec<HashSet<usize>> = (0..n)
        .map(|x| g.combined_neighbors(x).into_iter().collect())
        .collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n);
    let mut roots = Vec::new();
    for (i, &x) in order.iter().enumerate() {
        let nbrs: Vec<usize> = adj[x].iter().copied().collect();
        for (k, &a) in nbrs.iter().enumerate() {
            adj[a].remove(&x);
            for &b in &nbrs[k + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        match nbrs.iter().map(|&a| pos[a]).min() {
            Some(parent) => edges.push((i, parent)),
            None => roots.push(i),
        }
        let mut bag = nbrs;
        bag.push(x);
        bags.push(bag);
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, edges).expect("elimination tree is a tree")
}

/// Greedy min-fill elimination order over the combined namespace. Ties go
/// to the lower degree, then the lower id.
pub fn min_fill_order(g: &TannerGraph) -> Vec<usize> {
    let n = g.n_nodes();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|x| g.combined_neighbors(x).into_iter().collect())
        .collect();
    let fill = |adj: &[BTreeSet<usize>], x: usize| -> usize {
        let nb: Vec<usize> = adj[x].iter().copied().collect();
        let mut missing = 0;
        for (k, &a) in nb.iter().enumerate() {
            for &b in &nb[k + 1..] {
                if !adj[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    };
    let mut score: Vec<(usize, usize)> = (0..n).map(|x| (fill(&adj, x), adj[x].len())).collect();
    let mut queue: BTreeSet<(usize, usize, usize)> =
        (0..n).map(|x| (score[x].0, score[x].1, x)).collect();
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some((_, _, x)) = queue.pop_first() {
        eliminated[x] = true;
        order.push(x);
        let nbrs: Vec<usize> = adj[x].iter().copied().collect();
        for (k, &a) in nbrs.iter().enumerate() {
            adj[a].remove(&x);
            for &b in &nbrs[k + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[x].clear();
        let mut touched: BTreeSet<usize> = nbrs.iter().copied().collect();
        for &a in &nbrs {
            touched.extend(adj[a].iter().copied());
        }
        for y in touched {
            if eliminated[y] {
                continue;
            }
            let fresh = (fill(&adj, y), adj[y].len());
            if fresh != score[y] {
                queue.remove(&(score[y].0, score[y].1, y));
                score[y] = fresh;
                queue.insert((fresh.0, fresh.1, y));
            }
        }
    }
    order
}

/// Fallback decomposition from a min-fill elimination order. Always valid;
/// no width guarantee.
pub fn heuristic_decomposition(g: &TannerGraph) -> TreeDecomposition {
    elimination_decomposition(g, &min_fill_order(g))
}

/// Path decomposition of an SC-LDPC code: bag `t` holds check block `t`
/// and the variable blocks `t - w + 1 ..= t` that can reach it.
pub fn sc_path_decomposition(
    g: &TannerGraph,
    p: &ScLdpcParams,
) -> Result<TreeDecomposition, TdError> {
    p.validate()
        .map_err(|e| TdError::ScMismatch(e.to_string()))?;
    if g.n_var() != p.n_var() || g.n_chk() != p.n_chk() {
        return Err(TdError::ScMismatch(format!(
            "expected {} variables and {} checks, graph has {} and {}",
            p.n_var(),
            p.n_chk(),
            g.n_var(),
            g.n_chk()
        )));
    }
    for (v, c) in g.edges() {
        let (j, t) = (p.var_block(v), p.check_block(c));
        if t < j || t >= j + p.coupling_width {
            return Err(TdError::ScMismatch(format!(
                "edge (variable {v}, check {c}) leaves the coupling window"
            )));
        }
    }
    let blocks = p.n_check_blocks();
    let mut bags = Vec::with_capacity(blocks);
    for t in 0..blocks {
        let mut bag = Vec::new();
        let first = (t + 1).saturating_sub(p.coupling_width);
        let last = t.min(p.coupling_len - 1);
        for j in first..=last {
            bag.extend(j * p.base_cols..(j + 1) * p.base_cols);
        }
        bag.extend((t * p.base_rows..(t + 1) * p.base_rows).map(|c| g.combined_id(Node::Chk(c))));
        bags.push(bag);
    }
    let edges = (1..blocks).map(|t| (t - 1, t)).collect();
    let td = TreeDecomposition::new(bags, edges)?;
    let report = validate(g, &td);
    if !report.is_valid() {
        return Err(TdError::Invalid(report));
    }
    Ok(td)
}
