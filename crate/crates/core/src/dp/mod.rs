//! Dynamic program over a rooted nice tree decomposition that yields the
//! size and the exact number of the smallest `(a, b)`-trapping sets.
//!
//! Every table maps a key `(I, Q, d)` to `(f, g)`: among nonempty variable
//! sets `S` inside the processed subgraph with `S ∩ bag = Q`, odd checks
//! `I` inside the bag and `d` odd checks already forgotten, `f` is the
//! smallest `|S|` and `g` the number of sets of that size. The root bag is
//! empty, so the root entry `(∅, ∅, b)` is the answer.

mod count;
mod table;

use thiserror::Error;

use crate::decomp::{validate, NiceKind, NiceTreeDecomposition, ValidationReport};
use crate::tanner::TannerGraph;

pub use count::Count;
pub(crate) use table::{insert_zero_bit, remove_bit};
pub use table::{DPEntry, DPKey, DPTable};

/// Bags may hold at most this many variables and this many checks.
pub const MAX_BAG_SIDE: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("nice node {node}: {reason}")]
    BagMismatch { node: usize, reason: String },
    #[error("nice node {node}: bag holds {size} {side}, more than {MAX_BAG_SIDE}")]
    BagTooWide {
        node: usize,
        side: &'static str,
        size: usize,
    },
    #[error("decomposition is not valid for the graph: {0}")]
    InvalidDecomposition(ValidationReport),
}

/// Size and number of the smallest trapping sets found at the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    pub a_min: u32,
    pub count: Count,
}

#[derive(Debug, Clone)]
pub struct DpOutcome {
    /// `None` when no nonempty set reaches exactly `b` odd checks.
    pub result: Option<Spectrum>,
    /// Every node's table, indexed like the nice decomposition, when asked for.
    pub tables: Option<Vec<DPTable>>,
}

fn mismatch(node: usize, reason: impl Into<String>) -> DpError {
    DpError::BagMismatch {
        node,
        reason: reason.into(),
    }
}

/// Bit `k` set when `bag_c[k]` is adjacent to variable `v`.
pub(crate) fn check_mask_of_var(g: &TannerGraph, bag_c: &[usize], v: usize) -> u64 {
    let adj = g.var_neighbors(v);
    bag_c
        .iter()
        .enumerate()
        .filter(|(_, c)| adj.binary_search(c).is_ok())
        .fold(0, |m, (k, _)| m | 1 << k)
}

/// Bit `k` set when `bag_v[k]` is adjacent to check `c`.
pub(crate) fn var_mask_of_check(g: &TannerGraph, bag_v: &[usize], c: usize) -> u64 {
    let adj = g.check_neighbors(c);
    bag_v
        .iter()
        .enumerate()
        .filter(|(_, v)| adj.binary_search(v).is_ok())
        .fold(0, |m, (k, _)| m | 1 << k)
}

/// Odd bag checks of the bag variables selected by `q`.
pub(crate) struct BagParity {
    var_masks: Vec<u64>,
}

impl BagParity {
    pub(crate) fn new(g: &TannerGraph, bag_v: &[usize], bag_c: &[usize]) -> Self {
        BagParity {
            var_masks: bag_v
                .iter()
                .map(|&v| check_mask_of_var(g, bag_c, v))
                .collect(),
        }
    }

    pub(crate) fn odd_checks(&self, mut q: u64) -> u64 {
        let mut acc = 0;
        while q != 0 {
            acc ^= self.var_masks[q.trailing_zeros() as usize];
            q &= q - 1;
        }
        acc
    }
}

/// Table of a leaf: no entries.
pub fn leaf_table(node: usize) -> DPTable {
    DPTable::new(Vec::new(), Vec::new(), node)
}

/// Adds variable `v` to the bag. Each child state survives with `v ∉ S`
/// and, unless it is the fully forgotten state `(∅, ∅, 0)`, is extended by
/// `v`; the singleton `{v}` is recorded with `f = g = 1`.
pub fn introduce_variable(
    child: &DPTable,
    v: usize,
    g: &TannerGraph,
    node: usize,
) -> Result<DPTable, DpError> {
    let p = match child.bag_v.binary_search(&v) {
        Ok(_) => return Err(mismatch(node, format!("variable {v} already in bag"))),
        Err(p) => p,
    };
    let mut bag_v = child.bag_v.clone();
    bag_v.insert(p, v);
    let i_v = check_mask_of_var(g, &child.bag_c, v);
    let bit = 1u64 << p;
    let mut out = DPTable::new(bag_v, child.bag_c.clone(), node);
    out.entries.reserve(2 * child.len() + 1);
    for (k, e) in child.iter() {
        let q = insert_zero_bit(k.q, p);
        out.entries.insert(DPKey::new(k.i, q, k.d), e.clone());
        if *k != DPKey::EMPTY {
            out.entries.insert(
                DPKey::new(k.i ^ i_v, q | bit, k.d),
                DPEntry {
                    f: e.f + 1,
                    g: e.g.clone(),
                },
            );
        }
    }
    out.entries.insert(
        DPKey::new(i_v, bit, 0),
        DPEntry {
            f: 1,
            g: Count::one(),
        },
    );
    Ok(out)
}

/// Drops variable `v` from the bag, merging states that differ only in
/// whether `v ∈ S`.
pub fn forget_variable(child: &DPTable, v: usize, node: usize) -> Result<DPTable, DpError> {
    let p = child
        .bag_v
        .binary_search(&v)
        .map_err(|_| mismatch(node, format!("variable {v} not in bag")))?;
    let mut bag_v = child.bag_v.clone();
    bag_v.remove(p);
    let mut out = DPTable::new(bag_v, child.bag_c.clone(), node);
    out.entries.reserve(child.len());
    for (k, e) in child.iter() {
        out.insert_min(DPKey::new(k.i, remove_bit(k.q, p), k.d), e.f, e.g.clone());
    }
    Ok(out)
}

/// Adds check `c` to the bag; it joins `I` when it sees an odd number of
/// members of `Q`.
pub fn introduce_check(
    child: &DPTable,
    c: usize,
    g: &TannerGraph,
    node: usize,
) -> Result<DPTable, DpError> {
    let p = match child.bag_c.binary_search(&c) {
        Ok(_) => return Err(mismatch(node, format!("check {c} already in bag"))),
        Err(p) => p,
    };
    let mut bag_c = child.bag_c.clone();
    bag_c.insert(p, c);
    let vmask = var_mask_of_check(g, &child.bag_v, c);
    let mut out = DPTable::new(child.bag_v.clone(), bag_c, node);
    out.entries.reserve(child.len());
    for (k, e) in child.iter() {
        let odd = u64::from((k.q & vmask).count_ones() & 1);
        let i = insert_zero_bit(k.i, p) | odd << p;
        out.entries.insert(DPKey::new(i, k.q, k.d), e.clone());
    }
    Ok(out)
}

/// Drops check `c` from the bag. An odd `c` moves into the forgotten count
/// `d`; states that would exceed `b` are discarded.
pub fn forget_check(child: &DPTable, c: usize, b: u32, node: usize) -> Result<DPTable, DpError> {
    let p = child
        .bag_c
        .binary_search(&c)
        .map_err(|_| mismatch(node, format!("check {c} not in bag")))?;
    let mut bag_c = child.bag_c.clone();
    bag_c.remove(p);
    let mut out = DPTable::new(child.bag_v.clone(), bag_c, node);
    out.entries.reserve(child.len());
    for (k, e) in child.iter() {
        let odd = k.i >> p & 1 == 1;
        let d = k.d + u32::from(odd);
        if d > b {
            continue;
        }
        out.insert_min(DPKey::new(remove_bit(k.i, p), k.q, d), e.f, e.g.clone());
    }
    Ok(out)
}

/// Combines two tables over the same bag. States with equal `Q` pair up
/// (their union shares exactly `Q`); states with `Q = ∅` also pass through
/// alone, for sets that live entirely on one side.
pub fn join(
    left: &DPTable,
    right: &DPTable,
    g: &TannerGraph,
    b: u32,
    node: usize,
) -> Result<DPTable, DpError> {
    if left.bag_v != right.bag_v || left.bag_c != right.bag_c {
        return Err(mismatch(node, "join children have different bags"));
    }
    let parity = BagParity::new(g, &left.bag_v, &left.bag_c);
    let mut by_q: rustc_hash::FxHashMap<u64, Vec<(DPKey, &DPEntry)>> = Default::default();
    for (k, e) in right.iter() {
        by_q.entry(k.q).or_default().push((*k, e));
    }
    let mut out = DPTable::new(left.bag_v.clone(), left.bag_c.clone(), node);
    for (k1, e1) in left.iter() {
        let Some(partners) = by_q.get(&k1.q) else {
            continue;
        };
        let shared = parity.odd_checks(k1.q);
        let overlap = k1.q.count_ones();
        for (k2, e2) in partners {
            let d = k1.d + k2.d;
            if d > b {
                continue;
            }
            out.insert_min(
                DPKey::new(k1.i ^ k2.i ^ shared, k1.q, d),
                e1.f + e2.f - overlap,
                e1.g.mul(&e2.g),
            );
        }
    }
    for (k, e) in left.iter().chain(right.iter()) {
        if k.q == 0 {
            out.insert_min(*k, e.f, e.g.clone());
        }
    }
    Ok(out)
}

/// Runs the dynamic program bottom-up over `ntd` and reads the root entry
/// `(∅, ∅, b)`. Child tables are dropped as soon as their parent is built
/// unless `retain_tables` is set.
pub fn run_dp(
    g: &TannerGraph,
    ntd: &NiceTreeDecomposition,
    b: u32,
    retain_tables: bool,
) -> Result<DpOutcome, DpError> {
    let report = validate(g, &ntd.to_tree_decomposition(g));
    if !report.is_valid() {
        return Err(DpError::InvalidDecomposition(report));
    }
    let nodes = ntd.nodes();
    for (i, n) in nodes.iter().enumerate() {
        for (side, size) in [("variables", n.bag_v.len()), ("checks", n.bag_c.len())] {
            if size > MAX_BAG_SIDE {
                return Err(DpError::BagTooWide {
                    node: i,
                    side,
                    size,
                });
            }
        }
    }
    let mut slots: Vec<Option<DPTable>> = vec![None; nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        let child = |k: usize| -> Result<&DPTable, DpError> {
            let c = n.children[k];
            slots[c]
                .as_ref()
                .ok_or_else(|| mismatch(i, format!("child {c} has no table")))
        };
        let table = match n.kind {
            NiceKind::Leaf => leaf_table(i),
            NiceKind::IntroduceVar(v) => introduce_variable(child(0)?, v, g, i)?,
            NiceKind::ForgetVar(v) => forget_variable(child(0)?, v, i)?,
            NiceKind::IntroduceChk(c) => introduce_check(child(0)?, c, g, i)?,
            NiceKind::ForgetChk(c) => forget_check(child(0)?, c, b, i)?,
            NiceKind::Join => join(child(0)?, child(1)?, g, b, i)?,
        };
        if table.bag_v != n.bag_v || table.bag_c != n.bag_c {
            return Err(mismatch(i, "computed bag differs from the decomposition"));
        }
        if !retain_tables {
            for &c in &n.children {
                slots[c] = None;
            }
        }
        slots[i] = Some(table);
    }
    let root = ntd.root();
    let result = slots[root]
        .as_ref()
        .and_then(|t| t.get(&DPKey::new(0, 0, b)))
        .map(|e| Spectrum {
            a_min: e.f,
            count: e.g.clone(),
        });
    let tables = if retain_tables {
        Some(
            slots
                .into_iter()
                .map(|t| t.expect("every node computed"))
                .collect(),
        )
    } else {
        None
    };
    Ok(DpOutcome { result, tables })
}

/// Minimum distance and number of minimum-weight codewords; `None` for a
/// code whose only codeword is zero.
pub fn min_distance(
    g: &TannerGraph,
    ntd: &NiceTreeDecomposition,
) -> Result<Option<Spectrum>, DpError> {
    Ok(run_dp(g, ntd, 0, false)?.result)
}
