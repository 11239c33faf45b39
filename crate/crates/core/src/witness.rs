//! Recovers one smallest trapping set by walking retained DP tables from
//! the root back to the leaves.

use thiserror::Error;

use crate::decomp::{NiceKind, NiceTreeDecomposition};
use crate::dp::{check_mask_of_var, insert_zero_bit, remove_bit, BagParity, DPKey, DPTable};
use crate::tanner::{TannerGraph, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("no trapping set with b = {0}")]
    NoTrappingSet(u32),
    #[error("expected {expected} retained tables, got {got}")]
    TablesMissing { expected: usize, got: usize },
    #[error("tables are inconsistent at nice node {0}")]
    Inconsistent(usize),
}

/// How the followed state at a node was produced from its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceRule {
    /// Introduced variable is not in the set.
    Kept,
    /// Introduced variable extends a child state.
    Extended,
    /// The singleton of the introduced variable.
    Singleton,
    ForgetVar {
        included: bool,
    },
    CheckMapped,
    ForgetChk {
        odd: bool,
    },
    JoinPair {
        left: DPKey,
        right: DPKey,
    },
    JoinLeft,
    JoinRight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub node: usize,
    pub key: DPKey,
    pub f: u32,
    pub rule: TraceRule,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WitnessTrace {
    pub steps: Vec<TraceStep>,
}

impl WitnessTrace {
    /// True when every followed key is present with the recorded `f`.
    pub fn replay(&self, tables: &[DPTable]) -> bool {
        self.steps.iter().all(|s| {
            tables
                .get(s.node)
                .and_then(|t| t.get(&s.key))
                .is_some_and(|e| e.f == s.f)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Sorted variable ids.
    pub members: Vec<usize>,
    pub trace: WitnessTrace,
}

/// Extracts one smallest `(a, b)`-trapping set. Ties between predecessor
/// states go to the smallest key, so the result is deterministic.
pub fn extract_witness(
    g: &TannerGraph,
    ntd: &NiceTreeDecomposition,
    b: u32,
    tables: &[DPTable],
) -> Result<Witness, WitnessError> {
    if tables.len() != ntd.len() {
        return Err(WitnessError::TablesMissing {
            expected: ntd.len(),
            got: tables.len(),
        });
    }
    let root = ntd.root();
    let root_key = DPKey::new(0, 0, b);
    let a_min = tables[root]
        .get(&root_key)
        .ok_or(WitnessError::NoTrappingSet(b))?
        .f;
    let nodes = ntd.nodes();
    let f_of = |node: usize, key: &DPKey| tables[node].get(key).map(|e| e.f);

    let mut members = VarSet::with_capacity(g.n_var());
    let mut trace = WitnessTrace::default();
    let mut stack = vec![(root, root_key, a_min)];
    while let Some((i, key, f)) = stack.pop() {
        let node = &nodes[i];
        let bad = || WitnessError::Inconsistent(i);
        let rule = match node.kind {
            NiceKind::Leaf => return Err(bad()),
            NiceKind::IntroduceVar(v) => {
                let child = node.children[0];
                let p = node.bag_v.binary_search(&v).map_err(|_| bad())?;
                let bit = 1u64 << p;
                let q = remove_bit(key.q, p);
                if key.q & bit == 0 {
                    let ck = DPKey::new(key.i, q, key.d);
                    if f_of(child, &ck) != Some(f) {
                        return Err(bad());
                    }
                    stack.push((child, ck, f));
                    TraceRule::Kept
                } else {
                    members.insert(v);
                    let i_v = check_mask_of_var(g, &node.bag_c, v);
                    if key == DPKey::new(i_v, bit, 0) {
                        if f != 1 {
                            return Err(bad());
                        }
                        TraceRule::Singleton
                    } else {
                        let ck = DPKey::new(key.i ^ i_v, q, key.d);
                        if ck == DPKey::EMPTY || f_of(child, &ck) != Some(f - 1) {
                            return Err(bad());
                        }
                        stack.push((child, ck, f - 1));
                        TraceRule::Extended
                    }
                }
            }
            NiceKind::ForgetVar(v) => {
                let child = node.children[0];
                let p = tables[child].bag_v().binary_search(&v).map_err(|_| bad())?;
                let without = DPKey::new(key.i, insert_zero_bit(key.q, p), key.d);
                let with = DPKey::new(without.i, without.q | 1 << p, without.d);
                let (ck, included) = [(without, false), (with, true)]
                    .into_iter()
                    .filter(|(k, _)| f_of(child, k) == Some(f))
                    .min_by_key(|(k, _)| *k)
                    .ok_or_else(bad)?;
                stack.push((child, ck, f));
                TraceRule::ForgetVar { included }
            }
            NiceKind::IntroduceChk(c) => {
                let child = node.children[0];
                let p = node.bag_c.binary_search(&c).map_err(|_| bad())?;
                let ck = DPKey::new(remove_bit(key.i, p), key.q, key.d);
                if f_of(child, &ck) != Some(f) {
                    return Err(bad());
                }
                stack.push((child, ck, f));
                TraceRule::CheckMapped
            }
            NiceKind::ForgetChk(c) => {
                let child = node.children[0];
                let p = tables[child].bag_c().binary_search(&c).map_err(|_| bad())?;
                let even = DPKey::new(insert_zero_bit(key.i, p), key.q, key.d);
                let mut options = vec![(even, false)];
                if key.d > 0 {
                    options.push((DPKey::new(even.i | 1 << p, key.q, key.d - 1), true));
                }
                let (ck, odd) = options
                    .into_iter()
                    .filter(|(k, _)| f_of(child, k) == Some(f))
                    .min_by_key(|(k, _)| *k)
                    .ok_or_else(bad)?;
                stack.push((child, ck, f));
                TraceRule::ForgetChk { odd }
            }
            NiceKind::Join => {
                let (l, r) = (node.children[0], node.children[1]);
                let shared = BagParity::new(g, &node.bag_v, &node.bag_c).odd_checks(key.q);
                let overlap = key.q.count_ones();
                let none = DPKey::new(u64::MAX, u64::MAX, u32::MAX);
                let mut best: Option<(DPKey, DPKey)> = None;
                let mut consider = |cand: (DPKey, DPKey)| {
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                };
                for (k1, e1) in tables[l].iter() {
                    if k1.q != key.q || k1.d > key.d {
                        continue;
                    }
                    let k2 = DPKey::new(key.i ^ k1.i ^ shared, key.q, key.d - k1.d);
                    if let Some(f2) = f_of(r, &k2) {
                        if e1.f + f2 - overlap == f {
                            consider((*k1, k2));
                        }
                    }
                }
                if key.q == 0 {
                    if f_of(l, &key) == Some(f) {
                        consider((key, none));
                    }
                    if f_of(r, &key) == Some(f) {
                        consider((none, key));
                    }
                }
                match best.ok_or_else(bad)? {
                    (lk, rk) if rk == none => {
                        stack.push((l, lk, f));
                        TraceRule::JoinLeft
                    }
                    (lk, rk) if lk == none => {
                        stack.push((r, rk, f));
                        TraceRule::JoinRight
                    }
                    (lk, rk) => {
                        let fl = f_of(l, &lk).ok_or_else(bad)?;
                        let fr = f_of(r, &rk).ok_or_else(bad)?;
                        // Right is pushed first so the left subtree is walked first.
                        stack.push((r, rk, fr));
                        stack.push((l, lk, fl));
                        TraceRule::JoinPair {
                            left: lk,
                            right: rk,
                        }
                    }
                }
            }
        };
        trace.steps.push(TraceStep {
            node: i,
            key,
            f,
            rule,
        });
    }

    let odd = g
        .gamma_odd(&members, None)
        .map_err(|_| WitnessError::Inconsistent(root))?
        .count_ones(..);
    if members.count_ones(..) != a_min as usize || odd != b as usize {
        return Err(WitnessError::Inconsistent(root));
    }
    Ok(Witness {
        members: members.ones().collect(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{heuristic_decomposition, make_nice};
    use crate::dp::run_dp;

    fn witness(g: &TannerGraph, b: u32) -> Result<Witness, WitnessError> {
        let ntd = make_nice(g, &heuristic_decomposition(g)).unwrap();
        let out = run_dp(g, &ntd, b, true).unwrap();
        extract_witness(g, &ntd, b, out.tables.as_deref().unwrap())
    }

    #[test]
    fn repetition_code_witness() {
        let g = TannerGraph::from_check_lists(2, vec![vec![0, 1]]).unwrap();
        let w = witness(&g, 0).unwrap();
        assert_eq!(w.members, vec![0, 1]);
        assert!(!w.trace.steps.is_empty());
    }

    #[test]
    fn missing_root_and_missing_tables() {
        let g = TannerGraph::from_check_lists(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(witness(&g, 2), Err(WitnessError::NoTrappingSet(2)));
        let ntd = make_nice(&g, &heuristic_decomposition(&g)).unwrap();
        assert!(matches!(
            extract_witness(&g, &ntd, 0, &[]),
            Err(WitnessError::TablesMissing { .. })
        ));
    }

    #[test]
    fn witness_is_deterministic_and_replays() {
        let g = TannerGraph::from_dense(
            7,
            &[
                [1u8, 1, 0, 1, 1, 0, 0],
                [1, 0, 1, 1, 0, 1, 0],
                [0, 1, 1, 1, 0, 0, 1],
            ],
        )
        .unwrap();
        let ntd = make_nice(&g, &heuristic_decomposition(&g)).unwrap();
        let out = run_dp(&g, &ntd, 0, true).unwrap();
        let tables = out.tables.unwrap();
        let w1 = extract_witness(&g, &ntd, 0, &tables).unwrap();
        let w2 = extract_witness(&g, &ntd, 0, &tables).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(w1.members.len(), 3);
        assert!(w1.trace.replay(&tables));
    }
}
