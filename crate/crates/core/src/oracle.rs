//! Exhaustive enumeration of small trapping sets, used as ground truth for
//! the dynamic program.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dp::{Count, Spectrum};
use crate::tanner::TannerGraph;

/// Default cap on the number of subsets a single call may evaluate.
pub const DEFAULT_WORK_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search needs {needed} subset evaluations, limit is {limit}")]
    WorkLimit { needed: u128, limit: u64 },
    #[error("a_max {a_max} exceeds the {n_var} variables of the code")]
    SizeTooLarge { a_max: usize, n_var: usize },
}

/// One `(a, b)`-trapping set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrappingSetRecord {
    pub a: usize,
    pub b: usize,
    pub members: Vec<usize>,
}

impl TrappingSetRecord {
    /// Recomputes the odd-check count and compares it with `b`.
    pub fn revalidate(&self, g: &TannerGraph) -> bool {
        let mut s = crate::tanner::VarSet::with_capacity(g.n_var());
        for &v in &self.members {
            if v >= g.n_var() {
                return false;
            }
            s.insert(v);
        }
        self.a == self.members.len()
            && self.a >= 1
            && g.gamma_odd(&s, None).map(|odd| odd.count_ones(..)) == Ok(self.b)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Check neighbourhoods packed as rows of `words` u64s.
struct Neighborhoods {
    words: usize,
    rows: Vec<u64>,
}

impl Neighborhoods {
    fn new(g: &TannerGraph) -> Self {
        let words = g.n_chk().div_ceil(64).max(1);
        let mut rows = vec![0u64; words * g.n_var()];
        for v in 0..g.n_var() {
            for &c in g.var_neighbors(v) {
                rows[v * words + c / 64] |= 1 << (c % 64);
            }
        }
        Neighborhoods { words, rows }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

/// Visits every size-`a` subset whose smallest member is `first`, in
/// lexicographic order, with the XOR of the members' neighbourhoods.
fn visit_subsets(
    nb: &Neighborhoods,
    n: usize,
    a: usize,
    first: usize,
    visit: &mut dyn FnMut(&[usize], &[u64]),
) {
    fn rec(
        nb: &Neighborhoods,
        n: usize,
        a: usize,
        members: &mut Vec<usize>,
        acc: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[usize], &[u64]),
    ) {
        let depth = members.len();
        let w = nb.words;
        if depth == a {
            visit(members, &acc[(depth - 1) * w..depth * w]);
            return;
        }
        let start = members.last().map_or(0, |&x| x + 1);
        for v in start..=n - (a - depth) {
            for k in 0..w {
                acc[depth * w + k] = acc[(depth - 1) * w + k] ^ nb.row(v)[k];
            }
            members.push(v);
            rec(nb, n, a, members, acc, visit);
            members.pop();
        }
    }
    let w = nb.words;
    let mut acc = vec![0u64; a * w];
    acc[..w].copy_from_slice(nb.row(first));
    let mut members = Vec::with_capacity(a);
    members.push(first);
    rec(nb, n, a, &mut members, &mut acc, visit);
}

fn odd_count(acc: &[u64]) -> usize {
    acc.iter().map(|w| w.count_ones() as usize).sum()
}

/// All nonempty `S` with `|S| ≤ a_max` and exactly `b_target` odd checks,
/// ordered by size and then lexicographically.
pub fn brute_force_enumerate(
    g: &TannerGraph,
    a_max: usize,
    b_target: usize,
    work_limit: u64,
) -> Result<Vec<TrappingSetRecord>, OracleError> {
    let n = g.n_var();
    if a_max > n {
        return Err(OracleError::SizeTooLarge { a_max, n_var: n });
    }
    let needed: u128 = (1..=a_max).map(|a| binomial(n, a)).sum();
    if needed > u128::from(work_limit) {
        return Err(OracleError::WorkLimit {
            needed,
            limit: work_limit,
        });
    }
    let nb = Neighborhoods::new(g);
    let mut out = Vec::new();
    for a in 1..=a_max {
        let per_first: Vec<Vec<TrappingSetRecord>> = (0..=n - a)
            .into_par_iter()
            .map(|first| {
                let mut found = Vec::new();
                visit_subsets(&nb, n, a, first, &mut |members, acc| {
                    if odd_count(acc) == b_target {
                        found.push(TrappingSetRecord {
                            a,
                            b: b_target,
                            members: members.to_vec(),
                        });
                    }
                });
                found
            })
            .collect();
        out.extend(per_first.into_iter().flatten());
    }
    Ok(out)
}

/// Smallest `a ≤ a_cap` with at least one `(a, b_target)`-trapping set, and
/// the number of such sets.
pub fn brute_force_spectrum(
    g: &TannerGraph,
    b_target: usize,
    a_cap: usize,
    work_limit: u64,
) -> Result<Option<Spectrum>, OracleError> {
    let n = g.n_var();
    let a_cap = a_cap.min(n);
    let nb = Neighborhoods::new(g);
    let mut used: u128 = 0;
    for a in 1..=a_cap {
        used += binomial(n, a);
        if used > u128::from(work_limit) {
            return Err(OracleError::WorkLimit {
                needed: used,
                limit: work_limit,
            });
        }
        let count: u64 = (0..=n - a)
            .into_par_iter()
            .map(|first| {
                let mut hits = 0u64;
                visit_subsets(&nb, n, a, first, &mut |_, acc| {
                    if odd_count(acc) == b_target {
                        hits += 1;
                    }
                });
                hits
            })
            .sum();
        if count > 0 {
            return Ok(Some(Spectrum {
                a_min: a as u32,
                count: Count::from(count),
            }));
        }
    }
    Ok(None)
}
