//! Shared helpers for integration tests: random instances and oracles that
//! do not go through the library's DP code path.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trapgraph::decomp::{
    elimination_decomposition, NiceKind, NiceTreeDecomposition, TreeDecomposition,
};
use trapgraph::TannerGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn hamming74() -> TannerGraph {
    TannerGraph::from_dense(
        7,
        &[
            [1u8, 1, 0, 1, 1, 0, 0],
            [1, 0, 1, 1, 0, 1, 0],
            [0, 1, 1, 1, 0, 0, 1],
        ],
    )
    .unwrap()
}

pub fn repetition2() -> TannerGraph {
    TannerGraph::from_check_lists(2, vec![vec![0, 1]]).unwrap()
}

/// Random Tanner graph with `1..=max_var` variables, `0..=max_chk` checks and
/// a random edge density.
pub fn random_graph(rng: &mut impl Rng, max_var: usize, max_chk: usize) -> TannerGraph {
    let n_var = rng.gen_range(1..=max_var);
    let n_chk = rng.gen_range(0..=max_chk);
    let density: f64 = rng.gen_range(0.1..0.7);
    let rows = (0..n_chk)
        .map(|_| (0..n_var).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    TannerGraph::from_check_lists(n_var, rows).unwrap()
}

/// A random valid decomposition: random elimination order, optionally
/// padded with extra bags, optionally a random root; sometimes one big bag.
pub fn random_decomposition(g: &TannerGraph, rng: &mut impl Rng) -> TreeDecomposition {
    let n = g.n_nodes();
    let td = if rng.gen_bool(0.1) {
        TreeDecomposition::new(vec![(0..n).collect()], vec![]).unwrap()
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        elimination_decomposition(g, &order)
    };
    let td = if rng.gen_bool(0.5) {
        inflate(&td, rng)
    } else {
        td
    };
    if rng.gen_bool(0.5) {
        let root = rng.gen_range(0..td.len());
        td.with_root(root).unwrap()
    } else {
        td
    }
}

/// Adds redundant bags: leaves holding a subset of their neighbour, and
/// bags spliced into tree edges holding `B_t ∩ B_u` plus random extras
/// from `B_t ∪ B_u`. Both keep the decomposition valid.
pub fn inflate(td: &TreeDecomposition, rng: &mut impl Rng) -> TreeDecomposition {
    let mut bags = td.bags().to_vec();
    let mut edges = td.edges().to_vec();
    for _ in 0..rng.gen_range(1..6) {
        if rng.gen_bool(0.5) || edges.is_empty() {
            let t = rng.gen_range(0..bags.len());
            let sub: Vec<usize> = bags[t]
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            bags.push(sub);
            edges.push((t, bags.len() - 1));
        } else {
            let k = rng.gen_range(0..edges.len());
            let (t, u) = edges.swap_remove(k);
            let mut mid: BTreeSet<usize> = bags[t]
                .iter()
                .copied()
                .filter(|x| bags[u].contains(x))
                .collect();
            for &x in bags[t].iter().chain(bags[u].iter()) {
                if rng.gen_bool(0.3) {
                    mid.insert(x);
                }
            }
            bags.push(mid.into_iter().collect());
            let m = bags.len() - 1;
            edges.push((t, m));
            edges.push((m, u));
        }
    }
    TreeDecomposition::new(bags, edges).unwrap()
}

/// Minimum weight and number of minimum-weight nonzero codewords, by
/// Gaussian elimination over GF(2) and enumeration of the null space.
/// Requires `n_var <= 24`.
pub fn nullspace_min_weight(g: &TannerGraph) -> Option<(u32, u64)> {
    let n = g.n_var();
    assert!(n <= 24);
    let mut rows: Vec<u32> = (0..g.n_chk())
        .map(|c| g.check_neighbors(c).iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i] >> col & 1 == 1 {
                rows[i] ^= rows[r];
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<u32> = free
        .iter()
        .map(|&f| {
            let mut x = 1u32 << f;
            for (i, &p) in pivots.iter().enumerate() {
                if rows[i] >> f & 1 == 1 {
                    x |= 1 << p;
                }
            }
            x
        })
        .collect();
    let mut best: Option<(u32, u64)> = None;
    let mut word = 0u32;
    // Gray-code walk over all 2^k combinations of the basis.
    for i in 1u64..(1u64 << basis.len()) {
        word ^= basis[i.trailing_zeros() as usize];
        let w = word.count_ones();
        best = match best {
            Some((bw, c)) if w == bw => Some((bw, c + 1)),
            Some((bw, _)) if w < bw => Some((w, 1)),
            None => Some((w, 1)),
            keep => keep,
        };
    }
    best
}

/// Syndrome of a variable set: true when every check sees an even number
/// of members.
pub fn is_codeword(g: &TannerGraph, members: &[usize]) -> bool {
    (0..g.n_chk()).all(|c| {
        g.check_neighbors(c)
            .iter()
            .filter(|v| members.contains(v))
            .count()
            % 2
            == 0
    })
}

/// Odd-check count computed straight from the adjacency lists.
pub fn odd_checks(g: &TannerGraph, members: &[usize]) -> usize {
    (0..g.n_chk())
        .filter(|&c| {
            g.check_neighbors(c)
                .iter()
                .filter(|v| members.contains(v))
                .count()
                % 2
                == 1
        })
        .count()
}

type B0Key = (BTreeSet<usize>, BTreeSet<usize>);

fn merge(map: &mut BTreeMap<B0Key, (u32, u128)>, key: B0Key, f: u32, g: u128) {
    match map.get_mut(&key) {
        None => {
            map.insert(key, (f, g));
        }
        Some(e) if f < e.0 => *e = (f, g),
        Some(e) if f == e.0 => e.1 += g,
        Some(_) => {}
    }
}

fn odd_bag_checks(g: &TannerGraph, q: &BTreeSet<usize>, bag_c: &[usize]) -> BTreeSet<usize> {
    bag_c
        .iter()
        .copied()
        .filter(|&c| {
            g.check_neighbors(c)
                .iter()
                .filter(|v| q.contains(v))
                .count()
                % 2
                == 1
        })
        .collect()
}

fn sym_diff(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
    a.symmetric_difference(b).copied().collect()
}

/// Minimum distance by the `b = 0` recursion with keys `(R, Q)` held as
/// ordered sets of global ids. Shares no code with the library's engine.
pub fn b0_reference(g: &TannerGraph, ntd: &NiceTreeDecomposition) -> Option<(u32, u128)> {
    let mut tables: Vec<BTreeMap<B0Key, (u32, u128)>> = Vec::with_capacity(ntd.len());
    for node in ntd.nodes() {
        let mut out = BTreeMap::new();
        match node.kind {
            NiceKind::Leaf => {}
            NiceKind::IntroduceVar(v) => {
                let child = &tables[node.children[0]];
                let r_v: BTreeSet<usize> = odd_bag_checks(g, &BTreeSet::from([v]), &node.bag_c);
                for ((r, q), &(f, cnt)) in child {
                    out.insert((r.clone(), q.clone()), (f, cnt));
                    if !(r.is_empty() && q.is_empty()) {
                        let mut q2 = q.clone();
                        q2.insert(v);
                        out.insert((sym_diff(r, &r_v), q2), (f + 1, cnt));
                    }
                }
                out.insert((r_v, BTreeSet::from([v])), (1, 1));
            }
            NiceKind::ForgetVar(v) => {
                for ((r, q), &(f, cnt)) in &tables[node.children[0]] {
                    let mut q2 = q.clone();
                    q2.remove(&v);
                    merge(&mut out, (r.clone(), q2), f, cnt);
                }
            }
            NiceKind::IntroduceChk(c) => {
                for ((r, q), &(f, cnt)) in &tables[node.children[0]] {
                    let mut r2 = r.clone();
                    if g.check_neighbors(c)
                        .iter()
                        .filter(|v| q.contains(v))
                        .count()
                        % 2
                        == 1
                    {
                        r2.insert(c);
                    }
                    out.insert((r2, q.clone()), (f, cnt));
                }
            }
            NiceKind::ForgetChk(c) => {
                for ((r, q), &(f, cnt)) in &tables[node.children[0]] {
                    if !r.contains(&c) {
                        merge(&mut out, (r.clone(), q.clone()), f, cnt);
                    }
                }
            }
            NiceKind::Join => {
                let (l, rt) = (&tables[node.children[0]], &tables[node.children[1]]);
                for ((r1, q1), &(f1, g1)) in l {
                    for ((r2, q2), &(f2, g2)) in rt {
                        if q1 != q2 {
                            continue;
                        }
                        let shared = odd_bag_checks(g, q1, &node.bag_c);
                        let r = sym_diff(&sym_diff(r1, r2), &shared);
                        merge(
                            &mut out,
                            (r, q1.clone()),
                            f1 + f2 - q1.len() as u32,
                            g1 * g2,
                        );
                    }
                }
                for ((r, q), &(f, cnt)) in l.iter().chain(rt.iter()) {
                    if q.is_empty() {
                        merge(&mut out, (r.clone(), q.clone()), f, cnt);
                    }
                }
            }
        }
        tables.push(out);
    }
    tables
        .last()
        .and_then(|t| t.get(&(BTreeSet::new(), BTreeSet::new())))
        .copied()
}
