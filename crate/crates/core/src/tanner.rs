//! Tanner graphs of binary LDPC codes.
//!
//! Variable nodes and check nodes live in two separate dense namespaces
//! (`0..n_var` and `0..n_chk`). Files that mix both kinds (the `.td`
//! exchange format) use a combined namespace where check `c` becomes
//! `n_var + c`; see [`TannerGraph::node`] and [`TannerGraph::combined_id`].

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Set of variable-node ids.
pub type VarSet = FixedBitSet;
/// Set of check-node ids.
pub type CheckSet = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TannerError {
    #[error("variable id {id} out of range (n_var = {n_var})")]
    VarOutOfRange { id: usize, n_var: usize },
    #[error("check id {id} out of range (n_chk = {n_chk})")]
    CheckOutOfRange { id: usize, n_chk: usize },
    #[error("duplicate edge between check {chk} and variable {var}")]
    DuplicateEdge { chk: usize, var: usize },
    #[error("invalid SC-LDPC parameters: {0}")]
    InvalidParams(String),
}

/// Error raised while reading an alist file. `line` is 1-indexed; 0 means
/// the error is not tied to a single line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("alist line {line}: {kind}")]
pub struct AlistError {
    pub line: usize,
    pub kind: AlistErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlistErrorKind {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("malformed header: {0}")]
    Header(String),
    #[error("not an integer: {0:?}")]
    NotInteger(String),
    #[error("degree mismatch: declared {declared}, found {found}")]
    DegreeMismatch { declared: usize, found: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
    #[error("row and column lists disagree")]
    Inconsistent,
}

/// A node in the combined namespace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Var(usize),
    Chk(usize),
}

/// Bipartite graph `G = (variables ∪ checks, E)` of a parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TannerGraph {
    n_var: usize,
    n_chk: usize,
    /// Sorted variable neighbours of each check (rows of H).
    check_adj: Vec<Vec<usize>>,
    /// Sorted check neighbours of each variable (columns of H).
    var_adj: Vec<Vec<usize>>,
}

/// Number of check nodes adjacent to a variable set, with its parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeParity {
    pub count: usize,
    pub odd: bool,
}

impl TannerGraph {
    /// Builds a graph from the variable neighbourhood of every check.
    pub fn from_check_lists(n_var: usize, rows: Vec<Vec<usize>>) -> Result<Self, TannerError> {
        let n_chk = rows.len();
        let mut check_adj = rows;
        let mut var_adj = vec![Vec::new(); n_var];
        for (c, row) in check_adj.iter_mut().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(TannerError::DuplicateEdge { chk: c, var: w[0] });
                }
            }
            for &v in row.iter() {
                if v >= n_var {
                    return Err(TannerError::VarOutOfRange { id: v, n_var });
                }
                var_adj[v].push(c);
            }
        }
        Ok(TannerGraph {
            n_var,
            n_chk,
            check_adj,
            var_adj,
        })
    }

    /// Builds a graph from a dense 0/1 parity-check matrix given row by row.
    pub fn from_dense<R: AsRef<[u8]>>(n_var: usize, rows: &[R]) -> Result<Self, TannerError> {
        let lists = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        Self::from_check_lists(n_var, lists)
    }

    pub fn n_var(&self) -> usize {
        self.n_var
    }

    pub fn n_chk(&self) -> usize {
        self.n_chk
    }

    /// Total number of nodes in the combined namespace.
    pub fn n_nodes(&self) -> usize {
        self.n_var + self.n_chk
    }

    pub fn n_edges(&self) -> usize {
        self.check_adj.iter().map(Vec::len).sum()
    }

    /// Sorted variable neighbours of check `c`.
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.check_adj[c]
    }

    /// Sorted check neighbours of variable `v`.
    pub fn var_neighbors(&self, v: usize) -> &[usize] {
        &self.var_adj[v]
    }

    pub fn is_edge(&self, v: usize, c: usize) -> bool {
        self.var_adj
            .get(v)
            .is_some_and(|adj| adj.binary_search(&c).is_ok())
    }

    /// All edges as `(var, chk)` pairs, ordered by check then variable.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.check_adj
            .iter()
            .enumerate()
            .flat_map(|(c, row)| row.iter().map(move |&v| (v, c)))
    }

    /// Maps a combined-namespace id to a typed node, if in range.
    pub fn node(&self, id: usize) -> Option<Node> {
        if id < self.n_var {
            Some(Node::Var(id))
        } else if id < self.n_nodes() {
            Some(Node::Chk(id - self.n_var))
        } else {
            None
        }
    }

    pub fn combined_id(&self, node: Node) -> usize {
        match node {
            Node::Var(v) => v,
            Node::Chk(c) => self.n_var + c,
        }
    }

    /// Neighbours of a combined-namespace node, as combined ids.
    pub fn combined_neighbors(&self, id: usize) -> Vec<usize> {
        match self.node(id) {
            Some(Node::Var(v)) => self.var_adj[v].iter().map(|&c| self.n_var + c).collect(),
            Some(Node::Chk(c)) => self.check_adj[c].clone(),
            None => Vec::new(),
        }
    }

    fn check_var_set(&self, s: &VarSet) -> Result<(), TannerError> {
        match s.ones().next_back() {
            Some(v) if v >= self.n_var => Err(TannerError::VarOutOfRange {
                id: v,
                n_var: self.n_var,
            }),
            _ => Ok(()),
        }
    }

    fn check_chk_id(&self, c: usize) -> Result<(), TannerError> {
        if c < self.n_chk {
            Ok(())
        } else {
            Err(TannerError::CheckOutOfRange {
                id: c,
                n_chk: self.n_chk,
            })
        }
    }

    /// Checks with an odd number of neighbours in `s`, optionally
    /// intersected with `restrict`. The empty set has no odd checks.
    pub fn gamma_odd(
        &self,
        s: &VarSet,
        restrict: Option<&CheckSet>,
    ) -> Result<CheckSet, TannerError> {
        self.check_var_set(s)?;
        if let Some(r) = restrict {
            if let Some(c) = r.ones().next_back() {
                self.check_chk_id(c)?;
            }
        }
        let mut odd = CheckSet::with_capacity(self.n_chk);
        for v in s.ones() {
            for &c in &self.var_adj[v] {
                odd.toggle(c);
            }
        }
        if let Some(r) = restrict {
            odd.intersect_with(r);
        }
        Ok(odd)
    }

    /// `|N(c) ∩ q|` and its parity; an empty intersection counts as even.
    pub fn edge_count_parity(&self, c: usize, q: &VarSet) -> Result<EdgeParity, TannerError> {
        self.check_chk_id(c)?;
        self.check_var_set(q)?;
        let count = self.check_adj[c].iter().filter(|&&v| q.contains(v)).count();
        Ok(EdgeParity {
            count,
            odd: count % 2 == 1,
        })
    }

    /// Parses the MacKay alist format. Zero padding is accepted and dropped.
    pub fn parse_alist(text: &[u8]) -> Result<Self, AlistError> {
        let text = std::str::from_utf8(text).map_err(|_| AlistError {
            line: 0,
            kind: AlistErrorKind::Encoding,
        })?;
        let lines: Vec<&str> = text.lines().collect();
        // Missing trailing lines are read as empty lists (zero-degree nodes).
        let line_at = |i: usize| lines.get(i).copied().unwrap_or("");
        let ints = |i: usize| -> Result<Vec<usize>, AlistError> {
            line_at(i)
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| AlistError {
                        line: i + 1,
                        kind: AlistErrorKind::NotInteger(tok.to_string()),
                    })
                })
                .collect()
        };
        let header_err = |line: usize, msg: &str| AlistError {
            line,
            kind: AlistErrorKind::Header(msg.to_string()),
        };

        let dims = ints(0)?;
        let [n, m] = dims[..] else {
            return Err(header_err(1, "expected \"n m\""));
        };
        let maxes = ints(1)?;
        let [max_col, max_row] = maxes[..] else {
            return Err(header_err(2, "expected \"max_col_degree max_row_degree\""));
        };
        let col_deg = ints(2)?;
        if col_deg.len() != n {
            return Err(header_err(
                3,
                &format!("expected {n} column degrees, found {}", col_deg.len()),
            ));
        }
        let row_deg = ints(3)?;
        if row_deg.len() != m {
            return Err(header_err(
                4,
                &format!("expected {m} row degrees, found {}", row_deg.len()),
            ));
        }
        let actual_max_col = col_deg.iter().copied().max().unwrap_or(0);
        if actual_max_col != max_col {
            return Err(AlistError {
                line: 2,
                kind: AlistErrorKind::DegreeMismatch {
                    declared: max_col,
                    found: actual_max_col,
                },
            });
        }
        let actual_max_row = row_deg.iter().copied().max().unwrap_or(0);
        if actual_max_row != max_row {
            return Err(AlistError {
                line: 2,
                kind: AlistErrorKind::DegreeMismatch {
                    declared: max_row,
                    found: actual_max_row,
                },
            });
        }

        let read_list = |i: usize, declared: usize, max: usize| -> Result<Vec<usize>, AlistError> {
            let mut list: Vec<usize> = ints(i)?.into_iter().filter(|&x| x != 0).collect();
            if list.len() != declared {
                return Err(AlistError {
                    line: i + 1,
                    kind: AlistErrorKind::DegreeMismatch {
                        declared,
                        found: list.len(),
                    },
                });
            }
            if let Some(&bad) = list.iter().find(|&&x| x > max) {
                return Err(AlistError {
                    line: i + 1,
                    kind: AlistErrorKind::IndexOutOfRange { index: bad, max },
                });
            }
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(AlistError {
                    line: i + 1,
                    kind: AlistErrorKind::DuplicateIndex(w[0]),
                });
            }
            Ok(list.into_iter().map(|x| x - 1).collect())
        };

        let mut var_adj = Vec::with_capacity(n);
        for (j, &deg) in col_deg.iter().enumerate() {
            var_adj.push(read_list(4 + j, deg, m)?);
        }
        let mut check_adj = Vec::with_capacity(m);
        for (i, &deg) in row_deg.iter().enumerate() {
            check_adj.push(read_list(4 + n + i, deg, n)?);
        }

        let g = TannerGraph::from_check_lists(n, check_adj).map_err(|_| AlistError {
            line: 0,
            kind: AlistErrorKind::Inconsistent,
        })?;
        if g.var_adj != var_adj {
            return Err(AlistError {
                line: 0,
                kind: AlistErrorKind::Inconsistent,
            });
        }
        Ok(g)
    }

    /// Writes the canonical alist form: sorted lists, no padding.
    pub fn serialize_alist(&self) -> Vec<u8> {
        let mut out = String::new();
        let join = |xs: &mut dyn Iterator<Item = usize>| {
            xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let col_deg: Vec<usize> = self.var_adj.iter().map(Vec::len).collect();
        let row_deg: Vec<usize> = self.check_adj.iter().map(Vec::len).collect();
        let _ = writeln!(out, "{} {}", self.n_var, self.n_chk);
        let _ = writeln!(
            out,
            "{} {}",
            col_deg.iter().max().unwrap_or(&0),
            row_deg.iter().max().unwrap_or(&0)
        );
        let _ = writeln!(out, "{}", join(&mut col_deg.iter().copied()));
        let _ = writeln!(out, "{}", join(&mut row_deg.iter().copied()));
        for adj in self.var_adj.iter().chain(self.check_adj.iter()) {
            let _ = writeln!(out, "{}", join(&mut adj.iter().map(|x| x + 1)));
        }
        out.into_bytes()
    }
}

/// Parameters of a randomly generated spatially coupled LDPC code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ScLdpcParams {
    /// Check rows per block.
    pub base_rows: usize,
    /// Variable columns per block.
    pub base_cols: usize,
    /// Number of variable blocks (L).
    pub coupling_len: usize,
    /// Number of consecutive check blocks each variable block touches (w).
    pub coupling_width: usize,
    /// Column weight.
    pub var_degree: usize,
    pub seed: u64,
}

impl ScLdpcParams {
    pub fn validate(&self) -> Result<(), TannerError> {
        let err = |msg: String| Err(TannerError::InvalidParams(msg));
        if self.base_rows == 0 || self.base_cols == 0 {
            return err("base matrix dimensions must be positive".into());
        }
        if self.coupling_len == 0 {
            return err("coupling length must be at least 1".into());
        }
        if self.coupling_width == 0 {
            return err("coupling width must be at least 1".into());
        }
        let slots = self.base_rows * self.coupling_width;
        if self.var_degree > slots {
            return err(format!(
                "variable degree {} exceeds the {} checks reachable from a block",
                self.var_degree, slots
            ));
        }
        Ok(())
    }

    pub fn n_var(&self) -> usize {
        self.base_cols * self.coupling_len
    }

    /// Number of check blocks, `L + w - 1`.
    pub fn n_check_blocks(&self) -> usize {
        self.coupling_len + self.coupling_width - 1
    }

    pub fn n_chk(&self) -> usize {
        self.base_rows * self.n_check_blocks()
    }

    pub fn var_block(&self, v: usize) -> usize {
        v / self.base_cols
    }

    pub fn check_block(&self, c: usize) -> usize {
        c / self.base_rows
    }
}

/// Generates a random SC-LDPC code: every variable of block `j` is joined to
/// `var_degree` distinct checks drawn uniformly from check blocks
/// `j..j + w`. Deterministic for a fixed seed.
pub fn generate_sc_ldpc(p: &ScLdpcParams) -> Result<TannerGraph, TannerError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let window = p.base_rows * p.coupling_width;
    let mut rows = vec![Vec::new(); p.n_chk()];
    for v in 0..p.n_var() {
        let first_check = p.var_block(v) * p.base_rows;
        for offset in sample(&mut rng, window, p.var_degree) {
            rows[first_check + offset].push(v);
        }
    }
    TannerGraph::from_check_lists(p.n_var(), rows)
}
