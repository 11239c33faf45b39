//! Minimum size and exact number of the smallest `(a, b)`-trapping sets of
//! an LDPC code, computed by dynamic programming over a tree decomposition
//! of its Tanner graph. With `b = 0` this is the minimum distance and the
//! number of minimum-weight codewords.
//!
//! Module map:
//! - [`tanner`]: Tanner graphs, alist I/O, odd-check sets, SC-LDPC generation.
//! - [`decomp`]: tree decompositions, validation, nice form, builders, `.td` I/O.
//! - [`dp`]: the dynamic program and its node handlers.
//! - [`witness`]: recovery of one smallest trapping set.
//! - [`oracle`]: exhaustive search for small codes.
//! - [`cli`]: command-line front end and report schema.

pub mod cli;
pub mod decomp;
pub mod dp;
pub mod oracle;
pub mod tanner;
pub mod witness;

pub use decomp::{make_nice, NiceTreeDecomposition, TreeDecomposition};
pub use dp::{min_distance, run_dp, Count, Spectrum};
pub use tanner::{generate_sc_ldpc, ScLdpcParams, TannerGraph};
pub use witness::extract_witness;
