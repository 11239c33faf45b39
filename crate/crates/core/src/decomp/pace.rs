//! PACE 2017 `.td` reader and writer. Bag and node ids are 1-indexed in
//! the file and 0-indexed in memory.

use std::fmt::Write as _;

use super::{TdError, TreeDecomposition};

fn parse_err(line: usize, msg: impl Into<String>) -> TdError {
    TdError::Parse {
        line,
        msg: msg.into(),
    }
}

fn num(tok: &str, line: usize) -> Result<usize, TdError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("not an integer: {tok:?}")))
}

/// Parses a `.td` file. Returns the decomposition and the number of graph
/// nodes declared in the header.
pub fn parse_td(text: &str) -> Result<(TreeDecomposition, usize), TdError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => continue,
            Some(&"s") => {
                if header.is_some() {
                    return Err(parse_err(line, "duplicate header"));
                }
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(parse_err(
                        line,
                        "expected \"s td <bags> <max_bag> <nodes>\"",
                    ));
                }
                let h = (
                    num(toks[2], line)?,
                    num(toks[3], line)?,
                    num(toks[4], line)?,
                );
                bags = vec![None; h.0];
                header = Some(h);
            }
            Some(first) => {
                let Some((n_bags, max_bag, n_nodes)) = header else {
                    return Err(parse_err(line, "content before header"));
                };
                if *first == "b" {
                    let id = num(
                        toks.get(1)
                            .ok_or_else(|| parse_err(line, "missing bag id"))?,
                        line,
                    )?;
                    if id == 0 || id > n_bags {
                        return Err(parse_err(
                            line,
                            format!("bag id {id} out of range 1..={n_bags}"),
                        ));
                    }
                    if bags[id - 1].is_some() {
                        return Err(parse_err(line, format!("bag {id} declared twice")));
                    }
                    let mut bag = Vec::with_capacity(toks.len() - 2);
                    for tok in &toks[2..] {
                        let x = num(tok, line)?;
                        if x == 0 || x > n_nodes {
                            return Err(parse_err(
                                line,
                                format!("node id {x} out of range 1..={n_nodes}"),
                            ));
                        }
                        bag.push(x - 1);
                    }
                    bag.sort_unstable();
                    if bag.windows(2).any(|w| w[0] == w[1]) {
                        return Err(parse_err(line, "duplicate node in bag"));
                    }
                    if bag.len() > max_bag {
                        return Err(parse_err(
                            line,
                            format!("bag has {} nodes, header allows {max_bag}", bag.len()),
                        ));
                    }
                    bags[id - 1] = Some(bag);
                } else {
                    let [a, b] = toks[..] else {
                        return Err(parse_err(line, "expected a tree edge \"<bag> <bag>\""));
                    };
                    let (a, b) = (num(a, line)?, num(b, line)?);
                    if a == 0 || a > n_bags || b == 0 || b > n_bags {
                        return Err(parse_err(line, format!("bag id out of range 1..={n_bags}")));
                    }
                    edges.push((a - 1, b - 1));
                }
            }
        }
    }
    let Some((_, _, n_nodes)) = header else {
        return Err(parse_err(0, "missing header"));
    };
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| parse_err(0, format!("bag {} never declared", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((TreeDecomposition::new(bags, edges)?, n_nodes))
}

/// Writes a `.td` file: bags in index order with sorted contents, then the
/// tree edges in sorted order.
pub fn serialize_td(td: &TreeDecomposition, n_nodes: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s td {} {} {}", td.len(), td.max_bag_size(), n_nodes);
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for x in bag {
            let _ = write!(out, " {}", x + 1);
        }
        out.push('\n');
    }
    for &(a, b) in td.edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}
