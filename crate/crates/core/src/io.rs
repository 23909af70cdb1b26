//! Edge-list and attribute file formats.
//!
//! Edge lists are UTF-8 text with one edge per line as two whitespace-separated
//! node labels. Lines starting with `#` are comments. An optional directive
//! `nodes: <N>` or `nodes: <label> <label> ...` declares the node set so that
//! isolates are representable. Labels are interned to dense indices in
//! first-appearance order, with a declared label list counting as appearing
//! first. With a bare count, nodes not named by any edge get labels `_<index>`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{ErgmError, Result};
use crate::graph::{Attribute, Network};

enum Declared {
    Count(usize),
    Labels(Vec<String>),
}

pub fn parse_edge_list(text: &str) -> Result<Network> {
    let mut declared: Option<(usize, Declared)> = None;
    let mut raw_edges: Vec<(usize, String, String)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("nodes:") {
            if declared.is_some() {
                return Err(ErgmError::parse(lineno, "duplicate `nodes:` directive"));
            }
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            let decl = match tokens.as_slice() {
                [] => return Err(ErgmError::parse(lineno, "empty `nodes:` directive")),
                [one] if one.parse::<usize>().is_ok() => Declared::Count(one.parse().unwrap()),
                many => Declared::Labels(many.iter().map(|s| s.to_string()).collect()),
            };
            declared = Some((lineno, decl));
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => raw_edges.push((lineno, a.to_string(), b.to_string())),
            _ => {
                return Err(ErgmError::parse(
                    lineno,
                    format!("expected two node labels, found `{line}`"),
                ))
            }
        }
    }

    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut declared_count = None;
    match declared {
        Some((lineno, Declared::Labels(list))) => {
            for l in list {
                if index.contains_key(&l) {
                    return Err(ErgmError::parse(lineno, format!("label `{l}` declared twice")));
                }
                index.insert(l.clone(), labels.len());
                labels.push(l);
            }
            declared_count = Some((lineno, labels.len()));
        }
        Some((lineno, Declared::Count(n))) => declared_count = Some((lineno, n)),
        None => {}
    }
    let labels_fixed = declared_count.is_some() && !labels.is_empty();

    let mut edges = Vec::with_capacity(raw_edges.len());
    for (lineno, a, b) in &raw_edges {
        let mut intern = |l: &String| -> Result<usize> {
            if let Some(&v) = index.get(l) {
                return Ok(v);
            }
            if labels_fixed {
                return Err(ErgmError::parse(*lineno, format!("label `{l}` is not declared")));
            }
            index.insert(l.clone(), labels.len());
            labels.push(l.clone());
            Ok(labels.len() - 1)
        };
        let (u, v) = (intern(a)?, intern(b)?);
        edges.push((*lineno, u, v));
    }

    if let Some((lineno, n)) = declared_count {
        if labels.len() > n {
            return Err(ErgmError::parse(
                lineno,
                format!("declared {n} nodes but edges name {}", labels.len()),
            ));
        }
        while labels.len() < n {
            let mut l = format!("_{}", labels.len());
            while index.contains_key(&l) {
                l.push('_');
            }
            index.insert(l.clone(), labels.len());
            labels.push(l);
        }
    }

    let mut net = Network::with_labels(labels);
    for (lineno, u, v) in edges {
        if u == v {
            return Err(ErgmError::parse(lineno, format!("self-loop on `{}`", net.label(u))));
        }
        if net.has_edge(u, v) {
            return Err(ErgmError::parse(
                lineno,
                format!("duplicate edge `{}` `{}`", net.label(u), net.label(v)),
            ));
        }
        net.set_dyad(u, v, true);
    }
    Ok(net)
}

/// Writes `net` in the edge-list format, always with a `nodes:` label list.
pub fn write_edge_list(net: &Network) -> String {
    let mut out = String::new();
    let _ = write!(out, "nodes:");
    for l in net.labels() {
        let _ = write!(out, " {l}");
    }
    out.push('\n');
    for (i, j) in net.edges() {
        let _ = writeln!(out, "{} {}", net.label(i), net.label(j));
    }
    out
}

/// Reads a CSV attribute table whose first column holds node labels and
/// attaches every other column to `net`. A column is numeric when every
/// value parses as `f64`, categorical otherwise. Nodes absent from the table
/// get `NaN` / empty-string values.
pub fn attach_attributes(net: &mut Network, csv_text: &str) -> Result<()> {
    let mut lines = csv_text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| ErgmError::parse(1, "attribute file has no header"))?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if names.len() < 2 {
        return Err(ErgmError::parse(1, "attribute header needs a label column and at least one attribute"));
    }
    let index: HashMap<&str, usize> = net
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let mut cells: Vec<Vec<Option<String>>> = vec![vec![None; net.node_count()]; names.len() - 1];
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(ErgmError::parse(
                idx + 1,
                format!("expected {} fields, found {}", names.len(), fields.len()),
            ));
        }
        let Some(&v) = index.get(fields[0]) else {
            return Err(ErgmError::parse(idx + 1, format!("unknown node `{}`", fields[0])));
        };
        for (c, f) in fields[1..].iter().enumerate() {
            cells[c][v] = Some(f.to_string());
        }
    }
    for (name, column) in names[1..].iter().zip(cells) {
        let numeric: Option<Vec<f64>> = column
            .iter()
            .map(|c| match c {
                None => Some(f64::NAN),
                Some(s) => s.parse::<f64>().ok(),
            })
            .collect();
        let attr = match numeric {
            Some(v) => Attribute::Numeric(v),
            None => Attribute::Categorical(column.into_iter().map(Option::unwrap_or_default).collect()),
        };
        net.set_attribute(name.clone(), attr)?;
    }
    Ok(())
}
