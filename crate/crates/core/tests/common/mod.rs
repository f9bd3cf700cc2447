#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use procmap::synthetic::{random_log, RandomLogShape};
use procmap::EventLog;

/// Log with one single-letter activity per character.
pub fn log_of(traces: &[&str]) -> EventLog {
    let seqs: Vec<Vec<String>> = traces
        .iter()
        .map(|t| t.chars().map(|c| c.to_string()).collect())
        .collect();
    EventLog::from_sequences(&seqs).unwrap()
}

pub fn repeat(trace: &'static str, n: usize) -> impl Iterator<Item = &'static str> {
    std::iter::repeat_n(trace, n)
}

/// Two loops sharing B and C: BC in 6 of 11 cases, BCD in 7 of 11.
pub fn two_loop_log() -> EventLog {
    let traces: Vec<&str> = repeat("ABCBE", 3)
        .chain(repeat("ABCDBE", 4))
        .chain(repeat("ABCBCDBE", 3))
        .chain(repeat("ACDE", 1))
        .collect();
    log_of(&traces)
}

/// Random log with a seed-derived shape inside the given bounds.
pub fn bounded_random_log(
    seed: u64,
    max_cases: usize,
    max_len: usize,
    max_alphabet: usize,
) -> EventLog {
    let cases = 1 + (seed.wrapping_mul(2654435761) % max_cases as u64) as usize;
    let alphabet = 2 + (seed.wrapping_mul(40503) % (max_alphabet as u64 - 1)) as usize;
    random_log(
        seed,
        RandomLogShape {
            cases,
            max_len,
            alphabet: alphabet.min(max_alphabet),
        },
    )
    .unwrap()
}

pub type CycleCounts = BTreeMap<Vec<String>, (usize, usize)>;

/// Every segment `t[i..j]` of distinct activities with `t[j] == t[i]`;
/// values are (occurrences, cases).
pub fn brute_force_cycles(traces: &[Vec<String>]) -> CycleCounts {
    let mut out: CycleCounts = BTreeMap::new();
    for t in traces {
        let mut in_trace = BTreeSet::new();
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if t[j] != t[i] {
                    continue;
                }
                let seg = &t[i..j];
                let distinct: BTreeSet<&String> = seg.iter().collect();
                if distinct.len() == seg.len() {
                    out.entry(seg.to_vec()).or_default().0 += 1;
                    in_trace.insert(seg.to_vec());
                }
            }
        }
        for seg in in_trace {
            out.entry(seg).or_default().1 += 1;
        }
    }
    out
}

/// Node ids and edges of a DOT graph.
pub type DotGraph = (BTreeSet<String>, Vec<(String, String)>);

/// Minimal DOT reader: checks the statement grammar the renderer emits and
/// returns the nodes and edges of a `digraph`.
pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let mut lines = text.lines();
    let head = lines.next().ok_or("empty")?;
    if !(head.starts_with("digraph ") && head.ends_with(" {")) {
        return Err(format!("bad header `{head}`"));
    }
    let mut nodes = BTreeSet::new();
    let mut edges = Vec::new();
    let mut closed = false;
    for line in lines {
        if closed {
            return Err("content after closing brace".into());
        }
        if line == "}" {
            closed = true;
            continue;
        }
        let stmt = line
            .trim()
            .strip_suffix(';')
            .ok_or_else(|| format!("missing `;` in `{line}`"))?;
        let (target, attrs) = match stmt.find(" [") {
            Some(i) => (&stmt[..i], Some(&stmt[i + 2..])),
            None => (stmt, None),
        };
        if let Some(attrs) = attrs {
            let attrs = attrs.strip_suffix(']').ok_or("unclosed attribute list")?;
            check_attrs(attrs)?;
        } else if !target.contains('=') {
            return Err(format!("statement without attributes `{line}`"));
        }
        if matches!(target, "node" | "edge" | "graph") || target.contains('=') {
            continue;
        }
        if let Some((u, v)) = target.split_once(" -> ") {
            let (u, v) = (id(u)?, id(v)?);
            edges.push((u, v));
        } else {
            nodes.insert(id(target)?);
        }
    }
    if !closed {
        return Err("missing closing brace".into());
    }
    for (u, v) in &edges {
        if !nodes.contains(u) || !nodes.contains(v) {
            return Err(format!("edge {u} -> {v} uses an undeclared node"));
        }
    }
    Ok((nodes, edges))
}

fn id(s: &str) -> Result<String, String> {
    if let Some(inner) = s.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        return Ok(inner.to_string());
    }
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Ok(s.to_string())
    } else {
        Err(format!("bad id `{s}`"))
    }
}

fn check_attrs(attrs: &str) -> Result<(), String> {
    // split on commas outside quotes
    let mut parts = Vec::new();
    let (mut start, mut quoted, mut escaped) = (0, false, false);
    for (i, c) in attrs.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            ',' if !quoted => {
                parts.push(&attrs[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if quoted {
        return Err(format!("unterminated string in `{attrs}`"));
    }
    parts.push(&attrs[start..]);
    for p in parts {
        let (k, v) = p
            .trim()
            .split_once('=')
            .ok_or_else(|| format!("bad attribute `{p}`"))?;
        id(k)?;
        if !(v.starts_with('"') && v.ends_with('"') && v.len() >= 2) {
            let plain = v
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '#');
            if !plain || v.is_empty() {
                return Err(format!("bad value `{v}`"));
            }
        }
    }
    Ok(())
}
