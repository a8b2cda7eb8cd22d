//! The `.qv` text format.
//!
//! ```text
//! # comment
//! vertex v1            # dimension defaults to 1
//! vertex v2 dim 3
//! arrow a: v1 -> v2
//! arrow v2 -> v1       # name generated
//! ```
//!
//! Vertices declared with dimension 0 are dropped together with their
//! arrows, leaving a genuine setting.

use std::collections::{HashMap, HashSet};

use super::{fresh_name, valid_name, Arrow, QuiverSetting, Vertex};
use crate::error::{Error, Result};

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// 1-based column of `token` inside `line`, found by pointer offset.
fn column_of(line: &str, token: &str) -> usize {
    let base = line.as_ptr() as usize;
    let at = token.as_ptr() as usize;
    if at >= base && at <= base + line.len() {
        at - base + 1
    } else {
        1
    }
}

pub fn parse(input: &str) -> Result<QuiverSetting> {
    struct PendingArrow {
        name: Option<String>,
        source: String,
        target: String,
        line: usize,
        columns: [usize; 2],
    }

    let mut vertices: Vec<(String, u32)> = Vec::new();
    let mut vertex_names = HashSet::new();
    let mut arrows: Vec<PendingArrow> = Vec::new();

    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let (keyword, rest) = match trimmed.find(char::is_whitespace) {
            Some(i) => (&trimmed[..i], &trimmed[i..]),
            None => (trimmed.trim_end(), ""),
        };
        match keyword {
            "vertex" => {
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                let (name, dim) = match tokens.as_slice() {
                    [name] => (*name, 1),
                    [name, "dim", k] => {
                        let dim = k.parse::<u32>().map_err(|_| {
                            parse_error(lineno, column_of(raw, k), format!("bad dimension {k:?}"))
                        })?;
                        (*name, dim)
                    }
                    _ => {
                        return Err(parse_error(
                            lineno,
                            column_of(raw, keyword),
                            "expected `vertex <name> [dim <k>]`",
                        ))
                    }
                };
                if !valid_name(name) {
                    return Err(parse_error(lineno, column_of(raw, name), format!("invalid vertex name {name:?}")));
                }
                if !vertex_names.insert(name.to_owned()) {
                    return Err(parse_error(lineno, column_of(raw, name), format!("vertex {name} declared twice")));
                }
                vertices.push((name.to_owned(), dim));
            }
            "arrow" => {
                let (name, ends) = match rest.find(':') {
                    Some(i) => (Some(rest[..i].trim()), &rest[i + 1..]),
                    None => (None, rest),
                };
                if let Some(name) = name {
                    if !valid_name(name) {
                        return Err(parse_error(lineno, column_of(raw, rest), format!("invalid arrow name {name:?}")));
                    }
                }
                let Some((src, dst)) = ends.split_once("->") else {
                    return Err(parse_error(lineno, column_of(raw, ends), "expected `<src> -> <dst>`"));
                };
                let (src, dst) = (src.trim(), dst.trim());
                for end in [src, dst] {
                    if !valid_name(end) {
                        return Err(parse_error(lineno, column_of(raw, end), format!("invalid vertex name {end:?}")));
                    }
                }
                arrows.push(PendingArrow {
                    name: name.map(str::to_owned),
                    source: src.to_owned(),
                    target: dst.to_owned(),
                    line: lineno,
                    columns: [column_of(raw, src), column_of(raw, dst)],
                });
            }
            other => {
                return Err(parse_error(
                    lineno,
                    column_of(raw, other),
                    format!("unknown declaration {other:?}"),
                ))
            }
        }
    }

    let dims: HashMap<&str, u32> = vertices.iter().map(|(n, d)| (n.as_str(), *d)).collect();
    let mut index = HashMap::new();
    let mut kept = Vec::new();
    for (name, dim) in &vertices {
        if *dim > 0 {
            index.insert(name.as_str(), kept.len());
            kept.push(Vertex::fresh(name.clone(), *dim));
        }
    }

    let mut taken: HashSet<String> = HashSet::new();
    for a in &arrows {
        for (end, column) in [&a.source, &a.target].into_iter().zip(a.columns) {
            if !dims.contains_key(end.as_str()) {
                return Err(parse_error(a.line, column, format!("undeclared vertex {end}")));
            }
        }
        if let Some(name) = &a.name {
            if !taken.insert(name.clone()) {
                return Err(parse_error(a.line, 1, format!("arrow {name} declared twice")));
            }
        }
    }

    let mut built = Vec::new();
    let mut counter = 0;
    for a in arrows {
        let (Some(&s), Some(&t)) = (index.get(a.source.as_str()), index.get(a.target.as_str())) else {
            continue;
        };
        let name = match a.name {
            Some(n) => n,
            None => {
                counter += 1;
                let n = fresh_name(&taken, &format!("a{counter}"));
                taken.insert(n.clone());
                n
            }
        };
        built.push(Arrow::new(name, s, t));
    }
    QuiverSetting::from_parts(kept, built)
}

pub fn serialize(q: &QuiverSetting) -> String {
    let mut out = String::new();
    for v in q.vertices() {
        if v.dim == 1 {
            out.push_str(&format!("vertex {}\n", v.id));
        } else {
            out.push_str(&format!("vertex {} dim {}\n", v.id, v.dim));
        }
    }
    for a in q.arrows() {
        out.push_str(&format!(
            "arrow {}: {} -> {}\n",
            a.id,
            q.vertex(a.source).id,
            q.vertex(a.target).id
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::is_isomorphic;

    #[test]
    fn parses_defaults_and_comments() {
        let q = parse("# g\nvertex x\nvertex y dim 3  # big\narrow x -> y\narrow b: y -> x\n").unwrap();
        assert_eq!(q.vertex_count(), 2);
        assert_eq!(q.dim(1), 3);
        assert_eq!(q.arrow(0).id.as_str(), "a1");
        assert_eq!(q.arrow(1).id.as_str(), "b");
    }

    #[test]
    fn generated_names_avoid_declared_ones() {
        let q = parse("vertex x\narrow x -> x\narrow a1: x -> x\n").unwrap();
        let names: Vec<_> = q.arrows().iter().map(|a| a.id.as_str()).collect();
        assert_eq!(names, ["a1_2", "a1"]);
    }

    #[test]
    fn zero_dimensional_vertices_are_dropped() {
        let q = parse("vertex x\nvertex z dim 0\narrow x -> z\narrow z -> x\narrow x -> x\n").unwrap();
        assert_eq!(q.vertex_count(), 1);
        assert_eq!(q.arrow_count(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("vertex x\narrow x -> y\n") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("vertx x\n"), Err(Error::Parse { line: 1, column: 1, .. })));
        assert!(matches!(parse("vertex x dim two\n"), Err(Error::Parse { line: 1, column: 14, .. })));
        assert!(matches!(parse("vertex x-y\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_keeps_ids() {
        let src = "vertex p dim 2\nvertex q\narrow r: p -> q\narrow s: q -> p\narrow t: p -> p\n";
        let q = parse(src).unwrap();
        assert_eq!(serialize(&q), src);
        let again = parse(&serialize(&q)).unwrap();
        assert!(is_isomorphic(&q, &again));
        assert_eq!(again, q);
    }
}
