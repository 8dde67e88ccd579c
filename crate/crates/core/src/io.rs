//! Line-oriented text formats. Vertex ids are 1-indexed on the wire and
//! 0-indexed in memory; conversion happens only here.
//!
//! * graph: `c <comment>`, `p edge <N> <M>`, then exactly `M` lines `e <u> <v>`
//! * instance: a graph plus `p akc <k> <b> <p> [planar]`
//! * labels: `l <vertex> <label>`
//! * solution: `s yes|no`, optionally `v B <ids...>` and `v H <ids...>`
//! * CNF: DIMACS `p cnf <n> <m>` with zero-terminated clauses

use std::fmt::Write as _;
use std::time::Duration;

use thiserror::Error;

use crate::cnf::{CnfError, CnfFormula, Literal};
use crate::engagement::{AkcInstance, CascadeTrace, Solution, VertexSet};
use crate::graph::{Graph, GraphBuilder, GraphError};
use crate::solver::{Decision, SolveReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("expected {expected} {what}, found {found}")]
    CountMismatch { what: &'static str, expected: usize, found: usize },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T, FormatError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token.parse().map_err(|_| syntax(line, format!("invalid {what} `{token}`")))
}

/// 1-indexed wire id to internal id.
fn parse_vertex(token: Option<&str>, line: usize, n: usize) -> Result<usize, FormatError> {
    let id: usize = parse_num(token, line, "vertex id")?;
    if id == 0 || id > n {
        return Err(FormatError::Graph {
            line,
            source: GraphError::VertexOutOfRange { vertex: id.wrapping_sub(1), vertex_count: n },
        });
    }
    Ok(id - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AkcParams {
    pub k: usize,
    pub b: usize,
    pub p: usize,
    pub planar: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub params: Option<AkcParams>,
}

/// Parses a graph, an instance, or a graph with inline `l` label lines.
pub fn parse_graph_text(text: &str) -> Result<ParsedGraph, FormatError> {
    let mut builder: Option<GraphBuilder> = None;
    let mut declared_edges = 0;
    let mut seen_edges = 0;
    let mut params = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            None | Some("c") | Some("#") => {}
            Some(t) if t.starts_with('#') || t.starts_with('c') && t.len() > 1 && raw.starts_with("c\t") => {}
            Some("p") => match tokens.next() {
                Some("edge") => {
                    if builder.is_some() {
                        return Err(syntax(line, "second `p edge` header"));
                    }
                    let n: usize = parse_num(tokens.next(), line, "vertex count")?;
                    declared_edges = parse_num(tokens.next(), line, "edge count")?;
                    builder = Some(GraphBuilder::new(n));
                }
                Some("akc") => {
                    let k = parse_num(tokens.next(), line, "k")?;
                    let b = parse_num(tokens.next(), line, "b")?;
                    let p = parse_num(tokens.next(), line, "p")?;
                    let planar = match tokens.next() {
                        None => false,
                        Some("planar") => true,
                        Some(other) => return Err(syntax(line, format!("unexpected `{other}`"))),
                    };
                    params = Some(AkcParams { k, b, p, planar });
                }
                other => return Err(syntax(line, format!("unknown problem line `p {}`", other.unwrap_or("")))),
            },
            Some("e") => {
                let b = builder.as_mut().ok_or_else(|| syntax(line, "edge before `p edge` header"))?;
                let n = b.vertex_count();
                let u = parse_vertex(tokens.next(), line, n)?;
                let v = parse_vertex(tokens.next(), line, n)?;
                b.add_edge(u, v).map_err(|source| FormatError::Graph { line, source })?;
                seen_edges += 1;
            }
            Some("l") => {
                let b = builder.as_mut().ok_or_else(|| syntax(line, "label before `p edge` header"))?;
                let v = parse_vertex(tokens.next(), line, b.vertex_count())?;
                let label: Vec<&str> = tokens.collect();
                if label.is_empty() {
                    return Err(syntax(line, "empty label"));
                }
                b.set_label(v, label.join(" ")).map_err(|source| FormatError::Graph { line, source })?;
            }
            Some(other) => return Err(syntax(line, format!("unexpected line type `{other}`"))),
        }
    }
    let builder = builder.ok_or(FormatError::MissingHeader("p edge"))?;
    if seen_edges != declared_edges {
        return Err(FormatError::CountMismatch { what: "edges", expected: declared_edges, found: seen_edges });
    }
    Ok(ParsedGraph { graph: builder.build(), params })
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    parse_graph_text(text).map(|p| p.graph)
}

pub fn parse_instance(text: &str) -> Result<AkcInstance, FormatError> {
    let parsed = parse_graph_text(text)?;
    let params = parsed.params.ok_or(FormatError::MissingHeader("p akc"))?;
    Ok(AkcInstance::new(parsed.graph, params.k, params.b, params.p).planar(params.planar))
}

pub fn write_graph(graph: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p edge {} {}", graph.vertex_count(), graph.edge_count());
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

pub fn write_instance(inst: &AkcInstance) -> String {
    let mut out = write_graph(&inst.graph);
    let _ = write!(out, "p akc {} {} {}", inst.k, inst.b, inst.p);
    if inst.planar_claim {
        out.push_str(" planar");
    }
    out.push('\n');
    out
}

/// Sidecar label map, one `l <vertex> <label>` line per labelled vertex.
pub fn write_labels(graph: &Graph) -> String {
    let mut out = String::new();
    for v in graph.vertices() {
        if let Some(label) = graph.label(v) {
            let _ = writeln!(out, "l {} {}", v + 1, label);
        }
    }
    out
}

fn write_ids(out: &mut String, tag: &str, set: &VertexSet) {
    out.push_str("v ");
    out.push_str(tag);
    for v in set {
        let _ = write!(out, " {}", v + 1);
    }
    out.push('\n');
}

pub fn write_solution(answer: bool, solution: Option<&Solution>) -> String {
    let mut out = format!("s {}\n", if answer { "yes" } else { "no" });
    if let Some(sol) = solution {
        write_ids(&mut out, "B", &sol.anchors);
        write_ids(&mut out, "H", &sol.core);
    }
    out
}

/// Solution block followed by `# nodes=<n> time=<s> prefilter=<0|1>`. A timed
/// out search prints `s unknown`.
pub fn write_report(report: &SolveReport) -> String {
    let mut out = match report.decision {
        Decision::Yes => write_solution(true, Some(&report.best)),
        Decision::No => write_solution(false, Some(&report.best)),
        Decision::Unknown => {
            let mut s = String::from("s unknown\n");
            write_ids(&mut s, "B", &report.best.anchors);
            write_ids(&mut s, "H", &report.best.core);
            s
        }
    };
    for note in &report.notes {
        let _ = writeln!(out, "c {note}");
    }
    let _ = writeln!(
        out,
        "# nodes={} time={} prefilter={}",
        report.nodes_explored,
        format_seconds(report.wall_time),
        u8::from(report.prefilter_fired)
    );
    out
}

pub fn format_seconds(d: Duration) -> String {
    format!("{:.6}", d.as_secs_f64())
}

/// Returns the `s` answer (`None` for `unknown`) and the `v B` / `v H` sets.
pub fn parse_solution(text: &str) -> Result<(Option<bool>, Solution), FormatError> {
    let mut answer = None;
    let mut seen_answer = false;
    let mut sol = Solution::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            None | Some("c") | Some("#") => {}
            Some(t) if t.starts_with('#') => {}
            Some("s") => {
                answer = match tokens.next() {
                    Some("yes") => Some(true),
                    Some("no") => Some(false),
                    Some("unknown") => None,
                    other => return Err(syntax(line, format!("bad answer `{}`", other.unwrap_or("")))),
                };
                seen_answer = true;
            }
            Some("v") => {
                let target = match tokens.next() {
                    Some("B") => &mut sol.anchors,
                    Some("H") => &mut sol.core,
                    other => return Err(syntax(line, format!("bad set tag `{}`", other.unwrap_or("")))),
                };
                for token in tokens {
                    let id: usize = parse_num(Some(token), line, "vertex id")?;
                    if id == 0 {
                        return Err(syntax(line, "vertex ids are 1-indexed"));
                    }
                    target.insert(id - 1);
                }
            }
            Some(other) => return Err(syntax(line, format!("unexpected line type `{other}`"))),
        }
    }
    if !seen_answer {
        return Err(FormatError::MissingHeader("s"));
    }
    Ok((answer, sol))
}

pub const TRACE_CSV_HEADER: &str = "step,vertex,degree_at_removal";

pub fn write_trace_csv(trace: &CascadeTrace) -> String {
    let mut out = format!("{TRACE_CSV_HEADER}\n");
    for (step, &(v, d)) in trace.removal_order.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", step + 1, v + 1, d);
    }
    out
}

pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let mut tokens = trimmed.split_whitespace().skip(1);
            if tokens.next() != Some("cnf") {
                return Err(syntax(line, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parse_num(tokens.next(), line, "variable count")?;
            let m = parse_num(tokens.next(), line, "clause count")?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| syntax(line, "clause before `p cnf` header"))?;
        for token in trimmed.split_whitespace() {
            let value: i64 = parse_num(Some(token), line, "literal")?;
            match Literal::from_dimacs(value) {
                None => clauses.push(std::mem::take(&mut current)),
                Some(l) if l.var >= n => return Err(syntax(line, format!("literal {value} exceeds {n} variables"))),
                Some(l) => current.push(l),
            }
        }
    }
    let (n, m) = header.ok_or(FormatError::MissingHeader("p cnf"))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(FormatError::CountMismatch { what: "clauses", expected: m, found: clauses.len() });
    }
    Ok(CnfFormula::new(n, clauses)?)
}

pub fn write_dimacs_cnf(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.num_vars(), phi.num_clauses());
    for clause in phi.clauses() {
        for l in clause {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engagement::anchored_closure;
    use crate::graph::named::*;
    use proptest::prelude::*;

    #[test]
    fn graph_format() {
        let text = "c a square\np edge 4 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g, cycle(4));
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn graph_format_errors() {
        assert!(matches!(
            parse_graph("p edge 3 2\ne 1 2\ne 2 1\n"),
            Err(FormatError::Graph { line: 3, source: GraphError::DuplicateEdge(1, 0) })
        ));
        assert!(matches!(
            parse_graph("p edge 3 1\ne 2 2\n"),
            Err(FormatError::Graph { source: GraphError::SelfLoop(1), .. })
        ));
        assert!(matches!(parse_graph("p edge 3 2\ne 1 2\n"), Err(FormatError::CountMismatch { .. })));
        assert!(matches!(parse_graph("p edge 3 1\ne 1 4\n"), Err(FormatError::Graph { .. })));
        assert!(matches!(parse_graph("e 1 2\n"), Err(FormatError::Syntax { line: 1, .. })));
        assert!(matches!(parse_graph(""), Err(FormatError::MissingHeader("p edge"))));
    }

    #[test]
    fn instance_and_labels() {
        let mut b = path(3).to_builder();
        b.set_label(1, "mid point").unwrap();
        let inst = AkcInstance::new(b.build(), 2, 1, 3).planar(true);
        let text = write_instance(&inst) + &write_labels(&inst.graph);
        assert!(text.contains("p akc 2 1 3 planar\n"));
        assert!(text.contains("l 2 mid point\n"));
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert!(matches!(parse_instance(&write_graph(&inst.graph)), Err(FormatError::MissingHeader("p akc"))));
    }

    #[test]
    fn solution_format() {
        let sol = Solution::new([0, 4], 0..5);
        let text = write_solution(true, Some(&sol));
        assert_eq!(text, "s yes\nv B 1 5\nv H 1 2 3 4 5\n");
        assert_eq!(parse_solution(&text).unwrap(), (Some(true), sol));
        assert_eq!(parse_solution("s no\n").unwrap(), (Some(false), Solution::default()));
        assert!(parse_solution("v B 1\n").is_err());
        assert!(parse_solution("s yes\nv B 0\n").is_err());
    }

    #[test]
    fn trace_csv() {
        let (_, trace) = anchored_closure(&path(3), 2, &VertexSet::new()).unwrap();
        assert_eq!(write_trace_csv(&trace), "step,vertex,degree_at_removal\n1,1,1\n2,2,1\n3,3,0\n");
    }

    #[test]
    fn dimacs() {
        let text = "c two clauses\np cnf 2 2\n1 2 0\n-1 -2 0\n";
        let phi = parse_dimacs_cnf(text).unwrap();
        assert_eq!(phi, CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]).unwrap());
        assert_eq!(parse_dimacs_cnf(&write_dimacs_cnf(&phi)).unwrap(), phi);
        // clauses may span lines
        assert_eq!(parse_dimacs_cnf("p cnf 2 2\n1\n2 0 -1 -2 0\n").unwrap(), phi);
        assert!(matches!(parse_dimacs_cnf("p cnf 2 3\n1 2 0\n"), Err(FormatError::CountMismatch { .. })));
        assert!(parse_dimacs_cnf("p cnf 1 1\n2 0\n").is_err());
    }

    proptest! {
        #[test]
        fn graph_round_trip(n in 1usize..25, pairs in proptest::collection::vec((0usize..25, 0usize..25), 0..60)) {
            let mut b = GraphBuilder::new(n);
            for (u, v) in pairs {
                let (u, v) = (u % n, v % n);
                if u != v && !b.has_edge(u, v) {
                    b.add_edge(u, v).unwrap();
                }
            }
            let g = b.build();
            prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }

        #[test]
        fn solution_round_trip(b in proptest::collection::btree_set(0usize..50, 0..10),
                               h in proptest::collection::btree_set(0usize..50, 0..30),
                               answer: bool) {
            let sol = Solution { anchors: b, core: h };
            prop_assert_eq!(parse_solution(&write_solution(answer, Some(&sol))).unwrap(), (Some(answer), sol));
        }
    }
}
