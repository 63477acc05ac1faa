//! Text formats: the `rgc` instance format and JSON certificates.
//!
//! rgc grammar (one token-separated statement per line; `#` starts a
//! comment; blank lines are ignored):
//!
//! ```text
//! rgc 1
//! n <int> s <int>
//! g <i> <m_i>     # then m_i edge lines, for i = 1..s in order
//! <u> <v>
//! ```
//!
//! Vertices are 0-based, colors 1-based. The writer emits edges with
//! `u < v` in sorted order; the parser accepts either endpoint order and
//! normalizes. Certificates are a single JSON object
//! `{"problem":...,"n":...,"edges":[[u,v,color],...]}`.

use serde::{Deserialize, Serialize};

use crate::collection::{Graph, GraphCollection, Pair, Problem, Transversal};
use crate::{Error, Result};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// A statement line: its 1-based line number and whitespace-split tokens
/// with 1-based column positions.
struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

fn statements(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut col = 1;
        for tok in content.split_whitespace() {
            // locate the token for column reporting
            let off = content[col - 1..]
                .find(tok)
                .map(|o| col + o)
                .unwrap_or(col);
            tokens.push((off, tok));
            col = off + tok.len();
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: i + 1,
                tokens,
            });
        }
    }
    out
}

fn expect_int(line: &Line<'_>, idx: usize, what: &str) -> Result<usize> {
    let Some(&(col, tok)) = line.tokens.get(idx) else {
        return Err(parse_err(line.number, 1, format!("missing {what}")));
    };
    tok.parse::<usize>()
        .map_err(|_| parse_err(line.number, col, format!("expected {what}, found '{tok}'")))
}

fn expect_word(line: &Line<'_>, idx: usize, word: &str) -> Result<()> {
    match line.tokens.get(idx) {
        Some(&(_, tok)) if tok == word => Ok(()),
        Some(&(col, tok)) => Err(parse_err(
            line.number,
            col,
            format!("expected '{word}', found '{tok}'"),
        )),
        None => Err(parse_err(line.number, 1, format!("expected '{word}'"))),
    }
}

fn expect_len(line: &Line<'_>, len: usize) -> Result<()> {
    if line.tokens.len() > len {
        let (col, tok) = line.tokens[len];
        return Err(parse_err(
            line.number,
            col,
            format!("unexpected token '{tok}'"),
        ));
    }
    Ok(())
}

pub fn parse_rgc(text: &str) -> Result<GraphCollection> {
    let lines = statements(text);
    let mut it = lines.iter();

    let header = it
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty file, expected 'rgc 1'"))?;
    expect_word(header, 0, "rgc")?;
    let version = expect_int(header, 1, "format version")?;
    expect_len(header, 2)?;
    if version != 1 {
        return Err(parse_err(
            header.number,
            header.tokens[1].0,
            format!("unsupported rgc version {version}"),
        ));
    }

    let dims = it
        .next()
        .ok_or_else(|| parse_err(header.number, 1, "missing 'n <int> s <int>' line"))?;
    expect_word(dims, 0, "n")?;
    let n = expect_int(dims, 1, "vertex count")?;
    expect_word(dims, 2, "s")?;
    let s = expect_int(dims, 3, "graph count")?;
    expect_len(dims, 4)?;
    if s == 0 {
        return Err(parse_err(dims.number, 1, "graph count must be positive"));
    }

    let mut graphs = Vec::with_capacity(s);
    for expected_idx in 1..=s {
        let head = it.next().ok_or_else(|| {
            parse_err(dims.number, 1, format!("missing block for graph {expected_idx}"))
        })?;
        expect_word(head, 0, "g")?;
        let idx = expect_int(head, 1, "graph index")?;
        let m = expect_int(head, 2, "edge count")?;
        expect_len(head, 3)?;
        if idx != expected_idx {
            return Err(parse_err(
                head.number,
                head.tokens[1].0,
                format!("expected graph {expected_idx}, found {idx}"),
            ));
        }
        let mut g = Graph::empty(n);
        for _ in 0..m {
            let edge_line = it.next().ok_or_else(|| {
                parse_err(
                    head.number,
                    1,
                    format!("graph {idx} declares {m} edges but the file ends early"),
                )
            })?;
            let u = expect_int(edge_line, 0, "vertex id")?;
            let v = expect_int(edge_line, 1, "vertex id")?;
            expect_len(edge_line, 2)?;
            let p = Pair::checked(u, v, n)
                .map_err(|e| parse_err(edge_line.number, 1, e.to_string()))?;
            if g.has_edge(p.0, p.1) {
                return Err(parse_err(
                    edge_line.number,
                    1,
                    format!("duplicate edge {p} in graph {idx}"),
                ));
            }
            g.add_edge(p.0, p.1);
        }
        graphs.push(g);
    }
    if let Some(extra) = it.next() {
        let (col, tok) = extra.tokens[0];
        return Err(parse_err(
            extra.number,
            col,
            format!("unexpected trailing statement '{tok}'"),
        ));
    }
    GraphCollection::new(n, graphs)
}

/// Canonical text form: sorted edges with `u < v`. `parse_rgc` of the
/// output reproduces the collection exactly.
pub fn write_rgc(c: &GraphCollection) -> String {
    let mut out = String::new();
    out.push_str("rgc 1\n");
    out.push_str(&format!("n {} s {}\n", c.n(), c.color_count()));
    for i in 1..=c.color_count() {
        let edges = c.graph(i).edges();
        out.push_str(&format!("g {} {}\n", i, edges.len()));
        for e in edges {
            out.push_str(&format!("{} {}\n", e.0, e.1));
        }
    }
    out
}

/// Serialized solution: `problem` tag, vertex count, and `(u, v, color)`
/// triples with 0-based vertices and 1-based colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub problem: Problem,
    pub n: usize,
    pub edges: Vec<[usize; 3]>,
}

impl Certificate {
    pub fn from_transversal(problem: Problem, n: usize, t: &Transversal) -> Self {
        Certificate {
            problem,
            n,
            edges: t.iter().map(|(e, c)| [e.0, e.1, c]).collect(),
        }
    }

    /// Reconstructs the transversal. Pairs are canonicalized but not
    /// validated: loops and out-of-range vertices stay representable so the
    /// verifier can report them as shape-mismatch findings.
    pub fn to_transversal(&self) -> Transversal {
        let entries = self
            .edges
            .iter()
            .map(|&[u, v, c]| (Pair(u.min(v), u.max(v)), c))
            .collect();
        Transversal::from_entries(entries)
    }
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("bad certificate: {e}"),
    })
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut s = serde_json::to_string(cert).expect("certificate serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::FailureKind;
    use crate::gen;
    use proptest::prelude::*;

    #[test]
    fn parse_minimal_triangle() {
        let text = "rgc 1\nn 3 s 1\ng 1 3\n0 1\n1 2\n0 2\n";
        let c = parse_rgc(text).unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.color_count(), 1);
        assert_eq!(c.graph(1).edge_count(), 3);
        assert_eq!(c.min_degree(1).unwrap(), 2);
    }

    #[test]
    fn parse_accepts_comments_and_blank_lines() {
        let text = "# instance\nrgc 1\n\nn 3 s 1  # dims\ng 1 1\n2 0\n";
        let c = parse_rgc(text).unwrap();
        assert!(c.graph(1).has_edge(0, 2));
    }

    #[test]
    fn parse_rejects_loop() {
        let text = "rgc 1\nn 3 s 1\ng 1 1\n0 0\n";
        let err = parse_rgc(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn parse_rejects_duplicate_edge() {
        let text = "rgc 1\nn 3 s 1\ng 1 2\n0 1\n1 0\n";
        assert!(parse_rgc(text).is_err());
    }

    #[test]
    fn parse_rejects_edge_count_mismatch() {
        let text = "rgc 1\nn 3 s 1\ng 1 2\n0 1\n";
        assert!(parse_rgc(text).is_err());
        // too many edges shows up as a trailing statement
        let text = "rgc 1\nn 3 s 1\ng 1 1\n0 1\n1 2\n";
        assert!(parse_rgc(text).is_err());
    }

    #[test]
    fn parse_rejects_out_of_range_vertex() {
        let text = "rgc 1\nn 3 s 1\ng 1 1\n0 3\n";
        assert!(parse_rgc(text).is_err());
    }

    #[test]
    fn write_then_parse_is_identity_on_canonical_text() {
        let c = gen::gen_random_dirac(9, Problem::Hamilton, 3).unwrap();
        let text = write_rgc(&c);
        let c2 = parse_rgc(&text).unwrap();
        assert_eq!(c, c2);
        assert_eq!(write_rgc(&c2), text);
    }

    #[test]
    fn certificate_round_trip_verifies_identically() {
        let c = gen::gen_random_dirac(8, Problem::Hamilton, 5).unwrap();
        let t = crate::hamilton::find_hamilton(&c).unwrap();
        let cert = Certificate::from_transversal(Problem::Hamilton, c.n(), &t);
        let parsed = parse_certificate(&write_certificate(&cert)).unwrap();
        assert_eq!(parsed, cert);
        let t2 = parsed.to_transversal();
        assert_eq!(t, t2);
        assert!(c.verify_transversal(&t2, Problem::Hamilton).valid);
    }

    #[test]
    fn corrupted_certificate_fails_verification() {
        let c = gen::gen_random_dirac(8, Problem::Hamilton, 5).unwrap();
        let t = crate::hamilton::find_hamilton(&c).unwrap();
        let mut cert = Certificate::from_transversal(Problem::Hamilton, c.n(), &t);
        cert.edges[0][2] = cert.edges[1][2]; // duplicate a color
        let t2 = cert.to_transversal();
        let report = c.verify_transversal(&t2, Problem::Matching);
        assert!(!report.valid);
        let report = c.verify_transversal(&t2, Problem::Hamilton);
        assert!(!report.valid);
        assert!(report.has(FailureKind::NonInjectivePhi));
    }

    prop_compose! {
        fn arb_collection()(n in 2usize..8, s in 1usize..5)(
            n in Just(n),
            edges in proptest::collection::vec(
                proptest::collection::vec((0usize..8, 0usize..8), 0..20),
                s,
            ),
        ) -> GraphCollection {
            let graphs = edges
                .into_iter()
                .map(|es| {
                    let mut g = Graph::empty(n);
                    for (u, v) in es {
                        let (u, v) = (u % n, v % n);
                        if u != v {
                            g.add_edge(u, v);
                        }
                    }
                    g
                })
                .collect();
            GraphCollection::new(n, graphs).unwrap()
        }
    }

    proptest! {
        #[test]
        fn rgc_round_trip(c in arb_collection()) {
            let text = write_rgc(&c);
            let parsed = parse_rgc(&text).unwrap();
            prop_assert_eq!(&parsed, &c);
            prop_assert_eq!(write_rgc(&parsed), text);
        }

        /// color_set agrees with a direct per-graph membership scan
        #[test]
        fn color_set_matches_direct_scan(c in arb_collection(), u in 0usize..8, v in 0usize..8) {
            let (u, v) = (u % c.n(), v % c.n());
            prop_assume!(u != v);
            let cs = c.color_set(u, v).unwrap();
            for col in 1..=c.color_count() {
                let direct = c.graph(col).edges().contains(&Pair::new(u, v));
                prop_assert_eq!(cs.contains(col), direct);
            }
        }

        /// adding edges never makes check_dirac flip from true to false
        #[test]
        fn dirac_is_monotone_under_adding_edges(
            c in arb_collection(),
            extra in proptest::collection::vec((0usize..8, 0usize..8, 0usize..5), 1..10),
        ) {
            for problem in [Problem::Hamilton, Problem::Matching] {
                let before = c.check_dirac(problem);
                let mut graphs: Vec<Graph> = c.graphs().to_vec();
                let count = graphs.len();
                for (u, v, gi) in &extra {
                    let (u, v) = (u % c.n(), v % c.n());
                    if u != v {
                        graphs[gi % count].add_edge(u, v);
                    }
                }
                let bigger = GraphCollection::new(c.n(), graphs).unwrap();
                if before {
                    prop_assert!(bigger.check_dirac(problem));
                }
            }
        }
    }
}
