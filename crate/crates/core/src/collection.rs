//! Colored graph collections, color-set queries, and certificate
//! verification.
//!
//! Vertices are `0..n-1`; colors (graph indices) are `1..=s` in every
//! external interface. A [`GraphCollection`] is immutable after
//! construction and safe to share read-only across threads.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::{Error, Result};

pub type Vertex = usize;
/// 1-based graph index.
pub type Color = usize;

/// Canonical unordered vertex pair: the smaller id always comes first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(pub Vertex, pub Vertex);

impl Pair {
    /// Canonicalizes the pair. Panics on a loop; use [`Pair::checked`] for
    /// untrusted input.
    pub fn new(u: Vertex, v: Vertex) -> Self {
        assert_ne!(u, v, "loops are not edges");
        if u < v {
            Pair(u, v)
        } else {
            Pair(v, u)
        }
    }

    pub fn checked(u: Vertex, v: Vertex, n: usize) -> Result<Self> {
        if u == v {
            return Err(Error::input(format!("edge {u}-{v} is a loop")));
        }
        if u >= n || v >= n {
            return Err(Error::input(format!(
                "edge {u}-{v} has a vertex out of range (n = {n})"
            )));
        }
        Ok(Pair::new(u, v))
    }

    pub fn touches(&self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`; panics if `v` is not an endpoint.
    pub fn other(&self, v: Vertex) -> Vertex {
        if self.0 == v {
            self.1
        } else {
            assert_eq!(self.1, v);
            self.0
        }
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// One simple undirected graph stored as bitset adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<BitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            rows: (0..n).map(|_| BitSet::new(n)).collect(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            let p = Pair::checked(u, v, n)?;
            g.add_edge(p.0, p.1);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        assert!(u != v && u < self.n && v < self.n);
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && self.rows[u].contains(v)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rows[v].len()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.rows[v].iter()
    }

    pub(crate) fn first_neighbor_not_in(&self, v: Vertex, excluded: &BitSet) -> Option<Vertex> {
        self.rows[v].first_not_in(excluded)
    }

    /// All edges in canonical lexicographic order.
    pub fn edges(&self) -> Vec<Pair> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.rows[u].iter() {
                if v > u {
                    out.push(Pair(u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }
}

/// The problem a transversal certificate is checked against.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Hamilton,
    Matching,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Hamilton => write!(f, "hamilton"),
            Problem::Matching => write!(f, "matching"),
        }
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamilton" => Ok(Problem::Hamilton),
            "matching" => Ok(Problem::Matching),
            other => Err(Error::input(format!("unknown problem '{other}'"))),
        }
    }
}

/// The set of colors whose graph contains a given edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorSet {
    colors: BTreeSet<Color>,
}

impl ColorSet {
    pub fn contains(&self, c: Color) -> bool {
        self.colors.contains(&c)
    }

    pub fn iter(&self) -> impl Iterator<Item = Color> + '_ {
        self.colors.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

impl FromIterator<Color> for ColorSet {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        ColorSet {
            colors: iter.into_iter().collect(),
        }
    }
}

/// `s` simple graphs on a common vertex set `0..n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCollection {
    n: usize,
    graphs: Vec<Graph>,
}

impl GraphCollection {
    pub fn new(n: usize, graphs: Vec<Graph>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::input("a collection needs at least one graph"));
        }
        for (i, g) in graphs.iter().enumerate() {
            if g.n() != n {
                return Err(Error::input(format!(
                    "graph {} is on {} vertices, expected {n}",
                    i + 1,
                    g.n()
                )));
            }
        }
        Ok(GraphCollection { n, graphs })
    }

    /// Collection of `s` identical graphs.
    pub fn uniform(n: usize, s: usize, g: Graph) -> Result<Self> {
        GraphCollection::new(n, vec![g; s])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of graphs (the color count `s`).
    pub fn color_count(&self) -> usize {
        self.graphs.len()
    }

    /// Graph of a 1-based color. Panics on an out-of-range color; public
    /// entry points validate first.
    pub fn graph(&self, color: Color) -> &Graph {
        &self.graphs[color - 1]
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    /// Whether edge `e` lies in the graph of `color`.
    #[inline]
    pub fn has_color(&self, e: Pair, color: Color) -> bool {
        self.graphs[color - 1].has_edge(e.0, e.1)
    }

    /// `c(e)`: exactly the colors whose graph contains `e`.
    pub fn color_set(&self, u: Vertex, v: Vertex) -> Result<ColorSet> {
        let e = Pair::checked(u, v, self.n)?;
        Ok((1..=self.color_count())
            .filter(|&c| self.has_color(e, c))
            .collect())
    }

    pub fn min_degree(&self, color: Color) -> Result<usize> {
        if color == 0 || color > self.color_count() {
            return Err(Error::input(format!(
                "color {color} out of range 1..={}",
                self.color_count()
            )));
        }
        Ok(self.graph(color).min_degree())
    }

    /// Dirac-type precondition for the constructive solvers. Degrees are
    /// integers, so `2*deg >= n` encodes `deg >= n/2` exactly for both
    /// parities.
    pub fn check_dirac(&self, problem: Problem) -> bool {
        let n = self.n;
        let s = self.color_count();
        let shape_ok = match problem {
            Problem::Hamilton => s == n && n >= 3,
            Problem::Matching => n >= 2 && n % 2 == 0 && s == n / 2,
        };
        shape_ok && self.graphs.iter().all(|g| 2 * g.min_degree() >= n)
    }

    pub fn verify_transversal(&self, t: &Transversal, problem: Problem) -> VerifyReport {
        verify(self, t, problem)
    }
}

/// A set of edges with an edge-to-color map. May hold invalid data; the
/// verifier reports what is wrong rather than refusing to represent it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversal {
    entries: Vec<(Pair, Color)>,
}

impl Transversal {
    pub fn from_entries(mut entries: Vec<(Pair, Color)>) -> Self {
        entries.sort();
        Transversal { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, Color)> + '_ {
        self.entries.iter().copied()
    }

    pub fn color_of(&self, e: Pair) -> Option<Color> {
        self.entries
            .iter()
            .find(|(p, _)| *p == e)
            .map(|(_, c)| *c)
    }
}

/// Tag names follow the verifier's external vocabulary.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    ShapeMismatch,
    NonInjectivePhi,
    ColorMembershipViolation,
    SizeMismatch,
    NotACycle,
    NotAPerfectMatching,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub detail: String,
}

/// Structured verdict: `valid` iff `failures` is empty.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn has(&self, kind: FailureKind) -> bool {
        self.failures.iter().any(|f| f.kind == kind)
    }
}

fn verify(c: &GraphCollection, t: &Transversal, problem: Problem) -> VerifyReport {
    let n = c.n();
    let s = c.color_count();
    let mut failures = Vec::new();
    let mut fail = |kind: FailureKind, detail: String| {
        failures.push(Failure { kind, detail });
    };

    let mut shape_ok = true;
    for (e, color) in t.iter() {
        if e.0 == e.1 || e.1 >= n {
            fail(
                FailureKind::ShapeMismatch,
                format!("edge {e} is not a valid vertex pair for n = {n}"),
            );
            shape_ok = false;
        }
        if color == 0 || color > s {
            fail(
                FailureKind::ShapeMismatch,
                format!("color {color} on edge {e} out of range 1..={s}"),
            );
            shape_ok = false;
        }
    }
    for w in t.entries.windows(2) {
        if w[0].0 == w[1].0 {
            fail(
                FailureKind::ShapeMismatch,
                format!("edge {} listed more than once", w[0].0),
            );
            shape_ok = false;
        }
    }

    if t.len() != s {
        fail(
            FailureKind::SizeMismatch,
            format!("{} edges, a full transversal needs {s}", t.len()),
        );
    }

    let mut seen = BTreeSet::new();
    for (e, color) in t.iter() {
        if (1..=s).contains(&color) && !seen.insert(color) {
            fail(
                FailureKind::NonInjectivePhi,
                format!("color {color} assigned to more than one edge (at {e})"),
            );
        }
    }

    for (e, color) in t.iter() {
        if (1..=s).contains(&color) && e.1 < n && e.0 != e.1 && !c.has_color(e, color) {
            fail(
                FailureKind::ColorMembershipViolation,
                format!("edge {e} is not in graph {color}"),
            );
        }
    }

    if shape_ok {
        match problem {
            Problem::Hamilton => {
                if !is_single_hamilton_cycle(n, t) {
                    fail(
                        FailureKind::NotACycle,
                        format!("edges do not form one cycle through all {n} vertices"),
                    );
                }
            }
            Problem::Matching => {
                if !is_perfect_matching(n, t) {
                    fail(
                        FailureKind::NotAPerfectMatching,
                        format!("edges do not form a perfect matching on {n} vertices"),
                    );
                }
            }
        }
    }

    VerifyReport {
        valid: failures.is_empty(),
        failures,
    }
}

fn is_single_hamilton_cycle(n: usize, t: &Transversal) -> bool {
    if n < 3 || t.len() != n {
        return false;
    }
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for (e, _) in t.iter() {
        adj[e.0].push(e.1);
        adj[e.1].push(e.0);
    }
    if adj.iter().any(|a| a.len() != 2) {
        return false;
    }
    // Walk the cycle from vertex 0; it must return after visiting all n.
    let mut prev = 0;
    let mut cur = adj[0][0];
    let mut steps = 1;
    while cur != 0 {
        let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
        prev = cur;
        cur = next;
        steps += 1;
        if steps > n {
            return false;
        }
    }
    steps == n
}

fn is_perfect_matching(n: usize, t: &Transversal) -> bool {
    if n % 2 != 0 || t.len() != n / 2 {
        return false;
    }
    let mut deg = vec![0usize; n];
    for (e, _) in t.iter() {
        deg[e.0] += 1;
        deg[e.1] += 1;
    }
    deg.iter().all(|&d| d == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn color_set_c4_k4() {
        let coll = GraphCollection::new(4, vec![c4(), Graph::complete(4)]).unwrap();
        let cs = coll.color_set(0, 2).unwrap();
        assert_eq!(cs.iter().collect::<Vec<_>>(), vec![2]);
        let cs = coll.color_set(0, 1).unwrap();
        assert_eq!(cs.iter().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn color_set_empty_graph() {
        let coll = GraphCollection::new(3, vec![Graph::empty(3)]).unwrap();
        assert!(coll.color_set(0, 1).unwrap().is_empty());
    }

    #[test]
    fn color_set_rejects_bad_input() {
        let coll = GraphCollection::new(3, vec![Graph::empty(3)]).unwrap();
        assert!(coll.color_set(0, 0).is_err());
        assert!(coll.color_set(0, 3).is_err());
    }

    #[test]
    fn min_degree_values() {
        let coll = GraphCollection::new(4, vec![Graph::complete(4)]).unwrap();
        assert_eq!(coll.min_degree(1).unwrap(), 3);
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let coll = GraphCollection::new(5, vec![c5]).unwrap();
        assert_eq!(coll.min_degree(1).unwrap(), 2);
        let coll = GraphCollection::new(3, vec![Graph::empty(3)]).unwrap();
        assert_eq!(coll.min_degree(1).unwrap(), 0);
        assert!(coll.min_degree(2).is_err());
    }

    fn two_triangles(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        let half = n / 2;
        for u in 0..half {
            for v in u + 1..half {
                g.add_edge(u, v);
            }
        }
        for u in half..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    #[test]
    fn dirac_checks() {
        let coll = GraphCollection::uniform(5, 5, Graph::complete(5)).unwrap();
        assert!(coll.check_dirac(Problem::Hamilton));

        let coll = GraphCollection::uniform(6, 3, two_triangles(6)).unwrap();
        assert!(!coll.check_dirac(Problem::Matching));

        let coll = GraphCollection::uniform(4, 4, c4()).unwrap();
        assert!(coll.check_dirac(Problem::Hamilton));

        // shape requirements
        let coll = GraphCollection::uniform(5, 4, Graph::complete(5)).unwrap();
        assert!(!coll.check_dirac(Problem::Hamilton));
        let coll = GraphCollection::uniform(5, 5, Graph::complete(5)).unwrap();
        assert!(!coll.check_dirac(Problem::Matching));
    }

    #[test]
    fn verify_valid_cycle() {
        let coll = GraphCollection::uniform(4, 4, Graph::complete(4)).unwrap();
        let t = Transversal::from_entries(vec![
            (Pair::new(0, 1), 1),
            (Pair::new(1, 2), 2),
            (Pair::new(2, 3), 3),
            (Pair::new(3, 0), 4),
        ]);
        let r = coll.verify_transversal(&t, Problem::Hamilton);
        assert!(r.valid, "{:?}", r.failures);
    }

    #[test]
    fn verify_duplicate_color() {
        let coll = GraphCollection::uniform(4, 4, Graph::complete(4)).unwrap();
        let t = Transversal::from_entries(vec![
            (Pair::new(0, 1), 1),
            (Pair::new(1, 2), 2),
            (Pair::new(2, 3), 1),
            (Pair::new(3, 0), 4),
        ]);
        let r = coll.verify_transversal(&t, Problem::Hamilton);
        assert!(!r.valid);
        assert!(r.has(FailureKind::NonInjectivePhi));
    }

    #[test]
    fn verify_path_is_not_a_cycle() {
        let coll = GraphCollection::uniform(4, 3, Graph::complete(4)).unwrap();
        let t = Transversal::from_entries(vec![
            (Pair::new(0, 1), 1),
            (Pair::new(1, 2), 2),
            (Pair::new(2, 3), 3),
        ]);
        let r = coll.verify_transversal(&t, Problem::Hamilton);
        assert!(!r.valid);
        assert!(r.has(FailureKind::NotACycle));
    }

    #[test]
    fn verify_membership_violation() {
        let coll = GraphCollection::new(4, vec![c4(), Graph::complete(4)]).unwrap();
        // 0-2 is a chord of C4, so it cannot take color 1.
        let t = Transversal::from_entries(vec![(Pair::new(0, 2), 1), (Pair::new(1, 3), 2)]);
        let r = coll.verify_transversal(&t, Problem::Matching);
        assert!(!r.valid);
        assert!(r.has(FailureKind::ColorMembershipViolation));
    }

    #[test]
    fn verify_two_disjoint_triangles_is_not_one_cycle() {
        let coll = GraphCollection::uniform(6, 6, Graph::complete(6)).unwrap();
        let t = Transversal::from_entries(vec![
            (Pair::new(0, 1), 1),
            (Pair::new(1, 2), 2),
            (Pair::new(0, 2), 3),
            (Pair::new(3, 4), 4),
            (Pair::new(4, 5), 5),
            (Pair::new(3, 5), 6),
        ]);
        let r = coll.verify_transversal(&t, Problem::Hamilton);
        assert!(!r.valid);
        assert!(r.has(FailureKind::NotACycle));
    }
}
