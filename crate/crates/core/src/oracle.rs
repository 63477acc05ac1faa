//! Exhaustive ground truth at desk scale.
//!
//! The brute solvers enumerate candidate edge sets of the union graph and
//! delegate the injective coloring to [`assign_colors`], an augmenting-path
//! maximum bipartite matching between edges and their color sets. Size
//! guards are hard errors so no acceptance run can silently take hours.

use std::collections::BTreeMap;

use crate::collection::{Color, Graph, GraphCollection, Pair, Transversal};
use crate::{Error, Result};

const BRUTE_HAMILTON_MAX_N: usize = 12;
const BRUTE_MATCHING_MAX_N: usize = 14;
const MAX_SEARCH_NODES: u64 = 10_000_000;

/// Injective edge-to-color map where each edge lies in its assigned graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<Pair, Color>,
}

impl Assignment {
    pub fn get(&self, e: Pair) -> Option<Color> {
        self.map.get(&e).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, Color)> + '_ {
        self.map.iter().map(|(&e, &c)| (e, c))
    }

    pub fn into_transversal(self) -> Transversal {
        Transversal::from_entries(self.map.into_iter().collect())
    }
}

/// Bijection from `edges` onto `1..=s` respecting color membership, or
/// `None` when no such bijection exists.
///
/// Augmenting-path maximum matching on the incidence between edges and
/// their color sets; a perfect matching on the edge side is exactly a valid
/// bijection since `|edges| = s`.
pub fn assign_colors(c: &GraphCollection, edges: &[Pair]) -> Result<Option<Assignment>> {
    let s = c.color_count();
    if edges.len() != s {
        return Err(Error::input(format!(
            "assign_colors needs exactly s = {s} edges, got {}",
            edges.len()
        )));
    }
    let options: Vec<Vec<Color>> = edges
        .iter()
        .map(|e| (1..=s).filter(|&col| c.has_color(*e, col)).collect())
        .collect();

    // color_owner[col-1] = index of the edge currently holding col
    let mut color_owner: Vec<Option<usize>> = vec![None; s];
    for start in 0..edges.len() {
        let mut visited = vec![false; s];
        if !augment(start, &options, &mut color_owner, &mut visited) {
            return Ok(None);
        }
    }
    let mut map = BTreeMap::new();
    for (ci, owner) in color_owner.iter().enumerate() {
        if let Some(ei) = owner {
            map.insert(edges[*ei], ci + 1);
        }
    }
    Ok(Some(Assignment { map }))
}

fn augment(
    edge: usize,
    options: &[Vec<Color>],
    color_owner: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &col in &options[edge] {
        if visited[col - 1] {
            continue;
        }
        visited[col - 1] = true;
        if color_owner[col - 1].is_none()
            || augment(color_owner[col - 1].unwrap(), options, color_owner, visited)
        {
            color_owner[col - 1] = Some(edge);
            return true;
        }
    }
    false
}

fn union_graph(c: &GraphCollection) -> Graph {
    let n = c.n();
    let mut g = Graph::empty(n);
    for layer in c.graphs() {
        for e in layer.edges() {
            g.add_edge(e.0, e.1);
        }
    }
    g
}

/// First Hamiltonian transversal found by exhausting the Hamilton cycles of
/// the union graph, or `None` when no cycle admits a bijective coloring.
///
/// Cycles are enumerated from start vertex 0 with the direction
/// canonicalized (second vertex smaller than last), so the output is
/// deterministic.
pub fn brute_hamilton(c: &GraphCollection) -> Result<Option<Transversal>> {
    let n = c.n();
    if n > BRUTE_HAMILTON_MAX_N {
        return Err(Error::input(format!(
            "brute hamilton is guarded at n <= {BRUTE_HAMILTON_MAX_N}, got n = {n}"
        )));
    }
    if n < 3 {
        return Err(Error::input("a Hamilton cycle needs n >= 3"));
    }
    if c.color_count() != n {
        return Err(Error::input(format!(
            "a Hamiltonian transversal has n = {n} edges, so s must equal n (got s = {})",
            c.color_count()
        )));
    }
    let union = union_graph(c);
    let mut path = vec![0usize];
    let mut used = vec![false; n];
    used[0] = true;
    let mut found = None;
    hamilton_search(c, &union, &mut path, &mut used, &mut found);
    Ok(found)
}

fn hamilton_search(
    c: &GraphCollection,
    union: &Graph,
    path: &mut Vec<usize>,
    used: &mut Vec<bool>,
    found: &mut Option<Transversal>,
) {
    if found.is_some() {
        return;
    }
    let n = union.n();
    if path.len() == n {
        let last = *path.last().unwrap();
        // canonical direction: path[1] < path[n-1]
        if union.has_edge(last, 0) && path[1] < last {
            let edges: Vec<Pair> = (0..n)
                .map(|i| Pair::new(path[i], path[(i + 1) % n]))
                .collect();
            if let Ok(Some(a)) = assign_colors(c, &edges) {
                *found = Some(a.into_transversal());
            }
        }
        return;
    }
    let cur = *path.last().unwrap();
    for next in union.neighbors(cur) {
        if used[next] {
            continue;
        }
        used[next] = true;
        path.push(next);
        hamilton_search(c, union, path, used, found);
        path.pop();
        used[next] = false;
        if found.is_some() {
            return;
        }
    }
}

/// First perfect-matching transversal found by exhausting the perfect
/// matchings of the union graph (always extending at the smallest unmatched
/// vertex), or `None`.
pub fn brute_perfect_matching(c: &GraphCollection) -> Result<Option<Transversal>> {
    let n = c.n();
    if n % 2 != 0 {
        return Err(Error::input("a perfect matching needs even n"));
    }
    if n > BRUTE_MATCHING_MAX_N {
        return Err(Error::input(format!(
            "brute matching is guarded at n <= {BRUTE_MATCHING_MAX_N}, got n = {n}"
        )));
    }
    if c.color_count() != n / 2 {
        return Err(Error::input(format!(
            "a perfect-matching transversal has n/2 = {} edges, so s must equal n/2 (got s = {})",
            n / 2,
            c.color_count()
        )));
    }
    let union = union_graph(c);
    let mut chosen = Vec::new();
    let mut used = vec![false; n];
    let mut found = None;
    matching_search(c, &union, &mut chosen, &mut used, &mut found);
    Ok(found)
}

fn matching_search(
    c: &GraphCollection,
    union: &Graph,
    chosen: &mut Vec<Pair>,
    used: &mut Vec<bool>,
    found: &mut Option<Transversal>,
) {
    if found.is_some() {
        return;
    }
    let n = union.n();
    let Some(u) = (0..n).find(|&v| !used[v]) else {
        if let Ok(Some(a)) = assign_colors(c, chosen) {
            *found = Some(a.into_transversal());
        }
        return;
    };
    used[u] = true;
    for w in union.neighbors(u) {
        if used[w] {
            continue;
        }
        used[w] = true;
        chosen.push(Pair::new(u, w));
        matching_search(c, union, chosen, used, found);
        chosen.pop();
        used[w] = false;
        if found.is_some() {
            break;
        }
    }
    used[u] = false;
}

/// Largest `k` such that some `k` disjoint edges admit an injective
/// coloring. Backtracking over union edges, assigning one color per chosen
/// edge; aborts with a guard error past [`MAX_SEARCH_NODES`] nodes.
pub fn max_rainbow_matching_size(c: &GraphCollection) -> Result<usize> {
    let n = c.n();
    let s = c.color_count();
    let edges = union_graph(c).edges();
    let mut best = 0usize;
    let mut nodes = 0u64;
    let mut used_v = vec![false; n];
    let mut used_c = vec![false; s + 1];
    max_matching_search(
        c, &edges, 0, 0, &mut used_v, &mut used_c, &mut best, &mut nodes,
    )?;
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn max_matching_search(
    c: &GraphCollection,
    edges: &[Pair],
    idx: usize,
    size: usize,
    used_v: &mut Vec<bool>,
    used_c: &mut Vec<bool>,
    best: &mut usize,
    nodes: &mut u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > MAX_SEARCH_NODES {
        return Err(Error::input(format!(
            "max rainbow matching search exceeded {MAX_SEARCH_NODES} nodes"
        )));
    }
    if size > *best {
        *best = size;
    }
    // upper bound: edges left and colors left both cap the extension
    let colors_left = used_c.iter().skip(1).filter(|&&u| !u).count();
    if size + (edges.len() - idx).min(colors_left) <= *best {
        return Ok(());
    }
    if idx == edges.len() {
        return Ok(());
    }
    let e = edges[idx];
    if !used_v[e.0] && !used_v[e.1] {
        for col in 1..=c.color_count() {
            if used_c[col] || !c.has_color(e, col) {
                continue;
            }
            used_v[e.0] = true;
            used_v[e.1] = true;
            used_c[col] = true;
            max_matching_search(c, edges, idx + 1, size + 1, used_v, used_c, best, nodes)?;
            used_v[e.0] = false;
            used_v[e.1] = false;
            used_c[col] = false;
        }
    }
    max_matching_search(c, edges, idx + 1, size, used_v, used_c, best, nodes)
}
