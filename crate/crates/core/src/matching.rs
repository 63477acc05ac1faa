//! Constructive perfect-matching-transversal solver.
//!
//! Growth: greedy edges in the smallest missed color, then weight-3 swaps,
//! until the matching has `n/2 - 1` edges. Completion: the matching digraph
//! is built and a fixed priority of guarded moves finishes the last edge —
//! complete at a high-in-degree free vertex, free a high-in-degree matched
//! vertex and complete, or run the final exchange. Under the Dirac
//! condition one of them always applies; a stall is an `Invariant` error.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bits::BitSet;
use crate::collection::{Color, GraphCollection, Pair, Problem, Transversal, Vertex};
use crate::digraph::Digraph;
use crate::{Error, Result};

/// Matching partial transversal. Edges keep their insertion order, which
/// fixes the iteration order of the swap and completion searches.
#[derive(Clone, Debug)]
pub struct MatchState {
    n: usize,
    s: usize,
    edges: Vec<Pair>,
    colors: Vec<Color>,
    partner: Vec<Option<Vertex>>,
    vertex_color: Vec<Option<Color>>,
    missed: BTreeSet<Color>,
}

impl MatchState {
    pub fn empty(coll: &GraphCollection) -> Self {
        let n = coll.n();
        let s = coll.color_count();
        MatchState {
            n,
            s,
            edges: Vec::new(),
            colors: Vec::new(),
            partner: vec![None; n],
            vertex_color: vec![None; n],
            missed: (1..=s).collect(),
        }
    }

    /// Builds and fully validates a state; intended for tests and replay.
    pub fn from_parts(coll: &GraphCollection, entries: &[(Pair, Color)]) -> Result<Self> {
        let mut state = MatchState::empty(coll);
        for &(e, c) in entries {
            if e.1 >= state.n {
                return Err(Error::input(format!("vertex {} out of range", e.1)));
            }
            state.add_edge(e, c);
        }
        state.validate(coll).map_err(Error::Input)?;
        Ok(state)
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn entries(&self) -> Vec<(Pair, Color)> {
        self.edges.iter().copied().zip(self.colors.iter().copied()).collect()
    }

    pub fn missed(&self) -> impl Iterator<Item = Color> + '_ {
        self.missed.iter().copied()
    }

    pub fn partner(&self, v: Vertex) -> Option<Vertex> {
        self.partner[v]
    }

    pub fn free_vertices(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| self.partner[v].is_none()).collect()
    }

    pub fn to_transversal(&self) -> Transversal {
        Transversal::from_entries(self.entries())
    }

    fn add_edge(&mut self, e: Pair, c: Color) {
        self.edges.push(e);
        self.colors.push(c);
        self.partner[e.0] = Some(e.1);
        self.partner[e.1] = Some(e.0);
        self.vertex_color[e.0] = Some(c);
        self.vertex_color[e.1] = Some(c);
        self.missed.remove(&c);
    }

    fn remove_edge_at(&mut self, idx: usize) -> (Pair, Color) {
        let e = self.edges.remove(idx);
        let c = self.colors.remove(idx);
        self.partner[e.0] = None;
        self.partner[e.1] = None;
        self.vertex_color[e.0] = None;
        self.vertex_color[e.1] = None;
        self.missed.insert(c);
        (e, c)
    }

    fn remove_edge(&mut self, e: Pair) -> Color {
        let idx = self
            .edges
            .iter()
            .position(|&f| f == e)
            .expect("edge present in matching");
        self.remove_edge_at(idx).1
    }

    fn matched_mask(&self) -> BitSet {
        let mut m = BitSet::new(self.n);
        for v in 0..self.n {
            if self.partner[v].is_some() {
                m.insert(v);
            }
        }
        m
    }

    pub fn validate(&self, coll: &GraphCollection) -> std::result::Result<(), String> {
        let mut seen = BTreeSet::new();
        for (e, c) in self.entries() {
            if e.0 == e.1 || e.1 >= self.n {
                return Err(format!("bad pair {e}"));
            }
            if !seen.insert(e.0) || !seen.insert(e.1) {
                return Err("edges are not disjoint".into());
            }
            if c == 0 || c > self.s {
                return Err(format!("color {c} out of range"));
            }
            if !coll.has_color(e, c) {
                return Err(format!("edge {e} not in graph {c}"));
            }
        }
        let used: BTreeSet<Color> = self.colors.iter().copied().collect();
        if used.len() != self.colors.len() {
            return Err("color used twice".into());
        }
        let missed: BTreeSet<Color> = (1..=self.s).filter(|c| !used.contains(c)).collect();
        if missed != self.missed {
            return Err("missed-color set out of sync".into());
        }
        for v in 0..self.n {
            match self.partner[v] {
                Some(w) => {
                    if self.partner[w] != Some(v) || !seen.contains(&v) {
                        return Err("partner table out of sync".into());
                    }
                    let e = Pair::new(v, w);
                    let idx = self.edges.iter().position(|&f| f == e);
                    if idx.is_none() || self.vertex_color[v] != Some(self.colors[idx.unwrap()]) {
                        return Err("vertex color table out of sync".into());
                    }
                }
                None => {
                    if seen.contains(&v) || self.vertex_color[v].is_some() {
                        return Err("partner table out of sync".into());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dump(&self) -> String {
        serde_json::json!({
            "edges": self.edges.iter().map(|e| [e.0, e.1]).collect::<Vec<_>>(),
            "colors": self.colors,
        })
        .to_string()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthMove {
    /// New edge in the smallest missed color, disjoint from the matching.
    Greedy,
    /// Replace one matched edge by two crossing edges in the two smallest
    /// missed colors (total weight at least 3).
    WeightSwap,
}

/// How the last edge was completed.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompletionKind {
    /// The missed color joins the two free vertices.
    TrivialPair,
    /// A free vertex with in-degree at least `n/2 - 1` absorbed a matched
    /// edge.
    FreeHighIndegree,
    /// A matched vertex with in-degree at least `n/2` was freed first.
    ReduceThenComplete,
    /// The final exchange through the matching digraph.
    FinalAugment,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchStats {
    pub n: usize,
    pub growth_steps: usize,
    pub greedy_moves: u32,
    pub swap_moves: u32,
    pub completion: CompletionKind,
}

pub struct MatchingOutcome {
    pub transversal: Transversal,
    pub stats: MatchStats,
}

fn half_minus_one(n: usize) -> usize {
    n / 2 - 1
}

/// One growth step; the size increases by exactly one.
pub fn grow_matching_step(state: &MatchState, coll: &GraphCollection) -> Result<MatchState> {
    grow_matching_step_kind(state, coll).map(|(s, _)| s)
}

pub fn grow_matching_step_kind(
    state: &MatchState,
    coll: &GraphCollection,
) -> Result<(MatchState, GrowthMove)> {
    let n = state.n;
    if state.size() >= half_minus_one(n) {
        return Err(Error::input(format!(
            "grow_matching_step requires fewer than n/2 - 1 = {} edges",
            half_minus_one(n)
        )));
    }

    // (a) greedy: smallest missed color, smallest canonical free pair
    let m = *state.missed.iter().next().expect("missed color exists");
    let g = coll.graph(m);
    let matched = state.matched_mask();
    let mut excluded = matched.clone();
    for u in 0..n {
        if state.partner[u].is_some() {
            continue;
        }
        excluded.insert(u); // only look for w > u, canonical order
        if let Some(w) = g.first_neighbor_not_in(u, &excluded) {
            let mut next = state.clone();
            next.add_edge(Pair::new(u, w), m);
            debug_assert_eq!(next.validate(coll), Ok(()));
            return Ok((next, GrowthMove::Greedy));
        }
    }

    // (b) weight swap with the two smallest missed colors and free vertices
    let mut missed_it = state.missed.iter().copied();
    let (ma, mb) = (missed_it.next().unwrap(), missed_it.next().unwrap());
    let free = state.free_vertices();
    let (x, xp) = (free[0], free[1]);
    for idx in 0..state.edges.len() {
        let Pair(u, v) = state.edges[idx];
        let weight = usize::from(coll.has_color(Pair::new(x, u), ma))
            + usize::from(coll.has_color(Pair::new(x, v), ma))
            + usize::from(coll.has_color(Pair::new(xp, u), mb))
            + usize::from(coll.has_color(Pair::new(xp, v), mb));
        if weight < 3 {
            continue;
        }
        let pairings = [[(x, u, ma), (xp, v, mb)], [(x, v, ma), (xp, u, mb)]];
        for pairing in pairings {
            if pairing
                .iter()
                .all(|&(a, b, c)| coll.has_color(Pair::new(a, b), c))
            {
                let mut next = state.clone();
                next.remove_edge_at(idx);
                for (a, b, c) in pairing {
                    next.add_edge(Pair::new(a, b), c);
                }
                debug_assert_eq!(next.validate(coll), Ok(()));
                return Ok((next, GrowthMove::WeightSwap));
            }
        }
    }
    Err(Error::invariant(
        "grow_matching_step",
        "neither greedy extension nor weight swap applies",
        state.dump(),
    ))
}

/// Matching digraph: an arc `x -> w` for every matched `x` (partner `z`)
/// and `w` other than `z` such that the color of `x z` appears on `x w`.
/// Free vertices have no out-arcs.
pub fn build_match_digraph(state: &MatchState, coll: &GraphCollection) -> Digraph {
    let mut d = Digraph::new(state.n);
    for x in 0..state.n {
        let Some(z) = state.partner[x] else { continue };
        let g = coll.graph(state.vertex_color[x].expect("matched vertex has a color"));
        for w in g.neighbors(x) {
            if w != z {
                d.add_arc(x, w);
            }
        }
    }
    d
}

fn completion_shape(state: &MatchState) -> Result<(Color, Vertex, Vertex)> {
    let n = state.n;
    if state.size() != half_minus_one(n) {
        return Err(Error::input(format!(
            "completion requires exactly n/2 - 1 = {} edges, got {}",
            half_minus_one(n),
            state.size()
        )));
    }
    let m = *state.missed.iter().next().expect("one missed color");
    let free = state.free_vertices();
    debug_assert_eq!(free.len(), 2);
    Ok((m, free[0], free[1]))
}

/// Completion at a free vertex whose in-degree reaches `n/2 - 1`: removes
/// one matched edge `y y'` with an arc `y -> x` and `x' y'` in the missed
/// color. Also takes the trivial completion when the missed color joins the
/// two free vertices (required for the witness counting of the other
/// moves). Returns `None` when no free vertex meets the bound.
pub fn complete_free_high_indeg(
    state: &MatchState,
    d: &Digraph,
    coll: &GraphCollection,
) -> Result<Option<(Transversal, CompletionKind)>> {
    let (m, f0, f1) = completion_shape(state)?;
    if coll.has_color(Pair::new(f0, f1), m) {
        let mut entries = state.entries();
        entries.push((Pair::new(f0, f1), m));
        let t = Transversal::from_entries(entries);
        debug_assert!(coll.verify_transversal(&t, Problem::Matching).valid);
        return Ok(Some((t, CompletionKind::TrivialPair)));
    }
    let ell = half_minus_one(state.n);
    let x = [f0, f1].into_iter().find(|&v| d.in_degree(v) >= ell);
    let Some(x) = x else { return Ok(None) };
    let xp = if x == f0 { f1 } else { f0 };
    for idx in 0..state.edges.len() {
        let Pair(u, v) = state.edges[idx];
        let col = state.colors[idx];
        for (y, yp) in [(u, v), (v, u)] {
            if d.has_arc(y, x) && coll.has_color(Pair::new(xp, yp), m) {
                let mut entries = state.entries();
                entries.remove(idx);
                entries.push((Pair::new(x, y), col));
                entries.push((Pair::new(xp, yp), m));
                let t = Transversal::from_entries(entries);
                debug_assert!(coll.verify_transversal(&t, Problem::Matching).valid);
                return Ok(Some((t, CompletionKind::FreeHighIndegree)));
            }
        }
    }
    Err(Error::invariant(
        "complete_free_high_indeg",
        "in-degree bound met but no completing edge exists",
        state.dump(),
    ))
}

/// Frees a matched vertex whose in-degree reaches `n/2`, handing the state
/// back with that vertex free and its in-degree still at least `n/2 - 1`,
/// so [`complete_free_high_indeg`] is guaranteed to succeed next. Returns
/// `None` when no matched vertex meets the bound.
pub fn reduce_matched_high_indeg(
    state: &MatchState,
    d: &Digraph,
    coll: &GraphCollection,
) -> Result<Option<MatchState>> {
    let (m, z0, z1) = completion_shape(state)?;
    let ell = half_minus_one(state.n);
    let x = (0..state.n).find(|&v| state.partner[v].is_some() && d.in_degree(v) >= ell + 1);
    let Some(x) = x else { return Ok(None) };
    let y = state.partner[x].unwrap();
    let c2 = state.vertex_color[x].unwrap();

    // (i) re-match y to a free vertex in the missed color or its own color
    for i in [m, c2] {
        for zt in [z0, z1] {
            if coll.has_color(Pair::new(y, zt), i) {
                let mut next = state.clone();
                next.remove_edge(Pair::new(x, y));
                next.add_edge(Pair::new(y, zt), i);
                debug_assert_eq!(next.validate(coll), Ok(()));
                return Ok(Some(next));
            }
        }
    }

    // (ii) route through a matched vertex u adjacent to y in x's color
    // whose partner reaches a free vertex in the missed color
    for (za, _) in [(z0, z1), (z1, z0)] {
        for u in 0..state.n {
            if u == x || u == y || state.partner[u].is_none() {
                continue;
            }
            let up = state.partner[u].unwrap();
            if coll.has_color(Pair::new(y, u), c2) && coll.has_color(Pair::new(up, za), m) {
                let mut next = state.clone();
                next.remove_edge(Pair::new(x, y));
                next.remove_edge(Pair::new(u, up));
                next.add_edge(Pair::new(u, y), c2);
                next.add_edge(Pair::new(up, za), m);
                debug_assert_eq!(next.validate(coll), Ok(()));
                return Ok(Some(next));
            }
        }
    }
    Err(Error::invariant(
        "reduce_matched_high_indeg",
        "in-degree bound met but neither re-matching case applies",
        state.dump(),
    ))
}

/// Final exchange: select a matched pair `x y` with `in_degree(x) >= n/2 - 2`
/// on the digraph and the missed color on `y z`, then finish directly or
/// through one more edge swap guided by the rebuilt digraph. Runs when both
/// high-in-degree moves returned `None`.
pub fn final_augment(
    state: &MatchState,
    d: &Digraph,
    coll: &GraphCollection,
) -> Result<Transversal> {
    let (m, f0, f1) = completion_shape(state)?;
    let ell = half_minus_one(state.n);
    #[cfg(debug_assertions)]
    if coll.check_dirac(Problem::Matching) {
        // at this point at least n/2 matched vertices have in-degree >= ell - 1
        let high = (0..state.n)
            .filter(|&v| state.partner[v].is_some() && d.in_degree(v) + 1 >= ell)
            .count();
        debug_assert!(
            2 * high >= state.n,
            "only {high} matched vertices reach the in-degree floor"
        );
    }

    for (z, zp) in [(f0, f1), (f1, f0)] {
        for x in 0..state.n {
            if state.partner[x].is_none() || d.in_degree(x) + 1 < ell {
                continue;
            }
            let y = state.partner[x].unwrap();
            if !coll.has_color(Pair::new(y, z), m) {
                continue;
            }
            let c2 = state.vertex_color[x].unwrap();

            if coll.has_color(Pair::new(x, zp), c2) {
                let mut entries = state.entries();
                entries.retain(|(e, _)| *e != Pair::new(x, y));
                entries.push((Pair::new(y, z), m));
                entries.push((Pair::new(x, zp), c2));
                let t = Transversal::from_entries(entries);
                debug_assert!(coll.verify_transversal(&t, Problem::Matching).valid);
                return Ok(t);
            }

            if coll.has_color(Pair::new(y, zp), c2) {
                // re-matching y to zp leaves x free with in-degree >= ell
                let mut next = state.clone();
                next.remove_edge(Pair::new(x, y));
                next.add_edge(Pair::new(y, zp), c2);
                let d2 = build_match_digraph(&next, coll);
                return match complete_free_high_indeg(&next, &d2, coll)? {
                    Some((t, _)) => Ok(t),
                    None => Err(Error::invariant(
                        "final_augment",
                        "re-matching did not enable the free-vertex completion",
                        next.dump(),
                    )),
                };
            }

            // exchange: give y the missed color, then swap one more edge
            // to absorb both x and the remaining free vertex
            let mut mid = state.clone();
            mid.remove_edge(Pair::new(x, y));
            mid.add_edge(Pair::new(y, z), m);
            let d2 = build_match_digraph(&mid, coll);
            for u in 0..state.n {
                if u == x || u == z || u == zp || mid.partner[u].is_none() {
                    continue;
                }
                let v = mid.partner[u].unwrap();
                if d2.has_arc(u, x) && coll.has_color(Pair::new(v, zp), c2) {
                    let col = mid.vertex_color[u].unwrap();
                    let mut entries = mid.entries();
                    entries.retain(|(e, _)| *e != Pair::new(u, v));
                    entries.push((Pair::new(u, x), col));
                    entries.push((Pair::new(v, zp), c2));
                    let t = Transversal::from_entries(entries);
                    debug_assert!(coll.verify_transversal(&t, Problem::Matching).valid);
                    return Ok(t);
                }
            }
        }
    }
    Err(Error::invariant(
        "final_augment",
        "no selection admits an exchange",
        state.dump(),
    ))
}

/// Full pipeline: Dirac check, growth to `n/2 - 1` edges, then the guarded
/// completion moves in priority order.
pub fn find_perfect_matching(coll: &GraphCollection) -> Result<Transversal> {
    solve_matching(coll).map(|o| o.transversal)
}

pub fn solve_matching(coll: &GraphCollection) -> Result<MatchingOutcome> {
    if !coll.check_dirac(Problem::Matching) {
        return Err(Error::input(
            "collection does not satisfy the Dirac condition for matching (s = n/2, even n >= 2, 2*min_degree >= n)",
        ));
    }
    let n = coll.n();
    let mut stats = MatchStats {
        n,
        growth_steps: 0,
        greedy_moves: 0,
        swap_moves: 0,
        completion: CompletionKind::TrivialPair,
    };
    if n == 2 {
        // minimum degree 1 forces the single edge
        debug_assert!(coll.has_color(Pair::new(0, 1), 1));
        return Ok(MatchingOutcome {
            transversal: Transversal::from_entries(vec![(Pair::new(0, 1), 1)]),
            stats,
        });
    }

    let mut state = MatchState::empty(coll);
    while state.size() < half_minus_one(n) {
        let before = state.size();
        let (next, kind) = grow_matching_step_kind(&state, coll)?;
        if next.size() != before + 1 {
            return Err(Error::invariant(
                "solve_matching",
                "growth step did not add exactly one edge",
                state.dump(),
            ));
        }
        match kind {
            GrowthMove::Greedy => stats.greedy_moves += 1,
            GrowthMove::WeightSwap => stats.swap_moves += 1,
        }
        stats.growth_steps += 1;
        state = next;
    }

    let d = build_match_digraph(&state, coll);
    if let Some((t, kind)) = complete_free_high_indeg(&state, &d, coll)? {
        stats.completion = match kind {
            CompletionKind::TrivialPair => CompletionKind::TrivialPair,
            _ => CompletionKind::FreeHighIndegree,
        };
        return Ok(MatchingOutcome {
            transversal: t,
            stats,
        });
    }
    if let Some(reduced) = reduce_matched_high_indeg(&state, &d, coll)? {
        let d2 = build_match_digraph(&reduced, coll);
        let Some((t, _)) = complete_free_high_indeg(&reduced, &d2, coll)? else {
            return Err(Error::invariant(
                "solve_matching",
                "reduction did not enable the free-vertex completion",
                reduced.dump(),
            ));
        };
        stats.completion = CompletionKind::ReduceThenComplete;
        return Ok(MatchingOutcome {
            transversal: t,
            stats,
        });
    }
    let t = final_augment(&state, &d, coll)?;
    stats.completion = CompletionKind::FinalAugment;
    Ok(MatchingOutcome {
        transversal: t,
        stats,
    })
}
