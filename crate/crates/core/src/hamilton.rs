//! Constructive Hamiltonian-transversal solver.
//!
//! The solver grows a path/cycle partial transversal with a fixed,
//! deterministic move system (close, extend, rotate, and their cycle
//! counterparts) until it either becomes a full Hamiltonian transversal or
//! a cycle of `n-1` edges missing exactly one color. The latter is finished
//! through an auxiliary digraph whose in-degrees select one of three
//! completion cases.
//!
//! Every move strictly increases the potential `2 * edges + is_cycle`, so a
//! solve performs at most `2n + 1` growth steps. Under the Dirac condition
//! (`2 * min_degree >= n` in every graph, `s = n`) some move always
//! applies; a stall therefore signals an implementation bug and surfaces as
//! an `Invariant` error carrying the stuck state.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bits::BitSet;
use crate::collection::{Color, GraphCollection, Pair, Problem, Transversal, Vertex};
use crate::digraph::Digraph;
use crate::oracle;
use crate::{Error, Result};

/// Path or cycle partial transversal: the object the move system rewrites.
#[derive(Clone, Debug)]
pub struct HamState {
    n: usize,
    s: usize,
    /// Distinct vertices in traversal order.
    vertices: Vec<Vertex>,
    /// `colors[i]` colors the edge `vertices[i] - vertices[i+1]`; a cycle
    /// additionally has the wrap-around edge at index `len - 1`.
    colors: Vec<Color>,
    is_cycle: bool,
    missed: BTreeSet<Color>,
    on: BitSet,
}

impl PartialEq for HamState {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.colors == other.colors
            && self.is_cycle == other.is_cycle
    }
}

impl HamState {
    fn mk(
        coll: &GraphCollection,
        vertices: Vec<Vertex>,
        colors: Vec<Color>,
        is_cycle: bool,
    ) -> Self {
        let n = coll.n();
        let s = coll.color_count();
        let mut on = BitSet::new(n);
        for &v in &vertices {
            on.insert(v);
        }
        let used: BTreeSet<Color> = colors.iter().copied().collect();
        let missed = (1..=s).filter(|c| !used.contains(c)).collect();
        let state = HamState {
            n,
            s,
            vertices,
            colors,
            is_cycle,
            missed,
            on,
        };
        debug_assert_eq!(state.validate(coll), Ok(()));
        state
    }

    /// Builds and fully validates a state; intended for tests and replay.
    pub fn from_parts(
        coll: &GraphCollection,
        vertices: Vec<Vertex>,
        colors: Vec<Color>,
        is_cycle: bool,
    ) -> Result<Self> {
        let n = coll.n();
        let s = coll.color_count();
        let mut on = BitSet::new(n);
        for &v in &vertices {
            if v >= n {
                return Err(Error::input(format!("vertex {v} out of range")));
            }
            on.insert(v);
        }
        let used: BTreeSet<Color> = colors.iter().copied().collect();
        let missed = (1..=s).filter(|c| !used.contains(c)).collect();
        let state = HamState {
            n,
            s,
            vertices,
            colors,
            is_cycle,
            missed,
            on,
        };
        state.validate(coll).map_err(Error::Input)?;
        Ok(state)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn is_cycle(&self) -> bool {
        self.is_cycle
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn missed(&self) -> impl Iterator<Item = Color> + '_ {
        self.missed.iter().copied()
    }

    /// `2 * edges + 1` for cycles, `2 * edges` for paths. Every growth move
    /// strictly increases this.
    pub fn potential(&self) -> i64 {
        2 * self.colors.len() as i64 + i64::from(self.is_cycle)
    }

    /// Edge -> color entries in traversal order.
    pub fn entries(&self) -> Vec<(Pair, Color)> {
        let k = self.vertices.len();
        self.colors
            .iter()
            .enumerate()
            .map(|(i, &c)| (Pair::new(self.vertices[i], self.vertices[(i + 1) % k]), c))
            .collect()
    }

    pub fn to_transversal(&self) -> Transversal {
        Transversal::from_entries(self.entries())
    }

    fn is_full(&self) -> bool {
        self.is_cycle && self.edge_count() == self.n && self.missed.is_empty()
    }

    /// Cycle of `n-1` edges missing exactly one color.
    fn is_near_hamilton(&self) -> bool {
        self.is_cycle && self.edge_count() == self.n - 1
    }

    /// Full structural check of every state invariant.
    pub fn validate(&self, coll: &GraphCollection) -> std::result::Result<(), String> {
        let k = self.vertices.len();
        if k < 2 {
            return Err("fewer than two vertices".into());
        }
        if self.is_cycle && k < 3 {
            return Err("cycle on fewer than three vertices".into());
        }
        let expected = if self.is_cycle { k } else { k - 1 };
        if self.colors.len() != expected {
            return Err(format!(
                "{} colors for {k} vertices (cycle: {})",
                self.colors.len(),
                self.is_cycle
            ));
        }
        let distinct: BTreeSet<_> = self.vertices.iter().collect();
        if distinct.len() != k {
            return Err("repeated vertex".into());
        }
        if self.vertices.iter().any(|&v| v >= self.n) {
            return Err("vertex out of range".into());
        }
        let used: BTreeSet<Color> = self.colors.iter().copied().collect();
        if used.len() != self.colors.len() {
            return Err("color used twice".into());
        }
        if self.colors.iter().any(|&c| c == 0 || c > self.s) {
            return Err("color out of range".into());
        }
        for (e, c) in self.entries() {
            if !coll.has_color(e, c) {
                return Err(format!("edge {e} not in graph {c}"));
            }
        }
        let missed: BTreeSet<Color> = (1..=self.s).filter(|c| !used.contains(c)).collect();
        if missed != self.missed {
            return Err("missed-color set out of sync".into());
        }
        for &v in &self.vertices {
            if !self.on.contains(v) {
                return Err("membership mask out of sync".into());
            }
        }
        if self.on.len() != k {
            return Err("membership mask out of sync".into());
        }
        Ok(())
    }

    /// JSON dump attached to invariant violations for replay.
    pub fn dump(&self) -> String {
        serde_json::json!({
            "vertices": self.vertices,
            "colors": self.colors,
            "is_cycle": self.is_cycle,
        })
        .to_string()
    }
}

/// Growth moves in their fixed priority order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// Close the whole path into a cycle with a missed color.
    PathClose,
    /// Drop the last path edge and close the remaining sub-path.
    SubPathClose,
    /// Append an outside vertex at either path end with a missed color.
    Extend,
    /// Swap one sub-path edge for two chords, producing a cycle.
    Rotate,
    /// Close the sub-path through an outside vertex with the two smallest
    /// missed colors.
    OutsideClose,
    /// Open the cycle at a cut and attach outside vertices to both ends.
    CutExtend,
    /// Replace one cycle edge by a two-edge detour through an outside
    /// vertex.
    Insert,
    /// Open the cycle and append a two-edge chain of outside vertices.
    ChainExtend,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct MoveCounts {
    pub path_close: u32,
    pub sub_path_close: u32,
    pub extend: u32,
    pub rotate: u32,
    pub outside_close: u32,
    pub cut_extend: u32,
    pub insert: u32,
    pub chain_extend: u32,
}

impl MoveCounts {
    fn bump(&mut self, kind: MoveKind) {
        match kind {
            MoveKind::PathClose => self.path_close += 1,
            MoveKind::SubPathClose => self.sub_path_close += 1,
            MoveKind::Extend => self.extend += 1,
            MoveKind::Rotate => self.rotate += 1,
            MoveKind::OutsideClose => self.outside_close += 1,
            MoveKind::CutExtend => self.cut_extend += 1,
            MoveKind::Insert => self.insert += 1,
            MoveKind::ChainExtend => self.chain_extend += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.path_close
            + self.sub_path_close
            + self.extend
            + self.rotate
            + self.outside_close
            + self.cut_extend
            + self.insert
            + self.chain_extend
    }
}

/// Which completion case produced the final transversal.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinalizeCase {
    /// The off-cycle vertex replaced one cycle edge directly.
    YInsertion,
    /// A high-in-degree cycle vertex anchored a direct close.
    HighIndegDirect,
    /// A high-in-degree cycle vertex anchored a rotation.
    HighIndegRotation,
    /// All in-degrees small: direct close of the re-threaded path.
    LowIndegDirect,
    /// All in-degrees small: rotation of the re-threaded path.
    LowIndegRotation,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuxStats {
    pub arc_count: usize,
    pub y_out_degree: usize,
    pub y_in_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HamiltonStats {
    pub n: usize,
    /// Growth steps taken (bounded by `2n + 1`).
    pub steps: usize,
    pub moves: MoveCounts,
    /// Smallest potential gain over all growth steps; `None` when no step
    /// ran. Strict monotonicity means this is at least 1.
    pub min_step_gain: Option<i64>,
    pub finalize_case: Option<FinalizeCase>,
    pub aux: Option<AuxStats>,
    /// Small instances (n <= 4) are delegated to the brute-force oracle.
    pub brute_delegated: bool,
}

pub struct HamiltonOutcome {
    pub transversal: Transversal,
    pub stats: HamiltonStats,
}

/// Greedy seed: the lexicographically smallest edge of graph 1, extended
/// with the smallest missed color at the back, then front, until the path
/// has three edges.
pub fn initial_state(coll: &GraphCollection) -> Result<HamState> {
    if !coll.check_dirac(Problem::Hamilton) {
        return Err(Error::input(
            "initial_state requires the Dirac condition for hamilton",
        ));
    }
    if coll.n() < 5 {
        return Err(Error::input("initial_state requires n >= 5"));
    }
    let g1 = coll.graph(1);
    let seed = g1
        .edges()
        .first()
        .copied()
        .ok_or_else(|| Error::input("graph 1 has no edges"))?;
    let mut state = HamState::mk(coll, vec![seed.0, seed.1], vec![1], false);
    while state.edge_count() < 3 {
        match extend_path(&state, coll) {
            Some(next) => state = next,
            None => {
                return Err(Error::invariant(
                    "initial_state",
                    "greedy extension stalled below three edges",
                    state.dump(),
                ))
            }
        }
    }
    Ok(state)
}

/// One growth step: the first applicable move in the fixed order, smallest
/// witnesses first. The result always has strictly larger potential.
pub fn grow_step(state: &HamState, coll: &GraphCollection) -> Result<HamState> {
    grow_step_kind(state, coll).map(|(s, _)| s)
}

/// [`grow_step`] plus which move fired.
pub fn grow_step_kind(state: &HamState, coll: &GraphCollection) -> Result<(HamState, MoveKind)> {
    if state.is_full() {
        return Err(Error::input(
            "grow_step called on a full Hamiltonian transversal",
        ));
    }
    if state.is_near_hamilton() {
        return Err(Error::input(
            "grow_step called on the near-Hamilton target state",
        ));
    }
    type Move = fn(&HamState, &GraphCollection) -> Option<HamState>;
    let moves: &[(MoveKind, Move)] = if state.is_cycle {
        &[
            (MoveKind::CutExtend, cut_extend),
            (MoveKind::Insert, insert_outside),
            (MoveKind::ChainExtend, chain_extend),
        ]
    } else {
        &[
            (MoveKind::PathClose, close_path),
            (MoveKind::SubPathClose, close_sub_path),
            (MoveKind::Extend, extend_path),
            (MoveKind::Rotate, rotate_path),
            (MoveKind::OutsideClose, close_through_outside),
        ]
    };
    for (kind, f) in moves {
        if let Some(next) = f(state, coll) {
            debug_assert!(next.potential() > state.potential(), "{kind:?}");
            return Ok((next, *kind));
        }
    }
    Err(Error::invariant(
        "grow_step",
        "no growth move applies",
        state.dump(),
    ))
}

/// Two smallest colors missed by the sub-path (the path without its last
/// edge): the state's missed colors plus the freed last-edge color.
fn sub_path_missed(state: &HamState) -> (Color, Color) {
    let freed = *state.colors.last().expect("path has at least one edge");
    let mut it = state
        .missed
        .iter()
        .copied()
        .chain(std::iter::once(freed))
        .collect::<BTreeSet<_>>()
        .into_iter();
    let a = it.next().expect("at least two colors missed by sub-path");
    let b = it.next().expect("at least two colors missed by sub-path");
    (a, b)
}

fn close_path(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    if k < 3 {
        return None;
    }
    let chord = Pair::new(state.vertices[0], state.vertices[k - 1]);
    for &m in &state.missed {
        if coll.has_color(chord, m) {
            let mut colors = state.colors.clone();
            colors.push(m);
            return Some(HamState::mk(coll, state.vertices.clone(), colors, true));
        }
    }
    None
}

fn close_sub_path(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    if k < 4 {
        return None;
    }
    let chord = Pair::new(state.vertices[0], state.vertices[k - 2]);
    let freed = state.colors[k - 2];
    let restricted: BTreeSet<Color> = state
        .missed
        .iter()
        .copied()
        .chain(std::iter::once(freed))
        .collect();
    for &m in &restricted {
        if coll.has_color(chord, m) {
            let vertices = state.vertices[..k - 1].to_vec();
            let mut colors = state.colors[..k - 2].to_vec();
            colors.push(m);
            return Some(HamState::mk(coll, vertices, colors, true));
        }
    }
    None
}

fn extend_path(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    for &m in &state.missed {
        let g = coll.graph(m);
        if let Some(y) = g.first_neighbor_not_in(state.vertices[k - 1], &state.on) {
            let mut vertices = state.vertices.clone();
            let mut colors = state.colors.clone();
            vertices.push(y);
            colors.push(m);
            return Some(HamState::mk(coll, vertices, colors, false));
        }
        if let Some(y) = g.first_neighbor_not_in(state.vertices[0], &state.on) {
            let mut vertices = state.vertices.clone();
            let mut colors = state.colors.clone();
            vertices.insert(0, y);
            colors.insert(0, m);
            return Some(HamState::mk(coll, vertices, colors, false));
        }
    }
    None
}

/// Rotation on the sub-path `v[0..k-1]`: delete the edge at position `j`,
/// add the chords `v[0]-v[j]` and `v[j-1]-v[k-2]`, and drop the last path
/// vertex. Produces a cycle with the same edge count, preferred over the
/// path by the potential.
fn rotate_path(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    if k < 5 {
        return None;
    }
    let v = &state.vertices;
    let (ca, cb) = sub_path_missed(state);
    // sub-path is v[0..=k-2]; a usable pivot j has the ca-chord from v[0]
    // to v[j] and the cb-chord from v[j-1] to the sub-path end
    let mut common = None;
    for j in 2..=k - 3 {
        if coll.has_color(Pair::new(v[0], v[j]), ca)
            && coll.has_color(Pair::new(v[j - 1], v[k - 2]), cb)
        {
            common = Some(j);
            break;
        }
    }
    #[cfg(debug_assertions)]
    rotation_count_check(state, coll, ca, cb);
    let j = common?;
    let mut vertices = v[..j].to_vec();
    vertices.extend(v[j..k - 1].iter().rev());
    let mut colors = state.colors[..j - 1].to_vec();
    colors.push(cb); // v[j-1] - v[k-2]
    colors.extend(state.colors[j..k - 2].iter().rev());
    colors.push(ca); // v[j] - v[0] closes the cycle
    Some(HamState::mk(coll, vertices, colors, true))
}

/// When neither endpoint of the sub-path has an outside neighbor surplus,
/// the two chord index sets must together cover the sub-path. Checked only
/// under the Dirac condition, where the counting argument applies.
#[cfg(debug_assertions)]
fn rotation_count_check(state: &HamState, coll: &GraphCollection, ca: Color, cb: Color) {
    if !coll.check_dirac(Problem::Hamilton) {
        return;
    }
    let k = state.vertices.len();
    let v = &state.vertices;
    let sub: BTreeSet<Vertex> = v[..k - 1].iter().copied().collect();
    let outside_a = coll
        .graph(ca)
        .neighbors(v[0])
        .filter(|w| !sub.contains(w))
        .count();
    let outside_b = coll
        .graph(cb)
        .neighbors(v[k - 2])
        .filter(|w| !sub.contains(w))
        .count();
    if outside_a + outside_b > state.n - (k - 1) {
        return; // an outside close exists instead; no bound to check
    }
    let i1 = (1..=k - 3)
        .filter(|&j| coll.has_color(Pair::new(v[0], v[j]), ca))
        .count();
    let i2 = (2..=k - 2)
        .filter(|&j| coll.has_color(Pair::new(v[j - 1], v[k - 2]), cb))
        .count();
    debug_assert!(
        i1 + i2 >= k - 1,
        "rotation index sets too small: {i1} + {i2} < {}",
        k - 1
    );
}

/// Close the sub-path through an outside vertex `y` carrying both smallest
/// missed colors on its two chords. Fires only when rotation has failed;
/// the degree counting then guarantees such a `y` exists.
fn close_through_outside(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    if k < 4 {
        return None;
    }
    let v = &state.vertices;
    let (ca, cb) = sub_path_missed(state);
    let dropped = v[k - 1];
    for y in 0..state.n {
        if y != dropped && state.on.contains(y) {
            continue;
        }
        if coll.has_color(Pair::new(v[0], y), ca) && coll.has_color(Pair::new(v[k - 2], y), cb) {
            let mut vertices = v[..k - 1].to_vec();
            vertices.push(y);
            let mut colors = state.colors[..k - 2].to_vec();
            colors.push(cb); // v[k-2] - y
            colors.push(ca); // y - v[0]
            return Some(HamState::mk(coll, vertices, colors, true));
        }
    }
    None
}

/// Smallest two missed colors of a cycle state.
fn cycle_missed(state: &HamState) -> (Color, Color) {
    let mut it = state.missed.iter().copied();
    let a = it.next().expect("cycle state misses at least two colors");
    let b = it.next().expect("cycle state misses at least two colors");
    (a, b)
}

/// The cycle read as a path after deleting the cut edge at `cut`:
/// vertices in order and the surviving edge colors.
fn open_cycle(state: &HamState, cut: usize) -> (Vec<Vertex>, Vec<Color>) {
    let k = state.vertices.len();
    let vertices: Vec<Vertex> = (0..k)
        .map(|t| state.vertices[(cut + 1 + t) % k])
        .collect();
    let colors: Vec<Color> = (0..k - 1).map(|t| state.colors[(cut + 1 + t) % k]).collect();
    (vertices, colors)
}

fn cut_extend(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    let (ma, mb) = cycle_missed(state);
    for cut in 0..k {
        let u = state.vertices[(cut + 1) % k];
        let w = state.vertices[cut];
        for (ca, cb) in [(ma, mb), (mb, ma)] {
            let y = coll.graph(ca).first_neighbor_not_in(u, &state.on);
            let z = coll.graph(cb).first_neighbor_not_in(w, &state.on);
            let (Some(y), Some(z)) = (y, z) else { continue };
            let (path, path_colors) = open_cycle(state, cut);
            if y == z {
                let mut vertices = vec![y];
                vertices.extend(path);
                let mut colors = vec![ca];
                colors.extend(path_colors);
                colors.push(cb);
                return Some(HamState::mk(coll, vertices, colors, true));
            }
            let mut vertices = vec![y];
            vertices.extend(path);
            vertices.push(z);
            let mut colors = vec![ca];
            colors.extend(path_colors);
            colors.push(cb);
            return Some(HamState::mk(coll, vertices, colors, false));
        }
    }
    None
}

fn insert_outside(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    let (ma, mb) = cycle_missed(state);
    for vo in 0..state.n {
        if state.on.contains(vo) {
            continue;
        }
        for cut in 0..k {
            if coll.has_color(Pair::new(vo, state.vertices[(cut + 1) % k]), ma)
                && coll.has_color(Pair::new(vo, state.vertices[cut]), mb)
            {
                let mut vertices = state.vertices[..=cut].to_vec();
                vertices.push(vo);
                vertices.extend_from_slice(&state.vertices[cut + 1..]);
                let mut colors = state.colors[..cut].to_vec();
                colors.push(mb); // v[cut] - vo
                colors.push(ma); // vo - v[cut+1]
                colors.extend_from_slice(&state.colors[cut + 1..]);
                return Some(HamState::mk(coll, vertices, colors, true));
            }
        }
    }
    None
}

/// Open the cycle next to an on-cycle neighbor of `vo` and append the
/// outside chain `vo, u`. Needed when every outside vertex keeps some
/// missed-color neighbors outside the cycle, which blocks the insertion
/// counting.
fn chain_extend(state: &HamState, coll: &GraphCollection) -> Option<HamState> {
    let k = state.vertices.len();
    let (ma, mb) = cycle_missed(state);
    for vo in 0..state.n {
        if state.on.contains(vo) {
            continue;
        }
        for (ci, co) in [(ma, mb), (mb, ma)] {
            let Some(u) = coll.graph(ci).first_neighbor_not_in(vo, &state.on) else {
                continue;
            };
            // first cycle position whose vertex neighbors vo in the other color
            let Some(t) = (0..k).find(|&t| coll.has_color(Pair::new(vo, state.vertices[t]), co))
            else {
                continue;
            };
            let (path, path_colors) = open_cycle(state, t);
            let mut vertices = path;
            vertices.push(vo);
            vertices.push(u);
            let mut colors = path_colors;
            colors.push(co); // v[t] - vo
            colors.push(ci); // vo - u
            return Some(HamState::mk(coll, vertices, colors, false));
        }
    }
    None
}

/// Auxiliary digraph of a near-Hamilton state: an arc `x -> z` for every
/// cycle vertex `x` and vertex `z` other than `x`'s successor such that the
/// color of `x`'s successor edge also appears on `x z`. The off-cycle
/// vertex has no out-arcs.
pub fn build_aux_digraph(state: &HamState, coll: &GraphCollection) -> Result<Digraph> {
    if !state.is_near_hamilton() || state.missed.len() != 1 {
        return Err(Error::input(
            "build_aux_digraph requires a cycle of n-1 edges missing exactly one color",
        ));
    }
    let k = state.vertices.len();
    let mut d = Digraph::new(state.n);
    for pos in 0..k {
        let from = state.vertices[pos];
        let succ = state.vertices[(pos + 1) % k];
        let g = coll.graph(state.colors[pos]);
        for z in g.neighbors(from) {
            if z != succ {
                d.add_arc(from, z);
            }
        }
    }
    Ok(d)
}

fn off_cycle_vertex(state: &HamState) -> Vertex {
    (0..state.n)
        .find(|&v| !state.on.contains(v))
        .expect("near-Hamilton state has one off-cycle vertex")
}

fn cycle_color_map(state: &HamState) -> BTreeMap<Pair, Color> {
    state.entries().into_iter().collect()
}

/// Closes a Hamiltonian path `p` (missing exactly `cj`) into a full
/// transversal: directly over the end chord when possible, otherwise by one
/// rotation anchored at the path's last vertex using the cycle digraph.
///
/// `jn_lo` is the smallest admissible rotation position; when `avoid` is
/// set, rotations touching that vertex's path edges are skipped (their
/// colors differ from the digraph's view of the original cycle).
fn finish_hamilton_path(
    p: &[Vertex],
    pcols: &[Color],
    cj: Color,
    d: &Digraph,
    coll: &GraphCollection,
    jn_lo: usize,
    avoid: Option<Vertex>,
) -> Option<(Vec<(Pair, Color)>, bool)> {
    let n = p.len();
    debug_assert_eq!(pcols.len(), n - 1);
    let path_edges = || -> Vec<(Pair, Color)> {
        (0..n - 1)
            .map(|i| (Pair::new(p[i], p[i + 1]), pcols[i]))
            .collect()
    };
    if coll.has_color(Pair::new(p[0], p[n - 1]), cj) {
        let mut entries = path_edges();
        entries.push((Pair::new(p[0], p[n - 1]), cj));
        return Some((entries, true));
    }
    let anchor = p[n - 1];
    for i in jn_lo..=n - 2 {
        if let Some(a) = avoid {
            if p[i - 1] == a || p[i] == a {
                continue;
            }
        }
        if coll.has_color(Pair::new(p[0], p[i]), cj) && d.has_arc(p[i - 1], anchor) {
            let freed = pcols[i - 1];
            let mut entries: Vec<(Pair, Color)> = path_edges();
            entries.remove(i - 1);
            entries.push((Pair::new(p[0], p[i]), cj));
            entries.push((Pair::new(p[i - 1], anchor), freed));
            return Some((entries, false));
        }
    }
    None
}

/// Completes a near-Hamilton state to a full Hamiltonian transversal via
/// the in-degree case analysis on the auxiliary digraph.
pub fn finalize_hamilton(
    state: &HamState,
    d: &Digraph,
    coll: &GraphCollection,
) -> Result<Transversal> {
    finalize_hamilton_case(state, d, coll).map(|(t, _)| t)
}

pub fn finalize_hamilton_case(
    state: &HamState,
    d: &Digraph,
    coll: &GraphCollection,
) -> Result<(Transversal, FinalizeCase)> {
    if !state.is_near_hamilton() || state.missed.len() != 1 {
        return Err(Error::input(
            "finalize_hamilton requires a cycle of n-1 edges missing exactly one color",
        ));
    }
    let n = state.n;
    let k = state.vertices.len(); // n - 1
    let v = &state.vertices;
    let y = off_cycle_vertex(state);
    let m = *state.missed.iter().next().expect("one missed color");

    // (0) y-insertion: replace one cycle edge by the detour through y.
    for pos in 0..k {
        if d.has_arc(v[pos], y) && coll.has_color(Pair::new(v[(pos + 1) % k], y), m) {
            let mut entries: Vec<(Pair, Color)> = state
                .entries()
                .into_iter()
                .filter(|(e, _)| *e != Pair::new(v[pos], v[(pos + 1) % k]))
                .collect();
            entries.push((Pair::new(v[pos], y), state.colors[pos]));
            entries.push((Pair::new(y, v[(pos + 1) % k]), m));
            let t = Transversal::from_entries(entries);
            debug_assert!(coll.verify_transversal(&t, Problem::Hamilton).valid);
            return Ok((t, FinalizeCase::YInsertion));
        }
    }

    let edge_colors = cycle_color_map(state);
    let color_of = |a: Vertex, b: Vertex| -> Color {
        *edge_colors
            .get(&Pair::new(a, b))
            .expect("pair is a cycle edge")
    };

    // (1) some cycle vertex with in-degree above (n-2)/2
    if let Some(t0) = (0..k).find(|&t| 2 * d.in_degree(v[t]) > n - 2) {
        let xs: Vec<Vertex> = (0..k).map(|i| v[(t0 + i) % k]).collect();
        let c1 = color_of(xs[0], xs[1]);
        // common index with a c1-chord from position i and an m-edge from
        // position i+1 to y (positions 1-based along the relabeled cycle)
        let j = (1..=k).find(|&i| {
            coll.has_color(Pair::new(xs[i - 1], y), c1)
                && coll.has_color(Pair::new(xs[i % k], y), m)
        });
        let Some(j) = j else {
            return Err(Error::invariant(
                "finalize_hamilton",
                "high in-degree case found no insertion index",
                state.dump(),
            ));
        };
        if j == 1 {
            let mut entries: Vec<(Pair, Color)> = state
                .entries()
                .into_iter()
                .filter(|(e, _)| *e != Pair::new(xs[0], xs[1]))
                .collect();
            entries.push((Pair::new(xs[0], y), c1));
            entries.push((Pair::new(xs[1], y), m));
            let t = Transversal::from_entries(entries);
            debug_assert!(coll.verify_transversal(&t, Problem::Hamilton).valid);
            return Ok((t, FinalizeCase::HighIndegDirect));
        }
        // path x_2, ..., x_j, y, x_{j+1}, ..., x_{n-1}, x_1 missing the cut color
        let mut p: Vec<Vertex> = xs[1..j].to_vec();
        p.push(y);
        p.extend_from_slice(&xs[j..]);
        p.push(xs[0]);
        debug_assert_eq!(p.len(), n);
        let cj = color_of(xs[j - 1], xs[j % k]);
        let pcols: Vec<Color> = (0..n - 1)
            .map(|i| {
                if p[i] == y {
                    m // y - x_{j+1}
                } else if p[i + 1] == y {
                    c1 // x_j - y
                } else {
                    color_of(p[i], p[i + 1])
                }
            })
            .collect();
        match finish_hamilton_path(&p, &pcols, cj, d, coll, 1, Some(y)) {
            Some((entries, direct)) => {
                let t = Transversal::from_entries(entries);
                debug_assert!(coll.verify_transversal(&t, Problem::Hamilton).valid);
                let case = if direct {
                    FinalizeCase::HighIndegDirect
                } else {
                    FinalizeCase::HighIndegRotation
                };
                return Ok((t, case));
            }
            None => {
                return Err(Error::invariant(
                    "finalize_hamilton",
                    "high in-degree case found no closing rotation",
                    state.dump(),
                ))
            }
        }
    }

    // (2) every in-degree at most (n-2)/2: cut at a vertex attaining the
    // maximum whose cycle successor is adjacent to y in the missed color
    let target = (n - 2) / 2;
    let cut = (0..k).find(|&pos| {
        d.in_degree(v[pos]) == target && coll.has_color(Pair::new(v[(pos + 1) % k], y), m)
    });
    let Some(cut) = cut else {
        return Err(Error::invariant(
            "finalize_hamilton",
            "low in-degree case found no cut position",
            state.dump(),
        ));
    };
    let cj = state.colors[cut];
    let mut q: Vec<Vertex> = vec![y];
    q.extend((0..k).map(|t| v[(cut + 1 + t) % k]));
    debug_assert_eq!(q.len(), n);
    let qcols: Vec<Color> = (0..n - 1)
        .map(|i| if i == 0 { m } else { color_of(q[i], q[i + 1]) })
        .collect();
    match finish_hamilton_path(&q, &qcols, cj, d, coll, 2, None) {
        Some((entries, direct)) => {
            let t = Transversal::from_entries(entries);
            debug_assert!(coll.verify_transversal(&t, Problem::Hamilton).valid);
            let case = if direct {
                FinalizeCase::LowIndegDirect
            } else {
                FinalizeCase::LowIndegRotation
            };
            Ok((t, case))
        }
        None => Err(Error::invariant(
            "finalize_hamilton",
            "low in-degree case found no closing rotation",
            state.dump(),
        )),
    }
}

/// Full pipeline: Dirac check, greedy seed, growth loop, digraph
/// completion. `n <= 4` is delegated to the brute-force oracle.
pub fn find_hamilton(coll: &GraphCollection) -> Result<Transversal> {
    solve_hamilton(coll).map(|o| o.transversal)
}

pub fn solve_hamilton(coll: &GraphCollection) -> Result<HamiltonOutcome> {
    if !coll.check_dirac(Problem::Hamilton) {
        return Err(Error::input(
            "collection does not satisfy the Dirac condition for hamilton (s = n, n >= 3, 2*min_degree >= n)",
        ));
    }
    let n = coll.n();
    let mut stats = HamiltonStats {
        n,
        steps: 0,
        moves: MoveCounts::default(),
        min_step_gain: None,
        finalize_case: None,
        aux: None,
        brute_delegated: false,
    };
    if n <= 4 {
        let t = oracle::brute_hamilton(coll)?.ok_or_else(|| {
            Error::invariant(
                "solve_hamilton",
                "no transversal on a small Dirac instance",
                String::new(),
            )
        })?;
        stats.brute_delegated = true;
        return Ok(HamiltonOutcome {
            transversal: t,
            stats,
        });
    }

    let mut state = initial_state(coll)?;
    let step_limit = 2 * n + 1;
    loop {
        if state.is_full() {
            let t = state.to_transversal();
            debug_assert!(coll.verify_transversal(&t, Problem::Hamilton).valid);
            return Ok(HamiltonOutcome {
                transversal: t,
                stats,
            });
        }
        if state.is_near_hamilton() {
            break;
        }
        let before = state.potential();
        let (next, kind) = grow_step_kind(&state, coll)?;
        let gain = next.potential() - before;
        if gain <= 0 {
            return Err(Error::invariant(
                "solve_hamilton",
                format!("{kind:?} did not increase the potential"),
                state.dump(),
            ));
        }
        stats.min_step_gain = Some(stats.min_step_gain.map_or(gain, |g| g.min(gain)));
        stats.moves.bump(kind);
        stats.steps += 1;
        if stats.steps > step_limit {
            return Err(Error::invariant(
                "solve_hamilton",
                format!("more than {step_limit} growth steps"),
                state.dump(),
            ));
        }
        state = next;
    }

    let d = build_aux_digraph(&state, coll)?;
    let y = off_cycle_vertex(&state);
    stats.aux = Some(AuxStats {
        arc_count: d.arc_count(),
        y_out_degree: d.out_degree(y),
        y_in_degree: d.in_degree(y),
    });
    let (t, case) = finalize_hamilton_case(&state, &d, coll)?;
    stats.finalize_case = Some(case);
    debug_assert!(coll.verify_transversal(&t, Problem::Hamilton).valid);
    Ok(HamiltonOutcome {
        transversal: t,
        stats,
    })
}
