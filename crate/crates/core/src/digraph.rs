//! Auxiliary digraphs driving the completion case analyses.
//!
//! Both solvers derive a digraph from the current partial transversal: an
//! arc `x -> z` records that the color of `x`'s current edge (cycle
//! successor edge, or matched edge) also appears on the pair `x z`.
//! In-degree tallies decide which completion move applies.

use crate::bits::BitSet;

#[derive(Clone, Debug)]
pub struct Digraph {
    n: usize,
    rows: Vec<BitSet>,
    indeg: Vec<usize>,
    arc_count: usize,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            rows: (0..n).map(|_| BitSet::new(n)).collect(),
            indeg: vec![0; n],
            arc_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_arc(&mut self, from: usize, to: usize) {
        debug_assert!(from != to);
        if !self.rows[from].contains(to) {
            self.rows[from].insert(to);
            self.indeg[to] += 1;
            self.arc_count += 1;
        }
    }

    #[inline]
    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.rows[from].contains(to)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.indeg[v]
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[v].iter()
    }
}
