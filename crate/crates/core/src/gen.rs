//! Deterministic, seeded instance generators.
//!
//! Every generator is a pure function of its parameters: the PRNG is
//! ChaCha8 (`rand_chacha` 0.3) keyed by an explicit byte packing of the
//! parameters, so instances reproduce bit-for-bit across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collection::{Graph, GraphCollection, Problem};
use crate::{Error, Result};

/// Density used for the Dirac family before degree repair.
const DIRAC_EDGE_PROBABILITY: f64 = 0.55;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    RandomDirac,
    DisjointCycles,
    TwoCliques,
    MatchingTight,
    Random,
}

impl std::str::FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-dirac" => Ok(GenKind::RandomDirac),
            "disjoint-cycles" => Ok(GenKind::DisjointCycles),
            "two-cliques" => Ok(GenKind::TwoCliques),
            "matching-tight" => Ok(GenKind::MatchingTight),
            "random" => Ok(GenKind::Random),
            other => Err(Error::input(format!("unknown generator kind '{other}'"))),
        }
    }
}

/// Parameters for [`generate`]; field validity is kind-specific.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub s: Option<usize>,
    pub p: Option<f64>,
    pub seed: u64,
    pub problem: Option<Problem>,
}

pub fn generate(spec: &GenSpec) -> Result<GraphCollection> {
    let problem = spec.problem.unwrap_or(Problem::Hamilton);
    match spec.kind {
        GenKind::RandomDirac => gen_random_dirac(spec.n, problem, spec.seed),
        GenKind::DisjointCycles => gen_disjoint_cycles(spec.s.unwrap_or(spec.n)),
        GenKind::TwoCliques => gen_two_cliques(spec.n, problem),
        GenKind::MatchingTight => {
            let s = spec.s.unwrap_or(spec.n / 2);
            if spec.s.is_none() && spec.n != 2 * s {
                return Err(Error::input("matching-tight needs --s, or an even --n"));
            }
            gen_matching_counterexample(s)
        }
        GenKind::Random => {
            let s = spec
                .s
                .ok_or_else(|| Error::input("kind 'random' requires --s"))?;
            let p = spec
                .p
                .ok_or_else(|| Error::input("kind 'random' requires --p"))?;
            gen_random(spec.n, s, p, spec.seed)
        }
    }
}

fn rng_for(tag: &[u8; 8], n: usize, s: usize, seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(n as u64).to_le_bytes());
    key[16..24].copy_from_slice(tag);
    key[24..32].copy_from_slice(&(s as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn sample_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Adds edges from deficient vertices to random non-neighbors until every
/// degree satisfies `2*deg >= n`.
fn repair_to_dirac(g: &mut Graph, rng: &mut ChaCha8Rng) {
    let n = g.n();
    loop {
        let deficient = (0..n).find(|&v| 2 * g.degree(v) < n);
        let Some(v) = deficient else { break };
        let candidates: Vec<usize> = (0..n)
            .filter(|&w| w != v && !g.has_edge(v, w))
            .collect();
        let w = candidates[rng.gen_range(0..candidates.len())];
        g.add_edge(v, w);
    }
}

/// Random collection satisfying the Dirac condition for `problem`:
/// `s = n` graphs for Hamilton instances, `s = n/2` for matching instances.
pub fn gen_random_dirac(n: usize, problem: Problem, seed: u64) -> Result<GraphCollection> {
    let s = match problem {
        Problem::Hamilton => {
            if n < 3 {
                return Err(Error::input("random-dirac hamilton requires n >= 3"));
            }
            n
        }
        Problem::Matching => {
            if n < 2 || n % 2 != 0 {
                return Err(Error::input("random-dirac matching requires even n >= 2"));
            }
            n / 2
        }
    };
    let tag = match problem {
        Problem::Hamilton => b"rdiracHC",
        Problem::Matching => b"rdiracPM",
    };
    let mut rng = rng_for(tag, n, s, seed);
    let mut graphs = Vec::with_capacity(s);
    for _ in 0..s {
        let mut g = sample_graph(n, DIRAC_EDGE_PROBABILITY, &mut rng);
        repair_to_dirac(&mut g, &mut rng);
        graphs.push(g);
    }
    let c = GraphCollection::new(n, graphs)?;
    debug_assert!(c.check_dirac(problem));
    Ok(c)
}

/// `s-1` copies of the cycle `0-1-...-(s-1)-0` plus one edge-disjoint
/// Hamilton cycle (the step-2 cycle, which is Hamiltonian exactly when `s`
/// is odd). No Hamiltonian transversal exists for this family.
pub fn gen_disjoint_cycles(s: usize) -> Result<GraphCollection> {
    if s < 5 || s % 2 == 0 {
        return Err(Error::input("disjoint-cycles requires odd s >= 5"));
    }
    let n = s;
    let mut base = Graph::empty(n);
    for v in 0..n {
        base.add_edge(v, (v + 1) % n);
    }
    let mut offset = Graph::empty(n);
    for v in 0..n {
        offset.add_edge(v, (v + 2) % n);
    }
    let mut graphs = vec![base; s - 1];
    graphs.push(offset);
    GraphCollection::new(n, graphs)
}

/// Every graph is two disjoint complete graphs on the halves of the vertex
/// set: minimum degree `n/2 - 1`, just under the solver threshold, with a
/// disconnected union.
pub fn gen_two_cliques(n: usize, problem: Problem) -> Result<GraphCollection> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::input("two-cliques requires even n >= 4"));
    }
    let half = n / 2;
    let mut g = Graph::empty(n);
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
    let s = match problem {
        Problem::Hamilton => n,
        Problem::Matching => n / 2,
    };
    GraphCollection::uniform(n, s, g)
}

/// `2s-2` graphs on `2s` vertices: `s-1` copies of each perfect matching of
/// the cycle `C_{2s}`. The largest matching partial transversal has size
/// `s-1`, so `2s-2` size-`s` matchings are not enough for a rainbow
/// matching of size `s`.
pub fn gen_matching_counterexample(s: usize) -> Result<GraphCollection> {
    if s < 2 {
        return Err(Error::input("matching-tight requires s >= 2"));
    }
    let n = 2 * s;
    let mut even = Graph::empty(n);
    let mut odd = Graph::empty(n);
    for v in 0..s {
        even.add_edge(2 * v, 2 * v + 1);
        odd.add_edge(2 * v + 1, (2 * v + 2) % n);
    }
    let mut graphs = vec![even; s - 1];
    graphs.extend(vec![odd; s - 1]);
    GraphCollection::new(n, graphs)
}

/// `s` independent samples with edge probability `p`; no degree repair.
pub fn gen_random(n: usize, s: usize, p: f64, seed: u64) -> Result<GraphCollection> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input("edge probability must lie in [0, 1]"));
    }
    if n == 0 || s == 0 {
        return Err(Error::input("random requires n >= 1 and s >= 1"));
    }
    let mut rng = rng_for(b"randomER", n, s, seed);
    let graphs = (0..s).map(|_| sample_graph(n, p, &mut rng)).collect();
    GraphCollection::new(n, graphs)
}
