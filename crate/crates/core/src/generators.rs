//! Deterministic graph families and small exhaustive corpora.

use std::collections::HashSet;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Path,
    Cycle,
    Grid,
    RandomRegular,
    LineGraphOfRandomRegular,
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "path" => FamilyKind::Path,
            "cycle" => FamilyKind::Cycle,
            "grid" => FamilyKind::Grid,
            "random_regular" | "random-regular" => FamilyKind::RandomRegular,
            "line_graph_of_random_regular" | "line-graph" | "linegraph" => {
                FamilyKind::LineGraphOfRandomRegular
            }
            other => return Err(Error::Contract(format!("unknown graph family {other:?}"))),
        })
    }
}

/// Size parameters. `n` is the vertex count (the base graph's, for line graphs), `width` and
/// `height` are used by grids, `degree` by the random families, `count` graphs are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub n: usize,
    pub width: usize,
    pub height: usize,
    pub degree: usize,
    pub count: usize,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            n: 10,
            width: 4,
            height: 4,
            degree: 3,
            count: 1,
        }
    }
}

/// `count` graphs of the requested family. Random families draw graph `j` from the stream
/// `(seed, j)`, so the list is reproducible and prefix-stable.
pub fn generate_family(kind: FamilyKind, params: &FamilyParams, seed: u64) -> Result<Vec<Graph>> {
    let bad = |msg: String| Err(Error::Contract(msg));
    match kind {
        FamilyKind::Path if params.n == 0 => return bad("path needs n >= 1".into()),
        FamilyKind::Cycle if params.n < 3 => return bad("cycle needs n >= 3".into()),
        FamilyKind::Grid if params.width == 0 || params.height == 0 => {
            return bad("grid needs positive width and height".into())
        }
        _ => {}
    }
    (0..params.count)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            Ok(match kind {
                FamilyKind::Path => Graph::path(params.n),
                FamilyKind::Cycle => Graph::cycle(params.n),
                FamilyKind::Grid => Graph::grid(params.width, params.height),
                FamilyKind::RandomRegular => random_regular(params.n, params.degree, &mut rng)?,
                FamilyKind::LineGraphOfRandomRegular => {
                    random_regular(params.n, params.degree, &mut rng)?.line_graph()
                }
            })
        })
        .collect()
}

/// Uniform-ish simple `d`-regular graph by the configuration model with rejection of loops
/// and multi-edges.
pub fn random_regular<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Graph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::Contract(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..100_000 {
        stubs.shuffle(rng);
        let mut seen = HashSet::new();
        let ok = stubs.chunks(2).all(|p| {
            let (u, v) = (p[0].min(p[1]), p[0].max(p[1]));
            u != v && seen.insert((u, v))
        });
        if ok {
            let edges: Vec<(usize, usize)> = seen.into_iter().collect();
            return Graph::from_edges(n, &edges);
        }
    }
    Err(Error::Contract(format!("failed to sample a {d}-regular graph on {n} vertices")))
}

fn cell_key(g: &Graph, cells: &[Vec<usize>], v: usize, owner: &[usize]) -> Vec<usize> {
    let mut counts = vec![0usize; cells.len()];
    for &w in g.neighbors(v) {
        counts[owner[w]] += 1;
    }
    counts
}

// Splits cells by neighbor counts into every cell until stable. Split order depends only on
// the counts, so the result commutes with relabeling.
fn refine(g: &Graph, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let mut owner = vec![0usize; g.n()];
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                owner[v] = i;
            }
        }
        let mut next = Vec::with_capacity(cells.len());
        for c in &cells {
            let mut keyed: Vec<(Vec<usize>, usize)> =
                c.iter().map(|&v| (cell_key(g, &cells, v, &owner), v)).collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn code_of(g: &Graph, order: &[usize]) -> u128 {
    let mut code = 0u128;
    let mut idx = 0;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if g.has_edge(order[a], order[b]) {
                code |= 1 << idx;
            }
            idx += 1;
        }
    }
    code
}

fn search(g: &Graph, cells: Vec<Vec<usize>>, best: &mut Option<u128>) {
    let cells = refine(g, cells);
    match cells.iter().position(|c| c.len() > 1) {
        None => {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let code = code_of(g, &order);
            if best.is_none_or(|b| code < b) {
                *best = Some(code);
            }
        }
        Some(i) => {
            for &v in &cells[i] {
                let mut next = cells[..i].to_vec();
                next.push(vec![v]);
                next.push(cells[i].iter().copied().filter(|&w| w != v).collect());
                next.extend_from_slice(&cells[i + 1..]);
                search(g, next, best);
            }
        }
    }
}

/// Canonical code of a graph with at most 16 vertices: equal codes iff isomorphic.
pub fn canonical_code(g: &Graph) -> (usize, u128) {
    assert!(g.n() <= 16, "canonical codes support at most 16 vertices");
    if g.n() == 0 {
        return (0, 0);
    }
    let mut best = None;
    search(g, vec![(0..g.n()).collect()], &mut best);
    (g.n(), best.unwrap())
}

/// One representative per isomorphism class for every vertex count `1..=max_n`.
/// Representatives on `n + 1` vertices come from the `n`-vertex ones by adding a vertex
/// with every possible neighborhood.
pub fn all_graphs_up_to(max_n: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    if max_n == 0 {
        return out;
    }
    let mut layer = vec![Graph::empty(1)];
    out.extend(layer.iter().cloned());
    for n in 1..max_n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &layer {
            let edges = g.edges();
            for mask in 0u32..(1 << n) {
                let mut e = edges.clone();
                e.extend((0..n).filter(|&u| mask >> u & 1 == 1).map(|u| (u, n)));
                let h = Graph::from_edges(n + 1, &e).unwrap();
                if seen.insert(canonical_code(&h)) {
                    next.push(h);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Connected graphs with at most `max_n` vertices and maximum degree at most `max_degree`.
pub fn connected_graphs_up_to(max_n: usize, max_degree: usize) -> Vec<Graph> {
    all_graphs_up_to(max_n)
        .into_iter()
        .filter(|g| g.is_connected() && g.max_degree() <= max_degree)
        .collect()
}
