//! Simple undirected graphs on dense vertex labels `0..n`, boundary conditions,
//! and the metric queries the partition-function code relies on.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph. Adjacency lists are sorted and symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

/// An induced subgraph together with the label maps back to its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    /// `new_of_old[u]` is the label of parent vertex `u` in `graph`, if kept.
    pub new_of_old: Vec<Option<usize>>,
    /// `old_of_new[w]` is the parent label of vertex `w` of `graph`.
    pub old_of_new: Vec<usize>,
}

impl Subgraph {
    pub fn map(&self, old: usize) -> Option<usize> {
        self.new_of_old.get(old).copied().flatten()
    }
}

impl Graph {
    /// Graph on `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::Contract(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges(n, &edges).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).expect("complete graph edges are valid")
    }

    /// Star `K_{1,leaves}` with center 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star edges are valid")
    }

    /// `width x height` grid, vertex `(x, y)` labelled `y * width + x`.
    pub fn grid(width: usize, height: usize) -> Self {
        let mut edges = Vec::new();
        for y in 0..height {
            for x in 0..width {
                let v = y * width + x;
                if x + 1 < width {
                    edges.push((v, v + 1));
                }
                if y + 1 < height {
                    edges.push((v, v + width));
                }
            }
        }
        Graph::from_edges(width * height, &edges).expect("grid edges are valid")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::from_edges(10, &edges).expect("petersen edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// Induced subgraph on the vertices with `keep[u] == true`; labels keep their relative order.
    pub fn induced_by_mask(&self, keep: &[bool]) -> Subgraph {
        let mut new_of_old = vec![None; self.n()];
        let mut old_of_new = Vec::new();
        for u in 0..self.n() {
            if keep[u] {
                new_of_old[u] = Some(old_of_new.len());
                old_of_new.push(u);
            }
        }
        let adj = old_of_new
            .iter()
            .map(|&u| {
                self.adj[u]
                    .iter()
                    .filter_map(|&w| new_of_old[w])
                    .collect::<Vec<_>>()
            })
            .collect();
        Subgraph {
            graph: Graph { adj },
            new_of_old,
            old_of_new,
        }
    }

    pub fn induced(&self, vertices: &[usize]) -> Subgraph {
        let mut keep = vec![false; self.n()];
        for &u in vertices {
            keep[u] = true;
        }
        self.induced_by_mask(&keep)
    }

    /// `G - v`.
    pub fn remove_vertex(&self, v: usize) -> Subgraph {
        let mut keep = vec![true; self.n()];
        keep[v] = false;
        self.induced_by_mask(&keep)
    }

    /// `G \ N[v]`.
    pub fn remove_closed_neighborhood(&self, v: usize) -> Subgraph {
        let mut keep = vec![true; self.n()];
        keep[v] = false;
        for &w in &self.adj[v] {
            keep[w] = false;
        }
        self.induced_by_mask(&keep)
    }

    /// Breadth-first distances from `v`; `None` for unreachable vertices.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[v] = Some(0);
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `B_G(v, k)`, sorted.
    pub fn ball(&self, v: usize, k: usize) -> Vec<usize> {
        self.distances_from(v)
            .iter()
            .enumerate()
            .filter_map(|(u, d)| d.filter(|&d| d <= k).map(|_| u))
            .collect()
    }

    /// Vertices at distance exactly `k` from `v`, sorted.
    pub fn sphere(&self, v: usize, k: usize) -> Vec<usize> {
        self.distances_from(v)
            .iter()
            .enumerate()
            .filter_map(|(u, d)| (*d == Some(k)).then_some(u))
            .collect()
    }

    /// Connected component containing `v`, sorted.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        self.distances_from(v)
            .iter()
            .enumerate()
            .filter_map(|(u, d)| d.map(|_| u))
            .collect()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for v in 0..self.n() {
            if !seen[v] {
                let comp = self.component_of(v);
                for &u in &comp {
                    seen[u] = true;
                }
                out.push(comp);
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.component_of(0).len() == self.n()
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|l| l.iter().map(|&w| w + shift).collect()),
        );
        Graph { adj }
    }

    /// Line graph; vertex `i` is the `i`-th edge of [`Graph::edges`].
    pub fn line_graph(&self) -> Graph {
        let edges = self.edges();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.n()];
        for (i, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(i);
            incident[v].push(i);
        }
        let mut line_edges = Vec::new();
        for list in &incident {
            for a in 0..list.len() {
                for b in a + 1..list.len() {
                    line_edges.push((list[a], list[b]));
                }
            }
        }
        Graph::from_edges(edges.len(), &line_edges).expect("line graph edges are valid")
    }

    /// An induced claw `(center, [a, b, c])`, if one exists.
    pub fn find_claw(&self) -> Option<(usize, [usize; 3])> {
        for v in 0..self.n() {
            let nb = &self.adj[v];
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if self.has_edge(nb[i], nb[j]) {
                        continue;
                    }
                    for k in j + 1..nb.len() {
                        if !self.has_edge(nb[i], nb[k]) && !self.has_edge(nb[j], nb[k]) {
                            return Some((v, [nb[i], nb[j], nb[k]]));
                        }
                    }
                }
            }
        }
        None
    }

    /// True iff no induced `K_{1,3}`.
    pub fn is_claw_free(&self) -> bool {
        self.find_claw().is_none()
    }

    /// True iff `set` spans no edge.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .all(|&u| set.iter().all(|&w| !self.has_edge(u, w)))
    }
}

/// Parses the edge-list format: a vertex-count line followed by `u v` lines.
/// Blank lines and `#` comments are ignored.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing vertex count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line: first_line,
        message: format!("expected vertex count, found {header:?}"),
    })?;
    let mut edges = Vec::new();
    for (line, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected \"u v\", found {body:?}"),
            });
        }
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad vertex index {s:?}"),
            })
        };
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                message: format!("vertex index {} not below n = {n}", u.max(v)),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at vertex {u}"),
            });
        }
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

/// Writes the edge-list format understood by [`parse_graph`].
pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Occupation boundary condition `sigma: Lambda -> {0, 1}` for the hard-core model.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardcoreBoundary {
    pub assignments: BTreeMap<usize, bool>,
}

impl HardcoreBoundary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, bool)>) -> Self {
        HardcoreBoundary {
            assignments: pairs.into_iter().collect(),
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.keys().copied()
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments
            .iter()
            .filter_map(|(&u, &x)| x.then_some(u))
    }

    pub fn get(&self, u: usize) -> Option<bool> {
        self.assignments.get(&u).copied()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.assignments.contains_key(&u)
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Checks the domain lies in `V(G)` and the occupied set is independent.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for u in self.domain() {
            g.check_vertex(u)?;
        }
        let occ: Vec<usize> = self.occupied().collect();
        for &a in &occ {
            for &b in g.neighbors(a) {
                if self.get(b) == Some(true) {
                    return Err(Error::InvalidBoundary(format!(
                        "occupied vertices {a} and {b} are adjacent"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Color boundary condition `sigma: Lambda -> [q]`. Colors are stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinBoundary {
    pub q: usize,
    pub assignments: BTreeMap<usize, usize>,
}

impl SpinBoundary {
    pub fn empty(q: usize) -> Self {
        SpinBoundary {
            q,
            assignments: BTreeMap::new(),
        }
    }

    pub fn from_pairs(q: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let b = SpinBoundary {
            q,
            assignments: pairs.into_iter().collect(),
        };
        if let Some((&u, &c)) = b.assignments.iter().find(|(_, &c)| c >= q) {
            return Err(Error::InvalidBoundary(format!(
                "vertex {u} has color {c} outside 0..{q}"
            )));
        }
        Ok(b)
    }

    pub fn get(&self, u: usize) -> Option<usize> {
        self.assignments.get(&u).copied()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.assignments.contains_key(&u)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.keys().copied()
    }

    /// `sigma_{v,i}`: the extension assigning color `i` to `v`.
    pub fn extended(&self, v: usize, color: usize) -> SpinBoundary {
        let mut out = self.clone();
        out.assignments.insert(v, color);
        out
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        for (&u, &c) in &self.assignments {
            g.check_vertex(u)?;
            if c >= self.q {
                return Err(Error::InvalidBoundary(format!(
                    "vertex {u} has color {c} outside 0..{}",
                    self.q
                )));
            }
        }
        Ok(())
    }
}

/// `G[sigma]`: removes `Lambda` and every vertex outside `Lambda` adjacent to an occupied
/// boundary vertex. The result is an induced subgraph with order-preserving relabeling.
pub fn apply_hardcore_boundary(g: &Graph, sigma: &HardcoreBoundary) -> Result<Subgraph> {
    sigma.validate(g)?;
    let mut keep = vec![true; g.n()];
    for u in sigma.domain() {
        keep[u] = false;
    }
    for u in sigma.occupied() {
        for &w in g.neighbors(u) {
            keep[w] = false;
        }
    }
    Ok(g.induced_by_mask(&keep))
}

/// Anything with a domain and a per-vertex value that can be compared for disagreement.
pub trait Boundary {
    fn domain_vec(&self) -> Vec<usize>;
    fn differs_at(&self, other: &Self, u: usize) -> bool;
}

impl Boundary for HardcoreBoundary {
    fn domain_vec(&self) -> Vec<usize> {
        self.domain().collect()
    }
    fn differs_at(&self, other: &Self, u: usize) -> bool {
        self.get(u) != other.get(u)
    }
}

impl Boundary for SpinBoundary {
    fn domain_vec(&self) -> Vec<usize> {
        self.domain().collect()
    }
    fn differs_at(&self, other: &Self, u: usize) -> bool {
        self.get(u) != other.get(u)
    }
}

/// `d_G(v, sigma != tau)`; `None` stands for infinity (no disagreement, or every
/// disagreement unreachable from `v`).
pub fn dist_to_disagreement<B: Boundary>(
    g: &Graph,
    v: usize,
    sigma: &B,
    tau: &B,
) -> Result<Option<usize>> {
    g.check_vertex(v)?;
    let domain = sigma.domain_vec();
    if domain != tau.domain_vec() {
        return Err(Error::InvalidBoundary(
            "boundary conditions have different domains".into(),
        ));
    }
    if domain.contains(&v) {
        return Err(Error::InvalidBoundary(format!(
            "vertex {v} lies in the boundary domain"
        )));
    }
    let dist = g.distances_from(v);
    Ok(domain
        .iter()
        .filter(|&&u| sigma.differs_at(tau, u))
        .filter_map(|&u| dist.get(u).copied().flatten())
        .min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let g = parse_graph("2\n0 1").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);

        let g = parse_graph("1\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));

        let g = parse_graph("3\n0 1\n1 2\n1 0").unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn parse_errors_name_the_line() {
        match parse_graph("3\n0 1\n2 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("3\n0 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("3\n0 1 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_graph("x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn format_round_trips() {
        let g = Graph::petersen();
        assert_eq!(parse_graph(&format_graph(&g)).unwrap(), g);
    }

    #[test]
    fn hardcore_boundary_examples() {
        let p3 = Graph::path(3);
        let s = apply_hardcore_boundary(&p3, &HardcoreBoundary::from_pairs([(0, true)])).unwrap();
        assert_eq!(s.graph.n(), 1);
        assert_eq!(s.old_of_new, vec![2]);

        let s = apply_hardcore_boundary(&p3, &HardcoreBoundary::from_pairs([(0, false)])).unwrap();
        assert_eq!(s.graph, Graph::path(2));
        assert_eq!(s.old_of_new, vec![1, 2]);

        let c4 = Graph::cycle(4);
        let s = apply_hardcore_boundary(&c4, &HardcoreBoundary::from_pairs([(0, true), (2, true)]))
            .unwrap();
        assert_eq!(s.graph.n(), 0);
    }

    #[test]
    fn invalid_hardcore_boundary_rejected() {
        let sigma = HardcoreBoundary::from_pairs([(0, true), (1, true)]);
        assert!(matches!(
            apply_hardcore_boundary(&Graph::path(3), &sigma),
            Err(Error::InvalidBoundary(_))
        ));
    }

    #[test]
    fn ball_examples() {
        let p3 = Graph::path(3);
        assert_eq!(p3.ball(0, 1), vec![0, 1]);
        assert_eq!(p3.ball(0, 5), vec![0, 1, 2]);
        assert_eq!(Graph::cycle(4).ball(0, 1), vec![0, 1, 3]);
        assert_eq!(p3.ball(1, 0), vec![1]);
    }

    #[test]
    fn disagreement_distance_examples() {
        let p4 = Graph::path(4);
        let s = HardcoreBoundary::from_pairs([(3, true)]);
        let t = HardcoreBoundary::from_pairs([(3, false)]);
        assert_eq!(dist_to_disagreement(&p4, 0, &s, &t).unwrap(), Some(3));
        assert_eq!(dist_to_disagreement(&p4, 0, &s, &s).unwrap(), None);

        let star = Graph::star(3);
        let s = HardcoreBoundary::from_pairs([(1, true), (2, false), (3, false)]);
        let t = HardcoreBoundary::from_pairs([(1, true), (2, true), (3, false)]);
        assert_eq!(dist_to_disagreement(&star, 0, &s, &t).unwrap(), Some(1));

        let other = HardcoreBoundary::from_pairs([(2, true)]);
        assert!(dist_to_disagreement(&p4, 0, &s, &other).is_err());
    }

    #[test]
    fn claw_examples() {
        assert!(!Graph::star(3).is_claw_free());
        assert!(Graph::path(7).is_claw_free());
        assert!(Graph::cycle(9).is_claw_free());
        let lp = Graph::petersen().line_graph();
        assert_eq!(lp.n(), 15);
        assert!(lp.max_degree() == 4 && lp.is_claw_free());
        assert!(!Graph::petersen().is_claw_free());
    }

    fn brute_claw_free(g: &Graph) -> bool {
        let n = g.n();
        for a in 0..n {
            for b in 0..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        if [b, c, d].contains(&a) {
                            continue;
                        }
                        let star = g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(a, d);
                        let indep =
                            !g.has_edge(b, c) && !g.has_edge(b, d) && !g.has_edge(c, d);
                        if star && indep {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut edges = Vec::new();
                let mut idx = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[idx] {
                            edges.push((u, v));
                        }
                        idx += 1;
                    }
                }
                Graph::from_edges(n, &edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric(g in arb_graph(9)) {
            for u in 0..g.n() {
                for &w in g.neighbors(u) {
                    prop_assert!(g.has_edge(w, u));
                    prop_assert!(w != u);
                }
            }
        }

        #[test]
        fn claw_scan_matches_brute_force(g in arb_graph(9)) {
            prop_assert_eq!(g.is_claw_free(), brute_claw_free(&g));
        }

        #[test]
        fn balls_grow_and_saturate(g in arb_graph(9), seed in 0usize..9) {
            let v = seed % g.n();
            let mut prev = g.ball(v, 0);
            prop_assert_eq!(prev.clone(), vec![v]);
            for k in 1..=g.n() {
                let b = g.ball(v, k);
                prop_assert!(prev.iter().all(|u| b.contains(u)));
                prev = b;
            }
            prop_assert_eq!(prev, g.component_of(v));
        }

        #[test]
        fn boundary_graph_is_induced(g in arb_graph(9), bits in proptest::collection::vec(0u8..3, 9)) {
            let mut sigma = HardcoreBoundary::new();
            for u in 0..g.n() {
                match bits[u] {
                    1 => { sigma.assignments.insert(u, false); }
                    2 if g.neighbors(u).iter().all(|&w| sigma.get(w) != Some(true)) => {
                        sigma.assignments.insert(u, true);
                    }
                    _ => {}
                }
            }
            let sub = apply_hardcore_boundary(&g, &sigma).unwrap();
            for a in 0..sub.graph.n() {
                for b in 0..sub.graph.n() {
                    prop_assert_eq!(
                        sub.graph.has_edge(a, b),
                        g.has_edge(sub.old_of_new[a], sub.old_of_new[b])
                    );
                }
                prop_assert!(!sigma.contains(sub.old_of_new[a]));
            }
        }

        #[test]
        fn disagreement_distance_symmetric(g in arb_graph(9), bits in proptest::collection::vec(any::<(bool, bool)>(), 9)) {
            let v = 0;
            let mut s = HardcoreBoundary::new();
            let mut t = HardcoreBoundary::new();
            for u in 1..g.n() {
                if bits[u].0 || bits[u].1 {
                    s.assignments.insert(u, bits[u].0);
                    t.assignments.insert(u, bits[u].1);
                }
            }
            prop_assert_eq!(
                dist_to_disagreement(&g, v, &s, &t).unwrap(),
                dist_to_disagreement(&g, v, &t, &s).unwrap()
            );
        }
    }
}
