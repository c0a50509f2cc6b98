//! Cluster-expansion coefficients of `log Z_G` and of the occupation ratio `P_{G,v}`
//! around `lambda = 0`, plus a division-based route for the ratio series.
//!
//! The cluster sums run over vertex sequences `(v_1, ..., v_k)`. The summand
//! `phi(G(v_1..v_k)) m_v(...)` is invariant under reordering, so each multiset of
//! vertices is visited once and weighted by its number of orderings `k! / prod m_u!`.
//! The sequences with a connected cluster graph are exactly the multisets whose
//! support induces a connected subgraph, which is what the enumeration walks.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Oracle;
use crate::graph::Graph;
use crate::series::{divide, PowerSeries};

/// Largest edge count `ursell` will scan exhaustively.
pub const URSELL_EDGE_LIMIT: usize = 20;

/// `phi(H) = sum over connected spanning edge subsets F of (-1)^{|F|}`, by scanning every
/// edge subset. Zero for disconnected `H`.
pub fn ursell(h: &Graph) -> Result<i64> {
    let edges = h.edges();
    if edges.len() > URSELL_EDGE_LIMIT {
        return Err(Error::TooLarge {
            what: "edge set for the exhaustive Ursell scan",
            size: edges.len() as u64,
            limit: URSELL_EDGE_LIMIT as u64,
        });
    }
    let n = h.n();
    if n == 0 {
        return Ok(0);
    }
    let mut total = 0i64;
    let mut parent = vec![0usize; n];
    for mask in 0u32..(1u32 << edges.len()) {
        if (mask.count_ones() as usize) + 1 < n {
            continue;
        }
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i;
        }
        let mut components = n;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                    components -= 1;
                }
            }
        }
        if components == 1 {
            total += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(total)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Ursell function from adjacency bitmasks by the connected-set recursion
/// `c(X) = [X independent] - sum_{min X in T < X} c(T) [X \ T independent]`.
/// Runs in `O(3^n)`; `n <= 16`.
pub fn ursell_from_masks(adj: &[u32]) -> i64 {
    let n = adj.len();
    assert!(n <= 16, "ursell recursion supports at most 16 vertices");
    if n == 0 {
        return 0;
    }
    let full = (1u32 << n) - 1;
    let mut independent = vec![false; 1 << n];
    independent[0] = true;
    for x in 1..=full {
        let low = x.trailing_zeros() as usize;
        let rest = x & (x - 1);
        independent[x as usize] = independent[rest as usize] && adj[low] & rest == 0;
    }
    let mut c = vec![0i64; 1 << n];
    for x in 1..=full {
        let low = x & x.wrapping_neg();
        let mut value = i64::from(independent[x as usize]);
        // proper subsets T of X that contain the lowest element
        let others = x & !low;
        let mut sub = others;
        loop {
            let t = sub | low;
            if t != x && independent[(x & !t) as usize] {
                value -= c[t as usize];
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        c[x as usize] = value;
    }
    c[full as usize]
}

/// Ursell function of a [`Graph`] through [`ursell_from_masks`].
pub fn ursell_recursive(h: &Graph) -> i64 {
    let adj: Vec<u32> = (0..h.n())
        .map(|v| h.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    ursell_from_masks(&adj)
}

/// Memo key: vertex count and upper-triangle adjacency after relabeling by degree.
/// Equal keys imply isomorphic graphs, which is all the memo needs.
type ClusterKey = (u8, u64);

fn cluster_key(adj: &[u32]) -> ClusterKey {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (adj[v].count_ones(), v));
    let mut bits = 0u64;
    let mut idx = 0;
    for a in 0..n {
        for b in a + 1..n {
            let (u, w) = (order[a], order[b]);
            if adj[u] >> w & 1 == 1 {
                bits |= 1 << idx;
            }
            idx += 1;
        }
    }
    (n as u8, bits)
}

/// Which cluster sum to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesMethod {
    Cluster,
    Division,
}

impl std::str::FromStr for SeriesMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cluster" => Ok(SeriesMethod::Cluster),
            "division" => Ok(SeriesMethod::Division),
            other => Err(Error::Contract(format!("unknown series method {other:?}"))),
        }
    }
}

/// Cluster-expansion engine: an order limit plus a shared Ursell memo.
#[derive(Debug)]
pub struct ClusterEngine {
    pub order_limit: usize,
    pub oracle: Oracle,
    memo: Mutex<HashMap<ClusterKey, i64>>,
}

impl Default for ClusterEngine {
    fn default() -> Self {
        ClusterEngine::new(8)
    }
}

impl ClusterEngine {
    pub fn new(order_limit: usize) -> Self {
        ClusterEngine {
            order_limit,
            oracle: Oracle::default(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.order_limit {
            return Err(Error::TooLarge {
                what: "cluster expansion order",
                size: order as u64,
                limit: self.order_limit as u64,
            });
        }
        Ok(())
    }

    fn phi(&self, adj: &[u32]) -> i64 {
        let key = cluster_key(adj);
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return v;
        }
        let value = ursell_from_masks(adj);
        self.memo.lock().unwrap().insert(key, value);
        value
    }

    /// `phi` of the cluster graph of the multiset with support `set` and multiplicities `mult`.
    fn cluster_phi(&self, g: &Graph, set: &[usize], mult: &[usize]) -> i64 {
        let mut owner = Vec::new();
        for (i, &m) in mult.iter().enumerate() {
            owner.extend(std::iter::repeat_n(i, m));
        }
        let adj: Vec<u32> = (0..owner.len())
            .map(|a| {
                (0..owner.len()).fold(0u32, |mask, b| {
                    let linked = a != b
                        && (owner[a] == owner[b] || g.has_edge(set[owner[a]], set[owner[b]]));
                    if linked {
                        mask | 1 << b
                    } else {
                        mask
                    }
                })
            })
            .collect();
        self.phi(&adj)
    }

    /// Accumulates `sum over multisets on support S` of `phi * weight(mult) * k!/prod m!`
    /// into `acc[k]` for every `k` in `|S|..=order`.
    fn accumulate(
        &self,
        g: &Graph,
        set: &[usize],
        order: usize,
        weight: impl Fn(&[usize]) -> i128,
        acc: &mut [i128],
    ) {
        let s = set.len();
        let mut mult = vec![1usize; s];
        for k in s..=order {
            for_each_composition(k, s, &mut mult, &mut |m| {
                let w = weight(m);
                if w == 0 {
                    return;
                }
                let phi = self.cluster_phi(g, set, m) as i128;
                acc[k] += phi * w * multinomial(k, m);
            });
        }
    }

    /// Cluster expansion of `log Z_G(lambda)` to order `order` (constant term 0).
    pub fn logz_series(&self, g: &Graph, order: usize) -> Result<PowerSeries> {
        self.check_order(order)?;
        let mut acc = vec![0i128; order + 1];
        for root in 0..g.n() {
            // connected sets whose smallest vertex is `root`
            let forbidden: Vec<bool> = (0..g.n()).map(|u| u < root).collect();
            for_each_connected_set(g, root, order, forbidden, &mut |set| {
                self.accumulate(g, set, order, |_| 1, &mut acc);
            });
        }
        Ok(finish(&acc, order))
    }

    /// Cluster series of `P_{G,v}(lambda)`:
    /// coefficient `k` is `(1/k!) sum phi(G(v_1..v_k)) m_v(v_1..v_k)`.
    pub fn ratio_series_cluster(&self, g: &Graph, v: usize, order: usize) -> Result<PowerSeries> {
        g.check_vertex(v)?;
        self.check_order(order)?;
        let mut acc = vec![0i128; order + 1];
        for_each_connected_set(g, v, order, vec![false; g.n()], &mut |set| {
            let pos = set.iter().position(|&u| u == v).unwrap();
            self.accumulate(g, set, order, |m| m[pos] as i128, &mut acc);
        });
        Ok(finish(&acc, order))
    }

    /// Ratio series from exact polynomials on `B_G(v, order)`:
    /// `lambda Z_{B \ N[v]} / Z_B`, expanded by series reciprocal.
    pub fn ratio_series_division(&self, g: &Graph, v: usize, order: usize) -> Result<PowerSeries> {
        ratio_series_division(&self.oracle, g, v, order)
    }

    pub fn ratio_series(
        &self,
        g: &Graph,
        v: usize,
        order: usize,
        method: SeriesMethod,
    ) -> Result<PowerSeries> {
        match method {
            SeriesMethod::Cluster => self.ratio_series_cluster(g, v, order),
            SeriesMethod::Division => self.ratio_series_division(g, v, order),
        }
    }
}

/// See [`ClusterEngine::ratio_series_division`].
pub fn ratio_series_division(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    order: usize,
) -> Result<PowerSeries> {
    g.check_vertex(v)?;
    let ball = g.induced(&g.ball(v, order));
    let root = ball.map(v).unwrap();
    let (num, den) = oracle.ratio_polys(&ball.graph, root)?;
    divide(&num.to_series(order), &den.to_series(order))
}

fn finish(acc: &[i128], order: usize) -> PowerSeries {
    let mut fact = 1.0f64;
    let coeffs = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            if k > 0 {
                fact *= k as f64;
            }
            Complex64::new(a as f64 / fact, 0.0)
        })
        .collect();
    PowerSeries::from_coeffs(coeffs, order)
}

fn multinomial(k: usize, parts: &[usize]) -> i128 {
    let mut out: i128 = 1;
    let mut taken = 0usize;
    for &m in parts {
        for j in 1..=m {
            taken += 1;
            out = out * taken as i128 / j as i128;
        }
    }
    debug_assert_eq!(taken, k);
    out
}

/// Calls `f` with every composition of `k` into `parts` positive parts.
fn for_each_composition(k: usize, parts: usize, buf: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    fn rec(i: usize, left: usize, buf: &mut [usize], f: &mut dyn FnMut(&[usize])) {
        let parts = buf.len();
        if i + 1 == parts {
            buf[i] = left;
            f(buf);
            return;
        }
        let remaining = parts - i - 1;
        for m in 1..=left - remaining {
            buf[i] = m;
            rec(i + 1, left - m, buf, f);
        }
    }
    if parts == 0 || k < parts {
        return;
    }
    rec(0, k, &mut buf[..parts], f);
}

/// Calls `f` with every connected vertex set of size `<= max_size` that contains `root`
/// and avoids `forbidden`, each exactly once. Sets are passed sorted.
pub fn for_each_connected_set(
    g: &Graph,
    root: usize,
    max_size: usize,
    mut forbidden: Vec<bool>,
    f: &mut dyn FnMut(&[usize]),
) {
    if max_size == 0 || forbidden[root] {
        return;
    }
    let mut in_set = vec![false; g.n()];
    in_set[root] = true;
    let mut set = vec![root];
    let cand: Vec<usize> = g
        .neighbors(root)
        .iter()
        .copied()
        .filter(|&w| !forbidden[w])
        .collect();
    grow(g, &mut set, &mut in_set, cand, &mut forbidden, max_size, f);
}

// Branch on candidates in order: include the candidate, or forbid it for the rest of the branch.
fn grow(
    g: &Graph,
    set: &mut Vec<usize>,
    in_set: &mut [bool],
    cand: Vec<usize>,
    forbidden: &mut [bool],
    max_size: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    let mut sorted = set.clone();
    sorted.sort_unstable();
    f(&sorted);
    if set.len() == max_size {
        return;
    }
    let mut newly_forbidden = Vec::new();
    for (idx, &u) in cand.iter().enumerate() {
        let mut next: Vec<usize> = cand[idx + 1..].to_vec();
        for &w in g.neighbors(u) {
            if !in_set[w] && !forbidden[w] && !cand.contains(&w) && !next.contains(&w) {
                next.push(w);
            }
        }
        in_set[u] = true;
        set.push(u);
        grow(g, set, in_set, next, forbidden, max_size, f);
        set.pop();
        in_set[u] = false;
        forbidden[u] = true;
        newly_forbidden.push(u);
    }
    for u in newly_forbidden {
        forbidden[u] = false;
    }
}

/// `(Delta - 1)^{Delta - 1} / Delta^Delta`, the zero-free disk radius for max degree `Delta`.
pub fn shearer_radius(max_degree: usize) -> Result<f64> {
    if max_degree < 2 {
        return Err(Error::Contract(format!(
            "Shearer radius needs Delta >= 2, got {max_degree}"
        )));
    }
    Ok(power_ratio(max_degree - 1, max_degree - 1, max_degree, max_degree))
}

/// `(Delta - 1)^{Delta - 1} / (Delta - 2)^Delta`, the uniqueness threshold on the `Delta`-regular tree.
pub fn weitz_lambda_c(max_degree: usize) -> Result<f64> {
    if max_degree < 3 {
        return Err(Error::Contract(format!(
            "critical activity needs Delta >= 3, got {max_degree}"
        )));
    }
    Ok(power_ratio(max_degree - 1, max_degree - 1, max_degree - 2, max_degree))
}

// a^p / b^r, exact integers where they fit so that small cases round correctly.
fn power_ratio(a: usize, p: usize, b: usize, r: usize) -> f64 {
    let num = (a as u128).checked_pow(p as u32);
    let den = (b as u128).checked_pow(r as u32);
    match (num, den) {
        (Some(x), Some(y)) if x < 1 << 100 && y < 1 << 100 => x as f64 / y as f64,
        _ => (a as f64).powi(p as i32) / (b as f64).powi(r as i32),
    }
}
