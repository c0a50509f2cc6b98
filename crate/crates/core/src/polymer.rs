//! Polymer representation of homomorphism partition functions with external fields.
//!
//! Expanding `prod_{uv in E} (1 + z(A - J)_{phi(u) phi(v)})` turns `Z^sigma_G(J + z(A-J), xi)`
//! into a hard-core model on the polymer graph: polymers are connected edge subsets, two
//! polymers are incompatible when their vertex sets meet, and each polymer carries the weight
//! `w^sigma(H)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::{for_each_connected_set, ursell_from_masks};
use crate::error::{Error, Result};
use crate::exact::{checked_ratio, independence_sum, near_zero_tolerance, Fields, OrientedEdgeMatrices, Oracle, SpinMatrix};
use crate::graph::{Graph, SpinBoundary};
use crate::series::PowerSeries;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Connected subgraph `(S, F)` of the host graph with `|F| >= 1`. Both lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polymer {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Polymer {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn intersects(&self, other: &Polymer) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.vertices.len() && b < other.vertices.len() {
            match self.vertices[a].cmp(&other.vertices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// `(S, F)` as a standalone graph, vertices relabeled in increasing order.
    pub fn as_graph(&self) -> Graph {
        let local = |u: usize| self.vertices.binary_search(&u).unwrap();
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, w)| (local(u), local(w))).collect();
        Graph::from_edges(self.vertices.len(), &edges).expect("polymer edges lie inside the polymer")
    }

    /// `sigma` restricted to `S`, in local labels.
    pub fn local_boundary(&self, sigma: &SpinBoundary) -> SpinBoundary {
        let mut out = SpinBoundary::empty(sigma.q);
        for (idx, &u) in self.vertices.iter().enumerate() {
            if let Some(c) = sigma.get(u) {
                out = out.extended(idx, c);
            }
        }
        out
    }
}

/// Polymers with the incompatibility graph `Gamma` (vertex sets intersect).
#[derive(Clone, Debug)]
pub struct PolymerGraph {
    pub polymers: Vec<Polymer>,
    pub gamma: Graph,
}

impl PolymerGraph {
    pub fn new(polymers: Vec<Polymer>) -> Self {
        let mut edges = Vec::new();
        for a in 0..polymers.len() {
            for b in a + 1..polymers.len() {
                if polymers[a].intersects(&polymers[b]) {
                    edges.push((a, b));
                }
            }
        }
        let gamma = Graph::from_edges(polymers.len(), &edges).expect("indices in range");
        PolymerGraph { polymers, gamma }
    }
}

/// Enumeration and series limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolymerLimits {
    pub max_edges: usize,
    pub max_polymers: usize,
    pub max_series_order: usize,
}

impl Default for PolymerLimits {
    fn default() -> Self {
        PolymerLimits {
            max_edges: 8,
            max_polymers: 1_000_000,
            max_series_order: 6,
        }
    }
}

/// Every connected edge subset with `1..=max_edges` edges, once each, in a deterministic order.
pub fn enumerate_polymers(g: &Graph, max_edges: usize, limits: &PolymerLimits) -> Result<Vec<Polymer>> {
    if max_edges > limits.max_edges {
        return Err(Error::TooLarge {
            what: "polymer edge count",
            size: max_edges as u64,
            limit: limits.max_edges as u64,
        });
    }
    enumerate_unchecked(g, max_edges, limits.max_polymers)
}

fn enumerate_unchecked(g: &Graph, max_edges: usize, cap: usize) -> Result<Vec<Polymer>> {
    let edges = g.edges();
    let lg = g.line_graph();
    let mut out = Vec::new();
    let mut overflow = false;
    for root in 0..edges.len() {
        let forbidden: Vec<bool> = (0..edges.len()).map(|e| e < root).collect();
        for_each_connected_set(&lg, root, max_edges, forbidden, &mut |set| {
            if overflow {
                return;
            }
            if out.len() == cap {
                overflow = true;
                return;
            }
            let es: Vec<(usize, usize)> = set.iter().map(|&e| edges[e]).collect();
            let mut vs: Vec<usize> = es.iter().flat_map(|&(u, w)| [u, w]).collect();
            vs.sort_unstable();
            vs.dedup();
            out.push(Polymer { vertices: vs, edges: es });
        });
    }
    if overflow {
        return Err(Error::TooLarge {
            what: "polymer enumeration",
            size: cap as u64 + 1,
            limit: cap as u64,
        });
    }
    Ok(out)
}

fn normalization(polymer: &Polymer, sigma: &SpinBoundary, fields: Option<&Fields>, q: usize) -> Complex64 {
    polymer.vertices.iter().fold(ONE, |acc, &u| {
        acc * match (sigma.get(u), fields) {
            (Some(c), Some(f)) => f.get(u, c),
            (Some(_), None) => ONE,
            (None, Some(f)) => f.vertex_sum(u),
            (None, None) => Complex64::new(q as f64, 0.0),
        }
    })
}

/// `w^sigma(H) = z^{|F|} Z^sigma_H(A - J, xi) / (prod_{S \ Lambda} sum_i xi_{u,i} prod_{Lambda cap S} xi_{u,sigma(u)})`.
pub fn polymer_weight(
    oracle: &Oracle,
    polymer: &Polymer,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    fields: Option<&Fields>,
    z: Complex64,
) -> Result<Complex64> {
    let h = polymer.as_graph();
    let local_fields = fields.map(|f| f.restrict(&polymer.vertices));
    let num = oracle.hom_z(&h, &a.minus_ones(), local_fields.as_ref(), &polymer.local_boundary(sigma))?;
    let den = normalization(polymer, sigma, fields, a.q());
    if den.norm() == 0.0 {
        return Err(Error::NearZeroDenominator { modulus: 0.0, at: z });
    }
    Ok(z.powu(polymer.edge_count() as u32) * num / den)
}

/// `(w-hat(H), d w-hat(H) / d xi_{v,i})` at `xi = 1`, where `w-hat = w / z^{|F|}`.
/// The derivative is zero unless `v` is a free vertex of `H`.
pub fn weight_and_derivative(
    oracle: &Oracle,
    polymer: &Polymer,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    v: usize,
    color: usize,
) -> Result<(Complex64, Complex64)> {
    let q = a.q();
    let h = polymer.as_graph();
    let local = polymer.local_boundary(sigma);
    let d = a.minus_ones();
    let free = polymer.vertices.iter().filter(|&&u| !sigma.contains(u)).count();
    let norm = (q as f64).powi(free as i32);
    let z_h = oracle.hom_z(&h, &d, None, &local)?;
    let w = z_h / norm;
    let dw = match polymer.vertices.binary_search(&v) {
        Ok(idx) if !sigma.contains(v) => {
            let pinned = oracle.hom_z(&h, &d, None, &local.extended(idx, color))?;
            (pinned - z_h / q as f64) / norm
        }
        _ => ZERO,
    };
    Ok((w, dw))
}

/// `p^sigma(xi) = prod_{V \ Lambda} sum_i xi_{v,i} prod_{Lambda} xi_{v,sigma(v)}`.
pub fn field_prefactor(g: &Graph, sigma: &SpinBoundary, fields: Option<&Fields>, q: usize) -> Complex64 {
    normalization(
        &Polymer {
            vertices: (0..g.n()).collect(),
            edges: Vec::new(),
        },
        sigma,
        fields,
        q,
    )
}

/// `p^sigma(xi) Z_Gamma(w^sigma)`, which equals `Z^sigma_G(J + z(A - J), xi)`.
pub fn hom_z_via_polymers(
    oracle: &Oracle,
    g: &Graph,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    fields: Option<&Fields>,
    z: Complex64,
    limits: &PolymerLimits,
) -> Result<Complex64> {
    sigma.validate(g)?;
    let pg = PolymerGraph::new(enumerate_unchecked(g, g.edge_count(), limits.max_polymers)?);
    let weights = pg
        .polymers
        .iter()
        .map(|p| polymer_weight(oracle, p, sigma, a, fields, z))
        .collect::<Result<Vec<_>>>()?;
    Ok(field_prefactor(g, sigma, fields, a.q()) * independence_sum(&pg.gamma, &weights))
}

/// Taylor series in `z` of `P^sigma_{G,v,i;A}(z)` to order `order`, from the polymer cluster
/// expansion of `d/d xi_{v,i} log Z` at `xi = 1`.
///
/// Coefficient `l` only sees `B_G(v, l)`: it is computed on that induced ball alone, so any
/// change farther out leaves it bit-for-bit unchanged.
#[allow(clippy::too_many_arguments)]
pub fn hom_ratio_series(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    color: usize,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    order: usize,
    limits: &PolymerLimits,
) -> Result<PowerSeries> {
    g.check_vertex(v)?;
    sigma.validate(g)?;
    let q = a.q();
    if sigma.q != q || color >= q {
        return Err(Error::Contract(format!("color {color} or boundary inconsistent with q = {q}")));
    }
    if sigma.contains(v) {
        return Err(Error::InvalidBoundary(format!("vertex {v} lies in the boundary domain")));
    }
    if order > limits.max_series_order {
        return Err(Error::TooLarge {
            what: "homomorphism series order",
            size: order as u64,
            limit: limits.max_series_order as u64,
        });
    }
    let mut coeffs = vec![Complex64::new(1.0 / q as f64, 0.0)];
    for l in 1..=order {
        let ball = g.induced(&g.ball(v, l));
        let root = ball.map(v).unwrap();
        let mut local_sigma = SpinBoundary::empty(q);
        for u in sigma.domain() {
            if let Some(nu) = ball.map(u) {
                local_sigma = local_sigma.extended(nu, sigma.get(u).unwrap());
            }
        }
        coeffs.push(series_coefficient(oracle, &ball.graph, root, color, &local_sigma, a, l, limits)?);
    }
    Ok(PowerSeries::from_coeffs(coeffs, order))
}

#[allow(clippy::too_many_arguments)]
fn series_coefficient(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    color: usize,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    l: usize,
    limits: &PolymerLimits,
) -> Result<Complex64> {
    let pg = PolymerGraph::new(enumerate_unchecked(g, l, limits.max_polymers)?);
    let sizes: Vec<usize> = pg.polymers.iter().map(Polymer::edge_count).collect();
    let wd = pg
        .polymers
        .iter()
        .map(|p| weight_and_derivative(oracle, p, sigma, a, v, color))
        .collect::<Result<Vec<_>>>()?;
    let roots: Vec<usize> = (0..pg.polymers.len()).filter(|&i| pg.polymers[i].contains(v)).collect();
    let mut total = ZERO;
    for (ri, &root) in roots.iter().enumerate() {
        let mut forbidden = vec![false; pg.polymers.len()];
        for &r in &roots[..ri] {
            forbidden[r] = true;
        }
        for_each_weighted_connected_set(&pg.gamma, &sizes, root, l, &mut forbidden, &mut |set| {
            total += multiset_terms(&pg, set, &sizes, &wd, l);
        });
    }
    Ok(total)
}

// Sum over multiplicities m >= 1 with sum m_j |F_j| = l of
// phi / prod m_j! * sum_j m_j dw_j w_j^{m_j - 1} prod_{j' != j} w_{j'}^{m_{j'}}.
fn multiset_terms(
    pg: &PolymerGraph,
    set: &[usize],
    sizes: &[usize],
    wd: &[(Complex64, Complex64)],
    l: usize,
) -> Complex64 {
    let base: usize = set.iter().map(|&p| sizes[p]).sum();
    if base > l {
        return ZERO;
    }
    let mut total = ZERO;
    let mut mult = vec![1usize; set.len()];
    let mut rec = |mult: &[usize]| {
        let mut owner = Vec::new();
        for (j, &m) in mult.iter().enumerate() {
            owner.extend(std::iter::repeat_n(j, m));
        }
        let adj: Vec<u32> = (0..owner.len())
            .map(|x| {
                (0..owner.len()).fold(0u32, |mask, y| {
                    let linked = x != y
                        && (owner[x] == owner[y] || pg.gamma.has_edge(set[owner[x]], set[owner[y]]));
                    if linked {
                        mask | 1 << y
                    } else {
                        mask
                    }
                })
            })
            .collect();
        let phi = ursell_from_masks(&adj);
        if phi == 0 {
            return;
        }
        let mut fact = 1.0;
        for &m in mult {
            for t in 2..=m {
                fact *= t as f64;
            }
        }
        let mut deriv = ZERO;
        for (j, &p) in set.iter().enumerate() {
            let (_, dw) = wd[p];
            if dw == ZERO {
                continue;
            }
            let mut term = dw * mult[j] as f64 * wd[p].0.powu(mult[j] as u32 - 1);
            for (k, &p2) in set.iter().enumerate() {
                if k != j {
                    term *= wd[p2].0.powu(mult[k] as u32);
                }
            }
            deriv += term;
        }
        total += deriv * (phi as f64 / fact);
    };
    multiplicities(set, sizes, l - base, 0, &mut mult, &mut rec);
    total
}

// Distributes `extra` edges over increments of the multiplicities, requiring the total to be exact.
fn multiplicities(
    set: &[usize],
    sizes: &[usize],
    extra: usize,
    j: usize,
    mult: &mut [usize],
    f: &mut dyn FnMut(&[usize]),
) {
    if j == set.len() {
        if extra == 0 {
            f(mult);
        }
        return;
    }
    let s = sizes[set[j]];
    let mut add = 0;
    while add * s <= extra {
        mult[j] = 1 + add;
        multiplicities(set, sizes, extra - add * s, j + 1, mult, f);
        add += 1;
    }
    mult[j] = 1;
}

/// Connected vertex sets of `g` containing `root`, avoiding `forbidden`, with total `size` at
/// most `budget`; each set once.
fn for_each_weighted_connected_set(
    g: &Graph,
    size: &[usize],
    root: usize,
    budget: usize,
    forbidden: &mut [bool],
    f: &mut dyn FnMut(&[usize]),
) {
    if size[root] > budget || forbidden[root] {
        return;
    }
    let mut in_set = vec![false; g.n()];
    in_set[root] = true;
    let mut set = vec![root];
    let cand: Vec<usize> = g.neighbors(root).iter().copied().filter(|&w| !forbidden[w]).collect();
    grow_weighted(g, size, &mut set, &mut in_set, cand, forbidden, budget - size[root], f);
}

#[allow(clippy::too_many_arguments)]
fn grow_weighted(
    g: &Graph,
    size: &[usize],
    set: &mut Vec<usize>,
    in_set: &mut [bool],
    cand: Vec<usize>,
    forbidden: &mut [bool],
    budget: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    f(set);
    let mut newly_forbidden = Vec::new();
    for (idx, &u) in cand.iter().enumerate() {
        if size[u] > budget {
            continue;
        }
        let mut next: Vec<usize> = cand[idx + 1..].to_vec();
        for &w in g.neighbors(u) {
            if !in_set[w] && !forbidden[w] && !cand.contains(&w) && !next.contains(&w) {
                next.push(w);
            }
        }
        in_set[u] = true;
        set.push(u);
        grow_weighted(g, size, set, in_set, next, forbidden, budget - size[u], f);
        set.pop();
        in_set[u] = false;
        forbidden[u] = true;
        newly_forbidden.push(u);
    }
    for u in newly_forbidden {
        forbidden[u] = false;
    }
}

/// `alpha` in `(0, 2 pi / (3 Delta))` maximizing `sin(alpha/2) cos(alpha Delta / 2)`, and the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSpec {
    pub max_degree: usize,
    pub alpha: f64,
    pub delta: f64,
}

fn delta_objective(alpha: f64, max_degree: usize) -> f64 {
    (alpha / 2.0).sin() * (alpha * max_degree as f64 / 2.0).cos()
}

/// Golden-section maximization to `1e-12` in `alpha`.
pub fn delta_delta(max_degree: usize) -> Result<DeltaSpec> {
    if max_degree < 3 {
        return Err(Error::Contract(format!("delta_Delta needs Delta >= 3, got {max_degree}")));
    }
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 2.0 * std::f64::consts::PI / (3.0 * max_degree as f64));
    let f = |x: f64| delta_objective(x, max_degree);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let alpha = (lo + hi) / 2.0;
    Ok(DeltaSpec {
        max_degree,
        alpha,
        delta: f(alpha),
    })
}

/// Outcome of a zero-freeness check in the `delta_Delta` box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroCheckReport {
    pub delta: f64,
    pub max_deviation: f64,
    pub in_box: bool,
    pub abs_z: f64,
    /// `|Z|` recomputed through per-edge matrices; must match `abs_z`.
    pub abs_z_edge_matrices: f64,
    pub nonzero: bool,
}

/// Evaluates `Z^sigma_G(A)` and reports it against the box `|A_{ij} - 1| <= delta_Delta`.
/// Outside the box nothing is claimed; the report still records `|Z|`.
pub fn barvinok_zero_check(
    oracle: &Oracle,
    g: &Graph,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    max_degree: usize,
) -> Result<ZeroCheckReport> {
    if g.max_degree() > max_degree {
        return Err(Error::Hypothesis(format!(
            "graph has maximum degree {} > {max_degree}",
            g.max_degree()
        )));
    }
    let spec = delta_delta(max_degree.max(3))?;
    let z = oracle.hom_z(g, a, None, sigma)?;
    let ze = oracle.edge_matrix_z(g, &OrientedEdgeMatrices::uniform(g, a), sigma)?;
    let dev = a.max_deviation_from_ones();
    Ok(ZeroCheckReport {
        delta: spec.delta,
        max_deviation: dev,
        in_box: dev <= spec.delta,
        abs_z: z.norm(),
        abs_z_edge_matrices: ze.norm(),
        nonzero: z.norm() > 1e-12,
    })
}

/// Outcome of the bounded-ratio sampling and the field-substitution identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundedRatioReport {
    pub box_radius: f64,
    pub max_deviation: f64,
    pub max_abs_ratio: f64,
    pub witness: Complex64,
    pub bound: f64,
    pub passes: bool,
    /// Largest normalized `|Z|` over the field-absorbed edge matrices; zero up to rounding.
    pub identity_residual: f64,
    /// Same expression with the edge matrices `1 + z(A - 1) xi^{1/deg} xi^{1/deg}` taken literally.
    pub literal_identity_residual: f64,
    /// Largest `|B^e_{ij} - 1|` of the literal matrices over the samples.
    pub literal_max_deviation: f64,
}

/// Samples `z` in the closed disk of radius `1 + eta` and checks `|P^sigma_{G,v,i;A}(z)| <= 1/eps`
/// for `A` in the box `|A_{ij} - 1| <= delta_Delta / ((1 + eps)^Delta (1 + eta))`.
///
/// At each sample it also sets `xi_{v,i} = 1 - 1/P`, all other fields 1, and evaluates the
/// per-edge partition function; expanding over the color of `v` shows it vanishes.
#[allow(clippy::too_many_arguments)]
pub fn bounded_ratio_check(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    color: usize,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    eta: f64,
    eps: f64,
    max_degree: usize,
    samples: usize,
    seed: u64,
) -> Result<BoundedRatioReport> {
    if g.max_degree() > max_degree {
        return Err(Error::Hypothesis(format!(
            "graph has maximum degree {} > {max_degree}",
            g.max_degree()
        )));
    }
    if g.degree(v) == 0 {
        return Err(Error::Contract(format!("vertex {v} is isolated")));
    }
    let spec = delta_delta(max_degree.max(3))?;
    let box_radius = spec.delta / ((1.0 + eps).powi(max_degree as i32) * (1.0 + eta));
    let dev = a.max_deviation_from_ones();
    if dev > box_radius {
        return Err(Error::Hypothesis(format!(
            "max |A_ij - 1| = {dev} exceeds the box radius {box_radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 1.0 + eta;
    let mut report = BoundedRatioReport {
        box_radius,
        max_deviation: dev,
        max_abs_ratio: 0.0,
        witness: ZERO,
        bound: 1.0 / eps,
        passes: true,
        identity_residual: 0.0,
        literal_identity_residual: 0.0,
        literal_max_deviation: 0.0,
    };
    for s in 0..samples {
        // a quarter of the samples on the boundary circle, the rest uniform in the disk
        let rho = if s % 4 == 0 { radius } else { radius * rng.gen::<f64>().sqrt() };
        let z = Complex64::from_polar(rho, rng.gen::<f64>() * std::f64::consts::TAU);
        let p = oracle.hom_ratio(g, v, color, sigma, a, z)?;
        if p.norm() > report.max_abs_ratio {
            report.max_abs_ratio = p.norm();
            report.witness = z;
        }
        let (res, lit_res, lit_dev) = contradiction_identity(oracle, g, v, color, sigma, a, z, p)?;
        report.identity_residual = report.identity_residual.max(res);
        report.literal_identity_residual = report.literal_identity_residual.max(lit_res);
        report.literal_max_deviation = report.literal_max_deviation.max(lit_dev);
    }
    report.passes = report.max_abs_ratio <= report.bound;
    Ok(report)
}

/// Returns `(field-absorbed residual, literal residual, literal max |B - 1|)`, residuals
/// normalized by `max(1, sum_j |Z^{sigma_{v,j}}|)`.
#[allow(clippy::too_many_arguments)]
pub fn contradiction_identity(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    color: usize,
    sigma: &SpinBoundary,
    a: &SpinMatrix,
    z: Complex64,
    p: Complex64,
) -> Result<(f64, f64, f64)> {
    let q = a.q();
    let xi_v = ONE - ONE / p;
    let field = |u: usize, c: usize| if u == v && c == color { xi_v } else { ONE };
    let root = |u: usize, c: usize| field(u, c).powf(1.0 / g.degree(u) as f64);
    let az = a.interpolate(z);
    let mut absorbed = Vec::new();
    let mut literal = Vec::new();
    let mut lit_dev = 0.0f64;
    for (u, w) in g.edges() {
        absorbed.push(((u, w), SpinMatrix::from_fn(q, |i, j| root(u, i) * root(w, j) * az.get(i, j))));
        let m = SpinMatrix::from_fn(q, |i, j| ONE + z * (a.get(i, j) - ONE) * root(u, i) * root(w, j));
        lit_dev = lit_dev.max(m.max_deviation_from_ones());
        literal.push(((u, w), m));
    }
    let scale = (0..q)
        .map(|j| oracle.hom_z(g, &az, None, &sigma.extended(v, j)).map(|x| x.norm()))
        .sum::<Result<f64>>()?
        .max(1.0);
    let ea = oracle.edge_matrix_z(g, &OrientedEdgeMatrices { entries: absorbed }, sigma)?;
    let el = oracle.edge_matrix_z(g, &OrientedEdgeMatrices { entries: literal }, sigma)?;
    Ok((ea.norm() / scale, el.norm() / scale, lit_dev))
}

/// Gap between two boundary conditions and the interpolation bound for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HomSsmResult {
    pub distance: Option<usize>,
    pub gap: f64,
    pub radius: f64,
    pub m: f64,
    /// `C` in `gap <= C r^{-d}`, namely `2 M r / (r - 1)`.
    pub constant: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// `|P^sigma(1) - P^tau(1)|` against `2 M / ((r - 1) r^{d - 1})`, where `r = delta_Delta / max|A - 1|`
/// is the largest disk on which `J + z(A - J)` stays in the zero-free box and `M` is the sampled
/// maximum of `|P^sigma|, |P^tau|` on `|z| = r`, inflated by 1.5.
#[allow(clippy::too_many_arguments)]
pub fn hom_ssm_experiment(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    color: usize,
    sigma: &SpinBoundary,
    tau: &SpinBoundary,
    a: &SpinMatrix,
    eta: f64,
    max_degree: usize,
    samples: usize,
) -> Result<HomSsmResult> {
    if g.max_degree() > max_degree {
        return Err(Error::Hypothesis(format!(
            "graph has maximum degree {} > {max_degree}",
            g.max_degree()
        )));
    }
    let spec = delta_delta(max_degree.max(3))?;
    let dev = a.max_deviation_from_ones();
    if dev >= (1.0 - eta) * spec.delta {
        return Err(Error::Hypothesis(format!(
            "max |A_ij - 1| = {dev} is not below (1 - eta) delta = {}",
            (1.0 - eta) * spec.delta
        )));
    }
    let distance = crate::graph::dist_to_disagreement(g, v, sigma, tau)?;
    let one = ONE;
    let gap = (oracle.hom_ratio(g, v, color, sigma, a, one)? - oracle.hom_ratio(g, v, color, tau, a, one)?).norm();
    let Some(d) = distance else {
        return Ok(HomSsmResult {
            distance,
            gap,
            radius: f64::INFINITY,
            m: 0.0,
            constant: 0.0,
            bound: 0.0,
            within_bound: gap <= 1e-12,
        });
    };
    if dev == 0.0 {
        return Ok(HomSsmResult {
            distance,
            gap,
            radius: f64::INFINITY,
            m: 1.0 / a.q() as f64,
            constant: 0.0,
            bound: 0.0,
            within_bound: gap <= 1e-12,
        });
    }
    let r = spec.delta / dev;
    let mut m = 0.0f64;
    for s in 0..samples.max(1) {
        let z = Complex64::from_polar(r, std::f64::consts::TAU * s as f64 / samples.max(1) as f64);
        for b in [sigma, tau] {
            let m_z = a.interpolate(z);
            let num = oracle.hom_z(g, &m_z, None, &b.extended(v, color))?;
            let den = oracle.hom_z(g, &m_z, None, b)?;
            if den.norm() < near_zero_tolerance(num) {
                return Err(Error::ZeroRegionViolation {
                    point: z,
                    detail: format!("|Z| = {:e} inside the zero-free box", den.norm()),
                });
            }
            m = m.max(checked_ratio(num, den, z)?.norm());
        }
    }
    m *= 1.5;
    let constant = 2.0 * m * r / (r - 1.0);
    let bound = constant * r.powi(-(d as i32));
    Ok(HomSsmResult {
        distance,
        gap,
        radius: r,
        m,
        constant,
        bound,
        within_bound: gap <= bound,
    })
}

/// Matrix with entries `1 + w`, `w` uniform in the closed disk of radius `radius`.
pub fn random_box_matrix<R: Rng>(rng: &mut R, q: usize, radius: f64) -> SpinMatrix {
    let rows: Vec<Vec<Complex64>> = (0..q)
        .map(|_| {
            (0..q)
                .map(|_| {
                    let r = radius * rng.gen::<f64>().sqrt();
                    ONE + Complex64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
                })
                .collect()
        })
        .collect();
    SpinMatrix::from_rows(rows).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn polymer_counts() {
        let l = PolymerLimits::default();
        assert_eq!(enumerate_polymers(&Graph::path(2), 8, &l).unwrap().len(), 1);
        assert_eq!(enumerate_polymers(&Graph::path(3), 8, &l).unwrap().len(), 3);
        assert_eq!(enumerate_polymers(&Graph::complete(3), 3, &l).unwrap().len(), 7);
        assert!(enumerate_polymers(&Graph::complete(3), 9, &l).is_err());
        let tight = PolymerLimits { max_polymers: 5, ..l };
        assert!(matches!(
            enumerate_polymers(&Graph::complete(3), 3, &tight),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn single_edge_weight() {
        let o = Oracle::default();
        let a = SpinMatrix::from_real_rows(&[vec![2.0, 0.5], vec![0.5, 1.5]]).unwrap();
        let p = &enumerate_polymers(&Graph::path(2), 1, &PolymerLimits::default()).unwrap()[0];
        let z = Complex64::new(0.3, -0.2);
        let w = polymer_weight(&o, p, &SpinBoundary::empty(2), &a, None, z).unwrap();
        let sum: f64 = [1.0, -0.5, -0.5, 0.5].iter().sum();
        assert!((w - z * sum / 4.0).norm() < 1e-15);
        assert_eq!(polymer_weight(&o, p, &SpinBoundary::empty(2), &SpinMatrix::ones(2), None, z).unwrap(), ZERO);
        assert_eq!(polymer_weight(&o, p, &SpinBoundary::empty(2), &a, None, ZERO).unwrap(), ZERO);
    }

    #[test]
    fn polymer_identity_small() {
        let o = Oracle::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [Graph::complete(4), Graph::cycle(5), Graph::star(3)] {
            let a = random_box_matrix(&mut rng, 3, 0.8);
            let mut f = Fields::ones(g.n(), 3);
            for u in 0..g.n() {
                for col in 0..3 {
                    f.set(u, col, Complex64::new(0.5 + rng.gen::<f64>(), rng.gen::<f64>() - 0.5));
                }
            }
            let sigma = SpinBoundary::from_pairs(3, [(0, 2)]).unwrap();
            let z = Complex64::new(0.7, 0.4);
            let lhs = hom_z_via_polymers(&o, &g, &sigma, &a, Some(&f), z, &PolymerLimits::default()).unwrap();
            let rhs = o.hom_z(&g, &a.interpolate(z), Some(&f), &sigma).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm(), "{lhs} vs {rhs}");
        }
        let g = Graph::path(3);
        let zero = hom_z_via_polymers(&o, &g, &SpinBoundary::empty(2), &random_box_matrix(&mut rng, 2, 1.0), None, ZERO, &PolymerLimits::default()).unwrap();
        assert!((zero - c(8.0)).norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let o = Oracle::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Graph::complete(4);
        let polymers = enumerate_polymers(&g, 4, &PolymerLimits::default()).unwrap();
        let sigma = SpinBoundary::from_pairs(2, [(3, 1)]).unwrap();
        let a = random_box_matrix(&mut rng, 2, 0.9);
        let h = 1e-5;
        for p in polymers.iter().filter(|p| p.contains(0)) {
            let (w, dw) = weight_and_derivative(&o, p, &sigma, &a, 0, 1).unwrap();
            let at = |x: f64| {
                let mut f = Fields::ones(g.n(), 2);
                f.set(0, 1, c(x));
                polymer_weight(&o, p, &sigma, &a, Some(&f), ONE).unwrap()
            };
            assert!((at(1.0) - w).norm() < 1e-14);
            let fd = (at(1.0 + h) - at(1.0 - h)) / (2.0 * h);
            assert!((fd - dw).norm() < 1e-6, "{fd} vs {dw}");
        }
    }

    #[test]
    fn series_matches_polynomial_division() {
        let o = Oracle::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (1, 3), (3, 4)]).unwrap();
        let a = random_box_matrix(&mut rng, 2, 0.7);
        let sigma = SpinBoundary::from_pairs(2, [(4, 0)]).unwrap();
        let s = hom_ratio_series(&o, &g, 0, 1, &sigma, &a, 4, &PolymerLimits::default()).unwrap();
        let num = o.hom_z_polynomial(&g, &a, &sigma.extended(0, 1)).unwrap();
        let den = o.hom_z_polynomial(&g, &a, &sigma).unwrap();
        let want = crate::series::divide(&PowerSeries::from_coeffs(num, 4), &PowerSeries::from_coeffs(den, 4)).unwrap();
        assert!(s.max_abs_diff(&want) < 1e-9, "{:?} vs {:?}", s.coeffs(), want.coeffs());
        assert!((s.coeff(0) - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn series_for_all_ones_is_constant() {
        let o = Oracle::default();
        let s = hom_ratio_series(&o, &Graph::cycle(4), 0, 0, &SpinBoundary::empty(3), &SpinMatrix::ones(3), 4, &PolymerLimits::default()).unwrap();
        assert!(s.max_abs_diff(&PowerSeries::from_real(&[1.0 / 3.0], 4)) < 1e-15);
    }

    #[test]
    fn delta_values() {
        let d3 = delta_delta(3).unwrap();
        let f = |x| delta_objective(x, 3);
        assert!((f(d3.alpha) - d3.delta).abs() < 1e-12);
        assert!((d3.delta - 0.184_504_364_914_095).abs() < 1e-12);
        assert!((d3.alpha - 0.567_829_369_053_979).abs() < 1e-6);
        assert!(f(d3.alpha - 1e-4) < d3.delta && f(d3.alpha + 1e-4) < d3.delta);
        let mut prev = d3.delta;
        for k in 4..=10 {
            let d = delta_delta(k).unwrap().delta;
            assert!(d < prev);
            prev = d;
        }
        assert!(delta_delta(2).is_err());
        for k in 3..=64 {
            assert!(k as f64 * delta_delta(k).unwrap().delta > 0.55);
        }
    }

    #[test]
    fn contradiction_identity_vanishes() {
        let o = Oracle::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = Graph::cycle(5);
        let a = random_box_matrix(&mut rng, 3, 0.05);
        let sigma = SpinBoundary::from_pairs(3, [(2, 0)]).unwrap();
        let z = Complex64::new(1.1, 0.3);
        let p = o.hom_ratio(&g, 0, 1, &sigma, &a, z).unwrap();
        let (res, _, _) = contradiction_identity(&o, &g, 0, 1, &sigma, &a, z, p).unwrap();
        assert!(res < 1e-12, "{res}");
    }

    #[test]
    fn ssm_equal_boundaries_give_zero_gap() {
        let o = Oracle::default();
        let g = Graph::path(6);
        let sigma = SpinBoundary::from_pairs(2, [(5, 0)]).unwrap();
        let a = SpinMatrix::from_real_rows(&[vec![1.02, 0.99], vec![0.99, 1.01]]).unwrap();
        let r = hom_ssm_experiment(&o, &g, 0, 0, &sigma, &sigma, &a, 0.5, 3, 32).unwrap();
        assert_eq!(r.gap, 0.0);
        let tau = SpinBoundary::from_pairs(2, [(5, 1)]).unwrap();
        let r = hom_ssm_experiment(&o, &g, 0, 0, &sigma, &tau, &a, 0.5, 3, 32).unwrap();
        assert!(r.within_bound && r.gap > 0.0, "{r:?}");
    }
}
