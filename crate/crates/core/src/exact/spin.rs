use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{checked_ratio, Oracle};
use crate::error::{Error, Result};
use crate::graph::{Graph, SpinBoundary};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A dense `q x q` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinMatrix {
    q: usize,
    data: Vec<Complex64>,
}

impl SpinMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let q = rows.len();
        if q == 0 || rows.iter().any(|r| r.len() != q) {
            return Err(Error::Contract("interaction matrix must be square and nonempty".into()));
        }
        Ok(SpinMatrix {
            q,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_fn(q: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(q * q);
        for i in 0..q {
            for j in 0..q {
                data.push(f(i, j));
            }
        }
        SpinMatrix { q, data }
    }

    /// `J`, the all-ones matrix.
    pub fn ones(q: usize) -> Self {
        Self::from_fn(q, |_, _| ONE)
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.q + j]
    }

    /// `A - J`.
    pub fn minus_ones(&self) -> Self {
        Self::from_fn(self.q, |i, j| self.get(i, j) - ONE)
    }

    /// `J + z (A - J)`.
    pub fn interpolate(&self, z: Complex64) -> Self {
        Self::from_fn(self.q, |i, j| ONE + z * (self.get(i, j) - ONE))
    }

    /// `max_{i,j} |A_{i,j} - 1|`.
    pub fn max_deviation_from_ones(&self) -> f64 {
        self.data.iter().map(|a| (a - ONE).norm()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.q).all(|i| (0..self.q).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.q).map(|r| r.to_vec()).collect()
    }
}

/// External fields `xi_{v,c}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fields {
    q: usize,
    data: Vec<Complex64>,
}

impl Fields {
    pub fn ones(n: usize, q: usize) -> Self {
        Fields {
            q,
            data: vec![ONE; n * q],
        }
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.q
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn get(&self, v: usize, c: usize) -> Complex64 {
        self.data[v * self.q + c]
    }

    pub fn set(&mut self, v: usize, c: usize, value: Complex64) {
        self.data[v * self.q + c] = value;
    }

    /// `sum_c xi_{v,c}`.
    pub fn vertex_sum(&self, v: usize) -> Complex64 {
        self.data[v * self.q..(v + 1) * self.q].iter().sum()
    }

    /// Fields of the listed vertices, in the listed order.
    pub fn restrict(&self, vertices: &[usize]) -> Fields {
        let mut out = Fields::ones(vertices.len(), self.q);
        for (new, &old) in vertices.iter().enumerate() {
            for c in 0..self.q {
                out.set(new, c, self.get(old, c));
            }
        }
        out
    }
}

/// Per-edge matrices on an oriented graph: `((u, w), B)` contributes `B_{psi(u), psi(w)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedEdgeMatrices {
    pub entries: Vec<((usize, usize), SpinMatrix)>,
}

impl OrientedEdgeMatrices {
    /// The same matrix on every edge, oriented `u < w`.
    pub fn uniform(g: &Graph, m: &SpinMatrix) -> Self {
        OrientedEdgeMatrices {
            entries: g.edges().into_iter().map(|e| (e, m.clone())).collect(),
        }
    }
}

/// Per-vertex list of earlier-labelled partners: `(partner, matrix index, current vertex is head)`.
type BackEdges = Vec<Vec<(usize, usize, bool)>>;

struct SpinSum<'a> {
    q: usize,
    fixed: Vec<Option<usize>>,
    fields: Option<&'a Fields>,
    matrices: &'a [&'a SpinMatrix],
    back: BackEdges,
    colors: Vec<usize>,
}

impl SpinSum<'_> {
    fn run(&mut self, u: usize, acc: Complex64) -> Complex64 {
        if u == self.fixed.len() {
            return acc;
        }
        let choices: Vec<usize> = match self.fixed[u] {
            Some(c) => vec![c],
            None => (0..self.q).collect(),
        };
        let mut total = ZERO;
        for c in choices {
            let mut w = acc;
            if let Some(f) = self.fields {
                w *= f.get(u, c);
            }
            for &(y, m, is_head) in &self.back[u] {
                let cy = self.colors[y];
                w *= if is_head {
                    self.matrices[m].get(cy, c)
                } else {
                    self.matrices[m].get(c, cy)
                };
                if w == ZERO {
                    break;
                }
            }
            if w == ZERO {
                continue;
            }
            self.colors[u] = c;
            total += self.run(u + 1, w);
        }
        total
    }
}

fn fixed_colors(g: &Graph, sigma: &SpinBoundary, q: usize) -> Result<Vec<Option<usize>>> {
    if sigma.q != q {
        return Err(Error::Contract(format!(
            "boundary has q = {} but the matrix has q = {q}",
            sigma.q
        )));
    }
    sigma.validate(g)?;
    Ok((0..g.n()).map(|u| sigma.get(u)).collect())
}

impl Oracle {
    fn check_colorings(&self, fixed: &[Option<usize>], q: usize) -> Result<()> {
        let free = fixed.iter().filter(|c| c.is_none()).count() as u32;
        let count = (q as u64).checked_pow(free).unwrap_or(u64::MAX);
        if count > self.limits.max_colorings {
            return Err(Error::TooLarge {
                what: "coloring enumeration",
                size: count,
                limit: self.limits.max_colorings,
            });
        }
        Ok(())
    }

    /// `Z^sigma_G(A, xi)`: sum over colorings extending `sigma` of
    /// `prod_v xi_{v, phi(v)} prod_{uv in E} A_{phi(u), phi(v)}` with edges read as `u < v`.
    /// `fields = None` means `xi = 1`.
    pub fn hom_z(
        &self,
        g: &Graph,
        a: &SpinMatrix,
        fields: Option<&Fields>,
        sigma: &SpinBoundary,
    ) -> Result<Complex64> {
        let q = a.q();
        let fixed = fixed_colors(g, sigma, q)?;
        self.check_colorings(&fixed, q)?;
        if let Some(f) = fields {
            if f.n() != g.n() || f.q() != q {
                return Err(Error::Contract("field array has the wrong shape".into()));
            }
        }
        let back: BackEdges = (0..g.n())
            .map(|u| {
                g.neighbors(u)
                    .iter()
                    .filter(|&&y| y < u)
                    .map(|&y| (y, 0, true))
                    .collect()
            })
            .collect();
        let matrices = [a];
        let mut e = SpinSum {
            q,
            fixed,
            fields,
            matrices: &matrices,
            back,
            colors: vec![0; g.n()],
        };
        Ok(e.run(0, ONE))
    }

    /// `Z^sigma_G((B^e)_e)` for per-edge oriented matrices. Every edge of `g` must appear once.
    pub fn edge_matrix_z(
        &self,
        g: &Graph,
        matrices: &OrientedEdgeMatrices,
        sigma: &SpinBoundary,
    ) -> Result<Complex64> {
        let q = sigma.q;
        let mut seen = std::collections::BTreeSet::new();
        for ((u, w), m) in &matrices.entries {
            if !g.has_edge(*u, *w) || !seen.insert((*u.min(w), *u.max(w))) || m.q() != q {
                return Err(Error::Contract(format!(
                    "edge matrices do not match the graph at ({u}, {w})"
                )));
            }
        }
        if seen.len() != g.edge_count() {
            return Err(Error::Contract("some edges have no matrix".into()));
        }
        let fixed = fixed_colors(g, sigma, q)?;
        self.check_colorings(&fixed, q)?;
        let mut back: BackEdges = vec![Vec::new(); g.n()];
        for (idx, ((u, w), _)) in matrices.entries.iter().enumerate() {
            // attach the factor to the later-labelled endpoint
            if u < w {
                back[*w].push((*u, idx, true));
            } else {
                back[*u].push((*w, idx, false));
            }
        }
        let refs: Vec<&SpinMatrix> = matrices.entries.iter().map(|(_, m)| m).collect();
        let mut e = SpinSum {
            q,
            fixed,
            fields: None,
            matrices: &refs,
            back,
            colors: vec![0; g.n()],
        };
        Ok(e.run(0, ONE))
    }

    /// `P^sigma_{G,v,i;A}(z) = Z^{sigma_{v,i}}_G(J + z(A-J)) / Z^sigma_G(J + z(A-J))`.
    pub fn hom_ratio(
        &self,
        g: &Graph,
        v: usize,
        color: usize,
        sigma: &SpinBoundary,
        a: &SpinMatrix,
        z: Complex64,
    ) -> Result<Complex64> {
        g.check_vertex(v)?;
        if sigma.contains(v) {
            return Err(Error::InvalidBoundary(format!(
                "vertex {v} lies in the boundary domain"
            )));
        }
        if color >= a.q() {
            return Err(Error::Contract(format!("color {color} outside 0..{}", a.q())));
        }
        let m = a.interpolate(z);
        let num = self.hom_z(g, &m, None, &sigma.extended(v, color))?;
        let den = self.hom_z(g, &m, None, sigma)?;
        checked_ratio(num, den, z)
    }

    /// Coefficients in `z` of the polynomial `Z^sigma_G(J + z(A - J))`, by enumeration.
    pub fn hom_z_polynomial(
        &self,
        g: &Graph,
        a: &SpinMatrix,
        sigma: &SpinBoundary,
    ) -> Result<Vec<Complex64>> {
        let q = a.q();
        let fixed = fixed_colors(g, sigma, q)?;
        self.check_colorings(&fixed, q)?;
        let d = a.minus_ones();
        let mut out = vec![ZERO; g.edge_count() + 1];
        let mut colors = vec![0usize; g.n()];
        poly_rec(g, &d, &fixed, 0, &mut colors, vec![ONE], &mut out);
        Ok(out)
    }
}

fn poly_rec(
    g: &Graph,
    d: &SpinMatrix,
    fixed: &[Option<usize>],
    u: usize,
    colors: &mut [usize],
    acc: Vec<Complex64>,
    out: &mut [Complex64],
) {
    if u == g.n() {
        for (k, c) in acc.into_iter().enumerate() {
            out[k] += c;
        }
        return;
    }
    let choices: Vec<usize> = match fixed[u] {
        Some(c) => vec![c],
        None => (0..d.q()).collect(),
    };
    for c in choices {
        colors[u] = c;
        let mut p = acc.clone();
        for &y in g.neighbors(u).iter().filter(|&&y| y < u) {
            // multiply by (1 + t z)
            let t = d.get(colors[y], c);
            p.push(ZERO);
            for k in (1..p.len()).rev() {
                let prev = p[k - 1];
                p[k] += t * prev;
            }
        }
        poly_rec(g, d, fixed, u + 1, colors, p, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Oracle;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hom_z_examples() {
        let o = Oracle::default();
        let k2 = Graph::path(2);
        let e = SpinBoundary::empty(2);
        assert_eq!(o.hom_z(&k2, &SpinMatrix::ones(2), None, &e).unwrap(), c(4.0));
        let a = 0.7;
        let m = SpinMatrix::from_real_rows(&[vec![1.0 + a, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!((o.hom_z(&k2, &m, None, &e).unwrap() - c(3.0 + 1.0 + a)).norm() < 1e-15);
    }

    #[test]
    fn fully_fixed_boundary_is_single_summand() {
        let o = Oracle::default();
        let g = Graph::cycle(3);
        let m = SpinMatrix::from_real_rows(&[vec![2.0, 0.5], vec![0.5, 3.0]]).unwrap();
        let mut f = Fields::ones(3, 2);
        f.set(0, 1, c(1.5));
        f.set(2, 0, c(0.25));
        let sigma = SpinBoundary::from_pairs(2, [(0, 1), (1, 0), (2, 0)]).unwrap();
        let got = o.hom_z(&g, &m, Some(&f), &sigma).unwrap();
        let want = 1.5 * 0.25 * m.get(1, 0).re * m.get(1, 0).re * m.get(0, 0).re;
        assert!((got - c(want)).norm() < 1e-14);
    }

    #[test]
    fn hom_ratio_examples() {
        let o = Oracle::default();
        let k2 = Graph::path(2);
        let e = SpinBoundary::empty(2);
        let m = SpinMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let p = o.hom_ratio(&k2, 0, 0, &e, &m, c(1.0)).unwrap();
        assert!((p - c(3.0 / 5.0)).norm() < 1e-15);
        let p = o.hom_ratio(&k2, 0, 1, &e, &m, c(0.0)).unwrap();
        assert!((p - c(0.5)).norm() < 1e-15);
        let p = o
            .hom_ratio(&Graph::cycle(5), 2, 1, &e, &SpinMatrix::ones(2), Complex64::new(0.3, 2.0))
            .unwrap();
        assert!((p - c(0.5)).norm() < 1e-15);
        let sigma = SpinBoundary::from_pairs(2, [(0, 1)]).unwrap();
        assert!(o.hom_ratio(&k2, 0, 0, &sigma, &m, c(1.0)).is_err());
    }

    #[test]
    fn coloring_limit_enforced() {
        let o = Oracle::new(crate::exact::OracleLimits {
            max_colorings: 8,
            ..Default::default()
        });
        let e = SpinBoundary::empty(2);
        assert!(o.hom_z(&Graph::path(3), &SpinMatrix::ones(2), None, &e).is_ok());
        assert!(matches!(
            o.hom_z(&Graph::path(4), &SpinMatrix::ones(2), None, &e),
            Err(Error::TooLarge { .. })
        ));
        let sigma = SpinBoundary::from_pairs(2, [(3, 0)]).unwrap();
        assert!(o.hom_z(&Graph::path(4), &SpinMatrix::ones(2), None, &sigma).is_ok());
    }

    #[test]
    fn edge_matrix_examples() {
        let o = Oracle::default();
        let g = Graph::cycle(4);
        let e = SpinBoundary::empty(3);
        let j = OrientedEdgeMatrices::uniform(&g, &SpinMatrix::ones(3));
        assert_eq!(o.edge_matrix_z(&g, &j, &e).unwrap(), c(81.0));

        let b = SpinMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let single = OrientedEdgeMatrices {
            entries: vec![((1, 0), b.clone())],
        };
        let e2 = SpinBoundary::empty(2);
        assert_eq!(o.edge_matrix_z(&Graph::path(2), &single, &e2).unwrap(), c(10.0));
        // orientation matters for non-symmetric matrices
        let sigma = SpinBoundary::from_pairs(2, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(o.edge_matrix_z(&Graph::path(2), &single, &sigma).unwrap(), c(3.0));

        let missing = OrientedEdgeMatrices { entries: vec![] };
        assert!(o.edge_matrix_z(&Graph::path(2), &missing, &e2).is_err());
    }

    #[test]
    fn uniform_edge_matrices_match_hom_z() {
        let o = Oracle::default();
        let g = Graph::petersen().induced(&[0, 1, 2, 3, 4, 5, 6, 7]).graph;
        let m = SpinMatrix::from_fn(3, |i, j| Complex64::new(1.0 + 0.1 * (i + 2 * j) as f64, 0.05 * i as f64));
        let m = SpinMatrix::from_fn(3, |i, j| m.get(i.min(j), i.max(j)));
        let sigma = SpinBoundary::from_pairs(3, [(2, 1), (6, 2)]).unwrap();
        let a = o.hom_z(&g, &m, None, &sigma).unwrap();
        let b = o
            .edge_matrix_z(&g, &OrientedEdgeMatrices::uniform(&g, &m), &sigma)
            .unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn polynomial_in_z_matches_evaluation() {
        let o = Oracle::default();
        let g = Graph::cycle(5);
        let m = SpinMatrix::from_real_rows(&[vec![1.3, 0.8], vec![0.8, 1.1]]).unwrap();
        let sigma = SpinBoundary::from_pairs(2, [(0, 1)]).unwrap();
        let poly = o.hom_z_polynomial(&g, &m, &sigma).unwrap();
        for z in [c(0.0), c(0.4), Complex64::new(-0.3, 0.9)] {
            let direct = o.hom_z(&g, &m.interpolate(z), None, &sigma).unwrap();
            let horner = poly.iter().rev().fold(ZERO, |acc, &a| acc * z + a);
            assert!((direct - horner).norm() < 1e-12);
        }
    }
}
