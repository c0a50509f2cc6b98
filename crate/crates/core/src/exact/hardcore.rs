use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{checked_ratio, Oracle};
use crate::error::{Error, Result};
use crate::graph::{apply_hardcore_boundary, Graph, HardcoreBoundary};
use crate::series::PowerSeries;

/// Independence polynomial: `coefficients[k]` counts independent sets of size `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndPoly {
    pub coefficients: Vec<u64>,
}

impl IndPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * lambda + c as f64)
    }

    /// Derivative evaluated at `lambda`.
    pub fn eval_derivative(&self, lambda: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| {
                acc * lambda + (k as f64 * c as f64)
            })
    }

    pub fn to_series(&self, order: usize) -> PowerSeries {
        PowerSeries::from_coeffs(
            self.coefficients
                .iter()
                .map(|&c| Complex64::new(c as f64, 0.0))
                .collect(),
            order,
        )
    }

    /// `lambda * self`, as exact integers.
    pub fn shifted(&self) -> IndPoly {
        let mut c = vec![0];
        c.extend_from_slice(&self.coefficients);
        IndPoly { coefficients: c }
    }
}

/// Per-vertex activities for the multivariate independence polynomial.
pub type MultivariateWeights = [Complex64];

fn add_into(acc: &mut Vec<u64>, other: &[u64], shift: usize) -> Result<()> {
    if acc.len() < other.len() + shift {
        acc.resize(other.len() + shift, 0);
    }
    for (k, &c) in other.iter().enumerate() {
        acc[k + shift] = acc[k + shift]
            .checked_add(c)
            .ok_or(Error::Overflow("independence polynomial"))?;
    }
    Ok(())
}

struct IndEnumerator {
    adj: Vec<u64>,
    memo: HashMap<u64, Vec<u64>>,
}

impl IndEnumerator {
    // Branch on the lowest remaining vertex: Z(S) = Z(S - v) + lambda Z(S - N[v]).
    fn poly(&mut self, set: u64) -> Result<Vec<u64>> {
        if set == 0 {
            return Ok(vec![1]);
        }
        if let Some(p) = self.memo.get(&set) {
            return Ok(p.clone());
        }
        let v = set.trailing_zeros() as usize;
        let without = set & !(1u64 << v);
        let nb = self.adj[v] & set;
        let mut out = self.poly(without)?;
        if nb == 0 {
            // isolated in S: multiply by (1 + lambda)
            let base = out.clone();
            add_into(&mut out, &base, 1)?;
        } else {
            let other = self.poly(without & !nb)?;
            add_into(&mut out, &other, 1)?;
        }
        self.memo.insert(set, out.clone());
        Ok(out)
    }
}

struct WeightedEnumerator<'a> {
    adj: Vec<Vec<u64>>,
    weights: &'a [Complex64],
    memo: HashMap<Vec<u64>, Complex64>,
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

impl WeightedEnumerator<'_> {
    fn sum(&mut self, set: &mut Vec<u64>) -> Complex64 {
        let Some(v) = first_bit(set) else {
            return Complex64::new(1.0, 0.0);
        };
        if let Some(&z) = self.memo.get(set.as_slice()) {
            return z;
        }
        let key = set.clone();
        set[v / 64] &= !(1u64 << (v % 64));
        let w = self.weights[v];
        let isolated =
            w == Complex64::new(0.0, 0.0) || set.iter().zip(&self.adj[v]).all(|(s, a)| s & a == 0);
        let value = if isolated {
            (Complex64::new(1.0, 0.0) + w) * self.sum(set)
        } else {
            let mut rest: Vec<u64> = set.iter().zip(&self.adj[v]).map(|(s, a)| s & !a).collect();
            let with_v = w * self.sum(&mut rest);
            with_v + self.sum(set)
        };
        *set = key.clone();
        self.memo.insert(key, value);
        value
    }
}

/// `sum_{I independent} prod_{v in I} w_v` without any size limit. Memoized on the
/// remaining vertex set; intended for auxiliary graphs with few independent sets.
pub(crate) fn independence_sum(g: &Graph, weights: &[Complex64]) -> Complex64 {
    let words = g.n().div_ceil(64).max(1);
    let adj = (0..g.n())
        .map(|v| {
            let mut m = vec![0u64; words];
            for &w in g.neighbors(v) {
                m[w / 64] |= 1 << (w % 64);
            }
            m
        })
        .collect();
    let mut set = vec![0u64; words];
    for v in 0..g.n() {
        set[v / 64] |= 1 << (v % 64);
    }
    let mut e = WeightedEnumerator {
        adj,
        weights,
        memo: HashMap::new(),
    };
    e.sum(&mut set)
}

impl Oracle {
    fn check_size(&self, g: &Graph) -> Result<()> {
        let limit = self.limits.max_vertices.min(64);
        if g.n() > limit {
            return Err(Error::TooLarge {
                what: "graph for independent-set enumeration",
                size: g.n() as u64,
                limit: limit as u64,
            });
        }
        Ok(())
    }

    /// Exact independence polynomial by branch-and-prune enumeration.
    pub fn ind_poly(&self, g: &Graph) -> Result<IndPoly> {
        self.check_size(g)?;
        let adj = (0..g.n())
            .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | (1 << w)))
            .collect();
        let full = if g.n() == 64 {
            u64::MAX
        } else {
            (1u64 << g.n()) - 1
        };
        let mut e = IndEnumerator {
            adj,
            memo: HashMap::new(),
        };
        let mut coefficients = e.poly(full)?;
        while coefficients.len() > 1 && *coefficients.last().unwrap() == 0 {
            coefficients.pop();
        }
        Ok(IndPoly { coefficients })
    }

    /// `Z_G(lambda)`.
    pub fn eval_z(&self, g: &Graph, lambda: Complex64) -> Result<Complex64> {
        Ok(self.ind_poly(g)?.eval(lambda))
    }

    /// Multivariate independence polynomial `Z_G(w)`.
    pub fn multivariate_z(&self, g: &Graph, weights: &MultivariateWeights) -> Result<Complex64> {
        self.check_size(g)?;
        if weights.len() != g.n() {
            return Err(Error::Contract(format!(
                "{} weights for a graph on {} vertices",
                weights.len(),
                g.n()
            )));
        }
        Ok(independence_sum(g, weights))
    }

    /// Numerator and denominator polynomials of `P_{G,v}`, restricted to the component of `v`
    /// (the other components cancel): `(lambda Z_{C \ N[v]}, Z_C)`.
    pub fn ratio_polys(&self, g: &Graph, v: usize) -> Result<(IndPoly, IndPoly)> {
        g.check_vertex(v)?;
        let comp = g.induced(&g.component_of(v));
        let root = comp.map(v).unwrap();
        let den = self.ind_poly(&comp.graph)?;
        let num = self
            .ind_poly(&comp.graph.remove_closed_neighborhood(root).graph)?
            .shifted();
        Ok((num, den))
    }

    /// `P_{G,v}(lambda) = lambda Z_{G \ N[v]}(lambda) / Z_G(lambda)`.
    pub fn ratio_p(&self, g: &Graph, v: usize, lambda: Complex64) -> Result<Complex64> {
        let (num, den) = self.ratio_polys(g, v)?;
        checked_ratio(num.eval(lambda), den.eval(lambda), lambda)
    }

    /// `R_{G,v}(lambda) = lambda Z_{G \ N[v]}(lambda) / Z_{G - v}(lambda)`.
    pub fn ratio_r(&self, g: &Graph, v: usize, lambda: Complex64) -> Result<Complex64> {
        g.check_vertex(v)?;
        let comp = g.induced(&g.component_of(v));
        let root = comp.map(v).unwrap();
        let num = self
            .ind_poly(&comp.graph.remove_closed_neighborhood(root).graph)?
            .eval(lambda)
            * lambda;
        let den = self
            .ind_poly(&comp.graph.remove_vertex(root).graph)?
            .eval(lambda);
        checked_ratio(num, den, lambda)
    }

    /// `Pr[v in I | sigma]` through the ratio of `G[sigma]`.
    pub fn cond_prob_hardcore(
        &self,
        g: &Graph,
        v: usize,
        sigma: &HardcoreBoundary,
        lambda: f64,
    ) -> Result<f64> {
        check_cond_inputs(g, v, sigma, lambda)?;
        let sub = apply_hardcore_boundary(g, sigma)?;
        match sub.map(v) {
            None => Ok(0.0),
            Some(root) => Ok(self
                .ratio_p(&sub.graph, root, Complex64::new(lambda, 0.0))?
                .re),
        }
    }

    /// `Pr[v in I | sigma]` by enumerating every independent set of `G` consistent with
    /// `sigma`. Independent of the `G[sigma]` construction; used as a cross-check.
    pub fn cond_prob_hardcore_enumerate(
        &self,
        g: &Graph,
        v: usize,
        sigma: &HardcoreBoundary,
        lambda: f64,
    ) -> Result<f64> {
        check_cond_inputs(g, v, sigma, lambda)?;
        self.check_size(g)?;
        let mut with_v = 0.0;
        let mut total = 0.0;
        let mut chosen = vec![false; g.n()];
        enumerate_consistent(g, sigma, 0, &mut chosen, 1.0, lambda, v, &mut with_v, &mut total);
        Ok(with_v / total)
    }
}

fn check_cond_inputs(g: &Graph, v: usize, sigma: &HardcoreBoundary, lambda: f64) -> Result<()> {
    g.check_vertex(v)?;
    sigma.validate(g)?;
    if sigma.contains(v) {
        return Err(Error::InvalidBoundary(format!(
            "vertex {v} lies in the boundary domain"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Contract(format!(
            "conditional probabilities need lambda > 0, got {lambda}"
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn enumerate_consistent(
    g: &Graph,
    sigma: &HardcoreBoundary,
    u: usize,
    chosen: &mut [bool],
    weight: f64,
    lambda: f64,
    v: usize,
    with_v: &mut f64,
    total: &mut f64,
) {
    if u == g.n() {
        *total += weight;
        if chosen[v] {
            *with_v += weight;
        }
        return;
    }
    let can_take = g.neighbors(u).iter().all(|&w| w > u || !chosen[w]);
    let options: &[bool] = match sigma.get(u) {
        Some(true) => &[true],
        Some(false) => &[false],
        None => &[false, true],
    };
    for &take in options {
        if take && !can_take {
            continue;
        }
        chosen[u] = take;
        let w = if take { weight * lambda } else { weight };
        enumerate_consistent(g, sigma, u + 1, chosen, w, lambda, v, with_v, total);
        chosen[u] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn oracle() -> Oracle {
        Oracle::default()
    }

    #[test]
    fn ind_poly_examples() {
        assert_eq!(oracle().ind_poly(&Graph::empty(1)).unwrap().coefficients, vec![1, 1]);
        assert_eq!(oracle().ind_poly(&Graph::path(2)).unwrap().coefficients, vec![1, 2]);
        assert_eq!(oracle().ind_poly(&Graph::cycle(4)).unwrap().coefficients, vec![1, 4, 2]);
        assert_eq!(oracle().ind_poly(&Graph::empty(0)).unwrap().coefficients, vec![1]);
        // Petersen graph: 1 + 10x + 30x^2 + 30x^3 + 5x^4
        assert_eq!(
            oracle().ind_poly(&Graph::petersen()).unwrap().coefficients,
            vec![1, 10, 30, 30, 5]
        );
    }

    #[test]
    fn size_limit_is_configurable() {
        let small = Oracle::new(super::super::OracleLimits {
            max_vertices: 3,
            ..Default::default()
        });
        assert!(matches!(small.ind_poly(&Graph::path(4)), Err(Error::TooLarge { .. })));
        assert!(small.ind_poly(&Graph::path(3)).is_ok());
        assert!(oracle().ind_poly(&Graph::empty(41)).is_err());
    }

    #[test]
    fn eval_examples() {
        let o = oracle();
        assert_eq!(o.eval_z(&Graph::path(2), c(1.0, 0.0)).unwrap(), c(3.0, 0.0));
        assert_eq!(o.eval_z(&Graph::empty(1), c(-1.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(o.eval_z(&Graph::cycle(4), c(0.0, 1.0)).unwrap(), c(-1.0, 4.0));
    }

    #[test]
    fn multivariate_examples() {
        let o = oracle();
        let (a, b) = (c(0.3, 0.1), c(-0.7, 2.0));
        let z = o.multivariate_z(&Graph::path(2), &[a, b]).unwrap();
        assert!((z - (c(1.0, 0.0) + a + b)).norm() < 1e-15);
        let z = o.multivariate_z(&Graph::path(3), &[c(1.0, 0.0); 3]).unwrap();
        assert_eq!(z, c(5.0, 0.0));
        assert!(o.multivariate_z(&Graph::path(3), &[c(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn ratio_examples() {
        let o = oracle();
        let l = c(0.37, 0.2);
        let p = o.ratio_p(&Graph::empty(1), 0, l).unwrap();
        assert!((p - l / (c(1.0, 0.0) + l)).norm() < 1e-15);
        let p = o.ratio_p(&Graph::path(2), 0, c(1.0, 0.0)).unwrap();
        assert!((p.re - 1.0 / 3.0).abs() < 1e-15);
        let p = o.ratio_p(&Graph::path(3), 1, c(1.0, 0.0)).unwrap();
        assert!((p.re - 0.2).abs() < 1e-15);

        assert!((o.ratio_r(&Graph::empty(1), 0, l).unwrap() - l).norm() < 1e-15);
        assert!((o.ratio_r(&Graph::path(2), 0, c(1.0, 0.0)).unwrap().re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn near_zero_denominator_is_reported() {
        match oracle().ratio_p(&Graph::empty(1), 0, c(-1.0, 0.0)) {
            Err(Error::NearZeroDenominator { modulus, .. }) => assert!(modulus < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cond_prob_examples() {
        let o = oracle();
        let p3 = Graph::path(3);
        let s = HardcoreBoundary::from_pairs([(0, true)]);
        assert!((o.cond_prob_hardcore(&p3, 2, &s, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let s = HardcoreBoundary::from_pairs([(0, false)]);
        assert!((o.cond_prob_hardcore(&p3, 2, &s, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let s = HardcoreBoundary::from_pairs([(0, true)]);
        assert_eq!(o.cond_prob_hardcore(&p3, 1, &s, 1.0).unwrap(), 0.0);
        assert!(o.cond_prob_hardcore(&p3, 0, &s, 1.0).is_err());
        assert!(o.cond_prob_hardcore(&p3, 2, &s, -1.0).is_err());
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2).prop_map(
                move |bits| {
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
                },
            )
        })
    }

    fn brute_ind_poly(g: &Graph) -> Vec<u64> {
        let mut c = vec![0u64; g.n() + 1];
        for mask in 0u32..(1 << g.n()) {
            let set: Vec<usize> = (0..g.n()).filter(|&i| mask >> i & 1 == 1).collect();
            if g.is_independent(&set) {
                c[set.len()] += 1;
            }
        }
        while c.len() > 1 && *c.last().unwrap() == 0 {
            c.pop();
        }
        c
    }

    proptest! {
        #[test]
        fn matches_subset_brute_force(g in arb_graph(11)) {
            let p = oracle().ind_poly(&g).unwrap();
            prop_assert_eq!(&p.coefficients, &brute_ind_poly(&g));
            prop_assert_eq!(p.coefficients[0], 1);
            prop_assert_eq!(p.coefficients.get(1).copied().unwrap_or(0), g.n() as u64);
        }

        #[test]
        fn deletion_recurrence(g in arb_graph(12), v in 0usize..12) {
            let v = v % g.n();
            let o = oracle();
            let z = o.ind_poly(&g).unwrap().coefficients;
            let a = o.ind_poly(&g.remove_closed_neighborhood(v).graph).unwrap().shifted().coefficients;
            let b = o.ind_poly(&g.remove_vertex(v).graph).unwrap().coefficients;
            let mut sum = vec![0u64; z.len().max(a.len()).max(b.len())];
            for (k, x) in a.iter().enumerate() { sum[k] += x; }
            for (k, x) in b.iter().enumerate() { sum[k] += x; }
            while sum.len() > 1 && *sum.last().unwrap() == 0 { sum.pop(); }
            prop_assert_eq!(z, sum);
        }

        #[test]
        fn components_factor(g in arb_graph(8), h in arb_graph(8), re in -1.0f64..1.0, im in -1.0f64..1.0) {
            let o = oracle();
            let l = c(re, im);
            let joint = o.eval_z(&g.disjoint_union(&h), l).unwrap();
            let prod = o.eval_z(&g, l).unwrap() * o.eval_z(&h, l).unwrap();
            prop_assert!((joint - prod).norm() <= 1e-12 * (1.0 + prod.norm()));
        }

        #[test]
        fn multivariate_specializes(g in arb_graph(10), re in -1.0f64..1.0, im in -1.0f64..1.0) {
            let o = oracle();
            let l = c(re, im);
            let m = o.multivariate_z(&g, &vec![l; g.n()]).unwrap();
            let u = o.eval_z(&g, l).unwrap();
            prop_assert!((m - u).norm() <= 1e-12 * (1.0 + u.norm()));
        }

        #[test]
        fn p_is_r_over_one_plus_r(g in arb_graph(10), v in 0usize..10, re in -0.5f64..2.0, im in -1.0f64..1.0) {
            let o = oracle();
            let v = v % g.n();
            let l = c(re, im);
            if let (Ok(p), Ok(r)) = (o.ratio_p(&g, v, l), o.ratio_r(&g, v, l)) {
                let via_r = r / (c(1.0, 0.0) + r);
                if (c(1.0, 0.0) + r).norm() > 1e-6 {
                    prop_assert!((p - via_r).norm() <= 1e-10 * (1.0 + p.norm()));
                }
            }
        }

        #[test]
        fn cond_prob_routes_agree(g in arb_graph(11), bits in proptest::collection::vec(0u8..4, 11), lambda in 0.05f64..4.0) {
            let mut sigma = HardcoreBoundary::new();
            for u in 1..g.n() {
                match bits[u] {
                    1 => { sigma.assignments.insert(u, false); }
                    2 if g.neighbors(u).iter().all(|&w| sigma.get(w) != Some(true)) => {
                        sigma.assignments.insert(u, true);
                    }
                    _ => {}
                }
            }
            let o = oracle();
            let a = o.cond_prob_hardcore(&g, 0, &sigma, lambda).unwrap();
            let b = o.cond_prob_hardcore_enumerate(&g, 0, &sigma, lambda).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
