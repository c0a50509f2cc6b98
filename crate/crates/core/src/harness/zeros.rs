use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{IndPoly, Oracle};
use crate::graph::Graph;

const BASE_POINTS: usize = 64;
const MAX_DOUBLINGS: usize = 4;
const CONTOUR_TOL: f64 = 1e-10;

/// Axis-parallel rectangle `[re0, re1] x [im0, im1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub re0: f64,
    pub im0: f64,
    pub re1: f64,
    pub im1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroScanReport {
    pub rectangle: Rectangle,
    pub nx: usize,
    pub ny: usize,
    /// Row-major over cells (imaginary part outer); `None` marks an inconclusive cell.
    pub counts: Vec<Option<i64>>,
    pub total: Option<i64>,
    pub inconclusive: usize,
    pub min_abs_z: f64,
}

struct Contour {
    integral: Complex64,
    min_abs: f64,
}

fn poly_eval(c: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

// Trapezoidal rule for the integral of p'/p along the polygon through `corners` (closed).
fn contour(c: &[f64], corners: &[Complex64], per_side: usize) -> Contour {
    let mut integral = Complex64::new(0.0, 0.0);
    let mut min_abs = f64::INFINITY;
    for k in 0..corners.len() {
        let (a, b) = (corners[k], corners[(k + 1) % corners.len()]);
        let step = (b - a) / per_side as f64;
        for j in 0..=per_side {
            let x = a + step * j as f64;
            let (p, dp) = poly_eval(c, x);
            min_abs = min_abs.min(p.norm());
            let w = if j == 0 || j == per_side { 0.5 } else { 1.0 };
            integral += dp / p * step * w;
        }
    }
    Contour { integral, min_abs }
}

fn count_in_polygon(c: &[f64], corners: &[Complex64]) -> (Option<i64>, f64) {
    let mut min_abs = f64::INFINITY;
    let mut n = BASE_POINTS;
    for _ in 0..=MAX_DOUBLINGS {
        let ct = contour(c, corners, n);
        min_abs = min_abs.min(ct.min_abs);
        let w = ct.integral / Complex64::new(0.0, std::f64::consts::TAU);
        let near = w.re.round();
        if ct.min_abs > CONTOUR_TOL && (w.re - near).abs() < 0.05 && w.im.abs() < 0.05 && near >= 0.0 {
            return (Some(near as i64), min_abs);
        }
        n *= 2;
    }
    (None, min_abs)
}

/// Argument-principle zero counts of `Z_G` on an `nx x ny` grid of cells.
pub fn zero_scan(oracle: &Oracle, g: &Graph, rect: Rectangle, nx: usize, ny: usize) -> Result<ZeroScanReport> {
    let poly = oracle.ind_poly(g)?;
    zero_scan_poly(&poly, rect, nx, ny)
}

pub fn zero_scan_poly(poly: &IndPoly, rect: Rectangle, nx: usize, ny: usize) -> Result<ZeroScanReport> {
    if nx == 0 || ny == 0 || !(rect.re1 > rect.re0 && rect.im1 > rect.im0) {
        return Err(Error::Contract("zero scan needs a nondegenerate rectangle and grid".into()));
    }
    let c: Vec<f64> = poly.coefficients.iter().map(|&a| a as f64).collect();
    let (dx, dy) = ((rect.re1 - rect.re0) / nx as f64, (rect.im1 - rect.im0) / ny as f64);
    let mut counts = Vec::with_capacity(nx * ny);
    let mut min_abs_z = f64::INFINITY;
    for iy in 0..ny {
        for ix in 0..nx {
            let (x0, y0) = (rect.re0 + dx * ix as f64, rect.im0 + dy * iy as f64);
            let corners = [
                Complex64::new(x0, y0),
                Complex64::new(x0 + dx, y0),
                Complex64::new(x0 + dx, y0 + dy),
                Complex64::new(x0, y0 + dy),
            ];
            let (count, m) = count_in_polygon(&c, &corners);
            min_abs_z = min_abs_z.min(m);
            counts.push(count);
        }
    }
    let inconclusive = counts.iter().filter(|c| c.is_none()).count();
    let total = if inconclusive == 0 {
        Some(counts.iter().map(|c| c.unwrap()).sum())
    } else {
        None
    };
    Ok(ZeroScanReport {
        rectangle: rect,
        nx,
        ny,
        counts,
        total,
        inconclusive,
        min_abs_z,
    })
}

/// Zeros of `poly` inside the circle `|x - center| = radius`, by the argument principle.
pub fn zero_count_in_disk(poly: &IndPoly, center: Complex64, radius: f64) -> Option<i64> {
    let c: Vec<f64> = poly.coefficients.iter().map(|&a| a as f64).collect();
    let mut n = 4 * BASE_POINTS;
    for _ in 0..=MAX_DOUBLINGS {
        let mut integral = Complex64::new(0.0, 0.0);
        let mut min_abs = f64::INFINITY;
        for j in 0..n {
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64);
            let (p, dp) = poly_eval(&c, center + e * radius);
            min_abs = min_abs.min(p.norm());
            integral += dp / p * e * radius * Complex64::new(0.0, std::f64::consts::TAU / n as f64);
        }
        let w = integral / Complex64::new(0.0, std::f64::consts::TAU);
        if min_abs > CONTOUR_TOL && (w.re - w.re.round()).abs() < 0.05 {
            return Some(w.re.round() as i64);
        }
        n *= 2;
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RootReport {
    pub roots: Vec<Complex64>,
    /// Every root real (to `1e-7 (1 + |root|)`) and negative.
    pub verdict: bool,
    /// Largest relative coefficient error after multiplying the roots back out.
    pub vieta_error: f64,
}

/// Roots of `Z_G` for claw-free `G` via companion-matrix eigenvalues polished by Newton steps.
pub fn clawfree_root_check(oracle: &Oracle, g: &Graph) -> Result<RootReport> {
    if let Some((center, leaves)) = g.find_claw() {
        return Err(Error::Contract(format!(
            "graph is not claw-free: claw centered at {center} with leaves {leaves:?}"
        )));
    }
    let poly = oracle.ind_poly(g)?;
    Ok(root_report(&poly))
}

pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    let companion = DMatrix::<f64>::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&r| {
            let mut x = r;
            for _ in 0..50 {
                let (p, dp) = poly_eval(coeffs, x);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                x -= step;
                if step.norm() <= 1e-16 * (1.0 + x.norm()) {
                    break;
                }
            }
            x
        })
        .collect()
}

pub fn root_report(poly: &IndPoly) -> RootReport {
    let c: Vec<f64> = poly.coefficients.iter().map(|&a| a as f64).collect();
    let mut roots = polynomial_roots(&c);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    let verdict = roots
        .iter()
        .all(|r| r.im.abs() <= 1e-7 * (1.0 + r.norm()) && r.re < 0.0);
    // lead * prod (x - r)
    let mut expanded = vec![Complex64::new(*c.last().unwrap(), 0.0)];
    for r in &roots {
        let mut next = vec![Complex64::new(0.0, 0.0); expanded.len() + 1];
        for (k, &e) in expanded.iter().enumerate() {
            next[k + 1] += e;
            next[k] -= e * r;
        }
        expanded = next;
    }
    let vieta_error = c
        .iter()
        .zip(&expanded)
        .map(|(&a, e)| (e - a).norm() / a.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    RootReport {
        roots,
        verdict,
        vieta_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Rectangle {
        Rectangle {
            re0: -1.3,
            im0: -0.3,
            re1: -0.1,
            im1: 0.3,
        }
    }

    #[test]
    fn single_zeros() {
        let o = Oracle::default();
        let r = zero_scan(&o, &Graph::empty(1), small(), 1, 1).unwrap();
        assert_eq!(r.total, Some(1));
        let r = zero_scan(&o, &Graph::path(2), Rectangle { re0: -0.8, im0: -0.2, re1: -0.3, im1: 0.2 }, 1, 1).unwrap();
        assert_eq!(r.total, Some(1));
    }

    #[test]
    fn partition_additivity() {
        let o = Oracle::default();
        let g = Graph::cycle(5);
        let rect = Rectangle { re0: -3.05, im0: -1.03, re1: 0.51, im1: 1.07 };
        let whole = zero_scan(&o, &g, rect, 1, 1).unwrap().total;
        let parts = zero_scan(&o, &g, rect, 3, 2).unwrap().total;
        assert_eq!(whole, parts);
        assert_eq!(whole, Some(2));
    }

    #[test]
    fn no_zeros_in_shearer_disk() {
        let o = Oracle::default();
        let rho = 0.99 * 4.0 / 27.0;
        for g in [Graph::petersen(), Graph::complete(4), Graph::grid(3, 3)] {
            let p = o.ind_poly(&g).unwrap();
            assert_eq!(zero_count_in_disk(&p, Complex64::new(0.0, 0.0), rho), Some(0));
        }
    }

    #[test]
    fn roots() {
        let o = Oracle::default();
        let r = clawfree_root_check(&o, &Graph::path(2)).unwrap();
        assert!(r.verdict && (r.roots[0] - Complex64::new(-0.5, 0.0)).norm() < 1e-14);
        let r = clawfree_root_check(&o, &Graph::cycle(5)).unwrap();
        assert!(r.verdict && r.vieta_error < 1e-6, "{r:?}");
        assert!(matches!(clawfree_root_check(&o, &Graph::star(3)), Err(Error::Contract(_))));
    }
}
