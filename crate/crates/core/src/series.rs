//! Truncated power series with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `a_0 + a_1 z + ... + a_K z^K`, with all arithmetic truncated at order `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Zero series of order `order`.
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![ZERO; order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = ONE;
        s
    }

    /// The series `z`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = ONE;
        }
        s
    }

    /// Pads with zeros or truncates `coeffs` to exactly `order + 1` entries.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, ZERO);
        PowerSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64], order: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), order)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, value: Complex64) {
        self.coeffs[k] = value;
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), order)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// `f(c z)`: coefficient `k` multiplied by `c^k`.
    pub fn rescale_argument(&self, c: Complex64) -> Self {
        let mut p = ONE;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| {
                let out = a * p;
                p *= c;
                out
            })
            .collect();
        PowerSeries { coeffs }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
    }

    /// `sum_{k < n} a_k`.
    pub fn partial_sum_at_one(&self, n: usize) -> Complex64 {
        self.coeffs.iter().take(n).sum()
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::Contract(
                "reciprocal of a series with zero constant term".into(),
            ));
        }
        let k = self.order();
        let mut b = vec![ZERO; k + 1];
        b[0] = ONE / a0;
        for n in 1..=k {
            let mut acc = ZERO;
            for j in 1..=n {
                acc += self.coeffs[j] * b[n - j];
            }
            b[n] = -acc / a0;
        }
        Ok(PowerSeries { coeffs: b })
    }

    /// `outer(inner(z))`, truncated. The inner series must have zero constant term, so
    /// output coefficient `k` only reads coefficients `0..=k` of either input.
    pub fn compose(outer: &PowerSeries, inner: &PowerSeries) -> Result<Self> {
        if inner.coeffs[0] != ZERO {
            return Err(Error::Contract(format!(
                "composition needs an inner series with zero constant term, found {}",
                inner.coeffs[0]
            )));
        }
        let k = outer.order().min(inner.order());
        let inner = inner.truncate(k);
        // Horner in the ring of truncated series.
        let mut acc = PowerSeries::zero(k);
        for j in (0..=k).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += outer.coeffs[j];
        }
        Ok(acc)
    }

    /// `exp(f)` for `f` with zero constant term, via `E' = f' E`.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs[0] != ZERO {
            return Err(Error::Contract(
                "exp needs a series with zero constant term".into(),
            ));
        }
        let k = self.order();
        let mut e = vec![ZERO; k + 1];
        e[0] = ONE;
        for n in 1..=k {
            let mut acc = ZERO;
            for j in 1..=n {
                acc += self.coeffs[j] * e[n - j] * j as f64;
            }
            e[n] = acc / n as f64;
        }
        Ok(PowerSeries { coeffs: e })
    }

    /// `log(f)` for `f` with constant term 1, via `L' = f'/f`.
    pub fn log(&self) -> Result<Self> {
        if (self.coeffs[0] - ONE).norm() > 0.0 {
            return Err(Error::Contract(
                "log needs a series with constant term 1".into(),
            ));
        }
        let k = self.order();
        let mut l = vec![ZERO; k + 1];
        for n in 1..=k {
            let mut acc = self.coeffs[n] * n as f64;
            for j in 1..n {
                acc -= l[j] * j as f64 * self.coeffs[n - j];
            }
            l[n] = acc / n as f64;
        }
        Ok(PowerSeries { coeffs: l })
    }

    /// Largest coefficientwise distance over orders `0..=min(order)`.
    pub fn max_abs_diff(&self, other: &PowerSeries) -> f64 {
        let k = self.order().min(other.order());
        (0..=k)
            .map(|i| (self.coeffs[i] - other.coeffs[i]).norm())
            .fold(0.0, f64::max)
    }
}

fn binary<F: Fn(Complex64, Complex64) -> Complex64>(
    a: &PowerSeries,
    b: &PowerSeries,
    f: F,
) -> PowerSeries {
    let k = a.order().min(b.order());
    PowerSeries {
        coeffs: (0..=k).map(|i| f(a.coeffs[i], b.coeffs[i])).collect(),
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        binary(self, rhs, |x, y| x + y)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        binary(self, rhs, |x, y| x - y)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(-ONE)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let k = self.order().min(rhs.order());
        let mut out = vec![ZERO; k + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate().take(k + 1 - i) {
                out[i + j] += a * b;
            }
        }
        PowerSeries { coeffs: out }
    }
}

/// Quotient `num / den` expanded to `order`; `den` must have a nonzero constant term.
pub fn divide(num: &PowerSeries, den: &PowerSeries) -> Result<PowerSeries> {
    Ok(num * &den.reciprocal()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn reciprocal_of_one_plus_z() {
        let s = PowerSeries::from_real(&[1.0, 1.0], 4);
        let r = s.reciprocal().unwrap();
        assert_eq!(r.coeffs(), &[c(1.0), c(-1.0), c(1.0), c(-1.0), c(1.0)]);
        assert!(PowerSeries::zero(3).reciprocal().is_err());
    }

    #[test]
    fn compose_with_identity_is_noop() {
        let p = PowerSeries::from_real(&[0.5, 1.0, -2.0, 3.0], 3);
        let q = PowerSeries::compose(&p, &PowerSeries::identity(3)).unwrap();
        assert!(p.max_abs_diff(&q) < 1e-15);
    }

    #[test]
    fn compose_rejects_nonzero_inner_constant() {
        let p = PowerSeries::identity(3);
        let inner = PowerSeries::from_real(&[0.1, 1.0], 3);
        assert!(matches!(PowerSeries::compose(&p, &inner), Err(Error::Contract(_))));
    }

    #[test]
    fn exp_and_log_are_inverse() {
        let f = PowerSeries::from_real(&[0.0, 2.0, -2.0, 8.0 / 3.0], 6);
        let back = f.exp().unwrap().log().unwrap();
        assert!(back.max_abs_diff(&f.truncate(6)) < 1e-12);
        // log(1 + z) = z - z^2/2 + z^3/3 - ...
        let l = PowerSeries::from_real(&[1.0, 1.0], 4).log().unwrap();
        let want = [0.0, 1.0, -0.5, 1.0 / 3.0, -0.25];
        for (k, w) in want.iter().enumerate() {
            assert!((l.coeff(k) - c(*w)).norm() < 1e-15);
        }
    }

    #[test]
    fn compose_coefficient_matches_leading_square() {
        // z^2 o (a z + b z^2 + ...) has z^2 coefficient a^2.
        let sq = PowerSeries::from_real(&[0.0, 0.0, 1.0], 5);
        let inner = PowerSeries::from_real(&[0.0, 0.3, 0.7, 1.1], 5);
        let out = PowerSeries::compose(&sq, &inner).unwrap();
        assert!((out.coeff(2) - c(0.09)).norm() < 1e-15);
        assert!((out.coeff(3) - c(2.0 * 0.3 * 0.7)).norm() < 1e-15);
    }

    fn arb_series(order: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-2.0f64..2.0, order + 1)
    }

    proptest! {
        #[test]
        fn reciprocal_times_self_is_one(mut a in arb_series(8)) {
            a[0] = 1.0 + a[0].abs();
            let s = PowerSeries::from_real(&a, 8);
            let prod = &s * &s.reciprocal().unwrap();
            prop_assert!(prod.max_abs_diff(&PowerSeries::one(8)) < 1e-9);
        }

        #[test]
        fn composition_preserves_agreeing_prefix(
            a in arb_series(8),
            tail in arb_series(8),
            mut inner in arb_series(8),
            n in 0usize..8,
        ) {
            inner[0] = 0.0;
            let inner = PowerSeries::from_real(&inner, 8);
            let p = PowerSeries::from_real(&a, 8);
            let mut b = a.clone();
            b[n + 1..=8].copy_from_slice(&tail[n + 1..=8]);
            let q = PowerSeries::from_real(&b, 8);
            let pc = PowerSeries::compose(&p, &inner).unwrap();
            let qc = PowerSeries::compose(&q, &inner).unwrap();
            for k in 0..=n {
                prop_assert!((pc.coeff(k) - qc.coeff(k)).norm() < 1e-12);
            }
        }
    }
}
