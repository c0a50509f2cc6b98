//! Polynomial interpolation through a conformal change of variables.
//!
//! A map `f: D_r -> U` with `f(0) = 0`, `f(1) = 1` pulls the ratio `P(lambda f(z))` back to
//! the disk. If `U` avoids the zeros of `Z`, the pulled-back function is analytic on `D_r`,
//! its Taylor coefficients decay like `r^{-k}`, and the partial sums at `z = 1` converge to
//! `P(lambda)` at a rate set by `r` and a bound `M` on `|P|` over the image circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{near_zero_tolerance, IndPoly, Oracle};
use crate::graph::{apply_hardcore_boundary, Graph, HardcoreBoundary};
use crate::series::{divide, PowerSeries};

/// Default number of boundary samples used when estimating `M`.
pub const DEFAULT_SAMPLES: usize = 256;
/// Largest truncation depth the approximation will use.
pub const DEFAULT_DEPTH_CAP: usize = 64;
/// Multiplier applied to the sampled maximum.
pub const M_SAFETY: f64 = 1.5;

/// Strip of half-width `eps` around `[0, 1]`, reached by `g(z) = eps log(1 / (1 - alpha z))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub eps: f64,
}

/// Sector-like region around `[0, 1]` avoiding the negative axis beyond `-3 delta / 4`, reached
/// by `h(z) = delta / (1 - zeta z)^2 - delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub delta: f64,
}

impl StripSpec {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Contract(format!("strip width must be positive, got {eps}")));
        }
        Ok(StripSpec { eps })
    }

    pub fn alpha(&self) -> f64 {
        -(-1.0 / self.eps).exp_m1()
    }

    /// `(1 - e^{-1 - 1/eps}) / (1 - e^{-1/eps})`.
    pub fn radius(&self) -> f64 {
        -(-1.0 - 1.0 / self.eps).exp_m1() / self.alpha()
    }

    /// Coefficients `eps alpha^k / k`.
    pub fn series(&self, order: usize) -> PowerSeries {
        let a = self.alpha();
        let mut coeffs = vec![0.0; order + 1];
        let mut p = 1.0;
        for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
            p *= a;
            *c = self.eps * p / k as f64;
        }
        PowerSeries::from_real(&coeffs, order)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // 1 - alpha z written as (1 - z) + z e^{-1/eps} to avoid cancellation near z = 1
        let one_minus = Complex64::new(1.0, 0.0) - z + z * (-1.0 / self.eps).exp();
        -one_minus.ln() * self.eps
    }
}

/// Euclidean distance from `w` to the segment `[0, 1]`.
pub fn distance_to_unit_segment(w: Complex64) -> f64 {
    let x = w.re.clamp(0.0, 1.0);
    (w - Complex64::new(x, 0.0)).norm()
}

impl SectorSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Contract(format!("sector parameter must be positive, got {delta}")));
        }
        Ok(SectorSpec { delta })
    }

    pub fn zeta(&self) -> f64 {
        1.0 - (self.delta / (1.0 + self.delta)).sqrt()
    }

    pub fn radius(&self) -> f64 {
        1.0 + self.delta.sqrt()
    }

    /// Coefficients `delta (k + 1) zeta^k` for `k >= 1`.
    pub fn series(&self, order: usize) -> PowerSeries {
        let zeta = self.zeta();
        let mut coeffs = vec![0.0; order + 1];
        let mut p = 1.0;
        for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
            p *= zeta;
            *c = self.delta * (k + 1) as f64 * p;
        }
        PowerSeries::from_real(&coeffs, order)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let d = Complex64::new(1.0, 0.0) - z * self.zeta();
        self.delta / (d * d) - self.delta
    }

    /// The image stays off the real ray `x < -3 delta / 4`.
    pub fn avoids_forbidden_ray(&self, w: Complex64, tol: f64) -> bool {
        !(w.im.abs() <= tol && w.re < -0.75 * self.delta - tol)
    }
}

/// Either interpolation map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InterpolationMap {
    Strip(StripSpec),
    Sector(SectorSpec),
}

impl InterpolationMap {
    pub fn radius(&self) -> f64 {
        match self {
            InterpolationMap::Strip(s) => s.radius(),
            InterpolationMap::Sector(s) => s.radius(),
        }
    }

    pub fn series(&self, order: usize) -> PowerSeries {
        match self {
            InterpolationMap::Strip(s) => s.series(order),
            InterpolationMap::Sector(s) => s.series(order),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            InterpolationMap::Strip(s) => s.eval(z),
            InterpolationMap::Sector(s) => s.eval(z),
        }
    }

    /// `p(map(z))` truncated at `order`; `p` is a series in the activity variable.
    pub fn compose(&self, p: &PowerSeries, order: usize) -> Result<PowerSeries> {
        PowerSeries::compose(&p.truncate(order), &self.series(order))
    }
}

/// `M / ((r - 1) r^N)`: tail of `sum_{k > N} M r^{-k}`.
pub fn tail_bound(m: f64, r: f64, depth: usize) -> Result<f64> {
    if r <= 1.0 {
        return Err(Error::Contract(format!("tail bound needs r > 1, got {r}")));
    }
    Ok(m / ((r - 1.0) * r.powi(depth as i32)))
}

/// Smallest `N` with `tail_bound(m, r, N) <= target`, if at most `cap`.
pub fn required_depth(m: f64, r: f64, target: f64, cap: usize) -> Result<usize> {
    for n in 0..=cap {
        if tail_bound(m, r, n)? <= target {
            return Ok(n);
        }
    }
    let needed = ((m / ((r - 1.0) * target)).ln() / r.ln()).ceil();
    Err(Error::DepthExceeded {
        required: if needed.is_finite() { needed as usize } else { usize::MAX },
        cap,
    })
}

/// A quotient `num(w) / den(w)` of polynomials in the activity.
#[derive(Clone, Debug)]
pub struct RatioPolys {
    pub num: IndPoly,
    pub den: IndPoly,
}

impl RatioPolys {
    pub fn eval(&self, w: Complex64) -> (Complex64, Complex64) {
        (self.num.eval(w), self.den.eval(w))
    }

    pub fn series(&self, order: usize) -> Result<PowerSeries> {
        divide(&self.num.to_series(order), &self.den.to_series(order))
    }
}

/// Sampled maximum of `|num / den|` at `activity * map(z)` over `|z| = radius`, times
/// [`M_SAFETY`].
///
/// Zeros of `den` inside the image would make the pulled-back ratio non-analytic. They are
/// detected by requiring the winding number of `den(activity * map(z))` around the circle to
/// be zero; sampling is doubled until consecutive argument steps are below `pi / 4`.
pub fn estimate_m(
    ratio: &RatioPolys,
    activity: f64,
    map: &InterpolationMap,
    radius: f64,
    samples: usize,
) -> Result<f64> {
    estimate_m_with(|w| Ok(ratio.eval(w)), activity, map, radius, samples)
}

/// [`estimate_m`] for any numerator/denominator evaluator.
pub fn estimate_m_with(
    f: impl Fn(Complex64) -> Result<(Complex64, Complex64)>,
    activity: f64,
    map: &InterpolationMap,
    radius: f64,
    samples: usize,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Contract("estimate_m needs at least one sample".into()));
    }
    let mut n = samples.max(8);
    for _ in 0..6 {
        match sample_circle(&f, activity, map, radius, n)? {
            Some(m) => return Ok(m * M_SAFETY),
            None => n *= 2,
        }
    }
    Err(Error::ZeroRegionViolation {
        point: map.eval(Complex64::new(radius, 0.0)) * activity,
        detail: "denominator phase could not be resolved on the sampling circle".into(),
    })
}

// None: sampling too coarse to trust the winding number.
fn sample_circle(
    f: &impl Fn(Complex64) -> Result<(Complex64, Complex64)>,
    activity: f64,
    map: &InterpolationMap,
    radius: f64,
    n: usize,
) -> Result<Option<f64>> {
    let mut max = 0.0f64;
    let mut winding = 0.0;
    let mut prev: Option<Complex64> = None;
    let mut first: Option<Complex64> = None;
    for j in 0..n {
        let theta = std::f64::consts::TAU * j as f64 / n as f64;
        let z = Complex64::from_polar(radius, theta);
        let w = map.eval(z) * activity;
        let (num, den) = f(w)?;
        if den.norm() < near_zero_tolerance(num) {
            return Err(Error::ZeroRegionViolation {
                point: w,
                detail: format!("|Z| = {:e} on the image circle", den.norm()),
            });
        }
        max = max.max((num / den).norm());
        if let Some(p) = prev {
            let step = (den / p).arg();
            if step.abs() > std::f64::consts::FRAC_PI_4 {
                return Ok(None);
            }
            winding += step;
        }
        prev = Some(den);
        first.get_or_insert(den);
    }
    let step = (first.unwrap() / prev.unwrap()).arg();
    if step.abs() > std::f64::consts::FRAC_PI_4 {
        return Ok(None);
    }
    winding += step;
    let turns = (winding / std::f64::consts::TAU).round();
    if turns != 0.0 {
        let far = map.eval(Complex64::new(-radius, 0.0)) * activity;
        return Err(Error::ZeroRegionViolation {
            point: far,
            detail: format!("image of the disk |z| <= {radius} encloses {turns} zero(s) of Z"),
        });
    }
    Ok(Some(max))
}

/// Options for [`approx_cond_prob`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxOptions {
    pub samples: usize,
    pub depth_cap: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            samples: DEFAULT_SAMPLES,
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

/// Outcome of an interpolation. `error_bound` is certified only up to the sampled `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApproxResult {
    pub value: f64,
    pub depth: usize,
    pub error_bound: f64,
    pub m: f64,
    pub radius: f64,
    pub error_bound_kind: String,
}

impl ApproxResult {
    fn forced_out() -> Self {
        ApproxResult {
            value: 0.0,
            depth: 0,
            error_bound: 0.0,
            m: 0.0,
            radius: f64::INFINITY,
            error_bound_kind: "exact".into(),
        }
    }
}

/// Interpolates `P(activity * map(z))` at `z = 1` to within `eps_target`, given the exact
/// numerator and denominator polynomials.
pub fn interpolate_ratio(
    ratio: &RatioPolys,
    activity: f64,
    map: &InterpolationMap,
    eps_target: f64,
    opts: &ApproxOptions,
) -> Result<ApproxResult> {
    if !(eps_target > 0.0) {
        return Err(Error::Contract(format!("target accuracy must be positive, got {eps_target}")));
    }
    let r = map.radius();
    let m = estimate_m(ratio, activity, map, r, opts.samples)?;
    let depth = required_depth(m, r, eps_target, opts.depth_cap)?;
    let p = ratio
        .series(depth)?
        .rescale_argument(Complex64::new(activity, 0.0));
    let pulled = map.compose(&p, depth)?;
    Ok(ApproxResult {
        value: pulled.partial_sum_at_one(depth + 1).re,
        depth,
        error_bound: tail_bound(m, r, depth)?,
        m,
        radius: r,
        error_bound_kind: "empirically certified (sampled M)".into(),
    })
}

/// `Pr[v in I | sigma]` by interpolating the ratio of `G[sigma]` through the strip map of
/// half-width `eps_region / (2 lambda)`.
#[allow(clippy::too_many_arguments)]
pub fn approx_cond_prob(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    sigma: &HardcoreBoundary,
    lambda: f64,
    eps_target: f64,
    eps_region: f64,
    opts: &ApproxOptions,
) -> Result<ApproxResult> {
    g.check_vertex(v)?;
    if sigma.contains(v) {
        return Err(Error::InvalidBoundary(format!("vertex {v} lies in the boundary domain")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Contract(format!("activity must be positive, got {lambda}")));
    }
    if !(eps_region > 0.0) {
        return Err(Error::Contract(format!("region width must be positive, got {eps_region}")));
    }
    let sub = apply_hardcore_boundary(g, sigma)?;
    let Some(root) = sub.map(v) else {
        return Ok(ApproxResult::forced_out());
    };
    let (num, den) = oracle.ratio_polys(&sub.graph, root)?;
    let eps_prime = eps_region / lambda;
    let map = InterpolationMap::Strip(StripSpec::new(eps_prime / 2.0)?);
    interpolate_ratio(&RatioPolys { num, den }, lambda, &map, eps_target, opts)
}

/// `2 M / ((r - 1) r^{d - 1})`: what the interpolation argument allows for
/// `|P^sigma - P^tau|` when the boundaries first differ at distance `d`.
pub fn gap_bound(m: f64, r: f64, distance: usize) -> Result<f64> {
    Ok(2.0 * tail_bound(m, r, distance.saturating_sub(1))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const O: Complex64 = Complex64::new(0.0, 0.0);
    const I: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn endpoints() {
        for eps in [0.05, 0.1, 0.25, 0.5, 3.0] {
            let s = StripSpec::new(eps).unwrap();
            assert!(s.eval(O).norm() < 1e-15);
            assert!((s.eval(I) - I).norm() < 1e-12);
            assert!(s.radius() > 1.0);
        }
        for delta in [0.05, 0.1, 0.5, 1.0] {
            let s = SectorSpec::new(delta).unwrap();
            assert!(s.eval(O).norm() < 1e-15);
            assert!((s.eval(I) - I).norm() < 1e-12);
            assert!(s.radius() > 1.0);
        }
    }

    #[test]
    fn series_match_closed_forms() {
        let s = StripSpec::new(0.3).unwrap();
        let a = s.alpha();
        let ser = s.series(4);
        assert!((ser.coeff(1).re - 0.3 * a).abs() < 1e-15);
        assert!((ser.coeff(3).re - 0.1 * a.powi(3)).abs() < 1e-15);
        let z = Complex64::new(0.2, 0.1);
        assert!((s.series(80).eval(z) - s.eval(z)).norm() < 1e-12);

        let h = SectorSpec::new(0.5).unwrap();
        let ser = h.series(3);
        assert!((ser.coeff(1).re - 0.5 * 2.0 * h.zeta()).abs() < 1e-15);
        assert!((ser.coeff(2).re - 0.5 * 3.0 * h.zeta().powi(2)).abs() < 1e-15);
        assert!((h.series(200).eval(z) - h.eval(z)).norm() < 1e-12);
    }

    #[test]
    fn tail_bound_and_depth() {
        assert!((tail_bound(2.0, 2.0, 3).unwrap() - 0.25).abs() < 1e-15);
        assert!(tail_bound(1.0, 1.0, 3).is_err());
        assert_eq!(required_depth(2.0, 2.0, 0.25, 64).unwrap(), 3);
        assert!(matches!(
            required_depth(1.0, 1.0001, 1e-12, 64),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn single_vertex_probability() {
        let g = Graph::empty(1);
        let r = approx_cond_prob(
            &Oracle::default(),
            &g,
            0,
            &HardcoreBoundary::new(),
            0.1,
            1e-6,
            0.25,
            &ApproxOptions::default(),
        )
        .unwrap();
        assert!((r.value - 0.1 / 1.1).abs() <= r.error_bound.max(1e-15));
    }

    #[test]
    fn forced_out_is_zero() {
        let g = Graph::path(2);
        let sigma = HardcoreBoundary::from_pairs([(1, true)]);
        let r = approx_cond_prob(
            &Oracle::default(),
            &g,
            0,
            &sigma,
            0.1,
            1e-3,
            0.25,
            &ApproxOptions::default(),
        )
        .unwrap();
        assert_eq!((r.value, r.depth), (0.0, 0));
    }

    #[test]
    fn zero_samples_rejected() {
        let ratio = RatioPolys {
            num: IndPoly { coefficients: vec![0, 1] },
            den: IndPoly { coefficients: vec![1, 1] },
        };
        let map = InterpolationMap::Strip(StripSpec::new(1.0).unwrap());
        assert!(matches!(estimate_m(&ratio, 1.0, &map, 1.1, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn enclosed_zero_is_detected() {
        // 1 + w has its zero at -1; a wide strip around [0, 1] at activity 1 encloses it.
        let ratio = RatioPolys {
            num: IndPoly { coefficients: vec![0, 1] },
            den: IndPoly { coefficients: vec![1, 1] },
        };
        let map = InterpolationMap::Strip(StripSpec::new(2.0).unwrap());
        let err = estimate_m(&ratio, 1.0, &map, map.radius(), 256).unwrap_err();
        assert!(err.is_hypothesis_violation(), "{err}");
    }
}
