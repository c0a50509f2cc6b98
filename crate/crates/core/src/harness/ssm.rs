use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{IndPoly, Oracle};
use crate::graph::{apply_hardcore_boundary, Graph, HardcoreBoundary};
use crate::interpolation::{estimate_m, gap_bound, InterpolationMap, RatioPolys, SectorSpec};

/// One measured gap. `bound` is filled in when the scan certifies gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SsmRecord {
    pub graph_id: usize,
    pub vertex: usize,
    pub distance: usize,
    pub gap: f64,
    pub trial: usize,
    pub bound: Option<f64>,
}

/// Least-squares fit of `log gap = log C - d log r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayFit {
    pub c: f64,
    pub r: f64,
    /// Smallest `C'` with `gap <= C' r^{-d}` on every record, at the fitted `r`.
    pub c_envelope: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SsmScan {
    pub records: Vec<SsmRecord>,
    pub skipped: usize,
    pub fit: Option<DecayFit>,
    /// `(distance, mean gap, record count)` in increasing distance.
    pub mean_gap: Vec<(usize, f64, usize)>,
}

/// Gap certification through the sector map of depth `3 / (4 e Delta)`, rescaled by `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorCertification {
    pub max_degree: usize,
    pub samples: usize,
}

impl SectorCertification {
    pub fn map(&self, lambda: f64) -> Result<InterpolationMap> {
        let delta = 0.75 / (std::f64::consts::E * self.max_degree as f64);
        Ok(InterpolationMap::Sector(SectorSpec::new(delta / lambda)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsmScanConfig {
    pub lambda: f64,
    pub trials: usize,
    pub max_distance: usize,
    pub seed: u64,
    pub certify: Option<SectorCertification>,
}

const FIT_FLOOR: f64 = 1e-14;
const MIN_RECORDS_PER_DISTANCE: usize = 3;

/// Runs `trials` independent trials; trial `t` uses the random stream `(seed, t)`, graph
/// `t mod |graphs|`, a uniform vertex, a uniform distance `1..=max_distance`, and boundary
/// pairs on the full sphere at that distance.
pub fn ssm_scan(oracle: &Oracle, graphs: &[Graph], cfg: &SsmScanConfig) -> Result<SsmScan> {
    if graphs.is_empty() || cfg.max_distance == 0 || !(cfg.lambda > 0.0) {
        return Err(Error::Contract("ssm_scan needs graphs, max_distance >= 1 and lambda > 0".into()));
    }
    let outcomes: Vec<Result<Option<SsmRecord>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(oracle, graphs, cfg, t))
        .collect();
    let mut records = Vec::new();
    let mut skipped = 0;
    for o in outcomes {
        match o? {
            Some(r) => records.push(r),
            None => skipped += 1,
        }
    }
    let fit = fit_decay(&records);
    let mean_gap = mean_gap_by_distance(&records);
    Ok(SsmScan {
        records,
        skipped,
        fit,
        mean_gap,
    })
}

fn random_in_set<R: Rng>(g: &Graph, domain: &[usize], rng: &mut R) -> Vec<bool> {
    for _ in 0..1000 {
        let pick: Vec<bool> = domain.iter().map(|_| rng.gen_bool(0.5)).collect();
        let chosen: Vec<usize> = domain.iter().zip(&pick).filter(|(_, &p)| p).map(|(&u, _)| u).collect();
        if g.is_independent(&chosen) {
            return pick;
        }
    }
    // dense spheres: grow an independent set in random order instead
    let mut order: Vec<usize> = (0..domain.len()).collect();
    order.shuffle(rng);
    let mut pick = vec![false; domain.len()];
    let mut chosen = Vec::new();
    for i in order {
        chosen.push(domain[i]);
        if rng.gen_bool(0.5) && g.is_independent(&chosen) {
            pick[i] = true;
        } else {
            chosen.pop();
        }
    }
    pick
}

fn run_trial(oracle: &Oracle, graphs: &[Graph], cfg: &SsmScanConfig, t: usize) -> Result<Option<SsmRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(t as u64);
    let graph_id = t % graphs.len();
    let g = &graphs[graph_id];
    let v = rng.gen_range(0..g.n());
    let d = rng.gen_range(1..=cfg.max_distance);
    let sphere = g.sphere(v, d);
    if sphere.is_empty() {
        return Ok(None);
    }
    let s = random_in_set(g, &sphere, &mut rng);
    let mut t_pick = None;
    for _ in 0..1000 {
        let cand = random_in_set(g, &sphere, &mut rng);
        if cand != s {
            t_pick = Some(cand);
            break;
        }
    }
    let Some(tp) = t_pick else {
        return Ok(None);
    };
    let sigma = HardcoreBoundary::from_pairs(sphere.iter().copied().zip(s));
    let tau = HardcoreBoundary::from_pairs(sphere.iter().copied().zip(tp));
    let ps = oracle.cond_prob_hardcore(g, v, &sigma, cfg.lambda)?;
    let pt = oracle.cond_prob_hardcore(g, v, &tau, cfg.lambda)?;
    let gap = (ps - pt).abs();
    let bound = match cfg.certify {
        None => None,
        Some(c) => {
            let map = c.map(cfg.lambda)?;
            let m = sampled_m(oracle, g, v, &sigma, cfg.lambda, &map, c.samples)?
                .max(sampled_m(oracle, g, v, &tau, cfg.lambda, &map, c.samples)?);
            Some(gap_bound(m, map.radius(), d)?)
        }
    };
    Ok(Some(SsmRecord {
        graph_id,
        vertex: v,
        distance: d,
        gap,
        trial: t,
        bound,
    }))
}

fn sampled_m(
    oracle: &Oracle,
    g: &Graph,
    v: usize,
    sigma: &HardcoreBoundary,
    lambda: f64,
    map: &InterpolationMap,
    samples: usize,
) -> Result<f64> {
    let sub = apply_hardcore_boundary(g, sigma)?;
    let Some(root) = sub.map(v) else {
        return Ok(0.0);
    };
    let (num, den) = oracle.ratio_polys(&sub.graph, root)?;
    estimate_m(&RatioPolys { num, den }, lambda, map, map.radius(), samples)
}

/// Fit over records with `gap > 1e-14` at distances that keep at least 3 such records.
pub fn fit_decay(records: &[SsmRecord]) -> Option<DecayFit> {
    let mut per_distance = std::collections::BTreeMap::<usize, usize>::new();
    for r in records.iter().filter(|r| r.gap > FIT_FLOOR) {
        *per_distance.entry(r.distance).or_default() += 1;
    }
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.gap > FIT_FLOOR && per_distance[&r.distance] >= MIN_RECORDS_PER_DISTANCE)
        .map(|r| (r.distance as f64, r.gap.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let r = (-slope).exp();
    let c_envelope = records
        .iter()
        .map(|rec| rec.gap * r.powi(rec.distance as i32))
        .fold(0.0, f64::max);
    Some(DecayFit {
        c: intercept.exp(),
        r,
        c_envelope,
        points: pts.len(),
    })
}

pub fn mean_gap_by_distance(records: &[SsmRecord]) -> Vec<(usize, f64, usize)> {
    let mut acc = std::collections::BTreeMap::<usize, (f64, usize)>::new();
    for r in records {
        let e = acc.entry(r.distance).or_default();
        e.0 += r.gap;
        e.1 += 1;
    }
    acc.into_iter().map(|(d, (s, c))| (d, s / c as f64, c)).collect()
}

/// Largest `|P_{G,v}|` seen over a family and a sample of activities, with the avoidance checks
/// `P != 0` (for `lambda != 0`), `P != 1` and `Z_{G-v} != 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatioBoundReport {
    pub max_abs_ratio: f64,
    pub witness: Option<(usize, usize, Complex64)>,
    pub evaluations: usize,
    pub violations: Vec<String>,
}

pub fn ratio_bound_scan(oracle: &Oracle, graphs: &[Graph], points: &[Complex64]) -> Result<RatioBoundReport> {
    let mut rep = RatioBoundReport {
        max_abs_ratio: 0.0,
        witness: None,
        evaluations: 0,
        violations: Vec::new(),
    };
    for (gid, g) in graphs.iter().enumerate() {
        for v in 0..g.n() {
            let (num, den) = oracle.ratio_polys(g, v)?;
            let comp = g.induced(&g.component_of(v));
            let minus_v: IndPoly = oracle.ind_poly(&comp.graph.remove_vertex(comp.map(v).unwrap()).graph)?;
            for &lambda in points {
                rep.evaluations += 1;
                let (n, d) = (num.eval(lambda), den.eval(lambda));
                let tol = crate::exact::near_zero_tolerance(n);
                if d.norm() < tol {
                    rep.violations.push(format!("graph {gid} vertex {v}: Z vanishes at {lambda}"));
                    continue;
                }
                let p = n / d;
                if p.norm() > rep.max_abs_ratio {
                    rep.max_abs_ratio = p.norm();
                    rep.witness = Some((gid, v, lambda));
                }
                if lambda != Complex64::new(0.0, 0.0) && p.norm() <= 1e-12 {
                    rep.violations.push(format!("graph {gid} vertex {v}: P = 0 at {lambda}"));
                }
                if (p - 1.0).norm() <= 1e-12 {
                    rep.violations.push(format!("graph {gid} vertex {v}: P = 1 at {lambda}"));
                }
                if minus_v.eval(lambda).norm() < tol {
                    rep.violations.push(format!("graph {gid} vertex {v}: Z_(G-v) vanishes at {lambda}"));
                }
            }
        }
    }
    Ok(rep)
}
