//! Weighted Hausdorff content over dyadic covers, the bottom-up Frostman
//! measure, gauge regularization and the Cantor-set bounds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::capacity::{CompactSetSample, DyadicRep};
use crate::fractal::{CantorGauge, CantorSpec};
use crate::{DiscreteMeasure, Error, MultiIndexA, PointPlus, Result};

/// Relative tolerance for deciding that a liminf vanishes.
pub const LIMINF_TOL: f64 = 1e-6;
/// Relative drop between the two sampling windows of [`regularize_gauge`]
/// that counts as `h(r)/r^b → 0`; well above the grid's sampling error.
pub const WINDOW_DROP: f64 = 1e-2;

#[derive(Clone)]
enum GaugeKind {
    Zero,
    Power(f64),
    LogLog { log_r: Vec<f64>, log_h: Vec<f64> },
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// An increasing gauge `h` on `[0, ∞)` with `h(0) = 0`.
#[derive(Clone)]
pub struct GaugeFunction {
    kind: GaugeKind,
    label: String,
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaugeFunction({})", self.label)
    }
}

impl GaugeFunction {
    /// `h(r) = r^c`, `c > 0`.
    pub fn power(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidGauge(format!("power gauge needs a positive exponent, got {c}")));
        }
        Ok(GaugeFunction { kind: GaugeKind::Power(c), label: format!("r^{c}") })
    }

    /// An arbitrary callable; monotonicity is checked by [`GaugeFunction::validate`].
    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(label: &str, f: F) -> Self {
        GaugeFunction { kind: GaugeKind::Func(Arc::new(f)), label: label.to_string() }
    }

    /// Piecewise power law through `(r_i, h_i)` (log-log linear), extended by
    /// the first segment's power below the data and by a constant above it.
    pub fn log_log(points: &[(f64, f64)]) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = points.to_vec();
        pts.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        if pts.len() < 2 || pts.iter().any(|&(r, h)| !(r > 0.0 && h > 0.0)) {
            return Err(Error::InvalidGauge("log-log gauge needs at least two points with r, h > 0".into()));
        }
        if pts.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 < w[0].1) {
            return Err(Error::InvalidGauge("log-log gauge data must be increasing".into()));
        }
        Ok(GaugeFunction {
            kind: GaugeKind::LogLog { log_r: pts.iter().map(|p| p.0.ln()).collect(), log_h: pts.iter().map(|p| p.1.ln()).collect() },
            label: format!("log-log table ({} points)", pts.len()),
        })
    }

    /// The zero gauge, returned when the content is known to vanish.
    pub fn zero() -> Self {
        GaugeFunction { kind: GaugeKind::Zero, label: "0".into() }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, GaugeKind::Zero)
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            GaugeKind::Zero => 0.0,
            GaugeKind::Power(c) => r.powf(*c),
            GaugeKind::Func(f) => f(r),
            GaugeKind::LogLog { log_r, log_h } => {
                let x = r.ln();
                let m = log_r.len();
                if x >= log_r[m - 1] {
                    return log_h[m - 1].exp();
                }
                let i = if x <= log_r[0] { 0 } else { log_r.partition_point(|&v| v <= x) - 1 };
                let slope = (log_h[i + 1] - log_h[i]) / (log_r[i + 1] - log_r[i]);
                if x <= log_r[0] && slope <= 0.0 {
                    return log_h[0].exp();
                }
                (log_h[i] + slope * (x - log_r[i])).exp()
            }
        }
    }

    /// Checks `h ≥ 0`, `h(0) = 0` and monotonicity on a log grid over `[lo, hi]`.
    pub fn validate(&self, lo: f64, hi: f64, samples: usize) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::InvalidGauge(format!("{}: h(0) must vanish", self.label)));
        }
        let samples = samples.max(2);
        let mut prev = 0.0;
        for i in 0..samples {
            let r = lo * (hi / lo).powf(i as f64 / (samples - 1) as f64);
            let v = self.eval(r);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidGauge(format!("{}: h({r:e}) = {v}", self.label)));
            }
            if v < prev * (1.0 - 1e-12) {
                return Err(Error::InvalidGauge(format!("{}: decreasing near r = {r:e}", self.label)));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Occupied dyadic cubes `∏ [m_i 2^{−level}, (m_i+1) 2^{−level}]` in `R^n_+`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicSetRep {
    pub n: usize,
    pub level: u32,
    pub cubes: BTreeSet<Vec<u64>>,
}

impl DyadicSetRep {
    pub fn new(n: usize, level: u32, cubes: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        let cubes: BTreeSet<Vec<u64>> = cubes.into_iter().collect();
        if let Some(c) = cubes.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        Ok(DyadicSetRep { n, level, cubes })
    }

    /// All level-`level` cubes meeting the closed set `{x : pred(cube)}`, where
    /// `pred` receives the lower and upper corners.
    pub fn from_predicate<F: Fn(&[f64], &[f64]) -> bool>(n: usize, level: u32, extent: u64, pred: F) -> Self {
        let s = 0.5f64.powi(level as i32);
        let mut cubes = BTreeSet::new();
        let mut idx = vec![0u64; n];
        loop {
            let lo: Vec<f64> = idx.iter().map(|&m| m as f64 * s).collect();
            let hi: Vec<f64> = idx.iter().map(|&m| (m + 1) as f64 * s).collect();
            if pred(&lo, &hi) {
                cubes.insert(idx.clone());
            }
            let mut d = 0;
            while d < n {
                idx[d] += 1;
                if idx[d] < extent {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == n {
                break;
            }
        }
        DyadicSetRep { n, level, cubes }
    }

    pub fn side(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn to_compact(&self) -> Result<CompactSetSample> {
        CompactSetSample::from_dyadic(DyadicRep { level: self.level, cubes: self.cubes.iter().cloned().collect() })
    }

    pub fn read_json<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let rep: DyadicSetRep = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        DyadicSetRep::new(rep.n, rep.level, rep.cubes)
    }
}

/// Covering radius for a cube of side `s`: at least `s`, so that a
/// cube-constrained measure also satisfies the ball bound at that radius.
fn cover_radius(n: usize, s: f64) -> f64 {
    s * (0.5 * (n as f64).sqrt()).max(1.0)
}

/// `max_{t ∈ box} t^a` over the box enclosing the ball of radius `r` about `c`.
fn ball_weight(center: &[f64], r: f64, a: &MultiIndexA) -> f64 {
    center.iter().zip(a.a()).map(|(&c, &ai)| (c + r).powf(ai)).product()
}

/// Cost of covering one cube (lower corner `m`, side `s`) by the balls of the
/// coarsest dyadic subdivision whose radius is at most `rho`.
fn leaf_cost(m: &[u64], s: f64, h: &GaugeFunction, a: &MultiIndexA, rho: f64) -> f64 {
    let n = m.len();
    let mut d = 0u32;
    while cover_radius(n, s * 0.5f64.powi(d as i32)) > rho && d < 40 {
        d += 1;
    }
    let sub = s * 0.5f64.powi(d as i32);
    let r = cover_radius(n, sub);
    let per_axis = 1u64 << d;
    // Σ over subcubes of ∏_j (c_j + r)^{a_j} factorizes over axes
    let weight: f64 = m
        .iter()
        .zip(a.a())
        .map(|(&mi, &ai)| (0..per_axis).map(|j| (mi as f64 * s + (j as f64 + 0.5) * sub + r).powf(ai)).sum::<f64>())
        .product();
    weight * h.eval(r)
}

/// Upper bound for `Λ^ρ_{h,a}(E)`: the cheapest cover of `E` by balls
/// circumscribing dyadic cubes of radius at most `ρ` (`None` for `ρ = ∞`),
/// found by a bottom-up dynamic programme over the dyadic tree.
///
/// Gauges with `liminf h(r)/r^n = 0` give content 0.
pub fn hausdorff_content(e: &DyadicSetRep, h: &GaugeFunction, a: &MultiIndexA, rho: Option<f64>) -> Result<f64> {
    a.check_dim(e.n)?;
    if e.is_empty() || h.is_zero() {
        return Ok(0.0);
    }
    if regularize_gauge(h, e.n as f64)?.is_zero() {
        return Ok(0.0);
    }
    let rho = rho.unwrap_or(f64::INFINITY);
    let n = e.n;
    let mut s = e.side();
    let mut cost: BTreeMap<Vec<i64>, f64> =
        e.cubes.iter().map(|m| (m.iter().map(|&v| v as i64).collect(), leaf_cost(m, s, h, a, rho))).collect();
    // merge upwards while a parent ball is admissible; once a single cube
    // remains, larger balls only cost more
    while cost.len() > 1 {
        let ps = 2.0 * s;
        let pr = cover_radius(n, ps);
        if pr > rho {
            break;
        }
        let mut parents: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (m, c) in &cost {
            let pm: Vec<i64> = m.iter().map(|&v| v.div_euclid(2)).collect();
            *parents.entry(pm).or_insert(0.0) += c;
        }
        for (pm, children) in parents.iter_mut() {
            let center: Vec<f64> = pm.iter().map(|&v| (v as f64 + 0.5) * ps).collect();
            let own = ball_weight(&center, pr, a) * h.eval(pr);
            *children = children.min(own);
        }
        cost = parents;
        s = ps;
    }
    Ok(cost.values().sum())
}

/// Bottom-up Frostman measure: each cube of `E` starts with mass
/// `h(2^{−k})`, then for `i = k−1, …, k−levels` the masses inside every
/// level-`i` cube `Q` are scaled so that `μ(Q) ≤ h(2^{−i})`. Atoms sit at the
/// centres of the cubes of `E`.
pub fn frostman_measure(e: &DyadicSetRep, h: &GaugeFunction, levels: u32) -> Result<DiscreteMeasure> {
    if levels > e.level {
        return Err(Error::Depth { requested: levels as usize, available: e.level as usize });
    }
    if e.is_empty() {
        return Ok(DiscreteMeasure::empty());
    }
    let k = e.level;
    let cubes: Vec<&Vec<u64>> = e.cubes.iter().collect();
    let mut mass = vec![h.eval(e.side()); cubes.len()];
    for up in 1..=levels {
        let i = k - up;
        let cap = h.eval(0.5f64.powi(i as i32));
        let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        for (j, m) in cubes.iter().enumerate() {
            groups.entry(m.iter().map(|&v| v >> up).collect()).or_default().push(j);
        }
        for members in groups.values() {
            let total: f64 = members.iter().map(|&j| mass[j]).sum();
            if total > cap {
                let f = cap / total;
                for &j in members {
                    mass[j] *= f;
                }
            }
        }
    }
    let s = e.side();
    let atoms = cubes
        .iter()
        .zip(mass)
        .map(|(m, w)| Ok((PointPlus::new(m.iter().map(|&v| (v as f64 + 0.5) * s).collect())?, w)))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(atoms)
}

/// Log grid used by [`regularize_gauge`]: 40 points per decade.
fn regularization_grid() -> Vec<f64> {
    (0..=600).map(|i| 10f64.powf(-12.0 + i as f64 / 40.0)).collect()
}

/// `h̃(r) = r^b inf_{0<t≤r} h(t)/t^b`, by a running infimum over a log grid
/// on `[1e-12, 1e3]`. If `h(r)/r^b` keeps decreasing between the windows
/// `[1e-8, 1e-4]` and `[1e-12, 1e-8]` (by more than [`WINDOW_DROP`]) the liminf is taken to be 0 and the
/// zero gauge is returned.
pub fn regularize_gauge(h: &GaugeFunction, b: f64) -> Result<GaugeFunction> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("regularization exponent b = {b} must be positive")));
    }
    if h.is_zero() {
        return Ok(GaugeFunction::zero());
    }
    let grid = regularization_grid();
    let q: Vec<f64> = grid.iter().map(|&r| h.eval(r) / r.powf(b)).collect();
    let window_min = |lo: f64, hi: f64| {
        grid.iter().zip(&q).filter(|(r, _)| **r >= lo * (1.0 - 1e-12) && **r <= hi * (1.0 + 1e-12)).map(|(_, v)| *v).fold(f64::INFINITY, f64::min)
    };
    let deep = window_min(1e-12, 1e-8);
    let shallow = window_min(1e-8, 1e-4);
    if !(deep > 0.0) || deep < shallow * (1.0 - WINDOW_DROP) {
        return Ok(GaugeFunction::zero());
    }
    let mut run = f64::INFINITY;
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(&q)
        .map(|(&r, &v)| {
            run = run.min(v);
            (r, run * r.powf(b))
        })
        .collect();
    Ok(GaugeFunction::log_log(&pts)?.with_label(&format!("regularized {} (b = {b})", h.label)))
}

/// Three-way answer for quantities decided from a finite prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Zero,
    Inconclusive,
}

/// Bounds on `Λ_{h,a}(C_L)` from the ratios `h(l_k)/h_L(l_k)`.
#[derive(Debug, Clone, Serialize)]
pub struct CantorHausdorffBounds {
    /// Positive when the liminf of the ratios is positive.
    pub lower: Verdict,
    /// `c · liminf`, with `c = m^n (1 + √n/(2m))^{|a|}`, `m = ⌈√n/2⌉`.
    pub upper: f64,
    pub liminf: f64,
    pub constant: f64,
    pub ratios: Vec<f64>,
}

/// Levels used by [`cantor_hausdorff_bounds`] for unbounded (geometric) specs.
pub const CANTOR_BOUND_LEVELS: usize = 24;

/// Liminf of `h(l_k)/h_L(l_k)`: the minimum over the last quartile of the
/// stored levels, or 0 when the ratios there keep falling (log-slope below
/// `−1e-3` per level) or drop under [`LIMINF_TOL`].
pub fn cantor_hausdorff_bounds(spec: &CantorSpec, h: &GaugeFunction, a: &MultiIndexA) -> Result<CantorHausdorffBounds> {
    a.check_dim(spec.n)?;
    let depth = spec.depth().unwrap_or(CANTOR_BOUND_LEVELS);
    let gauge = CantorGauge::new(spec, a, depth)?;
    let ratios: Vec<f64> = (0..=depth).map(|k| h.eval(gauge.length(k)) / gauge.value(k)).collect();
    let nf = spec.n as f64;
    let m = (nf.sqrt() / 2.0).ceil().max(1.0);
    let constant = m.powf(nf) * (1.0 + nf.sqrt() / (2.0 * m)).powf(a.total());
    if ratios.len() < 4 {
        return Ok(CantorHausdorffBounds { lower: Verdict::Inconclusive, upper: f64::NAN, liminf: f64::NAN, constant, ratios });
    }
    let start = ratios.len() - (ratios.len() / 4).max(2);
    let tail = &ratios[start..];
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let slope = if tail.iter().all(|&v| v > 0.0) {
        let t = tail.len() as f64;
        let mx = (t - 1.0) / 2.0;
        let my = tail.iter().map(|v| v.ln()).sum::<f64>() / t;
        let (num, den) = tail.iter().enumerate().fold((0.0, 0.0), |(nu, de), (i, v)| {
            let dx = i as f64 - mx;
            (nu + dx * (v.ln() - my), de + dx * dx)
        });
        num / den
    } else {
        f64::NEG_INFINITY
    };
    let liminf = if min < LIMINF_TOL || slope < -1e-3 { 0.0 } else { min };
    let lower = if liminf > 0.0 { Verdict::Positive } else { Verdict::Zero };
    Ok(CantorHausdorffBounds { lower, upper: constant * liminf, liminf, constant, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a1() -> MultiIndexA {
        MultiIndexA::from_a(&[1.0]).unwrap()
    }

    fn middle_thirds_like(level: u32) -> DyadicSetRep {
        // cubes whose base-4 digits avoid 1 and 2: a dyadic Cantor set
        let cubes = (0..(1u64 << level)).filter(|&m| {
            let mut v = m;
            for _ in 0..level / 2 {
                if matches!(v & 3, 1 | 2) {
                    return false;
                }
                v >>= 2;
            }
            true
        });
        DyadicSetRep::new(1, level, cubes.map(|m| vec![m])).unwrap()
    }

    #[test]
    fn empty_set_has_zero_content() {
        let e = DyadicSetRep::new(1, 3, Vec::<Vec<u64>>::new()).unwrap();
        let h = GaugeFunction::power(1.0).unwrap();
        assert_eq!(hausdorff_content(&e, &h, &a1(), None).unwrap(), 0.0);
    }

    #[test]
    fn shrinking_cube_content_vanishes() {
        let h = GaugeFunction::power(1.0).unwrap();
        let mut last = f64::INFINITY;
        for level in [4u32, 8, 12, 16] {
            let m = (1u64 << level) / 2;
            let e = DyadicSetRep::new(1, level, [vec![m]]).unwrap();
            let c = hausdorff_content(&e, &h, &a1(), None).unwrap();
            assert!(c < last);
            last = c;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn unit_interval_content_is_bounded() {
        // E = [0,1], h(r) = r: any cover by N balls of radius 1/(2N) costs
        // Σ (right ends)(1/2N) ≤ 1, and the unweighted content is ≥ 1/2
        let h = GaugeFunction::power(1.0).unwrap();
        let e = DyadicSetRep::from_predicate(1, 6, 64, |_, _| true);
        let c = hausdorff_content(&e, &h, &a1(), None).unwrap();
        let n = 64.0;
        let explicit: f64 = (0..64).map(|i| ((i as f64 + 0.5) / n + 1.0 / n) * (1.0 / n)).sum();
        assert!(c > 0.0 && c <= explicit * 1.0 + 1e-12, "content {c}, explicit cover {explicit}");
        let ones = MultiIndexA::from_a(&[1e-12]).unwrap();
        let unweighted = hausdorff_content(&e, &h, &ones, None).unwrap();
        // weights on [0,1] lie in [0, 2]
        assert!(c <= 2.0 * unweighted + 1e-12);
    }

    #[test]
    fn content_decreases_as_cap_relaxes() {
        let h = GaugeFunction::power(0.6).unwrap();
        let e = middle_thirds_like(8);
        let inf = hausdorff_content(&e, &h, &a1(), None).unwrap();
        let mut prev = inf;
        for rho in [1.0, 0.25, 0.05, 0.01] {
            let c = hausdorff_content(&e, &h, &a1(), Some(rho)).unwrap();
            assert!(c >= prev - 1e-12, "ρ = {rho}: {c} < {prev}");
            prev = c;
        }
    }

    #[test]
    fn content_is_monotone_in_set_and_gauge() {
        let small = middle_thirds_like(6);
        let big = DyadicSetRep::from_predicate(1, 6, 64, |lo, _| lo[0] < 0.5).cubes.union(&small.cubes).cloned().collect::<Vec<_>>();
        let big = DyadicSetRep::new(1, 6, big).unwrap();
        let h1 = GaugeFunction::power(0.7).unwrap();
        let h2 = GaugeFunction::from_fn("2 r^0.7", |r: f64| 2.0 * r.powf(0.7));
        let cs = hausdorff_content(&small, &h1, &a1(), Some(0.3)).unwrap();
        let cb = hausdorff_content(&big, &h1, &a1(), Some(0.3)).unwrap();
        let cs2 = hausdorff_content(&small, &h2, &a1(), Some(0.3)).unwrap();
        assert!(cs <= cb + 1e-12);
        assert!(cs <= cs2 + 1e-12);
    }

    #[test]
    fn supercritical_power_gauge_has_zero_content() {
        for n in [1usize, 2] {
            let a = MultiIndexA::uniform(n, 1.0).unwrap();
            let e = DyadicSetRep::from_predicate(n, 3, 8, |_, _| true);
            let h = GaugeFunction::power(n as f64 + 0.5).unwrap();
            assert_eq!(hausdorff_content(&e, &h, &a, None).unwrap(), 0.0);
            let h = GaugeFunction::power(n as f64).unwrap();
            assert!(hausdorff_content(&e, &h, &a, None).unwrap() > 0.0);
        }
    }

    #[test]
    fn frostman_single_cube_is_one_atom() {
        let e = DyadicSetRep::new(2, 5, [vec![3, 7]]).unwrap();
        let h = GaugeFunction::power(0.5).unwrap();
        let mu = frostman_measure(&e, &h, 5).unwrap();
        assert_eq!(mu.len(), 1);
        assert!((mu.atoms()[0].1 - (1.0f64 / 32.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frostman_respects_every_ancestor() {
        let e = middle_thirds_like(8);
        let h = GaugeFunction::power(0.4).unwrap();
        let mu = frostman_measure(&e, &h, 8).unwrap();
        for i in 0..=8u32 {
            let s = 0.5f64.powi(i as i32);
            let mut per: BTreeMap<u64, f64> = BTreeMap::new();
            for (x, w) in mu.atoms() {
                *per.entry((x.coords()[0] / s).floor() as u64).or_insert(0.0) += w;
            }
            for v in per.values() {
                assert!(*v <= h.eval(s) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn frostman_ball_growth() {
        let e = middle_thirds_like(6);
        let h = GaugeFunction::power(0.5).unwrap();
        let mu = frostman_measure(&e, &h, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(0.0..1.0);
            let r = 0.5f64.powi(rng.gen_range(0..=6));
            let m: f64 = mu.atoms().iter().filter(|(y, _)| (y.coords()[0] - x).abs() <= r).map(|(_, w)| w).sum();
            assert!(m <= 3.0 * h.eval(r) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn frostman_mass_below_content() {
        let e = middle_thirds_like(8);
        let h = GaugeFunction::power(0.5).unwrap();
        let a = a1();
        let mu = frostman_measure(&e, &h, 8).unwrap();
        let mu_a: f64 = mu.atoms().iter().map(|(x, w)| w * a.weight(x.coords())).sum();
        let content = hausdorff_content(&e, &h, &a, None).unwrap();
        assert!(mu_a <= content * (1.0 + 1e-12));
        assert!(content / mu_a < 50.0);
    }

    #[test]
    fn regularize_power_gauges() {
        let h = GaugeFunction::power(0.8).unwrap();
        let t = regularize_gauge(&h, 1.0).unwrap();
        for r in [1e-10, 1e-5, 0.3, 1.0] {
            assert!((t.eval(r) / h.eval(r) - 1.0).abs() < 1e-9);
        }
        let h = GaugeFunction::power(1.3).unwrap();
        assert!(regularize_gauge(&h, 1.0).unwrap().is_zero());
    }

    #[test]
    fn regularize_oscillating_gauge() {
        let b = 1.0;
        let h = GaugeFunction::from_fn("r(2+sin ln r)", move |r: f64| r.powf(b) * (2.0 + r.ln().sin()));
        let t = regularize_gauge(&h, b).unwrap();
        assert!(!t.is_zero());
        let grid = regularization_grid();
        let mut prev = f64::INFINITY;
        for &r in &grid {
            assert!(t.eval(r) <= h.eval(r) * (1.0 + 1e-12));
            let q = t.eval(r) / r.powf(b);
            assert!(q <= prev * (1.0 + 1e-12));
            prev = q;
        }
    }

    #[test]
    fn gauge_validation() {
        let bad = GaugeFunction::from_fn("1-r", |r: f64| if r > 0.0 { 1.0 - r.min(1.0) } else { 0.0 });
        assert!(matches!(bad.validate(1e-6, 1.0, 50), Err(Error::InvalidGauge(_))));
        assert!(GaugeFunction::power(0.5).unwrap().validate(1e-12, 1.0, 200).is_ok());
    }

    #[test]
    fn cantor_bounds_ratio_cases() {
        let a = a1();
        let spec = CantorSpec::geometric(1, 0.0, 1.0, 0.3).unwrap();
        let hl = CantorGauge::new(&spec, &a, 30).unwrap().to_gauge().unwrap();
        let same = cantor_hausdorff_bounds(&spec, &hl, &a).unwrap();
        assert_eq!(same.lower, Verdict::Positive);
        assert!((same.liminf - 1.0).abs() < 1e-9);
        assert!(same.upper.is_finite() && same.upper > 0.0);
        let hl2 = hl.clone();
        let fast = GaugeFunction::from_fn("h_L^2", move |r| hl2.eval(r).powi(2));
        let b = cantor_hausdorff_bounds(&spec, &fast, &a).unwrap();
        assert_eq!(b.lower, Verdict::Zero);
        assert_eq!(b.upper, 0.0);
        let hl3 = hl.clone();
        let slow = GaugeFunction::from_fn("h_L^(1/2)", move |r| hl3.eval(r).sqrt());
        assert_eq!(cantor_hausdorff_bounds(&spec, &slow, &a).unwrap().lower, Verdict::Positive);
        let short = CantorSpec::explicit(1, 0.0, 1.0, vec![0.3, 0.1]).unwrap();
        assert_eq!(cantor_hausdorff_bounds(&short, &hl, &a).unwrap().lower, Verdict::Inconclusive);
    }

    #[test]
    fn dyadic_json_round_trip() {
        let e = middle_thirds_like(4);
        let s = serde_json::to_string(&e).unwrap();
        let back: DyadicSetRep = serde_json::from_str(&s).unwrap();
        assert_eq!(e, back);
    }
}
