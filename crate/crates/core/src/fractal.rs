//! Cantor sets `C_L(n, Q)`: corner-weight sums, the gauge `h_L`, capacity
//! classification and the construction of a Cantor set with a prescribed gauge.

use serde::{Deserialize, Serialize};

use crate::capacity::{Cell, CompactSetSample};
use crate::hausdorff::{GaugeFunction, Verdict};
use crate::quad::{dyadic_shells, ShellDirection};
use crate::{dual_exponent, Error, MultiIndexA, Result};

/// Largest number of 1-D intervals enumerated for non-integer exponents.
const MAX_ENUMERATED: usize = 1 << 24;
/// Exponents `a_j` that are integers up to this bound use power-sum recursions.
const MAX_INTEGER_EXPONENT: f64 = 16.0;
/// Terms listed for geometric specs, whose verdict is exact.
pub const GEOMETRIC_TERMS: usize = 20;
/// Ratio tolerance for the trend test on explicit prefixes.
pub const RATIO_TOL: f64 = 1e-3;

/// Generator of the lengths `l_1, l_2, …`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Ratios {
    /// Explicit lengths `l_1, …, l_K`.
    Explicit(Vec<f64>),
    /// `l_k = l_0 λ^k`.
    Geometric { geometric: f64 },
}

impl<'de> Deserialize<'de> for Ratios {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        let bad = || D::Error::custom("field `ratios`: expected a list of lengths or {\"geometric\": λ}");
        match v {
            serde_json::Value::Array(items) => items.iter().map(|x| x.as_f64().ok_or_else(bad)).collect::<std::result::Result<Vec<_>, _>>().map(Ratios::Explicit),
            serde_json::Value::Object(map) if map.len() == 1 => {
                map.get("geometric").and_then(|x| x.as_f64()).map(|g| Ratios::Geometric { geometric: g }).ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }
}

/// The Cantor set built in `Q = [q0, q0 + l0]^n`: `C_k` keeps the two end
/// intervals of length `l_k` of every interval of `C_{k−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    pub n: usize,
    pub q0: f64,
    pub l0: f64,
    pub ratios: Ratios,
}

impl CantorSpec {
    pub fn geometric(n: usize, q0: f64, l0: f64, lambda: f64) -> Result<Self> {
        let s = CantorSpec { n, q0, l0, ratios: Ratios::Geometric { geometric: lambda } };
        s.validate()?;
        Ok(s)
    }

    pub fn explicit(n: usize, q0: f64, l0: f64, lengths: Vec<f64>) -> Result<Self> {
        let s = CantorSpec { n, q0, l0, ratios: Ratios::Explicit(lengths) };
        s.validate()?;
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: CantorSpec = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Checks `0 < 2 l_{k+1} < l_k`. The geometric ratio `λ = 1/2` is
    /// admitted as the limiting case (`C_L = Q`).
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("Cantor set dimension must be at least 1".into()));
        }
        if !(self.q0 >= 0.0) || !(self.l0 > 0.0) || !self.l0.is_finite() {
            return Err(Error::Domain(format!("base interval [{}, {}+{}] must lie in [0, ∞)", self.q0, self.q0, self.l0)));
        }
        match &self.ratios {
            Ratios::Geometric { geometric: lam } => {
                if !(*lam > 0.0 && *lam <= 0.5) {
                    return Err(Error::Domain(format!("geometric ratio {lam} must lie in (0, 1/2]")));
                }
            }
            Ratios::Explicit(ls) => {
                let mut prev = self.l0;
                for (k, &l) in ls.iter().enumerate() {
                    if !(l > 0.0 && 2.0 * l < prev) {
                        return Err(Error::Domain(format!("l_{} = {l} violates 0 < 2 l_{} < l_{} = {prev}", k + 1, k + 1, k)));
                    }
                    prev = l;
                }
            }
        }
        Ok(())
    }

    /// Number of stored levels, `None` when unbounded.
    pub fn depth(&self) -> Option<usize> {
        match &self.ratios {
            Ratios::Explicit(ls) => Some(ls.len()),
            Ratios::Geometric { .. } => None,
        }
    }

    pub fn length(&self, k: usize) -> Result<f64> {
        match &self.ratios {
            _ if k == 0 => Ok(self.l0),
            Ratios::Geometric { geometric } => Ok(self.l0 * geometric.powi(k as i32)),
            Ratios::Explicit(ls) => ls.get(k - 1).copied().ok_or(Error::Depth { requested: k, available: ls.len() }),
        }
    }

    /// `l_0, …, l_k`.
    pub fn lengths(&self, k: usize) -> Result<Vec<f64>> {
        (0..=k).map(|i| self.length(i)).collect()
    }

    /// Left endpoints of the `2^k` intervals of `C_k`, in increasing order.
    pub fn starts(&self, k: usize) -> Result<Vec<f64>> {
        let ls = self.lengths(k)?;
        if k >= 63 || (1usize << k) > MAX_ENUMERATED {
            return Err(Error::Precondition(format!("level {k} has too many intervals to enumerate")));
        }
        let mut s = vec![self.q0];
        for i in 1..=k {
            let d = ls[i - 1] - ls[i];
            s = s.iter().flat_map(|&x| [x, x + d]).collect();
        }
        Ok(s)
    }

    /// The intervals of `C_k` with touching neighbours merged.
    pub fn merged_intervals(&self, k: usize) -> Result<Vec<(f64, f64)>> {
        let l = self.length(k)?;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for s in self.starts(k)? {
            match out.last_mut() {
                Some(last) if s <= last.1 * (1.0 + 1e-14) => last.1 = s + l,
                _ => out.push((s, s + l)),
            }
        }
        Ok(out)
    }

    /// `C_k^n` as a union of closed cells.
    pub fn compact_sample(&self, k: usize) -> Result<CompactSetSample> {
        let iv = self.merged_intervals(k)?;
        let total = iv.len().checked_pow(self.n as u32).filter(|&c| c <= MAX_ENUMERATED);
        if total.is_none() {
            return Err(Error::Precondition(format!("C_{k}^{} has too many cells", self.n)));
        }
        let mut cells = Vec::new();
        let mut idx = vec![0usize; self.n];
        loop {
            cells.push(Cell::new(idx.iter().map(|&i| iv[i].0).collect(), idx.iter().map(|&i| iv[i].1).collect())?);
            let mut d = 0;
            while d < self.n {
                idx[d] += 1;
                if idx[d] < iv.len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == self.n {
                break;
            }
        }
        CompactSetSample::from_cells(cells)
    }
}

/// Sums `Σ_s (s + d)^a` over the left endpoints `s` of one axis at one level.
#[derive(Debug, Clone)]
enum AxisSums {
    /// Power sums `Σ s^t`, `t = 0, …, a`, for integer `a`.
    Moments { a: usize, m: Vec<f64>, binom: Vec<Vec<f64>> },
    Starts { a: f64, s: Vec<f64> },
}

impl AxisSums {
    fn new(q0: f64, a: f64) -> Self {
        if a.fract() == 0.0 && a <= MAX_INTEGER_EXPONENT {
            let a = a as usize;
            let mut binom = vec![vec![1.0; 1]; a + 1];
            for t in 1..=a {
                let mut row = vec![1.0; t + 1];
                for u in 1..t {
                    row[u] = binom[t - 1][u - 1] + binom[t - 1][u];
                }
                binom[t] = row;
            }
            AxisSums::Moments { a, m: (0..=a).map(|t| q0.powi(t as i32)).collect(), binom }
        } else {
            AxisSums::Starts { a, s: vec![q0] }
        }
    }

    fn sum_shifted(&self, d: f64) -> f64 {
        match self {
            AxisSums::Moments { a, m, binom } => (0..=*a).map(|t| binom[*a][t] * d.powi((*a - t) as i32) * m[t]).sum(),
            AxisSums::Starts { a, s } => s.iter().map(|&x| (x + d).powf(*a)).sum(),
        }
    }

    /// Next level: every interval keeps its start and gains one at `s + d`.
    fn split(&mut self, d: f64) -> Result<()> {
        match self {
            AxisSums::Moments { m, binom, .. } => {
                let old = m.clone();
                for t in 0..m.len() {
                    m[t] += (0..=t).map(|u| binom[t][u] * d.powi((t - u) as i32) * old[u]).sum::<f64>();
                }
            }
            AxisSums::Starts { s, .. } => {
                if 2 * s.len() > MAX_ENUMERATED {
                    return Err(Error::Precondition("non-integer exponent: too many endpoints to enumerate at this depth".into()));
                }
                *s = s.iter().flat_map(|&x| [x, x + d]).collect();
            }
        }
        Ok(())
    }
}

/// Level-by-level corner sums `Σ_i v_{k,i}^a`, one per level `0..=depth`.
fn corner_sums(spec: &CantorSpec, a: &MultiIndexA, depth: usize) -> Result<Vec<f64>> {
    a.check_dim(spec.n)?;
    let ls = spec.lengths(depth)?;
    let mut axes: Vec<AxisSums> = a.a().iter().map(|&ai| AxisSums::new(spec.q0, ai)).collect();
    let mut out = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        if k > 0 {
            for ax in axes.iter_mut() {
                ax.split(ls[k - 1] - ls[k])?;
            }
        }
        out.push(axes.iter().map(|ax| ax.sum_shifted(ls[k])).product());
    }
    Ok(out)
}

/// `Σ_{i=1}^{2^{nk}} v_{k,i}^a` with `v_{k,i}^a = max_{q_{k,i}} x^a`, as the
/// product over axes of `Σ (right endpoint)^{a_j}` over the 1-D intervals.
pub fn corner_weight_sum(spec: &CantorSpec, k: usize, a: &MultiIndexA) -> Result<f64> {
    Ok(corner_sums(spec, a, k)?[k])
}

/// `h_L(l_k) = 1 / Σ_i v_{k,i}^a`.
pub fn gauge_hl(spec: &CantorSpec, k: usize, a: &MultiIndexA) -> Result<f64> {
    Ok(1.0 / corner_weight_sum(spec, k, a)?)
}

/// Values `h_L(l_k)`, `k = 0..=depth`, extended log-log linearly in between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CantorGauge {
    lengths: Vec<f64>,
    values: Vec<f64>,
}

impl CantorGauge {
    pub fn new(spec: &CantorSpec, a: &MultiIndexA, depth: usize) -> Result<Self> {
        let values = corner_sums(spec, a, depth)?.into_iter().map(|s| 1.0 / s).collect();
        Ok(CantorGauge { lengths: spec.lengths(depth)?, values })
    }

    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }
    pub fn length(&self, k: usize) -> f64 {
        self.lengths[k]
    }
    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `h_L(l_k) ≤ 2^n h_L(l_{k+1})` at every stored level.
    pub fn doubling_holds(&self, n: usize) -> bool {
        let c = 2f64.powi(n as i32);
        self.values.windows(2).all(|w| w[0] <= c * w[1] * (1.0 + 1e-12))
    }

    pub fn to_gauge(&self) -> Result<GaugeFunction> {
        let pts: Vec<(f64, f64)> = self.lengths.iter().copied().zip(self.values.iter().copied()).collect();
        Ok(GaugeFunction::log_log(&pts)?.with_label(&format!("h_L ({} levels)", self.depth())))
    }
}

fn check_regime(a: &MultiIndexA, nu: f64, p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Precondition(format!("p = {p} must lie in (1, ∞)")));
    }
    if !(p * nu > 0.0 && p * nu < a.dim()) {
        return Err(Error::Precondition(format!("need 0 < pν = {} < n + |a| = {}", p * nu, a.dim())));
    }
    Ok(())
}

/// Verdict on `Σ_k (l_k^{n−pν} Σ_i v_{k,i}^a)^{1−p′}` with the partial sums.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesClassification {
    pub verdict: Verdict,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Ratio of consecutive terms of the simplified series, for geometric specs.
    pub closed_form_ratio: Option<f64>,
}

/// Terms of the capacity series with lengths normalized by `l_0`.
pub fn capacity_series_terms(spec: &CantorSpec, a: &MultiIndexA, nu: f64, p: f64, depth: usize) -> Result<Vec<f64>> {
    check_regime(a, nu, p)?;
    let n = spec.n as f64;
    let pd = dual_exponent(p);
    let sums = corner_sums(spec, a, depth)?;
    Ok(sums
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let l = spec.length(k).unwrap() / spec.l0;
            (l.powf(n - p * nu) * s).powf(1.0 - pd)
        })
        .collect())
}

/// Terms `(l_k^{n−pν} 2^{nk})^{1−p′}` of the simplified series.
pub fn counting_series_terms(spec: &CantorSpec, nu: f64, p: f64, depth: usize) -> Result<Vec<f64>> {
    let n = spec.n as f64;
    let pd = dual_exponent(p);
    (0..=depth)
        .map(|k| {
            let l = spec.length(k)? / spec.l0;
            Ok((l.powf(n - p * nu) * 2f64.powf(n * k as f64)).powf(1.0 - pd))
        })
        .collect()
}

/// Capacity positivity of `C_L` from its series. Geometric specs are decided
/// exactly: the series converges iff `λ^{n−pν} 2^n > 1`. Explicit prefixes
/// are decided by the ratios of consecutive terms over the second half of the
/// prefix: all below `1 − 1e-3` means positive, all at least 1 (terms not
/// decaying) means zero, anything else is inconclusive.
pub fn classify_capacity_series(spec: &CantorSpec, a: &MultiIndexA, nu: f64, p: f64) -> Result<SeriesClassification> {
    check_regime(a, nu, p)?;
    let depth = spec.depth().unwrap_or(GEOMETRIC_TERMS);
    let terms = capacity_series_terms(spec, a, nu, p, depth)?;
    let partial_sums: Vec<f64> = terms.iter().scan(0.0, |acc, t| {
        *acc += t;
        Some(*acc)
    }).collect();
    let n = spec.n as f64;
    let (verdict, closed_form_ratio) = match spec.ratios {
        Ratios::Geometric { geometric: lam } => {
            let growth = lam.powf(n - p * nu) * 2f64.powf(n);
            let ratio = growth.powf(1.0 - dual_exponent(p));
            (if ratio < 1.0 - 1e-12 { Verdict::Positive } else { Verdict::Zero }, Some(ratio))
        }
        Ratios::Explicit(_) => {
            if terms.len() < 4 {
                (Verdict::Inconclusive, None)
            } else {
                let ratios: Vec<f64> = terms.windows(2).map(|w| w[1] / w[0]).collect();
                let tail = &ratios[ratios.len() / 2..];
                let v = if tail.iter().all(|&r| r <= 1.0 - RATIO_TOL) {
                    Verdict::Positive
                } else if tail.iter().all(|&r| r >= 1.0) {
                    Verdict::Zero
                } else {
                    Verdict::Inconclusive
                };
                (v, None)
            }
        }
    };
    Ok(SeriesClassification { verdict, terms, partial_sums, closed_form_ratio })
}

/// Result of the gauge integral test.
#[derive(Debug, Clone, Serialize)]
pub struct GaugeIntegral {
    pub finite: bool,
    /// Value of the integral, `+∞` when divergent.
    pub value: f64,
    pub verdict: Verdict,
}

/// `∫_0^1 (h(r)/r^{n−pν})^{p′−1} dr/r` by dyadic shells towards 0. Finite
/// means positive capacity, divergent means capacity zero.
pub fn gauge_integral_test(h: &GaugeFunction, a: &MultiIndexA, nu: f64, p: f64) -> Result<GaugeIntegral> {
    check_regime(a, nu, p)?;
    h.validate(1e-12, 1.0, 241)?;
    let n = a.n() as f64;
    let e = dual_exponent(p) - 1.0;
    let f = |r: f64| (h.eval(r) * r.powf(p * nu - n)).powf(e) / r;
    let v = dyadic_shells(f, 1.0, ShellDirection::TowardZero, 1000, 1e12);
    let finite = v.is_finite();
    Ok(GaugeIntegral { finite, value: v.value(), verdict: if finite { Verdict::Positive } else { Verdict::Zero } })
}

/// A constructed Cantor set with its per-level diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Construction {
    pub spec: CantorSpec,
    /// `|h(l_k) − 1/u_k(l_k)|` for `k = 1..`.
    pub residuals: Vec<f64>,
    /// Whether `h(r) r^{|a|−n}` was non-increasing on the sample grid.
    pub hypothesis_holds: bool,
}

/// Lengths `l_k` in `Q = [0,1]^n` with `h(l_k) = h_L(l_k)`: at level `k` the
/// earlier lengths are frozen and `h(l) = 1/u_k(l)` is solved by bisection on
/// `(0, l_{k−1}/2]`, where `u_k(l)` is the corner sum with last length `l`.
///
/// The monotonicity of `h(r) r^{|a|−n}` is only reported unless `strict`; the
/// bracket is checked at every level either way.
pub fn construct_prescribed(h: &GaugeFunction, a: &MultiIndexA, levels: usize, strict: bool) -> Result<Construction> {
    let n = a.n();
    h.validate(1e-12, 1.0, 241)?;
    if (h.eval(1.0) - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("the gauge must satisfy h(1) = 1, got {}", h.eval(1.0))));
    }
    let shift = a.total() - n as f64;
    let mut prev = f64::INFINITY;
    let mut hypothesis_holds = true;
    for i in 0..=240 {
        let r = 10f64.powf(-12.0 + i as f64 / 20.0);
        let q = h.eval(r) * r.powf(shift);
        if q > prev * (1.0 + 1e-12) {
            hypothesis_holds = false;
            break;
        }
        prev = q;
    }
    if strict && !hypothesis_holds {
        return Err(Error::Precondition("h(r) r^{|a|-n} is increasing somewhere on (0, 1]".into()));
    }
    let mut axes: Vec<AxisSums> = a.a().iter().map(|&ai| AxisSums::new(0.0, ai)).collect();
    let mut lengths = Vec::with_capacity(levels);
    let mut residuals = Vec::with_capacity(levels);
    let mut last = 1.0f64;
    for k in 1..=levels {
        let u = |l: f64| -> f64 { axes.iter().map(|ax| ax.sum_shifted(l) + ax.sum_shifted(last)).product() };
        let g = |l: f64| h.eval(l) * u(l) - 1.0;
        let (mut lo, mut hi) = (0.0f64, 0.5 * last);
        let g_hi = g(hi);
        if !(g_hi > 0.0) {
            return Err(Error::ConstructionFailed {
                level: k,
                reason: format!("h(l/2) = {:e} is below f_k(l/2) = {:e} at l = {last:e}", h.eval(hi), 1.0 / u(hi)),
            });
        }
        if g(lo) >= 0.0 {
            return Err(Error::ConstructionFailed { level: k, reason: "h(0) u_k(0) >= 1".into() });
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let res = |l: f64| (h.eval(l) - 1.0 / u(l)).abs();
        let l = if res(lo) <= res(hi) && lo > 0.0 { lo } else { hi };
        let r = res(l);
        if !(r < 1e-10) {
            return Err(Error::ConstructionFailed { level: k, reason: format!("residual {r:e} after bisection at l = {l:e}") });
        }
        if !(2.0 * l < last) {
            return Err(Error::ConstructionFailed { level: k, reason: format!("root l = {l:e} violates 2 l_k < l_(k-1) = {last:e}") });
        }
        for ax in axes.iter_mut() {
            ax.split(last - l)?;
        }
        lengths.push(l);
        residuals.push(r);
        last = l;
    }
    Ok(Construction { spec: CantorSpec::explicit(n, 0.0, 1.0, lengths)?, residuals, hypothesis_holds })
}
