//! Modified Bessel function `K_ν`, the Bessel kernel `G_{a,ν}`, the Riesz
//! kernel and general radially decreasing kernels.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quad::{self, ShellDirection, TailVerdict};
use crate::weighted::{dual_exponent, MultiIndexA, PointPlus};

/// `ln K_ν(x)` from `K_ν(x) = ∫_0^∞ e^{−x cosh t} cosh(νt) dt`.
///
/// The integrand is analytic and decays doubly exponentially, so the
/// trapezoid rule converges geometrically; the step is halved until two
/// successive sums agree to 1e-15.
pub fn ln_bessel_k(order: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K_nu needs x > 0, got {x}")));
    }
    let nu = order.abs();
    // log of e^{x} × integrand, written to avoid cancellation in cosh t − 1
    let ln_f = |t: f64| -> f64 {
        let sh = (0.5 * t).sinh();
        let y = nu * t;
        -2.0 * x * sh * sh + y + (0.5 * (1.0 + (-2.0 * y).exp())).ln()
    };
    let t_peak = if nu > 0.0 { (nu / x).asinh() } else { 0.0 };
    let l_ref = ln_f(t_peak).max(ln_f(0.0));
    let f = |t: f64| (ln_f(t) - l_ref).exp();

    let sum_level = |h: f64, start: usize, step: usize| -> f64 {
        let mut acc = 0.0;
        let mut k = start;
        loop {
            let t = k as f64 * h;
            let v = f(t);
            acc += v;
            if t > t_peak && (v < 1e-18 * acc || v == 0.0) {
                break;
            }
            k += step;
        }
        acc
    };
    let mut h = 0.5;
    let mut sum = 0.5 * f(0.0) + sum_level(h, 1, 1);
    let mut est = h * sum;
    for level in 0..30 {
        h *= 0.5;
        sum += sum_level(h, 1, 2);
        let next = h * sum;
        let done = level >= 2 && (next - est).abs() <= 1e-15 * next;
        est = next;
        if done {
            break;
        }
    }
    Ok(l_ref + est.ln() - x)
}

/// `K_ν(x)`.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    ln_bessel_k(order, x).map(f64::exp)
}

/// Parameters of the Bessel kernel `G_{a,ν}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselKernelParams {
    pub a: MultiIndexA,
    pub nu: f64,
}

impl BesselKernelParams {
    pub fn new(a: MultiIndexA, nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Domain(format!("Bessel kernel order nu = {nu} must be positive")));
        }
        Ok(BesselKernelParams { a, nu })
    }

    /// Order `(n + |a| − ν)/2` of the modified Bessel factor.
    pub fn order(&self) -> f64 {
        0.5 * (self.a.dim() - self.nu)
    }

    /// Log of the normalizing constant `2^{(n−|a|−ν)/2+1} / (Γ(ν/2) ∏Γ(α_i+1))`.
    pub fn ln_constant(&self) -> f64 {
        let n = self.a.n() as f64;
        let ln2 = std::f64::consts::LN_2;
        ((n - self.a.total() - self.nu) / 2.0 + 1.0) * ln2
            - ln_gamma(self.nu / 2.0)
            - self.a.alphas().iter().map(|al| ln_gamma(al + 1.0)).sum::<f64>()
    }

    /// `ln G_{a,ν}(r)` at radius `r > 0`.
    pub fn ln_value(&self, r: f64) -> Result<f64> {
        let s = self.order();
        Ok(self.ln_constant() + ln_bessel_k(s, r)? - s * r.ln())
    }
}

/// `G_{a,ν}(x)`.
pub fn bessel_kernel_g(params: &BesselKernelParams, x: &PointPlus) -> Result<f64> {
    params.a.check_dim(x.n())?;
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::SingularOrigin);
    }
    params.ln_value(r).map(f64::exp)
}

/// `|x|^{β−n}` (normalization constant 1).
pub fn riesz_kernel(beta: f64, n: usize, x: &PointPlus) -> Result<f64> {
    if x.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.n() });
    }
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::SingularOrigin);
    }
    Ok(r.powf(beta - n as f64))
}

/// `0 < ν < (n + |a|)/p`.
pub fn capacity_nontrivial(a: &MultiIndexA, nu: f64, p: f64) -> Result<bool> {
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("nontriviality needs p > 1, got {p}")));
    }
    Ok(nu > 0.0 && nu < a.dim() / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelTag {
    Bessel,
    Riesz,
    Custom,
}

const TABLE_R_MIN: f64 = 1e-8;
const TABLE_R_MAX: f64 = 700.0;
const TABLE_POINTS: usize = 4000;

/// `ln G(e^u) + e^u` on a uniform `u` grid; the exponential factor is removed
/// so that cubic interpolation stays accurate far out.
#[derive(Debug)]
struct BesselTable {
    params: BesselKernelParams,
    u0: f64,
    du: f64,
    phi: Vec<f64>,
}

impl BesselTable {
    fn build(params: BesselKernelParams) -> Result<Self> {
        let u0 = TABLE_R_MIN.ln();
        let du = (TABLE_R_MAX.ln() - u0) / (TABLE_POINTS - 1) as f64;
        let phi = (0..TABLE_POINTS)
            .map(|i| {
                let r = (u0 + du * i as f64).exp();
                params.ln_value(r).map(|v| v + r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BesselTable { params, u0, du, phi })
    }

    fn eval(&self, r: f64) -> f64 {
        if !(r >= TABLE_R_MIN && r <= TABLE_R_MAX) {
            return self.params.ln_value(r).map(f64::exp).unwrap_or(0.0);
        }
        let s = (r.ln() - self.u0) / self.du;
        let last = self.phi.len() - 1;
        let i = (s.floor() as isize).clamp(1, last as isize - 2) as usize;
        let t = s - i as f64;
        let (p0, p1, p2, p3) = (self.phi[i - 1], self.phi[i], self.phi[i + 1], self.phi[i + 2]);
        // cubic Lagrange through nodes −1, 0, 1, 2
        let v = -t * (t - 1.0) * (t - 2.0) / 6.0 * p0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * p1
            - (t + 1.0) * t * (t - 2.0) / 2.0 * p2
            + (t + 1.0) * t * (t - 1.0) / 6.0 * p3;
        (v - r).exp()
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Bessel(Arc<BesselTable>),
    Riesz { exponent: f64 },
    Table { r: Arc<Vec<f64>>, g: Arc<Vec<f64>> },
}

/// A radially decreasing kernel `κ(x) = g(|x|)` on the weighted orthant.
#[derive(Debug, Clone)]
pub struct RadialKernel {
    tag: KernelTag,
    a: MultiIndexA,
    profile: Profile,
    nu: Option<f64>,
    beta: Option<f64>,
    admissibility: f64,
}

impl RadialKernel {
    pub fn bessel(a: &MultiIndexA, nu: f64) -> Result<Self> {
        let params = BesselKernelParams::new(a.clone(), nu)?;
        let table = BesselTable::build(params)?;
        Self::finish(KernelTag::Bessel, a, Profile::Bessel(Arc::new(table)), Some(nu), None)
    }

    pub fn riesz(a: &MultiIndexA, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("Riesz order beta = {beta} must be positive")));
        }
        let exponent = beta - a.n() as f64;
        Self::finish(KernelTag::Riesz, a, Profile::Riesz { exponent }, None, Some(beta))
    }

    /// Piecewise-linear profile through `(r_i, g_i)`; constant below the first
    /// radius and zero beyond the last.
    pub fn custom(a: &MultiIndexA, r: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if r.len() != g.len() || r.len() < 2 {
            return Err(Error::Domain("custom kernel table needs at least two (r, g) rows of equal length".into()));
        }
        if r[0] <= 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("custom kernel radii must be positive and strictly increasing".into()));
        }
        if g.iter().any(|v| !(*v >= 0.0)) || g.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Domain("custom kernel values must be nonnegative and non-increasing".into()));
        }
        let profile = Profile::Table { r: Arc::new(r), g: Arc::new(g) };
        Self::finish(KernelTag::Custom, a, profile, None, None)
    }

    /// Reads a two-column `r,g` CSV.
    pub fn custom_from_csv<P: AsRef<Path>>(a: &MultiIndexA, path: P) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
        let (mut r, mut g) = (Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize, name: &str| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("kernel table row {}: field `{name}` is not a number", line + 1)))
            };
            r.push(parse(0, "r")?);
            g.push(parse(1, "g")?);
        }
        Self::custom(a, r, g)
    }

    fn finish(tag: KernelTag, a: &MultiIndexA, profile: Profile, nu: Option<f64>, beta: Option<f64>) -> Result<Self> {
        let mut k = RadialKernel { tag, a: a.clone(), profile, nu, beta, admissibility: 0.0 };
        // non-increasing on 10^3 log-spaced radii
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let r = 10f64.powf(-6.0 + 9.0 * i as f64 / 999.0);
            let v = k.g(r);
            if v > prev * (1.0 + 1e-9) {
                return Err(Error::Domain(format!("kernel profile increases near r = {r:.3e}")));
            }
            prev = v;
        }
        let dim = a.dim();
        let verdict = quad::dyadic_shells(|t| k.g(t) * t.powf(dim - 1.0), 1.0, ShellDirection::TowardZero, 200, 1e6);
        match verdict {
            TailVerdict::Finite(v) => k.admissibility = v,
            TailVerdict::Divergent => {
                return Err(Error::Domain("kernel is not locally integrable: ∫_0^1 g(t) t^{n+|a|-1} dt diverges".into()))
            }
        }
        Ok(k)
    }

    pub fn tag(&self) -> KernelTag {
        self.tag
    }
    pub fn multi_index(&self) -> &MultiIndexA {
        &self.a
    }
    pub fn nu(&self) -> Option<f64> {
        self.nu
    }
    pub fn beta(&self) -> Option<f64> {
        self.beta
    }
    /// `∫_0^1 g(t) t^{n+|a|−1} dt`.
    pub fn admissibility(&self) -> f64 {
        self.admissibility
    }

    /// Radial profile `g(r)`; `+∞` at a singular origin.
    pub fn g(&self, r: f64) -> f64 {
        match &self.profile {
            Profile::Bessel(t) => {
                if r <= 0.0 {
                    f64::INFINITY
                } else {
                    t.eval(r)
                }
            }
            Profile::Riesz { exponent } => {
                if r <= 0.0 {
                    if *exponent < 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    r.powf(*exponent)
                }
            }
            Profile::Table { r: rs, g } => {
                if r <= rs[0] {
                    return g[0];
                }
                let last = rs.len() - 1;
                if r > rs[last] {
                    return 0.0;
                }
                let j = rs.partition_point(|&v| v < r).clamp(1, last);
                let s = (r - rs[j - 1]) / (rs[j] - rs[j - 1]);
                g[j - 1] + s * (g[j] - g[j - 1])
            }
        }
    }

    /// `κ(x)`.
    pub fn eval(&self, x: &PointPlus) -> Result<f64> {
        self.a.check_dim(x.n())?;
        let r = x.norm();
        if r == 0.0 && self.tag != KernelTag::Custom {
            return Err(Error::SingularOrigin);
        }
        Ok(self.g(r))
    }

    /// Whether `g` is unbounded at the origin.
    pub fn singular_at_origin(&self) -> bool {
        self.g(0.0).is_infinite()
    }

    /// `∫_{|x|<1} κ^q dλ_a` and `∫_{|x|>1} κ^q dλ_a`, each with a finiteness verdict.
    pub fn power_integrals(&self, q: f64) -> (TailVerdict, TailVerdict) {
        let dim = self.a.dim();
        let sphere = dim * self.a.ball_constant();
        let f = |t: f64| sphere * self.g(t).powf(q) * t.powf(dim - 1.0);
        let core = quad::dyadic_shells(f, 1.0, ShellDirection::TowardZero, 200, 1e6);
        let tail = match &self.profile {
            Profile::Table { r, .. } => {
                let hi = *r.last().unwrap();
                TailVerdict::Finite(if hi > 1.0 { quad::adaptive(f, 1.0, hi, r, quad::Tolerance::default()) } else { 0.0 })
            }
            _ => quad::dyadic_shells(f, 1.0, ShellDirection::TowardInfinity, 64, 1e6),
        };
        (core, tail)
    }

    /// `‖κ‖_{q,a}^q` with a verdict.
    pub fn norm_pow(&self, q: f64) -> TailVerdict {
        match self.power_integrals(q) {
            (TailVerdict::Finite(c), TailVerdict::Finite(t)) => TailVerdict::Finite(c + t),
            _ => TailVerdict::Divergent,
        }
    }
}

/// Whether `∫ K_s(r) r^{−s} dλ_a` is finite for `s = (n+|a|−ν)/2`; the
/// normalization is omitted so that `ν = 0` can be probed.
pub fn bessel_profile_l1(a: &MultiIndexA, nu: f64) -> TailVerdict {
    let s = 0.5 * (a.dim() - nu);
    let dim = a.dim();
    let f = |t: f64| (ln_bessel_k(s, t).unwrap_or(f64::NEG_INFINITY) - s * t.ln() + (dim - 1.0) * t.ln()).exp();
    match (
        quad::dyadic_shells(f, 1.0, ShellDirection::TowardZero, 200, 1e6),
        quad::dyadic_shells(f, 1.0, ShellDirection::TowardInfinity, 64, 1e6),
    ) {
        (TailVerdict::Finite(c), TailVerdict::Finite(t)) => TailVerdict::Finite(c + t),
        _ => TailVerdict::Divergent,
    }
}

/// Single-point capacity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCapacity {
    pub positive: bool,
    /// Lower bound for `C^{1/p}({y})`: `1/‖κ‖_{p',a}` at interior points, 0 on the boundary.
    pub lower_bound: f64,
    /// `‖κ‖_{p',a}` when finite.
    pub kernel_norm: Option<f64>,
    /// The tail `∫_{|x|>1} κ^{p'} dλ_a` diverges, so every set has capacity zero.
    pub all_capacities_vanish: bool,
    pub diagnostic: String,
}

pub fn point_capacity_positive(k: &RadialKernel, p: f64, a: &MultiIndexA, y: &PointPlus) -> Result<PointCapacity> {
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("point capacity needs p > 1, got {p}")));
    }
    a.check_dim(y.n())?;
    let q = dual_exponent(p);
    let (core, tail) = k.power_integrals(q);
    if !tail.is_finite() {
        return Ok(PointCapacity {
            positive: false,
            lower_bound: 0.0,
            kernel_norm: None,
            all_capacities_vanish: true,
            diagnostic: "kernel tail is not in L^{p'}_a at infinity; every capacity vanishes".into(),
        });
    }
    if !core.is_finite() {
        return Ok(PointCapacity {
            positive: false,
            lower_bound: 0.0,
            kernel_norm: None,
            all_capacities_vanish: false,
            diagnostic: "kernel norm diverges at the origin; no point bound available".into(),
        });
    }
    let norm = (core.value() + tail.value()).powf(1.0 / q);
    let interior = y.is_interior();
    Ok(PointCapacity {
        positive: interior,
        lower_bound: if interior { 1.0 / norm } else { 0.0 },
        kernel_norm: Some(norm),
        all_capacities_vanish: false,
        diagnostic: if interior { "finite kernel norm".into() } else { "point on the boundary: y^a = 0".into() },
    })
}

/// Kernel descriptor accepted in job files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Bessel { nu: f64 },
    Riesz { beta: f64 },
    Custom { table: PathBuf },
}

impl KernelSpec {
    pub fn build(&self, a: &MultiIndexA) -> Result<RadialKernel> {
        match self {
            KernelSpec::Bessel { nu } => RadialKernel::bessel(a, *nu),
            KernelSpec::Riesz { beta } => RadialKernel::riesz(a, *beta),
            KernelSpec::Custom { table } => RadialKernel::custom_from_csv(a, table),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn a1() -> MultiIndexA {
        MultiIndexA::uniform(1, 1.0).unwrap()
    }

    #[test]
    fn half_integer_closed_forms() {
        let pi = std::f64::consts::PI;
        for x in [0.01, 0.1, 1.0, 7.5, 50.0, 300.0] {
            let k12 = (pi / (2.0 * x)).sqrt() * (-x).exp();
            assert_relative_eq!(bessel_k(0.5, x).unwrap(), k12, max_relative = 1e-12);
            let k32 = k12 * (1.0 + 1.0 / x);
            assert_relative_eq!(bessel_k(1.5, x).unwrap(), k32, max_relative = 1e-12);
        }
        assert_relative_eq!(bessel_k(0.5, 1.0).unwrap(), 0.461_068_504_447_894_4, max_relative = 1e-12);
        assert!(bessel_k(1.0, 0.0).is_err());
    }

    #[test]
    fn known_values() {
        // K_0(1), K_1(1), K_2(0.5) reference values
        assert_relative_eq!(bessel_k(0.0, 1.0).unwrap(), 0.421_024_438_240_708_3, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_6, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(2.0, 0.5).unwrap(), 7.550_183_551_240_869, max_relative = 1e-12);
    }

    #[test]
    fn recurrence_holds() {
        for (al, x) in [(0.3, 0.2), (1.7, 3.0), (2.5, 0.05), (0.9, 40.0)] {
            let lhs = bessel_k(al + 1.0, x).unwrap();
            let rhs = bessel_k(al - 1.0, x).unwrap() + 2.0 * al / x * bessel_k(al, x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        }
    }

    #[test]
    fn asymptotic_laws() {
        let r: f64 = 1e-4;
        let euler = 0.577_215_664_901_532_9;
        let ratio = bessel_k(0.0, r).unwrap() / (-(r / 2.0).ln() - euler);
        assert!((ratio - 1.0).abs() < 1e-3);
        let r: f64 = 50.0;
        let v = bessel_k(1.0, r).unwrap() * r.sqrt() * r.exp();
        assert!((v / (std::f64::consts::PI / 2.0).sqrt() - 1.0).abs() < 1e-2);
        let v100 = bessel_k(1.0, 400.0).unwrap() * 400f64.sqrt() * 400f64.exp();
        assert!((v100 / (std::f64::consts::PI / 2.0).sqrt() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn bessel_kernel_has_unit_mass() {
        for (avec, nu) in [(vec![1.0], 0.5), (vec![1.0], 1.5), (vec![0.4, 2.0], 0.8)] {
            let a = MultiIndexA::from_a(&avec).unwrap();
            let k = RadialKernel::bessel(&a, nu).unwrap();
            assert_relative_eq!(k.norm_pow(1.0).value(), 1.0, max_relative = 1e-7);
        }
    }

    #[test]
    fn table_matches_direct() {
        let a = a1();
        let params = BesselKernelParams::new(a.clone(), 0.4).unwrap();
        let k = RadialKernel::bessel(&a, 0.4).unwrap();
        for r in [1e-9, 3.3e-7, 0.01, 0.5, 1.0, 9.9, 44.0, 650.0] {
            assert_relative_eq!(k.g(r), params.ln_value(r).unwrap().exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn kernel_radial_and_singular() {
        let a = MultiIndexA::uniform(2, 1.0).unwrap();
        let p = BesselKernelParams::new(a, 0.7).unwrap();
        let v1 = bessel_kernel_g(&p, &PointPlus::new(vec![0.6, 0.8]).unwrap()).unwrap();
        let v2 = bessel_kernel_g(&p, &PointPlus::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_relative_eq!(v1, v2, max_relative = 1e-14);
        assert_eq!(bessel_kernel_g(&p, &PointPlus::new(vec![0.0, 0.0]).unwrap()), Err(Error::SingularOrigin));
    }

    #[test]
    fn near_zero_power_law() {
        // G r^{N−ν} tends to a positive constant and stays comparable for r ≤ 0.1
        let p = BesselKernelParams::new(a1(), 0.5).unwrap();
        let vals: Vec<f64> =
            [1e-1, 1e-2, 1e-3, 1e-5, 1e-7].iter().map(|&r: &f64| p.ln_value(r).unwrap().exp() * r.powf(1.5)).collect();
        let (lo, hi) = vals.iter().fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!(lo > 0.0 && hi / lo < 2.0);
        assert_relative_eq!(vals[3], vals[4], max_relative = 1e-3);
    }

    #[test]
    fn decay_at_infinity() {
        let p = BesselKernelParams::new(a1(), 0.5).unwrap();
        let e = 0.5 * (p.a.dim() - 0.5 + 1.0);
        let h = |r: f64| p.ln_value(r).unwrap() + e * r.ln() + r;
        let early = (h(25.0) - h(20.0)).abs();
        let late = (h(50.0) - h(45.0)).abs();
        assert!(late < 1e-2 && late < early);
    }

    #[test]
    fn integrability_switch() {
        assert!(!bessel_profile_l1(&a1(), 0.0).is_finite());
        assert!(bessel_profile_l1(&a1(), 0.5).is_finite());
    }

    #[test]
    fn riesz_examples() {
        let x = PointPlus::new(vec![2.0, 0.0]).unwrap();
        assert_relative_eq!(riesz_kernel(1.0, 2, &x).unwrap(), 0.5);
        let sx = PointPlus::new(vec![6.0, 0.0]).unwrap();
        assert_relative_eq!(riesz_kernel(0.4, 2, &sx).unwrap(), 3f64.powf(-1.6) * riesz_kernel(0.4, 2, &x).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn nontriviality() {
        let a = a1();
        assert!(!capacity_nontrivial(&a, 1.0, 2.0).unwrap());
        assert!(capacity_nontrivial(&a, 0.5, 2.0).unwrap());
        assert!(!capacity_nontrivial(&a, 0.0, 2.0).unwrap());
        assert!(capacity_nontrivial(&a, 0.5, 1.0).is_err());
    }

    #[test]
    fn point_capacity() {
        let a = a1();
        let y = PointPlus::new(vec![1.0]).unwrap();
        // ν = 1.5 > N/p: finite L^2_a norm
        let g = RadialKernel::bessel(&a, 1.5).unwrap();
        let pc = point_capacity_positive(&g, 2.0, &a, &y).unwrap();
        assert!(pc.positive && pc.lower_bound > 0.0);
        let edge = point_capacity_positive(&g, 2.0, &a, &PointPlus::new(vec![0.0]).unwrap()).unwrap();
        assert_eq!(edge.lower_bound, 0.0);
        // ν = 0.9 < N/p: the norm diverges at the origin
        let g = RadialKernel::bessel(&a, 0.9).unwrap();
        assert!(!point_capacity_positive(&g, 2.0, &a, &y).unwrap().positive);
        // Riesz with slow decay: tail diverges
        let r = RadialKernel::riesz(&a, 0.8).unwrap();
        assert!(point_capacity_positive(&r, 2.0, &a, &y).unwrap().all_capacities_vanish);
    }

    #[test]
    fn shipped_kernels_are_admissible() {
        let a = a1();
        for k in [RadialKernel::bessel(&a, 0.4).unwrap(), RadialKernel::riesz(&a, 0.3).unwrap()] {
            assert!(k.admissibility().is_finite() && k.admissibility() > 0.0);
        }
        assert!(RadialKernel::custom(&a, vec![0.1, 1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn kernel_spec_json() {
        let s: KernelSpec = serde_json::from_str(r#"{"type":"bessel","nu":0.5}"#).unwrap();
        assert_eq!(s, KernelSpec::Bessel { nu: 0.5 });
        assert!(serde_json::from_str::<KernelSpec>(r#"{"type":"riesz","nu":0.5}"#).is_err());
    }
}
