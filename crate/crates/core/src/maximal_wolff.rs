//! Maximal measures, the dyadic sequences `b_k`, `c_k`, the split Riesz
//! potential and the Wolff function/energy.
//!
//! Everything is built on the averaged measure `F(r) = χ_{B_+(0,r)} *_a μ(x)`,
//! which for the supported measure shapes is piecewise smooth in `r` with
//! breakpoints reported by [`MeasureLike::radial_breaks`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::potential::{averages_on_grid, EnergyGrid, MeasureLike, Radial};
use crate::quad::{self, DeRule, ShellDirection, TailVerdict};
use crate::weighted::{dual_exponent, MultiIndexA, PointPlus};

const SUP_GRID: usize = 200;
const SUP_REFINEMENTS: usize = 3;
const LOG_R_DECADES: f64 = 12.0;

/// `χ_{B_+(0,r)} *_a μ(x)`.
pub fn ball_average<M: MeasureLike>(mu: &M, x: &[f64], r: f64, a: &MultiIndexA) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    mu.average(Radial::ball(r), x, a)
}

fn check_point<M: MeasureLike>(mu: &M, x: &PointPlus, a: &MultiIndexA) -> Result<()> {
    a.check_dim(x.n())?;
    if let Some(n) = mu.dim() {
        if n != x.n() {
            return Err(Error::DimensionMismatch { expected: n, got: x.n() });
        }
    }
    Ok(())
}

fn sorted_breaks<M: MeasureLike>(mu: &M, x: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = mu.radial_breaks(x).into_iter().filter(|r| *r > 0.0 && r.is_finite()).collect();
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    b.dedup();
    b
}

/// Supremum of `F(r) / norm(r)` over `0 < r ≤ r_max`: a geometric grid, the
/// breakpoints of `F`, and golden-section refinement around the best local
/// maxima.
fn sup_over_radii<M, N>(mu: &M, x: &[f64], a: &MultiIndexA, r_max: f64, norm: N) -> f64
where
    M: MeasureLike,
    N: Fn(f64) -> f64,
{
    if mu.is_zero() {
        return 0.0;
    }
    let breaks = sorted_breaks(mu, x);
    let reach = match breaks.last() {
        Some(&r) => r,
        None => return 0.0,
    };
    let ratio = |r: f64| ball_average(mu, x, r, a) / norm(r);
    let (lo, hi) = ((1e-6 * reach).ln(), (1e3 * reach).min(r_max).ln());
    if hi <= lo {
        return ratio(r_max);
    }
    let us: Vec<f64> = (0..SUP_GRID).map(|i| lo + (hi - lo) * i as f64 / (SUP_GRID - 1) as f64).collect();
    let vals: Vec<f64> = us.iter().map(|u| ratio(u.exp())).collect();
    let mut best = vals.iter().cloned().fold(0.0, f64::max);
    for &r in breaks.iter().filter(|r| **r <= r_max) {
        best = best.max(ratio(r));
    }
    let mut peaks: Vec<usize> = (0..SUP_GRID)
        .filter(|&i| (i == 0 || vals[i] >= vals[i - 1]) && (i + 1 == SUP_GRID || vals[i] >= vals[i + 1]) && vals[i] > 0.0)
        .collect();
    peaks.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    for &i in peaks.iter().take(SUP_REFINEMENTS) {
        let (mut u0, mut u1) = (us[i.saturating_sub(1)], us[(i + 1).min(SUP_GRID - 1)]);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = u1 - g * (u1 - u0);
        let mut d = u0 + g * (u1 - u0);
        let (mut fc, mut fd) = (ratio(c.exp()), ratio(d.exp()));
        for _ in 0..60 {
            if fc >= fd {
                u1 = d;
                d = c;
                fd = fc;
                c = u1 - g * (u1 - u0);
                fc = ratio(c.exp());
            } else {
                u0 = c;
                c = d;
                fc = fd;
                d = u0 + g * (u1 - u0);
                fd = ratio(d.exp());
            }
        }
        best = best.max(fc).max(fd);
    }
    best
}

/// `M_a μ(x) = sup_r χ_{B_+(0,r)} *_a μ(x) / λ_a(B_+(0,r))`.
pub fn maximal<M: MeasureLike>(mu: &M, x: &PointPlus, a: &MultiIndexA) -> Result<f64> {
    check_point(mu, x, a)?;
    let c = a.ball_constant();
    let dim = a.dim();
    Ok(sup_over_radii(mu, x.coords(), a, f64::INFINITY, |r| c * r.powf(dim)))
}

/// `M_{a,d} μ(x) = sup_r χ_{B_+(0,r)} *_a μ(x) / r^{n+|a|−d}`.
pub fn fractional_maximal<M: MeasureLike>(mu: &M, x: &PointPlus, d: f64, a: &MultiIndexA) -> Result<f64> {
    truncated_maximal(mu, x, d, f64::INFINITY, a)
}

/// The fractional maximal measure with radii restricted to `r ≤ b`.
pub fn truncated_maximal<M: MeasureLike>(mu: &M, x: &PointPlus, d: f64, b: f64, a: &MultiIndexA) -> Result<f64> {
    check_point(mu, x, a)?;
    let s = a.dim() - d;
    if !(s > 0.0) {
        return Err(Error::Precondition(format!("fractional order d = {d} must be below n+|a| = {}", a.dim())));
    }
    if !(b > 0.0) {
        return Err(Error::Precondition(format!("truncation radius b = {b} must be positive")));
    }
    Ok(sup_over_radii(mu, x.coords(), a, b, |r| r.powf(s)))
}

/// The two sides of `I_β χ_{B_+(0,δ)} *_a μ(x) = first + boundary`, with
/// `I_β(z) = |z|^{β−n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszSplit {
    /// `(n−β) ∫_0^δ χ_{B_+(0,r)} *_a μ(x) r^{β−n} dr/r`.
    pub integral: f64,
    /// `χ_{B_+(0,δ)} *_a μ(x) / δ^{n−β}`.
    pub boundary: f64,
    /// The r-integral diverges at 0.
    pub divergent: bool,
}

impl RieszSplit {
    pub fn total(&self) -> f64 {
        if self.divergent {
            f64::INFINITY
        } else {
            self.integral + self.boundary
        }
    }
}

fn riesz_checks<M: MeasureLike>(mu: &M, x: &PointPlus, beta: f64, delta: f64, a: &MultiIndexA) -> Result<()> {
    check_point(mu, x, a)?;
    if !(beta > 0.0) || !(delta > 0.0) {
        return Err(Error::Precondition(format!("need beta > 0 and delta > 0, got beta = {beta}, delta = {delta}")));
    }
    if beta == x.n() as f64 {
        return Err(Error::Precondition("beta = n makes the Riesz kernel constant".into()));
    }
    Ok(())
}

/// The r-integral form of the truncated Riesz potential.
pub fn riesz_potential_split<M: MeasureLike>(mu: &M, x: &PointPlus, beta: f64, delta: f64, a: &MultiIndexA) -> Result<RieszSplit> {
    riesz_checks(mu, x, beta, delta, a)?;
    if mu.is_zero() {
        return Ok(RieszSplit { integral: 0.0, boundary: 0.0, divergent: false });
    }
    let n = x.n() as f64;
    let xs = x.coords();
    let boundary = ball_average(mu, xs, delta, a) * delta.powf(beta - n);
    let breaks: Vec<f64> = sorted_breaks(mu, xs).into_iter().filter(|r| *r < delta).collect();
    let f = |r: f64| ball_average(mu, xs, r, a) * r.powf(beta - n - 1.0);
    // kinks first, then dyadic shells below the smallest one
    let first = breaks.first().copied().unwrap_or(delta);
    let mut pts = breaks.clone();
    pts.push(delta);
    let tol = quad::Tolerance::new(0.0, 1e-11);
    let upper = quad::adaptive(f, first, delta, &pts, tol);
    let lower = quad::dyadic_shells(f, first, ShellDirection::TowardZero, 400, 1e8);
    match lower {
        TailVerdict::Finite(v) => Ok(RieszSplit { integral: (n - beta) * (upper + v), boundary, divergent: false }),
        TailVerdict::Divergent => Ok(RieszSplit { integral: f64::INFINITY, boundary, divergent: true }),
    }
}

/// `I_β χ_{B_+(0,δ)} *_a μ(x)` by translating the truncated kernel directly.
pub fn riesz_truncated_direct<M: MeasureLike>(mu: &M, x: &PointPlus, beta: f64, delta: f64, a: &MultiIndexA) -> Result<f64> {
    riesz_checks(mu, x, beta, delta, a)?;
    if mu.is_zero() {
        return Ok(0.0);
    }
    let k = RadialKernel::riesz(a, beta)?;
    Ok(mu.average(Radial::truncated(&k, delta), x.coords(), a))
}

/// Parameters of the Wolff function `W^μ_{a,ν,p}` and the dyadic sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct WolffParams {
    pub a: MultiIndexA,
    pub nu: f64,
    pub p: f64,
    /// Sequences run over `k = 0..=k_max`.
    pub k_max: usize,
    /// Upper radius of the Wolff integral and of the dyadic scales.
    pub delta: f64,
}

impl WolffParams {
    pub fn new(a: MultiIndexA, nu: f64, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::Precondition(format!("p = {p} must exceed 1")));
        }
        if !(nu > 0.0 && p * nu < a.dim()) {
            return Err(Error::Precondition(format!("need 0 < p nu < n+|a| = {}, got p nu = {}", a.dim(), p * nu)));
        }
        Ok(WolffParams { a, nu, p, k_max: 40, delta: 1.0 })
    }

    pub fn with_depth(mut self, k_max: usize) -> Result<Self> {
        if k_max < 4 {
            return Err(Error::Precondition(format!("dyadic depth {k_max} must be at least 4")));
        }
        self.k_max = k_max;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::Precondition(format!("truncation delta = {delta} must be positive")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn p_dual(&self) -> f64 {
        dual_exponent(self.p)
    }

    fn radius(&self, k: usize) -> f64 {
        self.delta * 0.5f64.powi(k as i32)
    }
}

/// `b_k(x) = r_k^{−(n+|a|−ν)} χ_{B_+(0,r_k)} *_a μ(x)`, `r_k = δ 2^{−k}`.
pub fn dyadic_b<M: MeasureLike>(mu: &M, x: &PointPlus, params: &WolffParams, k: usize) -> Result<f64> {
    check_point(mu, x, &params.a)?;
    Ok(dyadic_at(mu, x.coords(), params, k, params.nu))
}

/// `c_k(x) = r_k^{−(n+|a|−pν)} χ_{B_+(0,r_k)} *_a μ(x)`.
pub fn dyadic_c<M: MeasureLike>(mu: &M, x: &PointPlus, params: &WolffParams, k: usize) -> Result<f64> {
    check_point(mu, x, &params.a)?;
    Ok(dyadic_at(mu, x.coords(), params, k, params.p * params.nu))
}

fn dyadic_at<M: MeasureLike>(mu: &M, x: &[f64], params: &WolffParams, k: usize, order: f64) -> f64 {
    let r = params.radius(k);
    ball_average(mu, x, r, &params.a) * r.powf(order - params.a.dim())
}

/// `(b_0(x), …, b_{k_max}(x))`.
pub fn b_sequence<M: MeasureLike>(mu: &M, x: &[f64], params: &WolffParams) -> Vec<f64> {
    (0..=params.k_max).map(|k| dyadic_at(mu, x, params, k, params.nu)).collect()
}

/// `ℓ^q` norm of a sequence; `q = ∞` gives the maximum.
pub fn lq_norm(seq: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        seq.iter().cloned().fold(0.0, f64::max)
    } else {
        seq.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `W^μ_{a,ν,p}(x) = ∫_0^δ (χ_{B_+(0,r)} *_a μ(x) / r^{n+|a|−pν})^{p′−1} dr/r`;
/// `+∞` when the integral diverges at `r = 0`.
pub fn wolff_function<M: MeasureLike>(mu: &M, x: &PointPlus, params: &WolffParams) -> Result<f64> {
    check_point(mu, x, &params.a)?;
    Ok(wolff_at(mu, x.coords(), params))
}

fn wolff_at<M: MeasureLike>(mu: &M, x: &[f64], params: &WolffParams) -> f64 {
    if mu.is_zero() {
        return 0.0;
    }
    let a = &params.a;
    let s = a.dim() - params.p * params.nu;
    let q = params.p_dual() - 1.0;
    let integrand = |u: f64| {
        let r = u.exp();
        let f = ball_average(mu, x, r, a);
        if f <= 0.0 {
            0.0
        } else {
            (f / r.powf(s)).powf(q)
        }
    };
    let top = params.delta.ln();
    let bottom = top - LOG_R_DECADES * std::f64::consts::LN_10;
    let mut breaks: Vec<f64> = (0..=LOG_R_DECADES as usize).map(|i| bottom + i as f64 * std::f64::consts::LN_10).collect();
    breaks.extend(sorted_breaks(mu, x).into_iter().map(f64::ln).filter(|u| *u > bottom && *u < top));
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    // F has square-root onsets at its breakpoints, so each segment gets the
    // endpoint-robust double-exponential rule
    let rule = DeRule::standard();
    let body: f64 = breaks.windows(2).map(|w| rule.integrate(w[0], w[1], |u, _, _| integrand(u))).sum();
    // below r = 10^{-12} δ the integrand is a power r^e; e ≤ 0 means divergence
    let (f0, f1) = (integrand(bottom), integrand(bottom + std::f64::consts::LN_10));
    if f0 == 0.0 {
        return body;
    }
    let e = (f1 / f0).log10();
    if e <= 1e-3 {
        f64::INFINITY
    } else {
        body + f0 / (e * std::f64::consts::LN_10)
    }
}

/// `∫ W^μ_{a,ν,p} dμ_a`.
pub fn wolff_energy<M: MeasureLike>(mu: &M, params: &WolffParams) -> Result<f64> {
    if let Some(n) = mu.dim() {
        params.a.check_dim(n)?;
    }
    Ok(mu.integrate_weighted(&params.a, |x| wolff_at(mu, x, params)))
}

/// `‖G_{a,ν} *_a μ‖_{p′,a}^{p′}`.
pub fn potential_energy<M: MeasureLike>(mu: &M, params: &WolffParams) -> Result<f64> {
    let k = RadialKernel::bessel(&params.a, params.nu)?;
    potential_energy_with(mu, &k, params.p)
}

/// `‖κ *_a μ‖_{p′,a}^{p′}` on a tensor grid reaching 40 past the support.
pub fn potential_energy_with<M: MeasureLike>(mu: &M, k: &RadialKernel, p: f64) -> Result<f64> {
    let a = k.multi_index();
    if let Some(n) = mu.dim() {
        a.check_dim(n)?;
    }
    if mu.is_zero() {
        return Ok(0.0);
    }
    let grid = EnergyGrid::for_measure(mu, a, 40.0);
    let vals = averages_on_grid(mu, Radial::kernel(k), &grid, a);
    Ok(grid.integrate_power(&vals, dual_exponent(p)))
}

fn dyadic_grid<M: MeasureLike>(mu: &M, params: &WolffParams) -> EnergyGrid {
    let n = mu.dim().unwrap_or(params.a.n());
    let breaks: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let edges = mu.axis_breaks(i);
            let mut b = edges.clone();
            for e in &edges {
                b.push(e - params.delta);
                b.push(e + params.delta);
            }
            b
        })
        .collect();
    EnergyGrid::from_breaks(&breaks, &params.a)
}

/// `‖ ‖{b_k}‖_{ℓ^q} ‖_{p′,a}^{p′}`.
pub fn b_energy<M: MeasureLike>(mu: &M, params: &WolffParams, q: f64) -> Result<f64> {
    if mu.is_zero() {
        return Ok(0.0);
    }
    let grid = dyadic_grid(mu, params);
    let vals: Vec<f64> = grid.nodes().par_iter().map(|x| lq_norm(&b_sequence(mu, x, params), q)).collect();
    Ok(grid.integrate_power(&vals, params.p_dual()))
}

/// `∫ Σ_k c_k^{p′−1} dμ_a`.
pub fn c_energy<M: MeasureLike>(mu: &M, params: &WolffParams) -> Result<f64> {
    if let Some(n) = mu.dim() {
        params.a.check_dim(n)?;
    }
    let q = params.p_dual() - 1.0;
    let order = params.p * params.nu;
    Ok(mu.integrate_weighted(&params.a, |x| {
        (0..=params.k_max).map(|k| dyadic_at(mu, x, params, k, order).powf(q)).sum()
    }))
}
