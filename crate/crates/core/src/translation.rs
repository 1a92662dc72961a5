//! Bessel translation `T^t` and the generalized convolution `*_a`.
//!
//! The θ-form integrates `f(√(x² + t² − 2xt cos θ))` against the probability
//! measure `dσ = c_α sin^{2α}θ dθ`. Under `u = cos θ` the weight becomes
//! `(1 − u²)^{α − 1/2}`, so a Gauss–Jacobi rule is exact for polynomials in `u`.

use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quad;
use crate::weighted::{GridFunction, MultiIndexA, PointPlus};

pub const DEFAULT_THETA_NODES: usize = 64;

/// Per-axis nodes `u = cos θ` and probability weights for `dσ_i`.
#[derive(Debug, Clone)]
pub struct ThetaQuadrature {
    axes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl ThetaQuadrature {
    pub fn new(a: &MultiIndexA, nodes: usize) -> Self {
        let axes = a
            .alphas()
            .iter()
            .map(|&al| {
                let (u, w) = quad::gauss_jacobi(nodes, al - 0.5, al - 0.5);
                let s: f64 = w.iter().sum();
                (u, w.into_iter().map(|wi| wi / s).collect())
            })
            .collect();
        ThetaQuadrature { axes }
    }

    pub fn for_index(a: &MultiIndexA) -> Self {
        Self::new(a, DEFAULT_THETA_NODES)
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }
    pub fn nodes(&self, axis: usize) -> &[f64] {
        &self.axes[axis].0
    }
    pub fn weights(&self, axis: usize) -> &[f64] {
        &self.axes[axis].1
    }
}

/// Normalizing constant `Γ(α+1) / (√π Γ(α+1/2))` of `dσ`.
pub fn sigma_constant(alpha: f64) -> f64 {
    (ln_gamma(alpha + 1.0) - ln_gamma(alpha + 0.5)).exp() / std::f64::consts::PI.sqrt()
}

#[inline]
fn shifted(x: f64, t: f64, u: f64) -> f64 {
    // x² + t² − 2xtu = (x − t)² + 2xt(1 − u), no cancellation near u = 1
    ((x - t) * (x - t) + 2.0 * x * t * (1.0 - u)).max(0.0).sqrt()
}

/// θ-form translation `T^t f(x)` by tensor Gauss–Jacobi quadrature.
pub fn translate_theta<F: Fn(&[f64]) -> f64>(
    f: F,
    t: &PointPlus,
    x: &PointPlus,
    a: &MultiIndexA,
    q: &ThetaQuadrature,
) -> Result<f64> {
    let n = a.n();
    a.check_dim(x.n())?;
    a.check_dim(t.n())?;
    if q.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.n() });
    }
    let (xs, ts) = (x.coords(), t.coords());
    let sizes: Vec<usize> = (0..n).map(|k| q.nodes(k).len()).collect();
    let total: usize = sizes.iter().product();
    let mut z = vec![0.0; n];
    let mut acc = 0.0;
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        for k in (0..n).rev() {
            let j = rem % sizes[k];
            rem /= sizes[k];
            z[k] = shifted(xs[k], ts[k], q.nodes(k)[j]);
            w *= q.weights(k)[j];
        }
        acc += w * f(&z);
    }
    Ok(acc)
}

/// Closed-form kernel `K(x,t,z)` of the translation for one axis.
pub fn kernel_k(x: f64, t: f64, z: f64, alpha: f64) -> Result<f64> {
    if !(alpha > -0.5) {
        return Err(Error::Domain(format!("alpha = {alpha} must exceed -1/2")));
    }
    let lo = (x - t).abs();
    let hi = x + t;
    if !(z > lo && z < hi) {
        return Ok(0.0);
    }
    Ok(kernel_k_split(x, t, z - lo, hi - z, alpha))
}

/// Kernel value given distances `da = z − |x−t|`, `db = x + t − z`.
fn kernel_k_split(x: f64, t: f64, da: f64, db: f64, alpha: f64) -> f64 {
    let lo = (x - t).abs();
    let hi = x + t;
    let z = if da < db { lo + da } else { hi - db };
    let delta = db * (hi + z) * da * (z + lo);
    let log_c = ln_gamma(alpha + 1.0) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(alpha + 0.5)
        - (2.0 * alpha - 1.0) * std::f64::consts::LN_2;
    (log_c + (alpha - 0.5) * delta.ln() - 2.0 * alpha * (x * t * z).ln()).exp()
}

/// Kernel-form translation `∫ ∏ K(x_i,t_i,z_i) f(z) z^a dz`.
pub fn translate_kernel<F: Fn(&[f64]) -> f64>(f: F, t: &PointPlus, x: &PointPlus, a: &MultiIndexA) -> Result<f64> {
    let n = a.n();
    a.check_dim(x.n())?;
    a.check_dim(t.n())?;
    for k in 0..n {
        if x.coords()[k] * t.coords()[k] == 0.0 {
            return Err(Error::DegenerateKernel { axis: k });
        }
    }
    Ok(kernel_nested(&f, x.coords(), t.coords(), a, 0, &vec![0.0; n]))
}

fn kernel_nested<F: Fn(&[f64]) -> f64>(f: &F, xs: &[f64], ts: &[f64], a: &MultiIndexA, k: usize, z: &[f64]) -> f64 {
    let n = xs.len();
    if k == n {
        return f(z);
    }
    let (x, t, al) = (xs[k], ts[k], a.alpha(k));
    let lo = (x - t).abs();
    let hi = x + t;
    let ak = a.a()[k];
    let tol = if n == 1 { 1e-13 } else { 1e-11 };
    let mut buf = z.to_vec();
    quad::tanh_sinh(
        |zk, da, db| {
            buf[k] = zk;
            let w = kernel_k_split(x, t, da, db, al) * zk.powf(ak);
            w * kernel_nested(f, xs, ts, a, k + 1, &buf)
        },
        lo,
        hi,
        tol,
    )
}

/// `P(z < c)` for `z = √(x² + t² − 2xt cos θ)`, θ ~ dσ_α: the 1-D translation
/// of `χ_{[0,c)}` evaluated at `x` with shift `t`.
pub fn indicator_cdf_1d(x: f64, t: f64, alpha: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    if x * t == 0.0 {
        return if x + t < c { 1.0 } else { 0.0 };
    }
    let lo = (x - t).abs();
    if c <= lo {
        return 0.0;
    }
    if c >= x + t {
        return 1.0;
    }
    // (1 − w)/2 with w = (x² + t² − c²)/(2xt)
    let s = ((c - lo) * (c + lo) / (4.0 * x * t)).clamp(0.0, 1.0);
    if alpha == 0.0 {
        std::f64::consts::FRAC_2_PI * s.sqrt().asin()
    } else if alpha == 0.5 {
        s
    } else {
        let b = alpha + 0.5;
        beta_reg(b, b, s)
    }
}

/// `T^t χ_{[c0,c1)}(x)` in one dimension.
pub fn translate_interval_1d(x: f64, t: f64, alpha: f64, c0: f64, c1: f64) -> f64 {
    if c1 <= c0 {
        return 0.0;
    }
    (indicator_cdf_1d(x, t, alpha, c1) - indicator_cdf_1d(x, t, alpha, c0)).max(0.0)
}

/// `T^t χ_{[0,r)^n}(x)`, a product of 1-D factors.
pub fn translate_cube_indicator(x: &[f64], t: &[f64], a: &MultiIndexA, r: f64) -> f64 {
    (0..a.n()).map(|k| indicator_cdf_1d(x[k], t[k], a.alpha(k), r)).product()
}

/// `T^t χ_{box}(x)` for the box `∏ [lo_k, hi_k)`.
pub fn translate_box_indicator(x: &[f64], t: &[f64], a: &MultiIndexA, lo: &[f64], hi: &[f64]) -> f64 {
    (0..a.n()).map(|k| translate_interval_1d(x[k], t[k], a.alpha(k), lo[k], hi[k])).product()
}

/// `T^t χ_{B_+(0,r)}(x)`: probability that `Σ z_k² < r²`.
///
/// All axes but the last are integrated in θ between the breakpoints where the
/// remaining axes switch between "always inside" and "never inside"; the last
/// axis is resolved in closed form.
pub fn translate_ball_indicator(x: &[f64], t: &[f64], a: &MultiIndexA, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    ball_prob(x, t, a.alphas(), r * r)
}

fn ball_prob(xs: &[f64], ts: &[f64], alphas: &[f64], r2: f64) -> f64 {
    let n = xs.len();
    if r2 <= 0.0 {
        return 0.0;
    }
    if n == 1 {
        return indicator_cdf_1d(xs[0], ts[0], alphas[0], r2.sqrt());
    }
    let (x, t, al) = (xs[0], ts[0], alphas[0]);
    let (rx, rt, ra) = (&xs[1..], &ts[1..], &alphas[1..]);
    let min_rest: f64 = rx.iter().zip(rt).map(|(x, t)| (x - t) * (x - t)).sum();
    let max_rest: f64 = rx.iter().zip(rt).map(|(x, t)| (x + t) * (x + t)).sum();
    if x * t == 0.0 {
        let z2 = (x + t) * (x + t);
        return ball_prob(rx, rt, ra, r2 - z2);
    }
    let lo2 = (x - t) * (x - t);
    let hi2 = (x + t) * (x + t);
    if r2 - min_rest <= lo2 {
        return 0.0;
    }
    // mass where every remaining axis is certainly inside
    let full = if r2 - max_rest > 0.0 { indicator_cdf_1d(x, t, al, (r2 - max_rest).sqrt()) } else { 0.0 };
    if r2 - max_rest >= hi2 {
        return 1.0;
    }
    let theta_of = |z2: f64| -> f64 {
        let s = ((z2 - lo2) / (4.0 * x * t)).clamp(0.0, 1.0);
        2.0 * s.sqrt().asin()
    };
    let th_a = theta_of(r2 - max_rest);
    let th_b = theta_of(r2 - min_rest);
    // internal kinks: every subset sum of remaining extremes
    let m = rx.len();
    let mut breaks = vec![th_a, th_b];
    for mask in 0..(1usize << m) {
        let s: f64 = (0..m)
            .map(|j| if mask >> j & 1 == 1 { (rx[j] + rt[j]).powi(2) } else { (rx[j] - rt[j]).powi(2) })
            .sum();
        let th = theta_of(r2 - s);
        if th > th_a && th < th_b {
            breaks.push(th);
        }
    }
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup();
    let c = sigma_constant(al);
    let mut mid = 0.0;
    for w in breaks.windows(2) {
        let (w0, w1) = (w[0], w[1]);
        mid += quad::tanh_sinh(
            |th, da, db| {
                let z2 = lo2 + 4.0 * x * t * (0.5 * th).sin().powi(2);
                c * sin_near_ends(w0, w1, th, da, db).powf(2.0 * al) * ball_prob(rx, rt, ra, r2 - z2)
            },
            w[0],
            w[1],
            1e-12,
        );
    }
    (full + mid).clamp(0.0, 1.0)
}

/// `sin θ` keeping relative accuracy when θ sits next to 0 or π.
fn sin_near_ends(lo: f64, hi: f64, th: f64, da: f64, db: f64) -> f64 {
    if lo == 0.0 && da < db {
        da.sin()
    } else if hi == std::f64::consts::PI && db < da {
        db.sin()
    } else {
        th.sin()
    }
}

/// Ball and cube translation values with the product envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorBounds {
    /// `T^t χ_{B_+(0,r)}(x)`.
    pub value: f64,
    /// `T^t χ_{[0,r)^n}(x)`.
    pub cube_value: f64,
    /// `∏ min{1, (r/x_i)^{a_i}}`; the upper and lower bounds are multiples of it.
    pub envelope: f64,
    /// `t ∈ closure(B_+(x,r))`, where the upper bound applies.
    pub t_in_ball: bool,
    /// `t ∈ T_+(x, r/2)`, where the cube lower bound applies.
    pub t_in_half_cube: bool,
}

impl IndicatorBounds {
    /// `value / envelope`, bounded above on the ball region.
    pub fn upper_ratio(&self) -> f64 {
        self.value / self.envelope
    }
    /// `cube_value / envelope`, bounded below on the half-cube region.
    pub fn lower_ratio(&self) -> f64 {
        self.cube_value / self.envelope
    }
}

pub fn indicator_translate_bounds(x: &PointPlus, t: &PointPlus, r: f64, a: &MultiIndexA) -> Result<IndicatorBounds> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    a.check_dim(x.n())?;
    a.check_dim(t.n())?;
    let (xs, ts) = (x.coords(), t.coords());
    let envelope = xs
        .iter()
        .zip(a.a())
        .map(|(&xi, &ai)| if xi <= r { 1.0 } else { (r / xi).powf(ai) })
        .product();
    let dist2: f64 = xs.iter().zip(ts).map(|(x, t)| (x - t) * (x - t)).sum();
    Ok(IndicatorBounds {
        value: translate_ball_indicator(xs, ts, a, r),
        cube_value: translate_cube_indicator(xs, ts, a, r),
        envelope,
        t_in_ball: dist2 <= r * r,
        t_in_half_cube: xs.iter().zip(ts).all(|(x, t)| (x - t).abs() <= 0.5 * r),
    })
}

/// `(f *_a g)(x) = ∫ f(t) T^x g(t) t^a dt` over the grid of `f`.
///
/// Uses the symmetry of the convolution so that only the smooth callable `g`
/// is translated.
pub fn convolve<G: Fn(&[f64]) -> f64>(f: &GridFunction, g: G, x: &PointPlus, a: &MultiIndexA) -> Result<f64> {
    a.check_dim(f.n())?;
    a.check_dim(x.n())?;
    let q = ThetaQuadrature::for_index(a);
    let mut acc = 0.0;
    let mut err = None;
    f.for_each_weighted_node(a, 4, |t, w, v| {
        if v == 0.0 || err.is_some() {
            return;
        }
        let tp = PointPlus::new(t.to_vec()).expect("grid nodes are nonnegative");
        match translate_theta(&g, &tp, x, a, &q) {
            Ok(tg) => acc += w * v * tg,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

/// `(f *_a g)(x)` for callables, integrating `f(t) T^x g(t) t^a` over the box
/// `bounds` with `cells` Gauss cells per axis of `order` nodes each.
pub fn convolve_on_box<F: Fn(&[f64]) -> f64, G: Fn(&[f64]) -> f64>(
    f: F,
    g: G,
    x: &PointPlus,
    a: &MultiIndexA,
    bounds: &[(f64, f64)],
    cells: usize,
    q: &ThetaQuadrature,
) -> Result<f64> {
    a.check_dim(x.n())?;
    a.check_dim(bounds.len())?;
    let axes: Vec<Vec<f64>> = bounds.iter().map(|&(lo, hi)| GridFunction::uniform_axis(lo, hi, cells)).collect();
    let shape = GridFunction::from_fn(axes, |_| 1.0)?;
    let mut acc = 0.0;
    let mut err = None;
    shape.for_each_weighted_node(a, 8, |t, w, _| {
        if err.is_some() {
            return;
        }
        let ft = f(t);
        if ft == 0.0 {
            return;
        }
        let tp = PointPlus::new(t.to_vec()).expect("box nodes are nonnegative");
        match translate_theta(&g, &tp, x, a, q) {
            Ok(tg) => acc += w * ft * tg,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}
