//! Potentials `ρ *_a μ(x)` of radial profiles against finite measures.
//!
//! Two measure shapes are supported: Dirac sums ([`DiscreteMeasure`]) and
//! cell-smoothed measures ([`BoxMeasure`]), whose mass is spread uniformly in
//! Lebesgue measure over axis-parallel boxes. For a box `Q` the symmetry of
//! the translation gives
//!
//! `∫_Q T^y ρ(x) y^a dy = ∫ ρ(|z|) z^a ∏_i T^{x_i} χ_{[lo_i, hi_i)}(z_i) dz`,
//!
//! and each factor is a closed-form incomplete beta value, so only a
//! low-dimensional integral with known kinks remains.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::quad::{self, DeRule};
use crate::translation::{sigma_constant, translate_ball_indicator, translate_interval_1d};
use crate::weighted::{DiscreteMeasure, MultiIndexA};

/// Radial profile `ρ(r) = g(r) χ_{r < cutoff}`; `g ≡ 1` without a kernel.
#[derive(Debug, Clone, Copy)]
pub struct Radial<'a> {
    kernel: Option<&'a RadialKernel>,
    cutoff: f64,
}

impl<'a> Radial<'a> {
    pub fn kernel(k: &'a RadialKernel) -> Self {
        Radial { kernel: Some(k), cutoff: f64::INFINITY }
    }
    pub fn ball(r: f64) -> Self {
        Radial { kernel: None, cutoff: r }
    }
    pub fn truncated(k: &'a RadialKernel, cutoff: f64) -> Self {
        Radial { kernel: Some(k), cutoff }
    }

    fn value_sq(&self, r2: f64) -> f64 {
        if r2 >= self.cutoff * self.cutoff {
            return 0.0;
        }
        match self.kernel {
            Some(k) => k.g(r2.sqrt()),
            None => 1.0,
        }
    }
}

/// One cell of a [`BoxMeasure`]: mass `mass` spread with constant Lebesgue
/// density over `∏ [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub mass: f64,
}

impl BoxCell {
    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    /// `λ_a(Q)`.
    pub fn weighted_volume(&self, a: &MultiIndexA) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(a.a())
            .map(|((l, h), ai)| (h.powf(ai + 1.0) - l.powf(ai + 1.0)) / (ai + 1.0))
            .product()
    }
}

/// A finite sum of cell-smoothed masses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoxMeasure {
    cells: Vec<BoxCell>,
}

impl BoxMeasure {
    pub fn new(cells: Vec<BoxCell>) -> Result<Self> {
        if let Some(c0) = cells.first() {
            let n = c0.lo.len();
            for c in &cells {
                if c.lo.len() != n || c.hi.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: c.lo.len().max(c.hi.len()) });
                }
                if c.lo.iter().zip(&c.hi).any(|(l, h)| !(*l >= 0.0 && h > l)) {
                    return Err(Error::Domain("box cells need 0 <= lo < hi on every axis".into()));
                }
                if !(c.mass >= 0.0) || !c.mass.is_finite() {
                    return Err(Error::Domain(format!("cell mass {} must be finite and nonnegative", c.mass)));
                }
            }
        }
        Ok(BoxMeasure { cells })
    }

    /// Cubes of side `2 h` centred at the given points (clipped at the boundary).
    pub fn blobs(centers: &[Vec<f64>], masses: &[f64], h: f64) -> Result<Self> {
        if centers.len() != masses.len() {
            return Err(Error::Domain("blob centres and masses differ in length".into()));
        }
        let cells = centers
            .iter()
            .zip(masses)
            .map(|(c, &m)| BoxCell {
                lo: c.iter().map(|v| (v - h).max(0.0)).collect(),
                hi: c.iter().map(|v| v + h).collect(),
                mass: m,
            })
            .collect();
        Self::new(cells)
    }

    pub fn cells(&self) -> &[BoxCell] {
        &self.cells
    }

    pub fn with_masses(&self, masses: &[f64]) -> Self {
        BoxMeasure {
            cells: self.cells.iter().zip(masses).map(|(c, &m)| BoxCell { mass: m, ..c.clone() }).collect(),
        }
    }
}

/// Operations shared by the two measure shapes.
pub trait MeasureLike: Sync {
    fn dim(&self) -> Option<usize>;

    /// `ρ *_a μ(x)`.
    fn average(&self, prof: Radial<'_>, x: &[f64], a: &MultiIndexA) -> f64;

    /// `∫ f dμ_a`.
    fn integrate_weighted<F: Fn(&[f64]) -> f64 + Sync>(&self, a: &MultiIndexA, f: F) -> f64;

    /// Coordinates where potentials of the measure may have kinks, per axis.
    fn axis_breaks(&self, axis: usize) -> Vec<f64>;

    /// Radii at which `r ↦ χ_{B_+(0,r)} *_a μ(x)` may fail to be smooth. The
    /// largest one is the reach: beyond it the average is `μ_a(R^n_+)`.
    fn radial_breaks(&self, x: &[f64]) -> Vec<f64>;

    /// `μ_a(R^n_+)`.
    fn weighted_total(&self, a: &MultiIndexA) -> f64 {
        self.integrate_weighted(a, |_| 1.0)
    }

    fn scaled(&self, c: f64) -> Self
    where
        Self: Sized;

    fn is_zero(&self) -> bool;
}

impl MeasureLike for DiscreteMeasure {
    fn dim(&self) -> Option<usize> {
        self.n()
    }

    fn average(&self, prof: Radial<'_>, x: &[f64], a: &MultiIndexA) -> f64 {
        self.atoms()
            .iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|(y, m)| {
                let w = a.weight(y.coords());
                if w == 0.0 {
                    0.0
                } else {
                    m * w * atom_translate(prof, x, y.coords(), a)
                }
            })
            .sum()
    }

    fn integrate_weighted<F: Fn(&[f64]) -> f64 + Sync>(&self, a: &MultiIndexA, f: F) -> f64 {
        self.atoms()
            .iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|(y, m)| {
                let w = a.weight(y.coords());
                if w == 0.0 {
                    0.0
                } else {
                    m * w * f(y.coords())
                }
            })
            .sum()
    }

    fn radial_breaks(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut out = Vec::new();
        for (y, m) in self.atoms() {
            if *m <= 0.0 {
                continue;
            }
            // θ-extremes: every choice of x_i − y_i or x_i + y_i
            for mask in 0..(1usize << n) {
                let s: f64 = (0..n)
                    .map(|i| {
                        let d = if mask >> i & 1 == 1 { x[i] + y.coords()[i] } else { x[i] - y.coords()[i] };
                        d * d
                    })
                    .sum();
                out.push(s.sqrt());
            }
        }
        out
    }

    fn axis_breaks(&self, axis: usize) -> Vec<f64> {
        self.atoms().iter().map(|(y, _)| y.coords()[axis]).collect()
    }

    fn scaled(&self, c: f64) -> Self {
        DiscreteMeasure::scaled(self, c)
    }

    fn is_zero(&self) -> bool {
        self.is_empty()
    }
}

impl MeasureLike for BoxMeasure {
    fn dim(&self) -> Option<usize> {
        self.cells.first().map(|c| c.lo.len())
    }

    fn average(&self, prof: Radial<'_>, x: &[f64], a: &MultiIndexA) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.mass > 0.0)
            .map(|c| c.mass / c.volume() * box_translate(prof, x, &c.lo, &c.hi, a))
            .sum()
    }

    fn integrate_weighted<F: Fn(&[f64]) -> f64 + Sync>(&self, a: &MultiIndexA, f: F) -> f64 {
        self.cells
            .par_iter()
            .filter(|c| c.mass > 0.0)
            .map(|c| c.mass / c.volume() * integrate_box_weighted(&c.lo, &c.hi, a, 8, &f))
            .sum()
    }

    fn radial_breaks(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for c in self.cells.iter().filter(|c| c.mass > 0.0) {
            let (mut s0, mut s1) = (0.0, 0.0);
            for i in 0..x.len() {
                let (z0, z1) = axis_support(x[i], c.lo[i], c.hi[i]);
                s0 += z0 * z0;
                s1 += z1 * z1;
            }
            out.push(s0.sqrt());
            out.push(s1.sqrt());
        }
        out
    }

    fn axis_breaks(&self, axis: usize) -> Vec<f64> {
        self.cells.iter().flat_map(|c| [c.lo[axis], c.hi[axis]]).collect()
    }

    fn scaled(&self, c: f64) -> Self {
        BoxMeasure { cells: self.cells.iter().map(|cell| BoxCell { mass: cell.mass * c, ..cell.clone() }).collect() }
    }

    fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.mass == 0.0)
    }
}

/// `∫_Q f(x) x^a dx` by tensor Gauss rules (monomial rule on axes starting at 0).
pub fn integrate_box_weighted<F: Fn(&[f64]) -> f64>(lo: &[f64], hi: &[f64], a: &MultiIndexA, order: usize, f: &F) -> f64 {
    box_weighted_nodes(lo, hi, a, order).iter().map(|(x, w)| w * f(x)).sum()
}

/// Nodes and weights of the tensor rule behind [`integrate_box_weighted`].
pub fn box_weighted_nodes(lo: &[f64], hi: &[f64], a: &MultiIndexA, order: usize) -> Vec<(Vec<f64>, f64)> {
    let n = lo.len();
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .map(|k| {
            let ak = a.a()[k];
            if lo[k] == 0.0 {
                quad::monomial_weighted_rule(order, ak, hi[k])
            } else {
                let (xs, ws) = quad::mapped_gl(order, lo[k], hi[k]);
                let ws = xs.iter().zip(&ws).map(|(x, w)| w * x.powf(ak)).collect();
                (xs, ws)
            }
        })
        .collect();
    let total = order.pow(n as u32);
    (0..total)
        .map(|flat| {
            let mut rem = flat;
            let mut w = 1.0;
            let mut x = vec![0.0; n];
            for k in (0..n).rev() {
                let j = rem % order;
                rem /= order;
                x[k] = rules[k].0[j];
                w *= rules[k].1[j];
            }
            (x, w)
        })
        .collect()
}

/// `T^y ρ(x)` for a single point `y`.
pub fn atom_translate(prof: Radial<'_>, x: &[f64], y: &[f64], a: &MultiIndexA) -> f64 {
    if prof.kernel.is_none() {
        return translate_ball_indicator(x, y, a, prof.cutoff);
    }
    atom_rec(prof, x, y, a.alphas(), 0.0, DeRule::standard())
}

fn atom_rec(prof: Radial<'_>, xs: &[f64], ys: &[f64], alphas: &[f64], partial: f64, rule: &DeRule) -> f64 {
    let cap2 = prof.cutoff * prof.cutoff - partial;
    if cap2 <= 0.0 {
        return 0.0;
    }
    let (x, y, al) = (xs[0], ys[0], alphas[0]);
    let last = xs.len() == 1;
    let next = |z2: f64| -> f64 {
        if last {
            prof.value_sq(partial + z2)
        } else {
            atom_rec(prof, &xs[1..], &ys[1..], &alphas[1..], partial + z2, rule)
        }
    };
    if x * y == 0.0 {
        return next((x + y) * (x + y));
    }
    let lo2 = (x - y) * (x - y);
    if cap2 <= lo2 {
        return 0.0;
    }
    let pi = std::f64::consts::PI;
    let th_max = if cap2 >= (x + y) * (x + y) {
        pi
    } else {
        2.0 * ((cap2 - lo2) / (4.0 * x * y)).clamp(0.0, 1.0).sqrt().asin()
    };
    let c = sigma_constant(al);
    rule.integrate(0.0, th_max, |th, da, db| {
        let s = if th_max == pi && db < da { db.sin() } else { da.sin() };
        let z2 = lo2 + 4.0 * x * y * (0.5 * th).sin().powi(2);
        c * s.powf(2.0 * al) * next(z2)
    })
}

/// `∫_Q T^y ρ(x) y^a dy` for the box `Q = ∏ [lo_i, hi_i)`.
pub fn box_translate(prof: Radial<'_>, x: &[f64], lo: &[f64], hi: &[f64], a: &MultiIndexA) -> f64 {
    box_rec(prof, x, lo, hi, a.alphas(), a.a(), 0.0, DeRule::standard())
}

fn axis_support(x: f64, lo: f64, hi: f64) -> (f64, f64) {
    ((x - hi).max(lo - x).max(0.0), x + hi)
}

#[allow(clippy::too_many_arguments)]
fn box_rec(prof: Radial<'_>, xs: &[f64], lo: &[f64], hi: &[f64], alphas: &[f64], avec: &[f64], partial: f64, rule: &DeRule) -> f64 {
    let cap2 = prof.cutoff * prof.cutoff - partial;
    if cap2 <= 0.0 {
        return 0.0;
    }
    let (x, l, h, al, ak) = (xs[0], lo[0], hi[0], alphas[0], avec[0]);
    let (z0, mut z1) = axis_support(x, l, h);
    let cap = cap2.sqrt();
    z1 = z1.min(cap);
    if z1 <= z0 {
        return 0.0;
    }
    let last = xs.len() == 1;
    let mut breaks = vec![z0, z1, (x - l).abs(), (x - h).abs(), x + l];
    if !last && prof.cutoff.is_finite() {
        // where the inner cap crosses an inner kink
        for j in 1..xs.len() {
            let (s0, s1) = axis_support(xs[j], lo[j], hi[j]);
            for b in [s0, s1, (xs[j] - lo[j]).abs(), (xs[j] - hi[j]).abs(), xs[j] + lo[j]] {
                let d = cap2 - b * b;
                if d > 0.0 {
                    breaks.push(d.sqrt());
                }
            }
        }
    }
    breaks.retain(|b| *b >= z0 && *b <= z1);
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup_by(|p, q| (*p - *q).abs() <= 1e-15 * q.abs().max(1e-300));
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        acc += rule.integrate(w[0], w[1], |z, _, _| {
            let f = translate_interval_1d(x, z, al, l, h);
            if f == 0.0 {
                return 0.0;
            }
            let zw = f * z.powf(ak);
            let inner = if last {
                prof.value_sq(partial + z * z)
            } else {
                box_rec(prof, &xs[1..], &lo[1..], &hi[1..], &alphas[1..], &avec[1..], partial + z * z, rule)
            };
            zw * inner
        });
    }
    acc
}

/// Tensor quadrature of `R^n_+` (truncated far out) used for energy integrals
/// `∫ F(x)^q x^a dx`.
#[derive(Debug, Clone)]
pub struct EnergyGrid {
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl EnergyGrid {
    /// Segments between the given per-axis breakpoints, each integrated by the
    /// fixed double-exponential rule.
    pub fn from_breaks(breaks: &[Vec<f64>], a: &MultiIndexA) -> Self {
        let n = breaks.len();
        let rule = DeRule::standard();
        let per_axis: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|k| {
                let mut b = breaks[k].clone();
                b.push(0.0);
                b.retain(|v| v.is_finite() && *v >= 0.0);
                b.sort_by(|p, q| p.partial_cmp(q).unwrap());
                b.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * q.abs().max(1.0));
                let ak = a.a()[k];
                let mut pts = Vec::new();
                for w in b.windows(2) {
                    for (z, wt) in rule.nodes_on(w[0], w[1]) {
                        pts.push((z, wt * z.powf(ak)));
                    }
                }
                pts
            })
            .collect();
        let sizes: Vec<usize> = per_axis.iter().map(|v| v.len()).collect();
        let total: usize = sizes.iter().product();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut x = vec![0.0; n];
            let mut w = 1.0;
            for k in (0..n).rev() {
                let j = rem % sizes[k];
                rem /= sizes[k];
                x[k] = per_axis[k][j].0;
                w *= per_axis[k][j].1;
            }
            if w > 0.0 {
                nodes.push(x);
                weights.push(w);
            }
        }
        EnergyGrid { nodes, weights }
    }

    /// Breakpoints of `mu` plus a far tail reaching `tail` beyond the support.
    pub fn for_measure<M: MeasureLike>(mu: &M, a: &MultiIndexA, tail: f64) -> Self {
        let n = mu.dim().unwrap_or(a.n());
        let breaks: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut b = mu.axis_breaks(k);
                let top = b.iter().cloned().fold(0.0, f64::max);
                b.extend(tail_points(top, tail));
                b
            })
            .collect();
        Self::from_breaks(&breaks, a)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ |F|^q x^a dx` for values of `F` at the nodes.
    pub fn integrate_power(&self, values: &[f64], q: f64) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| w * v.abs().powf(q)).sum()
    }
}

/// Geometric tail breakpoints `top + {0.5, 1, 2, 4, …}` up to `top + tail`.
pub fn tail_points(top: f64, tail: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut d = 0.5;
    while d < tail {
        out.push(top + d);
        d *= 2.0;
    }
    out.push(top + tail);
    out
}

/// `ρ *_a μ` at every node of `grid`, in parallel.
pub fn averages_on_grid<M: MeasureLike>(mu: &M, prof: Radial<'_>, grid: &EnergyGrid, a: &MultiIndexA) -> Vec<f64> {
    grid.nodes().par_iter().map(|x| mu.average(prof, x, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted::PointPlus;
    use approx::assert_relative_eq;

    fn a1() -> MultiIndexA {
        MultiIndexA::uniform(1, 1.0).unwrap()
    }

    #[test]
    fn box_ball_average_of_whole_space_box() {
        // x deep inside a big cell and r small: average ≈ density × λ_a-ball shifted weight
        let a = a1();
        let big = BoxMeasure::new(vec![BoxCell { lo: vec![0.0], hi: vec![10.0], mass: 10.0 }]).unwrap();
        // density 1, so χ_{B_r} *_a μ(x) = ∫ T^x χ_{[0,10)}(z) χ_{z<r} z dz = r²/2 for x + r < 10
        let v = big.average(Radial::ball(0.3), &[4.0], &a);
        assert_relative_eq!(v, 0.045, max_relative = 1e-12);
    }

    #[test]
    fn thin_box_tends_to_atom() {
        let a = MultiIndexA::new(vec![0.3]).unwrap();
        let atom = DiscreteMeasure::from_rows(&[(vec![1.0], 1.0)]).unwrap();
        let h = 1e-5;
        // cell mass chosen so that its μ_a equals the atom's μ_a
        let cell = BoxCell { lo: vec![1.0 - h], hi: vec![1.0 + h], mass: 1.0 };
        let w = cell.weighted_volume(&a) / cell.volume();
        let thin = BoxMeasure::new(vec![BoxCell { mass: 1.0 / w, ..cell }]).unwrap();
        for x in [0.4, 1.7] {
            let va = atom.average(Radial::ball(0.8), &[x], &a);
            let vb = thin.average(Radial::ball(0.8), &[x], &a);
            assert_relative_eq!(va, vb, max_relative = 1e-6);
        }
        let k = RadialKernel::bessel(&a, 0.6).unwrap();
        let va = atom.average(Radial::kernel(&k), &[1.9], &a);
        let vb = thin.average(Radial::kernel(&k), &[1.9], &a);
        assert_relative_eq!(va, vb, max_relative = 1e-6);
    }

    #[test]
    fn atom_kernel_translation_matches_theta_rule() {
        use crate::translation::{translate_theta, ThetaQuadrature};
        let a = MultiIndexA::new(vec![1.0]).unwrap();
        let k = RadialKernel::bessel(&a, 0.5).unwrap();
        let q = ThetaQuadrature::new(&a, 200);
        let (x, y) = (0.5, 2.0);
        let th = translate_theta(|z| k.g(z[0]), &PointPlus::new(vec![y]).unwrap(), &PointPlus::new(vec![x]).unwrap(), &a, &q)
            .unwrap();
        let de = atom_translate(Radial::kernel(&k), &[x], &[y], &a);
        assert_relative_eq!(th, de, max_relative = 1e-10);
    }

    #[test]
    fn box_potential_total_mass() {
        // ∫ (G *_a μ) dλ_a = μ_a(R^n_+) since ∫ G dλ_a = 1
        let a = a1();
        let k = RadialKernel::bessel(&a, 0.4).unwrap();
        let mu = BoxMeasure::blobs(&[vec![1.0], vec![1.6]], &[1.0, 0.5], 0.1).unwrap();
        let grid = EnergyGrid::for_measure(&mu, &a, 40.0);
        let vals = averages_on_grid(&mu, Radial::kernel(&k), &grid, &a);
        let total = grid.integrate_power(&vals, 1.0);
        assert_relative_eq!(total, mu.weighted_total(&a), max_relative = 1e-6);
    }

    #[test]
    fn two_dim_box_average_matches_nested_quadrature() {
        let a = MultiIndexA::uniform(2, 1.0).unwrap();
        let mu = BoxMeasure::new(vec![BoxCell { lo: vec![0.5, 0.5], hi: vec![1.0, 1.5], mass: 1.0 }]).unwrap();
        let x = [0.9, 0.8];
        let r = 0.4;
        let v = mu.average(Radial::ball(r), &x, &a);
        // reference: density × ∫_Q T^y χ_B(x) y^a dy with adaptive outer quadrature
        let tol = quad::Tolerance::new(1e-13, 1e-10);
        let reference = quad::adaptive(
            |y0| {
                // kinks in y1 sit where the circle |z| = r crosses the θ extremes
                let mut br = vec![x[1] - r, x[1] + r];
                for d in [x[0] - y0, x[0] + y0] {
                    let e = r * r - d * d;
                    if e > 0.0 {
                        br.extend([x[1] - e.sqrt(), x[1] + e.sqrt()]);
                    }
                }
                quad::adaptive(|y1| translate_ball_indicator(&x, &[y0, y1], &a, r) * y0 * y1, 0.5, 1.5, &br, tol)
            },
            0.5,
            1.0,
            &[x[0] - r],
            tol,
        ) / 0.5;
        assert_relative_eq!(v, reference, max_relative = 1e-10);
    }

    #[test]
    fn energy_grid_integrates_weight() {
        let a = MultiIndexA::new(vec![0.25]).unwrap();
        let grid = EnergyGrid::from_breaks(&[vec![0.3, 1.0, 2.0]], &a);
        let ones = vec![1.0; grid.len()];
        let w = grid.integrate_power(&ones, 1.0);
        assert_relative_eq!(w, 2f64.powf(2.5) / 2.5, max_relative = 1e-12);
    }
}
