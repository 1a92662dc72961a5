//! Quadrature rules shared by the rest of the crate.
//!
//! * Gauss–Legendre and Gauss–Jacobi node/weight tables (Golub–Welsch for Jacobi).
//! * Adaptive Gauss–Kronrod (7/15) with optional breakpoints.
//! * Tanh–sinh (double exponential) integration for integrable endpoint singularities.
//! * Dyadic-shell tail monitoring used to decide whether an improper integral is finite.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending nodes.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule for the weight `(1 - u)^alpha (1 + u)^beta` on `[-1, 1]`.
///
/// Weights sum to the total mass of the weight function. Requires `alpha, beta > -1`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0 && alpha > -1.0 && beta > -1.0);
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let b2 = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + alpha) * (j + beta) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            let b = b2.sqrt();
            jac[(k, k + 1)] = b;
            jac[(k + 1, k)] = b;
        }
    }
    let mass = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    pairs.into_iter().unzip()
}

/// Composite Gauss–Legendre over the consecutive intervals of `breaks`.
pub fn composite_gl<F: FnMut(f64) -> f64>(breaks: &[f64], order: usize, mut f: F) -> f64 {
    let (x, w) = gauss_legendre(order);
    let mut acc = 0.0;
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(&w) {
            acc += h * wi * f(c + h * xi);
        }
    }
    acc
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Tolerances for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_pieces: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-14, rel: 1e-10, max_pieces: 2000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, ..Default::default() }
    }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` with the given breakpoints
/// (which may be unsorted or lie outside `[a, b]`; those are ignored).
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> f64 {
    adaptive_with_error(&mut f, a, b, breaks, tol).0
}

pub fn adaptive_with_error<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> (f64, f64) {
    if !(b > a) {
        return (0.0, 0.0);
    }
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b && p.is_finite()).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    pts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for seg in pts.windows(2) {
        let (v, e) = kronrod15(f, seg[0], seg[1]);
        total += v;
        total_err += e;
        heap.push(Piece { a: seg[0], b: seg[1], value: v, err: e });
    }
    let mut pieces = heap.len();
    while total_err > tol.abs.max(tol.rel * total.abs()) && pieces < tol.max_pieces {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(f, worst.a, mid);
        let (v2, e2) = kronrod15(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
        pieces += 1;
    }
    // re-sum to shed accumulated cancellation
    let mut v = 0.0;
    let mut e = 0.0;
    for p in heap.iter() {
        v += p.value;
        e += p.err;
    }
    (v, e)
}

/// Tanh–sinh integration over `[a, b]`. `f` receives the abscissa together with
/// its distances to `a` and to `b`, computed without cancellation so that
/// integrands singular at an endpoint can be evaluated accurately.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let len = b - a;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut eval = |t: f64| -> f64 {
        // s = 1/(1+exp(-pi sinh t)); weight ds/dt = pi cosh t s (1-s)
        let u = std::f64::consts::PI * t.sinh();
        let (s, one_minus_s) = if u >= 0.0 {
            let e = (-u).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = u.exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        let da = len * s;
        let db = len * one_minus_s;
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let x = if da < db { a + da } else { b - db };
        let w = 2.0 * half_pi * t.cosh() * s * one_minus_s * len;
        if w == 0.0 {
            return 0.0;
        }
        let v = f(x, da, db);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for level in 0..12 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if level >= 2 && diff <= rel_tol * estimate.abs() {
            break;
        }
    }
    estimate
}

/// Fixed tanh–sinh node set on `[0, 1]`, stored with both endpoint distances.
///
/// Used where an adaptive rule would be too costly (inner loops of potentials);
/// algebraic endpoint singularities are still integrated to near machine accuracy.
#[derive(Debug, Clone)]
pub struct DeRule {
    nodes: Vec<(f64, f64, f64)>,
}

impl DeRule {
    pub fn new(h: f64, t_max: f64) -> Self {
        let mut nodes = Vec::new();
        let m = (t_max / h).floor() as i64;
        for k in -m..=m {
            let t = k as f64 * h;
            let u = std::f64::consts::PI * t.sinh();
            let (s, one_minus_s) = if u >= 0.0 {
                let e = (-u).exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            } else {
                let e = u.exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            };
            let w = h * std::f64::consts::PI * t.cosh() * s * one_minus_s;
            if s > 0.0 && one_minus_s > 0.0 && w > 0.0 {
                nodes.push((s, one_minus_s, w));
            }
        }
        DeRule { nodes }
    }

    /// Shared default: 65 nodes, step 1/8, truncated at |t| = 4.
    pub fn standard() -> &'static DeRule {
        static RULE: std::sync::OnceLock<DeRule> = std::sync::OnceLock::new();
        RULE.get_or_init(|| DeRule::new(0.125, 4.0))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights of the rule mapped to `[a, b]`.
    pub fn nodes_on(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        if !(b > a) {
            return Vec::new();
        }
        let len = b - a;
        self.nodes
            .iter()
            .map(|&(s, sc, w)| {
                let (da, db) = (len * s, len * sc);
                (if da < db { a + da } else { b - db }, w * len)
            })
            .collect()
    }

    /// `∫_a^b f`, with `f(x, x − a, b − x)`.
    pub fn integrate<F: FnMut(f64, f64, f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let len = b - a;
        let mut acc = 0.0;
        for &(s, sc, w) in &self.nodes {
            let (da, db) = (len * s, len * sc);
            let x = if da < db { a + da } else { b - db };
            let v = f(x, da, db);
            if v.is_finite() {
                acc += w * v;
            }
        }
        acc * len
    }
}

/// Outcome of an improper-integral finiteness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailVerdict {
    /// Finite value (including the geometric tail extrapolation).
    Finite(f64),
    /// The dyadic-shell contributions do not decay.
    Divergent,
}

impl TailVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, TailVerdict::Finite(_))
    }
    pub fn value(&self) -> f64 {
        match self {
            TailVerdict::Finite(v) => *v,
            TailVerdict::Divergent => f64::INFINITY,
        }
    }
}

/// Which end of a half-line the dyadic shells march towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellDirection {
    /// Shells `[r0 2^{-k-1}, r0 2^{-k}]` approaching zero.
    TowardZero,
    /// Shells `[r0 2^k, r0 2^{k+1}]` approaching infinity.
    TowardInfinity,
}

/// Sums `f` over dyadic shells starting at `r0` and decides finiteness by
/// Cauchy-criterion monitoring: the partial sums must stop growing (trailing
/// shell ratio below one) and never exceed `growth` times the first shells' mass.
pub fn dyadic_shells<F: FnMut(f64) -> f64>(
    mut f: F,
    r0: f64,
    direction: ShellDirection,
    max_shells: usize,
    growth: f64,
) -> TailVerdict {
    let tol = Tolerance::new(0.0, 1e-10);
    let mut terms = Vec::with_capacity(max_shells);
    let mut total = 0.0;
    let mut reference = 0.0;
    for k in 0..max_shells {
        let (lo, hi) = match direction {
            ShellDirection::TowardZero => (r0 * 0.5f64.powi(k as i32 + 1), r0 * 0.5f64.powi(k as i32)),
            ShellDirection::TowardInfinity => (r0 * 2f64.powi(k as i32), r0 * 2f64.powi(k as i32 + 1)),
        };
        let t = adaptive(&mut f, lo, hi, &[], tol);
        if !t.is_finite() {
            return TailVerdict::Divergent;
        }
        terms.push(t);
        total += t;
        if k == 3 {
            reference = total;
        }
        if k > 3 && reference > 0.0 && total > growth * reference {
            return TailVerdict::Divergent;
        }
        if k >= 8 {
            let last = terms[k];
            if last == 0.0 || last <= 1e-16 * total {
                return TailVerdict::Finite(total);
            }
            let ratio = last / terms[k - 1];
            let ratio2 = terms[k - 1] / terms[k - 2];
            if ratio < 0.999 && ratio2 < 0.999 && last < 1e-13 * total {
                let tail = last * ratio / (1.0 - ratio);
                return TailVerdict::Finite(total + tail);
            }
        }
    }
    // Out of shells: decide by the trailing ratio.
    let n = terms.len();
    if n < 3 {
        return TailVerdict::Finite(total);
    }
    let last = terms[n - 1];
    if last == 0.0 {
        return TailVerdict::Finite(total);
    }
    let ratio = last / terms[n - 2];
    if ratio < 0.999 && terms[n - 2] / terms[n - 3] < 0.999 {
        TailVerdict::Finite(total + last * ratio / (1.0 - ratio))
    } else {
        TailVerdict::Divergent
    }
}

/// Gauss–Legendre nodes/weights mapped to the interval `[a, b]`.
pub fn mapped_gl(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (x.iter().map(|xi| c + h * xi).collect(), w.iter().map(|wi| h * wi).collect())
}

/// Nodes/weights integrating `g(x) x^power` over `[0, b]` exactly for polynomial `g` of degree < 2n.
pub fn monomial_weighted_rule(n: usize, power: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (u, w) = gauss_jacobi(n, 0.0, power);
    let scale = (0.5 * b).powf(power + 1.0);
    (u.iter().map(|ui| 0.5 * b * (1.0 + ui)).collect(), w.iter().map(|wi| wi * scale).collect())
}
