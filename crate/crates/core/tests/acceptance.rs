//! End-to-end acceptance suite. Every check prints one line of the form
//! `[PASS] 07 capacity sandwich: ...` before asserting.

use std::io::Write;
use std::time::Instant;

use besselcap::capacity::{
    b_lipschitz_constant, capacity_covering_upper, capacity_dual_lower, capacity_image_comparison, capacity_primal_upper,
    capacity_wolff, dual_energy_grid, CompactSetSample, PrimalGrid,
};
use besselcap::fractal::{classify_capacity_series, construct_prescribed, CantorSpec};
use besselcap::hausdorff::{frostman_measure, hausdorff_content, DyadicSetRep, GaugeFunction, Verdict};
use besselcap::kernels::{bessel_k, RadialKernel};
use besselcap::laplace_bessel::{residual_study, StencilGrid};
use besselcap::maximal_wolff::{potential_energy, riesz_potential_split, riesz_truncated_direct, wolff_energy, WolffParams};
use besselcap::potential::BoxMeasure;
use besselcap::quad::mapped_gl;
use besselcap::translation::{indicator_cdf_1d, translate_interval_1d, translate_kernel, translate_theta, ThetaQuadrature};
use besselcap::{DiscreteMeasure, MultiIndexA, PointPlus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    // written to the raw handle so the line shows up without --nocapture
    let line = format!("[{}] {id:02} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn pt(c: &[f64]) -> PointPlus {
    PointPlus::new(c.to_vec()).unwrap()
}

fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// `∫_lo^hi f(x) x^a dx` by composite Gauss–Legendre on unit-ish panels.
fn weighted_integral<F: Fn(f64) -> f64>(f: F, a: f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let w = (hi - lo) / panels as f64;
    (0..panels)
        .map(|i| {
            let (x, wt) = mapped_gl(12, lo + i as f64 * w, lo + (i + 1) as f64 * w);
            x.iter().zip(&wt).map(|(&x, &wt)| wt * f(x) * x.powf(a)).sum::<f64>()
        })
        .sum()
}

#[test]
fn c01_translation_of_one() {
    const TOL: f64 = 1e-8;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for alpha in [-0.4, 0.0, 0.5, 1.0, 3.0] {
        let a = MultiIndexA::new(vec![alpha]).unwrap();
        let q = ThetaQuadrature::for_index(&a);
        for i in 0..100 {
            let (x, t) = (rng.gen_range(0.01..5.0), rng.gen_range(0.01..5.0));
            let v = translate_theta(|_| 1.0, &pt(&[t]), &pt(&[x]), &a, &q).unwrap();
            worst = worst.max((v - 1.0).abs());
            // the kernel form integrates K(x,t,z) z^a dz = 1 independently of the θ rule
            if i % 10 == 0 {
                let k = translate_kernel(|_| 1.0, &pt(&[t]), &pt(&[x]), &a).unwrap();
                worst = worst.max((k - 1.0).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(1, "translation identity", worst < TOL && secs < 5.0, &format!("max |T^t 1 - 1| = {worst:.2e} (tol {TOL:e}), {secs:.2} s (limit 5 s)"));
}

#[test]
fn c02_theta_and_kernel_forms_agree() {
    const TOL: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = if case < 25 { 1 } else { 2 };
        let alphas: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.3..1.5)).collect();
        let a = MultiIndexA::new(alphas).unwrap();
        let c: f64 = rng.gen_range(0.2..1.5);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let f = |z: &[f64]| {
            let r2: f64 = z.iter().map(|v| v * v).sum();
            (-c * r2).exp() * (1.5 + z.iter().zip(&b).map(|(zi, bi)| bi * zi).sum::<f64>().sin())
        };
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
        let q = ThetaQuadrature::new(&a, 96);
        let th = translate_theta(f, &pt(&t), &pt(&x), &a, &q).unwrap();
        let kf = translate_kernel(f, &pt(&t), &pt(&x), &a).unwrap();
        worst = worst.max(rel_err(kf, th));
    }
    report(2, "two-form agreement", worst < TOL, &format!("max relative difference {worst:.2e} over 50 functions (tol {TOL:e})"));
}

#[test]
fn c03_arccos_closed_form() {
    const TOL: f64 = 1e-10;
    // P(z < 1) with z² = 2 − 2cos θ and θ uniform on [0, π]: θ < arccos(1/2) = π/3
    let oracle = (0.5f64).acos() / std::f64::consts::PI;
    let v = translate_interval_1d(1.0, 1.0, 0.0, 0.0, 1.0);
    let cdf = indicator_cdf_1d(1.0, 1.0, 0.0, 1.0);
    let err = (v - 1.0 / 3.0).abs().max((cdf - oracle).abs());
    report(3, "1-D closed form", err < TOL, &format!("T^1 chi_[0,1)(1) = {v:.15} vs 1/3, error {err:.2e} (tol {TOL:e})"));
}

#[test]
fn c04_young_inequality() {
    const SLACK: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut violations = 0;
    let mut tightest: f64 = 0.0;
    // x-nodes for the norms of f *_a g
    let (x_lo, x_hi, x_panels) = (0.0, 12.0, 24);
    let xs: Vec<(f64, f64)> = (0..x_panels)
        .flat_map(|i| {
            let w = (x_hi - x_lo) / x_panels as f64;
            let (x, wt) = mapped_gl(10, x_lo + i as f64 * w, x_lo + (i + 1) as f64 * w);
            x.into_iter().zip(wt)
        })
        .collect();
    for pair in 0..100 {
        let a_val = [1.0, 2.0][pair % 2];
        let a = MultiIndexA::from_a(&[a_val]).unwrap();
        let q = ThetaQuadrature::new(&a, 128);
        // even in z, so that T^x g stays smooth across the diagonal x = t where
        // the θ-integrand touches z = 0
        let bump = |rng: &mut ChaCha8Rng| -> Vec<(f64, i32, f64)> {
            (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(0..=2), rng.gen_range(0.5..1.0))).collect()
        };
        let (fp, gp) = (bump(&mut rng), bump(&mut rng));
        let eval = |ps: &[(f64, i32, f64)], x: f64| ps.iter().map(|(c, k, w)| c * (x * x).powi(*k) * (-(x / w).powi(2)).exp()).sum::<f64>();
        let f = |z: &[f64]| eval(&fp, z[0]);
        let g = |z: &[f64]| eval(&gp, z[0]);
        let norm = |ps: &[(f64, i32, f64)], p: f64| weighted_integral(|x| eval(ps, x).powf(p), a_val, 0.0, 8.0, 32).powf(1.0 / p);
        let conv: Vec<f64> = xs
            .iter()
            .map(|&(x, _)| besselcap::translation::convolve_on_box(f, g, &pt(&[x]), &a, &[(0.0, 7.0)], 14, &q).unwrap())
            .collect();
        let conv_norm = |r: f64| -> f64 {
            if r.is_infinite() {
                conv.iter().cloned().fold(0.0, f64::max)
            } else {
                xs.iter().zip(&conv).map(|(&(x, w), v)| w * v.abs().powf(r) * x.powf(a_val)).sum::<f64>().powf(1.0 / r)
            }
        };
        for (p, qq, r) in [(1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (2.0, 2.0, f64::INFINITY)] {
            let lhs = conv_norm(r);
            let rhs = norm(&fp, p) * norm(&gp, qq);
            tightest = tightest.max(lhs / rhs);
            if lhs > rhs * (1.0 + SLACK) {
                violations += 1;
            }
        }
    }
    report(
        4,
        "Young's inequality",
        violations == 0,
        &format!("{violations} violations in 300 checks (slack {SLACK:e}), max lhs/rhs = {tightest:.12}"),
    );
}

#[test]
fn c05_riesz_split_identity() {
    const TOL: f64 = 1e-4;
    let a = MultiIndexA::from_a(&[1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let atoms: Vec<(Vec<f64>, f64)> = (0..rng.gen_range(1..=4)).map(|_| (vec![rng.gen_range(0.5..2.0)], rng.gen_range(0.1..1.0))).collect();
        let mu = DiscreteMeasure::from_rows(&atoms).unwrap();
        let x = pt(&[rng.gen_range(0.5..2.0)]);
        for beta in [0.3, 0.7] {
            let split = riesz_potential_split(&mu, &x, beta, 1.0, &a).unwrap();
            let direct = riesz_truncated_direct(&mu, &x, beta, 1.0, &a).unwrap();
            worst = worst.max(rel_err(split.total(), direct));
        }
    }
    report(5, "Riesz split identity", worst < TOL, &format!("max relative difference {worst:.2e} over 40 evaluations (tol {TOL:e})"));
}

#[test]
fn c06_wolff_energy_equivalence() {
    const C_MAX: f64 = 100.0;
    let a = MultiIndexA::from_a(&[1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m in 0..25 {
        let nu = if m % 2 == 0 { 0.3 } else { 0.4 };
        let params = WolffParams::new(a.clone(), nu, 2.0).unwrap();
        let k = 1 + m % 5;
        let centers: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.gen_range(0.6..2.5)]).collect();
        let masses: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
        let mu = BoxMeasure::blobs(&centers, &masses, 0.05).unwrap();
        let ratio = potential_energy(&mu, &params).unwrap() / wolff_energy(&mu, &params).unwrap();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let c = hi.max(1.0 / lo);
    report(
        6,
        "Wolff energy equivalence",
        c <= C_MAX && lo > 0.0,
        &format!("energy ratios in [{lo:.4}, {hi:.4}] over 25 measures, C = {c:.3} (limit {C_MAX})"),
    );
}

#[test]
fn c07_capacity_sandwich() {
    let start = Instant::now();
    let a = MultiIndexA::from_a(&[1.0]).unwrap();
    let k = RadialKernel::bessel(&a, 0.4).unwrap();
    let mut gaps = Vec::new();
    let mut ordered = true;
    let mut rows = Vec::new();
    for level in 3..=5 {
        let set = CompactSetSample::from_box(vec![1.0], vec![2.0], level).unwrap();
        let d = capacity_dual_lower(&set, &k, 2.0, None).unwrap().lower;
        let p = capacity_primal_upper(&set, &k, 2.0, &PrimalGrid::around(&set, level + 1, 6.0)).unwrap().upper;
        ordered &= d > 0.0 && d <= p;
        gaps.push(p - d);
        rows.push(format!("L{level}: {d:.4} <= {p:.4}"));
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
    let secs = start.elapsed().as_secs_f64();
    report(
        7,
        "capacity sandwich",
        ordered && shrinking && secs < 60.0,
        &format!("{}; gaps {:.4?}; {secs:.1} s (limit 60 s)", rows.join(", "), gaps),
    );
}

#[test]
fn c08_monotone_and_subadditive() {
    const SLACK: f64 = 1e-6;
    let a = MultiIndexA::from_a(&[1.0]).unwrap();
    let k = RadialKernel::bessel(&a, 0.4).unwrap();
    let params = WolffParams::new(a.clone(), 0.4, 2.0).unwrap();
    let bx = |lo: f64, hi: f64, level: u32| CompactSetSample::from_box(vec![lo], vec![hi], level).unwrap();
    // (A, B): A ⊂ B is checked for monotonicity, and A, B against A ∪ B
    let cases = [
        (bx(1.0, 1.25, 3), bx(1.0, 1.5, 3)),
        (bx(1.0, 1.5, 2), bx(1.0, 2.0, 2)),
        (bx(1.25, 1.5, 3), bx(1.0, 2.0, 3)),
        (bx(0.5, 1.0, 2), bx(0.5, 1.5, 2)),
        (bx(2.0, 2.5, 2), bx(1.5, 3.0, 2)),
        (bx(1.0, 1.5, 2), bx(1.5, 2.0, 2)),
        (bx(0.5, 1.0, 2), bx(2.0, 2.5, 2)),
        (bx(1.0, 1.25, 3), bx(1.75, 2.0, 3)),
        (bx(1.0, 2.0, 2), bx(1.5, 2.5, 2)),
        (bx(0.25, 0.5, 3), bx(3.0, 3.25, 3)),
    ];
    let mut violations = Vec::new();
    let mut checks = 0;
    // The covering bound estimates C^{1/p} through a sum of (B(r) r^{n-pν})^{1-p'},
    // a concave 1-homogeneous function of B. B adds up over well separated sets,
    // so the bound is superadditive there; it is checked for monotonicity only and
    // its subadditivity gap is logged.
    let mut covering_gap = 0.0f64;
    for (i, (s, t)) in cases.iter().enumerate() {
        let u = s.union(t).unwrap();
        let grid = dual_energy_grid(&u, &a, 40.0);
        let pg = PrimalGrid::around(&u, 3, 6.0);
        let estimators: [(&str, bool, Box<dyn Fn(&CompactSetSample) -> f64>); 4] = [
            ("dual", true, Box::new(|e| capacity_dual_lower(e, &k, 2.0, Some(&grid)).unwrap().lower)),
            ("primal", true, Box::new(|e| capacity_primal_upper(e, &k, 2.0, &pg).unwrap().upper)),
            ("wolff", true, Box::new(|e| capacity_wolff(e, &params).unwrap().lower)),
            ("covering", false, Box::new(|e| capacity_covering_upper(e, &params).unwrap().value)),
        ];
        for (name, subadditive, est) in &estimators {
            let (cs, ct, cu) = (est(s), est(t), est(&u));
            let mut check = |ok: bool, what: &str| {
                checks += 1;
                if !ok {
                    violations.push(format!("case {i} {name}: {what} ({cs:.6}, {ct:.6}, {cu:.6})"));
                }
            };
            check(cs <= cu * (1.0 + SLACK) && ct <= cu * (1.0 + SLACK), "monotone");
            if *subadditive {
                check(cu <= (cs + ct) * (1.0 + SLACK), "subadditive");
            } else {
                covering_gap = covering_gap.max(cu / (cs + ct) - 1.0);
            }
        }
    }
    report(
        8,
        "monotone and subadditive",
        violations.is_empty(),
        &format!(
            "{} violations in {checks} checks (slack {SLACK:e}) {:?}; covering bound max relative excess over subadditivity {covering_gap:.2e} (not asserted)",
            violations.len(),
            violations
        ),
    );
}

#[test]
fn c09_cantor_classification() {
    let (n, p, nu) = (1usize, 2.0, 0.25);
    let a = MultiIndexA::from_a(&[1.0]).unwrap();
    let pd = p / (p - 1.0);
    let mut details = Vec::new();
    let mut ok = true;
    for (lambda, expect) in [(0.5f64, Verdict::Positive), (0.25, Verdict::Zero)] {
        // closed form: terms ((λ^k)^{n−pν} 2^{nk})^{1−p′} form a geometric series
        let ratio = (lambda.powf(n as f64 - p * nu) * 2f64.powi(n as i32)).powf(1.0 - pd);
        let oracle = if ratio < 1.0 - 1e-12 { Verdict::Positive } else { Verdict::Zero };
        let spec = CantorSpec::geometric(n, 1.0, 1.0, lambda).unwrap();
        let c = classify_capacity_series(&spec, &a, nu, p).unwrap();
        ok &= c.verdict == expect && oracle == expect;
        let sample = spec.compact_sample(8).unwrap();
        let cross = if expect == Verdict::Positive {
            let d = capacity_dual_lower(&sample, &RadialKernel::bessel(&a, nu).unwrap(), p, None).unwrap().lower;
            ok &= d > 1e-8;
            format!("dual lower {d:.4e} > 1e-8")
        } else {
            let b = capacity_covering_upper(&sample, &WolffParams::new(a.clone(), nu, p).unwrap()).unwrap();
            ok &= b.divergent && b.value == 0.0;
            format!("covering bound {} (divergent {})", b.value, b.divergent)
        };
        details.push(format!("lambda {lambda}: {:?} (oracle ratio {ratio:.4}), depth 8 {cross}", c.verdict));
    }
    report(9, "Cantor classification", ok, &details.join("; "));
}

#[test]
fn c10_prescribed_construction() {
    const TOL: f64 = 1e-9;
    let h = GaugeFunction::power(0.5).unwrap();
    let a = MultiIndexA::from_a(&[1.0]).unwrap();
    let built = construct_prescribed(&h, &a, 10, false).unwrap();
    let lengths = built.spec.lengths(10).unwrap();
    // rebuild the level starts and the corner sums from the lengths alone
    let mut starts = vec![0.0f64];
    let (mut worst, mut separated, mut doubling) = (0.0f64, true, true);
    for k in 1..=10 {
        let (prev, l) = (lengths[k - 1], lengths[k]);
        starts = starts.iter().flat_map(|&s| [s, s + prev - l]).collect();
        let h_l = 1.0 / starts.iter().map(|s| s + l).sum::<f64>();
        worst = worst.max((h.eval(l) - h_l).abs());
        separated &= 2.0 * l < prev;
        doubling &= h.eval(prev) <= 2.0 * h.eval(l);
    }
    report(
        10,
        "prescribed construction",
        worst < TOL && separated && doubling && lengths.len() == 11,
        &format!("max |h - h_L| = {worst:.2e} (tol {TOL:e}), 2l_(k+1) < l_k: {separated}, doubling: {doubling}"),
    );
}

#[test]
fn c11_frostman_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut random_cubes = Vec::new();
    for i in 0..32u64 {
        for j in 0..32u64 {
            if rng.gen_bool(0.3) {
                random_cubes.push(vec![i, j]);
            }
        }
    }
    // cubes whose centres have base-4 digits 0 or 3 in the first `depth` places
    let cantor_like = |lo: f64, hi: f64, depth: u32| -> bool {
        (0..depth).all(|d| {
            let s = 4f64.powi(d as i32 + 1);
            let m = ((lo + hi) * 0.5 * s).floor() as u64 % 4;
            m == 0 || m == 3
        })
    };
    let sets: Vec<(&str, DyadicSetRep, f64)> = vec![
        ("unit interval L3", DyadicSetRep::from_predicate(1, 3, 8, |_, _| true), 0.7),
        ("quarter Cantor L4", DyadicSetRep::from_predicate(1, 4, 16, |lo, hi| cantor_like(lo[0], hi[0], 2)), 0.5),
        ("Cantor dust L4", DyadicSetRep::from_predicate(2, 4, 16, |lo, hi| cantor_like(lo[0], hi[0], 2) && cantor_like(lo[1], hi[1], 2)), 1.0),
        ("L-shape L3", DyadicSetRep::from_predicate(2, 3, 8, |lo, _| lo[0] < 0.25 || lo[1] < 0.25), 1.5),
        ("random L5", DyadicSetRep::new(2, 5, random_cubes).unwrap(), 1.8),
    ];
    let mut worst_ball = 0.0f64;
    let mut ok = true;
    let mut rows = Vec::new();
    for (name, e, s) in &sets {
        let n = e.n;
        let a = MultiIndexA::uniform(n, 1.0).unwrap();
        let h = GaugeFunction::power(*s).unwrap();
        let mu = frostman_measure(e, &h, e.level).unwrap();
        let bound = 3f64.powi(n as i32);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let r = 0.5f64.powi(rng.gen_range(0..=e.level) as i32);
            let m: f64 = mu
                .atoms()
                .iter()
                .filter(|(y, _)| y.coords().iter().zip(&x).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt() <= r)
                .map(|(_, w)| w)
                .sum();
            worst_ball = worst_ball.max(m / (bound * h.eval(r)));
        }
        let mu_a: f64 = mu.atoms().iter().map(|(x, w)| w * a.weight(x.coords())).sum();
        let content = hausdorff_content(e, &h, &a, None).unwrap();
        ok &= mu_a <= content * (1.0 + 1e-12) && mu_a > 0.0;
        rows.push(format!("{name}: mu_a {mu_a:.4} <= content {content:.4}"));
    }
    ok &= worst_ball <= 1.0 + 1e-12;
    report(11, "Frostman measures", ok, &format!("max mu(B)/(3^n h(r)) = {worst_ball:.4} over 5000 balls; {}", rows.join(", ")));
}

#[test]
fn c12_b_lipschitz() {
    // bound on C(2E)/C(E) for n = 1, a = 1, ν = 0.4, p = 2 and L = 2, taken as L^{n+|a|+1}
    const RATIO_BOUND: f64 = 8.0;
    let samples: Vec<PointPlus> = [[0.5, 1.0], [1.0, 0.25], [2.0, 2.0], [0.1, 3.0]].iter().map(|c| pt(c)).collect();
    let id = b_lipschitz_constant(|x| x.to_vec(), &samples, 33).unwrap();
    let two = b_lipschitz_constant(|x| x.iter().map(|v| 2.0 * v).collect(), &samples, 33).unwrap();
    let a = MultiIndexA::from_a(&[1.0]).unwrap();
    let k = RadialKernel::bessel(&a, 0.4).unwrap();
    let bx = |lo: f64, hi: f64, level: u32| CompactSetSample::from_box(vec![lo], vec![hi], level).unwrap();
    let sets = [bx(1.0, 1.25, 2), bx(1.0, 1.5, 2), bx(0.5, 1.0, 2), bx(1.0, 2.0, 2), bx(0.5, 0.75, 2).union(&bx(1.25, 1.5, 2)).unwrap()];
    let mut ratios = Vec::new();
    for s in &sets {
        let c = capacity_image_comparison(|x| x.iter().map(|v| 2.0 * v).collect(), s, &k, 2.0).unwrap();
        ratios.push(c.ratio);
    }
    let in_bounds = ratios.iter().all(|r| *r > 0.0 && *r <= RATIO_BOUND);
    report(
        12,
        "B-Lipschitz",
        id == 1.0 && (two - 2.0).abs() <= 2e-12 && in_bounds,
        &format!("identity L = {id}, scaling L = {two:.15}, C(2E)/C(E) = {:.4?} (bound {RATIO_BOUND})", ratios),
    );
}

#[test]
fn c13_laplace_bessel_order() {
    let mut orders = Vec::new();
    for (a, lo, hi, cells, r_in, r_out) in [
        (vec![1.0, 1.0], 0.4, 1.6, 6, 0.8, 1.6),
        (vec![1.0], 0.5, 2.0, 6, 0.0, 3.0),
        (vec![0.5, 1.5], 0.4, 1.6, 6, 0.8, 1.6),
    ] {
        let a = MultiIndexA::from_a(&a).unwrap();
        let n = a.n();
        let grid = StencilGrid::new(vec![lo; n], vec![hi; n], vec![cells; n]).unwrap();
        let study = residual_study(&a, &grid, r_in, r_out, 4).unwrap();
        orders.extend(study.orders);
    }
    let ok = orders.iter().all(|o| (1.8..=2.2).contains(o));
    report(13, "Laplace-Bessel convergence", ok, &format!("observed orders {:.3?} (range [1.8, 2.2])", orders));
}

#[test]
fn c14_half_integer_bessel() {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let x = 0.1 + (50.0 - 0.1) * i as f64 / 99.0;
        let oracle = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        worst = worst.max(rel_err(bessel_k(0.5, x).unwrap(), oracle));
    }
    report(14, "half-integer Bessel", worst < TOL, &format!("max relative error {worst:.2e} on [0.1, 50] (tol {TOL:e})"));
}
