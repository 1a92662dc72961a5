//! The Laplace–Bessel operator `Δ_a = Σ_i (∂_i² + (a_i/x_i) ∂_i)` as a
//! central-difference stencil, and its fundamental solution.

use serde::Serialize;

use crate::{Error, GridFunction, MultiIndexA, Result};

/// Uniform tensor grid on a box inside the open orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilGrid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    cells: Vec<usize>,
}

impl StencilGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != cells.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len().min(cells.len()) });
        }
        for i in 0..lo.len() {
            if !(lo[i] > 0.0) {
                return Err(Error::Margin(format!("axis {i} starts at {} ≤ 0", lo[i])));
            }
            if !(hi[i] > lo[i]) || cells[i] < 2 {
                return Err(Error::InvalidGrid(format!("axis {i}: [{}, {}] with {} cells", lo[i], hi[i], cells[i])));
            }
        }
        Ok(StencilGrid { lo, hi, cells })
    }

    pub fn n(&self) -> usize {
        self.lo.len()
    }

    pub fn spacing(&self) -> Vec<f64> {
        (0..self.n()).map(|i| (self.hi[i] - self.lo[i]) / self.cells[i] as f64).collect()
    }

    pub fn axes(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| GridFunction::uniform_axis(self.lo[i], self.hi[i], self.cells[i])).collect()
    }

    /// `f` at every node, including the boundary (ghost) layer.
    pub fn sample<F: FnMut(&[f64]) -> f64>(&self, f: F) -> Result<GridFunction> {
        GridFunction::from_fn(self.axes(), f)
    }

    /// The same box with every axis refined `factor` times.
    pub fn refined(&self, factor: usize) -> Self {
        StencilGrid { lo: self.lo.clone(), hi: self.hi.clone(), cells: self.cells.iter().map(|c| c * factor).collect() }
    }
}

/// `Δ_a u` at the interior nodes of `u`'s grid by second-order central
/// differences. The outermost layer of nodes only feeds the stencil.
pub fn apply_laplace_bessel(u: &GridFunction, a: &MultiIndexA) -> Result<GridFunction> {
    let n = u.n();
    a.check_dim(n)?;
    let axes = u.axes();
    let mut h = Vec::with_capacity(n);
    for (i, ax) in axes.iter().enumerate() {
        if ax.len() < 3 {
            return Err(Error::InvalidGrid(format!("axis {i} needs at least three nodes")));
        }
        if !(ax[0] > 0.0) {
            return Err(Error::Margin(format!("axis {i} touches the hyperplane x_{i} = 0")));
        }
        let hi = (ax[ax.len() - 1] - ax[0]) / (ax.len() - 1) as f64;
        if ax.windows(2).any(|w| ((w[1] - w[0]) / hi - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidGrid(format!("axis {i} is not uniform")));
        }
        h.push(hi);
    }
    let inner_axes: Vec<Vec<f64>> = axes.iter().map(|ax| ax[1..ax.len() - 1].to_vec()).collect();
    let dims: Vec<usize> = inner_axes.iter().map(|ax| ax.len()).collect();
    let size: usize = dims.iter().product();
    let mut out = Vec::with_capacity(size);
    let mut idx = vec![0usize; n];
    for flat in 0..size {
        let mut rem = flat;
        for k in (0..n).rev() {
            idx[k] = rem % dims[k] + 1;
            rem /= dims[k];
        }
        let c = u.value_at(&idx);
        let mut acc = 0.0;
        for i in 0..n {
            let mut j = idx.clone();
            j[i] += 1;
            let up = u.value_at(&j);
            j[i] -= 2;
            let down = u.value_at(&j);
            let x = axes[i][idx[i]];
            acc += (up - 2.0 * c + down) / (h[i] * h[i]) + a.a()[i] / x * (up - down) / (2.0 * h[i]);
        }
        out.push(acc);
    }
    GridFunction::new(inner_axes, out)
}

/// `E(x) = ln|x|` when `n + |a| = 2`, otherwise `|x|^{2−n−|a|}` (unit constant).
pub fn fundamental_solution(a: &MultiIndexA, x: &[f64]) -> Result<f64> {
    a.check_dim(x.len())?;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::SingularOrigin);
    }
    let d = a.dim();
    Ok(if (d - 2.0).abs() < 1e-12 { r.ln() } else { r.powf(2.0 - d) })
}

/// Grid refinement study of `Δ_a E` on the nodes of the coarsest grid lying
/// in the annulus `r_in ≤ |x| ≤ r_out`.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualStudy {
    pub spacing: Vec<f64>,
    pub max_residual: Vec<f64>,
    /// `log2(e_j / e_{j+1})` between consecutive refinements.
    pub orders: Vec<f64>,
}

pub fn residual_study(a: &MultiIndexA, base: &StencilGrid, r_in: f64, r_out: f64, levels: usize) -> Result<ResidualStudy> {
    a.check_dim(base.n())?;
    if !(r_in >= 0.0 && r_out > r_in) {
        return Err(Error::Domain(format!("annulus [{r_in}, {r_out}] is empty")));
    }
    let mut spacing = Vec::with_capacity(levels);
    let mut max_residual = Vec::with_capacity(levels);
    for j in 0..levels {
        let factor = 1usize << j;
        let grid = base.refined(factor);
        let u = grid.sample(|x| fundamental_solution(a, x).unwrap_or(f64::NAN))?;
        let lu = apply_laplace_bessel(&u, a)?;
        // interior node m (0-based) of the inner grid is full-grid node m + 1
        let inner = lu.axes();
        let n = inner.len();
        let dims: Vec<usize> = inner.iter().map(|ax| ax.len()).collect();
        let mut worst = 0.0f64;
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        for (flat, v) in lu.values().iter().enumerate() {
            let mut rem = flat;
            for k in (0..n).rev() {
                idx[k] = rem % dims[k];
                rem /= dims[k];
                x[k] = inner[k][idx[k]];
            }
            if idx.iter().any(|&m| (m + 1) % factor != 0) {
                continue;
            }
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r >= r_in && r <= r_out {
                worst = worst.max(v.abs());
            }
        }
        spacing.push(grid.spacing()[0]);
        max_residual.push(worst);
    }
    let orders = max_residual.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ResidualStudy { spacing, max_residual, orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_annihilated() {
        let a = MultiIndexA::from_a(&[1.0, 2.5]).unwrap();
        let g = StencilGrid::new(vec![0.2, 0.3], vec![1.0, 2.0], vec![8, 9]).unwrap();
        let lu = apply_laplace_bessel(&g.sample(|_| 3.0).unwrap(), &a).unwrap();
        assert!(lu.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn log_is_harmonic_for_a_one() {
        let a = MultiIndexA::from_a(&[1.0]).unwrap();
        let base = StencilGrid::new(vec![0.5], vec![2.0], vec![12]).unwrap();
        let study = residual_study(&a, &base, 0.0, 10.0, 3).unwrap();
        assert!(study.max_residual[2] < study.max_residual[0] / 10.0);
        for o in &study.orders {
            assert!((o - 2.0).abs() < 0.2, "order {o}");
        }
    }

    #[test]
    fn squared_norm_has_constant_image() {
        for a in [MultiIndexA::from_a(&[1.0]).unwrap(), MultiIndexA::from_a(&[1.0, 0.4]).unwrap(), MultiIndexA::from_a(&[2.0, 3.0, 0.5]).unwrap()] {
            let n = a.n();
            let g = StencilGrid::new(vec![0.3; n], vec![1.7; n], vec![7; n]).unwrap();
            let u = g.sample(|x| x.iter().map(|v| v * v).sum()).unwrap();
            let lu = apply_laplace_bessel(&u, &a).unwrap();
            let expect = 2.0 * a.dim();
            assert!(lu.values().iter().all(|v| (v - expect).abs() < 1e-8));
        }
    }

    #[test]
    fn operator_is_linear() {
        let a = MultiIndexA::from_a(&[1.3, 0.7]).unwrap();
        let g = StencilGrid::new(vec![0.4, 0.6], vec![1.2, 1.9], vec![6, 5]).unwrap();
        let u = g.sample(|x| (x[0] * x[1]).sin()).unwrap();
        let v = g.sample(|x| x[0].exp() - x[1]).unwrap();
        let w = g.sample(|x| 2.0 * (x[0] * x[1]).sin() - 3.0 * (x[0].exp() - x[1])).unwrap();
        let (lu, lv, lw) = (apply_laplace_bessel(&u, &a).unwrap(), apply_laplace_bessel(&v, &a).unwrap(), apply_laplace_bessel(&w, &a).unwrap());
        for i in 0..lw.values().len() {
            let combo = 2.0 * lu.values()[i] - 3.0 * lv.values()[i];
            assert!((lw.values()[i] - combo).abs() <= 1e-9 * (1.0 + combo.abs()));
        }
    }

    #[test]
    fn fundamental_solution_branches() {
        let a1 = MultiIndexA::from_a(&[1.0]).unwrap();
        assert!((fundamental_solution(&a1, &[2.0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        let a2 = MultiIndexA::from_a(&[1.0, 1.0]).unwrap();
        assert!((fundamental_solution(&a2, &[0.6, 0.8]).unwrap() - 1.0).abs() < 1e-15);
        assert!((fundamental_solution(&a2, &[2.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(fundamental_solution(&a2, &[0.0, 0.0]), Err(Error::SingularOrigin));
    }

    #[test]
    fn fundamental_solution_converges_in_2d() {
        let a = MultiIndexA::from_a(&[1.0, 1.0]).unwrap();
        let base = StencilGrid::new(vec![0.4, 0.4], vec![1.6, 1.6], vec![6, 6]).unwrap();
        let study = residual_study(&a, &base, 0.8, 1.6, 3).unwrap();
        for o in &study.orders {
            assert!((1.8..=2.2).contains(o), "order {o}, residuals {:?}", study.max_residual);
        }
    }

    #[test]
    fn margin_violation() {
        assert!(matches!(StencilGrid::new(vec![0.0], vec![1.0], vec![4]), Err(Error::Margin(_))));
        let u = GridFunction::new(vec![vec![0.0, 0.5, 1.0]], vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(apply_laplace_bessel(&u, &MultiIndexA::from_a(&[1.0]).unwrap()), Err(Error::Margin(_))));
    }
}
