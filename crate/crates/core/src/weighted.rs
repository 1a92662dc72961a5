//! Weighted orthant primitives: the multi-index `a`, points of the closed
//! orthant, finitely supported measures, tensor grid functions and the
//! weighted Lebesgue measure `dλ_a = x^a dx`.

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quad;

/// Multi-index `a = (2α_1 + 1, …, 2α_n + 1)`.
#[derive(Debug, Clone)]
pub struct MultiIndexA {
    alphas: Vec<f64>,
    a: Vec<f64>,
    total: f64,
    ball_const: OnceLock<f64>,
}

impl PartialEq for MultiIndexA {
    fn eq(&self, other: &Self) -> bool {
        self.alphas == other.alphas
    }
}

impl MultiIndexA {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Domain("multi-index needs at least one coordinate".into()));
        }
        for (i, &al) in alphas.iter().enumerate() {
            if !(al > -0.5) || !al.is_finite() {
                return Err(Error::Domain(format!("alpha[{i}] = {al} must exceed -1/2")));
            }
        }
        let a: Vec<f64> = alphas.iter().map(|al| 2.0 * al + 1.0).collect();
        let total = a.iter().sum();
        Ok(MultiIndexA { alphas, a, total, ball_const: OnceLock::new() })
    }

    /// Builds the index from the weights `a_i` instead of the `α_i`.
    pub fn from_a(a: &[f64]) -> Result<Self> {
        Self::new(a.iter().map(|ai| 0.5 * (ai - 1.0)).collect())
    }

    /// Same `a_i` on every one of `n` axes.
    pub fn uniform(n: usize, a: f64) -> Result<Self> {
        Self::from_a(&vec![a; n])
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
    pub fn alpha(&self, i: usize) -> f64 {
        self.alphas[i]
    }
    pub fn a(&self) -> &[f64] {
        &self.a
    }
    /// `|a|`.
    pub fn total(&self) -> f64 {
        self.total
    }
    /// Homogeneous dimension `n + |a|`.
    pub fn dim(&self) -> f64 {
        self.n() as f64 + self.total
    }

    /// `x^a = ∏ x_i^{a_i}`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.a).map(|(xi, ai)| weight_1d(*xi, *ai)).product()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: n });
        }
        Ok(())
    }

    /// `c(n,a)` with `λ_a(B_+(0,r)) = c r^{n+|a|}`.
    pub fn ball_constant(&self) -> f64 {
        *self.ball_const.get_or_init(|| {
            // Hyperspherical coordinates split the orthant sphere integral into
            // one-dimensional angular factors.
            let n = self.n();
            let mut angular = 1.0;
            for k in 0..n.saturating_sub(1) {
                let ck = self.a[k];
                let sk = (n - k - 2) as f64 + self.a[k + 1..].iter().sum::<f64>();
                angular *= quad::tanh_sinh(
                    |phi, _, db| {
                        // db = π/2 − φ, so cos φ = sin(db) without cancellation
                        db.sin().powf(ck) * phi.sin().powf(sk)
                    },
                    0.0,
                    std::f64::consts::FRAC_PI_2,
                    1e-14,
                );
            }
            angular / self.dim()
        })
    }
}

#[inline]
pub(crate) fn weight_1d(x: f64, a: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(a)
    }
}

/// A point of the closed orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPlus {
    coords: Vec<f64>,
}

impl PointPlus {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("point needs at least one coordinate".into()));
        }
        for (i, &c) in coords.iter().enumerate() {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::Domain(format!("coordinate {i} = {c} is not a finite nonnegative number")));
            }
        }
        Ok(PointPlus { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
    pub fn n(&self) -> usize {
        self.coords.len()
    }
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
    pub fn is_interior(&self) -> bool {
        self.coords.iter().all(|&c| c > 0.0)
    }
}

impl From<PointPlus> for Vec<f64> {
    fn from(p: PointPlus) -> Self {
        p.coords
    }
}

/// Finitely supported positive measure on the closed orthant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscreteMeasure {
    atoms: Vec<(PointPlus, f64)>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(PointPlus, f64)>) -> Result<Self> {
        if let Some((p, _)) = atoms.first() {
            let n = p.n();
            for (q, m) in &atoms {
                if q.n() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: q.n() });
                }
                if !(*m >= 0.0) || !m.is_finite() {
                    return Err(Error::Domain(format!("mass {m} must be finite and nonnegative")));
                }
            }
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub fn empty() -> Self {
        DiscreteMeasure { atoms: Vec::new() }
    }

    /// Convenience constructor from raw coordinate rows.
    pub fn from_rows(rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let atoms = rows
            .iter()
            .map(|(c, m)| Ok((PointPlus::new(c.clone())?, *m)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[(PointPlus, f64)] {
        &self.atoms
    }
    pub fn len(&self) -> usize {
        self.atoms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.atoms.iter().all(|(_, m)| *m == 0.0)
    }
    pub fn n(&self) -> Option<usize> {
        self.atoms.first().map(|(p, _)| p.n())
    }
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        DiscreteMeasure { atoms: self.atoms.iter().map(|(p, m)| (p.clone(), m * c)).collect() }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        DiscreteMeasure { atoms }
    }

    /// Reads a CSV with `n` coordinate columns and a `mass` column.
    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
        let headers = rdr.headers()?.clone();
        let mass_col = headers
            .iter()
            .position(|h| h == "mass")
            .ok_or_else(|| Error::Parse("measure CSV needs a `mass` column".into()))?;
        let mut atoms = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut coords = Vec::with_capacity(rec.len() - 1);
            let mut mass = 0.0;
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: field `{}` is not a number", line + 1, &headers[j])))?;
                if j == mass_col {
                    mass = v;
                } else {
                    coords.push(v);
                }
            }
            atoms.push((PointPlus::new(coords)?, mass));
        }
        Self::new(atoms)
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let n = self.n().unwrap_or(1);
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.push("mass".into());
        w.write_record(&header)?;
        for (p, m) in &self.atoms {
            let mut row: Vec<String> = p.coords().iter().map(|c| format!("{c:e}")).collect();
            row.push(format!("{m:e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `μ_a(E) = Σ_{y ∈ E} m_y y^a`.
pub fn weighted_mass<F: Fn(&PointPlus) -> bool>(mu: &DiscreteMeasure, a: &MultiIndexA, e: F) -> f64 {
    mu.atoms().iter().filter(|(p, _)| e(p)).map(|(p, m)| m * a.weight(p.coords())).sum()
}

/// `λ_a(B_+(0,r))`.
pub fn lambda_a_ball(a: &MultiIndexA, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("ball radius {r} must be positive")));
    }
    Ok(a.ball_constant() * r.powf(a.dim()))
}

/// Dual exponent `p' = p/(p-1)`, `+∞` for `p = 1`.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Values on a tensor grid, multilinearly interpolated and zero outside the grid box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("no axes".into()));
        }
        for (k, ax) in axes.iter().enumerate() {
            if ax.len() < 2 {
                return Err(Error::InvalidGrid(format!("axis {k} needs at least two nodes")));
            }
            if ax[0] < 0.0 {
                return Err(Error::InvalidGrid(format!("axis {k} has a negative node")));
            }
            if ax.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidGrid(format!("axis {k} nodes are not strictly increasing")));
            }
        }
        let size: usize = axes.iter().map(|a| a.len()).product();
        if size != values.len() {
            return Err(Error::InvalidGrid(format!("expected {size} values, got {}", values.len())));
        }
        Ok(GridFunction { axes, values })
    }

    /// Samples `f` at the nodes of the tensor grid.
    pub fn from_fn<F: FnMut(&[f64]) -> f64>(axes: Vec<Vec<f64>>, mut f: F) -> Result<Self> {
        let n = axes.len();
        let size: usize = axes.iter().map(|a| a.len()).product();
        let mut values = Vec::with_capacity(size);
        let mut x = vec![0.0; n];
        for flat in 0..size {
            let mut rem = flat;
            for k in (0..n).rev() {
                let len = axes[k].len();
                x[k] = axes[k][rem % len];
                rem /= len;
            }
            values.push(f(&x));
        }
        Self::new(axes, values)
    }

    /// Uniform axis with `cells` cells on `[lo, hi]`.
    pub fn uniform_axis(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
        (0..=cells).map(|i| lo + (hi - lo) * i as f64 / cells as f64).collect()
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }
    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction { axes: self.axes.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        GridFunction { axes: self.axes.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            flat = flat * self.axes[k].len() + i;
        }
        flat
    }

    pub fn value_at(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    /// Multilinear interpolation inside the cell `cell` (lower-corner indices).
    fn eval_in_cell(&self, cell: &[usize], x: &[f64]) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        let mut idx = vec![0usize; n];
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            for k in 0..n {
                let ax = &self.axes[k];
                let (x0, x1) = (ax[cell[k]], ax[cell[k] + 1]);
                let s = ((x[k] - x0) / (x1 - x0)).clamp(0.0, 1.0);
                if corner >> k & 1 == 1 {
                    w *= s;
                    idx[k] = cell[k] + 1;
                } else {
                    w *= 1.0 - s;
                    idx[k] = cell[k];
                }
            }
            if w != 0.0 {
                acc += w * self.value_at(&idx);
            }
        }
        acc
    }

    /// Interpolated value; zero outside the grid box.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.n();
        if x.len() != n {
            return 0.0;
        }
        let mut cell = vec![0usize; n];
        for k in 0..n {
            let ax = &self.axes[k];
            let xk = x[k];
            if xk < ax[0] || xk > ax[ax.len() - 1] {
                return 0.0;
            }
            let j = ax.partition_point(|&v| v <= xk);
            cell[k] = j.saturating_sub(1).min(ax.len() - 2);
        }
        self.eval_in_cell(&cell, x)
    }

    /// Bounding box of the grid.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.axes.iter().map(|a| (a[0], a[a.len() - 1])).collect()
    }

    /// Calls `visit(x, w)` for every node `x` of a tensor quadrature of the grid
    /// box with weights `w` including `x^a`. Cells touching a coordinate
    /// hyperplane use the exact monomial rule on that axis.
    pub fn for_each_weighted_node<F: FnMut(&[f64], f64, f64)>(&self, a: &MultiIndexA, order: usize, mut visit: F) {
        let n = self.n();
        // per axis: list of (cell index, nodes, weights)
        let mut rules: Vec<Vec<(usize, Vec<f64>, Vec<f64>)>> = Vec::with_capacity(n);
        for k in 0..n {
            let ax = &self.axes[k];
            let ak = a.a()[k];
            let mut per = Vec::with_capacity(ax.len() - 1);
            for c in 0..ax.len() - 1 {
                let (x0, x1) = (ax[c], ax[c + 1]);
                if x0 == 0.0 {
                    let (xs, ws) = quad::monomial_weighted_rule(order, ak, x1);
                    per.push((c, xs, ws));
                } else {
                    let (xs, ws) = quad::mapped_gl(order, x0, x1);
                    let ws = xs.iter().zip(&ws).map(|(x, w)| w * x.powf(ak)).collect();
                    per.push((c, xs, ws));
                }
            }
            rules.push(per);
        }
        let cells_per_axis: Vec<usize> = rules.iter().map(|r| r.len()).collect();
        let total_cells: usize = cells_per_axis.iter().product();
        let mut cell = vec![0usize; n];
        let mut x = vec![0.0; n];
        let mut q = vec![0usize; n];
        for flat in 0..total_cells {
            let mut rem = flat;
            for k in (0..n).rev() {
                cell[k] = rem % cells_per_axis[k];
                rem /= cells_per_axis[k];
            }
            let nodes_total = order.pow(n as u32);
            for qi in 0..nodes_total {
                let mut r = qi;
                for k in (0..n).rev() {
                    q[k] = r % order;
                    r /= order;
                }
                let mut w = 1.0;
                for k in 0..n {
                    let (_, xs, ws) = &rules[k][cell[k]];
                    x[k] = xs[q[k]];
                    w *= ws[q[k]];
                }
                let v = self.eval_in_cell(&cell, &x);
                visit(&x, w, v);
            }
        }
    }

    /// Reads an axis CSV (`axis,node` rows) and a value CSV (`value` column, row-major).
    pub fn read_csv<P: AsRef<Path>, Q: AsRef<Path>>(axes_path: P, values_path: Q) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(axes_path)?;
        let mut axes: Vec<Vec<f64>> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("axis file row {}: expected `axis,node`", line + 1)));
            }
            let k: usize = rec[0]
                .parse()
                .map_err(|_| Error::Parse(format!("axis file row {}: field `axis` is not an index", line + 1)))?;
            let v: f64 = rec[1]
                .parse()
                .map_err(|_| Error::Parse(format!("axis file row {}: field `node` is not a number", line + 1)))?;
            if k >= axes.len() {
                axes.resize(k + 1, Vec::new());
            }
            axes[k].push(v);
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(values_path)?;
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let v: f64 = rec
                .get(0)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::Parse(format!("value file row {}: field `value` is not a number", line + 1)))?;
            values.push(v);
        }
        Self::new(axes, values)
    }

    pub fn write_csv<P: AsRef<Path>, Q: AsRef<Path>>(&self, axes_path: P, values_path: Q) -> Result<()> {
        let mut w = csv::Writer::from_path(axes_path)?;
        w.write_record(["axis", "node"])?;
        for (k, ax) in self.axes.iter().enumerate() {
            for v in ax {
                w.write_record([k.to_string(), format!("{v:e}")])?;
            }
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(values_path)?;
        w.write_record(["value"])?;
        for v in &self.values {
            w.write_record([format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `‖f‖_{p,a} = (∫ |f|^p x^a dx)^{1/p}` over the grid box.
pub fn weighted_norm(f: &GridFunction, p: f64, a: &MultiIndexA) -> Result<f64> {
    a.check_dim(f.n())?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p = {p} must be a finite number >= 1")));
    }
    let mut acc = 0.0;
    // 6 nodes per axis integrate the piecewise multilinear |f|^2 exactly
    f.for_each_weighted_node(a, 6, |_, w, v| acc += w * v.abs().powf(p));
    Ok(acc.powf(1.0 / p))
}
