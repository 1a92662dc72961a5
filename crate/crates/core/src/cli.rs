//! Command-line front end: parses descriptors, dispatches to the library and
//! writes CSV (with a `#` provenance line) or JSON.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::capacity::{
    b_lipschitz_constant, capacity_covering_upper, capacity_dual_lower, capacity_primal_upper, capacity_wolff, CapacityEstimate, Cell,
    CompactSetSample, Diagnostics, EstimateMethod, PrimalGrid,
};
use crate::fractal::{classify_capacity_series, construct_prescribed, CantorSpec};
use crate::hausdorff::{frostman_measure, hausdorff_content, DyadicSetRep, GaugeFunction};
use crate::kernels::{capacity_nontrivial, KernelSpec, RadialKernel};
use crate::laplace_bessel::{residual_study, StencilGrid};
use crate::maximal_wolff::{fractional_maximal, maximal, potential_energy, wolff_energy, WolffParams};
use crate::potential::BoxMeasure;
use crate::translation::convolve;
use crate::{DiscreteMeasure, Error, GridFunction, MultiIndexA, PointPlus, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "besselcap", version, about = "Bessel-convolution potentials, Wolff energies, B-p capacities and Cantor sets")]
pub struct Cli {
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "BESSELCAP_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel evaluation and norms.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// `(f *_a κ)(x)` for a grid function `f`.
    Convolve(ConvolveArgs),
    /// Hardy–Littlewood or fractional maximal function of a measure.
    Maximal(MaximalArgs),
    /// Wolff energy and potential energy of a measure.
    WolffEnergy(WolffEnergyArgs),
    /// Capacity estimates of a compact set.
    Capacity(CapacityArgs),
    /// Cantor-set classification and construction.
    #[command(subcommand)]
    Cantor(CantorCmd),
    /// Weighted Hausdorff content and Frostman measures of dyadic sets.
    #[command(subcommand)]
    Hausdorff(HausdorffCmd),
    /// B-Lipschitz constant of a map on sample points.
    Blip(BlipArgs),
    /// Laplace–Bessel residual study of the fundamental solution.
    #[command(subcommand)]
    Lb(LbCmd),
    /// Runs the argument list stored in a JSON job file `{"args": [...]}`.
    Job { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelType {
    Bessel,
    Riesz,
}

#[derive(Debug, Args)]
pub struct KernelFlags {
    #[arg(long = "type", value_enum, default_value = "bessel")]
    pub kind: KernelType,
    /// Order ν of the Bessel kernel.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Order β of the Riesz kernel.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Radial table `r,g` for a custom kernel (overrides --type).
    #[arg(long)]
    pub table: Option<PathBuf>,
}

impl KernelFlags {
    fn spec(&self) -> Result<KernelSpec> {
        if let Some(t) = &self.table {
            return Ok(KernelSpec::Custom { table: t.clone() });
        }
        match self.kind {
            KernelType::Bessel => Ok(KernelSpec::Bessel { nu: self.nu.ok_or_else(|| Error::Precondition("--nu is required".into()))? }),
            KernelType::Riesz => Ok(KernelSpec::Riesz { beta: self.beta.ok_or_else(|| Error::Precondition("--beta is required".into()))? }),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// Values at the points of a CSV (`x1,…,xn` columns).
    Eval {
        #[command(flatten)]
        kernel: KernelFlags,
        #[arg(long)]
        a: String,
        #[arg(long)]
        points: PathBuf,
    },
    /// `∫ κ^q dλ_a`, split at `|x| = 1`.
    Norm {
        #[command(flatten)]
        kernel: KernelFlags,
        #[arg(long)]
        a: String,
        #[arg(long)]
        q: f64,
    },
}

#[derive(Debug, Args)]
pub struct ConvolveArgs {
    #[command(flatten)]
    pub kernel: KernelFlags,
    #[arg(long)]
    pub a: String,
    /// Axis file of the grid function (`axis,node` rows).
    #[arg(long)]
    pub f_axes: PathBuf,
    /// Value file of the grid function (`value` column, row-major).
    #[arg(long)]
    pub f_values: PathBuf,
    #[arg(long)]
    pub points: PathBuf,
}

#[derive(Debug, Args)]
pub struct MaximalArgs {
    #[arg(long)]
    pub a: String,
    /// Measure CSV (`x1,…,xn,mass`).
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub points: PathBuf,
    /// Fractional order `d` of `sup r^d (average)`; plain maximal when omitted.
    #[arg(long)]
    pub d: Option<f64>,
}

#[derive(Debug, Args)]
pub struct WolffEnergyArgs {
    #[arg(long)]
    pub a: String,
    /// Values or ranges `start:stop:count`.
    #[arg(long)]
    pub nu: String,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub measure: PathBuf,
    /// Spread every atom over a cube of this side.
    #[arg(long)]
    pub blob: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum CapacityMethod {
    Primal,
    Dual,
    Wolff,
    Covering,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(value_enum)]
    pub method: CapacityMethod,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub nu: String,
    #[arg(long)]
    pub p: String,
    /// Set descriptor JSON.
    #[arg(long, conflicts_with = "bounds")]
    pub set: Option<PathBuf>,
    /// Box `lo1,…,lon:hi1,…,hin`.
    #[arg(long = "box")]
    pub bounds: Option<String>,
    /// Cells per axis of a box, as `log2`.
    #[arg(long, default_value_t = 3)]
    pub level: u32,
    /// Margin of the primal grid around the set.
    #[arg(long, default_value_t = 6.0)]
    pub margin: f64,
}

#[derive(Debug, Args)]
pub struct CantorSource {
    /// Geometric ratio λ.
    #[arg(long, conflicts_with = "spec")]
    pub geometric: Option<f64>,
    /// CantorSpec JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub q0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l0: f64,
}

impl CantorSource {
    fn build(&self) -> Result<CantorSpec> {
        match (&self.spec, self.geometric) {
            (Some(path), _) => CantorSpec::from_json(&std::fs::read_to_string(path)?),
            (None, Some(lam)) => CantorSpec::geometric(self.n, self.q0, self.l0, lam),
            (None, None) => Err(Error::Precondition("one of --geometric or --spec is required".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum CantorCmd {
    /// Capacity positivity from the Cantor series.
    Classify {
        #[command(flatten)]
        source: CantorSource,
        /// Weights `a_i`; a single value is repeated on every axis.
        #[arg(long)]
        a: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        p: String,
    },
    /// Lengths `l_k` with `h(l_k) = h_L(l_k)` for `h(r) = r^c`; writes JSON.
    Construct {
        /// Exponent `c` of the gauge `h(r) = r^c`.
        #[arg(long)]
        gauge_power: f64,
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        /// Reject gauges with `h(r) r^{|a|−n}` increasing.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum HausdorffCmd {
    /// Dyadic upper bound for `Λ^ρ_{h,a}(E)`.
    Content {
        /// DyadicSetRep JSON `{"n", "level", "cubes"}`.
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        gauge_power: f64,
        #[arg(long)]
        a: String,
        /// Radius cap ρ (∞ when omitted).
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Bottom-up Frostman measure as a measure CSV.
    Frostman {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        gauge_power: f64,
        /// Ancestor levels to constrain (all when omitted).
        #[arg(long)]
        levels: Option<u32>,
        /// Random dyadic balls to test against `3^n h(r)`; reported on stderr.
        #[arg(long, default_value_t = 0)]
        check_balls: usize,
    },
}

#[derive(Debug, Args)]
pub struct BlipArgs {
    /// `identity` or `scale:c`.
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value_t = 9)]
    pub theta_points: usize,
}

#[derive(Debug, Subcommand)]
pub enum LbCmd {
    /// Max residual of `Δ_a E` on an annulus under grid refinement.
    Residual {
        #[arg(long)]
        a: String,
        /// Box `lo1,…,lon:hi1,…,hin` inside the open orthant.
        #[arg(long = "box")]
        bounds: String,
        #[arg(long, default_value_t = 8)]
        cells: usize,
        #[arg(long, default_value_t = 0.0)]
        r_in: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        r_out: f64,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

/// Set descriptor JSON, e.g. `{"box": {"lo": [1], "hi": [2], "level": 3}}`.
#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SetSpec {
    Box { lo: Vec<f64>, hi: Vec<f64>, level: u32 },
    Points(Vec<Vec<f64>>),
    Cells(Vec<CellSpec>),
    Dyadic(DyadicSetRep),
    Cantor { spec: CantorSpec, depth: usize },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SetSpec {
    pub fn build(self) -> Result<CompactSetSample> {
        match self {
            SetSpec::Box { lo, hi, level } => CompactSetSample::from_box(lo, hi, level),
            SetSpec::Points(pts) => CompactSetSample::from_points(pts.into_iter().map(PointPlus::new).collect::<Result<_>>()?),
            SetSpec::Cells(cells) => CompactSetSample::from_cells(cells.into_iter().map(|c| Cell::new(c.lo, c.hi)).collect::<Result<_>>()?),
            SetSpec::Dyadic(d) => d.to_compact(),
            SetSpec::Cantor { spec, depth } => {
                spec.validate()?;
                spec.compact_sample(depth)
            }
        }
    }
}

/// Parses `a_1,…,a_n`.
pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("{what}: `{t}` is not a number"))))
        .collect()
}

/// Parses `v1,v2,…` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_range(s: &str, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => parse_list(s, what),
        3 => {
            let lo: f64 = parts[0].trim().parse().map_err(|_| Error::Parse(format!("{what}: bad range start `{}`", parts[0])))?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| Error::Parse(format!("{what}: bad range stop `{}`", parts[1])))?;
            let m: usize = parts[2].trim().parse().map_err(|_| Error::Parse(format!("{what}: bad range count `{}`", parts[2])))?;
            if m == 0 {
                return Err(Error::Parse(format!("{what}: empty range")));
            }
            Ok((0..m).map(|i| if m == 1 { lo } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 }).collect())
        }
        _ => Err(Error::Parse(format!("{what}: expected a list or start:stop:count"))),
    }
}

fn parse_box(s: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| Error::Parse(format!("box `{s}`: expected lo:hi")))?;
    let (lo, hi) = (parse_list(lo, "box lo")?, parse_list(hi, "box hi")?);
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
    }
    Ok((lo, hi))
}

fn multi_index(s: &str, n: Option<usize>) -> Result<MultiIndexA> {
    let a = parse_list(s, "a")?;
    match n {
        Some(n) if a.len() == 1 && n > 1 => MultiIndexA::uniform(n, a[0]),
        _ => MultiIndexA::from_a(&a),
    }
}

fn read_points(path: &Path) -> Result<Vec<PointPlus>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let coords = rec
            .iter()
            .enumerate()
            .map(|(j, f)| f.parse::<f64>().map_err(|_| Error::Parse(format!("row {}: field `{}` is not a number", line + 1, &headers[j]))))
            .collect::<Result<Vec<_>>>()?;
        out.push(PointPlus::new(coords)?);
    }
    Ok(out)
}

/// CSV sink with a provenance comment line.
struct Table {
    writer: csv::Writer<Box<dyn Write>>,
}

impl Table {
    fn new(out: &Option<PathBuf>, provenance: &str, header: &[&str]) -> Result<Self> {
        let mut sink: Box<dyn Write> = match out {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout()),
        };
        writeln!(sink, "# besselcap {} {provenance}", env!("CARGO_PKG_VERSION"))?;
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn write_json<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergence(_) => EXIT_DIVERGENCE,
        _ => EXIT_PRECONDITION,
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PRECONDITION } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("besselcap: {e}");
            exit_code(&e)
        }
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().map_err(|e| Error::Precondition(format!("thread pool: {e}")))
}

/// Runs a parsed command; `Ok` carries the exit code (3 when a result is
/// flagged divergent).
pub fn run(cli: Cli) -> Result<i32> {
    let out = cli.out.clone();
    let pool = pool(cli.jobs)?;
    match cli.command {
        Command::Job { file } => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Job {
                args: Vec<String>,
            }
            let job: Job = serde_json::from_str(&std::fs::read_to_string(&file)?)?;
            let mut argv = vec!["besselcap".to_string()];
            argv.extend(job.args);
            let inner = Cli::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))?;
            let inner = Cli { out: inner.out.or(out), seed: inner.seed, jobs: inner.jobs.or(cli.jobs), command: inner.command };
            run(inner)
        }
        Command::Kernel(KernelCmd::Eval { kernel, a, points }) => {
            let pts = read_points(&points)?;
            let a = multi_index(&a, pts.first().map(|p| p.n()))?;
            let spec = kernel.spec()?;
            let k = spec.build(&a)?;
            let n = a.n();
            let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            header.extend(["norm".into(), "value".into()]);
            let h: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut t = Table::new(&out, &format!("kernel eval {spec:?} a={:?} seed={}", a.a(), cli.seed), &h)?;
            for p in &pts {
                a.check_dim(p.n())?;
                let v = k.eval(p)?;
                let mut row: Vec<String> = p.coords().iter().map(|&c| fmt(c)).collect();
                row.push(fmt(p.norm()));
                row.push(fmt(v));
                t.row(&row)?;
            }
            t.finish()?;
            Ok(EXIT_OK)
        }
        Command::Kernel(KernelCmd::Norm { kernel, a, q }) => {
            let a = multi_index(&a, None)?;
            let spec = kernel.spec()?;
            let k = spec.build(&a)?;
            let (inner, outer) = k.power_integrals(q);
            let total = k.norm_pow(q);
            let mut t = Table::new(&out, &format!("kernel norm {spec:?} a={:?} q={q} seed={}", a.a(), cli.seed), &["q", "inner", "outer", "total", "finite"])?;
            t.row(&[fmt(q), fmt(inner.value()), fmt(outer.value()), fmt(total.value()), total.is_finite().to_string()])?;
            t.finish()?;
            Ok(if total.is_finite() { EXIT_OK } else { EXIT_DIVERGENCE })
        }
        Command::Convolve(args) => {
            let f = GridFunction::read_csv(&args.f_axes, &args.f_values)?;
            let a = multi_index(&args.a, Some(f.n()))?;
            let spec = args.kernel.spec()?;
            let k = spec.build(&a)?;
            let pts = read_points(&args.points)?;
            let vals: Vec<Result<f64>> = pool.install(|| {
                pts.par_iter()
                    .map(|x| convolve(&f, |z: &[f64]| PointPlus::new(z.to_vec()).and_then(|z| k.eval(&z)).unwrap_or(f64::INFINITY), x, &a))
                    .collect()
            });
            let n = a.n();
            let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            header.push("value".into());
            let h: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut t = Table::new(&out, &format!("convolve {spec:?} a={:?} seed={}", a.a(), cli.seed), &h)?;
            for (x, v) in pts.iter().zip(vals) {
                let mut row: Vec<String> = x.coords().iter().map(|&c| fmt(c)).collect();
                row.push(fmt(v?));
                t.row(&row)?;
            }
            t.finish()?;
            Ok(EXIT_OK)
        }
        Command::Maximal(args) => {
            let mu = DiscreteMeasure::read_csv(&args.measure)?;
            let a = multi_index(&args.a, mu.n())?;
            let pts = read_points(&args.points)?;
            let vals: Vec<Result<f64>> = pool.install(|| {
                pts.par_iter()
                    .map(|x| match args.d {
                        Some(d) => fractional_maximal(&mu, x, d, &a),
                        None => maximal(&mu, x, &a),
                    })
                    .collect()
            });
            let n = a.n();
            let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            header.push("value".into());
            let h: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut t = Table::new(&out, &format!("maximal a={:?} d={:?} seed={}", a.a(), args.d, cli.seed), &h)?;
            for (x, v) in pts.iter().zip(vals) {
                let mut row: Vec<String> = x.coords().iter().map(|&c| fmt(c)).collect();
                row.push(fmt(v?));
                t.row(&row)?;
            }
            t.finish()?;
            Ok(EXIT_OK)
        }
        Command::WolffEnergy(args) => {
            let mu = DiscreteMeasure::read_csv(&args.measure)?;
            let a = multi_index(&args.a, mu.n())?;
            let rows = sweep(&parse_range(&args.nu, "nu")?, &parse_range(&args.p, "p")?);
            let blobs = match args.blob {
                Some(h) => {
                    let centers: Vec<Vec<f64>> = mu.atoms().iter().map(|(x, _)| x.coords().to_vec()).collect();
                    let masses: Vec<f64> = mu.atoms().iter().map(|(_, m)| *m).collect();
                    Some(BoxMeasure::blobs(&centers, &masses, h)?)
                }
                None => None,
            };
            let results: Vec<Result<(f64, f64)>> = pool.install(|| {
                rows.par_iter()
                    .map(|&(nu, p)| {
                        let params = WolffParams::new(a.clone(), nu, p)?;
                        match &blobs {
                            Some(b) => Ok((wolff_energy(b, &params)?, potential_energy(b, &params)?)),
                            None => Ok((wolff_energy(&mu, &params)?, potential_energy(&mu, &params)?)),
                        }
                    })
                    .collect()
            });
            let mut t = Table::new(
                &out,
                &format!("wolff-energy a={:?} blob={:?} seed={}", a.a(), args.blob, cli.seed),
                &["nu", "p", "wolff_energy", "potential_energy", "ratio"],
            )?;
            let mut divergent = false;
            for (&(nu, p), r) in rows.iter().zip(results) {
                let (w, e) = r?;
                divergent |= !w.is_finite() || !e.is_finite();
                t.row(&[fmt(nu), fmt(p), fmt(w), fmt(e), fmt(e / w)])?;
            }
            t.finish()?;
            Ok(if divergent { EXIT_DIVERGENCE } else { EXIT_OK })
        }
        Command::Capacity(args) => {
            let k = match (&args.set, &args.bounds) {
                (Some(path), _) => serde_json::from_str::<SetSpec>(&std::fs::read_to_string(path)?)?.build()?,
                (None, Some(b)) => {
                    let (lo, hi) = parse_box(b)?;
                    CompactSetSample::from_box(lo, hi, args.level)?
                }
                (None, None) => return Err(Error::Precondition("one of --set or --box is required".into())),
            };
            let a = multi_index(&args.a, Some(k.n()))?;
            let rows = sweep(&parse_range(&args.nu, "nu")?, &parse_range(&args.p, "p")?);
            let method = args.method;
            let results: Vec<Result<(CapacityEstimate, bool, bool)>> = pool.install(|| {
                rows.par_iter().map(|&(nu, p)| capacity_row(&k, &a, nu, p, method, args.level, args.margin)).collect()
            });
            let mut t = Table::new(
                &out,
                &format!("capacity {method:?} a={:?} level={} margin={} seed={}", a.a(), args.level, args.margin, cli.seed),
                &["nu", "p", "lower", "upper", "duality_gap", "iterations", "nontrivial_regime", "divergent"],
            )?;
            let mut any_divergent = false;
            for (&(nu, p), r) in rows.iter().zip(results) {
                let (e, nontrivial, divergent) = r?;
                any_divergent |= divergent;
                t.row(&[
                    fmt(nu),
                    fmt(p),
                    fmt(e.lower),
                    fmt(e.upper),
                    fmt(e.diagnostics.duality_gap),
                    e.diagnostics.iterations.to_string(),
                    nontrivial.to_string(),
                    divergent.to_string(),
                ])?;
            }
            t.finish()?;
            Ok(if any_divergent { EXIT_DIVERGENCE } else { EXIT_OK })
        }
        Command::Cantor(CantorCmd::Classify { source, a, nu, p }) => {
            let spec = source.build()?;
            let a = multi_index(&a, Some(spec.n))?;
            let rows = sweep(&parse_range(&nu, "nu")?, &parse_range(&p, "p")?);
            let results: Vec<_> = pool.install(|| rows.par_iter().map(|&(nu, p)| classify_capacity_series(&spec, &a, nu, p)).collect());
            let mut t = Table::new(
                &out,
                &format!("cantor classify spec={} a={:?} seed={}", serde_json::to_string(&spec)?, a.a(), cli.seed),
                &["nu", "p", "verdict", "closed_form_ratio", "terms", "partial_sum"],
            )?;
            for (&(nu, p), r) in rows.iter().zip(results) {
                let c = r?;
                let verdict = serde_json::to_value(c.verdict)?.as_str().unwrap_or("").to_string();
                t.row(&[
                    fmt(nu),
                    fmt(p),
                    verdict,
                    c.closed_form_ratio.map(fmt).unwrap_or_default(),
                    c.terms.len().to_string(),
                    fmt(*c.partial_sums.last().unwrap_or(&0.0)),
                ])?;
            }
            t.finish()?;
            Ok(EXIT_OK)
        }
        Command::Cantor(CantorCmd::Construct { gauge_power, a, levels, strict }) => {
            let a = multi_index(&a, None)?;
            let h = GaugeFunction::power(gauge_power)?;
            let c = construct_prescribed(&h, &a, levels, strict)?;
            write_json(&out, &c)?;
            Ok(EXIT_OK)
        }
        Command::Hausdorff(HausdorffCmd::Content { set, gauge_power, a, rho }) => {
            let e = DyadicSetRep::read_json(&set)?;
            let a = multi_index(&a, Some(e.n))?;
            let h = GaugeFunction::power(gauge_power)?;
            let c = hausdorff_content(&e, &h, &a, rho)?;
            let mut t = Table::new(&out, &format!("hausdorff content h=r^{gauge_power} a={:?} seed={}", a.a(), cli.seed), &["rho", "content"])?;
            t.row(&[rho.map(fmt).unwrap_or_else(|| "inf".into()), fmt(c)])?;
            t.finish()?;
            Ok(EXIT_OK)
        }
        Command::Hausdorff(HausdorffCmd::Frostman { set, gauge_power, levels, check_balls }) => {
            let e = DyadicSetRep::read_json(&set)?;
            let h = GaugeFunction::power(gauge_power)?;
            let levels = levels.unwrap_or(e.level);
            let mu = frostman_measure(&e, &h, levels)?;
            if check_balls > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                let bound = 3f64.powi(e.n as i32);
                let mut worst = 0.0f64;
                for _ in 0..check_balls {
                    let x: Vec<f64> = (0..e.n).map(|_| rng.gen_range(0.0..1.0)).collect();
                    let r = 0.5f64.powi((e.level - rng.gen_range(0..=levels)) as i32);
                    let m: f64 = mu
                        .atoms()
                        .iter()
                        .filter(|(y, _)| y.coords().iter().zip(&x).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt() <= r)
                        .map(|(_, w)| w)
                        .sum();
                    worst = worst.max(m / (bound * h.eval(r)));
                }
                eprintln!("max mu(B)/(3^n h(r)) over {check_balls} dyadic balls: {worst:.6}");
            }
            let n = e.n;
            let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            header.push("mass".into());
            let hd: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut t = Table::new(&out, &format!("hausdorff frostman h=r^{gauge_power} levels={levels} seed={}", cli.seed), &hd)?;
            for (x, w) in mu.atoms() {
                let mut row: Vec<String> = x.coords().iter().map(|&c| fmt(c)).collect();
                row.push(fmt(*w));
                t.row(&row)?;
            }
            t.finish()?;
            Ok(EXIT_OK)
        }
        Command::Blip(args) => {
            let pts = read_points(&args.points)?;
            let scale = match args.map.as_str() {
                "identity" => 1.0,
                s => match s.strip_prefix("scale:") {
                    Some(c) => c.parse::<f64>().map_err(|_| Error::Parse(format!("map `{s}`: bad scale")))?,
                    None => return Err(Error::Parse(format!("map `{s}`: expected identity or scale:c"))),
                },
            };
            let phi = move |x: &[f64]| x.iter().map(|v| scale * v).collect::<Vec<f64>>();
            let c = b_lipschitz_constant(phi, &pts, args.theta_points)?;
            let mut t = Table::new(&out, &format!("blip map={} seed={}", args.map, cli.seed), &["map", "points", "constant"])?;
            t.row(&[args.map.clone(), pts.len().to_string(), fmt(c)])?;
            t.finish()?;
            Ok(EXIT_OK)
        }
        Command::Lb(LbCmd::Residual { a, bounds, cells, r_in, r_out, levels }) => {
            let (lo, hi) = parse_box(&bounds)?;
            let a = multi_index(&a, Some(lo.len()))?;
            let grid = StencilGrid::new(lo, hi, vec![cells; a.n()])?;
            let s = residual_study(&a, &grid, r_in, r_out, levels)?;
            let mut t = Table::new(&out, &format!("lb residual a={:?} box={} cells={cells} seed={}", a.a(), bounds, cli.seed), &["h", "max_residual", "order"])?;
            for i in 0..s.spacing.len() {
                let order = if i == 0 { String::new() } else { fmt(s.orders[i - 1]) };
                t.row(&[fmt(s.spacing[i]), fmt(s.max_residual[i]), order])?;
            }
            t.finish()?;
            Ok(EXIT_OK)
        }
    }
}

/// Row-wise expansion of a `(ν, p)` parameter block.
fn sweep(nus: &[f64], ps: &[f64]) -> Vec<(f64, f64)> {
    nus.iter().flat_map(|&nu| ps.iter().map(move |&p| (nu, p))).collect()
}

fn capacity_row(
    k: &CompactSetSample,
    a: &MultiIndexA,
    nu: f64,
    p: f64,
    method: CapacityMethod,
    level: u32,
    margin: f64,
) -> Result<(CapacityEstimate, bool, bool)> {
    let nontrivial = capacity_nontrivial(a, nu, p)?;
    let est = match method {
        CapacityMethod::Primal => {
            let kernel = RadialKernel::bessel(a, nu)?;
            capacity_primal_upper(k, &kernel, p, &PrimalGrid::around(k, level + 1, margin))?
        }
        CapacityMethod::Dual => capacity_dual_lower(k, &RadialKernel::bessel(a, nu)?, p, None)?,
        CapacityMethod::Wolff => capacity_wolff(k, &WolffParams::new(a.clone(), nu, p)?)?,
        CapacityMethod::Covering => {
            let b = capacity_covering_upper(k, &WolffParams::new(a.clone(), nu, p)?)?;
            let diagnostics = Diagnostics { iterations: 0, duality_gap: 0.0, level, unknowns: 0, constraints: b.terms.len() };
            let est = CapacityEstimate { lower: 0.0, upper: b.value, method: EstimateMethod::Covering, slack: 0.0, diagnostics };
            return Ok((est, nontrivial, b.divergent));
        }
    };
    Ok((est, nontrivial, false))
}
