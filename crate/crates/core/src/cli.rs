//! Command-line front end. [`run`] parses argv, dispatches, and returns the
//! process exit code: 0 success, 1 usage error, 2 invalid input, 3 chain not
//! positive.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{parse_chain_spec, validate, ChainSpec};
use crate::coords::{self, TauCoords, TildeCoords};
use crate::error::Error;
use crate::fmt::g12;
use crate::partition::{self, TorusElement};
use crate::pathint::{self, PathIntegralParams};
use crate::polytope::{self, Method};
use crate::su2;

#[derive(Parser, Debug)]
#[command(name = "p1chain", version, about = "Twisted P¹-chains: moment polytopes, characters, path integrals")]
struct Cli {
    #[command(flatten)]
    output: Output,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; tabular commands default to csv when --out is given.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Record,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Quadrature,
    MonteCarlo,
}

#[derive(Args, Debug, Clone)]
struct Sampling {
    #[arg(long, value_enum, default_value = "quadrature")]
    method: MethodArg,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Sampling {
    fn method(&self) -> Method {
        match self.method {
            MethodArg::Quadrature => Method::Quadrature,
            MethodArg::MonteCarlo => Method::MonteCarlo { samples: self.samples, seed: self.seed },
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Torus {
    /// Comma-separated ε coordinates of H (default all zero).
    #[arg(long = "H", allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and check a spec file; print its canonical form.
    Validate { spec: PathBuf },
    /// Whether the curvature form of the chain is positive.
    Positivity { spec: PathBuf },
    /// Inductive bound table and exact range of each action variable.
    Minmax { spec: PathBuf },
    /// Lattice points of the twisted cube.
    Lattice { spec: PathBuf },
    /// Vertices of the twisted cube.
    Vertices { spec: PathBuf },
    /// Volume of the twisted cube.
    Volume {
        spec: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Character Z(iH) as a lattice sum.
    Character {
        spec: PathBuf,
        #[command(flatten)]
        torus: Torus,
    },
    /// Classical partition function.
    Classical {
        spec: PathBuf,
        #[command(flatten)]
        torus: Torus,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Lattice sum against integral at the same H, uncorrected.
    Report {
        spec: PathBuf,
        #[command(flatten)]
        torus: Torus,
    },
    /// Regularized path integral (ell = 1) against the character.
    Pathint {
        spec: PathBuf,
        #[command(flatten)]
        torus: Torus,
        #[arg(long, default_value_t = 1)]
        slices: usize,
        #[arg(long, default_value_t = 200.0)]
        lambda: f64,
        #[arg(long, default_value_t = 40)]
        nmax: u32,
        #[arg(long, default_value_t = 1e-3)]
        reg: f64,
        #[arg(long, default_value_t = 800)]
        quad_points: usize,
        /// Number of refinement levels; above 1 emits a convergence table.
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Damped Poisson sum for an interval [0, l].
    PoissonCheck {
        #[arg(long)]
        l: u32,
        #[arg(long = "H", default_value_t = 0.0, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, default_value_t = 200)]
        nmax: u32,
        #[arg(long, default_value_t = 1e-4)]
        reg: f64,
    },
    /// Cross-checks at random points: matrix oracle, gradient, determinant, definiteness.
    Oracle {
        spec: PathBuf,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Character and classical partition function along one ε axis over [−π, π].
    Sweep {
        spec: PathBuf,
        #[command(flatten)]
        torus: Torus,
        /// 1-based axis to sweep.
        #[arg(long, default_value_t = 1)]
        axis: usize,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
}

/// A failure with its exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPositive => 3,
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. } => 1,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail(2, e.to_string())
    }
}

/// Key/value record builder.
#[derive(Default)]
struct Record(String);

impl Record {
    fn put(&mut self, k: &str, v: impl std::fmt::Display) -> &mut Self {
        self.0.push_str(&format!("{k}: {v}\n"));
        self
    }

    fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.put(k, g12(v))
    }

    fn complex(&mut self, k: &str, z: Complex64) -> &mut Self {
        self.num(&format!("{k}_re"), z.re).num(&format!("{k}_im"), z.im)
    }

    fn vec(&mut self, k: &str, v: &[f64]) -> &mut Self {
        let s: Vec<String> = v.iter().map(|&x| g12(x)).collect();
        self.put(k, s.join(","))
    }
}

pub fn run<S: AsRef<str>>(argv: &[S]) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out = cli.output;
    match dispatch(&cli.cmd, &out) {
        Ok(text) => match emit(&out, &text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn emit(out: &Output, text: &str) -> std::io::Result<()> {
    match &out.out {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn load(path: &PathBuf, verbose: u8) -> Result<ChainSpec, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    let spec = parse_chain_spec(&text)?;
    let d = validate(&spec);
    for w in &d.warnings {
        eprintln!("warning: {w}");
    }
    if !d.is_usable() {
        return Err(Fail(2, d.errors.join("; ")));
    }
    if verbose > 0 {
        eprintln!("spec: {spec}");
    }
    Ok(spec)
}

fn torus(t: &Torus, ell: usize) -> Result<TorusElement, Fail> {
    let eps = match &t.h {
        None => vec![0.0; ell],
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Fail(1, format!("bad --H entry `{x}`"))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if eps.len() != ell {
        return Err(Fail(1, format!("--H needs {ell} comma-separated values, got {}", eps.len())));
    }
    Ok(TorusElement::new(eps, t.beta)?)
}

fn format_for(out: &Output, tabular: bool) -> Format {
    out.format.unwrap_or(if tabular && out.out.is_some() { Format::Csv } else { Format::Record })
}

fn put_sampling(r: &mut Record, s: &Sampling, est: &polytope::Estimate) {
    match s.method {
        MethodArg::Quadrature => {
            r.put("method", "quadrature");
        }
        MethodArg::MonteCarlo => {
            r.put("method", "monte-carlo").put("samples", s.samples).put("seed", s.seed).num("std_error", est.std_error);
        }
    }
}

fn dispatch(cmd: &Cmd, out: &Output) -> Result<String, Fail> {
    let v = out.verbose;
    let mut r = Record::default();
    match cmd {
        Cmd::Validate { spec } => {
            let text = fs::read_to_string(spec).map_err(|e| Fail(2, format!("{}: {e}", spec.display())))?;
            let s = parse_chain_spec(&text)?;
            let d = validate(&s);
            r.put("valid", d.is_usable()).put("ell", s.ell()).put("canonical", s.to_canonical_string());
            for w in &d.warnings {
                r.put("warning", w);
            }
            for e in &d.errors {
                r.put("error", e);
            }
            if !d.is_usable() {
                return Err(Fail(2, format!("{}{}", r.0, d.errors.join("; "))));
            }
        }
        Cmd::Positivity { spec } => {
            let s = load(spec, v)?;
            let cube = polytope::TwistedCube::new(&s);
            r.put("positive", cube.positive).vec("min_j", &cube.min_j).vec("max_j", &cube.max_j);
        }
        Cmd::Minmax { spec } => {
            let s = load(spec, v)?;
            let (tlo, thi) = polytope::minmax_table(&s);
            let (lo, hi) = polytope::extrema(&s);
            if format_for(out, true) == Format::Csv {
                let mut csv = String::from("j,table_min,table_max,min,max\n");
                for k in 0..s.ell() {
                    csv.push_str(&format!("{},{},{},{},{}\n", k + 1, g12(tlo[k]), g12(thi[k]), g12(lo[k]), g12(hi[k])));
                }
                return Ok(csv);
            }
            r.vec("table_min", &tlo).vec("table_max", &thi).vec("min", &lo).vec("max", &hi);
        }
        Cmd::Lattice { spec } => {
            let s = load(spec, v)?;
            let pts = polytope::lattice_points(&s)?;
            let rows: Vec<Vec<i64>> = pts.into_iter().map(|p| p.n).collect();
            return table(out, s.ell(), &rows);
        }
        Cmd::Vertices { spec } => {
            let s = load(spec, v)?;
            let rows: Vec<Vec<String>> = polytope::vertices(&s)?
                .iter()
                .map(|p| p.iter().map(|&x| g12(x)).collect())
                .collect();
            return table(out, s.ell(), &rows);
        }
        Cmd::Volume { spec, sampling } => {
            let s = load(spec, v)?;
            let est = polytope::volume(&s, sampling.method())?;
            r.num("volume", est.value);
            put_sampling(&mut r, sampling, &est);
        }
        Cmd::Character { spec, torus: t } => {
            let s = load(spec, v)?;
            let h = torus(t, s.ell())?;
            let z = partition::character(&s, &h)?;
            r.vec("eps", &h.eps).put("count", z.count).complex("value", z.value).num("abs", z.value.norm());
        }
        Cmd::Classical { spec, torus: t, sampling } => {
            let s = load(spec, v)?;
            let h = torus(t, s.ell())?;
            let est = partition::classical_z(&s, &h, sampling.method())?;
            r.vec("eps", &h.eps).num("beta", h.beta).num("z_classical", est.value);
            put_sampling(&mut r, sampling, &est);
        }
        Cmd::Report { spec, torus: t } => {
            let s = load(spec, v)?;
            let h = torus(t, s.ell())?;
            return Ok(partition::quantum_classical_report(&s, &h)?.to_record());
        }
        Cmd::Pathint { spec, torus: t, slices, lambda, nmax, reg, quad_points, levels } => {
            let s = load(spec, v)?;
            let h = torus(t, s.ell())?;
            let p = PathIntegralParams {
                slices: *slices,
                n_max: *nmax,
                phi_cutoff: *lambda,
                regulator: *reg,
                quad_points: *quad_points,
            };
            p.check()?;
            if *levels > 1 {
                let rows = pathint::convergence_sweep(&s, &h, &p, *levels)?;
                let mut buf = Vec::new();
                pathint::write_convergence_csv(&mut buf, &rows)?;
                return Ok(String::from_utf8(buf).expect("utf-8"));
            }
            let z = pathint::numeric_path_integral(&s, &h, &p)?;
            let exact = pathint::analytic_reduce(&s, &h, *slices)?;
            r.vec("eps", &h.eps)
                .put("slices", slices)
                .num("lambda", *lambda)
                .put("n_max", nmax)
                .num("regulator", *reg)
                .put("quad_points", quad_points)
                .complex("numeric", z)
                .complex("analytic", exact)
                .num("abs_error", (z - exact).norm());
        }
        Cmd::PoissonCheck { l, h, nmax, reg } => {
            let z = pathint::poisson_check(*l, *h, *nmax, *reg)?;
            let geo: Complex64 = (0..=*l).map(|k| Complex64::from_polar(1.0, k as f64 * h)).sum();
            r.put("l", l)
                .num("H", *h)
                .put("n_max", nmax)
                .num("regulator", *reg)
                .complex("value", z)
                .complex("geometric", geo)
                .num("abs_error", (z - geo).norm());
        }
        Cmd::Oracle { spec, points, seed } => {
            let s = load(spec, v)?;
            oracle(&s, *points, *seed, &mut r)?;
        }
        Cmd::Sweep { spec, torus: t, axis, points, sampling } => {
            let s = load(spec, v)?;
            let h = torus(t, s.ell())?;
            if *axis == 0 {
                return Err(Fail(1, "--axis is 1-based".into()));
            }
            let rows = partition::sweep(&s, &h, axis - 1, *points, sampling.method())?;
            let mut buf = Vec::new();
            if matches!(sampling.method, MethodArg::MonteCarlo) {
                writeln!(buf, "# seed: {}", sampling.seed)?;
            }
            partition::write_sweep_csv(&mut buf, &rows)?;
            return Ok(String::from_utf8(buf).expect("utf-8"));
        }
    }
    Ok(r.0)
}

fn table<T: std::fmt::Display>(out: &Output, ell: usize, rows: &[Vec<T>]) -> Result<String, Fail> {
    if format_for(out, true) == Format::Csv {
        let mut buf = Vec::new();
        polytope::write_points_csv(&mut buf, ell, rows)?;
        return Ok(String::from_utf8(buf).expect("utf-8"));
    }
    let mut r = Record::default();
    r.put("count", rows.len());
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        r.put("point", cells.join(","));
    }
    Ok(r.0)
}

fn oracle(s: &ChainSpec, points: usize, seed: u64, r: &mut Record) -> Result<(), Fail> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ell = s.ell();
    let (mut oracle_err, mut grad_err, mut det_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut min_eig = f64::INFINITY;
    for _ in 0..points {
        let x: Vec<f64> = (0..ell).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let tt = TildeCoords::new(x);
        let t = coords::tau_from_tilde(s, &tt);
        let z: Vec<Complex64> = t.tau.iter().map(|&tau| Complex64::from_polar(tau.exp(), rng.gen_range(-3.0..3.0))).collect();
        let zt = su2::chain_tilde_oracle(s, &z)?;
        let closed = coords::tilde_from_tau(s, &TauCoords::new(t.tau.clone()));
        for (a, b) in zt.iter().zip(&closed.tau_tilde) {
            let m = b.exp();
            oracle_err = oracle_err.max((a.norm() - m).abs() / m);
        }
        let jv = coords::action_vars(s, &closed).j;
        let fd = coords::half_gradient_fd(s, &t, coords::FD_STEP);
        for (a, b) in jv.iter().zip(&fd) {
            grad_err = grad_err.max((a - b).abs());
        }
        det_err = det_err.max(coords::det_identity_residual(s, &t));
        min_eig = min_eig.min(coords::min_eigenvalue(s, &t));
    }
    let positive = polytope::is_positive(s);
    r.put("seed", seed)
        .put("points", points)
        .num("matrix_oracle_rel_err", oracle_err)
        .num("gradient_err", grad_err)
        .num("det_identity_residual", det_err)
        .num("min_hessian_eigenvalue", min_eig)
        .put("positive", positive);
    if !positive {
        match coords::find_indefinite_point(s) {
            Some(t) => r.vec("indefinite_witness_tau", &t.tau),
            None => r.put("indefinite_witness_tau", "none found"),
        };
    }
    Ok(())
}
