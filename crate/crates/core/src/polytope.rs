//! The twisted cube `{0 ≤ J_j ≤ l_j − Σ_{i<j} c_ji J_i}` swept out by the
//! action variables: extrema, positivity, lattice points, vertices, volume and
//! a convex-conjugate membership test.

use std::io::Write;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::coords::{self, TauCoords, TildeCoords};
use crate::error::{Error, Result};
use crate::quad;

/// Relative tolerance used by nested quadrature.
pub const QUAD_REL_TOL: f64 = 1e-8;

/// Samples drawn per Monte Carlo chunk; chunk `k` uses ChaCha stream `k`.
pub const MC_CHUNK: usize = 1 << 16;

/// Upper limit on the number of enumerated lattice points.
pub const MAX_LATTICE_POINTS: usize = 50_000_000;

/// Bounds on `J_j` from the inductive table: each stage is bounded using only
/// the bounds of earlier stages, ignoring their correlation. The result
/// contains the true range and coincides with it for `ℓ ≤ 2`; see [`extrema`].
pub fn minmax_table(spec: &ChainSpec) -> (Vec<f64>, Vec<f64>) {
    let ell = spec.ell();
    let mut lo = Vec::with_capacity(ell);
    let mut hi = Vec::with_capacity(ell);
    for j in 0..ell {
        let (mut down, mut up) = (spec.l(j), spec.l(j));
        for (i, &c) in spec.row(j).iter().enumerate() {
            let (cp, cm) = (c.max(0) as f64, (-c).max(0) as f64);
            down += -cp * hi[i] + cm * lo[i];
            up += -cp * lo[i] + cm * hi[i];
        }
        lo.push(down.min(0.0));
        hi.push(up.max(0.0));
    }
    (lo, hi)
}

/// Exact range of each `J_j` over the closure of the chain.
///
/// `J` is affine in each `J(τ̃_k)` separately, so its extremes over `[0,1]^ℓ`
/// are attained at the `2^ℓ` corners.
pub fn extrema(spec: &ChainSpec) -> (Vec<f64>, Vec<f64>) {
    let ell = spec.ell();
    let (lo, hi) = corner_points(spec).fold(
        (vec![f64::INFINITY; ell], vec![f64::NEG_INFINITY; ell]),
        |(mut lo, mut hi), p| {
            for j in 0..ell {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
            (lo, hi)
        },
    );
    (lo, hi)
}

/// Action points with every `J(τ̃_k) ∈ {0, 1}`, bit `k` of the mask selecting 1.
fn corner_points(spec: &ChainSpec) -> impl Iterator<Item = Vec<f64>> + '_ {
    let ell = spec.ell();
    (0u64..1 << ell).map(move |mask| {
        let mut p: Vec<f64> = Vec::with_capacity(ell);
        for j in 0..ell {
            let v = if mask >> j & 1 == 1 { spec.facet_bound(j, &p) } else { 0.0 };
            p.push(v);
        }
        p
    })
}

/// Whether the curvature form is positive: every `J_j` stays nonnegative.
pub fn is_positive(spec: &ChainSpec) -> bool {
    extrema(spec).0.iter().all(|&m| m >= 0.0)
}

fn require_positive(spec: &ChainSpec) -> Result<()> {
    if is_positive(spec) {
        Ok(())
    } else {
        Err(Error::NotPositive)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedCube {
    pub spec: ChainSpec,
    pub min_j: Vec<f64>,
    pub max_j: Vec<f64>,
    pub positive: bool,
}

impl TwistedCube {
    pub fn new(spec: &ChainSpec) -> Self {
        let (min_j, max_j) = extrema(spec);
        let positive = min_j.iter().all(|&m| m >= 0.0);
        Self { spec: spec.clone(), min_j, max_j, positive }
    }

    /// Smallest slack among the `2ℓ` inequalities at `x`; negative outside.
    pub fn slack(&self, x: &[f64]) -> f64 {
        (0..self.spec.ell())
            .map(|j| x[j].min(self.spec.facet_bound(j, x) - x[j]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.slack(x) >= -tol
    }

    /// Product of the bounding-box side lengths.
    pub fn box_volume(&self) -> f64 {
        self.min_j.iter().zip(&self.max_j).map(|(a, b)| b - a).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightPoint {
    pub n: Vec<i64>,
}

/// Integer points of the twisted cube in lexicographic order.
pub fn lattice_points(spec: &ChainSpec) -> Result<Vec<WeightPoint>> {
    require_positive(spec)?;
    let mut out = Vec::new();
    let mut n = Vec::with_capacity(spec.ell());
    enumerate(spec, &mut n, &mut out)?;
    Ok(out)
}

fn enumerate(spec: &ChainSpec, n: &mut Vec<i64>, out: &mut Vec<WeightPoint>) -> Result<()> {
    let j = n.len();
    if j == spec.ell() {
        if out.len() >= MAX_LATTICE_POINTS {
            return Err(Error::BudgetExceeded(format!("more than {MAX_LATTICE_POINTS} lattice points")));
        }
        out.push(WeightPoint { n: n.clone() });
        return Ok(());
    }
    for v in 0..=spec.facet_bound_int(j, n) {
        n.push(v);
        enumerate(spec, n, out)?;
        n.pop();
    }
    Ok(())
}

/// Number of lattice points, without materializing them.
pub fn lattice_count(spec: &ChainSpec) -> Result<u64> {
    require_positive(spec)?;
    fn count(spec: &ChainSpec, n: &mut Vec<i64>) -> u64 {
        let j = n.len();
        if j == spec.ell() {
            return 1;
        }
        let mut total = 0;
        for v in 0..=spec.facet_bound_int(j, n) {
            n.push(v);
            total += count(spec, n);
            n.pop();
        }
        total
    }
    Ok(count(spec, &mut Vec::with_capacity(spec.ell())))
}

/// Vertices: the corners `J_j ∈ {0, l_j − L_j}`, deduplicated at `1e-9` and
/// sorted lexicographically.
pub fn vertices(spec: &ChainSpec) -> Result<Vec<Vec<f64>>> {
    require_positive(spec)?;
    let mut pts: Vec<Vec<f64>> = corner_points(spec).collect();
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in pts {
        if !out.iter().any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= 1e-9)) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Standard error; zero for quadrature.
    pub std_error: f64,
}

/// `∫ f` over the twisted cube by nested quadrature or box rejection sampling.
pub fn integrate<F>(spec: &ChainSpec, f: F, method: Method) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    require_positive(spec)?;
    match method {
        Method::Quadrature => {
            let value = quad::integrate_twisted_cube(spec, f, QUAD_REL_TOL)?;
            Ok(Estimate { value, std_error: 0.0 })
        }
        Method::MonteCarlo { samples, seed } => Ok(monte_carlo(&TwistedCube::new(spec), f, samples, seed)),
    }
}

pub fn volume(spec: &ChainSpec, method: Method) -> Result<Estimate> {
    integrate(spec, |_| 1.0, method)
}

fn monte_carlo<F>(cube: &TwistedCube, f: F, samples: usize, seed: u64) -> Estimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let box_vol = cube.box_volume();
    if samples == 0 || box_vol == 0.0 {
        return Estimate { value: 0.0, std_error: 0.0 };
    }
    let ell = cube.spec.ell();
    let chunks = samples.div_ceil(MC_CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut x = vec![0.0; ell];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                for j in 0..ell {
                    x[j] = rng.gen_range(cube.min_j[j]..=cube.max_j[j]);
                }
                if cube.contains(&x, 0.0) {
                    let v = f(&x);
                    s1 += v;
                    s2 += v * v;
                }
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), &(c, d)| (a + c, b + d));
    let n = samples as f64;
    let mean = s1 / n;
    let var = if samples > 1 { ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0) } else { 0.0 };
    Estimate { value: box_vol * mean, std_error: box_vol * (var / n).sqrt() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Interior,
    BoundaryOrExterior,
}

/// Bound on `‖τ‖_∞` beyond which the maximizer counts as escaping.
pub const CONJUGATE_TAU_BOUND: f64 = 1e3;

/// A stationary point with `‖τ̃‖_∞` above this is saturated: `eta` is then
/// within about `l·e^{-16}` of a facet and is not reported as interior.
pub const CONJUGATE_TILDE_BOUND: f64 = 8.0;

const CONJUGATE_ITERS: usize = 400;
const CONJUGATE_REL_TOL: f64 = 1e-9;
const CONJUGATE_STALL_TOL: f64 = 1e-6;

/// Classifies `eta` by maximizing `F(τ) = 2⟨eta, τ⟩ − K_λ(τ)` with damped
/// Newton steps from `τ = 0`. A stationary point with bounded `τ̃` means `eta`
/// lies in the open cube.
pub fn conjugate_membership(spec: &ChainSpec, eta: &[f64]) -> Result<Membership> {
    let ell = spec.ell();
    if eta.len() != ell {
        return Err(Error::DimensionMismatch { expected: ell, got: eta.len() });
    }
    let objective = |t: &TauCoords| {
        let tt = coords::tilde_from_tau(spec, t);
        let jv = coords::action_vars(spec, &tt).j;
        let val = 2.0 * eta.iter().zip(&t.tau).map(|(a, b)| a * b).sum::<f64>() - coords::kahler_potential(spec, &tt);
        (val, tt, jv)
    };
    let mut t = TauCoords::new(vec![0.0; ell]);
    let (mut val, mut tt, mut jv) = objective(&t);
    let scale = 1.0 + eta.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let settled = |tt: &TildeCoords| {
        if tt.tau_tilde.iter().all(|x| x.abs() <= CONJUGATE_TILDE_BOUND) {
            Membership::Interior
        } else {
            Membership::BoundaryOrExterior
        }
    };
    for _ in 0..CONJUGATE_ITERS {
        let resid = DVector::from_iterator(ell, eta.iter().zip(&jv).map(|(a, b)| a - b));
        let grad = &resid * 2.0;
        if resid.amax() <= CONJUGATE_REL_TOL * scale {
            return Ok(settled(&tt));
        }
        let jac = coords::action_jacobian(spec, &tt);
        let mut dir = match jac.lu().solve(&resid) {
            Some(d) if d.dot(&grad) > 0.0 && d.iter().all(|v| v.is_finite()) => d,
            _ => grad.clone(),
        };
        let cap = dir.amax();
        if cap > 10.0 {
            dir *= 10.0 / cap;
        }
        let slope = dir.dot(&grad);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = TauCoords::new(t.tau.iter().zip(dir.iter()).map(|(a, d)| a + step * d).collect());
            let (v, ttn, jn) = objective(&trial);
            let shrinks = resid.amax() <= CONJUGATE_STALL_TOL * scale
                && eta.iter().zip(&jn).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 0.5 * resid.amax();
            if v >= val + 1e-4 * step * slope || shrinks {
                t = trial;
                val = v;
                tt = ttn;
                jv = jn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if resid.amax() <= CONJUGATE_STALL_TOL * scale {
                return Ok(settled(&tt));
            }
            return Ok(Membership::BoundaryOrExterior);
        }
        if t.tau.iter().any(|x| x.abs() > CONJUGATE_TAU_BOUND) {
            return Ok(Membership::BoundaryOrExterior);
        }
    }
    Ok(Membership::BoundaryOrExterior)
}

/// CSV with header `n1,…,nℓ` and one row per point.
pub fn write_points_csv<W: Write, T: std::fmt::Display>(w: &mut W, ell: usize, rows: &[Vec<T>]) -> std::io::Result<()> {
    let header: Vec<String> = (1..=ell).map(|k| format!("n{k}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
