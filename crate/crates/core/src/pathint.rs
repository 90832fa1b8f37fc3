//! Phase-space path integral for the trace of `e^{iH}` with `H` linear in the
//! action variables.
//!
//! [`analytic_reduce`] carries out the reduction symbolically: angle integrals
//! give delta functions that glue the action slices together, the winding sum
//! is resolved by Poisson summation, and what remains is a lattice sum.
//! [`numeric_path_integral`] evaluates the same integral with regularized
//! ingredients on a grid.
//!
//! Regularization, all removable:
//! - each angle integral runs over `[−Λ, Λ]`, so it yields the Dirichlet kernel
//!   `sin(Λx)/(πx)` in place of a delta function;
//! - the winding sum is truncated to `|n| ≤ n_max` and damped by `e^{−εn²}`;
//! - each action integral is weighted by a smooth cutoff equal to 1 on the
//!   moment interval and vanishing half a unit outside it.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::fmt::g12;
use crate::partition::{self, TorusElement};
use crate::polytope;
use crate::quad::composite_gl;

/// Width of each side ramp of [`smooth_cutoff`].
pub const RAMP: f64 = 0.5;

/// Gauss–Legendre order of each panel in the action grid.
pub const PANEL_ORDER: usize = 8;

/// Largest slice count accepted by [`numeric_path_integral`].
pub const MAX_SLICES: usize = 3;

/// Largest action-grid size accepted by [`numeric_path_integral`].
pub const MAX_NODES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathIntegralParams {
    /// Number of time slices `N`.
    pub slices: usize,
    /// Winding sum runs over `|n| ≤ n_max`.
    pub n_max: u32,
    /// Each angle integral covers `[−Λ, Λ]`.
    pub phi_cutoff: f64,
    /// Damping `e^{−εn²}` on winding number `n`.
    pub regulator: f64,
    /// Action-grid nodes per unit length.
    pub quad_points: usize,
}

impl Default for PathIntegralParams {
    fn default() -> Self {
        Self { slices: 1, n_max: 40, phi_cutoff: 200.0, regulator: 1e-3, quad_points: 800 }
    }
}

impl PathIntegralParams {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.slices == 0 {
            return bad("slices must be at least 1");
        }
        if self.n_max == 0 {
            return bad("n_max must be at least 1");
        }
        if !(self.phi_cutoff > 0.0 && self.phi_cutoff.is_finite()) {
            return bad("phi cutoff must be positive");
        }
        if !(self.regulator > 0.0 && self.regulator.is_finite()) {
            return bad("regulator must be positive");
        }
        if self.quad_points < PANEL_ORDER {
            return bad("quad_points must be at least 8 per unit length");
        }
        Ok(())
    }
}

/// `f(t)/(f(t)+f(1−t))` with `f(t) = e^{−1/t}`: smooth, 0 for `t ≤ 0`, 1 for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Smooth function equal to 1 on `[lo, hi]` and 0 outside `[lo − RAMP, hi + RAMP]`.
pub fn smooth_cutoff(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        smooth_step((x - lo + RAMP) / RAMP)
    } else if x > hi {
        smooth_step((hi + RAMP - x) / RAMP)
    } else {
        1.0
    }
}

fn check_paths(j: &[f64], phi: &[f64], phi_len: usize) -> Result<()> {
    if j.len() < 2 {
        return Err(Error::InvalidParameter("action path needs at least 2 points".into()));
    }
    if phi.len() != phi_len {
        return Err(Error::DimensionMismatch { expected: phi_len, got: phi.len() });
    }
    Ok(())
}

/// `[Jφ]_0^1 − Σ_{i<N} (φ_i ΔJ_i + H J_i Δt)` with `ΔJ_i = J_{i+1} − J_i`,
/// `Δt = 1/N` and `H = h_coef · J`. Both paths have `N + 1` entries.
pub fn discretized_action(j: &[f64], phi: &[f64], h_coef: f64) -> Result<f64> {
    check_paths(j, phi, j.len())?;
    let n = j.len() - 1;
    let dt = 1.0 / n as f64;
    let boundary = j[n] * phi[n] - j[0] * phi[0];
    let bulk: f64 = (0..n).map(|i| phi[i] * (j[i + 1] - j[i]) + h_coef * j[i] * dt).sum();
    Ok(boundary - bulk)
}

/// Action of a closed-angle path for the trace: `phi` holds `φ_0..φ_{N−1}` and
/// the last angle is `φ_0 + 2πn`. Each intermediate angle multiplies the
/// backward difference `J_i − J_{i−1}`, so integrating it out ties `J_i` to
/// `J_{i−1}`, and the boundary term ties `J_N` to `J_0`.
pub fn trace_action(j: &[f64], phi: &[f64], winding: i64, h_coef: f64) -> Result<f64> {
    check_paths(j, phi, j.len() - 1)?;
    let n = j.len() - 1;
    let phi_last = phi[0] + 2.0 * PI * winding as f64;
    let boundary = j[n] * phi_last - j[0] * phi[0];
    let kinetic: f64 = (1..n).map(|i| phi[i] * (j[i] - j[i - 1])).sum();
    let potential: f64 = j[..n].iter().sum::<f64>() * h_coef / n as f64;
    Ok(boundary - kinetic - potential)
}

/// The trace reduced by hand: angle integrals collapse every slice onto one
/// action value held for total time `N · (1/N) = 1`, and Poisson summation
/// turns `Σ_n ∫_0^b e^{−iη(2πn − θ)} dη` into `Σ_{k=0}^{b} e^{ikθ}`, one
/// coordinate at a time with the upper limit `b = l_j − L_j`.
pub fn analytic_reduce(spec: &ChainSpec, h: &TorusElement, slices: usize) -> Result<Complex64> {
    if h.eps.len() != spec.ell() {
        return Err(Error::DimensionMismatch { expected: spec.ell(), got: h.eps.len() });
    }
    if slices == 0 {
        return Err(Error::InvalidParameter("slices must be at least 1".into()));
    }
    if !polytope::is_positive(spec) {
        return Err(Error::NotPositive);
    }
    // N slices of length 1/N; written as a quotient so it is exactly 1 for every N
    let elapsed = slices as f64 / slices as f64;
    let theta: Vec<f64> = h.eps.iter().map(|e| e * elapsed).collect();
    let mut n = Vec::with_capacity(spec.ell());
    Ok(reduce(spec, &theta, &mut n))
}

fn reduce(spec: &ChainSpec, theta: &[f64], n: &mut Vec<i64>) -> Complex64 {
    let j = n.len();
    let b = spec.facet_bound_int(j, n);
    if j + 1 == spec.ell() {
        return poisson_resolved(b, theta[j]);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=b {
        n.push(k);
        acc += Complex64::from_polar(1.0, k as f64 * theta[j]) * reduce(spec, theta, n);
        n.pop();
    }
    acc
}

/// `Σ_{k=0}^{b} e^{ikθ}`.
fn poisson_resolved(b: i64, theta: f64) -> Complex64 {
    if b < 0 {
        return Complex64::new(0.0, 0.0);
    }
    let q = Complex64::from_polar(1.0, theta);
    if (q - 1.0).norm() > 1e-3 {
        (Complex64::from_polar(1.0, (b + 1) as f64 * theta) - 1.0) / (q - 1.0)
    } else {
        (0..=b).map(|k| Complex64::from_polar(1.0, k as f64 * theta)).sum()
    }
}

/// Damped winding sum `1 + 2 Σ_{n=1}^{n_max} e^{−εn²} cos(2πnx)`.
fn winding_weight(x: f64, n_max: u32, reg: f64) -> f64 {
    1.0 + 2.0 * (1..=n_max).map(|n| (-reg * (n * n) as f64).exp() * (2.0 * PI * n as f64 * x).cos()).sum::<f64>()
}

/// Action grid covering the support of the cutoff around `[lo, hi]`.
fn action_grid(lo: f64, hi: f64, quad_points: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (lo - RAMP, hi + RAMP);
    let panels = (((b - a) * quad_points as f64) / PANEL_ORDER as f64).ceil().max(1.0) as usize;
    composite_gl(a, b, panels, PANEL_ORDER)
}

/// Regularized trace on a grid, for `ℓ = 1`.
///
/// The angle integrals are done exactly on `[−Λ, Λ]`, leaving a cyclic chain
/// of Dirichlet kernels between consecutive action slices. The chain is
/// contracted one slice at a time, and the closing slice carries the damped
/// winding sum. Setting `n_max = 0` is allowed here for ablation.
pub fn numeric_path_integral(spec: &ChainSpec, h: &TorusElement, params: &PathIntegralParams) -> Result<Complex64> {
    if spec.ell() != 1 {
        return Err(Error::BudgetExceeded(format!("numeric path integral needs ell = 1, got {}", spec.ell())));
    }
    if h.eps.len() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: h.eps.len() });
    }
    let mut checked = *params;
    checked.n_max = checked.n_max.max(1);
    checked.check()?;
    if params.slices > MAX_SLICES {
        return Err(Error::BudgetExceeded(format!("slices must be <= {MAX_SLICES}, got {}", params.slices)));
    }
    if !polytope::is_positive(spec) {
        return Err(Error::NotPositive);
    }
    let (lo, hi) = (0.0, spec.l(0));
    let (x, w) = action_grid(lo, hi, params.quad_points);
    let m = x.len();
    if m > MAX_NODES {
        return Err(Error::BudgetExceeded(format!("action grid has {m} nodes, limit {MAX_NODES}")));
    }
    let lam = params.phi_cutoff;
    let nn = params.slices;
    let chi: Vec<f64> = x.iter().map(|&v| smooth_cutoff(v, lo, hi)).collect();
    let step: Vec<Complex64> = x
        .iter()
        .zip(&chi)
        .map(|(&v, &c)| c * Complex64::from_polar(1.0, h.eps[0] * v / nn as f64))
        .collect();
    let (sx, cx): (Vec<f64>, Vec<f64>) = x.iter().map(|&v| (lam * v).sin_cos()).unzip();
    // (K g)(x_a) = Σ_b D(x_a − x_b) w_b g_b with D the Dirichlet kernel
    let kernel_apply = |g: &[Complex64]| -> Vec<Complex64> {
        let wg: Vec<Complex64> = g.iter().zip(&w).map(|(g, w)| g * w).collect();
        (0..m)
            .into_par_iter()
            .map(|a| {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..m {
                    let d = if a == b {
                        lam / PI
                    } else {
                        (sx[a] * cx[b] - cx[a] * sx[b]) / (PI * (x[a] - x[b]))
                    };
                    acc += wg[b] * d;
                }
                acc
            })
            .collect()
    };
    let mut g = step.clone();
    for _ in 1..nn {
        let kg = kernel_apply(&g);
        g = step.iter().zip(&kg).map(|(s, k)| s * k).collect();
    }
    let kg = kernel_apply(&g);
    let z = (0..m)
        .map(|a| w[a] * chi[a] * winding_weight(x[a], params.n_max, params.regulator) * kg[a])
        .sum();
    Ok(z)
}

/// `Σ_{|n| ≤ n_max} e^{−εn²} ∫ χ(η) e^{−iη(2πn − H)} dη` with `χ` the smooth
/// cutoff around `[0, l]`. Tends to `Σ_{k=0}^{l} e^{ikH}`.
pub fn poisson_check(l: u32, h_coef: f64, n_max: u32, regulator: f64) -> Result<Complex64> {
    if l == 0 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    let lf = l as f64;
    let (xl, wl) = composite_gl(-RAMP, 0.0, 256, PANEL_ORDER);
    let (xr, wr) = composite_gl(lf, lf + RAMP, 256, PANEL_ORDER);
    let ramp_nodes: Vec<(f64, f64)> = xl
        .iter()
        .zip(&wl)
        .chain(xr.iter().zip(&wr))
        .map(|(&x, &w)| (x, w * smooth_cutoff(x, 0.0, lf)))
        .collect();
    let n_max = n_max as i64;
    let total = (-n_max..=n_max)
        .into_par_iter()
        .map(|n| {
            let omega = 2.0 * PI * n as f64 - h_coef;
            let flat = if omega == 0.0 {
                Complex64::new(lf, 0.0)
            } else {
                (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -omega * lf)) / Complex64::new(0.0, omega)
            };
            let ramps: Complex64 = ramp_nodes.iter().map(|&(x, w)| w * Complex64::from_polar(1.0, -omega * x)).sum();
            (-regulator * (n * n) as f64).exp() * (flat + ramps)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub lambda: f64,
    pub regulator: f64,
    pub n_max: u32,
    pub slices: usize,
    pub value: Complex64,
    pub abs_error: f64,
}

/// Runs [`numeric_path_integral`] at `levels` refinements of `base`: each level
/// doubles `Λ` and `n_max` and quarters the regulator.
pub fn convergence_sweep(spec: &ChainSpec, h: &TorusElement, base: &PathIntegralParams, levels: usize) -> Result<Vec<ConvergenceRow>> {
    let exact = partition::character(spec, h)?.value;
    (0..levels)
        .map(|k| {
            let s = (1u32 << k) as f64;
            let p = PathIntegralParams {
                phi_cutoff: base.phi_cutoff * s,
                regulator: base.regulator / (s * s),
                n_max: base.n_max << k,
                ..*base
            };
            let value = numeric_path_integral(spec, h, &p)?;
            Ok(ConvergenceRow {
                lambda: p.phi_cutoff,
                regulator: p.regulator,
                n_max: p.n_max,
                slices: p.slices,
                value,
                abs_error: (value - exact).norm(),
            })
        })
        .collect()
}

pub fn write_convergence_csv<W: Write>(w: &mut W, rows: &[ConvergenceRow]) -> std::io::Result<()> {
    writeln!(w, "lambda,eps,n_max,N,re,im,abs_error_vs_character")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            g12(r.lambda),
            g12(r.regulator),
            r.n_max,
            r.slices,
            g12(r.value.re),
            g12(r.value.im),
            g12(r.abs_error)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(l: i64) -> ChainSpec {
        ChainSpec::product(vec![l]).unwrap()
    }

    fn eps(e: f64) -> TorusElement {
        TorusElement::new(vec![e], 1.0).unwrap()
    }

    #[test]
    fn action_examples() {
        assert_eq!(discretized_action(&[2.0; 4], &[0.7; 4], 0.0).unwrap(), 0.0);
        let v = discretized_action(&[2.0; 4], &[0.7; 4], 1.5).unwrap();
        assert!((v + 3.0).abs() < 1e-14);
        let v = discretized_action(&[0.0, 1.0], &[0.0, 2.0 * PI], 0.0).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-14);
        assert!(discretized_action(&[0.0, 1.0], &[0.0], 0.0).is_err());

        let v = trace_action(&[1.0, 1.0], &[0.3], 0, 0.0).unwrap();
        assert_eq!(v, 0.0);
        let v = trace_action(&[1.0, 2.0, 1.0], &[0.3, 0.1], 1, -2.0).unwrap();
        let expect = 1.0 * (0.3 + 2.0 * PI) - 0.3 - 0.1 * 1.0 + 2.0 * 3.0 / 2.0;
        assert!((v - expect).abs() < 1e-14);
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(smooth_cutoff(1.0, 0.0, 2.0), 1.0);
        assert_eq!(smooth_cutoff(-0.5, 0.0, 2.0), 0.0);
        assert_eq!(smooth_cutoff(2.6, 0.0, 2.0), 0.0);
        assert!((smooth_cutoff(-0.25, 0.0, 2.0) - 0.5).abs() < 1e-15);
        assert!((smooth_cutoff(-0.1, 0.0, 2.0) + smooth_cutoff(-0.4, 0.0, 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduce_examples() {
        for n in [1, 4, 16] {
            assert_eq!(analytic_reduce(&line(2), &eps(0.0), n).unwrap(), Complex64::new(3.0, 0.0));
            let z = analytic_reduce(&line(2), &eps(PI / 2.0), n).unwrap();
            assert!((z - Complex64::i()).norm() < 1e-12);
        }
        let spec = ChainSpec::new(vec![3, 5], [(2, 1, 1)]).unwrap();
        let h = TorusElement::new(vec![0.3, 0.7], 1.0).unwrap();
        let z = analytic_reduce(&spec, &h, 3).unwrap();
        assert!((z - partition::character(&spec, &h).unwrap().value).norm() < 1e-12);
    }

    #[test]
    fn poisson_examples() {
        let z = poisson_check(2, 0.0, 200, 1e-4).unwrap();
        assert!((z - 3.0).norm() < 0.02);
        let z = poisson_check(2, PI / 2.0, 200, 1e-4).unwrap();
        assert!((z - Complex64::i()).norm() < 0.02);
        let z = poisson_check(1, 0.0, 200, 1e-4).unwrap();
        assert!((z - 2.0).norm() < 0.02);
    }

    #[test]
    fn coarse_path_integral() {
        let p = PathIntegralParams { phi_cutoff: 50.0, n_max: 10, regulator: 1.6e-2, quad_points: 200, slices: 1 };
        let z = numeric_path_integral(&line(1), &eps(1.0), &p).unwrap();
        let exact = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 1.0);
        assert!((z - exact).norm() < 0.05, "{z}");
        let zc = numeric_path_integral(&line(1), &eps(-1.0), &p).unwrap();
        assert!((zc - z.conj()).norm() < 1e-10);
    }

    #[test]
    fn budget_checks() {
        let p = PathIntegralParams { slices: 4, ..Default::default() };
        assert!(matches!(numeric_path_integral(&line(1), &eps(0.0), &p), Err(Error::BudgetExceeded(_))));
        let spec = ChainSpec::product(vec![1, 1]).unwrap();
        let h = TorusElement::zero(2);
        assert!(matches!(numeric_path_integral(&spec, &h, &Default::default()), Err(Error::BudgetExceeded(_))));
        let p = PathIntegralParams { quad_points: 10_000, ..Default::default() };
        assert!(matches!(numeric_path_integral(&line(3), &eps(0.0), &p), Err(Error::BudgetExceeded(_))));
    }
}
