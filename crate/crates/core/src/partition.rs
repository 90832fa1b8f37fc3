//! Quantum character as a sum over the lattice points of the twisted cube,
//! and the classical partition function as an integral over it.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::coords::{self, ActionPoint, TildeCoords};
use crate::error::{Error, Result};
use crate::fmt::g12;
use crate::polytope::{self, Estimate, Method};

/// `H = Σ ε_i N_i` together with an inverse temperature for the classical side.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    pub eps: Vec<f64>,
    pub beta: f64,
}

impl TorusElement {
    pub fn new(eps: Vec<f64>, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        if eps.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("non-finite epsilon".into()));
        }
        Ok(Self { eps, beta })
    }

    /// `H = 0` with `β = 1`.
    pub fn zero(ell: usize) -> Self {
        Self { eps: vec![0.0; ell], beta: 1.0 }
    }

    fn check(&self, spec: &ChainSpec) -> Result<()> {
        if self.eps.len() != spec.ell() {
            return Err(Error::DimensionMismatch { expected: spec.ell(), got: self.eps.len() });
        }
        Ok(())
    }

    /// `⟨η, H⟩ = Σ n_i ε_i`.
    pub fn pairing(&self, n: &[f64]) -> f64 {
        n.iter().zip(&self.eps).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterValue {
    pub value: Complex64,
    pub count: u64,
}

/// Sum of `f(n)` over the lattice points, visited in lexicographic order.
fn lattice_sum<T, F>(spec: &ChainSpec, zero: T, f: F) -> Result<(T, u64)>
where
    T: std::ops::AddAssign,
    F: Fn(&[i64]) -> T,
{
    fn walk<T: std::ops::AddAssign, F: Fn(&[i64]) -> T>(spec: &ChainSpec, n: &mut Vec<i64>, f: &F, acc: &mut T, count: &mut u64) {
        let j = n.len();
        if j == spec.ell() {
            *acc += f(n);
            *count += 1;
            return;
        }
        for v in 0..=spec.facet_bound_int(j, n) {
            n.push(v);
            walk(spec, n, f, acc, count);
            n.pop();
        }
    }
    if !polytope::is_positive(spec) {
        return Err(Error::NotPositive);
    }
    let (mut acc, mut count) = (zero, 0);
    walk(spec, &mut Vec::with_capacity(spec.ell()), &f, &mut acc, &mut count);
    Ok((acc, count))
}

/// `Z(iH) = Σ_{η ∈ Π} e^{i⟨η, H⟩}`.
pub fn character(spec: &ChainSpec, h: &TorusElement) -> Result<CharacterValue> {
    h.check(spec)?;
    let (value, count) = lattice_sum(spec, Complex64::new(0.0, 0.0), |n| {
        let phase: f64 = n.iter().zip(&h.eps).map(|(&a, b)| a as f64 * b).sum();
        Complex64::from_polar(1.0, phase)
    })?;
    Ok(CharacterValue { value, count })
}

/// `Σ_{η ∈ Π} e^{−β⟨η, H⟩}`.
pub fn quantum_z(spec: &ChainSpec, h: &TorusElement) -> Result<f64> {
    h.check(spec)?;
    let (v, _) = lattice_sum(spec, 0.0, |n| {
        let p: f64 = n.iter().zip(&h.eps).map(|(&a, b)| a as f64 * b).sum();
        (-h.beta * p).exp()
    })?;
    Ok(v)
}

/// `∫_Δ e^{−β⟨η, H⟩} dη` over the twisted cube `Δ`.
pub fn classical_z(spec: &ChainSpec, h: &TorusElement, method: Method) -> Result<Estimate> {
    h.check(spec)?;
    polytope::integrate(spec, |x| (-h.beta * h.pairing(x)).exp(), method)
}

/// Half-width of the `τ̃` box used by [`moment_image_sample`].
pub const SAMPLE_TAU_RANGE: f64 = 30.0;

/// Images under the action map of `τ̃` drawn uniformly from `[−30, 30]^ℓ`.
pub fn moment_image_sample(spec: &ChainSpec, samples: usize, seed: u64) -> Vec<ActionPoint> {
    let ell = spec.ell();
    let chunks = samples.div_ceil(polytope::MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = polytope::MC_CHUNK.min(samples - k * polytope::MC_CHUNK);
            (0..len)
                .map(|_| {
                    let x = (0..ell).map(|_| rng.gen_range(-SAMPLE_TAU_RANGE..=SAMPLE_TAU_RANGE)).collect();
                    coords::action_vars(spec, &TildeCoords::new(x))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Lattice sum against the integral, with no correction factor applied.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumClassicalReport {
    pub eps: Vec<f64>,
    pub beta: f64,
    pub quantum: f64,
    pub classical: f64,
    pub count: u64,
    pub volume: f64,
}

impl QuantumClassicalReport {
    pub fn gap(&self) -> f64 {
        self.quantum - self.classical
    }

    /// `key: value` lines.
    pub fn to_record(&self) -> String {
        let eps: Vec<String> = self.eps.iter().map(|&e| g12(e)).collect();
        let rows = [
            ("eps", eps.join(",")),
            ("beta", g12(self.beta)),
            ("quantum", g12(self.quantum)),
            ("classical", g12(self.classical)),
            ("gap_uncorrected", g12(self.gap())),
            ("lattice_points", self.count.to_string()),
            ("volume", g12(self.volume)),
            ("correction", "none (uncorrected)".into()),
        ];
        rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }
}

pub fn quantum_classical_report(spec: &ChainSpec, h: &TorusElement) -> Result<QuantumClassicalReport> {
    h.check(spec)?;
    let quantum = quantum_z(spec, h)?;
    let classical = classical_z(spec, h, Method::Quadrature)?.value;
    let count = polytope::lattice_count(spec)?;
    let volume = polytope::volume(spec, Method::Quadrature)?.value;
    Ok(QuantumClassicalReport { eps: h.eps.clone(), beta: h.beta, quantum, classical, count, volume })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub z: Complex64,
    pub z_classical: f64,
}

/// Character and classical partition function on `points` equally spaced
/// values of `ε_axis` across `[−π, π]`, other coordinates held at `h`.
pub fn sweep(spec: &ChainSpec, h: &TorusElement, axis: usize, points: usize, method: Method) -> Result<Vec<SweepRow>> {
    h.check(spec)?;
    if axis >= spec.ell() {
        return Err(Error::InvalidParameter(format!("axis {} out of range 1..={}", axis + 1, spec.ell())));
    }
    if points < 2 {
        return Err(Error::InvalidParameter("sweep needs at least 2 points".into()));
    }
    let pi = std::f64::consts::PI;
    (0..points)
        .map(|k| {
            let e = -pi + 2.0 * pi * k as f64 / (points - 1) as f64;
            let mut hk = h.clone();
            hk.eps[axis] = e;
            Ok(SweepRow {
                eps: e,
                z: character(spec, &hk)?.value,
                z_classical: classical_z(spec, &hk, method)?.value,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(w: &mut W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "eps,re_z,im_z,abs_z,z_classical")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", g12(r.eps), g12(r.z.re), g12(r.z.im), g12(r.z.norm()), g12(r.z_classical))?;
    }
    Ok(())
}
