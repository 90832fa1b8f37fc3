//! Log-radial coordinates on a chain: the twisted coordinates `τ̃` (one per
//! stage), the affine coordinates `τ`, the Kähler potential, the action
//! variables and their Jacobian.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::chain::ChainSpec;

/// Finite-difference step for [`hessian`].
pub const FD_STEP: f64 = 1e-5;

const CLAMP: f64 = 350.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TildeCoords {
    pub tau_tilde: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauCoords {
    pub tau: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionPoint {
    pub j: Vec<f64>,
}

impl TildeCoords {
    pub fn new(tau_tilde: Vec<f64>) -> Self {
        Self { tau_tilde }
    }
}

impl TauCoords {
    pub fn new(tau: Vec<f64>) -> Self {
        Self { tau }
    }
}

/// `a(r) = 1 + r²`.
pub fn a(r: f64) -> f64 {
    1.0 + r * r
}

/// `K(t) = log(1 + e^{2t})`.
pub fn k(t: f64) -> f64 {
    if t > 0.0 {
        2.0 * t + (-2.0 * t).exp().ln_1p()
    } else {
        (2.0 * t).exp().ln_1p()
    }
}

/// `J(t) = e^{2t} / (1 + e^{2t})`, the half-derivative of [`k`].
pub fn j(t: f64) -> f64 {
    if t > CLAMP {
        1.0
    } else if t < -CLAMP {
        0.0
    } else {
        1.0 / (1.0 + (-2.0 * t).exp())
    }
}

/// `K''(t) = 4 J (1 − J)`.
pub fn k_second(t: f64) -> f64 {
    let s = j(t);
    4.0 * s * (1.0 - s)
}

fn check_len(spec: &ChainSpec, n: usize) {
    assert_eq!(n, spec.ell(), "coordinate vector length must equal chain length");
}

/// `τ_i = τ̃_i + Σ_{j>i} (c_ji / 2) K(τ̃_j)`.
pub fn tau_from_tilde(spec: &ChainSpec, tt: &TildeCoords) -> TauCoords {
    let x = &tt.tau_tilde;
    check_len(spec, x.len());
    let ell = spec.ell();
    let kx: Vec<f64> = x.iter().map(|&t| k(t)).collect();
    let tau = (0..ell)
        .map(|i| x[i] + (i + 1..ell).map(|jj| 0.5 * spec.c(jj, i) * kx[jj]).sum::<f64>())
        .collect();
    TauCoords { tau }
}

/// Inverse of [`tau_from_tilde`], solved from the outermost stage inwards.
pub fn tilde_from_tau(spec: &ChainSpec, t: &TauCoords) -> TildeCoords {
    let tau = &t.tau;
    check_len(spec, tau.len());
    let ell = spec.ell();
    let mut x = vec![0.0; ell];
    let mut kx = vec![0.0; ell];
    for i in (0..ell).rev() {
        x[i] = tau[i] - (i + 1..ell).map(|jj| 0.5 * spec.c(jj, i) * kx[jj]).sum::<f64>();
        kx[i] = k(x[i]);
    }
    TildeCoords { tau_tilde: x }
}

/// `K_λ = Σ l_i K(τ̃_i)`.
pub fn kahler_potential(spec: &ChainSpec, tt: &TildeCoords) -> f64 {
    check_len(spec, tt.tau_tilde.len());
    tt.tau_tilde.iter().enumerate().map(|(i, &t)| spec.l(i) * k(t)).sum()
}

/// Action variables `J_j = J(τ̃_j)(l_j − Σ_{i<j} c_ji J_i)`.
pub fn action_vars(spec: &ChainSpec, tt: &TildeCoords) -> ActionPoint {
    check_len(spec, tt.tau_tilde.len());
    let mut out = Vec::with_capacity(spec.ell());
    for (jj, &t) in tt.tau_tilde.iter().enumerate() {
        let bound = spec.facet_bound(jj, &out);
        out.push(j(t) * bound);
    }
    ActionPoint { j: out }
}

/// Facet slacks `l_j − L_j` along the action point of `tt`.
pub fn facet_slacks(spec: &ChainSpec, tt: &TildeCoords) -> Vec<f64> {
    let jv = action_vars(spec, tt).j;
    (0..spec.ell()).map(|jj| spec.facet_bound(jj, &jv)).collect()
}

/// Exact Jacobian `∂J_j/∂τ_i` (row `j`, column `i`).
pub fn action_jacobian(spec: &ChainSpec, tt: &TildeCoords) -> DMatrix<f64> {
    let ell = spec.ell();
    let x = &tt.tau_tilde;
    check_len(spec, x.len());
    let js: Vec<f64> = x.iter().map(|&t| j(t)).collect();
    let slack = facet_slacks(spec, tt);
    // ∂J/∂τ̃ is lower triangular
    let mut dj = DMatrix::<f64>::zeros(ell, ell);
    for r in 0..ell {
        for col in 0..=r {
            let mut v = -js[r] * (0..r).map(|i| spec.c(r, i) * dj[(i, col)]).sum::<f64>();
            if col == r {
                v += 2.0 * js[r] * (1.0 - js[r]) * slack[r];
            }
            dj[(r, col)] = v;
        }
    }
    // ∂τ/∂τ̃ is upper unitriangular: U_ij = c_ji J(τ̃_j) for j > i
    let mut u = DMatrix::<f64>::identity(ell, ell);
    for i in 0..ell {
        for jj in i + 1..ell {
            u[(i, jj)] = spec.c(jj, i) * js[jj];
        }
    }
    // dj · U⁻¹, via Uᵀ X = djᵀ
    let xt = u
        .transpose()
        .solve_lower_triangular(&dj.transpose())
        .expect("unitriangular");
    xt.transpose()
}

/// `∂J_j/∂τ_i` at `(i, j)` by central differences with step [`FD_STEP`].
pub fn hessian(spec: &ChainSpec, t: &TauCoords) -> DMatrix<f64> {
    let ell = spec.ell();
    check_len(spec, t.tau.len());
    let mut h = DMatrix::<f64>::zeros(ell, ell);
    let mut p = t.clone();
    for i in 0..ell {
        p.tau[i] = t.tau[i] + FD_STEP;
        let plus = action_vars(spec, &tilde_from_tau(spec, &p)).j;
        p.tau[i] = t.tau[i] - FD_STEP;
        let minus = action_vars(spec, &tilde_from_tau(spec, &p)).j;
        p.tau[i] = t.tau[i];
        for jj in 0..ell {
            h[(i, jj)] = (plus[jj] - minus[jj]) / (2.0 * FD_STEP);
        }
    }
    h
}

/// `∏_j (l_j − L_j) · K''(τ̃_j) / 2`.
pub fn det_product(spec: &ChainSpec, tt: &TildeCoords) -> f64 {
    facet_slacks(spec, tt)
        .iter()
        .zip(&tt.tau_tilde)
        .map(|(s, &t)| s * 0.5 * k_second(t))
        .product()
}

/// `|det(hessian) − det_product| / max(1, |det_product|)`.
pub fn det_identity_residual(spec: &ChainSpec, t: &TauCoords) -> f64 {
    let det = hessian(spec, t).determinant();
    let prod = det_product(spec, &tilde_from_tau(spec, t));
    (det - prod).abs() / prod.abs().max(1.0)
}

/// Smallest eigenvalue of the symmetrized [`hessian`].
pub fn min_eigenvalue(spec: &ChainSpec, t: &TauCoords) -> f64 {
    let h = hessian(spec, t);
    let sym = (&h + h.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// Gradient of `K_λ ∘ tilde_from_tau` with respect to `τ`, halved, by central
/// differences. Used to check [`action_vars`].
pub fn half_gradient_fd(spec: &ChainSpec, t: &TauCoords, h: f64) -> Vec<f64> {
    let mut p = t.clone();
    (0..spec.ell())
        .map(|i| {
            p.tau[i] = t.tau[i] + h;
            let kp = kahler_potential(spec, &tilde_from_tau(spec, &p));
            p.tau[i] = t.tau[i] - h;
            let km = kahler_potential(spec, &tilde_from_tau(spec, &p));
            p.tau[i] = t.tau[i];
            0.5 * (kp - km) / (2.0 * h)
        })
        .collect()
}

/// Searches for a point where the Hessian has a non-positive eigenvalue.
///
/// Scans the grid `{−s, 0, s}^ℓ` in tilde coordinates for a ladder of scales
/// `s`; a negative facet slack shows up there as a negative eigenvalue.
/// Chains longer than 8 fall back to a seeded random scan.
pub fn find_indefinite_point(spec: &ChainSpec) -> Option<TauCoords> {
    let ell = spec.ell();
    let check = |x: Vec<f64>| {
        let t = tau_from_tilde(spec, &TildeCoords::new(x));
        (min_eigenvalue(spec, &t) <= 0.0).then_some(t)
    };
    if ell <= 8 {
        for s in [2.0, 3.0, 4.0, 6.0, 8.0] {
            let total = 3usize.pow(ell as u32);
            for code in 0..total {
                let mut c = code;
                let x = (0..ell)
                    .map(|_| {
                        let d = c % 3;
                        c /= 3;
                        (d as f64 - 1.0) * s
                    })
                    .collect();
                if let Some(t) = check(x) {
                    return Some(t);
                }
            }
        }
        None
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        (0..20_000).find_map(|_| {
            let s = [2.0, 4.0, 8.0][rng.gen_range(0..3)];
            check((0..ell).map(|_| rng.gen_range(-1i32..=1) as f64 * s).collect())
        })
    }
}
